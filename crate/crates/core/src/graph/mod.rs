//! Plane networks stored as combinatorial maps.
//!
//! A [`PlaneNetwork`] is a rotation system: every undirected edge `e` owns the
//! two darts `2e` (tail to head) and `2e + 1` (head to tail), and `next` gives
//! the counterclockwise successor of a dart around its origin. The face of a
//! dart is the face on its left; faces are the orbits of `d -> twin(next(d))`
//! and the counterclockwise boundary walk of a face is `d -> prev(twin(d))`.

mod build;
mod edit;
pub mod format;
mod ops;

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use ops::{
    geometry_bound, is_polyhedral, is_polyhedral_with_apex, star_triangulation, subdivide_and_trim,
    wired_truncation, GeometryBound, NodeClass, StarTriangulation, Subdivision, Truncation,
};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type DartId = usize;
pub type FaceId = usize;

/// A ccw rotation entry: `(neighbour, edge id)`.
pub type RotationEntry = (VertexId, EdgeId);

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneNetwork {
    vertex_count: usize,
    origin: Vec<VertexId>,
    next: Vec<DartId>,
    prev: Vec<DartId>,
    first_dart: Vec<DartId>,
    conductance: Vec<f64>,
    face_of: Vec<FaceId>,
    face_dart: Vec<DartId>,
    outer_face: FaceId,
    boundary_vertex: Option<VertexId>,
}

/// Selects the outer face when building from a rotation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OuterFace {
    /// Face of largest degree, lowest id on ties.
    #[default]
    Largest,
    /// The face with this id (ids follow dart order).
    Face(FaceId),
    /// The face on the left of the dart leaving `vertex` along `edge`.
    LeftOf { vertex: VertexId, edge: EdgeId },
}

impl PlaneNetwork {
    /// Builds a network from per-vertex counterclockwise `(neighbour, edge)`
    /// lists. Every edge id in `0..conductance.len()` must appear exactly twice.
    pub fn from_rotation_system(
        rotation: &[Vec<RotationEntry>],
        conductance: Vec<f64>,
        outer: OuterFace,
    ) -> Result<Self> {
        build::from_rotation_system(rotation, conductance, outer)
    }

    /// Builds a network from counterclockwise face cycles. If some directed
    /// edges are unmatched they bound the outer face; otherwise the last face
    /// listed is the outer one. Conductances default to 1.
    pub fn from_faces(vertex_count: usize, faces: &[Vec<VertexId>]) -> Result<Self> {
        build::from_faces(vertex_count, faces)
    }

    pub fn with_conductances(mut self, conductance: Vec<f64>) -> Result<Self> {
        if conductance.len() != self.edge_count() {
            return Err(Error::InconsistentRotation(format!(
                "expected {} conductances, got {}",
                self.edge_count(),
                conductance.len()
            )));
        }
        build::check_conductances(&conductance)?;
        self.conductance = conductance;
        Ok(self)
    }

    /// Sets every edge's conductance from its endpoints.
    pub fn map_conductances(self, mut f: impl FnMut(VertexId, VertexId) -> f64) -> Result<Self> {
        let c = (0..self.edge_count())
            .map(|e| {
                let (u, v) = self.endpoints(e);
                f(u, v)
            })
            .collect();
        self.with_conductances(c)
    }

    pub(crate) fn with_boundary(mut self, boundary: Option<VertexId>) -> Self {
        self.boundary_vertex = boundary;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.conductance.len()
    }

    pub fn dart_count(&self) -> usize {
        self.origin.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_dart.len()
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer_face
    }

    pub fn boundary_vertex(&self) -> Option<VertexId> {
        self.boundary_vertex
    }

    #[inline]
    pub fn origin(&self, d: DartId) -> VertexId {
        self.origin[d]
    }

    #[inline]
    pub fn target(&self, d: DartId) -> VertexId {
        self.origin[d ^ 1]
    }

    #[inline]
    pub fn twin(&self, d: DartId) -> DartId {
        d ^ 1
    }

    #[inline]
    pub fn next(&self, d: DartId) -> DartId {
        self.next[d]
    }

    #[inline]
    pub fn prev(&self, d: DartId) -> DartId {
        self.prev[d]
    }

    #[inline]
    pub fn edge_of(&self, d: DartId) -> EdgeId {
        d >> 1
    }

    /// Face on the left of `d`.
    #[inline]
    pub fn face_of(&self, d: DartId) -> FaceId {
        self.face_of[d]
    }

    /// Successor of `d` in the counterclockwise walk around its left face.
    #[inline]
    pub fn face_next(&self, d: DartId) -> DartId {
        self.prev[d ^ 1]
    }

    #[inline]
    pub fn conductance(&self, e: EdgeId) -> f64 {
        self.conductance[e]
    }

    pub fn conductances(&self) -> &[f64] {
        &self.conductance
    }

    /// `(tail, head)` of edge `e`.
    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.origin[2 * e], self.origin[2 * e + 1])
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Darts leaving `v` in counterclockwise order.
    pub fn darts_around(&self, v: VertexId) -> DartCycle<'_> {
        let start = self.first_dart[v];
        DartCycle {
            net: self,
            start,
            current: Some(start),
            step: Step::Vertex,
        }
    }

    /// Darts of face `f` in counterclockwise boundary order.
    pub fn face_darts(&self, f: FaceId) -> DartCycle<'_> {
        let start = self.face_dart[f];
        DartCycle {
            net: self,
            start,
            current: Some(start),
            step: Step::Face,
        }
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.darts_around(v).count()
    }

    pub fn face_degree(&self, f: FaceId) -> usize {
        self.face_darts(f).count()
    }

    pub fn face_vertices(&self, f: FaceId) -> Vec<VertexId> {
        self.face_darts(f).map(|d| self.origin(d)).collect()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.darts_around(v).map(move |d| self.target(d))
    }

    /// Sum of conductances of non-loop edges at `v`.
    pub fn vertex_conductance(&self, v: VertexId) -> f64 {
        self.darts_around(v)
            .filter(|&d| !self.is_loop(self.edge_of(d)))
            .map(|d| self.conductance(self.edge_of(d)))
            .sum()
    }

    /// Dart from `u` to `v`, if the two are adjacent.
    pub fn find_dart(&self, u: VertexId, v: VertexId) -> Option<DartId> {
        self.darts_around(u).find(|&d| self.target(d) == v)
    }

    /// Counterclockwise `(neighbour, edge)` lists, suitable for
    /// [`PlaneNetwork::from_rotation_system`].
    pub fn rotation_system(&self) -> Vec<Vec<RotationEntry>> {
        (0..self.vertex_count)
            .map(|v| {
                self.darts_around(v)
                    .map(|d| (self.target(d), self.edge_of(d)))
                    .collect()
            })
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Vertices reachable from `start` without entering `blocked`.
    pub fn component_from(&self, start: VertexId, blocked: &[bool]) -> Vec<VertexId> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for w in self.neighbors(u) {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Breadth-first graph distance from `root`.
    pub fn bfs_layers(&self, root: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Network with the same map and conductances `1/c(e)` on the dual.
    /// Dual vertex `f` is face `f`; dual edge `e` crosses primal edge `e`
    /// from right to left.
    pub fn dual(&self) -> PlaneNetwork {
        let rotation: Vec<Vec<RotationEntry>> = (0..self.face_count())
            .map(|f| {
                self.face_darts(f)
                    .map(|d| (self.face_of(d ^ 1), self.edge_of(d)))
                    .collect()
            })
            .collect();
        let conductance = self.conductance.iter().map(|c| 1.0 / c).collect();
        PlaneNetwork::from_rotation_system(&rotation, conductance, OuterFace::Largest)
            .expect("dual of a valid plane network is a valid plane network")
    }

    /// Orientation-preserving map isomorphism test (conductances ignored).
    pub fn is_isomorphic(&self, other: &PlaneNetwork) -> bool {
        if self.vertex_count != other.vertex_count
            || self.edge_count() != other.edge_count()
            || self.face_count() != other.face_count()
        {
            return false;
        }
        let n = self.dart_count();
        if n == 0 {
            return true;
        }
        'start: for s in 0..n {
            let mut map = vec![usize::MAX; n];
            let mut vmap = vec![usize::MAX; self.vertex_count];
            map[0] = s;
            let mut stack = vec![0usize];
            while let Some(d) = stack.pop() {
                let image = map[d];
                let (a, b) = (self.origin(d), other.origin(image));
                if vmap[a] == usize::MAX {
                    vmap[a] = b;
                } else if vmap[a] != b {
                    continue 'start;
                }
                for (x, y) in [(d ^ 1, image ^ 1), (self.next(d), other.next(image))] {
                    if map[x] == usize::MAX {
                        map[x] = y;
                        stack.push(x);
                    } else if map[x] != y {
                        continue 'start;
                    }
                }
            }
            let mut hit = vec![false; n];
            for &m in &map {
                if m == usize::MAX || hit[m] {
                    continue 'start;
                }
                hit[m] = true;
            }
            return true;
        }
        false
    }
}

#[derive(Clone, Copy)]
enum Step {
    Vertex,
    Face,
}

/// Iterator over a cyclic dart sequence.
pub struct DartCycle<'a> {
    net: &'a PlaneNetwork,
    start: DartId,
    current: Option<DartId>,
    step: Step,
}

impl Iterator for DartCycle<'_> {
    type Item = DartId;

    fn next(&mut self) -> Option<DartId> {
        let d = self.current?;
        let n = match self.step {
            Step::Vertex => self.net.next(d),
            Step::Face => self.net.face_next(d),
        };
        self.current = if n == self.start { None } else { Some(n) };
        Some(d)
    }
}

/// Minimal union-find used across modules.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
