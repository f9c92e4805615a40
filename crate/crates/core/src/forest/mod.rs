//! Spanning forests: Wilson sampling, forest queries and an exact
//! enumeration oracle for small networks.

mod enumerate;
pub mod format;
mod wilson;

use crate::error::{Error, Result};
use crate::graph::{DartId, EdgeId, PlaneNetwork, UnionFind, VertexId};

pub use enumerate::{
    check_spatial_markov, dual_law_discrepancy, enumerate_trees, enumerate_trees_capped,
    TreeDistribution, DEFAULT_ENUMERATION_CAP,
};
pub use wilson::{fusf_sample, loop_erase, wilson_ust, wusf_sample, Sampler, WalkConfig};

/// A spanning forest of a host network, oriented towards component roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    included: Vec<bool>,
    /// Dart from each vertex towards its parent; `None` at roots.
    parent: Vec<Option<DartId>>,
    root: Vec<VertexId>,
    depth: Vec<usize>,
    /// Vertex left out of the forest (the wired boundary after removal).
    removed: Option<VertexId>,
    /// Roots whose tree edge to the removed vertex was deleted.
    wired_root: Vec<bool>,
}

impl SpanningForest {
    /// Builds the forest from parent darts; `removed` is detached with all
    /// its edges.
    pub(crate) fn from_parents(
        net: &PlaneNetwork,
        mut parent: Vec<Option<DartId>>,
        removed: Option<VertexId>,
    ) -> Self {
        let n = net.vertex_count();
        let mut wired_root = vec![false; n];
        if let Some(b) = removed {
            parent[b] = None;
            for v in 0..n {
                if let Some(d) = parent[v] {
                    if net.target(d) == b {
                        parent[v] = None;
                        wired_root[v] = true;
                    }
                }
            }
        }
        let mut included = vec![false; net.edge_count()];
        for d in parent.iter().flatten() {
            included[net.edge_of(*d)] = true;
        }
        let (root, depth) = roots_and_depths(net, &parent);
        Self {
            included,
            parent,
            root,
            depth,
            removed,
            wired_root,
        }
    }

    /// Forest with the given edges, rooted at the smallest vertex of each
    /// component. Fails on cycles.
    pub fn from_edges(net: &PlaneNetwork, edges: &[EdgeId]) -> Result<Self> {
        let n = net.vertex_count();
        let mut uf = UnionFind::new(n);
        let mut adj: Vec<Vec<DartId>> = vec![Vec::new(); n];
        for &e in edges {
            if e >= net.edge_count() {
                return Err(Error::NotAnEdge(format!("edge id {e}")));
            }
            let (u, v) = net.endpoints(e);
            if !uf.union(u, v) {
                return Err(Error::InvalidQuery(format!("edge {e} closes a cycle")));
            }
            adj[u].push(2 * e);
            adj[v].push(2 * e + 1);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &d in &adj[u] {
                    let w = net.target(d);
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(d ^ 1);
                        stack.push(w);
                    }
                }
            }
        }
        Ok(Self::from_parents(net, parent, None))
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.included[e]
    }

    /// Included edge ids in increasing order.
    pub fn edges(&self) -> Vec<EdgeId> {
        (0..self.included.len())
            .filter(|&e| self.included[e])
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }

    pub fn parent_dart(&self, v: VertexId) -> Option<DartId> {
        self.parent[v]
    }

    /// Root of the component of `v`, used as its component label.
    pub fn component(&self, v: VertexId) -> VertexId {
        self.root[v]
    }

    pub fn removed_vertex(&self) -> Option<VertexId> {
        self.removed
    }

    /// Whether `v` is a root that was attached to the removed vertex.
    pub fn is_wired_root(&self, v: VertexId) -> bool {
        self.wired_root[v]
    }

    pub fn component_count(&self) -> usize {
        (0..self.root.len())
            .filter(|&v| self.root[v] == v && Some(v) != self.removed)
            .count()
    }

    /// Acyclic, and a single tree on the non-removed vertices unless
    /// `allow_many` is set.
    pub fn check(&self, net: &PlaneNetwork, allow_many: bool) -> bool {
        let mut uf = UnionFind::new(net.vertex_count());
        for e in self.edges() {
            let (u, v) = net.endpoints(e);
            if Some(u) == self.removed || Some(v) == self.removed || !uf.union(u, v) {
                return false;
            }
        }
        allow_many || self.component_count() == 1
    }

    /// Edges of the unique forest path from `x` to `y`, in order.
    pub fn tree_path(&self, net: &PlaneNetwork, x: VertexId, y: VertexId) -> Result<Vec<EdgeId>> {
        if self.root[x] != self.root[y] || Some(x) == self.removed || Some(y) == self.removed {
            return Err(Error::DifferentComponents(x, y));
        }
        let (mut a, mut b) = (x, y);
        let (mut up, mut down) = (Vec::new(), Vec::new());
        while self.depth[a] > self.depth[b] {
            let d = self.parent[a].expect("non-root");
            up.push(net.edge_of(d));
            a = net.target(d);
        }
        while self.depth[b] > self.depth[a] {
            let d = self.parent[b].expect("non-root");
            down.push(net.edge_of(d));
            b = net.target(d);
        }
        while a != b {
            let (da, db) = (
                self.parent[a].expect("non-root"),
                self.parent[b].expect("non-root"),
            );
            up.push(net.edge_of(da));
            down.push(net.edge_of(db));
            a = net.target(da);
            b = net.target(db);
        }
        down.reverse();
        up.extend(down);
        Ok(up)
    }

    /// Vertices on the far side of `e` from the root: empty if `e` is not
    /// in the forest. `outer` marks the vertices whose presence in the past
    /// sets the boundary flag.
    pub fn past_of_edge(&self, net: &PlaneNetwork, e: EdgeId, outer: &[bool]) -> Past {
        if !self.included[e] {
            return Past::default();
        }
        let (u, v) = net.endpoints(e);
        let child = if self.parent[u].map(|d| net.edge_of(d)) == Some(e) {
            u
        } else {
            v
        };
        let mut vertices = vec![child];
        let mut i = 0;
        while i < vertices.len() {
            let w = vertices[i];
            for d in net.darts_around(w) {
                let x = net.target(d);
                if self.parent[x] == Some(d ^ 1) {
                    vertices.push(x);
                }
            }
            i += 1;
        }
        let touches_boundary = vertices.iter().any(|&w| outer[w]);
        Past {
            vertices,
            touches_boundary,
        }
    }
}

fn roots_and_depths(net: &PlaneNetwork, parent: &[Option<DartId>]) -> (Vec<VertexId>, Vec<usize>) {
    let n = parent.len();
    let mut root = vec![usize::MAX; n];
    let mut depth = vec![0; n];
    let mut chain = Vec::new();
    for s in 0..n {
        let mut v = s;
        while root[v] == usize::MAX {
            match parent[v] {
                Some(d) => {
                    chain.push(v);
                    v = net.target(d);
                }
                None => {
                    root[v] = v;
                    depth[v] = 0;
                }
            }
        }
        while let Some(w) = chain.pop() {
            let p = net.target(parent[w].expect("chained vertex has a parent"));
            root[w] = root[p];
            depth[w] = depth[p] + 1;
        }
    }
    (root, depth)
}

/// The past of an edge together with the boundary-touching flag.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Past {
    pub vertices: Vec<VertexId>,
    pub touches_boundary: bool,
}

impl Past {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Dual edge ids (equal to primal ids) of the edges outside `tree`.
pub fn dual_complement(tree: &SpanningForest) -> Vec<EdgeId> {
    (0..tree.included.len())
        .filter(|&e| !tree.included[e])
        .collect()
}

/// Whether `edges` form a spanning tree of `net`.
pub fn is_spanning_tree(net: &PlaneNetwork, edges: &[EdgeId]) -> bool {
    if edges.len() + 1 != net.vertex_count() {
        return false;
    }
    let mut uf = UnionFind::new(net.vertex_count());
    edges.iter().all(|&e| {
        let (u, v) = net.endpoints(e);
        uf.union(u, v)
    })
}
