//! Finite plane networks for the example families: `{p,q}` tessellation
//! balls, the quadrangulated tube, square-grid balls and layered
//! triangulations.

use crate::error::{Error, Result};
use crate::graph::PlaneNetwork;

/// Default cap on generated vertex counts.
pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TessellationSpec {
    pub p: usize,
    pub q: usize,
    pub depth: usize,
}

impl TessellationSpec {
    pub fn new(p: usize, q: usize, depth: usize) -> Self {
        Self { p, q, depth }
    }

    pub fn is_hyperbolic(&self) -> bool {
        (self.p as i64 - 2) * (self.q as i64 - 2) > 4
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || self.q < 3 {
            return Err(Error::InvalidSpec(format!(
                "p and q must be at least 3, got {{{},{}}}",
                self.p, self.q
            )));
        }
        if self.depth < 1 {
            return Err(Error::InvalidSpec("depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// A generated ball together with the layer of every vertex (root = 0).
#[derive(Debug, Clone)]
pub struct LayeredBall {
    pub network: PlaneNetwork,
    pub layer: Vec<usize>,
}

impl LayeredBall {
    pub fn depth(&self) -> usize {
        self.layer.iter().copied().max().unwrap_or(0)
    }

    /// Vertices with layer strictly below `depth`.
    pub fn vertices_below(&self, depth: usize) -> Vec<usize> {
        (0..self.layer.len())
            .filter(|&v| self.layer[v] < depth)
            .collect()
    }
}

/// Grows a disc by closing the flower of every frontier vertex, one layer
/// per step. `degree_of_layer(k)` is the target degree of layer-`k` vertices.
fn grow_disc(
    p: usize,
    depth: usize,
    cap: usize,
    degree_of_layer: impl Fn(usize) -> usize,
) -> Result<LayeredBall> {
    let mut layer = vec![0usize];
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut faces_at = vec![0usize];
    let new_vertex =
        |layer: &mut Vec<usize>, faces_at: &mut Vec<usize>, k: usize| -> Result<usize> {
            if layer.len() >= cap {
                return Err(Error::VertexCapExceeded { cap });
            }
            layer.push(k);
            faces_at.push(0);
            Ok(layer.len() - 1)
        };

    // root flower
    let q0 = degree_of_layer(0);
    let spokes: Vec<usize> = (0..q0)
        .map(|_| new_vertex(&mut layer, &mut faces_at, 1))
        .collect::<Result<_>>()?;
    let mut frontier = Vec::new();
    for j in 0..q0 {
        let (a, b) = (spokes[j], spokes[(j + 1) % q0]);
        let mut face = vec![0, a];
        frontier.push(a);
        for _ in 0..p - 3 {
            let x = new_vertex(&mut layer, &mut faces_at, 1)?;
            face.push(x);
            frontier.push(x);
        }
        face.push(b);
        faces.push(face);
    }

    for k in 1..depth {
        recount(&faces, &mut faces_at);
        let n = frontier.len();
        let mut edges_out = Vec::with_capacity(n);
        for &w in &frontier {
            let need = degree_of_layer(k) as i64 - faces_at[w] as i64 - 1;
            let min = if p == 3 { 2 } else { 0 };
            if need < min {
                return Err(Error::InvalidSpec(format!(
                    "layer {k} vertex {w} already has {} faces; cannot complete to degree {}",
                    faces_at[w],
                    degree_of_layer(k)
                )));
            }
            edges_out.push(need as usize);
        }
        // x[i] = new neighbours of frontier[i] in ccw order
        let mut x: Vec<Vec<usize>> = vec![Vec::new(); n];
        if p == 3 {
            let shared: Vec<usize> = (0..n)
                .map(|_| new_vertex(&mut layer, &mut faces_at, k + 1))
                .collect::<Result<_>>()?;
            for i in 0..n {
                let mut list = vec![shared[(i + n - 1) % n]];
                for _ in 0..edges_out[i] - 2 {
                    list.push(new_vertex(&mut layer, &mut faces_at, k + 1)?);
                }
                list.push(shared[i]);
                x[i] = list;
            }
        } else {
            for i in 0..n {
                x[i] = (0..edges_out[i])
                    .map(|_| new_vertex(&mut layer, &mut faces_at, k + 1))
                    .collect::<Result<_>>()?;
            }
        }
        let mut next_frontier = Vec::new();
        // complete vertices have no new edges; the face after a vertex with
        // new edges runs along the frontier to the next such vertex
        let start = (0..n)
            .find(|&i| !x[i].is_empty())
            .ok_or_else(|| Error::InvalidSpec(format!("layer {k} has no outgoing edges")))?;
        for i in (start..n + start)
            .map(|i| i % n)
            .filter(|&i| !x[i].is_empty())
        {
            let w = frontier[i];
            let xs = &x[i];
            // corner faces around w
            for j in 0..xs.len() - 1 {
                let mut face = vec![w, xs[j]];
                // for triangles the first new neighbour is shared with the
                // previous frontier vertex and already on the new frontier
                if p > 3 || j > 0 {
                    next_frontier.push(xs[j]);
                }
                for _ in 0..p - 3 {
                    let c = new_vertex(&mut layer, &mut faces_at, k + 1)?;
                    face.push(c);
                    next_frontier.push(c);
                }
                face.push(xs[j + 1]);
                faces.push(face);
            }
            let last = *xs.last().expect("at least one new edge");
            let mut next = (i + 1) % n;
            let mut face = vec![w];
            while x[next].is_empty() {
                face.push(frontier[next]);
                next = (next + 1) % n;
            }
            face.push(frontier[next]);
            face.reverse();
            face.push(last);
            if p == 3 {
                debug_assert_eq!(face.len(), 3);
                debug_assert_eq!(last, x[next][0]);
                next_frontier.push(last);
            } else {
                let fresh = p.checked_sub(face.len() + 1).ok_or_else(|| {
                    Error::InvalidSpec(format!(
                        "layer {k} face around vertex {w} exceeds {p} sides"
                    ))
                })?;
                next_frontier.push(last);
                for _ in 0..fresh {
                    let c = new_vertex(&mut layer, &mut faces_at, k + 1)?;
                    face.push(c);
                    next_frontier.push(c);
                }
                face.push(x[next][0]);
            }
            faces.push(face);
        }
        frontier = next_frontier;
    }
    let network = PlaneNetwork::from_faces(layer.len(), &faces)?;
    Ok(LayeredBall { network, layer })
}

fn recount(faces: &[Vec<usize>], faces_at: &mut [usize]) {
    faces_at.iter_mut().for_each(|c| *c = 0);
    for face in faces {
        for &v in face {
            faces_at[v] += 1;
        }
    }
}

/// Ball of the `{p,q}` tessellation around a root vertex (vertex 0).
pub fn tessellation_ball(spec: &TessellationSpec) -> Result<PlaneNetwork> {
    Ok(tessellation_ball_layered(spec, DEFAULT_VERTEX_CAP)?.network)
}

pub fn tessellation_ball_layered(spec: &TessellationSpec, cap: usize) -> Result<LayeredBall> {
    spec.validate()?;
    grow_disc(spec.p, spec.depth, cap, |_| spec.q)
}

/// Triangulated ball whose layers have degree 7 (rings) or 6 (bands):
/// layer 0 is a ring, then `band_lengths[0]` band layers, a ring,
/// `band_lengths[1]` band layers, and so on; rings after the schedule ends.
pub fn layered_triangulation(band_lengths: &[usize], depth: usize) -> Result<LayeredBall> {
    if depth < 1 {
        return Err(Error::InvalidSpec("depth must be at least 1".into()));
    }
    let mut degree = Vec::new();
    degree.push(7);
    for &b in band_lengths {
        degree.extend(std::iter::repeat_n(6, b));
        degree.push(7);
    }
    grow_disc(3, depth, DEFAULT_VERTEX_CAP, |k| {
        degree.get(k).copied().unwrap_or(7)
    })
}

/// `n x n` piece of the square lattice; vertex `(r, c)` is `r * n + c`.
pub fn grid_ball(n: usize) -> Result<PlaneNetwork> {
    if n < 2 {
        return Err(Error::InvalidSpec("grid needs n >= 2".into()));
    }
    let id = |r: usize, c: usize| r * n + c;
    let mut faces = Vec::new();
    for r in 0..n - 1 {
        for c in 0..n - 1 {
            faces.push(vec![id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)]);
        }
    }
    PlaneNetwork::from_faces(n * n, &faces)
}

/// Vertex id of `(ring, j)` in [`tube`].
pub fn tube_vertex(ring: usize, j: usize) -> usize {
    4 * ring + (j % 4)
}

/// Nested quadrilateral rings `(i, j)`, `0 <= i < n_rings`, `j` mod 4.
/// Radial edges have conductance 1 and ring edges conductance `c`.
pub fn tube(n_rings: usize, c: f64) -> Result<PlaneNetwork> {
    if n_rings < 2 {
        return Err(Error::InvalidSpec("tube needs at least 2 rings".into()));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "ring conductance must be positive, got {c}"
        )));
    }
    let mut faces = vec![(0..4).map(|j| tube_vertex(0, j)).collect::<Vec<_>>()];
    for i in 0..n_rings - 1 {
        for j in 0..4 {
            faces.push(vec![
                tube_vertex(i, j),
                tube_vertex(i + 1, j),
                tube_vertex(i + 1, j + 1),
                tube_vertex(i, j + 1),
            ]);
        }
    }
    PlaneNetwork::from_faces(4 * n_rings, &faces)?.map_conductances(|u, v| {
        if u / 4 == v / 4 {
            c
        } else {
            1.0
        }
    })
}

/// Vertex 0 inside the outer triangle 1, 2, 3.
pub fn tetrahedron() -> PlaneNetwork {
    PlaneNetwork::from_faces(4, &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]])
        .expect("tetrahedron")
}

pub fn cube() -> PlaneNetwork {
    tube(2, 1.0).expect("cube")
}

/// Vertex 0 and 5 are the poles; 1..=4 the equator.
pub fn octahedron() -> PlaneNetwork {
    let faces = vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 1],
        vec![5, 2, 1],
        vec![5, 3, 2],
        vec![5, 4, 3],
        vec![5, 1, 4],
    ];
    PlaneNetwork::from_faces(6, &faces).expect("octahedron")
}

/// Triangle with conductances `c` on edges (0,1), (1,2), (2,0).
pub fn triangle(c: [f64; 3]) -> PlaneNetwork {
    let net = PlaneNetwork::from_faces(3, &[vec![0, 1, 2]]).expect("triangle");
    net.map_conductances(|u, v| match (u.min(v), u.max(v)) {
        (0, 1) => c[0],
        (1, 2) => c[1],
        _ => c[2],
    })
    .expect("positive conductances")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> Result<PlaneNetwork> {
    if n < 3 {
        return Err(Error::InvalidSpec("cycle needs n >= 3".into()));
    }
    PlaneNetwork::from_faces(n, &[(0..n).collect()])
}

/// Path `0 - 1 - ... - n` with unit conductances.
pub fn path(n: usize) -> Result<PlaneNetwork> {
    if n < 1 {
        return Err(Error::InvalidSpec("path needs at least one edge".into()));
    }
    let rotation: Vec<Vec<(usize, usize)>> = (0..=n)
        .map(|v| {
            let mut l = Vec::new();
            if v > 0 {
                l.push((v - 1, v - 1));
            }
            if v < n {
                l.push((v + 1, v));
            }
            l
        })
        .collect();
    PlaneNetwork::from_rotation_system(&rotation, vec![1.0; n], Default::default())
}

/// `rows x cols` grid of vertices.
pub fn grid_rect(rows: usize, cols: usize) -> Result<PlaneNetwork> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidSpec(
            "grid needs at least 2x2 vertices".into(),
        ));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut faces = Vec::new();
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            faces.push(vec![id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)]);
        }
    }
    PlaneNetwork::from_faces(rows * cols, &faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electrical::matrix_tree_weight;

    fn interior_check(ball: &LayeredBall, p: usize, q: usize) {
        let net = &ball.network;
        let depth = ball.depth();
        for v in 0..net.vertex_count() {
            if ball.layer[v] + 2 <= depth {
                assert_eq!(net.degree(v), q, "vertex {v} in layer {}", ball.layer[v]);
            }
        }
        for f in 0..net.face_count() {
            let vs = net.face_vertices(f);
            if vs.iter().all(|&v| ball.layer[v] + 2 <= depth) {
                assert_eq!(vs.len(), p);
            }
        }
        assert_eq!(net.euler_characteristic(), 2);
    }

    #[test]
    fn heptagonal_triangulation_depth_one() {
        let b = tessellation_ball_layered(&TessellationSpec::new(3, 7, 1), 100).unwrap();
        assert_eq!(b.network.vertex_count(), 8);
        assert_eq!(b.network.degree(0), 7);
    }

    #[test]
    fn heptagonal_layer_sizes() {
        let b = tessellation_ball_layered(&TessellationSpec::new(3, 7, 4), 10_000).unwrap();
        let mut counts = vec![0; 5];
        for &l in &b.layer {
            counts[l] += 1;
        }
        assert_eq!(counts, vec![1, 7, 21, 56, 147]);
        interior_check(&b, 3, 7);
    }

    #[test]
    fn square_pentagonal_faces() {
        let b = tessellation_ball_layered(&TessellationSpec::new(4, 5, 1), 100).unwrap();
        for f in 0..b.network.face_count() {
            if f != b.network.outer_face() {
                assert_eq!(b.network.face_degree(f), 4);
            }
        }
        let b = tessellation_ball_layered(&TessellationSpec::new(4, 5, 4), 100_000).unwrap();
        interior_check(&b, 4, 5);
        let b = tessellation_ball_layered(&TessellationSpec::new(5, 4, 3), 100_000).unwrap();
        interior_check(&b, 5, 4);
        let b = tessellation_ball_layered(&TessellationSpec::new(3, 8, 3), 100_000).unwrap();
        interior_check(&b, 3, 8);
    }

    #[test]
    fn cubic_tessellations_have_complete_frontier_vertices() {
        for (p, depth) in [(7, 4), (8, 4), (12, 3)] {
            let b =
                tessellation_ball_layered(&TessellationSpec::new(p, 3, depth), 100_000).unwrap();
            interior_check(&b, p, 3);
            assert_eq!(b.network.euler_characteristic(), 2);
        }
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let err = tessellation_ball_layered(&TessellationSpec::new(3, 7, 6), 500);
        assert!(matches!(err, Err(Error::VertexCapExceeded { cap: 500 })));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(tessellation_ball(&TessellationSpec::new(2, 7, 3)).is_err());
        assert!(tessellation_ball(&TessellationSpec::new(3, 7, 0)).is_err());
        assert!(!TessellationSpec::new(4, 4, 3).is_hyperbolic());
        assert!(TessellationSpec::new(3, 7, 3).is_hyperbolic());
    }

    #[test]
    fn tube_counts_and_weights() {
        let t = tube(2, 0.5).unwrap();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.face_count()),
            (8, 12, 6)
        );
        let t = tube(6, 1.0).unwrap();
        assert!(t.conductances().iter().all(|&c| c == 1.0));
        for i in 1..5 {
            for j in 0..4 {
                assert_eq!(t.degree(tube_vertex(i, j)), 4);
            }
        }
    }

    #[test]
    fn tube_rotation_is_automorphism() {
        let t = tube(5, 3.0).unwrap();
        let shift = |v: usize| tube_vertex(v / 4, v % 4 + 1);
        for e in 0..t.edge_count() {
            let (u, v) = t.endpoints(e);
            let d = t
                .find_dart(shift(u), shift(v))
                .expect("shifted edge exists");
            assert_eq!(t.conductance(t.edge_of(d)), t.conductance(e));
        }
    }

    #[test]
    fn layered_zero_bands_matches_tessellation() {
        let a = layered_triangulation(&[0, 0, 0], 4).unwrap();
        let b = tessellation_ball(&TessellationSpec::new(3, 7, 4)).unwrap();
        assert_eq!(a.network, b);
    }

    #[test]
    fn layered_schedule_degrees() {
        let b = layered_triangulation(&[1, 2, 3], 9).unwrap();
        let depth = b.depth();
        for v in 0..b.network.vertex_count() {
            if b.layer[v] < depth {
                let d = b.network.degree(v);
                assert!(d == 6 || d == 7, "degree {d}");
            }
        }
        assert_eq!(b.network.euler_characteristic(), 2);
    }

    #[test]
    fn grid_examples() {
        let g = grid_ball(2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = grid_ball(3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        assert!((matrix_tree_weight(&g) - 192.0).abs() < 1e-9);
    }
}
