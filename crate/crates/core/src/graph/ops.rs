use std::collections::{HashMap, HashSet, VecDeque};

use super::edit::MapEditor;
use super::{EdgeId, FaceId, OuterFace, PlaneNetwork, RotationEntry, VertexId};
use crate::error::{Error, Result};

/// Maxima entering the local-geometry constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryBound {
    pub max_degree: usize,
    pub max_codegree: usize,
    pub max_conductance: f64,
    pub max_resistance: f64,
    pub combined_m: f64,
}

/// Degrees over all vertices, codegrees over all faces except the outer one.
pub fn geometry_bound(net: &PlaneNetwork) -> GeometryBound {
    let max_degree = (0..net.vertex_count())
        .map(|v| net.degree(v))
        .max()
        .unwrap_or(0);
    let max_codegree = (0..net.face_count())
        .filter(|&f| f != net.outer_face() || net.face_count() == 1)
        .map(|f| net.face_degree(f))
        .max()
        .unwrap_or(0);
    let max_conductance = net.conductances().iter().cloned().fold(0.0, f64::max);
    let max_resistance = net
        .conductances()
        .iter()
        .map(|c| 1.0 / c)
        .fold(0.0, f64::max);
    GeometryBound {
        max_degree,
        max_codegree,
        max_conductance,
        max_resistance,
        combined_m: (max_degree as f64)
            .max(max_codegree as f64)
            .max(max_conductance)
            .max(max_resistance),
    }
}

fn simple_adjacency(net: &PlaneNetwork) -> Option<Vec<Vec<usize>>> {
    let mut seen = HashSet::new();
    let mut adj = vec![Vec::new(); net.vertex_count()];
    for e in 0..net.edge_count() {
        let (u, v) = net.endpoints(e);
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            return None;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    Some(adj)
}

/// Checks that the faces, given as vertex cycles, pairwise meet in nothing,
/// one vertex, or one common edge. For a simple connected plane graph whose
/// faces are all simple cycles this is equivalent to 3-connectivity.
/// Vertex `skip` is left out of the pair count.
fn faces_meet_properly(n: usize, faces: &[Vec<usize>], skip: usize) -> bool {
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = HashSet::new();
    for (i, f) in faces.iter().enumerate() {
        let mut seen = HashSet::with_capacity(f.len());
        for (j, &v) in f.iter().enumerate() {
            if !seen.insert(v) {
                return false;
            }
            let w = f[(j + 1) % f.len()];
            edges.insert((i, v.min(w), v.max(w)));
            if v != skip {
                around[v].push(i);
            }
        }
    }
    let mut shared: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (v, fs) in around.iter().enumerate() {
        for a in 0..fs.len() {
            for b in a + 1..fs.len() {
                let key = (fs[a].min(fs[b]), fs[a].max(fs[b]));
                let common = shared.entry(key).or_default();
                common.push(v);
                if common.len() > 2 {
                    return false;
                }
            }
        }
    }
    shared.into_iter().all(|((f, g), common)| {
        if common.len() < 2 {
            return true;
        }
        let (u, w) = (common[0].min(common[1]), common[0].max(common[1]));
        edges.contains(&(f, u, w)) && edges.contains(&(g, u, w))
    })
}

fn face_cycles(net: &PlaneNetwork) -> Vec<Vec<usize>> {
    (0..net.face_count())
        .map(|f| net.face_vertices(f))
        .collect()
}

fn is_connected(net: &PlaneNetwork) -> bool {
    net.vertex_count() > 0
        && net
            .component_from(0, &vec![false; net.vertex_count()])
            .len()
            == net.vertex_count()
}

/// Simple, at least four vertices, and no pair of vertices disconnects it.
pub fn is_polyhedral(net: &PlaneNetwork) -> bool {
    let n = net.vertex_count();
    n >= 4
        && simple_adjacency(net).is_some()
        && is_connected(net)
        && faces_meet_properly(n, &face_cycles(net), usize::MAX)
}

/// Polyhedral after adding one vertex inside the outer face joined to every
/// outer vertex. This admits finite balls of tilings, whose boundary may
/// carry vertices of degree two, while still rejecting interior cut pairs.
pub fn is_polyhedral_with_apex(net: &PlaneNetwork) -> bool {
    let n = net.vertex_count();
    if n < 3 || simple_adjacency(net).is_none() || !is_connected(net) {
        return false;
    }
    let outer = net.outer_face();
    let boundary = net.face_vertices(outer);
    if boundary.len() < 3 {
        return false;
    }
    let mut faces: Vec<Vec<usize>> = (0..net.face_count())
        .filter(|&f| f != outer)
        .map(|f| net.face_vertices(f))
        .collect();
    let apex = n;
    for i in 0..boundary.len() {
        faces.push(vec![apex, boundary[i], boundary[(i + 1) % boundary.len()]]);
    }
    // a repeated outer vertex would double an apex edge
    let distinct: HashSet<_> = boundary.iter().collect();
    distinct.len() == boundary.len() && faces_meet_properly(n + 1, &faces, apex)
}

/// Result of wiring everything outside a retained vertex set.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub network: PlaneNetwork,
    /// New vertex id to original id; `None` for the wired vertex.
    pub vertex_to_original: Vec<Option<VertexId>>,
    /// Original id to new id (the wired vertex for wired-away vertices).
    pub original_to_vertex: Vec<VertexId>,
    /// New edge id to original edge id.
    pub edge_to_original: Vec<EdgeId>,
}

/// Glues every vertex outside `retained` into a single boundary vertex and
/// drops the self-loops this creates. Parallel edges to the boundary vertex
/// are kept.
pub fn wired_truncation(net: &PlaneNetwork, retained: &[VertexId]) -> Result<Truncation> {
    let n = net.vertex_count();
    if retained.is_empty() {
        return Err(Error::InvalidVertexSet("retained set is empty".into()));
    }
    let mut keep = vec![false; n];
    for &v in retained {
        if v >= n {
            return Err(Error::InvalidVertexSet(format!("vertex {v} out of range")));
        }
        keep[v] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    let blocked: Vec<bool> = keep.iter().map(|k| !k).collect();
    if net.component_from(kept[0], &blocked).len() != kept.len() {
        return Err(Error::InvalidVertexSet(
            "retained set does not induce a connected subgraph".into(),
        ));
    }
    if kept.len() == n {
        return Ok(Truncation {
            network: net.clone().with_boundary(None),
            vertex_to_original: (0..n).map(Some).collect(),
            original_to_vertex: (0..n).collect(),
            edge_to_original: (0..net.edge_count()).collect(),
        });
    }

    let mut editor = MapEditor::new(net);
    // contract each component of the complement along a BFS tree
    let mut seen = keep.clone();
    let mut labels = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut label = s;
        let mut queue = VecDeque::from([s]);
        let mut tree_edges = Vec::new();
        while let Some(u) = queue.pop_front() {
            for d in net.darts_around(u) {
                let w = net.target(d);
                if !seen[w] {
                    seen[w] = true;
                    tree_edges.push(net.edge_of(d));
                    queue.push_back(w);
                }
            }
        }
        for e in tree_edges {
            label = editor.contract(e);
        }
        labels.push(label);
    }
    for e in 0..editor.edge_count() {
        if editor.edge_alive(e) && editor.is_loop(e) && !keep[editor.origin(2 * e)] {
            editor.delete_edge(e);
        }
    }
    // merge the contracted components pairwise through shared faces
    let mut merged = labels[0];
    for &other in &labels[1..] {
        let faces = editor.faces();
        let ours = editor.live_darts_of(merged);
        let theirs = editor.live_darts_of(other);
        let pair = ours.iter().find_map(|&a| {
            theirs
                .iter()
                .find(|&&b| faces[a] == faces[b])
                .map(|&b| (a, b))
        });
        let Some((a, b)) = pair else {
            return Err(Error::InvalidVertexSet(
                "wired vertices share no face; gluing would not be planar".into(),
            ));
        };
        let e = editor.add_edge_in_face(a, b);
        merged = editor.contract(e);
        for e in 0..editor.edge_count() {
            if editor.edge_alive(e) && editor.is_loop(e) && editor.origin(2 * e) == merged {
                editor.delete_edge(e);
            }
        }
    }
    let mut order = kept.clone();
    order.push(merged);
    let (rotation, edge_map) = editor.export(&order);
    let m = edge_map.len();
    let conductance: Vec<f64> = edge_map.iter().map(|&e| net.conductance(e)).collect();
    let boundary = kept.len();
    let outer_hint = rotation[boundary]
        .first()
        .map(|&(_, e)| OuterFace::LeftOf {
            vertex: boundary,
            edge: e,
        })
        .unwrap_or_default();
    let network = PlaneNetwork::from_rotation_system(&rotation, conductance, outer_hint)?
        .with_boundary(Some(boundary));
    debug_assert_eq!(network.edge_count(), m);
    let mut original_to_vertex = vec![boundary; n];
    for (i, &v) in kept.iter().enumerate() {
        original_to_vertex[v] = i;
    }
    let mut vertex_to_original: Vec<Option<usize>> = kept.iter().map(|&v| Some(v)).collect();
    vertex_to_original.push(None);
    Ok(Truncation {
        network,
        vertex_to_original,
        original_to_vertex,
        edge_to_original: edge_map,
    })
}

/// Output of [`subdivide_and_trim`].
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub network: PlaneNetwork,
    /// For each new vertex: `Ok(original vertex)` or `Err(edge)` for the
    /// midpoint inserted on that original edge.
    pub vertex_origin: Vec<std::result::Result<VertexId, EdgeId>>,
    /// For each new edge: `(original edge, half)` where half 0 touches the
    /// original tail.
    pub edge_origin: Vec<(EdgeId, u8)>,
}

/// Splits every edge into a path of length two carrying the original
/// conductance on both halves, then deletes every peninsula. Peninsulas are
/// taken relative to the largest biconnected block.
pub fn subdivide_and_trim(net: &PlaneNetwork) -> Result<Subdivision> {
    let n = net.vertex_count();
    let m = net.edge_count();
    let total = n + m;
    let mut rotation: Vec<Vec<RotationEntry>> = vec![Vec::new(); total];
    for (v, list) in rotation.iter_mut().enumerate().take(n) {
        for d in net.darts_around(v) {
            let e = net.edge_of(d);
            let half = 2 * e + (d & 1);
            list.push((n + e, half));
        }
    }
    for e in 0..m {
        let (t, h) = net.endpoints(e);
        rotation[n + e] = vec![(t, 2 * e), (h, 2 * e + 1)];
    }
    // blocks of the subdivided multigraph
    let mut ends = vec![(0usize, 0usize); 2 * m];
    for e in 0..m {
        let (t, h) = net.endpoints(e);
        ends[2 * e] = (t, n + e);
        ends[2 * e + 1] = (n + e, h);
    }
    let blocks = biconnected_blocks(total, &ends);
    let best = blocks
        .iter()
        .map(|b| {
            let mut vs: Vec<usize> = b.iter().flat_map(|&e| [ends[e].0, ends[e].1]).collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)))
        .unwrap_or_default();
    if best.len() < 3 {
        return Err(Error::AllPeninsulas);
    }
    let mut keep = vec![false; total];
    for &v in &best {
        keep[v] = true;
    }
    let mut new_id = vec![usize::MAX; total];
    let kept: Vec<usize> = (0..total).filter(|&v| keep[v]).collect();
    for (i, &v) in kept.iter().enumerate() {
        new_id[v] = i;
    }
    let mut new_edge = vec![usize::MAX; 2 * m];
    let mut edge_origin = Vec::new();
    for (h, &(a, b)) in ends.iter().enumerate() {
        if keep[a] && keep[b] {
            new_edge[h] = edge_origin.len();
            edge_origin.push((h / 2, (h % 2) as u8));
        }
    }
    let rot: Vec<Vec<RotationEntry>> = kept
        .iter()
        .map(|&v| {
            rotation[v]
                .iter()
                .filter(|&&(w, _)| keep[w])
                .map(|&(w, h)| (new_id[w], new_edge[h]))
                .collect()
        })
        .collect();
    let conductance = edge_origin
        .iter()
        .map(|&(e, _)| net.conductance(e))
        .collect();
    let network = PlaneNetwork::from_rotation_system(&rot, conductance, OuterFace::Largest)?;
    let vertex_origin = kept
        .iter()
        .map(|&v| if v < n { Ok(v) } else { Err(v - n) })
        .collect();
    Ok(Subdivision {
        network,
        vertex_origin,
        edge_origin,
    })
}

/// Edge sets of the biconnected blocks of a multigraph.
pub(crate) fn biconnected_blocks(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if a == b {
            continue;
        }
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = timer;
        low[s] = timer;
        timer += 1;
        // (vertex, edge used to enter, neighbour cursor)
        let mut stack = vec![(s, usize::MAX, 0usize)];
        while let Some(&mut (u, via, ref mut idx)) = stack.last_mut() {
            if *idx < adj[u].len() {
                let (w, e) = adj[u][*idx];
                *idx += 1;
                if e == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else if disc[w] < disc[u] {
                    edge_stack.push(e);
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == via {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// Whether a node of the star triangulation is an original vertex or a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Vertex(VertexId),
    Face(FaceId),
}

#[derive(Debug, Clone)]
pub struct StarTriangulation {
    pub network: PlaneNetwork,
    pub classes: Vec<NodeClass>,
    /// Whether the triangulation has no loops or multiple edges.
    pub simple: bool,
    /// Whether the input was polyhedral.
    pub polyhedral: bool,
}

/// Adds a node inside every face joined to each corner of the face.
/// Nodes `0..V` are the original vertices and `V + f` is face `f`; edges
/// `0..E` are the original edges and `E + d` joins the origin of dart `d` to
/// the face on its left.
pub fn star_triangulation(net: &PlaneNetwork) -> StarTriangulation {
    let (n, m, nf) = (net.vertex_count(), net.edge_count(), net.face_count());
    let mut rotation: Vec<Vec<RotationEntry>> = Vec::with_capacity(n + nf);
    for v in 0..n {
        let mut list = Vec::new();
        for d in net.darts_around(v) {
            list.push((net.target(d), net.edge_of(d)));
            list.push((n + net.face_of(d), m + d));
        }
        rotation.push(list);
    }
    for f in 0..nf {
        rotation.push(net.face_darts(f).map(|d| (net.origin(d), m + d)).collect());
    }
    let mut conductance = net.conductances().to_vec();
    conductance.extend(std::iter::repeat_n(1.0, net.dart_count()));
    let network = PlaneNetwork::from_rotation_system(
        &rotation,
        conductance,
        OuterFace::LeftOf {
            vertex: n + net.outer_face(),
            edge: m + net.face_darts(net.outer_face()).next().unwrap_or(0),
        },
    )
    .expect("star triangulation of a plane map is a plane map");
    let classes = (0..n)
        .map(NodeClass::Vertex)
        .chain((0..nf).map(NodeClass::Face))
        .collect();
    let simple = simple_adjacency(&network).is_some();
    StarTriangulation {
        polyhedral: is_polyhedral(net),
        network,
        classes,
        simple,
    }
}
