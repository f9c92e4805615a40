use std::collections::HashMap;

use super::{OuterFace, PlaneNetwork, RotationEntry, VertexId};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

pub(crate) fn check_conductances(conductance: &[f64]) -> Result<()> {
    for (edge, &value) in conductance.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidConductance { edge, value });
        }
    }
    Ok(())
}

pub(super) fn from_rotation_system(
    rotation: &[Vec<RotationEntry>],
    conductance: Vec<f64>,
    outer: OuterFace,
) -> Result<PlaneNetwork> {
    let n = rotation.len();
    let m = conductance.len();
    if n == 0 || m == 0 {
        return Err(Error::InconsistentRotation(
            "a map needs at least one vertex and one edge".into(),
        ));
    }
    check_conductances(&conductance)?;

    // (vertex, neighbour, position) of each occurrence of an edge id.
    let mut occurrences: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); m];
    for (v, list) in rotation.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::Disconnected);
        }
        for (pos, &(w, e)) in list.iter().enumerate() {
            if e >= m || w >= n {
                return Err(Error::InconsistentRotation(format!(
                    "entry {w}:{e} at vertex {v} out of range"
                )));
            }
            occurrences[e].push((v, w, pos));
        }
    }
    let mut dart_at: Vec<Vec<usize>> = rotation.iter().map(|l| vec![NONE; l.len()]).collect();
    let mut origin = vec![NONE; 2 * m];
    for (e, occ) in occurrences.iter().enumerate() {
        if occ.len() != 2 {
            return Err(Error::InconsistentRotation(format!(
                "edge {e} appears {} times",
                occ.len()
            )));
        }
        let (a, b) = (occ[0], occ[1]);
        if a.0 != b.1 || a.1 != b.0 {
            return Err(Error::InconsistentRotation(format!(
                "edge {e} listed as {}-{} and {}-{}",
                a.0, a.1, b.0, b.1
            )));
        }
        dart_at[a.0][a.2] = 2 * e;
        dart_at[b.0][b.2] = 2 * e + 1;
        origin[2 * e] = a.0;
        origin[2 * e + 1] = b.0;
    }

    let mut next = vec![NONE; 2 * m];
    let mut prev = vec![NONE; 2 * m];
    let mut first_dart = vec![NONE; n];
    for (v, darts) in dart_at.iter().enumerate() {
        first_dart[v] = darts[0];
        for (i, &d) in darts.iter().enumerate() {
            let nd = darts[(i + 1) % darts.len()];
            next[d] = nd;
            prev[nd] = d;
        }
    }
    assemble(n, origin, next, prev, first_dart, conductance, outer)
}

fn assemble(
    n: usize,
    origin: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    first_dart: Vec<usize>,
    conductance: Vec<f64>,
    outer: OuterFace,
) -> Result<PlaneNetwork> {
    let dart_count = origin.len();

    // connectivity
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        let start = first_dart[u];
        let mut d = start;
        loop {
            let w = origin[d ^ 1];
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
            d = next[d];
            if d == start {
                break;
            }
        }
    }
    if reached != n {
        return Err(Error::Disconnected);
    }

    // faces: orbits of d -> twin(next(d)); every orbit is traversed with the
    // inverse (prev . twin) so face_dart starts a ccw walk.
    let mut face_of = vec![NONE; dart_count];
    let mut face_dart = Vec::new();
    for start in 0..dart_count {
        if face_of[start] != NONE {
            continue;
        }
        let f = face_dart.len();
        face_dart.push(start);
        let mut d = start;
        loop {
            face_of[d] = f;
            d = prev[d ^ 1];
            if d == start {
                break;
            }
        }
    }

    let euler = n as i64 - conductance.len() as i64 + face_dart.len() as i64;
    if euler != 2 {
        return Err(Error::NotPlanar(euler));
    }

    let face_count = face_dart.len();
    let outer_face = match outer {
        OuterFace::Largest => {
            let mut best = (0usize, 0usize);
            for (f, &start) in face_dart.iter().enumerate() {
                let mut len = 0;
                let mut d = start;
                loop {
                    len += 1;
                    d = prev[d ^ 1];
                    if d == start {
                        break;
                    }
                }
                if len > best.1 {
                    best = (f, len);
                }
            }
            best.0
        }
        OuterFace::Face(f) => {
            if f >= face_count {
                return Err(Error::InconsistentRotation(format!(
                    "outer face {f} out of range"
                )));
            }
            f
        }
        OuterFace::LeftOf { vertex, edge } => {
            if edge >= conductance.len() {
                return Err(Error::InconsistentRotation(format!(
                    "outer-face hint edge {edge} out of range"
                )));
            }
            let d = if origin[2 * edge] == vertex {
                2 * edge
            } else if origin[2 * edge + 1] == vertex {
                2 * edge + 1
            } else {
                return Err(Error::InconsistentRotation(format!(
                    "outer-face hint: edge {edge} does not leave vertex {vertex}"
                )));
            };
            face_of[d]
        }
    };

    Ok(PlaneNetwork {
        vertex_count: n,
        origin,
        next,
        prev,
        first_dart,
        conductance,
        face_of,
        face_dart,
        outer_face,
        boundary_vertex: None,
    })
}

pub(super) fn from_faces(vertex_count: usize, faces: &[Vec<VertexId>]) -> Result<PlaneNetwork> {
    // directed edge (a, b) -> (face index, position of a)
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_ends: Vec<(usize, usize)> = Vec::new();
    for (fi, face) in faces.iter().enumerate() {
        if face.len() < 2 {
            return Err(Error::InconsistentRotation(format!("face {fi} too short")));
        }
        for i in 0..face.len() {
            let (a, b) = (face[i], face[(i + 1) % face.len()]);
            if a >= vertex_count || b >= vertex_count || a == b {
                return Err(Error::InconsistentRotation(format!(
                    "face {fi} has bad edge {a}-{b}"
                )));
            }
            if directed.insert((a, b), fi).is_some() {
                return Err(Error::InconsistentRotation(format!(
                    "directed edge {a}->{b} used twice"
                )));
            }
            let key = (a.min(b), a.max(b));
            edge_ids.entry(key).or_insert_with(|| {
                edge_ends.push(key);
                edge_ends.len() - 1
            });
        }
    }
    let m = edge_ends.len();
    // dart 2e goes from the smaller to the larger endpoint.
    let dart = |a: usize, b: usize| -> usize {
        let e = edge_ids[&(a.min(b), a.max(b))];
        if a < b {
            2 * e
        } else {
            2 * e + 1
        }
    };
    let mut origin = vec![NONE; 2 * m];
    for (e, &(a, b)) in edge_ends.iter().enumerate() {
        origin[2 * e] = a;
        origin[2 * e + 1] = b;
    }
    let mut next = vec![NONE; 2 * m];
    let mut prev = vec![NONE; 2 * m];
    for face in faces {
        let k = face.len();
        for i in 0..k {
            let (a, v, b) = (face[(i + k - 1) % k], face[i], face[(i + 1) % k]);
            let (from, to) = (dart(v, b), dart(v, a));
            if next[from] != NONE || prev[to] != NONE {
                return Err(Error::InconsistentRotation(format!(
                    "vertex {v} is not a manifold point"
                )));
            }
            next[from] = to;
            prev[to] = from;
        }
    }
    // close the single gap at each boundary vertex (outer face sector)
    let mut gap_end: Vec<usize> = vec![NONE; vertex_count];
    let mut boundary_dart = None;
    for d in 0..2 * m {
        if next[d] == NONE {
            let v = origin[d];
            if gap_end[v] != NONE {
                return Err(Error::InconsistentRotation(format!(
                    "vertex {v} appears twice on the boundary"
                )));
            }
            gap_end[v] = d;
            boundary_dart.get_or_insert(d);
        }
    }
    for d in 0..2 * m {
        if prev[d] == NONE {
            let v = origin[d];
            let last = gap_end[v];
            if last == NONE {
                return Err(Error::InconsistentRotation(format!(
                    "vertex {v} has an unmatched boundary dart"
                )));
            }
            next[last] = d;
            prev[d] = last;
        }
    }
    let mut first_dart = vec![NONE; vertex_count];
    for d in 0..2 * m {
        if first_dart[origin[d]] == NONE {
            first_dart[origin[d]] = d;
        }
    }
    if first_dart.contains(&NONE) {
        return Err(Error::Disconnected);
    }
    // single cycle around every vertex
    let mut visited = vec![false; 2 * m];
    for &start in &first_dart {
        let mut d = start;
        loop {
            visited[d] = true;
            d = next[d];
            if d == start {
                break;
            }
        }
    }
    if visited.iter().any(|&v| !v) {
        return Err(Error::InconsistentRotation(
            "a vertex has more than one rotation cycle".into(),
        ));
    }

    let net = assemble(
        vertex_count,
        origin,
        next,
        prev,
        first_dart,
        vec![1.0; m],
        OuterFace::Largest,
    )?;
    let outer = match boundary_dart {
        Some(d) => net.face_of(d),
        None => {
            let last = faces.last().expect("at least one face");
            net.face_of(dart(last[0], last[1]))
        }
    };
    // re-normalise through the rotation system so dart numbering follows the
    // "first occurrence" convention used by the file format.
    let rot = net.rotation_system();
    let outer_dart = net.face_darts(outer).next().expect("nonempty face");
    PlaneNetwork::from_rotation_system(
        &rot,
        vec![1.0; m],
        OuterFace::LeftOf {
            vertex: net.origin(outer_dart),
            edge: net.edge_of(outer_dart),
        },
    )
}
