//! Effective resistances, hitting and escape probabilities and Kirchhoff
//! edge marginals, all from one Dirichlet solver.
//!
//! The solver merges parallel edges, ignores loops and runs Jacobi
//! preconditioned conjugate gradients on the unknown vertices.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{wired_truncation, EdgeId, PlaneNetwork, VertexId};

/// Target relative residual of the linear solves.
pub const SOLVER_TOLERANCE: f64 = 1e-13;
const ACCEPTED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// The network exactly as given; a boundary vertex is an ordinary vertex.
    #[default]
    Plain,
    /// The induced subgraph on the non-boundary vertices.
    Free,
    /// The wired truncation itself (requires a boundary vertex). Same
    /// network as `Plain`, but the boundary is required to exist.
    Wired,
    /// Wired truncation with the boundary vertex added to the target set.
    WiredToBoundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceQuery {
    pub a: Vec<VertexId>,
    pub b: Vec<VertexId>,
    pub mode: Mode,
}

impl ResistanceQuery {
    pub fn new(a: Vec<VertexId>, b: Vec<VertexId>, mode: Mode) -> Self {
        Self { a, b, mode }
    }

    pub fn pair(u: VertexId, v: VertexId) -> Self {
        Self::new(vec![u], vec![v], Mode::Plain)
    }

    /// Potential-1 set, potential-0 set and excluded mask for the solve.
    fn resolve(&self, net: &PlaneNetwork) -> Result<(Vec<VertexId>, Vec<VertexId>, Vec<bool>)> {
        let n = net.vertex_count();
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::InvalidQuery(
                "source and target sets must be nonempty".into(),
            ));
        }
        let mut side = vec![0u8; n];
        for &v in &self.a {
            if v >= n {
                return Err(Error::InvalidQuery(format!("vertex {v} out of range")));
            }
            side[v] = 1;
        }
        for &v in &self.b {
            if v >= n {
                return Err(Error::InvalidQuery(format!("vertex {v} out of range")));
            }
            if side[v] == 1 {
                return Err(Error::InvalidQuery(format!("vertex {v} lies in both sets")));
            }
        }
        let mut excluded = vec![false; n];
        let mut b = self.b.clone();
        match self.mode {
            Mode::Plain => {}
            Mode::Free => {
                if let Some(d) = net.boundary_vertex() {
                    if self.a.contains(&d) || self.b.contains(&d) {
                        return Err(Error::InvalidQuery(
                            "free mode cannot use the boundary vertex".into(),
                        ));
                    }
                    excluded[d] = true;
                }
            }
            Mode::Wired => {
                net.boundary_vertex().ok_or(Error::NoBoundary)?;
            }
            Mode::WiredToBoundary => {
                let d = net.boundary_vertex().ok_or(Error::NoBoundary)?;
                if self.a.contains(&d) {
                    return Err(Error::InvalidQuery(
                        "boundary vertex lies in the source set".into(),
                    ));
                }
                if !b.contains(&d) {
                    b.push(d);
                }
            }
        }
        Ok((self.a.clone(), b, excluded))
    }
}

/// Solves the Dirichlet problem with the given fixed values. Vertices that
/// are excluded, or that cannot reach a fixed vertex, get `NaN`.
pub(crate) fn solve_dirichlet(
    net: &PlaneNetwork,
    fixed: &[Option<f64>],
    excluded: &[bool],
) -> Result<Vec<f64>> {
    let n = net.vertex_count();
    let mut value = vec![f64::NAN; n];
    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for v in 0..n {
        if let (Some(x), false) = (fixed[v], excluded[v]) {
            value[v] = x;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for w in net.neighbors(u) {
            if !excluded[w] && fixed[w].is_none() && index[w] == usize::MAX {
                index[w] = unknowns.len();
                unknowns.push(w);
                queue.push_back(w);
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(value);
    }

    let k = unknowns.len();
    let mut row_start = Vec::with_capacity(k + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut diag = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for (i, &u) in unknowns.iter().enumerate() {
        row_start.push(cols.len());
        scratch.clear();
        for d in net.darts_around(u) {
            let w = net.target(d);
            if w == u || excluded[w] {
                continue;
            }
            let c = net.conductance(net.edge_of(d));
            diag[i] += c;
            match fixed[w] {
                Some(x) => rhs[i] += c * x,
                None => scratch.push((index[w], c)),
            }
        }
        scratch.sort_unstable_by_key(|&(j, _)| j);
        for &(j, c) in &scratch {
            if cols.last() == Some(&j) && cols.len() > row_start[i] {
                *vals.last_mut().expect("nonempty") += c;
            } else {
                cols.push(j);
                vals.push(c);
            }
        }
    }
    row_start.push(cols.len());
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..k {
            let mut s = diag[i] * x[i];
            for t in row_start[i]..row_start[i + 1] {
                s -= vals[t] * x[cols[t]];
            }
            y[i] = s;
        }
    };
    let x = conjugate_gradient(&apply, &diag, &rhs)?;
    for (i, &u) in unknowns.iter().enumerate() {
        value[u] = x[i];
    }
    Ok(value)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn true_residual(apply: &dyn Fn(&[f64], &mut [f64]), b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    dot(r, r).sqrt()
}

/// Jacobi-preconditioned CG, restarted from the true residual when the
/// recursive one drifts away from it.
fn conjugate_gradient(
    apply: &dyn Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
) -> Result<Vec<f64>> {
    let k = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; k];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; k];
    let mut p = vec![0.0; k];
    let mut ap = vec![0.0; k];
    let max_iter = 20 * k + 1000;
    let mut residual = 1.0;
    for _restart in 0..8 {
        for i in 0..k {
            z[i] = r[i] / diag[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..k {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if dot(&r, &r).sqrt() <= SOLVER_TOLERANCE * b_norm {
                break;
            }
            for i in 0..k {
                z[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..k {
                p[i] = z[i] + beta * p[i];
            }
        }
        let previous = residual;
        residual = true_residual(apply, b, &x, &mut r) / b_norm;
        if residual <= SOLVER_TOLERANCE || residual >= previous {
            break;
        }
    }
    // normwise backward error, with ||A||_inf <= 2 max diag
    let a_norm = 2.0 * diag.iter().cloned().fold(0.0, f64::max);
    let x_norm = dot(&x, &x).sqrt();
    let backward = residual * b_norm / (a_norm * x_norm + b_norm);
    if backward > ACCEPTED_TOLERANCE {
        return Err(Error::SolverDiverged(backward));
    }
    Ok(x)
}

/// Harmonic potential equal to 1 on the query's source set and 0 on its
/// target set. Excluded or unreachable vertices get `NaN`.
pub fn potential(net: &PlaneNetwork, query: &ResistanceQuery) -> Result<Vec<f64>> {
    let (a, b, excluded) = query.resolve(net)?;
    let mut fixed = vec![None; net.vertex_count()];
    for &v in &a {
        fixed[v] = Some(1.0);
    }
    for &v in &b {
        fixed[v] = Some(0.0);
    }
    solve_dirichlet(net, &fixed, &excluded)
}

pub fn effective_resistance(net: &PlaneNetwork, query: &ResistanceQuery) -> Result<f64> {
    let (mut a, mut b, excluded) = query.resolve(net)?;
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    // solve in a canonical orientation so that R(A,B) and R(B,A) coincide
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut blocked = excluded.clone();
    for &v in &a {
        blocked[v] = true;
    }
    let mut reach = vec![false; net.vertex_count()];
    for &s in &a {
        for w in net.neighbors(s) {
            if !excluded[w] && !blocked[w] {
                for x in net.component_from(w, &blocked) {
                    reach[x] = true;
                }
            } else if !excluded[w] {
                reach[w] = true;
            }
        }
    }
    if !b.iter().any(|&v| reach[v]) {
        return Err(Error::Unreachable);
    }
    let mut fixed = vec![None; net.vertex_count()];
    for &v in &a {
        fixed[v] = Some(1.0);
    }
    for &v in &b {
        fixed[v] = Some(0.0);
    }
    let phi = solve_dirichlet(net, &fixed, &excluded)?;
    let mut current = 0.0;
    for &s in &a {
        for d in net.darts_around(s) {
            let w = net.target(d);
            if w != s && !excluded[w] {
                current += net.conductance(net.edge_of(d)) * (1.0 - phi[w]);
            }
        }
    }
    if current <= 0.0 {
        return Err(Error::Unreachable);
    }
    Ok(1.0 / current)
}

/// Probability that the walk from `v` hits `targets` before `absorbing`.
/// The solve is restricted to the component of `v` once both sets are
/// removed.
pub fn hitting_probability(
    net: &PlaneNetwork,
    v: VertexId,
    targets: &[VertexId],
    absorbing: &[VertexId],
) -> Result<f64> {
    let n = net.vertex_count();
    let mut fixed = vec![None; n];
    for &t in targets {
        fixed[t] = Some(1.0);
    }
    for &c in absorbing {
        if fixed[c].is_some() {
            return Err(Error::InvalidQuery(format!(
                "vertex {c} is both target and absorbing"
            )));
        }
        fixed[c] = Some(0.0);
    }
    if fixed[v].is_some() {
        return Err(Error::InvalidQuery(format!(
            "start vertex {v} lies in B or C"
        )));
    }
    let blocked: Vec<bool> = fixed.iter().map(Option::is_some).collect();
    let component = net.component_from(v, &blocked);
    let mut inside = vec![false; n];
    for &u in &component {
        inside[u] = true;
    }
    let (mut sees_target, mut sees_absorbing) = (false, false);
    for &u in &component {
        for w in net.neighbors(u) {
            match fixed[w] {
                Some(1.0) => sees_target = true,
                Some(_) => sees_absorbing = true,
                None => {}
            }
        }
    }
    match (sees_target, sees_absorbing) {
        (false, _) => return Ok(0.0),
        (true, false) => return Ok(1.0),
        _ => {}
    }
    // keep the component and its fixed neighbours only
    let excluded: Vec<bool> = (0..n).map(|u| !inside[u] && fixed[u].is_none()).collect();
    let phi = solve_dirichlet(net, &fixed, &excluded)?;
    Ok(phi[v])
}

/// `P_v(walk reaches the boundary vertex before returning to v)`.
pub fn escape_probability(net: &PlaneNetwork, v: VertexId) -> Result<f64> {
    let d = net.boundary_vertex().ok_or(Error::NoBoundary)?;
    if v == d {
        return Err(Error::InvalidQuery(
            "start vertex is the boundary vertex".into(),
        ));
    }
    let r = effective_resistance(net, &ResistanceQuery::new(vec![v], vec![d], Mode::Wired))?;
    Ok(1.0 / (r * net.vertex_conductance(v)))
}

/// `c(e) R_eff(e- <-> e+)`: the probability that `e` lies in the
/// uniform spanning tree. On a wired truncation this is the wired marginal.
pub fn kirchhoff_marginal(net: &PlaneNetwork, e: EdgeId) -> Result<f64> {
    if e >= net.edge_count() {
        return Err(Error::NotAnEdge(format!("edge id {e}")));
    }
    if net.is_loop(e) {
        return Err(Error::LoopEdge(e));
    }
    let (u, v) = net.endpoints(e);
    Ok(net.conductance(e) * effective_resistance(net, &ResistanceQuery::pair(u, v))?)
}

/// Weighted spanning-tree count (sum over trees of the product of
/// conductances) from the reduced Laplacian determinant.
pub fn matrix_tree_weight(net: &PlaneNetwork) -> f64 {
    let edges: Vec<_> = (0..net.edge_count())
        .map(|e| {
            let (u, v) = net.endpoints(e);
            (u, v, net.conductance(e))
        })
        .collect();
    matrix_tree_weight_edges(net.vertex_count(), &edges)
}

/// [`matrix_tree_weight`] for a multigraph given as `(u, v, conductance)`.
pub fn matrix_tree_weight_edges(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let mut lap = DMatrix::<f64>::zeros(n - 1, n - 1);
    for &(u, v, c) in edges {
        if u == v {
            continue;
        }
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                lap[(x - 1, x - 1)] += c;
                if y > 0 {
                    lap[(x - 1, y - 1)] -= c;
                }
            }
        }
    }
    lap.determinant()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub depth: usize,
    pub r_free: f64,
    pub r_wired: f64,
    /// `3 max{R(A <-> B + boundary), R(B <-> A + boundary)}` on the truncation.
    pub triangle_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    pub rows: Vec<GapRow>,
    /// Free values non-increasing and wired values non-decreasing in depth
    /// (up to a relative slack of 1e-9).
    pub monotone: bool,
    /// `r_wired <= triangle_bound` at every depth.
    pub triangle_holds: bool,
}

/// Free and wired resistances between `a` and `b` (ids in `net`) over
/// nested truncations given as `(depth, retained vertices)`.
pub fn wired_free_gap(
    net: &PlaneNetwork,
    truncations: &[(usize, Vec<VertexId>)],
    a: &[VertexId],
    b: &[VertexId],
) -> Result<GapTable> {
    let mut rows = Vec::with_capacity(truncations.len());
    for (depth, retained) in truncations {
        let t = wired_truncation(net, retained)?;
        let map = |set: &[VertexId]| -> Vec<VertexId> {
            let mut out: Vec<_> = set.iter().map(|&v| t.original_to_vertex[v]).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let (ta, tb) = (map(a), map(b));
        let boundary = t.network.boundary_vertex();
        let inner = |set: &[VertexId]| -> Vec<VertexId> {
            set.iter()
                .copied()
                .filter(|&v| Some(v) != boundary)
                .collect()
        };
        let (fa, fb) = (inner(&ta), inner(&tb));
        // a set lying entirely outside the truncation is infinitely far away
        let r_free = if fa.is_empty() || fb.is_empty() {
            f64::INFINITY
        } else {
            effective_resistance(&t.network, &ResistanceQuery::new(fa, fb, Mode::Free))?
        };
        let r_wired = effective_resistance(
            &t.network,
            &ResistanceQuery::new(ta.clone(), tb.clone(), Mode::Plain),
        )?;
        // R(X <-> Y + boundary); zero when X lies inside the boundary
        let to_boundary = |x: &[VertexId], y: &[VertexId]| -> Result<f64> {
            let inner_x = inner(x);
            if inner_x.is_empty() {
                return Ok(0.0);
            }
            effective_resistance(
                &t.network,
                &ResistanceQuery::new(inner_x, y.to_vec(), Mode::WiredToBoundary),
            )
        };
        let triangle_bound = match boundary {
            Some(_) => 3.0 * to_boundary(&ta, &tb)?.max(to_boundary(&tb, &ta)?),
            None => 3.0 * r_wired,
        };
        rows.push(GapRow {
            depth: *depth,
            r_free,
            r_wired,
            triangle_bound,
        });
    }
    let slack = 1e-9;
    let monotone = rows.windows(2).all(|w| {
        w[1].r_free <= w[0].r_free * (1.0 + slack) && w[1].r_wired >= w[0].r_wired * (1.0 - slack)
    });
    let triangle_holds = rows
        .iter()
        .all(|r| r.r_wired <= r.triangle_bound * (1.0 + slack));
    Ok(GapTable {
        rows,
        monotone,
        triangle_holds,
    })
}

/// CSV with columns `depth,r_free,r_wired`.
pub fn write_gap_csv<W: Write>(table: &GapTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["depth", "r_free", "r_wired"])?;
    for row in &table.rows {
        w.write_record([
            row.depth.to_string(),
            format!("{:.16e}", row.r_free),
            format!("{:.16e}", row.r_wired),
        ])?;
    }
    w.flush()?;
    Ok(())
}
