//! Double circle packings of polyhedral plane networks.
//!
//! Radii are found on the star triangulation, where every vertex-face
//! incidence is a kite made of two right triangles. The angle at node `x`
//! of the kite towards `y` is `atan(r_y / r_x)` in the plane and
//! `atan(tanh r_y / sinh r_x)` in the hyperbolic disc, so each interior
//! node only needs the radii of its kite neighbours.

pub mod format;
mod hyperbolic;
mod render;

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{is_polyhedral_with_apex, FaceId, PlaneNetwork, VertexId};

pub use hyperbolic::{
    hyperbolic_area, hyperbolic_circle, hyperbolic_diam, hyperbolic_distance, hyperbolic_radius,
    hyperbolic_stats, mobius_normalize, HyperbolicCircle, HyperbolicStats,
};
pub use render::{render_svg, RenderOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    EuclideanPlane,
    UnitDisc,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::EuclideanPlane => "euclidean",
            Model::UnitDisc => "disc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub centre: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        Self {
            centre: Complex64::new(x, y),
            radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// Max over edges of `|d(u,v) - r_u - r_v| / (r_u + r_v)`.
    pub tangency: f64,
    /// Max over vertex-face incidences of `|d^2 - r_v^2 - r_f^2| / (r_v^2 + r_f^2)`.
    pub orthogonality: f64,
    /// Max over interior nodes of `|angle sum - 2 pi|`.
    pub angle_sum: f64,
}

/// Primal circles for every vertex and dual circles for every face but the
/// outer one.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublePacking {
    pub model: Model,
    pub primal: Vec<Circle>,
    pub dual: Vec<Option<Circle>>,
    /// Boundary circles of a disc packing, internally tangent to the unit
    /// circle.
    pub horocycle: Vec<bool>,
    pub residuals: Residuals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingOptions {
    pub model: Model,
    /// Radius of every outer-face vertex in the plane model.
    pub boundary_radius: f64,
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Vertex placed at the origin (default: first interior vertex).
    pub root: Option<VertexId>,
}

impl PackingOptions {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            boundary_radius: 1.0,
            tolerance: 1e-12,
            max_sweeps: 100_000,
            root: None,
        }
    }
}

/// Kite incidences of the star triangulation with the outer face removed.
/// Node `v < V` is a vertex, node `V + f` a face.
struct Kites {
    start: Vec<usize>,
    nbr: Vec<usize>,
    interior: Vec<bool>,
}

impl Kites {
    fn new(net: &PlaneNetwork) -> Self {
        let (n, nf) = (net.vertex_count(), net.face_count());
        let outer = net.outer_face();
        let mut on_outer = vec![false; n];
        for v in net.face_vertices(outer) {
            on_outer[v] = true;
        }
        let mut start = Vec::with_capacity(n + nf + 1);
        let mut nbr = Vec::new();
        for v in 0..n {
            start.push(nbr.len());
            for d in net.darts_around(v) {
                let f = net.face_of(d);
                if f != outer {
                    nbr.push(n + f);
                }
            }
        }
        for f in 0..nf {
            start.push(nbr.len());
            if f != outer {
                nbr.extend(net.face_vertices(f));
            }
        }
        start.push(nbr.len());
        let interior = (0..n + nf)
            .map(|x| if x < n { !on_outer[x] } else { x - n != outer })
            .collect();
        Self {
            start,
            nbr,
            interior,
        }
    }

    fn of(&self, x: usize) -> &[usize] {
        &self.nbr[self.start[x]..self.start[x + 1]]
    }
}

/// Angle at `x` in the right triangle with legs `rx`, `ry`.
#[inline]
fn kite_angle(model: Model, rx: f64, ry: f64) -> f64 {
    match model {
        Model::EuclideanPlane => (ry / rx).atan(),
        Model::UnitDisc => {
            let t = if ry.is_infinite() { 1.0 } else { ry.tanh() };
            (t / rx.sinh()).atan()
        }
    }
}

/// Distance between the centres of kite neighbours.
#[inline]
fn kite_distance(model: Model, rx: f64, ry: f64) -> f64 {
    match model {
        Model::EuclideanPlane => rx.hypot(ry),
        Model::UnitDisc => (rx.cosh() * ry.cosh()).acosh(),
    }
}

fn angle_sum(model: Model, kites: &Kites, r: &[f64], x: usize) -> f64 {
    kites
        .of(x)
        .iter()
        .map(|&y| 2.0 * kite_angle(model, r[x], r[y]))
        .sum()
}

/// Radius that gives angle sum 2 pi if all `k` kite neighbours were
/// replaced by equal ones reproducing the current sum `theta`.
#[inline]
fn uniform_update(model: Model, r: f64, theta: f64, k: usize) -> f64 {
    let half = theta / (2 * k) as f64;
    let target = (PI / k as f64).tan();
    match model {
        Model::EuclideanPlane => r * half.tan() / target,
        Model::UnitDisc => {
            let t = (r.sinh() * half.tan()).min(1.0 - 1e-16);
            (t / target).asinh()
        }
    }
}

/// Solves for radii; returns them with the final angle residual.
fn solve_radii(net: &PlaneNetwork, kites: &Kites, opts: &PackingOptions) -> Result<Vec<f64>> {
    let total = kites.interior.len();
    let model = opts.model;
    let mut r = vec![1.0; total];
    for x in 0..total {
        if !kites.interior[x] && x < net.vertex_count() {
            r[x] = match model {
                Model::EuclideanPlane => opts.boundary_radius,
                Model::UnitDisc => f64::INFINITY,
            };
        }
    }
    let order: Vec<usize> = (0..total).filter(|&x| kites.interior[x]).collect();
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_sweeps {
        residual = 0.0;
        for &x in &order {
            let theta = angle_sum(model, kites, &r, x);
            residual = f64::max(residual, (theta - 2.0 * PI).abs());
            r[x] = uniform_update(model, r[x], theta, kites.of(x).len());
        }
        if residual < opts.tolerance {
            return Ok(r);
        }
    }
    Err(Error::PackingNotConverged {
        iterations: opts.max_sweeps,
        residual,
    })
}

/// Neighbours of node `x` in the star triangulation in counterclockwise
/// order, with the angle at `x` from each to the next.
fn flower(net: &PlaneNetwork, model: Model, r: &[f64], x: usize) -> Vec<(usize, f64)> {
    let n = net.vertex_count();
    if x < n {
        let mut out = Vec::new();
        for d in net.darts_around(x) {
            let f = n + net.face_of(d);
            let gap = kite_angle(model, r[x], r[f]);
            out.push((net.target(d), gap));
            out.push((f, gap));
        }
        out
    } else {
        let vs = net.face_vertices(x - n);
        let k = vs.len();
        (0..k)
            .map(|i| {
                let gap =
                    kite_angle(model, r[x], r[vs[i]]) + kite_angle(model, r[x], r[vs[(i + 1) % k]]);
                (vs[i], gap)
            })
            .collect()
    }
}

/// `z -> (z - p) / (1 - conj(p) z)`.
#[inline]
pub(crate) fn to_origin(p: Complex64, z: Complex64) -> Complex64 {
    (z - p) / (Complex64::new(1.0, 0.0) - p.conj() * z)
}

#[inline]
pub(crate) fn from_origin(p: Complex64, w: Complex64) -> Complex64 {
    (w + p) / (Complex64::new(1.0, 0.0) + p.conj() * w)
}

/// Euclidean circle of the hyperbolic disc with centre `p`, radius `rho`.
pub(crate) fn euclidean_of_hyperbolic(p: Complex64, rho: f64) -> Circle {
    let s = 2.0 * p.norm().min(1.0 - 1e-17).atanh();
    let dir = if p.norm() > 0.0 {
        p / p.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let (a, b) = (((s + rho) / 2.0).tanh(), ((s - rho) / 2.0).tanh());
    Circle {
        centre: dir * ((a + b) / 2.0),
        radius: (a - b) / 2.0,
    }
}

fn layout(
    net: &PlaneNetwork,
    kites: &Kites,
    r: &[f64],
    opts: &PackingOptions,
) -> Result<Vec<Circle>> {
    let n = net.vertex_count();
    let total = r.len();
    let model = opts.model;
    let root = match opts.root {
        Some(v) if v < n && kites.interior[v] => v,
        Some(v) => {
            return Err(Error::Packing(format!(
                "root {v} is not an interior vertex"
            )))
        }
        None => (0..total)
            .find(|&x| kites.interior[x])
            .ok_or_else(|| Error::Packing("no interior node".into()))?,
    };
    // Euclidean: (centre, radius). Disc: hyperbolic centre for interior
    // nodes, final Euclidean circle for horocycles.
    let mut pos: Vec<Option<Complex64>> = vec![None; total];
    let mut circle: Vec<Option<Circle>> = vec![None; total];
    let mut from: Vec<usize> = vec![usize::MAX; total];
    pos[root] = Some(Complex64::new(0.0, 0.0));
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        let p = pos[x].expect("queued nodes are placed");
        let petals = flower(net, model, r, x);
        // direction of the first petal
        let (anchor, base) = match petals.iter().position(|&(y, _)| y == from[x]) {
            Some(i) => {
                let q = pos[from[x]].expect("parent placed");
                let dir = match model {
                    Model::EuclideanPlane => q - p,
                    Model::UnitDisc => to_origin(p, q),
                };
                (i, dir.arg())
            }
            None => (0, 0.0),
        };
        let k = petals.len();
        let mut alpha = base;
        for step in 0..k {
            let i = (anchor + step) % k;
            let (y, gap) = petals[i];
            if pos[y].is_none() && circle[y].is_none() && !(y >= n && y - n == net.outer_face()) {
                let primal = x < n && y < n;
                let unit = Complex64::from_polar(1.0, alpha);
                if r[y].is_infinite() {
                    // horocycle through a tangency point t with ideal point zeta
                    let zeta = from_origin(p, unit);
                    let (dist, turn) = if primal {
                        (r[x], 0.0)
                    } else {
                        (r[x], kite_angle(model, r[x], r[y]))
                    };
                    let t =
                        from_origin(p, Complex64::from_polar((dist / 2.0).tanh(), alpha + turn));
                    let rho = (t - zeta).norm_sqr() / (2.0 * (1.0 - (t * zeta.conj()).re));
                    circle[y] = Some(Circle {
                        centre: zeta * (1.0 - rho),
                        radius: rho,
                    });
                } else {
                    let dist = if primal {
                        r[x] + r[y]
                    } else {
                        kite_distance(model, r[x], r[y])
                    };
                    let z = match model {
                        Model::EuclideanPlane => p + unit * dist,
                        Model::UnitDisc => from_origin(p, unit * (dist / 2.0).tanh()),
                    };
                    pos[y] = Some(z);
                    from[y] = x;
                    if kites.interior[y] {
                        queue.push_back(y);
                    }
                }
            }
            alpha += gap;
        }
    }
    (0..total)
        .map(|x| {
            if x >= n && x - n == net.outer_face() {
                return Ok(Circle::new(f64::NAN, f64::NAN, f64::NAN));
            }
            if let Some(c) = circle[x] {
                return Ok(c);
            }
            let p = pos[x]
                .ok_or_else(|| Error::Packing(format!("node {x} was not reached by the layout")))?;
            Ok(match model {
                Model::EuclideanPlane => Circle {
                    centre: p,
                    radius: r[x],
                },
                Model::UnitDisc => euclidean_of_hyperbolic(p, r[x]),
            })
        })
        .collect()
}

/// Residuals of a packing against the network's combinatorics.
pub fn residuals(net: &PlaneNetwork, p: &DoublePacking) -> Residuals {
    let mut out = Residuals::default();
    for e in 0..net.edge_count() {
        let (u, v) = net.endpoints(e);
        let (a, b) = (p.primal[u], p.primal[v]);
        let s = a.radius + b.radius;
        out.tangency = out
            .tangency
            .max(((a.centre - b.centre).norm() - s).abs() / s);
    }
    for f in 0..net.face_count() {
        let Some(c) = p.dual[f] else { continue };
        for v in net.face_vertices(f) {
            let a = p.primal[v];
            let s = a.radius * a.radius + c.radius * c.radius;
            out.orthogonality = out
                .orthogonality
                .max(((a.centre - c.centre).norm_sqr() - s).abs() / s);
        }
    }
    out.angle_sum = p.residuals.angle_sum;
    out
}

pub fn solve_double_packing(net: &PlaneNetwork, opts: &PackingOptions) -> Result<DoublePacking> {
    if !is_polyhedral_with_apex(net) {
        return Err(Error::NotPolyhedral);
    }
    if opts.model == Model::EuclideanPlane
        && !(opts.boundary_radius > 0.0 && opts.boundary_radius.is_finite())
    {
        return Err(Error::Packing("boundary radius must be positive".into()));
    }
    let kites = Kites::new(net);
    let r = solve_radii(net, &kites, opts)?;
    let angle_sum_residual = (0..r.len())
        .filter(|&x| kites.interior[x])
        .map(|x| (angle_sum(opts.model, &kites, &r, x) - 2.0 * PI).abs())
        .fold(0.0, f64::max);
    let circles = layout(net, &kites, &r, opts)?;
    let n = net.vertex_count();
    let outer = net.outer_face();
    let mut packing = DoublePacking {
        model: opts.model,
        primal: circles[..n].to_vec(),
        dual: (0..net.face_count())
            .map(|f| (f != outer).then_some(circles[n + f]))
            .collect(),
        horocycle: (0..n).map(|v| r[v].is_infinite()).collect(),
        residuals: Residuals {
            angle_sum: angle_sum_residual,
            ..Residuals::default()
        },
    };
    packing.residuals = residuals(net, &packing);
    Ok(packing)
}

/// Largest radius ratios between adjacent circles.
#[derive(Debug, Clone, PartialEq)]
pub struct RingAudit {
    /// Max of `r(v)/r(f)` and `r(f)/r(v)` over incidences.
    pub vertex_face: f64,
    /// Max of `r(v)/r(u)` over edges.
    pub vertex_vertex: f64,
    /// The same maxima keyed by `(degree, largest codegree)` of the vertex.
    pub by_class: BTreeMap<(usize, usize), (f64, f64)>,
}

/// Scans the vertices selected by `include` (all if `None`), skipping
/// horocycles.
pub fn ring_audit(p: &DoublePacking, net: &PlaneNetwork, include: Option<&[bool]>) -> RingAudit {
    let mut audit = RingAudit {
        vertex_face: 0.0,
        vertex_vertex: 0.0,
        by_class: BTreeMap::new(),
    };
    for v in 0..net.vertex_count() {
        if p.horocycle[v] || include.is_some_and(|m| !m[v]) {
            continue;
        }
        let rv = p.primal[v].radius;
        let mut vf: f64 = 0.0;
        let mut vv: f64 = 0.0;
        let mut codegree = 0;
        for d in net.darts_around(v) {
            let u = net.target(d);
            if !p.horocycle[u] {
                vv = vv.max(rv / p.primal[u].radius);
            }
            let f: FaceId = net.face_of(d);
            codegree = codegree.max(net.face_degree(f));
            if let Some(c) = p.dual[f] {
                vf = vf.max(rv / c.radius).max(c.radius / rv);
            }
        }
        audit.vertex_face = audit.vertex_face.max(vf);
        audit.vertex_vertex = audit.vertex_vertex.max(vv);
        let entry = audit
            .by_class
            .entry((net.degree(v), codegree))
            .or_insert((0.0, 0.0));
        entry.0 = entry.0.max(vf);
        entry.1 = entry.1.max(vv);
    }
    audit
}
