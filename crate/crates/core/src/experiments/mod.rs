//! Monte-Carlo runs for the tail exponents of spanning-forest observables.
//!
//! Every sample `i` draws from its own stream `i` of the run seed, so the
//! output does not depend on the number of worker threads.

mod fit;
mod output;

use rayon::prelude::*;

use crate::electrical::kirchhoff_marginal;
use crate::error::{Error, Result};
use crate::forest::{Sampler, WalkConfig};
use crate::generators::{self, tube_vertex, LayeredBall, TessellationSpec, DEFAULT_VERTEX_CAP};
use crate::graph::{wired_truncation, EdgeId, PlaneNetwork, VertexId};
use crate::packing::{
    hyperbolic_area, hyperbolic_diam, hyperbolic_stats, mobius_normalize, solve_double_packing,
    HyperbolicStats, Model, PackingOptions,
};

pub use fit::{
    fit_censored_tail, fit_tail, robustness_warning, FitOptions, GridRule, TailFit, MIN_SAMPLES,
};
pub use output::{write_fit_csv, write_reach_csv, write_samples_csv};

/// Ratio of consecutive ring radii in the packing of the tube.
pub const TUBE_RING_RATIO: f64 = 3.0 + 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Tessellation and truncation depth `D`.
    pub tessellation: TessellationSpec,
    /// Edge whose past (or whose endpoints' path) is observed; defaults to
    /// the root and its first neighbour.
    pub edge: Option<(VertexId, VertexId)>,
    pub samples: usize,
    pub seed: u64,
    /// Samples reaching the outer `censor_layers` layers are censored.
    pub censor_layers: usize,
    pub fit: FitOptions,
}

impl ExperimentSpec {
    pub fn new(tessellation: TessellationSpec, samples: usize, seed: u64) -> Self {
        Self {
            tessellation,
            edge: None,
            samples,
            seed,
            censor_layers: 2,
            fit: FitOptions {
                seed,
                ..FitOptions::default()
            },
        }
    }

    fn validate(&self) -> Result<()> {
        self.tessellation.validate()?;
        if self.samples < self.fit.min_samples {
            return Err(Error::InvalidSpec(format!(
                "{} samples requested; at least {} are needed for a fit",
                self.samples, self.fit.min_samples
            )));
        }
        if self.censor_layers == 0 || self.censor_layers > self.tessellation.depth {
            return Err(Error::InvalidSpec(format!(
                "cannot censor {} layers of a depth-{} ball",
                self.censor_layers, self.tessellation.depth
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub id: usize,
    pub value: f64,
    pub censored: bool,
}

/// Observed frequency of `e` outside the forest against the Kirchhoff
/// prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomCheck {
    pub empirical: f64,
    pub expected: f64,
    pub sigma: f64,
}

impl AtomCheck {
    pub fn within(&self, k: f64) -> bool {
        (self.empirical - self.expected).abs() <= k * self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub name: &'static str,
    pub samples: Vec<Sample>,
    pub fit: TailFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WiredRun {
    pub diameter: Observable,
    pub area: Observable,
    pub atom: AtomCheck,
    pub censored_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeRun {
    pub length: Observable,
    pub censored_fraction: f64,
}

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ball(spec: &ExperimentSpec) -> Result<LayeredBall> {
    spec.validate()?;
    generators::tessellation_ball_layered(&spec.tessellation, DEFAULT_VERTEX_CAP)
}

fn observed_edge(
    net: &PlaneNetwork,
    edge: Option<(VertexId, VertexId)>,
) -> Result<(VertexId, VertexId, EdgeId)> {
    let (x, y) = match edge {
        Some(xy) => xy,
        None => {
            let d = net
                .darts_around(0)
                .next()
                .ok_or_else(|| Error::InvalidSpec("root has no edges".into()))?;
            (0, net.target(d))
        }
    };
    if x >= net.vertex_count() || y >= net.vertex_count() {
        return Err(Error::NotAnEdge(format!("({x}, {y})")));
    }
    let d = net
        .find_dart(x, y)
        .ok_or_else(|| Error::NotAnEdge(format!("({x}, {y})")))?;
    Ok((x, y, net.edge_of(d)))
}

fn fit_samples(samples: &[Sample], opts: &FitOptions) -> Result<TailFit> {
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let flags: Vec<bool> = samples.iter().map(|s| s.censored).collect();
    fit_censored_tail(&values, &flags, opts)
}

fn censored_fraction(samples: &[Sample]) -> f64 {
    samples.iter().filter(|s| s.censored).count() as f64 / samples.len() as f64
}

/// Hyperbolic statistics of the disc packing of the ball, normalized at
/// the observed edge.
pub fn ball_geometry(
    net: &PlaneNetwork,
    x: VertexId,
    y: VertexId,
) -> Result<Vec<Option<HyperbolicStats>>> {
    let packing = solve_double_packing(net, &PackingOptions::new(Model::UnitDisc))?;
    let packing = mobius_normalize(&packing, net, x, y)?;
    hyperbolic_stats(&packing)
}

/// Wired diameter and area of the past of the observed edge, both read
/// from the same forests. Layer `D` is wired into the boundary vertex.
pub fn wired_experiment(spec: &ExperimentSpec) -> Result<WiredRun> {
    let ball = ball(spec)?;
    let depth = spec.tessellation.depth;
    let net = &ball.network;
    let (x, y, _) = observed_edge(net, spec.edge)?;
    if ball.layer[x] >= depth || ball.layer[y] >= depth {
        return Err(Error::InvalidSpec(
            "observed edge touches the wired layer".into(),
        ));
    }
    let stats = ball_geometry(net, x, y)?;

    let trunc = wired_truncation(net, &ball.vertices_below(depth))?;
    let tnet = &trunc.network;
    let (tx, ty) = (trunc.original_to_vertex[x], trunc.original_to_vertex[y]);
    let te = tnet.edge_of(
        tnet.find_dart(tx, ty)
            .ok_or_else(|| Error::NotAnEdge(format!("({x}, {y})")))?,
    );
    let cut = depth + 1 - spec.censor_layers;
    let outer: Vec<bool> = trunc
        .vertex_to_original
        .iter()
        .map(|v| v.is_none_or(|v| ball.layer[v] >= cut))
        .collect();

    let sampler = Sampler::new(tnet);
    let rows: Vec<(Sample, Sample, bool)> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let forest = sampler.wusf(&WalkConfig::new(spec.seed, i as u64))?;
            let past = forest.past_of_edge(tnet, te, &outer);
            let original: Vec<VertexId> = past
                .vertices
                .iter()
                .map(|&v| trunc.vertex_to_original[v].expect("the boundary is never in a past"))
                .collect();
            let diam = hyperbolic_diam(&stats, &original)?;
            let area = hyperbolic_area(&stats, &original)?;
            let c = past.touches_boundary;
            Ok((
                Sample {
                    id: i,
                    value: diam,
                    censored: c,
                },
                Sample {
                    id: i,
                    value: area,
                    censored: c,
                },
                past.is_empty(),
            ))
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    let empty = rows.iter().filter(|r| r.2).count() as f64 / n as f64;
    let (diam, area): (Vec<Sample>, Vec<Sample>) = rows.into_iter().map(|(d, a, _)| (d, a)).unzip();

    let expected = 1.0 - kirchhoff_marginal(tnet, te)?;
    let atom = AtomCheck {
        empirical: empty,
        expected,
        sigma: binomial_sigma(expected, n),
    };
    let censored = censored_fraction(&diam);
    Ok(WiredRun {
        diameter: Observable {
            name: "diameter",
            fit: fit_samples(&diam, &spec.fit)?,
            samples: diam,
        },
        area: Observable {
            name: "area",
            fit: fit_samples(&area, &spec.fit)?,
            samples: area,
        },
        atom,
        censored_fraction: censored,
    })
}

pub fn wired_diameter_experiment(spec: &ExperimentSpec) -> Result<Observable> {
    Ok(wired_experiment(spec)?.diameter)
}

pub fn wired_area_experiment(spec: &ExperimentSpec) -> Result<Observable> {
    Ok(wired_experiment(spec)?.area)
}

/// Length of the path joining the endpoints of the observed edge in the
/// uniform spanning tree of the free ball.
pub fn free_length_experiment(spec: &ExperimentSpec) -> Result<FreeRun> {
    let ball = ball(spec)?;
    let net = &ball.network;
    let (x, y, _) = observed_edge(net, spec.edge)?;
    let cut = spec.tessellation.depth + 1 - spec.censor_layers;
    let sampler = Sampler::new(net);
    let samples: Vec<Sample> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let tree = sampler.fusf(&WalkConfig::new(spec.seed, i as u64))?;
            let path = tree.tree_path(net, x, y)?;
            let censored = path.iter().any(|&e| {
                let (u, v) = net.endpoints(e);
                ball.layer[u] >= cut || ball.layer[v] >= cut
            });
            Ok(Sample {
                id: i,
                value: path.len() as f64,
                censored,
            })
        })
        .collect::<Result<_>>()?;
    let censored = censored_fraction(&samples);
    Ok(FreeRun {
        length: Observable {
            name: "length",
            fit: fit_samples(&samples, &spec.fit)?,
            samples,
        },
        censored_fraction: censored,
    })
}

/// `a(c)`, the probability per ring that a walk on the tube moves inward
/// without leaving its column.
pub fn tube_column_probability(c: f64) -> f64 {
    1.0 + c - (c * c + 2.0 * c).sqrt()
}

/// Lower bound for the probability that the past of `((0,0),(0,1))`
/// reaches ring `i`.
pub fn reach_lower_bound(c: f64, i: usize) -> f64 {
    c / (2.0 * c + 1.0) * tube_column_probability(c).powi(2 * i as i32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicSpec {
    pub c_values: Vec<f64>,
    pub rings: usize,
    pub samples: usize,
    pub seed: u64,
    /// Reach probabilities are compared with the bound for rings `1..=max_ring`.
    pub max_ring: usize,
    /// Minimum exceedance count for a ring radius to enter the fit.
    pub min_count: usize,
    pub fit: FitOptions,
}

impl ParabolicSpec {
    pub fn new(c_values: Vec<f64>, samples: usize, seed: u64) -> Self {
        Self {
            c_values,
            rings: 60,
            samples,
            seed,
            max_ring: 8,
            min_count: 10,
            fit: FitOptions {
                seed,
                ..FitOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachRow {
    pub ring: usize,
    pub empirical: f64,
    pub sigma: f64,
    pub bound: f64,
}

impl ReachRow {
    /// `empirical >= bound - k sigma`.
    pub fn dominates(&self, k: f64) -> bool {
        self.empirical >= self.bound - k * self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicRow {
    pub c: f64,
    /// Samples of `ratio^(max ring reached)`, 0 for an empty past.
    pub diameter: Observable,
    pub reach: Vec<ReachRow>,
    pub censored_fraction: f64,
}

/// Diameter proxy `(3 + 2 sqrt 2)^i` of the past of `((0,0),(0,1))` in the
/// wired spanning forest of the tube, where `i` is the outermost
/// ring the past reaches. The outermost ring is wired, so the forest is
/// oriented away from ring 0.
pub fn parabolic_experiment(spec: &ParabolicSpec) -> Result<Vec<ParabolicRow>> {
    if spec.rings < spec.max_ring + 3 {
        return Err(Error::InvalidSpec(format!(
            "{} rings cannot resolve ring {}",
            spec.rings, spec.max_ring
        )));
    }
    if spec.samples < spec.fit.min_samples {
        return Err(Error::InvalidSpec(format!(
            "{} samples requested; at least {} are needed for a fit",
            spec.samples, spec.fit.min_samples
        )));
    }
    let mut rows = Vec::new();
    for &c in &spec.c_values {
        let net = generators::tube(spec.rings, c)?;
        let inner: Vec<VertexId> = (0..tube_vertex(spec.rings - 1, 0)).collect();
        let trunc = wired_truncation(&net, &inner)?;
        let tnet = &trunc.network;
        let (x, y) = (
            trunc.original_to_vertex[tube_vertex(0, 0)],
            trunc.original_to_vertex[tube_vertex(0, 1)],
        );
        let e = tnet.edge_of(tnet.find_dart(x, y).expect("ring edge"));
        let ring_of: Vec<Option<usize>> = trunc
            .vertex_to_original
            .iter()
            .map(|v| v.map(|v| v / 4))
            .collect();
        let outer: Vec<bool> = ring_of
            .iter()
            .map(|r| r.is_none_or(|r| r + 2 >= spec.rings))
            .collect();
        let sampler = Sampler::new(tnet);
        let reached: Vec<(Option<usize>, bool)> = (0..spec.samples)
            .into_par_iter()
            .map(|i| {
                let forest = sampler.wusf(&WalkConfig::new(spec.seed, i as u64))?;
                let past = forest.past_of_edge(tnet, e, &outer);
                Ok((
                    past.vertices.iter().filter_map(|&v| ring_of[v]).max(),
                    past.touches_boundary,
                ))
            })
            .collect::<Result<_>>()?;
        let samples: Vec<Sample> = reached
            .iter()
            .enumerate()
            .map(|(id, &(ring, censored))| Sample {
                id,
                value: ring.map_or(0.0, |i| TUBE_RING_RATIO.powi(i as i32)),
                censored,
            })
            .collect();
        let n = samples.len();
        let reach = (1..=spec.max_ring)
            .map(|i| {
                let hits = reached
                    .iter()
                    .filter(|(r, _)| r.is_some_and(|r| r >= i))
                    .count();
                let empirical = hits as f64 / n as f64;
                let bound = reach_lower_bound(c, i);
                ReachRow {
                    ring: i,
                    empirical,
                    sigma: binomial_sigma(empirical, n).max(binomial_sigma(bound, n)),
                    bound,
                }
            })
            .collect();
        let censored = censored_fraction(&samples);
        let opts = FitOptions {
            grid: GridRule::Fixed {
                thresholds: (0..spec.rings)
                    .map(|i| TUBE_RING_RATIO.powi(i as i32))
                    .collect(),
                min_count: spec.min_count,
            },
            ..spec.fit.clone()
        };
        rows.push(ParabolicRow {
            c,
            diameter: Observable {
                name: "diameter",
                fit: fit_samples(&samples, &opts)?,
                samples,
            },
            reach,
            censored_fraction: censored,
        });
    }
    Ok(rows)
}
