//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a criterion fails that is not a known shortfall.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use usf_core::electrical::{effective_resistance, hitting_probability, ResistanceQuery};
use usf_core::experiments::{
    fit_tail, free_length_experiment, parabolic_experiment, robustness_warning, wired_experiment,
    write_fit_csv, write_reach_csv, write_samples_csv, ExperimentSpec, FitOptions, Observable,
    ParabolicSpec,
};
use usf_core::forest::{
    check_spatial_markov, dual_law_discrepancy, enumerate_trees, Sampler, WalkConfig,
};
use usf_core::generators::{self, tube_vertex, TessellationSpec};
use usf_core::graph::wired_truncation;
use usf_core::packing::{solve_double_packing, DoublePacking, Model, PackingOptions};
use usf_core::PlaneNetwork;

/// Criteria that are expected to fail at desk scale. They still print FAIL.
const KNOWN_SHORTFALLS: &[u32] = &[7];

const SEED: u64 = 20_240_601;

struct Report {
    failures: Vec<u32>,
    quiet: bool,
}

impl Report {
    fn new(quiet: bool) -> Self {
        Self {
            failures: Vec::new(),
            quiet,
        }
    }

    fn line(&mut self, id: u32, name: &str, pass: bool, detail: &str) {
        self.info(&format!(
            "[{}] {id:>2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        ));
        if !pass {
            self.failures.push(id);
        }
    }

    fn info(&self, text: &str) {
        if !self.quiet {
            println!("{text}");
        }
    }
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

/// Relative tangency and orthogonality errors, measured from scratch.
fn packing_errors(net: &PlaneNetwork, p: &DoublePacking) -> (f64, f64) {
    let mut tangency = 0f64;
    for e in 0..net.edge_count() {
        let (u, v) = net.endpoints(e);
        let (a, b) = (p.primal[u], p.primal[v]);
        let d = ((a.centre.re - b.centre.re).powi(2) + (a.centre.im - b.centre.im).powi(2)).sqrt();
        tangency = tangency.max((d - a.radius - b.radius).abs() / (a.radius + b.radius));
    }
    let mut orthogonality = 0f64;
    for f in 0..net.face_count() {
        let Some(c) = p.dual[f] else { continue };
        for v in net.face_vertices(f) {
            let a = p.primal[v];
            let d2 = (a.centre.re - c.centre.re).powi(2) + (a.centre.im - c.centre.im).powi(2);
            let s = a.radius.powi(2) + c.radius.powi(2);
            orthogonality = orthogonality.max((d2 - s).abs() / s);
        }
    }
    (tangency, orthogonality)
}

fn packing_correctness(r: &mut Report) {
    let mut cases: Vec<(String, PlaneNetwork, Model)> = vec![
        (
            "tetrahedron".into(),
            generators::tetrahedron(),
            Model::EuclideanPlane,
        ),
        (
            "tetrahedron".into(),
            generators::tetrahedron(),
            Model::UnitDisc,
        ),
        ("cube".into(), generators::cube(), Model::EuclideanPlane),
        ("cube".into(), generators::cube(), Model::UnitDisc),
    ];
    for (p, q, depths) in [(3, 7, 1..=6), (4, 5, 1..=5)] {
        for d in depths {
            let net = generators::tessellation_ball(&TessellationSpec::new(p, q, d)).unwrap();
            cases.push((format!("{{{p},{q}}} depth {d}"), net, Model::UnitDisc));
        }
    }
    for c in [0.25, 1.0, 4.0] {
        cases.push((
            format!("tube(20, {c})"),
            generators::tube(20, c).unwrap(),
            Model::EuclideanPlane,
        ));
    }
    let (mut worst_t, mut worst_o, mut slowest) = (0f64, 0f64, (Duration::ZERO, String::new()));
    let mut errors = Vec::new();
    for (name, net, model) in &cases {
        let t = Instant::now();
        match solve_double_packing(net, &PackingOptions::new(*model)) {
            Ok(p) => {
                let elapsed = t.elapsed();
                let (a, b) = packing_errors(net, &p);
                worst_t = worst_t.max(a);
                worst_o = worst_o.max(b);
                if elapsed > slowest.0 {
                    slowest = (elapsed, name.clone());
                }
            }
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
    let pass = errors.is_empty() && worst_t < 1e-7 && worst_o < 1e-7 && slowest.0.as_secs() < 120;
    let mut detail = format!(
        "{} packings, max tangency {worst_t:.2e}, max orthogonality {worst_o:.2e}, slowest {:.2?} ({})",
        cases.len(),
        slowest.0,
        slowest.1
    );
    for e in errors {
        let _ = write!(detail, "; {e}");
    }
    r.line(1, "packing correctness", pass, &detail);
}

fn tube_radii(r: &mut Report) {
    let net = generators::tube(20, 1.0).unwrap();
    let p = solve_double_packing(&net, &PackingOptions::new(Model::EuclideanPlane)).unwrap();
    let target = 3.0 + 2.0 * 2f64.sqrt();
    let mut worst = 0f64;
    for i in 6..14 {
        for j in 0..4 {
            let q = p.primal[tube_vertex(i + 1, j)].radius / p.primal[tube_vertex(i, j)].radius;
            worst = worst.max((q / target - 1.0).abs());
        }
    }
    r.line(
        2,
        "tube radii",
        worst < 0.02,
        &format!("max relative deviation of r(i+1,j)/r(i,j) from {target:.4} is {worst:.2e}"),
    );
}

fn tube_hitting(r: &mut Report) {
    let t0 = Instant::now();
    let mut worst = 0f64;
    for c in [0.25f64, 1.0, 4.0] {
        let a = 1.0 + c - (c * c + 2.0 * c).sqrt();
        let net = generators::tube(60, c).unwrap();
        let absorbing: Vec<usize> = (0..60)
            .flat_map(|i| (1..4).map(move |j| tube_vertex(i, j)))
            .collect();
        for i in 1..=10 {
            let h = hitting_probability(&net, tube_vertex(i, 0), &[tube_vertex(0, 0)], &absorbing)
                .unwrap();
            worst = worst.max((h - a.powi(i as i32)).abs());
        }
    }
    let elapsed = t0.elapsed();
    r.line(
        3,
        "tube hitting probability",
        worst < 1e-8 && elapsed.as_secs_f64() < 5.0,
        &format!("max error {worst:.2e} in {elapsed:.2?}"),
    );
}

/// Edge counts of `n` trees rooted at `root`, one stream per sample.
fn edge_counts(net: &PlaneNetwork, root: usize, n: u64, seed: u64) -> Vec<u64> {
    let sampler = Sampler::new(net);
    let trees: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            sampler
                .ust(root, &WalkConfig::new(seed, i))
                .unwrap()
                .edges()
        })
        .collect();
    let mut counts = vec![0u64; net.edge_count()];
    for t in trees {
        for e in t {
            counts[e] += 1;
        }
    }
    counts
}

fn kirchhoff_networks() -> Vec<(&'static str, PlaneNetwork, usize)> {
    let grid5 = generators::grid_ball(5).unwrap();
    let inner: Vec<usize> = (1..4)
        .flat_map(|r| (1..4).map(move |c| 5 * r + c))
        .collect();
    let wired = wired_truncation(&grid5, &inner).unwrap().network;
    let root = wired.boundary_vertex().unwrap();
    vec![
        ("triangle", generators::triangle([1.0; 3]), 0),
        (
            "weighted triangle",
            generators::triangle([1.0, 1.0, 2.0]),
            0,
        ),
        ("4-cycle", generators::cycle(4).unwrap(), 0),
        ("3x3 grid", generators::grid_rect(3, 3).unwrap(), 0),
        ("wired 3x3 grid", wired, root),
    ]
}

fn kirchhoff_consistency(r: &mut Report) -> String {
    let t0 = Instant::now();
    let n = 100_000u64;
    let mut worst = 0f64;
    let mut csv = String::from("network,edge,count\n");
    for (name, net, root) in kirchhoff_networks() {
        let counts = edge_counts(&net, root, n, SEED);
        for (e, &k) in counts.iter().enumerate() {
            let (u, v) = net.endpoints(e);
            let p = net.conductance(e)
                * effective_resistance(&net, &ResistanceQuery::pair(u, v)).unwrap();
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let z = if sigma > 0.0 {
                (k as f64 / n as f64 - p).abs() / sigma
            } else {
                0.0
            };
            worst = worst.max(z);
            let _ = writeln!(csv, "{name},{e},{k}");
        }
    }
    let elapsed = t0.elapsed();
    r.line(
        4,
        "Kirchhoff consistency",
        worst < 4.0 && elapsed.as_secs() < 60,
        &format!("largest deviation {worst:.2} sigma over 5 networks at N={n}, {elapsed:.2?}"),
    );
    csv
}

fn exact_laws(r: &mut Report) -> String {
    let t0 = Instant::now();
    let n = 100_000u64;
    let mut csv = String::from("network,tree,count\n");
    let mut worst_tv = 0f64;
    for (name, net) in [
        ("4-cycle", generators::cycle(4).unwrap()),
        ("weighted triangle", generators::triangle([1.0, 1.0, 2.0])),
    ] {
        let law = enumerate_trees(&net).unwrap().law();
        let sampler = Sampler::new(&net);
        let trees: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| {
                sampler
                    .ust(0, &WalkConfig::new(SEED + 1, i))
                    .unwrap()
                    .edges()
            })
            .collect();
        let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for t in trees {
            *counts.entry(t).or_default() += 1;
        }
        let mut tv = 0.0;
        for (t, p) in &law {
            tv += (counts.get(t).copied().unwrap_or(0) as f64 / n as f64 - p).abs();
        }
        tv += counts
            .iter()
            .filter(|(t, _)| !law.contains_key(*t))
            .map(|(_, &k)| k as f64 / n as f64)
            .sum::<f64>();
        worst_tv = worst_tv.max(tv / 2.0);
        for (t, k) in &counts {
            let _ = writeln!(csv, "{name},{t:?},{k}");
        }
    }
    let mut worst_exact = 0f64;
    for (rows, cols) in [(2, 3), (3, 3)] {
        let net = generators::grid_rect(rows, cols).unwrap();
        worst_exact = worst_exact.max(dual_law_discrepancy(&net).unwrap());
        let m = net.edge_count();
        for (inside, outside) in [
            (vec![0], vec![m - 1]),
            (vec![0, 1], vec![]),
            (vec![], vec![1, m - 2]),
        ] {
            worst_exact = worst_exact.max(check_spatial_markov(&net, &inside, &outside).unwrap());
        }
    }
    let elapsed = t0.elapsed();
    r.line(
        5,
        "exact-law checks",
        worst_tv < 0.01 && worst_exact < 1e-12 && elapsed.as_secs() < 120,
        &format!(
            "max TV {worst_tv:.4} at N={n}, duality/spatial Markov discrepancy {worst_exact:.1e}, {elapsed:.2?}"
        ),
    );
    csv
}

fn tail_calibration(r: &mut Report) {
    let t0 = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for alpha in [0.5, 1.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha))
            .collect();
        let fit = fit_tail(&samples, &FitOptions::default()).unwrap();
        pass &= (fit.slope + alpha).abs() <= 0.05;
        let _ = write!(detail, "alpha {alpha}: slope {:.4}; ", fit.slope);
    }
    let elapsed = t0.elapsed();
    pass &= elapsed.as_secs() < 10;
    let _ = write!(detail, "{elapsed:.2?}");
    r.line(6, "tail estimator calibration", pass, &detail);
}

fn csvs(obs: &Observable) -> (Vec<u8>, Vec<u8>) {
    let (mut s, mut f) = (Vec::new(), Vec::new());
    write_samples_csv(&obs.samples, &mut s).unwrap();
    write_fit_csv(&obs.fit, &mut f).unwrap();
    (s, f)
}

fn fit_detail(obs: &Observable) -> String {
    let f = &obs.fit;
    format!(
        "slope {:.3} (bootstrap {:.3} to {:.3}), window {:.2}-{:.2}, censored {:.2}%",
        f.slope,
        f.bootstrap_lo,
        f.bootstrap_hi,
        f.window.0,
        f.window.1,
        100.0 * f.censored_fraction
    )
}

/// Every CSV produced by criteria 4-10.
fn heavy_runs(r: &mut Report) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    out.push(kirchhoff_consistency(r).into_bytes());
    out.push(exact_laws(r).into_bytes());
    tail_calibration(r);

    let t0 = Instant::now();
    let spec = ExperimentSpec::new(TessellationSpec::new(3, 7, 8), 20_000, SEED);
    let wired = wired_experiment(&spec).unwrap();
    let elapsed = t0.elapsed();
    let censored_ok = wired.censored_fraction < 0.10;
    let slope = wired.diameter.fit.slope;
    r.line(
        7,
        "wired diameter exponent",
        censored_ok && (-1.25..=-0.80).contains(&slope),
        &format!("{}, {elapsed:.1?}", fit_detail(&wired.diameter)),
    );
    let atom = &wired.atom;
    r.info(&format!(
        "       atom at 0: {:.4} vs 1 - Kirchhoff {:.4} ({:.1} sigma)",
        atom.empirical,
        atom.expected,
        (atom.empirical - atom.expected).abs() / atom.sigma
    ));
    let small = wired_experiment(&ExperimentSpec::new(
        TessellationSpec::new(3, 7, 6),
        20_000,
        SEED,
    ))
    .unwrap();
    for (a, b) in [
        (&small.diameter, &wired.diameter),
        (&small.area, &wired.area),
    ] {
        r.info(&format!(
            "       depth 6 {} slope {:.3}: {}",
            a.name,
            a.fit.slope,
            robustness_warning(&a.fit, &b.fit).unwrap_or_else(|| "agrees with depth 8".into())
        ));
    }
    let slope = wired.area.fit.slope;
    r.line(
        8,
        "wired area exponent",
        censored_ok && (-0.65..=-0.40).contains(&slope),
        &fit_detail(&wired.area),
    );
    for obs in [&wired.diameter, &wired.area] {
        let (s, f) = csvs(obs);
        out.push(s);
        out.push(f);
    }

    let t0 = Instant::now();
    let free = free_length_experiment(&spec).unwrap();
    let elapsed = t0.elapsed();
    let slope = free.length.fit.slope;
    r.line(
        9,
        "free length exponent",
        (-0.65..=-0.38).contains(&slope),
        &format!("{}, {elapsed:.1?}", fit_detail(&free.length)),
    );
    let (s, f) = csvs(&free.length);
    out.push(s);
    out.push(f);

    let t0 = Instant::now();
    let rows =
        parabolic_experiment(&ParabolicSpec::new(vec![0.1, 1.0, 10.0], 20_000, SEED)).unwrap();
    let elapsed = t0.elapsed();
    let slope = |c: f64| rows.iter().find(|r| r.c == c).unwrap().diameter.fit.slope;
    let ratio = slope(10.0).abs() / slope(0.1).abs();
    let worst = rows
        .iter()
        .flat_map(|row| row.reach.iter())
        .filter(|x| x.ring <= 8)
        .map(|x| (x.bound - x.empirical) / x.sigma)
        .fold(f64::NEG_INFINITY, f64::max);
    let dominated = rows.iter().all(|row| {
        row.reach
            .iter()
            .filter(|x| x.ring <= 8)
            .all(|x| x.dominates(4.0))
    });
    r.line(
        10,
        "non-universality on the tube",
        ratio >= 2.0 && dominated && elapsed.as_secs() < 1200,
        &format!(
            "slopes {:.3} / {:.3} / {:.3} for c = 0.1 / 1 / 10, ratio {ratio:.2}; \
             worst reach margin {worst:.2} sigma above the bound's 4-sigma floor; {elapsed:.1?}",
            slope(0.1),
            slope(1.0),
            slope(10.0),
        ),
    );
    let mut reach = Vec::new();
    write_reach_csv(&rows, &mut reach).unwrap();
    out.push(reach);
    for row in &rows {
        let (s, f) = csvs(&row.diameter);
        out.push(s);
        out.push(f);
    }
    out
}

fn main() {
    let mut report = Report::new(false);
    packing_correctness(&mut report);
    tube_radii(&mut report);
    tube_hitting(&mut report);

    let first = pool(1).install(|| heavy_runs(&mut report));
    // rerun with several workers; only the CSV bytes matter here
    let mut quiet = Report::new(true);
    let threads = 4;
    println!("       rerunning 4-10 with {threads} workers");
    let second = pool(threads).install(|| heavy_runs(&mut quiet));
    let same = first.len() == second.len() && first.iter().zip(&second).all(|(a, b)| a == b);
    report.line(
        11,
        "determinism across worker counts",
        same,
        &format!(
            "{} CSVs, {} bytes, 1 vs {threads} workers",
            first.len(),
            first.iter().map(Vec::len).sum::<usize>()
        ),
    );

    let unexpected: Vec<u32> = report
        .failures
        .iter()
        .copied()
        .filter(|id| !KNOWN_SHORTFALLS.contains(id))
        .collect();
    println!(
        "acceptance: {} of 11 criteria pass; known shortfalls {:?}; unexpected failures {:?}",
        11 - report.failures.len(),
        KNOWN_SHORTFALLS,
        unexpected
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
