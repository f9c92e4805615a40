use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SpanningForest;
use crate::error::{Error, Result};
use crate::graph::{DartId, PlaneNetwork, VertexId};

pub const DEFAULT_STEP_CAP: u64 = 1 << 40;

/// Random-walk configuration. The trajectory is a function of
/// `(seed, stream)` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub seed: u64,
    pub stream: u64,
    pub step_cap: u64,
}

impl WalkConfig {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            seed,
            stream,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Chronological loop erasure of a walk given as a vertex sequence.
pub fn loop_erase(net: &PlaneNetwork, path: &[VertexId]) -> Result<Vec<VertexId>> {
    for w in path.windows(2) {
        if net.find_dart(w[0], w[1]).is_none() {
            return Err(Error::InvalidQuery(format!(
                "consecutive vertices {} and {} are not adjacent",
                w[0], w[1]
            )));
        }
    }
    let mut out: Vec<VertexId> = Vec::with_capacity(path.len());
    let mut position: HashMap<VertexId, usize> = HashMap::new();
    for &v in path {
        if let Some(&i) = position.get(&v) {
            for w in out.drain(i + 1..) {
                position.remove(&w);
            }
        } else {
            position.insert(v, out.len());
            out.push(v);
        }
    }
    Ok(out)
}

/// Per-vertex step tables for conductance-weighted walks, reusable across
/// samples on one network.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    net: &'a PlaneNetwork,
    start: Vec<usize>,
    darts: Vec<DartId>,
    cumulative: Vec<f64>,
    uniform: Vec<bool>,
}

impl<'a> Sampler<'a> {
    pub fn new(net: &'a PlaneNetwork) -> Self {
        let n = net.vertex_count();
        let mut start = Vec::with_capacity(n + 1);
        let mut darts = Vec::with_capacity(net.dart_count());
        let mut cumulative = Vec::with_capacity(net.dart_count());
        let mut uniform = Vec::with_capacity(n);
        for v in 0..n {
            start.push(darts.len());
            let mut total = 0.0;
            let mut first = None;
            let mut same = true;
            for d in net.darts_around(v) {
                let e = net.edge_of(d);
                if net.is_loop(e) {
                    continue;
                }
                let c = net.conductance(e);
                same &= *first.get_or_insert(c) == c;
                total += c;
                darts.push(d);
                cumulative.push(total);
            }
            uniform.push(same);
        }
        start.push(darts.len());
        Self {
            net,
            start,
            darts,
            cumulative,
            uniform,
        }
    }

    pub fn network(&self) -> &'a PlaneNetwork {
        self.net
    }

    #[inline]
    fn step(&self, v: VertexId, rng: &mut ChaCha8Rng) -> DartId {
        let (a, b) = (self.start[v], self.start[v + 1]);
        if self.uniform[v] {
            return self.darts[a + rng.gen_range(0..b - a)];
        }
        let cum = &self.cumulative[a..b];
        let x = rng.gen::<f64>() * cum[cum.len() - 1];
        let i = cum.partition_point(|&c| c <= x).min(cum.len() - 1);
        self.darts[a + i]
    }

    /// Parent darts of a Wilson tree rooted at `root`.
    fn parents(&self, root: VertexId, cfg: &WalkConfig) -> Result<Vec<Option<DartId>>> {
        let n = self.net.vertex_count();
        let mut rng = cfg.rng();
        let mut in_tree = vec![false; n];
        let mut next: Vec<Option<DartId>> = vec![None; n];
        in_tree[root] = true;
        let mut steps = 0u64;
        for v in 0..n {
            let mut u = v;
            while !in_tree[u] {
                let d = self.step(u, &mut rng);
                next[u] = Some(d);
                u = self.net.target(d);
                steps += 1;
                if steps > cfg.step_cap {
                    return Err(Error::StepCapExceeded(cfg.step_cap));
                }
            }
            let mut u = v;
            while !in_tree[u] {
                in_tree[u] = true;
                u = self
                    .net
                    .target(next[u].expect("walked vertex has a successor"));
            }
        }
        Ok(next)
    }

    pub fn ust(&self, root: VertexId, cfg: &WalkConfig) -> Result<SpanningForest> {
        if root >= self.net.vertex_count() {
            return Err(Error::InvalidQuery(format!("root {root} out of range")));
        }
        Ok(SpanningForest::from_parents(
            self.net,
            self.parents(root, cfg)?,
            None,
        ))
    }

    /// UST of the wired truncation rooted at the boundary vertex, with the
    /// boundary and its edges removed.
    pub fn wusf(&self, cfg: &WalkConfig) -> Result<SpanningForest> {
        let b = self.net.boundary_vertex().ok_or(Error::NoBoundary)?;
        Ok(SpanningForest::from_parents(
            self.net,
            self.parents(b, cfg)?,
            Some(b),
        ))
    }

    /// UST of a free truncation, rooted at vertex 0.
    pub fn fusf(&self, cfg: &WalkConfig) -> Result<SpanningForest> {
        if self.net.boundary_vertex().is_some() {
            return Err(Error::InvalidQuery(
                "free sampling needs a network without a wired boundary".into(),
            ));
        }
        self.ust(0, cfg)
    }
}

pub fn wilson_ust(net: &PlaneNetwork, root: VertexId, cfg: &WalkConfig) -> Result<SpanningForest> {
    Sampler::new(net).ust(root, cfg)
}

pub fn wusf_sample(net: &PlaneNetwork, cfg: &WalkConfig) -> Result<SpanningForest> {
    Sampler::new(net).wusf(cfg)
}

pub fn fusf_sample(net: &PlaneNetwork, cfg: &WalkConfig) -> Result<SpanningForest> {
    Sampler::new(net).fusf(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::electrical::kirchhoff_marginal;
    use crate::forest::{dual_complement, enumerate_trees, is_spanning_tree};
    use crate::generators;
    use crate::graph::wired_truncation;

    #[test]
    fn loop_erasure_examples() {
        let k = generators::tetrahedron();
        assert_eq!(loop_erase(&k, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        assert_eq!(loop_erase(&k, &[0, 1, 0, 2]).unwrap(), vec![0, 2]);
        assert_eq!(loop_erase(&k, &[0, 1, 2, 0, 3]).unwrap(), vec![0, 3]);
        assert_eq!(loop_erase(&k, &[1, 2, 3, 2, 0, 1, 3]).unwrap(), vec![1, 3]);
        let p = generators::path(3).unwrap();
        assert!(loop_erase(&p, &[0, 2]).is_err());
    }

    #[test]
    fn tree_network_is_sampled_exactly() {
        let p = generators::path(6).unwrap();
        for s in 0..5 {
            let f = wilson_ust(&p, 3, &WalkConfig::new(1, s)).unwrap();
            assert_eq!(f.edges(), (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn samples_are_spanning_trees() {
        let g = generators::tessellation_ball(&generators::TessellationSpec::new(3, 7, 3)).unwrap();
        let sampler = Sampler::new(&g);
        for s in 0..20 {
            let f = sampler
                .ust((s as usize * 7) % g.vertex_count(), &WalkConfig::new(3, s))
                .unwrap();
            assert!(f.check(&g, false));
            assert!(is_spanning_tree(&g, &f.edges()));
            assert!(is_spanning_tree(&g.dual(), &dual_complement(&f)));
        }
    }

    #[test]
    fn wired_samples_are_rooted_forests() {
        let g = generators::grid_ball(6).unwrap();
        let inner: Vec<usize> = (0..36)
            .filter(|v| (1..5).contains(&(v / 6)) && (1..5).contains(&(v % 6)))
            .collect();
        let t = wired_truncation(&g, &inner).unwrap();
        let sampler = Sampler::new(&t.network);
        for s in 0..20 {
            let f = sampler.wusf(&WalkConfig::new(9, s)).unwrap();
            assert!(f.check(&t.network, true));
            for v in 0..inner.len() {
                let r = f.component(v);
                assert!(f.is_wired_root(r));
            }
        }
    }

    #[test]
    fn single_inner_vertex_has_no_edges() {
        let g = generators::grid_ball(3).unwrap();
        let t = wired_truncation(&g, &[4]).unwrap();
        let f = wusf_sample(&t.network, &WalkConfig::new(0, 0)).unwrap();
        assert_eq!(f.edge_count(), 0);
    }

    #[test]
    fn determinism_per_stream() {
        let g = generators::grid_ball(8).unwrap();
        let a = wilson_ust(&g, 0, &WalkConfig::new(7, 11)).unwrap();
        let b = wilson_ust(&g, 0, &WalkConfig::new(7, 11)).unwrap();
        let c = wilson_ust(&g, 0, &WalkConfig::new(7, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn step_cap_is_signalled() {
        let g = generators::grid_ball(10).unwrap();
        let cfg = WalkConfig::new(1, 1).with_step_cap(5);
        assert!(matches!(
            wilson_ust(&g, 0, &cfg),
            Err(Error::StepCapExceeded(5))
        ));
    }

    /// Four-sigma check of empirical tree frequencies against enumeration.
    fn frequencies_match(net: &PlaneNetwork, root: VertexId, n: u64) {
        let law = enumerate_trees(net).unwrap();
        let sampler = Sampler::new(net);
        let mut counts = vec![0u64; law.trees.len()];
        for s in 0..n {
            let edges = sampler.ust(root, &WalkConfig::new(5, s)).unwrap().edges();
            let i = law.trees.iter().position(|t| t.edges == edges).unwrap();
            counts[i] += 1;
        }
        for (t, &c) in law.trees.iter().zip(&counts) {
            let p = t.probability;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() < 4.0 * sigma + 1e-12);
        }
    }

    #[test]
    fn four_cycle_and_weighted_triangle_laws() {
        let c4 = generators::cycle(4).unwrap();
        frequencies_match(&c4, 0, 20_000);
        frequencies_match(&c4, 2, 20_000);
        frequencies_match(&generators::triangle([1.0, 1.0, 2.0]), 1, 20_000);
    }

    #[test]
    fn wired_marginals_match_kirchhoff() {
        let g = generators::grid_ball(4).unwrap();
        let t = wired_truncation(&g, &[5, 6, 9, 10]).unwrap();
        let net = &t.network;
        let sampler = Sampler::new(net);
        let n = 20_000u64;
        let mut hits = vec![0u64; net.edge_count()];
        for s in 0..n {
            // count the full tree, including edges to the boundary
            let f = sampler
                .ust(net.boundary_vertex().unwrap(), &WalkConfig::new(2, s))
                .unwrap();
            for e in f.edges() {
                hits[e] += 1;
            }
        }
        for e in 0..net.edge_count() {
            let p = kirchhoff_marginal(net, e).unwrap();
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits[e] as f64 / n as f64 - p).abs() < 4.0 * sigma + 1e-12);
        }
    }
}
