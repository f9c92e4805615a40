//! Exhaustive spanning-tree enumeration for small networks.

use std::collections::BTreeMap;

use crate::electrical::matrix_tree_weight_edges;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PlaneNetwork, UnionFind};

pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    /// Edge ids in increasing order.
    pub edges: Vec<EdgeId>,
    /// Product of conductances.
    pub weight: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeDistribution {
    pub trees: Vec<WeightedTree>,
    pub total_weight: f64,
}

impl TreeDistribution {
    /// Probability of each tree keyed by its edge list.
    pub fn law(&self) -> BTreeMap<Vec<EdgeId>, f64> {
        self.trees
            .iter()
            .map(|t| (t.edges.clone(), t.probability))
            .collect()
    }

    /// Probability that `e` lies in the tree.
    pub fn marginal(&self, e: EdgeId) -> f64 {
        self.trees
            .iter()
            .filter(|t| t.edges.binary_search(&e).is_ok())
            .map(|t| t.probability)
            .sum()
    }
}

struct Enumerator<'a> {
    n: usize,
    edges: &'a [(usize, usize, f64)],
    cap: usize,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    fn connected_with_rest(&self, uf: &UnionFind, from: usize) -> bool {
        let mut uf = uf.clone();
        let mut parts = (0..self.n).filter(|&v| uf.find(v) == v).count();
        for &(u, v, _) in &self.edges[from..] {
            if uf.union(u, v) {
                parts -= 1;
            }
        }
        parts == 1
    }

    fn run(&mut self, i: usize, uf: UnionFind) -> Result<()> {
        if self.chosen.len() + 1 == self.n {
            if self.found.len() == self.cap {
                return Err(Error::EnumerationCapExceeded(self.cap));
            }
            self.found.push(self.chosen.clone());
            return Ok(());
        }
        if i == self.edges.len() || self.edges.len() - i < self.n - 1 - self.chosen.len() {
            return Ok(());
        }
        let (u, v, _) = self.edges[i];
        let mut with = uf.clone();
        if with.union(u, v) {
            self.chosen.push(i);
            self.run(i + 1, with)?;
            self.chosen.pop();
        }
        if self.connected_with_rest(&uf, i + 1) {
            self.run(i + 1, uf)?;
        }
        Ok(())
    }
}

/// Trees of a multigraph as index lists into `edges`, with weights.
fn enumerate_edge_list(
    n: usize,
    edges: &[(usize, usize, f64)],
    cap: usize,
) -> Result<Vec<(Vec<usize>, f64)>> {
    let unit: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v, 1.0)).collect();
    if matrix_tree_weight_edges(n, &unit) > cap as f64 + 0.5 {
        return Err(Error::EnumerationCapExceeded(cap));
    }
    let mut en = Enumerator {
        n,
        edges,
        cap,
        chosen: Vec::new(),
        found: Vec::new(),
    };
    if n == 1 {
        return Ok(vec![(Vec::new(), 1.0)]);
    }
    en.run(0, UnionFind::new(n))?;
    Ok(en
        .found
        .into_iter()
        .map(|t| {
            let w = t.iter().map(|&i| edges[i].2).product();
            (t, w)
        })
        .collect())
}

fn distribution(
    n: usize,
    edges: &[(usize, usize, f64)],
    ids: &[EdgeId],
    cap: usize,
) -> Result<TreeDistribution> {
    let raw = enumerate_edge_list(n, edges, cap)?;
    let total_weight: f64 = raw.iter().map(|(_, w)| w).sum();
    let det = matrix_tree_weight_edges(n, edges);
    assert!(
        (total_weight - det).abs() <= 1e-9 * det.abs().max(1.0),
        "enumerated weight {total_weight} disagrees with matrix-tree determinant {det}"
    );
    let trees = raw
        .into_iter()
        .map(|(t, weight)| {
            let mut edges: Vec<EdgeId> = t.into_iter().map(|i| ids[i]).collect();
            edges.sort_unstable();
            WeightedTree {
                edges,
                weight,
                probability: weight / total_weight,
            }
        })
        .collect();
    Ok(TreeDistribution {
        trees,
        total_weight,
    })
}

fn edge_list(net: &PlaneNetwork) -> Vec<(usize, usize, f64)> {
    (0..net.edge_count())
        .map(|e| {
            let (u, v) = net.endpoints(e);
            (u, v, net.conductance(e))
        })
        .collect()
}

pub fn enumerate_trees(net: &PlaneNetwork) -> Result<TreeDistribution> {
    enumerate_trees_capped(net, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_trees_capped(net: &PlaneNetwork, cap: usize) -> Result<TreeDistribution> {
    let ids: Vec<EdgeId> = (0..net.edge_count()).collect();
    distribution(net.vertex_count(), &edge_list(net), &ids, cap)
}

fn max_difference(a: &BTreeMap<Vec<EdgeId>, f64>, b: &BTreeMap<Vec<EdgeId>, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

/// Largest difference between the law of the dual complement of the UST
/// and the UST law of the dual, both by enumeration.
pub fn dual_law_discrepancy(net: &PlaneNetwork) -> Result<f64> {
    let primal = enumerate_trees(net)?;
    let dual = enumerate_trees(&net.dual())?;
    let complements = primal
        .trees
        .iter()
        .map(|t| {
            let comp: Vec<EdgeId> = (0..net.edge_count())
                .filter(|e| t.edges.binary_search(e).is_err())
                .collect();
            (comp, t.probability)
        })
        .collect();
    Ok(max_difference(&complements, &dual.law()))
}

/// Compares the UST law conditioned on `inside` present and `outside`
/// absent with the law of `T' + inside` for `T'` the UST of the network
/// with `outside` deleted and `inside` contracted. Returns the largest
/// probability difference.
pub fn check_spatial_markov(
    net: &PlaneNetwork,
    inside: &[EdgeId],
    outside: &[EdgeId],
) -> Result<f64> {
    let m = net.edge_count();
    let mut role = vec![0u8; m];
    for &e in inside {
        if e >= m {
            return Err(Error::NotAnEdge(format!("edge id {e}")));
        }
        role[e] = 1;
    }
    for &e in outside {
        if e >= m {
            return Err(Error::NotAnEdge(format!("edge id {e}")));
        }
        if role[e] == 1 {
            return Err(Error::ZeroProbability);
        }
        role[e] = 2;
    }

    let full = enumerate_trees(net)?;
    let mut conditioned = BTreeMap::new();
    let mut mass = 0.0;
    for t in &full.trees {
        let ok = inside.iter().all(|e| t.edges.binary_search(e).is_ok())
            && outside.iter().all(|e| t.edges.binary_search(e).is_err());
        if ok {
            conditioned.insert(t.edges.clone(), t.probability);
            mass += t.probability;
        }
    }
    if mass == 0.0 {
        return Err(Error::ZeroProbability);
    }
    for p in conditioned.values_mut() {
        *p /= mass;
    }

    // (G - outside) / inside on an edge list
    let mut uf = UnionFind::new(net.vertex_count());
    for &e in inside {
        let (u, v) = net.endpoints(e);
        if !uf.union(u, v) {
            return Err(Error::ZeroProbability);
        }
    }
    let mut label = vec![usize::MAX; net.vertex_count()];
    let mut count = 0;
    for v in 0..net.vertex_count() {
        let r = uf.find(v);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        label[v] = label[r];
    }
    let mut edges = Vec::new();
    let mut ids = Vec::new();
    for e in 0..m {
        if role[e] == 0 {
            let (u, v) = net.endpoints(e);
            edges.push((label[u], label[v], net.conductance(e)));
            ids.push(e);
        }
    }
    let minor = distribution(count, &edges, &ids, DEFAULT_ENUMERATION_CAP)?;
    let lifted = minor
        .trees
        .iter()
        .map(|t| {
            let mut all = t.edges.clone();
            all.extend_from_slice(inside);
            all.sort_unstable();
            (all, t.probability)
        })
        .collect();
    Ok(max_difference(&conditioned, &lifted))
}
