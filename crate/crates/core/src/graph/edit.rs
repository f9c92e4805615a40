//! Mutable dart structure used by contraction-based transforms.

use super::{PlaneNetwork, RotationEntry};

pub(super) struct MapEditor {
    origin: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    alive: Vec<bool>,
    /// One live dart per vertex label, or `usize::MAX`.
    anchor: Vec<usize>,
    degree: Vec<usize>,
}

impl MapEditor {
    pub(super) fn new(net: &PlaneNetwork) -> Self {
        let n = net.vertex_count();
        let mut anchor = vec![usize::MAX; n];
        let mut degree = vec![0; n];
        for v in 0..n {
            for d in net.darts_around(v) {
                if anchor[v] == usize::MAX {
                    anchor[v] = d;
                }
                degree[v] += 1;
            }
        }
        Self {
            origin: (0..net.dart_count()).map(|d| net.origin(d)).collect(),
            next: (0..net.dart_count()).map(|d| net.next(d)).collect(),
            prev: (0..net.dart_count()).map(|d| net.prev(d)).collect(),
            alive: vec![true; net.dart_count()],
            anchor,
            degree,
        }
    }

    pub(super) fn origin(&self, d: usize) -> usize {
        self.origin[d]
    }

    pub(super) fn edge_alive(&self, e: usize) -> bool {
        self.alive[2 * e]
    }

    pub(super) fn edge_count(&self) -> usize {
        self.origin.len() / 2
    }

    pub(super) fn is_loop(&self, e: usize) -> bool {
        self.origin[2 * e] == self.origin[2 * e + 1]
    }

    fn darts_of(&self, v: usize) -> Vec<usize> {
        let start = self.anchor[v];
        if start == usize::MAX {
            return Vec::new();
        }
        let mut out = vec![start];
        let mut d = self.next[start];
        while d != start {
            out.push(d);
            d = self.next[d];
        }
        out
    }

    fn unlink(&mut self, d: usize) {
        let v = self.origin[d];
        let (p, n) = (self.prev[d], self.next[d]);
        if n == d {
            self.anchor[v] = usize::MAX;
        } else {
            self.next[p] = n;
            self.prev[n] = p;
            if self.anchor[v] == d {
                self.anchor[v] = n;
            }
        }
        self.degree[v] -= 1;
        self.alive[d] = false;
    }

    pub(super) fn delete_edge(&mut self, e: usize) {
        self.unlink(2 * e);
        self.unlink(2 * e + 1);
    }

    /// Contracts non-loop edge `e`; returns the surviving vertex label.
    pub(super) fn contract(&mut self, e: usize) -> usize {
        let (mut a, mut b) = (2 * e, 2 * e + 1);
        // keep the label with more darts
        if self.degree[self.origin[a]] < self.degree[self.origin[b]] {
            std::mem::swap(&mut a, &mut b);
        }
        let (u, w) = (self.origin[a], self.origin[b]);
        debug_assert_ne!(u, w);
        for d in self.darts_of(w) {
            self.origin[d] = u;
        }
        let (pa, na, pb, nb) = (self.prev[a], self.next[a], self.prev[b], self.next[b]);
        match (na == a, nb == b) {
            (true, true) => self.anchor[u] = usize::MAX,
            (true, false) => {
                self.next[pb] = nb;
                self.prev[nb] = pb;
                self.anchor[u] = nb;
            }
            (false, true) => {
                self.next[pa] = na;
                self.prev[na] = pa;
                self.anchor[u] = na;
            }
            (false, false) => {
                self.next[pa] = nb;
                self.prev[nb] = pa;
                self.next[pb] = na;
                self.prev[na] = pb;
                self.anchor[u] = na;
            }
        }
        self.degree[u] += self.degree[w];
        self.degree[u] -= 2;
        self.degree[w] = 0;
        self.anchor[w] = usize::MAX;
        self.alive[a] = false;
        self.alive[b] = false;
        u
    }

    /// Adds an edge from the corner after dart `da` to the corner after `db`;
    /// both corners must lie in the same face. Returns the new edge id.
    pub(super) fn add_edge_in_face(&mut self, da: usize, db: usize) -> usize {
        let e = self.origin.len() / 2;
        let (x, y) = (2 * e, 2 * e + 1);
        let (u, v) = (self.origin[da], self.origin[db]);
        self.origin.extend([u, v]);
        self.next.extend([usize::MAX, usize::MAX]);
        self.prev.extend([usize::MAX, usize::MAX]);
        self.alive.extend([true, true]);
        for (new, after, owner) in [(x, da, u), (y, db, v)] {
            let n = self.next[after];
            self.next[after] = new;
            self.prev[new] = after;
            self.next[new] = n;
            self.prev[n] = new;
            self.degree[owner] += 1;
        }
        e
    }

    /// Face label of every live dart (face on the left).
    pub(super) fn faces(&self) -> Vec<usize> {
        let mut face = vec![usize::MAX; self.origin.len()];
        let mut count = 0;
        for start in 0..self.origin.len() {
            if !self.alive[start] || face[start] != usize::MAX {
                continue;
            }
            let mut d = start;
            loop {
                face[d] = count;
                d = self.prev[d ^ 1];
                if d == start {
                    break;
                }
            }
            count += 1;
        }
        face
    }

    pub(super) fn live_darts_of(&self, v: usize) -> Vec<usize> {
        self.darts_of(v)
    }

    /// Rotation lists for the given vertex labels (in the order given) with
    /// edges renumbered densely by increasing old id. Returns the lists and
    /// the new-to-old edge map.
    pub(super) fn export(&self, labels: &[usize]) -> (Vec<Vec<RotationEntry>>, Vec<usize>) {
        let m = self.origin.len() / 2;
        let mut new_vertex = vec![usize::MAX; self.anchor.len()];
        for (i, &l) in labels.iter().enumerate() {
            new_vertex[l] = i;
        }
        let mut new_edge = vec![usize::MAX; m];
        let mut edge_map = Vec::new();
        for e in 0..m {
            if self.alive[2 * e] {
                new_edge[e] = edge_map.len();
                edge_map.push(e);
            }
        }
        let rotation = labels
            .iter()
            .map(|&l| {
                let mut darts = self.darts_of(l);
                // canonical start: smallest dart id
                if let Some(pos) = darts
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &d)| d)
                    .map(|(i, _)| i)
                {
                    darts.rotate_left(pos);
                }
                darts
                    .into_iter()
                    .map(|d| (new_vertex[self.origin[d ^ 1]], new_edge[d >> 1]))
                    .collect()
            })
            .collect();
        (rotation, edge_map)
    }
}
