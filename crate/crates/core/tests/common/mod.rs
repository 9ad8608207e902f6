//! Shared helpers: seeded random graphs and dense brute-force reference implementations.
#![allow(dead_code)]

use std::path::PathBuf;

use amen::graph::{AttrId, AttributedGraph, NodeId};
use amen::SimilarityKind;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Erdős–Rényi graph with at least one edge; attribute entries present with
/// probability `density`, values either 1 or uniform in (0, 1].
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, d: usize, p: f64, density: f64, binary: bool) -> AttributedGraph {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::new();
        for f in 0..d as AttrId {
            if rng.gen_bool(density) {
                let v = if binary { 1.0 } else { 1.0 - rng.gen::<f64>() };
                row.push((f, v));
            }
        }
        rows.push(row);
    }
    AttributedGraph::from_parts(n, d, &edges, rows).unwrap()
}

/// `size` distinct members, uniformly chosen.
pub fn random_members<R: Rng>(rng: &mut R, n: usize, size: usize) -> Vec<NodeId> {
    let mut all: Vec<NodeId> = (0..n as NodeId).collect();
    all.shuffle(rng);
    all.truncate(size);
    all
}

/// Dense copy of a graph for reference computations.
pub struct Dense {
    pub n: usize,
    pub d: usize,
    pub adj: Vec<Vec<bool>>,
    pub x: Vec<Vec<f64>>,
    pub k: Vec<f64>,
    pub two_m: f64,
}

impl Dense {
    pub fn new(g: &AttributedGraph) -> Self {
        let n = g.node_count();
        let d = g.attribute_count();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[u as usize][v as usize] = true;
            adj[v as usize][u as usize] = true;
        }
        let mut x = vec![vec![0.0; d]; n];
        for (i, row) in x.iter_mut().enumerate() {
            for f in 0..d {
                row[f] = g.attributes(i as NodeId).get(f as AttrId);
            }
        }
        let k: Vec<f64> = adj.iter().map(|r| r.iter().filter(|&&a| a).count() as f64).collect();
        let two_m = k.iter().sum();
        Dense { n, d, adj, x, k, two_m }
    }

    fn a(&self, i: usize, j: usize) -> f64 {
        if self.adj[i][j] {
            1.0
        } else {
            0.0
        }
    }

    pub fn support(&self, c: &[usize]) -> Vec<bool> {
        (0..self.d).map(|f| c.iter().any(|&i| self.x[i][f] != 0.0)).collect()
    }

    fn sim(&self, i: usize, j: usize, w: &[f64], support: &[bool], delta: bool) -> f64 {
        (0..self.d)
            .filter(|&f| support[f])
            .map(|f| {
                let s = if delta {
                    if self.x[i][f] == self.x[j][f] {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.x[i][f] * self.x[j][f]
                };
                w[f] * s
            })
            .sum()
    }

    fn kernels(sim: SimilarityKind) -> (bool, bool) {
        match sim {
            SimilarityKind::Dot => (false, false),
            SimilarityKind::Delta => (true, true),
            SimilarityKind::BinaryMixed => (false, true),
        }
    }

    /// Internal consistency summed over all ordered member pairs, diagonal included.
    pub fn internal(&self, c: &[usize], w: &[f64], sim: SimilarityKind) -> f64 {
        let support = self.support(c);
        let (delta, _) = Self::kernels(sim);
        let mut total = 0.0;
        for &i in c {
            for &j in c {
                total += (self.a(i, j) - self.k[i] * self.k[j] / self.two_m) * self.sim(i, j, w, &support, delta);
            }
        }
        total
    }

    /// Surprise-weighted internal edge mass over ordered member pairs.
    pub fn internal_tilde(&self, c: &[usize], w: &[f64], sim: SimilarityKind) -> f64 {
        let support = self.support(c);
        let (delta, _) = Self::kernels(sim);
        let mut total = 0.0;
        for &i in c {
            for &j in c {
                let pen = 1.0 - (self.k[i] * self.k[j] / self.two_m).min(1.0);
                total += self.a(i, j) * pen * self.sim(i, j, w, &support, delta);
            }
        }
        total
    }

    pub fn external(&self, c: &[usize], w: &[f64], sim: SimilarityKind) -> f64 {
        let support = self.support(c);
        let (_, delta) = Self::kernels(sim);
        let mut total = 0.0;
        for &i in c {
            for b in 0..self.n {
                if c.contains(&b) || !self.adj[i][b] {
                    continue;
                }
                let pen = 1.0 - (self.k[i] * self.k[b] / self.two_m).min(1.0);
                total -= pen * self.sim(i, b, w, &support, delta);
            }
        }
        total
    }

    pub fn normality(&self, c: &[usize], w: &[f64], sim: SimilarityKind) -> f64 {
        self.internal(c, w, sim) + self.external(c, w, sim)
    }

    /// Normalized relevance `x(f)` for one attribute.
    pub fn relevance(&self, c: &[usize], f: usize, sim: SimilarityKind) -> f64 {
        let mut w = vec![0.0; self.d];
        w[f] = 1.0;
        let vol: f64 = c.iter().map(|&i| self.k[i]).sum();
        let i_max = (c.len() * c.len()) as f64;
        let i_min = -vol * vol / self.two_m;
        let xi = self.internal(c, &w, sim);
        let xe = self.external(c, &w, sim);
        let xt = self.internal_tilde(c, &w, sim);
        let hat_e = if xt - xe == 0.0 { 0.0 } else { xe / (xt - xe) };
        (xi - i_min) / (i_max - i_min) + hat_e
    }

    pub fn internal_edges(&self, c: &[usize]) -> usize {
        let mut count = 0;
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                if self.adj[i][j] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn cut(&self, c: &[usize]) -> usize {
        let mut count = 0;
        for &i in c {
            for b in 0..self.n {
                if self.adj[i][b] && !c.contains(&b) {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn avg_degree(&self, c: &[usize]) -> f64 {
        2.0 * self.internal_edges(c) as f64 / c.len() as f64
    }

    pub fn cut_ratio(&self, c: &[usize]) -> f64 {
        self.cut(c) as f64 / (c.len() * (self.n - c.len())) as f64
    }

    pub fn conductance(&self, c: &[usize]) -> f64 {
        let vol_c: usize = c.iter().map(|&i| self.k[i] as usize).sum();
        let vol_rest = self.two_m as usize - vol_c;
        self.cut(c) as f64 / vol_c.min(vol_rest) as f64
    }

    pub fn flake_odf(&self, c: &[usize]) -> f64 {
        let weak = c
            .iter()
            .filter(|&&i| {
                let inside = c.iter().filter(|&&j| self.adj[i][j]).count();
                (inside as f64) < self.k[i] / 2.0
            })
            .count();
        weak as f64 / c.len() as f64
    }

    fn uniform_sim(&self, i: usize, j: usize, sim: SimilarityKind) -> f64 {
        let d = self.d as f64;
        (0..self.d)
            .map(|f| match sim {
                SimilarityKind::Delta => (self.x[i][f] == self.x[j][f]) as u8 as f64,
                _ => self.x[i][f] * self.x[j][f],
            })
            .sum::<f64>()
            / d
    }

    pub fn aw_ncut(&self, c: &[usize], sim: SimilarityKind) -> f64 {
        let (mut cut, mut vol_c, mut vol_all) = (0.0, 0.0, 0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.adj[i][j] {
                    continue;
                }
                let w = self.uniform_sim(i, j, sim);
                vol_all += w;
                if c.contains(&i) {
                    vol_c += w;
                    if !c.contains(&j) {
                        cut += w;
                    }
                }
            }
        }
        cut / vol_c + cut / (vol_all - vol_c)
    }

    /// `(1/2m) Σ_ij (A_ij - k_i k_j / 2m) [g_i = g_j]`.
    pub fn modularity(&self, groups: &[usize]) -> f64 {
        let mut q = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if groups[i] == groups[j] {
                    q += self.a(i, j) - self.k[i] * self.k[j] / self.two_m;
                }
            }
        }
        q / self.two_m
    }

    /// `(1/2m) Σ_ij (A_ij - k_i k_j / 2m) v_i v_j`.
    pub fn scalar_assortativity(&self, v: &[f64]) -> f64 {
        let mut r = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                r += (self.a(i, j) - self.k[i] * self.k[j] / self.two_m) * v[i] * v[j];
            }
        }
        r / self.two_m
    }
}

/// Relative closeness; exact zeros on both sides compare equal.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
