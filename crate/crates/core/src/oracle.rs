//! Exhaustive enumeration of all labeled simple graphs with a small degree
//! sequence, and exact statistics over that ensemble.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::degree_sequences::{erdos_gallai, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::Exec;

pub const MAX_N: usize = 10;
pub const MAX_TOTAL: u64 = 24;

/// All labeled simple graphs realizing `ds`, each stored as a bitmask over
/// the upper-triangular pairs in lexicographic order. The list is sorted by
/// canonical edge list.
#[derive(Clone, Debug)]
pub struct GraphEnsemble {
    ds: DegreeSequence,
    masks: Vec<u64>,
    index: FxHashMap<u64, usize>,
}

/// Position of pair `(u, v)`, `u < v`, in lexicographic pair order.
fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

fn pair_bit(n: usize, u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    1u64 << pair_index(n, a, b)
}

struct Search<'a> {
    n: usize,
    out: &'a mut Vec<u64>,
}

impl Search<'_> {
    /// Extends `mask` by choosing the remaining neighbors of vertex `u`
    /// among `u+1..n`, then recurses on `u + 1`.
    fn vertex(&mut self, u: usize, residual: &mut [u32], mask: u64) {
        if u == self.n {
            self.out.push(mask);
            return;
        }
        let need = residual[u] as usize;
        let candidates: Vec<usize> = (u + 1..self.n).filter(|&v| residual[v] > 0).collect();
        if candidates.len() < need {
            return;
        }
        let mut pick = Vec::with_capacity(need);
        self.choose(u, &candidates, 0, need, &mut pick, residual, mask);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        u: usize,
        candidates: &[usize],
        from: usize,
        need: usize,
        pick: &mut Vec<usize>,
        residual: &mut [u32],
        mask: u64,
    ) {
        if pick.len() == need {
            let saved = residual[u];
            residual[u] = 0;
            for &v in pick.iter() {
                residual[v] -= 1;
            }
            if residual_feasible(&residual[u + 1..]) {
                let mut m = mask;
                for &v in pick.iter() {
                    m |= pair_bit(self.n, u, v);
                }
                self.vertex(u + 1, residual, m);
            }
            for &v in pick.iter() {
                residual[v] += 1;
            }
            residual[u] = saved;
            return;
        }
        let remaining = need - pick.len();
        for i in from..=candidates.len().saturating_sub(remaining) {
            if i >= candidates.len() {
                break;
            }
            pick.push(candidates[i]);
            self.choose(u, candidates, i + 1, need, pick, residual, mask);
            pick.pop();
        }
    }
}

fn residual_feasible(rest: &[u32]) -> bool {
    let mut sorted = rest.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    erdos_gallai(&sorted)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Enumerates `G(d)` by backtracking with Erdős–Gallai pruning on the
/// residual sequence. The first vertex's neighbor choices are explored in
/// parallel under `exec`; the result order does not depend on it.
pub fn enumerate_graphs(ds: &DegreeSequence, exec: Exec) -> Result<GraphEnsemble> {
    let n = ds.n();
    if n > MAX_N || ds.total() > MAX_TOTAL {
        return Err(Error::OracleSize(format!(
            "exhaustive enumeration needs n <= {MAX_N} and L_n <= {MAX_TOTAL}, got n = {n}, L_n = {}",
            ds.total()
        )));
    }
    let degrees = ds.degrees().to_vec();
    let graphical = ds.is_even() && residual_feasible(&degrees);
    let masks = if !graphical {
        Vec::new()
    } else {
        let first: Vec<usize> = (1..n).collect();
        let roots = combinations(&first, degrees[0] as usize);
        exec.map(&roots, |pick| {
            let mut residual = degrees.clone();
            residual[0] = 0;
            let mut mask = 0u64;
            for &v in pick {
                residual[v] -= 1;
                mask |= pair_bit(n, 0, v);
            }
            let mut out = Vec::new();
            if residual_feasible(&residual[1..]) {
                Search { n, out: &mut out }.vertex(1, &mut residual, mask);
            }
            out
        })
        .into_iter()
        .flatten()
        .collect()
    };
    let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    Ok(GraphEnsemble {
        ds: ds.clone(),
        masks,
        index,
    })
}

impl GraphEnsemble {
    pub fn degree_sequence(&self) -> &DegreeSequence {
        &self.ds
    }

    /// `|G(d)|`.
    pub fn size(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    fn n(&self) -> usize {
        self.ds.n()
    }

    pub fn edges(&self, i: usize) -> Vec<(usize, usize)> {
        let n = self.n();
        let mask = self.masks[i];
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if mask & pair_bit(n, u, v) != 0 {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn graph(&self, i: usize) -> Graph {
        Graph::from_edge_list(self.n(), &self.edges(i)).expect("ensemble members are simple")
    }

    pub fn graphs(&self) -> impl Iterator<Item = Graph> + '_ {
        (0..self.size()).map(|i| self.graph(i))
    }

    fn mask_of(&self, g: &Graph) -> Option<u64> {
        let n = self.n();
        if g.n() != n {
            return None;
        }
        Some(g.edges().fold(0u64, |m, (u, v)| m | pair_bit(n, u, v)))
    }

    /// Position of `g` in the ensemble, if it is a member.
    pub fn position(&self, g: &Graph) -> Option<usize> {
        self.mask_of(g).and_then(|m| self.index.get(&m).copied())
    }

    fn condition_mask(&self, pairs: &[(usize, usize)]) -> Result<u64> {
        let n = self.n();
        let mut mask = 0;
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::BadVertex {
                    vertex: a.max(b),
                    n,
                });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            mask |= pair_bit(n, a, b);
        }
        Ok(mask)
    }

    /// `(#graphs containing U ∪ {u,v}, #graphs containing U)`.
    pub fn edge_probability_counts(
        &self,
        u: usize,
        v: usize,
        given: &[(usize, usize)],
    ) -> Result<(u64, u64)> {
        let cond = self.condition_mask(given)?;
        let target = self.condition_mask(&[(u, v)])?;
        if cond & target != 0 {
            return Err(Error::BadArgs(format!("pair {{{u}, {v}}} is in the conditioning set")));
        }
        let mut with_cond = 0u64;
        let mut with_both = 0u64;
        for &m in &self.masks {
            if m & cond == cond {
                with_cond += 1;
                if m & target != 0 {
                    with_both += 1;
                }
            }
        }
        if with_cond == 0 {
            return Err(Error::EmptyCondition);
        }
        Ok((with_both, with_cond))
    }

    /// Exact `P(u ~ v | every pair of `given` is an edge)` under the uniform
    /// law on the ensemble.
    pub fn edge_probability(&self, u: usize, v: usize, given: &[(usize, usize)]) -> Result<f64> {
        let (num, den) = self.edge_probability_counts(u, v, given)?;
        Ok(num as f64 / den as f64)
    }

    fn triangles_of(&self, mask: u64) -> u64 {
        let n = self.n();
        let mut adj = [0u16; MAX_N];
        for u in 0..n {
            for v in u + 1..n {
                if mask & pair_bit(n, u, v) != 0 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
        }
        let mut t = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                if adj[u] & (1 << v) != 0 {
                    let common = adj[u] & adj[v] & !((1u16 << (v + 1)) - 1);
                    t += u64::from(common.count_ones());
                }
            }
        }
        t
    }

    /// Mean triangle count over the ensemble.
    pub fn expected_triangles(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let sum: u64 = self.masks.iter().map(|&m| self.triangles_of(m)).sum();
        Ok(sum as f64 / self.size() as f64)
    }

    /// Occurrence counts of each member among `samples`.
    pub fn histogram(&self, samples: &[Graph]) -> Result<Vec<u64>> {
        if self.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let mut counts = vec![0u64; self.size()];
        for g in samples {
            let i = self.position(g).ok_or(Error::NotInEnsemble)?;
            counts[i] += 1;
        }
        Ok(counts)
    }

    /// `½ Σ_g |freq(g) - 1/|G(d)||`.
    pub fn tv_distance(&self, samples: &[Graph]) -> Result<f64> {
        let counts = self.histogram(samples)?;
        Ok(tv_from_counts(&counts))
    }

    /// Pearson chi-square test of the sample histogram against the uniform
    /// law; returns `(statistic, p_value)`.
    pub fn chi_square(&self, samples: &[Graph]) -> Result<(f64, f64)> {
        let counts = self.histogram(samples)?;
        Ok(chi_square_uniform(&counts))
    }

    /// Multi-graph dump: `--- graph i/N` separators, each followed by the
    /// member's edge list.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let total = self.size();
        for i in 0..total {
            let _ = writeln!(out, "--- graph {}/{}", i + 1, total);
            out.push_str(&self.graph(i).to_edge_list());
        }
        out
    }
}

pub fn tv_from_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.is_empty() {
        return 0.0;
    }
    let uniform = 1.0 / counts.len() as f64;
    0.5 * counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - uniform).abs())
        .sum::<f64>()
}

pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k < 2 || total == 0 {
        return (0.0, 1.0);
    }
    let expected = total as f64 / k as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("positive degrees of freedom");
    (stat, dist.sf(stat))
}
