use std::collections::BTreeSet;

use rand::Rng as _;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::degree_sequences::{self, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::{self, Graph};
use crate::par::Exec;
use crate::rng;

/// Default burn-in multiplier `κ` in `κ m ln m`.
pub const DEFAULT_KAPPA: f64 = 10.0;

/// `(switches done, triangle count)` checkpoints.
pub type Trace = Vec<(u64, u64)>;

/// Deterministic realization of a graphical sequence.
///
/// Repeatedly removes the vertex with the largest residual degree (lowest
/// index on ties) and joins it to the next-largest residual vertices, again
/// preferring lower indices on ties. Residual-degree buckets keep the whole
/// construction at `O(L_n log n)`.
pub fn havel_hakimi_realization(ds: &DegreeSequence) -> Result<Graph> {
    if !ds.is_even() || !degree_sequences::is_graphical(ds)? {
        return Err(Error::NotGraphical);
    }
    let n = ds.n();
    let d_max = ds.d_max() as usize;
    let mut residual: Vec<usize> = ds.degrees().iter().map(|&d| d as usize).collect();
    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); d_max + 1];
    for (v, &r) in residual.iter().enumerate() {
        buckets[r].insert(v as u32);
    }
    let mut top = d_max;
    let mut edges = Vec::with_capacity(ds.edge_count() as usize);
    let mut chosen: Vec<u32> = Vec::with_capacity(d_max);
    loop {
        while top > 0 && buckets[top].is_empty() {
            top -= 1;
        }
        if top == 0 {
            break;
        }
        let v = buckets[top].pop_first().expect("non-empty bucket") as usize;
        let need = residual[v];
        residual[v] = 0;
        buckets[0].insert(v as u32);

        chosen.clear();
        let mut level = top;
        while chosen.len() < need && level > 0 {
            for &u in buckets[level].iter() {
                if chosen.len() == need {
                    break;
                }
                chosen.push(u);
            }
            level -= 1;
        }
        if chosen.len() < need {
            return Err(Error::NotGraphical);
        }
        for &u in &chosen {
            let r = residual[u as usize];
            buckets[r].remove(&u);
            buckets[r - 1].insert(u);
            residual[u as usize] = r - 1;
            edges.push((v, u as usize));
        }
    }
    Graph::from_edge_list(n, &edges)
}

/// `ceil(κ m ln(max(m, 2)))` with `m = L_n / 2`.
pub fn default_burn_in(ds: &DegreeSequence, kappa: f64) -> u64 {
    burn_in_for_edges(ds.edge_count(), kappa)
}

pub fn burn_in_for_edges(m: u64, kappa: f64) -> u64 {
    if kappa <= 0.0 {
        return 0;
    }
    let m = m as f64;
    (kappa * m * m.max(2.0).ln()).ceil() as u64
}

/// Move counters of the switch chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchStats {
    pub attempted: u64,
    pub accepted: u64,
    /// Rewiring would join a vertex to itself.
    pub rejected_loop: u64,
    /// Rewiring would duplicate an existing edge.
    pub rejected_multi_edge: u64,
    /// Fewer than two edges, so no move exists.
    pub rejected_degenerate: u64,
}

impl SwitchStats {
    pub fn rejected(&self) -> u64 {
        self.rejected_loop + self.rejected_multi_edge + self.rejected_degenerate
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

#[inline]
fn key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

/// Double-edge-switch chain on simple graphs with a fixed degree sequence.
///
/// One step draws an ordered pair of distinct edges `{a,b}`, `{c,d}` by
/// index and one of the two rewirings `{a,c}+{b,d}` / `{a,d}+{b,c}`, each
/// uniformly. Moves that would create a loop or a duplicate edge leave the
/// graph unchanged. The kernel is symmetric, so its stationary law on the
/// set of realizations is uniform.
pub struct SwitchChain {
    n: usize,
    edges: Vec<(u32, u32)>,
    present: FxHashSet<u64>,
    stats: SwitchStats,
    stream: rng::Rng,
}

impl SwitchChain {
    pub fn new(start: &Graph, seed: u64) -> Self {
        let edges: Vec<(u32, u32)> = start.edges().map(|(u, v)| (u as u32, v as u32)).collect();
        let mut present = FxHashSet::default();
        present.reserve(edges.len());
        present.extend(edges.iter().map(|&(u, v)| key(u, v)));
        Self {
            n: start.n(),
            edges,
            present,
            stats: SwitchStats::default(),
            stream: rng::stream(seed),
        }
    }

    /// Chain started from the Havel–Hakimi realization of `ds`.
    pub fn from_degrees(ds: &DegreeSequence, seed: u64) -> Result<Self> {
        Ok(Self::new(&havel_hakimi_realization(ds)?, seed))
    }

    pub fn stats(&self) -> SwitchStats {
        self.stats
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// One lazy step; returns whether the graph changed.
    pub fn step(&mut self) -> bool {
        self.stats.attempted += 1;
        let m = self.edges.len();
        if m < 2 {
            self.stats.rejected_degenerate += 1;
            return false;
        }
        let i = self.stream.random_range(0..m);
        let mut j = self.stream.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = self.edges[i];
        let (c, d) = self.edges[j];
        let (e1, e2) = if self.stream.random::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        if e1.0 == e1.1 || e2.0 == e2.1 {
            self.stats.rejected_loop += 1;
            return false;
        }
        let (k1, k2) = (key(e1.0, e1.1), key(e2.0, e2.1));
        if k1 == k2 || self.present.contains(&k1) || self.present.contains(&k2) {
            self.stats.rejected_multi_edge += 1;
            return false;
        }
        self.present.remove(&key(a, b));
        self.present.remove(&key(c, d));
        let fresh1 = self.present.insert(k1);
        let fresh2 = self.present.insert(k2);
        debug_assert!(fresh1 && fresh2, "switch produced a duplicate edge");
        self.edges[i] = e1;
        self.edges[j] = e2;
        self.stats.accepted += 1;
        true
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (u as usize, v as usize))
            .collect();
        Graph::from_edge_list(self.n, &edges).expect("switch chain keeps the graph simple")
    }
}

/// Runs `n_switches` steps from the Havel–Hakimi realization.
pub fn uniform_sample_mcmc(
    ds: &DegreeSequence,
    n_switches: u64,
    seed: u64,
) -> Result<(Graph, SwitchStats)> {
    let mut chain = SwitchChain::from_degrees(ds, seed)?;
    chain.run(n_switches);
    let g = chain.graph();
    debug_assert_eq!(g.degrees(), ds.degrees());
    Ok((g, chain.stats()))
}

/// As [`uniform_sample_mcmc`], also recording the triangle count every
/// `interval` steps (and at step 0) as a convergence trace.
pub fn uniform_sample_mcmc_traced(
    ds: &DegreeSequence,
    n_switches: u64,
    seed: u64,
    interval: u64,
) -> Result<(Graph, SwitchStats, Trace)> {
    let mut chain = SwitchChain::from_degrees(ds, seed)?;
    let interval = interval.max(1);
    let mut trace = vec![(0, graph::count_triangles(&chain.graph(), Exec::Sequential))];
    let mut done = 0;
    while done < n_switches {
        let burst = interval.min(n_switches - done);
        chain.run(burst);
        done += burst;
        trace.push((done, graph::count_triangles(&chain.graph(), Exec::Sequential)));
    }
    Ok((chain.graph(), chain.stats(), trace))
}
