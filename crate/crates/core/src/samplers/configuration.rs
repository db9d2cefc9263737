use rand::seq::SliceRandom;

use crate::degree_sequences::DegreeSequence;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Output of the configuration model: an edge multiset that may contain
/// loops `(u, u)` and repeated pairs. Pairs are stored with `u <= v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u.max(v) as usize >= n) {
            return Err(Error::BadVertex {
                vertex: u.max(v) as usize,
                n,
            });
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Degrees with each loop counted twice.
    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }
}

/// Uniform perfect matching of the `L_n` half-edges: one shuffle of the
/// stub array, then consecutive stubs are paired.
pub fn configuration_model(ds: &DegreeSequence, seed: u64) -> Result<Multigraph> {
    if !ds.is_even() {
        return Err(Error::Parity(u128::from(ds.total())));
    }
    let mut stubs = Vec::with_capacity(ds.total() as usize);
    for (v, &d) in ds.degrees().iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    let mut stream = rng::stream(seed);
    stubs.shuffle(&mut stream);
    let edges = stubs
        .chunks_exact(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    Ok(Multigraph { n: ds.n(), edges })
}

/// Drops loops and collapses repeated pairs.
pub fn erase(mg: &Multigraph) -> Graph {
    let mut pairs: Vec<(usize, usize)> = mg
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| (u as usize, v as usize))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Graph::from_edge_list(mg.n, &pairs).expect("erased edge set is simple")
}

/// Configuration model followed by erasure.
pub fn erased_configuration_model(ds: &DegreeSequence, seed: u64) -> Result<Graph> {
    Ok(erase(&configuration_model(ds, seed)?))
}
