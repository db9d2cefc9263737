use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Connection probability `w_i w_j / (W + w_i w_j)`.
#[inline]
pub fn pair_probability(wi: f64, wj: f64, total: f64) -> f64 {
    let prod = wi * wj;
    prod / (total + prod)
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    if weights.len() < 2 {
        return Err(Error::BadArgs("generalized random graph needs n >= 2".into()));
    }
    if let Some((vertex, &weight)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::BadWeight { vertex, weight });
    }
    Ok(weights.iter().sum())
}

/// Generalized random graph: every pair `{i, j}` is present independently
/// with probability [`pair_probability`].
///
/// Vertices are visited in decreasing weight, so along each row the pair
/// probabilities are non-increasing. Candidates are then skipped
/// geometrically at the current row bound and accepted with the ratio of
/// the true probability to that bound, which reproduces the independent
/// pair law exactly in `O(n + m)` expected draws.
pub fn generalized_random_graph(weights: &[f64], seed: u64) -> Result<Graph> {
    let total = check_weights(weights)?;
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let w: Vec<f64> = order.iter().map(|&v| weights[v]).collect();

    let mut stream = rng::stream(seed);
    let mut edges = Vec::new();
    for i in 0..n - 1 {
        let mut j = i + 1;
        let mut bound = pair_probability(w[i], w[j], total);
        while j < n && bound > 0.0 {
            if bound < 1.0 {
                let u = rng::open_unit(&mut stream);
                let skip = (u.ln() / (-bound).ln_1p()).floor();
                if skip >= (n - j) as f64 {
                    break;
                }
                j += skip as usize;
            }
            let p = pair_probability(w[i], w[j], total);
            if rng::open_unit(&mut stream) <= p / bound {
                edges.push((order[i], order[j]));
            }
            bound = p;
            j += 1;
        }
    }
    Graph::from_edge_list(n, &edges)
}

/// Expected degree of every vertex, `Σ_{j != i} p_ij`.
pub fn expected_degrees(weights: &[f64]) -> Result<Vec<f64>> {
    let total = check_weights(weights)?;
    Ok(weights
        .iter()
        .enumerate()
        .map(|(i, &wi)| {
            weights
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &wj)| pair_probability(wi, wj, total))
                .sum()
        })
        .collect())
}
