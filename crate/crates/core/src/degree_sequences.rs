//! Power-law degree sequences: construction, parity repair, graphicality and
//! tail diagnostics.
//!
//! Degrees are kept in vertex order. Both generators emit them sorted
//! descending, so vertex 0 is the largest hub.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
    d_max: u32,
}

/// Fit of the empirical tail `1 - F_n(j) = #{i : d_i > j} / n` against a
/// pure power law `C j^{1-tau}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TailReport {
    /// Smallest `K` with `1 - F_n(j) <= K j^{1-tau}` for every `j >= 1`.
    pub k_fitted: f64,
    /// Least-squares `C` over the fit window.
    pub c_fitted: f64,
    /// `max_j |(1 - F_n(j)) / (C_fitted j^{1-tau}) - 1|` over the window.
    pub max_rel_dev: f64,
    /// Upper end of the window, `ceil(sqrt(L_n))`.
    pub window: u64,
}

impl DegreeSequence {
    /// Wraps a list of degrees. Rejects empty input and zero degrees; the
    /// total may be odd (see [`fix_parity`]).
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::BadArgs("degree sequence must have n >= 1".into()));
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::ZeroDegree(v));
        }
        let mut total = 0u64;
        for &d in &degrees {
            total = total
                .checked_add(u64::from(d))
                .ok_or_else(|| Error::BadArgs("degree total overflows u64".into()))?;
        }
        let d_max = degrees.iter().copied().max().unwrap_or(0);
        Ok(Self {
            degrees,
            total,
            d_max,
        })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// `L_n`, the sum of all degrees.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    pub fn is_even(&self) -> bool {
        self.total.is_multiple_of(2)
    }

    /// Number of edges `L_n / 2` of any realization.
    pub fn edge_count(&self) -> u64 {
        self.total / 2
    }

    /// Empirical mean degree `L_n / n`.
    pub fn mean(&self) -> f64 {
        self.total as f64 / self.n() as f64
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    /// Degrees sorted descending.
    pub fn sorted_desc(&self) -> Vec<u32> {
        let mut d = self.degrees.clone();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Stable 64-bit digest of the sequence, used to assert paired designs.
    pub fn digest(&self) -> u64 {
        rng::mix_words(
            std::iter::once(self.degrees.len() as u64)
                .chain(self.degrees.iter().map(|&d| u64::from(d))),
        )
    }

    /// Counts `#{i : d_i > j}` for `j = 0..=d_max`.
    pub fn tail_counts(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.d_max as usize + 2];
        for &d in &self.degrees {
            hist[d as usize] += 1;
        }
        // tail[j] = #{d > j}
        let mut tail = vec![0u64; self.d_max as usize + 1];
        let mut acc = 0u64;
        for j in (0..=self.d_max as usize).rev() {
            tail[j] = acc;
            acc += hist[j];
        }
        tail
    }

    /// Reads the plain-text degree format: one integer per line, `#`
    /// comments, optional leading `n=<count>` header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut degrees = Vec::new();
        let mut seen_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=") {
                if seen_data {
                    return Err(Error::Parse(format!(
                        "line {}: n= header must precede the degrees",
                        lineno + 1
                    )));
                }
                declared = Some(rest.trim().parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad vertex count {rest:?}", lineno + 1))
                })?);
                seen_data = true;
                continue;
            }
            seen_data = true;
            let d: u32 = line.parse().map_err(|_| {
                Error::Parse(format!("line {}: bad degree {line:?}", lineno + 1))
            })?;
            degrees.push(d);
        }
        if let Some(n) = declared {
            if n != degrees.len() {
                return Err(Error::Parse(format!(
                    "header declares n={n} but {} degrees follow",
                    degrees.len()
                )));
            }
        }
        Self::new(degrees)
    }

    /// Parses an inline comma-separated list such as `"3,2,2,1"`.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let degrees = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad degree {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(degrees)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n() * 4 + 32);
        let _ = writeln!(out, "# degree sequence, total {}", self.total);
        let _ = writeln!(out, "n={}", self.n());
        for d in &self.degrees {
            let _ = writeln!(out, "{d}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn check_params(n: usize, tau: f64, c_const: f64) -> Result<()> {
    crate::check_tau(tau)?;
    if n < 2 {
        return Err(Error::BadArgs(format!("n must be at least 2, got {n}")));
    }
    if !(c_const.is_finite() && c_const > 0.0) {
        return Err(Error::BadArgs(format!("C must be positive, got {c_const}")));
    }
    Ok(())
}

/// Ceiling that ignores float noise just above an integer.
fn ceil_degree(x: f64) -> u32 {
    let c = (x * (1.0 - 1e-12)).ceil();
    c.clamp(1.0, u32::MAX as f64) as u32
}

fn finish(degrees: Vec<u32>) -> Result<DegreeSequence> {
    let ds = fix_parity(&DegreeSequence::new(degrees)?);
    if !is_graphical(&ds)? {
        return Err(Error::NotGraphical);
    }
    Ok(ds)
}

/// Deterministic quantile construction: rank `i` (1-based) gets degree
/// `max(1, ceil((C n / i)^{1/(tau-1)}))`, then parity is repaired.
pub fn generate_quantile(n: usize, tau: f64, c_const: f64) -> Result<DegreeSequence> {
    check_params(n, tau, c_const)?;
    let exponent = 1.0 / (tau - 1.0);
    let scale = c_const * n as f64;
    let degrees = (1..=n)
        .map(|i| ceil_degree((scale / i as f64).powf(exponent)))
        .collect();
    finish(degrees)
}

/// Inverse transform of a uniform variate for the tail `P(D > j) = min(1, C j^{1-tau})`.
pub fn inverse_tail(u: f64, tau: f64, c_const: f64) -> u32 {
    ceil_degree((u / c_const).powf(-1.0 / (tau - 1.0)))
}

/// I.i.d. power-law degrees drawn on the seeded stream, sorted descending
/// and parity-repaired.
pub fn sample_iid(n: usize, tau: f64, c_const: f64, seed: u64) -> Result<DegreeSequence> {
    check_params(n, tau, c_const)?;
    let mut stream = rng::stream(seed);
    let mut degrees: Vec<u32> = (0..n)
        .map(|_| inverse_tail(rng::open_unit(&mut stream), tau, c_const))
        .collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    finish(degrees)
}

/// Makes the total even by incrementing the lowest-index minimum-degree
/// vertex. Identity on sequences that are already even.
pub fn fix_parity(ds: &DegreeSequence) -> DegreeSequence {
    if ds.is_even() {
        return ds.clone();
    }
    let min = ds.degrees.iter().copied().min().unwrap_or(1);
    let idx = ds.degrees.iter().position(|&d| d == min).unwrap_or(0);
    let mut degrees = ds.degrees.clone();
    degrees[idx] += 1;
    DegreeSequence {
        total: ds.total + 1,
        d_max: ds.d_max.max(degrees[idx]),
        degrees,
    }
}

/// Erdős–Gallai test over all `k = 1..n`.
pub fn is_graphical(ds: &DegreeSequence) -> Result<bool> {
    if !ds.is_even() {
        return Err(Error::Parity(u128::from(ds.total)));
    }
    Ok(erdos_gallai(&ds.sorted_desc()))
}

/// Erdős–Gallai on a descending slice; zeros are allowed. Linear after the
/// sort, using prefix sums and a moving pointer to the first entry `< k`.
pub(crate) fn erdos_gallai(sorted: &[u32]) -> bool {
    let n = sorted.len();
    if sorted.iter().map(|&d| u64::from(d)).sum::<u64>() % 2 == 1 {
        return false;
    }
    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + u64::from(sorted[i]);
    }
    let mut lhs = 0u64;
    // first index with sorted[p] < k; non-decreasing in k
    let mut p = n;
    for k in 1..=n {
        lhs += u64::from(sorted[k - 1]);
        let kk = k as u64;
        while p > 0 && u64::from(sorted[p - 1]) < kk {
            p -= 1;
        }
        let rhs_tail = if p > k {
            (p - k) as u64 * kk + suffix[p]
        } else {
            suffix[k]
        };
        if lhs > kk * (kk - 1) + rhs_tail {
            return false;
        }
    }
    true
}

/// Tail diagnostics for `ds` at exponent `tau`.
pub fn verify_tail_bound(ds: &DegreeSequence, tau: f64) -> TailReport {
    let n = ds.n() as f64;
    let tail = ds.tail_counts();
    let frac = |j: u64| -> f64 {
        tail.get(j as usize).map_or(0.0, |&c| c as f64 / n)
    };
    let power = |j: u64| (j as f64).powf(1.0 - tau);

    let k_fitted = (1..=u64::from(ds.d_max()))
        .map(|j| frac(j) / power(j))
        .fold(0.0f64, f64::max);

    let window = ((ds.total() as f64).sqrt().ceil() as u64).max(1);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for j in 1..=window {
        let x = power(j);
        sxy += x * frac(j);
        sxx += x * x;
    }
    let c_fitted = sxy / sxx;
    let max_rel_dev = (1..=window)
        .map(|j| (frac(j) / (c_fitted * power(j)) - 1.0).abs())
        .fold(0.0f64, f64::max);

    TailReport {
        k_fitted,
        c_fitted,
        max_rel_dev,
        window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn quantile_small_cases() {
        let d = generate_quantile(4, 2.5, 1.0).unwrap();
        assert_eq!(d.degrees(), &[3, 2, 2, 1]);
        assert_eq!(d.total(), 8);

        // (2, 1) is odd and repairs to (2, 2), which no simple graph realizes.
        assert_eq!(fix_parity(&ds(&[2, 1])).degrees(), &[2, 2]);
        assert_eq!(generate_quantile(2, 2.5, 1.0).unwrap_err().code(), "not-graphical");
    }

    #[test]
    fn quantile_rejects_bad_params() {
        assert_eq!(generate_quantile(10, 3.0, 1.0).unwrap_err().code(), "tau-range");
        assert_eq!(generate_quantile(10, 1.5, 1.0).unwrap_err().code(), "tau-range");
        assert_eq!(generate_quantile(1, 2.5, 1.0).unwrap_err().code(), "bad-args");
        assert!(generate_quantile(10, 2.5, 0.0).is_err());
    }

    #[test]
    fn quantile_max_degree_bound() {
        for &(n, tau, c) in &[(1000usize, 2.5, 1.0), (5000, 2.2, 2.0), (777, 2.9, 0.5)] {
            let d = generate_quantile(n, tau, c).unwrap();
            let bound = ((c * n as f64).powf(1.0 / (tau - 1.0))).ceil() as u32;
            assert!(d.d_max() <= bound, "{} > {bound}", d.d_max());
            assert_eq!(d.d_max(), d.degrees()[0]);
            assert!(d.is_even());
        }
    }

    #[test]
    fn inverse_tail_formula() {
        // u = 1 maps to the minimum degree; small u to large degrees.
        assert_eq!(inverse_tail(1.0, 2.5, 1.0), 1);
        // (0.001)^{-2/3} = 100 exactly in exact arithmetic.
        assert_eq!(inverse_tail(0.001, 2.5, 1.0), 100);
        assert_eq!(inverse_tail(0.0009, 2.5, 1.0), 108);
    }

    #[test]
    fn iid_is_reproducible() {
        let a = sample_iid(5000, 2.5, 1.0, 42).unwrap();
        let b = sample_iid(5000, 2.5, 1.0, 42).unwrap();
        let c = sample_iid(5000, 2.5, 1.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_even());
    }

    #[test]
    fn fix_parity_examples() {
        assert_eq!(fix_parity(&ds(&[3, 2, 2, 1])).degrees(), &[3, 2, 2, 1]);
        assert_eq!(fix_parity(&ds(&[3, 2, 1])).degrees(), &[3, 2, 1]);
        assert_eq!(fix_parity(&ds(&[3, 2, 2])).degrees(), &[3, 3, 2]);
        assert_eq!(fix_parity(&ds(&[3, 1, 1])).degrees(), &[3, 2, 1]);
        assert_eq!(fix_parity(&ds(&[1, 1, 1])).degrees(), &[2, 1, 1]);
        let f = fix_parity(&ds(&[2, 4, 1]));
        assert_eq!(f.degrees(), &[2, 4, 2]);
        assert_eq!(f.total(), 8);
    }

    #[test]
    fn graphicality_examples() {
        assert!(is_graphical(&ds(&[3, 3, 3, 3])).unwrap());
        assert_eq!(is_graphical(&ds(&[4, 1, 1, 1])).unwrap_err().code(), "parity");
        assert!(!is_graphical(&ds(&[4, 2, 1, 1])).unwrap());
        assert!(!erdos_gallai(&[4, 1, 1, 1]));
        assert!(is_graphical(&ds(&[2, 2, 2])).unwrap());
        assert!(!is_graphical(&ds(&[3, 3, 1, 1])).unwrap());
        assert_eq!(is_graphical(&ds(&[2, 1, 2])).unwrap_err().code(), "parity");
    }

    #[test]
    fn tail_report_examples() {
        let r = verify_tail_bound(&ds(&[3, 2, 2, 1]), 2.5);
        assert!((r.k_fitted - 0.75).abs() < 1e-15);
        let r = verify_tail_bound(&ds(&[2, 2, 2, 2]), 2.5);
        assert!((r.k_fitted - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_degree_rejected() {
        assert_eq!(DegreeSequence::new(vec![2, 0]).unwrap_err().code(), "zero-degree");
        assert!(DegreeSequence::new(vec![]).is_err());
    }

    #[test]
    fn text_format() {
        let text = "# comment\nn=3\n2\n# mid\n2\n2\n";
        let d = DegreeSequence::parse(text).unwrap();
        assert_eq!(d.degrees(), &[2, 2, 2]);
        assert!(DegreeSequence::parse("n=4\n1\n1\n").is_err());
        assert!(DegreeSequence::parse("1\nn=1\n").is_err());
        let back = DegreeSequence::parse(&d.to_text()).unwrap();
        assert_eq!(back, d);
        assert_eq!(
            DegreeSequence::parse_inline("1, 1,1,1").unwrap().degrees(),
            &[1, 1, 1, 1]
        );
    }
}
