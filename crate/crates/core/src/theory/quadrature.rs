//! Adaptive Gauss–Kronrod quadrature and nested cubature over `(0, ∞)^d`
//! for integrands carrying the weight `Π x_i^{a-1}`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::par::Exec;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Number of nodes of the 15-point Kronrod rule.
pub const RULE_POINTS: usize = 15;

/// The 15 abscissae of the rule mapped onto `[a, b]`.
pub fn rule_nodes(a: f64, b: f64) -> [f64; RULE_POINTS] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [0.0; RULE_POINTS];
    for j in 0..7 {
        x[2 * j] = c - h * XGK[j];
        x[2 * j + 1] = c + h * XGK[j];
    }
    x[14] = c;
    x
}

/// Kronrod estimate and QUADPACK-style error from the 15 node values
/// laid out as in [`rule_nodes`].
pub fn rule_apply(a: f64, b: f64, f: &[f64; RULE_POINTS]) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let fc = f[14];
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let (lo, hi) = (f[2 * j], f[2 * j + 1]);
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((f[2 * j] - mean).abs() + (f[2 * j + 1] - mean).abs());
    }
    let result = kronrod * h;
    let resabs = abs_sum * h.abs();
    let resasc = asc * h.abs();
    let mut err = ((kronrod - gauss) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Stopping rule for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_pieces: usize,
}

/// Globally adaptive bisection on `[a, b]`, always splitting the piece with
/// the largest error estimate. `eval` fills the 15 node values of one piece;
/// batching lets callers evaluate expensive nodes in parallel.
pub fn adaptive<E>(a: f64, b: f64, tol: Tolerance, mut eval: E) -> Quad
where
    E: FnMut(&[f64; RULE_POINTS], &mut [f64; RULE_POINTS]),
{
    let mut values = [0.0; RULE_POINTS];
    let mut evaluations = 0u64;
    let mut piece = |lo: f64, hi: f64, values: &mut [f64; RULE_POINTS]| {
        eval(&rule_nodes(lo, hi), values);
        evaluations += RULE_POINTS as u64;
        let (value, error) = rule_apply(lo, hi, values);
        Piece {
            a: lo,
            b: hi,
            value,
            error,
        }
    };
    let first = piece(a, b, &mut values);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let target = |v: f64| tol.abs.max(tol.rel * v.abs());
    let mut converged = total_err <= target(total);
    while !converged && heap.len() < tol.max_pieces {
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        let left = piece(worst.a, mid, &mut values);
        let right = piece(mid, worst.b, &mut values);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        converged = total_err <= target(total);
    }
    // Re-sum in left-to-right order so the value is independent of heap history.
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let error: f64 = pieces.iter().map(|p| p.error).sum();
    Quad {
        value,
        error,
        evaluations,
        converged: converged || error <= target(value),
    }
}

/// Nested cubature of `Π x_i^{a-1} g(x)` over `(0, ∞)^d`.
///
/// Each axis is mapped by `x = s^{1/a}` (which absorbs the `x^{a-1}` factor
/// into the constant Jacobian `1/a`) and then `s = (t / (1 - t))^m` onto
/// `(0, 1)`. The power `m` (default 4) flattens algebraic decay at `t → 1`;
/// the mapped integrand stays bounded there when `g` decays at least like
/// `x^{-a(1 + 1/m)}` along each axis. Every axis is integrated adaptively to
/// relative tolerance `rel_tol / d`; the outermost axis evaluates its nodes
/// under `exec`.
#[derive(Clone, Copy, Debug)]
pub struct PowerWeightCubature {
    pub exponent: f64,
    pub dim: usize,
    pub rel_tol: f64,
    pub max_pieces: usize,
    /// Power `m` in `s = (t / (1 - t))^m`.
    pub stretch: f64,
}

/// Outcome of a cubature run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error of the outermost axis.
    pub error: f64,
    pub evaluations: u64,
}

const MAX_DIM: usize = 3;
const X_MIN: f64 = 1e-300;
const X_MAX: f64 = 1e300;

impl PowerWeightCubature {
    pub fn new(exponent: f64, dim: usize, rel_tol: f64) -> Self {
        Self {
            exponent,
            dim,
            rel_tol,
            max_pieces: 400,
            stretch: 4.0,
        }
    }

    /// Maps `t ∈ (0, 1)` to `(x, dx-weight)` for one axis. Coordinates are
    /// clamped away from 0 and ∞ so products of two of them stay finite; a
    /// node that rounds onto `t = 1` gets weight 0.
    #[inline]
    fn axis(&self, t: f64) -> (f64, f64) {
        let one_minus = 1.0 - t;
        if one_minus <= 0.0 {
            return (X_MAX, 0.0);
        }
        let u = t / one_minus;
        let m = self.stretch;
        let x = u.powf(m / self.exponent).clamp(X_MIN, X_MAX);
        let w = m / self.exponent * u.powf(m - 1.0) / (one_minus * one_minus);
        (x, w)
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol / self.dim as f64,
            abs: f64::MIN_POSITIVE,
            max_pieces: self.max_pieces,
        }
    }

    /// Integral over axes `depth..dim` with earlier coordinates fixed in
    /// `point`. Returns (value, evaluations, all inner levels converged).
    fn inner<G>(&self, g: &G, point: &mut [f64; MAX_DIM], depth: usize) -> (f64, u64, bool)
    where
        G: Fn(&[f64]) -> f64,
    {
        let mut evals = 0u64;
        let mut ok = true;
        let q = adaptive(0.0, 1.0, self.tolerance(), |nodes, out| {
            for (t, o) in nodes.iter().zip(out.iter_mut()) {
                let (x, w) = self.axis(*t);
                point[depth] = x;
                if w == 0.0 {
                    *o = 0.0;
                } else if depth + 1 == self.dim {
                    *o = w * g(&point[..self.dim]);
                    evals += 1;
                } else {
                    let (v, e, c) = self.inner(g, point, depth + 1);
                    *o = w * v;
                    evals += e;
                    ok &= c;
                }
            }
        });
        (q.value, evals, ok && q.converged)
    }

    pub fn integrate<G>(&self, g: &G, exec: Exec) -> Result<Integral>
    where
        G: Fn(&[f64]) -> f64 + Sync,
    {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::BadArgs(format!("cubature dimension {} unsupported", self.dim)));
        }
        if !(self.exponent > 0.0 && self.exponent < 1.0 + 1e-12) {
            return Err(Error::BadArgs(format!("weight exponent {} outside (0, 1]", self.exponent)));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::BadArgs("rel_tol must be positive".into()));
        }
        let mut evals = 0u64;
        let mut ok = true;
        let q = adaptive(0.0, 1.0, self.tolerance(), |nodes, out| {
            let vals = exec.map(nodes.as_slice(), |&t| {
                let (x, w) = self.axis(t);
                let mut point = [0.0; MAX_DIM];
                point[0] = x;
                if w == 0.0 {
                    (0.0, 0, true)
                } else if self.dim == 1 {
                    (w * g(&point[..1]), 1, true)
                } else {
                    let (v, e, c) = self.inner(g, &mut point, 1);
                    (w * v, e, c)
                }
            });
            for (o, (v, e, c)) in out.iter_mut().zip(vals) {
                *o = v;
                evals += e;
                ok &= c;
            }
        });
        if !(q.converged && ok) || !q.value.is_finite() {
            return Err(Error::NoConverge {
                estimate: q.value,
                error: q.error,
                rel_tol: self.rel_tol,
            });
        }
        Ok(Integral {
            value: q.value,
            error: q.error,
            evaluations: evals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(rel: f64) -> Tolerance {
        Tolerance {
            rel,
            abs: 0.0,
            max_pieces: 500,
        }
    }

    fn integrate_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Quad {
        adaptive(a, b, tol(rel), |x, y| {
            for (xi, yi) in x.iter().zip(y.iter_mut()) {
                *yi = f(*xi);
            }
        })
    }

    #[test]
    fn kronrod_rule_is_exact_for_low_degree_polynomials() {
        // 15-point Kronrod integrates polynomials up to degree 22 exactly.
        let f = |x: f64| x.powi(22) - 3.0 * x.powi(7) + 1.0;
        let nodes = rule_nodes(-1.0, 2.0);
        let mut vals = [0.0; RULE_POINTS];
        for (v, x) in vals.iter_mut().zip(nodes) {
            *v = f(x);
        }
        let (value, _) = rule_apply(-1.0, 2.0, &vals);
        let exact = (2f64.powi(23) + 1.0) / 23.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0 + 3.0;
        assert!((value - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let q = integrate_fn(|x| x.powf(-0.5), 0.0, 1.0, 1e-10);
        assert!(q.converged);
        assert!((q.value - 2.0).abs() < 1e-9);
        // ∫_0^1 ln x dx = -1
        let q = integrate_fn(f64::ln, 0.0, 1.0, 1e-11);
        assert!((q.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let q = adaptive(
            0.0,
            1.0,
            Tolerance {
                rel: 1e-14,
                abs: 0.0,
                max_pieces: 3,
            },
            |x, y| {
                for (xi, yi) in x.iter().zip(y.iter_mut()) {
                    *yi = (50.0 * xi).sin() / xi.sqrt();
                }
            },
        );
        assert!(!q.converged);
    }

    #[test]
    fn beta_function_in_one_dimension() {
        // ∫_0^∞ x^{a-1}/(1+x) dx = π / sin(π a)
        for &a in &[0.2, 0.5, 0.8] {
            let c = PowerWeightCubature::new(a, 1, 1e-10);
            let r = c.integrate(&|x: &[f64]| 1.0 / (1.0 + x[0]), Exec::Sequential).unwrap();
            let exact = std::f64::consts::PI / (std::f64::consts::PI * a).sin();
            assert!((r.value / exact - 1.0).abs() < 1e-9, "a = {a}: {}", r.value);
        }
    }

    #[test]
    fn beta_function_with_faster_decay() {
        // ∫_0^∞ x^{a-1}/(1+x)² dx = (1-a) π / sin(π a)
        for &a in &[0.6, 0.8, 0.95] {
            let c = PowerWeightCubature::new(a, 1, 1e-10);
            let r = c.integrate(&|x: &[f64]| (1.0 + x[0]).powi(-2), Exec::Sequential).unwrap();
            let exact = (1.0 - a) * std::f64::consts::PI / (std::f64::consts::PI * a).sin();
            assert!((r.value / exact - 1.0).abs() < 1e-9, "a = {a}: {}", r.value);
        }
    }

    #[test]
    fn separable_two_dimensional_product() {
        // ∫∫ (xy)^{a-1} e^{-x-y} = Γ(a)^2; a = 1/2 gives π.
        let c = PowerWeightCubature::new(0.5, 2, 1e-9);
        let r = c
            .integrate(&|x: &[f64]| (-x[0] - x[1]).exp(), Exec::Parallel)
            .unwrap();
        assert!((r.value / std::f64::consts::PI - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn rejects_bad_configuration() {
        let c = PowerWeightCubature::new(0.5, 4, 1e-6);
        assert_eq!(c.integrate(&|_: &[f64]| 1.0, Exec::Sequential).unwrap_err().code(), "bad-args");
    }
}
