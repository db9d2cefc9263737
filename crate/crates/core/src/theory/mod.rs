//! Limit constants for triangle counts and the clustering curve `c(k)`.

mod gamma;
pub mod importance;
pub mod integrals;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::degree_sequences::DegreeSequence;
use crate::error::{Error, Result};
use crate::par::Exec;

pub use gamma::gamma;
pub use integrals::{
    integral_ck_range3, integral_ck_range3_with, integral_triangle, integral_triangle_ecm,
    integral_triangle_uniform, TriangleKernel,
};
pub use quadrature::Integral;

/// Default half-width factor of the Range III band `[band·√n, √n/band]`.
pub const DEFAULT_BAND: f64 = 0.5;

/// Power-law parameters of a graph family at size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u64,
    pub tau: f64,
    pub c_const: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(n: u64, tau: f64, c_const: f64, mu: f64) -> Result<Self> {
        crate::check_tau(tau)?;
        if n == 0 {
            return Err(Error::BadArgs("n must be positive".into()));
        }
        if !(c_const.is_finite() && c_const > 0.0) {
            return Err(Error::BadArgs(format!("C must be positive, got {c_const}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::BadArgs(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { n, tau, c_const, mu })
    }

    /// Uses the empirical mean degree `L_n / n` for `mu`.
    pub fn from_degrees(ds: &DegreeSequence, tau: f64, c_const: f64) -> Result<Self> {
        Self::new(ds.n() as u64, tau, c_const, ds.mean())
    }

    fn c_tau(&self) -> f64 {
        self.c_const * (self.tau - 1.0)
    }
}

/// `A = π / sin(πτ)`.
pub fn constant_a(tau: f64) -> Result<f64> {
    crate::check_tau(tau)?;
    Ok(PI / (PI * tau).sin())
}

/// `(A, -Γ(2-τ))`.
pub fn gamma_comparison(tau: f64) -> Result<(f64, f64)> {
    let a = constant_a(tau)?;
    Ok((a, -gamma(2.0 - tau)))
}

/// Conditional edge probability for residual degrees `d - |U|`:
/// `r_u r_v / (L_n + r_u r_v)`.
pub fn edge_probability_asymptotic(
    d_u: u64,
    d_v: u64,
    l_n: u64,
    deg_u_in_u: u64,
    deg_v_in_u: u64,
) -> Result<f64> {
    if deg_u_in_u > d_u || deg_v_in_u > d_v {
        return Err(Error::BadArgs(format!(
            "|U| exceeds degree: ({deg_u_in_u}, {deg_v_in_u}) vs ({d_u}, {d_v})"
        )));
    }
    if l_n == 0 {
        return Err(Error::BadArgs("L_n must be positive".into()));
    }
    let prod = (d_u - deg_u_in_u) as f64 * (d_v - deg_v_in_u) as f64;
    Ok(prod / (l_n as f64 + prod))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CkRange {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for CkRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CkRange::I => "I",
            CkRange::II => "II",
            CkRange::III => "III",
            CkRange::IV => "IV",
        })
    }
}

/// Finite-n range of degree `k`. Range I wins ties with Range III when the
/// two overlap at small `n`.
pub fn classify_ck_range(n: u64, k: u64, tau: f64, band: f64) -> CkRange {
    let nf = n as f64;
    let kf = k as f64;
    let root = nf.sqrt();
    if kf <= nf.powf((tau - 2.0) / (tau - 1.0)) * (1.0 + 1e-12) {
        CkRange::I
    } else if kf > root / band {
        CkRange::IV
    } else if kf >= band * root || kf * kf >= nf * (1.0 - 1e-9) {
        CkRange::III
    } else {
        CkRange::II
    }
}

/// `f(n, k)` for Ranges I, II and IV.
pub fn f_scale_for(range: CkRange, n: u64, k: u64, tau: f64) -> Result<f64> {
    let nf = n as f64;
    let kf = k as f64;
    match range {
        CkRange::I => Ok(nf.powf(2.0 - tau) * nf.ln()),
        CkRange::II => {
            if kf * kf >= nf * (1.0 - 1e-9) {
                return Err(Error::UseRange3Integral(k));
            }
            Ok(nf.powf(2.0 - tau) * (nf / (kf * kf)).ln())
        }
        CkRange::III => Err(Error::UseRange3Integral(k)),
        CkRange::IV => Ok(nf.powf(5.0 - 2.0 * tau) * kf.powf(2.0 * tau - 6.0)),
    }
}

/// `f(n, k)` with the range chosen by the default band.
pub fn f_scale(n: u64, k: u64, tau: f64) -> Result<f64> {
    crate::check_tau(tau)?;
    f_scale_for(classify_ck_range(n, k, tau, DEFAULT_BAND), n, k, tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CkPrediction {
    pub k: u64,
    pub range_label: CkRange,
    pub f_scale: f64,
    pub limit_constant: f64,
    pub predicted_ck: f64,
}

/// Limit of `c(k) / f(n, k)` in Ranges I, II, IV.
pub fn ck_limit_constant(params: &ModelParams, range: CkRange) -> Result<f64> {
    let tau = params.tau;
    let a = constant_a(tau)?;
    let ct2 = params.c_tau().powi(2);
    match range {
        CkRange::I => Ok(ct2 * params.mu.powf(-tau) * (3.0 - tau) / (tau - 1.0) * a),
        CkRange::II => Ok(ct2 * params.mu.powf(-tau) * a),
        CkRange::III => Err(Error::UseRange3Integral(0)),
        CkRange::IV => Ok(ct2 * params.mu.powf(3.0 - 2.0 * tau) * a * a),
    }
}

/// Predicted `c(k)` under the default band.
pub fn predict_ck(params: &ModelParams, k: u64) -> Result<CkPrediction> {
    predict_ck_with(params, k, DEFAULT_BAND, 1e-6)
}

pub fn predict_ck_with(params: &ModelParams, k: u64, band: f64, rel_tol: f64) -> Result<CkPrediction> {
    if k < 2 {
        return Err(Error::BadArgs(format!("k must be at least 2, got {k}")));
    }
    if !(band > 0.0 && band <= 1.0) {
        return Err(Error::BadArgs(format!("band must lie in (0, 1], got {band}")));
    }
    let range = classify_ck_range(params.n, k, params.tau, band);
    predict_ck_in(params, k, range, rel_tol)
}

/// Prediction using the formula of a given range regardless of where `k` falls.
pub fn predict_ck_in(params: &ModelParams, k: u64, range: CkRange, rel_tol: f64) -> Result<CkPrediction> {
    crate::check_tau(params.tau)?;
    let (f, constant) = if range == CkRange::III {
        let tau = params.tau;
        let b = k as f64 / (params.n as f64).sqrt();
        let integral = integral_ck_range3(tau, b, params.mu, rel_tol)?;
        let constant = params.mu.powf(2.0 - 2.0 * tau) * params.c_tau().powi(2) * integral.value;
        ((params.n as f64).powf(2.0 - tau), constant)
    } else {
        (
            f_scale_for(range, params.n, k, params.tau)?,
            ck_limit_constant(params, range)?,
        )
    };
    Ok(CkPrediction {
        k,
        range_label: range,
        f_scale: f,
        limit_constant: constant,
        predicted_ck: constant * f,
    })
}

/// CSV with columns `k,range,f_scale,predicted_ck`.
pub fn predictions_to_csv(preds: &[CkPrediction]) -> String {
    let mut out = String::from("k,range,f_scale,predicted_ck\n");
    for p in preds {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e}\n",
            p.k, p.range_label, p.f_scale, p.predicted_ck
        ));
    }
    out
}

/// `(1/6)(C(τ-1))³ μ^{-3(τ-1)/2}`, the factor multiplying the triangle integral.
pub fn triangle_prefactor(params: &ModelParams) -> f64 {
    params.c_tau().powi(3) * params.mu.powf(-1.5 * (params.tau - 1.0)) / 6.0
}

/// Limit of `T(G_n) / n^{3(3-τ)/2}`.
pub fn limit_triangle_constant(params: &ModelParams, kernel: TriangleKernel, rel_tol: f64) -> Result<f64> {
    let integral = integral_triangle(params.tau, kernel, rel_tol, Exec::Parallel)?;
    Ok(triangle_prefactor(params) * integral.value)
}

/// `n^{3(3-τ)/2}`.
pub fn triangle_scale(n: u64, tau: f64) -> f64 {
    (n as f64).powf(1.5 * (3.0 - tau))
}

pub fn predict_triangles(params: &ModelParams, kernel: TriangleKernel, rel_tol: f64) -> Result<f64> {
    Ok(limit_triangle_constant(params, kernel, rel_tol)? * triangle_scale(params.n, params.tau))
}

/// Everything the `theory` command reports for one exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoryReport {
    pub tau: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "negGamma")]
    pub neg_gamma: f64,
    #[serde(rename = "I_unif")]
    pub i_unif: f64,
    #[serde(rename = "I_ecm")]
    pub i_ecm: f64,
    pub limit_constant_uniform: f64,
    pub limit_constant_ecm: f64,
    pub rel_tol: f64,
    pub evaluations: u64,
}

impl TheoryReport {
    pub fn compute(params: &ModelParams, rel_tol: f64, exec: Exec) -> Result<Self> {
        let (a, neg_gamma) = gamma_comparison(params.tau)?;
        let unif = integral_triangle(params.tau, TriangleKernel::Uniform, rel_tol, exec)?;
        let ecm = integral_triangle(params.tau, TriangleKernel::Ecm, rel_tol, exec)?;
        let pre = triangle_prefactor(params);
        Ok(Self {
            tau: params.tau,
            a,
            neg_gamma,
            i_unif: unif.value,
            i_ecm: ecm.value,
            limit_constant_uniform: pre * unif.value,
            limit_constant_ecm: pre * ecm.value,
            rel_tol,
            evaluations: unif.evaluations + ecm.evaluations,
        })
    }

    pub fn limit_constant(&self, kernel: TriangleKernel) -> f64 {
        match kernel {
            TriangleKernel::Uniform => self.limit_constant_uniform,
            TriangleKernel::Ecm => self.limit_constant_ecm,
        }
    }
}
