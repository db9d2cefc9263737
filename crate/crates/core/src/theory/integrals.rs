//! The improper integrals behind the triangle and clustering limits.
//!
//! All three share the weight `Π x_i^{2-τ}` at the origin, which
//! [`PowerWeightCubature`] absorbs with exponent `a = 3 - τ`.

use serde::{Deserialize, Serialize};

use super::quadrature::{Integral, PowerWeightCubature};
use crate::error::{Error, Result};
use crate::par::Exec;

pub const MIN_REL_TOL: f64 = 1e-9;
pub const MAX_REL_TOL: f64 = 1e-2;

/// Which edge-probability kernel enters the triangle integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleKernel {
    /// `xy / (1 + xy)`: uniform random graph.
    Uniform,
    /// `1 - e^{-xy}`: erased configuration model.
    Ecm,
}

impl TriangleKernel {
    /// Kernel divided by its argument, `h(u) = kernel(u) / u`. The integrand
    /// is then `(xyz)^{2-τ} h(xy) h(yz) h(xz)`.
    #[inline]
    pub fn reduced(self, u: f64) -> f64 {
        match self {
            TriangleKernel::Uniform => 1.0 / (1.0 + u),
            TriangleKernel::Ecm => {
                if u < 1e-8 {
                    1.0 - 0.5 * u
                } else {
                    -(-u).exp_m1() / u
                }
            }
        }
    }
}

pub(crate) fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if (MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        Ok(())
    } else {
        Err(Error::BadArgs(format!(
            "rel_tol must lie in [{MIN_REL_TOL:e}, {MAX_REL_TOL:e}], got {rel_tol:e}"
        )))
    }
}

/// `∫∫∫_{(0,∞)^3} (xyz)^{2-τ} h(xy) h(yz) h(xz) dx dy dz` for the chosen kernel.
pub fn integral_triangle(
    tau: f64,
    kernel: TriangleKernel,
    rel_tol: f64,
    exec: Exec,
) -> Result<Integral> {
    crate::check_tau(tau)?;
    check_rel_tol(rel_tol)?;
    let g = move |x: &[f64]| {
        kernel.reduced(x[0] * x[1]) * kernel.reduced(x[1] * x[2]) * kernel.reduced(x[0] * x[2])
    };
    PowerWeightCubature::new(3.0 - tau, 3, rel_tol).integrate(&g, exec)
}

/// `∫∫∫ (xyz)^{2-τ} / ((1+xy)(1+yz)(1+xz))`.
pub fn integral_triangle_uniform(tau: f64, rel_tol: f64) -> Result<Integral> {
    integral_triangle(tau, TriangleKernel::Uniform, rel_tol, Exec::Parallel)
}

/// `∫∫∫ (xyz)^{-τ} (1-e^{-xy})(1-e^{-yz})(1-e^{-xz})`.
pub fn integral_triangle_ecm(tau: f64, rel_tol: f64) -> Result<Integral> {
    integral_triangle(tau, TriangleKernel::Ecm, rel_tol, Exec::Parallel)
}

/// `∫∫ (t₁t₂)^{2-τ} / ((1+t₁B)(1+t₂B)(μ^{-1}+t₁t₂)) dt₁ dt₂`.
pub fn integral_ck_range3(tau: f64, b: f64, mu: f64, rel_tol: f64) -> Result<Integral> {
    integral_ck_range3_with(tau, b, mu, rel_tol, Exec::Parallel)
}

pub fn integral_ck_range3_with(
    tau: f64,
    b: f64,
    mu: f64,
    rel_tol: f64,
    exec: Exec,
) -> Result<Integral> {
    crate::check_tau(tau)?;
    check_rel_tol(rel_tol)?;
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::BadArgs(format!("B must be positive, got {b}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::BadArgs(format!("mu must be positive, got {mu}")));
    }
    let inv_mu = 1.0 / mu;
    let g = move |t: &[f64]| 1.0 / ((1.0 + b * t[0]) * (1.0 + b * t[1]) * (inv_mu + t[0] * t[1]));
    PowerWeightCubature::new(3.0 - tau, 2, rel_tol).integrate(&g, exec)
}
