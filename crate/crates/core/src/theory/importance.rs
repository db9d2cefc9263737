//! Importance-sampling estimates of the limit integrals, used to cross-check
//! the cubature.
//!
//! The triangle integrands are evaluated in log coordinates `X = ln x` etc.
//! and proposals are drawn for the pair sums `X+Y`, `Y+Z`, `X+Z`, each from
//! a logistic-Beta law with density `∝ e^{αP} / (1+e^P)^{α+β}`. The
//! Range III integrand uses the same family on `ln t₁`, `ln t₂`. Shapes are
//! set to three quarters of the integrand's own tail rates so that the
//! weights have finite variance.

use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng::{mix_words, stream};

/// Samples per independently seeded block.
pub const BLOCK: u64 = 1 << 16;

const TAIL_SHARE: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum McTarget {
    TriangleUniform { tau: f64 },
    TriangleEcm { tau: f64 },
    Range3 { tau: f64, b: f64, mu: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// `|value - mean|` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        (value - self.mean).abs() / self.std_error
    }
}

/// `ln(1 + e^s)` without overflow.
#[inline]
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// `ln(1 - e^{-u})` for `u = e^s`.
#[inline]
fn ln_one_minus_exp_neg(s: f64) -> f64 {
    let u = s.exp();
    if s < -20.0 {
        s - 0.5 * u
    } else {
        (-(-u).exp_m1()).ln()
    }
}

struct LogisticBeta {
    alpha: f64,
    beta: f64,
    ga: Gamma<f64>,
    gb: Gamma<f64>,
    ln_norm: f64,
}

impl LogisticBeta {
    fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            ga: Gamma::new(alpha, 1.0).expect("positive shape"),
            gb: Gamma::new(beta, 1.0).expect("positive shape"),
            ln_norm: ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta),
        }
    }

    /// `logit(V)` with `V ~ Beta(α, β)`, via the ratio of two Gamma draws.
    fn sample<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        self.ga.sample(rng).ln() - self.gb.sample(rng).ln()
    }

    fn ln_pdf(&self, p: f64) -> f64 {
        self.alpha * p - (self.alpha + self.beta) * softplus(p) - self.ln_norm
    }
}

struct Sampler {
    target: McTarget,
    proposal: LogisticBeta,
}

impl Sampler {
    fn new(target: McTarget) -> Self {
        let proposal = match target {
            McTarget::TriangleUniform { tau } | McTarget::TriangleEcm { tau } => {
                let c = (3.0 - tau) / 2.0;
                LogisticBeta::new(TAIL_SHARE * c, TAIL_SHARE * (1.0 - c))
            }
            McTarget::Range3 { tau, .. } => {
                let a = 3.0 - tau;
                LogisticBeta::new(TAIL_SHARE * a, TAIL_SHARE * (2.0 - a))
            }
        };
        Self { target, proposal }
    }

    fn weight<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        let q = &self.proposal;
        let lw = match self.target {
            McTarget::TriangleUniform { tau } | McTarget::TriangleEcm { tau } => {
                let p = [q.sample(rng), q.sample(rng), q.sample(rng)];
                let x = 0.5 * (p[0] - p[1] + p[2]);
                let y = 0.5 * (p[0] + p[1] - p[2]);
                let z = 0.5 * (-p[0] + p[1] + p[2]);
                let s = x + y + z;
                let ln_f = match self.target {
                    McTarget::TriangleUniform { .. } => {
                        (2.0 - tau) * s - softplus(x + y) - softplus(y + z) - softplus(x + z)
                    }
                    _ => {
                        -tau * s
                            + ln_one_minus_exp_neg(x + y)
                            + ln_one_minus_exp_neg(y + z)
                            + ln_one_minus_exp_neg(x + z)
                    }
                };
                // dx dy dz = xyz dX dY dZ and dX dY dZ = dP / 2
                ln_f + s - std::f64::consts::LN_2 - p.iter().map(|&v| q.ln_pdf(v)).sum::<f64>()
            }
            McTarget::Range3 { tau, b, mu } => {
                let t1 = q.sample(rng);
                let t2 = q.sample(rng);
                let (lb, lmu) = (b.ln(), mu.ln());
                let ln_f = (2.0 - tau) * (t1 + t2)
                    - softplus(t1 + lb)
                    - softplus(t2 + lb)
                    - (softplus(t1 + t2 + lmu) - lmu);
                ln_f + t1 + t2 - q.ln_pdf(t1) - q.ln_pdf(t2)
            }
        };
        let w = lw.exp();
        if w.is_finite() {
            w
        } else {
            0.0
        }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let frac = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + d * frac,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * frac,
        }
    }
}

fn check_target(target: McTarget) -> Result<()> {
    match target {
        McTarget::TriangleUniform { tau } | McTarget::TriangleEcm { tau } => {
            crate::check_tau(tau)?;
        }
        McTarget::Range3 { tau, b, mu } => {
            crate::check_tau(tau)?;
            if !(b > 0.0 && b.is_finite() && mu > 0.0 && mu.is_finite()) {
                return Err(Error::BadArgs(format!("need B > 0 and mu > 0, got {b}, {mu}")));
            }
        }
    }
    Ok(())
}

/// Estimates the target integral from `samples` draws. Blocks of
/// [`BLOCK`] samples have their own seeded streams and are merged in order,
/// so the result does not depend on `exec` or the thread count.
pub fn importance_estimate(target: McTarget, samples: u64, seed: u64, exec: Exec) -> Result<McEstimate> {
    check_target(target)?;
    if samples < 2 {
        return Err(Error::BadArgs("need at least two samples".into()));
    }
    let sampler = Sampler::new(target);
    let blocks = samples.div_ceil(BLOCK) as usize;
    let parts = exec.map_range(blocks, |i| {
        let mut rng = stream(mix_words([seed, i as u64]));
        let len = BLOCK.min(samples - i as u64 * BLOCK);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sampler.weight(&mut rng));
        }
        m
    });
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        mean: total.mean,
        std_error: (var / total.count as f64).sqrt(),
        samples: total.count,
    })
}
