//! Radial laws `R` and the radial function `g(r) = k_C r^(1-d) h(r)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{invalid, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};

fn default_rate() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

/// Built-in laws for the radial scale factor.
///
/// * `Gamma`: density `rate^shape r^(shape-1) e^(-rate r) / Gamma(shape)`.
/// * `Uniform`: uniform on `(0, upper)`.
/// * `Pareto`: density `alpha x_min^alpha r^(-alpha-1)` on `r >= x_min`.
/// * `Frechet`: CDF `exp(-(scale/r)^alpha)` on `r > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialLaw {
    Gamma {
        shape: f64,
        #[serde(default = "default_rate")]
        rate: f64,
    },
    Uniform { upper: f64 },
    Pareto { alpha: f64, x_min: f64 },
    Frechet {
        alpha: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        invalid(format!("{name}: must be positive and finite, got {x}"))
    }
}

impl RadialLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialLaw::Gamma { shape, rate } => positive("shape", shape).and(positive("rate", rate)),
            RadialLaw::Uniform { upper } => positive("upper", upper),
            RadialLaw::Pareto { alpha, x_min } => positive("alpha", alpha).and(positive("x_min", x_min)),
            RadialLaw::Frechet { alpha, scale } => {
                positive("alpha", alpha).and(positive("scale", scale))
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            RadialLaw::Gamma { shape, rate } => format!("gamma(shape={shape}, rate={rate})"),
            RadialLaw::Uniform { upper } => format!("uniform(0, {upper})"),
            RadialLaw::Pareto { alpha, x_min } => format!("pareto(alpha={alpha}, x_min={x_min})"),
            RadialLaw::Frechet { alpha, scale } => format!("frechet(alpha={alpha}, scale={scale})"),
        }
    }

    /// The density `h(r)`; zero for `r < 0`.
    pub fn density(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        match *self {
            RadialLaw::Gamma { shape, rate } => {
                if r == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => rate,
                        _ => 0.0,
                    };
                }
                ((shape - 1.0) * r.ln() - rate * r + shape * rate.ln() - ln_gamma(shape)).exp()
            }
            RadialLaw::Uniform { upper } => {
                if r < upper {
                    1.0 / upper
                } else {
                    0.0
                }
            }
            RadialLaw::Pareto { alpha, x_min } => {
                if r < x_min {
                    0.0
                } else {
                    alpha / x_min * (x_min / r).powf(alpha + 1.0)
                }
            }
            RadialLaw::Frechet { alpha, scale } => {
                if r == 0.0 {
                    return 0.0;
                }
                let z = (scale / r).powf(alpha);
                alpha / r * z * (-z).exp()
            }
        }
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match *self {
            RadialLaw::Gamma { shape, rate } => gamma_lr(shape, rate * r),
            RadialLaw::Uniform { upper } => (r / upper).min(1.0),
            RadialLaw::Pareto { alpha, x_min } => {
                if r < x_min {
                    0.0
                } else {
                    1.0 - (x_min / r).powf(alpha)
                }
            }
            RadialLaw::Frechet { alpha, scale } => (-(scale / r).powf(alpha)).exp(),
        }
    }

    /// `lim_{r -> 0} r^(1-d) h(r)`, possibly `+inf` or `0`.
    pub fn g0_factor(&self, d: usize) -> f64 {
        let d = d as f64;
        match *self {
            RadialLaw::Gamma { shape, rate } => {
                if shape < d {
                    f64::INFINITY
                } else if shape == d {
                    (shape * rate.ln() - ln_gamma(shape)).exp()
                } else {
                    0.0
                }
            }
            RadialLaw::Uniform { .. } => f64::INFINITY,
            RadialLaw::Pareto { .. } | RadialLaw::Frechet { .. } => 0.0,
        }
    }

    /// Draws one strictly positive variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let r = match *self {
                RadialLaw::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                    .expect("validated gamma parameters")
                    .sample(rng),
                RadialLaw::Uniform { upper } => upper * rng.random::<f64>(),
                RadialLaw::Pareto { alpha, x_min } => {
                    // 1 - u lies in (0, 1]
                    x_min * (1.0 - rng.random::<f64>()).powf(-1.0 / alpha)
                }
                RadialLaw::Frechet { alpha, scale } => {
                    let u: f64 = rng.random();
                    scale * (-u.ln()).powf(-1.0 / alpha)
                }
            };
            if r > 0.0 && r.is_finite() {
                return r;
            }
        }
    }

    fn support(&self) -> (f64, Option<f64>) {
        match *self {
            RadialLaw::Gamma { .. } | RadialLaw::Frechet { .. } => (0.0, None),
            RadialLaw::Uniform { upper } => (0.0, Some(upper)),
            RadialLaw::Pareto { x_min, .. } => (x_min, None),
        }
    }

    fn length_scale(&self) -> f64 {
        match *self {
            RadialLaw::Gamma { shape, rate } => shape.max(1.0) / rate,
            RadialLaw::Uniform { upper } => upper,
            RadialLaw::Pareto { x_min, .. } => x_min,
            RadialLaw::Frechet { scale, .. } => scale,
        }
    }
}

/// `g(r) = k_C r^(1-d) h(r)`; at `r = 0` the limit `k_C * g0_factor`.
pub fn radial_g(law: &RadialLaw, k_c: f64, d: usize, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return invalid(format!("radius must be nonnegative, got {r}"));
    }
    if r == 0.0 {
        let g0 = law.g0_factor(d);
        return Ok(if g0 == 0.0 { 0.0 } else { k_c * g0 });
    }
    let h = law.density(r);
    if h == 0.0 {
        return Ok(0.0);
    }
    Ok(k_c * r.powi(1 - d as i32) * h)
}

/// Numerically evaluates `integral_0^inf r^(d-1) g(r) dr`, which equals `k_C`
/// for every valid law.
pub fn radial_check(law: &RadialLaw, k_c: f64, d: usize) -> Result<f64> {
    law.validate()?;
    positive("k_C", k_c)?;
    if d < 2 {
        return invalid(format!("dimension must be at least 2, got {d}"));
    }
    let integrand = |r: f64| -> f64 {
        let g = radial_g(law, k_c, d, r).unwrap_or(f64::NAN);
        r.powi(d as i32 - 1) * g
    };
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 20_000 };
    let (lo, hi) = law.support();
    let result = match hi {
        Some(hi) => integrate(integrand, lo, hi, opts)?,
        None => {
            // split at a natural scale so the bulk is resolved on a finite piece
            let mid = lo + law.length_scale();
            let head = integrate(integrand, lo, mid, opts)?;
            let tail = integrate_to_infinity(integrand, mid, law.length_scale(), opts)?;
            crate::quad::QuadResult {
                value: head.value + tail.value,
                abs_error: head.abs_error + tail.abs_error,
                intervals: head.intervals + tail.intervals,
            }
        }
    };
    Ok(result.value)
}
