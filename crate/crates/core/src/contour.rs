//! Contour functions `c(s)` on the unit sphere.
//!
//! A contour is a sum of *direct* terms (constant, cone, Gaussian bump) plus
//! the reciprocal of a sum of *reciprocal* terms (`l^p` norm, generalized
//! `l^p` norm, elliptical norm):
//!
//! ```text
//! c(s) = sum_j c_j r_j(s) + 1 / sum_j c*_j r*_j(s)
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mesh::{dot, norm};

const MU_TOL: f64 = 1e-10;
const UNIT_EXACT_TOL: f64 = 1e-12;
const UNIT_RENORM_TOL: f64 = 1e-8;

/// One term of a contour function. `coef` is the positive multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContourTerm {
    /// `r(s) = 1`.
    Constant { coef: f64 },
    /// Peak 1 at `mu`, decaying linearly in geodesic angle to 0 at angle `theta`.
    Cone { coef: f64, mu: Vec<f64>, theta: f64 },
    /// `exp(-t^2 / (2 sigma^2))`, `t` the distance from `mu` to the gnomonic
    /// projection of `s` on the tangent plane at `mu`; zero on `s . mu <= 0`.
    GaussianBump { coef: f64, mu: Vec<f64>, sigma: f64 },
    /// `||s||_p`.
    LpNorm { coef: f64, p: f64 },
    /// `||A s||_p` for an `m x d` matrix `A` (given as rows).
    GeneralizedLpNorm { coef: f64, p: f64, a: Vec<Vec<f64>> },
    /// `(s^T A s)^(1/2)` for a symmetric positive definite `A`.
    Elliptical { coef: f64, a: Vec<Vec<f64>> },
}

fn lp_norm<I: Iterator<Item = f64> + Clone>(xs: I, p: f64) -> f64 {
    let scale = xs.clone().fold(0.0, |m: f64, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    xs.map(|x| (x.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p) * scale
}

impl ContourTerm {
    pub fn coef(&self) -> f64 {
        match *self {
            ContourTerm::Constant { coef }
            | ContourTerm::Cone { coef, .. }
            | ContourTerm::GaussianBump { coef, .. }
            | ContourTerm::LpNorm { coef, .. }
            | ContourTerm::GeneralizedLpNorm { coef, .. }
            | ContourTerm::Elliptical { coef, .. } => coef,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ContourTerm::Constant { .. } => "constant",
            ContourTerm::Cone { .. } => "cone",
            ContourTerm::GaussianBump { .. } => "gaussian_bump",
            ContourTerm::LpNorm { .. } => "lp_norm",
            ContourTerm::GeneralizedLpNorm { .. } => "generalized_lp_norm",
            ContourTerm::Elliptical { .. } => "elliptical",
        }
    }

    /// Reciprocal terms enter `c` through `1 / sum c*_j r*_j(s)`.
    pub fn is_reciprocal(&self) -> bool {
        matches!(
            self,
            ContourTerm::LpNorm { .. } | ContourTerm::GeneralizedLpNorm { .. } | ContourTerm::Elliptical { .. }
        )
    }

    /// Checks parameter ranges and consistency with ambient dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let coef = self.coef();
        if !(coef.is_finite() && coef > 0.0) {
            return invalid(format!("coef: must be positive and finite, got {coef}"));
        }
        let check_mu = |mu: &[f64]| -> Result<()> {
            if mu.len() != d {
                return invalid(format!("mu: has length {}, expected {d}", mu.len()));
            }
            if mu.iter().any(|x| !x.is_finite()) || (norm(mu) - 1.0).abs() > MU_TOL {
                return invalid("mu: must be a unit vector");
            }
            Ok(())
        };
        let check_p = |p: f64| -> Result<()> {
            if !(p.is_finite() && p > 0.0) {
                return invalid(format!("p: must be positive and finite, got {p}"));
            }
            Ok(())
        };
        match self {
            ContourTerm::Constant { .. } => Ok(()),
            ContourTerm::Cone { mu, theta, .. } => {
                check_mu(mu)?;
                if !(*theta > 0.0 && *theta <= std::f64::consts::FRAC_PI_2) {
                    return invalid(format!("theta: must lie in (0, pi/2], got {theta}"));
                }
                Ok(())
            }
            ContourTerm::GaussianBump { mu, sigma, .. } => {
                check_mu(mu)?;
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return invalid(format!("sigma: must be positive, got {sigma}"));
                }
                Ok(())
            }
            ContourTerm::LpNorm { p, .. } => check_p(*p),
            ContourTerm::GeneralizedLpNorm { p, a, .. } => {
                check_p(*p)?;
                if a.is_empty() || a.iter().any(|row| row.len() != d) {
                    return invalid(format!("a: rows must have length {d}"));
                }
                if a.iter().flatten().any(|x| !x.is_finite()) {
                    return invalid("a: must be finite");
                }
                Ok(())
            }
            ContourTerm::Elliptical { a, .. } => {
                if a.len() != d || a.iter().any(|row| row.len() != d) {
                    return invalid(format!("a: must be {d} x {d}"));
                }
                if a.iter().flatten().any(|x| !x.is_finite()) {
                    return invalid("a: must be finite");
                }
                let scale = a.iter().flatten().fold(0.0, |m: f64, x| m.max(x.abs()));
                for i in 0..d {
                    for j in 0..i {
                        if (a[i][j] - a[j][i]).abs() > 1e-12 * scale {
                            return invalid("a: must be symmetric");
                        }
                    }
                }
                let m = DMatrix::from_fn(d, d, |i, j| a[i][j]);
                if m.cholesky().is_none() {
                    return invalid("a: must be positive definite");
                }
                Ok(())
            }
        }
    }

    /// Evaluates `r(s)` (without the coefficient) at a unit vector `s`.
    pub fn eval(&self, s: &[f64]) -> f64 {
        match self {
            ContourTerm::Constant { .. } => 1.0,
            ContourTerm::Cone { mu, theta, .. } => {
                let angle = dot(mu, s).clamp(-1.0, 1.0).acos();
                (1.0 - angle / theta).max(0.0)
            }
            ContourTerm::GaussianBump { mu, sigma, .. } => {
                let cos = dot(mu, s);
                if cos <= 0.0 {
                    return 0.0;
                }
                let t2: f64 = s.iter().zip(mu).map(|(si, mi)| (si / cos - mi).powi(2)).sum();
                (-t2 / (2.0 * sigma * sigma)).exp()
            }
            ContourTerm::LpNorm { p, .. } => lp_norm(s.iter().copied(), *p),
            ContourTerm::GeneralizedLpNorm { p, a, .. } => lp_norm(a.iter().map(|row| dot(row, s)), *p),
            ContourTerm::Elliptical { a, .. } => {
                let q: f64 = a.iter().zip(s).map(|(row, si)| si * dot(row, s)).sum();
                q.max(0.0).sqrt()
            }
        }
    }

    /// Center and angular scale of cone (`theta`) and Gaussian bump (`sigma`) terms.
    pub fn bump(&self) -> Option<(&[f64], f64)> {
        match self {
            ContourTerm::Cone { mu, theta, .. } => Some((mu, *theta)),
            ContourTerm::GaussianBump { mu, sigma, .. } => Some((mu, *sigma)),
            _ => None,
        }
    }
}

/// A validated contour: direct terms and reciprocal terms in declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ContourSpec {
    dim: usize,
    direct_terms: Vec<ContourTerm>,
    recip_terms: Vec<ContourTerm>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    dim: usize,
    terms: Vec<ContourTerm>,
}

impl TryFrom<RawSpec> for ContourSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ContourSpec::new(raw.dim, raw.terms)
    }
}

impl From<ContourSpec> for RawSpec {
    fn from(spec: ContourSpec) -> Self {
        RawSpec { dim: spec.dim, terms: spec.terms().cloned().collect() }
    }
}

impl ContourSpec {
    /// Validates every term and splits them into direct and reciprocal lists.
    pub fn new(dim: usize, terms: Vec<ContourTerm>) -> Result<Self> {
        if dim < 2 {
            return invalid(format!("dimension must be at least 2, got {dim}"));
        }
        if terms.is_empty() {
            return invalid("a contour needs at least one term");
        }
        for (i, t) in terms.iter().enumerate() {
            t.validate(dim)
                .map_err(|e| Error::InvalidArgument(format!("terms[{i}].{}", strip(&e))))?;
        }
        let (recip_terms, direct_terms) = terms.into_iter().partition(ContourTerm::is_reciprocal);
        Ok(ContourSpec { dim, direct_terms, recip_terms })
    }

    /// The identity contour `c = 1` (the unit sphere).
    pub fn sphere(dim: usize) -> Result<Self> {
        ContourSpec::new(dim, vec![ContourTerm::Constant { coef: 1.0 }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direct_terms(&self) -> &[ContourTerm] {
        &self.direct_terms
    }

    pub fn recip_terms(&self) -> &[ContourTerm] {
        &self.recip_terms
    }

    /// Direct terms followed by reciprocal terms.
    pub fn terms(&self) -> impl Iterator<Item = &ContourTerm> {
        self.direct_terms.iter().chain(&self.recip_terms)
    }

    /// Upper bound `sum c_j` on the direct part (each direct `r_j <= 1`).
    pub fn direct_bound(&self) -> f64 {
        self.direct_terms.iter().map(ContourTerm::coef).sum()
    }

    /// Evaluates `c(s)`. Inputs within `1e-8` of unit length are renormalized.
    pub fn eval(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.dim {
            return invalid(format!("direction has dimension {}, contour has {}", s.len(), self.dim));
        }
        let n = norm(s);
        if !n.is_finite() {
            return Err(Error::NumericDomain(format!("non-finite direction {s:?}")));
        }
        let dev = (n - 1.0).abs();
        if dev > UNIT_RENORM_TOL {
            return invalid(format!("direction {s:?} is not a unit vector"));
        }
        if dev > UNIT_EXACT_TOL {
            let unit: Vec<f64> = s.iter().map(|x| x / n).collect();
            return self.eval_unit(&unit);
        }
        self.eval_unit(s)
    }

    fn eval_unit(&self, s: &[f64]) -> Result<f64> {
        let direct: f64 = self.direct_terms.iter().map(|t| t.coef() * t.eval(s)).sum();
        let mut c = direct;
        if !self.recip_terms.is_empty() {
            let denom: f64 = self.recip_terms.iter().map(|t| t.coef() * t.eval(s)).sum();
            if denom.is_nan() {
                return Err(Error::NumericDomain(format!("reciprocal terms are NaN at {s:?}")));
            }
            if denom <= 0.0 {
                return Err(Error::ContourUnbounded(s.to_vec()));
            }
            c += 1.0 / denom;
        }
        if !c.is_finite() {
            return Err(Error::NumericDomain(format!("contour value {c} at {s:?}")));
        }
        Ok(c)
    }

    /// `(mu, angular scale)` for each cone and Gaussian bump term, in order.
    pub fn bump_centers(&self) -> Vec<(Vec<f64>, f64)> {
        self.direct_terms
            .iter()
            .filter_map(ContourTerm::bump)
            .map(|(mu, scale)| (mu.to_vec(), scale))
            .collect()
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::InvalidArgument(m) => m.clone(),
        other => other.to_string(),
    }
}

/// `eval_term` in functional form.
pub fn eval_term(term: &ContourTerm, s: &[f64]) -> f64 {
    term.eval(s)
}

/// `eval_contour` in functional form.
pub fn eval_contour(spec: &ContourSpec, s: &[f64]) -> Result<f64> {
    spec.eval(s)
}
