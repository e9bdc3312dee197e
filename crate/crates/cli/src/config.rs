//! The TOML distribution config.
//!
//! ```toml
//! dim = 2
//! seed = 42
//! # g0_override = inf
//!
//! [mesh]
//! k = 4
//! rel_tol = 1e-5
//! max_simplices = 50000
//!
//! [radial]
//! kind = "gamma"
//! shape = 2.0
//!
//! [[terms]]
//! kind = "constant"
//! coef = 1.0
//!
//! [[terms]]
//! kind = "gaussian_bump"
//! coef = 1.0
//! mu = [0.7071067811865476, 0.7071067811865476]
//! sigma = 0.1
//! ```
//!
//! Term kinds: `constant`, `cone` (`mu`, `theta`), `gaussian_bump` (`mu`,
//! `sigma`), `lp_norm` (`p`), `generalized_lp_norm` (`p`, `a` as a list of
//! rows), `elliptical` (`a`). Every term has `coef`. Radial kinds: `gamma`
//! (`shape`, `rate = 1`), `uniform` (`upper`), `pareto` (`alpha`, `x_min`),
//! `frechet` (`alpha`, `scale = 1`).

use gensphere::{ContourSpec, ContourTerm, FinishOptions, RadialLaw};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_simplices")]
    pub max_simplices: usize,
}

fn default_k() -> u32 {
    FinishOptions::default().k
}

fn default_rel_tol() -> f64 {
    FinishOptions::default().rel_tol
}

fn default_max_simplices() -> usize {
    FinishOptions::default().max_simplices
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { k: default_k(), rel_tol: default_rel_tol(), max_simplices: default_max_simplices() }
    }
}

/// Largest accepted `mesh.k`; the mesh grows as `2^(k (d-1))`.
pub const MAX_K: u32 = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistConfig {
    pub dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g0_override: Option<f64>,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialLaw>,
    pub terms: Vec<ContourTerm>,
}

impl DistConfig {
    /// Parses and validates a config. Syntax errors carry the TOML line and
    /// column; validation errors name the offending field.
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let config: DistConfig = toml::from_str(text).map_err(|e| CliError::user(e.to_string().trim_end().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = crate::error::read_file(path)?;
        Self::from_toml(&text).map_err(|e| e.context(path.display()))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.spec()?;
        if let Some(radial) = &self.radial {
            radial.validate().map_err(|e| CliError::user(format!("radial.{}", strip(e))))?;
        }
        if let Some(g0) = self.g0_override {
            if !(g0 >= 0.0) {
                return Err(CliError::user(format!("g0_override: must be nonnegative or inf, got {g0}")));
            }
        }
        if self.mesh.k > MAX_K {
            return Err(CliError::user(format!("mesh.k: must be at most {MAX_K}, got {}", self.mesh.k)));
        }
        if !(self.mesh.rel_tol > 0.0 && self.mesh.rel_tol < 1.0) {
            return Err(CliError::user(format!("mesh.rel_tol: must lie in (0, 1), got {}", self.mesh.rel_tol)));
        }
        if self.mesh.max_simplices == 0 {
            return Err(CliError::user("mesh.max_simplices: must be positive"));
        }
        Ok(())
    }

    pub fn spec(&self) -> CliResult<ContourSpec> {
        ContourSpec::new(self.dim, self.terms.clone()).map_err(|e| CliError::user(strip(e)))
    }
}

fn strip(e: gensphere::Error) -> String {
    match e {
        gensphere::Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}
