//! The contour file: a versioned JSON document holding everything needed to
//! rebuild a [`FinishedContour`] without rerunning cubature.
//!
//! Floats are written in shortest round-trip form, so a load reproduces the
//! saved tessellation and weights bit for bit. Vertices are shared between
//! simplices by exact bit pattern.

use std::collections::HashMap;

use gensphere::{ContourSpec, Diagnostics, FinishedContour, GenSphereDist, RadialLaw, SurfaceSimplex, WeightedTessellation};
use serde::{Deserialize, Serialize};

use crate::config::{DistConfig, MeshConfig};
use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "gensphere-contour";
pub const VERSION: u32 = 1;

/// `None`, a finite float, or `"inf"`.
mod ext_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_infinite() && *x > 0.0 => s.serialize_some("inf"),
            Some(x) => s.serialize_some(x),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourFile {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub spec: ContourSpec,
    pub radial: Option<RadialLaw>,
    #[serde(with = "ext_real")]
    pub g0_override: Option<f64>,
    pub seed: u64,
    pub mesh: MeshConfig,
    pub k_c: f64,
    pub total: f64,
    pub abs_error: f64,
    pub tolerance_met: bool,
    pub degenerate_dropped: usize,
    pub diagnostics: Diagnostics,
    /// Unit-sphere vertices; the contour vertices are `c(s) s`.
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub ancestors: Vec<usize>,
}

impl ContourFile {
    pub fn new(config: &DistConfig, contour: &FinishedContour) -> Self {
        let tess = contour.sphere_tessellation();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let simplices = tess
            .simplices
            .iter()
            .map(|s| {
                s.vertices()
                    .iter()
                    .map(|v| {
                        let key: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
                        *index.entry(key).or_insert_with(|| {
                            vertices.push(v.clone());
                            vertices.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        ContourFile {
            format: FORMAT.into(),
            version: VERSION,
            dim: contour.dim(),
            spec: contour.spec().clone(),
            radial: config.radial.clone(),
            g0_override: config.g0_override,
            seed: config.seed,
            mesh: config.mesh,
            k_c: contour.k_c(),
            total: tess.total,
            abs_error: tess.abs_error,
            tolerance_met: tess.tolerance_met,
            degenerate_dropped: tess.degenerate_dropped,
            diagnostics: *contour.diagnostics(),
            vertices,
            simplices,
            weights: tess.weights.clone(),
            ancestors: tess.ancestors.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("contour file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::user(format!("not a contour file: {e}")))?;
        match value.get("format").and_then(|f| f.as_str()) {
            Some(FORMAT) => {}
            _ => return Err(CliError::user(format!("not a contour file: missing format \"{FORMAT}\""))),
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == VERSION as u64 => {}
            Some(v) => return Err(CliError::user(format!("unsupported contour file version {v}, expected {VERSION}"))),
            None => return Err(CliError::user("contour file has no version field")),
        }
        serde_json::from_value(value).map_err(|e| CliError::user(format!("malformed contour file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = crate::error::read_file(path)?;
        Self::from_json(&text).map_err(|e| e.context(path.display()))
    }

    /// Rebuilds the finished contour; no cubature is rerun.
    pub fn contour(&self) -> CliResult<FinishedContour> {
        if self.spec.dim() != self.dim {
            return Err(CliError::user("contour file: spec dimension differs from dim"));
        }
        let n = self.simplices.len();
        if self.weights.len() != n || self.ancestors.len() != n {
            return Err(CliError::user(format!(
                "contour file: {n} simplices but {} weights and {} ancestors",
                self.weights.len(),
                self.ancestors.len()
            )));
        }
        let simplices = self
            .simplices
            .iter()
            .enumerate()
            .map(|(i, idx)| {
                let vs = idx
                    .iter()
                    .map(|&j| {
                        self.vertices
                            .get(j)
                            .cloned()
                            .ok_or_else(|| CliError::user(format!("contour file: simplex {i} uses missing vertex {j}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                SurfaceSimplex::new(vs).map_err(|e| CliError::from(e).context(format!("contour file: simplex {i}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let tess = WeightedTessellation {
            dim: self.dim,
            simplices,
            weights: self.weights.clone(),
            ancestors: self.ancestors.clone(),
            total: self.total,
            abs_error: self.abs_error,
            tolerance_met: self.tolerance_met,
            degenerate_dropped: self.degenerate_dropped,
        };
        let contour = FinishedContour::from_parts(self.spec.clone(), tess, self.diagnostics)?;
        if contour.k_c().to_bits() != self.k_c.to_bits() {
            return Err(CliError::user(format!(
                "contour file: stored k_C {} does not match the weights ({})",
                self.k_c,
                contour.k_c()
            )));
        }
        Ok(contour)
    }

    /// The distribution, which needs a radial law in the file.
    pub fn distribution(&self) -> CliResult<GenSphereDist> {
        let radial = self.radial.clone().ok_or_else(|| {
            CliError::user("contour file has no radial law; add a [radial] table to the config and rebuild")
        })?;
        let dist = GenSphereDist::new(self.contour()?, radial)?;
        Ok(match self.g0_override {
            Some(g0) => dist.with_g0_override(g0)?,
            None => dist,
        })
    }
}
