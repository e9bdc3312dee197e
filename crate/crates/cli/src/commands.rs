//! Subcommand implementations. Each returns its output instead of printing,
//! so the binary and the tests share one code path.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use gensphere::mesh::{export_simplices, parse_simplices_csv, simplex_volume};
use gensphere::{finish_contour, ExportFormat, FinishOptions, FinishedContour, TessellationSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::DistConfig;
use crate::container::ContourFile;
use crate::csvio::{coordinate_header, read_table, CsvOut};
use crate::error::{read_file, CliError, CliResult};
use crate::expr::Expr;

/// Command-line values that override the config.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<u32>,
    pub tol: Option<f64>,
    pub max_simplices: Option<usize>,
    pub seed: Option<u64>,
    pub deterministic: bool,
}

impl Overrides {
    pub fn apply(&self, config: &mut DistConfig) -> CliResult<()> {
        if let Some(k) = self.k {
            config.mesh.k = k;
        }
        if let Some(t) = self.tol {
            config.mesh.rel_tol = t;
        }
        if let Some(m) = self.max_simplices {
            config.mesh.max_simplices = m;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        config.validate()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct BuildOutput {
    pub file: ContourFile,
    pub contour: FinishedContour,
    pub elapsed: Duration,
}

impl BuildOutput {
    pub fn report(&self) -> String {
        let d = self.contour.diagnostics();
        let mut s = String::new();
        writeln!(s, "k_C: {}", self.contour.k_c()).unwrap();
        writeln!(s, "integral of c^d: {}", self.contour.tessellation().total).unwrap();
        writeln!(s, "simplices: initial {}, after refinement {}, final {}", d.initial, d.after_refinement, d.after_cubature)
            .unwrap();
        writeln!(s, "degenerate simplices dropped: {}", d.degenerate_dropped).unwrap();
        writeln!(s, "error estimate: {:e} (tolerance {})", d.abs_error, if d.tolerance_met { "met" } else { "not met" })
            .unwrap();
        writeln!(s, "wall time: {:.3} s", self.elapsed.as_secs_f64()).unwrap();
        s
    }
}

pub fn build(config: &DistConfig, deterministic: bool) -> CliResult<BuildOutput> {
    let spec = config.spec()?;
    let opts = FinishOptions {
        k: config.mesh.k,
        rel_tol: config.mesh.rel_tol,
        max_simplices: config.mesh.max_simplices,
        deterministic,
    };
    let start = Instant::now();
    let contour = finish_contour(&spec, opts)?;
    let elapsed = start.elapsed();
    let file = ContourFile::new(config, &contour);
    Ok(BuildOutput { file, contour, elapsed })
}

pub fn cmd_build(config_path: &Path, output: &Path, ov: &Overrides) -> CliResult<String> {
    let mut config = DistConfig::load(config_path)?;
    ov.apply(&mut config).map_err(|e| e.context("command-line override"))?;
    let out = build(&config, ov.deterministic)?;
    crate::error::write_file(output, out.file.to_json().as_bytes())?;
    Ok(out.report())
}

pub fn cmd_sample<W: Write>(contour: &Path, n: usize, seed: Option<u64>, out: W) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::user("n must be at least 1"));
    }
    let file = ContourFile::load(contour)?;
    let dist = file.distribution()?;
    let mut rng = rng(seed.unwrap_or(file.seed));
    let mut w = CsvOut::new(out, &coordinate_header(dist.dim()))?;
    for _ in 0..n {
        let x = dist.simulate(1, &mut rng).pop().expect("one draw");
        w.row(&x)?;
    }
    w.finish()
}

pub fn cmd_density<W: Write>(contour: &Path, points: &Path, out: W) -> CliResult<()> {
    let file = ContourFile::load(contour)?;
    let dist = file.distribution()?;
    let d = dist.dim();
    let rows = read_table(&read_file(points)?, Some(d)).map_err(|e| e.context(points.display()))?;
    let mut header = coordinate_header(d);
    header.push("f".into());
    let mut w = CsvOut::new(out, &header)?;
    for (i, x) in rows.iter().enumerate() {
        let f = dist.density_at(x).map_err(|e| CliError::from(e).context(format!("point {}", i + 1)))?;
        let mut row = x.clone();
        row.push(f);
        w.row(&row)?;
    }
    w.finish()
}

/// Where `sample-mesh` gets its simplex weights.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSource {
    UniformArea,
    FromFile(PathBuf),
    /// Area times the expression evaluated at the simplex centroid.
    Density(String),
}

impl WeightSource {
    pub fn parse(spec: &str, weights_file: Option<&Path>) -> CliResult<Self> {
        match spec {
            "uniform-area" => Ok(WeightSource::UniformArea),
            "from-file" => weights_file
                .map(|p| WeightSource::FromFile(p.to_path_buf()))
                .ok_or_else(|| CliError::user("--weights from-file needs --weights-file")),
            _ => match spec.strip_prefix("density:") {
                Some(expr) => Ok(WeightSource::Density(expr.to_string())),
                None => Err(CliError::user(format!(
                    "unknown weight source {spec:?}; use uniform-area, from-file or density:<expr>"
                ))),
            },
        }
    }
}

fn centroid(vertices: &[Vec<f64>]) -> Vec<f64> {
    let m = vertices.len() as f64;
    let mut c = vec![0.0; vertices[0].len()];
    for v in vertices {
        c.iter_mut().zip(v).for_each(|(ci, vi)| *ci += vi / m);
    }
    c
}

pub fn mesh_weights(simplices: &[Vec<Vec<f64>>], source: &WeightSource) -> CliResult<Vec<f64>> {
    let weights = match source {
        WeightSource::UniformArea => simplices.iter().map(|s| simplex_volume(s)).collect(),
        WeightSource::FromFile(path) => {
            let rows = read_table(&read_file(path)?, Some(1)).map_err(|e| e.context(path.display()))?;
            let w: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
            if w.len() != simplices.len() {
                return Err(CliError::user(format!("{} weights for {} simplices", w.len(), simplices.len())));
            }
            w
        }
        WeightSource::Density(src) => {
            let dim = simplices.first().map_or(0, |s| s[0].len());
            let expr = Expr::parse(src, dim).map_err(|e| CliError::user(format!("density expression {e}")))?;
            simplices
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let f = expr.eval(&centroid(s));
                    if f.is_finite() && f >= 0.0 {
                        Ok(simplex_volume(s) * f)
                    } else {
                        Err(CliError::user(format!("density expression is {f} at the centroid of simplex {i}")))
                    }
                })
                .collect::<CliResult<Vec<f64>>>()?
        }
    };
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(CliError::user(format!("weight {i} is {}; weights must be finite and nonnegative", weights[i])));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(CliError::Numeric("mesh weights sum to zero".into()));
    }
    Ok(weights)
}

pub fn cmd_sample_mesh<W: Write>(mesh: &Path, source: &WeightSource, n: usize, seed: u64, out: W) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::user("n must be at least 1"));
    }
    let simplices = parse_simplices_csv(&read_file(mesh)?).map_err(|e| CliError::from(e).context(mesh.display()))?;
    if simplices.is_empty() {
        return Err(CliError::user(format!("{}: mesh has no simplices", mesh.display())));
    }
    let weights = mesh_weights(&simplices, source)?;
    let sampler = TessellationSampler::new(&simplices, &weights)?;
    let mut rng = rng(seed);
    let mut w = CsvOut::new(out, &coordinate_header(simplices[0][0].len()))?;
    for _ in 0..n {
        w.row(&sampler.sample(&mut rng))?;
    }
    w.finish()
}

pub fn cmd_info(contour: &Path) -> CliResult<String> {
    let file = ContourFile::load(contour)?;
    let c = file.contour()?;
    let d = c.diagnostics();
    let mut s = String::new();
    writeln!(s, "format: {} v{}", file.format, file.version).unwrap();
    writeln!(s, "dim: {}", file.dim).unwrap();
    writeln!(s, "terms: {}", file.spec.terms().count()).unwrap();
    for (i, t) in file.spec.terms().enumerate() {
        writeln!(s, "  [{i}] {}", serde_json::to_string(t).expect("term serializes")).unwrap();
    }
    match &file.radial {
        Some(r) => writeln!(s, "radial: {}", r.name()).unwrap(),
        None => writeln!(s, "radial: none").unwrap(),
    }
    match file.g0_override {
        Some(g) => writeln!(s, "g0_override: {g}").unwrap(),
        None => writeln!(s, "g0_override: none").unwrap(),
    }
    writeln!(s, "seed: {}", file.seed).unwrap();
    writeln!(s, "k_C: {}", c.k_c()).unwrap();
    writeln!(s, "simplices: initial {}, after refinement {}, final {}", d.initial, d.after_refinement, d.after_cubature)
        .unwrap();
    writeln!(s, "degenerate simplices dropped: {}", d.degenerate_dropped).unwrap();
    writeln!(s, "error estimate: {:e} (tolerance {})", d.abs_error, if d.tolerance_met { "met" } else { "not met" }).unwrap();
    Ok(s)
}

/// Exports the contour tessellation, or the unit-sphere one when `sphere`.
pub fn cmd_mesh_export(contour: &Path, format: ExportFormat, sphere: bool) -> CliResult<Vec<u8>> {
    let c = ContourFile::load(contour)?.contour()?;
    let tess = if sphere { c.sphere_tessellation() } else { c.tessellation() };
    Ok(export_simplices(c.dim(), &tess.simplices, format)?)
}
