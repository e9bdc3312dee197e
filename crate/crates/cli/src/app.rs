//! Argument parsing and dispatch for the `gensphere` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gensphere::ExportFormat;

use crate::commands::{self, Overrides, WeightSource};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gensphere", version, about = "Build, sample and evaluate generalized spherical distributions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative cubature tolerance (overrides mesh.rel_tol)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Simplex budget for adaptive cubature (overrides mesh.max_simplices)
    #[arg(long, global = true)]
    pub max_simplices: Option<usize>,
    /// Subdivision level of the starting sphere mesh (overrides mesh.k)
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Random seed (overrides the seed stored in the config or contour file)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Evaluate the starting mesh sequentially instead of in parallel
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tessellate, refine and integrate a contour; write a contour file
    Build {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Simulate from the distribution in a contour file
    Sample {
        contour: PathBuf,
        #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the density at the points of a CSV file
    Density {
        contour: PathBuf,
        points: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample points on a user-supplied simplicial mesh
    SampleMesh {
        /// Mesh CSV: simplex_index,vertex_index,x1,...,xd
        mesh: PathBuf,
        /// uniform-area, from-file or density:<expr in x1..xd>
        #[arg(long, default_value = "uniform-area")]
        weights: String,
        #[arg(long)]
        weights_file: Option<PathBuf>,
        #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarize a contour file
    Info { contour: PathBuf },
    /// Export the contour tessellation as csv or obj
    MeshExport {
        contour: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Export the unit-sphere tessellation instead of the contour
        #[arg(long)]
        sphere: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::user(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let mut out = sink(path)?;
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::user(format!("write failed: {e}")))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let ov = Overrides { k: g.k, tol: g.tol, max_simplices: g.max_simplices, seed: g.seed, deterministic: g.deterministic };
    match cli.command {
        Command::Build { config, output } => {
            let report = commands::cmd_build(&config, &output, &ov)?;
            print!("{report}");
            Ok(())
        }
        Command::Sample { contour, n, output } => {
            commands::cmd_sample(&contour, n as usize, g.seed, sink(output.as_deref())?)
        }
        Command::Density { contour, points, output } => {
            commands::cmd_density(&contour, &points, sink(output.as_deref())?)
        }
        Command::SampleMesh { mesh, weights, weights_file, n, output } => {
            let source = WeightSource::parse(&weights, weights_file.as_deref())?;
            commands::cmd_sample_mesh(&mesh, &source, n as usize, g.seed.unwrap_or(0), sink(output.as_deref())?)
        }
        Command::Info { contour } => {
            print!("{}", commands::cmd_info(&contour)?);
            Ok(())
        }
        Command::MeshExport { contour, format, sphere, output } => {
            let format: ExportFormat = format.parse()?;
            let bytes = commands::cmd_mesh_export(&contour, format, sphere)?;
            emit(output.as_deref(), &bytes)
        }
    }
}
