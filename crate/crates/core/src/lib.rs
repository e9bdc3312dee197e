//! Generalized spherical distributions in dimension `d >= 2`.
//!
//! A distribution is built from a *contour function* `c(s)` on the unit sphere,
//! whose graph `{c(s) s}` is a star-shaped level set, and a univariate radial
//! law `R` with density `h`. The density is `f(x) = g(|x| / c(x/|x|))` with
//! `g(r) = k_C r^(1-d) h(r)`, where `k_C` is the reciprocal of the integral of
//! `c^d` over the sphere.
//!
//! The pipeline mirrors the module layout:
//!
//! * [`mesh`]: simplicial tessellations of the unit sphere and point refinement.
//! * [`contour`]: declarative contour terms and pointwise evaluation of `c(s)`.
//! * [`cubature`]: adaptive integration of `c^d` over the sphere, yielding
//!   per-simplex weights and the norming constant.
//! * [`radial`]: built-in radial laws, `g(r)` and the normalization self-check.
//! * [`sampler`]: weighted simplex selection and the `X = R Z` generator.
//! * [`distribution`]: finishing a contour, density evaluation, simulation.

pub mod contour;
pub mod cubature;
pub mod distribution;
mod error;
pub mod mesh;
pub mod quad;
pub mod radial;
pub mod sampler;

pub use contour::{ContourSpec, ContourTerm};
pub use cubature::{integrate_sphere, norming_constant, CubatureOptions, WeightedTessellation};
pub use distribution::{finish_contour, Diagnostics, FinishOptions, FinishedContour, GenSphereDist};
pub use error::{Error, Result};
pub use mesh::{unit_sphere_mesh, ExportFormat, SurfaceMesh, SurfaceSimplex};
pub use radial::RadialLaw;
pub use sampler::{AliasTable, TessellationSampler};
