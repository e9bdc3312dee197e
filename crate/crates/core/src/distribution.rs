//! Finished contours and generalized spherical distributions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contour::ContourSpec;
use crate::cubature::{integrate_sphere, norming_constant, CubatureOptions, WeightedTessellation};
use crate::error::{invalid, Error, Result};
use crate::mesh::{dot, norm, refine_at_point, unit_sphere_mesh, SurfaceSimplex};
use crate::radial::{radial_g, RadialLaw};
use crate::sampler::{sample_gensphere, TessellationSampler};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinishOptions {
    /// Recursive subdivisions per orthant of the starting sphere mesh.
    pub k: u32,
    pub rel_tol: f64,
    pub max_simplices: usize,
    pub deterministic: bool,
}

impl Default for FinishOptions {
    fn default() -> Self {
        FinishOptions { k: 4, rel_tol: 1e-5, max_simplices: 50_000, deterministic: true }
    }
}

/// Simplex counts after each pipeline stage, plus cubature diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub initial: usize,
    pub after_refinement: usize,
    pub after_cubature: usize,
    pub degenerate_dropped: usize,
    pub tolerance_met: bool,
    pub abs_error: f64,
}

/// Points added around a bump: the center and `2(d-1)` points at geodesic
/// distance `radius` along `±` an orthonormal basis of the tangent space.
pub fn bump_refinement_points(mu: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let d = mu.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for i in 0..d {
        if basis.len() == d - 1 {
            break;
        }
        let mut t = vec![0.0; d];
        t[i] = 1.0;
        for b in std::iter::once(mu).chain(basis.iter().map(Vec::as_slice)) {
            let proj = dot(&t, b);
            t.iter_mut().zip(b).for_each(|(ti, bi)| *ti -= proj * bi);
        }
        let n = norm(&t);
        if n > 1e-6 {
            basis.push(t.into_iter().map(|x| x / n).collect());
        }
    }
    let (sin, cos) = radius.sin_cos();
    let mut points = vec![mu.to_vec()];
    for t in &basis {
        for sign in [1.0, -1.0] {
            let p: Vec<f64> = mu.iter().zip(t).map(|(m, ti)| cos * m + sign * sin * ti).collect();
            let n = norm(&p);
            points.push(p.into_iter().map(|x| x / n).collect());
        }
    }
    points
}

/// A contour after tessellation, refinement and cubature.
#[derive(Clone, Debug)]
pub struct FinishedContour {
    spec: ContourSpec,
    sphere_tess: WeightedTessellation,
    tess: WeightedTessellation,
    k_c: f64,
    diagnostics: Diagnostics,
    sampler: TessellationSampler,
}

impl FinishedContour {
    /// Assembles a finished contour from its sphere tessellation: computes
    /// `k_C`, maps every vertex `s` to `c(s) s` and builds the sampler.
    pub fn from_parts(spec: ContourSpec, sphere_tess: WeightedTessellation, diagnostics: Diagnostics) -> Result<Self> {
        if sphere_tess.dim != spec.dim() {
            return invalid("tessellation and contour dimensions differ");
        }
        if sphere_tess.weights.len() != sphere_tess.simplices.len() {
            return invalid("weight count does not match simplex count");
        }
        let k_c = norming_constant(&sphere_tess)?;
        let simplices = sphere_tess
            .simplices
            .iter()
            .map(|s| {
                let vertices = s
                    .vertices()
                    .iter()
                    .map(|v| {
                        let c = spec.eval(v)?;
                        Ok(v.iter().map(|x| c * x).collect())
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                SurfaceSimplex::new(vertices)
            })
            .collect::<Result<Vec<_>>>()?;
        let tess = WeightedTessellation { simplices, ..sphere_tess.clone() };
        let sampler = TessellationSampler::new(&tess.simplices, &tess.weights)
            .map_err(|e| Error::DegenerateContour(e.to_string()))?;
        Ok(FinishedContour { spec, sphere_tess, tess, k_c, diagnostics, sampler })
    }

    pub fn spec(&self) -> &ContourSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Tessellation of the contour itself (vertices `c(s) s`).
    pub fn tessellation(&self) -> &WeightedTessellation {
        &self.tess
    }

    /// The same tessellation with vertices on the unit sphere.
    pub fn sphere_tessellation(&self) -> &WeightedTessellation {
        &self.sphere_tess
    }

    pub fn weights(&self) -> &[f64] {
        &self.tess.weights
    }

    pub fn k_c(&self) -> f64 {
        self.k_c
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn sampler(&self) -> &TessellationSampler {
        &self.sampler
    }
}

/// Runs the full pipeline: sphere mesh, refinement at every bump center
/// (with a ring at the bump's angular scale), adaptive cubature of `c^d`,
/// and the mapping of the mesh onto the contour.
pub fn finish_contour(spec: &ContourSpec, opts: FinishOptions) -> Result<FinishedContour> {
    let mut mesh = unit_sphere_mesh(spec.dim(), opts.k)?;
    let initial = mesh.len();
    for (mu, scale) in spec.bump_centers() {
        for p in bump_refinement_points(&mu, scale) {
            mesh = refine_at_point(&mesh, &p)?;
        }
    }
    let after_refinement = mesh.len();
    let cub = CubatureOptions {
        rel_tol: opts.rel_tol,
        max_simplices: opts.max_simplices.max(after_refinement),
        deterministic: opts.deterministic,
    };
    let tess = integrate_sphere(spec, &mesh, cub)?;
    let diagnostics = Diagnostics {
        initial,
        after_refinement,
        after_cubature: tess.len(),
        degenerate_dropped: tess.degenerate_dropped,
        tolerance_met: tess.tolerance_met,
        abs_error: tess.abs_error,
    };
    FinishedContour::from_parts(spec.clone(), tess, diagnostics)
}

/// A finished contour paired with a radial law.
#[derive(Clone, Debug)]
pub struct GenSphereDist {
    contour: FinishedContour,
    radial: RadialLaw,
    g0_override: Option<f64>,
}

impl GenSphereDist {
    pub fn new(contour: FinishedContour, radial: RadialLaw) -> Result<Self> {
        radial.validate()?;
        Ok(GenSphereDist { contour, radial, g0_override: None })
    }

    /// Replaces the density value at the origin, `g(0)`, outright.
    pub fn with_g0_override(mut self, g0: f64) -> Result<Self> {
        if !(g0 >= 0.0) {
            return invalid(format!("g0 override must be nonnegative, got {g0}"));
        }
        self.g0_override = Some(g0);
        Ok(self)
    }

    pub fn contour(&self) -> &FinishedContour {
        &self.contour
    }

    pub fn radial(&self) -> &RadialLaw {
        &self.radial
    }

    pub fn g0_override(&self) -> Option<f64> {
        self.g0_override
    }

    pub fn dim(&self) -> usize {
        self.contour.dim()
    }

    /// `f(x) = g(|x| / c(x/|x|))`, with `c` evaluated exactly from the spec;
    /// `f(0) = g(0)` may be `+inf`. Directions with `c = 0` have density 0.
    pub fn density_at(&self, x: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d {
            return invalid(format!("point has dimension {}, distribution has {d}", x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid(format!("point {x:?} is not finite"));
        }
        let r = norm(x);
        if r == 0.0 {
            return match self.g0_override {
                Some(g0) => Ok(g0),
                None => radial_g(&self.radial, self.contour.k_c, d, 0.0),
            };
        }
        let s: Vec<f64> = x.iter().map(|v| v / r).collect();
        let c = self.contour.spec.eval(&s)?;
        if c == 0.0 {
            return Ok(0.0);
        }
        radial_g(&self.radial, self.contour.k_c, d, r / c)
    }

    /// The gauge `v(x) = |x| / c(x/|x|)`; `+inf` where `c = 0`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        let s: Vec<f64> = x.iter().map(|v| v / r).collect();
        let c = self.contour.spec.eval(&s)?;
        Ok(if c == 0.0 { f64::INFINITY } else { r / c })
    }

    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        sample_gensphere(self, n, rng)
    }
}
