//! Adaptive integration of `c(s)^d` over the unit sphere.
//!
//! Each flat simplex `T` of a sphere mesh stands for its radial projection
//! onto the sphere. For `T` in the hyperplane `{x : n.x = h}`, central
//! projection gives
//!
//! ```text
//! integral over proj(T) of phi(s) ds = integral over T of phi(x/|x|) h |x|^(-d) dA(x)
//! ```
//!
//! so the integral is evaluated with an ordinary simplex rule on `T`. The
//! adaptive driver keeps a priority queue keyed by the per-simplex error
//! estimate and bisects the worst simplex along its longest edge, with the
//! midpoint pushed back onto the sphere, until the summed error falls below
//! `rel_tol` times the summed estimate or the simplex budget is spent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::ContourSpec;
use crate::error::{invalid, Error, Result};
use crate::mesh::{bisect_longest_edge, norm, SurfaceMesh, SurfaceSimplex};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubatureOptions {
    pub rel_tol: f64,
    pub max_simplices: usize,
    /// Evaluate the initial mesh sequentially. The reduction order is fixed
    /// either way.
    pub deterministic: bool,
}

impl Default for CubatureOptions {
    fn default() -> Self {
        CubatureOptions { rel_tol: 1e-5, max_simplices: 50_000, deterministic: true }
    }
}

/// Estimate and error proxy of one simplex rule application.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleEstimate {
    pub estimate: f64,
    pub error: f64,
    pub degenerate: bool,
}

/// A sphere tessellation with per-simplex integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTessellation {
    pub dim: usize,
    pub simplices: Vec<SurfaceSimplex>,
    pub weights: Vec<f64>,
    /// Index of the input-mesh simplex each final simplex descends from.
    pub ancestors: Vec<usize>,
    pub total: f64,
    pub abs_error: f64,
    pub tolerance_met: bool,
    pub degenerate_dropped: usize,
}

impl WeightedTessellation {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Degree-2 interior rule on a `(d-1)`-simplex (Stroud T_n:2-1, `n + 1`
/// points, equal weights) against the centroid rule; the error proxy is the
/// difference of the two.
pub fn simplex_rule<F>(simplex: &SurfaceSimplex, phi: F) -> Result<RuleEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = simplex.dim();
    if simplex.is_degenerate() {
        return Ok(RuleEstimate { estimate: 0.0, error: 0.0, degenerate: true });
    }
    let Some((_, h)) = simplex.hyperplane() else {
        return Ok(RuleEstimate { estimate: 0.0, error: 0.0, degenerate: true });
    };
    let volume = simplex.volume();
    let integrand = |x: &[f64]| -> Result<f64> {
        let r = norm(x);
        let s: Vec<f64> = x.iter().map(|xi| xi / r).collect();
        Ok(phi(&s)? * h / r.powi(d as i32))
    };

    let n = (d - 1) as f64;
    let b = (n + 2.0 - (n + 2.0).sqrt()) / ((n + 1.0) * (n + 2.0));
    let a = 1.0 - n * b;
    let vertices = simplex.vertices();
    let mut sum = vec![0.0; d];
    for v in vertices {
        for (si, vi) in sum.iter_mut().zip(v) {
            *si += vi;
        }
    }
    let mut point = vec![0.0; d];
    let mut degree2 = 0.0;
    for v in vertices {
        for k in 0..d {
            point[k] = (a - b) * v[k] + b * sum[k];
        }
        degree2 += integrand(&point)?;
    }
    degree2 *= volume / d as f64;
    let centroid: Vec<f64> = sum.iter().map(|x| x / d as f64).collect();
    let degree1 = volume * integrand(&centroid)?;
    Ok(RuleEstimate { estimate: degree2, error: (degree2 - degree1).abs(), degenerate: false })
}

#[derive(Clone)]
struct Cell {
    simplex: SurfaceSimplex,
    estimate: f64,
    error: f64,
    ancestor: usize,
}

struct Entry {
    error: f64,
    seq: u64,
    slot: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // largest error first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.seq.cmp(&self.seq))
    }
}

/// Adaptively integrates an arbitrary direction function `phi` over the sphere
/// covered by `mesh`.
pub fn integrate_sphere_with<F>(phi: F, mesh: &SurfaceMesh, opts: CubatureOptions) -> Result<WeightedTessellation>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) {
        return invalid(format!("rel_tol must lie in (0, 1), got {}", opts.rel_tol));
    }
    if opts.max_simplices < mesh.len() {
        return invalid(format!(
            "max_simplices ({}) is below the initial simplex count ({})",
            opts.max_simplices,
            mesh.len()
        ));
    }
    let d = mesh.dim();
    let initial: Vec<Result<RuleEstimate>> = if opts.deterministic {
        mesh.simplices().iter().map(|s| simplex_rule(s, &phi)).collect()
    } else {
        mesh.simplices().par_iter().map(|s| simplex_rule(s, &phi)).collect()
    };

    let mut dropped = 0;
    let mut cells: Vec<Option<Cell>> = Vec::with_capacity(opts.max_simplices.min(1 << 20));
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (i, (s, r)) in mesh.simplices().iter().zip(initial).enumerate() {
        let r = r?;
        if r.degenerate {
            dropped += 1;
            continue;
        }
        heap.push(Entry { error: r.error, seq, slot: cells.len() });
        seq += 1;
        cells.push(Some(Cell { simplex: s.clone(), estimate: r.estimate, error: r.error, ancestor: i }));
    }
    if cells.is_empty() {
        return Err(Error::DegenerateGeometry("every mesh simplex is degenerate".into()));
    }

    let mut live = cells.len();
    let exact_sums = |cells: &[Option<Cell>]| -> (f64, f64) {
        cells.iter().flatten().fold((0.0, 0.0), |(e, r), c| (e + c.estimate, r + c.error))
    };
    let (mut est_sum, mut err_sum) = exact_sums(&cells);
    let mut splits = 0u64;
    let tolerance_met = loop {
        if err_sum <= opts.rel_tol * est_sum.abs() {
            (est_sum, err_sum) = exact_sums(&cells);
            if err_sum <= opts.rel_tol * est_sum.abs() {
                break true;
            }
        }
        if live >= opts.max_simplices {
            break false;
        }
        let Some(entry) = heap.pop() else { break false };
        let cell = cells[entry.slot].take().expect("heap entry points at a live cell");
        live -= 1;
        est_sum -= cell.estimate;
        err_sum -= cell.error;

        let children = match bisect_longest_edge(&cell.simplex) {
            Some(pair) => pair.to_vec(),
            None => Vec::new(),
        };
        let mut reused = false;
        for child in children {
            let r = simplex_rule(&child, &phi)?;
            if r.degenerate {
                dropped += 1;
                continue;
            }
            let slot = if reused {
                cells.push(None);
                cells.len() - 1
            } else {
                reused = true;
                entry.slot
            };
            cells[slot] = Some(Cell { simplex: child, estimate: r.estimate, error: r.error, ancestor: cell.ancestor });
            heap.push(Entry { error: r.error, seq, slot });
            seq += 1;
            live += 1;
            est_sum += r.estimate;
            err_sum += r.error;
        }
        splits += 1;
        if splits.is_multiple_of(256) {
            (est_sum, err_sum) = exact_sums(&cells);
        }
    };

    let mut simplices = Vec::with_capacity(live);
    let mut weights = Vec::with_capacity(live);
    let mut ancestors = Vec::with_capacity(live);
    let mut abs_error = 0.0;
    for cell in cells.into_iter().flatten() {
        simplices.push(cell.simplex);
        weights.push(cell.estimate);
        ancestors.push(cell.ancestor);
        abs_error += cell.error;
    }
    let total = weights.iter().sum();
    Ok(WeightedTessellation {
        dim: d,
        simplices,
        weights,
        ancestors,
        total,
        abs_error,
        tolerance_met,
        degenerate_dropped: dropped + mesh.degenerate_dropped(),
    })
}

/// Integrates `c(s)^d` over the sphere; `total` is `1 / k_C`.
pub fn integrate_sphere(spec: &ContourSpec, mesh: &SurfaceMesh, opts: CubatureOptions) -> Result<WeightedTessellation> {
    if spec.dim() != mesh.dim() {
        return invalid(format!("contour dimension {} does not match mesh dimension {}", spec.dim(), mesh.dim()));
    }
    let d = spec.dim() as i32;
    let tess = integrate_sphere_with(|s| Ok(spec.eval(s)?.powi(d)), mesh, opts)?;
    if !(tess.total > 0.0) {
        return Err(Error::DegenerateContour("the contour integrates to zero".into()));
    }
    Ok(tess)
}

/// `k_C = 1 / total`.
pub fn norming_constant(tess: &WeightedTessellation) -> Result<f64> {
    if !(tess.total > 0.0 && tess.total.is_finite()) {
        return Err(Error::DegenerateContour(format!("tessellation total is {}", tess.total)));
    }
    Ok(1.0 / tess.total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::ContourTerm;
    use crate::mesh::unit_sphere_mesh;
    use std::f64::consts::PI;

    fn one(_: &[f64]) -> Result<f64> {
        Ok(1.0)
    }

    #[test]
    fn circle_total() {
        let spec = ContourSpec::sphere(2).unwrap();
        let t = integrate_sphere(&spec, &unit_sphere_mesh(2, 2).unwrap(), CubatureOptions::default()).unwrap();
        assert!((t.total - 2.0 * PI).abs() < 1e-6, "{}", t.total);
        assert!(t.tolerance_met);
        assert!((norming_constant(&t).unwrap() - 0.159_154_94).abs() < 1e-8);
    }

    #[test]
    fn sphere_total() {
        let spec = ContourSpec::sphere(3).unwrap();
        let t = integrate_sphere(&spec, &unit_sphere_mesh(3, 2).unwrap(), CubatureOptions::default()).unwrap();
        assert!((t.total - 4.0 * PI).abs() < 1e-4, "{}", t.total);
    }

    #[test]
    fn quarter_arc_converges() {
        let chord = SurfaceSimplex::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mesh = SurfaceMesh::new(2, vec![chord.clone()], None).unwrap();
        let coarse = simplex_rule(&chord, one).unwrap();
        let fine = integrate_sphere_with(one, &mesh, CubatureOptions { rel_tol: 1e-9, ..Default::default() }).unwrap();
        assert!((fine.total - PI / 2.0).abs() < 1e-9);
        assert!((coarse.estimate - PI / 2.0).abs() > (fine.total - PI / 2.0).abs());
    }

    #[test]
    fn centroid_bump_triggers_split() {
        let tri = SurfaceSimplex::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let c = 1.0 / 3f64.sqrt();
        let bump = |s: &[f64]| Ok((-((s[0] - c).powi(2) + (s[1] - c).powi(2) + (s[2] - c).powi(2)) / 0.002).exp());
        let r = simplex_rule(&tri, bump).unwrap();
        assert!(r.error > 1e-5 * r.estimate);
        let mesh = SurfaceMesh::new(3, vec![tri], None).unwrap();
        let t = integrate_sphere_with(bump, &mesh, CubatureOptions::default()).unwrap();
        assert!(t.len() > 1);
    }

    #[test]
    fn zero_region_weights_are_exact_zeros() {
        // cone supported on a cap around e1; simplices far away carry 0
        let spec = ContourSpec::new(2, vec![ContourTerm::Cone { coef: 1.0, mu: vec![1.0, 0.0], theta: 0.5 }]).unwrap();
        let t = integrate_sphere(&spec, &unit_sphere_mesh(2, 3).unwrap(), CubatureOptions::default()).unwrap();
        let mut zeros = 0;
        for (s, w) in t.simplices.iter().zip(&t.weights) {
            if s.vertices().iter().all(|v| v[0] < 0.5f64.cos() - 1e-9) {
                assert_eq!(*w, 0.0);
                zeros += 1;
            }
        }
        assert!(zeros > 0);
    }

    #[test]
    fn scaled_constant() {
        let spec = ContourSpec::new(2, vec![ContourTerm::Constant { coef: 2.0 }]).unwrap();
        let t = integrate_sphere(&spec, &unit_sphere_mesh(2, 2).unwrap(), CubatureOptions::default()).unwrap();
        assert!((norming_constant(&t).unwrap() - 1.0 / (8.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn zero_contour_is_degenerate() {
        // the cone's support lies outside the only patch being integrated
        let dead = ContourSpec::new(2, vec![ContourTerm::Cone { coef: 1.0, mu: vec![0.0, 1.0], theta: 0.1 }]).unwrap();
        let quadrant = SurfaceSimplex::new(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let mesh = SurfaceMesh::new(2, vec![quadrant], None).unwrap();
        assert!(matches!(integrate_sphere(&dead, &mesh, CubatureOptions::default()), Err(Error::DegenerateContour(_))));
    }

    #[test]
    fn budget_flag() {
        let spec = ContourSpec::new(3, vec![ContourTerm::LpNorm { coef: 1.0, p: 0.5 }]).unwrap();
        let opts = CubatureOptions { rel_tol: 1e-9, max_simplices: 100, deterministic: true };
        let t = integrate_sphere(&spec, &unit_sphere_mesh(3, 1).unwrap(), opts).unwrap();
        assert!(!t.tolerance_met);
        assert!(t.len() <= 100);
        let too_small = CubatureOptions { max_simplices: 10, ..opts };
        assert!(integrate_sphere(&spec, &unit_sphere_mesh(3, 1).unwrap(), too_small).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let spec = ContourSpec::new(3, vec![ContourTerm::LpNorm { coef: 1.0, p: 3.0 }]).unwrap();
        let mesh = unit_sphere_mesh(3, 2).unwrap();
        let a = integrate_sphere(&spec, &mesh, CubatureOptions::default()).unwrap();
        let b = integrate_sphere(&spec, &mesh, CubatureOptions { deterministic: false, ..Default::default() }).unwrap();
        assert_eq!(a, b);
    }
}
