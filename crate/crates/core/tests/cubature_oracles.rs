mod common;

use std::f64::consts::{PI, TAU};

use gensphere::cubature::{integrate_sphere_with, simplex_rule};
use gensphere::{integrate_sphere, unit_sphere_mesh, ContourSpec, ContourTerm, CubatureOptions, SurfaceMesh};

fn opts(rel_tol: f64) -> CubatureOptions {
    CubatureOptions { rel_tol, max_simplices: 200_000, deterministic: true }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn l1_ball_against_angular_oracle() {
    let spec = common::l1_ball();
    let tess = integrate_sphere(&spec, &unit_sphere_mesh(2, 4).unwrap(), opts(1e-5)).unwrap();
    let f = |t: f64| (t.cos().abs() + t.sin().abs()).powi(-2);
    let oracle: f64 = (0..4).map(|q| common::simpson(&f, q as f64 * PI / 2.0, (q + 1) as f64 * PI / 2.0, 1e-13)).sum();
    assert!((tess.total - oracle).abs() < 1e-3, "{} vs {oracle}", tess.total);
    assert!(rel(tess.total, 4.0) < 1e-6);
}

#[test]
fn bumped_circle_against_angular_oracle() {
    let spec = common::two_bump_contour();
    let tess = integrate_sphere(&spec, &unit_sphere_mesh(2, 4).unwrap(), opts(1e-7)).unwrap();
    let c = |t: f64| spec.eval(&[t.cos(), t.sin()]).unwrap().powi(2);
    let oracle = common::simpson(&c, 0.0, TAU, 1e-12);
    assert!(rel(tess.total, oracle) < 1e-6, "{} vs {oracle}", tess.total);
}

#[test]
fn ellipsoid_closed_form() {
    // integral of (s'As)^(-3/2) over S^2 is 4 pi / sqrt(det A)
    let a = vec![vec![2.0, 0.3, 0.0], vec![0.3, 1.0, -0.2], vec![0.0, -0.2, 0.5]];
    let det = 2.0 * (0.5 - 0.04) - 0.3 * (0.15);
    let spec = ContourSpec::new(3, vec![ContourTerm::Elliptical { coef: 1.0, a }]).unwrap();
    let tess = integrate_sphere(&spec, &unit_sphere_mesh(3, 2).unwrap(), opts(1e-5)).unwrap();
    let exact = 4.0 * PI / f64::sqrt(det);
    assert!(rel(tess.total, exact) < 1e-5, "{} vs {exact}", tess.total);
}

#[test]
fn scaling_law() {
    for d in [2usize, 3] {
        let k = if d == 2 { 4 } else { 2 };
        let mesh = unit_sphere_mesh(d, k).unwrap();
        let base = [ContourTerm::Constant { coef: 0.5 }, ContourTerm::LpNorm { coef: 1.0, p: 3.0 }];
        let reference = integrate_sphere(&ContourSpec::new(d, base.to_vec()).unwrap(), &mesh, opts(1e-5)).unwrap().total;
        for a in [0.5, 2.0, 3.0] {
            // the lp term enters reciprocally
            let scaled = vec![ContourTerm::Constant { coef: 0.5 * a }, ContourTerm::LpNorm { coef: 1.0 / a, p: 3.0 }];
            let total = integrate_sphere(&ContourSpec::new(d, scaled).unwrap(), &mesh, opts(1e-5)).unwrap().total;
            let expected = a.powi(d as i32) * reference;
            assert!(rel(total, expected) < 1e-6, "d={d} a={a}: {total} vs {expected}");
        }
    }
}

#[test]
fn refinement_is_monotone_for_circle_and_l1() {
    for (spec, exact) in [(ContourSpec::sphere(2).unwrap(), TAU), (common::l1_ball(), 4.0)] {
        let mesh = unit_sphere_mesh(2, 2).unwrap();
        let errors: Vec<f64> = [1e-3, 1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&t| (integrate_sphere(&spec, &mesh, opts(t)).unwrap().total - exact).abs())
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "{errors:?}");
        }
    }
}

#[test]
fn sphere_area_improves_with_tolerance() {
    let mesh = unit_sphere_mesh(3, 1).unwrap();
    let spec = ContourSpec::sphere(3).unwrap();
    let coarse = integrate_sphere(&spec, &mesh, opts(1e-2)).unwrap();
    let fine = integrate_sphere(&spec, &mesh, opts(1e-4)).unwrap();
    assert!((fine.total - 4.0 * PI).abs() <= (coarse.total - 4.0 * PI).abs());
    assert!(rel(fine.total, 4.0 * PI) < 1e-4);
}

#[test]
fn adaptive_weights_match_fine_uniform_grid_per_ancestor() {
    let rel_tol = 1e-4;
    let spec = ContourSpec::new(
        3,
        vec![
            ContourTerm::Constant { coef: 0.3 },
            ContourTerm::Elliptical { coef: 1.0, a: vec![vec![3.0, 0.5, 0.0], vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 0.4]] },
        ],
    )
    .unwrap();
    let mesh = unit_sphere_mesh(3, 1).unwrap();
    let tess = integrate_sphere(&spec, &mesh, opts(rel_tol)).unwrap();
    assert!(tess.tolerance_met);
    let phi = |s: &[f64]| spec.eval(s).map(|c| c.powi(3));
    for (i, s) in mesh.simplices().iter().enumerate() {
        let adaptive: f64 = tess.weights.iter().zip(&tess.ancestors).filter(|(_, a)| **a == i).map(|(w, _)| w).sum();
        let fine = SurfaceMesh::new(3, vec![s.clone()], None).unwrap().subdivided(5);
        let oracle: f64 = fine.simplices().iter().map(|c| simplex_rule(c, phi).unwrap().estimate).sum();
        assert!(rel(adaptive, oracle) < 10.0 * rel_tol, "ancestor {i}: {adaptive} vs {oracle}");
    }
}

#[test]
fn cubature_is_reproducible() {
    let spec = common::two_bump_contour();
    let mesh = unit_sphere_mesh(2, 3).unwrap();
    let a = integrate_sphere(&spec, &mesh, opts(1e-6)).unwrap();
    let b = integrate_sphere(&spec, &mesh, opts(1e-6)).unwrap();
    let c = integrate_sphere(&spec, &mesh, CubatureOptions { deterministic: false, ..opts(1e-6) }).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total.to_bits(), c.total.to_bits());
    assert_eq!(a.weights, c.weights);
}

#[test]
fn weights_are_nonnegative_and_sum_to_total() {
    let mesh = unit_sphere_mesh(3, 1).unwrap();
    let tess = integrate_sphere_with(|s| Ok(1.0 + s[0] * s[0]), &mesh, opts(1e-4)).unwrap();
    assert!(tess.weights.iter().all(|&w| w >= 0.0));
    let sum: f64 = tess.weights.iter().sum();
    assert!(rel(sum, tess.total) < 1e-12);
    // integral of 1 + x^2 over S^2 is 4 pi + 4 pi / 3
    assert!(rel(tess.total, 16.0 * PI / 3.0) < 1e-4);
}
