//! Benchmark fixtures shared by the criterion benches.

use std::f64::consts::FRAC_1_SQRT_2;

use gensphere::{ContourSpec, ContourTerm};

/// Unit circle with two Gaussian bumps of width 0.1.
pub fn two_bump_contour() -> ContourSpec {
    ContourSpec::new(
        2,
        vec![
            ContourTerm::Constant { coef: 1.0 },
            ContourTerm::GaussianBump { coef: 1.0, mu: vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], sigma: 0.1 },
            ContourTerm::GaussianBump { coef: 1.0, mu: vec![-1.0, 0.0], sigma: 0.1 },
        ],
    )
    .expect("valid contour")
}

/// An ellipsoid with ten cones on the coordinate and diagonal directions.
pub fn star3d() -> ContourSpec {
    let s = 1.0 / 3f64.sqrt();
    let dirs = [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [s, s, s],
        [-s, -s, s],
        [s, -s, -s],
        [-s, s, -s],
    ];
    let mut terms = vec![ContourTerm::Elliptical {
        coef: 1.0,
        a: vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 4.0]],
    }];
    terms.extend(dirs.iter().map(|mu| ContourTerm::Cone { coef: 0.6, mu: mu.to_vec(), theta: 0.4 }));
    ContourSpec::new(3, terms).expect("valid contour")
}
