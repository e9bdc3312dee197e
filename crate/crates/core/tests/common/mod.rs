#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use gensphere::{ContourSpec, ContourTerm};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Asymptotic Kolmogorov distribution tail with the Stephens small-sample
/// correction.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn chi2_sf(stat: f64, df: usize) -> f64 {
    1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat)
}

/// Pearson statistic and p-value over cells with expected count >= `min_expected`.
pub fn chi2_test(observed: &[f64], expected: &[f64], min_expected: f64, constrained_total: bool) -> (f64, usize, f64) {
    let mut stat = 0.0;
    let mut cells = 0;
    for (o, e) in observed.iter().zip(expected) {
        if *e >= min_expected {
            stat += (o - e) * (o - e) / e;
            cells += 1;
        }
    }
    let df = if constrained_total { cells - 1 } else { cells };
    (stat, df, chi2_sf(stat, df))
}

/// Adaptive Simpson quadrature, used as an independent 1D oracle.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

pub fn l1_ball() -> ContourSpec {
    ContourSpec::new(2, vec![ContourTerm::LpNorm { coef: 1.0, p: 1.0 }]).unwrap()
}

/// Unit circle base plus two Gaussian bumps of width 0.1.
pub fn two_bump_contour() -> ContourSpec {
    ContourSpec::new(
        2,
        vec![
            ContourTerm::Constant { coef: 1.0 },
            ContourTerm::GaussianBump { coef: 1.0, mu: vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], sigma: 0.1 },
            ContourTerm::GaussianBump { coef: 1.0, mu: vec![-1.0, 0.0], sigma: 0.1 },
        ],
    )
    .unwrap()
}

/// Fraction of a chord `a -> b` (uniform in the chord parameter) whose polar
/// angle falls into each of `sectors` equal sectors of `[0, 2 pi)`.
pub fn chord_sector_fractions(a: &[f64], b: &[f64], sectors: usize) -> Vec<f64> {
    use std::f64::consts::TAU;
    let width = TAU / sectors as f64;
    let angle = |p: [f64; 2]| p[1].atan2(p[0]).rem_euclid(TAU);
    let point = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let mut breaks = vec![0.0, 1.0];
    for k in 0..sectors {
        let phi = k as f64 * width;
        let (u0, u1) = (phi.cos(), phi.sin());
        let cross = |p: [f64; 2]| u0 * p[1] - u1 * p[0];
        let ca = cross([a[0], a[1]]);
        let cb = cross([b[0], b[1]]);
        if ca != cb {
            let t = ca / (ca - cb);
            // same side as u, not the opposite ray
            if t > 0.0 && t < 1.0 {
                let p = point(t);
                if p[0] * u0 + p[1] * u1 > 0.0 {
                    breaks.push(t);
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut out = vec![0.0; sectors];
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let mid = point(0.5 * (w[0] + w[1]));
            let k = ((angle(mid) / width) as usize).min(sectors - 1);
            out[k] += w[1] - w[0];
        }
    }
    out
}

pub fn sector_of(p: &[f64], sectors: usize) -> usize {
    use std::f64::consts::TAU;
    let a = p[1].atan2(p[0]).rem_euclid(TAU);
    ((a / (TAU / sectors as f64)) as usize).min(sectors - 1)
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
