//! Simulation from weighted tessellations and from generalized spherical laws.
//!
//! Random stream layout, per generated point:
//!
//! 1. simplex selection: one `usize` column draw, then one `f64` coin;
//! 2. `m` standard exponentials, `m` the vertex count of the simplex;
//! 3. (distributions only) the radial variate.
//!
//! Any `rand::Rng` works; the CLI seeds a `ChaCha8Rng` from a `u64`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::distribution::GenSphereDist;
use crate::error::{invalid, Result};

/// Walker/Vose alias table over `0..k` with probabilities proportional to
/// the given weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AliasTable {
    threshold: Vec<f64>,
    alias: Vec<usize>,
    probabilities: Vec<f64>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return invalid("no weights given");
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return invalid(format!("weight {i} is {w}; weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return invalid("weights sum to zero");
        }
        let k = weights.len();
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut scaled: Vec<f64> = probabilities.iter().map(|p| p * k as f64).collect();
        let mut threshold = vec![1.0; k];
        let mut alias: Vec<usize> = (0..k).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..k).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            threshold[s] = scaled[s];
            alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // leftovers are 1 up to rounding
        for i in small.into_iter().chain(large) {
            threshold[i] = 1.0;
            alias[i] = i;
        }
        Ok(AliasTable { threshold, alias, probabilities })
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    /// Target probability `w_j / sum w`.
    pub fn probability(&self, j: usize) -> f64 {
        self.probabilities[j]
    }

    /// Selection probability of `j` implied by the table itself.
    pub fn implied_probability(&self, j: usize) -> f64 {
        let k = self.len() as f64;
        let own = self.threshold[j];
        let borrowed: f64 = (0..self.len())
            .filter(|&i| self.alias[i] == j && i != j)
            .map(|i| 1.0 - self.threshold[i])
            .sum();
        (own + borrowed) / k
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.len());
        let u: f64 = rng.random();
        if u < self.threshold[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// A uniform draw from the standard simplex: `(E_1, ..., E_m) / sum E_i`
/// with i.i.d. standard exponentials, i.e. Dirichlet(1, ..., 1).
pub fn sample_unit_simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
        let sum: f64 = e.iter().sum();
        if sum > 0.0 {
            return e.into_iter().map(|x: f64| x / sum).collect();
        }
    }
}

fn barycentric_point(vertices: &[Vec<f64>], u: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; vertices[0].len()];
    for (v, ui) in vertices.iter().zip(u) {
        for (xk, vk) in x.iter_mut().zip(v) {
            *xk += ui * vk;
        }
    }
    x
}

/// Samples points on a union of simplices, choosing simplex `j` with
/// probability proportional to its weight and placing the point uniformly
/// on the flat simplex.
#[derive(Clone, Debug)]
pub struct TessellationSampler {
    simplices: Vec<Vec<Vec<f64>>>,
    table: AliasTable,
}

impl TessellationSampler {
    pub fn new<S: AsRef<[Vec<f64>]>>(simplices: &[S], weights: &[f64]) -> Result<Self> {
        if simplices.len() != weights.len() {
            return invalid(format!("{} simplices but {} weights", simplices.len(), weights.len()));
        }
        let simplices: Vec<Vec<Vec<f64>>> = simplices.iter().map(|s| s.as_ref().to_vec()).collect();
        if let Some(first) = simplices.first() {
            if first.is_empty() {
                return invalid("simplices need at least one vertex");
            }
            let dim = first[0].len();
            if simplices.iter().flatten().any(|v| v.len() != dim) {
                return invalid("all vertices must share one dimension");
            }
        }
        let table = AliasTable::new(weights)?;
        Ok(TessellationSampler { simplices, table })
    }

    pub fn table(&self) -> &AliasTable {
        &self.table
    }

    /// One point together with the index of its source simplex and the
    /// barycentric coordinates used.
    pub fn sample_detailed<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>, Vec<f64>) {
        let j = self.table.sample(rng);
        let vertices = &self.simplices[j];
        let u = sample_unit_simplex(vertices.len(), rng);
        let x = barycentric_point(vertices, &u);
        (j, u, x)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_detailed(rng).2
    }
}

/// `n` independent points from the weighted tessellation.
pub fn sample_tessellation<S, R>(simplices: &[S], weights: &[f64], n: usize, rng: &mut R) -> Result<Vec<Vec<f64>>>
where
    S: AsRef<[Vec<f64>]>,
    R: Rng + ?Sized,
{
    let sampler = TessellationSampler::new(simplices, weights)?;
    Ok((0..n).map(|_| sampler.sample(rng)).collect())
}

/// `n` draws of `X = R Z`: `Z` from the contour tessellation with cubature
/// weights, `R` from the radial law. `n = 0` consumes no randomness.
pub fn sample_gensphere<R: Rng + ?Sized>(dist: &GenSphereDist, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let sampler = dist.contour().sampler();
    let law = dist.radial();
    (0..n)
        .map(|_| {
            let mut z = sampler.sample(rng);
            let r = law.sample(rng);
            z.iter_mut().for_each(|zi| *zi *= r);
            z
        })
        .collect()
}
