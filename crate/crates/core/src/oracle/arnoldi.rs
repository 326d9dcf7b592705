//! Arnoldi iteration for a linear operator given as a closure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::DenseEigen;
use crate::error::Result;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Ritz value `θ` with its unit Ritz vector.
pub struct RitzPair {
    pub theta: Complex64,
    pub vector: Vec<Complex64>,
}

/// Runs `m` Arnoldi steps from a seeded random start and returns all Ritz pairs.
pub fn ritz_pairs(
    mut op: impl FnMut(&[Complex64]) -> Vec<Complex64>,
    dim: usize,
    m: usize,
    seed: u64,
) -> Result<Vec<RitzPair>> {
    let m = m.min(dim).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v0: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|z| *z /= n0);
    let mut basis = vec![v0];
    let mut h = DMatrix::from_element(m + 1, m, Complex64::new(0.0, 0.0));
    let mut steps = m;
    for j in 0..m {
        let mut w = op(&basis[j]);
        let wn0 = norm(&w);
        // two Gram-Schmidt passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                h[(i, j)] += c;
                w.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
            }
        }
        let wn = norm(&w);
        h[(j + 1, j)] = Complex64::new(wn, 0.0);
        if wn <= 1e-14 * wn0.max(1e-300) {
            steps = j + 1;
            break;
        }
        w.iter_mut().for_each(|z| *z /= wn);
        basis.push(w);
    }
    let hm = h.view((0, 0), (steps, steps)).into_owned();
    let eig = DenseEigen::new(hm)?;
    let mut out = Vec::with_capacity(steps);
    for (k, theta) in eig.eigenvalues().into_iter().enumerate() {
        let y = eig.eigenvector(k);
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for (coef, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += coef * b);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|z| *z /= nx);
        out.push(RitzPair { theta, vector: x });
    }
    Ok(out)
}
