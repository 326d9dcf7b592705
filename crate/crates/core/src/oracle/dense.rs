//! Dense non-Hermitian eigenproblems through the complex Schur form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub struct DenseEigen {
    q: DMatrix<Complex64>,
    t: DMatrix<Complex64>,
}

impl DenseEigen {
    pub fn new(mut a: DMatrix<Complex64>) -> Result<Self> {
        if a.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        let n = a.nrows();
        if n == 0 {
            return Ok(Self { q: a.clone(), t: a });
        }
        let ni = n as i32;
        let mut q = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut rwork = vec![0.0; n];
        let mut bwork = [0i32; 1];
        let (mut sdim, mut info) = (0, 0);
        let mut lwork = vec![Complex64::new(0.0, 0.0); 1];
        // workspace query, then the factorisation (column-major storage)
        for query in [true, false] {
            let len = if query { -1 } else { lwork.len() as i32 };
            unsafe {
                lapack::zgees(
                    b'V',
                    b'N',
                    None,
                    ni,
                    a.as_mut_slice(),
                    ni,
                    &mut sdim,
                    &mut w,
                    q.as_mut_slice(),
                    ni,
                    &mut lwork,
                    len,
                    &mut rwork,
                    &mut bwork,
                    &mut info,
                );
            }
            if info != 0 {
                return Err(Error::Convergence(format!(
                    "Schur factorisation of a {n}x{n} matrix failed (info = {info})"
                )));
            }
            if query {
                let size = (lwork[0].re as usize).max(2 * n);
                lwork = vec![Complex64::new(0.0, 0.0); size];
            }
        }
        Ok(Self { q, t: a })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|k| self.t[(k, k)]).collect()
    }

    /// Unit eigenvector for the `k`-th diagonal entry of the Schur form.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let t = &self.t;
        let lambda = t[(k, k)];
        let tiny = f64::EPSILON * t.norm().max(1.0);
        let mut y = DVector::from_element(t.nrows(), Complex64::new(0.0, 0.0));
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * y[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            y[j] = -s / d;
        }
        let x = &self.q * y;
        let norm = x.norm();
        x.iter().map(|z| z / norm).collect()
    }
}

/// All eigenvalues of a dense matrix given row by row.
pub fn eigenvalues(rows: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let n = rows.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(DenseEigen::new(a)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_and_rotation() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let rows = vec![
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ];
        let mut ev = eigenvalues(&rows).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let n = 12;
        let a = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let e = DenseEigen::new(a.clone()).unwrap();
        for (k, lambda) in e.eigenvalues().into_iter().enumerate() {
            let x = DVector::from_vec(e.eigenvector(k));
            let r = (&a * &x - x.map(|z| z * lambda)).norm();
            assert!(r < 1e-10, "k = {k}: {r}");
        }
    }
}
