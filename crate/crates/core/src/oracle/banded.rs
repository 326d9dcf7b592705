//! Complex band matrices and their LU factorisation with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    // row i holds columns i - kl ..= i + ku
    rows: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, rows: vec![Complex64::new(0.0, 0.0); n * (kl + ku + 1)] }
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            return None;
        }
        Some(i * self.width() + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j).map_or(Complex64::new(0.0, 0.0), |k| self.rows[k])
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.slot(i, j).expect("entry outside the band");
        self.rows[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.slot(i, j).expect("entry outside the band");
        self.rows[k] += v;
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let w = self.width();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi)
                    .map(|j| self.rows[i * w + (j + self.kl - i)] * x[j])
                    .sum()
            })
            .collect()
    }

    /// `A - σ I`.
    pub fn shifted(&self, sigma: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.add(i, i, -sigma);
        }
        out
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .chunks(self.width())
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense copy, for tests and small problems.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Factorises `A = P L U`.
    pub fn lu(&self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        // U rows gain up to kl extra super-diagonals from row exchanges
        let uw = 2 * kl + ku + 1;
        let mut u = vec![Complex64::new(0.0, 0.0); n * uw];
        // working row r stores columns r - kl ..= r + ku + kl
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                u[i * uw + (j + kl - i)] = self.get(i, j);
            }
        }
        let mut lower = vec![Complex64::new(0.0, 0.0); n * kl.max(1)];
        let mut piv = vec![0usize; n];
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let at = |r: usize, c: usize| r * uw + (c + kl - r);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = u[at(k, k)].norm();
            for r in k + 1..=last {
                let v = u[at(r, k)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if best <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::Convergence(format!(
                    "band matrix is numerically singular at column {k}"
                )));
            }
            let cmax = (k + kl + ku).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    u.swap(at(k, c), at(p, c));
                }
            }
            let pivot = u[at(k, k)];
            for r in k + 1..=last {
                let m = u[at(r, k)] / pivot;
                lower[k * kl + (r - k - 1)] = m;
                u[at(r, k)] = Complex64::new(0.0, 0.0);
                if m != Complex64::new(0.0, 0.0) {
                    for c in k + 1..=cmax {
                        let v = u[at(k, c)];
                        u[at(r, c)] -= m * v;
                    }
                }
            }
        }
        Ok(BandLu { n, kl, ku, u, lower, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    u: Vec<Complex64>,
    lower: Vec<Complex64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let uw = 2 * kl + ku + 1;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.lower[k * kl + (r - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let row = &self.u[k * uw..(k + 1) * uw];
            let mut s = b[k];
            for c in k + 1..=(k + kl + ku).min(n - 1) {
                s -= row[c + kl - k] * b[c];
            }
            b[k] = s / row[kl];
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // a small diagonal forces pivoting; without sub-diagonals it
                // would only make the triangular matrix ill-conditioned
                let scale = if i == j && kl > 0 { 0.01 } else { 1.0 };
                a.set(i, j, scale * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        a
    }

    #[test]
    fn solve_recovers_vector() {
        for (kl, ku, seed) in [(2, 2, 1), (1, 3, 2), (3, 1, 3), (0, 2, 4)] {
            let a = random_band(40, kl, ku, seed);
            let x: Vec<_> = (0..40).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
            let b = a.matvec(&x);
            let y = a.lu().unwrap().solve(&b);
            let err = x.iter().zip(&y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            assert!(err < 1e-9, "kl={kl} ku={ku}: {err}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = BandMatrix::zeros(5, 1, 1);
        assert!(a.lu().is_err());
    }
}
