//! Second-order finite differences on uniform samples.

use num_complex::Complex64;

/// First derivative: centered in the interior, one-sided second order at the ends.
pub fn first_derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    assert!(n >= 3, "need at least three samples");
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Second derivative: centered in the interior, one-sided second order at the ends.
pub fn second_derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    assert!(n >= 4, "need at least four samples");
    let h2 = h * h;
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let h = 0.1;
        let f: Vec<Complex64> = (0..10)
            .map(|i| {
                let x = i as f64 * h;
                Complex64::new(x * x, -3.0 * x)
            })
            .collect();
        let d1 = first_derivative(&f, h);
        let d2 = second_derivative(&f, h);
        for i in 0..10 {
            let x = i as f64 * h;
            assert!((d1[i] - Complex64::new(2.0 * x, -3.0)).norm() < 1e-12);
            assert!((d2[i] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
        }
    }
}
