//! Hermite and Jacobi polynomials, modified Bessel `K0`/`K1` and Tricomi's
//! confluent hypergeometric `U` for real arguments.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Highest polynomial degree accepted by [`jacobi`].
pub const MAX_DEGREE: usize = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// A polynomial value with its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub degree: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub value: f64,
    pub derivative: f64,
}

/// Physicists' Hermite polynomial `H_n(u)` and `H_n'(u) = 2n H_{n-1}(u)`.
pub fn hermite(n: usize, u: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    (cur, 2.0 * n as f64 * prev)
}

/// `H_0(u), ..., H_n(u)`.
pub fn hermite_all(n: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n > 0 {
        out.push(2.0 * u);
    }
    for k in 1..n {
        let next = 2.0 * u * out[k] - 2.0 * k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

fn jacobi_value(n: usize, a: f64, b: f64, z: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * z;
    for k in 1..n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let denom = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Parameter(format!(
                "Jacobi recurrence degenerates at degree {} (2(k+1)(k+a+b+1)(2k+a+b) = 0 with a = {a}, b = {b})",
                k + 1.0
            )));
        }
        let next = ((s + 1.0) * ((s + 2.0) * s * z + a * a - b * b) * cur
            - 2.0 * (k + a) * (k + b) * (s + 2.0) * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Jacobi polynomial `P_n^{(a,b)}(z)` and its derivative
/// `((n + a + b + 1)/2) P_{n-1}^{(a+1,b+1)}(z)`.
pub fn jacobi(n: usize, a: f64, b: f64, z: f64) -> Result<PolyEval> {
    if n > MAX_DEGREE {
        return Err(Error::Parameter(format!("degree {n} exceeds {MAX_DEGREE}")));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::NonFinite("Jacobi arguments".into()));
    }
    let value = jacobi_value(n, a, b, z)?;
    let derivative = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + a + b + 1.0) * jacobi_value(n - 1, a + 1.0, b + 1.0, z)?
    };
    Ok(PolyEval { degree: n, alpha: Some(a), beta: Some(b), value, derivative })
}

fn k_series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let l = (0.5 * z).ln();
    // K0: -(ln(z/2) + γ) I0 + Σ q^k H_k/(k!)²
    let mut t0 = 1.0; // q^k/(k!)²
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    // K1: 1/z + ln(z/2) I1 - (z/4) Σ [ψ(k+1) + ψ(k+2)] q^k/(k!(k+1)!)
    let mut t1 = 1.0; // q^k/(k!(k+1)!)
    let mut i1 = 1.0;
    let mut s1 = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..60 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += t0;
        s0 += t0 * harmonic;
        t1 *= q / (kf * (kf + 1.0));
        i1 += t1;
        let psi_sum = 2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0);
        s1 += t1 * psi_sum;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + l * 0.5 * z * i1 - 0.25 * z * s1;
    (k0, k1)
}

// Steed's continued fraction for K_ν with ν = 0, valid for z ≳ 2.
fn k_continued_fraction(z: f64) -> Result<(f64, f64)> {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            let k0 = (PI / (2.0 * z)).sqrt() * (-z).exp() / s;
            let k1 = k0 * (z + 0.5 - a1 * h) / z;
            return Ok((k0, k1));
        }
    }
    Err(Error::Convergence(format!("Bessel K continued fraction at z = {z}")))
}

fn k_asymptotic(order: u32, z: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

/// `(K0(z), K1(z))`: ascending series below 2, Steed's continued fraction up
/// to 25, Hankel's asymptotic expansion beyond.
pub fn bessel_k01(z: f64) -> Result<(f64, f64)> {
    if !z.is_finite() {
        return Err(Error::NonFinite("Bessel K argument".into()));
    }
    if z <= 0.0 {
        return Err(Error::Domain(format!("K_ν(z) needs z > 0, got {z}")));
    }
    if z <= SERIES_LIMIT {
        Ok(k_series(z))
    } else if z < ASYMPTOTIC_LIMIT {
        k_continued_fraction(z)
    } else {
        Ok((k_asymptotic(0, z), k_asymptotic(1, z)))
    }
}

/// Modified Bessel function of the second kind, order 0 or 1.
pub fn bessel_k(order: u32, z: f64) -> Result<f64> {
    let (k0, k1) = bessel_k01(z)?;
    match order {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => Err(Error::Parameter(format!("Bessel K order {order} is not supported"))),
    }
}

/// Both neighbouring branches of [`bessel_k01`] at one argument, for seam checks.
pub fn bessel_k_branches(z: f64) -> Result<[(f64, f64); 3]> {
    if z <= 0.0 {
        return Err(Error::Domain(format!("K_ν(z) needs z > 0, got {z}")));
    }
    Ok([
        k_series(z),
        k_continued_fraction(z)?,
        (k_asymptotic(0, z), k_asymptotic(1, z)),
    ])
}

/// Tricomi's `U(a, b, z)` for `a > 0`, `z > 0` from its Laplace integral.
pub fn confluent_u(a: f64, b: f64, z: f64) -> Result<f64> {
    confluent_u_tol(a, b, z, 1e-13)
}

/// [`confluent_u`] with an explicit relative quadrature tolerance.
pub fn confluent_u_tol(a: f64, b: f64, z: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::NonFinite("confluent U arguments".into()));
    }
    if a <= 0.0 {
        return Err(Error::Domain(format!("U(a, b, z) needs a > 0, got a = {a}")));
    }
    if z <= 0.0 {
        return Err(Error::Domain(format!("U(a, b, z) needs z > 0, got z = {z}")));
    }
    // t = s^{1/a} absorbs the t^{a-1} endpoint singularity:
    // U = Γ(a+1)^{-1} ∫₀^∞ exp(-z s^{1/a}) (1 + s^{1/a})^{b-a-1} ds
    let p = 1.0 / a;
    let integrand = |s: f64| {
        let t = s.powf(p);
        let v = (-z * t).exp();
        if v == 0.0 {
            0.0
        } else {
            v * (1.0 + t).powf(b - a - 1.0)
        }
    };
    let opts = QuadOptions { abs_tol: 0.0, rel_tol, max_intervals: 4000 };
    // The integrand decays on the scale s ~ z^{-a}; splitting there keeps the
    // mapped interval well resolved for large z.
    let split = z.powf(-a).max(1e-300);
    let head = quad::integrate(integrand, 0.0, split, opts)?;
    let tail = quad::integrate_to_infinity(integrand, split, opts)?;
    Ok((head.value + tail.value) / gamma(a + 1.0))
}
