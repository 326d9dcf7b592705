//! Quadratic couplings: `E² = -b1² + a2²/Ω(E)² + (2n+1)Ω(E)`, `Ω(E)² = 2Ea2 - 2a1b1`.

use crate::couplings::{CouplingFamily, QuadraticParams};
use crate::error::{Error, Result};
use crate::spectrum::{BoundState, Branch, Provenance, Spectrum};

/// Reason attached to roots of the squared equation that fail the original one.
pub const SPURIOUS_REASON: &str = "unsquared-equation residual";

const VALID_TOL: f64 = 1e-10;

/// `E² + b1² - a2²/Ω² - (2n+1)Ω` relative to the largest term, with the
/// positive root `Ω`. `None` outside the region `Ω² > 0`.
pub fn spectral_residual(q: &QuadraticParams, n: usize, e: f64) -> Option<f64> {
    let om2 = q.omega_sq(e);
    if !(om2 > 0.0) {
        return None;
    }
    let om = om2.sqrt();
    let terms = [e * e, q.b1 * q.b1, q.a2 * q.a2 / om2, (2 * n + 1) as f64 * om];
    let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    Some((terms[0] + terms[1] - terms[2] - terms[3]) / scale)
}

/// The two sides of `E³ - a2/2 = (2n+1) E √(2 E a2)` (the `b1 = 0` equation
/// before squaring).
pub fn unsquared_sides(a2: f64, n: usize, e: f64) -> (f64, f64) {
    (e.powi(3) - 0.5 * a2, (2 * n + 1) as f64 * e * (2.0 * e * a2).max(0.0).sqrt())
}

/// `(E+, E-)` from the squared cubic `e² - a2 K e + a2²/4 = 0`, `e = E³`,
/// `K = 1 + 2(2n+1)²`.
pub fn squared_roots(a2: f64, n: usize) -> (f64, f64) {
    let k = 1.0 + 2.0 * ((2 * n + 1) as f64).powi(2);
    let big = 0.5 * a2 * (k + (k * k - 1.0).sqrt());
    // the small root from the product of roots avoids cancellation
    let small = if big == 0.0 { 0.0 } else { 0.25 * a2 * a2 / big };
    (big.cbrt(), small.cbrt())
}

fn closed_form_states(q: &QuadraticParams, n_max: usize) -> Vec<BoundState> {
    let mut states = Vec::new();
    for n in 0..=n_max {
        let (ep, em) = squared_roots(q.a2, n);
        for (e, branch) in [(ep, Branch::Plus), (em, Branch::Minus)] {
            let (lhs, rhs) = unsquared_sides(q.a2, n, e);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            let valid = (lhs - rhs).abs() <= VALID_TOL * scale;
            let (residual, note) = if valid {
                (spectral_residual(q, n, e).map_or(f64::NAN, f64::abs), None)
            } else {
                (
                    (lhs - rhs).abs() / scale,
                    Some(format!(
                        "{SPURIOUS_REASON}: E³ - a2/2 = {lhs:.6} but (2n+1)E√(2Ea2) = {rhs:.6}"
                    )),
                )
            };
            states.push(BoundState {
                n,
                energy: e,
                imag: 0.0,
                branch,
                valid,
                residual,
                provenance: Provenance::ClosedForm,
                note,
            });
        }
    }
    states
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-12 * (1.0 + mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of the spectral equation for level `n`, scanning the admissible
/// side of `E = a1 b1/a2` on a geometric grid and refining by bisection.
pub fn solve_level(q: &QuadraticParams, n: usize) -> Vec<f64> {
    let t = q.a1 * q.b1 / q.a2;
    let dir = q.a2.signum();
    let level = (2 * n + 1) as f64;
    // signed, unscaled residual as a function of the distance w from the edge
    let f = |w: f64| {
        let e = t + dir * w;
        let om2 = 2.0 * q.a2.abs() * w;
        let om = om2.sqrt();
        e * e + q.b1 * q.b1 - q.a2 * q.a2 / om2 - level * om
    };
    let mut w_hi = 1.0 + t.abs();
    while !(f(w_hi) > 0.0 && w_hi > 2.0 * t.abs()) && w_hi < 1e12 {
        w_hi *= 2.0;
    }
    let w_lo = 1e-12 * (1.0 + t.abs());
    let k = 4000;
    let ratio = (w_hi / w_lo).powf(1.0 / k as f64);
    let mut roots = Vec::new();
    let (mut w0, mut f0) = (w_lo, f(w_lo));
    for _ in 0..k {
        let w1 = w0 * ratio;
        let f1 = f(w1);
        if f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0) {
            let w = if f0 == 0.0 { w0 } else { bisect(f, w0, w1) };
            roots.push(t + dir * w);
        }
        w0 = w1;
        f0 = f1;
    }
    roots
}

/// Closed-form or bracketed-root spectrum for levels `0..=n_max`.
pub fn quadratic_spectrum(q: &QuadraticParams, n_max: usize) -> Result<Spectrum> {
    if q.a2 == 0.0 || !q.a2.is_finite() {
        return Err(Error::Parameter("quadratic spectrum needs a2 ≠ 0".into()));
    }
    if !(q.a1.is_finite() && q.b1.is_finite()) {
        return Err(Error::Parameter("non-finite quadratic parameters".into()));
    }
    let fam = CouplingFamily::Quadratic(*q);
    if q.b1 == 0.0 {
        return Ok(Spectrum::new(fam, closed_form_states(q, n_max)));
    }
    let mut states = Vec::new();
    let mut diagnostics = Vec::new();
    for n in 0..=n_max {
        let roots = solve_level(q, n);
        if roots.is_empty() {
            diagnostics.push(format!("n = {n}: no real root with Ω(E)² > 0"));
        }
        for e in roots {
            let residual = spectral_residual(q, n, e).map_or(f64::NAN, f64::abs);
            states.push(BoundState {
                n,
                energy: e,
                imag: 0.0,
                branch: Branch::of(e),
                valid: residual < VALID_TOL,
                residual,
                provenance: Provenance::ClosedForm,
                note: None,
            });
        }
    }
    let mut s = Spectrum::new(fam, states);
    s.diagnostics = diagnostics;
    Ok(s)
}
