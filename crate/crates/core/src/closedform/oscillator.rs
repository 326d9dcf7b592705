//! Linear complex couplings: a shifted harmonic oscillator in `y = x - shift`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::couplings::{CouplingFamily, OscillatorParams};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::mapping::SpinorOnGrid;
use crate::quad::{self, QuadOptions};
use crate::spectrum::{BoundState, Branch, Provenance, Spectrum};
use crate::specfun::{bessel_k01, confluent_u, hermite};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest level whose normalisation integrals stay inside `f64` range.
pub const MAX_NORM_LEVEL: usize = 100;

/// `|E_n - V0| = √(ω(2n+1) + λ²ω²)`.
pub fn level_magnitude(p: &OscillatorParams, n: usize) -> f64 {
    let w = p.omega();
    (w * (2 * n + 1) as f64 + p.lambda_sq() * w * w).sqrt()
}

pub fn oscillator_spectrum(p: &OscillatorParams, n_max: usize) -> Result<Spectrum> {
    p.validate()?;
    let w = p.omega();
    let mut states = Vec::with_capacity(2 * (n_max + 1));
    for n in 0..=n_max {
        let mag = level_magnitude(p, n);
        for branch in [Branch::Plus, Branch::Minus] {
            let e = p.v0 + branch.sign() * mag;
            let residual = ((e - p.v0).powi(2) - w * (2 * n + 1) as f64 - p.lambda_sq() * w * w)
                .abs()
                / mag.powi(2).max(1.0);
            states.push(BoundState {
                n,
                energy: e,
                imag: 0.0,
                branch,
                valid: true,
                residual,
                provenance: Provenance::ClosedForm,
                note: None,
            });
        }
    }
    Ok(Spectrum::new(CouplingFamily::Oscillator(*p), states))
}

/// `e^{-u²/2} H_n(u)` and `e^{-u²/2} H_{n-1}(u)` (zero for `n = 0`).
fn weighted_hermite(n: usize, u: f64) -> (f64, f64) {
    let g = (-0.5 * u * u).exp();
    let (h, dh) = hermite(n, u);
    let prev = if n == 0 { 0.0 } else { dh / (2 * n) as f64 };
    (g * h, g * prev)
}

/// Upper limit beyond which `e^{-u²} H_n(u)²` is below `1e-40` of its bulk.
fn u_cutoff(n: usize) -> f64 {
    ((2 * n + 1) as f64).sqrt() + 10.0
}

fn check_level(n: usize) -> Result<()> {
    if n > MAX_NORM_LEVEL {
        return Err(Error::Parameter(format!(
            "normalisation implemented for n ≤ {MAX_NORM_LEVEL}, got {n}"
        )));
    }
    Ok(())
}

/// `P_n = 2∫₀^∞ e^{-u²} √(u²+c) H_n² du` and
/// `Q_n = 2∫₀^∞ e^{-u²} [(2n+1+c) H_n² + (u H_n - 2n H_{n-1})²]/√(u²+c) du`,
/// the upper and lower component integrals in units of `N²`.
pub fn component_integrals(n: usize, c: f64) -> Result<(f64, f64)> {
    check_level(n)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!(
            "λ²ω = {c}: the lower component behaves like |y|^(-1/2) and is not square integrable"
        )));
    }
    let nf = n as f64;
    let opts = QuadOptions::rel(1e-13);
    let top = u_cutoff(n);
    let p = quad::integrate(
        |u| {
            let (g, _) = weighted_hermite(n, u);
            2.0 * (u * u + c).sqrt() * g * g
        },
        0.0,
        top,
        opts,
    )?;
    let q = quad::integrate(
        |u| {
            let (g, gp) = weighted_hermite(n, u);
            let d = u * g - 2.0 * nf * gp;
            2.0 * ((2.0 * nf + 1.0 + c) * g * g + d * d) / (u * u + c).sqrt()
        },
        0.0,
        top,
        opts,
    )?;
    Ok((p.value, q.value))
}

/// The integrand `{[2(u²+c) + (2n+1)] H_n² - 2n H_{n-1} H_{n+1}} e^{-u²}/√(u²+c)`
/// of the textbook normalisation condition `2N² ∫₀^∞ (...) du = 1`.
pub fn textbook_integrand(n: usize, c: f64, u: f64) -> f64 {
    let g = (-0.5 * u * u).exp();
    let h = hermite_all_three(n, u);
    let nf = n as f64;
    g * g * ((2.0 * (u * u + c) + 2.0 * nf + 1.0) * h.1 * h.1 - 2.0 * nf * h.0 * h.2)
        / (u * u + c).sqrt()
}

fn hermite_all_three(n: usize, u: f64) -> (f64, f64, f64) {
    let v = crate::specfun::hermite_all(n + 1, u);
    let prev = if n == 0 { 0.0 } else { v[n - 1] };
    (prev, v[n], v[n + 1])
}

/// `T_k = 2∫₀^∞ e^{-u²} u^{2k}/√(u²+c) du` for `k = 0, 1, 2` via `K0`, `K1`
/// at `c/2` and `U(1/2, 0, c)`.
pub fn t_integrals(c: f64) -> Result<[f64; 3]> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("closed forms need λ²ω > 0, got {c}")));
    }
    let (k0, k1) = bessel_k01(0.5 * c)?;
    let u = confluent_u(0.5, 0.0, c)?;
    let ex = (0.5 * c).exp();
    let t0 = ex * k0;
    let t1 = 0.5 * std::f64::consts::PI.sqrt() * u;
    let t2 = 0.5 * ex * (c * c * k0 + c * (1.0 - c) * k1);
    Ok([t0, t1, t2])
}

/// `(P_n, Q_n)` of [`component_integrals`] in closed form, `n ≤ 1`.
pub fn component_closed_forms(n: usize, c: f64) -> Result<(f64, f64)> {
    let [t0, t1, t2] = t_integrals(c)?;
    match n {
        0 => Ok((t1 + c * t0, (1.0 + c) * t0 + t1)),
        1 => Ok((4.0 * (t2 + c * t1), 4.0 * t2 + 4.0 * (c + 1.0) * t1 + 4.0 * t0)),
        _ => Err(Error::Parameter(format!("closed forms exist for n ≤ 1, got {n}"))),
    }
}

/// The constants exactly as printed for the two lowest levels:
/// `N0 = {e^{-c/2}(1+2c)K0(c/2) + √π U(1/2,0,c)}^{-1/2}` and
/// `N1 = {e^{-c/2}[2(1+c²)K0(c/2) + 2c(1-c)K1(c/2)] + √π(1+2c)U(1/2,0,c)}^{-1/2}`.
pub fn printed_constant(n: usize, c: f64) -> Result<f64> {
    let (k0, k1) = bessel_k01(0.5 * c)?;
    let u = confluent_u(0.5, 0.0, c)?;
    let sp = std::f64::consts::PI.sqrt();
    let em = (-0.5 * c).exp();
    let inv = match n {
        0 => em * (1.0 + 2.0 * c) * k0 + sp * u,
        1 => em * (2.0 * (1.0 + c * c) * k0 + 2.0 * c * (1.0 - c) * k1) + sp * (1.0 + 2.0 * c) * u,
        _ => return Err(Error::Parameter(format!("printed constants exist for n ≤ 1, got {n}"))),
    };
    Ok(inv.powf(-0.5))
}

/// Normalisation of level `n` and its cross-checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorNorm {
    pub n: usize,
    /// `c = λ²ω`.
    pub c: f64,
    /// `κ = (ω1 + ω2)/ω`, the relative weight of the lower component.
    pub kappa: f64,
    /// `N` with `∫(|ψ+|² + |ψ-|²) dy = 1`, by quadrature.
    pub value: f64,
    /// The same constant from Bessel-K and confluent-U closed forms (`n ≤ 1`).
    pub closed_form: Option<f64>,
    /// `N` of the textbook condition (lower component weighted as if `κ = 1`),
    /// by quadrature of its integrand.
    pub textbook_quadrature: f64,
    /// The textbook condition from the closed forms (`n ≤ 1`).
    pub textbook_closed_form: Option<f64>,
    /// The printed constant, evaluated literally (`n ≤ 1`).
    pub printed: Option<f64>,
}

impl OscillatorNorm {
    /// Largest relative disagreement between quadrature and closed forms.
    pub fn closed_form_agreement(&self) -> Option<f64> {
        let a = self.closed_form? / self.value - 1.0;
        let b = self.textbook_closed_form? / self.textbook_quadrature - 1.0;
        Some(a.abs().max(b.abs()))
    }
}

/// Relative agreement required between quadrature and closed forms.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

pub fn oscillator_norm(p: &OscillatorParams, n: usize) -> Result<OscillatorNorm> {
    p.validate()?;
    let w = p.omega();
    let c = p.lambda_sq() * w;
    let kappa = (p.omega1 + p.omega2) / w;
    let (pn, qn) = component_integrals(n, c)?;
    let value = (pn + qn / (kappa * kappa)).powf(-0.5);
    let textbook_quadrature = quad::integrate(
        |u| 2.0 * textbook_integrand(n, c, u),
        0.0,
        u_cutoff(n),
        QuadOptions::rel(1e-13),
    )?
    .value
    .powf(-0.5);
    let (closed_form, textbook_closed_form, printed) = if n <= 1 {
        let (pc, qc) = component_closed_forms(n, c)?;
        (
            Some((pc + qc / (kappa * kappa)).powf(-0.5)),
            Some((pc + qc).powf(-0.5)),
            Some(printed_constant(n, c)?),
        )
    } else {
        (None, None, None)
    };
    let out = OscillatorNorm {
        n,
        c,
        kappa,
        value,
        closed_form,
        textbook_quadrature,
        textbook_closed_form,
        printed,
    };
    if let Some(d) = out.closed_form_agreement() {
        if d > CLOSED_FORM_TOL {
            return Err(Error::Convergence(format!(
                "closed-form normalisation disagrees with quadrature by {d:e} (n = {n}, c = {c})"
            )));
        }
    }
    Ok(out)
}

/// Level `n` on `branch`, sampled on the real-`y` line (`x = y + shift`).
///
/// `ψ+ = N√ω R(y) χ` and `ψ- = (N√ω/(ω1+ω2)) (iχ' + (E - V0)χ)/R(y)` with
/// `χ = e^{-ωy²/2} H_n(√ω y)` and `R` the continuous root of `λ + iy`
/// (`λ` signed), which makes `ψ+ = √A+ χ` up to a constant. For `λ = 0` the
/// phase of `R` steps by `π/2` at `y = 0` and `N = 1` (unnormalisable lower
/// component); a grid point at `y = 0` is then a singularity.
pub fn oscillator_spinor(
    p: &OscillatorParams,
    n: usize,
    branch: Branch,
    grid: &GridSpec,
) -> Result<SpinorOnGrid> {
    p.validate()?;
    let w = p.omega();
    let sw = w.sqrt();
    let lam = p.lambda_signed();
    let s = p.omega1 + p.omega2;
    let e = branch.sign() * level_magnitude(p, n);
    let big_n = if lam != 0.0 { oscillator_norm(p, n)?.value } else { 1.0 };
    let nf = n as f64;
    let mut plus = Vec::with_capacity(grid.n);
    let mut minus = Vec::with_capacity(grid.n);
    for y in grid.points() {
        // fold -0.0 into +0.0 so the branch choice below is symmetric
        let y = y + 0.0;
        let root = if lam != 0.0 {
            Complex64::new(lam, y).sqrt() * if lam < 0.0 && y < 0.0 { -1.0 } else { 1.0 }
        } else if y == 0.0 {
            return Err(Error::Singularity { x: y, magnitude: 0.0 });
        } else {
            Complex64::from_polar(y.abs().sqrt(), y.signum() * std::f64::consts::FRAC_PI_4)
        };
        let u = sw * y;
        let (g, gp) = weighted_hermite(n, u);
        let chi = g;
        // iχ' + Eχ = [(E - iωy) H_n + 2in√ω H_{n-1}] e^{-ωy²/2}
        let dchi = (e - I * w * y) * g + I * 2.0 * nf * sw * gp;
        plus.push(big_n * sw * root * chi);
        minus.push(big_n * sw / s * dchi / root);
    }
    SpinorOnGrid::new(*grid, p.contour_shift(), plus, minus, p.v0 + e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acceptance() -> OscillatorParams {
        OscillatorParams { omega1: 0.6, m1: 0.5, omega2: 1.0, m2: 0.3, v0: 0.0 }
    }

    #[test]
    fn acceptance_levels() {
        let s = oscillator_spectrum(&acceptance(), 1).unwrap();
        let e0 = s.find(0, Branch::Plus).unwrap().energy;
        let e1 = s.find(1, Branch::Plus).unwrap().energy;
        assert!((e0 - 1.233896).abs() < 1e-6 && (e1 - 1.767060).abs() < 1e-6);
        assert!((s.find(0, Branch::Minus).unwrap().energy + e0).abs() < 1e-15);
        assert!((acceptance().lambda_sq() - 1.12890625).abs() < 1e-15);
    }

    #[test]
    fn pure_pseudoscalar_levels() {
        let p = OscillatorParams { omega1: 0.0, m1: 0.0, omega2: 1.0, m2: 0.0, v0: 0.0 };
        let s = oscillator_spectrum(&p, 2).unwrap();
        for (n, e) in [1.0f64, 3.0, 5.0].iter().enumerate() {
            assert!((s.find(n, Branch::Plus).unwrap().energy - e.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_vector_shifts_levels() {
        let p = OscillatorParams { v0: 0.25, ..acceptance() };
        let s = oscillator_spectrum(&p, 0).unwrap();
        assert!((s.find(0, Branch::Plus).unwrap().energy - 1.483896).abs() < 1e-6);
        assert!((s.find(0, Branch::Minus).unwrap().energy + 0.983896).abs() < 1e-6);
    }

    #[test]
    fn t_integrals_match_quadrature() {
        for c in [0.05, 0.903125, 3.0, 30.0] {
            let t = t_integrals(c).unwrap();
            for (k, tk) in t.iter().enumerate() {
                let q = quad::integrate_to_infinity(
                    |u| 2.0 * (-u * u).exp() * u.powi(2 * k as i32) / (u * u + c).sqrt(),
                    0.0,
                    QuadOptions::rel(1e-14),
                )
                .unwrap()
                .value;
                assert!((tk / q - 1.0).abs() < 1e-11, "c = {c}, k = {k}: {tk} vs {q}");
            }
        }
    }

    #[test]
    fn norm_agrees_with_closed_forms() {
        for n in 0..=1 {
            let nn = oscillator_norm(&acceptance(), n).unwrap();
            assert!(nn.closed_form_agreement().unwrap() < 1e-10, "{nn:?}");
        }
    }

    #[test]
    fn unit_kappa_reduces_to_textbook_condition() {
        for n in 0..6 {
            let (p, q) = component_integrals(n, 0.7).unwrap();
            let t = quad::integrate(
                |u| 2.0 * textbook_integrand(n, 0.7, u),
                0.0,
                12.0,
                QuadOptions::rel(1e-13),
            )
            .unwrap()
            .value;
            assert!(((p + q) / t - 1.0).abs() < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn printed_constants_differ_by_exponential_sign() {
        let c = 0.903125;
        let (k0, _) = bessel_k01(0.5 * c).unwrap();
        let (p0, q0) = component_closed_forms(0, c).unwrap();
        let printed = printed_constant(0, c).unwrap().powi(-2);
        let diff = (p0 + q0) - printed;
        let expect = (1.0 + 2.0 * c) * k0 * ((0.5 * c).exp() - (-0.5 * c).exp());
        assert!((diff - expect).abs() < 1e-12);
    }

    #[test]
    fn spinor_is_normalised_and_lower_component_has_hermite_term() {
        let g = GridSpec::symmetric(10.0, 2001).unwrap();
        for n in 0..3 {
            let s = oscillator_spinor(&acceptance(), n, Branch::Plus, &g).unwrap();
            assert!((s.norm - 1.0).abs() < 1e-10, "n = {n}: {}", s.norm);
        }
        // at y = 0 the n = 1 lower component is carried by the i2√ω H0 term alone
        let s = oscillator_spinor(&acceptance(), 1, Branch::Plus, &g).unwrap();
        let p = acceptance();
        let nn = oscillator_norm(&p, 1).unwrap().value;
        let w = p.omega();
        let expect = nn * w.sqrt() / 1.6 * (I * 2.0 * w.sqrt()) / p.lambda_signed().sqrt();
        assert!((s.psi_minus[1000] - expect).norm() < 1e-12);
    }

    #[test]
    fn zero_lambda_density() {
        let p = OscillatorParams { omega1: 0.0, m1: 0.0, omega2: 1.0, m2: 0.0, v0: 0.0 };
        let g = GridSpec::symmetric(4.0, 400).unwrap();
        let s = oscillator_spinor(&p, 0, Branch::Plus, &g).unwrap();
        for (i, y) in g.points().into_iter().enumerate() {
            let d = s.psi_plus[i].norm_sqr();
            assert!((d - y.abs() * (-y * y).exp()).abs() < 1e-14);
        }
        // phase of the root steps by π/2 across the origin
        let a = s.psi_plus[199].arg();
        let b = s.psi_plus[200].arg();
        assert!(((b - a) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let odd = GridSpec::symmetric(4.0, 401).unwrap();
        assert!(matches!(
            oscillator_spinor(&p, 0, Branch::Plus, &odd),
            Err(Error::Singularity { .. })
        ));
        assert!(matches!(oscillator_norm(&p, 0), Err(Error::Domain(_))));
    }
}
