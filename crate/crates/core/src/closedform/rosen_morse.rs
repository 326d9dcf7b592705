//! Hyperbolic couplings: the complexified Rosen-Morse II effective well
//! `-U1² sech²(μx) + 2iΩ tanh(μx)` with `Ω = M0 M1 + P0 P1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::couplings::{CouplingFamily, RosenMorseParams};
use crate::error::{Error, Result};
use crate::fd;
use crate::grid::GridSpec;
use crate::mapping::{reconstruct_spinor, EffectiveProblem, SpinorOnGrid};
use crate::oracle::checks::{residual_check, z_norm};
use crate::oracle::shooting::{effective_eigenfunction, shoot_effective_with, ShootOptions};
use crate::spectrum::{BoundState, Branch, Provenance, Spectrum};
use crate::specfun::jacobi;

/// Relative tolerance of the equality `Ω² = μ⁴δ⁴`.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Effective-level data for one `n < s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: usize,
    /// `a_n = s - n`.
    pub a: f64,
    /// `b_n = Ω/(μ² a_n)`.
    pub b: f64,
    /// `ε_n = -μ²(a_n² - b_n²)`.
    pub epsilon: f64,
    /// `U1² - U0² + ε_n`; the level is real when this is non-negative.
    pub radicand: f64,
}

/// All levels with `n < s`.
pub fn levels(p: &RosenMorseParams) -> Result<Vec<Level>> {
    p.validate()?;
    let s = p.s();
    let mu2 = p.mu * p.mu;
    let gap = p.u1_sq() - p.u0_sq();
    let mut out = Vec::new();
    // s is computed through a square root; a level within rounding of the
    // threshold is not bound
    let cut = s - 1e-12 * (1.0 + s);
    let mut n = 0usize;
    while (n as f64) < cut {
        let a = s - n as f64;
        let b = p.tilt() / (mu2 * a);
        let epsilon = -mu2 * (a * a - b * b);
        out.push(Level { n, a, b, epsilon, radicand: gap + epsilon });
        n += 1;
    }
    Ok(out)
}

fn level(p: &RosenMorseParams, n: usize) -> Result<Level> {
    levels(p)?
        .into_iter()
        .find(|l| l.n == n)
        .ok_or(Error::NoSuchBoundState { n, s: p.s() })
}

/// `E_n = V0 ± √(U1² - U0² + ε_n)`; a negative radicand gives an invalid
/// complex pair with the imaginary part recorded.
pub fn rosen_morse_spectrum(p: &RosenMorseParams) -> Result<Spectrum> {
    let mut states = Vec::new();
    for l in levels(p)? {
        states.extend(level_states(p, &l));
    }
    Ok(Spectrum::new(CouplingFamily::RosenMorse(*p), states))
}

fn level_states(p: &RosenMorseParams, l: &Level) -> [BoundState; 2] {
    [Branch::Plus, Branch::Minus].map(|branch| {
        if l.radicand >= 0.0 {
            let e = p.v0 + branch.sign() * l.radicand.sqrt();
            let eps = (e - p.v0).powi(2) - p.u1_sq() + p.u0_sq();
            BoundState {
                n: l.n,
                energy: e,
                imag: 0.0,
                branch,
                valid: true,
                residual: (eps - l.epsilon).abs() / l.epsilon.abs().max(1.0),
                provenance: Provenance::ClosedForm,
                note: None,
            }
        } else {
            BoundState {
                n: l.n,
                energy: p.v0,
                imag: branch.sign() * (-l.radicand).sqrt(),
                branch,
                valid: false,
                residual: 0.0,
                provenance: Provenance::ClosedForm,
                note: Some(format!("negative radicand {:.6e}: complex-conjugate pair", l.radicand)),
            }
        }
    })
}

/// Outcome of the sufficient conditions for an all-real spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealityReport {
    pub s: f64,
    pub n_max: usize,
    /// `s = n_max + δ`, `0 < δ ≤ 1`.
    pub delta: f64,
    pub omega_sq: f64,
    pub mu4_delta4: f64,
    pub equality_holds: bool,
    /// `U1² - U0²`.
    pub gap: f64,
    /// `μ²[(n_max + δ)² - δ⁴/(n_max + δ)²]`.
    pub bound: f64,
    pub inequality_holds: bool,
    pub satisfied: bool,
    pub message: String,
}

pub fn rosen_morse_reality_check(p: &RosenMorseParams) -> Result<RealityReport> {
    p.validate()?;
    let s = p.s();
    let n_max = (levels(p)?.len()).saturating_sub(1);
    let delta = s - n_max as f64;
    let mu2 = p.mu * p.mu;
    let omega_sq = p.tilt().powi(2);
    let mu4_delta4 = mu2 * mu2 * delta.powi(4);
    let equality_holds =
        (omega_sq - mu4_delta4).abs() <= EQUALITY_TOL * omega_sq.max(mu4_delta4).max(f64::MIN_POSITIVE);
    let gap = p.u1_sq() - p.u0_sq();
    let top = n_max as f64 + delta;
    let bound = mu2 * (top * top - delta.powi(4) / (top * top));
    let inequality_holds = gap > bound;
    let satisfied = equality_holds && inequality_holds;
    let message = if satisfied {
        format!("satisfied: all {} levels are real", n_max + 1)
    } else {
        let mut why = Vec::new();
        if !equality_holds {
            why.push(format!("Ω² = {omega_sq:.6e} ≠ μ⁴δ⁴ = {mu4_delta4:.6e}"));
        }
        if !inequality_holds {
            why.push(format!("U1² - U0² = {gap:.6e} ≤ {bound:.6e}"));
        }
        format!(
            "sufficient condition not met ({}); the spectrum may still be real",
            why.join("; ")
        )
    };
    Ok(RealityReport {
        s,
        n_max,
        delta,
        omega_sq,
        mu4_delta4,
        equality_holds,
        gap,
        bound,
        inequality_holds,
        satisfied,
        message,
    })
}

/// `|A+(z)|` and `α(z)` in the printed form
/// `√((M0 - P1 z)² + (M1 z + P0)²)`, `tan⁻¹((M1 z + P0)/(M0 - P1 z))`.
pub fn printed_modulus_phase(p: &RosenMorseParams, z: f64) -> (f64, f64) {
    let re = p.m0 - p.p1 * z;
    let im = p.m1 * z + p.p0;
    let alpha = (im / re).atan();
    (re.hypot(im), if alpha.is_nan() { 0.0 } else { alpha })
}

// ln[(1 - z²)^{a/2} ((1 - z)/(1 + z))^b] at z = tanh(μx), without rounding z.
fn ln_weight(a: f64, b: f64, t: f64) -> f64 {
    let at = t.abs();
    let ln_sech = -at + std::f64::consts::LN_2 - (-2.0 * at).exp().ln_1p();
    a * ln_sech - 2.0 * b * t
}

fn check_real(p: &RosenMorseParams, l: &Level) -> Result<()> {
    if l.radicand < 0.0 {
        return Err(Error::Domain(format!(
            "level {} is a complex pair (radicand {:e}); no real-energy spinor",
            l.n, l.radicand
        )));
    }
    let _ = p;
    Ok(())
}

fn energy_of(p: &RosenMorseParams, l: &Level, branch: Branch) -> f64 {
    p.v0 + branch.sign() * l.radicand.sqrt()
}

/// Upper and lower components in the printed form with `N+ = N- = 1`, at
/// one point, given `t = μx` and `z = tanh t`.
fn printed_at(p: &RosenMorseParams, l: &Level, e: f64, t: f64, z: f64) -> Result<(Complex64, Complex64)> {
    let jac = jacobi(l.n, l.a + l.b, l.a - l.b, z)?;
    let w = ln_weight(l.a, l.b, t).exp();
    let (modulus, alpha) = printed_modulus_phase(p, z);
    let phase = Complex64::from_polar(1.0, 0.5 * alpha);
    let plus = modulus.sqrt() * phase * w * jac.value;
    let bracket = (e - l.a * z - 2.0 * l.b - p.v0) * jac.value + (1.0 - z * z) * jac.derivative;
    let minus = p.mu * w * bracket / (modulus.sqrt() * phase);
    Ok((plus, minus))
}

/// The printed spinor on an `x` grid with `N+ = N- = 1`.
pub fn printed_spinor(
    p: &RosenMorseParams,
    n: usize,
    branch: Branch,
    grid: &GridSpec,
) -> Result<SpinorOnGrid> {
    let l = level(p, n)?;
    check_real(p, &l)?;
    let e = energy_of(p, &l, branch);
    let mut plus = Vec::with_capacity(grid.n);
    let mut minus = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let t = p.mu * x;
        let (a, b) = printed_at(p, &l, e, t, t.tanh())?;
        plus.push(a);
        minus.push(b);
    }
    SpinorOnGrid::new(*grid, Complex64::new(0.0, 0.0), plus, minus, e)
}

/// The factor `(1 - z²)^{a/2} ((1 - z)/(1 + z))^b P_n^{(a+b, a-b)}(z)` that the
/// printed upper component puts in place of `χ`.
pub fn printed_chi(p: &RosenMorseParams, n: usize, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let l = level(p, n)?;
    grid.points()
        .into_iter()
        .map(|x| {
            let t = p.mu * x;
            let jac = jacobi(l.n, l.a + l.b, l.a - l.b, t.tanh())?;
            Ok(Complex64::new(ln_weight(l.a, l.b, t).exp() * jac.value, 0.0))
        })
        .collect()
}

/// Residual of `-χ'' + (V_eff - E²)χ = 0` at interior samples, relative to
/// `|χ| max|V_eff - E²|`; samples below `1e-10` of the peak are skipped.
pub fn effective_residual(
    prob: &EffectiveProblem,
    grid: &GridSpec,
    chi: &[Complex64],
    e: f64,
) -> f64 {
    let d2 = fd::second_derivative(chi, grid.h());
    let peak = chi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let shifted: Vec<Complex64> = (0..grid.n).map(|i| prob.eval(grid.x(i), e) - e * e).collect();
    let scale = shifted.iter().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut worst = 0.0f64;
    for i in 1..grid.n - 1 {
        if chi[i].norm() < 1e-10 * peak {
            continue;
        }
        let r = shifted[i] * chi[i] - d2[i];
        worst = worst.max(r.norm() / (chi[i].norm() * scale));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub points: usize,
    pub h: f64,
    pub residual: f64,
}

/// True when the residuals fall by at least a factor 3 per halving and end
/// below `1e-3`.
pub fn converging(steps: &[RefinementStep]) -> bool {
    !steps.is_empty()
        && steps.last().map_or(false, |s| s.residual < 1e-3)
        && steps.windows(2).all(|w| w[1].residual * 3.0 <= w[0].residual)
}

/// Adjudication of the printed hyperbolic spinor against the converged
/// numerical eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenMorseSpinorReport {
    pub n: usize,
    pub branch: Branch,
    pub energy: f64,
    pub level: Level,
    /// The printed form with `N+ = N-`, normalised by the `z` integral when
    /// that integral converges.
    pub printed: SpinorOnGrid,
    /// `(1 - z²)^{-1}`-weighted norm of the printed form with unit constants;
    /// `None` when the integral diverges at `z = ±1`.
    pub printed_z_norm: Option<f64>,
    /// First-order residuals of the printed form under grid halving.
    pub printed_residuals: Vec<RefinementStep>,
    /// Second-order residuals of the printed `χ` factor under grid halving.
    pub chi_residuals: Vec<RefinementStep>,
    pub form_suspect: bool,
    /// Energy found by shooting on the effective equation.
    pub oracle_energy: Option<f64>,
    /// Normalised spinor rebuilt from the shooting eigenfunction.
    pub oracle: Option<SpinorOnGrid>,
    pub oracle_residuals: Vec<RefinementStep>,
    /// `min_c ‖ψ_printed - c ψ_oracle‖ / ‖ψ_printed‖` on the grid.
    pub discrepancy: Option<f64>,
    pub notes: Vec<String>,
}

const REFINEMENTS: usize = 3;
const Z_CELLS: usize = 20_000;

fn mismatch(a: &SpinorOnGrid, b: &SpinorOnGrid) -> f64 {
    let av: Vec<Complex64> = a.psi_plus.iter().chain(&a.psi_minus).copied().collect();
    let bv: Vec<Complex64> = b.psi_plus.iter().chain(&b.psi_minus).copied().collect();
    let bb: f64 = bv.iter().map(|z| z.norm_sqr()).sum();
    let aa: f64 = av.iter().map(|z| z.norm_sqr()).sum();
    let ab: Complex64 = bv.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    let c = ab / bb;
    let r: f64 = av.iter().zip(&bv).map(|(x, y)| (x - c * y).norm_sqr()).sum();
    (r / aa).sqrt()
}

/// Evaluates the printed spinor for level `n`, checks it against the first-
/// order system under refinement and, when it fails, attaches the
/// numerically converged eigenfunction on the same grid.
pub fn rosen_morse_spinor(
    p: &RosenMorseParams,
    n: usize,
    branch: Branch,
    grid: &GridSpec,
) -> Result<RosenMorseSpinorReport> {
    let l = level(p, n)?;
    check_real(p, &l)?;
    let fam = CouplingFamily::RosenMorse(*p);
    let e = energy_of(p, &l, branch);
    let prob = EffectiveProblem::from_family(&fam)?;
    let mut notes = Vec::new();

    // endpoint exponents of the weighted density are a ± 2b - 1
    let normalizable = l.a > 2.0 * l.b.abs();
    let printed_z_norm = if normalizable {
        let n_e = e;
        Some(z_norm(
            |z| {
                let t = z.atanh();
                printed_at(p, &l, n_e, t, z)
                    .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
                    .unwrap_or(f64::NAN)
            },
            Z_CELLS,
        )?)
    } else {
        notes.push(format!(
            "printed form is not normalisable: a_n = {:.6} ≤ 2|b_n| = {:.6}",
            l.a,
            2.0 * l.b.abs()
        ));
        None
    };

    let mut printed_residuals = Vec::new();
    let mut chi_residuals = Vec::new();
    let mut g = *grid;
    for _ in 0..REFINEMENTS {
        let sp = printed_spinor(p, n, branch, &g)?;
        match residual_check(&sp, &fam, e) {
            Ok(r) => printed_residuals.push(RefinementStep { points: g.n, h: g.h(), residual: r }),
            Err(err) => {
                notes.push(format!("printed residual on {} points: {err}", g.n));
                printed_residuals.push(RefinementStep {
                    points: g.n,
                    h: g.h(),
                    residual: f64::INFINITY,
                });
            }
        }
        let chi = printed_chi(p, n, &g)?;
        chi_residuals.push(RefinementStep {
            points: g.n,
            h: g.h(),
            residual: effective_residual(&prob, &g, &chi, e),
        });
        g = g.refined();
    }
    let form_suspect = !converging(&printed_residuals);

    let mut printed = printed_spinor(p, n, branch, grid)?;
    if let Some(zn) = printed_z_norm {
        if zn > 0.0 && zn.is_finite() {
            printed.scale(1.0 / zn.sqrt());
        }
    }

    let (mut oracle_energy, mut oracle, mut oracle_residuals, mut discrepancy) =
        (None, None, Vec::new(), None);
    if form_suspect {
        let width = 0.05 * (e - p.v0).abs().max(0.1);
        let opts = ShootOptions { scan_points: 41, ..Default::default() };
        match shoot_effective_with(&prob, grid, (e - width, e + width), &opts) {
            Ok(root) => {
                let eo = root.energy;
                oracle_energy = Some(eo);
                let mut g = *grid;
                for k in 0..REFINEMENTS {
                    let built = effective_eigenfunction(&prob, &g, eo)
                        .and_then(|chi| reconstruct_spinor(&chi, &fam, eo, &g))
                        .and_then(|s| s.normalized());
                    match built {
                        Ok(sp) => {
                            let r = residual_check(&sp, &fam, eo)?;
                            oracle_residuals.push(RefinementStep { points: g.n, h: g.h(), residual: r });
                            if k == 0 {
                                discrepancy = Some(mismatch(&printed, &sp));
                                oracle = Some(sp);
                            }
                        }
                        Err(err) => notes.push(format!("oracle eigenfunction on {} points: {err}", g.n)),
                    }
                    g = g.refined();
                }
            }
            Err(err) => notes.push(format!("shooting found no level near {e}: {err}")),
        }
        notes.push(
            "printed form fails the first-order system; the oracle eigenfunction is the reference"
                .into(),
        );
    }

    Ok(RosenMorseSpinorReport {
        n,
        branch,
        energy: e,
        level: l,
        printed,
        printed_z_norm,
        printed_residuals,
        chi_residuals,
        form_suspect,
        oracle_energy,
        oracle,
        oracle_residuals,
        discrepancy,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn single_level() -> RosenMorseParams {
        let p1 = 0.75f64.sqrt();
        RosenMorseParams { m0: 0.0, m1: 0.0, p0: 0.25 / p1, p1, mu: 1.0, v0: 0.0 }
    }

    #[test]
    fn single_bound_state() {
        let p = single_level();
        let ls = levels(&p).unwrap();
        assert_eq!(ls.len(), 1);
        let l = ls[0];
        assert!((p.s() - 0.5).abs() < 1e-15);
        assert!((l.a - 0.5).abs() < 1e-15 && (l.b - 0.5).abs() < 1e-15 && l.epsilon.abs() < 1e-15);
        let s = rosen_morse_spectrum(&p).unwrap();
        assert_eq!(s.states.len(), 2);
        assert!((s.find(0, Branch::Plus).unwrap().energy - 0.8164966).abs() < 1e-7);
        assert!((s.find(0, Branch::Minus).unwrap().energy + 0.8164966).abs() < 1e-7);
    }

    #[test]
    fn real_well_reduction() {
        let p = RosenMorseParams { m0: 0.0, m1: 0.0, p0: 0.0, p1: 2f64.sqrt(), mu: 1.0, v0: 0.0 };
        assert!((p.s() - 1.0).abs() < 1e-15);
        let ls = levels(&p).unwrap();
        assert_eq!(ls.len(), 1);
        assert_eq!(ls[0].b, 0.0);
        assert!((ls[0].epsilon + 1.0).abs() < 1e-15);
        let s = rosen_morse_spectrum(&p).unwrap();
        assert!((s.find(0, Branch::Plus).unwrap().energy - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_radicand_is_complex_pair() {
        // unreachable from real parameters (see the property below), so the
        // branch is exercised on a synthetic level
        let p = RosenMorseParams { v0: 0.3, ..single_level() };
        let l = Level { n: 0, a: 0.5, b: 0.0, epsilon: -2.0, radicand: -0.25 };
        let st = level_states(&p, &l);
        assert!(st.iter().all(|b| !b.valid && b.energy == 0.3 && b.imag.abs() == 0.5));
        assert_eq!(st[0].imag, -st[1].imag);
    }

    #[test]
    fn reality_report_single_level() {
        let r = rosen_morse_reality_check(&single_level()).unwrap();
        assert_eq!(r.n_max, 0);
        assert!((r.delta - 0.5).abs() < 1e-15);
        assert!((r.omega_sq - 0.0625).abs() < 1e-15);
        assert!(r.equality_holds && r.inequality_holds && r.satisfied);
    }

    #[test]
    fn reality_report_not_met_is_not_an_error() {
        let p = RosenMorseParams { p0: 0.3, ..single_level() };
        let r = rosen_morse_reality_check(&p).unwrap();
        assert!(!r.satisfied && r.message.contains("not met"));
    }

    #[test]
    fn no_such_level() {
        let p = single_level();
        assert!(matches!(
            printed_spinor(&p, 1, Branch::Plus, &GridSpec::symmetric(10.0, 101).unwrap()),
            Err(Error::NoSuchBoundState { n: 1, .. })
        ));
    }

    #[test]
    fn degree_zero_printed_form() {
        let p = single_level();
        let g = GridSpec::symmetric(3.0, 31).unwrap();
        let sp = printed_spinor(&p, 0, Branch::Plus, &g).unwrap();
        for (i, x) in g.points().into_iter().enumerate() {
            let z = x.tanh();
            let (m, al) = printed_modulus_phase(&p, z);
            let w = (1.0 - z * z).powf(0.25) * ((1.0 - z) / (1.0 + z)).powf(0.5);
            let expect = m.sqrt() * Complex64::from_polar(1.0, al / 2.0) * w;
            assert!((sp.psi_plus[i] - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn printed_chi_solves_the_real_well() {
        // Ω = 0 with M0 = P0 = 0: b = 0 and the χ factor is the Gegenbauer solution
        let p = RosenMorseParams { m0: 0.0, m1: 0.0, p0: 0.0, p1: 5f64.sqrt(), mu: 1.0, v0: 0.0 };
        let prob = EffectiveProblem::from_family(&CouplingFamily::RosenMorse(p)).unwrap();
        let s = rosen_morse_spectrum(&p).unwrap();
        for n in 0..2 {
            let e = s.find(n, Branch::Plus).unwrap().energy;
            let mut prev = f64::INFINITY;
            let mut g = GridSpec::symmetric(12.0, 601).unwrap();
            for _ in 0..3 {
                let chi = printed_chi(&p, n, &g).unwrap();
                let r = effective_residual(&prob, &g, &chi, e);
                assert!(r * 3.5 < prev, "n = {n}: {r} after {prev}");
                prev = r;
                g = g.refined();
            }
            assert!(prev < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn level_count_is_ceiling_of_s(p1 in 0.3f64..6.0, m1 in 0.0f64..0.25, mu in 0.3f64..3.0) {
            let p = RosenMorseParams { m0: 0.1, m1, p0: 0.2, p1, mu, v0: 0.0 };
            let s = p.s();
            prop_assume!((s - s.round()).abs() > 1e-9);
            let ls = levels(&p).unwrap();
            prop_assert_eq!(ls.len(), s.ceil() as usize);
            prop_assert!(ls.iter().all(|l| (l.n as f64) < s));
        }

        #[test]
        fn epsilon_increases_on_the_reality_surface(s in 0.05f64..6.0, mu in 0.3f64..3.0, v0 in -1.0f64..1.0) {
            prop_assume!((s - s.round()).abs() > 1e-6);
            // choose U1 from s, and P0 so that Ω = μ²δ² with M0 = M1 = 0
            let u1 = 0.5 * mu * ((2.0 * s + 1.0).powi(2) - 1.0).sqrt();
            let delta = s - s.floor();
            let p0 = mu * mu * delta * delta / u1;
            let p = RosenMorseParams { m0: 0.0, m1: 0.0, p0, p1: u1, mu, v0 };
            let r = rosen_morse_reality_check(&p).unwrap();
            prop_assert!(r.equality_holds);
            let ls = levels(&p).unwrap();
            for w in ls.windows(2) {
                prop_assert!(w[1].epsilon > w[0].epsilon, "{:?}", ls);
            }
        }

        #[test]
        fn radicand_is_positive_for_real_parameters(
            m0 in -3.0f64..3.0, m1 in -2.0f64..2.0, p0 in -3.0f64..3.0,
            p1 in -4.0f64..4.0, mu in 0.2f64..3.0,
        ) {
            let p = RosenMorseParams { m0, m1, p0, p1, mu, v0: 0.0 };
            prop_assume!(p.u1_sq() > 1e-3);
            for l in levels(&p).unwrap() {
                prop_assert!(l.radicand > 0.0, "{:?}", l);
            }
        }

        #[test]
        fn valid_levels_satisfy_their_equation(p1 in 0.3f64..4.0, p0 in -1.0f64..1.0, m0 in -1.0f64..1.0, v0 in -1.0f64..1.0) {
            let p = RosenMorseParams { m0, m1: 0.0, p0, p1, mu: 1.0, v0 };
            let s = rosen_morse_spectrum(&p).unwrap();
            for b in s.valid() {
                prop_assert!(b.residual < 1e-10);
            }
        }
    }
}
