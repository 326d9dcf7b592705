//! Complex scalar `M`, pseudoscalar `P` and vector offset `Ṽ` couplings.
//!
//! The Dirac Hamiltonian in the representation `β = σ1`, `α = σ3` reads
//! `H = -iσ3 d/dx + V + Mσ1 - Pσ2`, so the spinor components only see the
//! combinations `A± = M ± iP`. Each family below is analytic, which lets
//! the same code evaluate it on the real axis or on a shifted contour.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::GridSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `M = a0 x²`, `P = i(a1 x² + b1)`, `Ṽ = a2 x²` with `a0 = √(a1² + a2²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticParams {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
}

impl QuadraticParams {
    /// Positive root of the constraint that removes the quartic term.
    pub fn a0(&self) -> f64 {
        self.a1.hypot(self.a2)
    }

    /// `Ω(E)² = 2 E a2 - 2 a1 b1`.
    pub fn omega_sq(&self, energy: f64) -> f64 {
        2.0 * energy * self.a2 - 2.0 * self.a1 * self.b1
    }
}

/// `M = iω1 x + m1`, `P = ω2 x + i m2`, `Ṽ = v0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub omega1: f64,
    pub m1: f64,
    pub omega2: f64,
    pub m2: f64,
    #[serde(default)]
    pub v0: f64,
}

impl OscillatorParams {
    /// `ω² = ω2² - ω1²`.
    pub fn omega_sq(&self) -> f64 {
        self.omega2 * self.omega2 - self.omega1 * self.omega1
    }

    pub fn omega(&self) -> f64 {
        self.omega_sq().sqrt()
    }

    /// Coefficient of the linear imaginary term: `V_eff ∋ 2i(ω1 m1 + ω2 m2) x`.
    pub fn drive(&self) -> f64 {
        self.omega1 * self.m1 + self.omega2 * self.m2
    }

    /// Signed `λ = (ω1 m2 + ω2 m1)/ω²`, so that `A+ = (ω1 + ω2)(λ + i y)`.
    pub fn lambda_signed(&self) -> f64 {
        (self.omega1 * self.m2 + self.omega2 * self.m1) / self.omega_sq()
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda_signed().powi(2)
    }

    /// Imaginary offset of the real-`y` contour: `x = y + shift`.
    pub fn contour_shift(&self) -> Complex64 {
        Complex64::new(0.0, -self.drive() / self.omega_sq())
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&[self.omega1, self.m1, self.omega2, self.m2, self.v0])?;
        if self.omega1.abs() == self.omega2.abs() || self.omega_sq() <= 0.0 {
            return Err(Error::Parameter(format!(
                "oscillator needs ω2² - ω1² > 0, got {}",
                self.omega_sq()
            )));
        }
        Ok(())
    }
}

/// `M = iM1 tanh(μx) + M0`, `P = P1 tanh(μx) + iP0`, `Ṽ = v0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RosenMorseParams {
    pub m0: f64,
    pub m1: f64,
    pub p0: f64,
    pub p1: f64,
    pub mu: f64,
    #[serde(default)]
    pub v0: f64,
}

impl RosenMorseParams {
    /// `U1² = P1² - M1²`, depth of the `sech²` well.
    pub fn u1_sq(&self) -> f64 {
        self.p1 * self.p1 - self.m1 * self.m1
    }

    /// `U0² = P0² - M0²`.
    pub fn u0_sq(&self) -> f64 {
        self.p0 * self.p0 - self.m0 * self.m0
    }

    /// Strength of the imaginary `tanh` tilt, `M0 M1 + P0 P1`.
    pub fn tilt(&self) -> f64 {
        self.m0 * self.m1 + self.p0 * self.p1
    }

    /// `s = (√(1 + (2U1/μ)²) - 1)/2`; bound levels satisfy `n < s`.
    pub fn s(&self) -> f64 {
        let r = 2.0 * self.u1_sq().sqrt() / self.mu;
        0.5 * ((1.0 + r * r).sqrt() - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&[self.m0, self.m1, self.p0, self.p1, self.mu, self.v0])?;
        if self.mu <= 0.0 {
            return Err(Error::Parameter(format!("μ must be positive, got {}", self.mu)));
        }
        if self.u1_sq() <= 0.0 {
            return Err(Error::Parameter(format!(
                "no binding well: P1² - M1² = {} ≤ 0",
                self.u1_sq()
            )));
        }
        Ok(())
    }
}

/// Tabulated couplings aligned to one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCouplings {
    pub grid: GridSpec,
    pub m: Vec<Complex64>,
    pub p: Vec<Complex64>,
    pub vt: Vec<Complex64>,
}

impl SampledCouplings {
    pub fn new(
        grid: GridSpec,
        m: Vec<Complex64>,
        p: Vec<Complex64>,
        vt: Vec<Complex64>,
    ) -> Result<Self> {
        if m.len() != grid.n || p.len() != grid.n || vt.len() != grid.n {
            return Err(Error::Parameter(format!(
                "sampled arrays must have {} entries (got {}, {}, {})",
                grid.n,
                m.len(),
                p.len(),
                vt.len()
            )));
        }
        if m.iter().chain(&p).chain(&vt).any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("sampled couplings".into()));
        }
        Ok(Self { grid, m, p, vt })
    }

    /// Samples closures on `grid`.
    pub fn from_fn(
        grid: GridSpec,
        m: impl Fn(f64) -> Complex64,
        p: impl Fn(f64) -> Complex64,
        vt: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let xs = grid.points();
        Self::new(
            grid,
            xs.iter().map(|&x| m(x)).collect(),
            xs.iter().map(|&x| p(x)).collect(),
            xs.iter().map(|&x| vt(x)).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CouplingFamily {
    Quadratic(QuadraticParams),
    Oscillator(OscillatorParams),
    RosenMorse(RosenMorseParams),
    Sampled(SampledCouplings),
}

/// Couplings and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingJet {
    pub m: Complex64,
    pub dm: Complex64,
    pub d2m: Complex64,
    pub p: Complex64,
    pub dp: Complex64,
    pub d2p: Complex64,
    pub vt: Complex64,
    pub dvt: Complex64,
}

impl CouplingJet {
    pub fn a_plus(&self) -> Complex64 {
        self.m + I * self.p
    }

    pub fn a_minus(&self) -> Complex64 {
        self.m - I * self.p
    }

    pub fn d_a_plus(&self) -> Complex64 {
        self.dm + I * self.dp
    }

    pub fn d2_a_plus(&self) -> Complex64 {
        self.d2m + I * self.d2p
    }
}

impl CouplingFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Quadratic(_) => "quadratic",
            Self::Oscillator(_) => "oscillator",
            Self::RosenMorse(_) => "rosen_morse",
            Self::Sampled(_) => "sampled",
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Sampled(_))
    }

    /// Constant vector offset (zero where `Ṽ` is not constant).
    pub fn v0(&self) -> f64 {
        match self {
            Self::Oscillator(p) => p.v0,
            Self::RosenMorse(p) => p.v0,
            _ => 0.0,
        }
    }

    /// True when `Ṽ` depends on position, which makes `V_eff` depend on `E`.
    pub fn energy_dependent(&self) -> bool {
        match self {
            Self::Quadratic(p) => p.a2 != 0.0,
            Self::Oscillator(_) | Self::RosenMorse(_) => false,
            Self::Sampled(s) => s.vt.iter().any(|v| (v - s.vt[0]).norm() > 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Quadratic(p) => check_finite(&[p.a1, p.b1, p.a2]),
            Self::Oscillator(p) => p.validate(),
            Self::RosenMorse(p) => p.validate(),
            Self::Sampled(_) => Ok(()),
        }
    }

    /// Couplings and derivatives at a complex position. Tabulated couplings
    /// only accept real grid points.
    pub fn jet_at(&self, z: Complex64) -> Result<CouplingJet> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Self::Quadratic(q) => {
                let a0 = q.a0();
                Ok(CouplingJet {
                    m: a0 * z * z,
                    dm: 2.0 * a0 * z,
                    d2m: Complex64::new(2.0 * a0, 0.0),
                    p: I * (q.a1 * z * z + q.b1),
                    dp: I * 2.0 * q.a1 * z,
                    d2p: I * 2.0 * q.a1,
                    vt: q.a2 * z * z,
                    dvt: 2.0 * q.a2 * z,
                })
            }
            Self::Oscillator(o) => Ok(CouplingJet {
                m: I * o.omega1 * z + o.m1,
                dm: I * o.omega1,
                d2m: zero,
                p: o.omega2 * z + I * o.m2,
                dp: Complex64::new(o.omega2, 0.0),
                d2p: zero,
                vt: Complex64::new(o.v0, 0.0),
                dvt: zero,
            }),
            Self::RosenMorse(r) => {
                let t = (r.mu * z).tanh();
                let sech2 = 1.0 - t * t;
                // d/dx tanh(μx) = μ sech², d/dx sech²(μx) = -2μ tanh sech²
                let dt = r.mu * sech2;
                let d2t = -2.0 * r.mu * r.mu * t * sech2;
                Ok(CouplingJet {
                    m: I * r.m1 * t + r.m0,
                    dm: I * r.m1 * dt,
                    d2m: I * r.m1 * d2t,
                    p: r.p1 * t + I * r.p0,
                    dp: r.p1 * dt,
                    d2p: r.p1 * d2t,
                    vt: Complex64::new(r.v0, 0.0),
                    dvt: zero,
                })
            }
            Self::Sampled(s) => {
                if z.im != 0.0 {
                    return Err(Error::Domain(
                        "tabulated couplings cannot be continued off the real axis".into(),
                    ));
                }
                let i = s.grid.index_of(z.re).ok_or(Error::OffGrid { x: z.re })?;
                let h = s.grid.h();
                let dm = fd::first_derivative(&s.m, h);
                let dp = fd::first_derivative(&s.p, h);
                let d2m = fd::second_derivative(&s.m, h);
                let d2p = fd::second_derivative(&s.p, h);
                let dvt = fd::first_derivative(&s.vt, h);
                Ok(CouplingJet {
                    m: s.m[i],
                    dm: dm[i],
                    d2m: d2m[i],
                    p: s.p[i],
                    dp: dp[i],
                    d2p: d2p[i],
                    vt: s.vt[i],
                    dvt: dvt[i],
                })
            }
        }
    }

    pub fn jet(&self, x: f64) -> Result<CouplingJet> {
        self.jet_at(Complex64::new(x, 0.0))
    }

    /// Jets for every point of `grid` shifted by `offset` into the complex plane.
    /// Tabulated couplings are differentiated once for the whole grid.
    pub fn jets_on(&self, grid: &GridSpec, offset: Complex64) -> Result<Vec<CouplingJet>> {
        match self {
            Self::Sampled(s) => {
                if offset != Complex64::new(0.0, 0.0) {
                    return Err(Error::Domain(
                        "tabulated couplings cannot be continued off the real axis".into(),
                    ));
                }
                if s.grid != *grid {
                    return Err(Error::Parameter(
                        "grid differs from the grid of the tabulated couplings".into(),
                    ));
                }
                let h = grid.h();
                let dm = fd::first_derivative(&s.m, h);
                let dp = fd::first_derivative(&s.p, h);
                let d2m = fd::second_derivative(&s.m, h);
                let d2p = fd::second_derivative(&s.p, h);
                let dvt = fd::first_derivative(&s.vt, h);
                Ok((0..grid.n)
                    .map(|i| CouplingJet {
                        m: s.m[i],
                        dm: dm[i],
                        d2m: d2m[i],
                        p: s.p[i],
                        dp: dp[i],
                        d2p: d2p[i],
                        vt: s.vt[i],
                        dvt: dvt[i],
                    })
                    .collect())
            }
            _ => grid
                .points()
                .into_iter()
                .map(|x| self.jet_at(Complex64::new(x, 0.0) + offset))
                .collect(),
        }
    }
}

/// `(M, P, Ṽ)` at `x`.
pub fn eval_couplings(
    fam: &CouplingFamily,
    x: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite("position".into()));
    }
    let j = fam.jet(x)?;
    Ok((j.m, j.p, j.vt))
}

/// `(A+, A-) = (M + iP, M - iP)` at `x`.
pub fn a_plus_minus(fam: &CouplingFamily, x: f64) -> Result<(Complex64, Complex64)> {
    let j = fam.jet(x)?;
    Ok((j.a_plus(), j.a_minus()))
}

/// Maximum parity violation of each real/imaginary part on a symmetric grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtReport {
    pub re_m_even: f64,
    pub im_m_odd: f64,
    pub re_p_odd: f64,
    pub im_p_even: f64,
    pub re_vt_even: f64,
    pub im_vt_odd: f64,
    pub tol: f64,
    pub pass: bool,
}

impl PtReport {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn violations(&self) -> [(&'static str, f64); 6] {
        [
            ("re_m_even", self.re_m_even),
            ("im_m_odd", self.im_m_odd),
            ("re_p_odd", self.re_p_odd),
            ("im_p_even", self.im_p_even),
            ("re_vt_even", self.re_vt_even),
            ("im_vt_odd", self.im_vt_odd),
        ]
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.violations()
            .into_iter()
            .filter(|(_, v)| *v > self.tol)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Checks the parity rules under which the Dirac equation is PT invariant:
/// real parts of `M` and `Ṽ` and the imaginary part of `P` are even, the
/// remaining parts odd.
pub fn pt_check(fam: &CouplingFamily, grid: &GridSpec, tol: f64) -> Result<PtReport> {
    if !grid.is_symmetric() {
        return Err(Error::Precondition(format!(
            "PT check needs a symmetric grid, got [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    let vals: Vec<(Complex64, Complex64, Complex64)> = match fam {
        CouplingFamily::Sampled(s) => {
            if s.grid != *grid {
                return Err(Error::Parameter(
                    "grid differs from the grid of the tabulated couplings".into(),
                ));
            }
            (0..grid.n).map(|i| (s.m[i], s.p[i], s.vt[i])).collect()
        }
        _ => grid
            .points()
            .into_iter()
            .map(|x| eval_couplings(fam, x))
            .collect::<Result<_>>()?,
    };
    let mut r = PtReport {
        re_m_even: 0.0,
        im_m_odd: 0.0,
        re_p_odd: 0.0,
        im_p_even: 0.0,
        re_vt_even: 0.0,
        im_vt_odd: 0.0,
        tol,
        pass: true,
    };
    for i in 0..grid.n {
        let (m, p, v) = vals[i];
        let (mm, pm, vm) = vals[grid.mirror(i)];
        r.re_m_even = r.re_m_even.max((m.re - mm.re).abs());
        r.im_m_odd = r.im_m_odd.max((m.im + mm.im).abs());
        r.re_p_odd = r.re_p_odd.max((p.re + pm.re).abs());
        r.im_p_even = r.im_p_even.max((p.im - pm.im).abs());
        r.re_vt_even = r.re_vt_even.max((v.re - vm.re).abs());
        r.im_vt_odd = r.im_vt_odd.max((v.im + vm.im).abs());
    }
    r.pass = r.violations().iter().all(|(_, v)| *v <= tol);
    Ok(r)
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("family parameters".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn osc(omega1: f64, m1: f64, omega2: f64, m2: f64) -> CouplingFamily {
        CouplingFamily::Oscillator(OscillatorParams { omega1, m1, omega2, m2, v0: 0.0 })
    }

    #[test]
    fn oscillator_pure_pseudoscalar() {
        let (m, p, v) = eval_couplings(&osc(0.0, 0.0, 1.0, 0.0), 2.0).unwrap();
        assert_eq!((m, p, v), (c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn rosen_morse_at_origin() {
        let fam = CouplingFamily::RosenMorse(RosenMorseParams {
            m0: 0.0,
            m1: 0.0,
            p0: 0.288675,
            p1: 0.866025,
            mu: 1.0,
            v0: 0.0,
        });
        let (m, p, v) = eval_couplings(&fam, 0.0).unwrap();
        assert_eq!(m, c(0.0, 0.0));
        assert!((p - c(0.0, 0.288675)).norm() < 1e-15);
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn quadratic_derives_a0() {
        let q = QuadraticParams { a1: 0.0, b1: 0.0, a2: 1.0 };
        assert_eq!(q.a0(), 1.0);
        let (m, p, v) = eval_couplings(&CouplingFamily::Quadratic(q), 1.0).unwrap();
        assert_eq!((m, p, v), (c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        let q = QuadraticParams { a1: 3.0, b1: 0.5, a2: -4.0 };
        assert_eq!(q.a0(), 5.0);
    }

    #[test]
    fn a_plus_minus_examples() {
        let s = SampledCouplings::from_fn(
            GridSpec::symmetric(1.0, 11).unwrap(),
            |_| c(1.0, 0.0),
            |_| c(0.0, 0.0),
            |_| c(0.0, 0.0),
        )
        .unwrap();
        let (ap, am) = a_plus_minus(&CouplingFamily::Sampled(s), 0.4).unwrap();
        assert_eq!((ap, am), (c(1.0, 0.0), c(1.0, 0.0)));

        let (ap, am) = a_plus_minus(&osc(0.6, 0.5, 1.0, 0.3), 0.0).unwrap();
        assert!((ap - c(0.2, 0.0)).norm() < 1e-15);
        assert!((am - c(0.8, 0.0)).norm() < 1e-15);
        // A+ = (m1 - m2) + i(ω1 + ω2) x
        let (ap, _) = a_plus_minus(&osc(0.6, 0.5, 1.0, 0.3), 1.5).unwrap();
        assert!((ap - c(0.2, 1.6 * 1.5)).norm() < 1e-14);
    }

    #[test]
    fn rosen_morse_a_plus_limit() {
        let r = RosenMorseParams { m0: 0.3, m1: -0.2, p0: 0.7, p1: 1.1, mu: 0.8, v0: 0.0 };
        let (ap, _) = a_plus_minus(&CouplingFamily::RosenMorse(r), 60.0).unwrap();
        let limit = c(r.m0 - r.p0, r.m1 + r.p1);
        assert!((ap - limit).norm() < 1e-14);
    }

    #[test]
    fn sampled_rejects_off_grid_points() {
        let s = SampledCouplings::from_fn(
            GridSpec::symmetric(1.0, 11).unwrap(),
            |x| c(x, 0.0),
            |_| c(0.0, 0.0),
            |_| c(0.0, 0.0),
        )
        .unwrap();
        let fam = CouplingFamily::Sampled(s);
        assert!(matches!(eval_couplings(&fam, 0.05), Err(Error::OffGrid { .. })));
        assert!(eval_couplings(&fam, 0.2).is_ok());
    }

    #[test]
    fn sampled_requires_equal_lengths() {
        let g = GridSpec::symmetric(1.0, 11).unwrap();
        let z = vec![c(0.0, 0.0); 11];
        assert!(SampledCouplings::new(g, z.clone(), z.clone(), vec![c(0.0, 0.0); 10]).is_err());
    }

    #[test]
    fn pt_check_examples() {
        let g = GridSpec::symmetric(3.0, 61).unwrap();
        let even = SampledCouplings::from_fn(g, |x| c(x * x, 0.0), |_| c(0.0, 0.0), |_| c(0.0, 0.0))
            .unwrap();
        let r = pt_check(&CouplingFamily::Sampled(even), &g, 1e-10).unwrap();
        assert!(r.pass);
        assert!(r.violations().iter().all(|(_, v)| *v == 0.0));

        let odd = SampledCouplings::from_fn(g, |x| c(x, 0.0), |_| c(0.0, 0.0), |_| c(0.0, 0.0))
            .unwrap();
        let r = pt_check(&CouplingFamily::Sampled(odd), &g, 1e-10).unwrap();
        assert!(!r.pass);
        assert_eq!(r.failing(), vec!["re_m_even"]);
        assert!((r.re_m_even - 6.0).abs() < 1e-12);

        let asym = GridSpec::new(-1.0, 2.0, 31).unwrap();
        assert!(matches!(
            pt_check(&osc(1.0, 0.0, 2.0, 0.0), &asym, 1e-10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oscillator_validation() {
        assert!(OscillatorParams { omega1: 1.0, m1: 0.0, omega2: -1.0, m2: 0.0, v0: 0.0 }
            .validate()
            .is_err());
        assert!(OscillatorParams { omega1: 2.0, m1: 0.0, omega2: 1.0, m2: 0.0, v0: 0.0 }
            .validate()
            .is_err());
    }

    #[test]
    fn rosen_morse_validation() {
        let mut r = RosenMorseParams { m0: 0.0, m1: 1.0, p0: 0.0, p1: 0.5, mu: 1.0, v0: 0.0 };
        assert!(r.validate().is_err());
        r.p1 = 2.0;
        assert!(r.validate().is_ok());
        r.mu = 0.0;
        assert!(r.validate().is_err());
    }

    #[test]
    fn oscillator_contour_identity() {
        // On the line x = y + shift, A+ = (ω1 + ω2)(λ + i y) exactly.
        let o = OscillatorParams { omega1: 0.6, m1: 0.5, omega2: 1.0, m2: 0.3, v0: 0.0 };
        let fam = CouplingFamily::Oscillator(o);
        for y in [-2.0, -0.3, 0.0, 0.7, 3.1] {
            let j = fam.jet_at(c(y, 0.0) + o.contour_shift()).unwrap();
            let expect = (o.omega1 + o.omega2) * c(o.lambda_signed(), y);
            assert!((j.a_plus() - expect).norm() < 1e-14, "y = {y}");
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let fams = [
            CouplingFamily::Quadratic(QuadraticParams { a1: 0.4, b1: -0.3, a2: 1.2 }),
            osc(0.6, 0.5, 1.0, 0.3),
            CouplingFamily::RosenMorse(RosenMorseParams {
                m0: 0.2,
                m1: 0.3,
                p0: -0.4,
                p1: 1.3,
                mu: 1.7,
                v0: 0.1,
            }),
        ];
        let h = 1e-5;
        for fam in &fams {
            for x in [-1.3, 0.0, 0.45, 2.0] {
                let z = c(x, 0.25);
                let j = fam.jet_at(z).unwrap();
                let jp = fam.jet_at(z + h).unwrap();
                let jm = fam.jet_at(z - h).unwrap();
                let tol = 1e-8 * (1.0 + j.dm.norm() + j.dp.norm());
                assert!(((jp.m - jm.m) / (2.0 * h) - j.dm).norm() < tol);
                assert!(((jp.p - jm.p) / (2.0 * h) - j.dp).norm() < tol);
                assert!(((jp.vt - jm.vt) / (2.0 * h) - j.dvt).norm() < tol);
                assert!(((jp.dm - jm.dm) / (2.0 * h) - j.d2m).norm() < tol);
                assert!(((jp.dp - jm.dp) / (2.0 * h) - j.d2p).norm() < tol);
            }
        }
    }

    fn family_strategy() -> impl Strategy<Value = CouplingFamily> {
        let r = -3.0..3.0f64;
        prop_oneof![
            (r.clone(), r.clone(), r.clone())
                .prop_map(|(a1, b1, a2)| CouplingFamily::Quadratic(QuadraticParams { a1, b1, a2 })),
            (r.clone(), r.clone(), r.clone(), r.clone(), r.clone()).prop_map(
                |(omega1, m1, omega2, m2, v0)| CouplingFamily::Oscillator(OscillatorParams {
                    omega1,
                    m1,
                    omega2,
                    m2,
                    v0
                })
            ),
            (r.clone(), r.clone(), r.clone(), r.clone(), 0.1..3.0f64, r).prop_map(
                |(m0, m1, p0, p1, mu, v0)| CouplingFamily::RosenMorse(RosenMorseParams {
                    m0,
                    m1,
                    p0,
                    p1,
                    mu,
                    v0
                })
            ),
        ]
    }

    proptest! {
        #[test]
        fn product_identity(fam in family_strategy(), x in -4.0..4.0f64) {
            let j = fam.jet(x).unwrap();
            let lhs = j.a_plus() * j.a_minus();
            let rhs = j.m * j.m + j.p * j.p;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn parity_conjugation(fam in family_strategy(), x in -4.0..4.0f64) {
            let (m, p, v) = eval_couplings(&fam, x).unwrap();
            let (mm, pm, vm) = eval_couplings(&fam, -x).unwrap();
            let tol = 1e-12 * (1.0 + m.norm() + p.norm() + v.norm());
            prop_assert!((mm - m.conj()).norm() <= tol);
            prop_assert!((vm - v.conj()).norm() <= tol);
            prop_assert!((pm + p.conj()).norm() <= tol);
        }

        #[test]
        fn families_pass_pt_check(fam in family_strategy()) {
            let g = GridSpec::symmetric(4.0, 41).unwrap();
            prop_assert!(pt_check(&fam, &g, 1e-12).unwrap().pass);
        }

        #[test]
        fn oscillator_modulus(o1 in -3.0..3.0f64, m1 in -3.0..3.0f64, o2 in -3.0..3.0f64,
                              m2 in -3.0..3.0f64, x in -4.0..4.0f64) {
            let (ap, _) = a_plus_minus(&osc(o1, m1, o2, m2), x).unwrap();
            let expect = (o1 + o2).powi(2) * x * x + (m1 - m2).powi(2);
            prop_assert!((ap.norm_sqr() - expect).abs() <= 1e-12 * (1.0 + expect));
        }
    }
}
