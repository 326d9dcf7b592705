//! Reduction of the first-order Dirac system to an effective Schrödinger
//! problem for `χ = ψ+/√A+`, and the way back from `χ` to the spinor.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::couplings::{CouplingFamily, CouplingJet};
use crate::error::{Error, Result};
use crate::fd;
use crate::grid::GridSpec;
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative size below which `A+` counts as vanishing.
pub const SINGULAR_TOL: f64 = 1e-12;

fn check_a_plus(j: &CouplingJet, z: Complex64) -> Result<Complex64> {
    let a = j.a_plus();
    let scale = 1.0f64.max(j.m.norm() + j.p.norm());
    if !(a.norm() > SINGULAR_TOL * scale) {
        return Err(Error::Singularity { x: z.re, magnitude: a.norm() });
    }
    Ok(a)
}

/// `V = (i/2) A+'/A+ + Ṽ` from a coupling jet.
pub fn constrained_vector_jet(j: &CouplingJet, z: Complex64) -> Result<Complex64> {
    let a = check_a_plus(j, z)?;
    Ok(0.5 * I * j.d_a_plus() / a + j.vt)
}

/// Vector potential that removes the first-derivative coupling of `ψ+`.
pub fn constrained_vector(fam: &CouplingFamily, x: f64) -> Result<Complex64> {
    constrained_vector_at(fam, Complex64::new(x, 0.0))
}

pub fn constrained_vector_at(fam: &CouplingFamily, z: Complex64) -> Result<Complex64> {
    constrained_vector_jet(&fam.jet_at(z)?, z)
}

/// `M² + P² - Ṽ² + 2EṼ - iṼ'` from a coupling jet.
pub fn effective_potential_jet(j: &CouplingJet, e: f64) -> Complex64 {
    j.m * j.m + j.p * j.p - j.vt * j.vt + 2.0 * e * j.vt - I * j.dvt
}

/// Effective potential of `-χ'' + V_eff χ = E² χ` under the constraint.
pub fn effective_potential(fam: &CouplingFamily, e: f64, x: f64) -> Result<Complex64> {
    effective_potential_at(fam, e, Complex64::new(x, 0.0))
}

pub fn effective_potential_at(fam: &CouplingFamily, e: f64, z: Complex64) -> Result<Complex64> {
    Ok(effective_potential_jet(&fam.jet_at(z)?, e))
}

/// Real and imaginary parts of `V_eff` written out in the real and
/// imaginary parts of the couplings.
pub fn effective_decomposition(fam: &CouplingFamily, e: f64, x: f64) -> Result<(f64, f64)> {
    let j = fam.jet(x)?;
    let (mr, mi) = (j.m.re, j.m.im);
    let (pr, pi) = (j.p.re, j.p.im);
    let (vr, vi) = (j.vt.re, j.vt.im);
    let (dvr, dvi) = (j.dvt.re, j.dvt.im);
    let re = mr * mr - mi * mi + pr * pr - pi * pi - vr * vr + vi * vi + 2.0 * e * vr + dvi;
    let im = 2.0 * (mr * mi + pr * pi - vr * vi) + 2.0 * e * vi - dvr;
    Ok((re, im))
}

/// Effective potential for an arbitrary (unconstrained) vector potential,
/// with all derivatives taken by finite differences on `grid`:
///
/// `E(2V - iA+'/A+) - iV' + i(A+'/A+)V + A+A- - V² + ¾(A+'/A+)² - ½A+''/A+`.
pub fn general_effective_potential(
    grid: &GridSpec,
    m: &[Complex64],
    p: &[Complex64],
    v: &[Complex64],
    e: f64,
) -> Result<Vec<Complex64>> {
    let n = grid.n;
    if m.len() != n || p.len() != n || v.len() != n {
        return Err(Error::Parameter(format!("arrays must have {n} entries")));
    }
    let h = grid.h();
    let ap: Vec<Complex64> = m.iter().zip(p).map(|(m, p)| m + I * p).collect();
    let dap = fd::first_derivative(&ap, h);
    let d2ap = fd::second_derivative(&ap, h);
    let dv = fd::first_derivative(v, h);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = ap[i];
        let scale = 1.0f64.max(m[i].norm() + p[i].norm());
        if !(a.norm() > SINGULAR_TOL * scale) {
            return Err(Error::Singularity { x: grid.x(i), magnitude: a.norm() });
        }
        let am = m[i] - I * p[i];
        let l = dap[i] / a;
        let vi = v[i];
        let val = e * (2.0 * vi - I * l) - I * dv[i] + I * l * vi
            + (a * am - vi * vi + 0.75 * l * l - 0.5 * d2ap[i] / a);
        out.push(val);
    }
    Ok(out)
}

/// Bracket `-iV' - (E - V)²` of `-ψ+'' + [...] ψ+ = 0` when only the vector
/// coupling is present. `V'` by finite differences.
pub fn pure_vector_effective(grid: &GridSpec, v: &[Complex64], e: f64) -> Result<Vec<Complex64>> {
    if v.len() != grid.n {
        return Err(Error::Parameter(format!("array must have {} entries", grid.n)));
    }
    let dv = fd::first_derivative(v, grid.h());
    Ok(v.iter()
        .zip(&dv)
        .map(|(v, dv)| -I * dv - (e - v) * (e - v))
        .collect())
}

/// Where an effective potential can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Any real `x`.
    Analytic,
    /// Only the sample points of a grid.
    Grid(GridSpec),
}

type PotentialFn = dyn Fn(f64, f64) -> Complex64 + Send + Sync;

/// `x ↦ V_eff(x; E)` together with what the solvers need to know about it.
#[derive(Clone)]
pub struct EffectiveProblem {
    potential: Arc<PotentialFn>,
    pub energy_dependent: bool,
    pub v0: f64,
    pub domain: Domain,
}

impl fmt::Debug for EffectiveProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EffectiveProblem")
            .field("energy_dependent", &self.energy_dependent)
            .field("v0", &self.v0)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl EffectiveProblem {
    /// Wraps an arbitrary potential `f(x, E)`. An energy-independent problem
    /// must ignore `E`.
    pub fn new(
        potential: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        energy_dependent: bool,
        v0: f64,
        domain: Domain,
    ) -> Self {
        Self { potential: Arc::new(potential), energy_dependent, v0, domain }
    }

    /// Effective problem of a coupling family under the constraint.
    pub fn from_family(fam: &CouplingFamily) -> Result<Self> {
        fam.validate()?;
        let energy_dependent = fam.energy_dependent();
        let v0 = fam.v0();
        match fam {
            CouplingFamily::Sampled(s) => {
                let grid = s.grid;
                let jets = fam.jets_on(&grid, Complex64::new(0.0, 0.0))?;
                Ok(Self::new(
                    move |x, e| match grid.index_of(x) {
                        Some(i) => effective_potential_jet(&jets[i], e),
                        None => Complex64::new(f64::NAN, f64::NAN),
                    },
                    energy_dependent,
                    v0,
                    Domain::Grid(grid),
                ))
            }
            _ => {
                let fam = fam.clone();
                Ok(Self::new(
                    move |x, e| {
                        effective_potential(&fam, e, x)
                            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                    },
                    energy_dependent,
                    v0,
                    Domain::Analytic,
                ))
            }
        }
    }

    pub fn eval(&self, x: f64, e: f64) -> Complex64 {
        (self.potential)(x, e)
    }

    /// `max |V_eff(-x) - conj V_eff(x)|` over a symmetric grid.
    pub fn pt_violation(&self, grid: &GridSpec, e: f64) -> Result<f64> {
        if !grid.is_symmetric() {
            return Err(Error::Precondition("PT property needs a symmetric grid".into()));
        }
        let vals: Vec<Complex64> = grid.points().iter().map(|&x| self.eval(x, e)).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("effective potential".into()));
        }
        Ok((0..grid.n)
            .map(|i| (vals[grid.mirror(i)] - vals[i].conj()).norm())
            .fold(0.0, f64::max))
    }
}

/// A two-component spinor sampled on `grid + contour_offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorOnGrid {
    pub grid: GridSpec,
    /// Constant imaginary shift of the sampling line (zero on the real axis).
    pub contour_offset: Complex64,
    pub psi_plus: Vec<Complex64>,
    pub psi_minus: Vec<Complex64>,
    pub energy: f64,
    /// `∫ (|ψ+|² + |ψ-|²)` along the sampling line.
    pub norm: f64,
}

impl SpinorOnGrid {
    pub fn new(
        grid: GridSpec,
        contour_offset: Complex64,
        psi_plus: Vec<Complex64>,
        psi_minus: Vec<Complex64>,
        energy: f64,
    ) -> Result<Self> {
        if psi_plus.len() != grid.n || psi_minus.len() != grid.n {
            return Err(Error::Parameter(format!(
                "spinor arrays must have {} entries (got {}, {})",
                grid.n,
                psi_plus.len(),
                psi_minus.len()
            )));
        }
        let norm = quad::simpson(&density(&psi_plus, &psi_minus), grid.h());
        Ok(Self { grid, contour_offset, psi_plus, psi_minus, energy, norm })
    }

    /// `|ψ+|² + |ψ-|²` at every sample.
    pub fn density(&self) -> Vec<f64> {
        density(&self.psi_plus, &self.psi_minus)
    }

    /// Multiplies both components by `c` and updates the norm.
    pub fn scale(&mut self, c: f64) {
        for z in self.psi_plus.iter_mut().chain(self.psi_minus.iter_mut()) {
            *z *= c;
        }
        self.norm *= c * c;
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        if !(self.norm > 0.0 && self.norm.is_finite()) {
            return Err(Error::NonFinite(format!("spinor norm {}", self.norm)));
        }
        let c = 1.0 / self.norm.sqrt();
        self.scale(c);
        Ok(self)
    }

    /// Share of the norm carried by the outer 5% of samples on each side.
    /// Close to zero for a bound state resolved inside the box.
    pub fn edge_fraction(&self) -> f64 {
        let d = self.density();
        let k = (self.grid.n / 20).max(1);
        let edge: f64 = d[..k].iter().chain(&d[d.len() - k..]).sum();
        let total: f64 = d.iter().sum();
        if total > 0.0 {
            edge / total
        } else {
            0.0
        }
    }
}

fn density(a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
}

/// `√A` along a sequence of samples with the phase of `A` unwrapped, so the
/// root stays continuous where `A` winds across the negative real axis.
pub fn continuous_sqrt(values: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for a in values {
        let mut phase = a.arg();
        if let Some(p) = prev {
            let two_pi = 2.0 * std::f64::consts::PI;
            phase += two_pi * ((p - phase) / two_pi).round();
        }
        prev = Some(phase);
        out.push(Complex64::from_polar(a.norm().sqrt(), 0.5 * phase));
    }
    out
}

/// Builds `ψ+ = √A+ χ` and `ψ- = (iψ+' + (E - V)ψ+)/A+` on the real axis.
pub fn reconstruct_spinor(
    chi: &[Complex64],
    fam: &CouplingFamily,
    e: f64,
    grid: &GridSpec,
) -> Result<SpinorOnGrid> {
    reconstruct_spinor_on(chi, fam, e, grid, Complex64::new(0.0, 0.0))
}

/// [`reconstruct_spinor`] with the samples taken on `x + offset`.
pub fn reconstruct_spinor_on(
    chi: &[Complex64],
    fam: &CouplingFamily,
    e: f64,
    grid: &GridSpec,
    offset: Complex64,
) -> Result<SpinorOnGrid> {
    if chi.len() != grid.n {
        return Err(Error::Parameter(format!("χ must have {} samples", grid.n)));
    }
    if chi.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("χ".into()));
    }
    let jets = fam.jets_on(grid, offset)?;
    let mut ap = Vec::with_capacity(grid.n);
    let mut v = Vec::with_capacity(grid.n);
    for (i, j) in jets.iter().enumerate() {
        let z = Complex64::new(grid.x(i), 0.0) + offset;
        ap.push(check_a_plus(j, z)?);
        v.push(constrained_vector_jet(j, z)?);
    }
    let root = continuous_sqrt(&ap);
    let psi_plus: Vec<Complex64> = root.iter().zip(chi).map(|(r, c)| r * c).collect();
    let dpsi = fd::first_derivative(&psi_plus, grid.h());
    let psi_minus: Vec<Complex64> = (0..grid.n)
        .map(|i| (I * dpsi[i] + (e - v[i]) * psi_plus[i]) / ap[i])
        .collect();
    SpinorOnGrid::new(*grid, offset, psi_plus, psi_minus, e)
}
