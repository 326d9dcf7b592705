//! Shooting on `-χ'' + V_eff χ = E² χ` with a Wronskian match.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::couplings::QuadraticParams;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::mapping::{Domain, EffectiveProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Match point as a fraction of the box, 0.5 being the midpoint.
    pub match_fraction: f64,
    pub scan_points: usize,
    /// Largest accepted `|W|` at a minimum, relative to the bracket edges.
    pub accept: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { match_fraction: 0.5, scan_points: 200, accept: 1e-8 }
    }
}

type State = (Complex64, Complex64);

struct Integrator<'a> {
    prob: &'a EffectiveProblem,
    grid: GridSpec,
    stride: usize,
}

impl Integrator<'_> {
    fn rhs(&self, x: f64, e: f64, (c, d): State) -> State {
        (d, (self.prob.eval(x, e) - e * e) * c)
    }

    fn decay(&self, x: f64, e: f64) -> Result<Complex64> {
        let k = (self.prob.eval(x, e) - e * e).sqrt();
        if !k.is_finite() {
            return Err(Error::NonFinite(format!("effective potential at x = {x}")));
        }
        if k.re <= 0.0 {
            return Err(Error::Precondition(format!(
                "no decaying solution at x = {x} for E = {e} (Re √(V_eff - E²) = {})",
                k.re
            )));
        }
        Ok(k)
    }

    // Fourth-order Runge-Kutta from grid index `from` to `to`.
    fn integrate(&self, e: f64, from: usize, to: usize, start: State) -> State {
        let mut s = start;
        let step = self.stride as f64 * self.grid.h() * if to > from { 1.0 } else { -1.0 };
        let mut i = from;
        while i != to {
            let x = self.grid.x(i);
            let xm = x + 0.5 * step;
            let xn = x + step;
            let k1 = self.rhs(x, e, s);
            let k2 = self.rhs(xm, e, (s.0 + 0.5 * step * k1.0, s.1 + 0.5 * step * k1.1));
            let k3 = self.rhs(xm, e, (s.0 + 0.5 * step * k2.0, s.1 + 0.5 * step * k2.1));
            let k4 = self.rhs(xn, e, (s.0 + step * k3.0, s.1 + step * k3.1));
            s = (
                s.0 + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                s.1 + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
            let scale = s.0.norm().max(s.1.norm());
            if scale > 1e100 {
                s = (s.0 / scale, s.1 / scale);
            }
            i = if to > from { i + self.stride } else { i - self.stride };
        }
        s
    }

    fn match_index(&self, fraction: f64) -> usize {
        let last = self.grid.n - 1;
        let raw = (fraction * last as f64).round() as usize;
        let m = (raw / self.stride) * self.stride;
        m.clamp(self.stride, last - self.stride)
    }

    /// Wronskian of the two unit vectors `(χ, χ')/|(χ, χ')|` at the match point,
/// i.e. the sine of the angle between the left and right data.
    fn wronskian(&self, e: f64, fraction: f64) -> Result<Complex64> {
        let last = self.grid.n - 1;
        let (xl, xr) = (self.grid.x(0), self.grid.x(last));
        let kl = self.decay(xl, e)?;
        let kr = self.decay(xr, e)?;
        let m = self.match_index(fraction);
        let one = Complex64::new(1.0, 0.0);
        let (cl, dl) = self.integrate(e, 0, m, (one, kl));
        let (cr, dr) = self.integrate(e, last, m, (one, -kr));
        let w = cl * dr - dl * cr;
        let scale = cl.norm().hypot(dl.norm()) * cr.norm().hypot(dr.norm());
        if !(scale > 0.0 && w.is_finite()) {
            return Err(Error::NonFinite(format!("shooting at E = {e}")));
        }
        Ok(w / scale)
    }

    /// `χ` on every `stride`-th grid point, continuous at the match point.
    fn eigenfunction(&self, e: f64, fraction: f64) -> Result<Vec<Complex64>> {
        let last = self.grid.n - 1;
        let kl = self.decay(self.grid.x(0), e)?;
        let kr = self.decay(self.grid.x(last), e)?;
        let m = self.match_index(fraction);
        let one = Complex64::new(1.0, 0.0);
        let mut chi = vec![Complex64::new(0.0, 0.0); self.grid.n];
        let mut s = (one, kl);
        chi[0] = s.0;
        let mut i = 0;
        while i < m {
            s = self.integrate(e, i, i + self.stride, s);
            i += self.stride;
            chi[i] = s.0;
        }
        let left_at_m = chi[m];
        let mut right = vec![Complex64::new(0.0, 0.0); self.grid.n];
        let mut s = (one, -kr);
        right[last] = s.0;
        let mut i = last;
        while i > m {
            s = self.integrate(e, i, i - self.stride, s);
            i -= self.stride;
            right[i] = s.0;
        }
        let ratio = left_at_m / right[m];
        for j in m..=last {
            chi[j] = right[j] * ratio;
        }
        Ok(chi)
    }
}

fn integrator<'a>(prob: &'a EffectiveProblem, grid: &GridSpec) -> Result<Integrator<'a>> {
    let stride = match prob.domain {
        Domain::Analytic => 1,
        Domain::Grid(g) => {
            if g != *grid {
                return Err(Error::Parameter("shooting grid differs from the sampled grid".into()));
            }
            if grid.n % 2 == 0 {
                return Err(Error::Parameter(
                    "sampled problems need an odd point count (steps of 2h)".into(),
                ));
            }
            2
        }
    };
    Ok(Integrator { prob, grid: *grid, stride })
}

/// One accepted root of the matching condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootRoot {
    pub energy: f64,
    /// `|W|` at the root.
    pub mismatch: f64,
    /// `|W|` scale at the bracket edges.
    pub edge_scale: f64,
}

fn golden(f: &mut impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// All real energies in `bracket` where the matching Wronskian vanishes.
pub fn shoot_all(
    prob: &EffectiveProblem,
    grid: &GridSpec,
    bracket: (f64, f64),
    opts: &ShootOptions,
) -> Result<Vec<ShootRoot>> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Parameter(format!("empty energy bracket [{lo}, {hi}]")));
    }
    let int = integrator(prob, grid)?;
    let mut f = |e: f64| int.wronskian(e, opts.match_fraction).map(|w| w.norm());
    let k = opts.scan_points.max(3);
    let es: Vec<f64> = (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect();
    let ws: Vec<f64> = es.iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let edge_scale = ws[0].max(ws[k - 1]).max(f64::MIN_POSITIVE);
    let mut roots: Vec<ShootRoot> = Vec::new();
    for i in 1..k - 1 {
        if ws[i] <= ws[i - 1] && ws[i] <= ws[i + 1] {
            let (e, w) = golden(&mut f, es[i - 1], es[i + 1])?;
            if w <= opts.accept * edge_scale
                && !roots.iter().any(|r| (r.energy - e).abs() < 1e-9 * (1.0 + e.abs()))
            {
                roots.push(ShootRoot { energy: e, mismatch: w, edge_scale });
            }
        }
    }
    Ok(roots)
}

/// The real energy in `bracket` with the smallest accepted matching mismatch.
pub fn shoot_effective(
    prob: &EffectiveProblem,
    grid: &GridSpec,
    bracket: (f64, f64),
) -> Result<f64> {
    shoot_effective_with(prob, grid, bracket, &ShootOptions::default()).map(|r| r.energy)
}

pub fn shoot_effective_with(
    prob: &EffectiveProblem,
    grid: &GridSpec,
    bracket: (f64, f64),
    opts: &ShootOptions,
) -> Result<ShootRoot> {
    shoot_all(prob, grid, bracket, opts)?
        .into_iter()
        .min_by(|a, b| a.mismatch.total_cmp(&b.mismatch))
        .ok_or_else(|| {
            Error::NotFound(format!(
                "no matching energy in [{}, {}] (threshold {:e} of the edge scale)",
                bracket.0, bracket.1, opts.accept
            ))
        })
}

/// `χ` for energy `e` on `grid`, glued at the match point. For sampled
/// problems only every second sample is filled.
pub fn effective_eigenfunction(
    prob: &EffectiveProblem,
    grid: &GridSpec,
    e: f64,
) -> Result<Vec<Complex64>> {
    let int = integrator(prob, grid)?;
    int.eigenfunction(e, 0.5)
}

/// Result of the damped self-consistency iteration for energy-dependent problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub energy: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Solves `E² = -b1² + a2²/Ω(E)² + (2n+1)Ω(E)` with `Ω(E)² = 2Ea2 - 2a1b1` by
/// damped iteration of the level-`n` oscillator energy.
pub fn fixed_point_energy(
    q: &QuadraticParams,
    n: usize,
    guess: f64,
    max_iter: usize,
) -> Result<FixedPoint> {
    if q.a2 == 0.0 {
        return Err(Error::Parameter("a2 = 0 leaves no oscillator".into()));
    }
    let level = (2 * n + 1) as f64;
    let mut e = guess;
    let mut trace = vec![e];
    for it in 0..max_iter {
        let om2 = q.omega_sq(e);
        if !(om2 > 0.0) {
            return Err(Error::Convergence(format!(
                "Ω² = {om2} ≤ 0 at E = {e} after {it} iterations; trace {trace:?}"
            )));
        }
        let om = om2.sqrt();
        let rad = -q.b1 * q.b1 + q.a2 * q.a2 / om2 + level * om;
        if !(rad >= 0.0) {
            return Err(Error::Convergence(format!(
                "negative E² = {rad} at E = {e}; trace {trace:?}"
            )));
        }
        let target = e.signum() * rad.sqrt();
        if (target - e).abs() < 1e-10 {
            return Ok(FixedPoint { energy: target, iterations: it + 1, trace });
        }
        e += 0.5 * (target - e);
        trace.push(e);
        if !e.is_finite() {
            return Err(Error::Convergence(format!("diverged; trace {trace:?}")));
        }
    }
    Err(Error::Convergence(format!(
        "no convergence in {max_iter} iterations; last iterates {:?}",
        &trace[trace.len().saturating_sub(5)..]
    )))
}
