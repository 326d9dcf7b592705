//! Norms and first-order residuals of sampled spinors.

use num_complex::Complex64;

use crate::couplings::CouplingFamily;
use crate::error::{Error, Result};
use crate::mapping::{constrained_vector_jet, SpinorOnGrid};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `∫ (|ψ+|² + |ψ-|²)` along the sampling line by composite Simpson.
pub fn quadrature_norm(spinor: &SpinorOnGrid) -> Result<f64> {
    if spinor.psi_plus.iter().chain(&spinor.psi_minus).any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("spinor samples".into()));
    }
    Ok(quad::simpson(&spinor.density(), spinor.grid.h()))
}

/// `∫₋₁¹ dz ρ(z)/(1 - z²)` by the midpoint rule on `n` cells, so the
/// endpoints are never sampled.
pub fn z_norm(density: impl Fn(f64) -> f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter("z_norm needs at least two cells".into()));
    }
    let h = 2.0 / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let z = -1.0 + (k as f64 + 0.5) * h;
        let v = density(z) / (1.0 - z * z);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("z-density at z = {z}")));
        }
        sum += v;
    }
    Ok(sum * h)
}

/// Pointwise residual of both first-order lines at interior samples.
///
/// Each residual is divided by `|ψ+| + |ψ-|` at that sample; samples below
/// `1e-10` of the peak magnitude are skipped.
pub fn residual_profile(
    spinor: &SpinorOnGrid,
    fam: &CouplingFamily,
    e: f64,
) -> Result<Vec<(f64, f64)>> {
    let g = spinor.grid;
    let jets = fam.jets_on(&g, spinor.contour_offset)?;
    let (pp, pm) = (&spinor.psi_plus, &spinor.psi_minus);
    let mag: Vec<f64> = pp.iter().zip(pm).map(|(a, b)| a.norm() + b.norm()).collect();
    let peak = mag.iter().cloned().fold(0.0, f64::max);
    let h2 = 2.0 * g.h();
    let mut out = Vec::new();
    for i in 1..g.n - 1 {
        if mag[i] < 1e-10 * peak {
            continue;
        }
        let j = &jets[i];
        let z = Complex64::new(g.x(i), 0.0) + spinor.contour_offset;
        let v = constrained_vector_jet(j, z)?;
        let dp = (pp[i + 1] - pp[i - 1]) / h2;
        let dm = (pm[i + 1] - pm[i - 1]) / h2;
        let r1 = -I * dp + (v - e) * pp[i] + j.a_plus() * pm[i];
        let r2 = I * dm + j.a_minus() * pp[i] + (v - e) * pm[i];
        out.push((g.x(i), r1.norm().max(r2.norm()) / mag[i]));
    }
    Ok(out)
}

/// Largest value of [`residual_profile`].
pub fn residual_check(spinor: &SpinorOnGrid, fam: &CouplingFamily, e: f64) -> Result<f64> {
    Ok(residual_profile(spinor, fam, e)?.into_iter().map(|(_, r)| r).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::SampledCouplings;
    use crate::grid::GridSpec;

    #[test]
    fn gaussian_norm() {
        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let c = std::f64::consts::PI.powf(-0.25);
        let pp: Vec<_> = g.points().into_iter().map(|x| Complex64::new(c * (-x * x / 2.0).exp(), 0.0)).collect();
        let pm = vec![Complex64::new(0.0, 0.0); g.n];
        let s = SpinorOnGrid::new(g, Complex64::new(0.0, 0.0), pp, pm, 0.0).unwrap();
        assert!((quadrature_norm(&s).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nan_is_rejected() {
        let g = GridSpec::new(-1.0, 1.0, 11).unwrap();
        let mut pp = vec![Complex64::new(1.0, 0.0); g.n];
        pp[3] = Complex64::new(f64::NAN, 0.0);
        let s = SpinorOnGrid {
            grid: g,
            contour_offset: Complex64::new(0.0, 0.0),
            psi_plus: pp,
            psi_minus: vec![Complex64::new(0.0, 0.0); g.n],
            energy: 0.0,
            norm: f64::NAN,
        };
        assert!(quadrature_norm(&s).is_err());
    }

    #[test]
    fn z_norm_of_weight() {
        // ρ = 1 - z² integrates to 2
        let v = z_norm(|z| 1.0 - z * z, 1000).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    // ψ = (1, m/(E+k)) e^{i k x} solves the free system with M = m, P = 0.
    fn plane_wave(n: usize, e: f64) -> (SpinorOnGrid, CouplingFamily) {
        let m = 1.0;
        let e_true: f64 = 1.5;
        let k = (e_true * e_true - m * m).sqrt();
        let g = GridSpec::new(-5.0, 5.0, n).unwrap();
        let fam = CouplingFamily::Sampled(
            SampledCouplings::from_fn(g, |_| Complex64::new(m, 0.0), |_| 0.0.into(), |_| 0.0.into())
                .unwrap(),
        );
        let pp: Vec<_> = g.points().into_iter().map(|x| (I * k * x).exp()).collect();
        let pm: Vec<_> = pp.iter().map(|p| p * (m / (e_true + k))).collect();
        (SpinorOnGrid::new(g, Complex64::new(0.0, 0.0), pp, pm, e).unwrap(), fam)
    }

    #[test]
    fn plane_wave_residual_is_second_order() {
        let (a, fa) = plane_wave(201, 1.5);
        let (b, fb) = plane_wave(401, 1.5);
        let ra = residual_check(&a, &fa, 1.5).unwrap();
        let rb = residual_check(&b, &fb, 1.5).unwrap();
        assert!(ra < 1e-2 && (3.5..4.5).contains(&(ra / rb)), "{ra} {rb}");
    }

    #[test]
    fn wrong_energy_does_not_converge() {
        let (a, fa) = plane_wave(201, 1.6);
        let (b, fb) = plane_wave(401, 1.6);
        let ra = residual_check(&a, &fa, 1.6).unwrap();
        let rb = residual_check(&b, &fb, 1.6).unwrap();
        assert!(ra > 0.02 && rb > 0.02 && (ra / rb - 1.0).abs() < 0.05, "{ra} {rb}");
    }
}
