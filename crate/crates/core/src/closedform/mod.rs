//! Closed-form spectra and spinors of the three solvable coupling families.

pub mod oscillator;
pub mod quadratic;
pub mod rosen_morse;

pub use oscillator::{oscillator_norm, oscillator_spectrum, oscillator_spinor, OscillatorNorm};
pub use quadratic::{quadratic_spectrum, SPURIOUS_REASON};
pub use rosen_morse::{
    rosen_morse_reality_check, rosen_morse_spectrum, rosen_morse_spinor, RealityReport,
    RosenMorseSpinorReport,
};

use crate::couplings::CouplingFamily;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Closed-form spectrum of any solvable family; `n_max` is ignored for the
/// hyperbolic family, whose level count is fixed by its parameters.
pub fn closed_form_spectrum(fam: &CouplingFamily, n_max: usize) -> Result<Spectrum> {
    match fam {
        CouplingFamily::Quadratic(q) => quadratic_spectrum(q, n_max),
        CouplingFamily::Oscillator(o) => oscillator_spectrum(o, n_max),
        CouplingFamily::RosenMorse(r) => rosen_morse_spectrum(r),
        CouplingFamily::Sampled(_) => {
            Err(Error::Parameter("tabulated couplings have no closed-form spectrum".into()))
        }
    }
}
