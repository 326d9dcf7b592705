use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::couplings::CouplingFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "positive" | "+1" | "1" => Ok(Branch::Plus),
            "-" | "minus" | "negative" | "-1" => Ok(Branch::Minus),
            other => Err(format!("unknown branch {other:?} (expected + or -)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub n: usize,
    pub energy: f64,
    /// Imaginary part of the energy (zero for closed forms of real levels).
    pub imag: f64,
    pub branch: Branch,
    pub valid: bool,
    /// Residual of the defining spectral equation, or of `Hx = Ex` for oracles.
    pub residual: f64,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub family: CouplingFamily,
    pub states: Vec<BoundState>,
    /// Levels that were asked for but could not be produced.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl Spectrum {
    pub fn new(family: CouplingFamily, mut states: Vec<BoundState>) -> Self {
        sort_states(&mut states);
        Self { family, states, diagnostics: Vec::new() }
    }

    pub fn valid(&self) -> impl Iterator<Item = &BoundState> {
        self.states.iter().filter(|s| s.valid)
    }

    pub fn find(&self, n: usize, branch: Branch) -> Option<&BoundState> {
        self.states.iter().find(|s| s.n == n && s.branch == branch && s.valid)
    }

    /// Valid state closest to `energy`.
    pub fn nearest(&self, energy: f64) -> Option<&BoundState> {
        self.valid().min_by(|a, b| {
            (a.energy - energy)
                .abs()
                .partial_cmp(&(b.energy - energy).abs())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Orders by `n`, then `+` before `-`, then energy.
pub fn sort_states(states: &mut [BoundState]) {
    states.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.branch.cmp(&b.branch))
            .then(a.energy.partial_cmp(&b.energy).unwrap_or(Ordering::Equal))
    });
}
