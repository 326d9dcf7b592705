use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform real grid `x_min, x_min + h, ..., x_max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 8;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NonFinite("grid bounds".into()));
        }
        if x_min >= x_max {
            return Err(Error::Parameter(format!(
                "grid requires x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::Parameter(format!(
                "grid requires at least {} points, got {n}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Sample `i`, measured from the nearer end so mirrored points of a
    /// symmetric grid are exact negatives of each other.
    pub fn x(&self, i: usize) -> f64 {
        if 2 * i < self.n - 1 {
            self.x_min + i as f64 * self.h()
        } else {
            self.x_max - (self.n - 1 - i) as f64 * self.h()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let scale = self.x_max.abs().max(self.x_min.abs());
        (self.x_min + self.x_max).abs() <= 1e-12 * scale
    }

    /// Same interval with the spacing halved (every old point is kept).
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    /// Index of the sample at `x`, if `x` lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.h();
        let i = t.round();
        if i < 0.0 || i > (self.n - 1) as f64 {
            return None;
        }
        let i = i as usize;
        let tol = 1e-9 * self.h().max(f64::EPSILON * x.abs());
        ((self.x(i) - x).abs() <= tol).then_some(i)
    }

    /// Index `j` with `x_j = -x_i` on a symmetric grid.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }
}
