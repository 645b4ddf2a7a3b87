//! Phase-space geometry: points, the symplectic form, grids and grid
//! functions, the symplectic Fourier transform, discrete measures and the
//! regularity diagnostics used by the restriction experiments.

mod grid;
mod measure;
mod regularity;

pub use grid::{plain_fourier_at, symplectic_fourier, symplectic_fourier_with, FourierMethod, PhaseFunction, PhaseGrid};
pub use measure::{
    build_measure, fourier_of_measure, parseval_measures, read_atoms_csv, reweight_constants, write_atoms_csv, AtomRecord, DiscreteMeasure,
    MeasureKind, MeasureSpec, ReweightConstants,
};
pub use regularity::{regularity_estimates, regularity_estimates_with, RegularityEstimates, RegularityOptions};

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point z = (x, ξ) of phase space (d = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    x: f64,
    xi: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, xi: 0.0 };

    pub fn new(x: f64, xi: f64) -> Result<Self> {
        if !x.is_finite() || !xi.is_finite() {
            return Err(invalid(format!("phase point ({x}, {xi}) is not finite")));
        }
        Ok(Self { x, xi })
    }

    /// Internal constructor for values produced by finite arithmetic.
    #[inline]
    pub(crate) const fn raw(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn xi(&self) -> f64 {
        self.xi
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.xi * self.xi
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.xi)
    }

    /// J(x, ξ) = (ξ, −x).
    #[inline]
    pub fn rotate_j(&self) -> Self {
        Self::raw(self.xi, -self.x)
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::raw(self.x + o.x, self.xi + o.xi)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::raw(self.x - o.x, self.xi - o.xi)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint::raw(-self.x, -self.xi)
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, p: PhasePoint) -> PhasePoint {
        PhasePoint::raw(self * p.x, self * p.xi)
    }
}

/// σ((x,ξ),(y,η)) = yξ − xη.
#[inline]
pub fn symplectic_form(z: PhasePoint, w: PhasePoint) -> f64 {
    w.x * z.xi - z.x * w.xi
}
