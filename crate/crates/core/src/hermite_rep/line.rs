use crate::error::{invalid, QhaError, Result};
use num_complex::Complex64;

/// Centered, endpoint-exclusive grid on the line: `t_i = (i − M_t/2) h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineGrid {
    half_width: f64,
    points: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("line half width must be positive, got {half_width}")));
        }
        if points == 0 || points % 2 != 0 {
            return Err(invalid(format!("line point count must be even and positive, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    /// Smallest grid satisfying the Hermite sizing rule for `n` functions.
    pub fn for_hermite(n: usize) -> Self {
        let t = ((n as f64 / std::f64::consts::PI).sqrt() + 2.0).ceil();
        let m = 8 * (t * t).ceil() as usize;
        Self { half_width: t, points: m }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - (self.points / 2) as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }
}

/// Complex samples of a function on a [`LineGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: LineGrid,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: LineGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(QhaError::Dimension(format!("wave function needs {} samples, got {}", grid.points(), values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QhaError::NonFinite("wave function samples"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: LineGrid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = (0..grid.points()).map(|i| f(grid.node(i))).collect();
        Self { grid, values }
    }

    pub(crate) fn from_values_unchecked(grid: LineGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.points());
        Self { grid, values }
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `⟨f, g⟩ = h Σ f(t_i) conj(g(t_i))`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(invalid("wave functions live on different grids"));
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn norm(&self) -> f64 {
        (self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> WaveFunction {
        WaveFunction { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Relative L² distance `‖f − g‖ / ‖g‖`.
    pub fn relative_error(&self, reference: &WaveFunction) -> Result<f64> {
        if self.grid != reference.grid {
            return Err(invalid("wave functions live on different grids"));
        }
        let num: f64 = self.values.iter().zip(&reference.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = reference.values.iter().map(|b| b.norm_sqr()).sum();
        Ok((num / den).sqrt())
    }
}
