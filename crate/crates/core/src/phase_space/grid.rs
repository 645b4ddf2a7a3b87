use super::PhasePoint;
use crate::error::{invalid, QhaError, Result};
use crate::numerics::cis;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Uniform centered grid on phase space with `M` endpoint-exclusive nodes
/// per axis: `-L + k h`, `h = 2L/M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    half_width: f64,
    points: usize,
}

impl PhaseGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("grid half width must be positive, got {half_width}")));
        }
        if points == 0 || points % 2 != 0 {
            return Err(invalid(format!("grid point count must be even and positive, got {points}")));
        }
        Ok(Self { half_width, points })
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

    /// Node `k` along either axis. Computed as `(k - M/2) h` so that mirrored
    /// nodes are exact negatives of each other.
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 - (self.points / 2) as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.node(k)).collect()
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::raw(self.node(i), self.node(j))
    }

    /// Spacing of the frequency lattice induced by the discrete transform.
    pub fn frequency_spacing(&self) -> f64 {
        1.0 / (2.0 * self.half_width)
    }

    pub fn frequency_half_width(&self) -> f64 {
        1.0 / (2.0 * self.spacing())
    }

    /// The frequency lattice coincides with the node lattice (M = 4L²).
    pub fn is_self_dual(&self) -> bool {
        let m = self.points as f64;
        (4.0 * self.half_width * self.half_width - m).abs() <= 1e-12 * m
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Complex samples on a [`PhaseGrid`], row-major with rows indexed by x and
/// columns by ξ.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunction {
    grid: PhaseGrid,
    values: Vec<Complex64>,
}

impl PhaseFunction {
    pub fn new(grid: PhaseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QhaError::Dimension(format!("phase function needs {} samples, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QhaError::NonFinite("phase function samples"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: PhaseGrid, mut f: impl FnMut(PhasePoint) -> Complex64) -> Self {
        let m = grid.points();
        let mut values = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                values.push(f(grid.point(i, j)));
            }
        }
        Self { grid, values }
    }

    pub fn from_real_fn(grid: PhaseGrid, mut f: impl FnMut(PhasePoint) -> f64) -> Self {
        Self::from_fn(grid, |z| Complex64::new(f(z), 0.0))
    }

    pub(crate) fn from_values_unchecked(grid: PhaseGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.points() + j]
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Grid L^p norm `(h² Σ |F|^p)^{1/p}`; `p = ∞` gives the max modulus.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        let h2 = self.grid.spacing().powi(2);
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (h2 * s).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let h2 = self.grid.spacing().powi(2);
        (h2 * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the outermost ring of nodes.
    pub fn boundary_max(&self) -> f64 {
        let m = self.grid.points();
        let mut b: f64 = 0.0;
        for k in 0..m {
            for &(i, j) in &[(0, k), (m - 1, k), (k, 0), (k, m - 1)] {
                b = b.max(self.at(i, j).norm());
            }
        }
        b
    }

    /// `h² Σ F(z_k) conj(G(z_k))`.
    pub fn inner(&self, other: &PhaseFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(invalid("phase functions live on different grids"));
        }
        let h2 = self.grid.spacing().powi(2);
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * h2)
    }

    /// `h² Σ F(z_k)`.
    pub fn integral(&self) -> Complex64 {
        let h2 = self.grid.spacing().powi(2);
        self.values.iter().sum::<Complex64>() * h2
    }

    /// Riemann-sum symplectic Fourier transform at arbitrary targets,
    /// `h² Σ_k F(z_k) e^{−2πiσ(ζ, z_k)}`.
    pub fn fourier_at(&self, targets: &[PhasePoint]) -> Vec<Complex64> {
        let m = self.grid.points();
        let h2 = self.grid.spacing().powi(2);
        let nodes = self.grid.nodes();
        let mut out = Vec::with_capacity(targets.len());
        let mut vx = vec![Complex64::new(0.0, 0.0); m];
        let mut vxi = vec![Complex64::new(0.0, 0.0); m];
        for zeta in targets {
            // σ(ζ, z) = x η − y ξ for ζ = (y, η), z = (x, ξ).
            for k in 0..m {
                vx[k] = cis(-2.0 * PI * nodes[k] * zeta.xi());
                vxi[k] = cis(2.0 * PI * zeta.x() * nodes[k]);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                let row = &self.values[i * m..(i + 1) * m];
                let inner: Complex64 = row.iter().zip(&vxi).map(|(a, b)| a * b).sum();
                acc += vx[i] * inner;
            }
            out.push(acc * h2);
        }
        out
    }
}

/// How [`symplectic_fourier_with`] evaluates the discrete transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierMethod {
    /// FFT when the grid is self-dual, direct separable sums otherwise.
    Auto,
    Direct,
    Fft,
}

/// Plain 2-D Riemann-sum Fourier transform of `f` at the tensor product of
/// `omega1` (dual to x) and `omega2` (dual to ξ):
/// `out[a * omega2.len() + b] = h² Σ F(x_k, ξ_l) e^{−2πi(ω1_a x_k + ω2_b ξ_l)}`.
pub fn plain_fourier_at(f: &PhaseFunction, omega1: &[f64], omega2: &[f64]) -> Vec<Complex64> {
    let m = f.grid.points();
    let nodes = f.grid.nodes();
    let h2 = f.grid.spacing().powi(2);
    let n1 = omega1.len();
    let n2 = omega2.len();
    let e2: Vec<Complex64> = omega2.iter().flat_map(|&w| nodes.iter().map(move |&t| cis(-2.0 * PI * w * t))).collect();
    // Transform along ξ first: g[k][b] = Σ_l F[k][l] e2[b][l].
    let mut g = vec![Complex64::new(0.0, 0.0); m * n2];
    for k in 0..m {
        let row = &f.values[k * m..(k + 1) * m];
        for b in 0..n2 {
            let e = &e2[b * m..(b + 1) * m];
            g[k * n2 + b] = row.iter().zip(e).map(|(a, c)| a * c).sum();
        }
    }
    let e1: Vec<Complex64> = omega1.iter().flat_map(|&w| nodes.iter().map(move |&t| cis(-2.0 * PI * w * t))).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for a in 0..n1 {
        let e = &e1[a * m..(a + 1) * m];
        let dst = &mut out[a * n2..(a + 1) * n2];
        for k in 0..m {
            let c = e[k];
            let src = &g[k * n2..(k + 1) * n2];
            for b in 0..n2 {
                dst[b] += c * src[b];
            }
        }
        for v in dst.iter_mut() {
            *v *= h2;
        }
    }
    out
}

/// Samples of F_σ(F) on the grid of `f` (automatic method selection).
pub fn symplectic_fourier(f: &PhaseFunction) -> Result<PhaseFunction> {
    symplectic_fourier_with(f, FourierMethod::Auto)
}

/// F_σ(F)(ζ) = F(F)(Jζ): the plain transform evaluated at ω1 = η, ω2 = −y.
pub fn symplectic_fourier_with(f: &PhaseFunction, method: FourierMethod) -> Result<PhaseFunction> {
    let grid = f.grid;
    let m = grid.points();
    if m < 4 {
        return Err(invalid(format!("symplectic Fourier transform needs M >= 4, got {m}")));
    }
    let use_fft = match method {
        FourierMethod::Auto => grid.is_self_dual(),
        FourierMethod::Direct => false,
        FourierMethod::Fft => {
            if !grid.is_self_dual() {
                return Err(invalid("FFT path needs a self-dual grid (M = 4L²)"));
            }
            true
        }
    };
    let values = if use_fft { fft_path(f) } else { direct_path(f) };
    Ok(PhaseFunction { grid, values })
}

fn direct_path(f: &PhaseFunction) -> Vec<Complex64> {
    let m = f.grid.points();
    let nodes = f.grid.nodes();
    let neg: Vec<f64> = nodes.iter().map(|t| -t).collect();
    let plain = plain_fourier_at(f, &nodes, &neg);
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for l in 0..m {
            values[j * m + l] = plain[l * m + j];
        }
    }
    values
}

fn fft_path(f: &PhaseFunction) -> Vec<Complex64> {
    let m = f.grid.points();
    let h2 = f.grid.spacing().powi(2);
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut buf: Vec<Complex64> = (0..m * m).map(|idx| f.values[idx] * sign(idx / m + idx % m)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    for row in buf.chunks_exact_mut(m) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for l in 0..m {
        for k in 0..m {
            col[k] = buf[k * m + l];
        }
        fft.process(&mut col);
        for k in 0..m {
            buf[k * m + l] = col[k];
        }
    }
    // plain[a][b] = h² (−1)^{a+b} buf[a][b]; F_σ at (y_j, η_l) is plain[l][(M−j) mod M].
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        let b = (m - j) % m;
        for l in 0..m {
            values[j * m + l] = buf[l * m + b] * (h2 * sign(l + b));
        }
    }
    values
}
