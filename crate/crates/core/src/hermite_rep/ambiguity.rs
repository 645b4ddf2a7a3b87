use super::basis::HermiteBasis;
use super::line::{LineGrid, WaveFunction};
use super::sinc::shifted_samples;
use crate::error::{invalid, Result};
use crate::numerics::cis;
use crate::phase_space::{symplectic_fourier, PhaseFunction, PhaseGrid, PhasePoint};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// A result together with its boundary-decay diagnostic.
#[derive(Clone, Debug)]
pub struct Checked<T> {
    pub value: T,
    /// Largest modulus on the boundary ring of the relevant grid.
    pub boundary_leak: f64,
    /// Set when `boundary_leak` exceeds the operation's tolerance.
    pub warning: bool,
}

/// Trapezoid quadrature of `∫ f(t + x/2) conj(g(t − x/2)) e^{−2πiξt} dt`.
pub fn ambiguity(f: &WaveFunction, g: &WaveFunction, z: PhasePoint) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(invalid("ambiguity needs both functions on one grid"));
    }
    let grid = *f.grid();
    if z.x().abs() > grid.half_width() {
        return Err(invalid(format!("|x| = {} leaves the line grid of half width {}", z.x().abs(), grid.half_width())));
    }
    let fp = shifted_samples(f.values(), &grid, z.x() / 2.0);
    let gm = shifted_samples(g.values(), &grid, -z.x() / 2.0);
    let s: Complex64 = (0..grid.points()).map(|i| fp[i] * gm[i].conj() * cis(-2.0 * PI * z.xi() * grid.node(i))).sum();
    Ok(s * grid.spacing())
}

/// FFT length that maps the line grid onto the ξ nodes of `grid`, if any:
/// `K h_t h = 1` with `K ≥ M_t`.
fn fft_length(line: &LineGrid, grid: &PhaseGrid) -> Option<usize> {
    let k = 1.0 / (line.spacing() * grid.spacing());
    let kr = k.round();
    if (k - kr).abs() <= 1e-9 * k && kr as usize >= line.points() {
        Some(kr as usize)
    } else {
        None
    }
}

/// Samples of `A(f,g)` on every node of `grid`. Each x-row forms the
/// shifted product once and transforms it over ξ, by FFT when the line and
/// phase grids are commensurate and by direct sums otherwise. Rows with
/// `|x| > T` use the zero extension of `f` and `g`.
pub fn ambiguity_grid(f: &WaveFunction, g: &WaveFunction, grid: &PhaseGrid) -> Result<PhaseFunction> {
    if f.grid() != g.grid() {
        return Err(invalid("ambiguity needs both functions on one grid"));
    }
    let line = *f.grid();
    let mt = line.points();
    let m = grid.points();
    let xs = grid.nodes();
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    let h = line.spacing();
    match fft_length(&line, grid) {
        Some(k) => {
            let fft = FftPlanner::<f64>::new().plan_fft_forward(k);
            let mut buf = vec![Complex64::new(0.0, 0.0); k];
            // Bin q carries e^{−2πiq i/K}; ξ_l = q h and t_i = (i − M_t/2) h_t
            // add the post-phase e^{πi q M_t/K}.
            let post: Vec<Complex64> = (0..m)
                .map(|l| {
                    let q = l as f64 - (m / 2) as f64;
                    cis(PI * q * mt as f64 / k as f64)
                })
                .collect();
            for (row, &x) in xs.iter().enumerate() {
                let fp = shifted_samples(f.values(), &line, x / 2.0);
                let gm = shifted_samples(g.values(), &line, -x / 2.0);
                buf.fill(Complex64::new(0.0, 0.0));
                for i in 0..mt {
                    buf[i] = fp[i] * gm[i].conj();
                }
                fft.process(&mut buf);
                for l in 0..m {
                    let q = l as isize - (m / 2) as isize;
                    let bin = q.rem_euclid(k as isize) as usize;
                    out[row * m + l] = buf[bin] * post[l] * h;
                }
            }
        }
        None => {
            let ts = line.nodes();
            let twiddle: Vec<Complex64> = xs.iter().flat_map(|&xi| ts.iter().map(move |&t| cis(-2.0 * PI * xi * t))).collect();
            for (row, &x) in xs.iter().enumerate() {
                let fp = shifted_samples(f.values(), &line, x / 2.0);
                let gm = shifted_samples(g.values(), &line, -x / 2.0);
                let prod: Vec<Complex64> = fp.iter().zip(&gm).map(|(a, b)| a * b.conj()).collect();
                for l in 0..m {
                    let tw = &twiddle[l * mt..(l + 1) * mt];
                    let s: Complex64 = prod.iter().zip(tw).map(|(a, b)| a * b).sum();
                    out[row * m + l] = s * h;
                }
            }
        }
    }
    Ok(PhaseFunction::from_values_unchecked(*grid, out))
}

/// All `A(h_m, h_n)(z)` for `m, n < N` by quadrature, row-major in (m, n).
pub(crate) fn ambiguity_matrix_quadrature(basis: &HermiteBasis, z: PhasePoint) -> Result<Vec<Complex64>> {
    let grid = *basis.grid();
    if z.x().abs() > grid.half_width() {
        return Err(invalid("shift leaves the basis grid"));
    }
    let n = basis.size();
    let mt = grid.points();
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for k in 0..n {
        let v: Vec<Complex64> = basis.row(k).iter().map(|&b| Complex64::new(b, 0.0)).collect();
        plus.push(shifted_samples(&v, &grid, z.x() / 2.0));
        minus.push(shifted_samples(&v, &grid, -z.x() / 2.0));
    }
    let tw: Vec<Complex64> = (0..mt).map(|i| cis(-2.0 * PI * z.xi() * grid.node(i))).collect();
    let h = grid.spacing();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        let pa: Vec<Complex64> = plus[a].iter().zip(&tw).map(|(u, w)| u * w).collect();
        for b in 0..n {
            let s: Complex64 = pa.iter().zip(&minus[b]).map(|(u, v)| u * v.conj()).sum();
            out[a * n + b] = s * h;
        }
    }
    Ok(out)
}

/// `W(f,g) = F_σ(A(f,g))` on `grid`; warns when the ambiguity samples have
/// not decayed below 1e-12 at the boundary.
pub fn wigner(f: &WaveFunction, g: &WaveFunction, grid: &PhaseGrid) -> Result<Checked<PhaseFunction>> {
    let a = ambiguity_grid(f, g, grid)?;
    let leak = a.boundary_max();
    let w = symplectic_fourier(&a)?;
    Ok(Checked { value: w, boundary_leak: leak, warning: leak > 1e-12 })
}

/// `ρ(z0)g_0(t) = e^{−πi x0 ξ0} e^{2πitξ0} g_0(t − x0)`.
pub fn shifted_gaussian(z0: PhasePoint, grid: &LineGrid) -> Result<WaveFunction> {
    if z0.x().abs() > grid.half_width() / 2.0 {
        return Err(invalid(format!("shift x0 = {} too large for half width {}", z0.x(), grid.half_width())));
    }
    let c = 2f64.powf(0.25);
    let pre = cis(-PI * z0.x() * z0.xi());
    Ok(WaveFunction::from_fn(*grid, |t| pre * cis(2.0 * PI * t * z0.xi()) * (c * (-PI * (t - z0.x()).powi(2)).exp())))
}
