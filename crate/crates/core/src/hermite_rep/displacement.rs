use super::ambiguity::ambiguity_matrix_quadrature;
use super::basis::HermiteBasis;
use crate::operator_calculus::OperatorMatrix;
use crate::phase_space::PhasePoint;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

const RESCALE: f64 = 1e16;

/// `ln k!` for `k < n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n.max(1));
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Scaled associated Laguerre functions
/// `f_j^{(k)}(x) = √(j!/(j+k)!) x^{k/2} e^{−x/2} L_j^{(k)}(x)` for
/// `j = 0..out.len()`, by the normalized three-term recurrence. A running
/// log scale absorbs the seed `x^{k/2} e^{−x/2}/√k!` so it never
/// underflows before the recurrence has grown.
pub(crate) fn radial_into(k: usize, x: f64, ln_fact_k: f64, out: &mut [f64]) {
    let count = out.len();
    if count == 0 {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        if k == 0 {
            // f_j^{(0)}(0) = L_j(0) = 1.
            out.fill(1.0);
        }
        return;
    }
    let kf = k as f64;
    let mut log_scale = 0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_fact_k;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = factor;
    for j in 0..count - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf * (jf + kf)).sqrt() * prev) / ((jf + 1.0) * (jf + kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
            factor = log_scale.exp();
        }
        out[j + 1] = cur * factor;
    }
}

/// `e^{−x/2} L_n(x)` for `n < count`, the diagonal matrix elements of ρ(z)
/// at `x = π|z|²`.
pub fn laguerre_diagonal(x: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    radial_into(0, x, 0.0, &mut out);
    out
}

/// Unit phase of `α = √π(x + iξ)`, chosen so that `−z` gives the exact
/// negation of the phase of `z`.
fn unit_phase(z: PhasePoint) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(z.x() / r, z.xi() / r)
    }
}

/// Column-major `n × n` block of `⟨ρ(z)h_c, h_r⟩` (row r, column c).
pub fn displacement_entries(z: PhasePoint, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    if n == 0 {
        return out;
    }
    let x = PI * z.norm_sqr();
    let u = unit_phase(z);
    let lf = ln_factorials(n);
    let mut radial = vec![0.0; n];
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let len = n - k;
        radial_into(k, x, lf[k], &mut radial[..len]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let lower = phase;
        let upper = phase.conj() * sign;
        for (j, &f) in radial[..len].iter().enumerate() {
            // Entry (j + k, j) below the diagonal and (j, j + k) above it.
            out[j * n + (j + k)] = lower * f;
            if k > 0 {
                out[(j + k) * n + j] = upper * f;
            }
        }
        phase *= u;
    }
    out
}

/// Closed-form `A(h_m, h_n)(z) = conj⟨ρ(z)h_n, h_m⟩`.
pub fn ambiguity_hermite(m: usize, n: usize, z: PhasePoint) -> Complex64 {
    let (lo, k) = if m >= n { (n, m - n) } else { (m, n - m) };
    let x = PI * z.norm_sqr();
    let lf = ln_factorials(k + 1);
    let mut radial = vec![0.0; lo + 1];
    radial_into(k, x, lf[k], &mut radial);
    let f = radial[lo];
    let u = unit_phase(z);
    let mut phase = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        phase *= u;
    }
    let d = if m >= n {
        phase * f
    } else {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        phase.conj() * (sign * f)
    };
    d.conj()
}

/// Matrix of ρ(z) in the first `N` Hermite functions, via the closed form.
pub fn rho_matrix(z: PhasePoint, basis: &HermiteBasis) -> OperatorMatrix {
    let n = basis.size();
    let m = DMatrix::from_vec(n, n, displacement_entries(z, n));
    OperatorMatrix::from_parts(m, basis.fingerprint())
}

/// Matrix of ρ(z) by trapezoid quadrature of the ambiguity integrals; the
/// reference path behind the closed form.
pub fn rho_matrix_quadrature(z: PhasePoint, basis: &HermiteBasis) -> crate::Result<OperatorMatrix> {
    let a = ambiguity_matrix_quadrature(basis, z)?;
    let n = basis.size();
    let m = DMatrix::from_fn(n, n, |r, c| a[r * n + c].conj());
    Ok(OperatorMatrix::from_parts(m, basis.fingerprint()))
}
