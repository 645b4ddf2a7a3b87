use crate::error::{QhaError, Result};
use crate::hermite_rep::{ln_factorials, radial_into, HermiteBasis};
use crate::numerics::{cis, pairwise_sum_c};
use crate::operator_calculus::{check_tau, fourier_wigner_unchecked, tau_factor, OperatorMatrix, Quantizer};
use crate::phase_space::{DiscreteMeasure, PhaseFunction, PhaseGrid};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

fn check_len(g: &[Complex64], mu: &DiscreteMeasure) -> Result<()> {
    if g.len() != mu.len() {
        return Err(QhaError::Dimension(format!("{} values for {} atoms", g.len(), mu.len())));
    }
    Ok(())
}

/// `E_W(G) = Σ_j w_j G(z_j) ρ(z_j)`.
pub fn quantum_extension(g: &[Complex64], mu: &DiscreteMeasure, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    check_len(g, mu)?;
    let c: Vec<Complex64> = g.iter().zip(mu.weights()).map(|(a, w)| a * w).collect();
    Ok(Quantizer::new(basis).combine(mu.atoms(), &c))
}

/// `Σ_j w_j e^{−πi(2τ−1)x_jξ_j} G(z_j) ρ(z_j)`, the extension operator
/// for τ-quantization. τ = 1/2 reduces to [`quantum_extension`] exactly.
pub fn tau_extension(g: &[Complex64], mu: &DiscreteMeasure, tau: f64, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    check_tau(tau)?;
    if tau == 0.5 {
        return quantum_extension(g, mu, basis);
    }
    check_len(g, mu)?;
    let c: Vec<Complex64> = g.iter().zip(mu.weights()).zip(mu.atoms()).map(|((a, w), z)| a * w * tau_factor(*z, tau)).collect();
    Ok(Quantizer::new(basis).combine(mu.atoms(), &c))
}

/// `E_σG(z) = Σ_j w_j G(z_j) e^{−2πiσ(z, z_j)}` at every grid node.
pub fn classical_extension(g: &[Complex64], mu: &DiscreteMeasure, grid: &PhaseGrid) -> Result<PhaseFunction> {
    check_len(g, mu)?;
    let m = grid.points();
    let nodes = grid.nodes();
    let coeffs: Vec<Complex64> = g.iter().zip(mu.weights()).map(|(a, w)| a * w).collect();
    // σ(z, ζ) = ζ_x z_ξ − z_x ζ_ξ separates into a row and a column factor.
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let x = nodes[i];
            let a: Vec<Complex64> = mu.atoms().iter().zip(&coeffs).map(|(z, c)| c * cis(2.0 * PI * x * z.xi())).collect();
            let mut row = vec![Complex64::new(0.0, 0.0); m];
            let mut terms = vec![Complex64::new(0.0, 0.0); a.len()];
            for (j, out) in row.iter_mut().enumerate() {
                let xi = nodes[j];
                for ((t, av), z) in terms.iter_mut().zip(&a).zip(mu.atoms()) {
                    *t = av * cis(-2.0 * PI * z.x() * xi);
                }
                *out = pairwise_sum_c(&terms);
            }
            row
        })
        .collect();
    PhaseFunction::new(*grid, rows.concat())
}

/// Both sides of `⟨Φ, F_W(T)⟩_{L²(μ)} = tr(E_W(Φ) T*)`.
pub fn adjoint_duality_check(phi: &[Complex64], t: &OperatorMatrix, mu: &DiscreteMeasure, basis: &HermiteBasis) -> Result<(Complex64, Complex64)> {
    check_len(phi, mu)?;
    crate::operator_calculus::check_basis(t, basis)?;
    let fw = fourier_wigner_unchecked(t, mu.atoms());
    let terms: Vec<Complex64> = phi.iter().zip(mu.weights()).zip(&fw).map(|((p, w), f)| w * p * f.conj()).collect();
    let lhs = pairwise_sum_c(&terms);
    let e = quantum_extension(phi, mu, basis)?;
    let rhs = e.hs_inner(t)?;
    Ok((lhs, rhs))
}

/// Radius of a measure whose atoms all sit on one centered circle.
pub(crate) fn ring_radius(mu: &DiscreteMeasure) -> Option<f64> {
    let r0 = mu.atoms().first()?.norm();
    if r0 <= 0.0 {
        return None;
    }
    mu.atoms().iter().all(|a| (a.norm() - r0).abs() <= 1e-12 * r0).then_some(r0)
}

/// Banded form of extensions over a ring. With `u_j = z_j / r`, entry
/// `(j + k, j)` of `Σ_l a_l ρ(z_l)` is `f_j^{(k)}(πr²) Σ_l a_l u_l^k` and
/// entry `(j, j + k)` is `(−1)^k f_j^{(k)}(πr²) Σ_l a_l conj(u_l)^k`, so
/// the radial factors are shared by every `G`.
pub(crate) struct Ring {
    units: Vec<Complex64>,
    radial: Vec<Vec<f64>>,
    n: usize,
}

impl Ring {
    pub(crate) fn new(mu: &DiscreteMeasure, n: usize) -> Option<Self> {
        let r = ring_radius(mu)?;
        let units = mu.atoms().iter().map(|a| Complex64::new(a.x() / r, a.xi() / r)).collect();
        let lf = ln_factorials(n);
        let x = PI * r * r;
        let radial = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut v = vec![0.0; n - k];
                radial_into(k, x, lf[k], &mut v);
                v
            })
            .collect();
        Some(Self { units, radial, n })
    }

    /// `(Σ_l a_l u_l^k, (−1)^k Σ_l a_l conj(u_l)^k)` for `k < count`.
    pub(crate) fn band_coefficients(units: &[Complex64], a: &[Complex64], count: usize) -> Vec<(Complex64, Complex64)> {
        let mut pw: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); units.len()];
        let mut lo = vec![Complex64::new(0.0, 0.0); units.len()];
        let mut hi = vec![Complex64::new(0.0, 0.0); units.len()];
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            for l in 0..units.len() {
                lo[l] = a[l] * pw[l];
                hi[l] = a[l] * pw[l].conj();
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.push((pairwise_sum_c(&lo), pairwise_sum_c(&hi) * sign));
            for (p, u) in pw.iter_mut().zip(units) {
                *p *= u;
            }
        }
        out
    }

    /// `Σ_l a_l ρ(z_l)` as a dense matrix.
    pub(crate) fn extension(&self, a: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.n;
        let bands = Self::band_coefficients(&self.units, a, n);
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (k, ((lo, hi), rad)) in bands.iter().zip(&self.radial).enumerate() {
            for (j, &f) in rad.iter().enumerate() {
                m[(j + k, j)] = lo * f;
                if k > 0 {
                    m[(j, j + k)] = hi * f;
                }
            }
        }
        m
    }
}
