use super::matrix::{parity, svd, OperatorMatrix};
use crate::error::{invalid, QhaError, Result};
use crate::hermite_rep::{ambiguity_grid, displacement_entries, synthesize_on_grid, HermiteBasis, LineGrid, WaveFunction};
use crate::phase_space::{PhaseFunction, PhaseGrid, PhasePoint};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

pub(crate) fn check_basis(t: &OperatorMatrix, basis: &HermiteBasis) -> Result<()> {
    if t.dim() != basis.size() {
        return Err(QhaError::Dimension(format!("operator of dim {} against a basis of {}", t.dim(), basis.size())));
    }
    t.fingerprint().join(basis.fingerprint())?;
    Ok(())
}

/// `F_W(T)(z) = tr(T ρ(−z))` per target.
pub fn fourier_wigner(t: &OperatorMatrix, targets: &[PhasePoint], basis: &HermiteBasis) -> Result<Vec<Complex64>> {
    check_basis(t, basis)?;
    Ok(fourier_wigner_unchecked(t, targets))
}

pub(crate) fn fourier_wigner_unchecked(t: &OperatorMatrix, targets: &[PhasePoint]) -> Vec<Complex64> {
    let n = t.dim();
    // T row-major, so each term pairs T(r, c) with ρ(c, r) stored at [r n + c].
    let tr: Vec<Complex64> = t.entries().transpose().iter().copied().collect();
    targets
        .par_iter()
        .map(|z| {
            let rho = displacement_entries(-*z, n);
            tr.iter().zip(&rho).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// `S⋆T(z) = tr(S ρ(z) P T P ρ(−z))` per target, by dense products.
pub fn conv_op_op(s: &OperatorMatrix, t: &OperatorMatrix, targets: &[PhasePoint]) -> Result<Vec<Complex64>> {
    if s.dim() != t.dim() {
        return Err(QhaError::Dimension(format!("{} vs {}", s.dim(), t.dim())));
    }
    s.fingerprint().join(t.fingerprint())?;
    let n = s.dim();
    let p = parity(n);
    let q = p.mul(t)?.mul(&p)?;
    Ok(targets
        .par_iter()
        .map(|z| {
            let rho = DMatrix::from_vec(n, n, displacement_entries(*z, n));
            let a = s.entries() * &rho;
            let b = q.entries() * rho.adjoint();
            // tr(AB) = Σ_ij A_ij B_ji
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += a[(i, j)] * b[(j, i)];
                }
            }
            acc
        })
        .collect())
}

/// `T = Σ_i u_i v_i^*` from a thin SVD, dropping singular values below
/// `rel_tol · s_max`. Each pair is (u_i s_i, v_i) as coefficient vectors.
pub fn low_rank_factors(t: &OperatorMatrix, rel_tol: f64) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let (u, sv, v) = svd(t.entries());
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    order
        .into_iter()
        .filter(|&k| sv[k] > rel_tol * smax)
        .map(|k| {
            let uk: Vec<Complex64> = u.column(k).iter().map(|x| x * sv[k]).collect();
            (uk, v.column(k).iter().copied().collect())
        })
        .collect()
}

/// Line grid whose spacing is half the phase spacing with FFT length
/// `2/h²`, if that grid is wide enough for the basis.
fn commensurate_line(grid: &PhaseGrid, basis: &HermiteBasis) -> Option<LineGrid> {
    let h = grid.spacing();
    let k = 2.0 / (h * h);
    let kr = k.round();
    if (k - kr).abs() > 1e-9 * k || kr as usize % 2 != 0 {
        return None;
    }
    let half = kr * h / 4.0;
    if half + 1e-12 < basis.grid().half_width() || kr > 1e6 {
        return None;
    }
    LineGrid::new(half, kr as usize).ok()
}

/// `S⋆T` on every node of `grid`. With `S = Σ u_i ⊗ v_i` and
/// `T = Σ a_j ⊗ b_j` the trace collapses to
/// `Σ_ij A(u_i, P b_j)(z) · conj(A(v_i, P a_j)(z))`, so the cost is a few
/// ambiguity grids per pair of factors instead of two dense products per
/// node.
pub fn conv_op_op_grid(s: &OperatorMatrix, t: &OperatorMatrix, grid: &PhaseGrid, basis: &HermiteBasis) -> Result<PhaseFunction> {
    check_basis(s, basis)?;
    check_basis(t, basis)?;
    let fs = low_rank_factors(s, 1e-14);
    let ft = low_rank_factors(t, 1e-14);
    let line = commensurate_line(grid, basis).unwrap_or(*basis.grid());
    let synth = |c: &[Complex64]| -> WaveFunction {
        if line == *basis.grid() {
            basis.synthesize(c).expect("coefficient count matches the basis")
        } else {
            synthesize_on_grid(c, &line)
        }
    };
    let par = |c: &[Complex64]| -> Vec<Complex64> { c.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).collect() };
    let us: Vec<(WaveFunction, WaveFunction)> = fs.iter().map(|(u, v)| (synth(u), synth(v))).collect();
    let ts: Vec<(WaveFunction, WaveFunction)> = ft.iter().map(|(a, b)| (synth(&par(a)), synth(&par(b)))).collect();
    let mut out = PhaseFunction::zeros(*grid);
    for (u, v) in &us {
        for (pa, pb) in &ts {
            let x = ambiguity_grid(u, pb, grid)?;
            let y = ambiguity_grid(v, pa, grid)?;
            for ((o, a), b) in out.values_mut().iter_mut().zip(x.values()).zip(y.values()) {
                *o += a * b.conj();
            }
        }
    }
    Ok(out)
}

/// Rank-one operator `f ⊗ g : h ↦ ⟨h, g⟩ f`; entry (m, n) is `⟨f,h_m⟩ conj⟨g,h_n⟩`.
pub fn rank_one(f: &WaveFunction, g: &WaveFunction, basis: &HermiteBasis) -> Result<OperatorMatrix> {
    let a = basis.coefficients(f)?;
    let b = basis.coefficients(g)?;
    Ok(rank_one_coefficients(&a, &b, basis))
}

/// `f ⊗ g` from Hermite coefficient vectors.
pub fn rank_one_coefficients(a: &[Complex64], b: &[Complex64], basis: &HermiteBasis) -> OperatorMatrix {
    let n = basis.size();
    OperatorMatrix::from_fn(n, basis.fingerprint(), |r, c| {
        let x = a.get(r).copied().unwrap_or_default();
        let y = b.get(c).copied().unwrap_or_default();
        x * y.conj()
    })
}

/// Grid L^p norm of `F_W(T)` on `grid`, a Hausdorff–Young diagnostic.
pub fn fourier_wigner_grid(t: &OperatorMatrix, grid: &PhaseGrid, basis: &HermiteBasis) -> Result<PhaseFunction> {
    check_basis(t, basis)?;
    let m = grid.points();
    let targets: Vec<PhasePoint> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| grid.point(i, j)).collect();
    let vals = fourier_wigner_unchecked(t, &targets);
    PhaseFunction::new(*grid, vals)
}

pub(crate) fn tau_factor(z: PhasePoint, tau: f64) -> Complex64 {
    let (s, c) = (-PI * (2.0 * tau - 1.0) * z.x() * z.xi()).sin_cos();
    Complex64::new(c, s)
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(invalid(format!("tau must lie in [0, 1], got {tau}")));
    }
    Ok(())
}
