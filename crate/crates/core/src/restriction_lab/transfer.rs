use crate::error::Result;
use crate::hermite_rep::{displacement_entries, HermiteBasis};
use crate::operator_calculus::{check_basis, conv_fun_op, conv_op_op_grid, fourier_wigner, rank_one_coefficients, OperatorMatrix};
use crate::phase_space::{DiscreteMeasure, PhaseFunction, PhaseGrid};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const IDENTITY_TOLERANCE: f64 = 1e-6;
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferDirection {
    OperatorToFunction,
    FunctionToOperator,
}

/// What gets transferred: an operator `T` (through the Cohen class
/// `Q_T(g_0, g_{z_0})`) or a symbol `F` (through `A_F^{g_0, g_{z_0}}`).
#[derive(Clone, Copy, Debug)]
pub enum TransferInput<'a> {
    Operator(&'a OperatorMatrix),
    Function(&'a PhaseFunction),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub direction: TransferDirection,
    /// Max over atoms of the identity defect, relative to the largest
    /// right-hand side (absolute when that vanishes).
    pub identity_error: f64,
    /// `min_j |A(g_{z_0}, g_0)(z_j)|`.
    pub achieved_floor: f64,
    /// `e^{−πR²/2}`.
    pub theoretical_floor: f64,
    pub identity_passed: bool,
    pub floor_passed: bool,
    pub passed: bool,
}

/// Phase grid used for the Cohen-class function: half-width 6 with
/// spacing 1/12, which also admits the FFT path of the ambiguity grids.
pub fn default_transfer_grid() -> PhaseGrid {
    PhaseGrid::new(6.0, 144).expect("valid grid")
}

pub fn transfer_check(input: TransferInput<'_>, mu: &DiscreteMeasure, basis: &HermiteBasis) -> Result<TransferReport> {
    transfer_check_with(input, mu, basis, &default_transfer_grid())
}

/// Evaluates the pointwise identity behind the transfer at every atom,
/// with the window `g_{z_0} = ρ(z_0)g_0` centered at the measure's center
/// and `R` its radius bound.
///
/// Operator direction: `|F_σ(Q_T)(z)| = |F_W(T)(z)| |A(g_{z_0}, g_0)(z)|`,
/// the left side from a grid Cohen-class function and a Riemann-sum
/// Fourier transform, the right side from traces.
/// Function direction: `F_W(A_F)(z) = F_W(g_{z_0} ⊗ g_0)(z) F_σ(F)(z)`,
/// the left side from the quadrature localization operator.
pub fn transfer_check_with(input: TransferInput<'_>, mu: &DiscreteMeasure, basis: &HermiteBasis, grid: &PhaseGrid) -> Result<TransferReport> {
    let n = basis.size();
    let z0 = mu.center();
    let rho0 = displacement_entries(z0, n);
    let mut e0 = vec![Complex64::new(0.0, 0.0); n];
    e0[0] = Complex64::new(1.0, 0.0);
    // Column 0 of ρ(z0) holds the coefficients of g_{z0}.
    let window = rank_one_coefficients(&rho0[..n], &e0, basis);
    let win_fw = fourier_wigner(&window, mu.atoms(), basis)?;

    let (direction, lhs, rhs): (_, Vec<Complex64>, Vec<Complex64>) = match input {
        TransferInput::Operator(t) => {
            check_basis(t, basis)?;
            let q = conv_op_op_grid(&window, t, grid, basis)?;
            let lhs = q.fourier_at(mu.atoms()).iter().map(|v| Complex64::new(v.norm(), 0.0)).collect();
            let fw = fourier_wigner(t, mu.atoms(), basis)?;
            let rhs = fw.iter().zip(&win_fw).map(|(a, b)| Complex64::new(a.norm() * b.norm(), 0.0)).collect();
            (TransferDirection::OperatorToFunction, lhs, rhs)
        }
        TransferInput::Function(f) => {
            let a = conv_fun_op(f, &window, basis)?.value;
            let lhs = fourier_wigner(&a, mu.atoms(), basis)?;
            let ff = f.fourier_at(mu.atoms());
            let rhs = ff.iter().zip(&win_fw).map(|(a, b)| a * b).collect();
            (TransferDirection::FunctionToOperator, lhs, rhs)
        }
    };
    let scale = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let defect = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let identity_error = if scale > 0.0 { defect / scale } else { defect };
    let achieved_floor = win_fw.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let r = mu.radius_bound();
    let theoretical_floor = (-PI * r * r / 2.0).exp();
    let identity_passed = identity_error < IDENTITY_TOLERANCE;
    let floor_passed = achieved_floor >= theoretical_floor - FLOOR_SLACK;
    Ok(TransferReport {
        direction,
        identity_error,
        achieved_floor,
        theoretical_floor,
        identity_passed,
        floor_passed,
        passed: identity_passed && floor_passed,
    })
}
