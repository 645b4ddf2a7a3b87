//! Operators in the truncated Hermite basis: Schatten norms, the
//! Fourier–Wigner transform, the two phase-space convolutions and the
//! Weyl, τ and localization quantizations.
//!
//! `F_W(T)(z) = tr(Tρ(−z))`, `S⋆T(z) = tr(Sρ(z)PTPρ(−z))`,
//! `F⋆S = ∬F(z)ρ(z)Sρ(−z)dz` and `L_a = ∬F_σ(a)(z)ρ(z)dz`.

mod matrix;
mod quantize;
mod transforms;

pub use matrix::{parity, schatten_norm, OperatorMatrix, SingularSpectrum};
pub use quantize::{conv_fun_op, localization, tau_quantize, weyl_quantize, weyl_quantize_many, Quantizer, RhoCache};
pub(crate) use transforms::{check_basis, check_tau, fourier_wigner_unchecked, tau_factor};
pub use transforms::{conv_op_op, conv_op_op_grid, fourier_wigner, fourier_wigner_grid, low_rank_factors, rank_one, rank_one_coefficients};
