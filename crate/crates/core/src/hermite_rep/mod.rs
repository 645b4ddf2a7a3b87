//! Hermite functions, the Schrödinger representation as matrices in the
//! Hermite basis, and the ambiguity and Wigner transforms.
//!
//! Conventions: `ρ(x,ξ)g(t) = e^{−πixξ} e^{2πitξ} g(t−x)`,
//! `A(f,g)(z) = ⟨f, ρ(z)g⟩` and `W(f,g) = F_σ(A(f,g))`. In the basis
//! `h_n(t) = 2^{1/4}(2^n n!)^{−1/2} H_n(√(2π) t) e^{−πt²}` the operator ρ(z)
//! acts as the displacement `D(α)` with `α = √π (x + iξ)`; its matrix
//! elements are scaled associated Laguerre functions of `π|z|²`. The
//! projective phase comes out as `ρ(z)ρ(w) = e^{πiσ(z,w)} ρ(z+w)`.

mod ambiguity;
mod basis;
mod displacement;
mod line;
mod sinc;
mod validation;

pub use ambiguity::{ambiguity, ambiguity_grid, shifted_gaussian, wigner, Checked};
pub use basis::{check_sizing, hermite_basis, hermite_values, synthesize_on_grid, Fingerprint, HermiteBasis};
pub use displacement::{ambiguity_hermite, displacement_entries, laguerre_diagonal, rho_matrix, rho_matrix_quadrature};
pub(crate) use displacement::{ln_factorials, radial_into};
pub use line::{LineGrid, WaveFunction};
pub use sinc::{shifted_samples, SINC_NEIGHBORS};
pub use validation::{circle_diagonal_quadrature, validate_circle_closed_form, validate_displacement, GateReport};
