//! Extension operators of measures on phase space, the transfer between
//! operator and function restriction, and the spectral experiments on
//! circles: Schatten thresholds, compactness and Bak-type ratios.
//!
//! `E_W(G) = ∫G(z)ρ(z)dμ(z)` is the quantum extension and
//! `E_σG = F_σ(G dμ)` the classical one; `L_{E_σG} = E_W(G)`.

mod extension;
mod probes;
mod spectra;
mod transfer;

pub use extension::{adjoint_duality_check, classical_extension, quantum_extension, tau_extension};
pub use probes::{
    bak_exponent, bak_ratio_sampler, compactness_probe, compactness_probe_with, BakStatistics, CompactnessOptions, CompactnessReport,
    CompactnessVerdict, ProbeLevel, ProbeMethod,
};
pub use spectra::{
    circle_spectrum, circle_spectrum_report, default_p_grid, schatten_threshold_report, schatten_threshold_report_with, tau_threshold,
    CircleSpectrum, SpectrumMethod, TauThresholdOptions, TauThresholdReport, ThresholdOptions, ThresholdReport,
};
pub use transfer::{default_transfer_grid, transfer_check, transfer_check_with, TransferDirection, TransferInput, TransferReport};
