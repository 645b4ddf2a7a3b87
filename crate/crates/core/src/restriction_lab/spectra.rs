use super::extension::{ring_radius, Ring};
use crate::error::{invalid, QhaError, Result};
use crate::hermite_rep::{circle_diagonal_quadrature, laguerre_diagonal, ln_factorials, radial_into, validate_circle_closed_form, GateReport};
use crate::numerics::{linear_fit, pairwise_sum};
use crate::operator_calculus::{check_tau, tau_factor};
use crate::phase_space::DiscreteMeasure;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Indices checked against quadrature before the closed form is trusted.
const GATE_COUNT: usize = 256;
/// Largest spectrum the quadrature fallback will attempt.
const QUADRATURE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleSpectrum {
    #[serde(skip)]
    pub values: Vec<f64>,
    pub gate: GateReport,
    pub method: SpectrumMethod,
}

/// Eigenvalues `λ_n`, `n < n_max`, of `E_W(1)` for the circle of radius `r`
/// and total mass `mass`. The operator is diagonal by rotation invariance.
/// The closed form `mass e^{−πr²/2} L_n(πr²)` is used only after it
/// matches the quadrature diagonal for the first indices; otherwise the
/// quadrature itself is returned (for modest `n_max`) and the method says
/// so.
pub fn circle_spectrum_report(r: f64, n_max: usize, mass: f64) -> Result<CircleSpectrum> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite() && mass > 0.0 && mass.is_finite()) {
        return Err(invalid(format!("circle needs r > 0 and mass > 0, got r = {r}, mass = {mass}")));
    }
    let gate = validate_circle_closed_form(r, mass, n_max.min(GATE_COUNT))?;
    if gate.passed {
        let values = laguerre_diagonal(PI * r * r, n_max).into_iter().map(|v| v * mass).collect();
        return Ok(CircleSpectrum { values, gate, method: SpectrumMethod::ClosedForm });
    }
    if n_max > QUADRATURE_LIMIT {
        return Err(QhaError::Gate(format!(
            "{} failed (max error {:.3e}) and n_max = {n_max} is beyond the quadrature fallback",
            gate.name, gate.max_error
        )));
    }
    let values = circle_diagonal_quadrature(r, mass, n_max, 4096)?;
    Ok(CircleSpectrum { values, gate, method: SpectrumMethod::Quadrature })
}

pub fn circle_spectrum(r: f64, n_max: usize, mass: f64) -> Result<Vec<f64>> {
    Ok(circle_spectrum_report(r, n_max, mass)?.values)
}

/// Conventions for [`schatten_threshold_report_with`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdOptions {
    /// The tail starts at index `⌊split · N⌋`.
    pub split: f64,
    /// p* is where the tail ratio falls through this level.
    pub crossing: f64,
    /// Index range of the log-log decay fit.
    pub fit_range: (f64, f64),
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { split: 0.5, crossing: 0.05, fit_range: (1e3, 1e5) }
    }
}

/// `3.0, 3.1, …, 5.0`.
pub fn default_p_grid() -> Vec<f64> {
    (0..=20).map(|k| 3.0 + 0.1 * k as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Least-squares slope of `log|λ_n|` against `log n` over the fit range.
    pub decay_exponent: Option<f64>,
    pub fit_points: usize,
    pub p_grid: Vec<f64>,
    pub tail_ratios: Vec<f64>,
    pub p_star: Option<f64>,
    /// No p in the grid brings the tail ratio below the crossing level.
    pub not_compact: bool,
    /// Fewer than 10⁴ values; tails are not reliable.
    pub short_input: bool,
    pub options: ThresholdOptions,
}

pub fn schatten_threshold_report(eigs: &[f64], p_grid: &[f64]) -> Result<ThresholdReport> {
    schatten_threshold_report_with(eigs, p_grid, &ThresholdOptions::default())
}

pub fn schatten_threshold_report_with(eigs: &[f64], p_grid: &[f64], opts: &ThresholdOptions) -> Result<ThresholdReport> {
    if eigs.is_empty() {
        return Err(invalid("no eigenvalues"));
    }
    if eigs.iter().any(|v| !v.is_finite()) {
        return Err(QhaError::NonFinite("eigenvalues"));
    }
    if p_grid.is_empty() || p_grid.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(invalid("p grid must be nonempty, finite and positive"));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("p grid must be strictly increasing"));
    }
    if !(opts.split > 0.0 && opts.split < 1.0 && opts.crossing > 0.0 && opts.crossing < 1.0) {
        return Err(invalid("split and crossing must lie in (0, 1)"));
    }
    let abs: Vec<f64> = eigs.iter().map(|v| v.abs()).collect();
    let top = abs.iter().copied().fold(0.0, f64::max);
    let split = (opts.split * abs.len() as f64).floor() as usize;

    let (lo, hi) = opts.fit_range;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        abs.iter().enumerate().filter(|&(n, v)| n as f64 >= lo && n as f64 <= hi && *v > 0.0).map(|(n, v)| ((n as f64).ln(), v.ln())).unzip();
    let decay_exponent = linear_fit(&xs, &ys).map(|(s, _)| s);

    let tail_ratios: Vec<f64> = if top == 0.0 {
        vec![0.0; p_grid.len()]
    } else {
        p_grid
            .par_iter()
            .map(|&p| {
                let terms: Vec<f64> = abs.iter().map(|v| (v / top).powf(p)).collect();
                pairwise_sum(&terms[split..]) / pairwise_sum(&terms)
            })
            .collect()
    };

    let c = opts.crossing;
    let p_star = p_grid.windows(2).zip(tail_ratios.windows(2)).find_map(|(p, r)| {
        (r[0] >= c && r[1] < c && r[1] > 0.0).then(|| {
            let t = (r[0].ln() - c.ln()) / (r[0].ln() - r[1].ln());
            p[0] + t * (p[1] - p[0])
        })
    });
    let not_compact = p_star.is_none() && tail_ratios.iter().all(|r| *r >= c);
    Ok(ThresholdReport {
        decay_exponent,
        fit_points: xs.len(),
        p_grid: p_grid.to_vec(),
        tail_ratios,
        p_star,
        not_compact,
        short_input: eigs.len() < 10_000,
        options: opts.clone(),
    })
}

/// Sizes for [`tau_threshold`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauThresholdOptions {
    /// Smallest truncation `N_0`; the others are `N_0 2^i`.
    pub n_start: usize,
    pub doublings: usize,
    /// Bands whose coefficient is below this fraction of `Σ|w_j|` are dropped.
    pub band_tolerance: f64,
}

impl Default for TauThresholdOptions {
    fn default() -> Self {
        Self { n_start: 1024, doublings: 7, band_tolerance: 1e-13 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauThresholdReport {
    pub tau: f64,
    pub bands: usize,
    pub sizes: Vec<usize>,
    /// `‖P_N L P_N‖²_{S²}` at each size.
    pub hs_squared: Vec<f64>,
    /// Decay exponent `a` in `s_n ≈ n^{−a}`, from `S(2N) − S(N) ∝ N^{1−2a}`.
    pub decay_exponent: Option<f64>,
    /// `1/a`.
    pub p_star: Option<f64>,
}

/// Schatten threshold of the τ-extension `Σ_j w_j e^{−πi(2τ−1)x_jξ_j} ρ(z_j)`
/// over a ring measure. The phase factor breaks the rotation invariance,
/// so the operator is no longer diagonal, but it stays banded in the
/// Hermite basis with rapidly decaying band coefficients. The growth of
/// its Hilbert–Schmidt norm under truncation then measures the decay
/// rate of its singular values without forming any matrix.
pub fn tau_threshold(mu: &DiscreteMeasure, tau: f64, opts: &TauThresholdOptions) -> Result<TauThresholdReport> {
    check_tau(tau)?;
    let r = ring_radius(mu).ok_or_else(|| invalid("tau threshold needs atoms on one centered circle"))?;
    if opts.n_start == 0 || opts.doublings < 2 {
        return Err(invalid("need n_start >= 1 and at least two doublings"));
    }
    let a: Vec<Complex64> = mu.weights().iter().zip(mu.atoms()).map(|(w, z)| if tau == 0.5 { *w } else { w * tau_factor(*z, tau) }).collect();
    let units: Vec<Complex64> = mu.atoms().iter().map(|z| Complex64::new(z.x() / r, z.xi() / r)).collect();
    // Beyond half the node count the coefficients alias the low bands.
    let coeffs = Ring::band_coefficients(&units, &a, (mu.len() / 2).max(1));
    let tv: f64 = a.iter().map(|v| v.norm()).sum();
    let bands = coeffs.iter().rposition(|(lo, hi)| lo.norm().max(hi.norm()) > opts.band_tolerance * tv).map_or(1, |k| k + 1);
    let sizes: Vec<usize> = (0..=opts.doublings).map(|i| opts.n_start << i).collect();
    let n_max = *sizes.last().unwrap();
    let lf = ln_factorials(bands);
    let x = PI * r * r;
    // Per band: weight times cumulative squared radial factors.
    let cums: Vec<(f64, Vec<f64>)> = (0..bands)
        .into_par_iter()
        .map(|k| {
            let mut v = vec![0.0; n_max];
            radial_into(k, x, lf[k], &mut v);
            let mut acc = 0.0;
            let cum: Vec<f64> = v
                .iter()
                .map(|f| {
                    acc += f * f;
                    acc
                })
                .collect();
            let (lo, hi) = coeffs[k];
            let w = if k == 0 { lo.norm_sqr() } else { lo.norm_sqr() + hi.norm_sqr() };
            (w, cum)
        })
        .collect();
    let hs_squared: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let parts: Vec<f64> = cums.iter().enumerate().filter(|(k, _)| *k < n).map(|(k, (w, cum))| w * cum[n - k - 1]).collect();
            pairwise_sum(&parts)
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        sizes.windows(2).zip(hs_squared.windows(2)).filter(|(_, s)| s[1] > s[0]).map(|(n, s)| ((n[0] as f64).ln(), (s[1] - s[0]).ln())).unzip();
    let decay_exponent = linear_fit(&xs, &ys).map(|(slope, _)| (1.0 - slope) / 2.0);
    let p_star = decay_exponent.filter(|a| *a > 0.0).map(|a| 1.0 / a);
    Ok(TauThresholdReport { tau, bands, sizes, hs_squared, decay_exponent, p_star })
}
