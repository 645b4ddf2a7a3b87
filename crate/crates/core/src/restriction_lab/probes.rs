use super::extension::{quantum_extension, ring_radius, Ring};
use super::spectra::{circle_spectrum, default_p_grid, schatten_threshold_report, ThresholdReport};
use crate::error::{invalid, QhaError, Result};
use crate::hermite_rep::{ln_factorials, radial_into, HermiteBasis};
use crate::numerics::median;
use crate::operator_calculus::{OperatorMatrix, SingularSpectrum};
use crate::phase_space::{regularity_estimates, DiscreteMeasure, RegularityEstimates};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// The exponent `2(4d − 2α + β)/β` (d = 1) above which the extension is
/// bounded from `L²(μ)` into `S^{p'}`.
pub fn bak_exponent(alpha: f64, beta: f64) -> Option<f64> {
    (beta > 0.0).then(|| 2.0 * (4.0 - 2.0 * alpha + beta) / beta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BakStatistics {
    pub p_prime: f64,
    pub samples: usize,
    pub seed: u64,
    pub dim: usize,
    pub max: f64,
    pub median: f64,
    pub min: f64,
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

/// Complex standard normal values on the atoms, scaled to unit `L²(μ)` norm.
fn random_density(mu: &DiscreteMeasure, rng: &mut ChaCha8Rng) -> Result<Vec<Complex64>> {
    let mut g: Vec<Complex64> = (0..mu.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let norm = mu.lq_norm(&g, 2.0)?;
    if norm == 0.0 {
        return Err(invalid("random density vanished on the support"));
    }
    for v in &mut g {
        *v /= norm;
    }
    Ok(g)
}

/// Empirical `‖E_W(G)‖_{S^{p'}} / ‖G‖_{L²(μ)}` over random `G`. A
/// diagnostic of boundedness only: the ratios are reported, never judged.
pub fn bak_ratio_sampler(mu: &DiscreteMeasure, p_prime: f64, n_samples: usize, seed: u64, basis: &HermiteBasis) -> Result<BakStatistics> {
    if !(p_prime >= 1.0) {
        return Err(invalid(format!("p' must be >= 1, got {p_prime}")));
    }
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let densities: Vec<Vec<Complex64>> = (0..n_samples).map(|_| random_density(mu, &mut rng)).collect::<Result<_>>()?;
    let ring = Ring::new(mu, basis.size());
    let ratios: Vec<f64> = densities
        .par_iter()
        .map(|g| -> Result<f64> {
            let op = match &ring {
                Some(ring) => {
                    let a: Vec<Complex64> = g.iter().zip(mu.weights()).map(|(v, w)| v * w).collect();
                    OperatorMatrix::new(ring.extension(&a), basis.fingerprint())?
                }
                None => quantum_extension(g, mu, basis)?,
            };
            op.singular_spectrum().norm(p_prime)
        })
        .collect::<Result<_>>()?;
    Ok(BakStatistics {
        p_prime,
        samples: n_samples,
        seed,
        dim: basis.size(),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        median: median(&ratios),
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratios,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessOptions {
    /// Singular values below this count as small.
    pub level: f64,
    /// Index whose singular value is tracked across truncations.
    pub index: usize,
    /// Truncations above this use the ring fast path when available.
    pub dense_limit: usize,
    /// Length of the circle spectrum used for the threshold estimate.
    pub spectrum_len: usize,
    /// Rays, radii per shell and seed for the decay estimate β̂.
    pub rays: usize,
    pub radius_samples: usize,
    pub seed: u64,
    /// Allowed gap between `4/β̂` and the measured threshold p*.
    pub agreement_tolerance: f64,
}

impl Default for CompactnessOptions {
    fn default() -> Self {
        Self { level: 0.05, index: 1000, dense_limit: 512, spectrum_len: 1_000_000, rays: 64, radius_samples: 4, seed: 7, agreement_tolerance: 0.15 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMethod {
    Dense,
    RingDiagonal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeLevel {
    pub n: usize,
    pub method: ProbeMethod,
    /// Number of singular values at or above the level, i.e. the first
    /// index where `s_k` drops below it; `None` if none does.
    pub k_index: Option<usize>,
    /// `s_index`, when the truncation is large enough.
    pub s_index: Option<f64>,
    pub s_max: f64,
    pub s_min: f64,
    /// Every singular value equals 1 to 1e-9.
    pub all_unit: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactnessVerdict {
    NotCompact,
    CompactConsistent,
    Inconclusive,
}

impl CompactnessVerdict {
    pub fn label(self) -> &'static str {
        match self {
            Self::NotCompact => "not compact",
            Self::CompactConsistent => "compact-consistent",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactnessReport {
    pub levels: Vec<ProbeLevel>,
    /// Relative change of `s_index` between consecutive truncations.
    pub s_index_deltas: Vec<f64>,
    /// `s_index < level` at the largest truncation.
    pub s_index_small: Option<bool>,
    pub verdict: CompactnessVerdict,
    pub regularity: RegularityEstimates,
    /// The corollary's sufficient exponent `4d/β̂`.
    pub corollary_p: Option<f64>,
    pub threshold: Option<ThresholdReport>,
    /// `|4d/β̂ − p*|`.
    pub agreement_gap: Option<f64>,
    pub agreement: Option<bool>,
    pub options: CompactnessOptions,
}

pub fn compactness_probe(mu: &DiscreteMeasure, n_list: &[usize]) -> Result<CompactnessReport> {
    compactness_probe_with(mu, n_list, &CompactnessOptions::default())
}

/// Equal weights on a ring, with the aliased bands `k = M, 2M, …` of the
/// `M`-node discretization below rounding up to `n`.
fn diagonal_ring(mu: &DiscreteMeasure, n: usize) -> Option<(f64, f64)> {
    let r = ring_radius(mu)?;
    let w0 = mu.weights()[0];
    if mu.weights().iter().any(|w| (w - w0).norm() > 1e-15 * w0.norm()) || w0.im != 0.0 || w0.re <= 0.0 {
        return None;
    }
    let m = mu.len();
    if m < n {
        let lf = ln_factorials(m + 1);
        let mut v = vec![0.0; n - m];
        radial_into(m, PI * r * r, lf[m], &mut v);
        if v.iter().any(|f| f.abs() > 1e-13) {
            return None;
        }
    }
    Some((r, w0.re * m as f64))
}

fn level_from(values: &[f64], dim: usize, method: ProbeMethod, opts: &CompactnessOptions) -> ProbeLevel {
    let k = values.iter().position(|s| *s < opts.level);
    ProbeLevel {
        n: dim,
        method,
        k_index: k,
        s_index: values.get(opts.index).copied(),
        s_max: values.first().copied().unwrap_or(0.0),
        s_min: values.last().copied().unwrap_or(0.0),
        all_unit: values.iter().all(|s| (s - 1.0).abs() < 1e-9),
    }
}

/// Singular spectra of `E_W(1)` over increasing truncations, the index
/// where they drop below the level, and a cross-check of the corollary's
/// sufficient exponent `4/β̂` against the measured threshold.
pub fn compactness_probe_with(mu: &DiscreteMeasure, n_list: &[usize], opts: &CompactnessOptions) -> Result<CompactnessReport> {
    if n_list.is_empty() || n_list.contains(&0) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("N list must be nonempty, positive and strictly ascending"));
    }
    let ones = vec![Complex64::new(1.0, 0.0); mu.len()];
    let mut levels = Vec::new();
    let mut last_values = Vec::new();
    for &n in n_list {
        let ring = if n > opts.dense_limit { diagonal_ring(mu, n) } else { None };
        let (values, method) = match ring {
            Some((r, mass)) => {
                let mut v: Vec<f64> = circle_spectrum(r, n, mass)?.into_iter().map(f64::abs).collect();
                v.sort_by(|a, b| b.total_cmp(a));
                (v, ProbeMethod::RingDiagonal)
            }
            None => {
                if n > 4 * opts.dense_limit {
                    return Err(QhaError::InvalidArgument(format!("N = {n} needs a dense decomposition; only equal-weight rings have a fast path")));
                }
                let basis = HermiteBasis::with_default_grid(n)?;
                let e = quantum_extension(&ones, mu, &basis)?;
                let s: SingularSpectrum = e.singular_spectrum();
                (s.values().to_vec(), ProbeMethod::Dense)
            }
        };
        levels.push(level_from(&values, n, method, opts));
        last_values = values;
    }
    let s_index_deltas: Vec<f64> = levels
        .windows(2)
        .filter_map(|w| match (w[0].s_index, w[1].s_index) {
            (Some(a), Some(b)) if a != 0.0 => Some(((b - a) / a).abs()),
            _ => None,
        })
        .collect();
    let last = levels.last().unwrap();
    let s_index_small = last.s_index.map(|s| s < opts.level);

    let verdict = if levels.iter().all(|l| l.k_index.is_none()) {
        CompactnessVerdict::NotCompact
    } else {
        let tail: Vec<Option<usize>> = levels.iter().rev().take(2).map(|l| l.k_index).collect();
        match tail.as_slice() {
            [Some(a), Some(b)] if (*a as f64 - *b as f64).abs() <= 0.1 * (*b as f64) => CompactnessVerdict::CompactConsistent,
            _ => CompactnessVerdict::Inconclusive,
        }
    };

    let regularity = regularity_estimates(mu, opts.rays, opts.radius_samples, opts.seed);
    let corollary_p = regularity.beta_hat.filter(|b| *b > 0.0).map(|b| 4.0 / b);
    let threshold = match diagonal_ring(mu, opts.spectrum_len) {
        Some((r, mass)) => Some(schatten_threshold_report(&circle_spectrum(r, opts.spectrum_len, mass)?, &default_p_grid())?),
        None => Some(schatten_threshold_report(&last_values, &default_p_grid())?),
    };
    let p_star = threshold.as_ref().and_then(|t| t.p_star);
    let agreement_gap = corollary_p.zip(p_star).map(|(a, b)| (a - b).abs());
    let agreement = agreement_gap.map(|g| g <= opts.agreement_tolerance);
    Ok(CompactnessReport {
        levels,
        s_index_deltas,
        s_index_small,
        verdict,
        regularity,
        corollary_p,
        threshold,
        agreement_gap,
        agreement,
        options: opts.clone(),
    })
}
