use super::measure::{fourier_of_measure, DiscreteMeasure};
use super::PhasePoint;
use crate::numerics::linear_fit;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Fit ranges for [`regularity_estimates_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityOptions {
    /// Ball radii run over `2^e · R` for `e` in this range, half-octave steps.
    pub radius_exponents: (f64, f64),
    /// Frequency moduli `|ζ|` covered by the decay fit.
    pub frequency_range: (f64, f64),
    /// Sub-shells per octave in the decay fit.
    pub shells_per_octave: usize,
    /// At most this many atoms serve as ball centers.
    pub max_centers: usize,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        Self { radius_exponents: (-6.0, -1.0), frequency_range: (4.0, 256.0), shells_per_octave: 4, max_centers: 256 }
    }
}

/// Diagnostic exponents; a `None` comes with a reason in `failures`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityEstimates {
    pub alpha_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub alpha_scales: usize,
    pub beta_scales: usize,
    pub failures: Vec<String>,
}

pub fn regularity_estimates(mu: &DiscreteMeasure, ray_count: usize, radius_samples: usize, seed: u64) -> RegularityEstimates {
    regularity_estimates_with(mu, ray_count, radius_samples, seed, &RegularityOptions::default())
}

/// α̂: slope of the center-averaged `log |μ|(B(z, r)) / ‖μ‖` against `log r`.
/// β̂: −2 × slope of `log sup |F_σ(μ)|` against `log(1 + |ζ|)`, where the sup
/// runs over `ray_count` rays and `radius_samples` radii inside each
/// sub-shell. Taking the sup over a whole shell keeps the zeros of an
/// oscillating transform from dragging the envelope down.
pub fn regularity_estimates_with(
    mu: &DiscreteMeasure,
    ray_count: usize,
    radius_samples: usize,
    seed: u64,
    opts: &RegularityOptions,
) -> RegularityEstimates {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();

    let (alpha_hat, alpha_scales) = fit_alpha(mu, opts, &mut rng);
    if alpha_hat.is_none() {
        failures.push(format!("alpha: only {alpha_scales} usable scales (need 3)"));
    }
    let (beta_hat, beta_scales) =
        if ray_count == 0 || radius_samples == 0 { (None, 0) } else { fit_beta(mu, ray_count, radius_samples, opts, &mut rng) };
    if beta_hat.is_none() {
        failures.push(format!("beta: only {beta_scales} usable scales (need 3)"));
    }
    RegularityEstimates { alpha_hat, beta_hat, alpha_scales, beta_scales, failures }
}

fn fit_alpha(mu: &DiscreteMeasure, opts: &RegularityOptions, rng: &mut ChaCha8Rng) -> (Option<f64>, usize) {
    let r_bound = mu.radius_bound();
    if r_bound <= 0.0 {
        return (None, 0);
    }
    let tv = mu.total_variation();
    let charged: Vec<usize> = (0..mu.len()).filter(|&j| mu.weights()[j].norm() > 0.0).collect();
    let centers: Vec<usize> = if charged.len() <= opts.max_centers {
        charged
    } else {
        let mut pick: Vec<usize> = sample(rng, charged.len(), opts.max_centers).into_iter().map(|i| charged[i]).collect();
        pick.sort_unstable();
        pick
    };
    let (e0, e1) = opts.radius_exponents;
    let steps = ((e1 - e0) * 2.0).round().max(0.0) as usize;
    let radii: Vec<f64> = (0..=steps).map(|k| r_bound * 2f64.powf(e0 + 0.5 * k as f64)).collect();

    let mut sums = vec![0.0; radii.len()];
    let mut dist: Vec<(f64, f64)> = Vec::with_capacity(mu.len());
    for &c in &centers {
        let zc = mu.atoms()[c];
        dist.clear();
        dist.extend(mu.atoms().iter().zip(mu.weights()).map(|(a, w)| ((*a - zc).norm(), w.norm())));
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for &(_, w) in &dist {
            acc += w;
            cum.push(acc);
        }
        for (s, &r) in sums.iter_mut().zip(&radii) {
            let k = dist.partition_point(|d| d.0 <= r * (1.0 + 1e-12));
            let mass = if k == 0 { 0.0 } else { cum[k - 1] };
            *s += (mass / tv).ln();
        }
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = sums.iter().map(|s| s / centers.len() as f64).collect();
    let usable: Vec<(f64, f64)> = xs.into_iter().zip(ys).filter(|(_, y)| y.is_finite()).collect();
    if usable.len() < 3 {
        return (None, usable.len());
    }
    let (x, y): (Vec<f64>, Vec<f64>) = usable.iter().copied().unzip();
    (linear_fit(&x, &y).map(|(s, _)| s), usable.len())
}

fn fit_beta(mu: &DiscreteMeasure, ray_count: usize, radius_samples: usize, opts: &RegularityOptions, rng: &mut ChaCha8Rng) -> (Option<f64>, usize) {
    let (f0, f1) = opts.frequency_range;
    if !(f0 > 0.0 && f1 > f0) {
        return (None, 0);
    }
    let k = opts.shells_per_octave.max(1);
    let octaves = (f1 / f0).log2();
    let shells = (octaves * k as f64).round() as usize;
    let offset: f64 = rng.random();
    let dirs: Vec<(f64, f64)> = (0..ray_count).map(|r| (2.0 * PI * (r as f64 + offset) / ray_count as f64).sin_cos()).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in 0..shells {
        let t0 = f0 * 2f64.powf(s as f64 / k as f64);
        let mut targets = Vec::with_capacity(ray_count * radius_samples);
        for i in 0..radius_samples {
            let t = t0 * 2f64.powf(i as f64 / (radius_samples * k) as f64);
            targets.extend(dirs.iter().map(|&(sn, cs)| PhasePoint::raw(t * cs, t * sn)));
        }
        let sup = fourier_of_measure(mu, &targets).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup > 0.0 {
            xs.push((1.0 + t0).ln());
            ys.push(sup.ln());
        }
    }
    if xs.len() < 3 {
        return (None, xs.len());
    }
    (linear_fit(&xs, &ys).map(|(s, _)| -2.0 * s), xs.len())
}
