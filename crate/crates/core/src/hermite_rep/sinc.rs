use super::line::LineGrid;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Neighbors used on each side of an off-grid evaluation point.
pub const SINC_NEIGHBORS: usize = 32;

// Gaussian regularization width (in units of h) for samples that are at
// least twice oversampled: the truncation and aliasing errors balance near
// sigma^2 = 2m/pi.
fn sigma() -> f64 {
    (2.0 * SINC_NEIGHBORS as f64 / PI).sqrt()
}

fn kernel(d: f64) -> f64 {
    let s = sigma();
    let g = (-d * d / (2.0 * s * s)).exp();
    if d.abs() < 1e-300 {
        g
    } else {
        (PI * d).sin() / (PI * d) * g
    }
}

/// Samples of `f(t_i + s)` for every node `t_i`, treating `f` as zero off
/// the grid. Shifts by whole multiples of the spacing are exact index moves;
/// other shifts use Gaussian-regularized sinc interpolation.
pub fn shifted_samples(values: &[Complex64], grid: &LineGrid, s: f64) -> Vec<Complex64> {
    let m = grid.points() as isize;
    let u = s / grid.spacing();
    let k = u.round();
    let zero = Complex64::new(0.0, 0.0);
    if (u - k).abs() <= 1e-9 * u.abs().max(1.0) {
        let k = k as isize;
        return (0..m)
            .map(|i| {
                let j = i + k;
                if (0..m).contains(&j) {
                    values[j as usize]
                } else {
                    zero
                }
            })
            .collect();
    }
    let base = u.floor();
    let frac = u - base;
    let base = base as isize;
    let half = SINC_NEIGHBORS as isize;
    // Offsets o = -half+1 ..= half relative to floor(i + u).
    let weights: Vec<f64> = (-half + 1..=half).map(|o| kernel(frac - o as f64)).collect();
    (0..m)
        .map(|i| {
            let mut acc = zero;
            let c = i + base;
            for (w, o) in weights.iter().zip(-half + 1..=half) {
                let j = c + o;
                if (0..m).contains(&j) {
                    acc += values[j as usize] * *w;
                }
            }
            acc
        })
        .collect()
}
