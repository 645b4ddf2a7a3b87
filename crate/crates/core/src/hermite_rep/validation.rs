use super::ambiguity::ambiguity_matrix_quadrature;
use super::basis::{hermite_values_into, HermiteBasis};
use super::displacement::{displacement_entries, laguerre_diagonal};
use super::line::LineGrid;
use crate::error::Result;
use crate::numerics::cis;
use crate::phase_space::PhasePoint;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Outcome of comparing a closed form against its quadrature oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub comparisons: usize,
    pub passed: bool,
}

/// Deterministic probe points filling the disc of radius `radius`,
/// including points on the rim along both axes and the diagonal.
fn probe_points(radius: f64) -> Vec<PhasePoint> {
    let mut pts = vec![
        PhasePoint::raw(radius, 0.0),
        PhasePoint::raw(0.0, radius),
        PhasePoint::raw(-radius, 0.0),
        PhasePoint::raw(radius / 2f64.sqrt(), -radius / 2f64.sqrt()),
        PhasePoint::raw(0.0, 0.0),
    ];
    // Golden-angle spiral for the interior.
    let golden = PI * (3.0 - 5f64.sqrt());
    for k in 1..=11 {
        let r = radius * (k as f64 / 11.0).sqrt();
        let (s, c) = (golden * k as f64).sin_cos();
        pts.push(PhasePoint::raw(r * c, r * s));
    }
    pts
}

/// Checks the Laguerre closed form of `A(h_m, h_n)(z)` against trapezoid
/// quadrature for all `m, n < n_max` at probe points with `|z| ≤ radius`.
pub fn validate_displacement(n_max: usize, radius: f64) -> Result<GateReport> {
    // Room for the shifted support of h_{n_max−1} plus Gaussian decay.
    let t = ((n_max as f64 / PI).sqrt() + radius / 2.0 + 3.0).ceil();
    let grid = LineGrid::new(t, 8 * (t * t).ceil() as usize)?;
    let basis = HermiteBasis::new(n_max, grid)?;
    let mut max_error: f64 = 0.0;
    let mut comparisons = 0;
    for z in probe_points(radius) {
        let quad = ambiguity_matrix_quadrature(&basis, z)?;
        let closed = displacement_entries(z, n_max);
        for m in 0..n_max {
            for n in 0..n_max {
                // closed form is column-major ⟨ρ(z)h_n, h_m⟩; A is its conjugate.
                let a = closed[n * n_max + m].conj();
                max_error = max_error.max((a - quad[m * n_max + n]).norm());
                comparisons += 1;
            }
        }
    }
    let tolerance = 1e-8;
    Ok(GateReport {
        name: format!("ambiguity_hermite vs quadrature (m,n < {n_max}, |z| <= {radius})"),
        max_error,
        tolerance,
        comparisons,
        passed: max_error < tolerance,
    })
}

/// Quadrature oracle for the diagonal of `∫ρ(z) dμ` over the circle of radius
/// `r` with total mass `mass`: each `∫A(h_n,h_n) dμ` is a trapezoid sum in
/// `t` with exactly evaluated shifted Hermite functions, over `nodes`
/// equispaced circle points.
pub fn circle_diagonal_quadrature(r: f64, mass: f64, count: usize, nodes: usize) -> Result<Vec<f64>> {
    let t = ((count as f64 / PI).sqrt() + r / 2.0 + 3.0).ceil();
    let grid = LineGrid::new(t, 8 * (t * t).ceil() as usize)?;
    let h = grid.spacing();
    let mut acc = vec![Complex64::new(0.0, 0.0); count];
    let mut plus = vec![0.0; count];
    let mut minus = vec![0.0; count];
    for j in 0..nodes {
        let (s, c) = (2.0 * PI * j as f64 / nodes as f64).sin_cos();
        let (x, xi) = (r * c, r * s);
        let mut row = vec![Complex64::new(0.0, 0.0); count];
        for i in 0..grid.points() {
            let ti = grid.node(i);
            hermite_values_into(ti + x / 2.0, &mut plus);
            hermite_values_into(ti - x / 2.0, &mut minus);
            let w = cis(-2.0 * PI * xi * ti);
            for n in 0..count {
                row[n] += w * (plus[n] * minus[n]);
            }
        }
        for n in 0..count {
            acc[n] += row[n] * h;
        }
    }
    let w = mass / nodes as f64;
    Ok(acc.iter().map(|v| v.re * w).collect())
}

/// Checks `λ_n = mass e^{−πr²/2} L_n(πr²)` against the quadrature oracle
/// for `n < count`.
pub fn validate_circle_closed_form(r: f64, mass: f64, count: usize) -> Result<GateReport> {
    let oracle = circle_diagonal_quadrature(r, mass, count, 8)?;
    let closed = laguerre_diagonal(PI * r * r, count);
    let max_error = oracle.iter().zip(&closed).map(|(a, b)| (a - mass * b).abs()).fold(0.0, f64::max);
    let tolerance = 1e-8;
    Ok(GateReport {
        name: format!("circle closed form vs quadrature diagonal (n < {count}, r = {r})"),
        max_error,
        tolerance,
        comparisons: count,
        passed: max_error < tolerance,
    })
}
