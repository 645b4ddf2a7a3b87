use proptest::prelude::*;
use qha_core::hermite_rep::*;
use qha_core::operator_calculus::{parity, Quantizer};
use qha_core::phase_space::{plain_fourier_at, symplectic_form, PhaseFunction, PhaseGrid, PhasePoint};
use qha_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn pt(x: f64, xi: f64) -> PhasePoint {
    PhasePoint::new(x, xi).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> PhasePoint {
    loop {
        let x = radius * (2.0 * rng.random::<f64>() - 1.0);
        let y = radius * (2.0 * rng.random::<f64>() - 1.0);
        if x * x + y * y <= radius * radius {
            return pt(x, y);
        }
    }
}

#[test]
fn basis_is_orthonormal_and_pinned() {
    let basis = HermiteBasis::with_default_grid(64).unwrap();
    let gram = basis.gram();
    for m in 0..64 {
        for n in 0..64 {
            let e = if m == n { 1.0 } else { 0.0 };
            assert!((gram[m * 64 + n] - e).abs() < 1e-8, "gram({m},{n}) = {}", gram[m * 64 + n]);
        }
    }
    assert!((basis.row(0)[basis.grid().points() / 2] - 1.189_207_12).abs() < 1e-8);
    let h3 = basis.function(3);
    let h5 = basis.function(5);
    assert!(h3.inner(&h5).unwrap().norm() < 1e-10);
}

#[test]
fn hermite_functions_are_fourier_eigenvectors() {
    // Grid transform f̂(ω) = h Σ f(t) e^{−2πiωt} on the line nodes.
    let basis = HermiteBasis::with_default_grid(16).unwrap();
    let grid = *basis.grid();
    let nodes = grid.nodes();
    for n in 0..16 {
        let f = basis.row(n);
        let mut worst: f64 = 0.0;
        for (k, &w) in nodes.iter().enumerate().step_by(7) {
            let s: Complex64 =
                nodes.iter().zip(f).map(|(t, v)| Complex64::new(0.0, -2.0 * PI * w * t).exp() * *v).sum::<Complex64>() * grid.spacing();
            let expect = Complex64::new(0.0, -1.0).powu(n as u32) * f[k];
            worst = worst.max((s - expect).norm());
        }
        assert!(worst < 1e-8, "h_{n}: {worst}");
    }
}

#[test]
fn ambiguity_examples() {
    let line = LineGrid::new(6.0, 288).unwrap();
    let basis = HermiteBasis::new(8, line).unwrap();
    let (h0, h1) = (basis.function(0), basis.function(1));
    let v = ambiguity(&h0, &h0, pt(1.0, 0.0)).unwrap();
    assert!((v.re - 0.207_879_6).abs() < 1e-7 && v.im.abs() < 1e-12);
    let f = h0.scale(Complex64::new(0.3, 0.4));
    let g = basis.function(2);
    assert!((ambiguity(&f, &g, PhasePoint::ORIGIN).unwrap() - f.inner(&g).unwrap()).norm() < 1e-14);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut top: f64 = 0.0;
    for _ in 0..1000 {
        let z = random_point(&mut rng, 3.0);
        top = top.max(ambiguity(&h1, &h0, z).unwrap().norm());
    }
    assert!(top <= 1.0 + 1e-9);
    assert!(ambiguity(&h0, &h0, pt(6.5, 0.0)).is_err());
}

#[test]
fn closed_form_examples() {
    assert!((ambiguity_hermite(0, 0, pt(1.0, 1.0)) - Complex64::new((-PI).exp(), 0.0)).norm() < 1e-15);
    assert_eq!(ambiguity_hermite(2, 5, PhasePoint::ORIGIN), Complex64::new(0.0, 0.0));
    let line = LineGrid::new(6.0, 288).unwrap();
    let basis = HermiteBasis::new(4, line).unwrap();
    let h1 = basis.function(1);
    let quad = ambiguity(&h1, &h1, pt(1.0, 0.0)).unwrap();
    let closed = ambiguity_hermite(1, 1, pt(1.0, 0.0));
    assert!((quad - closed).norm() < 1e-10);
    assert!((closed.re - (1.0 - PI) * (-PI / 2.0).exp()).abs() < 1e-14);
}

#[test]
fn validation_gate_on_declared_range() {
    let r = validate_displacement(64, 4.0).unwrap();
    assert!(r.passed && r.max_error < 1e-8, "{r:?}");
    assert_eq!(r.comparisons, 16 * 64 * 64);
}

#[test]
fn rho_matrix_examples() {
    let basis = HermiteBasis::with_default_grid(256).unwrap();
    let id = rho_matrix(PhasePoint::ORIGIN, &basis);
    for r in 0..256 {
        for c in 0..256 {
            let e = if r == c { 1.0 } else { 0.0 };
            assert_eq!(id.entry(r, c), Complex64::new(e, 0.0));
        }
    }
    let m = rho_matrix(pt(0.5, 0.0), &basis);
    let s = m.singular_spectrum();
    assert!(s.values()[0] <= 1.0 + 1e-12);
    for v in &s.values()[..10] {
        assert!((v - 1.0).abs() < 1e-4, "{v}");
    }
    let m = rho_matrix(pt(0.6, -0.7), &basis);
    for c in 0..256 {
        let norm: f64 = (0..256).map(|r| m.entry(r, c).norm_sqr()).sum::<f64>().sqrt();
        assert!(norm <= 1.0 + 1e-12);
        if c <= 64 {
            assert!(norm >= 0.999, "column {c}: {norm}");
        }
    }
}

#[test]
fn closed_form_matches_quadrature_matrix() {
    let basis = HermiteBasis::with_default_grid(24).unwrap();
    let z = pt(0.8, -1.1);
    let a = rho_matrix(z, &basis);
    let b = rho_matrix_quadrature(z, &basis).unwrap();
    assert!(a.sub(&b).unwrap().hs_norm() < 1e-9);
}

#[test]
fn projective_phase_is_plus_pi_i_sigma() {
    let n = 64;
    let basis = HermiteBasis::with_default_grid(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z = random_point(&mut rng, 1.0);
        let w = random_point(&mut rng, 1.0);
        let zw = rho_matrix(z, &basis).mul(&rho_matrix(w, &basis)).unwrap();
        let sum = rho_matrix(z + w, &basis);
        let expect = Complex64::from_polar(1.0, PI * symplectic_form(z, w));
        let k = n / 2;
        let mut dev: f64 = 0.0;
        for r in 0..k {
            for c in 0..k {
                dev = dev.max((zw.entry(r, c) - expect * sum.entry(r, c)).norm());
            }
        }
        assert!(dev < 1e-6, "deviation {dev}");
        // Swapping the factors conjugates the scalar.
        let wz = rho_matrix(w, &basis).mul(&rho_matrix(z, &basis)).unwrap();
        assert!((wz.entry(0, 0) - expect.conj() * sum.entry(0, 0)).norm() < 1e-6);
    }
}

#[test]
fn wigner_examples() {
    let line = LineGrid::new(8.0, 512).unwrap();
    let basis = HermiteBasis::new(4, line).unwrap();
    let grid = PhaseGrid::new(6.0, 256).unwrap();
    let h0 = basis.function(0);
    let w = wigner(&h0, &h0, &grid).unwrap();
    assert!(!w.warning);
    let exact = PhaseFunction::from_real_fn(grid, |z| 2.0 * (-2.0 * PI * z.norm_sqr()).exp());
    let err = w.value.values().iter().zip(exact.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");

    let h1 = basis.function(1);
    let f = h0.scale(Complex64::new(0.6, 0.0)).values().iter().zip(h1.values()).map(|(a, b)| a + b * Complex64::new(0.0, 0.8)).collect();
    let f = WaveFunction::new(line, f).unwrap();
    let wf = wigner(&f, &f, &grid).unwrap().value;
    assert!(wf.values().iter().all(|v| v.im.abs() < 1e-10));

    // Marginal: ∫W(h_1,h_1)(x, ξ) dξ = |h_1(x)|².
    let w1 = wigner(&h1, &h1, &grid).unwrap().value;
    let m = grid.points();
    for i in (m / 4..3 * m / 4).step_by(9) {
        let x = grid.node(i);
        let s: Complex64 = (0..m).map(|j| w1.at(i, j)).sum::<Complex64>() * grid.spacing();
        let h = hermite_values(2, x)[1];
        assert!((s.re - h * h).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn shifted_gaussian_examples() {
    let line = LineGrid::new(8.0, 512).unwrap();
    let basis = HermiteBasis::new(1, line).unwrap();
    let at0 = shifted_gaussian(PhasePoint::ORIGIN, &line).unwrap();
    for (a, b) in at0.values().iter().zip(basis.function(0).values()) {
        assert!((a - b).norm() < 1e-15, "{a} vs {b}");
    }
    assert!((at0.norm() - 1.0).abs() < 1e-10);
    let z0 = pt(0.7, -0.4);
    let g = shifted_gaussian(z0, &line).unwrap();
    let g0 = basis.function(0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let z = random_point(&mut rng, 3.0);
        let a = ambiguity(&g, &g0, z).unwrap();
        assert!((a.norm() - (-PI * (z - z0).norm_sqr() / 2.0).exp()).abs() < 1e-8);
    }
    // Covariance: A(ρ(ζ)f, g)(z) = e^{πiσ(ζ,z)} A(f,g)(z − ζ).
    for _ in 0..50 {
        let z = random_point(&mut rng, 2.0);
        let lhs = ambiguity(&g, &g0, z).unwrap();
        let rhs = Complex64::from_polar(1.0, PI * symplectic_form(z0, z)) * ambiguity(&g0, &g0, z - z0).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }
    assert!(shifted_gaussian(pt(4.5, 0.0), &line).is_err());
}

#[test]
fn moyal_identity_on_hermite_pairs() {
    let line = LineGrid::new(6.0, 288).unwrap();
    let basis = HermiteBasis::new(4, line).unwrap();
    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let g0 = basis.function(0);
    let amb: Vec<PhaseFunction> = (0..4).map(|k| ambiguity_grid(&basis.function(k), &g0, &grid).unwrap()).collect();
    for f in 0..4 {
        for g in 0..4 {
            let lhs = amb[f].inner(&amb[g]).unwrap();
            let rhs = if f == g { 1.0 } else { 0.0 };
            assert!((lhs - rhs).norm() < 1e-6, "({f},{g}): {lhs}");
        }
    }
}

#[test]
fn inversion_recovers_h1() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let grid = PhaseGrid::new(6.0, 128).unwrap();
    let line = LineGrid::new(8.0, 512).unwrap();
    let wide = HermiteBasis::new(2, line).unwrap();
    let a = ambiguity_grid(&wide.function(1), &wide.function(0), &grid).unwrap();
    let h2 = grid.spacing().powi(2);
    let m = grid.points();
    let mut nodes = Vec::new();
    let mut w = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let v = a.at(i, j);
            if v.norm() > 1e-13 {
                nodes.push(grid.point(i, j));
                w.push(v * h2);
            }
        }
    }
    // Column 0 of Σ w_k ρ(z_k) is the reconstruction applied to h = g_0.
    let op = Quantizer::new(&basis).combine(&nodes, &w);
    let coeffs: Vec<Complex64> = (0..32).map(|r| op.entry(r, 0)).collect();
    let f = basis.synthesize(&coeffs).unwrap();
    let err = f.relative_error(&basis.function(1)).unwrap();
    assert!(err < 1e-4, "{err}");
}

#[test]
fn parity_conjugation_is_exact() {
    let basis = HermiteBasis::with_default_grid(48).unwrap();
    let p = parity(48);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let z = random_point(&mut rng, 3.0);
        let lhs = p.mul(&rho_matrix(z, &basis)).unwrap().mul(&p).unwrap();
        assert_eq!(lhs.entries(), rho_matrix(-z, &basis).entries());
    }
}

#[test]
fn sizing_message_names_the_fix() {
    let err = HermiteBasis::new(64, LineGrid::new(4.0, 128).unwrap()).unwrap_err().to_string();
    assert!(err.contains("6.5"), "{err}");
}

#[test]
fn rotation_identity_uses_the_plain_transform() {
    let grid = PhaseGrid::new(3.0, 36).unwrap();
    let f = PhaseFunction::from_fn(grid, |z| Complex64::new((-PI * (z - pt(0.3, -0.2)).norm_sqr()).exp(), 0.1 * z.x() * (-PI * z.norm_sqr()).exp()));
    let nodes = grid.nodes();
    let plain = plain_fourier_at(&f, &nodes, &nodes);
    let fs = qha_core::phase_space::symplectic_fourier_with(&f, qha_core::phase_space::FourierMethod::Direct).unwrap();
    let m = grid.points();
    // F_σ(F)(y, η) = F(F)(η, −y): row j of the result reads column −j of the plain one.
    for j in 1..m {
        for l in 0..m {
            assert_eq!(fs.at(j, l), plain[l * m + (m - j)]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_agrees_with_single_entries(m in 0usize..40, n in 0usize..40, x in -3.0f64..3.0, xi in -3.0f64..3.0) {
        let z = pt(x, xi);
        let block = displacement_entries(z, 40);
        let a = ambiguity_hermite(m, n, z);
        prop_assert!((a - block[n * 40 + m].conj()).norm() < 1e-14);
    }

    #[test]
    fn rho_is_a_contraction(x in -2.0f64..2.0, xi in -2.0f64..2.0) {
        let basis = HermiteBasis::with_default_grid(32).unwrap();
        let s = rho_matrix(pt(x, xi), &basis).singular_spectrum();
        prop_assert!(s.values()[0] <= 1.0 + 1e-12);
    }
}
