use proptest::prelude::*;
use qha_core::hermite_rep::{ambiguity, rho_matrix, HermiteBasis};
use qha_core::operator_calculus::*;
use qha_core::phase_space::{symplectic_fourier, PhaseFunction, PhaseGrid, PhasePoint};
use qha_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn pt(x: f64, xi: f64) -> PhasePoint {
    PhasePoint::new(x, xi).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

fn unit(k: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); n];
    v[k] = c(1.0);
    v
}

/// Random sum of `rank` outer products of vectors supported on the first
/// `span` Hermite functions.
fn random_low_rank(rng: &mut ChaCha8Rng, basis: &HermiteBasis, rank: usize, span: usize) -> OperatorMatrix {
    let n = basis.size();
    let mut t = OperatorMatrix::zeros(n, basis.fingerprint());
    for _ in 0..rank {
        let a: Vec<Complex64> = (0..n).map(|k| if k < span { rc(rng) } else { c(0.0) }).collect();
        let b: Vec<Complex64> = (0..n).map(|k| if k < span { rc(rng) } else { c(0.0) }).collect();
        t = t.add(&rank_one_coefficients(&a, &b, basis)).unwrap();
    }
    t
}

fn random_psd(rng: &mut ChaCha8Rng, basis: &HermiteBasis, rank: usize, span: usize) -> OperatorMatrix {
    let n = basis.size();
    let mut t = OperatorMatrix::zeros(n, basis.fingerprint());
    for _ in 0..rank {
        let a: Vec<Complex64> = (0..n).map(|k| if k < span { rc(rng) } else { c(0.0) }).collect();
        t = t.add(&rank_one_coefficients(&a, &a, basis)).unwrap();
    }
    t
}

fn gaussian(grid: PhaseGrid, scale: f64, width: f64) -> PhaseFunction {
    PhaseFunction::from_real_fn(grid, |z| scale * (-PI * z.norm_sqr() / width).exp())
}

fn sup_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn schatten_examples() {
    let id = OperatorMatrix::identity(16);
    for p in [1.0, 2.0, 3.5] {
        assert!((schatten_norm(&id, p).unwrap() - 16f64.powf(1.0 / p)).abs() < 1e-12);
    }
    assert_eq!(schatten_norm(&id, f64::INFINITY).unwrap(), 1.0);
    assert!(schatten_norm(&id, 0.5).is_err());

    let basis = HermiteBasis::with_default_grid(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a: Vec<Complex64> = (0..16).map(|_| rc(&mut rng)).collect();
    let b: Vec<Complex64> = (0..16).map(|_| rc(&mut rng)).collect();
    let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let t = rank_one_coefficients(&a, &b, &basis);
    for p in [1.0, 2.0, 7.0, f64::INFINITY] {
        assert!((schatten_norm(&t, p).unwrap() - norm(&a) * norm(&b)).abs() < 1e-12);
    }
}

#[test]
fn holder_inequality_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = OperatorMatrix::from_fn(64, qha_core::hermite_rep::Fingerprint::ABSTRACT, |_, _| rc(&mut rng));
    let t = OperatorMatrix::from_fn(64, qha_core::hermite_rep::Fingerprint::ABSTRACT, |_, _| rc(&mut rng));
    let lhs = s.hs_inner(&t).unwrap().norm();
    let (ss, ts) = (s.singular_spectrum(), t.singular_spectrum());
    for p in [1.0, 4.0 / 3.0, 2.0, 4.0] {
        let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        assert!(lhs <= ss.norm(p).unwrap() * ts.norm(q).unwrap() + 1e-10);
    }
}

#[test]
fn parity_examples() {
    for n in [7, 8] {
        let p = parity(n);
        assert_eq!(p.mul(&p).unwrap(), OperatorMatrix::identity(n));
        assert_eq!(p.trace(), c(if n % 2 == 0 { 0.0 } else { 1.0 }));
    }
    let p = parity(8);
    assert_eq!(p.apply(&unit(3, 8)).unwrap(), unit(3, 8).iter().map(|v| -v).collect::<Vec<_>>());
}

#[test]
fn fourier_wigner_examples() {
    let basis = HermiteBasis::with_default_grid(128).unwrap();
    let g = rank_one_coefficients(&unit(0, 128), &unit(0, 128), &basis);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let targets: Vec<PhasePoint> = (0..50).map(|_| pt(4.0 * rng.random::<f64>() - 2.0, 4.0 * rng.random::<f64>() - 2.0)).collect();
    let targets: Vec<PhasePoint> = targets.into_iter().filter(|z| z.norm() <= 2.0).collect();
    for (z, v) in targets.iter().zip(fourier_wigner(&g, &targets, &basis).unwrap()) {
        assert!((v - (-PI * z.norm_sqr() / 2.0).exp()).norm() < 1e-8);
    }
    let small = HermiteBasis::with_default_grid(32).unwrap();
    let id = OperatorMatrix::identity(32);
    assert!((fourier_wigner(&id, &[PhasePoint::ORIGIN], &small).unwrap()[0] - 32.0).norm() < 1e-12);
    for _ in 0..100 {
        let t = OperatorMatrix::from_fn(32, small.fingerprint(), |_, _| rc(&mut rng));
        let bound = schatten_norm(&t, 1.0).unwrap();
        let zs: Vec<PhasePoint> = (0..100).map(|_| pt(6.0 * rng.random::<f64>() - 3.0, 6.0 * rng.random::<f64>() - 3.0)).collect();
        for v in fourier_wigner(&t, &zs, &small).unwrap() {
            assert!(v.norm() <= bound + 1e-9);
        }
    }
}

#[test]
fn fingerprints_must_match() {
    let a = HermiteBasis::with_default_grid(16).unwrap();
    let b = HermiteBasis::new(16, qha_core::hermite_rep::LineGrid::new(7.0, 400).unwrap()).unwrap();
    let t = rank_one_coefficients(&unit(0, 16), &unit(0, 16), &a);
    assert!(fourier_wigner(&t, &[PhasePoint::ORIGIN], &b).is_err());
    let u = rank_one_coefficients(&unit(1, 16), &unit(0, 16), &b);
    assert!(t.add(&u).is_err());
    assert!(t.add(&OperatorMatrix::identity(16)).is_ok());
}

#[test]
fn rank_one_examples() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let h0 = basis.function(0);
    let g = rank_one(&h0, &h0, &basis).unwrap();
    assert!((g.trace() - 1.0).norm() < 1e-10);
    assert!(g.mul(&g).unwrap().sub(&g).unwrap().hs_norm() < 1e-10);
    // F_W(f ⊗ g) = A(f, g) against the quadrature path.
    let f = basis.synthesize(&(0..32).map(|k| if k < 6 { c(1.0 / (k + 1) as f64) } else { c(0.0) }).collect::<Vec<_>>()).unwrap();
    let h = basis.function(3);
    let t = rank_one(&f, &h, &basis).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let zs: Vec<PhasePoint> = (0..100).map(|_| pt(4.0 * rng.random::<f64>() - 2.0, 4.0 * rng.random::<f64>() - 2.0)).collect();
    for (z, v) in zs.iter().zip(fourier_wigner(&t, &zs, &basis).unwrap()) {
        assert!((v - ambiguity(&f, &h, *z).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn operator_convolution_examples() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let g = rank_one_coefficients(&unit(0, 32), &unit(0, 32), &basis);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let zs: Vec<PhasePoint> = (0..100)
        .map(|_| {
            let (r, th) = (2.0 * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
            pt(r * th.cos(), r * th.sin())
        })
        .collect();
    for (z, v) in zs.iter().zip(conv_op_op(&g, &g, &zs).unwrap()) {
        assert!((v - (-PI * z.norm_sqr()).exp()).norm() < 1e-8);
    }
    let s = random_psd(&mut rng, &basis, 3, 8);
    let t = random_psd(&mut rng, &basis, 2, 8);
    for v in conv_op_op(&s, &t, &zs).unwrap() {
        assert!(v.re >= -1e-10 && v.im.abs() < 1e-10);
    }
}

#[test]
fn grid_convolution_matches_traces_and_mass() {
    let basis = HermiteBasis::with_default_grid(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = random_psd(&mut rng, &basis, 8, 10);
    let t = random_psd(&mut rng, &basis, 8, 10);
    let grid = PhaseGrid::new(6.0, 128).unwrap();
    let f = conv_op_op_grid(&s, &t, &grid, &basis).unwrap();
    let picks = [(10, 77), (64, 64), (50, 90), (100, 33)];
    let zs: Vec<PhasePoint> = picks.iter().map(|&(i, j)| grid.point(i, j)).collect();
    let direct = conv_op_op(&s, &t, &zs).unwrap();
    for (&(i, j), d) in picks.iter().zip(&direct) {
        assert!((f.at(i, j) - d).norm() < 1e-10 * (1.0 + d.norm()));
    }
    let mass = f.integral();
    let expect = s.trace() * t.trace();
    assert!((mass - expect).norm() < 1e-3 * expect.norm(), "{mass} vs {expect}");
}

#[test]
fn cohen_class_identity() {
    // F_σ(Q_T(φ, ψ)) = F_W(T) F_W(ψ ⊗ φ) with Q_T = (ψ ⊗ φ) ⋆ T.
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let psi = rho_matrix(pt(0.3, -0.4), &basis).apply(&unit(0, 32)).unwrap();
    let w = rank_one_coefficients(&psi, &unit(0, 32), &basis);
    let targets: Vec<PhasePoint> = (0..16).map(|k| pt(0.2 * k as f64 - 1.5, 0.1 * k as f64 - 0.4)).collect();
    let fw = fourier_wigner(&w, &targets, &basis).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let t = rank_one_coefficients(&unit(i, 32), &unit(j, 32), &basis);
            let q = conv_op_op_grid(&w, &t, &grid, &basis).unwrap();
            let lhs = q.fourier_at(&targets);
            let ft = fourier_wigner(&t, &targets, &basis).unwrap();
            let rhs: Vec<Complex64> = ft.iter().zip(&fw).map(|(a, b)| a * b).collect();
            assert!(sup_rel(&lhs, &rhs) < 1e-6, "({i},{j}): {}", sup_rel(&lhs, &rhs));
        }
    }
}

#[test]
fn operator_convolution_theorem_on_the_grid() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let a = rho_matrix(pt(0.5, 0.2), &basis).apply(&unit(0, 32)).unwrap();
    let s = rank_one_coefficients(&a, &a, &basis);
    let t = rank_one_coefficients(&unit(0, 32), &unit(0, 32), &basis);
    let st = conv_op_op_grid(&s, &t, &grid, &basis).unwrap();
    let lhs = symplectic_fourier(&st).unwrap();
    let m = grid.points();
    let zs: Vec<PhasePoint> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| grid.point(i, j)).collect();
    let fs = fourier_wigner(&s, &zs, &basis).unwrap();
    let ft = fourier_wigner(&t, &zs, &basis).unwrap();
    let rhs: Vec<Complex64> = fs.iter().zip(&ft).map(|(a, b)| a * b).collect();
    assert!(sup_rel(lhs.values(), &rhs) < 1e-6, "{}", sup_rel(lhs.values(), &rhs));
}

#[test]
fn function_convolution_examples() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let g = rank_one_coefficients(&unit(0, 32), &unit(0, 32), &basis);
    // Narrow unit-mass Gaussian: approximate identity.
    let grid = PhaseGrid::new(2.0, 160).unwrap();
    let width = 4e-3;
    let f = gaussian(grid, 1.0 / width, width);
    let out = conv_fun_op(&f, &g, &basis).unwrap();
    assert!(!out.warning);
    let d = out.value.sub(&g).unwrap().hs_norm();
    assert!(d < 0.02 * g.hs_norm(), "{d}");

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let coarse = PhaseGrid::new(6.0, 48).unwrap();
    for _ in 0..100 {
        let c0 = pt(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let w = 0.6 + rng.random::<f64>();
        let amp = rc(&mut rng);
        let f = PhaseFunction::from_fn(coarse, |z| amp * (-PI * (z - c0).norm_sqr() / w).exp());
        let s = random_low_rank(&mut rng, &basis, 2, 12);
        let out = conv_fun_op(&f, &s, &basis).unwrap().value;
        let bound = f.lp_norm(1.0) * schatten_norm(&s, 1.0).unwrap();
        assert!(schatten_norm(&out, 1.0).unwrap() <= bound + 1e-8);
    }
}

#[test]
fn function_convolution_theorem() {
    let basis = HermiteBasis::with_default_grid(128).unwrap();
    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let f = gaussian(grid, 2.0, 0.5);
    let g = rank_one_coefficients(&unit(0, 128), &unit(0, 128), &basis);
    let out = conv_fun_op(&f, &g, &basis).unwrap().value;
    let targets: Vec<PhasePoint> = (0..40).map(|k| pt(0.07 * k as f64 - 1.3, 1.0 - 0.05 * k as f64)).collect();
    let lhs = fourier_wigner(&out, &targets, &basis).unwrap();
    let ff = f.fourier_at(&targets);
    let fg = fourier_wigner(&g, &targets, &basis).unwrap();
    let rhs: Vec<Complex64> = ff.iter().zip(&fg).map(|(a, b)| a * b).collect();
    assert!(sup_rel(&lhs, &rhs) < 1e-6, "{}", sup_rel(&lhs, &rhs));
}

#[test]
fn convolutions_associate() {
    // (F ∗ G) ⋆ R = F ⋆ (G ⋆ R) for Gaussians F, G.
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let grid = PhaseGrid::new(3.0, 96).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let r = random_low_rank(&mut rng, &basis, 2, 6);
    let (a, b) = (0.05, 0.08);
    let f = gaussian(grid, 1.0 / a, a);
    let g = gaussian(grid, 1.0 / b, b);
    let fg = gaussian(grid, 1.0 / (a + b), a + b);
    let left = conv_fun_op(&fg, &r, &basis).unwrap().value;
    let inner = conv_fun_op(&g, &r, &basis).unwrap().value;
    let right = conv_fun_op(&f, &inner, &basis).unwrap().value;
    let d = left.sub(&right).unwrap().hs_norm();
    assert!(d < 1e-5, "{d}");
}

#[test]
fn hausdorff_young_and_plancherel() {
    let basis = HermiteBasis::with_default_grid(32).unwrap();
    let grid = PhaseGrid::new(6.0, 96).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10 {
        let t = random_low_rank(&mut rng, &basis, 2, 8);
        let f = fourier_wigner_grid(&t, &grid, &basis).unwrap();
        assert!(f.max_abs() <= schatten_norm(&t, 1.0).unwrap() * (1.0 + 1e-6));
        let hs = schatten_norm(&t, 2.0).unwrap();
        assert!((f.l2_norm() - hs).abs() < 1e-6 * hs, "{} vs {hs}", f.l2_norm());
    }
}

#[test]
fn weyl_of_the_gaussian_wigner_function() {
    let basis = HermiteBasis::with_default_grid(128).unwrap();
    let grid = PhaseGrid::new(6.0, 256).unwrap();
    let a = gaussian(grid, 2.0, 0.5);
    let l = weyl_quantize(&a, &basis).unwrap();
    assert!(!l.warning);
    let g = rank_one_coefficients(&unit(0, 128), &unit(0, 128), &basis);
    assert!(l.value.sub(&g).unwrap().hs_norm() < 1e-6);
}

#[test]
fn weyl_weak_form_self_adjointness_and_pool() {
    let basis = HermiteBasis::with_default_grid(64).unwrap();
    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let c0 = pt(0.3, -0.2);
    let a = PhaseFunction::from_real_fn(grid, |z| (-PI * (z - c0).norm_sqr() / 1.5).exp() * (1.0 + 0.5 * z.x()));
    let l = weyl_quantize(&a, &basis).unwrap().value;
    assert!(l.self_adjointness_defect() < 1e-8);
    // ⟨L_a h_n, h_m⟩ = ⟨a, W(h_m, h_n)⟩.
    let line = qha_core::hermite_rep::LineGrid::new(8.0, 512).unwrap();
    let wide = HermiteBasis::new(8, line).unwrap();
    for m in 0..8 {
        for n in 0..8 {
            let w = qha_core::hermite_rep::wigner(&wide.function(m), &wide.function(n), &grid).unwrap().value;
            let weak = a.inner(&w).unwrap();
            assert!((l.entry(m, n) - weak).norm() < 1e-8, "({m},{n}): {} vs {weak}", l.entry(m, n));
        }
    }
    let rel = (l.hs_norm() - a.l2_norm()).abs() / a.l2_norm();
    assert!(rel < 1e-3, "{rel}");
}

#[test]
fn tau_quantization() {
    let basis = HermiteBasis::with_default_grid(16).unwrap();
    let grid = PhaseGrid::new(6.0, 48).unwrap();
    let c0 = pt(0.4, 0.1);
    let a = PhaseFunction::from_real_fn(grid, |z| (-PI * (z - c0).norm_sqr()).exp());
    let w = weyl_quantize(&a, &basis).unwrap().value;
    let t = tau_quantize(&a, 0.5, &basis).unwrap().value;
    assert_eq!(w.to_bytes(), t.to_bytes());
    assert!(tau_quantize(&a, -0.1, &basis).is_err());
    let t0 = tau_quantize(&a, 0.0, &basis).unwrap().value;
    let t1 = tau_quantize(&a, 1.0, &basis).unwrap().value;
    assert!(t0.sub(&w).unwrap().hs_norm() > 1e-6);
    // For real a the τ and 1−τ quantizations are adjoint to each other.
    assert!(t0.adjoint().sub(&t1).unwrap().hs_norm() < 1e-10);
}

#[test]
fn localization_examples() {
    let basis = HermiteBasis::with_default_grid(64).unwrap();
    let h0 = basis.function(0);
    let grid = PhaseGrid::new(8.0, 96).unwrap();
    let bump = PhaseFunction::from_real_fn(grid, |z| {
        let d = z.norm();
        if d <= 5.0 {
            1.0
        } else if d >= 7.0 {
            0.0
        } else {
            let t = (d - 5.0) / 2.0;
            let f = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
            f(1.0 - t) / (f(1.0 - t) + f(t))
        }
    });
    let a = localization(&bump, &h0, &h0, &basis).unwrap().value;
    let top = a.compress(8).unwrap().sub(&OperatorMatrix::identity(8)).unwrap();
    assert!(schatten_norm(&top, f64::INFINITY).unwrap() < 1e-3);

    let grid = PhaseGrid::new(6.0, 144).unwrap();
    let g = gaussian(grid, 1.0, 1.0);
    let loc = localization(&g, &h0, &h0, &basis).unwrap().value;
    // e^{−π|z|²} ∗ 2e^{−2π|z|²} = (2/3) e^{−2π|z|²/3}.
    let sym = gaussian(grid, 2.0 / 3.0, 1.5);
    let weyl = weyl_quantize(&sym, &basis).unwrap().value;
    assert!(loc.sub(&weyl).unwrap().hs_norm() < 1e-6);
    let ev = loc.entries().clone().symmetric_eigenvalues();
    assert!(ev.iter().all(|v| *v >= -1e-9));
}

#[test]
fn blob_and_csv_round_trip() {
    let basis = HermiteBasis::with_default_grid(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = OperatorMatrix::from_fn(8, basis.fingerprint(), |_, _| rc(&mut rng));
    let bytes = t.to_bytes();
    assert_eq!(OperatorMatrix::from_bytes(&bytes).unwrap(), t);
    let mut bad = bytes.clone();
    bad[40] ^= 1;
    assert!(OperatorMatrix::from_bytes(&bad).is_err());
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("row,col,re,im\n"));
    assert_eq!(text.lines().count(), 65);
    let mut buf = Vec::new();
    t.singular_spectrum().write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("n,s_n\n"));
}

#[test]
fn rho_cache_is_transparent() {
    let basis = HermiteBasis::with_default_grid(16).unwrap();
    let grid = PhaseGrid::new(6.0, 48).unwrap();
    let a = gaussian(grid, 1.0, 1.0);
    let plain = Quantizer::new(&basis).weyl(&a).unwrap().value;
    let q = Quantizer::with_cache(&basis, 4096);
    let first = q.weyl(&a).unwrap().value;
    let second = q.weyl(&a).unwrap().value;
    assert_eq!(plain, first);
    assert_eq!(first, second);
    let (hits, _) = q.cache().unwrap().stats();
    assert!(hits > 0 && q.cache().unwrap().len() <= 4096);
}

#[test]
fn worker_count_does_not_change_results() {
    let basis = HermiteBasis::with_default_grid(16).unwrap();
    let grid = PhaseGrid::new(6.0, 96).unwrap();
    let a = gaussian(grid, 1.0, 2.0);
    let run = |w: usize| rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap().install(|| weyl_quantize(&a, &basis).unwrap().value);
    assert_eq!(run(1).to_bytes(), run(3).to_bytes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rank_one_norms_factor(seed in 0u64..1000, p in 1.0f64..8.0) {
        let basis = HermiteBasis::with_default_grid(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Complex64> = (0..10).map(|_| rc(&mut rng)).collect();
        let b: Vec<Complex64> = (0..10).map(|_| rc(&mut rng)).collect();
        let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let t = rank_one_coefficients(&a, &b, &basis);
        let expect = norm(&a) * norm(&b);
        prop_assert!((schatten_norm(&t, p).unwrap() - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn singular_values_sorted_and_bounded(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = OperatorMatrix::from_fn(12, qha_core::hermite_rep::Fingerprint::ABSTRACT, |_, _| rc(&mut rng));
        let s = t.singular_spectrum();
        prop_assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((s.norm(2.0).unwrap() - t.hs_norm()).abs() < 1e-12 * t.hs_norm());
    }
}
