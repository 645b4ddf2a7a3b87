use crate::{basis, Artifact, Check, CliError, ExperimentConfig, ExperimentSpec, Gate, Level};
use qha_core::hermite_rep::HermiteBasis;
use qha_core::numerics::median;
use qha_core::operator_calculus::{
    conv_fun_op, conv_op_op_grid, fourier_wigner, rank_one_coefficients, schatten_norm, tau_quantize, weyl_quantize, weyl_quantize_many,
    OperatorMatrix,
};
use qha_core::phase_space::{build_measure, regularity_estimates, DiscreteMeasure, MeasureSpec, PhaseFunction, PhaseGrid, PhasePoint};
use qha_core::restriction_lab::*;
use qha_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::PI;

pub(crate) static REGISTRY: &[ExperimentSpec] = &[
    ExperimentSpec {
        name: "sphere-schatten",
        description: "circle spectrum decay and the Schatten threshold p*",
        anchor: "sharp threshold: L_{F(mu)} in S^p iff p > 4d/(2d-1)",
        gates: &[Gate::Circle],
        defaults: sphere_defaults,
        base_n: |c| c.usize("n_max"),
        run: sphere_schatten,
    },
    ExperimentSpec {
        name: "transfer",
        description: "Cohen-class transfer identities, window floor and the extension adjunction",
        anchor: "operator/function restriction transfer with floor e^{-pi R^2/2}",
        gates: &[Gate::Displacement],
        defaults: transfer_defaults,
        base_n: |_| 32,
        run: transfer,
    },
    ExperimentSpec {
        name: "werner-young",
        description: "randomized Young inequalities for both QHA convolutions",
        anchor: "Young inequality ||F*T||_{S^r} <= ||F||_{L^p} ||T||_{S^q}",
        gates: &[Gate::Displacement],
        defaults: young_defaults,
        base_n: |_| 32,
        run: werner_young,
    },
    ExperimentSpec {
        name: "convolution-theorem",
        description: "F_W(F*S) = F_sigma(F) F_W(S) for Gaussian and random low-rank S",
        anchor: "Werner convolution theorem",
        gates: &[Gate::Displacement],
        defaults: convolution_defaults,
        base_n: |_| 32,
        run: convolution_theorem,
    },
    ExperimentSpec {
        name: "pool-isometry",
        description: "HS norm of Weyl quantizations against the L2 norm of their symbols",
        anchor: "Pool: Weyl quantization is unitary from L2 onto Hilbert-Schmidt",
        gates: &[Gate::Displacement],
        defaults: pool_defaults,
        base_n: |_| 128,
        run: pool_isometry,
    },
    ExperimentSpec {
        name: "weyl-extension",
        description: "Weyl quantization of the classical extension against the quantum extension",
        anchor: "compatibility L_{E_sigma(G)} = E_W(G)",
        gates: &[Gate::Displacement],
        defaults: weyl_extension_defaults,
        base_n: |_| 128,
        run: weyl_extension,
    },
    ExperimentSpec {
        name: "tau-sweep",
        description: "Schatten thresholds of tau-extensions over the circle",
        anchor: "tau-quantized extensions share the threshold 4d/(2d-1)",
        gates: &[Gate::Circle],
        defaults: tau_defaults,
        base_n: |c| c.usize("n_start"),
        run: tau_sweep,
    },
    ExperimentSpec {
        name: "compactness",
        description: "singular spectra of E_W(1) across truncations and the decay-rate corollary",
        anchor: "L_{F(mu)} compact iff F(mu) vanishes at infinity; S^p for p > 4d/beta",
        gates: &[Gate::Circle],
        defaults: compactness_defaults,
        base_n: |c| if c.str("measure") == "circle" { 4096 } else { 64 },
        run: compactness,
    },
    ExperimentSpec {
        name: "bak-ratios",
        description: "empirical S^{p'} to L2(mu) ratios of the quantum extension",
        anchor: "Stein-Tomas type extension bound with exponent 2(4d-2alpha+beta)/beta",
        gates: &[Gate::Displacement],
        defaults: bak_defaults,
        base_n: |_| 64,
        run: bak_ratios,
    },
    ExperimentSpec {
        name: "regularity",
        description: "ball-growth exponent alpha and Fourier decay exponent beta of a measure",
        anchor: "hypotheses of the extension bound: |mu|(B(z,r)) <~ r^alpha, |F(mu)| <~ |z|^{-beta/2}",
        gates: &[],
        defaults: regularity_defaults,
        base_n: |c| c.usize("rays"),
        run: regularity,
    },
];

fn kv(pairs: &[(&str, Value)]) -> Vec<(String, Value)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn csv_bytes(header: [&str; 2], rows: impl Iterator<Item = (String, String)>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for (a, b) in rows {
        w.write_record([a, b]).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn range_check(name: &str, v: Option<f64>, lo: f64, hi: f64) -> Check {
    match v {
        Some(x) => Check::new(name, x >= lo && x <= hi, format!("{x:.6} in [{lo}, {hi}]")),
        None => Check::new(name, false, format!("no value; expected [{lo}, {hi}]")),
    }
}

fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

fn point(x: f64, xi: f64) -> Result<PhasePoint, CliError> {
    Ok(PhasePoint::new(x, xi)?)
}

/// Random operator `Σ_k a_k ⊗ b_k` of rank at most `max_rank`, with factors
/// on the first `span` Hermite functions.
fn random_low_rank(rng: &mut ChaCha8Rng, basis: &HermiteBasis, max_rank: usize, span: usize) -> OperatorMatrix {
    let n = basis.size();
    let rank = 1 + rng.random_range(0..max_rank.max(1));
    let span = span.min(n);
    let mut t = OperatorMatrix::zeros(n, basis.fingerprint());
    for _ in 0..rank {
        let a: Vec<Complex64> = (0..n).map(|k| if k < span { rc(rng) } else { Complex64::new(0.0, 0.0) }).collect();
        let b: Vec<Complex64> = (0..n).map(|k| if k < span { rc(rng) } else { Complex64::new(0.0, 0.0) }).collect();
        t = t.add(&rank_one_coefficients(&a, &b, basis)).expect("same basis");
    }
    t
}

fn unit(k: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn two_atoms() -> Result<DiscreteMeasure, CliError> {
    let w = Complex64::new(0.5, 0.0);
    Ok(DiscreteMeasure::from_atoms(vec![point(0.5, 0.0)?, point(-0.5, 0.0)?], vec![w, w])?)
}

/// The measure named by the `measure` key.
fn named_measure(cfg: &ExperimentConfig) -> Result<DiscreteMeasure, CliError> {
    let spec = match cfg.str("measure") {
        "circle" => MeasureSpec::circle(cfg.f64("radius"), cfg.usize("circle_nodes")),
        "dirac" => MeasureSpec::Dirac { x: 0.0, xi: 0.0 },
        "cantor" => MeasureSpec::Cantor { level: cfg.usize("cantor_level") as u32 },
        "two-atom" => return two_atoms(),
        other => return Err(CliError::Usage(format!("unknown measure \"{other}\"; expected circle, dirac, cantor or two-atom"))),
    };
    Ok(build_measure(&spec)?)
}

fn measure_defaults() -> Vec<(&'static str, Value)> {
    vec![("measure", json!("circle")), ("radius", json!(1.0)), ("circle_nodes", json!(4096)), ("cantor_level", json!(3))]
}

fn with_measure(extra: &[(&str, Value)]) -> Vec<(String, Value)> {
    let mut v = measure_defaults();
    v.extend(extra.iter().cloned());
    kv(&v)
}

/// Disc of lattice points with spacing `step` and radius `radius`.
fn disc_targets(radius: f64, step: f64) -> Vec<PhasePoint> {
    let k = (radius / step).floor() as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let (x, y) = (i as f64 * step, j as f64 * step);
            if x * x + y * y <= radius * radius {
                out.push(pp(x, y));
            }
        }
    }
    out
}

fn sup_relative(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    let scale = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let err = lhs.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

// ----- sphere-schatten

fn sphere_defaults() -> Vec<(String, Value)> {
    kv(&[
        ("r", json!(1.0)),
        ("mass", json!(1.0)),
        ("n_max", json!(1_000_000)),
        ("split", json!(0.5)),
        ("crossing", json!(0.05)),
        ("fit_lo", json!(1000.0)),
        ("fit_hi", json!(100000.0)),
        ("p_min", json!(3.0)),
        ("p_max", json!(5.0)),
        ("p_step", json!(0.1)),
    ])
}

fn p_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let (lo, hi, step) = (cfg.f64("p_min"), cfg.f64("p_max"), cfg.f64("p_step"));
    if !(step > 0.0 && hi > lo) {
        return Err(CliError::Usage("need p_max > p_min and p_step > 0".into()));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    // Rounded to the step's decimals so 4.4 is 4.4 and not 4.4000000000000004.
    Ok((0..=count).map(|k| ((lo + step * k as f64) * 1e9).round() / 1e9).collect())
}

fn sphere_schatten(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let spectrum = circle_spectrum_report(cfg.f64("r"), n, cfg.f64("mass"))?;
    let opts = ThresholdOptions { split: cfg.f64("split"), crossing: cfg.f64("crossing"), fit_range: (cfg.f64("fit_lo"), cfg.f64("fit_hi")) };
    let grid = p_grid(cfg)?;
    let rep = schatten_threshold_report_with(&spectrum.values, &grid, &opts)?;
    let mut level = Level::default();
    level.metric("decay_exponent", rep.decay_exponent);
    level.metric("p_star", rep.p_star);
    if let Some(k) = grid.iter().position(|p| (p - 4.4).abs() < 1e-9) {
        level.metric("tail_ratio_p4.4", Some(rep.tail_ratios[k]));
    }
    level.checks.push(range_check("decay_exponent", rep.decay_exponent, -0.28, -0.22));
    level.checks.push(range_check("p_star", rep.p_star, 3.9, 4.1));
    level.artifacts.push(Artifact {
        name: "spectrum.csv".into(),
        bytes: csv_bytes(["n", "lambda_n"], spectrum.values.iter().enumerate().map(|(k, v)| (k.to_string(), v.to_string()))),
    });
    level.artifacts.push(Artifact {
        name: "ratios.csv".into(),
        bytes: csv_bytes(["p", "ratio"], grid.iter().zip(&rep.tail_ratios).map(|(p, r)| (p.to_string(), r.to_string()))),
    });
    level.details = json!({ "spectrum": spectrum, "threshold": rep });
    Ok(level)
}

// ----- transfer

fn transfer_defaults() -> Vec<(String, Value)> {
    kv(&[("L", json!(6.0)), ("M", json!(144)), ("circle_nodes", json!(64)), ("cantor_level", json!(2)), ("duality_trials", json!(1000))])
}

fn transfer(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let basis = basis(n)?;
    let grid = PhaseGrid::new(cfg.f64("L"), cfg.usize("M"))?;
    let measures = [
        ("circle", build_measure(&MeasureSpec::circle(1.0, cfg.usize("circle_nodes")))?),
        ("two-atom", two_atoms()?),
        ("cantor", build_measure(&MeasureSpec::Cantor { level: cfg.usize("cantor_level") as u32 })?),
    ];
    let mut op_worst: f64 = 0.0;
    let mut margin = f64::INFINITY;
    let mut op_failures = Vec::new();
    let mut fun_worst: f64 = 0.0;
    let mut fun_failures = Vec::new();
    let gauss = PhaseFunction::from_real_fn(grid, |z| (-PI * z.norm_sqr()).exp());
    for (name, mu) in &measures {
        for i in 0..4.min(n) {
            for j in 0..4.min(n) {
                let t = rank_one_coefficients(&unit(i, n), &unit(j, n), &basis);
                let rep = transfer_check_with(TransferInput::Operator(&t), mu, &basis, &grid)?;
                op_worst = op_worst.max(rep.identity_error);
                margin = margin.min(rep.achieved_floor - rep.theoretical_floor);
                if !rep.passed {
                    op_failures.push(format!("{name} h{i}(x)h{j}: {rep:?}"));
                }
            }
        }
        let rep = transfer_check_with(TransferInput::Function(&gauss), mu, &basis, &grid)?;
        fun_worst = fun_worst.max(rep.identity_error);
        margin = margin.min(rep.achieved_floor - rep.theoretical_floor);
        if !rep.passed {
            fun_failures.push(format!("{name}: {rep:?}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials = cfg.usize("duality_trials");
    let mut gap: f64 = 0.0;
    for k in 0..trials {
        let mu = &measures[k % measures.len()].1;
        let phi: Vec<Complex64> = (0..mu.len()).map(|_| rc(&mut rng)).collect();
        let t = OperatorMatrix::from_fn(n, basis.fingerprint(), |_, _| rc(&mut rng));
        let (lhs, rhs) = adjoint_duality_check(&phi, &t, mu, &basis)?;
        let scale = lhs.norm().max(rhs.norm());
        if scale > 0.0 {
            gap = gap.max((lhs - rhs).norm() / scale);
        }
    }

    let mut level = Level::default();
    level.metric("operator_identity_error", Some(op_worst));
    level.metric("function_identity_error", Some(fun_worst));
    level.metric("floor_margin", Some(margin));
    level.metric("duality_gap", Some(gap));
    level.checks.push(Check::new(
        "operator_direction",
        op_failures.is_empty(),
        format!("48 rank-one checks, worst identity error {op_worst:.3e}, {} failures", op_failures.len()),
    ));
    level.checks.push(Check::new(
        "function_direction",
        fun_failures.is_empty(),
        format!("3 measures, worst identity error {fun_worst:.3e}, {} failures", fun_failures.len()),
    ));
    level.checks.push(Check::new("window_floor", margin >= -1e-9, format!("min achieved - theoretical = {margin:.3e}")));
    level.checks.push(Check::new("adjunction", gap < 1e-10, format!("{trials} instances, max relative gap {gap:.3e}")));
    level.details = json!({ "operator_failures": op_failures, "function_failures": fun_failures });
    Ok(level)
}

// ----- werner-young

fn young_defaults() -> Vec<(String, Value)> {
    kv(&[
        ("trials", json!(1000)),
        ("rank", json!(3)),
        ("span", json!(8)),
        ("fun_L", json!(6.0)),
        ("fun_M", json!(32)),
        ("op_L", json!(6.0)),
        // 0 picks the smallest grid whose FFT line covers the basis grid.
        ("op_M", json!(0)),
        ("slack", json!(1e-6)),
    ])
}

const YOUNG_TRIPLES: [(f64, f64, f64); 3] = [(1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 2.0, f64::INFINITY)];

fn werner_young(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let basis = basis(n)?;
    let fun_grid = PhaseGrid::new(cfg.f64("fun_L"), cfg.usize("fun_M"))?;
    let op_l = cfg.f64("op_L");
    let op_m = match cfg.usize("op_M") {
        // Spacing h = 2L/M with 1/(2h) equal to the basis half-width T;
        // then 2/h² = 8T² is an even integer for integer T.
        0 => (4.0 * op_l * basis.grid().half_width()).round() as usize,
        m => m,
    };
    let op_grid = PhaseGrid::new(op_l, op_m)?;
    let (rank, span, slack) = (cfg.usize("rank").max(1), cfg.usize("span"), cfg.f64("slack"));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials = cfg.usize("trials");
    let mut violations = Vec::new();
    let mut worst = [0.0f64; 6];
    for k in 0..trials {
        let operator_form = k % 2 == 1;
        let which = (k / 2) % 3;
        let (p, q, r) = YOUNG_TRIPLES[which];
        let t = random_low_rank(&mut rng, &basis, rank, span);
        let (lhs, rhs) = if operator_form {
            let s = random_low_rank(&mut rng, &basis, rank, span);
            let st = conv_op_op_grid(&s, &t, &op_grid, &basis)?;
            (st.lp_norm(r), schatten_norm(&s, p)? * schatten_norm(&t, q)?)
        } else {
            let c0 = pp(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
            let w = 0.8 + rng.random::<f64>();
            let amp = rc(&mut rng) * 2.0;
            let f = PhaseFunction::from_fn(fun_grid, |z| amp * (-PI * (z - c0).norm_sqr() / w).exp());
            let ft = conv_fun_op(&f, &t, &basis)?.value;
            (schatten_norm(&ft, r)?, f.lp_norm(p) * schatten_norm(&t, q)?)
        };
        let ratio = lhs / rhs;
        let slot = which + if operator_form { 3 } else { 0 };
        worst[slot] = worst[slot].max(ratio);
        if lhs > rhs * (1.0 + slack) {
            violations.push(json!({ "trial": k, "operator_form": operator_form, "p": p, "q": q, "r": r.to_string(), "lhs": lhs, "rhs": rhs }));
        }
    }
    let mut level = Level::default();
    level.metric("violations", Some(violations.len() as f64));
    for (slot, label) in ["fun_111", "fun_122", "fun_22inf", "op_111", "op_122", "op_22inf"].iter().enumerate() {
        level.metric(&format!("worst_ratio_{label}"), Some(worst[slot]));
    }
    level.checks.push(Check::new(
        "young_inequalities",
        violations.is_empty(),
        format!("{trials} trials, {} violations beyond relative slack {slack:e}", violations.len()),
    ));
    level.details = json!({ "violations": violations });
    Ok(level)
}

// ----- convolution-theorem

fn convolution_defaults() -> Vec<(String, Value)> {
    kv(&[
        ("L", json!(6.0)),
        ("M", json!(144)),
        ("random_trials", json!(100)),
        ("random_M", json!(96)),
        ("rank", json!(3)),
        ("span", json!(6)),
        ("width_min", json!(0.5)),
        ("width_max", json!(1.0)),
        ("target_radius", json!(1.5)),
    ])
}

fn convolution_theorem(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let basis = basis(n)?;
    let targets = disc_targets(cfg.f64("target_radius"), 0.25);
    let check = |f: &PhaseFunction, s: &OperatorMatrix| -> Result<f64, CliError> {
        let out = conv_fun_op(f, s, &basis)?.value;
        let lhs = fourier_wigner(&out, &targets, &basis)?;
        let fs = fourier_wigner(s, &targets, &basis)?;
        let rhs: Vec<Complex64> = f.fourier_at(&targets).iter().zip(&fs).map(|(a, b)| a * b).collect();
        Ok(sup_relative(&lhs, &rhs))
    };

    let grid = PhaseGrid::new(cfg.f64("L"), cfg.usize("M"))?;
    let f = PhaseFunction::from_real_fn(grid, |z| 2.0 * (-2.0 * PI * z.norm_sqr()).exp());
    let g = rank_one_coefficients(&unit(0, n), &unit(0, n), &basis);
    let gaussian_error = check(&f, &g)?;

    let coarse = PhaseGrid::new(cfg.f64("L"), cfg.usize("random_M"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (rank, span) = (cfg.usize("rank").max(1), cfg.usize("span"));
    let (w_lo, w_hi) = (cfg.f64("width_min"), cfg.f64("width_max"));
    let mut errors = Vec::new();
    for _ in 0..cfg.usize("random_trials") {
        let c0 = pp(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let w = w_lo + (w_hi - w_lo) * rng.random::<f64>();
        let f = PhaseFunction::from_real_fn(coarse, |z| (-PI * (z - c0).norm_sqr() / w).exp() / w);
        let s = random_low_rank(&mut rng, &basis, rank, span);
        errors.push(check(&f, &s)?);
    }
    let random_error = errors.iter().copied().fold(0.0, f64::max);
    let mut level = Level::default();
    level.metric("gaussian_sup_error", Some(gaussian_error));
    level.metric("random_sup_error", Some(random_error));
    level.checks.push(Check::new("gaussian", gaussian_error < 1e-6, format!("relative sup error {gaussian_error:.3e} < 1e-6")));
    level.checks.push(Check::new("random_low_rank", random_error < 1e-3, format!("relative sup error {random_error:.3e} < 1e-3")));
    level.details = json!({ "targets": targets.len(), "random_errors": errors });
    Ok(level)
}

// ----- pool-isometry

fn pool_defaults() -> Vec<(String, Value)> {
    kv(&[("symbols", json!(20)), ("L", json!(6.0)), ("M", json!(256)), ("bumps", json!(3)), ("tolerance", json!(1e-3))])
}

fn pool_isometry(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let basis = basis(n)?;
    let grid = PhaseGrid::new(cfg.f64("L"), cfg.usize("M"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Sums of a few complex Gaussian bumps near the origin.
    let symbols: Vec<PhaseFunction> = (0..cfg.usize("symbols"))
        .map(|_| {
            let bumps: Vec<(PhasePoint, f64, Complex64)> = (0..cfg.usize("bumps").max(1))
                .map(|_| {
                    let c0 = pp(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
                    (c0, 0.5 + 1.5 * rng.random::<f64>(), rc(&mut rng))
                })
                .collect();
            PhaseFunction::from_fn(grid, |z| bumps.iter().map(|(c, w, a)| a * (-PI * (z - *c).norm_sqr() / w).exp()).sum())
        })
        .collect();
    let ops = weyl_quantize_many(&symbols, &basis)?;
    let errors: Vec<f64> = symbols
        .iter()
        .zip(&ops)
        .map(|(a, l)| {
            let norm = a.l2_norm();
            (l.value.hs_norm() - norm).abs() / norm
        })
        .collect();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let tol = cfg.f64("tolerance");
    let mut level = Level::default();
    level.metric("max_relative_error", Some(worst));
    level.metric("median_relative_error", Some(median(&errors)));
    level.checks.push(Check::new("isometry", worst < tol, format!("{} symbols, worst {worst:.3e} < {tol:e}", errors.len())));
    level.details = json!({ "errors": errors });
    Ok(level)
}

// ----- weyl-extension

fn weyl_extension_defaults() -> Vec<(String, Value)> {
    kv(&[("L_values", json!("4,6,8")), ("h", json!(0.0625)), ("radius", json!(1.0)), ("circle_nodes", json!(512)), ("tolerance", json!(0.05))])
}

fn weyl_extension(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let basis = basis(n)?;
    let ls: Vec<f64> = cfg
        .str("L_values")
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad L_values entry \"{s}\""))))
        .collect::<Result<_, _>>()?;
    if ls.is_empty() {
        return Err(CliError::Usage("L_values is empty".into()));
    }
    let mu = build_measure(&MeasureSpec::circle(cfg.f64("radius"), cfg.usize("circle_nodes")))?;
    let ones = vec![Complex64::new(1.0, 0.0); mu.len()];
    let quantum = quantum_extension(&ones, &mu, &basis)?;
    let qn = quantum.hs_norm();
    let h = cfg.f64("h");
    let mut gaps = Vec::new();
    for &l in &ls {
        let m = (2.0 * l / h).round() as usize;
        let grid = PhaseGrid::new(l, m)?;
        let symbol = classical_extension(&ones, &mu, &grid)?;
        let op = weyl_quantize(&symbol, &basis)?.value;
        gaps.push(op.sub(&quantum)?.hs_norm() / qn);
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *gaps.last().unwrap();
    let tol = cfg.f64("tolerance");
    let mut level = Level::default();
    for (l, g) in ls.iter().zip(&gaps) {
        level.metric(&format!("discrepancy_L{l}"), Some(*g));
    }
    level.checks.push(Check::new("monotone_in_L", monotone, gaps.iter().map(|g| format!("{g:.4e}")).collect::<Vec<_>>().join(", ")));
    level.checks.push(Check::new("largest_box", last < tol, format!("{last:.4e} < {tol}")));
    level.details = json!({ "L": ls, "discrepancy": gaps });
    Ok(level)
}

// ----- tau-sweep

fn tau_defaults() -> Vec<(String, Value)> {
    kv(&[("radius", json!(1.0)), ("circle_nodes", json!(4096)), ("n_start", json!(1024)), ("doublings", json!(7)), ("agreement", json!(0.1))])
}

fn tau_sweep(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let mu = build_measure(&MeasureSpec::circle(cfg.f64("radius"), cfg.usize("circle_nodes")))?;
    // Same largest truncation at N and 2N; the 2N run just starts later.
    let base = cfg.n.unwrap_or(cfg.usize("n_start"));
    let mut doublings = cfg.usize("doublings");
    let mut start = n;
    while start > base && doublings > 2 {
        start /= 2;
        doublings -= 1;
    }
    let opts = TauThresholdOptions { n_start: n, doublings, ..Default::default() };
    let mut reports = Vec::new();
    for tau in [0.0, 0.5, 1.0] {
        reports.push(tau_threshold(&mu, tau, &opts)?);
    }
    let stars: Vec<Option<f64>> = reports.iter().map(|r| r.p_star).collect();
    let spread = if stars.iter().all(Option::is_some) {
        let v: Vec<f64> = stars.iter().flatten().copied().collect();
        Some(v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min))
    } else {
        None
    };

    // τ = 1/2 against Weyl on a small asymmetric symbol.
    let small = HermiteBasis::with_default_grid(16)?;
    let grid = PhaseGrid::new(6.0, 48)?;
    let c0 = pp(0.4, -0.3);
    let a = PhaseFunction::from_real_fn(grid, |z| (-PI * (z - c0).norm_sqr()).exp() * (1.0 + 0.3 * z.xi()));
    let identical = tau_quantize(&a, 0.5, &small)?.value.to_bytes() == weyl_quantize(&a, &small)?.value.to_bytes();

    let tol = cfg.f64("agreement");
    let mut level = Level::default();
    level.metric("p_star_tau0", stars[0]);
    level.metric("p_star_tau_half", stars[1]);
    level.metric("p_star_tau1", stars[2]);
    level.metric("spread", spread);
    level.checks.push(match spread {
        Some(s) => Check::new("thresholds_agree", s <= tol, format!("spread {s:.4} <= {tol}")),
        None => Check::new("thresholds_agree", false, "some threshold could not be fitted"),
    });
    level.checks.push(Check::new("tau_half_is_weyl", identical, "tau_quantize(a, 1/2) and weyl_quantize(a) byte-compared"));
    level.details = json!({ "reports": reports });
    Ok(level)
}

// ----- compactness

fn compactness_defaults() -> Vec<(String, Value)> {
    with_measure(&[
        ("level", json!(0.05)),
        ("index", json!(1000)),
        ("spectrum_len", json!(1_000_000)),
        ("rays", json!(64)),
        ("radius_samples", json!(4)),
        ("agreement_tolerance", json!(0.15)),
    ])
}

fn compactness(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let mu = named_measure(cfg)?;
    let opts = CompactnessOptions {
        level: cfg.f64("level"),
        index: cfg.usize("index"),
        spectrum_len: cfg.usize("spectrum_len"),
        rays: cfg.usize("rays"),
        radius_samples: cfg.usize("radius_samples"),
        seed: cfg.seed,
        agreement_tolerance: cfg.f64("agreement_tolerance"),
        ..Default::default()
    };
    let rep = compactness_probe_with(&mu, &[n, 2 * n], &opts)?;
    let last = rep.levels.last().expect("two levels");
    let mut level = Level::default();
    level.metric("s_index", last.s_index);
    level.metric("k_index", last.k_index.map(|k| k as f64));
    level.metric("s_max", Some(last.s_max));
    level.metric("beta_hat", rep.regularity.beta_hat);
    level.metric("corollary_p", rep.corollary_p);
    level.metric("p_star", rep.threshold.as_ref().and_then(|t| t.p_star));
    level.metric("agreement_gap", rep.agreement_gap);
    let verdict = rep.verdict.label();
    match cfg.str("measure") {
        "dirac" => {
            level.checks.push(Check::new("verdict", verdict == "not compact", verdict));
            let unit = rep.levels.iter().all(|l| l.all_unit);
            level.checks.push(Check::new("all_unit", unit, "every singular value equals 1"));
        }
        "circle" => {
            level.checks.push(Check::new("verdict", verdict == "compact-consistent", verdict));
            level.checks.push(match last.s_index {
                Some(s) => Check::new("s_index_small", s < opts.level, format!("s_{} = {s:.5} (required < {})", opts.index, opts.level)),
                None => Check::new("s_index_small", false, format!("truncation below index {}", opts.index)),
            });
            level.checks.push(match rep.agreement_gap {
                Some(g) => Check::new("corollary_agreement", g <= opts.agreement_tolerance, format!("|4/beta - p*| = {g:.4}")),
                None => Check::new("corollary_agreement", false, "beta or p* unavailable"),
            });
        }
        _ => level.checks.push(Check::new("verdict", verdict != "inconclusive", verdict)),
    }
    level.details = json!({ "verdict": verdict, "probe": rep });
    Ok(level)
}

// ----- bak-ratios

fn bak_defaults() -> Vec<(String, Value)> {
    let mut v = measure_defaults();
    v[2] = ("circle_nodes", json!(256));
    v.extend([("samples", json!(32)), ("alpha", json!(1.0)), ("beta", json!(1.0))]);
    kv(&v)
}

fn bak_ratios(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let mu = named_measure(cfg)?;
    let basis = basis(n)?;
    let p = bak_exponent(cfg.f64("alpha"), cfg.f64("beta")).ok_or_else(|| CliError::Usage("the exponent needs beta > 0".into()))?;
    let stats = bak_ratio_sampler(&mu, p, cfg.usize("samples"), cfg.seed, &basis)?;
    let finite = stats.ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let mut level = Level::default();
    level.metric("p_prime", Some(p));
    level.metric("max", Some(stats.max));
    level.metric("median", Some(stats.median));
    level.metric("min", Some(stats.min));
    level.checks.push(Check::new("finite", finite, format!("{} ratios in [{:.4}, {:.4}]", stats.samples, stats.min, stats.max)));
    level.details = json!({ "stats": stats });
    Ok(level)
}

// ----- regularity

fn regularity_defaults() -> Vec<(String, Value)> {
    let mut v = measure_defaults();
    v[3] = ("cantor_level", json!(6));
    v.extend([("rays", json!(64)), ("radius_samples", json!(4))]);
    kv(&v)
}

fn regularity(cfg: &ExperimentConfig, n: usize) -> Result<Level, CliError> {
    let mu = named_measure(cfg)?;
    let est = regularity_estimates(&mu, n, cfg.usize("radius_samples"), cfg.seed);
    let mut level = Level::default();
    level.metric("alpha_hat", est.alpha_hat);
    level.metric("beta_hat", est.beta_hat);
    match cfg.str("measure") {
        "circle" => {
            level.checks.push(range_check("alpha_hat", est.alpha_hat, 0.9, 1.1));
            level.checks.push(range_check("beta_hat", est.beta_hat, 0.9, 1.1));
        }
        "cantor" => {
            let dim = 2.0 * 2f64.ln() / 3f64.ln();
            level.checks.push(range_check("alpha_hat", est.alpha_hat, dim - 0.2, dim + 0.2));
        }
        "dirac" => {
            level.checks.push(range_check("beta_hat", est.beta_hat, -0.1, 0.1));
        }
        _ => {}
    }
    level.details = json!({ "estimates": est });
    Ok(level)
}

/// Finite coordinates by construction.
fn pp(x: f64, xi: f64) -> PhasePoint {
    PhasePoint::new(x, xi).expect("finite coordinates")
}
