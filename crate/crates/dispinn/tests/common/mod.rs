//! Checks shared between the focused integration suites and the acceptance
//! run: reference solutions against the finite-difference oracle, network
//! jets against finite differences, and the discrete Hilbert transforms.
//!
//! Each test binary compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use dispinn::equation::{residual_bundle, EquationSpec, FdField, Field, NetField};
use dispinn::exact::{kdv_param_exact, ExactSolution};
use dispinn::hilbert::{
    hilbert_line, hilbert_line_direct, hilbert_periodic, hilbert_periodic_direct, GridFunction,
};
use dispinn::loss::assemble_loss;
use dispinn::net::Mlp;
use dispinn::sample::{
    build_training_set, build_training_set_cartesian, build_training_set_parametric, Domain,
    ParamBox, TrainingSet,
};
use dispinn::stencil::diff2d;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn measured(name: &str, value: f64, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            pass: value < tol,
            detail: format!("{value:.3e} (tolerance {tol:.0e})"),
        }
    }
}

fn oracle_case(
    name: &str,
    exact: &ExactSolution,
    spec: &EquationSpec,
    set: &TrainingSet,
    max_i: usize,
    max_j: usize,
    steps: Option<(f64, f64)>,
    tol_int: f64,
    tol_trace: Option<f64>,
    out: &mut Vec<Check>,
) {
    let mut field = FdField::new(move |p: &[f64]| exact.eval(p[0], p[1]), max_i, max_j);
    if let Some((hx, ht)) = steps {
        field = field.with_steps(hx, ht);
    }
    let b = residual_bundle(&mut field, spec, set).unwrap();
    out.push(Check::measured(&format!("{name} interior residual"), b.max_interior(), tol_int));
    if let Some(tol) = tol_trace {
        out.push(Check::measured(
            &format!("{name} boundary residuals"),
            b.max_spatial().max(b.max_temporal()),
            tol,
        ));
    }
}

/// Every reference family pushed through the finite-difference (and discrete
/// Hilbert) residual oracle on a 256-interval discretization.
pub fn oracle_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let dom = Domain::new(-10.0, 10.0, 1.0);

    let exact = ExactSolution::KdvSingle;
    let spec = EquationSpec::kdv_kawahara_traces(1.0, 0.0, false, &exact, &dom);
    let set = build_training_set(dom, 256, 64, 64);
    oracle_case("kdv single", &exact, &spec, &set, 1, 3, None, 1e-4, Some(1e-8), &mut out);

    let dom2 = Domain::new(-10.0, 10.0, 2.0);
    let exact = ExactSolution::KdvDouble { a: 0.5, b: 1.0 };
    let spec = EquationSpec::kdv_kawahara_traces(1.0, 0.0, false, &exact, &dom2);
    let set = build_training_set(dom2, 256, 64, 64);
    oracle_case("kdv double", &exact, &spec, &set, 1, 3, None, 1e-4, Some(1e-8), &mut out);

    let exact = ExactSolution::Kawahara { x0: 0.0 };
    let spec = EquationSpec::kdv_kawahara_traces(1.0, 1.0, true, &exact, &dom);
    let set = build_training_set(dom, 256, 64, 64);
    oracle_case("kawahara", &exact, &spec, &set, 1, 5, None, 1e-4, Some(1e-8), &mut out);

    let exact = ExactSolution::ChSingle { k: 0.6, p: 1.0 };
    let spec = EquationSpec::camassa_holm_traces(0.36, &exact, &dom);
    let set = build_training_set(dom, 256, 64, 64);
    oracle_case("ch single", &exact, &spec, &set, 1, 3, None, 1e-3, Some(1e-7), &mut out);

    let domc = Domain::new(-10.0, 20.0, 1.0);
    let exact = ExactSolution::ChDouble {
        k: 0.6,
        p1: 1.5,
        p2: 1.0,
        alpha1: 6.0,
        alpha2: -6.0,
        alpha: 0.0,
    };
    let spec = EquationSpec::camassa_holm_traces(0.0, &exact, &domc);
    let set = build_training_set(domc, 256, 64, 64);
    // The colliding crests are much steeper than the single soliton, so the
    // default stencil step truncates badly; 0.0125 sits at the sweet spot
    // between truncation and the root-finder noise floor. The trace data is
    // differentiated at the default step, so the boundary comparison carries
    // the truncation difference between the two steps.
    oracle_case("ch double", &exact, &spec, &set, 1, 3, Some((0.0125, 0.005)), 1e-3, Some(1e-5), &mut out);

    // 257 spatial nodes (256 intervals) per slice for the nonlocal families;
    // the ratio keeps an integer number of time levels.
    let domb = Domain::new(-15.0, 15.0, 1.0);
    let ratio = 64.0 / 30.0;
    let exact = ExactSolution::BoPeriodic { l: 15.0, c: 0.25, x0: 0.0 };
    let spec = EquationSpec::benjamin_ono_traces(false, &exact);
    let set = build_training_set_cartesian(domb, 128, ratio, 64, 64).unwrap();
    oracle_case("bo periodic", &exact, &spec, &set, 1, 2, None, 1e-2, Some(1e-8), &mut out);

    let exact = ExactSolution::BoLineDouble { c1: 2.0, c2: 1.0 };
    let spec = EquationSpec::benjamin_ono_traces(true, &exact);
    let set = build_training_set_cartesian(domb, 128, ratio, 64, 64).unwrap();
    // The window-periodicity mismatch of the algebraically decaying tails is
    // a truncation artifact, not an oracle failure; only the interior is
    // gated here.
    oracle_case("bo line double", &exact, &spec, &set, 1, 2, None, 1e-2, None, &mut out);

    let pbox = ParamBox::new(vec![8.7, -0.4, 0.9, 0.9], vec![9.3, 0.4, 1.1, 1.1]);
    let set = build_training_set_parametric(dom, &pbox, 256, 64, 64);
    let spec = EquationSpec::kdv_parametric();
    let mut field = FdField::new(
        |p: &[f64]| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]),
        1,
        3,
    );
    let b = residual_bundle(&mut field, &spec, &set).unwrap();
    out.push(Check::measured("kdv parametric interior residual", b.max_interior(), 1e-4));
    // Spatial data is periodicity of the window; the sech tails at the box's
    // fattest corner leave a small gap.
    out.push(Check::measured(
        "kdv parametric boundary residuals",
        b.max_spatial().max(b.max_temporal()),
        5e-3,
    ));

    out
}

/// Jet-propagated derivatives of freshly initialized networks against central
/// finite differences, every order up to (1, 5).
pub fn jet_checks() -> Vec<Check> {
    let mut out = Vec::new();
    // Truncation grows with the 13th derivative of the composition, rounding
    // with h^-5; 0.04 balances the two on the deepest lane.
    let h = 0.04;
    for seed in [11, 12, 13] {
        let net = Mlp::init(&[2, 10, 10, 1], seed);
        let f = |x: f64, t: f64| net.eval(&[x, t], &mut Vec::new(), &mut Vec::new());
        let mut field = NetField::new(&net);
        let mut worst = 0.0_f64;
        for &(x, t) in &[(0.3, 0.2), (-0.7, 0.55), (1.1, 0.9)] {
            let jet = field.jet(&[x, t]);
            for i in 0..=1 {
                for j in 0..=5 {
                    let fd = diff2d(&f, x, t, i, j, h, h);
                    let rel = (jet.deriv(i, j) - fd).abs() / fd.abs().max(1.0);
                    worst = worst.max(rel);
                }
            }
        }
        out.push(Check::measured(
            &format!("jet derivatives vs finite differences (seed {seed})"),
            worst,
            1e-5,
        ));
    }
    out
}

/// Analytic loss gradients against central directional differences, twenty
/// random directions spread over the four equation families.
pub fn gradient_checks() -> Vec<Check> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(424242);
    let mut unit = |n: usize| {
        let mut d: Vec<f64> =
            (0..n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        d.iter_mut().for_each(|v| *v /= norm);
        d
    };

    let dom = Domain::new(-10.0, 10.0, 1.0);
    let kdv_exact = ExactSolution::KdvSingle;
    let kawa_exact = ExactSolution::Kawahara { x0: 0.0 };
    let ch_exact = ExactSolution::ChSingle { k: 0.6, p: 1.0 };
    let bo_exact = ExactSolution::BoLineDouble { c1: 2.0, c2: 1.0 };
    let bo_dom = Domain::new(-15.0, 15.0, 1.0);
    let cases: Vec<(&str, EquationSpec, TrainingSet)> = vec![
        (
            "kdv",
            EquationSpec::kdv_kawahara_traces(1.0, 0.0, false, &kdv_exact, &dom),
            build_training_set(dom, 48, 12, 12),
        ),
        (
            "kawahara",
            EquationSpec::kdv_kawahara_traces(1.0, 1.0, true, &kawa_exact, &dom),
            build_training_set(dom, 48, 12, 12),
        ),
        (
            "camassa-holm",
            EquationSpec::camassa_holm_traces(0.36, &ch_exact, &dom),
            build_training_set(dom, 48, 12, 12),
        ),
        (
            "benjamin-ono",
            EquationSpec::benjamin_ono_traces(true, &bo_exact),
            build_training_set_cartesian(bo_dom, 24, 0.8, 12, 12).unwrap(),
        ),
    ];

    let mut out = Vec::new();
    for (name, spec, set) in &cases {
        let net = Mlp::init(&[2, 10, 10, 1], 17);
        let m = net.theta.len();
        let mut grad = vec![0.0; m];
        let (lambda, lambda_reg) = (0.5, 1e-4);
        assemble_loss(&net, spec, set, lambda, lambda_reg, 2, &mut grad).unwrap();

        let mut scratch = vec![0.0; m];
        let mut worst = 0.0_f64;
        for _ in 0..5 {
            let d = unit(m);
            let h = 1e-6;
            let mut shifted = net.clone();
            for i in 0..m {
                shifted.theta[i] = net.theta[i] + h * d[i];
            }
            let jp =
                assemble_loss(&shifted, spec, set, lambda, lambda_reg, 2, &mut scratch).unwrap().total;
            for i in 0..m {
                shifted.theta[i] = net.theta[i] - h * d[i];
            }
            let jm =
                assemble_loss(&shifted, spec, set, lambda, lambda_reg, 2, &mut scratch).unwrap().total;
            let fd = (jp - jm) / (2.0 * h);
            let an: f64 = grad.iter().zip(&d).map(|(g, di)| g * di).sum();
            worst = worst.max((an - fd).abs() / fd.abs().max(1e-8));
        }
        out.push(Check::measured(
            &format!("{name} loss gradient vs directional differences"),
            worst,
            1e-5,
        ));
    }
    out
}

/// FFT versus direct-sum transforms, the spectral identity, and exact kernel
/// antisymmetry.
pub fn hilbert_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let l = 15.0;
    let n = 256;
    let xs: Vec<f64> = (0..=2 * n).map(|i| -l + i as f64 * l / n as f64).collect();

    let wiggle = GridFunction::new(
        xs.iter().map(|&x| (0.3 * x).sin() + 0.2 * (0.9 * x).cos() / (1.0 + x * x)).collect(),
        l,
    );
    let line_gap = hilbert_line(&wiggle)
        .values
        .iter()
        .zip(&hilbert_line_direct(&wiggle).values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    out.push(Check::measured("line transform fft vs direct sum", line_gap, 1e-12));

    let mut periodic_vals: Vec<f64> =
        xs.iter().map(|&x| (std::f64::consts::PI * x / l).sin()).collect();
    let last = periodic_vals.len() - 1;
    periodic_vals[last] = periodic_vals[0];
    let sine = GridFunction::new(periodic_vals, l);
    let per_gap = hilbert_periodic(&sine)
        .values
        .iter()
        .zip(&hilbert_periodic_direct(&sine).values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    out.push(Check::measured("periodic transform fft vs direct sum", per_gap, 1e-12));

    let spectral = hilbert_periodic(&sine)
        .values
        .iter()
        .zip(&xs)
        .map(|(h, &x)| (h + (std::f64::consts::PI * x / l).cos()).abs())
        .fold(0.0_f64, f64::max);
    out.push(Check::measured("sin maps to -cos at n = 256", spectral, 1e-3));

    // Kernel antisymmetry: columns of each direct transform matrix, compared
    // entrywise against the transposed column with no tolerance.
    let m = 24;
    for line in [true, false] {
        let nodes = if line { 2 * m + 1 } else { 2 * m };
        let mut columns = Vec::with_capacity(nodes);
        for c in 0..nodes {
            let mut e = vec![0.0; 2 * m + 1];
            e[c] = 1.0;
            let g = GridFunction::new(e, 5.0);
            columns.push(if line { hilbert_line_direct(&g) } else { hilbert_periodic_direct(&g) }.values);
        }
        let mut worst = 0.0_f64;
        for r in 0..nodes {
            for c in 0..nodes {
                worst = worst.max((columns[c][r] + columns[r][c]).abs());
            }
        }
        let name = format!(
            "{} kernel antisymmetry (exact)",
            if line { "line" } else { "periodic" }
        );
        out.push(Check { name, pass: worst == 0.0, detail: format!("max |K + K^T| = {worst:.1e}") });
    }

    out
}

/// Renders one pass/fail line per check and panics if any failed.
pub fn assert_all(label: &str, checks: &[Check]) {
    let mut failed = 0;
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {label}: {} = {}", c.name, c.detail);
        if !c.pass {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} {label} check(s) failed");
}
