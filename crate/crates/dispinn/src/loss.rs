//! Loss assembly: weighted squared residual sums plus the weight-norm
//! regularizer, with the exact gradient accumulated point by point.
//!
//! Each collocation point is pushed forward through the jet tape, the
//! residual cotangent is formed from the jet lanes, and the tape is walked
//! backward immediately, so memory stays flat in the training-set size. The
//! Benjamin-Ono interior couples all nodes of a time slice through the
//! Hilbert transform; its gradient uses the transform's adjoint (the negated
//! transform) on the weighted residuals, then a second forward pass per node.

use crate::equation::{
    bo_interior_local, bo_interior_local_vjp, ch_interior, ch_interior_vjp, kdv_interior,
    kdv_interior_vjp, parametric_interior, parametric_interior_vjp, EquationSpec, ParamInitFn,
    SpaceFn, TimeFn,
};
use crate::hilbert::HilbertOp;
use crate::jet::Jet;
use crate::net::{JetTape, Mlp};
use crate::sample::TrainingSet;
use crate::DispinnError;

/// Squared error components of one loss evaluation.
///
/// `total = e_tb2 + e_sb2 + lambda * e_int2 + lambda_reg * j_reg`; the
/// reported training error `sqrt(total - lambda_reg * j_reg)` leaves the
/// regularizer out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub e_tb2: f64,
    pub e_sb2: f64,
    pub e_int2: f64,
    pub j_reg: f64,
    pub lambda: f64,
    pub lambda_reg: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn training_error(&self) -> f64 {
        (self.e_tb2 + self.e_sb2 + self.lambda * self.e_int2).sqrt()
    }
}

fn forward2<const L: usize>(tape: &mut JetTape<L>, net: &Mlp, x: f64, t: f64) -> Jet<L> {
    tape.forward(net, &[Jet::seed_x(x), Jet::seed_t(t)])
}

fn loss_kdv_kawahara<const L: usize>(
    net: &Mlp,
    alpha: f64,
    beta: f64,
    drift: bool,
    h: &[TimeFn; 5],
    u0: &SpaceFn,
    set: &TrainingSet,
    lambda: f64,
    grad: &mut [f64],
) -> (f64, f64, f64) {
    let mut tape = JetTape::<L>::new(&net.widths);

    let mut e_int2 = 0.0;
    for idx in 0..set.interior.len() {
        let p = set.interior.point(idx);
        let w = set.interior.weight(idx);
        let u = forward2(&mut tape, net, p[0], p[1]);
        let r = kdv_interior(alpha, beta, drift, &u);
        e_int2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        kdv_interior_vjp(alpha, beta, drift, &u, 2.0 * lambda * w * r, &mut ubar);
        tape.backward(net, &ubar, grad);
    }

    let mut e_sb2 = 0.0;
    for n in 0..set.n_sb {
        let w = set.spatial_boundary.weight(n);
        let t = set.boundary_time(n);

        let pl = set.spatial_boundary.point(n);
        let ul = forward2(&mut tape, net, pl[0], pl[1]);
        let r1 = ul.deriv(0, 0) - h[0](t);
        let r3 = ul.deriv(0, 1) - h[2](t);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r1);
        ubar.add_deriv_cotangent(0, 1, 2.0 * w * r3);
        tape.backward(net, &ubar, grad);

        let pr = set.spatial_boundary.point(n + set.n_sb);
        let ur = forward2(&mut tape, net, pr[0], pr[1]);
        let r2 = ur.deriv(0, 0) - h[1](t);
        let r4 = ur.deriv(0, 1) - h[3](t);
        let r5 = ur.deriv(0, 2) - h[4](t);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r2);
        ubar.add_deriv_cotangent(0, 1, 2.0 * w * r4);
        ubar.add_deriv_cotangent(0, 2, 2.0 * w * r5);
        tape.backward(net, &ubar, grad);

        e_sb2 += w * (r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4 + r5 * r5);
    }

    let mut e_tb2 = 0.0;
    for n in 0..set.temporal_boundary.len() {
        let p = set.temporal_boundary.point(n);
        let w = set.temporal_boundary.weight(n);
        let u = forward2(&mut tape, net, p[0], p[1]);
        let r = u.deriv(0, 0) - u0(p[0]);
        e_tb2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r);
        tape.backward(net, &ubar, grad);
    }

    (e_int2, e_sb2, e_tb2)
}

fn loss_camassa_holm<const L: usize>(
    net: &Mlp,
    kappa: f64,
    h: &[TimeFn; 4],
    u0: &SpaceFn,
    u0_x: &SpaceFn,
    set: &TrainingSet,
    lambda: f64,
    grad: &mut [f64],
) -> (f64, f64, f64) {
    let mut tape = JetTape::<L>::new(&net.widths);

    let mut e_int2 = 0.0;
    for idx in 0..set.interior.len() {
        let p = set.interior.point(idx);
        let w = set.interior.weight(idx);
        let u = forward2(&mut tape, net, p[0], p[1]);
        let r = ch_interior(kappa, &u);
        e_int2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ch_interior_vjp(kappa, &u, 2.0 * lambda * w * r, &mut ubar);
        tape.backward(net, &ubar, grad);
    }

    let mut e_sb2 = 0.0;
    for n in 0..set.n_sb {
        let w = set.spatial_boundary.weight(n);
        let t = set.boundary_time(n);

        let pl = set.spatial_boundary.point(n);
        let ul = forward2(&mut tape, net, pl[0], pl[1]);
        let r1 = ul.deriv(0, 0) - h[0](t);
        let r3 = ul.deriv(0, 2) - h[2](t);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r1);
        ubar.add_deriv_cotangent(0, 2, 2.0 * w * r3);
        tape.backward(net, &ubar, grad);

        let pr = set.spatial_boundary.point(n + set.n_sb);
        let ur = forward2(&mut tape, net, pr[0], pr[1]);
        let r2 = ur.deriv(0, 0) - h[1](t);
        let r4 = ur.deriv(0, 2) - h[3](t);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r2);
        ubar.add_deriv_cotangent(0, 2, 2.0 * w * r4);
        tape.backward(net, &ubar, grad);

        e_sb2 += w * (r1 * r1 + r2 * r2 + r3 * r3 + r4 * r4);
    }

    // The temporal residual is the joint value/slope mismatch; its square is
    // what enters the loss, so both parts backpropagate independently.
    let mut e_tb2 = 0.0;
    for n in 0..set.temporal_boundary.len() {
        let p = set.temporal_boundary.point(n);
        let w = set.temporal_boundary.weight(n);
        let u = forward2(&mut tape, net, p[0], p[1]);
        let dv = u.deriv(0, 0) - u0(p[0]);
        let ds = u.deriv(0, 1) - u0_x(p[0]);
        e_tb2 += w * (dv * dv + ds * ds);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * dv);
        ubar.add_deriv_cotangent(0, 1, 2.0 * w * ds);
        tape.backward(net, &ubar, grad);
    }

    (e_int2, e_sb2, e_tb2)
}

fn loss_benjamin_ono<const L: usize>(
    net: &Mlp,
    line: bool,
    u0: &SpaceFn,
    set: &TrainingSet,
    lambda: f64,
    grad: &mut [f64],
) -> Result<(f64, f64, f64), DispinnError> {
    let layout = set.slices.ok_or_else(|| {
        DispinnError::Param("Benjamin-Ono loss needs a grid-structured training set".into())
    })?;
    let n_space = layout.n_space;
    let n_half = (n_space - 1) / 2;
    let mut op = if line { HilbertOp::line(n_half) } else { HilbertOp::periodic(n_half) };

    let mut tape = JetTape::<L>::new(&net.widths);
    let mut uxx = vec![0.0; n_space];
    let mut hout = vec![0.0; n_space];
    let mut s = vec![0.0; n_space];
    let mut g = vec![0.0; n_space];

    let mut e_int2 = 0.0;
    for k in 0..layout.n_time {
        let base = k * n_space;
        for i in 0..n_space {
            let p = set.interior.point(base + i);
            let u = forward2(&mut tape, net, p[0], p[1]);
            s[i] = bo_interior_local(&u);
            uxx[i] = u.deriv(0, 2);
        }
        op.apply(&uxx, &mut hout);
        // s now holds the residual scaled into the loss cotangent.
        for i in 0..n_space {
            let r = s[i] - hout[i];
            let w = set.interior.weight(base + i);
            e_int2 += w * r * r;
            s[i] = 2.0 * lambda * w * r;
        }
        // Cotangent of the u_xx layer: r = local - H u_xx and H^T = -H give
        // d/d(u_xx) = +H of the scaled residuals. On the periodic grid the
        // duplicate end node folds onto node 0 before the transform and
        // receives no u_xx cotangent of its own (uxx is free as a scratch
        // copy here).
        uxx.copy_from_slice(&s);
        if !line {
            uxx[0] += uxx[n_space - 1];
        }
        op.apply(&uxx, &mut g);
        if !line {
            g[n_space - 1] = 0.0;
        }
        for i in 0..n_space {
            let p = set.interior.point(base + i);
            let u = forward2(&mut tape, net, p[0], p[1]);
            let mut ubar = Jet::<L>::zero();
            bo_interior_local_vjp(&u, s[i], &mut ubar);
            ubar.add_deriv_cotangent(0, 2, g[i]);
            tape.backward(net, &ubar, grad);
        }
    }

    // The periodicity residual touches both faces: backpropagate through the
    // right point while its tape is fresh, then re-run the left point.
    let mut e_sb2 = 0.0;
    for n in 0..set.n_sb {
        let w = set.spatial_boundary.weight(n);
        let pl = set.spatial_boundary.point(n);
        let pr = set.spatial_boundary.point(n + set.n_sb);
        let vl = forward2(&mut tape, net, pl[0], pl[1]).deriv(0, 0);
        let ur = forward2(&mut tape, net, pr[0], pr[1]);
        let r = vl - ur.deriv(0, 0);
        e_sb2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, -2.0 * w * r);
        tape.backward(net, &ubar, grad);
        forward2(&mut tape, net, pl[0], pl[1]);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r);
        tape.backward(net, &ubar, grad);
    }

    let mut e_tb2 = 0.0;
    for n in 0..set.temporal_boundary.len() {
        let p = set.temporal_boundary.point(n);
        let w = set.temporal_boundary.weight(n);
        let u = forward2(&mut tape, net, p[0], p[1]);
        let r = u.deriv(0, 0) - u0(p[0]);
        e_tb2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r);
        tape.backward(net, &ubar, grad);
    }

    Ok((e_int2, e_sb2, e_tb2))
}

fn loss_parametric<const L: usize>(
    net: &Mlp,
    u0: &ParamInitFn,
    set: &TrainingSet,
    lambda: f64,
    grad: &mut [f64],
) -> (f64, f64, f64) {
    let mut tape = JetTape::<L>::new(&net.widths);
    let dim = set.interior.dim;
    let mut input = vec![Jet::<L>::zero(); dim];

    let fwd = |tape: &mut JetTape<L>, input: &mut Vec<Jet<L>>, p: &[f64]| -> Jet<L> {
        input[0] = Jet::seed_x(p[0]);
        input[1] = Jet::seed_t(p[1]);
        for (slot, &v) in input.iter_mut().zip(p).skip(2) {
            *slot = Jet::constant(v);
        }
        tape.forward(net, input)
    };

    let mut e_int2 = 0.0;
    for idx in 0..set.interior.len() {
        let p = set.interior.point(idx);
        let w = set.interior.weight(idx);
        let u = fwd(&mut tape, &mut input, p);
        let (gamma, kappa) = (p[4], p[5]);
        let r = parametric_interior(gamma, kappa, &u);
        e_int2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        parametric_interior_vjp(gamma, kappa, &u, 2.0 * lambda * w * r, &mut ubar);
        tape.backward(net, &ubar, grad);
    }

    let mut e_sb2 = 0.0;
    for n in 0..set.n_sb {
        let w = set.spatial_boundary.weight(n);
        let pl = set.spatial_boundary.point(n);
        let pr = set.spatial_boundary.point(n + set.n_sb);
        let vr = fwd(&mut tape, &mut input, pr).deriv(0, 0);
        let ul = fwd(&mut tape, &mut input, pl);
        let r = ul.deriv(0, 0) - vr;
        e_sb2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r);
        tape.backward(net, &ubar, grad);
        fwd(&mut tape, &mut input, pr);
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, -2.0 * w * r);
        tape.backward(net, &ubar, grad);
    }

    let mut e_tb2 = 0.0;
    for n in 0..set.temporal_boundary.len() {
        let p = set.temporal_boundary.point(n);
        let w = set.temporal_boundary.weight(n);
        let u = fwd(&mut tape, &mut input, p);
        let r = u.deriv(0, 0) - u0(p[0], &p[2..]);
        e_tb2 += w * r * r;
        let mut ubar = Jet::<L>::zero();
        ubar.add_deriv_cotangent(0, 0, 2.0 * w * r);
        tape.backward(net, &ubar, grad);
    }

    (e_int2, e_sb2, e_tb2)
}

/// Loss value, components, and exact parameter gradient.
///
/// `grad` must have one slot per network parameter; it is overwritten.
pub fn assemble_loss(
    net: &Mlp,
    spec: &EquationSpec,
    set: &TrainingSet,
    lambda: f64,
    lambda_reg: f64,
    q: u8,
    grad: &mut [f64],
) -> Result<LossBreakdown, DispinnError> {
    assert_eq!(grad.len(), net.theta.len(), "gradient buffer size mismatch");
    if !(q == 1 || q == 2) {
        return Err(DispinnError::Config(format!("regularizer exponent must be 1 or 2, got {q}")));
    }
    if lambda <= 0.0 || lambda_reg < 0.0 {
        return Err(DispinnError::Config(format!(
            "need lambda > 0 and lambda_reg >= 0, got {lambda}, {lambda_reg}"
        )));
    }
    grad.fill(0.0);

    let (e_int2, e_sb2, e_tb2) = match spec {
        EquationSpec::KdvKawahara { alpha, beta, drift, h, u0 } => {
            if *beta != 0.0 {
                loss_kdv_kawahara::<12>(net, *alpha, *beta, *drift, h, u0, set, lambda, grad)
            } else {
                loss_kdv_kawahara::<8>(net, *alpha, 0.0, *drift, h, u0, set, lambda, grad)
            }
        }
        EquationSpec::CamassaHolm { kappa, h, u0, u0_x } => {
            loss_camassa_holm::<8>(net, *kappa, h, u0, u0_x, set, lambda, grad)
        }
        EquationSpec::BenjaminOno { line, u0 } => {
            loss_benjamin_ono::<6>(net, *line, u0, set, lambda, grad)?
        }
        EquationSpec::KdvParametric { u0 } => loss_parametric::<8>(net, u0, set, lambda, grad),
    };

    let mut j_reg = 0.0;
    if lambda_reg > 0.0 {
        for range in net.weight_ranges() {
            for i in range {
                let th = net.theta[i];
                if q == 2 {
                    j_reg += th * th;
                    grad[i] += 2.0 * lambda_reg * th;
                } else {
                    j_reg += th.abs();
                    grad[i] += lambda_reg
                        * if th > 0.0 {
                            1.0
                        } else if th < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                }
            }
        }
    }

    let total = e_tb2 + e_sb2 + lambda * e_int2 + lambda_reg * j_reg;
    Ok(LossBreakdown { e_tb2, e_sb2, e_int2, j_reg, lambda, lambda_reg, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::residual_bundle_net;
    use crate::exact::ExactSolution;
    use crate::sample::{
        build_training_set, build_training_set_cartesian, build_training_set_parametric, Domain,
        ParamBox,
    };
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn specs_and_sets() -> Vec<(EquationSpec, TrainingSet, usize)> {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let exact = ExactSolution::KdvSingle;
        let kdv = EquationSpec::kdv_kawahara_traces(1.0, 0.0, false, &exact, &dom);
        let kawa = EquationSpec::kdv_kawahara_traces(
            1.0,
            1.0,
            true,
            &ExactSolution::Kawahara { x0: 0.0 },
            &dom,
        );
        let ch = EquationSpec::camassa_holm_traces(
            0.36,
            &ExactSolution::ChSingle { k: 0.6, p: 1.0 },
            &dom,
        );
        let bo = EquationSpec::benjamin_ono_traces(
            false,
            &ExactSolution::BoPeriodic { l: 15.0, c: 0.25, x0: 0.0 },
        );
        let bo_line =
            EquationSpec::benjamin_ono_traces(true, &ExactSolution::BoLineDouble { c1: 2.0, c2: 1.0 });
        let par = EquationSpec::kdv_parametric();

        let plain = build_training_set(dom, 48, 12, 12);
        let bo_dom = Domain::new(-15.0, 15.0, 1.0);
        let grid = build_training_set_cartesian(bo_dom, 15, 0.5, 8, 8).unwrap();
        let pbox = ParamBox::new(vec![8.7, -0.4, 0.9, 0.9], vec![9.3, 0.4, 1.1, 1.1]);
        let par_set = build_training_set_parametric(dom, &pbox, 48, 12, 12);

        vec![
            (kdv, plain.clone(), 2),
            (kawa, plain.clone(), 2),
            (ch, plain, 2),
            (bo, grid.clone(), 2),
            (bo_line, grid, 2),
            (par, par_set, 6),
        ]
    }

    #[test]
    fn zero_network_zero_data_gives_zero_loss_and_gradient() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let set = build_training_set(dom, 32, 8, 8);
        let net = Mlp::zeroed(&[2, 10, 1]);
        let spec = EquationSpec::kdv_kawahara_zero(1.0, 0.0, false);
        let mut grad = vec![0.0; net.theta.len()];
        let b = assemble_loss(&net, &spec, &set, 0.1, 0.0, 2, &mut grad).unwrap();
        assert_eq!(b.total, 0.0);
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn breakdown_identity_and_lambda_linearity() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let set = build_training_set(dom, 64, 16, 16);
        let net = Mlp::init(&[2, 12, 12, 1], 3);
        let spec = EquationSpec::kdv_kawahara_traces(1.0, 0.0, false, &ExactSolution::KdvSingle, &dom);
        let mut grad = vec![0.0; net.theta.len()];

        let b1 = assemble_loss(&net, &spec, &set, 0.1, 1e-4, 2, &mut grad).unwrap();
        let recomputed = b1.e_tb2 + b1.e_sb2 + 0.1 * b1.e_int2 + 1e-4 * b1.j_reg;
        assert!((b1.total - recomputed).abs() <= 1e-12 * b1.total.max(1.0));
        assert!(
            (b1.training_error() - (b1.total - 1e-4 * b1.j_reg).sqrt()).abs()
                < 1e-12 * b1.training_error().max(1.0)
        );

        let b2 = assemble_loss(&net, &spec, &set, 0.2, 1e-4, 2, &mut grad).unwrap();
        let diff = b2.total - b1.total;
        assert!((diff - 0.1 * b1.e_int2).abs() <= 1e-12 * b1.total.max(1.0), "{diff}");
    }

    #[test]
    fn loss_matches_residual_bundle_resummation() {
        for (spec, set, dim) in specs_and_sets() {
            let net = Mlp::init(&[dim, 10, 10, 1], 11);
            let mut grad = vec![0.0; net.theta.len()];
            let (lambda, lambda_reg) = (0.7, 5e-3);
            let b = assemble_loss(&net, &spec, &set, lambda, lambda_reg, 2, &mut grad).unwrap();

            let bundle = residual_bundle_net(&net, &spec, &set).unwrap();
            let mut j = 0.0;
            for (idx, r) in bundle.interior.iter().enumerate() {
                j += lambda * set.interior.weight(idx) * r * r;
            }
            for (n, comps) in bundle.spatial.iter().enumerate() {
                let w = set.spatial_boundary.weight(n);
                for r in comps {
                    j += w * r * r;
                }
            }
            for (n, r) in bundle.temporal.iter().enumerate() {
                j += set.temporal_boundary.weight(n) * r * r;
            }
            let mut reg = 0.0;
            for range in net.weight_ranges() {
                for i in range {
                    reg += net.theta[i] * net.theta[i];
                }
            }
            j += lambda_reg * reg;
            assert!((b.total - j).abs() <= 1e-12 * j.max(1.0), "{} vs {j}", b.total);
        }
    }

    #[test]
    fn gradient_matches_directional_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut unit = |n: usize| {
            let mut d: Vec<f64> = (0..n)
                .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
                .collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter_mut().for_each(|v| *v /= norm);
            d
        };

        for (spec, set, dim) in specs_and_sets() {
            let net = Mlp::init(&[dim, 10, 10, 1], 17);
            let m = net.theta.len();
            let mut grad = vec![0.0; m];
            let (lambda, lambda_reg) = (0.5, 1e-4);
            assemble_loss(&net, &spec, &set, lambda, lambda_reg, 2, &mut grad).unwrap();

            let mut scratch = vec![0.0; m];
            for _ in 0..4 {
                let d = unit(m);
                let h = 1e-6;
                let mut shifted = net.clone();
                for i in 0..m {
                    shifted.theta[i] = net.theta[i] + h * d[i];
                }
                let jp = assemble_loss(&shifted, &spec, &set, lambda, lambda_reg, 2, &mut scratch)
                    .unwrap()
                    .total;
                for i in 0..m {
                    shifted.theta[i] = net.theta[i] - h * d[i];
                }
                let jm = assemble_loss(&shifted, &spec, &set, lambda, lambda_reg, 2, &mut scratch)
                    .unwrap()
                    .total;
                let fd = (jp - jm) / (2.0 * h);
                let an: f64 = grad.iter().zip(&d).map(|(g, di)| g * di).sum();
                let rel = (an - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-5, "directional derivative {an} vs {fd} (rel {rel})");
            }
        }
    }

    #[test]
    fn regularizer_covers_weights_only() {
        let net = Mlp::init(&[2, 6, 1], 5);
        let dom = Domain::new(-1.0, 1.0, 1.0);
        let set = build_training_set(dom, 8, 4, 4);
        let spec = EquationSpec::kdv_kawahara_zero(1.0, 0.0, false);

        let mut g0 = vec![0.0; net.theta.len()];
        let mut g1 = vec![0.0; net.theta.len()];
        let b0 = assemble_loss(&net, &spec, &set, 1.0, 0.0, 1, &mut g0).unwrap();
        let b1 = assemble_loss(&net, &spec, &set, 1.0, 0.5, 1, &mut g1).unwrap();

        let weight_l1: f64 = net
            .weight_ranges()
            .into_iter()
            .flat_map(|r| net.theta[r].to_vec())
            .map(f64::abs)
            .sum();
        assert!((b1.total - b0.total - 0.5 * weight_l1).abs() < 1e-12);

        // Bias slots see no regularizer gradient.
        let weight_idx: Vec<usize> = net.weight_ranges().into_iter().flatten().collect();
        for i in 0..net.theta.len() {
            if weight_idx.contains(&i) {
                let sign = net.theta[i].signum() * 0.5;
                assert!((g1[i] - g0[i] - sign).abs() < 1e-12);
            } else {
                assert_eq!(g1[i], g0[i]);
            }
        }
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let net = Mlp::zeroed(&[2, 4, 1]);
        let set = build_training_set(Domain::new(0.0, 1.0, 1.0), 4, 2, 2);
        let spec = EquationSpec::kdv_kawahara_zero(1.0, 0.0, false);
        let mut grad = vec![0.0; net.theta.len()];
        assert!(assemble_loss(&net, &spec, &set, 1.0, 0.0, 3, &mut grad).is_err());
        assert!(assemble_loss(&net, &spec, &set, 0.0, 0.0, 2, &mut grad).is_err());
        assert!(assemble_loss(&net, &spec, &set, 1.0, -1.0, 2, &mut grad).is_err());
    }
}
