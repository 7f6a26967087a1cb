//! Interior, spatial-boundary, and temporal-boundary residuals for the four
//! equation families, evaluated from solution jets.
//!
//! Residual formulas are written against [`Jet`] lanes so the same code paths
//! serve the network (via [`NetField`]) and finite-difference surrogates of
//! reference solutions (via [`FdField`]); the latter cross-validate the jet
//! arithmetic. Boundary and initial data enter as plain function handles;
//! soliton experiments wire them to traces of the reference solution since
//! the conditions are never stated in closed form.

use crate::exact::{kdv_param_exact, ExactSolution};
use crate::hilbert::HilbertOp;
use crate::jet::{Jet, FACT};
use crate::net::{JetTape, Mlp};
use crate::sample::{Domain, TrainingSet};
use crate::stencil::{diff1d, diff2d};
use crate::DispinnError;

pub type TimeFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ParamInitFn = Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Step sizes for finite-difference trace data and surrogate fields.
pub const FD_STEP_X: f64 = 0.05;
pub const FD_STEP_T: f64 = 0.02;

/// One equation family with its coefficients and data functions.
///
/// Boundary data conventions per family:
/// - `KdvKawahara`: `h = [u|left, u|right, u_x|left, u_x|right, u_xx|right]`
///   as functions of t; `u0` the initial profile.
/// - `CamassaHolm`: `h = [u|left, u|right, u_xx|left, u_xx|right]`; initial
///   data needs both `u0` and its spatial derivative `u0_x`.
/// - `BenjaminOno`: boundary residual is the periodicity gap, no data; `line`
///   selects the real-line Hilbert transform instead of the periodic one.
/// - `KdvParametric`: periodic in space; `u0(x, params)` parametrized by
///   `(alpha, beta, gamma, kappa)`.
pub enum EquationSpec {
    KdvKawahara { alpha: f64, beta: f64, drift: bool, h: [TimeFn; 5], u0: SpaceFn },
    CamassaHolm { kappa: f64, h: [TimeFn; 4], u0: SpaceFn, u0_x: SpaceFn },
    BenjaminOno { line: bool, u0: SpaceFn },
    KdvParametric { u0: ParamInitFn },
}

fn trace_t(exact: &ExactSolution, x: f64, order: usize) -> TimeFn {
    let e = exact.clone();
    if order == 0 {
        Box::new(move |t| e.eval(x, t))
    } else {
        Box::new(move |t| diff1d(|y| e.eval(y, t), x, order, FD_STEP_X))
    }
}

fn trace_x0(exact: &ExactSolution, order: usize) -> SpaceFn {
    let e = exact.clone();
    if order == 0 {
        Box::new(move |x| e.eval(x, 0.0))
    } else {
        Box::new(move |x| diff1d(|y| e.eval(y, 0.0), x, order, FD_STEP_X))
    }
}

fn zero_t() -> TimeFn {
    Box::new(|_| 0.0)
}

impl EquationSpec {
    /// KdV (`beta = 0`) or Kawahara family with data from reference traces.
    pub fn kdv_kawahara_traces(
        alpha: f64,
        beta: f64,
        drift: bool,
        exact: &ExactSolution,
        domain: &Domain,
    ) -> Self {
        let (xl, xr) = (domain.x_left, domain.x_right);
        EquationSpec::KdvKawahara {
            alpha,
            beta,
            drift,
            h: [
                trace_t(exact, xl, 0),
                trace_t(exact, xr, 0),
                trace_t(exact, xl, 1),
                trace_t(exact, xr, 1),
                trace_t(exact, xr, 2),
            ],
            u0: trace_x0(exact, 0),
        }
    }

    pub fn kdv_kawahara_zero(alpha: f64, beta: f64, drift: bool) -> Self {
        EquationSpec::KdvKawahara {
            alpha,
            beta,
            drift,
            h: [zero_t(), zero_t(), zero_t(), zero_t(), zero_t()],
            u0: Box::new(|_| 0.0),
        }
    }

    pub fn camassa_holm_traces(kappa: f64, exact: &ExactSolution, domain: &Domain) -> Self {
        let (xl, xr) = (domain.x_left, domain.x_right);
        EquationSpec::CamassaHolm {
            kappa,
            h: [
                trace_t(exact, xl, 0),
                trace_t(exact, xr, 0),
                trace_t(exact, xl, 2),
                trace_t(exact, xr, 2),
            ],
            u0: trace_x0(exact, 0),
            u0_x: trace_x0(exact, 1),
        }
    }

    pub fn camassa_holm_zero(kappa: f64) -> Self {
        EquationSpec::CamassaHolm {
            kappa,
            h: [zero_t(), zero_t(), zero_t(), zero_t()],
            u0: Box::new(|_| 0.0),
            u0_x: Box::new(|_| 0.0),
        }
    }

    pub fn benjamin_ono_traces(line: bool, exact: &ExactSolution) -> Self {
        EquationSpec::BenjaminOno { line, u0: trace_x0(exact, 0) }
    }

    pub fn benjamin_ono_zero(line: bool) -> Self {
        EquationSpec::BenjaminOno { line, u0: Box::new(|_| 0.0) }
    }

    /// Parametric family with the exact parametrized initial profile.
    pub fn kdv_parametric() -> Self {
        EquationSpec::KdvParametric {
            u0: Box::new(|x, p| kdv_param_exact(x, 0.0, p[0], p[1], p[2], p[3])),
        }
    }

    /// Network input dimension the family expects.
    pub fn input_dim(&self) -> usize {
        match self {
            EquationSpec::KdvParametric { .. } => 6,
            _ => 2,
        }
    }

    /// Number of spatial-boundary residual components per boundary time.
    pub fn sb_components(&self) -> usize {
        match self {
            EquationSpec::KdvKawahara { .. } => 5,
            EquationSpec::CamassaHolm { .. } => 4,
            EquationSpec::BenjaminOno { .. } | EquationSpec::KdvParametric { .. } => 1,
        }
    }

    /// Highest (t, x) derivative orders the interior residual reads.
    pub fn max_orders(&self) -> (usize, usize) {
        match self {
            EquationSpec::KdvKawahara { beta, .. } => (1, if *beta != 0.0 { 5 } else { 3 }),
            EquationSpec::CamassaHolm { .. } => (1, 3),
            EquationSpec::BenjaminOno { .. } => (1, 2),
            EquationSpec::KdvParametric { .. } => (1, 3),
        }
    }
}

/// Anything that can produce a solution jet at a collocation point
/// `(x, t, params...)`. Derivatives are taken in x and t only.
pub trait Field {
    fn jet(&mut self, point: &[f64]) -> Jet<12>;
}

/// Jet evaluation of a network.
pub struct NetField<'a> {
    net: &'a Mlp,
    tape: JetTape<12>,
    input: Vec<Jet<12>>,
}

impl<'a> NetField<'a> {
    pub fn new(net: &'a Mlp) -> Self {
        NetField {
            net,
            tape: JetTape::new(&net.widths),
            input: vec![Jet::zero(); net.input_dim()],
        }
    }
}

impl Field for NetField<'_> {
    fn jet(&mut self, point: &[f64]) -> Jet<12> {
        assert_eq!(point.len(), self.net.input_dim(), "input dimension mismatch");
        self.input[0] = Jet::seed_x(point[0]);
        self.input[1] = Jet::seed_t(point[1]);
        for (slot, &v) in self.input.iter_mut().zip(point).skip(2) {
            *slot = Jet::constant(v);
        }
        self.tape.forward(self.net, &self.input)
    }
}

/// Finite-difference surrogate of an arbitrary field, used to push reference
/// solutions through the residual formulas and to cross-check jets.
pub struct FdField<F: Fn(&[f64]) -> f64> {
    f: F,
    hx: f64,
    ht: f64,
    max_i: usize,
    max_j: usize,
}

impl<F: Fn(&[f64]) -> f64> FdField<F> {
    pub fn new(f: F, max_i: usize, max_j: usize) -> Self {
        assert!(max_i <= 1 && max_j <= 5);
        FdField { f, hx: FD_STEP_X, ht: FD_STEP_T, max_i, max_j }
    }

    pub fn with_steps(mut self, hx: f64, ht: f64) -> Self {
        self.hx = hx;
        self.ht = ht;
        self
    }
}

impl<F: Fn(&[f64]) -> f64> Field for FdField<F> {
    fn jet(&mut self, point: &[f64]) -> Jet<12> {
        assert!(point.len() <= 8);
        let mut template = [0.0; 8];
        template[..point.len()].copy_from_slice(point);
        let dim = point.len();
        let f = &self.f;
        let g = |x: f64, t: f64| {
            let mut p = template;
            p[0] = x;
            p[1] = t;
            f(&p[..dim])
        };
        let mut out = Jet::<12>::zero();
        for i in 0..=self.max_i {
            for j in 0..=self.max_j {
                let d = diff2d(g, point[0], point[1], i, j, self.hx, self.ht);
                out.c[i * Jet::<12>::COLS + j] = d / (FACT[i] * FACT[j]);
            }
        }
        out
    }
}

/// All residuals of one field over one training set. `spatial[n]` holds the
/// per-component values at boundary time n (both faces paired).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBundle {
    pub interior: Vec<f64>,
    pub spatial: Vec<Vec<f64>>,
    pub temporal: Vec<f64>,
}

impl ResidualBundle {
    pub fn max_interior(&self) -> f64 {
        self.interior.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_spatial(&self) -> f64 {
        self.spatial.iter().flatten().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_temporal(&self) -> f64 {
        self.temporal.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

// Interior residual values and their adjoints with respect to the jet lanes.
// The adjoint routines accumulate `rbar * dr/d(lane)` so a caller can chain
// them straight into the network backward pass.

pub fn kdv_interior<const L: usize>(alpha: f64, beta: f64, drift: bool, u: &Jet<L>) -> f64 {
    let mut r = u.deriv(1, 0) + u.deriv(0, 0) * u.deriv(0, 1) + alpha * u.deriv(0, 3);
    if drift {
        r += u.deriv(0, 1);
    }
    if beta != 0.0 {
        r -= beta * u.deriv(0, 5);
    }
    r
}

pub fn kdv_interior_vjp<const L: usize>(
    alpha: f64,
    beta: f64,
    drift: bool,
    u: &Jet<L>,
    rbar: f64,
    ubar: &mut Jet<L>,
) {
    ubar.add_deriv_cotangent(1, 0, rbar);
    ubar.add_deriv_cotangent(0, 0, rbar * u.deriv(0, 1));
    ubar.add_deriv_cotangent(0, 1, rbar * (u.deriv(0, 0) + if drift { 1.0 } else { 0.0 }));
    ubar.add_deriv_cotangent(0, 3, rbar * alpha);
    if beta != 0.0 {
        ubar.add_deriv_cotangent(0, 5, -rbar * beta);
    }
}

pub fn ch_interior<const L: usize>(kappa: f64, u: &Jet<L>) -> f64 {
    u.deriv(1, 0) - u.deriv(1, 2)
        + 3.0 * u.deriv(0, 0) * u.deriv(0, 1)
        + 2.0 * kappa * u.deriv(0, 1)
        - 2.0 * u.deriv(0, 1) * u.deriv(0, 2)
        - u.deriv(0, 0) * u.deriv(0, 3)
}

pub fn ch_interior_vjp<const L: usize>(kappa: f64, u: &Jet<L>, rbar: f64, ubar: &mut Jet<L>) {
    ubar.add_deriv_cotangent(1, 0, rbar);
    ubar.add_deriv_cotangent(1, 2, -rbar);
    ubar.add_deriv_cotangent(0, 0, rbar * (3.0 * u.deriv(0, 1) - u.deriv(0, 3)));
    ubar.add_deriv_cotangent(
        0,
        1,
        rbar * (3.0 * u.deriv(0, 0) + 2.0 * kappa - 2.0 * u.deriv(0, 2)),
    );
    ubar.add_deriv_cotangent(0, 2, -2.0 * rbar * u.deriv(0, 1));
    ubar.add_deriv_cotangent(0, 3, -rbar * u.deriv(0, 0));
}

/// Local (non-Hilbert) part of the Benjamin-Ono interior residual; the
/// transform of u_xx is subtracted per slice by the caller.
pub fn bo_interior_local<const L: usize>(u: &Jet<L>) -> f64 {
    u.deriv(1, 0) + u.deriv(0, 0) * u.deriv(0, 1)
}

pub fn bo_interior_local_vjp<const L: usize>(u: &Jet<L>, rbar: f64, ubar: &mut Jet<L>) {
    ubar.add_deriv_cotangent(1, 0, rbar);
    ubar.add_deriv_cotangent(0, 0, rbar * u.deriv(0, 1));
    ubar.add_deriv_cotangent(0, 1, rbar * u.deriv(0, 0));
}

pub fn parametric_interior<const L: usize>(gamma: f64, kappa: f64, u: &Jet<L>) -> f64 {
    u.deriv(1, 0) + gamma * u.deriv(0, 0) * u.deriv(0, 1) + kappa * u.deriv(0, 3)
}

pub fn parametric_interior_vjp<const L: usize>(
    gamma: f64,
    kappa: f64,
    u: &Jet<L>,
    rbar: f64,
    ubar: &mut Jet<L>,
) {
    ubar.add_deriv_cotangent(1, 0, rbar);
    ubar.add_deriv_cotangent(0, 0, rbar * gamma * u.deriv(0, 1));
    ubar.add_deriv_cotangent(0, 1, rbar * gamma * u.deriv(0, 0));
    ubar.add_deriv_cotangent(0, 3, rbar * kappa);
}

/// Evaluates every residual of `field` over `set`.
///
/// The Benjamin-Ono interior requires the grid-structured (sliced) training
/// set because u_xx is transformed along whole spatial slices.
pub fn residual_bundle(
    field: &mut dyn Field,
    spec: &EquationSpec,
    set: &TrainingSet,
) -> Result<ResidualBundle, DispinnError> {
    let mut interior = Vec::with_capacity(set.interior.len());
    let mut spatial = Vec::with_capacity(set.n_sb);
    let mut temporal = Vec::with_capacity(set.temporal_boundary.len());

    match spec {
        EquationSpec::KdvKawahara { alpha, beta, drift, h, u0 } => {
            for idx in 0..set.interior.len() {
                let u = field.jet(set.interior.point(idx));
                interior.push(kdv_interior(*alpha, *beta, *drift, &u));
            }
            for n in 0..set.n_sb {
                let t = set.boundary_time(n);
                let ul = field.jet(set.spatial_boundary.point(n));
                let ur = field.jet(set.spatial_boundary.point(n + set.n_sb));
                spatial.push(vec![
                    ul.deriv(0, 0) - h[0](t),
                    ur.deriv(0, 0) - h[1](t),
                    ul.deriv(0, 1) - h[2](t),
                    ur.deriv(0, 1) - h[3](t),
                    ur.deriv(0, 2) - h[4](t),
                ]);
            }
            for n in 0..set.temporal_boundary.len() {
                let p = set.temporal_boundary.point(n);
                let u = field.jet(p);
                temporal.push(u.deriv(0, 0) - u0(p[0]));
            }
        }
        EquationSpec::CamassaHolm { kappa, h, u0, u0_x } => {
            for idx in 0..set.interior.len() {
                let u = field.jet(set.interior.point(idx));
                interior.push(ch_interior(*kappa, &u));
            }
            for n in 0..set.n_sb {
                let t = set.boundary_time(n);
                let ul = field.jet(set.spatial_boundary.point(n));
                let ur = field.jet(set.spatial_boundary.point(n + set.n_sb));
                spatial.push(vec![
                    ul.deriv(0, 0) - h[0](t),
                    ur.deriv(0, 0) - h[1](t),
                    ul.deriv(0, 2) - h[2](t),
                    ur.deriv(0, 2) - h[3](t),
                ]);
            }
            for n in 0..set.temporal_boundary.len() {
                let p = set.temporal_boundary.point(n);
                let u = field.jet(p);
                let dv = u.deriv(0, 0) - u0(p[0]);
                let ds = u.deriv(0, 1) - u0_x(p[0]);
                temporal.push((dv * dv + ds * ds).sqrt());
            }
        }
        EquationSpec::BenjaminOno { line, u0 } => {
            let layout = set.slices.ok_or_else(|| {
                DispinnError::Param(
                    "Benjamin-Ono interior residuals need a grid-structured training set".into(),
                )
            })?;
            let n_half = (layout.n_space - 1) / 2;
            let mut op =
                if *line { HilbertOp::line(n_half) } else { HilbertOp::periodic(n_half) };
            let mut local = vec![0.0; layout.n_space];
            let mut uxx = vec![0.0; layout.n_space];
            let mut hout = vec![0.0; layout.n_space];
            for k in 0..layout.n_time {
                for i in 0..layout.n_space {
                    let u = field.jet(set.interior.point(k * layout.n_space + i));
                    local[i] = bo_interior_local(&u);
                    uxx[i] = u.deriv(0, 2);
                }
                op.apply(&uxx, &mut hout);
                for i in 0..layout.n_space {
                    interior.push(local[i] - hout[i]);
                }
            }
            for n in 0..set.n_sb {
                let ul = field.jet(set.spatial_boundary.point(n));
                let ur = field.jet(set.spatial_boundary.point(n + set.n_sb));
                spatial.push(vec![ul.deriv(0, 0) - ur.deriv(0, 0)]);
            }
            for n in 0..set.temporal_boundary.len() {
                let p = set.temporal_boundary.point(n);
                let u = field.jet(p);
                temporal.push(u.deriv(0, 0) - u0(p[0]));
            }
        }
        EquationSpec::KdvParametric { u0 } => {
            for idx in 0..set.interior.len() {
                let p = set.interior.point(idx);
                let u = field.jet(p);
                interior.push(parametric_interior(p[4], p[5], &u));
            }
            for n in 0..set.n_sb {
                let ul = field.jet(set.spatial_boundary.point(n));
                let ur = field.jet(set.spatial_boundary.point(n + set.n_sb));
                spatial.push(vec![ul.deriv(0, 0) - ur.deriv(0, 0)]);
            }
            for n in 0..set.temporal_boundary.len() {
                let p = set.temporal_boundary.point(n);
                let u = field.jet(p);
                temporal.push(u.deriv(0, 0) - u0(p[0], &p[2..]));
            }
        }
    }

    Ok(ResidualBundle { interior, spatial, temporal })
}

/// Residuals of a network over a training set.
pub fn residual_bundle_net(
    net: &Mlp,
    spec: &EquationSpec,
    set: &TrainingSet,
) -> Result<ResidualBundle, DispinnError> {
    let mut field = NetField::new(net);
    residual_bundle(&mut field, spec, set)
}
