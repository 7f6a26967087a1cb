//! Quality measures for trained models: dense-grid generalization errors,
//! mixed sup norms, the a-posteriori error bound, and parametric
//! uncertainty statistics.
//!
//! The bound has the shape
//!
//! ```text
//! E_G^2 <= (T + 2 C T^2 exp(2 C T)) *
//!          [ int R_tb^2 + a C1 sqrt(T) (sum_i int R_sbi^2)^(1/2)
//!            + b C2 sum_i int R_sbi^2 + intint R_int^2 ]
//! ```
//!
//! where the constants are mixed space-time sup norms of the model and the
//! reference solution, and the residual integrals are evaluated on a
//! deterministic high-resolution grid that is independent of the training
//! points. The coefficients (a, b) and the growth constant C depend on which
//! equation is being solved.

use serde::Serialize;

use crate::equation::{residual_bundle_net, EquationSpec, FdField, Field, NetField};
use crate::net::Mlp;
use crate::sample::{Domain, ParamBox, SampleSet, SliceLayout, TrainingSet};
use crate::sobol::sobol_points;
use crate::DispinnError;

/// `n + 1` equally spaced nodes covering `[a, b]` inclusive.
pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let h = (b - a) / n as f64;
    (0..=n).map(|i| if i == n { b } else { a + i as f64 * h }).collect()
}

fn trapezoid_weights(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..=n).map(|i| if i == 0 || i == n { 0.5 * h } else { h }).collect()
}

fn relative(e_g: f64, ref2: f64) -> f64 {
    if ref2 > 0.0 {
        e_g / ref2.sqrt()
    } else if e_g == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Space-time L2 distance between a model and the reference solution by
/// trapezoid quadrature on an `(nx + 1) x (nt + 1)` tensor grid, absolute
/// and relative to the reference's L2 norm.
pub fn generalization_error(
    mut model: impl FnMut(f64, f64) -> f64,
    mut exact: impl FnMut(f64, f64) -> f64,
    domain: &Domain,
    nx: usize,
    nt: usize,
) -> (f64, f64) {
    let xs = uniform_nodes(domain.x_left, domain.x_right, nx);
    let wx = trapezoid_weights(domain.x_left, domain.x_right, nx);
    let ts = uniform_nodes(0.0, domain.t_final, nt);
    let wt = trapezoid_weights(0.0, domain.t_final, nt);
    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for (&t, &wt) in ts.iter().zip(&wt) {
        for (&x, &wx) in xs.iter().zip(&wx) {
            let w = wx * wt;
            let u = exact(x, t);
            let d = model(x, t) - u;
            err2 += w * d * d;
            ref2 += w * u * u;
        }
    }
    let e_g = err2.sqrt();
    (e_g, relative(e_g, ref2))
}

/// Monte-Carlo analogue of [`generalization_error`] for parametric models:
/// Sobol quadrature over space, time, and the parameter box.
pub fn generalization_error_parametric(
    mut model: impl FnMut(&[f64]) -> f64,
    mut exact: impl FnMut(&[f64]) -> f64,
    domain: &Domain,
    pbox: &ParamBox,
    n_samples: usize,
) -> (f64, f64) {
    assert!(n_samples >= 1);
    let w = domain.measure() * pbox.volume() / n_samples as f64;
    let mut input = Vec::with_capacity(2 + pbox.dim());
    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for u in sobol_points(n_samples, 2 + pbox.dim()) {
        input.clear();
        input.push(domain.x_left + u[0] * domain.width());
        input.push(u[1] * domain.t_final);
        pbox.map(&u[2..], &mut input);
        let r = exact(&input);
        let d = model(&input) - r;
        err2 += w * d * d;
        ref2 += w * r * r;
    }
    let e_g = err2.sqrt();
    (e_g, relative(e_g, ref2))
}

/// Scalar network evaluation with reusable buffers.
pub fn net_point_evaluator(net: &Mlp) -> impl FnMut(&[f64]) -> f64 + '_ {
    let mut scratch = Vec::new();
    let mut next = Vec::new();
    move |p: &[f64]| net.eval(p, &mut scratch, &mut next)
}

/// As [`net_point_evaluator`], for plain `(x, t)` networks.
pub fn net_xt_evaluator(net: &Mlp) -> impl FnMut(f64, f64) -> f64 + '_ {
    let mut eval = net_point_evaluator(net);
    move |x, t| eval(&[x, t])
}

/// Grid maxima of `|d^i/dt^i d^j/dx^j u|` for all jet lanes at once.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupNormTable {
    pub sup: [[f64; 6]; 2],
}

impl SupNormTable {
    /// Maxima over an `(grid + 1)^2` tensor grid on the domain.
    pub fn compute(field: &mut dyn Field, domain: &Domain, grid: usize) -> Self {
        let xs = uniform_nodes(domain.x_left, domain.x_right, grid);
        let ts = uniform_nodes(0.0, domain.t_final, grid);
        let mut sup = [[0.0_f64; 6]; 2];
        for &t in &ts {
            for &x in &xs {
                let u = field.jet(&[x, t]);
                for (i, row) in sup.iter_mut().enumerate() {
                    for (j, s) in row.iter_mut().enumerate() {
                        *s = s.max(u.deriv(i, j).abs());
                    }
                }
            }
        }
        SupNormTable { sup }
    }

    /// Mixed norm `sum_{i<=m, j<=n} sup |d_t^i d_x^j u|`.
    pub fn mixed(&self, m: usize, n: usize) -> f64 {
        assert!(m <= 1 && n <= 5);
        self.sup[..=m].iter().map(|row| row[..=n].iter().sum::<f64>()).sum()
    }
}

/// Mixed sup norm of a field, estimated on a dense tensor grid.
pub fn sup_norms(field: &mut dyn Field, domain: &Domain, m: usize, n: usize, grid: usize) -> f64 {
    SupNormTable::compute(field, domain, grid).mixed(m, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFamily {
    KdvKawahara,
    CamassaHolm,
    BenjaminOno,
}

/// Stability constants entering the bound; `c3` is unused for the nonlocal
/// family, whose growth constant is `c2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn kdv_constants(star: &SupNormTable, exact: &SupNormTable) -> BoundConstants {
    BoundConstants {
        c1: exact.mixed(0, 4) + star.mixed(0, 4),
        c2: 0.5 * exact.mixed(0, 0) + 0.5,
        c3: star.mixed(0, 1) + 0.5 * exact.mixed(0, 1) + 0.5,
    }
}

pub fn ch_constants(kappa: f64, star: &SupNormTable, exact: &SupNormTable) -> BoundConstants {
    BoundConstants {
        c1: star.mixed(1, 1)
            + exact.mixed(1, 1)
            + exact.mixed(0, 1) * (star.mixed(0, 1) + exact.mixed(0, 1)),
        c2: kappa.abs() + star.mixed(0, 2) + exact.mixed(0, 2),
        c3: 0.5 + 3.0 * star.mixed(0, 1) + 1.5 * exact.mixed(0, 3),
    }
}

pub fn bo_constants(star: &SupNormTable, exact: &SupNormTable) -> BoundConstants {
    BoundConstants {
        c1: star.mixed(0, 2)
            + exact.mixed(0, 2)
            + exact.mixed(0, 0) * (exact.mixed(0, 0) + star.mixed(0, 0)),
        c2: 0.5 + star.mixed(0, 1) + 0.5 * exact.mixed(0, 1),
        c3: 0.0,
    }
}

/// Squared residual integrals: `int R_tb^2 dx`, `sum_i int R_sbi^2 dt`, and
/// `intint R_int^2 dx dt`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundTerms {
    pub r_tb_sq: f64,
    pub r_sb_sq: f64,
    pub r_int_sq: f64,
}

/// Right-hand side of the bound for given constants and residual integrals.
pub fn bound_rhs(family: BoundFamily, c: &BoundConstants, t: f64, terms: &BoundTerms) -> f64 {
    let (sb_sqrt, sb_lin, growth) = match family {
        BoundFamily::KdvKawahara => (10.0 * c.c1, 2.0 * c.c2, c.c3),
        BoundFamily::CamassaHolm => (8.0 * c.c1, 2.0 * c.c2, c.c3),
        BoundFamily::BenjaminOno => (2.0 * c.c1, 0.0, c.c2),
    };
    let inner = terms.r_tb_sq
        + sb_sqrt * t.sqrt() * terms.r_sb_sq.sqrt()
        + sb_lin * terms.r_sb_sq
        + terms.r_int_sq;
    ((t + 2.0 * growth * t * t * (2.0 * growth * t).exp()) * inner).sqrt()
}

/// Deterministic quadrature set for the residual integrals, shaped like a
/// training set but built from trapezoid nodes so it shares no points with
/// the Sobol training draws. Nonlocal interiors keep the slice structure the
/// transform needs, with `nx / 2` half-nodes per level and `nt` levels.
pub fn verification_set(spec: &EquationSpec, domain: &Domain, nx: usize, nt: usize) -> TrainingSet {
    assert!(nx >= 2 && nt >= 1);
    let ts = uniform_nodes(0.0, domain.t_final, nt);
    let wt = trapezoid_weights(0.0, domain.t_final, nt);
    let mut sb = SampleSet::with_capacity(2, 2 * ts.len());
    for face in [domain.x_left, domain.x_right] {
        for (&t, &w) in ts.iter().zip(&wt) {
            sb.push(&[face, t], w);
        }
    }

    let xs = uniform_nodes(domain.x_left, domain.x_right, nx);
    let wx = trapezoid_weights(domain.x_left, domain.x_right, nx);
    let mut tb = SampleSet::with_capacity(2, xs.len());
    for (&x, &w) in xs.iter().zip(&wx) {
        tb.push(&[x, 0.0], w);
    }

    let (interior, slices) = if matches!(spec, EquationSpec::BenjaminOno { .. }) {
        let n_half = (nx / 2).max(1);
        let n_space = 2 * n_half + 1;
        let dx = domain.width() / (n_space - 1) as f64;
        let dt = domain.t_final / nt as f64;
        let mid = 0.5 * (domain.x_left + domain.x_right);
        let mut interior = SampleSet::with_capacity(2, n_space * nt);
        for k in 1..=nt {
            let t = k as f64 * dt;
            for i in 0..n_space {
                let x = mid + (i as f64 - n_half as f64) * dx;
                let w = if i == 0 || i == n_space - 1 { 0.5 * dx } else { dx };
                interior.push(&[x, t], w * dt);
            }
        }
        (interior, Some(SliceLayout { n_space, n_time: nt, dx, dt }))
    } else {
        let mut interior = SampleSet::with_capacity(2, xs.len() * ts.len());
        for (&t, &wt) in ts.iter().zip(&wt) {
            for (&x, &wx) in xs.iter().zip(&wx) {
                interior.push(&[x, t], wx * wt);
            }
        }
        (interior, None)
    };

    let n_int = interior.len();
    TrainingSet {
        domain: *domain,
        interior,
        spatial_boundary: sb,
        temporal_boundary: tb,
        n_int,
        n_sb: ts.len(),
        n_tb: xs.len(),
        slices,
    }
}

/// Weighted residual integrals of a network over a quadrature set.
pub fn residual_integrals(
    net: &Mlp,
    spec: &EquationSpec,
    set: &TrainingSet,
) -> Result<BoundTerms, DispinnError> {
    let b = residual_bundle_net(net, spec, set)?;
    let r_int_sq = b
        .interior
        .iter()
        .enumerate()
        .map(|(i, r)| set.interior.weight(i) * r * r)
        .sum();
    // Both faces carry the same per-time weight, so the left-block weight
    // serves every component at that time.
    let r_sb_sq = b
        .spatial
        .iter()
        .enumerate()
        .map(|(n, comps)| {
            set.spatial_boundary.weight(n) * comps.iter().map(|r| r * r).sum::<f64>()
        })
        .sum();
    let r_tb_sq = b
        .temporal
        .iter()
        .enumerate()
        .map(|(n, r)| set.temporal_boundary.weight(n) * r * r)
        .sum();
    Ok(BoundTerms { r_tb_sq, r_sb_sq, r_int_sq })
}

/// Grid resolutions for bound verification: the residual quadrature grid
/// (`nx` by `nt` cells) and the per-axis sup-norm grid.
#[derive(Debug, Clone, Copy)]
pub struct BoundGrids {
    pub nx: usize,
    pub nt: usize,
    pub norm_grid: usize,
}

impl Default for BoundGrids {
    fn default() -> Self {
        BoundGrids { nx: 256, nt: 128, norm_grid: 256 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub family: BoundFamily,
    pub e_g: f64,
    pub e_g_rel: f64,
    pub residual_integrals: BoundTerms,
    pub constants: BoundConstants,
    pub bound_rhs: f64,
    pub satisfied: bool,
}

/// Evaluates both sides of the error bound for a trained network: the
/// generalization error against the reference solution on a dense grid, and
/// the residual-based right-hand side on an independent quadrature grid.
pub fn verify_bound(
    net: &Mlp,
    spec: &EquationSpec,
    exact: impl Fn(f64, f64) -> f64,
    domain: &Domain,
    grids: &BoundGrids,
) -> Result<BoundReport, DispinnError> {
    let (family, kappa, ex_i, ex_j) = match spec {
        EquationSpec::KdvKawahara { .. } => (BoundFamily::KdvKawahara, 0.0, 0, 4),
        EquationSpec::CamassaHolm { kappa, .. } => (BoundFamily::CamassaHolm, *kappa, 1, 3),
        EquationSpec::BenjaminOno { .. } => (BoundFamily::BenjaminOno, 0.0, 0, 2),
        EquationSpec::KdvParametric { .. } => {
            return Err(DispinnError::Param(
                "the error bound does not cover the parametric family".into(),
            ))
        }
    };

    let (e_g, e_g_rel) =
        generalization_error(net_xt_evaluator(net), |x, t| exact(x, t), domain, grids.nx, grids.nt);

    let star = SupNormTable::compute(&mut NetField::new(net), domain, grids.norm_grid);
    let exact_ref = &exact;
    let mut fd = FdField::new(move |p: &[f64]| exact_ref(p[0], p[1]), ex_i, ex_j);
    let ex_norms = SupNormTable::compute(&mut fd, domain, grids.norm_grid);

    let constants = match family {
        BoundFamily::KdvKawahara => kdv_constants(&star, &ex_norms),
        BoundFamily::CamassaHolm => ch_constants(kappa, &star, &ex_norms),
        BoundFamily::BenjaminOno => bo_constants(&star, &ex_norms),
    };

    let vset = verification_set(spec, domain, grids.nx, grids.nt);
    let terms = residual_integrals(net, spec, &vset)?;
    let rhs = bound_rhs(family, &constants, domain.t_final, &terms);

    Ok(BoundReport {
        family,
        e_g,
        e_g_rel,
        residual_integrals: terms,
        constants,
        bound_rhs: rhs,
        satisfied: e_g <= rhs,
    })
}

/// Pointwise mean and standard deviation fields over a parameter box.
#[derive(Debug, Clone, Serialize)]
pub struct UqFields {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// Time-major: entry `j * xs.len() + i` is the point `(xs[i], ts[j])`.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Sobol parameter draws mapped into the box.
pub fn parameter_samples(pbox: &ParamBox, n: usize) -> Vec<Vec<f64>> {
    sobol_points(n, pbox.dim())
        .iter()
        .map(|u| {
            let mut p = Vec::with_capacity(pbox.dim());
            pbox.map(u, &mut p);
            p
        })
        .collect()
}

/// Mean and population standard deviation of `eval(x, t, params)` over
/// `n_samples` Sobol draws from the box, at every grid point. A fully
/// degenerate box short-circuits to a single evaluation with exactly zero
/// standard deviation.
pub fn uq_statistics(
    mut eval: impl FnMut(&[f64]) -> f64,
    pbox: &ParamBox,
    xs: &[f64],
    ts: &[f64],
    n_samples: usize,
) -> UqFields {
    assert!(n_samples >= 1);
    let degenerate = pbox.lo == pbox.hi;
    let samples =
        if degenerate { vec![pbox.lo.clone()] } else { parameter_samples(pbox, n_samples) };

    let mut mean = Vec::with_capacity(xs.len() * ts.len());
    let mut std = Vec::with_capacity(xs.len() * ts.len());
    let mut input = vec![0.0; 2 + pbox.dim()];
    let mut vals = vec![0.0; samples.len()];
    for &t in ts {
        for &x in xs {
            input[0] = x;
            input[1] = t;
            for (v, p) in vals.iter_mut().zip(&samples) {
                input[2..].copy_from_slice(p);
                *v = eval(&input);
            }
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            mean.push(m);
            if degenerate {
                std.push(0.0);
            } else {
                let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
                    / vals.len() as f64;
                std.push(var.sqrt());
            }
        }
    }
    UqFields { xs: xs.to_vec(), ts: ts.to_vec(), mean, std }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{kdv_param_exact, ExactSolution};

    #[test]
    fn identical_fields_have_zero_error() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let ex = ExactSolution::KdvSingle;
        let (e_g, rel) =
            generalization_error(|x, t| ex.eval(x, t), |x, t| ex.eval(x, t), &dom, 64, 32);
        assert_eq!(e_g, 0.0);
        assert_eq!(rel, 0.0);
    }

    #[test]
    fn unit_offset_on_unit_square_has_unit_error() {
        let dom = Domain::new(0.0, 1.0, 1.0);
        let f = |x: f64, t: f64| (x + t).sin();
        let (e_g, _) = generalization_error(|x, t| f(x, t) + 1.0, f, &dom, 64, 64);
        assert!((e_g - 1.0).abs() < 1e-12, "{e_g}");
    }

    #[test]
    fn error_is_grid_converged() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let ex = ExactSolution::KdvSingle;
        let model = |x: f64, t: f64| ex.eval(x, t) + 0.01 * x.sin() * t.cos();
        let (coarse, _) = generalization_error(model, |x, t| ex.eval(x, t), &dom, 128, 64);
        let (fine, _) = generalization_error(model, |x, t| ex.eval(x, t), &dom, 256, 128);
        assert!((coarse - fine).abs() < 0.01 * fine, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn sup_norms_of_reference_fields() {
        let dom = Domain::new(0.0, std::f64::consts::TAU, 1.0);
        let mut c = FdField::new(|_: &[f64]| -3.0, 1, 5);
        assert!((sup_norms(&mut c, &dom, 0, 0, 8) - 3.0).abs() < 1e-12);
        // High-order difference lanes of a constant cancel to rounding noise
        // amplified by h^-5.
        assert!((sup_norms(&mut c, &dom, 1, 5, 8) - 3.0).abs() < 1e-4);

        let mut s = FdField::new(|p: &[f64]| p[0].sin(), 0, 1);
        assert!((sup_norms(&mut s, &dom, 0, 1, 512) - 2.0).abs() < 1e-3);

        let wide = Domain::new(-10.0, 10.0, 1.0);
        let ex = ExactSolution::KdvSingle;
        let mut k = FdField::new(move |p: &[f64]| ex.eval(p[0], p[1]), 0, 0);
        assert!((sup_norms(&mut k, &wide, 0, 0, 512) - 9.0).abs() < 1e-3);
    }

    #[test]
    fn bound_rhs_is_zero_monotone_and_sublinear() {
        let c = BoundConstants { c1: 2.0, c2: 1.5, c3: 0.8 };
        let zero = BoundTerms { r_tb_sq: 0.0, r_sb_sq: 0.0, r_int_sq: 0.0 };
        let base = BoundTerms { r_tb_sq: 1e-4, r_sb_sq: 2e-4, r_int_sq: 5e-4 };
        for family in
            [BoundFamily::KdvKawahara, BoundFamily::CamassaHolm, BoundFamily::BenjaminOno]
        {
            assert_eq!(bound_rhs(family, &c, 1.0, &zero), 0.0);

            let b0 = bound_rhs(family, &c, 1.0, &base);
            for bump in 0..3 {
                let mut t = base;
                match bump {
                    0 => t.r_tb_sq *= 2.0,
                    1 => t.r_sb_sq *= 2.0,
                    _ => t.r_int_sq *= 2.0,
                }
                assert!(bound_rhs(family, &c, 1.0, &t) > b0);
            }

            // Scaling every residual by s scales the bound by at most s.
            let s = 3.0;
            let scaled = BoundTerms {
                r_tb_sq: s * s * base.r_tb_sq,
                r_sb_sq: s * s * base.r_sb_sq,
                r_int_sq: s * s * base.r_int_sq,
            };
            assert!(bound_rhs(family, &c, 1.0, &scaled) <= s * b0 + 1e-12);
        }
    }

    #[test]
    fn verification_set_shapes_and_measures() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let spec = EquationSpec::kdv_kawahara_zero(1.0, 0.0, false);
        let set = verification_set(&spec, &dom, 16, 8);
        assert_eq!(set.interior.len(), 17 * 9);
        assert_eq!(set.n_sb, 9);
        assert_eq!(set.spatial_boundary.len(), 18);
        assert_eq!(set.temporal_boundary.len(), 17);
        let sum = |s: &SampleSet| s.weights.iter().sum::<f64>();
        assert!((sum(&set.interior) - dom.measure()).abs() < 1e-12 * dom.measure());
        assert!((sum(&set.spatial_boundary) - 2.0 * dom.t_final).abs() < 1e-12);
        assert!((sum(&set.temporal_boundary) - dom.width()).abs() < 1e-12 * dom.width());

        let bo = EquationSpec::benjamin_ono_zero(false);
        let set = verification_set(&bo, &dom, 16, 8);
        let layout = set.slices.expect("nonlocal interior keeps slices");
        assert_eq!(layout.n_space, 17);
        assert_eq!(layout.n_time, 8);
        assert_eq!(set.interior.len(), 17 * 8);
        assert!((sum(&set.interior) - dom.measure()).abs() < 1e-12 * dom.measure());
    }

    #[test]
    fn trivial_model_bound_report_is_all_zero() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let net = Mlp::zeroed(&[2, 8, 1]);
        let spec = EquationSpec::kdv_kawahara_zero(1.0, 0.0, false);
        let report =
            verify_bound(&net, &spec, |_, _| 0.0, &dom, &BoundGrids { nx: 32, nt: 16, norm_grid: 16 })
                .unwrap();
        assert_eq!(report.e_g, 0.0);
        assert_eq!(report.residual_integrals.r_int_sq, 0.0);
        assert_eq!(report.residual_integrals.r_sb_sq, 0.0);
        assert_eq!(report.residual_integrals.r_tb_sq, 0.0);
        assert_eq!(report.bound_rhs, 0.0);
        assert!(report.satisfied);

        let err = verify_bound(
            &net,
            &EquationSpec::kdv_parametric(),
            |_, _| 0.0,
            &dom,
            &BoundGrids::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn degenerate_box_statistics_match_single_evaluation() {
        let pbox = ParamBox::new(vec![9.0, 0.0, 1.0, 1.0], vec![9.0, 0.0, 1.0, 1.0]);
        let xs = uniform_nodes(-10.0, 10.0, 16);
        let ts = uniform_nodes(0.0, 1.0, 8);
        let f = |p: &[f64]| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]);
        let uq = uq_statistics(f, &pbox, &xs, &ts, 64);
        for (j, &t) in ts.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let k = j * xs.len() + i;
                assert_eq!(uq.std[k], 0.0);
                assert_eq!(uq.mean[k], kdv_param_exact(x, t, 9.0, 0.0, 1.0, 1.0));
            }
        }
    }

    #[test]
    fn parameter_sample_means_match_box_centers() {
        let pbox = ParamBox::new(vec![8.7, -0.4, 0.9, 0.9], vec![9.3, 0.4, 1.1, 1.1]);
        let samples = parameter_samples(&pbox, 512);
        assert_eq!(samples.len(), 512);
        for (k, center) in [9.0, 0.0, 1.0, 1.0].iter().enumerate() {
            let mean = samples.iter().map(|p| p[k]).sum::<f64>() / 512.0;
            assert!((mean - center).abs() < 0.01, "coordinate {k}: {mean}");
            assert!(samples.iter().all(|p| p[k] >= pbox.lo[k] && p[k] <= pbox.hi[k]));
        }
    }

    #[test]
    fn statistics_are_self_consistent_under_refinement() {
        let pbox = ParamBox::new(vec![8.7, -0.4, 0.9, 0.9], vec![9.3, 0.4, 1.1, 1.1]);
        let xs = uniform_nodes(-10.0, 10.0, 12);
        let ts = uniform_nodes(0.0, 1.0, 4);
        let f = |p: &[f64]| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]);
        let a = uq_statistics(f, &pbox, &xs, &ts, 128);
        let b = uq_statistics(f, &pbox, &xs, &ts, 256);
        for k in 0..a.mean.len() {
            assert!((a.mean[k] - b.mean[k]).abs() < 0.05, "mean at {k}");
            assert!((a.std[k] - b.std[k]).abs() < 0.05, "std at {k}");
        }
    }

    #[test]
    fn parametric_error_of_a_constant_offset() {
        let dom = Domain::new(-10.0, 10.0, 1.0);
        let pbox = ParamBox::new(vec![8.7, -0.4, 0.9, 0.9], vec![9.3, 0.4, 1.1, 1.1]);
        let f = |p: &[f64]| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]);
        let (zero, rel) = generalization_error_parametric(f, f, &dom, &pbox, 256);
        assert_eq!(zero, 0.0);
        assert_eq!(rel, 0.0);

        let (e_g, _) =
            generalization_error_parametric(|p| f(p) + 0.1, f, &dom, &pbox, 256);
        let expect = 0.1 * (dom.measure() * pbox.volume()).sqrt();
        assert!((e_g - expect).abs() < 1e-12 * expect, "{e_g} vs {expect}");
    }
}
