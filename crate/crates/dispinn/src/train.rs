//! Training drivers: one seeded run, and retrained hyperparameter ensembles
//! that keep the model with the smallest training error.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::equation::EquationSpec;
use crate::exact::kdv_param_exact;
use crate::lbfgs::{minimize, HistoryRecord, LbfgsOptions, StopReason};
use crate::loss::{assemble_loss, LossBreakdown};
use crate::metrics::{
    generalization_error, generalization_error_parametric, net_point_evaluator, net_xt_evaluator,
};
use crate::net::Mlp;
use crate::sample::TrainingSet;
use crate::DispinnError;

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: Mlp,
    pub breakdown: LossBreakdown,
    pub history: Vec<HistoryRecord>,
    pub stop: StopReason,
    pub evals: usize,
}

/// One row of the ensemble: where the run sits in the hyperparameter grid
/// and which retrain seed it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSetting {
    pub config_id: usize,
    pub hidden_layers: usize,
    pub width: usize,
    pub lambda: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct EnsembleRow {
    pub setting: RunSetting,
    pub iters: usize,
    pub wall_secs: f64,
    pub loss: f64,
    pub e_t: f64,
    pub e_g: f64,
    pub e_g_rel: f64,
    pub failed: bool,
}

pub struct EnsembleOutcome {
    pub rows: Vec<EnsembleRow>,
    /// Index into `rows` of the selected model.
    pub best_index: usize,
    pub best: TrainOutcome,
}

/// Train one network from the seed's random initialization. Same seed and
/// config give the same parameters, bit for bit; `max_iters = 0` returns the
/// initialization untouched.
pub fn train_single(cfg: &ExperimentConfig, seed: u64) -> Result<TrainOutcome, DispinnError> {
    cfg.validate()?;
    let spec = cfg.equation_spec();
    let set = cfg.build_training_set()?;
    train_prepared(cfg, &cfg.widths(), cfg.training.lambda, &spec, &set, seed)
}

fn train_prepared(
    cfg: &ExperimentConfig,
    widths: &[usize],
    lambda: f64,
    spec: &EquationSpec,
    set: &TrainingSet,
    seed: u64,
) -> Result<TrainOutcome, DispinnError> {
    let t = cfg.training;
    let net0 = Mlp::init(widths, seed);
    let mut scratch = net0.clone();
    let f = |theta: &[f64], grad: &mut [f64]| -> f64 {
        scratch.theta.copy_from_slice(theta);
        // The config is validated, so the only assembly errors left are
        // non-finite arithmetic; fold them into the optimizer's NaN handling.
        match assemble_loss(&scratch, spec, set, lambda, t.lambda_reg, t.q, grad) {
            Ok(b) => b.total,
            Err(_) => f64::NAN,
        }
    };
    let res = minimize(f, net0.theta.clone(), t.max_iters, &LbfgsOptions::default());

    let mut net = net0;
    net.theta.copy_from_slice(&res.theta);
    let mut grad = vec![0.0; net.theta.len()];
    let breakdown = assemble_loss(&net, spec, set, lambda, t.lambda_reg, t.q, &mut grad)?;
    Ok(TrainOutcome { net, breakdown, history: res.history, stop: res.stop, evals: res.evals })
}

/// Generalization error of a trained network against the problem's reference
/// solution, on the config's evaluation grid (Sobol sampled over the
/// parameter box for the parametric family).
pub fn run_generalization(cfg: &ExperimentConfig, net: &Mlp) -> (f64, f64) {
    let domain = cfg.domain();
    match cfg.problem.exact_solution() {
        Some(ex) => generalization_error(
            net_xt_evaluator(net),
            |x, t| ex.eval(x, t),
            &domain,
            cfg.evaluation.nx,
            cfg.evaluation.nt,
        ),
        None => {
            let pbox = cfg.problem.param_box().expect("parametric problem has a box");
            generalization_error_parametric(
                net_point_evaluator(net),
                |p| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]),
                &domain,
                &pbox,
                cfg.evaluation.nx * cfg.evaluation.nt,
            )
        }
    }
}

/// Hyperparameter grid in row-major order (layers, then width, then lambda);
/// without an `[ensemble]` table the grid is the single configured setting.
pub fn expand_runs(cfg: &ExperimentConfig) -> Vec<RunSetting> {
    let grid: Vec<(usize, usize, f64)> = match &cfg.ensemble {
        Some(e) => {
            let mut g = Vec::with_capacity(e.hidden_layers.len() * e.width.len() * e.lambda.len());
            for &hl in &e.hidden_layers {
                for &w in &e.width {
                    for &l in &e.lambda {
                        g.push((hl, w, l));
                    }
                }
            }
            g
        }
        None => vec![(cfg.network.hidden_layers, cfg.network.width, cfg.training.lambda)],
    };
    let mut runs = Vec::with_capacity(grid.len() * cfg.training.n_retrain);
    for (config_id, &(hidden_layers, width, lambda)) in grid.iter().enumerate() {
        for r in 0..cfg.training.n_retrain {
            runs.push(RunSetting {
                config_id,
                hidden_layers,
                width,
                lambda,
                seed: cfg.training.seed + r as u64,
            });
        }
    }
    runs
}

/// Train the whole grid, `n_retrain` seeds per setting, and keep the run
/// with the smallest training error. Rows come back in grid-then-seed order
/// no matter how many worker threads run, so results do not depend on
/// `jobs`. Failed runs (non-finite losses) stay in the table but are skipped
/// by the selection; if every run fails, that is an error.
pub fn ensemble_train(
    cfg: &ExperimentConfig,
    jobs: usize,
) -> Result<EnsembleOutcome, DispinnError> {
    cfg.validate()?;
    let spec = cfg.equation_spec();
    let set = cfg.build_training_set()?;
    let runs = expand_runs(cfg);

    type Slot = Option<(EnsembleRow, Option<TrainOutcome>)>;
    let slots: Mutex<Vec<Slot>> = Mutex::new((0..runs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(runs.len());

    let work = |spec: &EquationSpec, set: &TrainingSet| loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= runs.len() {
            break;
        }
        let run = runs[i];
        let widths = cfg.widths_for(run.hidden_layers, run.width);
        let start = Instant::now();
        let outcome = train_prepared(cfg, &widths, run.lambda, spec, set, run.seed);
        let wall_secs = start.elapsed().as_secs_f64();
        let slot = match outcome {
            Ok(out) if out.breakdown.total.is_finite() => {
                let (e_g, e_g_rel) = run_generalization(cfg, &out.net);
                let row = EnsembleRow {
                    setting: run,
                    iters: out.history.len(),
                    wall_secs,
                    loss: out.breakdown.total,
                    e_t: out.breakdown.training_error(),
                    e_g,
                    e_g_rel,
                    failed: false,
                };
                (row, Some(out))
            }
            _ => {
                let row = EnsembleRow {
                    setting: run,
                    iters: 0,
                    wall_secs,
                    loss: f64::NAN,
                    e_t: f64::NAN,
                    e_g: f64::NAN,
                    e_g_rel: f64::NAN,
                    failed: true,
                };
                (row, None)
            }
        };
        slots.lock().unwrap()[i] = Some(slot);
    };

    if workers <= 1 {
        work(&spec, &set);
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| work(&spec, &set));
            }
        });
    }

    let mut rows: Vec<EnsembleRow> = Vec::with_capacity(runs.len());
    let mut best: Option<(usize, TrainOutcome)> = None;
    for slot in slots.into_inner().unwrap() {
        let (row, outcome) = slot.expect("every run slot is filled");
        if let Some(out) = outcome {
            // Strict comparison in row order makes ties resolve to the
            // earlier grid entry, then the smaller seed.
            let better = match &best {
                Some((bi, _)) => row.e_t < rows[*bi].e_t,
                None => true,
            };
            if better {
                best = Some((rows.len(), out));
            }
        }
        rows.push(row);
    }

    match best {
        Some((best_index, best)) => Ok(EnsembleOutcome { rows, best_index, best }),
        None => Err(DispinnError::Config("every ensemble run failed".into())),
    }
}
