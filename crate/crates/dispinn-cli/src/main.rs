//! Command-line front end. Four subcommands cover the workflow: `train` fits
//! one network, `ensemble` retrains over the hyperparameter grid and keeps the
//! best model, `verify-bound` evaluates both sides of the a-posteriori error
//! bound for a checkpoint, and `uq` tabulates mean and standard deviation
//! fields over a parameter box. Every artifact is plain text (checkpoints,
//! CSV tables, JSON manifests) so runs can be diffed and replayed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use dispinn::config::ExperimentConfig;
use dispinn::exact::kdv_param_exact;
use dispinn::metrics::{
    net_point_evaluator, uniform_nodes, uq_statistics, verify_bound, BoundGrids,
};
use dispinn::net::Mlp;
use dispinn::train::{ensemble_train, run_generalization, train_single, EnsembleOutcome};

/// Default output directory when `--out-dir` is not given.
const OUT_DIR_ENV: &str = "DISPINN_OUT_DIR";

/// Bumped whenever the layout of emitted files changes.
const ARTIFACT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "dispinn",
    version,
    about = "Physics-informed networks for nonlinear dispersive equations",
    after_help = "Artifacts go to --out-dir, else $DISPINN_OUT_DIR, else ./runs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network; writes checkpoint, loss history, solution sample,
    /// and run manifest.
    Train(RunArgs),
    /// Retrain across the configured hyperparameter grid and keep the model
    /// with the lowest training error; writes the full result table.
    Ensemble(EnsembleArgs),
    /// Evaluate the error bound for a trained checkpoint; writes a JSON
    /// report with both sides of the inequality.
    VerifyBound(CheckArgs),
    /// Mean and standard deviation fields over the parameter box; writes a
    /// CSV with model and closed-form columns side by side.
    Uq(UqArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured iteration budget; 0 writes the untrained
    /// initialization.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Output directory (default: $DISPINN_OUT_DIR, then ./runs).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Worker threads for the retraining fan-out.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Trained checkpoint to verify.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Output directory (default: $DISPINN_OUT_DIR, then ./runs).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct UqArgs {
    /// Experiment configuration (TOML); must have a [uq] table and a
    /// parametric problem.
    #[arg(long)]
    config: PathBuf,
    /// Checkpoint for the model columns; without it the closed-form family
    /// itself stands in as the model.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Output directory (default: $DISPINN_OUT_DIR, then ./runs).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Everything needed to replay a run: the resolved configuration, the seeds,
/// the timings, and where the artifacts went. Serialization round-trips
/// losslessly.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct RunManifest {
    artifact_version: u32,
    experiment: String,
    command: String,
    config: ExperimentConfig,
    seeds: Vec<u64>,
    iterations: usize,
    wall_secs: f64,
    per_iter_secs: f64,
    outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    best: Option<BestRun>,
}

/// Selected row of an ensemble run.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct BestRun {
    config_id: usize,
    seed: u64,
    e_t: f64,
    e_g: f64,
    e_g_rel: f64,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Train(args) => cmd_train(&args),
        Command::Ensemble(args) => cmd_ensemble(&args),
        Command::VerifyBound(args) => cmd_verify_bound(&args),
        Command::Uq(args) => cmd_uq(&args),
    }
}

fn resolve_out_dir(arg: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = arg
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn resolved_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.training.seed = seed;
    }
    if let Some(iters) = args.max_iters {
        cfg.training.max_iters = iters;
    }
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    write_text(path, &text)
}

fn per_iter(wall_secs: f64, iterations: usize) -> f64 {
    if iterations == 0 {
        0.0
    } else {
        wall_secs / iterations as f64
    }
}

/// Model and reference values on the evaluation grid. The parametric family
/// is sampled at the box midpoint so the trace stays two-dimensional.
fn solution_csv(cfg: &ExperimentConfig, net: &Mlp) -> String {
    let domain = cfg.domain();
    let xs = uniform_nodes(domain.x_left, domain.x_right, cfg.evaluation.nx);
    let ts = uniform_nodes(0.0, domain.t_final, cfg.evaluation.nt);
    let mut eval = net_point_evaluator(net);
    let mut out = String::from("x,t,u_pinn,u_exact\n");
    match (cfg.problem.exact_solution(), cfg.problem.param_box()) {
        (Some(ex), _) => {
            for &t in &ts {
                for &x in &xs {
                    let up = eval(&[x, t]);
                    let ue = ex.eval(x, t);
                    out.push_str(&format!("{x:.17e},{t:.17e},{up:.17e},{ue:.17e}\n"));
                }
            }
        }
        (None, Some(pbox)) => {
            let mid: Vec<f64> =
                pbox.lo.iter().zip(&pbox.hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let mut input = vec![0.0; 2 + mid.len()];
            input[2..].copy_from_slice(&mid);
            for &t in &ts {
                for &x in &xs {
                    input[0] = x;
                    input[1] = t;
                    let up = eval(&input);
                    let ue = kdv_param_exact(x, t, mid[0], mid[1], mid[2], mid[3]);
                    out.push_str(&format!("{x:.17e},{t:.17e},{up:.17e},{ue:.17e}\n"));
                }
            }
        }
        (None, None) => unreachable!("every problem has a reference or a box"),
    }
    out
}

fn cmd_train(args: &RunArgs) -> Result<()> {
    let cfg = resolved_config(args)?;
    let dir = resolve_out_dir(&args.out_dir)?;
    let seed = cfg.training.seed;

    let start = Instant::now();
    let outcome = train_single(&cfg, seed)?;
    let wall_secs = start.elapsed().as_secs_f64();
    let iterations = outcome.history.last().map_or(0, |r| r.iter);
    let (e_g, e_g_rel) = run_generalization(&cfg, &outcome.net);

    let ckpt = dir.join(format!("{}.ckpt", cfg.name));
    outcome.net.save(&ckpt)?;

    let mut loss = String::from("iter,loss,grad_norm\n");
    for r in &outcome.history {
        loss.push_str(&format!("{},{:.17e},{:.17e}\n", r.iter, r.loss, r.grad_norm));
    }
    let loss_path = dir.join(format!("{}.loss.csv", cfg.name));
    write_text(&loss_path, &loss)?;

    let solution_path = dir.join(format!("{}.solution.csv", cfg.name));
    write_text(&solution_path, &solution_csv(&cfg, &outcome.net))?;

    let manifest_path = dir.join(format!("{}.manifest.json", cfg.name));
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION,
        experiment: cfg.name.clone(),
        command: "train".into(),
        seeds: vec![seed],
        iterations,
        wall_secs,
        per_iter_secs: per_iter(wall_secs, iterations),
        outputs: BTreeMap::from([
            ("checkpoint".into(), ckpt.display().to_string()),
            ("loss_history".into(), loss_path.display().to_string()),
            ("solution".into(), solution_path.display().to_string()),
        ]),
        best: None,
        config: cfg,
    };
    write_manifest(&manifest_path, &manifest)?;

    println!(
        "trained {} for {} iterations in {:.1}s: loss {:.3e}, E_T {:.3e}, E_G {:.3e} (rel {:.3e})",
        manifest.experiment,
        iterations,
        wall_secs,
        outcome.breakdown.total,
        outcome.breakdown.training_error(),
        e_g,
        e_g_rel
    );
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn ensemble_csv(out: &EnsembleOutcome) -> String {
    let mut table =
        String::from("config_id,hidden_layers,width,lambda,seed,iters,wall_secs,e_t,e_g,e_g_rel\n");
    for row in &out.rows {
        let s = row.setting;
        table.push_str(&format!(
            "{},{},{},{:.17e},{},{},{:.6},{:.17e},{:.17e},{:.17e}\n",
            s.config_id,
            s.hidden_layers,
            s.width,
            s.lambda,
            s.seed,
            row.iters,
            row.wall_secs,
            row.e_t,
            row.e_g,
            row.e_g_rel
        ));
    }
    table
}

fn cmd_ensemble(args: &EnsembleArgs) -> Result<()> {
    let cfg = resolved_config(&args.run)?;
    let dir = resolve_out_dir(&args.run.out_dir)?;

    let start = Instant::now();
    let outcome = ensemble_train(&cfg, args.jobs)?;
    let wall_secs = start.elapsed().as_secs_f64();

    let table_path = dir.join(format!("{}.ensemble.csv", cfg.name));
    write_text(&table_path, &ensemble_csv(&outcome))?;

    let ckpt = dir.join(format!("{}.best.ckpt", cfg.name));
    outcome.best.net.save(&ckpt)?;

    let best = &outcome.rows[outcome.best_index];
    let iterations = outcome.rows.iter().map(|r| r.iters).sum();
    let manifest_path = dir.join(format!("{}.manifest.json", cfg.name));
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION,
        experiment: cfg.name.clone(),
        command: "ensemble".into(),
        seeds: (cfg.training.seed..cfg.training.seed + cfg.training.n_retrain as u64).collect(),
        iterations,
        wall_secs,
        per_iter_secs: per_iter(wall_secs, iterations),
        outputs: BTreeMap::from([
            ("best_checkpoint".into(), ckpt.display().to_string()),
            ("table".into(), table_path.display().to_string()),
        ]),
        best: Some(BestRun {
            config_id: best.setting.config_id,
            seed: best.setting.seed,
            e_t: best.e_t,
            e_g: best.e_g,
            e_g_rel: best.e_g_rel,
        }),
        config: cfg,
    };
    write_manifest(&manifest_path, &manifest)?;

    println!(
        "{} runs in {:.1}s; best: config {} seed {} with E_T {:.3e}, E_G_rel {:.3e}",
        outcome.rows.len(),
        wall_secs,
        best.setting.config_id,
        best.setting.seed,
        best.e_t,
        best.e_g_rel
    );
    println!("wrote {}", manifest_path.display());
    Ok(())
}

fn cmd_verify_bound(args: &CheckArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let dir = resolve_out_dir(&args.out_dir)?;
    let report_path = dir.join(format!("{}.bound.json", cfg.name));

    // The bound is proved for the fixed-coefficient equations only; a
    // parametric study gets an explicit status instead of numbers.
    if cfg.problem.param_box().is_some() {
        let body = serde_json::json!({
            "artifact_version": ARTIFACT_VERSION,
            "experiment": cfg.name,
            "status": "not_covered",
            "reason": "the error bound does not cover the parametric family",
        });
        write_text(&report_path, &format!("{:#}\n", body))?;
        println!("bound not applicable to {}; wrote {}", cfg.name, report_path.display());
        return Ok(());
    }

    let net = Mlp::load(&args.checkpoint)?;
    if net.input_dim() != 2 {
        bail!(
            "checkpoint {} takes {} inputs, this problem needs 2",
            args.checkpoint.display(),
            net.input_dim()
        );
    }

    let exact = cfg.problem.exact_solution().expect("non-parametric family");
    // The peakon derivatives come from root-finding per evaluation, so the
    // sup-norm grid stays coarser there.
    let norm_grid = match exact {
        dispinn::exact::ExactSolution::ChSingle { .. }
        | dispinn::exact::ExactSolution::ChDouble { .. } => 96,
        _ => 256,
    };
    let grids = BoundGrids { nx: cfg.evaluation.nx, nt: cfg.evaluation.nt, norm_grid };
    let report =
        verify_bound(&net, &cfg.equation_spec(), |x, t| exact.eval(x, t), &cfg.domain(), &grids)?;

    let body = serde_json::json!({
        "artifact_version": ARTIFACT_VERSION,
        "experiment": cfg.name,
        "status": "ok",
        "checkpoint": args.checkpoint.display().to_string(),
        "grids": { "nx": grids.nx, "nt": grids.nt, "norm_grid": grids.norm_grid },
        "report": report,
    });
    write_text(&report_path, &format!("{:#}\n", body))?;

    println!(
        "E_G {:.6e} {} bound {:.6e} for {}",
        report.e_g,
        if report.satisfied { "<=" } else { ">" },
        report.bound_rhs,
        cfg.name
    );
    println!("wrote {}", report_path.display());
    Ok(())
}

fn cmd_uq(args: &UqArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let dir = resolve_out_dir(&args.out_dir)?;
    let Some(pbox) = cfg.problem.param_box() else {
        bail!("{} has no parameter box; uq needs the parametric family", cfg.name);
    };
    let Some(uq) = &cfg.uq else {
        bail!("{} has no [uq] table", cfg.name);
    };

    let domain = cfg.domain();
    let xs = uniform_nodes(domain.x_left, domain.x_right, uq.nx);
    let ts = uniform_nodes(0.0, domain.t_final, uq.nt);
    let exact_eval =
        |p: &[f64]| kdv_param_exact(p[0], p[1], p[2], p[3], p[4], p[5]);

    let model = match &args.checkpoint {
        Some(path) => {
            let net = Mlp::load(path)?;
            if net.input_dim() != 2 + pbox.dim() {
                bail!(
                    "checkpoint {} takes {} inputs, this study needs {}",
                    path.display(),
                    net.input_dim(),
                    2 + pbox.dim()
                );
            }
            uq_statistics(net_point_evaluator(&net), &pbox, &xs, &ts, uq.n_samples)
        }
        None => uq_statistics(exact_eval, &pbox, &xs, &ts, uq.n_samples),
    };
    let reference = uq_statistics(exact_eval, &pbox, &xs, &ts, uq.n_samples);

    let mut out = String::from("x,t,mean_pinn,std_pinn,mean_exact,std_exact\n");
    for (j, &t) in ts.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let k = j * xs.len() + i;
            out.push_str(&format!(
                "{x:.17e},{t:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                model.mean[k], model.std[k], reference.mean[k], reference.std[k]
            ));
        }
    }
    let csv_path = dir.join(format!("{}.uq.csv", cfg.name));
    write_text(&csv_path, &out)?;

    let worst = model
        .mean
        .iter()
        .zip(&reference.mean)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    println!(
        "{} points over {} parameter draws; max |mean_pinn - mean_exact| {:.3e}",
        model.mean.len(),
        uq.n_samples,
        worst
    );
    println!("wrote {}", csv_path.display());
    Ok(())
}
