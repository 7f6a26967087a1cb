//! Experiment configuration: TOML schema, validation, and the wiring from a
//! named problem to its reference solution, equation residuals, training
//! set, and network layout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::equation::EquationSpec;
use crate::exact::ExactSolution;
use crate::sample::{
    build_training_set, build_training_set_cartesian, build_training_set_parametric, Domain,
    ParamBox, TrainingSet,
};
use crate::DispinnError;

/// Problem families, each pinned to the equation its reference solution
/// solves: the plain KdV problems use u_t + u u_x + u_xxx = 0, the Kawahara
/// problem adds the drift and fifth-derivative terms, the shallow-water
/// family fixes kappa from the soliton parameters, and the nonlocal family
/// chooses the periodic or real-line transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProblemKind {
    KdvSingle,
    KdvDouble { a: f64, b: f64 },
    Kawahara { x0: f64 },
    ChSingle { k: f64, p: f64 },
    ChDouble { k: f64, p1: f64, p2: f64, alpha1: f64, alpha2: f64, alpha: f64 },
    BoPeriodic { l: f64, c: f64, x0: f64 },
    BoLineDouble { c1: f64, c2: f64 },
    KdvParametric { box_lo: [f64; 4], box_hi: [f64; 4] },
}

impl ProblemKind {
    /// Reference solution, if the family has a single one (the parametric
    /// family is a 4-parameter surface instead).
    pub fn exact_solution(&self) -> Option<ExactSolution> {
        match *self {
            ProblemKind::KdvSingle => Some(ExactSolution::KdvSingle),
            ProblemKind::KdvDouble { a, b } => Some(ExactSolution::KdvDouble { a, b }),
            ProblemKind::Kawahara { x0 } => Some(ExactSolution::Kawahara { x0 }),
            ProblemKind::ChSingle { k, p } => Some(ExactSolution::ChSingle { k, p }),
            ProblemKind::ChDouble { k, p1, p2, alpha1, alpha2, alpha } => {
                Some(ExactSolution::ChDouble { k, p1, p2, alpha1, alpha2, alpha })
            }
            ProblemKind::BoPeriodic { l, c, x0 } => Some(ExactSolution::BoPeriodic { l, c, x0 }),
            ProblemKind::BoLineDouble { c1, c2 } => Some(ExactSolution::BoLineDouble { c1, c2 }),
            ProblemKind::KdvParametric { .. } => None,
        }
    }

    pub fn param_box(&self) -> Option<ParamBox> {
        match self {
            ProblemKind::KdvParametric { box_lo, box_hi } => {
                Some(ParamBox::new(box_lo.to_vec(), box_hi.to_vec()))
            }
            _ => None,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            ProblemKind::KdvParametric { .. } => 6,
            _ => 2,
        }
    }

    pub fn is_grid_interior(&self) -> bool {
        matches!(self, ProblemKind::BoPeriodic { .. } | ProblemKind::BoLineDouble { .. })
    }

    /// Equation residual specification with data wired to the reference
    /// solution's traces.
    pub fn equation_spec(&self, domain: &Domain) -> EquationSpec {
        match self {
            ProblemKind::KdvSingle | ProblemKind::KdvDouble { .. } => {
                EquationSpec::kdv_kawahara_traces(
                    1.0,
                    0.0,
                    false,
                    &self.exact_solution().unwrap(),
                    domain,
                )
            }
            ProblemKind::Kawahara { .. } => EquationSpec::kdv_kawahara_traces(
                1.0,
                1.0,
                true,
                &self.exact_solution().unwrap(),
                domain,
            ),
            ProblemKind::ChSingle { k, .. } => {
                EquationSpec::camassa_holm_traces(k * k, &self.exact_solution().unwrap(), domain)
            }
            ProblemKind::ChDouble { .. } => {
                EquationSpec::camassa_holm_traces(0.0, &self.exact_solution().unwrap(), domain)
            }
            ProblemKind::BoPeriodic { .. } => {
                EquationSpec::benjamin_ono_traces(false, &self.exact_solution().unwrap())
            }
            ProblemKind::BoLineDouble { .. } => {
                EquationSpec::benjamin_ono_traces(true, &self.exact_solution().unwrap())
            }
            ProblemKind::KdvParametric { .. } => EquationSpec::kdv_parametric(),
        }
    }

    /// Equation coefficient kappa for the bound constants (shallow-water
    /// families only).
    pub fn kappa(&self) -> Option<f64> {
        match self {
            ProblemKind::ChSingle { k, .. } => Some(k * k),
            ProblemKind::ChDouble { .. } => Some(0.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub x_left: f64,
    pub x_right: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    #[serde(default)]
    pub n_int: usize,
    pub n_sb: usize,
    pub n_tb: usize,
    /// Half node count of the spatial grid (grid families only): 2N+1 nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_half: Option<usize>,
    /// Time-to-space step ratio for the grid interior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub hidden_layers: usize,
    pub width: usize,
}

fn default_q() -> u8 {
    2
}

fn default_retrain() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub lambda: f64,
    #[serde(default)]
    pub lambda_reg: f64,
    #[serde(default = "default_q")]
    pub q: u8,
    #[serde(default = "default_retrain")]
    pub n_retrain: usize,
    #[serde(default)]
    pub seed: u64,
    pub max_iters: usize,
}

fn default_eval_nx() -> usize {
    256
}

fn default_eval_nt() -> usize {
    128
}

/// Dense evaluation grid for generalization errors and solution dumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default = "default_eval_nx")]
    pub nx: usize,
    #[serde(default = "default_eval_nt")]
    pub nt: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { nx: default_eval_nx(), nt: default_eval_nt() }
    }
}

/// Hyperparameter grid for ensemble training; the run set is the cartesian
/// product, each retrained n_retrain times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub hidden_layers: Vec<usize>,
    pub width: Vec<usize>,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UqConfig {
    pub n_samples: usize,
    pub nx: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemKind,
    pub domain: DomainConfig,
    pub sampling: SamplingConfig,
    pub network: NetworkConfig,
    pub training: TrainingConfig,
    #[serde(default)]
    pub evaluation: EvalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uq: Option<UqConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, DispinnError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| DispinnError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, DispinnError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DispinnError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text).map_err(|e| match e {
            DispinnError::Config(msg) => {
                DispinnError::Config(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), DispinnError> {
        let bad = |msg: String| Err(DispinnError::Config(msg));
        let d = &self.domain;
        if !(d.x_left < d.x_right) || !(d.t_final > 0.0) {
            return bad(format!(
                "degenerate domain ({}, {}) x (0, {})",
                d.x_left, d.x_right, d.t_final
            ));
        }
        if self.sampling.n_sb == 0 || self.sampling.n_tb == 0 {
            return bad("boundary point counts must be positive".into());
        }
        if self.problem.is_grid_interior() {
            if self.sampling.n_half.is_none() || self.sampling.grid_ratio.is_none() {
                return bad("grid interiors need sampling.n_half and sampling.grid_ratio".into());
            }
        } else if self.sampling.n_int == 0 {
            return bad("sampling.n_int must be positive".into());
        }
        if self.network.hidden_layers == 0 || self.network.width == 0 {
            return bad("network needs at least one hidden layer and positive width".into());
        }
        let t = &self.training;
        if !(t.lambda > 0.0) || t.lambda_reg < 0.0 {
            return bad(format!(
                "need lambda > 0 and lambda_reg >= 0, got {} and {}",
                t.lambda, t.lambda_reg
            ));
        }
        if !(t.q == 1 || t.q == 2) {
            return bad(format!("regularizer exponent must be 1 or 2, got {}", t.q));
        }
        if t.n_retrain == 0 {
            return bad("n_retrain must be at least 1".into());
        }
        if self.evaluation.nx < 2 || self.evaluation.nt < 2 {
            return bad("evaluation grid needs at least 2 cells per axis".into());
        }
        if let Some(e) = &self.ensemble {
            if e.hidden_layers.is_empty() || e.width.is_empty() || e.lambda.is_empty() {
                return bad("ensemble grid axes must be non-empty".into());
            }
        }
        if let ProblemKind::KdvParametric { box_lo, box_hi } = &self.problem {
            if box_lo.iter().zip(box_hi).any(|(a, b)| a > b) {
                return bad("parameter box has an inverted side".into());
            }
            // The exact family needs alpha > beta, gamma != 0, kappa > 0
            // throughout the box.
            if box_lo[0] <= box_hi[1] || box_lo[2] * box_hi[2] <= 0.0 || box_lo[3] <= 0.0 {
                return bad("parameter box leaves the family's valid range".into());
            }
        } else {
            self.problem
                .exact_solution()
                .expect("non-parametric family has a reference solution")
                .validate()?;
        }
        if let ProblemKind::BoPeriodic { l, .. } = self.problem {
            let half = 0.5 * (d.x_right - d.x_left);
            if (l - half).abs() > 1e-12 * half.abs().max(1.0)
                || (d.x_left + d.x_right).abs() > 1e-12
            {
                return bad(format!(
                    "periodic problem needs a symmetric domain (-L, L) with L = {l}"
                ));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.domain.x_left, self.domain.x_right, self.domain.t_final)
    }

    /// Network layer widths, input through output.
    pub fn widths(&self) -> Vec<usize> {
        self.widths_for(self.network.hidden_layers, self.network.width)
    }

    pub fn widths_for(&self, hidden_layers: usize, width: usize) -> Vec<usize> {
        let mut w = vec![self.problem.input_dim()];
        w.extend(std::iter::repeat(width).take(hidden_layers));
        w.push(1);
        w
    }

    pub fn equation_spec(&self) -> EquationSpec {
        self.problem.equation_spec(&self.domain())
    }

    pub fn build_training_set(&self) -> Result<TrainingSet, DispinnError> {
        let domain = self.domain();
        let s = &self.sampling;
        if self.problem.is_grid_interior() {
            build_training_set_cartesian(
                domain,
                s.n_half.unwrap(),
                s.grid_ratio.unwrap(),
                s.n_sb,
                s.n_tb,
            )
        } else if let Some(pbox) = self.problem.param_box() {
            Ok(build_training_set_parametric(domain, &pbox, s.n_int, s.n_sb, s.n_tb))
        } else {
            Ok(build_training_set(domain, s.n_int, s.n_sb, s.n_tb))
        }
    }
}
