//! Physics-informed neural networks for nonlinear dispersive PDEs.
//!
//! The crate trains small tanh MLPs to satisfy the Korteweg-de Vries,
//! Kawahara, Camassa-Holm, and Benjamin-Ono equations in strong form,
//! verifies them against closed-form soliton solutions, and evaluates
//! a-posteriori bounds that control the generalization error by the computable
//! training residuals.
//!
//! Layering, bottom up:
//! - [`stencil`], [`jet`]: the two independent differentiation paths
//!   (finite differences for oracles and data traces, truncated Taylor jets
//!   for training).
//! - [`sobol`], [`sample`]: low-discrepancy and Cartesian training sets.
//! - [`hilbert`], [`exact`], [`equation`]: the discrete Hilbert transforms,
//!   reference solutions, and PDE residual assembly.
//! - [`net`], [`loss`], [`lbfgs`], [`train`]: the model, the residual loss
//!   and its gradient, the quasi-Newton optimizer, and the retraining loop.
//! - [`metrics`], [`config`]: generalization errors, sup norms, bound
//!   evaluation, uncertainty statistics, and the TOML experiment schema.

pub mod config;
pub mod equation;
pub mod exact;
pub mod hilbert;
pub mod jet;
pub mod lbfgs;
pub mod loss;
pub mod metrics;
pub mod net;
pub mod sample;
pub mod sobol;
pub mod stencil;
pub mod train;

#[derive(Debug, thiserror::Error)]
pub enum DispinnError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid checkpoint {0}: {1}")]
    Checkpoint(String, String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("root finding did not converge: {0}")]
    RootFind(String),
}
