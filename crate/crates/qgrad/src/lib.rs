//! Stochastic steepest descent with the classical gradient replaced by
//! Jackson's q-gradient, for unconstrained global optimization.
//!
//! The q-derivative of `f` at `x` is the slope of the secant through
//! `(x, f(x))` and `(qx, f(qx))`. Sampling the parameters `q` from a
//! Gaussian whose spread cools geometrically turns gradient descent into a
//! global-first, local-last search that can step across rises toward deeper
//! minima; as the spread vanishes the method reduces to steepest descent.
//!
//! The crate is organized in four layers:
//!
//! * [`qcalc`] - q-derivative, partial q-derivatives, the q-gradient vector;
//! * [`optimizer`] - the descent iteration, cooling schedules, stopping
//!   rules, golden-section line search and a classical baseline;
//! * [`benchmarks`] - the six benchmark objectives with minimizers and
//!   global-basin predicates;
//! * [`harness`] - seeded multi-run experiments, statistics, reference
//!   constants and CSV/JSON/table reporting (also exposed by the `qgrad`
//!   binary).

pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod optimizer;
pub mod qcalc;

pub use error::{Error, Result};
pub use harness::{run_experiment, summarize, Algorithm, ExperimentSpec, ExperimentSummary};
pub use optimizer::{optimize, steepest_descent, QGradientConfig, RunResult};
pub use qcalc::{q_gradient, EvalCounted, QVector};
