//! The q-gradient descent iteration and its classical baseline.
//!
//! Each iteration samples a fresh parameter vector `q`, takes a step along
//! the negative q-gradient, and geometrically cools both the sampling spread
//! `sigma` and the step length `alpha` by the shared factor `beta`. Large
//! `sigma` makes the secant directions effectively global probes; as `sigma`
//! and `alpha` shrink the process degenerates into local steepest descent.
//! The method is deliberately not a descent method: iterates may move uphill,
//! and progress is judged by the best value seen so far.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{self, EvalCounted, QVector, DEGENERACY_RTOL};

/// Norm below which a q-gradient counts as stationary and `q` is redrawn.
pub const STATIONARY_TOL: f64 = 1e-12;

/// Global-basin membership test used by the success rule.
pub type BasinPredicate<'a> = dyn Fn(&[f64]) -> bool + 'a;

/// Free parameters and stopping criteria for one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGradientConfig {
    /// Problem dimension `n`.
    pub dim: usize,
    /// Initial standard deviation of the Gaussian used to sample `q`.
    pub sigma0: f64,
    /// Initial step length, in units of search-space distance.
    pub alpha0: f64,
    /// Reduction factor in (0, 1), shared by the `sigma` and `alpha` schedules.
    pub beta: f64,
    /// Evaluation budget.
    pub max_evals: u64,
    /// Objective threshold; the run stops once the best value drops below it.
    pub target: f64,
    /// Forward-difference step for degenerate coordinates.
    pub fd_step: f64,
    /// Retry budget for degenerate draws and stationary q-gradients.
    pub max_redraws: u32,
    /// Lower bound applied to the sampling spread (0 keeps the pure schedule).
    pub sigma_floor: f64,
    /// Scale the step to unit direction length. When false the raw update
    /// `x - alpha * g` is used instead.
    pub normalize_direction: bool,
}

impl QGradientConfig {
    /// Config with the given free parameters and standard defaults for the rest.
    pub fn new(dim: usize, sigma0: f64, alpha0: f64, beta: f64) -> Self {
        Self {
            dim,
            sigma0,
            alpha0,
            beta,
            max_evals: 1_000_000,
            target: 1e-20,
            fd_step: 1e-8,
            max_redraws: 10,
            sigma_floor: 0.0,
            normalize_direction: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn fail(msg: String) -> Result<()> {
            Err(Error::InvalidConfig(msg))
        }
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return fail(format!(
                "sigma0 must be positive and finite, got {}",
                self.sigma0
            ));
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return fail(format!(
                "alpha0 must be positive and finite, got {}",
                self.alpha0
            ));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return fail(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if self.max_evals == 0 {
            return fail("max_evals must be at least 1".into());
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return fail(format!(
                "fd_step must be positive and finite, got {}",
                self.fd_step
            ));
        }
        if !self.target.is_finite() {
            return fail(format!("target must be finite, got {}", self.target));
        }
        if !(self.sigma_floor >= 0.0 && self.sigma_floor.is_finite()) {
            return fail(format!(
                "sigma_floor must be non-negative, got {}",
                self.sigma_floor
            ));
        }
        Ok(())
    }
}

/// Mutable state of a single run.
///
/// The schedules satisfy `sigma_k = sigma0 * beta^k` and
/// `alpha_k = alpha0 * beta^k` exactly up to floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    /// Current iterate.
    pub x: Vec<f64>,
    /// Objective value at the current iterate (shared secant base).
    pub fx: f64,
    /// Current sampling spread.
    pub sigma_k: f64,
    /// Current step length.
    pub alpha_k: f64,
    /// Iteration counter `k`.
    pub iteration: u64,
    /// Best finite objective value seen at any iterate so far.
    pub best_f: f64,
    /// Iterate attaining `best_f`.
    pub best_x: Vec<f64>,
}

impl OptimizerState {
    /// State at `k = 0` for a run starting at `x0` with `fx0 = F(x0)`.
    pub fn start(x0: Vec<f64>, fx0: f64, cfg: &QGradientConfig) -> Self {
        let best_f = if fx0.is_finite() { fx0 } else { f64::INFINITY };
        Self {
            best_x: x0.clone(),
            x: x0,
            fx: fx0,
            sigma_k: cfg.sigma0,
            alpha_k: cfg.alpha0,
            iteration: 0,
            best_f,
        }
    }
}

/// How a run satisfied the success rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuccessMode {
    /// Best objective value fell below the target.
    Accuracy,
    /// Best iterate lies in the objective's global basin.
    Basin,
    /// Both conditions hold.
    AccuracyAndBasin,
}

/// Outcome of a single optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Seed used to derive the run's randomness (stamped by the caller).
    pub seed: u64,
    pub evals_used: u64,
    pub iterations: u64,
    pub best_f: f64,
    pub best_x: Vec<f64>,
    pub success: bool,
    /// Which clause of the success rule fired, when `success` is true.
    pub success_mode: Option<SuccessMode>,
}

/// Draws the q parameters for one iteration.
///
/// For each coordinate a point `s_i` is drawn from `Normal(x_i, sigma)` and
/// `q_i = s_i / x_i`, so the secant for coordinate `i` spans `[x_i, s_i]`.
/// Draws whose secant width falls below [`DEGENERACY_RTOL`] relative to
/// `|x_i|` are redrawn up to `max_redraws` times before the coordinate falls
/// back to the `q_i = 1` sentinel. A coordinate at exactly zero emits the
/// sentinel immediately (the classical-partial limit).
pub fn sample_q<R: Rng>(x: &[f64], sigma: f64, rng: &mut R, max_redraws: u32) -> QVector {
    let mut q = Vec::with_capacity(x.len());
    let normal_ok = sigma > 0.0 && sigma.is_finite();
    for &xi in x {
        if xi == 0.0 || !normal_ok {
            q.push(1.0);
            continue;
        }
        let dist = Normal::new(xi, sigma).expect("validated sigma");
        let mut entry = 1.0;
        for _ in 0..=max_redraws {
            let s = dist.sample(rng);
            let width = s - xi;
            if width != 0.0 && width.abs() >= DEGENERACY_RTOL * xi.abs() && (s / xi).is_finite() {
                entry = s / xi;
                break;
            }
        }
        q.push(entry);
    }
    QVector::new(q).expect("finite q entries")
}

/// One geometric cooling update: `value * beta`.
pub fn cool(value: f64, beta: f64) -> f64 {
    debug_assert!(value > 0.0);
    debug_assert!(beta > 0.0 && beta < 1.0);
    value * beta
}

/// Advances the iteration by one step: sample `q`, step along the negative
/// q-gradient, cool the schedules, update the best-so-far record.
///
/// A stationary q-gradient (norm below [`STATIONARY_TOL`], or non-finite) is
/// retried with fresh `q` up to `max_redraws` times as long as the evaluation
/// budget allows; if it stays stationary the iterate is kept unchanged for
/// this iteration while the schedules still cool. A non-finite objective
/// value at the new iterate is accepted into the sequence but ignored by the
/// best-so-far record.
pub fn descend_step<F, R>(
    mut state: OptimizerState,
    f: &mut EvalCounted<F>,
    cfg: &QGradientConfig,
    rng: &mut R,
) -> OptimizerState
where
    F: Fn(&[f64]) -> f64,
    R: Rng,
{
    let n = state.x.len();
    let sigma_eff = state.sigma_k.max(cfg.sigma_floor);
    let mut g = vec![0.0; n];
    let mut xp = vec![0.0; n];

    let mut direction_norm = None;
    for attempt in 0..=cfg.max_redraws {
        let q = sample_q(&state.x, sigma_eff, rng, cfg.max_redraws);
        qcalc::q_gradient_into(f, &state.x, state.fx, &q, cfg.fd_step, &mut g, &mut xp);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm.is_finite() && norm > STATIONARY_TOL {
            direction_norm = Some(norm);
            break;
        }
        // keep one evaluation in reserve for the new iterate
        let next_gradient_fits = f.count() + (n as u64) < cfg.max_evals;
        if attempt == cfg.max_redraws || !next_gradient_fits {
            break;
        }
    }

    let moved = if let Some(norm) = direction_norm {
        let scale = if cfg.normalize_direction {
            state.alpha_k / norm
        } else {
            state.alpha_k
        };
        for (xi, gi) in state.x.iter_mut().zip(&g) {
            *xi -= scale * gi;
        }
        true
    } else {
        false
    };

    state.sigma_k = cool(state.sigma_k, cfg.beta);
    state.alpha_k = cool(state.alpha_k, cfg.beta);
    state.iteration += 1;

    if moved {
        state.fx = f.eval(&state.x);
        if state.fx.is_finite() && state.fx < state.best_f {
            state.best_f = state.fx;
            state.best_x.copy_from_slice(&state.x);
        }
    }
    state
}

/// Runs the q-gradient method from `x0` until the best objective value drops
/// below `cfg.target` or the next step would exceed `cfg.max_evals`.
///
/// The success flag combines the accuracy test with the optional global-basin
/// predicate; the mode that fired is recorded on the result. The caller owns
/// the counter: pass a fresh [`EvalCounted`] per run.
pub fn optimize<F, R>(
    f: &mut EvalCounted<F>,
    cfg: &QGradientConfig,
    x0: &[f64],
    rng: &mut R,
    basin: Option<&BasinPredicate<'_>>,
) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
    R: Rng,
{
    cfg.validate()?;
    if x0.len() != cfg.dim {
        return Err(Error::InvalidArgument(format!(
            "x0 has dimension {}, config says {}",
            x0.len(),
            cfg.dim
        )));
    }

    let fx0 = f.eval(x0);
    let mut state = OptimizerState::start(x0.to_vec(), fx0, cfg);
    let n = cfg.dim as u64;
    while state.best_f > cfg.target && f.count() + n < cfg.max_evals {
        state = descend_step(state, f, cfg, rng);
    }
    Ok(finish_run(state, f.count(), cfg.target, basin))
}

fn finish_run(
    state: OptimizerState,
    evals_used: u64,
    target: f64,
    basin: Option<&BasinPredicate<'_>>,
) -> RunResult {
    let accuracy = state.best_f < target;
    let in_basin = basin.map(|b| b(&state.best_x)).unwrap_or(false);
    let success_mode = match (accuracy, in_basin) {
        (true, true) => Some(SuccessMode::AccuracyAndBasin),
        (true, false) => Some(SuccessMode::Accuracy),
        (false, true) => Some(SuccessMode::Basin),
        (false, false) => None,
    };
    RunResult {
        seed: 0,
        evals_used,
        iterations: state.iteration,
        best_f: state.best_f,
        best_x: state.best_x,
        success: success_mode.is_some(),
        success_mode,
    }
}

/// Golden-section search for a local minimizer of `phi` on `[a, b]`.
///
/// Uses at most `max_iters + 2` evaluations of `phi`. Errors on an empty
/// interval or a non-finite `phi` value.
pub fn golden_section<P: FnMut(f64) -> f64>(
    phi: P,
    a: f64,
    b: f64,
    tol: f64,
    max_iters: u64,
) -> Result<f64> {
    golden_section_full(phi, a, b, tol, max_iters).map(|(t, _)| t)
}

/// As [`golden_section`], also returning the objective value at the result.
pub(crate) fn golden_section_full<P: FnMut(f64) -> f64>(
    mut phi: P,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iters: u64,
) -> Result<(f64, f64)> {
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidArgument(format!(
            "golden_section requires a < b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "golden_section requires tol > 0, got {tol}"
        )));
    }
    // inverse golden ratio, (sqrt(5) - 1) / 2
    let w = (5.0_f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64, phi: &mut P| -> Result<f64> {
        let v = phi(t);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(format!("phi({t}) = {v}")));
        }
        Ok(v)
    };
    let mut x1 = b - w * (b - a);
    let mut x2 = a + w * (b - a);
    let mut f1 = eval(x1, &mut phi)?;
    let mut f2 = eval(x2, &mut phi)?;
    for _ in 0..max_iters {
        if b - a <= tol {
            break;
        }
        if f1 > f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + w * (b - a);
            f2 = eval(x2, &mut phi)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - w * (b - a);
            f1 = eval(x1, &mut phi)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Settings for the classical steepest-descent baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteepestDescentConfig {
    pub dim: usize,
    /// Forward-difference step for the gradient.
    pub fd_step: f64,
    /// Upper end of the line-search bracket `[0, alpha_max]`.
    pub alpha_max: f64,
    /// Interval tolerance of the golden-section search.
    pub ls_tol: f64,
    /// Iteration cap of the golden-section search.
    pub ls_max_iters: u64,
    pub max_evals: u64,
    pub target: f64,
}

impl SteepestDescentConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            fd_step: 1e-8,
            alpha_max: 10.0,
            ls_tol: 1e-10,
            ls_max_iters: 100,
            max_evals: 1_000_000,
            target: 1e-20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if !(self.fd_step > 0.0 && self.alpha_max > 0.0 && self.ls_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "fd_step, alpha_max and ls_tol must be positive".into(),
            ));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidConfig("max_evals must be at least 1".into()));
        }
        Ok(())
    }
}

/// Classical steepest descent with a golden-section line search, the `q -> 1`
/// reduction of the method and the baseline it is compared against.
///
/// Each iteration takes `d = -grad F` (forward differences) and minimizes
/// `F(x + t d)` over `t` in `[0, alpha_max]`. A step is only accepted when it
/// does not increase the objective, so iterate values are non-increasing.
/// Stopping mirrors [`optimize`]: best value below target or budget exhausted.
pub fn steepest_descent<F>(
    f: &mut EvalCounted<F>,
    x0: &[f64],
    cfg: &SteepestDescentConfig,
    basin: Option<&BasinPredicate<'_>>,
) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    if x0.len() != cfg.dim {
        return Err(Error::InvalidArgument(format!(
            "x0 has dimension {}, config says {}",
            x0.len(),
            cfg.dim
        )));
    }

    let n = cfg.dim as u64;
    let mut x = x0.to_vec();
    let mut fx = f.eval(&x);
    let mut best_f = if fx.is_finite() { fx } else { f64::INFINITY };
    let mut best_x = x.clone();
    let mut iterations = 0u64;
    let mut g = vec![0.0; x.len()];
    let mut xp = vec![0.0; x.len()];

    // one gradient, two bracket probes, and at least one refinement per pass
    while best_f > cfg.target && f.count() + n + 3 <= cfg.max_evals {
        for i in 0..x.len() {
            xp.copy_from_slice(&x);
            xp[i] += cfg.fd_step;
            g[i] = (f.eval(&xp) - fx) / cfg.fd_step;
        }
        let remaining = cfg.max_evals - f.count();
        let ls_iters = cfg.ls_max_iters.min(remaining.saturating_sub(2));
        let phi = |t: f64| {
            let probe: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            f.eval(&probe)
        };
        let (t, ft) = match golden_section_full(phi, 0.0, cfg.alpha_max, cfg.ls_tol, ls_iters) {
            Ok(r) => r,
            Err(Error::NonFiniteObjective(_)) => break,
            Err(e) => return Err(e),
        };
        if ft <= fx {
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= t * gi;
            }
            fx = ft;
            if fx < best_f {
                best_f = fx;
                best_x.copy_from_slice(&x);
            }
        }
        iterations += 1;
    }

    let state = OptimizerState {
        x,
        fx,
        sigma_k: 0.0,
        alpha_k: 0.0,
        iteration: iterations,
        best_f,
        best_x,
    };
    Ok(finish_run(state, f.count(), cfg.target, basin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn two_wells(x: &[f64]) -> f64 {
        let t = x[0];
        2.0 - ((-t * t).exp() + 2.0 * (-(t - 3.0) * (t - 3.0)).exp())
    }

    #[test]
    fn sample_q_tends_to_one_as_sigma_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = sample_q(&[1.0, 1.0], 1e-9, &mut rng, 10);
        for i in 0..2 {
            assert!(q[i] != 1.0, "not a sentinel");
            assert!((q[i] - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn sample_q_zero_coordinate_is_sentinel() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = sample_q(&[0.0, 5.0], 3.0, &mut rng, 10);
        assert_eq!(q[0], 1.0);
        assert!(q[1] != 1.0);
    }

    #[test]
    fn sample_q_matches_replayed_gaussian_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let q = sample_q(&[2.0], 1.0, &mut rng, 10);
        let mut replay = ChaCha8Rng::seed_from_u64(123);
        let s: f64 = Normal::new(2.0, 1.0).unwrap().sample(&mut replay);
        assert_eq!(q[0], s / 2.0);
    }

    #[test]
    fn cool_is_plain_geometric_decay() {
        assert_eq!(cool(1.0, 0.5), 0.5);
        // oracle: iterated multiplication, ten times
        let mut v = 0.4;
        for _ in 0..10 {
            v = cool(v, 0.86);
        }
        assert!((v - 0.08852063155521227).abs() < 1e-16);
        assert!((v - 0.4 * 0.86f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn sigma_floor_keeps_the_sampling_alive() {
        let cfg = QGradientConfig {
            sigma_floor: 0.5,
            ..QGradientConfig::new(2, 1e-30, 1.0, 0.5)
        };
        let mut f = EvalCounted::new(sphere);
        let fx = f.eval(&[3.0, 4.0]);
        let state = OptimizerState::start(vec![3.0, 4.0], fx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // without the floor this sigma degenerates to all-sentinel draws;
        // the floor keeps the q entries spread out while the schedule state
        // itself still follows the geometric law
        let next = descend_step(state, &mut f, &cfg, &mut rng);
        assert_eq!(next.sigma_k, 0.5e-30);
        let q = sample_q(&[3.0, 4.0], cfg.sigma_floor, &mut rng, 10);
        assert!((q[0] - 1.0).abs() > 1e-6 || (q[1] - 1.0).abs() > 1e-6);
    }

    #[test]
    fn non_finite_iterates_are_accepted_but_ignored_by_best() {
        // a cliff: outside the unit box the objective is NaN
        let cliff = |x: &[f64]| {
            if x[0].abs() > 1.0 {
                f64::NAN
            } else {
                x[0] * x[0]
            }
        };
        let cfg = QGradientConfig {
            max_evals: 200,
            ..QGradientConfig::new(1, 0.2, 5.0, 0.9)
        };
        let mut f = EvalCounted::new(cliff);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = optimize(&mut f, &cfg, &[0.5], &mut rng, None).unwrap();
        // the first step length (5.0) necessarily leaves the box
        assert!(r.best_f.is_finite());
        assert!(r.best_f <= 0.25);
        assert!(r.iterations > 1, "run continued past the NaN iterate");
    }

    #[test]
    fn config_rejects_beta_of_one_and_up() {
        for beta in [1.0, 1.5] {
            let cfg = QGradientConfig::new(2, 1.0, 1.0, beta);
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        }
        assert!(QGradientConfig::new(2, 1.0, 1.0, 0.9).validate().is_ok());
    }

    #[test]
    fn descend_step_with_sentinels_is_a_normalized_fd_step() {
        // gradient (6, 8) up to the fd bias, normalized direction (0.6, 0.8)
        let cfg = QGradientConfig {
            sigma_floor: 0.0,
            ..QGradientConfig::new(2, 1e-30, 1.0, 0.5)
        };
        let mut f = EvalCounted::new(sphere);
        let fx = f.eval(&[3.0, 4.0]);
        let state = OptimizerState::start(vec![3.0, 4.0], fx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // sigma is far below the degeneracy width, so every draw degenerates
        // to the sentinel and the step reduces to classical steepest descent
        let next = descend_step(state, &mut f, &cfg, &mut rng);
        assert!((next.x[0] - 2.4).abs() < 1e-7);
        assert!((next.x[1] - 3.2).abs() < 1e-7);
        assert_eq!(next.iteration, 1);
        assert!((next.sigma_k - 0.5e-30).abs() < 1e-45);
        assert!((next.alpha_k - 0.5).abs() < 1e-15);
    }

    #[test]
    fn descend_step_unnormalized_equals_classical_gradient_step() {
        let cfg = QGradientConfig {
            normalize_direction: false,
            ..QGradientConfig::new(2, 1e-30, 0.01, 0.5)
        };
        let mut f = EvalCounted::new(sphere);
        let fx = f.eval(&[3.0, 4.0]);
        let state = OptimizerState::start(vec![3.0, 4.0], fx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let next = descend_step(state, &mut f, &cfg, &mut rng);

        let mut oracle = EvalCounted::new(sphere);
        let fd = crate::qcalc::classical_gradient_fd(&mut oracle, &[3.0, 4.0], cfg.fd_step);
        assert!((next.x[0] - (3.0 - 0.01 * fd[0])).abs() < 1e-10);
        assert!((next.x[1] - (4.0 - 0.01 * fd[1])).abs() < 1e-10);
    }

    #[test]
    fn descend_step_stationary_keeps_iterate_but_cools() {
        let cfg = QGradientConfig::new(2, 1.0, 1.0, 0.5);
        let mut f = EvalCounted::new(|_: &[f64]| 5.0);
        let fx = f.eval(&[1.0, 2.0]);
        let state = OptimizerState::start(vec![1.0, 2.0], fx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let next = descend_step(state, &mut f, &cfg, &mut rng);
        assert_eq!(next.x, vec![1.0, 2.0]);
        assert_eq!(next.iteration, 1);
        assert_eq!(next.sigma_k, 0.5);
        assert_eq!(next.alpha_k, 0.5);
        // initial gradient plus max_redraws retries, two evaluations each,
        // plus the initial f(x0); the null step skips the iterate re-eval
        assert_eq!(f.count(), 1 + 2 * 11);
    }

    #[test]
    fn descend_step_can_leap_over_a_rise() {
        // with q = 2 at x = 1 the secant slope is negative, so the step moves
        // right, toward the deeper well at x = 3
        let cfg = QGradientConfig::new(1, 1.0, 1.0, 0.95);
        let mut f = EvalCounted::new(two_wells);
        let fx = f.eval(&[1.0]);
        let mut state = OptimizerState::start(vec![1.0], fx, &cfg);
        // replicate the sampling step with a forced q = 2
        let q = QVector::new(vec![2.0]).unwrap();
        let mut g = vec![0.0];
        let mut xp = vec![0.0];
        qcalc::q_gradient_into(&mut f, &state.x, state.fx, &q, cfg.fd_step, &mut g, &mut xp);
        assert!(g[0] < 0.0);
        state.x[0] -= state.alpha_k * g[0] / g[0].abs();
        assert!(state.x[0] > 1.0);
    }

    #[test]
    fn optimize_succeeds_immediately_at_the_minimizer() {
        let cfg = QGradientConfig::new(3, 1.0, 1.0, 0.9);
        let mut f = EvalCounted::new(sphere);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = optimize(&mut f, &cfg, &[0.0, 0.0, 0.0], &mut rng, None).unwrap();
        assert!(r.success);
        assert_eq!(r.success_mode, Some(SuccessMode::Accuracy));
        assert_eq!(r.evals_used, 1);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn optimize_rejects_bad_beta_before_iterating() {
        let cfg = QGradientConfig::new(2, 1.0, 1.0, 1.0);
        let mut f = EvalCounted::new(sphere);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(optimize(&mut f, &cfg, &[1.0, 1.0], &mut rng, None).is_err());
        assert_eq!(f.count(), 0);
    }

    #[test]
    fn optimize_converges_on_a_small_sphere() {
        let cfg = QGradientConfig {
            max_evals: 50_000,
            ..QGradientConfig::new(5, 0.5, 12.0, 0.9)
        };
        let mut f = EvalCounted::new(sphere);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x0 = vec![-7.0, -6.0, -9.5, -5.2, -8.8];
        let r = optimize(&mut f, &cfg, &x0, &mut rng, None).unwrap();
        assert!(r.success, "best_f = {:e}", r.best_f);
        assert!(r.evals_used <= cfg.max_evals);
    }

    #[test]
    fn optimize_is_deterministic_in_the_seed() {
        let cfg = QGradientConfig {
            max_evals: 2_000,
            ..QGradientConfig::new(3, 1.0, 2.0, 0.95)
        };
        let x0 = [-6.0, -7.5, -9.0];
        let run = || {
            let mut f = EvalCounted::new(sphere);
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            optimize(&mut f, &cfg, &x0, &mut rng, None).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
    }

    #[test]
    fn schedules_follow_the_shared_geometric_law() {
        let cfg = QGradientConfig::new(2, 0.4, 38.0, 0.86);
        let mut f = EvalCounted::new(sphere);
        let fx = f.eval(&[-7.0, -8.0]);
        let mut state = OptimizerState::start(vec![-7.0, -8.0], fx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            state = descend_step(state, &mut f, &cfg, &mut rng);
        }
        let factor = 0.86f64.powi(100);
        assert!((state.sigma_k / cfg.sigma0 - factor).abs() <= 1e-12 * factor);
        assert!((state.alpha_k / cfg.alpha0 - factor).abs() <= 1e-12 * factor);
        assert!((state.sigma_k / cfg.sigma0 - state.alpha_k / cfg.alpha0).abs() <= 1e-12 * factor);
    }

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let t = golden_section(|t| (t - 2.0) * (t - 2.0), 0.0, 5.0, 1e-6, 200).unwrap();
        assert!((t - 2.0).abs() < 1e-6);
    }

    #[test]
    fn golden_section_handles_boundary_minimum() {
        let t = golden_section(|t| t, 0.0, 1.0, 1e-6, 200).unwrap();
        assert!(t.abs() < 2e-6);
    }

    #[test]
    fn golden_section_matches_grid_oracle_on_cosine() {
        // independent oracle: dense grid at 1e-7 resolution over a bracket
        // of the minimizer
        let mut grid_best = (f64::INFINITY, 0.0);
        let mut t = 3.0f64;
        while t < 3.3 {
            let v = t.cos();
            if v < grid_best.0 {
                grid_best = (v, t);
            }
            t += 1e-7;
        }
        let found =
            golden_section(|t| t.cos(), 0.0, 2.0 * std::f64::consts::PI, 1e-6, 200).unwrap();
        assert!((found - grid_best.1).abs() < 1e-5);
    }

    #[test]
    fn golden_section_rejects_bad_input() {
        assert!(golden_section(|t| t, 1.0, 0.0, 1e-6, 100).is_err());
        assert!(golden_section(|t| t, 0.0, 0.0, 1e-6, 100).is_err());
        let r = golden_section(|t| if t > 1.0 { f64::NAN } else { t }, 0.0, 3.0, 1e-6, 100);
        assert!(matches!(r, Err(Error::NonFiniteObjective(_))));
    }

    #[test]
    fn golden_section_respects_evaluation_cap() {
        let mut calls = 0u64;
        let max_iters = 17;
        golden_section(
            |t| {
                calls += 1;
                (t - 1.0) * (t - 1.0)
            },
            0.0,
            5.0,
            1e-12,
            max_iters,
        )
        .unwrap();
        assert!(calls <= max_iters + 2);
    }

    #[test]
    fn steepest_descent_solves_the_sphere() {
        let cfg = SteepestDescentConfig {
            target: 1e-10,
            ..SteepestDescentConfig::new(2)
        };
        let mut f = EvalCounted::new(sphere);
        let r = steepest_descent(&mut f, &[3.0, 4.0], &cfg, None).unwrap();
        assert!(r.success);
        assert!(r.best_f < 1e-10);
        assert!(r.iterations < 100);
    }

    #[test]
    fn steepest_descent_gets_trapped_by_the_near_well() {
        let cfg = SteepestDescentConfig {
            max_evals: 20_000,
            ..SteepestDescentConfig::new(1)
        };
        let mut f = EvalCounted::new(two_wells);
        let r = steepest_descent(&mut f, &[1.0], &cfg, None).unwrap();
        // lands in the shallow well near zero, not the deep one near three
        assert!(r.best_x[0].abs() < 0.01, "x = {}", r.best_x[0]);
        assert!((r.best_x[0] - 3.0).abs() > 2.5);
    }

    #[test]
    fn steepest_descent_iterates_never_move_uphill() {
        let rosen2 = |x: &[f64]| 100.0 * (x[0] * x[0] - x[1]).powi(2) + (1.0 - x[0]).powi(2);
        // replay of the baseline loop, watching each accepted iterate
        let mut f = EvalCounted::new(rosen2);
        let mut x = vec![-1.2, 1.0];
        let mut fx = f.eval(&x);
        let f0 = fx;
        for _ in 0..50 {
            let mut g = vec![0.0; 2];
            for i in 0..2 {
                let mut xp = x.clone();
                xp[i] += 1e-8;
                g[i] = (f.eval(&xp) - fx) / 1e-8;
            }
            let phi = |t: f64| {
                let p: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
                f.eval(&p)
            };
            let (t, ft) = golden_section_full(phi, 0.0, 10.0, 1e-10, 100).unwrap();
            if ft <= fx {
                for (xi, gi) in x.iter_mut().zip(&g) {
                    *xi -= t * gi;
                }
                assert!(ft <= fx, "objective increased along the baseline");
                fx = ft;
            }
        }
        assert!(fx < f0);

        let cfg = SteepestDescentConfig {
            max_evals: 60_000,
            ..SteepestDescentConfig::new(2)
        };
        let mut f2 = EvalCounted::new(rosen2);
        let r = steepest_descent(&mut f2, &[-1.2, 1.0], &cfg, None).unwrap();
        assert!(r.best_f <= fx);
    }

    #[test]
    fn qgradient_iterates_do_move_uphill_sometimes() {
        // with a wide sampling spread the method is not a descent method:
        // some iterate must increase the objective in at least one run
        let cfg = QGradientConfig {
            max_evals: 500,
            ..QGradientConfig::new(1, 2.0, 1.0, 0.95)
        };
        let mut saw_increase = false;
        for seed in 0..20 {
            let mut f = EvalCounted::new(two_wells);
            let fx = f.eval(&[1.0]);
            let mut state = OptimizerState::start(vec![1.0], fx, &cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut prev = fx;
            for _ in 0..60 {
                state = descend_step(state, &mut f, &cfg, &mut rng);
                if state.fx > prev {
                    saw_increase = true;
                }
                prev = state.fx;
            }
        }
        assert!(saw_increase);
    }

    #[test]
    fn budget_is_hard_for_both_algorithms() {
        for max_evals in [50u64, 173, 1000] {
            let cfg = QGradientConfig {
                max_evals,
                target: -1.0,
                ..QGradientConfig::new(4, 1.0, 1.0, 0.99)
            };
            let mut f = EvalCounted::new(sphere);
            let mut rng = ChaCha8Rng::seed_from_u64(max_evals);
            let r = optimize(&mut f, &cfg, &[-6.0, -7.0, -8.0, -9.0], &mut rng, None).unwrap();
            assert!(f.count() <= max_evals);
            assert!(r.evals_used <= max_evals);

            let sd = SteepestDescentConfig {
                max_evals,
                target: -1.0,
                ..SteepestDescentConfig::new(4)
            };
            let mut f = EvalCounted::new(sphere);
            let r = steepest_descent(&mut f, &[-6.0, -7.0, -8.0, -9.0], &sd, None).unwrap();
            assert!(f.count() <= max_evals);
            assert!(r.evals_used <= max_evals);
        }
    }
}
