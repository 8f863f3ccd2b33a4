//! Jackson q-derivative primitives.
//!
//! The scalar q-derivative of `f` at `x` is the secant slope
//! `(f(qx) - f(x)) / (qx - x)`; as `q -> 1` (or `x -> 0`) it reduces to the
//! classical derivative. Extending the parameter to a vector `q = (q_1..q_n)`
//! gives one partial q-derivative per coordinate and the q-gradient vector.
//! Where a coordinate is degenerate (`x_i = 0` or `q_i = 1`) the classical
//! partial applies, approximated here by a forward finite difference.

use crate::error::{Error, Result};

/// Relative secant-width floor: below this, `q_i * x_i - x_i` is mostly
/// rounding noise and the coordinate is treated as the `q_i = 1` sentinel.
pub const DEGENERACY_RTOL: f64 = 1e-15;

/// Per-coordinate q parameters for one q-gradient evaluation.
///
/// An entry equal to exactly `1.0` is the sentinel meaning "use the classical
/// partial derivative" (the `q -> 1` limit).
#[derive(Debug, Clone, PartialEq)]
pub struct QVector {
    entries: Vec<f64>,
}

impl QVector {
    /// Wraps raw entries. All entries must be finite.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "QVector entries must be finite, got {bad}"
            )));
        }
        Ok(Self { entries })
    }

    /// All entries set to the `q = 1` sentinel.
    pub fn all_sentinel(n: usize) -> Self {
        Self {
            entries: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// An objective function together with an evaluation counter.
///
/// Every call to [`EvalCounted::eval`] increments the counter by exactly one;
/// the wrapped function is assumed deterministic. A single instance must not
/// be shared across threads (the counter is plain state); distinct instances
/// are independent.
pub struct EvalCounted<F> {
    f: F,
    count: u64,
}

impl<F: Fn(&[f64]) -> f64> EvalCounted<F> {
    pub fn new(f: F) -> Self {
        Self { f, count: 0 }
    }

    /// Evaluates the objective, counting the call.
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        (self.f)(x)
    }

    /// Number of objective evaluations so far.
    pub fn count(&self) -> u64 {
        self.count
    }
}

/// q-analogue of the integer `n`: `(q^n - 1) / (q - 1)`.
///
/// Errors when `q = 1`; the caller must substitute the limit value `n` there.
pub fn q_number(n: i32, q: f64) -> Result<f64> {
    if q == 1.0 {
        return Err(Error::InvalidArgument(
            "q_number requires q != 1 (the limit value is n itself)".into(),
        ));
    }
    Ok((q.powi(n) - 1.0) / (q - 1.0))
}

/// Scalar q-derivative `(f(qx) - f(x)) / (qx - x)`.
///
/// Costs exactly two evaluations of `f`. Errors on the degenerate inputs
/// `x = 0` or `q = 1`; those limits are handled at the partial-derivative
/// level, not here.
pub fn q_derivative_1d<G: Fn(f64) -> f64>(f: G, x: f64, q: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::InvalidArgument(
            "q_derivative_1d requires x != 0".into(),
        ));
    }
    if q == 1.0 {
        return Err(Error::InvalidArgument(
            "q_derivative_1d requires q != 1".into(),
        ));
    }
    let qx = q * x;
    Ok((f(qx) - f(x)) / (qx - x))
}

/// First-order partial q-derivative of `f` with respect to coordinate `i`.
///
/// For a non-degenerate coordinate this is the secant slope between `x` and
/// `x` with `x_i` replaced by `q_i * x_i`. When `x_i = 0`, `q_i = 1`, or the
/// secant width falls below [`DEGENERACY_RTOL`] relative to `|x_i|`, the
/// classical partial applies, approximated by a forward difference with
/// step `h`. Costs two evaluations of `f`.
pub fn q_partial<F: Fn(&[f64]) -> f64>(
    f: &mut EvalCounted<F>,
    x: &[f64],
    i: usize,
    q_i: f64,
    h: f64,
) -> f64 {
    assert!(i < x.len(), "coordinate index {i} out of range");
    assert!(h > 0.0, "finite-difference step must be positive");
    let fx = f.eval(x);
    let mut xp = x.to_vec();
    q_partial_with_base(f, x, fx, i, q_i, h, &mut xp)
}

/// As [`q_partial`] but reusing a precomputed `f(x)` and scratch buffer, so a
/// whole gradient shares one base evaluation. Costs one evaluation of `f`.
fn q_partial_with_base<F: Fn(&[f64]) -> f64>(
    f: &mut EvalCounted<F>,
    x: &[f64],
    fx: f64,
    i: usize,
    q_i: f64,
    h: f64,
    xp: &mut [f64],
) -> f64 {
    xp.copy_from_slice(x);
    let xi = x[i];
    let width = q_i * xi - xi;
    if xi != 0.0 && q_i != 1.0 && width.abs() >= DEGENERACY_RTOL * xi.abs() {
        xp[i] = q_i * xi;
        (f.eval(xp) - fx) / width
    } else {
        xp[i] = xi + h;
        (f.eval(xp) - fx) / h
    }
}

/// The q-gradient: the vector of all `n` partial q-derivatives.
///
/// The shared evaluation `f(x)` is computed once, so the total cost is
/// exactly `n + 1` objective evaluations.
pub fn q_gradient<F: Fn(&[f64]) -> f64>(
    f: &mut EvalCounted<F>,
    x: &[f64],
    q: &QVector,
    h: f64,
) -> Vec<f64> {
    assert_eq!(x.len(), q.len(), "dimension mismatch between x and q");
    let fx = f.eval(x);
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    q_gradient_into(f, x, fx, q, h, &mut g, &mut xp);
    g
}

/// Gradient kernel shared with the optimizer: writes into `g`, reusing the
/// base value `fx` and the scratch buffer `xp`. Costs `n` evaluations.
pub(crate) fn q_gradient_into<F: Fn(&[f64]) -> f64>(
    f: &mut EvalCounted<F>,
    x: &[f64],
    fx: f64,
    q: &QVector,
    h: f64,
    g: &mut [f64],
    xp: &mut [f64],
) {
    for i in 0..x.len() {
        g[i] = q_partial_with_base(f, x, fx, i, q[i], h, xp);
    }
}

/// Forward finite-difference gradient, cost `n + 1` evaluations.
///
/// Serves as the `q -> 1` fallback and as an independent oracle in tests.
pub fn classical_gradient_fd<F: Fn(&[f64]) -> f64>(
    f: &mut EvalCounted<F>,
    x: &[f64],
    h: f64,
) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let fx = f.eval(x);
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp.copy_from_slice(x);
        xp[i] += h;
        g[i] = (f.eval(&xp) - fx) / h;
    }
    g
}
