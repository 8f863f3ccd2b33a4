//! The six 20-variable benchmark functions, with known minimizers,
//! initial-point sampling, and global-basin membership predicates.
//!
//! Registry names: `elp`, `sch`, `ros`, `ackl`, `rtg`, `rrtg`.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// A named objective with everything the harness needs to judge a run.
type SharedEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type SharedBasin = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ObjectiveFunction {
    pub name: &'static str,
    pub dim: usize,
    eval: SharedEval,
    basin: SharedBasin,
    /// Known global minimizer.
    pub x_star: Vec<f64>,
    /// Known global minimum value.
    pub f_star: f64,
}

impl ObjectiveFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Whether `x` lies in the global-minimum basin.
    pub fn in_global_basin(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        (self.basin)(x)
    }

    /// Closure handle suitable for wrapping in an evaluation counter.
    pub fn eval_fn(&self) -> impl Fn(&[f64]) -> f64 + Send + Sync + 'static {
        let f = Arc::clone(&self.eval);
        move |x: &[f64]| f(x)
    }
}

impl std::fmt::Debug for ObjectiveFunction {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("f_star", &self.f_star)
            .finish()
    }
}

/// Poorly scaled convex quadratic: `sum i * x_i^2`.
pub fn ellipsoidal(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v * v)
        .sum()
}

/// Extension of the ellipsoidal function: `sum of squared prefix sums`.
pub fn schwefel(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in x {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

/// Generalized chained Rosenbrock valley; global minimum at the all-ones
/// point, plus a second, dimension-dependent local minimum for 4 <= n <= 30.
pub fn rosenbrock(x: &[f64]) -> f64 {
    assert!(x.len() >= 2, "rosenbrock needs at least two variables");
    x.windows(2)
        .map(|w| {
            let d = w[0] * w[0] - w[1];
            100.0 * d * d + (1.0 - w[0]) * (1.0 - w[0])
        })
        .sum()
}

/// Highly multimodal exponential-well function.
///
/// The two exponential terms are grouped as `20 * (1 - exp(..))` (via
/// `exp_m1`) and `e - exp(..)` so that values near the minimum resolve down
/// to the double-precision floor instead of being quantized at the scale of
/// the leading constants.
pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    let radial = -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp_m1();
    let oscillatory = E - (sum_cos / n).exp();
    radial + oscillatory
}

/// Parabolic landscape with a cosine lattice of local minima.
pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

/// Pairwise plane rotation with blocks [[4/5, 3/5], [-3/5, 4/5]], stored
/// sparsely (at most two nonzeros per row).
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    n: usize,
}

impl RotationMatrix {
    /// Rotation for an even dimension `n`; every (odd, even) row pair forms
    /// a 2x2 block of determinant one.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "rotation matrix needs a positive even dimension, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 1-based indices `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        if i == j {
            0.8
        } else if !i.is_multiple_of(2) && j == i + 1 {
            0.6
        } else if i.is_multiple_of(2) && j == i - 1 {
            -0.6
        } else {
            0.0
        }
    }

    /// `y = A * x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        let mut y = vec![0.0; self.n];
        for p in (0..self.n).step_by(2) {
            y[p] = 0.8 * x[p] + 0.6 * x[p + 1];
            y[p + 1] = -0.6 * x[p] + 0.8 * x[p + 1];
        }
        y
    }
}

/// Rastrigin composed with the pairwise rotation, so the local minima are no
/// longer arranged along the coordinate axes.
pub fn rotated_rastrigin(x: &[f64], rot: &RotationMatrix) -> f64 {
    rastrigin(&rot.apply(x))
}

/// Draws a start point with every coordinate uniform on [-10, -5].
pub fn initial_point<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-10.0..=-5.0)).collect()
}

const BASIN_BOX: f64 = 0.5;

fn max_abs_dev(x: &[f64], center: f64) -> f64 {
    x.iter().map(|v| (v - center).abs()).fold(0.0, f64::max)
}

/// Registry of the benchmark functions by short name.
pub fn registry(name: &str, dim: usize) -> Result<ObjectiveFunction> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let obj = match name {
        // unimodal pair: the basin box is the accuracy criterion itself
        "elp" => ObjectiveFunction {
            name: "elp",
            dim,
            eval: Arc::new(ellipsoidal),
            basin: Arc::new(|x| ellipsoidal(x) < 1e-8),
            x_star: vec![0.0; dim],
            f_star: 0.0,
        },
        "sch" => ObjectiveFunction {
            name: "sch",
            dim,
            eval: Arc::new(schwefel),
            basin: Arc::new(|x| schwefel(x) < 1e-8),
            x_star: vec![0.0; dim],
            f_star: 0.0,
        },
        "ros" => {
            if dim < 2 {
                return Err(Error::InvalidArgument(
                    "ros needs dimension at least 2".into(),
                ));
            }
            ObjectiveFunction {
                name: "ros",
                dim,
                eval: Arc::new(rosenbrock),
                basin: Arc::new(|x| max_abs_dev(x, 1.0) < BASIN_BOX),
                x_star: vec![1.0; dim],
                f_star: 0.0,
            }
        }
        "ackl" => ObjectiveFunction {
            name: "ackl",
            dim,
            eval: Arc::new(ackley),
            basin: Arc::new(|x| max_abs_dev(x, 0.0) < BASIN_BOX),
            x_star: vec![0.0; dim],
            f_star: 0.0,
        },
        "rtg" => ObjectiveFunction {
            name: "rtg",
            dim,
            eval: Arc::new(rastrigin),
            basin: Arc::new(|x| max_abs_dev(x, 0.0) < BASIN_BOX),
            x_star: vec![0.0; dim],
            f_star: 0.0,
        },
        "rrtg" => {
            let rot = RotationMatrix::new(dim)?;
            let rot_basin = rot.clone();
            ObjectiveFunction {
                name: "rrtg",
                dim,
                eval: Arc::new(move |x| rotated_rastrigin(x, &rot)),
                basin: Arc::new(move |x| max_abs_dev(&rot_basin.apply(x), 0.0) < BASIN_BOX),
                x_star: vec![0.0; dim],
                f_star: 0.0,
            }
        }
        other => {
            return Err(Error::UnknownFunction {
                name: other.to_string(),
                valid: FUNCTION_NAMES.join(", "),
            })
        }
    };
    Ok(obj)
}

/// The registry's valid names, in presentation order.
pub const FUNCTION_NAMES: [&str; 6] = ["elp", "sch", "ros", "ackl", "rtg", "rrtg"];
