//! Equality-constrained test problems with analytic derivatives.
//!
//! The built-in suite (ids 501 through 514) consists of small instances, at
//! most three variables and two constraints, with closed-form objectives and
//! known solutions: polynomial one-liners, spheres and circles, a Rosenbrock
//! valley, one infeasible-multiplier trap (511) and one objective unbounded
//! off the feasible set (513).
//!
//! Jacobian orientation: `constraint_jacobian` returns the n x m matrix whose
//! COLUMNS are the constraint gradients, stored as `Vec<Vec<f64>>` with one
//! inner vector of length `n` per constraint. With that layout the multiplier
//! combination `grad_h(x) * lambda` is a plain weighted sum of columns and
//! lands in R^n, so stationarity reads `grad_f(x) + grad_h(x) * lambda = 0`
//! with no transposes anywhere.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg;

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type ColumnsFn = dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync;

/// Errors from the problem registry.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("unknown problem id {0}; the suite covers 501..=514")]
    UnknownId(u32),
}

/// Reference solution shipped with a suite problem.
///
/// `minimizers` lists every global solution the instance is known to have
/// (504 has two); `multiplier` is present only when the instance has a unique
/// Lagrange multiplier (511 has none).
#[derive(Debug, Clone, PartialEq)]
pub struct KnownSolution {
    pub minimizers: Vec<Vec<f64>>,
    pub multiplier: Option<Vec<f64>>,
    pub objective: f64,
}

impl KnownSolution {
    /// Distance from `x` to the nearest known minimizer.
    pub fn primal_error(&self, x: &[f64]) -> f64 {
        self.minimizers
            .iter()
            .map(|m| linalg::norm(&linalg::sub(x, m)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// An equality-constrained program `min f(x) s.t. h(x) = 0` with analytic
/// first derivatives.
///
/// Instances are immutable after construction and the evaluation closures are
/// required to be pure, so a `Problem` can be shared freely across threads
/// and repeated evaluations at the same point return identical bits.
#[derive(Clone)]
pub struct Problem {
    id: u32,
    n: usize,
    m: usize,
    objective: Arc<ScalarFn>,
    objective_gradient: Arc<VectorFn>,
    constraints: Arc<VectorFn>,
    constraint_jacobian: Arc<ColumnsFn>,
    start_point: Vec<f64>,
    known_solution: Option<KnownSolution>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("start_point", &self.start_point)
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Builds a problem from its evaluation closures.
    ///
    /// `constraint_jacobian` must return `m` columns of length `n` (one
    /// gradient per constraint); see the module docs for why columns.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: u32,
        n: usize,
        m: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        objective_gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        constraints: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        constraint_jacobian: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
        start_point: Vec<f64>,
    ) -> Self {
        assert!(n >= 1 && m >= 1, "need at least one variable and constraint");
        assert_eq!(start_point.len(), n, "start point dimension mismatch");
        Problem {
            id,
            n,
            m,
            objective: Arc::new(objective),
            objective_gradient: Arc::new(objective_gradient),
            constraints: Arc::new(constraints),
            constraint_jacobian: Arc::new(constraint_jacobian),
            start_point,
            known_solution: None,
        }
    }

    /// Attaches a reference solution.
    pub fn with_known_solution(mut self, solution: KnownSolution) -> Self {
        for x in &solution.minimizers {
            assert_eq!(x.len(), self.n, "minimizer dimension mismatch");
        }
        if let Some(l) = &solution.multiplier {
            assert_eq!(l.len(), self.m, "multiplier dimension mismatch");
        }
        self.known_solution = Some(solution);
        self
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    /// Primal dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of equality constraints m.
    pub fn num_constraints(&self) -> usize {
        self.m
    }

    pub fn start_point(&self) -> &[f64] {
        &self.start_point
    }

    pub fn known_solution(&self) -> Option<&KnownSolution> {
        self.known_solution.as_ref()
    }

    /// f(x).
    pub fn objective(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        (self.objective)(x)
    }

    /// grad f(x).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let g = (self.objective_gradient)(x);
        debug_assert_eq!(g.len(), self.n);
        g
    }

    /// h(x).
    pub fn constraints(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let h = (self.constraints)(x);
        debug_assert_eq!(h.len(), self.m);
        h
    }

    /// grad h(x) as m columns of length n.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        debug_assert_eq!(x.len(), self.n);
        let cols = (self.constraint_jacobian)(x);
        debug_assert_eq!(cols.len(), self.m);
        debug_assert!(cols.iter().all(|c| c.len() == self.n));
        cols
    }
}

/// Range-bounding transform for instances whose objective is unbounded below
/// away from the feasible set (513 in the suite).
///
/// When enabled it replaces the objective by `exp(f(x))`, which is positive
/// and bounded below, and each constraint by a clamped version that agrees
/// with `h_i` on `|h_i| <= M`, saturates smoothly toward `+-(M + 1)` outside,
/// and keeps the zero set unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffTransform {
    pub bound_m: f64,
    pub enabled: bool,
}

impl CutoffTransform {
    pub fn enabled(bound_m: f64) -> Self {
        assert!(bound_m > 0.0, "cutoff bound must be positive");
        CutoffTransform { bound_m, enabled: true }
    }

    pub fn disabled() -> Self {
        CutoffTransform { bound_m: 1.0, enabled: false }
    }

    /// Clamped residual: identity on `[-M, M]`, `M + tanh(u - M)` above,
    /// `-M + tanh(u + M)` below. The pieces meet with matching value, slope 1
    /// and zero curvature, so the result is twice continuously differentiable
    /// and bounded by `M + 1` in absolute value.
    pub fn clamp_value(&self, u: f64) -> f64 {
        let m = self.bound_m;
        let upper = (u - m).tanh() + m;
        let lower = (u + m).tanh() - m;
        lower.max(u.min(upper))
    }

    /// Derivative of [`CutoffTransform::clamp_value`] with respect to `u`.
    pub fn clamp_slope(&self, u: f64) -> f64 {
        let m = self.bound_m;
        if u > m {
            let th = (u - m).tanh();
            1.0 - th * th
        } else if u < -m {
            let th = (u + m).tanh();
            1.0 - th * th
        } else {
            1.0
        }
    }
}

/// Applies the bounding transform, returning a new problem that shares the
/// original's closures. Passing a disabled transform returns the problem
/// unchanged.
///
/// The known solution carries over: minimizers and feasibility are preserved
/// (the clamp is the identity near its zero set), the objective value becomes
/// `exp(f*)`, and the multiplier is rescaled by the same factor because the
/// transformed stationarity system is the original one multiplied through by
/// `exp(f*)` at any feasible stationary point.
pub fn apply_cutoff(problem: &Problem, transform: &CutoffTransform) -> Problem {
    if !transform.enabled {
        return problem.clone();
    }
    assert!(transform.bound_m > 0.0, "cutoff bound must be positive");
    let clamp = *transform;

    let f = Arc::clone(&problem.objective);
    let f_for_grad = Arc::clone(&problem.objective);
    let g = Arc::clone(&problem.objective_gradient);
    let h = Arc::clone(&problem.constraints);
    let h_for_jac = Arc::clone(&problem.constraints);
    let jac = Arc::clone(&problem.constraint_jacobian);

    let known_solution = problem.known_solution.as_ref().map(|sol| {
        let scale = sol.objective.exp();
        KnownSolution {
            minimizers: sol.minimizers.clone(),
            multiplier: sol
                .multiplier
                .as_ref()
                .map(|l| l.iter().map(|v| v * scale).collect()),
            objective: scale,
        }
    });

    Problem {
        id: problem.id,
        n: problem.n,
        m: problem.m,
        objective: Arc::new(move |x: &[f64]| f(x).exp()),
        objective_gradient: Arc::new(move |x: &[f64]| {
            let scale = f_for_grad(x).exp();
            g(x).iter().map(|gi| scale * gi).collect()
        }),
        constraints: Arc::new(move |x: &[f64]| {
            h(x).iter().map(|&u| clamp.clamp_value(u)).collect()
        }),
        constraint_jacobian: Arc::new(move |x: &[f64]| {
            let residuals = h_for_jac(x);
            jac(x)
                .iter()
                .zip(&residuals)
                .map(|(col, &u)| {
                    let slope = clamp.clamp_slope(u);
                    col.iter().map(|c| slope * c).collect()
                })
                .collect()
        }),
        start_point: problem.start_point.clone(),
        known_solution,
    }
}

/// Deterministic sample of points in the infinity-norm box of the given
/// radius around the start point, for derivative spot checks. Radius 0
/// returns copies of the start point itself.
pub fn random_probe_points(
    problem: &Problem,
    count: usize,
    radius: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    assert!(radius >= 0.0 && radius.is_finite());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            problem
                .start_point
                .iter()
                .map(|&x0| x0 + radius * rng.gen_range(-1.0..=1.0))
                .collect()
        })
        .collect()
}

/// Looks up a suite problem by id.
pub fn get_problem(id: u32) -> Result<Problem, ProblemError> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let half_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let sqrt14 = 14f64.sqrt();

    let problem = match id {
        // min x²/2 − 2x  s.t. x(x−1)(x+1) = 0
        501 => Problem::new(
            id,
            1,
            1,
            |x| 0.5 * x[0] * x[0] - 2.0 * x[0],
            |x| vec![x[0] - 2.0],
            |x| vec![x[0] * x[0] * x[0] - x[0]],
            |x| vec![vec![3.0 * x[0] * x[0] - 1.0]],
            vec![2.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![1.0]],
            multiplier: Some(vec![0.5]),
            objective: -1.5,
        }),

        // min x²/2  s.t. x = 0
        502 => Problem::new(
            id,
            1,
            1,
            |x| 0.5 * x[0] * x[0],
            |x| vec![x[0]],
            |x| vec![x[0]],
            |_| vec![vec![1.0]],
            vec![10.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![0.0]],
            multiplier: Some(vec![0.0]),
            objective: 0.0,
        }),

        // min x₁² + x₂²  s.t. x₁ + x₂ = 0
        503 => Problem::new(
            id,
            2,
            1,
            |x| x[0] * x[0] + x[1] * x[1],
            |x| vec![2.0 * x[0], 2.0 * x[1]],
            |x| vec![x[0] + x[1]],
            |_| vec![vec![1.0, 1.0]],
            vec![3.0, 3.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![0.0, 0.0]],
            multiplier: Some(vec![0.0]),
            objective: 0.0,
        }),

        // min (x²−1)²  s.t. (x²−1)(x²−4) = 0; both x = ±1 solve it
        504 => Problem::new(
            id,
            1,
            1,
            |x| {
                let u = x[0] * x[0] - 1.0;
                u * u
            },
            |x| vec![4.0 * x[0] * (x[0] * x[0] - 1.0)],
            |x| {
                let sq = x[0] * x[0];
                vec![(sq - 1.0) * (sq - 4.0)]
            },
            |x| vec![vec![4.0 * x[0] * x[0] * x[0] - 10.0 * x[0]]],
            vec![10.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![1.0], vec![-1.0]],
            multiplier: Some(vec![0.0]),
            objective: 0.0,
        }),

        // min x₂³ + x₁x₃²  s.t. ‖x‖² = 1
        505 => Problem::new(
            id,
            3,
            1,
            |x| x[1] * x[1] * x[1] + x[0] * x[2] * x[2],
            |x| vec![x[2] * x[2], 3.0 * x[1] * x[1], 2.0 * x[0] * x[2]],
            |x| vec![x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0],
            |x| vec![vec![2.0 * x[0], 2.0 * x[1], 2.0 * x[2]]],
            vec![1.0, 1.0, 1.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![0.0, -1.0, 0.0]],
            multiplier: Some(vec![1.5]),
            objective: -1.0,
        }),

        // min x₁ + x₂  s.t. x₁² + x₂² = 1, started far outside the circle
        506 => Problem::new(
            id,
            2,
            1,
            |x| x[0] + x[1],
            |_| vec![1.0, 1.0],
            |x| vec![x[0] * x[0] + x[1] * x[1] - 1.0],
            |x| vec![vec![2.0 * x[0], 2.0 * x[1]]],
            vec![10.0, 10.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![-half_sqrt2, -half_sqrt2]],
            multiplier: Some(vec![half_sqrt2]),
            objective: -sqrt2,
        }),

        // min x  s.t. x³ − x = 0
        507 => Problem::new(
            id,
            1,
            1,
            |x| x[0],
            |_| vec![1.0],
            |x| vec![x[0] * x[0] * x[0] - x[0]],
            |x| vec![vec![3.0 * x[0] * x[0] - 1.0]],
            vec![-1.5],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![-1.0]],
            multiplier: Some(vec![-0.5]),
            objective: -1.0,
        }),

        // Rosenbrock valley restricted to the diagonal, from deep in the flats
        508 => Problem::new(
            id,
            2,
            1,
            |x| {
                let a = x[1] - x[0] * x[0];
                let b = 1.0 - x[0];
                100.0 * a * a + b * b
            },
            |x| {
                let a = x[1] - x[0] * x[0];
                vec![-400.0 * a * x[0] - 2.0 * (1.0 - x[0]), 200.0 * a]
            },
            |x| vec![x[0] - x[1]],
            |_| vec![vec![1.0, -1.0]],
            vec![100.0, 1.2],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![1.0, 1.0]],
            multiplier: Some(vec![0.0]),
            objective: 0.0,
        }),

        // min −x₁²x₂  s.t. 4x₁x₂ + x₁² = 108
        509 => Problem::new(
            id,
            2,
            1,
            |x| -x[0] * x[0] * x[1],
            |x| vec![-2.0 * x[0] * x[1], -x[0] * x[0]],
            |x| vec![4.0 * x[0] * x[1] + x[0] * x[0] - 108.0],
            |x| vec![vec![4.0 * x[1] + 2.0 * x[0], 4.0 * x[0]]],
            vec![3.0, 3.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![6.0, 3.0]],
            multiplier: Some(vec![1.5]),
            objective: -108.0,
        }),

        // min 2x₁ + 3x₂ + x₃  s.t. ‖x‖² = 1
        510 => Problem::new(
            id,
            3,
            1,
            |x| 2.0 * x[0] + 3.0 * x[1] + x[2],
            |_| vec![2.0, 3.0, 1.0],
            |x| vec![x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0],
            |x| vec![vec![2.0 * x[0], 2.0 * x[1], 2.0 * x[2]]],
            vec![1.0, 1.0, 1.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![-2.0 / sqrt14, -3.0 / sqrt14, -1.0 / sqrt14]],
            multiplier: Some(vec![sqrt14 / 2.0]),
            objective: -sqrt14,
        }),

        // Two internally tangent circles; (0,0) is the only feasible point
        // and no Lagrange multiplier exists there.
        511 => Problem::new(
            id,
            2,
            2,
            |x| x[0] + x[1],
            |_| vec![1.0, 1.0],
            |x| {
                let d1 = x[0] - 1.0;
                let d2 = x[0] - 2.0;
                vec![d1 * d1 + x[1] * x[1] - 1.0, d2 * d2 + x[1] * x[1] - 4.0]
            },
            |x| {
                vec![
                    vec![2.0 * (x[0] - 1.0), 2.0 * x[1]],
                    vec![2.0 * (x[0] - 2.0), 2.0 * x[1]],
                ]
            },
            vec![1.0, 1.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![0.0, 0.0]],
            multiplier: None,
            objective: 0.0,
        }),

        // min sin(x₁ + x₂)  s.t. x₁² + x₂² = 1, started at the circle's center
        512 => Problem::new(
            id,
            2,
            1,
            |x| (x[0] + x[1]).sin(),
            |x| {
                let c = (x[0] + x[1]).cos();
                vec![c, c]
            },
            |x| vec![x[0] * x[0] + x[1] * x[1] - 1.0],
            |x| vec![vec![2.0 * x[0], 2.0 * x[1]]],
            vec![0.0, 0.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![-half_sqrt2, -half_sqrt2]],
            multiplier: Some(vec![half_sqrt2 * sqrt2.cos()]),
            objective: -sqrt2.sin(),
        }),

        // min −x⁴  s.t. x = 0: objective unbounded below off the feasible
        // set, the designated customer for the cutoff transform
        513 => Problem::new(
            id,
            1,
            1,
            |x| -x[0] * x[0] * x[0] * x[0],
            |x| vec![-4.0 * x[0] * x[0] * x[0]],
            |x| vec![x[0]],
            |_| vec![vec![1.0]],
            vec![1.0],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![0.0]],
            multiplier: Some(vec![0.0]),
            objective: 0.0,
        }),

        // min ‖x‖²/2  s.t. x₁ = 1
        514 => Problem::new(
            id,
            2,
            1,
            |x| 0.5 * (x[0] * x[0] + x[1] * x[1]),
            |x| vec![x[0], x[1]],
            |x| vec![x[0] - 1.0],
            |_| vec![vec![1.0, 0.0]],
            vec![4.9, 0.1],
        )
        .with_known_solution(KnownSolution {
            minimizers: vec![vec![1.0, 0.0]],
            multiplier: Some(vec![-1.0]),
            objective: 0.5,
        }),

        _ => return Err(ProblemError::UnknownId(id)),
    };
    Ok(problem)
}

/// Ids of the built-in suite, in report order.
pub const SUITE_IDS: [u32; 14] = [
    501, 502, 503, 504, 505, 506, 507, 508, 509, 510, 511, 512, 513, 514,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{columns_times, norm};

    #[test]
    fn registry_covers_the_suite_and_nothing_else() {
        for id in SUITE_IDS {
            let p = get_problem(id).unwrap();
            assert_eq!(p.id(), id);
            assert_eq!(p.start_point().len(), p.dim());
        }
    }

    #[test]
    fn unknown_ids_are_rejected() {
        for id in [0, 500, 515, 1000] {
            assert!(matches!(get_problem(id), Err(ProblemError::UnknownId(i)) if i == id));
        }
    }

    #[test]
    fn known_solutions_are_feasible_and_stationary() {
        for id in SUITE_IDS {
            let p = get_problem(id).unwrap();
            let sol = p.known_solution().expect("suite problems ship solutions");
            for x in &sol.minimizers {
                assert!(
                    norm(&p.constraints(x)) <= 1e-10,
                    "problem {id}: minimizer infeasible"
                );
                assert!(
                    (p.objective(x) - sol.objective).abs() <= 1e-10,
                    "problem {id}: objective value mismatch"
                );
                if let Some(lambda) = &sol.multiplier {
                    let mut res = p.gradient(x);
                    let cols = p.jacobian(x);
                    let correction = columns_times(&cols, lambda);
                    for (r, c) in res.iter_mut().zip(&correction) {
                        *r += c;
                    }
                    assert!(
                        norm(&res) <= 1e-8,
                        "problem {id}: stationarity fails at a known solution"
                    );
                }
            }
        }
    }

    #[test]
    fn spot_checks_on_suite_data() {
        let p506 = get_problem(506).unwrap();
        assert_eq!(p506.start_point(), &[10.0, 10.0]);
        assert_eq!(p506.constraints(&[1.0, 0.0]), vec![0.0]);

        let p502 = get_problem(502).unwrap();
        assert_eq!(p502.start_point(), &[10.0]);
        assert_eq!(p502.objective(&[3.0]), 4.5);

        let p511 = get_problem(511).unwrap();
        assert_eq!(p511.num_constraints(), 2);
        assert!(p511.known_solution().unwrap().multiplier.is_none());
        assert_eq!(norm(&p511.constraints(&[0.0, 0.0])), 0.0);

        let p504 = get_problem(504).unwrap();
        let sol = p504.known_solution().unwrap();
        assert_eq!(sol.minimizers.len(), 2);
        assert_eq!(sol.primal_error(&[1.0]), 0.0);
        assert_eq!(sol.primal_error(&[-1.0]), 0.0);
        assert!((sol.primal_error(&[0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clamp_is_identity_inside_and_saturates_outside() {
        let t = CutoffTransform::enabled(2.0);
        for u in [-2.0, -1.3, 0.0, 0.7, 2.0] {
            assert_eq!(t.clamp_value(u), u);
            assert_eq!(t.clamp_slope(u), 1.0);
        }
        // Frozen: 2 + tanh(8).
        assert_eq!(t.clamp_value(10.0), 2.9999997749296758);
        // tanh saturates to exactly 1 far out, so the cap is attained.
        assert!(t.clamp_value(1e6) <= 3.0 && t.clamp_value(1e6) > 2.99);
        assert!(t.clamp_value(-1e6) >= -3.0 && t.clamp_value(-1e6) < -2.99);
        // Odd symmetry of the clamp.
        for u in [0.3, 1.9, 2.5, 40.0] {
            assert!((t.clamp_value(-u) + t.clamp_value(u)).abs() < 1e-15);
        }
    }

    #[test]
    fn cutoff_transforms_values_gradients_and_solution() {
        let p = get_problem(506).unwrap();
        let t = CutoffTransform::enabled(2.0);
        let q = apply_cutoff(&p, &t);

        let x = [3.0, 0.0];
        // f = 3 -> e^3; grad scales by e^3.
        assert_eq!(q.objective(&x), 3f64.exp());
        assert_eq!(q.gradient(&x), vec![3f64.exp(), 3f64.exp()]);
        // h = 8 > M: clamped value and chain-rule slope on the jacobian.
        let h = q.constraints(&x);
        assert_eq!(h[0], 2.0 + 6f64.tanh());
        let slope = 1.0 - 6f64.tanh() * 6f64.tanh();
        assert_eq!(q.jacobian(&x)[0], vec![6.0 * slope, 0.0]);

        // Solution carries over with the multiplier rescaled by e^{f*}.
        let sol = q.known_solution().unwrap();
        let scale = (-std::f64::consts::SQRT_2).exp();
        assert_eq!(sol.minimizers, p.known_solution().unwrap().minimizers);
        assert!((sol.multiplier.as_ref().unwrap()[0]
            - scale * std::f64::consts::FRAC_1_SQRT_2)
            .abs()
            < 1e-15);
        assert_eq!(sol.objective, scale);
    }

    #[test]
    fn disabled_cutoff_is_the_identity() {
        let p = get_problem(509).unwrap();
        let q = apply_cutoff(&p, &CutoffTransform::disabled());
        let x = [2.5, -0.3];
        assert_eq!(p.objective(&x), q.objective(&x));
        assert_eq!(p.constraints(&x), q.constraints(&x));
        assert_eq!(p.jacobian(&x), q.jacobian(&x));
        assert_eq!(
            p.known_solution().unwrap().objective,
            q.known_solution().unwrap().objective
        );
    }

    #[test]
    fn probe_points_are_deterministic_and_in_the_box() {
        let p = get_problem(503).unwrap();
        let a = random_probe_points(&p, 3, 2.0, 7);
        let b = random_probe_points(&p, 3, 2.0, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        for x in &a {
            for (xi, x0) in x.iter().zip(p.start_point()) {
                assert!((xi - x0).abs() <= 2.0);
            }
        }
        let c = random_probe_points(&p, 3, 2.0, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_radius_probes_return_the_start_point() {
        let p = get_problem(502).unwrap();
        let pts = random_probe_points(&p, 1, 0.0, 42);
        assert_eq!(pts, vec![vec![10.0]]);
    }
}
