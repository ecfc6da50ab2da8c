//! The penalty-function family and its gradients.
//!
//! Four functions of a primal point `x`, a multiplier `lambda` and a penalty
//! weight `r > 0`:
//!
//! - quadratic (classical) augmented Lagrangian:
//!   `f + <lambda, h> + (r/2)|h|^2`, smooth everywhere;
//! - sharp augmented Lagrangian: `f + <lambda, h> + r|h|`, exact under much
//!   weaker penalty growth but nonsmooth at feasibility;
//! - its smoothing in one extra scalar `t`:
//!   `f + <lambda, h> + r/(2t)|h|^2 + (r/2)t` for `t > 0`, which majorizes the
//!   sharp function and matches it at `t = |h(x)|`;
//! - the barrier-shifted variant adding `r/(2t) s^2`, which pushes the joint
//!   minimizer in `(x, t)` to `t = sqrt(|h|^2 + s^2) > 0` so that stationary
//!   points exist even where the plain smoothing has none.
//!
//! All evaluations are extended-real: out-of-domain points report
//! `f64::INFINITY` as an explicit sentinel with the gradients absent, never
//! NaN fallout, so minimizers can branch on domain membership.

use thiserror::Error;

use crate::linalg::{columns_times, dot, norm};
use crate::problems::Problem;

/// Multiplier iterates and penalty weight carried between outer iterations.
///
/// `lambda_bar` is the safeguarded (box-projected) estimate the penalty
/// functions are evaluated with; `lambda_raw` is the last unprojected update,
/// which is what gets reported.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda_bar: Vec<f64>,
    pub lambda_raw: Vec<f64>,
    pub r: f64,
}

impl DualState {
    pub fn new(lambda_bar: Vec<f64>, lambda_raw: Vec<f64>, r: f64) -> Self {
        assert!(r > 0.0, "penalty weight must be positive");
        assert_eq!(lambda_bar.len(), lambda_raw.len());
        DualState { lambda_bar, lambda_raw, r }
    }

    /// Zero multipliers with the given starting penalty.
    pub fn initial(m: usize, r0: f64) -> Self {
        DualState::new(vec![0.0; m], vec![0.0; m], r0)
    }
}

/// Errors from evaluations with a domain precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("smoothing variable must be positive, got t = {0}")]
    NonPositiveT(f64),
}

/// Gradient block of a smoothed evaluation, present only where the function
/// is differentiable (`t > 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedGrad {
    pub x: Vec<f64>,
    pub t: f64,
}

/// Extended-real evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedEval {
    pub value: f64,
    pub grad: Option<SmoothedGrad>,
}

impl SmoothedEval {
    fn infinite() -> Self {
        SmoothedEval { value: f64::INFINITY, grad: None }
    }
}

/// Quadratic augmented Lagrangian value and x-gradient:
/// `f + <lambda, h> + (r/2)|h|^2`, gradient `grad f + grad_h (lambda + r h)`.
pub fn phr_lagrangian(problem: &Problem, x: &[f64], lambda: &[f64], r: f64) -> (f64, Vec<f64>) {
    assert!(r > 0.0);
    let h = problem.constraints(x);
    let value = problem.objective(x) + dot(lambda, &h) + 0.5 * r * dot(&h, &h);
    let weights: Vec<f64> = lambda.iter().zip(&h).map(|(l, hi)| l + r * hi).collect();
    let mut grad = problem.gradient(x);
    for (g, c) in grad.iter_mut().zip(columns_times(&problem.jacobian(x), &weights)) {
        *g += c;
    }
    (value, grad)
}

/// Sharp augmented Lagrangian value `f + <lambda, h> + r|h|`. No gradient:
/// the norm term is nondifferentiable exactly where minimizers live.
pub fn sharp_lagrangian(problem: &Problem, x: &[f64], lambda: &[f64], r: f64) -> f64 {
    assert!(r > 0.0);
    let h = problem.constraints(x);
    problem.objective(x) + dot(lambda, &h) + r * norm(&h)
}

/// Smoothed sharp augmented Lagrangian.
///
/// For `t > 0`: value `f + <lambda, h> + r/(2t)|h|^2 + (r/2)t` with
/// `grad_x = grad f + grad_h (lambda + (r/t) h)` and
/// `grad_t = (r/2)(1 - |h|^2 / t^2)`.
/// At `t = 0` the value is `f(x)` if `h(x) = 0` (no gradients) and infinite
/// otherwise; for `t < 0` it is infinite.
pub fn smoothing_eval(problem: &Problem, x: &[f64], t: f64, lambda: &[f64], r: f64) -> SmoothedEval {
    assert!(r > 0.0);
    let h = problem.constraints(x);
    let hh = dot(&h, &h);
    if t <= 0.0 {
        if t == 0.0 && hh == 0.0 {
            return SmoothedEval { value: problem.objective(x), grad: None };
        }
        return SmoothedEval::infinite();
    }
    let value = problem.objective(x) + dot(lambda, &h) + 0.5 * r * hh / t + 0.5 * r * t;
    let weights: Vec<f64> = lambda.iter().zip(&h).map(|(l, hi)| l + (r / t) * hi).collect();
    let mut grad_x = problem.gradient(x);
    for (g, c) in grad_x.iter_mut().zip(columns_times(&problem.jacobian(x), &weights)) {
        *g += c;
    }
    let grad_t = 0.5 * r * (1.0 - hh / (t * t));
    SmoothedEval { value, grad: Some(SmoothedGrad { x: grad_x, t: grad_t }) }
}

/// Barrier-shifted smoothing: the smoothed value plus `r/(2t) s^2`.
///
/// The shift leaves `grad_x` unchanged and turns the t-gradient into
/// `(r/2)(1 - (|h|^2 + s^2)/t^2)`, whose unique zero over `t > 0` at fixed
/// `x` is `t = sqrt(|h|^2 + s^2)`. With `s > 0` the function is infinite for
/// every `t <= 0`; with `s = 0` it reduces to [`smoothing_eval`].
pub fn barrier_eval(
    problem: &Problem,
    x: &[f64],
    t: f64,
    lambda: &[f64],
    r: f64,
    s: f64,
) -> SmoothedEval {
    assert!(r > 0.0);
    assert!(s >= 0.0);
    if s == 0.0 {
        return smoothing_eval(problem, x, t, lambda, r);
    }
    if t <= 0.0 {
        return SmoothedEval::infinite();
    }
    let h = problem.constraints(x);
    let hh = dot(&h, &h);
    let augmented = hh + s * s;
    let value =
        problem.objective(x) + dot(lambda, &h) + 0.5 * r * augmented / t + 0.5 * r * t;
    let weights: Vec<f64> = lambda.iter().zip(&h).map(|(l, hi)| l + (r / t) * hi).collect();
    let mut grad_x = problem.gradient(x);
    for (g, c) in grad_x.iter_mut().zip(columns_times(&problem.jacobian(x), &weights)) {
        *g += c;
    }
    let grad_t = 0.5 * r * (1.0 - augmented / (t * t));
    SmoothedEval { value, grad: Some(SmoothedGrad { x: grad_x, t: grad_t }) }
}

/// Stopping residual: `sqrt(|grad_x L~(x, t; lambda_bar, r)|^2 + |h(x)|^2)`.
///
/// Measures joint stationarity and feasibility with the smoothed gradient's
/// built-in multiplier estimate `lambda_bar + (r/t) h(x)`.
pub fn kkt_residual(
    problem: &Problem,
    x: &[f64],
    t: f64,
    dual: &DualState,
) -> Result<f64, EvalError> {
    if t <= 0.0 {
        return Err(EvalError::NonPositiveT(t));
    }
    let h = problem.constraints(x);
    let hh = dot(&h, &h);
    let weights: Vec<f64> = dual
        .lambda_bar
        .iter()
        .zip(&h)
        .map(|(l, hi)| l + (dual.r / t) * hi)
        .collect();
    let mut grad = problem.gradient(x);
    for (g, c) in grad.iter_mut().zip(columns_times(&problem.jacobian(x), &weights)) {
        *g += c;
    }
    Ok((dot(&grad, &grad) + hh).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::get_problem;

    #[test]
    fn phr_values_and_gradients() {
        let p = get_problem(502).unwrap();
        let (v, g) = phr_lagrangian(&p, &[1.0], &[0.0], 2.0);
        assert_eq!(v, 1.5);
        assert_eq!(g, vec![3.0]);

        // At a feasible point with lambda = 0 the value is plain f.
        let (v, _) = phr_lagrangian(&p, &[0.0], &[0.0], 7.0);
        assert_eq!(v, 0.0);

        // Stationarity at the circle problem's solution for any r.
        let p = get_problem(506).unwrap();
        let sol = p.known_solution().unwrap();
        let xs = &sol.minimizers[0];
        let lam = sol.multiplier.as_ref().unwrap();
        // The residual at the stored solution is a few ulps, and the
        // penalty term amplifies it by r.
        for r in [1.0, 10.0, 1e6] {
            let (_, g) = phr_lagrangian(&p, xs, lam, r);
            assert!(norm(&g) <= 1e-14 * (1.0 + r), "r = {r}: |grad| = {}", norm(&g));
        }
    }

    #[test]
    fn sharp_value() {
        let p = get_problem(502).unwrap();
        assert_eq!(sharp_lagrangian(&p, &[1.0], &[0.0], 2.0), 2.5);
        assert_eq!(sharp_lagrangian(&p, &[0.0], &[3.0], 2.0), 0.0);
    }

    #[test]
    fn smoothing_branches() {
        let p = get_problem(502).unwrap();

        let e = smoothing_eval(&p, &[1.0], 1.0, &[0.0], 2.0);
        assert_eq!(e.value, 2.5);
        let g = e.grad.unwrap();
        assert_eq!(g.x, vec![3.0]);
        assert_eq!(g.t, 0.0);

        // Feasible at t = 0: finite, no gradients.
        let e = smoothing_eval(&p, &[0.0], 0.0, &[0.0], 2.0);
        assert_eq!(e.value, 0.0);
        assert!(e.grad.is_none());

        // Infeasible at t = 0, and any t < 0: infinite.
        assert_eq!(smoothing_eval(&p, &[1.0], 0.0, &[0.0], 2.0).value, f64::INFINITY);
        assert_eq!(smoothing_eval(&p, &[0.0], -0.5, &[0.0], 2.0).value, f64::INFINITY);
    }

    #[test]
    fn smoothing_approaches_objective_at_feasible_points() {
        // At h(x) = 0 the value is exactly f(x) + (r/2)t.
        let p = get_problem(503).unwrap();
        let f = p.objective(&[1.0, -1.0]);
        let r = 4.0;
        for t in [1.0, 1e-3, 1e-9] {
            let e = smoothing_eval(&p, &[1.0, -1.0], t, &[0.3], r);
            // Up to one rounding of the final sum against f.
            assert!((e.value - f - 0.5 * r * t).abs() <= 1e-15 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn barrier_matches_smoothing_when_shift_vanishes() {
        let p = get_problem(506).unwrap();
        let x = [2.0, -1.0];
        let a = barrier_eval(&p, &x, 0.7, &[0.4], 3.0, 0.0);
        let b = smoothing_eval(&p, &x, 0.7, &[0.4], 3.0);
        assert_eq!(a, b);
    }

    #[test]
    fn barrier_example_and_domain() {
        let p = get_problem(502).unwrap();
        let e = barrier_eval(&p, &[0.0], 0.5, &[0.0], 2.0, 0.5);
        assert_eq!(e.value, 1.0);
        let g = e.grad.unwrap();
        assert_eq!(g.x, vec![0.0]);
        assert_eq!(g.t, 0.0);

        // With s > 0 the whole t <= 0 half-line is out of domain, including
        // feasible x at t = 0.
        assert_eq!(barrier_eval(&p, &[0.0], 0.0, &[0.0], 2.0, 0.5).value, f64::INFINITY);
        assert_eq!(barrier_eval(&p, &[0.0], -1.0, &[0.0], 2.0, 0.5).value, f64::INFINITY);
    }

    #[test]
    fn residual_examples() {
        let p = get_problem(502).unwrap();
        let dual = DualState::initial(1, 10.0);
        let r = kkt_residual(&p, &[10.0], 1.0, &dual).unwrap();
        assert_eq!(r, 12200f64.sqrt());
        assert_eq!(r, 110.45361017187261);

        let p = get_problem(514).unwrap();
        let dual = DualState::new(vec![-1.0], vec![-1.0], 10.0);
        assert_eq!(kkt_residual(&p, &[1.0, 0.0], 0.25, &dual).unwrap(), 0.0);

        assert_eq!(
            kkt_residual(&p, &[1.0, 0.0], 0.0, &dual),
            Err(EvalError::NonPositiveT(0.0))
        );
    }

    #[test]
    #[should_panic(expected = "penalty weight")]
    fn dual_state_rejects_nonpositive_r() {
        DualState::new(vec![0.0], vec![0.0], 0.0);
    }
}
