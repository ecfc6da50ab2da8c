//! Inexact stationary-point solver for the smooth subproblems.
//!
//! Both outer smoothing drivers reduce their step to "drive the gradient of a
//! smooth function below epsilon": over `x` at fixed `t` for the fixed-
//! smoothing driver, jointly over `(x, t)` with the barrier shift for the
//! varying-smoothing driver. This module implements that step with
//! limited-memory BFGS and a strong Wolfe line search, plus a steepest-descent
//! retry when quasi-Newton directions stop making progress.
//!
//! Positivity of `t` in the joint solve is enforced by a fraction-to-boundary
//! cap on the line search: whenever the search direction decreases `t`, the
//! step is limited so the new `t` keeps at least `(1 - kappa)` of the current
//! one. No trial point is ever evaluated at `t <= 0` (asserted in the
//! evaluation callback).

use std::collections::VecDeque;

use thiserror::Error;

use crate::eval::{barrier_eval, phr_lagrangian, smoothing_eval, DualState};
use crate::linalg::{add_scaled, dot, norm, norm_inf};
use crate::problems::Problem;

/// Below this the smoothing variable counts as pinned to the boundary: the
/// joint solve stops rather than shrinking `t` into denormal territory. Only
/// reachable when the barrier shift is zero.
const T_FLOOR: f64 = 1e-300;

/// Tuning for the subproblem solver.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerConfig {
    pub max_iterations: usize,
    /// Quasi-Newton history length.
    pub memory: usize,
    /// Sufficient-decrease constant, in (0, 1).
    pub armijo_c1: f64,
    /// Curvature constant, in (c1, 1).
    pub curvature_c2: f64,
    /// Evaluation budget per line search stage.
    pub max_backtracks: usize,
    /// Fraction-to-boundary coefficient kappa in (0, 1).
    pub t_boundary_fraction: f64,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig {
            max_iterations: 5000,
            memory: 10,
            armijo_c1: 1e-4,
            curvature_c2: 0.9,
            max_backtracks: 60,
            t_boundary_fraction: 0.99,
        }
    }
}

impl InnerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_iterations == 0 || self.memory == 0 || self.max_backtracks == 0 {
            return Err("inner iteration, memory and backtrack budgets must be positive".into());
        }
        if !(0.0 < self.armijo_c1 && self.armijo_c1 < self.curvature_c2 && self.curvature_c2 < 1.0)
        {
            return Err("line search needs 0 < c1 < c2 < 1".into());
        }
        if !(0.0 < self.t_boundary_fraction && self.t_boundary_fraction < 1.0) {
            return Err("fraction-to-boundary coefficient must lie in (0, 1)".into());
        }
        Ok(())
    }
}

/// Outcome of a subproblem solve. `converged` means `grad_norm <= eps`;
/// otherwise the fields describe the best iterate found.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub x: Vec<f64>,
    /// Final smoothing variable; present only for the joint solve.
    pub t: Option<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Subproblem failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum InnerError {
    /// The function or its gradient was not finite at the starting point, so
    /// no step could even be attempted. Non-finite values encountered later,
    /// at line-search trial points, are not errors: such trials are rejected
    /// and the solve continues from the last finite iterate.
    #[error("subproblem function not finite at the starting point")]
    NonFiniteStart { point: Vec<f64> },
}

/// Minimizes `x -> smoothing(x, t_fixed; lambda_bar, r)` from `x_start` until
/// the x-gradient norm drops to `eps`, or budgets run out (`converged=false`,
/// best iterate returned).
pub fn minimize_x(
    problem: &Problem,
    t_fixed: f64,
    dual: &DualState,
    x_start: &[f64],
    eps: f64,
    config: &InnerConfig,
) -> Result<InnerResult, InnerError> {
    assert!(t_fixed > 0.0, "fixed smoothing variable must be positive");
    assert!(eps > 0.0);
    let eval = |z: &[f64]| {
        let e = smoothing_eval(problem, z, t_fixed, &dual.lambda_bar, dual.r);
        match e.grad {
            Some(g) => (e.value, g.x),
            // t_fixed > 0 always yields a gradient unless the problem's own
            // evaluations blew up; surface that as a non-finite pair.
            None => (f64::INFINITY, vec![f64::INFINITY; z.len()]),
        }
    };
    let raw = minimize_smooth(&eval, x_start.to_vec(), eps, config, None)?;
    Ok(InnerResult {
        x: raw.z,
        t: None,
        value: raw.value,
        grad_norm: raw.grad_norm,
        iterations: raw.iterations,
        converged: raw.converged,
    })
}

/// Jointly minimizes `(x, t) -> barrier(x, t; lambda_bar, r, s)` from
/// `(x_start, t_start)` with `t` kept strictly positive throughout.
///
/// With `s > 0` a stationary point exists under mild assumptions and the
/// solve normally converges; with `s = 0` there are objectives for which no
/// positive-`t` stationary point exists, in which case the iterates drive `t`
/// toward zero and the solve reports `converged=false`.
pub fn minimize_xt(
    problem: &Problem,
    dual: &DualState,
    s: f64,
    x_start: &[f64],
    t_start: f64,
    eps: f64,
    config: &InnerConfig,
) -> Result<InnerResult, InnerError> {
    assert!(t_start > 0.0, "starting smoothing variable must be positive");
    assert!(s >= 0.0);
    assert!(eps > 0.0);
    let n = x_start.len();
    let eval = |z: &[f64]| {
        let (x, t) = (&z[..n], z[n]);
        assert!(t > 0.0, "joint solve evaluated at nonpositive t");
        let e = barrier_eval(problem, x, t, &dual.lambda_bar, dual.r, s);
        match e.grad {
            Some(g) => {
                let mut grad = g.x;
                grad.push(g.t);
                (e.value, grad)
            }
            None => (f64::INFINITY, vec![f64::INFINITY; z.len()]),
        }
    };
    let mut z0 = x_start.to_vec();
    z0.push(t_start);
    let raw = minimize_smooth(&eval, z0, eps, config, Some(n))?;
    let mut z = raw.z;
    let t = z.pop().expect("joint iterate carries t");
    Ok(InnerResult {
        x: z,
        t: Some(t),
        value: raw.value,
        grad_norm: raw.grad_norm,
        iterations: raw.iterations,
        converged: raw.converged,
    })
}

/// Minimizes the quadratic augmented Lagrangian
/// `x -> f + <lambda_bar, h> + (r/2)|h|^2` from `x_start`, for the baseline
/// driver. Same machinery and result contract as [`minimize_x`].
pub fn minimize_phr(
    problem: &Problem,
    dual: &DualState,
    x_start: &[f64],
    eps: f64,
    config: &InnerConfig,
) -> Result<InnerResult, InnerError> {
    assert!(eps > 0.0);
    let eval = |z: &[f64]| phr_lagrangian(problem, z, &dual.lambda_bar, dual.r);
    let raw = minimize_smooth(&eval, x_start.to_vec(), eps, config, None)?;
    Ok(InnerResult {
        x: raw.z,
        t: None,
        value: raw.value,
        grad_norm: raw.grad_norm,
        iterations: raw.iterations,
        converged: raw.converged,
    })
}

struct RawResult {
    z: Vec<f64>,
    value: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Accepted line-search point.
struct Accepted {
    z: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
}

/// Point on the search ray with enough state to resume from it.
#[derive(Clone)]
struct LinePoint {
    alpha: f64,
    value: f64,
    dphi: f64,
    z: Vec<f64>,
    grad: Vec<f64>,
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// L-BFGS two-loop recursion: returns `-H * grad` for the implicit inverse
/// Hessian built from `history`, seeded with `gamma * I`.
fn two_loop(grad: &[f64], history: &VecDeque<Pair>, gamma: f64) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for pair in history.iter().rev() {
        let a = pair.rho * dot(&pair.s, &q);
        add_scaled(&mut q, -a, &pair.y);
        alphas.push(a);
    }
    for qi in q.iter_mut() {
        *qi *= gamma;
    }
    for (pair, &a) in history.iter().zip(alphas.iter().rev()) {
        let b = pair.rho * dot(&pair.y, &q);
        add_scaled(&mut q, a - b, &pair.s);
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

fn minimize_smooth<F>(
    eval: &F,
    z0: Vec<f64>,
    eps: f64,
    config: &InnerConfig,
    boundary_index: Option<usize>,
) -> Result<RawResult, InnerError>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    config.validate().expect("inner configuration must be valid");

    let mut z = z0;
    let (mut value, mut grad) = eval(&z);
    if !value.is_finite() || !all_finite(&grad) {
        return Err(InnerError::NonFiniteStart { point: z });
    }
    let mut grad_norm = norm(&grad);
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(config.memory);
    let mut gamma = 1.0;
    let mut iterations = 0;
    let mut converged = grad_norm <= eps;

    'outer: while !converged && iterations < config.max_iterations {
        let mut accepted: Option<Accepted> = None;

        // First try the quasi-Newton direction, then once more with plain
        // steepest descent after wiping a history that produced a dud.
        for attempt in 0..2 {
            let mut d = if attempt == 0 {
                two_loop(&grad, &history, gamma)
            } else {
                grad.iter().map(|g| -g).collect()
            };
            let mut dphi0 = dot(&d, &grad);
            if !all_finite(&d) || dphi0 >= -1e-12 * norm(&d) * grad_norm {
                // Not a usable descent direction; fall back immediately.
                d = grad.iter().map(|g| -g).collect();
                dphi0 = -grad_norm * grad_norm;
            }

            let mut alpha_max = f64::INFINITY;
            if let Some(idx) = boundary_index {
                if d[idx] < 0.0 {
                    if z[idx] <= T_FLOOR {
                        // t is pinned at the boundary and the model still
                        // pushes it down: no stationary point this way.
                        break 'outer;
                    }
                    alpha_max = config.t_boundary_fraction * z[idx] / (-d[idx]);
                }
            }
            if !(alpha_max > 0.0) {
                break 'outer;
            }

            // Before any curvature information exists the direction has raw
            // gradient scale, so cap the first trial step well inside the
            // basin of the start instead of jumping a unit distance.
            let alpha_init = if iterations == 0 && history.is_empty() {
                let step_cap = 0.1 * norm_inf(&z).max(1.0);
                step_cap / norm_inf(&d).max(step_cap)
            } else {
                1.0
            };

            if let Some(acc) = strong_wolfe(
                eval,
                &z,
                &d,
                value,
                dphi0,
                alpha_init.min(alpha_max),
                alpha_max,
                config,
            ) {
                accepted = Some(acc);
                break;
            }
            if attempt == 0 {
                if history.is_empty() {
                    break; // already steepest descent, nothing left to try
                }
                history.clear();
                gamma = 1.0;
            }
        }

        let Some(acc) = accepted else {
            break; // no finite decrease found in any direction
        };
        if acc.z == z {
            break; // accepted step below float resolution: nothing to gain
        }

        let s: Vec<f64> = acc.z.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = acc.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            let yy = dot(&y, &y);
            if yy > 0.0 && sy.is_finite() && yy.is_finite() {
                gamma = sy / yy;
            }
            if history.len() == config.memory {
                history.pop_front();
            }
            history.push_back(Pair { rho: 1.0 / sy, s, y });
        }

        z = acc.z;
        value = acc.value;
        grad = acc.grad;
        grad_norm = norm(&grad);
        iterations += 1;
        converged = grad_norm <= eps;
    }

    Ok(RawResult { z, value, grad_norm, iterations, converged })
}

/// Strong Wolfe line search: bracketing stage plus zoom, after Nocedal and
/// Wright's algorithms 3.5/3.6. Returns `None` only if no finite trial with
/// sufficient decrease exists along the ray within the budgets. Trial points
/// where the function or gradient is non-finite are treated as failed trials,
/// never accepted.
#[allow(clippy::too_many_arguments)]
fn strong_wolfe<F>(
    eval: &F,
    z: &[f64],
    d: &[f64],
    phi0: f64,
    dphi0: f64,
    alpha_init: f64,
    alpha_max: f64,
    config: &InnerConfig,
) -> Option<Accepted>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    debug_assert!(dphi0 < 0.0);
    let c1 = config.armijo_c1;
    let c2 = config.curvature_c2;
    let armijo = |alpha: f64, v: f64| v <= phi0 + c1 * alpha * dphi0;
    // Near a stationary point the achievable decrease g^2/(2L) drops below
    // one ulp of the value, where the Armijo test is blind even at the exact
    // ray minimizer. Accept a step on the curvature condition alone as long
    // as the value did not measurably rise (approximate Wolfe conditions).
    let value_noise = 64.0 * f64::EPSILON * (1.0 + phi0.abs());

    let probe = |alpha: f64| -> LinePoint {
        let mut trial = z.to_vec();
        add_scaled(&mut trial, alpha, d);
        let (v, g) = eval(&trial);
        let dphi = if all_finite(&g) { dot(&g, d) } else { f64::NAN };
        LinePoint { alpha, value: v, dphi, z: trial, grad: g }
    };
    let usable = |p: &LinePoint| p.value.is_finite() && all_finite(&p.grad);

    let zero = LinePoint {
        alpha: 0.0,
        value: phi0,
        dphi: dphi0,
        z: z.to_vec(),
        grad: Vec::new(), // never returned: acceptance requires alpha > 0
    };

    let mut prev = zero.clone();
    let mut alpha = alpha_init.max(f64::MIN_POSITIVE);
    let mut best: Option<LinePoint> = None;

    for i in 0..config.max_backtracks {
        let p = probe(alpha);
        // Sufficient decrease implies value <= phi0, so this single test
        // covers both the exact Wolfe accept and the approximate one.
        if usable(&p) && p.dphi.abs() <= -c2 * dphi0 && p.value <= phi0 + value_noise {
            return Some(finish(p));
        }
        let ok = usable(&p) && armijo(alpha, p.value);
        if !ok || (i > 0 && p.value >= prev.value) {
            let lo = prev;
            return zoom(eval, z, d, phi0, dphi0, lo, p, config, best);
        }
        if best.as_ref().map_or(true, |b| p.value < b.value) {
            best = Some(p.clone());
        }
        if p.dphi >= 0.0 {
            return zoom(eval, z, d, phi0, dphi0, p, prev, config, best);
        }
        if alpha >= alpha_max {
            // Capped by the boundary: take the best sufficient-decrease
            // point even though the curvature condition is still unmet.
            return best.map(finish);
        }
        prev = p;
        alpha = (2.0 * alpha).min(alpha_max);
    }
    best.map(finish)
}

fn finish(p: LinePoint) -> Accepted {
    Accepted { z: p.z, value: p.value, grad: p.grad }
}

/// Zoom stage: keeps a `lo` endpoint satisfying sufficient decrease and
/// shrinks toward a Wolfe point by interpolation. `hi` may be unusable
/// (non-finite trial) or simply worse; only its alpha and value matter.
#[allow(clippy::too_many_arguments)]
fn zoom<F>(
    eval: &F,
    z: &[f64],
    d: &[f64],
    phi0: f64,
    dphi0: f64,
    mut lo: LinePoint,
    mut hi: LinePoint,
    config: &InnerConfig,
    mut best: Option<LinePoint>,
) -> Option<Accepted>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let c1 = config.armijo_c1;
    let c2 = config.curvature_c2;
    let armijo = |alpha: f64, v: f64| v <= phi0 + c1 * alpha * dphi0;
    let value_noise = 64.0 * f64::EPSILON * (1.0 + phi0.abs());

    let probe = |alpha: f64| -> LinePoint {
        let mut trial = z.to_vec();
        add_scaled(&mut trial, alpha, d);
        let (v, g) = eval(&trial);
        let dphi = if all_finite(&g) { dot(&g, d) } else { f64::NAN };
        LinePoint { alpha, value: v, dphi, z: trial, grad: g }
    };
    let usable = |p: &LinePoint| p.value.is_finite() && all_finite(&p.grad);

    for _ in 0..config.max_backtracks {
        let width = hi.alpha - lo.alpha;
        if width.abs() <= 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
        // Quadratic model through (lo.value, lo.dphi) and hi.value, clamped
        // away from the ends; bisection when the model is unusable.
        let mut alpha = if hi.value.is_finite() {
            let denom = 2.0 * (hi.value - lo.value - lo.dphi * width);
            let cand = lo.alpha - lo.dphi * width * width / denom;
            if denom > 0.0 && cand.is_finite() { cand } else { lo.alpha + 0.5 * width }
        } else {
            lo.alpha + 0.5 * width
        };
        let lo_end = lo.alpha + 0.1 * width;
        let hi_end = hi.alpha - 0.1 * width;
        let (lo_clip, hi_clip) = if width > 0.0 { (lo_end, hi_end) } else { (hi_end, lo_end) };
        alpha = alpha.clamp(lo_clip, hi_clip);

        let p = probe(alpha);
        // Same accept as the bracketing stage: curvature plus either real
        // sufficient decrease or a value inside the rounding noise band.
        if usable(&p) && p.dphi.abs() <= -c2 * dphi0 && p.value <= phi0 + value_noise {
            return Some(finish(p));
        }
        if !usable(&p) || !armijo(alpha, p.value) || p.value >= lo.value {
            hi = p;
            continue;
        }
        if best.as_ref().map_or(true, |b| p.value < b.value) {
            best = Some(p.clone());
        }
        if p.dphi * (hi.alpha - lo.alpha) >= 0.0 {
            hi = lo;
        }
        lo = p;
    }
    // Curvature never satisfied inside the budget: fall back to the best
    // sufficient-decrease point, if any trial produced one.
    best.filter(|p| p.alpha > 0.0).map(finish)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::get_problem;

    #[test]
    fn quadratic_subproblem_solves_fast() {
        // x1^2 + x2^2 + (1/2)(x1+x2)^2 from (3,3): strictly convex quadratic.
        let p = get_problem(503).unwrap();
        let dual = DualState::initial(1, 1.0);
        let res = minimize_x(&p, 1.0, &dual, &[3.0, 3.0], 1e-8, &InnerConfig::default()).unwrap();
        assert!(res.converged);
        assert!(res.grad_norm <= 1e-8);
        assert!(res.x.iter().all(|v| v.abs() <= 1e-8));
        assert!(res.iterations <= 9, "took {} iterations", res.iterations);
        assert!(res.t.is_none());
    }

    #[test]
    fn presolved_start_returns_immediately() {
        let p = get_problem(502).unwrap();
        let dual = DualState::initial(1, 2.0);
        let res = minimize_x(&p, 1.0, &dual, &[0.0], 1e-8, &InnerConfig::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.iterations, 0);
        assert_eq!(res.x, vec![0.0]);
    }

    #[test]
    fn tiny_fixed_t_is_still_a_quadratic_in_x() {
        // Closed form minimizer of x^2/2 + (r/2t)x^2 is x = 0 for any t > 0.
        let p = get_problem(502).unwrap();
        let dual = DualState::initial(1, 2.0);
        let res =
            minimize_x(&p, 1e-9, &dual, &[10.0], 1e-10, &InnerConfig::default()).unwrap();
        assert!(res.converged);
        assert!(res.x[0].abs() <= 1e-10);
    }

    #[test]
    fn joint_solve_finds_the_barrier_stationary_point() {
        // Separable: x -> 0 and t -> sqrt(0 + s^2) = 0.5.
        let p = get_problem(502).unwrap();
        let dual = DualState::initial(1, 2.0);
        let res =
            minimize_xt(&p, &dual, 0.5, &[0.0], 1.0, 1e-10, &InnerConfig::default()).unwrap();
        assert!(res.converged);
        assert!(res.x[0].abs() <= 1e-10);
        assert!((res.t.unwrap() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn joint_solve_without_shift_collapses_t_and_reports_failure() {
        // With s = 0 and r > |lambda| there is no positive-t stationary
        // point: the solve must fail with t driven toward zero.
        let p = get_problem(502).unwrap();
        let dual = DualState::initial(1, 2.0);
        let res =
            minimize_xt(&p, &dual, 0.0, &[10.0], 1.0, 1e-6, &InnerConfig::default()).unwrap();
        assert!(!res.converged);
        assert!(res.t.unwrap() < 1e-3);
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let bad = crate::problems::Problem::new(
            900,
            1,
            1,
            |_| f64::NAN,
            |_| vec![f64::NAN],
            |x| vec![x[0]],
            |_| vec![vec![1.0]],
            vec![1.0],
        );
        let dual = DualState::initial(1, 1.0);
        let err = minimize_x(&bad, 1.0, &dual, &[1.0], 1e-8, &InnerConfig::default());
        assert!(matches!(err, Err(InnerError::NonFiniteStart { .. })));
    }

    #[test]
    fn descent_across_iterations_on_a_nonconvex_instance() {
        // Track values along the solve of 509's first subproblem.
        let p = get_problem(509).unwrap();
        let dual = DualState::initial(1, 10.0);
        let t = 1.0;
        let cfg = InnerConfig::default();
        let res = minimize_x(&p, t, &dual, &[3.0, 3.0], 1e-6, &cfg).unwrap();
        assert!(res.converged);
        // The final value cannot exceed the starting one.
        let start_value = smoothing_eval(&p, &[3.0, 3.0], t, &dual.lambda_bar, dual.r).value;
        assert!(res.value <= start_value);
    }
}
