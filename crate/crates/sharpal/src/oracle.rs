//! Slow, independent verification tools.
//!
//! Nothing here shares code with the fast solve paths beyond the problem
//! evaluations themselves: gradients are cross-checked by central finite
//! differences, and global structure is probed by brute-force grid scans
//! with deterministic tie-breaking. The grid search also powers the exact
//! reference driver on one- and two-variable instances.

use thiserror::Error;

use crate::eval::{barrier_eval, phr_lagrangian, sharp_lagrangian, smoothing_eval};
use crate::linalg::{dot, norm};
use crate::outer::{GlobalIncumbent, GlobalMinimizer};
use crate::problems::Problem;

/// Box-and-resolution description of a grid scan.
///
/// The scan evaluates `points_per_axis` equispaced points per axis, then
/// re-centers a box `shrink` times smaller on the incumbent and repeats, for
/// `refinements` rounds. The incumbent only ever changes on a strict value
/// improvement (ties break toward lexicographically earlier points within a
/// scan and toward earlier rounds across scans), so the incumbent value is
/// non-increasing across rounds and reruns are bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points_per_axis: usize,
    pub refinements: usize,
    pub shrink: f64,
}

impl GridSpec {
    /// Default box for a suite problem: per axis, `[-5, 5]` widened to
    /// include the start point with margin 1.
    pub fn for_problem(problem: &Problem) -> Self {
        let lower = problem
            .start_point()
            .iter()
            .map(|&x| (-5f64).min(x - 1.0))
            .collect();
        let upper = problem
            .start_point()
            .iter()
            .map(|&x| 5f64.max(x + 1.0))
            .collect();
        GridSpec { lower, upper, points_per_axis: 201, refinements: 4, shrink: 10.0 }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(OracleError::InvalidGrid("bound dimensions mismatch".into()));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(OracleError::InvalidGrid("need lower < upper per axis".into()));
        }
        if self.points_per_axis < 3 {
            return Err(OracleError::InvalidGrid("need at least 3 points per axis".into()));
        }
        if !(self.shrink > 1.0) {
            return Err(OracleError::InvalidGrid("shrink factor must exceed 1".into()));
        }
        Ok(())
    }

    /// Finest per-axis spacing the refined scan reaches.
    pub fn resolution(&self) -> f64 {
        let widest = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max);
        widest / (self.points_per_axis - 1) as f64 / self.shrink.powi(self.refinements as i32)
    }
}

/// Errors from the oracle layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid search supports at most 3 variables; problem has {0}")]
    UnsupportedDimension(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

fn axis_points(lower: f64, upper: f64, count: usize) -> Vec<f64> {
    let step = (upper - lower) / (count - 1) as f64;
    (0..count).map(|i| lower + i as f64 * step).collect()
}

/// Visits the Cartesian product of the axes in lexicographic order (first
/// axis most significant).
fn scan<F: FnMut(&[f64])>(axes: &[Vec<f64>], mut visit: F) {
    let n = axes.len();
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    'grid: loop {
        for (i, axis) in axes.iter().enumerate() {
            point[i] = axis[idx[i]];
        }
        visit(&point);
        let mut axis = n;
        while axis > 0 {
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                continue 'grid;
            }
            idx[axis] = 0;
        }
        break;
    }
}

/// Global minimization of the smoothed function over `(x, t >= 0)`.
///
/// For each grid point `x` the optimal `t` is known in closed form: the
/// minimum of `r/(2t)|h|^2 + (r/2)t` over `t >= 0` sits at `t = |h(x)|`,
/// where the smoothed value collapses to the sharp value
/// `f + <lambda, h> + r|h|`. The scan therefore grids only `x` and scores
/// points by the sharp value; the returned `t` is `|h|` at the incumbent.
pub fn global_minimize_smoothing(
    problem: &Problem,
    lambda: &[f64],
    r: f64,
    grid: &GridSpec,
) -> Result<GlobalIncumbent, OracleError> {
    if problem.dim() > 3 {
        return Err(OracleError::UnsupportedDimension(problem.dim()));
    }
    grid.validate()?;
    assert_eq!(grid.lower.len(), problem.dim(), "grid dimension mismatch");

    let mut lower = grid.lower.clone();
    let mut upper = grid.upper.clone();
    let mut best_x: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;

    for _ in 0..=grid.refinements {
        let axes: Vec<Vec<f64>> = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| axis_points(l, u, grid.points_per_axis))
            .collect();
        scan(&axes, |x| {
            let value = sharp_lagrangian(problem, x, lambda, r);
            if value < best_value {
                best_value = value;
                best_x = Some(x.to_vec());
            }
        });
        let incumbent = best_x.as_ref().expect("grid scan visits at least one point");
        for i in 0..lower.len() {
            let half = (upper[i] - lower[i]) / (2.0 * grid.shrink);
            lower[i] = incumbent[i] - half;
            upper[i] = incumbent[i] + half;
        }
    }

    let x = best_x.expect("grid scan visits at least one point");
    let t = norm(&problem.constraints(&x));
    Ok(GlobalIncumbent { x, t, value: best_value })
}

/// Cross-check variant that grids `t` explicitly instead of using the closed
/// form: scans `(x, t)` over the box times `[0, t_max]`. The `t = 0` plane is
/// finite only where the residual is within the current t-spacing of zero.
pub fn global_minimize_smoothing_gridded_t(
    problem: &Problem,
    lambda: &[f64],
    r: f64,
    grid: &GridSpec,
    t_max: f64,
) -> Result<GlobalIncumbent, OracleError> {
    if problem.dim() > 3 {
        return Err(OracleError::UnsupportedDimension(problem.dim()));
    }
    grid.validate()?;
    assert!(t_max > 0.0);

    let mut lower = grid.lower.clone();
    let mut upper = grid.upper.clone();
    lower.push(0.0);
    upper.push(t_max);

    let n = problem.dim();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut best_value = f64::INFINITY;

    for _ in 0..=grid.refinements {
        let axes: Vec<Vec<f64>> = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| axis_points(l, u, grid.points_per_axis))
            .collect();
        let t_spacing = (upper[n] - lower[n]) / (grid.points_per_axis - 1) as f64;
        scan(&axes, |z| {
            let (x, t) = (&z[..n], z[n]);
            let value = if t > 0.0 {
                smoothing_eval(problem, x, t, lambda, r).value
            } else {
                // Feasible-by-tolerance rule for the t = 0 plane.
                let h = problem.constraints(x);
                if norm(&h) <= t_spacing {
                    problem.objective(x)
                } else {
                    f64::INFINITY
                }
            };
            if value < best_value {
                best_value = value;
                best = Some((x.to_vec(), t));
            }
        });
        if let Some((bx, bt)) = &best {
            for i in 0..n {
                let half = (upper[i] - lower[i]) / (2.0 * grid.shrink);
                lower[i] = bx[i] - half;
                upper[i] = bx[i] + half;
            }
            let half_t = (upper[n] - lower[n]) / (2.0 * grid.shrink);
            lower[n] = (bt - half_t).max(0.0);
            upper[n] = bt + half_t;
        }
    }

    let (x, t) = best.expect("grid scan visits at least one point");
    Ok(GlobalIncumbent { x, t, value: best_value })
}

/// Dual function probe: the infimum of the smoothed function at `(lambda, r)`
/// as seen by the grid search.
pub fn dual_value(
    problem: &Problem,
    lambda: &[f64],
    r: f64,
    grid: &GridSpec,
) -> Result<f64, OracleError> {
    Ok(global_minimize_smoothing(problem, lambda, r, grid)?.value)
}

/// Maximum relative finite-difference error per function family.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradientCheckReport {
    pub objective: f64,
    pub jacobian: f64,
    pub quadratic_penalty: f64,
    pub smoothing_x: f64,
    pub smoothing_t: f64,
    pub barrier_x: f64,
    pub barrier_t: f64,
}

impl GradientCheckReport {
    pub fn max_error(&self) -> f64 {
        [
            self.objective,
            self.jacobian,
            self.quadratic_penalty,
            self.smoothing_x,
            self.smoothing_t,
            self.barrier_x,
            self.barrier_t,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Relative disagreement, measured against the larger magnitude but never
/// below an absolute scale of 1.
fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Central difference in coordinate `i` with step `1e-5 * max(1, |x_i|)`,
/// near the cube root of machine epsilon where truncation and rounding
/// noise balance for function values up to ~1e10.
fn central<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize) -> f64 {
    let step = 1e-5 * x[i].abs().max(1.0);
    let mut hi = x.to_vec();
    hi[i] += step;
    let mut lo = x.to_vec();
    lo[i] -= step;
    (f(&hi) - f(&lo)) / (2.0 * step)
}

/// Central difference for the smoothing-value derivative, with a step
/// proportional to `u` itself: the penalty terms scale like `1/u`, so a
/// relative step keeps their truncation error a fixed fraction of the
/// derivative regardless of problem scale. Only called with `u >= 0.1`.
fn central_scalar<F: Fn(f64) -> f64>(f: &F, u: f64) -> f64 {
    let step = 1e-4 * u;
    (f(u + step) - f(u - step)) / (2.0 * step)
}

/// Checks every analytic derivative the solvers rely on against central
/// finite differences at the given points, under a fixed set of multiplier,
/// penalty, shift and smoothing-value probes. Returns the worst relative
/// error per family.
pub fn check_gradients(problem: &Problem, points: &[Vec<f64>]) -> GradientCheckReport {
    let m = problem.num_constraints();
    let duals: [(Vec<f64>, f64); 2] = [
        ((0..m).map(|i| 0.7 - 1.1 * i as f64).collect(), 3.0),
        ((0..m).map(|i| -0.4 + 0.9 * i as f64).collect(), 11.0),
    ];
    let t_probes = [0.7, 0.2];
    let s_probes = [0.25, 0.05];

    let mut report = GradientCheckReport::default();
    for x in points {
        // Objective gradient.
        let analytic = problem.gradient(x);
        for i in 0..problem.dim() {
            let fd = central(&|y: &[f64]| problem.objective(y), x, i);
            report.objective = report.objective.max(relative_error(analytic[i], fd));
        }
        // Constraint Jacobian, one column per constraint.
        let cols = problem.jacobian(x);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..problem.dim() {
                let fd = central(&|y: &[f64]| problem.constraints(y)[j], x, i);
                report.jacobian = report.jacobian.max(relative_error(col[i], fd));
            }
        }
        for (lambda, r) in &duals {
            // Quadratic augmented Lagrangian.
            let (_, grad) = phr_lagrangian(problem, x, lambda, *r);
            for i in 0..problem.dim() {
                let fd = central(&|y: &[f64]| phr_lagrangian(problem, y, lambda, *r).0, x, i);
                report.quadratic_penalty =
                    report.quadratic_penalty.max(relative_error(grad[i], fd));
            }
            for &t in &t_probes {
                // Smoothed function, x- and t-derivatives.
                let g = smoothing_eval(problem, x, t, lambda, *r)
                    .grad
                    .expect("t > 0 has gradients");
                for i in 0..problem.dim() {
                    let fd = central(
                        &|y: &[f64]| smoothing_eval(problem, y, t, lambda, *r).value,
                        x,
                        i,
                    );
                    report.smoothing_x = report.smoothing_x.max(relative_error(g.x[i], fd));
                }
                let fd_t = central_scalar(
                    &|u: f64| smoothing_eval(problem, x, u, lambda, *r).value,
                    t,
                );
                report.smoothing_t = report.smoothing_t.max(relative_error(g.t, fd_t));

                for &s in &s_probes {
                    // Barrier-shifted variant.
                    let g = barrier_eval(problem, x, t, lambda, *r, s)
                        .grad
                        .expect("t > 0 has gradients");
                    for i in 0..problem.dim() {
                        let fd = central(
                            &|y: &[f64]| barrier_eval(problem, y, t, lambda, *r, s).value,
                            x,
                            i,
                        );
                        report.barrier_x = report.barrier_x.max(relative_error(g.x[i], fd));
                    }
                    let fd_t = central_scalar(
                        &|u: f64| barrier_eval(problem, x, u, lambda, *r, s).value,
                        t,
                    );
                    report.barrier_t = report.barrier_t.max(relative_error(g.t, fd_t));
                }
            }
        }
    }
    report
}

/// At fixed `x`, the barrier-shifted t-derivative must vanish at the closed
/// form `t = sqrt(|h|^2 + s^2)`. Returns its magnitude there.
pub fn barrier_t_stationarity_gap(
    problem: &Problem,
    x: &[f64],
    lambda: &[f64],
    r: f64,
    s: f64,
) -> f64 {
    let h = problem.constraints(x);
    let t = (dot(&h, &h) + s * s).sqrt();
    assert!(t > 0.0, "closed-form t needs s > 0 or an infeasible point");
    barrier_eval(problem, x, t, lambda, r, s)
        .grad
        .expect("t > 0 has gradients")
        .t
        .abs()
}

/// Outcome of the stationary-point witness search on the one-variable
/// problem `min x^2/2 s.t. x = 0` (suite id 502).
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerdict {
    pub epsilon: f64,
    /// Smallest smoothed-gradient norm the grid saw over x in [-5, 5],
    /// t in (0, 10].
    pub min_grad_norm: f64,
    pub argmin_x: f64,
    pub argmin_t: f64,
    /// Upper bound on the t of any eps-stationary point, from the
    /// first-order system: `(eps + |lambda|)/sqrt(1 - 2 eps/r) - r`.
    /// Negative bound means no such point can exist.
    pub analytic_t_bound: f64,
    /// The eps at which the bound changes sign:
    /// `sqrt(2 r (r + |lambda|)) - (r + |lambda|)`.
    pub epsilon_threshold: f64,
    /// True when the analytic bound certifies nonexistence at this eps.
    pub exclusion_certified: bool,
    /// True when the grid actually found a point with norm <= eps.
    pub witness_found: bool,
}

/// Searches for an eps-stationary point of the smoothed function for
/// problem 502 at the given `(lambda, r)`, over a dense `x` grid on
/// `[-5, 5]` and a log-spaced `t` grid on `(0, 10]`, and reports it next to
/// the closed-form exclusion bound.
///
/// Any eps-stationary `(x, t)` with `t > 0` must satisfy
/// `t = |eps q - lambda| / sqrt(1 - 2 eps p / r) - r` for some `p^2+q^2 <= 1`,
/// which is at most `analytic_t_bound`; when that bound is nonpositive and
/// `eps < r/2`, no eps-stationary point exists at all, no matter the grid.
pub fn example1_witness(lambda: f64, r: f64, epsilon: f64) -> WitnessVerdict {
    assert!(r > 0.0 && epsilon > 0.0);
    let problem = crate::problems::get_problem(502).expect("built-in");
    let lam = [lambda];

    let xs = axis_points(-5.0, 5.0, 2001);
    // Log-spaced positive t values down to 1e-8, plus the upper edge.
    let t_count = 1601;
    let (log_lo, log_hi) = ((1e-8f64).ln(), (10f64).ln());
    let ts: Vec<f64> = (0..t_count)
        .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (t_count - 1) as f64).exp())
        .collect();

    let mut min_grad_norm = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for &x in &xs {
        for &t in &ts {
            let g = smoothing_eval(&problem, &[x], t, &lam, r)
                .grad
                .expect("t > 0 has gradients");
            let norm = (g.x[0] * g.x[0] + g.t * g.t).sqrt();
            if norm < min_grad_norm {
                min_grad_norm = norm;
                argmin = (x, t);
            }
        }
    }

    let bound_valid = epsilon < 0.5 * r;
    let analytic_t_bound = if bound_valid {
        (epsilon + lambda.abs()) / (1.0 - 2.0 * epsilon / r).sqrt() - r
    } else {
        f64::INFINITY
    };
    let epsilon_threshold = (2.0 * r * (r + lambda.abs())).sqrt() - (r + lambda.abs());

    WitnessVerdict {
        epsilon,
        min_grad_norm,
        argmin_x: argmin.0,
        argmin_t: argmin.1,
        analytic_t_bound,
        epsilon_threshold,
        exclusion_certified: bound_valid && analytic_t_bound <= 0.0,
        witness_found: min_grad_norm <= epsilon,
    }
}

/// Grid-search implementation of the global-minimization hook used by the
/// exact driver.
#[derive(Debug, Clone)]
pub struct GridMinimizer {
    spec: GridSpec,
}

impl GridMinimizer {
    pub fn new(spec: GridSpec) -> Self {
        GridMinimizer { spec }
    }

    pub fn for_problem(problem: &Problem) -> Self {
        GridMinimizer { spec: GridSpec::for_problem(problem) }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
}

impl GlobalMinimizer for GridMinimizer {
    fn minimize(&self, problem: &Problem, lambda: &[f64], r: f64) -> GlobalIncumbent {
        global_minimize_smoothing(problem, lambda, r, &self.spec)
            .expect("dimension was checked by the driver")
    }

    fn zero_threshold(&self) -> f64 {
        10.0 * self.spec.resolution()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::get_problem;

    fn coarse(problem: &Problem, points: usize, refinements: usize) -> GridSpec {
        GridSpec { points_per_axis: points, refinements, ..GridSpec::for_problem(problem) }
    }

    #[test]
    fn grid_finds_the_sharp_minimizer_of_the_scalar_problem() {
        // min x^2/2 + r|x| has its global minimum at 0 for every r > 0.
        let p = get_problem(502).unwrap();
        let grid = GridSpec {
            lower: vec![-2.0],
            upper: vec![2.0],
            points_per_axis: 201,
            refinements: 4,
            shrink: 10.0,
        };
        let inc = global_minimize_smoothing(&p, &[0.0], 1.0, &grid).unwrap();
        assert!(inc.x[0].abs() <= 2.0 * grid.resolution());
        assert!(inc.value.abs() <= 1e-6);
        assert_eq!(inc.t, inc.x[0].abs());
    }

    #[test]
    fn incumbent_t_is_the_residual_norm() {
        let p = get_problem(507).unwrap();
        let inc =
            global_minimize_smoothing(&p, &[0.3], 2.0, &coarse(&p, 101, 2)).unwrap();
        let h = p.constraints(&inc.x);
        assert_eq!(inc.t, norm(&h));
    }

    #[test]
    fn axis_aligned_kink_pins_the_known_solution() {
        // Separable objective with an affine constraint: the sharp function
        // has its global minimum exactly at the solution kink for any
        // r > |1 + lambda|, and the kink is axis-aligned, so refinement
        // tracks it to grid resolution.
        let p = get_problem(514).unwrap();
        let sol = &p.known_solution().unwrap().minimizers[0];
        let grid = coarse(&p, 81, 3);
        let inc = global_minimize_smoothing(&p, &[-1.0], 8.0, &grid).unwrap();
        let err: f64 = inc
            .x
            .iter()
            .zip(sol)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 5.0 * grid.resolution(), "err = {err}");
    }

    #[test]
    fn refinement_only_improves_the_incumbent() {
        let p = get_problem(501).unwrap();
        let mut last = f64::INFINITY;
        for rounds in 0..4 {
            let inc =
                global_minimize_smoothing(&p, &[0.2], 3.0, &coarse(&p, 51, rounds)).unwrap();
            assert!(inc.value <= last + 1e-15);
            last = inc.value;
        }
    }

    #[test]
    fn gridded_t_agrees_with_the_closed_form() {
        let p = get_problem(502).unwrap();
        let grid = coarse(&p, 101, 2);
        let a = global_minimize_smoothing(&p, &[0.1], 2.0, &grid).unwrap();
        let b = global_minimize_smoothing_gridded_t(&p, &[0.1], 2.0, &grid, 12.0).unwrap();
        // t-resolution of the final round.
        let t_res = 12.0 / 100.0 / grid.shrink.powi(grid.refinements as i32);
        assert!((b.t - norm(&p.constraints(&b.x))).abs() <= 2.0 * t_res);
        assert!(b.value >= a.value - 1e-12, "gridded scan cannot beat closed form");
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let p = crate::problems::Problem::new(
            901,
            4,
            1,
            |x| x.iter().map(|v| v * v).sum(),
            |x| x.iter().map(|v| 2.0 * v).collect(),
            |x| vec![x[0]],
            |_| vec![vec![1.0, 0.0, 0.0, 0.0]],
            vec![1.0; 4],
        );
        let grid = GridSpec {
            lower: vec![-1.0; 4],
            upper: vec![1.0; 4],
            points_per_axis: 5,
            refinements: 0,
            shrink: 10.0,
        };
        assert_eq!(
            global_minimize_smoothing(&p, &[0.0], 1.0, &grid),
            Err(OracleError::UnsupportedDimension(4))
        );
    }

    #[test]
    fn gradient_checks_pass_at_start_points() {
        for id in [501, 505, 508, 511] {
            let p = get_problem(id).unwrap();
            let report = check_gradients(&p, &[p.start_point().to_vec()]);
            assert!(report.max_error() <= 1e-6, "problem {id}: {report:?}");
        }
    }

    #[test]
    fn barrier_t_gap_vanishes_at_closed_form() {
        let p = get_problem(506).unwrap();
        let gap = barrier_t_stationarity_gap(&p, &[2.0, -1.0], &[0.3], 7.0, 0.25);
        assert!(gap <= 1e-8, "gap = {gap}");
    }

    #[test]
    fn witness_search_certifies_nonexistence_for_small_eps() {
        let v = example1_witness(0.0, 2.0, 1e-4);
        assert!(!v.witness_found);
        assert!(v.exclusion_certified);
        assert!(v.analytic_t_bound < 0.0);
        // The infimum of the gradient norm is r/2, attained along x = 0.
        assert!((v.min_grad_norm - 1.0).abs() <= 1e-12);
        assert!(v.min_grad_norm > v.epsilon);
        // Threshold for (0, 2): 2*sqrt(2) - 2.
        assert!((v.epsilon_threshold - (8f64.sqrt() - 2.0)).abs() <= 1e-15);
    }

    #[test]
    fn witness_search_relaxes_above_the_threshold() {
        let v = example1_witness(0.0, 2.0, 1.2);
        assert!(v.epsilon > v.epsilon_threshold);
        assert!(!v.exclusion_certified);
        // At eps above the threshold a near-stationary point exists
        // (any x = 0 column point already has norm r/2 = 1 < 1.2).
        assert!(v.witness_found);
    }

    #[test]
    fn weak_duality_on_a_selection() {
        // The true infimum of the sharp function never exceeds the optimal
        // value; the grid sees only grid points, so allow the value gap of
        // the grid point nearest the solution (Lipschitz constant times
        // resolution).
        for id in [501, 502, 507, 514] {
            let p = get_problem(id).unwrap();
            let f_star = p.known_solution().unwrap().objective;
            for (lambda, r) in [(0.0f64, 1.0), (0.5, 4.0), (-0.7, 2.0)] {
                let grid = coarse(&p, 101, 2);
                let slack = 10.0 * grid.resolution() * (1.0 + lambda.abs() + r);
                let d = dual_value(&p, &[lambda], r, &grid).unwrap();
                assert!(
                    d <= f_star + slack,
                    "problem {id}: dual {d} exceeds primal {f_star} beyond grid slack"
                );
            }
        }
    }
}
