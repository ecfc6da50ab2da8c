//! Outer drivers: multiplier and penalty updates around the inner solves.
//!
//! Four drivers share the bookkeeping in this module:
//!
//! - [`solve_alg2`]: fixed smoothing value per outer iteration, set from the
//!   previous residual norm as `t = sqrt(|h|^2 + s^2)`, with the subproblem
//!   solved over `x` alone;
//! - [`solve_alg3`]: the subproblem minimizes the barrier-shifted function
//!   jointly over `(x, t)`, so `t` comes out of the inner solve;
//! - [`solve_phr`]: classical quadratic augmented Lagrangian baseline;
//! - [`solve_exact`]: small-dimension reference method that globally
//!   minimizes the smoothed function through a caller-supplied oracle,
//!   doubles the penalty every iteration, and stops once the optimal
//!   smoothing value hits the oracle's zero threshold.
//!
//! All drivers log a full per-iteration trace; the companion `verify` module
//! re-derives the update rules from those traces and checks them exactly.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eval::{kkt_residual, DualState, EvalError};
use crate::inner::{minimize_phr, minimize_x, minimize_xt, InnerConfig, InnerError};
use crate::linalg::{columns_times, dot, norm, norm_inf};
use crate::problems::{apply_cutoff, CutoffTransform, Problem};

/// Schedule rule for the inexactness sequence `eps_k` and the smoothing
/// shift `s_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleRule {
    /// The built-in decreasing rule (see [`Schedule`]).
    Default,
    /// A fixed positive value every iteration.
    Constant(f64),
}

impl FromStr for ScheduleRule {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        if text == "default" {
            return Ok(ScheduleRule::Default);
        }
        if let Some(v) = text.strip_prefix("constant:") {
            let value: f64 = v
                .parse()
                .map_err(|_| format!("invalid constant schedule value {v:?}"))?;
            if !(value > 0.0) {
                return Err("constant schedule value must be positive".into());
            }
            return Ok(ScheduleRule::Constant(value));
        }
        Err(format!(
            "unknown schedule rule {text:?}; expected \"default\" or \"constant:<v>\""
        ))
    }
}

impl fmt::Display for ScheduleRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleRule::Default => write!(f, "default"),
            ScheduleRule::Constant(v) => write!(f, "constant:{v}"),
        }
    }
}

/// Which outer driver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriverKind {
    Alg2,
    Alg3,
    Phr,
    Exact,
}

impl DriverKind {
    pub fn name(self) -> &'static str {
        match self {
            DriverKind::Alg2 => "alg2",
            DriverKind::Alg3 => "alg3",
            DriverKind::Phr => "phr",
            DriverKind::Exact => "exact",
        }
    }
}

impl FromStr for DriverKind {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        match text {
            "alg2" => Ok(DriverKind::Alg2),
            "alg3" => Ok(DriverKind::Alg3),
            "phr" => Ok(DriverKind::Phr),
            "exact" => Ok(DriverKind::Exact),
            other => Err(format!(
                "unknown driver {other:?}; expected alg2, alg3, phr or exact"
            )),
        }
    }
}

impl fmt::Display for DriverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a driver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The driver's own success test passed.
    Solved,
    /// Outer iteration budget exhausted.
    IterationLimit,
    /// The next penalty update would exceed the configured cap.
    PenaltyTooLarge,
}

/// Outer solver configuration. Field names match the config-file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub tau: f64,
    pub gamma: f64,
    pub tol: f64,
    pub r0: f64,
    pub t0: f64,
    pub max_outer: usize,
    pub r_max: f64,
    pub eps_rule: ScheduleRule,
    pub s_rule: ScheduleRule,
    /// Clamp level for the range-bounding transform; `None` leaves the
    /// problem untouched.
    pub cutoff_m: Option<f64>,
    pub inner: InnerConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda_min: -1e20,
            lambda_max: 1e20,
            tau: 0.9,
            gamma: 10.0,
            tol: 1e-8,
            r0: 10.0,
            t0: 1.0,
            max_outer: 50,
            r_max: 1e20,
            eps_rule: ScheduleRule::Default,
            s_rule: ScheduleRule::Default,
            cutoff_m: None,
            inner: InnerConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), OuterError> {
        let fail = |msg: &str| Err(OuterError::InvalidConfig(msg.into()));
        if !(self.lambda_min < self.lambda_max) {
            return fail("lambda_min must be below lambda_max");
        }
        if !(0.0 < self.tau && self.tau < 1.0) {
            return fail("tau must lie in (0, 1)");
        }
        if !(self.gamma > 1.0) {
            return fail("gamma must exceed 1");
        }
        if !(self.tol > 0.0) {
            return fail("tol must be positive");
        }
        if !(self.r0 > 0.0) {
            return fail("r0 must be positive");
        }
        if !(self.t0 > 0.0) {
            return fail("t0 must be positive");
        }
        if self.max_outer == 0 {
            return fail("max_outer must be positive");
        }
        if !(self.r_max >= self.r0) {
            return fail("r_max must be at least r0");
        }
        if let Some(m) = self.cutoff_m {
            if !(m > 0.0) {
                return fail("cutoff_M must be positive");
            }
        }
        if let ScheduleRule::Constant(v) = self.eps_rule {
            if !(v > 0.0) {
                return fail("constant eps_rule value must be positive");
            }
        }
        if let ScheduleRule::Constant(v) = self.s_rule {
            if !(v > 0.0) {
                return fail("constant s_rule value must be positive");
            }
        }
        self.inner
            .validate()
            .map_err(OuterError::InvalidConfig)?;
        Ok(())
    }

    /// Applies one `key = value` setting. Keys are exactly the config-file
    /// vocabulary: lambda_min, lambda_max, tau, gamma, tol, r0, t0,
    /// max_outer, r_max, eps_rule, s_rule, cutoff_M.
    pub fn apply_key_value(&mut self, key: &str, value: &str) -> Result<(), String> {
        let float = |v: &str| -> Result<f64, String> {
            v.parse::<f64>()
                .map_err(|_| format!("invalid number {v:?} for key {key:?}"))
        };
        match key {
            "lambda_min" => self.lambda_min = float(value)?,
            "lambda_max" => self.lambda_max = float(value)?,
            "tau" => self.tau = float(value)?,
            "gamma" => self.gamma = float(value)?,
            "tol" => self.tol = float(value)?,
            "r0" => self.r0 = float(value)?,
            "t0" => self.t0 = float(value)?,
            "max_outer" => {
                self.max_outer = value
                    .parse::<usize>()
                    .map_err(|_| format!("invalid integer {value:?} for key \"max_outer\""))?
            }
            "r_max" => self.r_max = float(value)?,
            "eps_rule" => self.eps_rule = value.parse()?,
            "s_rule" => self.s_rule = value.parse()?,
            "cutoff_M" => {
                self.cutoff_m = match value {
                    "off" | "none" => None,
                    v => Some(float(v)?),
                }
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Parses a flat `key = value` config file body. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), String> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", idx + 1))?;
            self.apply_key_value(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", idx + 1))?;
        }
        Ok(())
    }
}

/// Errors from the outer drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OuterError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the exact driver handles at most 3 variables; problem has {0}")]
    UnsupportedDimension(usize),
}

/// Produces the per-iteration inexactness `eps_k` and smoothing shift `s_k`.
///
/// The default rules follow the decreasing envelope `10^{-1-k}` capped by the
/// current residual norm, `eps_k ~ min(10^{-1-k}, |h|^{3/2})` and
/// `s_k ~ min(10^{-1-k}, 0.1 |h|)`, so inexactness shrinks faster than
/// feasibility. Both are floored away from zero: the shift floor adapts to
/// the problem's floating-point noise level, `clamp((4/tol) * r * noise,
/// 1e-6, 0.05)` where `noise` estimates the absolute rounding error of the
/// constraint values times a gradient scale, because the multiplier update
/// divides by `t >= s_k` and would otherwise amplify that noise past `tol`
/// and stall the outer loop. The eps floor mirrors it so inner targets stay
/// achievable in double precision, and eps is additionally clamped to be
/// non-increasing across iterations.
#[derive(Debug, Clone)]
pub struct Schedule {
    eps_rule: ScheduleRule,
    s_rule: ScheduleRule,
    tol: f64,
    noise_scale: f64,
    eps_prev: f64,
}

impl Schedule {
    pub fn new(config: &SolverConfig, problem: &Problem) -> Self {
        let x0 = problem.start_point();
        let sigma = f64::EPSILON * (1.0 + norm_inf(&problem.constraints(x0)));
        let grad_scale = problem
            .jacobian(x0)
            .iter()
            .map(|col| norm(col))
            .fold(0.0, f64::max);
        Schedule {
            eps_rule: config.eps_rule,
            s_rule: config.s_rule,
            tol: config.tol,
            noise_scale: sigma * (1.0 + grad_scale),
            eps_prev: f64::INFINITY,
        }
    }

    /// Parameters for outer iteration `k`, given the current residual norm
    /// and penalty. Both outputs are strictly positive; eps never increases
    /// from one call to the next.
    pub fn next(&mut self, k: usize, h_norm: f64, r: f64) -> (f64, f64) {
        debug_assert!(h_norm >= 0.0 && r > 0.0);
        let envelope = 10f64.powi(-1 - k.min(300) as i32);
        let s = match self.s_rule {
            ScheduleRule::Constant(v) => v,
            ScheduleRule::Default => {
                let floor = ((4.0 / self.tol) * r * self.noise_scale).clamp(1e-6, 0.05);
                floor.max(envelope.min(0.1 * h_norm))
            }
        };
        let eps_raw = match self.eps_rule {
            ScheduleRule::Constant(v) => v,
            ScheduleRule::Default => {
                let floor = (self.tol / 10.0).max(1.5 * (r / s) * self.noise_scale);
                floor.max(envelope.min(h_norm.powf(1.5)))
            }
        };
        let eps = eps_raw.min(self.eps_prev);
        self.eps_prev = eps;
        (eps, s)
    }
}

/// Multiplier step `lambda_bar_i + (r/t) h_i`.
pub fn update_multiplier(
    lambda_bar: &[f64],
    r: f64,
    h: &[f64],
    t: f64,
) -> Result<Vec<f64>, EvalError> {
    if t <= 0.0 {
        return Err(EvalError::NonPositiveT(t));
    }
    Ok(lambda_bar
        .iter()
        .zip(h)
        .map(|(l, hi)| l + (r / t) * hi)
        .collect())
}

/// Componentwise clamp onto the safeguarding box.
pub fn project_multiplier(lambda: &[f64], lambda_min: f64, lambda_max: f64) -> Vec<f64> {
    debug_assert!(lambda_min < lambda_max);
    lambda.iter().map(|v| v.clamp(lambda_min, lambda_max)).collect()
}

/// One recorded outer iteration. `r` is the penalty USED in this iteration's
/// subproblem and updates; the next row's `r` shows how the progress rule
/// reacted. `kkt_residual` is the stop-test quantity evaluated at this row's
/// state, i.e. the value the next stop test will look at.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterIterate {
    pub k: usize,
    pub x: Vec<f64>,
    pub t: Option<f64>,
    pub lambda: Vec<f64>,
    pub lambda_bar: Vec<f64>,
    pub r: f64,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub h_norm: f64,
    pub kkt_residual: f64,
    pub inner_iterations: usize,
    /// Whether the inner solve met its eps target (false also covers inner
    /// aborts, where the previous iterate was kept).
    pub inner_converged: bool,
}

/// Full iteration history of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterTrace {
    /// Residual norm at the start point, the k=0 reference for the progress
    /// rule.
    pub initial_h_norm: f64,
    /// Stop-test value at the start point, for drivers that test before
    /// iterating.
    pub initial_kkt: Option<f64>,
    pub iterates: Vec<OuterIterate>,
}

/// Outcome of one driver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub problem_id: u32,
    pub driver: DriverKind,
    pub stop: StopReason,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Raw (unprojected) final multiplier, as reported.
    pub lambda: Vec<f64>,
    /// Effective multiplier at the final iterate: `lambda_bar + (r/t) h` for
    /// the smoothing drivers, `lambda_bar + r h` for the quadratic baseline,
    /// the raw multiplier for the exact driver.
    pub lambda_eff: Vec<f64>,
    pub infeasibility: f64,
    pub kkt_residual: f64,
    pub final_t: Option<f64>,
    pub final_r: f64,
    pub trace: OuterTrace,
}

impl SolveReport {
    /// Exit flag: 0 solved, 1 not solved (iteration limit or penalty cap).
    pub fn inform(&self) -> u8 {
        match self.stop {
            StopReason::Solved => 0,
            StopReason::IterationLimit | StopReason::PenaltyTooLarge => 1,
        }
    }

    pub fn solved(&self) -> bool {
        self.stop == StopReason::Solved
    }

    /// Extra diagnosis attached to failure exits.
    pub fn annotation(&self) -> Option<&'static str> {
        match self.stop {
            StopReason::PenaltyTooLarge => Some("penalty too large"),
            _ => None,
        }
    }
}

/// Stationarity-plus-feasibility residual with an explicit multiplier:
/// `sqrt(|grad f + grad_h lambda|^2 + |h|^2)`.
fn stationarity_residual(problem: &Problem, x: &[f64], lambda: &[f64]) -> f64 {
    let h = problem.constraints(x);
    let mut g = problem.gradient(x);
    for (gi, c) in g.iter_mut().zip(columns_times(&problem.jacobian(x), lambda)) {
        *gi += c;
    }
    (dot(&g, &g) + dot(&h, &h)).sqrt()
}

fn maybe_cutoff(problem: &Problem, config: &SolverConfig) -> Problem {
    match config.cutoff_m {
        Some(m) => apply_cutoff(problem, &CutoffTransform::enabled(m)),
        None => problem.clone(),
    }
}

/// Fixed-smoothing driver. Each iteration: stop test on the smoothed
/// gradient plus feasibility; set `t = sqrt(|h|^2 + s_k^2)`; minimize over
/// `x` to `eps_k`; multiplier step with `r/t`; penalty progress rule;
/// projection.
pub fn solve_alg2(problem: &Problem, config: &SolverConfig) -> Result<SolveReport, OuterError> {
    solve_smoothing(problem, config, DriverKind::Alg2)
}

/// Varying-smoothing driver: same skeleton, but the subproblem minimizes the
/// barrier-shifted function jointly over `(x, t)` and `t` comes out of the
/// inner solve.
pub fn solve_alg3(problem: &Problem, config: &SolverConfig) -> Result<SolveReport, OuterError> {
    solve_smoothing(problem, config, DriverKind::Alg3)
}

fn solve_smoothing(
    problem: &Problem,
    config: &SolverConfig,
    driver: DriverKind,
) -> Result<SolveReport, OuterError> {
    config.validate()?;
    let problem = maybe_cutoff(problem, config);
    let m = problem.num_constraints();

    let mut x = problem.start_point().to_vec();
    let mut t = config.t0;
    let mut dual = DualState::initial(m, config.r0);
    let mut schedule = Schedule::new(config, &problem);

    let initial_h_norm = norm(&problem.constraints(&x));
    let mut kkt = kkt_residual(&problem, &x, t, &dual).expect("t0 > 0 was validated");
    let initial_kkt = kkt;

    let mut iterates: Vec<OuterIterate> = Vec::new();
    let mut total_inner = 0usize;
    let mut stop = None;

    for k in 0..config.max_outer {
        if kkt <= config.tol {
            stop = Some(StopReason::Solved);
            break;
        }

        let h_prev = iterates.last().map_or(initial_h_norm, |row| row.h_norm);
        let (eps, s) = schedule.next(k, h_prev, dual.r);

        let (x_new, t_new, inner_its, inner_ok) = match driver {
            DriverKind::Alg2 => {
                let t_next = (h_prev * h_prev + s * s).sqrt();
                match minimize_x(&problem, t_next, &dual, &x, eps, &config.inner) {
                    Ok(res) => (res.x, t_next, res.iterations, res.converged),
                    Err(InnerError::NonFiniteStart { .. }) => (x.clone(), t_next, 0, false),
                }
            }
            DriverKind::Alg3 => {
                match minimize_xt(&problem, &dual, s, &x, t, eps, &config.inner) {
                    Ok(res) => {
                        let t_next = res.t.expect("joint solve returns t");
                        (res.x, t_next, res.iterations, res.converged)
                    }
                    Err(InnerError::NonFiniteStart { .. }) => (x.clone(), t, 0, false),
                }
            }
            _ => unreachable!("smoothing skeleton only runs alg2/alg3"),
        };

        let h_new = problem.constraints(&x_new);
        let h_norm_new = norm(&h_new);
        let lambda_new = update_multiplier(&dual.lambda_bar, dual.r, &h_new, t_new)
            .expect("smoothing drivers keep t positive");
        let lambda_bar_new =
            project_multiplier(&lambda_new, config.lambda_min, config.lambda_max);

        let r_used = dual.r;
        // Residuals already at the stop tolerance count as progress: growing
        // the penalty there cannot improve feasibility further and only
        // amplifies rounding noise in the multiplier update.
        let progressed = h_norm_new <= (config.tau * h_prev).max(config.tol);
        let r_next = if progressed { r_used } else { r_used * config.gamma };
        let capped = r_next > config.r_max;
        let r_adopted = if capped { r_used } else { r_next };

        dual = DualState::new(lambda_bar_new.clone(), lambda_new.clone(), r_adopted);
        x = x_new;
        t = t_new;
        kkt = kkt_residual(&problem, &x, t, &dual).expect("t stays positive");
        total_inner += inner_its;

        iterates.push(OuterIterate {
            k,
            x: x.clone(),
            t: Some(t),
            lambda: lambda_new,
            lambda_bar: lambda_bar_new,
            r: r_used,
            s: Some(s),
            eps: Some(eps),
            h_norm: h_norm_new,
            kkt_residual: kkt,
            inner_iterations: inner_its,
            inner_converged: inner_ok,
        });

        if capped {
            stop = Some(if kkt <= config.tol {
                StopReason::Solved
            } else {
                StopReason::PenaltyTooLarge
            });
            break;
        }
    }

    let stop = stop.unwrap_or(if kkt <= config.tol {
        StopReason::Solved
    } else {
        StopReason::IterationLimit
    });

    let h_final = problem.constraints(&x);
    let lambda_eff = update_multiplier(&dual.lambda_bar, dual.r, &h_final, t)
        .expect("t stays positive");
    Ok(SolveReport {
        problem_id: problem.id(),
        driver,
        stop,
        outer_iterations: iterates.len(),
        inner_iterations: total_inner,
        objective: problem.objective(&x),
        lambda: dual.lambda_raw.clone(),
        lambda_eff,
        infeasibility: norm(&h_final),
        kkt_residual: kkt,
        final_t: Some(t),
        final_r: dual.r,
        x,
        trace: OuterTrace { initial_h_norm, initial_kkt: Some(initial_kkt), iterates },
    })
}

/// Quadratic augmented Lagrangian baseline: minimize
/// `f + <lambda_bar, h> + (r/2)|h|^2` to `eps_k`, update
/// `lambda = lambda_bar + r h`, stop once
/// `sqrt(|grad f + grad_h lambda|^2 + |h|^2) <= tol`, with the same penalty
/// progress rule and projection as the smoothing drivers.
pub fn solve_phr(problem: &Problem, config: &SolverConfig) -> Result<SolveReport, OuterError> {
    config.validate()?;
    let problem = maybe_cutoff(problem, config);
    let m = problem.num_constraints();

    let mut x = problem.start_point().to_vec();
    let initial_h_norm = norm(&problem.constraints(&x));
    // Scale the initial penalty to the start point, as quadratic augmented
    // Lagrangian codes conventionally do: balance the objective against the
    // squared residual, clamped to [1e-8, r0]. A remote start otherwise
    // overweights feasibility in the first subproblem and can pin the
    // iterates in a wrong basin of the constraint set.
    let f0 = problem.objective(&x);
    let r0 = ((10.0 * f0.abs().max(1.0)) / (0.5 * initial_h_norm * initial_h_norm).max(1.0))
        .clamp(1e-8, config.r0);
    let mut dual = DualState::initial(m, r0);
    let mut schedule = Schedule::new(config, &problem);

    let mut kkt = f64::INFINITY;

    let mut iterates: Vec<OuterIterate> = Vec::new();
    let mut total_inner = 0usize;
    let mut stop = None;
    let mut lambda_eff = dual.lambda_bar.clone();

    for k in 0..config.max_outer {
        let h_prev = iterates.last().map_or(initial_h_norm, |row| row.h_norm);
        let (eps, _) = schedule.next(k, h_prev, dual.r);

        let (x_new, inner_its, inner_ok) =
            match minimize_phr(&problem, &dual, &x, eps, &config.inner) {
                Ok(res) => (res.x, res.iterations, res.converged),
                Err(InnerError::NonFiniteStart { .. }) => (x.clone(), 0, false),
            };

        let h_new = problem.constraints(&x_new);
        let h_norm_new = norm(&h_new);
        let lambda_new: Vec<f64> = dual
            .lambda_bar
            .iter()
            .zip(&h_new)
            .map(|(l, hi)| l + dual.r * hi)
            .collect();
        let lambda_bar_new =
            project_multiplier(&lambda_new, config.lambda_min, config.lambda_max);

        kkt = stationarity_residual(&problem, &x_new, &lambda_new);
        x = x_new;
        total_inner += inner_its;
        lambda_eff = lambda_new.clone();

        let r_used = dual.r;
        // Same floored progress rule as the smoothing drivers.
        let progressed = h_norm_new <= (config.tau * h_prev).max(config.tol);
        let r_next = if progressed { r_used } else { r_used * config.gamma };
        let capped = r_next > config.r_max;
        let r_adopted = if capped { r_used } else { r_next };

        dual = DualState::new(lambda_bar_new.clone(), lambda_new.clone(), r_adopted);

        iterates.push(OuterIterate {
            k,
            x: x.clone(),
            t: None,
            lambda: lambda_new,
            lambda_bar: lambda_bar_new,
            r: r_used,
            s: None,
            eps: Some(eps),
            h_norm: h_norm_new,
            kkt_residual: kkt,
            inner_iterations: inner_its,
            inner_converged: inner_ok,
        });

        if kkt <= config.tol {
            stop = Some(StopReason::Solved);
            break;
        }
        if capped {
            stop = Some(StopReason::PenaltyTooLarge);
            break;
        }
    }

    let stop = stop.unwrap_or(if kkt <= config.tol {
        StopReason::Solved
    } else {
        StopReason::IterationLimit
    });

    Ok(SolveReport {
        problem_id: problem.id(),
        driver: DriverKind::Phr,
        stop,
        outer_iterations: iterates.len(),
        inner_iterations: total_inner,
        objective: problem.objective(&x),
        lambda: dual.lambda_raw.clone(),
        lambda_eff,
        infeasibility: norm(&problem.constraints(&x)),
        kkt_residual: kkt,
        final_t: None,
        final_r: dual.r,
        x,
        trace: OuterTrace { initial_h_norm, initial_kkt: None, iterates },
    })
}

/// Best point a global search found: primal point, optimal smoothing value
/// (equal to the residual norm there), and function value.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalIncumbent {
    pub x: Vec<f64>,
    pub t: f64,
    pub value: f64,
}

/// Global minimization of the smoothed function over `(x, t >= 0)`,
/// supplied by the oracle layer.
pub trait GlobalMinimizer {
    fn minimize(&self, problem: &Problem, lambda: &[f64], r: f64) -> GlobalIncumbent;

    /// Below this, the optimal smoothing value counts as zero (successful
    /// termination). Tied to the search resolution.
    fn zero_threshold(&self) -> f64;
}

/// Reference driver: globally minimize the smoothed function, stop when the
/// optimal smoothing value vanishes (then the incumbent is a feasible global
/// minimizer), otherwise take the multiplier step and double the penalty.
///
/// Success is certified by the t-threshold, not by the gradient residual:
/// the reported `kkt_residual` is limited by the oracle's grid resolution.
pub fn solve_exact(
    problem: &Problem,
    config: &SolverConfig,
    minimizer: &dyn GlobalMinimizer,
) -> Result<SolveReport, OuterError> {
    config.validate()?;
    let problem = maybe_cutoff(problem, config);
    if problem.dim() > 3 {
        return Err(OuterError::UnsupportedDimension(problem.dim()));
    }
    let m = problem.num_constraints();

    let initial_h_norm = norm(&problem.constraints(problem.start_point()));
    let mut lambda = vec![0.0; m];
    let mut r = config.r0;

    let mut iterates: Vec<OuterIterate> = Vec::new();
    let mut stop = None;
    let mut x = problem.start_point().to_vec();
    let mut t_final = config.t0;

    for k in 0..config.max_outer {
        let incumbent = minimizer.minimize(&problem, &lambda, r);
        let h = problem.constraints(&incumbent.x);
        let h_norm = norm(&h);
        x = incumbent.x.clone();
        t_final = incumbent.t;

        let terminal = incumbent.t <= minimizer.zero_threshold();
        if !terminal {
            lambda = update_multiplier(&lambda, r, &h, incumbent.t)
                .expect("nonterminal incumbents have t above the threshold");
        }
        let kkt = stationarity_residual(&problem, &incumbent.x, &lambda);

        iterates.push(OuterIterate {
            k,
            x: incumbent.x,
            t: Some(incumbent.t),
            lambda: lambda.clone(),
            lambda_bar: lambda.clone(),
            r,
            s: None,
            eps: None,
            h_norm,
            kkt_residual: kkt,
            inner_iterations: 0,
            inner_converged: true,
        });

        if terminal {
            stop = Some(StopReason::Solved);
            break;
        }
        let r_next = 2.0 * r;
        if r_next > config.r_max {
            stop = Some(StopReason::PenaltyTooLarge);
            break;
        }
        r = r_next;
    }

    let stop = stop.unwrap_or(StopReason::IterationLimit);
    let kkt = iterates.last().map_or(f64::INFINITY, |row| row.kkt_residual);

    Ok(SolveReport {
        problem_id: problem.id(),
        driver: DriverKind::Exact,
        stop,
        outer_iterations: iterates.len(),
        inner_iterations: 0,
        objective: problem.objective(&x),
        lambda: lambda.clone(),
        lambda_eff: lambda,
        infeasibility: norm(&problem.constraints(&x)),
        kkt_residual: kkt,
        final_t: Some(t_final),
        final_r: r,
        x,
        trace: OuterTrace { initial_h_norm, initial_kkt: None, iterates },
    })
}

/// Convenience check used by reports and tests: the smoothed-gradient
/// stationarity at the final iterate with the report's effective multiplier.
pub fn effective_multiplier_residual(problem: &Problem, report: &SolveReport) -> f64 {
    let mut g = problem.gradient(&report.x);
    for (gi, c) in g
        .iter_mut()
        .zip(columns_times(&problem.jacobian(&report.x), &report.lambda_eff))
    {
        *gi += c;
    }
    norm(&g)
}
