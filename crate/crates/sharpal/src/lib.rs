//! Augmented Lagrangian methods for equality-constrained nonlinear programs,
//! built around a smoothed variant of the sharp (norm, not norm-squared) penalty.
//!
//! The library solves problems of the form
//!
//! ```text
//! minimize f(x)   subject to   h(x) = 0,    f: R^n -> R,  h: R^n -> R^m
//! ```
//!
//! with twice continuously differentiable data. The sharp augmented Lagrangian
//! `f + <lambda, h> + r*|h|` is nonsmooth at feasibility, which is exactly where
//! its minimizers sit; this crate works with a smooth surrogate in one extra
//! variable `t > 0`,
//!
//! ```text
//! L(x, t) = f(x) + <lambda, h(x)> + r/(2t) * |h(x)|^2 + r/2 * t,
//! ```
//!
//! whose minimum over `t >= 0` recovers the sharp function exactly at
//! `t = |h(x)|`. Two outer drivers exploit that structure (fixed smoothing
//! updates and joint minimization in `(x, t)` under a barrier shift), alongside
//! a classical quadratic-penalty multiplier method and a small-dimension global
//! variant for reference runs.
//!
//! Module map:
//! - [`problems`]: the 14-problem benchmark suite plus a range-bounding
//!   transform for unbounded instances.
//! - [`eval`]: penalty function values and gradients, dual state, stationarity
//!   residuals.
//! - [`inner`]: limited-memory quasi-Newton unconstrained minimizer used for
//!   the subproblems.
//! - [`outer`]: the four drivers, their configuration, and solve reports with
//!   full per-iteration traces.
//! - [`oracle`]: slow, trustworthy grid searches and finite-difference checks
//!   used to validate the fast paths.
//! - [`verify`]: invariant checks over recorded traces.

pub mod eval;
pub mod inner;
pub mod linalg;
pub mod oracle;
pub mod outer;
pub mod problems;
pub mod verify;

pub use eval::{DualState, EvalError};
pub use inner::{InnerConfig, InnerError, InnerResult};
pub use outer::{
    DriverKind, OuterError, OuterIterate, OuterTrace, ScheduleRule, SolveReport, SolverConfig,
    StopReason,
};
pub use problems::{get_problem, CutoffTransform, KnownSolution, Problem, ProblemError};
