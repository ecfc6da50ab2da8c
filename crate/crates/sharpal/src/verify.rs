//! Consistency audits for solve traces.
//!
//! A [`SolveReport`](crate::outer::SolveReport) carries its full iteration
//! history, so most structural promises the drivers make can be re-checked
//! after the fact from stored values alone. The recomputations here use the
//! same expressions as the drivers, so equality checks are bit-exact, not
//! tolerance-based, except where noted.

use crate::outer::{DriverKind, SolveReport, SolverConfig, StopReason};

/// Residual-progress test exactly as the drivers evaluate it: the
/// contraction factor, floored at the stop tolerance.
fn progressed(h_norm: f64, h_prev: f64, tau: f64, tol: f64) -> bool {
    h_norm <= (tau * h_prev).max(tol)
}

/// Audits one report against the configuration that produced it. Returns
/// every violated invariant, or `Ok(())` for a clean trace.
///
/// Checks, by driver:
/// - iteration counters match the trace, rows are numbered consecutively;
/// - penalties are positive and non-decreasing, and each transition is
///   either a hold or one growth step (`gamma` for the iterative drivers,
///   exactly 2 for the exact driver);
/// - holds and growth steps match the residual-progress rule bit-for-bit;
/// - projected multipliers sit inside the configured box and equal the
///   clamp of the raw ones;
/// - the fixed-smoothing driver's `t` equals `sqrt(h_prev^2 + s^2)`
///   recomputed from stored rows, bit-for-bit;
/// - subproblem tolerances are positive and non-increasing, smoothing
///   values positive;
/// - a `Solved` exit implies the stop-test value met the tolerance
///   (iterative drivers; the exact driver certifies success by its final
///   `t` instead, see [`exact_success_certificate`]).
pub fn trace_invariants(
    report: &SolveReport,
    config: &SolverConfig,
) -> Result<(), Vec<String>> {
    let mut violations = Vec::new();
    let mut flag = |cond: bool, message: String| {
        if !cond {
            violations.push(message);
        }
    };

    let rows = &report.trace.iterates;
    let driver = report.driver;

    flag(
        report.outer_iterations == rows.len(),
        format!(
            "outer_iterations {} != trace length {}",
            report.outer_iterations,
            rows.len()
        ),
    );
    let inner_sum: usize = rows.iter().map(|row| row.inner_iterations).sum();
    flag(
        report.inner_iterations == inner_sum,
        format!(
            "inner_iterations {} != trace sum {}",
            report.inner_iterations, inner_sum
        ),
    );

    for (j, row) in rows.iter().enumerate() {
        flag(row.k == j, format!("row {j}: stored index {}", row.k));
        flag(
            row.h_norm.is_finite() && row.h_norm >= 0.0,
            format!("row {j}: residual norm {}", row.h_norm),
        );
        flag(
            !row.kkt_residual.is_nan(),
            format!("row {j}: stop-test value is NaN"),
        );
        flag(row.r > 0.0, format!("row {j}: penalty {}", row.r));

        match driver {
            DriverKind::Alg2 | DriverKind::Alg3 => {
                let t = row.t.unwrap_or(f64::NAN);
                flag(t > 0.0, format!("row {j}: smoothing value {t}"));
                let s = row.s.unwrap_or(f64::NAN);
                flag(s > 0.0, format!("row {j}: shift {s}"));
                let eps = row.eps.unwrap_or(f64::NAN);
                flag(eps > 0.0, format!("row {j}: subproblem tolerance {eps}"));
            }
            DriverKind::Phr => {
                flag(row.t.is_none(), format!("row {j}: unexpected smoothing value"));
                flag(row.s.is_none(), format!("row {j}: unexpected shift"));
                let eps = row.eps.unwrap_or(f64::NAN);
                flag(eps > 0.0, format!("row {j}: subproblem tolerance {eps}"));
            }
            DriverKind::Exact => {
                let t = row.t.unwrap_or(f64::NAN);
                flag(t >= 0.0, format!("row {j}: smoothing value {t}"));
                flag(
                    row.s.is_none() && row.eps.is_none(),
                    format!("row {j}: unexpected schedule values"),
                );
            }
        }

        // Multiplier projection.
        if driver == DriverKind::Exact {
            flag(
                row.lambda_bar == row.lambda,
                format!("row {j}: exact driver must not project multipliers"),
            );
        } else {
            let clamped: Vec<f64> = row
                .lambda
                .iter()
                .map(|&l| l.clamp(config.lambda_min, config.lambda_max))
                .collect();
            flag(
                row.lambda_bar == clamped,
                format!("row {j}: projected multiplier differs from clamp"),
            );
            flag(
                row.lambda_bar
                    .iter()
                    .all(|&l| (config.lambda_min..=config.lambda_max).contains(&l)),
                format!("row {j}: projected multiplier escapes the box"),
            );
        }

        // Fixed-smoothing t recomputation.
        if driver == DriverKind::Alg2 {
            let h_prev = if j == 0 {
                report.trace.initial_h_norm
            } else {
                rows[j - 1].h_norm
            };
            let s = row.s.unwrap_or(f64::NAN);
            let expected = (h_prev * h_prev + s * s).sqrt();
            flag(
                row.t == Some(expected),
                format!(
                    "row {j}: smoothing value {:?} != recomputed {expected}",
                    row.t
                ),
            );
        }
    }

    // Penalty transitions and the progress rule.
    for j in 0..rows.len().saturating_sub(1) {
        let (a, b) = (&rows[j], &rows[j + 1]);
        flag(
            b.r >= a.r,
            format!("rows {j}->{}: penalty decreased {} -> {}", j + 1, a.r, b.r),
        );
        match driver {
            DriverKind::Exact => flag(
                b.r == 2.0 * a.r,
                format!("rows {j}->{}: penalty must double, got {} -> {}", j + 1, a.r, b.r),
            ),
            _ => {
                let held = b.r == a.r;
                let grew = b.r == a.r * config.gamma;
                flag(
                    held || grew,
                    format!(
                        "rows {j}->{}: penalty step {} -> {} is neither hold nor gamma",
                        j + 1,
                        a.r,
                        b.r
                    ),
                );
                let h_prev = if j == 0 {
                    report.trace.initial_h_norm
                } else {
                    rows[j - 1].h_norm
                };
                let expect_hold = progressed(a.h_norm, h_prev, config.tau, config.tol);
                flag(
                    held == expect_hold,
                    format!(
                        "rows {j}->{}: penalty {} the progress rule",
                        j + 1,
                        if held { "holds against" } else { "grows despite" }
                    ),
                );
            }
        }
    }

    // Subproblem tolerances never loosen.
    if driver != DriverKind::Exact {
        for j in 0..rows.len().saturating_sub(1) {
            let (a, b) = (rows[j].eps, rows[j + 1].eps);
            if let (Some(a), Some(b)) = (a, b) {
                flag(
                    b <= a,
                    format!("rows {j}->{}: subproblem tolerance loosened {a} -> {b}", j + 1),
                );
            }
        }
    }

    // Report-level consistency.
    if let Some(last) = rows.last() {
        flag(
            report.x == last.x,
            "report point differs from the last trace row".into(),
        );
        flag(
            report.kkt_residual == last.kkt_residual,
            format!(
                "report stop-test value {} != last row {}",
                report.kkt_residual, last.kkt_residual
            ),
        );
        let growth = if driver == DriverKind::Exact {
            2.0 * last.r
        } else {
            last.r * config.gamma
        };
        flag(
            report.final_r == last.r || report.final_r == growth,
            format!(
                "final penalty {} is neither the last used {} nor one step up",
                report.final_r, last.r
            ),
        );
    } else {
        flag(
            report.final_r == config.r0,
            format!("empty trace but final penalty {} != r0", report.final_r),
        );
    }

    if report.stop == StopReason::Solved && driver != DriverKind::Exact {
        flag(
            report.kkt_residual <= config.tol,
            format!(
                "solved exit with stop-test value {} above tolerance {}",
                report.kkt_residual, config.tol
            ),
        );
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Ratio bounds linking the joint driver's smoothing value to the residual.
///
/// At any subproblem solution with full-gradient norm at most `eps`, the
/// t-derivative alone is at most `eps`, which pins `(|h|^2 + s^2) / t^2`
/// into `[1 - 2 eps / r, 1 + 2 eps / r]`. Two consequences are checked on
/// every converged row of a joint-driver trace:
///
/// - `|h| / t <= sqrt(1 + 2 eps / r)`,
/// - `t <= sqrt((|h|^2 + s^2) / (1 - 2 eps / r))` whenever `eps < r/2`.
///
/// Rows where the inner solve hit its budget are skipped (the bound assumes
/// stationarity). A small relative slack absorbs rounding in the stored
/// quantities. No-op for other drivers.
pub fn smoothing_ratio_bounds(report: &SolveReport) -> Result<(), Vec<String>> {
    if report.driver != DriverKind::Alg3 {
        return Ok(());
    }
    const SLACK: f64 = 1e-9;

    let mut violations = Vec::new();
    for (j, row) in report.trace.iterates.iter().enumerate() {
        if !row.inner_converged {
            continue;
        }
        let (Some(t), Some(s), Some(eps)) = (row.t, row.s, row.eps) else {
            violations.push(format!("row {j}: missing schedule values"));
            continue;
        };
        let ratio_cap = (1.0 + 2.0 * eps / row.r).sqrt();
        if row.h_norm / t > ratio_cap * (1.0 + SLACK) {
            violations.push(format!(
                "row {j}: residual-to-smoothing ratio {} exceeds {ratio_cap}",
                row.h_norm / t
            ));
        }
        let denominator = 1.0 - 2.0 * eps / row.r;
        if denominator > 0.0 {
            let t_cap = ((row.h_norm * row.h_norm + s * s) / denominator).sqrt();
            if t > t_cap * (1.0 + SLACK) {
                violations.push(format!(
                    "row {j}: smoothing value {t} exceeds bound {t_cap}"
                ));
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// The exact driver declares success when the global subproblem minimizer
/// reports a smoothing value at or below the grid's zero threshold; its
/// stop-test value is grid-limited and is not held to the iterative
/// tolerance. This audits that certificate.
pub fn exact_success_certificate(
    report: &SolveReport,
    zero_threshold: f64,
) -> Result<(), Vec<String>> {
    let mut violations = Vec::new();
    if report.driver != DriverKind::Exact {
        violations.push(format!("not an exact-driver report: {}", report.driver));
    }
    if report.stop == StopReason::Solved {
        match report.final_t {
            Some(t) if t <= zero_threshold => {}
            other => violations.push(format!(
                "solved exit but final smoothing value {other:?} exceeds threshold {zero_threshold}"
            )),
        }
        if let Some(last) = report.trace.iterates.last() {
            if last.t != report.final_t {
                violations.push("final smoothing value differs from last row".into());
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::GridMinimizer;
    use crate::outer::{solve_alg2, solve_alg3, solve_exact, solve_phr, GlobalMinimizer};
    use crate::problems::get_problem;

    fn defaults() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn clean_traces_pass_for_every_driver() {
        let config = defaults();
        for id in [502, 503] {
            let p = get_problem(id).unwrap();
            for report in [
                solve_alg2(&p, &config).unwrap(),
                solve_alg3(&p, &config).unwrap(),
                solve_phr(&p, &config).unwrap(),
            ] {
                trace_invariants(&report, &config)
                    .unwrap_or_else(|v| panic!("{id} {}: {v:?}", report.driver));
            }
        }
    }

    #[test]
    fn exact_trace_passes_both_audits() {
        let p = get_problem(514).unwrap();
        let config = defaults();
        let minimizer = GridMinimizer::for_problem(&p);
        let report = solve_exact(&p, &config, &minimizer).unwrap();
        trace_invariants(&report, &config).unwrap();
        exact_success_certificate(&report, minimizer.zero_threshold()).unwrap();
    }

    #[test]
    fn ratio_bounds_hold_on_joint_traces() {
        let config = defaults();
        for id in [501, 502, 503, 514] {
            let p = get_problem(id).unwrap();
            let report = solve_alg3(&p, &config).unwrap();
            smoothing_ratio_bounds(&report)
                .unwrap_or_else(|v| panic!("problem {id}: {v:?}"));
        }
    }

    #[test]
    fn corrupted_penalty_chain_is_caught() {
        // 514's multiplier starts far from its solution value, so the trace
        // spans several rows.
        let p = get_problem(514).unwrap();
        let config = defaults();
        let mut report = solve_alg2(&p, &config).unwrap();
        assert!(report.trace.iterates.len() >= 2, "need two rows to corrupt");
        report.trace.iterates[1].r *= 3.0;
        let violations = trace_invariants(&report, &config).unwrap_err();
        assert!(violations.iter().any(|v| v.contains("penalty")));
    }

    #[test]
    fn corrupted_smoothing_value_is_caught() {
        let p = get_problem(503).unwrap();
        let config = defaults();
        let mut report = solve_alg2(&p, &config).unwrap();
        let t = report.trace.iterates[0].t.unwrap();
        report.trace.iterates[0].t = Some(t * (1.0 + 1e-12));
        let violations = trace_invariants(&report, &config).unwrap_err();
        assert!(violations.iter().any(|v| v.contains("recomputed")));
    }

    #[test]
    fn escaped_multiplier_is_caught() {
        let p = get_problem(503).unwrap();
        let config = defaults();
        let mut report = solve_phr(&p, &config).unwrap();
        report.trace.iterates[0].lambda_bar[0] = config.lambda_max * 2.0;
        let violations = trace_invariants(&report, &config).unwrap_err();
        assert!(violations.iter().any(|v| v.contains("clamp")));
    }

    #[test]
    fn loosened_tolerance_is_caught() {
        let p = get_problem(514).unwrap();
        let config = defaults();
        let mut report = solve_alg3(&p, &config).unwrap();
        assert!(report.trace.iterates.len() >= 2, "need two rows to corrupt");
        let eps = report.trace.iterates[0].eps.unwrap();
        report.trace.iterates[1].eps = Some(eps * 10.0);
        let violations = trace_invariants(&report, &config).unwrap_err();
        assert!(violations.iter().any(|v| v.contains("loosened")));
    }

    #[test]
    fn certificate_rejects_wrong_driver() {
        let p = get_problem(502).unwrap();
        let config = defaults();
        let report = solve_alg2(&p, &config).unwrap();
        assert!(exact_success_certificate(&report, 1e-3).is_err());
    }
}
