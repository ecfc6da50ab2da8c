//! Temporary survey harness; deleted before the crate ships.

use sharpal::outer::{solve_alg2, solve_alg3, solve_phr, DriverKind, SolverConfig};
use sharpal::problems::get_problem;

fn xerr(id: u32, x: &[f64]) -> f64 {
    let p = get_problem(id).unwrap();
    p.known_solution().map_or(f64::NAN, |s| s.primal_error(x))
}

#[test]
fn survey() {
    let config = SolverConfig::default();
    for driver in [DriverKind::Alg2, DriverKind::Alg3, DriverKind::Phr] {
        println!("=== {driver:?} ===");
        for id in [501, 502, 503, 504, 505, 506, 507, 508, 509, 510, 511, 512, 513, 514] {
            let p = get_problem(id).unwrap();
            let rep = match driver {
                DriverKind::Alg2 => solve_alg2(&p, &config).unwrap(),
                DriverKind::Alg3 => solve_alg3(&p, &config).unwrap(),
                _ => solve_phr(&p, &config).unwrap(),
            };
            println!(
                "{id}: inform={} out={:2} inn={:5} xerr={:9.3e} kkt={:9.3e} infeas={:9.3e} f={:12.6e} lam={:?}",
                rep.inform(),
                rep.outer_iterations,
                rep.inner_iterations,
                xerr(id, &rep.x),
                rep.kkt_residual,
                rep.infeasibility,
                rep.objective,
                rep.lambda.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>(),
            );
        }
    }
}
