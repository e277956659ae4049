mod common;

use ivsolve_core::models::hill_network;
use ivsolve_core::solvers::{solve, Method, SolverConfig};
use ivsolve_core::IntervalBox;

fn configs() -> Vec<SolverConfig> {
    vec![
        SolverConfig::new(Method::Bisection).eps(1e-2),
        SolverConfig::new(Method::SubdivisionFilter).grid(40),
        SolverConfig::new(Method::Icp).grid(20).iterations(5),
        SolverConfig::new(Method::Newton).eps(1e-3).iterations(100),
        SolverConfig::new(Method::Krawczyk)
            .eps(1e-3)
            .iterations(100),
    ]
}

#[test]
fn oracle_finds_the_hill_steady_states() {
    let m = hill_network(2).unwrap();
    let mid = common::parameter_samples(&m, 0, 1)[0].clone();
    let roots = common::roots_for(&m, &mid, 10_000, 1);
    assert!(!roots.is_empty());
    for r in &roots {
        let f = m.eval_real(r, &mid).unwrap();
        assert!(f.iter().all(|v| v.abs() < common::RESIDUAL_TOL));
    }
}

#[test]
fn every_method_covers_oracle_roots_on_hill2() {
    for x0 in [
        IntervalBox::cube(0.0, 10.0, 2),
        IntervalBox::cube(0.0, 20.0, 2),
    ] {
        let m = hill_network(2).unwrap().with_x0(x0).unwrap();
        let roots = common::oracle_roots(&m, 10_000, 5, 7);
        assert!(!roots.is_empty());
        for cfg in configs() {
            let report = solve(&m, &cfg).unwrap();
            for (x, u) in &roots {
                assert!(
                    common::covered(&report, x, 1e-9),
                    "{} lost {x:?} at u = {u:?}",
                    cfg.method
                );
            }
        }
    }
}

#[test]
fn every_method_covers_oracle_roots_on_hill3() {
    let m = hill_network(3).unwrap();
    let roots = common::oracle_roots(&m, 2_000, 2, 11);
    assert!(!roots.is_empty());
    for cfg in configs() {
        let cfg = match cfg.method {
            Method::Bisection => cfg.eps(5e-2),
            Method::SubdivisionFilter => cfg.grid(12),
            Method::Icp => cfg.grid(8),
            _ => cfg,
        };
        let report = solve(&m, &cfg).unwrap();
        for (x, u) in &roots {
            assert!(
                common::covered(&report, x, 1e-9),
                "{} lost {x:?} at u = {u:?}",
                cfg.method
            );
        }
    }
}
