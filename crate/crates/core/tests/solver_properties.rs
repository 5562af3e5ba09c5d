use proptest::prelude::*;
use uavmon::convex::*;

/// min Σ wᵢ(zᵢ − cᵢ)² over the box [lo, hi]ⁿ, with a random start inside.
fn box_program(centers: &[f64], weights: &[f64], lo: f64, hi: f64) -> ConvexProgram {
    let n = centers.len();
    let mut p = ConvexProgram::new(n);
    for i in 0..n {
        let w = weights[i];
        let c = centers[i];
        p.add_objective(QuadraticForm::diagonal(vec![i], &[w], vec![-2.0 * w * c], w * c * c));
        p.add_constraint(Affine::new(&[(i, 1.0)], -hi));
        p.add_constraint(Affine::new(&[(i, -1.0)], lo));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn box_optimum_is_the_clamped_center(
        centers in prop::collection::vec(-5.0..5.0f64, 1..6),
        w in 0.1..10.0f64,
        start in -0.99..0.99f64,
    ) {
        let weights = vec![w; centers.len()];
        let p = box_program(&centers, &weights, -1.0, 1.0);
        let z0 = vec![start; centers.len()];
        let r = solve(&p, &z0, &SolverSettings::default()).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Converged);
        let tol = SolverSettings::default().tolerance;
        let best: Vec<f64> = centers.iter().map(|c| c.clamp(-1.0, 1.0)).collect();
        let f_best = p.objective_value(&best);
        prop_assert!(r.objective - f_best <= tol * (1.0 + f_best.abs()));
        // Strong convexity turns the objective gap into a distance bound.
        let gap = (r.objective - f_best).max(0.0);
        for (z, b) in r.x.iter().zip(&best) {
            prop_assert!((z - b).abs() <= (gap / w).sqrt() + 1e-7, "{} vs {}", z, b);
        }
        prop_assert!(r.objective <= p.objective_value(&z0) + 1e-12);
        prop_assert!(r.max_constraint <= SolverSettings::default().tolerance);
        prop_assert!(r.kkt_residual <= SolverSettings::default().tolerance);
    }

    #[test]
    fn solves_are_deterministic(centers in prop::collection::vec(-3.0..3.0f64, 2..5)) {
        let weights: Vec<f64> = (0..centers.len()).map(|i| 1.0 + i as f64).collect();
        let p = box_program(&centers, &weights, -1.0, 1.0);
        let z0 = vec![0.0; centers.len()];
        let a = solve(&p, &z0, &SolverSettings::default()).unwrap();
        let b = solve(&p, &z0, &SolverSettings::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn phase1_then_solve_on_coupled_program() {
    // min z₀ + z₁ subject to z₀² + z₁² ≤ 1, started outside the disc.
    let mut p = ConvexProgram::new(2);
    p.add_objective(Affine::new(&[(0, 1.0), (1, 1.0)], 0.0));
    p.add_constraint(QuadraticForm::diagonal(vec![0, 1], &[1.0, 1.0], vec![0.0, 0.0], -1.0));
    let r = solve_from_seed(&p, &[3.0, -4.0], &SolverSettings::default()).unwrap();
    let expect = -(0.5f64).sqrt();
    assert!(
        (r.x[0] - expect).abs() < 1e-5 && (r.x[1] - expect).abs() < 1e-5,
        "{:?}",
        r.x
    );
}

#[test]
fn contradictory_bounds_are_infeasible() {
    let mut p = ConvexProgram::new(1);
    p.add_constraint(Affine::new(&[(0, 1.0)], 1.0));
    p.add_constraint(Affine::new(&[(0, -1.0)], 1.0));
    let err = phase1_feasible(&p, &[0.0], &SolverSettings::default()).unwrap_err();
    assert!(matches!(err, uavmon::SolverError::Infeasible { .. }), "{err:?}");
}

#[test]
fn settings_reject_bad_schedules() {
    let s = SolverSettings {
        barrier_factor: 1.0,
        ..SolverSettings::default()
    };
    assert!(s.validate().is_err());
    let s = SolverSettings {
        tolerance: 0.0,
        ..SolverSettings::default()
    };
    assert!(s.validate().is_err());
}
