//! Runs the full acceptance suite, printing one line per criterion, and
//! re-checks the two oracle criteria against oracles built here from the
//! raw link equations.

use std::io::Write;

use uavmon::jamming_opt::{algorithm1, solve_subproblem_a, AoSettings, SlackState, SubproblemOptions};
use uavmon::model::{Point, PresetName, Scenario, SystemParams};
use uavmon_cli::acceptance::{random_trajectories, run_all, SuiteInputs};

/// Least jamming power at which the UAV's SNR reaches D's SINR, by
/// bisection on the SNR comparison with S at the origin and D at (d, 0).
fn least_jamming(p: Point, params: &SystemParams) -> f64 {
    let h2 = params.altitude * params.altitude;
    let d = params.sd_distance;
    let sigma2 = params.noise_power();
    let g_sd = params.beta0 / (d * d);
    let g_su = params.beta0 / (p.x * p.x + p.y * p.y + h2);
    let g_ud = params.beta0 / ((d - p.x) * (d - p.x) + p.y * p.y + h2);
    let ok = |pj: f64| g_su / sigma2 >= g_sd / (g_ud * pj + sigma2);
    if ok(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}

#[test]
fn acceptance_suite() {
    let results = run_all(&SuiteInputs::default());
    // Written to stderr directly so the verdicts show even when output is
    // captured.
    let mut err = std::io::stderr().lock();
    for r in &results {
        writeln!(err, "{r}").unwrap();
    }
    assert_eq!(results.len(), 11);
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn pinned_solve_matches_bisection_oracle() {
    let params = SystemParams::default().with_timing(20.0, 0.5).unwrap();
    let opts = SubproblemOptions {
        pin_trajectory: true,
        ..SubproblemOptions::default()
    };
    let mut worst = 0.0f64;
    for traj in random_trajectories(7, 100, &params) {
        let sol = solve_subproblem_a(&traj, &SlackState::tight(&traj, &params), &params, &opts).unwrap();
        for (t, pj) in sol.jamming.powers().iter().enumerate() {
            let expect = least_jamming(traj.points[t + 1], &params);
            let dev = if expect > 0.0 {
                (pj - expect).abs() / expect
            } else {
                pj.abs()
            };
            worst = worst.max(dev);
        }
    }
    println!("pinned solve vs bisection oracle: worst deviation {worst:.3e}");
    assert!(worst <= 1e-6);
}

#[test]
fn two_slot_optimum_matches_grid_search() {
    // 8 s in 4 s slots: one free waypoint between the NF endpoints.
    let nf = Scenario::preset(PresetName::Nf);
    let params = SystemParams::default().with_timing(8.0, 4.0).unwrap();
    assert_eq!(params.slots, 2);
    let reach = params.max_speed * params.delta();
    let last = least_jamming(nf.end, &params);
    let mut grid = f64::INFINITY;
    for i in 0..=200 {
        for j in 0..=200 {
            let p = Point::new(
                nf.start.x - reach + 2.0 * reach * i as f64 / 200.0,
                nf.start.y - reach + 2.0 * reach * j as f64 / 200.0,
            );
            if p.distance(nf.start) <= reach && p.distance(nf.end) <= reach {
                grid = grid.min(params.delta() * (least_jamming(p, &params) + last));
            }
        }
    }
    let sol = algorithm1(&nf, &params, &AoSettings::default()).unwrap();
    let e = sol.total_jamming(params.delta());
    println!("two-slot instance: optimizer {e:.6e} J, grid minimum {grid:.6e} J");
    assert!(e <= 1.05 * grid);
}
