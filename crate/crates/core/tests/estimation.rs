//! Monte Carlo behaviour of the least-squares estimators under the
//! Gaussian model.

use riskbandit_core::design::DesignOptions;
use riskbandit_core::estimate::PullStats;
use riskbandit_core::*;

fn scenario_one() -> MVInstance {
    to_instance(&load_scenario("I").unwrap(), 4).unwrap()
}

/// Pulls `ceil(n Q(a))` per design atom.
fn design_pulls(inst: &MVInstance, seed: u64, n: u64) -> (Vec<(usize, f64)>, DesignWeights) {
    let q = solve_g_optimal(inst.actions(), &DesignOptions::default()).unwrap();
    let mut env = Environment::new(inst, seed);
    let mut pulls = Vec::new();
    for (a, w) in q.pairs() {
        for _ in 0..(n as f64 * w).ceil() as u64 {
            pulls.push((a, env.pull(a)));
        }
    }
    (pulls, q)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn theta_error_shrinks_at_root_n() {
    let inst = scenario_one();
    let medians: Vec<f64> = [100u64, 1000, 10_000]
        .iter()
        .map(|&n| {
            median(
                (0..100)
                    .map(|s| {
                        let (pulls, _) = design_pulls(&inst, s, n);
                        let mut stats = PullStats::new(inst.num_actions());
                        pulls.iter().for_each(|&(a, x)| stats.record(a, x));
                        let est = stats.estimate(inst.actions(), inst.omega(), false).unwrap();
                        est.theta_hat
                            .iter()
                            .zip(inst.theta_star())
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect(),
            )
        })
        .collect();
    for w in medians.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.2..=0.5).contains(&ratio), "{medians:?}");
    }
}

#[test]
fn phi_recovery_with_true_theta() {
    // Each of the four corner atoms gets 2500 pulls, so coordinate i of phi_hat
    // is the mean of 2500 squared residuals minus omega. The chance that all
    // four errors stay below 0.1 is 0.926 per seed (chi-square tails), so
    // about 93 of 100 seeds pass; 85 is about five standard deviations below.
    let inst = scenario_one();
    let passed = (0..100)
        .filter(|&s| {
            let (pulls, _) = design_pulls(&inst, s, 10_000);
            let acts = inst.actions();
            let list: Vec<(&[f64], f64)> = pulls.iter().map(|&(a, x)| (acts.action(a), x)).collect();
            let v = DesignMatrix::from_actions(acts.dim(), list.iter().map(|p| p.0), false);
            let phi = estimate_phi(&list, inst.theta_star(), &v, inst.omega()).unwrap();
            phi.iter().zip(inst.phi_star()).all(|(x, y)| (x - y).abs() < 0.1)
        })
        .count();
    assert!(passed >= 85, "{passed}");
}
