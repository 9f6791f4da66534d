use std::fs;

use riskbandit_core::{
    gap_table, load_scenario, regret_curve, run_policy, solve_g_optimal, to_instance, DesignOptions, Environment,
    PolicyConfig, RegretReport, ReportMeta, Variant,
};
use riskbandit_sim::formats::{self, DesignDump, TrajectorySidecar};

#[test]
fn scenario_instances_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    for (name, shares) in [("I", 4), ("II", 4), ("III", 8)] {
        let inst = to_instance(&load_scenario(name).unwrap(), shares).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        formats::write_instance(&path, &inst).unwrap();
        let back = formats::read_instance(&path).unwrap();
        assert_eq!(back, inst);
        for (a, b) in back.means().iter().zip(inst.means()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn trajectory_files_match_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = to_instance(&load_scenario("I").unwrap(), 4).unwrap();
    let cfg = PolicyConfig::new(Variant::RisePP, 2_000, inst.rho());
    let traj = run_policy(&mut Environment::new(&inst, 9), &cfg).unwrap();
    let sidecar = TrajectorySidecar::new("RISEPP", 9, &traj);
    formats::write_trajectory(dir.path(), "run", &sidecar, &traj).unwrap();

    let rows = formats::read_trajectory_csv(&dir.path().join("run.csv")).unwrap();
    assert_eq!(rows.len(), traj.len());
    for ((a, x), (&b, &y)) in rows.iter().zip(traj.chosen.iter().zip(&traj.rewards)) {
        assert_eq!(*a, b);
        assert_eq!(x.to_bits(), y.to_bits());
    }
    let back: TrajectorySidecar = serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(back, sidecar);
    assert_eq!(back.phase_log.len(), traj.phase_log.len());
    assert_eq!(back.pull_counts, traj.pull_counts);
}

#[test]
fn truncated_trajectory_csv_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "t,action_index,reward\n1,0,0.5\n2,x,0.1\n").unwrap();
    let err = formats::read_trajectory_csv(&path).unwrap_err().to_string();
    assert!(err.contains("row 2"), "{err}");
}

#[test]
fn design_dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = to_instance(&load_scenario("II").unwrap(), 4).unwrap();
    let q = solve_g_optimal(inst.actions(), &DesignOptions::default()).unwrap();
    let path = dir.path().join("design.json");
    formats::write_design(&path, &q).unwrap();
    let dump: DesignDump = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dump.support, q.support());
    assert_eq!(dump.weights, q.weights());
    assert_eq!(dump.g, q.g_value);
}

#[test]
fn aggregate_csv_parses_back() {
    let inst = to_instance(&load_scenario("I").unwrap(), 4).unwrap();
    let gaps = gap_table(&inst);
    let checkpoints = vec![10, 100, 1000];
    let mut reports = Vec::new();
    for variant in [Variant::Rise, Variant::MvUcb] {
        let meta = ReportMeta { policy: variant.name().into(), scenario: "I/S=4".into(), ..ReportMeta::default() };
        let mut rep = RegretReport::new(meta, checkpoints.clone());
        for seed in 0..3 {
            let traj = run_policy(&mut Environment::new(&inst, seed), &PolicyConfig::new(variant, 1000, inst.rho())).unwrap();
            rep.add_run(seed, regret_curve(&traj, &gaps, &checkpoints)).unwrap();
        }
        reports.push(rep);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aggregate.csv");
    formats::write_bytes(&path, &formats::aggregate_csv(&reports)).unwrap();
    let rows = formats::read_aggregate_csv(&path).unwrap();
    assert_eq!(rows.len(), 6);
    for (row, (rep, i)) in rows.iter().zip(reports.iter().flat_map(|r| (0..3).map(move |i| (r, i)))) {
        assert_eq!(row.policy, rep.meta.policy);
        assert_eq!(row.t, rep.checkpoints[i]);
        assert_eq!(row.mean_regret, rep.mean[i]);
        assert_eq!(row.stderr, rep.stderr[i]);
        assert_eq!(row.n_seeds, 3);
    }
    let per_seed = String::from_utf8(formats::per_seed_csv(&reports)).unwrap();
    assert_eq!(per_seed.lines().count(), 1 + 2 * 3 * 3);
    let svg = riskbandit_sim::plot::render(&rows, "t").unwrap();
    assert_eq!(svg.matches("class=\"band\"").count(), 2);
}
