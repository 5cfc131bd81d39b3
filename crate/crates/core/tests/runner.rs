use nested_read::problems::*;
use nested_read::runner::*;
use nested_read::*;

fn toy_read() -> ReadEstimator<GaussianSine> {
    ReadEstimator::new(
        gaussian_sine_problem(),
        validate_schedule(2, &[0.74, 0.6], Regime::Lbs, None).unwrap(),
    )
    .unwrap()
}

#[test]
fn adaptive_runs_land_near_truth() {
    let runner = Runner::new(1).unwrap();
    let rule = StoppingRule {
        epsilon: 0.002,
        delta_pct: 5.0,
        min_reps: 1_000,
        max_reps: 4_000_000,
    };
    let truth = (-0.5f64).exp();
    for seed in 0..5 {
        let r = runner.run_adaptive(&toy_read(), &rule, 100 + seed).unwrap();
        // Rare huge values can keep the interval wide past the ceiling; such
        // runs are only held to their own interval.
        let err = (r.summary.mean - truth).abs();
        if r.converged {
            assert!(r.summary.ci_width().unwrap() < 0.004);
            assert!(err < 0.01, "seed {seed}: {:?}", r.summary);
        } else {
            assert_eq!(r.summary.n, rule.max_reps);
            assert!(
                err < 4.0 * r.summary.se.unwrap(),
                "seed {seed}: {:?}",
                r.summary
            );
        }
        assert_eq!(r.records.len() as u64, r.summary.n);
    }
}

#[test]
fn adaptive_uses_requested_quantile() {
    let runner = Runner::new(1).unwrap();
    let rule = StoppingRule {
        epsilon: 10.0,
        delta_pct: 1.0,
        min_reps: 50,
        max_reps: 100,
    };
    let r = runner.run_adaptive(&toy_read(), &rule, 0).unwrap();
    assert!((r.summary.z - 2.5758293035489).abs() < 1e-9);
}

#[test]
fn adaptive_prefix_equals_fixed_run() {
    let runner = Runner::new(3).unwrap();
    let rule = StoppingRule {
        epsilon: 1e-9,
        delta_pct: 5.0,
        min_reps: 100,
        max_reps: 2_100,
    };
    let a = runner.run_adaptive(&toy_read(), &rule, 7).unwrap();
    let f = runner.run_fixed(&toy_read(), 2_100, 7).unwrap();
    assert!(!a.converged);
    assert_eq!(a.records, f.records);
}

#[test]
fn streaming_summary_matches_two_pass() {
    let run = Runner::new(4)
        .unwrap()
        .run_fixed(&toy_read(), 20_000, 3)
        .unwrap();
    let batch = summarize(&run.records, Z_95, run.summary.wall_time);
    assert_eq!(batch.n, run.summary.n);
    assert!((batch.mean - run.summary.mean).abs() < 1e-12);
    assert!((batch.sd.unwrap() - run.summary.sd.unwrap()).abs() < 1e-10);
    assert_eq!(batch.total_leaf_cost, run.summary.total_leaf_cost);
}

#[test]
fn worker_count_is_invisible_in_results() {
    let a = Runner::new(1)
        .unwrap()
        .run_fixed(&toy_read(), 3_000, 5)
        .unwrap();
    let b = Runner::new(8)
        .unwrap()
        .run_fixed(&toy_read(), 3_000, 5)
        .unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.summary.mean.to_bits(), b.summary.mean.to_bits());
    assert_eq!(
        a.summary.sd.map(f64::to_bits),
        b.summary.sd.map(f64::to_bits)
    );
}

#[test]
fn sweep_tags_out_of_range_cells() {
    let runner = Runner::new(2).unwrap();
    let cells =
        parameter_sweep(&runner, &sigmoid_problem(), &[0.6, 0.8], &[0.55], 2_000, 1).unwrap();
    assert_eq!(cells.len(), 2);
    assert!(!cells[0].unvalidated);
    assert!(cells[1].unvalidated);
    let cost = validate_schedule(2, &[0.6, 0.55], Regime::Lbs, None)
        .unwrap()
        .expected_leaf_cost(0);
    assert!((cells[0].wn_sd - cost.sqrt() * cells[0].sd).abs() < 1e-12);
}

#[test]
fn sweep_rejects_bad_input() {
    let runner = Runner::new(1).unwrap();
    let p = sigmoid_problem();
    assert!(matches!(
        parameter_sweep(&runner, &p, &[], &[0.55], 10, 0),
        Err(RunError::EmptyGrid("r0"))
    ));
    assert!(matches!(
        parameter_sweep(&runner, &p, &[0.6], &[], 10, 0),
        Err(RunError::EmptyGrid("r1"))
    ));
    assert!(matches!(
        parameter_sweep(&runner, &p, &[0.4], &[0.55], 10, 0),
        Err(RunError::Schedule(_))
    ));
    let b = bermudan_problem(GbmParams::default()).unwrap();
    assert!(matches!(
        parameter_sweep(&runner, &b, &[0.6], &[0.55], 10, 0),
        Err(RunError::NotDepthTwo(3))
    ));
}

#[test]
fn curve_needs_a_truth() {
    let runner = Runner::new(1).unwrap();
    let est = CurveEstimator::Nmc(NmcScheme::Nmc1);
    assert!(matches!(
        mse_vs_cost_curve(&runner, &sigmoid_problem(), &est, &[1000], 2, 0, None),
        Err(RunError::MissingTruth)
    ));
    let pts = mse_vs_cost_curve(
        &runner,
        &sigmoid_problem(),
        &est,
        &[1000],
        2,
        0,
        Some(0.612),
    )
    .unwrap();
    assert_eq!(pts[0].estimator, "nmc1");
    assert_eq!(pts[0].mean_cost, 1000.0);
}

#[test]
fn read_curve_spends_about_the_budget() {
    let runner = Runner::new(1).unwrap();
    let sched = validate_schedule(2, &[0.74, 0.6], Regime::Lbs, None).unwrap();
    let pts = mse_vs_cost_curve(
        &runner,
        &gaussian_sine_problem(),
        &CurveEstimator::Read(sched),
        &[50_000],
        20,
        1,
        None,
    )
    .unwrap();
    assert!(
        (pts[0].mean_cost / 50_000.0 - 1.0).abs() < 0.05,
        "{:?}",
        pts[0]
    );
}

#[test]
fn records_round_trip_through_csv() {
    let run = Runner::new(1)
        .unwrap()
        .run_fixed(&toy_read(), 100, 1)
        .unwrap();
    let mut buf = Vec::new();
    write_records_csv(&mut buf, &run.records).unwrap();
    let back: Vec<RepRecord> = csv::Reader::from_reader(buf.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(back, run.records);
}
