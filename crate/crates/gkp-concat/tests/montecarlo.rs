use gkp_concat::codes::{CodeFamily, CodeInstance, CodeSpec, Scheme};
use gkp_concat::montecarlo::{estimate, estimate_with, sweep, tally, ErrorRateEstimate, Execution, MonteCarloConfig, BATCH_SIZE};
use gkp_concat::Decoder;

fn build(family: CodeFamily, scheme: Scheme) -> CodeInstance {
    CodeInstance::build(CodeSpec::new(family, scheme)).unwrap()
}

#[test]
fn vanishing_noise_gives_no_errors() {
    let cases = [
        (CodeFamily::Repetition(3), Scheme::I),
        (CodeFamily::Repetition(5), Scheme::II),
        (CodeFamily::FiveQubit, Scheme::III),
        (CodeFamily::Steane, Scheme::I),
        (CodeFamily::Shor, Scheme::III),
        (CodeFamily::UnbiasedGkpRepetition(2), Scheme::III),
    ];
    for (f, s) in cases {
        let e = estimate(&build(f, s), 1e-6, 10_000, 3).unwrap();
        assert_eq!(e.p_emp, 0.0, "{f} {s}");
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.samples, 10_000);
    }
}

#[test]
fn stderr_matches_seed_scatter() {
    let code = build(CodeFamily::Repetition(3), Scheme::II);
    let m = 20_000;
    let rates: Vec<ErrorRateEstimate> = (0..20).map(|seed| estimate(&code, 0.25, m, seed).unwrap()).collect();
    let mean = rates.iter().map(|e| e.p_emp).sum::<f64>() / 20.0;
    let sd = (rates.iter().map(|e| (e.p_emp - mean).powi(2)).sum::<f64>() / 19.0).sqrt();
    let reported = rates.iter().map(|e| e.stderr).sum::<f64>() / 20.0;
    assert!(sd < 2.0 * reported && reported < 2.0 * sd, "scatter {sd}, stderr {reported}");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let code = build(CodeFamily::FiveQubit, Scheme::III);
    let samples = 3 * BATCH_SIZE + 123;
    let run = |execution| {
        estimate_with(&code, 0.3, &MonteCarloConfig::new(samples, 99).with_execution(execution)).unwrap()
    };
    let reference = run(Execution::Sequential);
    assert!(reference.p_emp > 0.0);
    for execution in [Execution::Parallel, Execution::Threads(1), Execution::Threads(4), Execution::Threads(8)] {
        let e = run(execution);
        assert_eq!(e.p_emp.to_bits(), reference.p_emp.to_bits());
        assert_eq!(e.errors, reference.errors);
    }
    let d = Decoder::new(&code).unwrap();
    let cfg = MonteCarloConfig::new(samples, 99);
    let a = tally(&d, 0.3, &cfg.with_execution(Execution::Threads(4))).unwrap();
    let b = tally(&d, 0.3, &cfg.with_execution(Execution::Sequential)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seeds_and_cells_give_different_streams() {
    let code = build(CodeFamily::Repetition(3), Scheme::II);
    let cfg = MonteCarloConfig::new(50_000, 1);
    let a = estimate_with(&code, 0.3, &cfg).unwrap();
    let b = estimate_with(&code, 0.3, &cfg.with_cell(1)).unwrap();
    let c = estimate_with(&code, 0.3, &MonteCarloConfig::new(50_000, 2)).unwrap();
    assert_ne!(a.errors, b.errors);
    assert_ne!(a.errors, c.errors);
}

#[test]
fn early_stopping_rule() {
    let code = build(CodeFamily::Repetition(3), Scheme::II);
    let cfg = MonteCarloConfig::new(100 * BATCH_SIZE, 5).with_target_relative_stderr(Some(0.05));
    let e = estimate_with(&code, 0.3, &cfg).unwrap();
    assert!(e.samples < 100 * BATCH_SIZE);
    assert_eq!(e.samples % (16 * BATCH_SIZE), 0);
    assert!(e.stderr / e.p_emp <= 0.05);
}

#[test]
fn sweep_covers_the_grid_and_reports_bad_cells() {
    let cfg = MonteCarloConfig::new(2_000, 4);
    let out = sweep(
        &[CodeFamily::Repetition(3), CodeFamily::UnbiasedGkpRepetition(1)],
        &[Scheme::I, Scheme::III],
        &[0.2, 0.3],
        &cfg,
        |s| s,
    );
    assert_eq!(out.len(), 8);
    assert!(out[..4].iter().all(Result::is_ok));
    assert!(out[4].is_err() && out[5].is_err());
    assert!(out[6].is_ok() && out[7].is_ok());
    let first = out[0].as_ref().unwrap();
    assert_eq!((first.code.as_str(), first.scheme, first.sigma), ("rep3", Scheme::I, 0.2));
}

#[test]
fn layer_one_tallies_are_populated() {
    let d = Decoder::new(&build(CodeFamily::Repetition(3), Scheme::III)).unwrap();
    let t = tally(&d, 0.05, &MonteCarloConfig::new(100_000, 1)).unwrap();
    assert_eq!(t.samples, 100_000);
    let s2 = 0.05f64 * 0.05;
    assert!((t.variance(0) / (s2 / 3.0) - 1.0).abs() < 0.03);
    assert!((t.variance(1) / s2 - 1.0).abs() < 0.03);
}

#[test]
fn csv_schema() {
    let e = estimate(&build(CodeFamily::Repetition(3), Scheme::I), 0.3, 1000, 7).unwrap();
    let row = e.csv_row();
    assert_eq!(row.split(',').count(), ErrorRateEstimate::CSV_HEADER.split(',').count());
    assert!(row.starts_with("rep3,I,0.300000,1000,"));
    assert!(row.ends_with(",7,montecarlo"));
}
