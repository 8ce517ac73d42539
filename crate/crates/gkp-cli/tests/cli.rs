use std::path::PathBuf;
use std::process::{Command, Output};

fn gkpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkpsim"))
        .args(args)
        .env_remove("GKPSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV lines without the metadata comment.
fn data(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(str::to_owned).collect()
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn run_grid_has_one_row_per_cell() {
    let o = gkpsim(&["run", "--code", "rep3", "--scheme", "I,II,III", "--sigma", "0.10:0.30:0.025", "--samples", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data(&o);
    assert_eq!(rows[0], "code,scheme,sigma,samples,p_emp,stderr,seed,method");
    assert_eq!(rows.len(), 1 + 27);
    assert!(rows[1].starts_with("rep3,I,0.100000,2000,"));
    assert!(rows[27].starts_with("rep3,III,0.300000,2000,"));
    assert!(stdout(&o).starts_with("# gkpsim "));
}

#[test]
fn rerun_is_byte_identical_across_thread_counts() {
    let args = ["run", "--code", "513,steane", "--scheme", "III", "--sigma", "0.25,0.3", "--samples", "70000", "--seed", "9"];
    let a = gkpsim(&args);
    let mut with_threads = vec!["--threads", "4"];
    with_threads.extend_from_slice(&args);
    let b = gkpsim(&with_threads);
    assert!(a.status.success() && b.status.success());
    assert_eq!(data(&a), data(&b));
}

#[test]
fn flags_override_config_file() {
    let path = scratch("precedence.cfg");
    std::fs::write(&path, "# sweep\ncode = rep3\nscheme = II\nsigma = 0.2\nsamples = 500\nseed = 3\n").unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = data(&gkpsim(&["run", "--config", cfg]));
    assert_eq!(from_file.len(), 2);
    assert!(from_file[1].starts_with("rep3,II,0.200000,500,"));
    assert!(from_file[1].ends_with(",3,montecarlo"));

    let overridden = data(&gkpsim(&["run", "--config", cfg, "--samples", "700", "--scheme", "I"]));
    assert!(overridden[1].starts_with("rep3,I,0.200000,700,"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let path = scratch("typo.cfg");
    std::fs::write(&path, "code = rep3\nsigmas = 0.2\n").unwrap();
    let o = gkpsim(&["run", "--config", path.to_str().unwrap(), "--scheme", "I", "--sigma", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_file() {
    let path = scratch("out.csv");
    let o = gkpsim(&["run", "--code", "rep3", "--scheme", "I", "--sigma", "0.2", "--samples", "100", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn analytic_subcommand() {
    let o = gkpsim(&["analytic", "--code", "rep3", "--scheme", "I,II,III", "--sigma", "0.2"]);
    assert!(o.status.success());
    let rows = data(&o);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().skip(1).all(|r| r.ends_with(",analytic")));
    assert!(rows[1].starts_with("rep3,I,0.200000,0,0.0000281"));

    let unsupported = gkpsim(&["analytic", "--code", "513", "--scheme", "I", "--sigma", "0.2"]);
    assert_eq!(unsupported.status.code(), Some(1));
}

#[test]
fn squeeze_baseline_ratio_is_one() {
    let o = gkpsim(&["squeeze", "--code", "rep3", "--scheme", "III", "--alpha", "0.5,1,2", "--sigma", "0.3", "--samples", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data(&o);
    assert_eq!(rows[0], "code,scheme,sigma,alpha,samples,p_emp,stderr,ratio,seed");
    assert_eq!(rows.len(), 4);
    let baseline: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(baseline[3], "1.00000");
    assert_eq!(baseline[7], "1.00000");
}

#[test]
fn qudit_sweep_reports_no_failures() {
    let o = gkpsim(&["qudit", "--sweep"]);
    assert!(o.status.success());
    assert_eq!(data(&o), vec!["d,r,cases,recovered,z_leaks,x_syndrome_mismatches", "16,4,2304,2304,0,0"]);
}

#[test]
fn invalid_inputs_exit_nonzero() {
    assert_eq!(gkpsim(&["run", "--code", "rep4x", "--scheme", "I", "--sigma", "0.2"]).status.code(), Some(2));
    assert_eq!(gkpsim(&["run", "--code", "rep3", "--scheme", "IV", "--sigma", "0.2"]).status.code(), Some(2));
    assert_eq!(gkpsim(&["run", "--code", "rep3", "--scheme", "I", "--sigma", "-0.1"]).status.code(), Some(2));
    assert_eq!(gkpsim(&["qudit", "--d", "16", "--r", "3"]).status.code(), Some(2));
    // An invalid combination fails its own cells and keeps the rest.
    let o = gkpsim(&["run", "--code", "rep3,unbiased-gkp-rep:1", "--scheme", "I", "--sigma", "0.2", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(data(&o).len(), 2);
}

#[test]
fn report_lists_blocks() {
    let o = gkpsim(&["report", "--code", "rep3", "--scheme", "III"]);
    assert!(o.status.success());
    assert!(!stdout(&o).is_empty());
}
