use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_surface-mcmc"));
    c.env_remove("SURFMC_WORKERS");
    c
}

fn run(c: &mut Command) -> Output {
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: [&str; 9] = ["campaign", "--distances", "3,4", "--p", "0.08", "--trials", "150", "--seed", "21"];

#[test]
fn campaign_prints_csv_and_exits_zero() {
    let o = run(bin().args(SMALL));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,p,model,algorithm,trials,failures,rate,ci_low,ci_high,seed"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn output_is_identical_for_any_worker_count() {
    let one = run(bin().args(SMALL).args(["--workers", "1"]));
    let four = run(bin().args(SMALL).env("SURFMC_WORKERS", "4").args(["--batch-size", "7"]));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "distances = [3]\np = [0.05]\ntarget_logical_errors = 3\nseed = 5\nalgorithms = [\"standard_mwpm\"]\n",
    )
    .unwrap();
    let from_file = run(bin().args(["campaign", "--config"]).arg(&cfg));
    assert_eq!(from_file.status.code(), Some(0));
    let row = stdout(&from_file).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("3,0.05,depolarizing,standard_mwpm,"), "{row}");
    assert!(row.ends_with(",5"), "{row}");
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[5], "3");

    let o = run(bin().args(["campaign", "--config"]).arg(&cfg).args(["--seed", "6", "--trials", "40"]));
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[4], "40");
    assert_eq!(fields[9], "6");
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "distances = [3]\nunknown_key = 1\n").unwrap();
    let missing = dir.path().join("missing.toml");
    let cases = [
        format!("campaign --config {}", bad.display()),
        "campaign --distances 3 --p 0.1 --trials 5".to_string(),
        "campaign --distances 3 --p 0.9 --trials 5 --seed 1".to_string(),
        "campaign --model nonsense".to_string(),
        "campaign --algorithms parallel_tempering".to_string(),
        format!("campaign --config {}", missing.display()),
        "fatal-patterns --distances 4".to_string(),
        "no-such-command".to_string(),
    ];
    for args in cases {
        let o = run(bin().args(args.split_whitespace()));
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run(bin().args(SMALL).env("SURFMC_WORKERS", "zero"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = run(bin().arg("--help"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("campaign"));
}

#[test]
fn campaign_writes_output_plots_and_trial_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rates.csv");
    let plots = dir.path().join("plots");
    let log = dir.path().join("trials.csv");
    let o = run(bin().args(SMALL).arg("--output").arg(&out).arg("--plot-dir").arg(&plots).arg("--trial-log").arg(&log));
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let same = run(bin().args(SMALL));
    assert_eq!(std::fs::read(&out).unwrap(), same.stdout);
    let rate = plots.join("rate_single_temperature_depolarizing_L3.dat");
    assert!(Path::new(&rate).exists());
    let content = std::fs::read_to_string(rate).unwrap();
    assert_eq!(content.lines().filter(|l| !l.starts_with('#')).count(), 1);
    let trials = std::fs::read_to_string(log).unwrap();
    // header plus one line per trial and algorithm at each of two points
    assert_eq!(trials.lines().count(), 1 + 2 * 150 * 3);
}

#[test]
fn fatal_patterns_pass() {
    let o = run(bin().args(["fatal-patterns", "--distances", "3,5"]));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}

#[test]
fn oracle_check_reports_both_verdicts() {
    let o = run(bin().args(["oracle-check", "--syndromes", "40", "--n-sample-factor", "2", "--seed", "4"]));
    let text = stdout(&o);
    assert!(text.contains("minimality PASS"), "{text}");
    let passed = text.contains("agreement  PASS");
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 2 }));
}

#[test]
fn scaling_probe_with_one_distance_has_no_fit() {
    let o = run(bin().args([
        "scaling-probe",
        "--distances",
        "3",
        "--p",
        "0.1",
        "--trials",
        "60",
        "--seed",
        "2",
        "--max-n-sample",
        "64",
    ]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("L,n_sample,"));
    assert!(text.contains("# no fit"));
    let o = run(bin().args(["scaling-probe", "--distances", "3", "--p", "0.1,0.2", "--trials", "6", "--seed", "2"]));
    assert_eq!(o.status.code(), Some(1));
}
