//! Whole-driver runs against mock backends and the bundled fake tools.

mod support;

use std::fs;
use std::process::Command;

use metacc::backends::mock;
use metacc::driver::Action;
use metacc::synthesizer::{parse_manifest, Reason};
use support::checks::{self, mock_search, run_mock};
use support::fixtures::{config, fixture, stage};

#[test]
fn profile_search_composes_the_per_loop_minima() {
    checks::mock_optimality().unwrap();
}

#[test]
fn profile_search_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = mock_search(a.path()).unwrap();
    let rb = mock_search(b.path()).unwrap();
    assert_eq!(ra.summary.plan, rb.summary.plan);
    assert_eq!(ra.report, rb.report);
    let dump = |d: &std::path::Path| fs::read_to_string(d.join("app.timing.tsv")).unwrap();
    assert_eq!(dump(a.path()), dump(b.path()));
}

#[test]
fn prediction_path_links_two_predicted_and_one_fallback() {
    checks::prediction_plumbing().unwrap();
}

#[test]
fn advanced_profile_only_emits_the_counter_csv() {
    let dir = tempfile::tempdir().unwrap();
    let summary =
        run_mock(dir.path(), &["pred.c"], "predict.cfg", "counters.out", |c| c.action = Action::AdvancedProfile)
            .unwrap();
    assert!(summary.plan.is_none());
    let got = fs::read_to_string(dir.path().join("counters.out")).unwrap();
    assert_eq!(got, fs::read_to_string(fixture("counters.csv")).unwrap());
    assert!(!dir.path().join("counters.out.selection.csv").exists());
}

#[test]
fn prediction_without_provider_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_mock(dir.path(), &["pred.c"], "search.cfg", "pred", |c| {
        c.action = Action::Predict;
        c.model_path = Some(fixture("model.mcm"));
    })
    .unwrap_err();
    assert!(err.contains("counter"), "{err}");
}

#[test]
fn energy_mode_reports_every_backend_and_loop() {
    checks::energy_csv().unwrap();
}

#[test]
fn crashing_backend_is_excluded_from_search() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("search.cfg", dir.path());
    let mut text = fs::read_to_string(&cfg).unwrap();
    text.push_str("attr\tgamma\tcrash\ttrue\n");
    fs::write(&cfg, text).unwrap();
    let src = stage(dir.path(), &["app.c"]);
    let mut rc = metacc::driver::RunConfig::new(src, Some(dir.path().join("app")));
    rc.backend_config = Some(cfg);
    let summary = metacc::driver::run(&rc, std::sync::Arc::new(metacc::backends::SystemRunner)).unwrap();
    let plan = summary.plan.unwrap();
    assert!(plan.choices.values().all(|c| c.backend != "gamma"));
    // gamma's loop goes to the faster of the remaining two
    assert_eq!(plan.choices["app_main_L2"].backend, "alpha");
}

#[test]
fn failed_compile_only_drops_that_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("search.cfg", dir.path());
    let mut text = fs::read_to_string(&cfg).unwrap();
    text.push_str("attr\tbeta\tfail\tapp_main_L1\n");
    fs::write(&cfg, text).unwrap();
    let src = stage(dir.path(), &["app.c"]);
    let mut rc = metacc::driver::RunConfig::new(src, Some(dir.path().join("app")));
    rc.backend_config = Some(cfg);
    let plan = metacc::driver::run(&rc, std::sync::Arc::new(metacc::backends::SystemRunner)).unwrap().plan.unwrap();
    assert_eq!(plan.choices["app_main_L1"].backend, "gamma");
    assert_eq!(plan.choices["app_main_L3"].backend, "beta");
}

#[test]
fn default_compile_failure_leaves_the_loop_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("search.cfg", dir.path());
    let mut text = fs::read_to_string(&cfg).unwrap();
    text.push_str("attr\talpha\tfail\tapp_main_L0\n");
    fs::write(&cfg, text).unwrap();
    let src = stage(dir.path(), &["app.c"]);
    let mut rc = metacc::driver::RunConfig::new(src, Some(dir.path().join("app")));
    rc.backend_config = Some(cfg);
    let summary = metacc::driver::run(&rc, std::sync::Arc::new(metacc::backends::SystemRunner)).unwrap();
    let plan = summary.plan.unwrap();
    assert!(!plan.choices.contains_key("app_main_L0"));
    assert_eq!(plan.choices.len(), 4);
    assert!(summary.skipped.iter().any(|(id, tags)| id == "app_main_L0" && tags == &["default_compile_failed"]));
    let base = fs::read_to_string(dir.path().join("app.mcbuild/src/app.c")).unwrap();
    assert!(!base.contains("mc_loop_app_main_L0"));
}

#[test]
fn compile_then_link_selects_at_link_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("search.cfg", dir.path());
    let src = stage(dir.path(), &["app.c"]);
    let obj = dir.path().join("app.o");
    let mut rc = metacc::driver::RunConfig::new(src, Some(obj.clone()));
    rc.backend_config = Some(cfg.clone());
    rc.compile_only = true;
    let runner = std::sync::Arc::new(metacc::backends::SystemRunner);
    metacc::driver::run(&rc, runner.clone()).unwrap();
    let manifest = parse_manifest(&fs::read_to_string(dir.path().join("app.o.mcmanifest")).unwrap()).unwrap();
    // 5 loops x 3 backends x (clean, timed)
    assert_eq!(manifest.len(), 30);

    let mut link = metacc::driver::RunConfig::new(vec![obj], Some(dir.path().join("linked")));
    link.backend_config = Some(cfg);
    let plan = metacc::driver::run(&link, runner).unwrap().plan.unwrap();
    let direct = mock_search(tempfile::tempdir().unwrap().path()).unwrap().summary.plan.unwrap();
    assert_eq!(plan, direct);
    assert!(plan.choices.values().all(|c| c.reason == Reason::Profiled));
    assert!(mock::is_mock_executable(&dir.path().join("linked")));
}

#[test]
fn training_writes_a_model_per_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.mcm");
    let mut rc = metacc::driver::RunConfig::new(vec![], Some(out.clone()));
    rc.action = Action::Train;
    rc.train_data = Some(fixture("synthetic_train.csv"));
    rc.n_trees = 10;
    let summary = metacc::driver::run(&rc, std::sync::Arc::new(metacc::backends::SystemRunner)).unwrap();
    assert_eq!(summary.models.len(), 2);
    let serial = metacc::mlopt::load_model(&dir.path().join("m.mcm.serial")).unwrap();
    let parallel = metacc::mlopt::load_model(&dir.path().join("m.mcm.parallel")).unwrap();
    assert_eq!((serial.mode.as_str(), parallel.mode.as_str()), ("serial", "parallel"));
    assert!(parallel.classes.iter().all(|c| c == "icc" || c == "polly"));
}

fn mc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mc"))
}

#[test]
fn cli_builds_with_mock_backends() {
    let dir = tempfile::tempdir().unwrap();
    stage(dir.path(), &["app.c"]);
    let cfg = config("search.cfg", dir.path());
    let out = mc()
        .current_dir(dir.path())
        .args(["app.c", "-o", "app", "--runs", "3", "--backend-config"])
        .arg(&cfg)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("app_main_L2\tgamma\tprofiled"), "{stdout}");
    assert!(mock::is_mock_executable(&dir.path().join("app")));
    assert!(dir.path().join("app.selection.csv").exists());
}

#[test]
fn cli_usage_errors_exit_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["a.c", "--parallel", "--openmp"][..], &["a.c", "--predict"], &[]] {
        let out = mc().current_dir(dir.path()).args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn cli_reports_failures_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = mc().current_dir(dir.path()).args(["missing.c", "-o", "x"]).env("RUST_LOG", "off").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("x").exists());
}
