//! One check per acceptance criterion. Each returns a short detail line on
//! success and the reason on failure; the integration tests and the
//! acceptance runner share them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use metacc::backends::mock;
use metacc::backends::SystemRunner;
use metacc::driver::stats::geomean_speedup;
use metacc::driver::{render_selection_report, Action, RunConfig, Summary};
use metacc::extractor::Variant;
use metacc::mlopt::{
    label_and_relabel, normalize_pki, parse_model, render_model, targets_for_mode, train, ForestModel, ForestParams,
    MlError, Node, Schema, Tree,
};
use metacc::profiler::{
    median_ns, parse_counter_csv, render_counter_csv, run_profiled, CounterSet, TimingRecord, TimingTable,
};
use metacc::synthesizer::{
    parse_manifest, render_manifest, select_by_prediction, select_by_profile, Choice, ManifestEntry, Reason,
    SelectionPlan,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use sha2::{Digest, Sha256};

use super::corpus::{check_program, corpus_files, expectations, extract, system_cc, Variant as RebuildVariant};
use super::fixtures::*;

pub type Outcome = Result<String, String>;

pub const CORPUS_MIN_PROGRAMS: usize = 20;
pub const CORPUS_BUDGET: Duration = Duration::from_secs(120);
pub const SEARCH_BUDGET: Duration = Duration::from_secs(10);
pub const FOREST_BUDGET: Duration = Duration::from_secs(30);
pub const PROPERTY_CASES: u32 = 1000;
pub const MIN_ACCURACY: f64 = 0.90;
pub const GEOMEAN_EXPECTED: f64 = 1.5319;
pub const GEOMEAN_TOLERANCE: f64 = 0.001;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Sort-and-index reference median (lower middle for even counts).
pub fn oracle_median(samples: &[u64]) -> u64 {
    let mut v = samples.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

// ---------------------------------------------------------------- corpus

pub fn extraction_equivalence() -> Outcome {
    let cc = system_cc().ok_or("no system C compiler on PATH")?;
    let files = corpus_files();
    ensure(files.len() >= CORPUS_MIN_PROGRAMS, || format!("corpus has {} programs", files.len()))?;
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut loops = 0;
    for path in &files {
        loops += check_program(&cc, path, work.path(), RebuildVariant::Clean)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let took = start.elapsed();
    ensure(took < CORPUS_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{} programs, {loops} loops extracted, identical stdout with {cc} in {took:.1?}", files.len()))
}

pub fn eligibility() -> Outcome {
    let cc = system_cc();
    let expected = expectations();
    let mut seen = BTreeSet::new();
    let mut mismatches = Vec::new();
    for path in corpus_files() {
        for n in &extract(cc.as_deref(), &path).nests {
            let got = if n.eligible { "eligible".to_string() } else { n.reason_tags().join(",") };
            seen.insert(n.loop_id.to_string());
            if expected.get(n.loop_id.as_str()) != Some(&got) {
                mismatches.push(format!("{}: expected {:?}, got {got}", n.loop_id, expected.get(n.loop_id.as_str())));
            }
        }
    }
    mismatches.extend(expected.keys().filter(|id| !seen.contains(*id)).map(|id| format!("{id}: not found")));
    ensure(mismatches.is_empty(), || mismatches.join("; "))?;
    let skipped = expected.values().filter(|v| *v != "eligible").count();
    Ok(format!("{}/{} nests agree ({skipped} ineligible)", seen.len(), expected.len()))
}

// -------------------------------------------------------------- registry

pub fn table1_rows() -> (Vec<String>, Vec<String>) {
    use metacc::backends::{default_registry, BackendSpec};
    fn row(s: &BackendSpec) -> String {
        let or_dash = |v: &[String]| if v.is_empty() { "-".to_string() } else { v.join(" ") };
        [
            s.name.clone(),
            s.kind.as_str().to_string(),
            s.flags_serial.join(" "),
            or_dash(&s.flags_parallel),
            s.downstream.clone().unwrap_or_else(|| "-".into()),
            if s.is_default { "yes" } else { "no" }.to_string(),
        ]
        .join("\t")
    }
    let expected = fs::read_to_string(fixture("table1.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    (expected, default_registry().iter().map(row).collect())
}

pub fn table1() -> Outcome {
    let (expected, actual) = table1_rows();
    ensure(expected == actual, || format!("expected {expected:?}, got {actual:?}"))?;
    Ok(format!("{} rows token-identical", actual.len()))
}

// ------------------------------------------------------- mock end-to-end

/// Per-backend, per-loop run profiles declared in a mock backend config.
pub fn config_profiles(config: &str) -> BTreeMap<String, BTreeMap<String, Vec<u64>>> {
    let mut out: BTreeMap<String, BTreeMap<String, Vec<u64>>> = BTreeMap::new();
    for line in config.lines() {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 || f[0] != "attr" || f[2] != "profile" {
            continue;
        }
        for entry in f[3].split(';') {
            let (id, runs) = entry.split_once('=').unwrap();
            let totals = runs.split('/').map(|r| r.split('+').map(|x| x.parse::<u64>().unwrap()).sum()).collect();
            out.entry(f[1].to_string()).or_default().insert(id.to_string(), totals);
        }
    }
    out
}

pub fn run_mock(
    dir: &Path,
    sources: &[&str],
    config: &str,
    output: &str,
    tweak: impl FnOnce(&mut RunConfig),
) -> Result<Summary, String> {
    let staged = stage(dir, sources);
    let mut cfg = RunConfig::new(staged, Some(dir.join(output)));
    cfg.backend_config = Some(super::fixtures::config(config, dir));
    tweak(&mut cfg);
    metacc::driver::run(&cfg, Arc::new(SystemRunner)).map_err(|e| e.to_string())
}

pub struct SearchResult {
    pub summary: Summary,
    pub oracle_choices: BTreeMap<String, String>,
    pub sum_of_minima: u64,
    pub single_totals: BTreeMap<String, u64>,
    pub composed_total: u64,
    pub report: String,
    pub elapsed: Duration,
}

pub fn mock_search(dir: &Path) -> Result<SearchResult, String> {
    let start = Instant::now();
    let summary = run_mock(dir, &["app.c"], "search.cfg", "app", |_| {})?;
    let elapsed = start.elapsed();
    let plan = summary.plan.clone().ok_or("no selection plan")?;

    // Oracle from the declared profiles.
    let profiles = config_profiles(&fs::read_to_string(fixture("search.cfg")).unwrap());
    let default = "alpha";
    let loops: BTreeSet<&String> = profiles.values().flat_map(|m| m.keys()).collect();
    let mut oracle_choices = BTreeMap::new();
    let mut sum_of_minima = 0;
    let mut single_totals: BTreeMap<String, u64> = BTreeMap::new();
    for id in &loops {
        let medians: BTreeMap<&String, u64> = profiles.iter().map(|(b, m)| (b, oracle_median(&m[*id]))).collect();
        let best = *medians.values().min().unwrap();
        let winner = if medians[&default.to_string()] == best {
            default.to_string()
        } else {
            medians.iter().find(|(_, &m)| m == best).unwrap().0.to_string()
        };
        oracle_choices.insert(id.to_string(), winner);
        sum_of_minima += best;
        for (b, m) in medians {
            *single_totals.entry(b.clone()).or_default() += m;
        }
    }
    let chosen: BTreeMap<String, String> = plan.choices.iter().map(|(k, c)| (k.clone(), c.backend.clone())).collect();
    ensure(chosen == oracle_choices, || format!("plan {chosen:?} differs from oracle {oracle_choices:?}"))?;

    // The composed executable links each loop's chosen object.
    let exe = dir.join("app");
    let objects = mock::read_executable(&exe).ok_or("composed output is not a mock executable")?;
    for o in &objects {
        if let Some((id, v)) = o.loop_unit() {
            ensure(v == Variant::Clean && chosen.get(id) == Some(&o.backend), || {
                format!("composed executable holds {id} from {} ({v})", o.backend)
            })?;
        }
    }

    // Time a twin of the composed executable built from the chosen timed objects.
    let build = dir.join("app.mcbuild");
    let mut parts: Vec<PathBuf> = vec![build.join("obj/app.base.o")];
    for (id, b) in &chosen {
        parts.push(build.join(format!("obj/{id}.{b}.timed.o")));
    }
    let refs: Vec<&Path> = parts.iter().map(PathBuf::as_path).collect();
    let twin = dir.join("composed.timed");
    mock::link(&refs, &twin)?;
    let runs = run_profiled(&SystemRunner, &twin, &[], 3, dir).map_err(|e| e.to_string())?;
    let mut table = TimingTable::new(3);
    table.merge("composed", &runs);
    let composed_total = chosen.keys().map(|id| table.median(id, "composed").unwrap_or(0)).sum();

    let report = fs::read_to_string(dir.join("app.selection.csv")).map_err(|e| e.to_string())?;
    Ok(SearchResult { summary, oracle_choices, sum_of_minima, single_totals, composed_total, report, elapsed })
}

pub fn mock_optimality() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let r = mock_search(dir.path())?;
    ensure(r.oracle_choices.len() == 5, || format!("{} loops", r.oracle_choices.len()))?;
    ensure(r.single_totals.len() == 3, || format!("{} backends", r.single_totals.len()))?;
    let distinct: BTreeSet<&String> = r.oracle_choices.values().collect();
    ensure(distinct.len() > 1, || "argmins do not differ".into())?;
    ensure(r.composed_total == r.sum_of_minima, || {
        format!("composed {} != sum of minima {}", r.composed_total, r.sum_of_minima)
    })?;
    for (b, t) in &r.single_totals {
        ensure(r.composed_total < *t, || format!("composed {} not below {b} total {t}", r.composed_total))?;
    }
    if let Some(d) = golden_mismatch("search.selection.csv", &r.report) {
        return Err(format!("selection report: {d}"));
    }
    ensure(r.elapsed < SEARCH_BUDGET, || format!("took {:?}", r.elapsed))?;
    Ok(format!(
        "composed {} ns = sum of minima; single backends {:?}; report matches golden; {:.1?}",
        r.composed_total, r.single_totals, r.elapsed
    ))
}

// ---------------------------------------------------- median + fallback

pub fn median_and_fallback() -> Outcome {
    let mut r = runner(PROPERTY_CASES);
    r.run(&prop::collection::vec(any::<u64>(), 1..10), |v| {
        prop_assert_eq!(median_ns(&v).unwrap(), oracle_median(&v));
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let mut t = TimingTable::new(3);
    for ns in [900, 1000, 1100] {
        t.push("L0", "gcc", ns);
    }
    let loops = vec!["L0".to_string(), "L1".to_string()];
    let plan = select_by_profile(&t, &loops, "icc");
    let expected = Choice { backend: "icc".into(), reason: Reason::DefaultFallback };
    ensure(plan.choices["L1"] == expected, || format!("unexecuted loop got {:?}", plan.choices["L1"]))?;
    ensure(plan.choices["L0"] == Choice { backend: "gcc".into(), reason: Reason::Profiled }, || {
        format!("executed loop got {:?}", plan.choices["L0"])
    })?;
    Ok(format!("{PROPERTY_CASES} cases agree with sort-and-index; unexecuted loop -> icc default_fallback"))
}

// ------------------------------------------------------------------ PKI

pub fn pki_invariance() -> Outcome {
    let schema = Schema::new(&["e0", "e1", "e2", "e3"]);
    let strategy = (prop::collection::vec(0u64..1_000_000_000, 4), 1u64..1_000_000_000, 1u64..100_000);
    runner(PROPERTY_CASES)
        .run(&strategy, |(counts, instructions, k)| {
            let set = |scale: u64| CounterSet {
                loop_id: "L".into(),
                counters: counts.iter().enumerate().map(|(i, c)| (format!("e{i}"), c * scale)).collect(),
                instructions: instructions * scale,
            };
            let a = normalize_pki(&set(1), &schema).unwrap();
            let b = normalize_pki(&set(k), &schema).unwrap();
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a.values), bits(&b.values));
            prop_assert_eq!(a.schema_hash, b.schema_hash);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{PROPERTY_CASES} random scalings, bit-identical feature vectors"))
}

// ---------------------------------------------------------------- forest

pub fn accuracy(model: &ForestModel, instances: &[metacc::mlopt::TrainingInstance]) -> f64 {
    let hits = instances.iter().filter(|i| model.classes[model.vote(&i.features)] == i.label).count();
    hits as f64 / instances.len() as f64
}

/// Violations of the depth and leaf-size limits, checked by routing each
/// tree's bootstrap draws to its leaves.
pub fn structural_violations(model: &ForestModel, train_rows: &[metacc::mlopt::TrainingInstance]) -> Vec<String> {
    let p = &model.params;
    let Some(trace) = &model.trace else { return vec!["model has no bootstrap trace".into()] };
    let mut out = Vec::new();
    for (k, (t, draws)) in model.trees.iter().zip(&trace.bootstrap).enumerate() {
        if t.depth() > p.max_depth {
            out.push(format!("tree {k}: depth {}", t.depth()));
        }
        let mut per_leaf = vec![0usize; t.nodes.len()];
        for &r in draws {
            per_leaf[t.leaf_of(&train_rows[r].features)] += 1;
        }
        for (i, n) in t.nodes.iter().enumerate() {
            if matches!(n, Node::Leaf { .. }) && per_leaf[i] < p.min_samples_leaf {
                out.push(format!("tree {k}: leaf {i} holds {}", per_leaf[i]));
            }
        }
    }
    out
}

pub fn forest_quality() -> Outcome {
    let allowed = targets_for_mode("serial").unwrap();
    let train_ds = synthetic_train();
    let test_ds = synthetic_test();
    ensure(train_ds.rows.len() == TRAIN_ROWS && test_ds.rows.len() == TEST_ROWS, || "unexpected dataset sizes".into())?;
    let train_rows = train_ds.instances(&allowed).map_err(|e| e.to_string())?;
    let test_rows = test_ds.instances(&allowed).map_err(|e| e.to_string())?;
    let params = ForestParams { seed: 11, ..ForestParams::default() };
    let start = Instant::now();
    let model = train("serial", &train_ds.schema, &train_rows, &params).map_err(|e| e.to_string())?;
    let again = train("serial", &train_ds.schema, &train_rows, &params).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let held_out = accuracy(&model, &test_rows);
    ensure(model.oob_accuracy >= MIN_ACCURACY, || format!("oob accuracy {}", model.oob_accuracy))?;
    ensure(held_out >= MIN_ACCURACY, || format!("held-out accuracy {held_out}"))?;
    ensure(render_model(&model) == render_model(&again), || "retraining changed the model file".into())?;
    let violations = structural_violations(&model, &train_rows);
    ensure(violations.is_empty(), || violations.join("; "))?;
    ensure(took < FOREST_BUDGET, || format!("took {took:?}"))?;
    let depth = model.trees.iter().map(Tree::depth).max().unwrap_or(0);
    Ok(format!(
        "oob {:.3}, held-out {held_out:.3}, byte-identical retrain, max depth {depth}, leaves >= {}; {took:.1?}",
        model.oob_accuracy, params.min_samples_leaf
    ))
}

// --------------------------------------------------------------- relabel

fn permutations(items: &[u64]) -> Vec<Vec<u64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

pub fn relabel_exhaustive() -> Outcome {
    let backends = ["clang", "icc", "pgcc", "polly"];
    let allowed = targets_for_mode("serial").unwrap();
    let perms = permutations(&[100, 200, 300, 400]);
    let mut cases = 0;
    for a in &perms {
        for b in &perms {
            for c in &perms {
                let rows: Vec<(String, Vec<f64>, BTreeMap<String, u64>)> = [a, b, c]
                    .iter()
                    .enumerate()
                    .map(|(i, times)| {
                        let t = backends.iter().zip(times.iter()).map(|(k, v)| (k.to_string(), *v)).collect();
                        (format!("L{i}"), vec![0.0], t)
                    })
                    .collect();
                let labeled = label_and_relabel(&rows, &allowed).map_err(|e| e.to_string())?;
                for (row, inst) in rows.iter().zip(&labeled) {
                    let mut best: Option<(&String, u64)> = None;
                    for (name, &t) in &row.2 {
                        if allowed.contains(name) && best.is_none_or(|(_, bt)| t < bt) {
                            best = Some((name, t));
                        }
                    }
                    let want = best.unwrap().0;
                    ensure(&inst.label == want, || format!("{:?}: label {} but oracle {want}", row.2, inst.label))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} timing assignments x 3 loops match brute-force restricted argmin"))
}

// ------------------------------------------------------------ prediction

pub fn prediction_plumbing() -> Outcome {
    let model = parse_model(&fs::read_to_string(fixture("model.mcm")).unwrap()).map_err(|e| e.to_string())?;
    let sets = parse_counter_csv(&fs::read_to_string(fixture("counters.csv")).unwrap()).map_err(|e| e.to_string())?;
    let fvs: Vec<_> =
        sets.iter().map(|s| normalize_pki(s, &model.schema)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let loops: Vec<String> = (0..3).map(|i| format!("pred_main_L{i}")).collect();
    let plan = select_by_prediction(&model, &fvs, &loops, "icc").map_err(|e| e.to_string())?;
    let counts = |p: &SelectionPlan| (p.count(Reason::Predicted), p.count(Reason::DefaultFallback));
    ensure(counts(&plan) == (2, 1), || format!("library path gave {:?}", plan.choices))?;
    ensure(plan.choices["pred_main_L1"] == Choice { backend: "icc".into(), reason: Reason::DefaultFallback }, || {
        format!("missing loop got {:?}", plan.choices["pred_main_L1"])
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let summary = run_mock(dir.path(), &["pred.c"], "predict.cfg", "pred", |c| {
        c.action = Action::Predict;
        c.model_path = Some(fixture("model.mcm"));
    })?;
    let e2e = summary.plan.ok_or("no plan")?;
    ensure(e2e == plan, || format!("end-to-end plan {:?} differs from {:?}", e2e.choices, plan.choices))?;
    let exe = dir.path().join("pred");
    let objects = mock::read_executable(&exe).ok_or("no linked mock executable")?;
    let linked: BTreeMap<&str, &str> =
        objects.iter().filter_map(|o| o.loop_unit().map(|(id, _)| (id, o.backend.as_str()))).collect();
    let want: BTreeMap<&str, &str> = plan.choices.iter().map(|(k, c)| (k.as_str(), c.backend.as_str())).collect();
    ensure(linked == want, || format!("executable links {linked:?}"))?;
    Ok(format!(
        "2 predicted + 1 default_fallback ({}); linked {}",
        plan.choices.iter().map(|(k, c)| format!("{k}={}", c.backend)).collect::<Vec<_>>().join(" "),
        exe.file_name().unwrap().to_string_lossy()
    ))
}

// ---------------------------------------------------------------- energy

pub fn energy_csv() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_mock(dir.path(), &["pred.c"], "energy.cfg", "pred", |c| c.action = Action::PowerProfile)?;
    let csv = fs::read_to_string(dir.path().join("pred.energy.csv")).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    ensure(rows.len() == 18, || format!("{} rows", rows.len()))?;
    for row in &rows {
        let f: Vec<&str> = row.split(',').collect();
        let v: Vec<f64> = f[2..].iter().map(|x| x.parse().unwrap()).collect();
        let (pkg, dram, elapsed, power) = (v[0], v[1], v[2], v[3]);
        ensure(elapsed > 0.0 && (pkg + dram) / elapsed == power, || format!("power identity fails: {row}"))?;
    }
    if let Some(d) = golden_mismatch("energy.csv", &csv) {
        return Err(format!("energy csv: {d}"));
    }
    Ok("18 rows byte-identical to golden; power identity exact on every row".into())
}

// ----------------------------------------------------------- wire formats

fn tiny_model() -> ForestModel {
    ForestModel {
        mode: "serial".into(),
        schema: Schema::new(&["l2_miss", "loads"]),
        classes: vec!["icc".into(), "polly".into()],
        params: ForestParams { n_trees: 1, ..ForestParams::default() },
        trees: vec![Tree {
            nodes: vec![
                Node::Split { feature: 1, threshold: 2.5, right: 2 },
                Node::Leaf { class: 0 },
                Node::Leaf { class: 1 },
            ],
        }],
        oob_accuracy: 0.75,
        trace: None,
    }
}

pub fn wire_formats() -> Outcome {
    let mut checked = Vec::new();

    let rec = TimingRecord { loop_id: "app_main_L0".into(), elapsed_ns: 1234 };
    ensure(rec.render() == "MC\tapp_main_L0\t1234\n", || format!("timing record {:?}", rec.render()))?;
    ensure(TimingRecord::parse("MC\tapp_main_L0\t1234") == Some(rec), || "timing record parse".into())?;
    ensure(TimingRecord::parse("MC\tapp_main_L0\t-5").is_none(), || "negative record accepted".into())?;
    checked.push("timing");

    let sets =
        parse_counter_csv(&fs::read_to_string(fixture("counters_full.csv")).unwrap()).map_err(|e| e.to_string())?;
    ensure(sets.len() == 3 && sets.iter().all(|s| s.counters.len() == 12), || "counter fixture shape".into())?;
    let canonical = render_counter_csv(&sets);
    ensure(parse_counter_csv(&canonical).map_err(|e| e.to_string())? == sets, || "counter csv round trip".into())?;
    if let Some(d) = golden_mismatch("counters.canonical.csv", &canonical) {
        return Err(format!("counter csv: {d}"));
    }
    checked.push("counters");

    let entries = vec![
        ManifestEntry {
            loop_id: "app_main_L1".into(),
            backend: "gcc".into(),
            object_path: "/b/L1.gcc.o".into(),
            variant: Variant::Timed,
        },
        ManifestEntry {
            loop_id: "app_main_L0".into(),
            backend: "icc".into(),
            object_path: "/b/L0.icc.o".into(),
            variant: Variant::Clean,
        },
    ];
    let manifest = render_manifest(&entries);
    let want = "app_main_L0\ticc\t/b/L0.icc.o\tclean\napp_main_L1\tgcc\t/b/L1.gcc.o\ttimed\n";
    ensure(manifest == want, || format!("manifest {manifest:?}"))?;
    ensure(parse_manifest(&manifest).map_err(|e| e.to_string())?.len() == 2, || "manifest parse".into())?;
    checked.push("manifest");

    let body = "MCMODEL 1\nmode serial\nschema l2_miss loads\nclasses icc polly\n\
                params n_trees=1 max_depth=25 min_samples_leaf=5 feature_subset_size=20 max_categories=15 seed=0\n\
                oob 0.75\nN 1 2.5\nL 0\nL 1\n";
    let sum: String = Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let want = format!("{body}checksum {sum}\n");
    let text = render_model(&tiny_model());
    ensure(text == want, || format!("model text {text:?}"))?;
    ensure(parse_model(&text).map_err(|e| e.to_string())? == tiny_model(), || "model round trip".into())?;
    let fixture_model = fs::read_to_string(fixture("model.mcm")).unwrap();
    for doc in [&text, &fixture_model] {
        for cut in 0..doc.len() {
            match parse_model(&doc[..cut]) {
                Err(MlError::CorruptModel(_)) => {}
                other => return Err(format!("truncation at {cut}: {other:?}")),
            }
        }
    }
    checked.push("model (+ truncation at every offset)");

    let mut table = TimingTable::new(1);
    table.push("app_main_L0", "gcc", 90);
    table.push("app_main_L0", "icc", 120);
    let plan = select_by_profile(&table, &["app_main_L0".into(), "app_main_L1".into()], "icc");
    let report = render_selection_report(&plan, Some(&table));
    let want = "loop_id,chosen_backend,reason,median_ns_gcc,median_ns_icc\n\
                app_main_L0,gcc,profiled,90,120\n\
                app_main_L1,icc,default_fallback,,\n";
    ensure(report == want, || format!("selection report {report:?}"))?;
    checked.push("selection");

    Ok(format!("byte-exact: {}", checked.join(", ")))
}

// --------------------------------------------------------------- geomean

pub fn geomean() -> Outcome {
    let apps =
        |v: &[f64]| -> BTreeMap<String, f64> { v.iter().enumerate().map(|(i, x)| (format!("app{i}"), *x)).collect() };
    let ones = |n: usize| apps(&vec![1.0; n]);
    let a = geomean_speedup(&apps(&[2.0, 0.5]), &ones(2)).map_err(|e| e.to_string())?;
    ensure(a == 1.0, || format!("{{2.0, 0.5}} -> {a}"))?;
    let b = geomean_speedup(&apps(&[1.2, 3.0, 1.0]), &ones(3)).map_err(|e| e.to_string())?;
    ensure((b - GEOMEAN_EXPECTED).abs() <= GEOMEAN_TOLERANCE, || format!("{{1.2, 3.0, 1.0}} -> {b}"))?;
    Ok(format!("{{2.0, 0.5}} -> {a}; {{1.2, 3.0, 1.0}} -> {b:.4}"))
}
