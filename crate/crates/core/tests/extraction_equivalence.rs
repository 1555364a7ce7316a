mod support;

use std::fs;

use support::corpus::{check_program, corpus_files, expectations, extract, system_cc, Variant};

fn run_all(variant: Variant) {
    let Some(cc) = system_cc() else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    let work = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    for path in corpus_files() {
        if let Err(e) = check_program(&cc, &path, work.path(), variant) {
            failures.push(format!("{}: {e}", path.display()));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn corpus_has_twenty_programs() {
    assert!(corpus_files().len() >= 20);
}

#[test]
fn clean_rebuild_matches_original_output() {
    run_all(Variant::Clean);
}

#[test]
fn timed_rebuild_matches_original_output() {
    run_all(Variant::Timed);
}

#[test]
fn energized_rebuild_without_macro_matches_original_output() {
    run_all(Variant::Energized);
}

#[test]
fn eligibility_matches_annotations() {
    let cc = system_cc();
    let expected = expectations();
    let mut seen = Vec::new();
    let mut mismatches = Vec::new();
    for path in corpus_files() {
        let art = extract(cc.as_deref(), &path);
        for n in &art.nests {
            let got = if n.eligible { "eligible".to_string() } else { n.reason_tags().join(",") };
            seen.push(n.loop_id.to_string());
            match expected.get(n.loop_id.as_str()) {
                Some(e) if *e == got => {}
                e => mismatches.push(format!("{}: expected {e:?}, got {got}", n.loop_id)),
            }
        }
    }
    for id in expected.keys() {
        if !seen.contains(id) {
            mismatches.push(format!("{id}: annotated but not found"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn timing_records_for_executed_loops() {
    let Some(cc) = system_cc() else { return };
    let work = tempfile::tempdir().unwrap();
    let path = support::corpus::corpus_dir().join("stencil2d.c");
    check_program(&cc, &path, work.path(), Variant::Timed).unwrap();
    let text = fs::read_to_string(work.path().join("stencil2d-Timed/profile.txt")).unwrap();
    let ids: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(ids, ["stencil2d_main_L0", "stencil2d_main_L1", "stencil2d_main_L2"]);
    for l in text.lines() {
        let f: Vec<&str> = l.split('\t').collect();
        assert_eq!(f[0], "MC");
        f[2].parse::<u64>().unwrap();
    }
}
