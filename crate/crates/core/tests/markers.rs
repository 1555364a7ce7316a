//! The marker shim brackets every dynamic loop execution with its own
//! START/STOP pair, initializes once and closes once at exit. The oracle is
//! the record sequence of the timed build of the same program.

mod support;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use support::corpus::{corpus_files, extract, runtime_dir, system_cc};

fn build(cc: &str, dir: &Path, sources: &[PathBuf], defines: &[&str], exe: &Path) {
    let out = Command::new(cc)
        .args(["-O1", "-w"])
        .args(defines)
        .arg(format!("-I{}", runtime_dir().display()))
        .args(sources)
        .arg("-o")
        .arg(exe)
        .arg("-lm")
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn write_variant(dir: &Path, stem: &str, base: &str, loops: &[(String, &str)]) -> Vec<PathBuf> {
    fs::create_dir_all(dir).unwrap();
    let mut files = vec![dir.join(format!("{stem}.c"))];
    fs::write(&files[0], base).unwrap();
    for (id, text) in loops {
        let p = dir.join(format!("{id}.c"));
        fs::write(&p, text).unwrap();
        files.push(p);
    }
    files
}

#[test]
fn trace_pairs_follow_dynamic_loop_executions() {
    let Some(cc) = system_cc() else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    let work = tempfile::tempdir().unwrap();
    let mut traced = 0;
    for path in corpus_files() {
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let art = extract(Some(&cc), &path);
        if art.loop_files.is_empty() {
            continue;
        }
        let root = work.path().join(stem);

        let timed: Vec<(String, &str)> =
            art.loop_files.iter().map(|(id, v)| (id.to_string(), v.timed.as_str())).collect();
        let files = write_variant(&root.join("timed"), stem, &art.base_file, &timed);
        let exe = root.join("timed.exe");
        build(&cc, &root, &files, &[], &exe);
        let records = root.join("records.txt");
        assert!(Command::new(&exe).env("MC_PROFILE_OUT", &records).output().unwrap().status.success());
        let executions: Vec<String> = fs::read_to_string(&records)
            .unwrap_or_default()
            .lines()
            .map(|l| l.split('\t').nth(1).unwrap().to_string())
            .collect();

        let energized: Vec<(String, &str)> =
            art.loop_files.iter().map(|(id, v)| (id.to_string(), v.energized.as_str())).collect();
        let files = write_variant(&root.join("energized"), stem, &art.base_file, &energized);
        let exe = root.join("trace.exe");
        build(&cc, &root, &files, &["-DMC_MARKER_TRACE"], &exe);
        let trace = root.join("trace.txt");
        assert!(Command::new(&exe).env("MC_MARKER_TRACE_OUT", &trace).output().unwrap().status.success());
        let got = fs::read_to_string(&trace).unwrap_or_default();

        let lines: Vec<&str> = got.lines().collect();
        if executions.is_empty() {
            assert!(lines.is_empty(), "{stem}: {got}");
            continue;
        }
        assert_eq!((lines.first(), lines.last()), (Some(&"INIT"), Some(&"CLOSE")), "{stem}");
        assert_eq!(lines.iter().filter(|l| **l == "INIT" || **l == "CLOSE").count(), 2, "{stem}");
        // records are written when a loop finishes, so they follow STOP order
        let mut open = Vec::new();
        let mut stops = Vec::new();
        for l in &lines[1..lines.len() - 1] {
            match l.split_once(' ') {
                Some(("START", id)) => open.push(id),
                Some(("STOP", id)) => {
                    assert_eq!(open.pop(), Some(id), "{stem}: unbalanced STOP");
                    stops.push(id.to_string());
                }
                _ => panic!("{stem}: unexpected trace line `{l}`"),
            }
        }
        assert!(open.is_empty(), "{stem}: unclosed regions {open:?}");
        assert_eq!(stops, executions, "{stem}");
        traced += 1;
    }
    assert!(traced >= 20, "only {traced} programs traced");
}
