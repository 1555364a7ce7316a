//! Compile-and-run diff harness over the C corpus.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use metacc::cparse::FileId;
use metacc::driver::preprocess::header_env;
use metacc::extractor::{extract_file, ExtractOptions, GeneratedArtifacts};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_dir() -> PathBuf {
    crate_dir().join("corpus")
}

pub fn runtime_dir() -> PathBuf {
    crate_dir().join("runtime")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "c"))
        .collect();
    v.sort();
    v
}

/// First C compiler on PATH that can build and run a trivial program.
pub fn system_cc() -> Option<String> {
    ["gcc", "cc", "clang"]
        .into_iter()
        .map(String::from)
        .find(|cc| Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
}

/// `loop_id -> "eligible" | "tag,tag"` from the hand-annotated file.
pub fn expectations() -> BTreeMap<String, String> {
    fs::read_to_string(corpus_dir().join("expectations.tsv"))
        .expect("expectations file")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (id, exp) = l.split_once('\t').expect("tab-separated line");
            (id.to_string(), exp.trim().to_string())
        })
        .collect()
}

pub fn extract(cc: Option<&str>, path: &Path) -> GeneratedArtifacts {
    let source = fs::read_to_string(path).unwrap();
    let env = cc.and_then(|cc| header_env(cc, path, &[])).unwrap_or_default();
    let stem = path.file_stem().unwrap().to_str().unwrap();
    let opts = ExtractOptions { header_env: env, ..Default::default() };
    extract_file(&source, FileId(0), stem, &opts).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn compile(cc: &str, args: &[&str], sources: &[PathBuf], out: &Path) -> Result<(), String> {
    let o = Command::new(cc)
        .args(["-O2", "-w"])
        .args(args)
        .args(sources)
        .arg("-o")
        .arg(out)
        .arg("-lm")
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn run(exe: &Path, envs: &[(&str, &Path)]) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(exe);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let o = cmd.output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{} exited with {}", exe.display(), o.status));
    }
    Ok(o.stdout)
}

/// Which loop-file variant to rebuild with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Clean,
    Timed,
    Energized,
}

/// Builds the original and the extracted program with `variant` loop files
/// and compares their stdout. Returns the number of extracted loops.
pub fn check_program(cc: &str, path: &Path, work: &Path, variant: Variant) -> Result<usize, String> {
    let stem = path.file_stem().unwrap().to_str().unwrap();
    let dir = work.join(format!("{stem}-{variant:?}"));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let orig_exe = dir.join("orig");
    compile(cc, &[], &[path.to_path_buf()], &orig_exe).map_err(|e| format!("original: {e}"))?;
    let expected = run(&orig_exe, &[])?;

    let art = extract(Some(cc), path);
    let base = dir.join(format!("{stem}.c"));
    fs::write(&base, &art.base_file).unwrap();
    let mut sources = vec![base];
    for (id, v) in &art.loop_files {
        let p = dir.join(format!("{id}.c"));
        let text = match variant {
            Variant::Clean => &v.clean,
            Variant::Timed => &v.timed,
            Variant::Energized => &v.energized,
        };
        fs::write(&p, text).unwrap();
        sources.push(p);
    }
    let inc = format!("-I{}", runtime_dir().display());
    let exe = dir.join("extracted");
    compile(cc, &[&inc], &sources, &exe).map_err(|e| format!("extracted build: {e}"))?;
    let profile = dir.join("profile.txt");
    let got = run(&exe, &[("MC_PROFILE_OUT", &profile)])?;
    if got != expected {
        return Err(format!(
            "stdout differs\n--- original\n{}--- extracted\n{}",
            String::from_utf8_lossy(&expected),
            String::from_utf8_lossy(&got)
        ));
    }
    Ok(art.loop_files.len())
}
