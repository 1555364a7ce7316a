use std::path::Path;
use std::process::Command;

use crate::cparse::HeaderEnv;

/// Header names visible to `source`, from the compiler's preprocessor.
/// `None` when the compiler cannot be run or rejects the file; callers then
/// fall back to [`HeaderEnv::default`].
pub fn header_env(cc: &str, source: &Path, cpp_args: &[String]) -> Option<HeaderEnv> {
    let run = |extra: &[&str]| -> Option<String> {
        let out = Command::new(cc).args(extra).args(cpp_args).arg(source).output().ok()?;
        if !out.status.success() {
            log::debug!("{cc} -E failed on {}: {}", source.display(), String::from_utf8_lossy(&out.stderr));
            return None;
        }
        String::from_utf8(out.stdout).ok()
    };
    let expanded = run(&["-E", "-P"])?;
    let macros = run(&["-E", "-dM"])?;
    Some(HeaderEnv::from_preprocessed(&expanded, &macros))
}
