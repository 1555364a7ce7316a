use std::fs;
use std::io;
use std::path::Path;

pub const TIMING_HEADER: (&str, &str) = ("mc_timing.h", include_str!("../../runtime/mc_timing.h"));
pub const MARKERS_HEADER: (&str, &str) = ("mc_markers.h", include_str!("../../runtime/mc_markers.h"));

/// Writes the instrumentation headers into `dir`.
pub fn install(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in [TIMING_HEADER, MARKERS_HEADER] {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}
