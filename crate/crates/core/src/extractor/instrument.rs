//! Timing and energy variants of a clean loop file.
//!
//! Both insert statements immediately around the nest (including its
//! pragmas) and a header include on the first line; the nest itself is left
//! untouched so optimizers see the same code as in the clean variant.

use crate::cparse::{self, FileId, NodeKind};

pub const TIMING_HEADER: &str = "mc_timing.h";
pub const MARKER_HEADER: &str = "mc_markers.h";

/// Byte offsets of the start of the first line of the nest region and of the
/// end of its last line, inside the outlined function for `loop_id`.
fn region_lines(clean: &str, loop_id: &str) -> Option<(usize, usize)> {
    let unit = cparse::parse_unit(clean, FileId(0)).ok()?;
    let fn_name = format!("mc_loop_{loop_id}");
    let func = unit
        .children
        .iter()
        .find(|c| c.kind == NodeKind::FunctionDef && cparse::function_name(c) == Some(fn_name.as_str()))?;
    let body = func.children.last()?;
    let k = body.children.iter().position(|c| c.kind == NodeKind::ForStmt)?;
    let first = body.children[..k]
        .iter()
        .rev()
        .take_while(|c| c.kind == NodeKind::PragmaDirective)
        .last()
        .unwrap_or(&body.children[k]);
    let start = clean[..first.span.byte_start].rfind('\n').map(|i| i + 1).unwrap_or(0);
    let end_nl = clean[body.children[k].span.byte_end..].find('\n')?;
    Some((start, body.children[k].span.byte_end + end_nl + 1))
}

fn wrap(clean: &str, loop_id: &str, header: &str, before: &[String], after: &[String]) -> String {
    format!("#include \"{header}\"\n{}", wrap_nest(clean, loop_id, before, after))
}

/// Puts `before` and `after` lines around the nest, and its pragmas, of a
/// loop file. Unchanged when the nest cannot be located.
pub fn wrap_nest(clean: &str, loop_id: &str, before: &[String], after: &[String]) -> String {
    let Some((start, end)) = region_lines(clean, loop_id) else {
        log::warn!("{loop_id}: cannot locate nest in loop file; left unwrapped");
        return clean.to_string();
    };
    let mut out = String::new();
    out.push_str(&clean[..start]);
    for l in before {
        out.push_str(&format!("    {l}\n"));
    }
    out.push_str(&clean[start..end]);
    for l in after {
        out.push_str(&format!("    {l}\n"));
    }
    out.push_str(&clean[end..]);
    out
}

pub fn instrument_timing(clean: &str, loop_id: &str) -> String {
    wrap(
        clean,
        loop_id,
        TIMING_HEADER,
        &["unsigned long long mc_t0, mc_t1;".into(), "mc_t0 = mc_clock_ns();".into()],
        &["mc_t1 = mc_clock_ns();".into(), format!("mc_timing_record(\"{loop_id}\", mc_t1 - mc_t0);")],
    )
}

pub fn instrument_energy(clean: &str, loop_id: &str) -> String {
    wrap(
        clean,
        loop_id,
        MARKER_HEADER,
        &["MC_MARKER_INIT;".into(), format!("MC_MARKER_START(\"{loop_id}\");")],
        &[format!("MC_MARKER_STOP(\"{loop_id}\");"), "MC_MARKER_CLOSE;".into()],
    )
}

/// Lines of `variant` that are not in `clean`, assuming insertions only.
pub fn inserted_lines<'a>(clean: &str, variant: &'a str) -> Vec<&'a str> {
    let mut clean_lines = clean.lines().peekable();
    let mut out = Vec::new();
    for l in variant.lines() {
        if clean_lines.peek() == Some(&l) {
            clean_lines.next();
        } else {
            out.push(l);
        }
    }
    out
}
