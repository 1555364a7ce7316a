use crate::cparse::{enclosing_function, AstNode};

use super::{ExtractedFunctionSig, LoopNest};

/// Splices calls into the original source. `sigs` pairs in order with the
/// eligible entries of `nests`; text outside the replaced regions is kept
/// byte for byte.
pub fn rewrite_base(unit: &AstNode, nests: &[LoopNest], sigs: &[&ExtractedFunctionSig]) -> String {
    let src = unit.text.as_str();
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    let mut declared_before: Vec<(usize, String)> = Vec::new();
    for (nest, sig) in nests.iter().filter(|n| n.eligible).zip(sigs) {
        edits.push((nest.region.byte_start, nest.region.byte_end, sig.call()));
        if let Some(f) = enclosing_function(unit, &nest.span) {
            let at = src[..f.span.byte_start].rfind('\n').map(|i| i + 1).unwrap_or(0);
            declared_before.push((at, format!("{}\n", sig.prototype())));
        }
    }
    for (at, proto) in declared_before {
        match edits.iter_mut().find(|(s, e, _)| *s == at && *e == at) {
            Some(e) => e.2.push_str(&proto),
            None => edits.push((at, at, proto)),
        }
    }
    // apply back to front so earlier offsets stay valid
    edits.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
    let mut out = src.to_string();
    for (s, e, text) in edits {
        out.replace_range(s..e, &text);
    }
    out
}
