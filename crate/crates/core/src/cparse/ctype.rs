//! Verbatim type text handling.
//!
//! Declarations are kept as *templates*: the declaration text with the
//! declared name replaced by `@` (`double (*@)[N]`). Deriving new declarations
//! from a template is plain token surgery, so no semantic type system is
//! needed to regenerate declarations.

use super::lexer::{tokenize, TokKind};

pub const HOLE: &str = "@";

fn toks(template: &str) -> Vec<(TokKind, String)> {
    tokenize(template).map(|v| v.into_iter().map(|t| (t.kind, t.text)).collect()).unwrap_or_default()
}

fn wordy_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '"' || c == '\'' || c == '@'
}

/// Joins tokens with C-ish spacing (`double (*@)[N]`, `const char *@`).
pub fn join_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for t in tokens {
        let t = t.as_ref();
        if let Some(p) = prev {
            let p_end = p.chars().last().is_some_and(wordy_char);
            let t_start = t.chars().next().is_some_and(wordy_char);
            let space = (p_end && t_start)
                || p == ","
                || (p_end && t.starts_with('*'))
                || (t.starts_with('(') && p_end && (t.len() > 1 || super::lexer::is_keyword(p)))
                || ((p == ")" || p == "]") && t_start);
            if space {
                out.push(' ');
            }
        }
        out.push_str(t);
        prev = Some(t);
    }
    out
}

/// Replaces the hole with `replacement` (which may itself be a declarator
/// fragment such as `*x` or `(*x)`).
pub fn substitute(template: &str, replacement: &str) -> String {
    let parts: Vec<String> =
        toks(template).into_iter().map(|(_, t)| if t == HOLE { replacement.to_string() } else { t }).collect();
    join_tokens(&parts)
}

/// Type name with the hole removed, e.g. `double (*)[N]`.
pub fn abstract_of(template: &str) -> String {
    let parts: Vec<String> = toks(template).into_iter().map(|(_, t)| t).filter(|t| t != HOLE).collect();
    join_tokens(&parts)
}

fn hole_index(parts: &[(TokKind, String)]) -> Option<usize> {
    parts.iter().position(|(_, t)| t == HOLE)
}

/// Template declaring a pointer to the template's type.
pub fn pointer_to(template: &str) -> String {
    let parts = toks(template);
    let Some(h) = hole_index(&parts) else { return template.to_string() };
    let next = parts.get(h + 1).map(|(_, t)| t.as_str());
    let frag = if matches!(next, Some("[") | Some("(")) { "(*@)" } else { "*@" };
    substitute(template, frag)
}

/// For an array template `T @[d1][d2]...`, the template of the pointer the
/// array decays to: `T (*@)[d2]...` (or `T *@` for one dimension).
pub fn decay_array(template: &str) -> Option<String> {
    let parts = toks(template);
    let h = hole_index(&parts)?;
    if parts.get(h + 1).map(|(_, t)| t.as_str()) != Some("[") {
        return None;
    }
    let mut depth = 0usize;
    let mut close = None;
    for (i, (_, t)) in parts.iter().enumerate().skip(h + 1) {
        match t.as_str() {
            "[" => depth += 1,
            "]" => {
                depth -= 1;
                if depth == 0 {
                    close = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let close = close?;
    let has_more_suffix = matches!(parts.get(close + 1).map(|(_, t)| t.as_str()), Some("[") | Some("("));
    let mut out: Vec<String> = parts[..h].iter().map(|(_, t)| t.clone()).collect();
    if has_more_suffix {
        out.extend(["(", "*", HOLE, ")"].map(String::from));
    } else {
        out.extend(["*", HOLE].map(String::from));
    }
    out.extend(parts[close + 1..].iter().map(|(_, t)| t.clone()));
    Some(join_tokens(&out))
}

/// Identifiers mentioned in the template other than type keywords, e.g. the
/// `n` in `double (*@)[n]` or the `vec_t` in `vec_t @`.
pub fn identifiers(template: &str) -> Vec<String> {
    let mut out = Vec::new();
    let parts = toks(template);
    for (i, (k, t)) in parts.iter().enumerate() {
        if *k != TokKind::Ident {
            continue;
        }
        // member names and struct tags are not standalone identifiers
        let prev = i.checked_sub(1).map(|j| parts[j].1.as_str());
        if matches!(prev, Some(".") | Some("->") | Some("struct") | Some("union") | Some("enum")) {
            continue;
        }
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

/// Struct/union/enum tags referenced by the template.
pub fn tags(template: &str) -> Vec<String> {
    let parts = toks(template);
    parts
        .windows(2)
        .filter(|w| matches!(w[0].1.as_str(), "struct" | "union" | "enum") && w[1].0 == TokKind::Ident)
        .map(|w| w[1].1.clone())
        .collect()
}

/// True when the top-level object declared by the template is `const`
/// (e.g. `const int @`, `double *const @`), so it may not be assigned.
pub fn is_const_object(template: &str) -> bool {
    let parts = toks(template);
    let Some(h) = hole_index(&parts) else { return false };
    // walk left from the hole over qualifiers until a '*' or the specifiers
    let mut i = h;
    while i > 0 {
        i -= 1;
        match parts[i].1.as_str() {
            "const" | "__const" => return true,
            "volatile" | "restrict" | "__restrict" | "__restrict__" => continue,
            "*" | "(" => return false,
            _ => break,
        }
    }
    // no pointer between: const anywhere in the specifiers qualifies the object
    let pointer_before = parts[..h].iter().any(|(_, t)| t == "*");
    !pointer_before && parts[..h].iter().any(|(_, t)| t == "const" || t == "__const")
}
