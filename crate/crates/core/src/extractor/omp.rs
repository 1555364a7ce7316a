//! OpenMP pragma inspection and clause sanitizing.

use std::collections::HashSet;

use crate::cparse::lexer::{tokenize, TokKind, Token};

/// Clauses whose argument is a variable list (possibly after a `modifier:`).
const LIST_AFTER_COLON: &[&str] =
    &["reduction", "in_reduction", "task_reduction", "lastprivate", "allocate", "depend", "map"];
const LIST_BEFORE_COLON: &[&str] = &["linear", "aligned"];
const LIST_PLAIN: &[&str] =
    &["private", "firstprivate", "shared", "copyin", "copyprivate", "nontemporal", "uniform", "threadprivate", "flush"];

/// Constructs that distribute work across an existing team.
const WORKSHARING: &[&str] = &["for", "sections", "single", "taskloop", "distribute", "workshare"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmpPragma {
    /// Directive words before the first clause, e.g. `["parallel", "for"]`.
    pub construct: Vec<String>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    /// Verbatim argument text without the parentheses.
    pub args: Option<String>,
}

fn body_of(pragma: &str) -> Option<&str> {
    let rest = pragma.trim_start().strip_prefix('#')?.trim_start().strip_prefix("pragma")?;
    let rest = rest.trim_start().strip_prefix("omp")?;
    rest.starts_with(|c: char| c.is_whitespace()).then_some(rest).or(Some(rest).filter(|r| r.is_empty()))
}

pub fn is_omp(pragma: &str) -> bool {
    body_of(pragma).is_some()
}

impl OmpPragma {
    pub fn parse(pragma: &str) -> Option<OmpPragma> {
        let body = body_of(pragma)?;
        let joined = body.replace("\\\n", " ");
        let toks = tokenize(&joined).ok()?;
        let mut construct = Vec::new();
        let mut clauses = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let t = &toks[i];
            if t.is_punct(",") {
                i += 1;
                continue;
            }
            let name = t.text.clone();
            let has_args = toks.get(i + 1).is_some_and(|n| n.is_punct("("));
            if !has_args {
                if clauses.is_empty() && matches!(t.kind, TokKind::Ident | TokKind::Keyword) && is_construct_word(&name)
                {
                    construct.push(name);
                } else {
                    clauses.push(Clause { name, args: None });
                }
                i += 1;
                continue;
            }
            let close = matching_paren(&toks, i + 1)?;
            let args = joined[toks[i + 1].end..toks[close].start].trim().to_string();
            // `critical(name)` and `threadprivate(list)` belong to the construct
            if clauses.is_empty() && matches!(name.as_str(), "critical" | "threadprivate" | "flush") {
                construct.push(name.clone());
            }
            clauses.push(Clause { name, args: Some(args) });
            i = close + 1;
        }
        Some(OmpPragma { construct, clauses })
    }

    pub fn has_word(&self, w: &str) -> bool {
        self.construct.iter().any(|c| c == w)
    }

    pub fn is_parallel(&self) -> bool {
        self.has_word("parallel")
    }

    pub fn is_worksharing(&self) -> bool {
        self.construct.iter().any(|c| WORKSHARING.contains(&c.as_str()))
    }

    /// Variables named in list clauses.
    pub fn listed_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.clauses {
            if let (Some(args), true) = (&c.args, is_list_clause(&c.name)) {
                let (_, list, _) = split_list(&c.name, args);
                for item in split_items(&list) {
                    if let Some(n) = item_name(&item) {
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    /// Identifiers in expression clauses (`num_threads(nt)`, `if(n > 100)`),
    /// which the outlined function must be able to see.
    pub fn expression_identifiers(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.clauses {
            let Some(args) = &c.args else { continue };
            if is_list_clause(&c.name)
                || matches!(c.name.as_str(), "default" | "proc_bind" | "critical" | "order" | "bind")
            {
                continue;
            }
            let Ok(toks) = tokenize(args) else { continue };
            for (k, t) in toks.iter().enumerate() {
                let schedule_kind = c.name == "schedule" && k == 0;
                if t.kind == TokKind::Ident && !schedule_kind && !is_schedule_word(&t.text) && !out.contains(&t.text) {
                    out.push(t.text.clone());
                }
            }
        }
        out
    }

    /// Drops list items not in `keep`, and clauses left without items.
    pub fn sanitized(&self, keep: &HashSet<String>) -> OmpPragma {
        let mut clauses = Vec::new();
        for c in &self.clauses {
            match &c.args {
                Some(args) if is_list_clause(&c.name) && !self.construct.contains(&c.name) => {
                    let (prefix, list, suffix) = split_list(&c.name, args);
                    let items: Vec<String> = split_items(&list)
                        .into_iter()
                        .filter(|it| item_name(it).is_some_and(|n| keep.contains(&n)))
                        .collect();
                    if items.is_empty() {
                        continue;
                    }
                    let list = items.join(", ");
                    let args = match (prefix.is_empty(), suffix.is_empty()) {
                        (true, true) => list,
                        (false, true) => format!("{prefix}: {list}"),
                        (true, false) => format!("{list}: {suffix}"),
                        (false, false) => format!("{prefix}: {list}: {suffix}"),
                    };
                    clauses.push(Clause { name: c.name.clone(), args: Some(args) });
                }
                _ => clauses.push(c.clone()),
            }
        }
        OmpPragma { construct: self.construct.clone(), clauses }
    }

    pub fn render(&self) -> String {
        let mut s = String::from("#pragma omp");
        let construct_clauses = self.clauses.iter().filter(|c| self.construct.contains(&c.name)).count();
        for w in &self.construct[..self.construct.len() - construct_clauses.min(self.construct.len())] {
            s.push(' ');
            s.push_str(w);
        }
        for c in &self.clauses {
            s.push(' ');
            s.push_str(&c.name);
            if let Some(a) = &c.args {
                s.push('(');
                s.push_str(a);
                s.push(')');
            }
        }
        s
    }
}

fn is_construct_word(w: &str) -> bool {
    matches!(
        w,
        "parallel"
            | "for"
            | "simd"
            | "sections"
            | "section"
            | "single"
            | "master"
            | "masked"
            | "critical"
            | "barrier"
            | "atomic"
            | "task"
            | "taskloop"
            | "taskwait"
            | "taskgroup"
            | "ordered"
            | "target"
            | "teams"
            | "distribute"
            | "declare"
            | "loop"
            | "workshare"
            | "data"
            | "enter"
            | "exit"
            | "update"
            | "read"
            | "write"
            | "capture"
            | "end"
            | "cancel"
            | "cancellation"
            | "point"
            | "scan"
            | "threadprivate"
            | "flush"
    )
}

fn is_schedule_word(w: &str) -> bool {
    matches!(w, "static" | "dynamic" | "guided" | "auto" | "runtime" | "monotonic" | "nonmonotonic")
}

fn is_list_clause(name: &str) -> bool {
    LIST_AFTER_COLON.contains(&name) || LIST_BEFORE_COLON.contains(&name) || LIST_PLAIN.contains(&name)
}

fn matching_paren(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is_punct("(") {
            depth += 1;
        } else if t.is_punct(")") {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Splits `args` of a list clause into `(modifier, list, trailer)`.
fn split_list(name: &str, args: &str) -> (String, String, String) {
    let colons: Vec<usize> = top_level_positions(args, ':');
    if LIST_AFTER_COLON.contains(&name) {
        if let Some(&c) = colons.last() {
            return (args[..c].trim().to_string(), args[c + 1..].trim().to_string(), String::new());
        }
    } else if LIST_BEFORE_COLON.contains(&name) {
        if let Some(&c) = colons.first() {
            return (String::new(), args[..c].trim().to_string(), args[c + 1..].trim().to_string());
        }
    }
    (String::new(), args.trim().to_string(), String::new())
}

fn top_level_positions(s: &str, needle: char) -> Vec<usize> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == needle && depth == 0 => out.push(i),
            _ => {}
        }
    }
    out
}

fn split_items(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut last = 0;
    for p in top_level_positions(list, ',') {
        out.push(list[last..p].trim().to_string());
        last = p + 1;
    }
    out.push(list[last..].trim().to_string());
    out.retain(|s| !s.is_empty());
    out
}

fn item_name(item: &str) -> Option<String> {
    let name: String = item.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    (!name.is_empty()).then_some(name)
}

/// Variables named by `threadprivate` pragmas.
pub fn threadprivate_names(pragmas: &[&str]) -> HashSet<String> {
    pragmas
        .iter()
        .filter_map(|p| OmpPragma::parse(p))
        .filter(|p| p.has_word("threadprivate"))
        .flat_map(|p| p.listed_variables())
        .collect()
}
