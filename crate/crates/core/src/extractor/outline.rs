use std::collections::HashSet;

use crate::cparse::lexer::directive_name;
use crate::cparse::symbols::dimension_identifiers;
use crate::cparse::{ctype, enclosing_function, AstNode, NodeKind, Storage, SymbolCategory, SymbolInfo};

use super::omp::{self, OmpPragma};
use super::{ExtractedFunctionSig, ExtractionFault, LoopNest, SigParam};

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|="];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Passing {
    /// Visible through a header or an `extern` declaration in the loop file.
    Extern,
    /// Arrays: passed as `void *` and re-typed through a local pointer alias.
    Alias,
    /// Everything else: copied into a same-named local.
    CopyIn,
}

fn passing(s: &SymbolInfo, written: &HashSet<String>) -> Option<Passing> {
    let by_ref = || {
        if ctype::decay_array(&s.template).is_some() {
            Passing::Alias
        } else {
            Passing::CopyIn
        }
    };
    match s.category {
        SymbolCategory::Local | SymbolCategory::Parameter | SymbolCategory::StaticVar => Some(by_ref()),
        SymbolCategory::GlobalVar if s.from_header || s.defined_in_file => Some(Passing::Extern),
        SymbolCategory::GlobalVar if written.contains(&s.name) => Some(by_ref()),
        SymbolCategory::GlobalVar => Some(Passing::Extern),
        _ => None,
    }
}

/// True when the object declared by `template` is a pointer.
fn is_pointer_object(template: &str) -> bool {
    let parts: Vec<String> =
        crate::cparse::lexer::tokenize(template).map(|v| v.into_iter().map(|t| t.text).collect()).unwrap_or_default();
    let Some(h) = parts.iter().position(|t| t == ctype::HOLE) else { return false };
    parts[..h]
        .iter()
        .rev()
        .find(|t| !matches!(t.as_str(), "const" | "volatile" | "restrict" | "__restrict" | "__restrict__"))
        .is_some_and(|t| t == "*")
}

fn is_operand_end(n: &AstNode) -> bool {
    if !n.is_leaf() {
        return true;
    }
    let t = n.text.as_str();
    t == ")"
        || t == "]"
        || t == "++"
        || t == "--"
        || t.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '"' || c == '\'')
}

/// Objects among `symbols` that the nest may modify: assigned directly,
/// incremented, or whose address is taken. Writes through a pointer do not
/// count as writes of the pointer.
pub(super) fn written_objects(root: &AstNode, symbols: &[SymbolInfo]) -> HashSet<String> {
    let pointers: Vec<(&str, bool)> = symbols
        .iter()
        .filter(|s| s.category.is_object())
        .map(|s| (s.name.as_str(), is_pointer_object(&s.template)))
        .collect();
    let mut written = HashSet::new();
    root.walk(&mut |n| {
        let ch = &n.children;
        for (k, c) in ch.iter().enumerate() {
            if c.kind != NodeKind::Identifier {
                continue;
            }
            let Some(&(name, is_ptr)) = pointers.iter().find(|(p, _)| *p == c.text) else { continue };
            let prev = k.checked_sub(1).map(|i| &ch[i]);
            let unary_prev =
                prev.is_some_and(|p| p.is_leaf()) && !k.checked_sub(2).map(|i| &ch[i]).is_some_and(is_operand_end);
            match prev.map(|p| p.text.as_str()) {
                Some("++") | Some("--") => {
                    written.insert(name.to_string());
                    continue;
                }
                Some("&") if unary_prev => {
                    written.insert(name.to_string());
                    continue;
                }
                Some("*") if unary_prev => continue,
                _ => {}
            }
            let mut j = k + 1;
            let mut deref = false;
            while let Some(next) = ch.get(j) {
                match next.text.as_str() {
                    "." if next.is_leaf() => j += 2,
                    "[" if next.is_leaf() && is_ptr => {
                        deref = true;
                        break;
                    }
                    "[" if next.is_leaf() => j += 3,
                    "->" if next.is_leaf() => {
                        deref = true;
                        break;
                    }
                    _ => break,
                }
            }
            if deref {
                continue;
            }
            if let Some(next) = ch.get(j).filter(|x| x.is_leaf()) {
                if ASSIGN_OPS.contains(&next.text.as_str()) || next.text == "++" || next.text == "--" {
                    written.insert(name.to_string());
                }
            }
        }
    });
    written
}

/// True when a localized (copied-in) object is written by the nest.
pub(super) fn localized_written(symbols: &[SymbolInfo], written: &HashSet<String>) -> bool {
    symbols.iter().any(|s| written.contains(&s.name) && passing(s, written) == Some(Passing::CopyIn))
}

fn leaf_texts(n: &AstNode) -> Vec<&str> {
    let mut out = Vec::new();
    n.walk(&mut |m| {
        if m.is_leaf() {
            out.push(m.text.as_str());
        }
    });
    out
}

fn mentions_sizeof_of(leaves: &[&str], name: &str) -> bool {
    for (i, t) in leaves.iter().enumerate() {
        if *t != "sizeof" {
            continue;
        }
        match leaves.get(i + 1) {
            Some(&n) if n == name => return true,
            Some(&"(") => {
                let mut depth = 0;
                for u in &leaves[i + 1..] {
                    match *u {
                        "(" => depth += 1,
                        ")" => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        x if x == name => return true,
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }
    false
}

fn validate(s: &SymbolInfo, func: &AstNode, passing: Passing, leaves: &[&str]) -> Result<(), ExtractionFault> {
    let fault = |detail: &str| Err(ExtractionFault { symbol: s.name.clone(), detail: detail.to_string() });
    if s.template.is_empty() {
        return fault("no declaration text");
    }
    if s.template.contains('{') {
        return fault("type has no name outside its declaration");
    }
    if s.storage == Storage::Register {
        return fault("register object has no address");
    }
    let dims = dimension_identifiers(&s.template);
    let tags = ctype::tags(&s.template);
    let mut local_type = false;
    func.walk(&mut |n| {
        if let Some(d) = n.decl.as_ref().filter(|_| n.kind == NodeKind::Declaration) {
            if d.storage == Storage::Typedef {
                local_type |= d.declarators.iter().any(|x| {
                    x.name.as_ref().is_some_and(|nm| !dims.contains(nm) && ctype::identifiers(&s.template).contains(nm))
                });
            }
            local_type |= d.tags_defined.iter().any(|t| tags.contains(t));
        }
    });
    if local_type {
        return fault("type declared inside the enclosing function");
    }
    if passing == Passing::Alias && mentions_sizeof_of(leaves, &s.name) {
        return fault("sizeof of an array that becomes a pointer");
    }
    Ok(())
}

struct Planned<'a> {
    sym: &'a SymbolInfo,
    passing: Passing,
    /// Type depends on other passed objects (variably modified).
    vla: bool,
    param_name: String,
}

impl Planned<'_> {
    fn param_decl(&self) -> String {
        if self.passing == Passing::Alias || self.vla {
            format!("void *{}", self.param_name)
        } else {
            ctype::substitute(&ctype::pointer_to(&self.sym.template), &self.param_name)
        }
    }

    fn param_type(&self) -> String {
        if self.passing == Passing::Alias || self.vla {
            "void *".to_string()
        } else {
            ctype::abstract_of(&ctype::pointer_to(&self.sym.template))
        }
    }

    fn pointee_cast(&self) -> String {
        ctype::abstract_of(&ctype::pointer_to(&self.sym.template))
    }

    fn copy_in(&self) -> String {
        let name = &self.sym.name;
        match (self.passing, self.vla) {
            (Passing::Alias, _) => {
                let decayed = ctype::decay_array(&self.sym.template).expect("array template");
                format!(
                    "{} = ({}){};",
                    ctype::substitute(&decayed, name),
                    ctype::abstract_of(&decayed),
                    self.param_name
                )
            }
            (_, false) => format!("{} = *{};", ctype::substitute(&self.sym.template, name), self.param_name),
            (_, true) => format!(
                "{} = *({}){};",
                ctype::substitute(&self.sym.template, name),
                self.pointee_cast(),
                self.param_name
            ),
        }
    }

    fn copy_out(&self) -> String {
        if self.vla {
            format!("*({}){} = {};", self.pointee_cast(), self.param_name, self.sym.name)
        } else {
            format!("*{} = {};", self.param_name, self.sym.name)
        }
    }
}

fn is_conditional_open(text: &str) -> bool {
    matches!(directive_name(text), "if" | "ifdef" | "ifndef")
}

fn declaration_prelude(n: &AstNode, src: &str) -> Vec<String> {
    let d = n.decl.as_ref().expect("declaration info");
    let verbatim = src[n.span.byte_start..n.span.byte_end].to_string();
    let has_body = d.base_type.contains('{');
    if d.storage == Storage::Typedef || d.declarators.is_empty() {
        return vec![verbatim];
    }
    if d.declarators.iter().all(|x| x.is_function()) {
        return if d.storage == Storage::Static { Vec::new() } else { vec![verbatim] };
    }
    if d.storage == Storage::Extern && !d.declarators.iter().any(|x| x.has_init) {
        return vec![verbatim];
    }
    if d.storage == Storage::Static {
        return if has_body && !d.tags_defined.is_empty() { vec![format!("{};", d.base_type)] } else { Vec::new() };
    }
    let kw = if d.storage == Storage::ThreadLocal { "extern __thread " } else { "extern " };
    let short_base = d.base_type.split('{').next().unwrap_or("").trim().to_string();
    let mut out = Vec::new();
    for (i, x) in d.declarators.iter().enumerate() {
        let Some(name) = &x.name else { continue };
        let template = if i == 0 || !has_body {
            x.template.clone()
        } else if !d.tags_defined.is_empty() {
            x.template.replacen(&d.base_type, &short_base, 1)
        } else {
            continue;
        };
        out.push(format!("{kw}{};", ctype::substitute(&template, name)));
    }
    out
}

/// Declarations and directives the loop file needs ahead of the function.
fn prelude(unit: &AstNode, func: &AstNode, nest: &LoopNest) -> Vec<String> {
    let src = unit.text.as_str();
    let mut lines = Vec::new();
    let mut open = 0usize;
    let mut directive = |text: &str, lines: &mut Vec<String>| {
        match directive_name(text) {
            _ if is_conditional_open(text) => open += 1,
            "endif" => open = open.saturating_sub(1),
            _ => {}
        }
        lines.push(text.to_string());
    };
    for c in unit.children.iter().filter(|c| c.span.byte_end <= func.span.byte_start) {
        match c.kind {
            NodeKind::Directive => directive(&c.text, &mut lines),
            NodeKind::Declaration => lines.extend(declaration_prelude(c, src)),
            NodeKind::FunctionDef => {
                let d = c.decl.as_ref().expect("function info");
                if d.storage != Storage::Static {
                    let x = &d.declarators[0];
                    lines.push(format!("{};", ctype::substitute(&x.template, x.name.as_deref().unwrap_or(""))));
                }
            }
            _ => {}
        }
    }
    let mut inner = Vec::new();
    func.walk(&mut |n| {
        if n.kind == NodeKind::Directive && n.span.byte_end <= nest.region.byte_start {
            inner.push(n.text.clone());
        }
    });
    for t in inner {
        directive(&t, &mut lines);
    }
    lines.extend(std::iter::repeat_n("#endif".to_string(), open));
    for s in &nest.symbols {
        let declared_later = s.decl_span.is_some_and(|d| d.byte_start >= func.span.byte_start);
        if s.category == SymbolCategory::Function && !s.from_header && declared_later {
            lines.push(format!("{};", ctype::substitute(&s.template, &s.name)));
        }
    }
    lines
}

fn fresh_name(base: String, taken: &mut HashSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

/// Emits the clean loop file for an eligible nest.
pub fn extract_loop(nest: &LoopNest, unit: &AstNode) -> Result<(String, ExtractedFunctionSig), ExtractionFault> {
    let fault = |detail: &str| ExtractionFault { symbol: nest.loop_id.to_string(), detail: detail.to_string() };
    let root = unit.find(NodeKind::ForStmt, &nest.span).ok_or_else(|| fault("nest not found"))?;
    let func = enclosing_function(unit, &nest.span).ok_or_else(|| fault("no enclosing function"))?;
    let src = unit.text.as_str();
    let written = written_objects(root, &nest.symbols);
    let leaves = leaf_texts(root);
    let mut taken: HashSet<String> = leaves.iter().map(|s| s.to_string()).collect();
    taken.extend(nest.symbols.iter().map(|s| s.name.clone()));
    taken.extend(["mc_t0", "mc_t1"].map(String::from));

    let mut planned: Vec<Planned> = Vec::new();
    let mut externs = Vec::new();
    let mut passed_names: HashSet<&str> = HashSet::new();
    for s in nest.symbols.iter().filter(|s| s.category.is_object()) {
        match passing(s, &written) {
            Some(Passing::Extern) => externs.push(s.name.clone()),
            Some(p) => {
                validate(s, func, p, &leaves)?;
                passed_names.insert(&s.name);
                planned.push(Planned { sym: s, passing: p, vla: false, param_name: String::new() });
            }
            None => {}
        }
    }
    for p in &mut planned {
        p.vla = dimension_identifiers(&p.sym.template).iter().any(|d| passed_names.contains(d.as_str()));
        p.param_name = fresh_name(format!("{}_ref", p.sym.name), &mut taken);
    }

    // copy-ins ordered so that dimension operands come first
    let mut order: Vec<usize> = Vec::new();
    while order.len() < planned.len() {
        let before = order.len();
        for (i, p) in planned.iter().enumerate() {
            if order.contains(&i) {
                continue;
            }
            let deps = dimension_identifiers(&p.sym.template);
            let ready = deps
                .iter()
                .all(|d| planned.iter().enumerate().all(|(j, q)| q.sym.name != *d || order.contains(&j) || j == i));
            if ready {
                order.push(i);
            }
        }
        if order.len() == before {
            return Err(fault("circular dimension dependencies"));
        }
    }

    let keep: HashSet<String> = nest.symbols.iter().map(|s| s.name.clone()).collect();
    let pragmas: Vec<String> = nest
        .attached_pragmas
        .iter()
        .map(|p| match OmpPragma::parse(p) {
            Some(o) if omp::is_omp(p) => o.sanitized(&keep).render(),
            _ => p.clone(),
        })
        .collect();

    let line_start = src[..nest.span.byte_start].rfind('\n').map(|i| i + 1).unwrap_or(0);
    let lead = &src[line_start..nest.span.byte_start];
    let indent = if lead.trim().is_empty() { lead } else { "    " };
    let nest_text = &src[nest.span.byte_start..nest.span.byte_end];

    let sig = ExtractedFunctionSig {
        fn_name: nest.loop_id.function_name(),
        params: planned
            .iter()
            .map(|p| SigParam {
                name: p.sym.name.clone(),
                param_name: p.param_name.clone(),
                type_text: p.param_type(),
                by_ref: true,
            })
            .collect(),
        localized: planned.iter().filter(|p| p.passing == Passing::CopyIn).map(|p| p.sym.name.clone()).collect(),
        copied_out: planned
            .iter()
            .filter(|p| {
                p.passing == Passing::CopyIn
                    && written.contains(&p.sym.name)
                    && !ctype::is_const_object(&p.sym.template)
            })
            .map(|p| p.sym.name.clone())
            .collect(),
        externs,
    };

    let mut out = String::new();
    for l in prelude(unit, func, nest) {
        out.push_str(&l);
        out.push('\n');
    }
    out.push('\n');
    let params: Vec<String> = planned.iter().map(Planned::param_decl).collect();
    let params = if params.is_empty() { "void".to_string() } else { params.join(", ") };
    out.push_str(&format!("void {}({})\n{{\n", sig.fn_name, params));
    for &i in &order {
        out.push_str(&format!("    {}\n", planned[i].copy_in()));
    }
    for p in &pragmas {
        out.push_str(&format!("    {}\n", p.trim()));
    }
    out.push_str(indent);
    out.push_str(nest_text);
    out.push('\n');
    for p in planned.iter().filter(|p| sig.copied_out.contains(&p.sym.name)) {
        out.push_str(&format!("    {}\n", p.copy_out()));
    }
    out.push_str("}\n");
    Ok((out, sig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cparse::{parse_unit, FileId};
    use crate::extractor::{analyze, ExtractOptions};

    fn extract(src: &str) -> (String, ExtractedFunctionSig) {
        let unit = parse_unit(src, FileId(0)).unwrap();
        let nests = analyze(&unit, "t", &ExtractOptions::default());
        let nest = nests.iter().find(|n| n.eligible).expect("an eligible nest");
        extract_loop(nest, &unit).unwrap()
    }

    #[test]
    fn scalar_copy_in_without_pointer_copy_out() {
        let src = "void f(int n, double *A){ for(int i=0;i<n;i++) A[i] = i; }";
        let (text, sig) = extract(src);
        let types: Vec<_> = sig.params.iter().map(|p| (p.name.as_str(), p.type_text.as_str())).collect();
        assert_eq!(types, [("n", "int *"), ("A", "double **")]);
        assert!(text.contains("int n = *n_ref;"));
        assert!(text.contains("double *A = *A_ref;"));
        assert!(sig.copied_out.is_empty(), "{text}");
        assert_eq!(sig.call(), "mc_loop_t_f_L0(&n, &A);");
    }

    #[test]
    fn written_scalars_are_copied_out() {
        let (text, sig) = extract("int main(){ double s = 0; int k; for(k=0;k<4;k++) s += k; return (int)s; }");
        assert_eq!(sig.copied_out, ["k", "s"]);
        assert!(text.contains("*s_ref = s;"));
    }

    #[test]
    fn arrays_become_typed_aliases() {
        let (text, sig) = extract("#define N 4\nint main(){ double A[N][N]; int i,j; for(i=0;i<N;i++) for(j=0;j<N;j++) A[i][j]=0; return 0; }");
        assert!(text.contains("double (*A)[N] = (double (*)[N])A_ref;"), "{text}");
        assert_eq!(sig.params.iter().find(|p| p.name == "A").unwrap().type_text, "void *");
        assert!(text.starts_with("#define N 4\n"));
    }

    #[test]
    fn variably_modified_types_follow_their_dimensions() {
        let src = "void f(int n, double A[n][n]){ for(int i=0;i<n;i++) A[i][i] = 1; }";
        let (text, _) = extract(src);
        let a = text.find("double (*A)[n] = *(double (**)[n])A_ref;").expect(&text);
        let n = text.find("int n = *n_ref;").unwrap();
        assert!(n < a);
    }

    #[test]
    fn pragma_clauses_are_sanitized() {
        let src = "void f(int n, double *A){ double tmp;\n#pragma omp parallel for private(i,tmp)\nfor(int i=0;i<n;i++){ double tmp = A[i]; A[i] = tmp*2; } }";
        let (text, _) = extract(src);
        assert!(text.contains("#pragma omp parallel for\n"), "{text}");
    }

    #[test]
    fn write_detection() {
        let src = "struct p { int x; };\nvoid f(int *q, struct p s, int n, int m){ for(int i=0;i<n;i++){ q[i] = 1; *q = 2; s.x = i; m = n; } }";
        let unit = parse_unit(src, FileId(0)).unwrap();
        let nests = analyze(&unit, "t", &ExtractOptions::default());
        let root = unit.find(NodeKind::ForStmt, &nests[0].span).unwrap();
        let w = written_objects(root, &nests[0].symbols);
        let mut w: Vec<_> = w.into_iter().collect();
        w.sort();
        assert_eq!(w, ["m", "s"]);
    }
}
