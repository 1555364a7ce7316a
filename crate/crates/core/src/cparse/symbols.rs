//! Resolution of the identifiers a loop nest uses but does not declare.

use std::collections::HashSet;

use super::ast::{AstNode, Declarator, NodeKind, SourceSpan, Storage};
use super::lexer::{directive_name, tokenize, TokKind};
use super::{ctype, enclosing_function, HeaderEnv, LIBC_ARITHMETIC};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolCategory {
    Local,
    GlobalVar,
    Function,
    StaticFn,
    StaticVar,
    Parameter,
    TypedefName,
    EnumConstant,
    Macro,
}

impl SymbolCategory {
    /// Objects that occupy storage and may need to be passed to an outlined
    /// function.
    pub fn is_object(self) -> bool {
        matches!(
            self,
            SymbolCategory::Local | SymbolCategory::Parameter | SymbolCategory::GlobalVar | SymbolCategory::StaticVar
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub category: SymbolCategory,
    /// Type without the name, e.g. `double (*)[N]`; empty when unknown.
    pub declared_type: String,
    pub is_primitive: bool,
    /// Declaration with the name replaced by `@`; array parameters are
    /// already adjusted to pointers. Empty when declared by a header.
    pub template: String,
    pub decl_span: Option<SourceSpan>,
    pub from_header: bool,
    /// For globals: this file holds a definition, not only `extern` declarations.
    pub defined_in_file: bool,
    pub storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error("no visible declaration for `{0}`")]
    UnknownSymbol(String),
}

const ARITH_WORDS: &[&str] = &[
    "char",
    "short",
    "int",
    "long",
    "float",
    "double",
    "signed",
    "unsigned",
    "_Bool",
    "_Complex",
    "__int128",
    "const",
    "volatile",
    "restrict",
    "__restrict",
    "__restrict__",
];

/// Arithmetic scalar or pointer to one, judged from the declaration text.
fn is_primitive_template(template: &str, arith_typedefs: &HashSet<String>) -> bool {
    let Ok(toks) = tokenize(template) else { return false };
    let Some(h) = toks.iter().position(|t| t.text == ctype::HOLE) else { return false };
    if h + 1 != toks.len() {
        return false;
    }
    let stars = toks[..h].iter().filter(|t| t.text == "*").count();
    stars <= 1
        && toks[..h]
            .iter()
            .all(|t| t.text == "*" || ARITH_WORDS.contains(&t.text.as_str()) || arith_typedefs.contains(&t.text))
        && toks[..h].iter().any(|t| t.text != "*" && !matches!(t.text.as_str(), "const" | "volatile"))
}

/// Identifiers inside array dimensions of a template.
pub fn dimension_identifiers(template: &str) -> Vec<String> {
    let Ok(toks) = tokenize(template) else { return Vec::new() };
    let mut depth = 0usize;
    let mut out = Vec::new();
    for t in &toks {
        match t.text.as_str() {
            "[" => depth += 1,
            "]" => depth = depth.saturating_sub(1),
            _ if depth > 0 && t.kind == TokKind::Ident && !out.contains(&t.text) => out.push(t.text.clone()),
            _ => {}
        }
    }
    out
}

/// Identifiers referenced in `nest` that resolve outside it, in order of
/// first use; the flag says whether the identifier is ever called.
pub fn outer_references(nest: &AstNode) -> Vec<(String, bool)> {
    struct Walk {
        scopes: Vec<HashSet<String>>,
        out: Vec<(String, bool)>,
    }
    impl Walk {
        fn reference(&mut self, name: &str, called: bool) {
            if self.scopes.iter().any(|s| s.contains(name)) {
                return;
            }
            match self.out.iter_mut().find(|(n, _)| n == name) {
                Some(e) => e.1 |= called,
                None => self.out.push((name.to_string(), called)),
            }
        }

        fn visit(&mut self, n: &AstNode) {
            match n.kind {
                NodeKind::CompoundStmt | NodeKind::ForStmt => {
                    self.scopes.push(HashSet::new());
                    n.children.iter().for_each(|c| self.visit(c));
                    self.scopes.pop();
                }
                NodeKind::Declaration => {
                    n.children.iter().for_each(|c| self.visit(c));
                    if let (Some(d), Some(top)) = (&n.decl, self.scopes.last_mut()) {
                        top.extend(d.declarators.iter().filter_map(|d| d.name.clone()));
                        top.extend(d.enumerators.iter().cloned());
                    }
                }
                NodeKind::CallExpr => match n.children.split_first() {
                    Some((callee, rest)) if callee.kind == NodeKind::Identifier => {
                        self.reference(&callee.text, true);
                        rest.iter().for_each(|c| self.visit(c));
                    }
                    _ => n.children.iter().for_each(|c| self.visit(c)),
                },
                NodeKind::Identifier => self.reference(&n.text, false),
                _ => n.children.iter().for_each(|c| self.visit(c)),
            }
        }
    }
    let mut w = Walk { scopes: vec![HashSet::new()], out: Vec::new() };
    w.visit(nest);
    w.out
}

struct LocalDecl<'a> {
    declarator: &'a Declarator,
    storage: Storage,
}

/// Block-scope declarations visible at `target`, outermost first.
fn visible_locals<'a>(n: &'a AstNode, target: &SourceSpan, out: &mut Vec<LocalDecl<'a>>) {
    for c in &n.children {
        if c.span.contains(target) && c.span != *target {
            if n.kind == NodeKind::ForStmt {
                if let Some(init) = n.children.first().and_then(|i| i.decl.as_ref()) {
                    out.extend(init.declarators.iter().map(|d| LocalDecl { declarator: d, storage: init.storage }));
                }
            }
            visible_locals(c, target, out);
            return;
        }
        if n.kind == NodeKind::CompoundStmt && c.kind == NodeKind::Declaration && c.span.byte_end <= target.byte_start {
            if let Some(d) = &c.decl {
                out.extend(d.declarators.iter().map(|x| LocalDecl { declarator: x, storage: d.storage }));
            }
        }
    }
}

/// Resolves names at a point inside a function of a unit.
pub struct Resolver<'a> {
    unit: &'a AstNode,
    env: &'a HeaderEnv,
    at: SourceSpan,
    locals: Vec<LocalDecl<'a>>,
    params: Vec<&'a Declarator>,
    file_macros: HashSet<String>,
    arith_typedefs: HashSet<String>,
    opaque_names: HashSet<String>,
}

impl<'a> Resolver<'a> {
    pub fn new(unit: &'a AstNode, at: SourceSpan, env: &'a HeaderEnv) -> Self {
        let mut locals = Vec::new();
        let mut params = Vec::new();
        if let Some(f) = enclosing_function(unit, &at) {
            if let Some(ps) = f.decl.as_ref().and_then(|d| d.declarators.first()).and_then(|d| d.params.as_ref()) {
                params.extend(ps.iter());
            }
            visible_locals(f, &at, &mut locals);
        }
        let mut file_macros = HashSet::new();
        let mut arith_typedefs: HashSet<String> = LIBC_ARITHMETIC.iter().map(|s| s.to_string()).collect();
        let mut opaque_names = HashSet::new();
        for c in &unit.children {
            match c.kind {
                NodeKind::Declaration => {
                    let d = c.decl.as_ref().expect("declaration info");
                    if d.storage == Storage::Typedef {
                        for x in &d.declarators {
                            if let Some(n) = &x.name {
                                if is_primitive_template(&x.template, &arith_typedefs) && !x.template.contains('*') {
                                    arith_typedefs.insert(n.clone());
                                }
                            }
                        }
                    }
                }
                NodeKind::Other => {
                    c.walk(&mut |t| {
                        if t.is_leaf() {
                            opaque_names.insert(t.text.clone());
                        }
                    });
                }
                _ => {}
            }
        }
        // macros defined inside function bodies ahead of the nest
        unit.walk(&mut |n| {
            if n.kind == NodeKind::Directive && n.span.byte_start < at.byte_start && directive_name(&n.text) == "define"
            {
                if let Some(name) = macro_name(&n.text) {
                    file_macros.insert(name);
                }
            }
        });
        Resolver { unit, env, at, locals, params, file_macros, arith_typedefs, opaque_names }
    }

    fn symbol(&self, name: &str, category: SymbolCategory, d: Option<&Declarator>) -> SymbolInfo {
        let mut template = d.map(|d| d.template.clone()).unwrap_or_default();
        if category == SymbolCategory::Parameter {
            if let Some(t) = ctype::decay_array(&template) {
                template = t;
            }
        }
        let is_object = category.is_object();
        SymbolInfo {
            name: name.to_string(),
            category,
            declared_type: if template.is_empty() { String::new() } else { ctype::abstract_of(&template) },
            is_primitive: is_object && is_primitive_template(&template, &self.arith_typedefs),
            template,
            decl_span: d.map(|d| d.span),
            from_header: d.is_none(),
            defined_in_file: false,
            storage: Storage::None,
        }
    }

    pub fn resolve(&self, name: &str, called: bool) -> Result<SymbolInfo, SymbolError> {
        use SymbolCategory::*;
        if self.file_macros.contains(name) {
            return Ok(self.symbol(name, Macro, None));
        }
        if let Some(l) = self.locals.iter().rev().find(|l| l.declarator.name.as_deref() == Some(name)) {
            if l.storage != Storage::Extern {
                let cat = if l.storage == Storage::Typedef { TypedefName } else { Local };
                let mut s = self.symbol(name, cat, Some(l.declarator));
                s.storage = l.storage;
                return Ok(s);
            }
        }
        if let Some(p) = self.params.iter().find(|p| p.name.as_deref() == Some(name)) {
            return Ok(self.symbol(name, Parameter, Some(p)));
        }
        if let Some(s) = self.resolve_file_scope(name) {
            return Ok(s);
        }
        if self.opaque_names.contains(name) {
            return Err(SymbolError::UnknownSymbol(name.to_string()));
        }
        let env = self.env;
        let cat = if env.macros.contains(name) {
            Macro
        } else if env.typedefs.contains(name) {
            TypedefName
        } else if env.functions.contains(name) || name.starts_with("__builtin_") {
            Function
        } else if env.variables.contains(name) {
            GlobalVar
        } else if env.assume_headers {
            if called {
                Function
            } else {
                GlobalVar
            }
        } else {
            return Err(SymbolError::UnknownSymbol(name.to_string()));
        };
        Ok(self.symbol(name, cat, None))
    }

    fn resolve_file_scope(&self, name: &str) -> Option<SymbolInfo> {
        use SymbolCategory::*;
        let mut found: Vec<(&Declarator, Storage, bool)> = Vec::new();
        for c in &self.unit.children {
            let Some(d) = &c.decl else { continue };
            let before = c.span.byte_end <= self.at.byte_start;
            if before && d.enumerators.iter().any(|e| e == name) {
                return Some(self.symbol(name, EnumConstant, None)).map(|mut s| {
                    s.from_header = false;
                    s
                });
            }
            for x in &d.declarators {
                if x.name.as_deref() != Some(name) {
                    continue;
                }
                // functions may be declared anywhere; objects only before use
                if before || x.is_function() {
                    found.push((x, d.storage, c.kind == NodeKind::FunctionDef));
                }
            }
        }
        let (first, _, _) = *found.first()?;
        let any_static = found.iter().any(|(_, s, _)| *s == Storage::Static);
        let mut s = if found.iter().any(|(_, s, _)| *s == Storage::Typedef) {
            self.symbol(name, TypedefName, Some(first))
        } else if first.is_function() {
            self.symbol(name, if any_static { StaticFn } else { Function }, Some(first))
        } else {
            let def = found
                .iter()
                .find(|(_, st, _)| *st != Storage::Extern)
                .or_else(|| found.iter().find(|(x, _, _)| x.has_init));
            let chosen = def.unwrap_or(&found[0]);
            let mut s = self.symbol(name, if any_static { StaticVar } else { GlobalVar }, Some(chosen.0));
            s.defined_in_file = def.is_some();
            s.storage = chosen.1;
            s
        };
        s.from_header = false;
        Some(s)
    }
}

fn macro_name(directive: &str) -> Option<String> {
    let rest = directive.trim_start().trim_start_matches('#').trim_start().strip_prefix("define")?;
    let name: String = rest.trim_start().chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    (!name.is_empty()).then_some(name)
}

/// Symbols referenced by `nest` and declared outside it, followed by any
/// identifiers their array dimensions depend on.
pub fn collect_symbols(nest: &AstNode, unit: &AstNode) -> Result<Vec<SymbolInfo>, SymbolError> {
    collect_symbols_with(nest, unit, &HeaderEnv::default())
}

pub fn collect_symbols_with(nest: &AstNode, unit: &AstNode, env: &HeaderEnv) -> Result<Vec<SymbolInfo>, SymbolError> {
    let r = Resolver::new(unit, nest.span, env);
    let mut out: Vec<SymbolInfo> = Vec::new();
    for (name, called) in outer_references(nest) {
        out.push(r.resolve(&name, called)?);
    }
    let mut i = 0;
    while i < out.len() {
        if out[i].category.is_object() {
            for dep in dimension_identifiers(&out[i].template) {
                if !out.iter().any(|s| s.name == dep) {
                    out.push(r.resolve(&dep, false)?);
                }
            }
        }
        i += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{find_for_nests, parse_unit, FileId};
    use super::*;

    fn symbols(src: &str) -> Vec<SymbolInfo> {
        let t = parse_unit(src, FileId(0)).unwrap();
        let nests = find_for_nests(&t);
        collect_symbols(nests[0].root, &t).unwrap()
    }

    fn find<'a>(s: &'a [SymbolInfo], name: &str) -> &'a SymbolInfo {
        s.iter().find(|x| x.name == name).unwrap_or_else(|| panic!("{name} missing"))
    }

    #[test]
    fn loop_locals_are_excluded() {
        let s = symbols("void f(double *A, int n){ for(int i=0;i<n;i++){ double t = A[i]; A[i] = t*2; } }");
        let names: Vec<_> = s.iter().map(|x| x.name.as_str()).collect();
        assert_eq!(names, ["n", "A"]);
        let a = find(&s, "A");
        assert_eq!(a.category, SymbolCategory::Parameter);
        assert_eq!(a.declared_type, "double *");
        assert!(a.is_primitive);
    }

    #[test]
    fn header_functions() {
        let s = symbols("#include <math.h>\nvoid f(double *A){ for(int i=0;i<4;i++) A[i] = sqrt(A[i]); }");
        assert_eq!(find(&s, "sqrt").category, SymbolCategory::Function);
        assert!(find(&s, "sqrt").from_header);
    }

    #[test]
    fn file_static_variables() {
        let s = symbols("#define N 8\nstatic double tmp[N];\nint main(){ for(int i=0;i<N;i++) tmp[i]=i; return 0; }");
        assert_eq!(find(&s, "tmp").category, SymbolCategory::StaticVar);
        assert_eq!(find(&s, "N").category, SymbolCategory::Macro);
    }

    #[test]
    fn globals_and_static_functions() {
        let src = "double g[4]; extern int ext; static int h(int x){ return x; }\n\
                   int main(){ for(int i=0;i<4;i++) g[i] = h(i) + ext; return 0; }";
        let s = symbols(src);
        let g = find(&s, "g");
        assert_eq!((g.category, g.defined_in_file), (SymbolCategory::GlobalVar, true));
        let e = find(&s, "ext");
        assert_eq!((e.category, e.defined_in_file), (SymbolCategory::GlobalVar, false));
        assert_eq!(find(&s, "h").category, SymbolCategory::StaticFn);
    }

    #[test]
    fn array_parameters_decay_and_pull_dimensions() {
        let s = symbols("void f(int n, int m, double A[n][m]){ for(int i=0;i<n;i++) A[i][0] = 0; }");
        let a = find(&s, "A");
        assert_eq!(a.template, "double (*@)[m]");
        assert!(!a.is_primitive);
        assert!(s.iter().any(|x| x.name == "m"));
    }

    #[test]
    fn shadowing_inside_the_nest() {
        let s = symbols("void f(int x){ int y = 0; for(int i=0;i<3;i++){ int x = i; y += x; } }");
        let names: Vec<_> = s.iter().map(|x| x.name.as_str()).collect();
        assert_eq!(names, ["y"]);
        assert_eq!(find(&s, "y").category, SymbolCategory::Local);
    }

    #[test]
    fn unresolved_names_in_strict_mode() {
        let t = parse_unit("void f(){ for(int i=0;i<3;i++) mystery = i; }", FileId(0)).unwrap();
        let env = HeaderEnv { assume_headers: false, ..HeaderEnv::default() };
        let nests = find_for_nests(&t);
        assert_eq!(collect_symbols_with(nests[0].root, &t, &env), Err(SymbolError::UnknownSymbol("mystery".into())));
    }

    #[test]
    fn primitiveness() {
        let none = HashSet::new();
        assert!(is_primitive_template("double @", &none));
        assert!(is_primitive_template("const unsigned long *@", &none));
        assert!(!is_primitive_template("double **@", &none));
        assert!(!is_primitive_template("double @[4]", &none));
        assert!(!is_primitive_template("struct p @", &none));
        assert_eq!(dimension_identifiers("double (*@)[n][m+K]"), ["n", "m", "K"]);
    }
}
