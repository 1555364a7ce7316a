//! Lexer, parser and printable syntax tree for the C subset the extractor
//! rewrites.
//!
//! Type information is carried as declaration text (see [`ctype`]); there is
//! no semantic type system. Constructs outside the subset are preserved as
//! [`NodeKind::Other`] and make enclosing loop nests ineligible.

pub mod ast;
pub mod ctype;
pub mod lexer;
mod parser;
pub mod symbols;

use std::collections::HashSet;

pub use ast::{AstNode, DeclInfo, Declarator, Derived, FileId, NodeKind, SourceSpan, Storage};
pub use symbols::{collect_symbols, SymbolCategory, SymbolError, SymbolInfo};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: u32,
}

impl ParseError {
    pub fn new(message: impl Into<String>, line: u32) -> Self {
        ParseError { message: message.into(), line }
    }
}

/// Typedef names every hosted C environment provides.
pub const LIBC_TYPEDEFS: &[&str] = &[
    "size_t",
    "ssize_t",
    "ptrdiff_t",
    "intptr_t",
    "uintptr_t",
    "intmax_t",
    "uintmax_t",
    "int8_t",
    "int16_t",
    "int32_t",
    "int64_t",
    "uint8_t",
    "uint16_t",
    "uint32_t",
    "uint64_t",
    "int_fast8_t",
    "int_fast16_t",
    "int_fast32_t",
    "int_fast64_t",
    "uint_fast8_t",
    "uint_fast16_t",
    "uint_fast32_t",
    "uint_fast64_t",
    "int_least8_t",
    "int_least16_t",
    "int_least32_t",
    "int_least64_t",
    "uint_least8_t",
    "uint_least16_t",
    "uint_least32_t",
    "uint_least64_t",
    "wchar_t",
    "bool",
    "FILE",
    "va_list",
    "off_t",
    "time_t",
    "clock_t",
    "div_t",
    "ldiv_t",
    "pthread_t",
    "omp_lock_t",
    "omp_nest_lock_t",
    "fpos_t",
    "sig_atomic_t",
    "float_t",
    "double_t",
    "mode_t",
    "pid_t",
    "uid_t",
    "gid_t",
];

/// Arithmetic typedef names among [`LIBC_TYPEDEFS`].
pub const LIBC_ARITHMETIC: &[&str] = &[
    "size_t",
    "ssize_t",
    "ptrdiff_t",
    "intptr_t",
    "uintptr_t",
    "intmax_t",
    "uintmax_t",
    "int8_t",
    "int16_t",
    "int32_t",
    "int64_t",
    "uint8_t",
    "uint16_t",
    "uint32_t",
    "uint64_t",
    "int_fast8_t",
    "int_fast16_t",
    "int_fast32_t",
    "int_fast64_t",
    "uint_fast8_t",
    "uint_fast16_t",
    "uint_fast32_t",
    "uint_fast64_t",
    "int_least8_t",
    "int_least16_t",
    "int_least32_t",
    "int_least64_t",
    "uint_least8_t",
    "uint_least16_t",
    "uint_least32_t",
    "uint_least64_t",
    "wchar_t",
    "bool",
    "off_t",
    "time_t",
    "clock_t",
    "float_t",
    "double_t",
    "sig_atomic_t",
];

/// Names declared by the headers a file includes.
///
/// Built from the default compiler's preprocessor output when available.
/// Without it (`assume_headers`), identifiers with no visible declaration are
/// taken to come from an included header.
#[derive(Debug, Clone)]
pub struct HeaderEnv {
    pub typedefs: HashSet<String>,
    pub functions: HashSet<String>,
    pub variables: HashSet<String>,
    pub macros: HashSet<String>,
    pub assume_headers: bool,
}

impl Default for HeaderEnv {
    fn default() -> Self {
        HeaderEnv {
            typedefs: LIBC_TYPEDEFS.iter().map(|s| s.to_string()).collect(),
            functions: HashSet::new(),
            variables: HashSet::new(),
            macros: HashSet::new(),
            assume_headers: true,
        }
    }
}

impl HeaderEnv {
    /// From `cc -E` output and `cc -E -dM` macro definitions. The user file's
    /// own names end up here too, which is harmless: its declarations take
    /// precedence during resolution.
    pub fn from_preprocessed(preprocessed: &str, macro_defs: &str) -> Self {
        let mut env = HeaderEnv { assume_headers: false, ..HeaderEnv::default() };
        for line in macro_defs.lines() {
            if let Some(rest) = line.trim_start().strip_prefix("#define") {
                let name: String =
                    rest.trim_start().chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
                if !name.is_empty() {
                    env.macros.insert(name);
                }
            }
        }
        let Ok(toks) = lexer::tokenize(preprocessed) else { return env };
        let mut p = parser::Parser::new(&toks, preprocessed, FileId(u32::MAX), env.typedefs.clone());
        let tu = p.translation_unit();
        for n in &tu.children {
            let Some(d) = &n.decl else { continue };
            env.variables.extend(d.enumerators.iter().cloned());
            for decl in &d.declarators {
                let Some(name) = decl.name.clone() else { continue };
                if d.storage == Storage::Typedef {
                    env.typedefs.insert(name);
                } else if decl.is_function() {
                    env.functions.insert(name);
                } else {
                    env.variables.insert(name);
                }
            }
        }
        env
    }
}

/// Parses a file with no header knowledge beyond common libc typedefs.
pub fn parse_unit(source: &str, file_id: FileId) -> Result<AstNode, ParseError> {
    parse_unit_with(source, file_id, &HeaderEnv::default())
}

pub fn parse_unit_with(source: &str, file_id: FileId, env: &HeaderEnv) -> Result<AstNode, ParseError> {
    let toks = lexer::tokenize(source)?;
    check_braces(&toks)?;
    let mut p = parser::Parser::new(&toks, source, file_id, env.typedefs.clone());
    Ok(p.translation_unit())
}

fn check_braces(toks: &[lexer::Token]) -> Result<(), ParseError> {
    let mut open: Vec<u32> = Vec::new();
    for t in toks {
        if t.is_punct("{") {
            open.push(t.line_start);
        } else if t.is_punct("}") && open.pop().is_none() {
            return Err(ParseError::new("unmatched `}` at file scope", t.line_start));
        }
    }
    match open.last() {
        Some(line) => Err(ParseError::new("unclosed `{` at file scope", *line)),
        None => Ok(()),
    }
}

/// An outermost `for` loop inside a function body.
#[derive(Debug, Clone, Copy)]
pub struct NestRef<'a> {
    pub root: &'a AstNode,
    pub enclosing_fn: &'a str,
    /// Position among all nests of the file, in source order.
    pub ordinal: usize,
}

pub fn find_for_nests(unit: &AstNode) -> Vec<NestRef<'_>> {
    fn go<'a>(n: &'a AstNode, fname: &'a str, out: &mut Vec<NestRef<'a>>) {
        if n.kind == NodeKind::ForStmt {
            out.push(NestRef { root: n, enclosing_fn: fname, ordinal: out.len() });
            return;
        }
        for c in &n.children {
            go(c, fname, out);
        }
    }
    let mut out = Vec::new();
    for f in unit.children.iter().filter(|c| c.kind == NodeKind::FunctionDef) {
        let name = function_name(f).unwrap_or("");
        go(f, name, &mut out);
    }
    out
}

pub fn function_name(f: &AstNode) -> Option<&str> {
    f.decl.as_ref()?.declarators.first()?.name.as_deref()
}

/// The top-level function definition containing `span`.
pub fn enclosing_function<'a>(unit: &'a AstNode, span: &SourceSpan) -> Option<&'a AstNode> {
    unit.children.iter().find(|c| c.kind == NodeKind::FunctionDef && c.span.contains(span))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> AstNode {
        parse_unit(src, FileId(0)).unwrap()
    }

    fn count(n: &AstNode, kind: NodeKind) -> usize {
        let mut k = 0;
        n.walk(&mut |m| k += usize::from(m.kind == kind));
        k
    }

    fn round_trips(src: &str) {
        let a = parse(src);
        let printed = a.print();
        let b = parse(&printed);
        assert!(a.same_shape(&b), "round trip changed shape:\n{printed}");
    }

    #[test]
    fn minimal_function_with_loop() {
        let t = parse("int main(){for(int i=0;i<4;i++) s+=i; return 0;}");
        assert_eq!(count(&t, NodeKind::FunctionDef), 1);
        assert_eq!(count(&t, NodeKind::ForStmt), 1);
        let f = t.children.iter().find(|c| c.kind == NodeKind::ForStmt);
        assert!(f.is_none(), "for must be nested in the function");
    }

    #[test]
    fn goto_and_label() {
        let t = parse("int f(){goto L; L: return 1;}");
        assert_eq!(count(&t, NodeKind::GotoStmt), 1);
        assert_eq!(count(&t, NodeKind::LabelStmt), 1);
        let mut label = String::new();
        t.walk(&mut |n| {
            if n.kind == NodeKind::LabelStmt {
                label = n.text.clone();
            }
        });
        assert_eq!(label, "L");
    }

    #[test]
    fn for_slots_are_always_four() {
        let t = parse("void f(int n){ for(;;) break; for(n=0;;) {} for(int i=0;i<n;) n--; }");
        t.walk(&mut |n| {
            if n.kind == NodeKind::ForStmt {
                assert_eq!(n.children.len(), 4);
            }
        });
        assert_eq!(count(&t, NodeKind::ForStmt), 3);
    }

    #[test]
    fn nests_are_outermost_and_ordered() {
        let src = "void f(){ for(;;){ for(;;){ for(;;){} } } }\n\
                   int main(){ for(;;){} while(1){ for(;;){} } return 0; }";
        let t = parse(src);
        let nests = find_for_nests(&t);
        assert_eq!(nests.len(), 3);
        assert_eq!(nests.iter().map(|n| n.enclosing_fn).collect::<Vec<_>>(), ["f", "main", "main"]);
        assert_eq!(nests.iter().map(|n| n.ordinal).collect::<Vec<_>>(), [0, 1, 2]);
        assert!(nests.windows(2).all(|w| w[0].root.span.byte_start < w[1].root.span.byte_start));
    }

    #[test]
    fn loop_free_input_has_no_nests() {
        assert!(find_for_nests(&parse("int x; int main(){ return x; }")).is_empty());
    }

    #[test]
    fn unbalanced_braces_are_errors() {
        assert!(parse_unit("int main(){ return 0;", FileId(0)).is_err());
        assert!(parse_unit("int main(){ return 0;}}", FileId(0)).is_err());
    }

    #[test]
    fn unsupported_statements_degrade_to_other() {
        let t = parse("int f(int x){ for(int i=0;i<3;i++){ switch(x){case 1: x++; break;} } return x; }");
        assert_eq!(count(&t, NodeKind::Other), 1);
        assert_eq!(count(&t, NodeKind::ForStmt), 1);
    }

    #[test]
    fn declarator_templates() {
        let t = parse("double (*p)[N]; const char *s, **v; int f(double A[n][m], int n);");
        let decls: Vec<&Declarator> =
            t.children.iter().filter_map(|c| c.decl.as_ref()).flat_map(|d| d.declarators.iter()).collect();
        assert_eq!(decls[0].template, "double (*@)[N]");
        assert_eq!(decls[0].derived, [Derived::Pointer, Derived::Array("N".into())]);
        assert_eq!(decls[1].template, "const char *@");
        assert_eq!(decls[2].template, "const char **@");
        assert!(decls[3].is_function());
        let params = decls[3].params.as_ref().unwrap();
        assert_eq!(params[0].template, "double @[n][m]");
        assert_eq!(params[0].dim_idents, ["n", "m"]);
        assert_eq!(decls[3].template, "int @(double A[n][m], int n)");
    }

    #[test]
    fn typedefs_and_structs() {
        let src = "typedef struct { double x, y; } point;\nstruct cell { int v; };\n\
                   point pts[10]; struct cell *c;\nint main(void){ point q; q.x = pts[0].y; return 0; }";
        let t = parse(src);
        let d = t.children[0].decl.as_ref().unwrap();
        assert_eq!(d.storage, Storage::Typedef);
        assert_eq!(d.declarators[0].name.as_deref(), Some("point"));
        let d = t.children[2].decl.as_ref().unwrap();
        assert_eq!(d.declarators[0].template, "point @[10]");
        assert_eq!(d.type_names, ["point"]);
        round_trips(src);
    }

    #[test]
    fn round_trip_various() {
        round_trips("#include <stdio.h>\n#define N 10\nint a[N];\nint main(){ int i; \n#pragma omp parallel for\nfor(i=0;i<N;i++) a[i]=i*2; do { i--; } while(i>0); if (i) i=1; else { i=2; } printf(\"%d\\n\", a[3]); return 0; }");
        round_trips("static inline double sq(double x){ return x*x; }\nenum { A = 1, B = A + 2 };\nvoid g(double (*m)[4], int n, ...);");
    }

    #[test]
    fn spans_nest_in_parents() {
        let src = "int main(){ int s=0; for(int i=0;i<4;i++){ for(int j=0;j<i;j++) s+=j; } return s; }";
        let t = parse(src);
        fn check(n: &AstNode) {
            assert!(n.span.byte_start <= n.span.byte_end);
            assert!(n.span.line_start <= n.span.line_end);
            for c in &n.children {
                assert!(n.span.contains(&c.span), "{:?} not inside {:?}", c.kind, n.kind);
                check(c);
            }
        }
        check(&t);
    }
}
