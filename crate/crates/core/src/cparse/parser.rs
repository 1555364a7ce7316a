//! Recursive descent over the token stream.
//!
//! Every consumed token ends up as a leaf somewhere in the tree, so printing
//! the tree reproduces the token stream. Statements that fail to parse are
//! recovered as `Other` nodes spanning a balanced token range.

use std::collections::HashSet;

use super::ast::{AstNode, DeclInfo, Declarator, Derived, FileId, NodeKind, SourceSpan, Storage};
use super::ctype::{self, join_tokens, HOLE};
use super::lexer::{TokKind, Token};
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

const TYPE_KEYWORDS: &[&str] = &[
    "void",
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
    "_Imaginary",
    "__int128",
    "__builtin_va_list",
    "_Float128",
    "__float128",
    "_Float64",
    "_Float32",
];
const QUALIFIERS: &[&str] = &["const", "volatile", "restrict", "__restrict", "__restrict__", "__const", "__volatile__"];
const STORAGE: &[&str] = &["typedef", "extern", "static", "auto", "register", "_Thread_local", "__thread"];
const FN_SPECIFIERS: &[&str] = &["inline", "__inline", "__inline__", "_Noreturn"];
const ATTRIBUTES: &[&str] = &["__attribute__", "__attribute", "__declspec", "_Alignas", "__asm__", "__asm", "asm"];

struct Specifiers {
    storage: Storage,
    is_inline: bool,
    base: Vec<String>,
    tags_defined: Vec<String>,
    enumerators: Vec<String>,
    type_names: Vec<String>,
}

pub(super) struct Parser<'a> {
    toks: &'a [Token],
    src: &'a str,
    pos: usize,
    file: FileId,
    typedefs: HashSet<String>,
}

impl<'a> Parser<'a> {
    pub(super) fn new(toks: &'a [Token], src: &'a str, file: FileId, typedefs: HashSet<String>) -> Self {
        Parser { toks, src, pos: 0, file, typedefs }
    }

    // ---------------------------------------------------------------------
    // token helpers
    // ---------------------------------------------------------------------

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, off: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + off)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn line(&self) -> u32 {
        self.peek().or_else(|| self.toks.last()).map(|t| t.line_start).unwrap_or(1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(msg, self.line()))
    }

    fn tok_span(&self, i: usize) -> SourceSpan {
        let t = &self.toks[i];
        SourceSpan {
            file_id: self.file,
            byte_start: t.start,
            byte_end: t.end,
            line_start: t.line_start,
            line_end: t.line_end,
        }
    }

    /// Span of tokens `[from, self.pos)`; zero-width at the next token if empty.
    fn span_from(&self, from: usize) -> SourceSpan {
        if from < self.pos {
            let a = self.tok_span(from);
            let b = self.tok_span(self.pos - 1);
            a.cover(&b)
        } else if let Some(t) = self.toks.get(from) {
            SourceSpan {
                file_id: self.file,
                byte_start: t.start,
                byte_end: t.start,
                line_start: t.line_start,
                line_end: t.line_start,
            }
        } else {
            let (end, line) = self.toks.last().map(|t| (t.end, t.line_end)).unwrap_or((0, 1));
            SourceSpan { file_id: self.file, byte_start: end, byte_end: end, line_start: line, line_end: line }
        }
    }

    /// Consumes the current token as a leaf of `kind`.
    fn take(&mut self, kind: NodeKind) -> AstNode {
        let i = self.pos;
        self.pos += 1;
        let t = &self.toks[i];
        let kind = match t.kind {
            TokKind::Directive if t.is_pragma() => NodeKind::PragmaDirective,
            TokKind::Directive => NodeKind::Directive,
            _ => kind,
        };
        AstNode::leaf(kind, t.text.clone(), self.tok_span(i))
    }

    fn expect(&mut self, p: &str) -> PResult<AstNode> {
        if self.at_punct(p) {
            Ok(self.take(NodeKind::Token))
        } else {
            let found = self.peek().map(|t| t.text.as_str()).unwrap_or("end of file");
            self.err(format!("expected `{p}`, found `{found}`"))
        }
    }

    fn node(&self, kind: NodeKind, from: usize, children: Vec<AstNode>) -> AstNode {
        AstNode { kind, span: self.span_from(from), children, text: String::new(), decl: None }
    }

    fn is_typedef_name(&self, t: &Token) -> bool {
        t.kind == TokKind::Ident && self.typedefs.contains(&t.text)
    }

    // ---------------------------------------------------------------------
    // translation unit
    // ---------------------------------------------------------------------

    pub(super) fn translation_unit(&mut self) -> AstNode {
        let mut children = Vec::new();
        while let Some(t) = self.peek() {
            if t.kind == TokKind::Directive || t.is_punct(";") {
                children.push(self.take(NodeKind::Token));
                continue;
            }
            let start = self.pos;
            match self.declaration(true) {
                Ok(n) => children.push(n),
                Err(_) => {
                    self.pos = start;
                    children.push(self.recover());
                }
            }
        }
        let span = SourceSpan {
            file_id: self.file,
            byte_start: 0,
            byte_end: self.src.len(),
            line_start: 1,
            line_end: 1 + self.src.matches('\n').count() as u32,
        };
        AstNode { kind: NodeKind::TranslationUnit, span, children, text: self.src.to_string(), decl: None }
    }

    /// Skips a balanced token range ending at `;` or at a closing `}` and
    /// wraps it as an `Other` node.
    fn recover(&mut self) -> AstNode {
        let start = self.pos;
        let mut depth = 0usize;
        let mut leaves = Vec::new();
        while let Some(t) = self.peek() {
            if t.kind == TokKind::Punct {
                match t.text.as_str() {
                    "{" | "(" | "[" => depth += 1,
                    "}" | ")" | "]" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        let brace = t.text == "}";
                        leaves.push(self.take(NodeKind::Token));
                        if brace && depth == 0 {
                            break;
                        }
                        continue;
                    }
                    ";" if depth == 0 => {
                        leaves.push(self.take(NodeKind::Token));
                        break;
                    }
                    _ => {}
                }
            }
            leaves.push(self.take(NodeKind::Token));
        }
        if leaves.is_empty() && self.peek().is_some() {
            leaves.push(self.take(NodeKind::Token));
        }
        let text = leaves.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join(" ");
        let mut n = self.node(NodeKind::Other, start, leaves);
        n.text = text;
        n
    }

    // ---------------------------------------------------------------------
    // declarations
    // ---------------------------------------------------------------------

    fn is_decl_start(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        match t.kind {
            TokKind::Keyword => {
                let k = t.text.as_str();
                TYPE_KEYWORDS.contains(&k)
                    || QUALIFIERS.contains(&k)
                    || STORAGE.contains(&k)
                    || FN_SPECIFIERS.contains(&k)
                    || matches!(
                        k,
                        "struct"
                            | "union"
                            | "enum"
                            | "_Atomic"
                            | "__extension__"
                            | "typeof"
                            | "__typeof__"
                            | "__typeof"
                            | "__attribute__"
                            | "__attribute"
                            | "__declspec"
                            | "_Alignas"
                    )
            }
            TokKind::Ident => {
                let next = self.peek_at(1);
                if next.is_some_and(|n| n.is_punct(":")) {
                    return false;
                }
                if self.is_typedef_name(t) {
                    return !next.is_some_and(|n| {
                        n.kind == TokKind::Punct
                            && matches!(n.text.as_str(), "=" | "(" | "[" | "." | "->" | "++" | "--" | "," | ";" | ")")
                    });
                }
                // two identifiers in a row only occur in declarations
                next.is_some_and(|n| n.kind == TokKind::Ident)
            }
            _ => false,
        }
    }

    /// Consumes a balanced `( ... )` group as token leaves.
    fn group_leaves(&mut self, out: &mut Vec<AstNode>, text: &mut Vec<String>) -> PResult<()> {
        if !self.at_punct("(") {
            return Ok(());
        }
        let mut depth = 0usize;
        loop {
            let Some(t) = self.peek() else { return self.err("unterminated group") };
            if t.is_punct("(") {
                depth += 1;
            } else if t.is_punct(")") {
                depth -= 1;
            }
            text.push(t.text.clone());
            out.push(self.take(NodeKind::Token));
            if depth == 0 {
                return Ok(());
            }
        }
    }

    fn skip_attributes(&mut self, out: &mut Vec<AstNode>) -> PResult<()> {
        while let Some(t) = self.peek() {
            if t.kind == TokKind::Keyword && ATTRIBUTES.contains(&t.text.as_str()) {
                out.push(self.take(NodeKind::Token));
                self.group_leaves(out, &mut Vec::new())?;
            } else if t.is_keyword("__extension__") {
                out.push(self.take(NodeKind::Token));
            } else {
                break;
            }
        }
        Ok(())
    }

    fn specifiers(&mut self, out: &mut Vec<AstNode>) -> PResult<Specifiers> {
        let mut s = Specifiers {
            storage: Storage::None,
            is_inline: false,
            base: Vec::new(),
            tags_defined: Vec::new(),
            enumerators: Vec::new(),
            type_names: Vec::new(),
        };
        let mut saw_type = false;
        while let Some(t) = self.peek() {
            let text = t.text.as_str();
            match t.kind {
                TokKind::Keyword if STORAGE.contains(&text) => {
                    s.storage = match text {
                        "typedef" => Storage::Typedef,
                        "extern" => Storage::Extern,
                        "static" => Storage::Static,
                        "auto" => Storage::Auto,
                        "register" => Storage::Register,
                        _ => Storage::ThreadLocal,
                    };
                    out.push(self.take(NodeKind::Token));
                }
                TokKind::Keyword if FN_SPECIFIERS.contains(&text) => {
                    s.is_inline = true;
                    out.push(self.take(NodeKind::Token));
                }
                TokKind::Keyword if QUALIFIERS.contains(&text) => {
                    s.base.push(text.to_string());
                    out.push(self.take(NodeKind::Token));
                }
                TokKind::Keyword if TYPE_KEYWORDS.contains(&text) => {
                    s.base.push(text.to_string());
                    saw_type = true;
                    out.push(self.take(NodeKind::Token));
                }
                TokKind::Keyword if text == "_Atomic" => {
                    s.base.push(text.to_string());
                    out.push(self.take(NodeKind::Token));
                    if self.at_punct("(") {
                        self.group_leaves(out, &mut s.base)?;
                        saw_type = true;
                    }
                }
                TokKind::Keyword if matches!(text, "typeof" | "__typeof__" | "__typeof") => {
                    s.base.push(text.to_string());
                    out.push(self.take(NodeKind::Token));
                    self.group_leaves(out, &mut s.base)?;
                    saw_type = true;
                }
                TokKind::Keyword if matches!(text, "struct" | "union" | "enum") => {
                    self.tagged_type(out, &mut s)?;
                    saw_type = true;
                }
                TokKind::Keyword if ATTRIBUTES.contains(&text) || text == "__extension__" => {
                    self.skip_attributes(out)?;
                }
                TokKind::Ident if !saw_type => {
                    let next_ident = self.peek_at(1).is_some_and(|n| n.kind == TokKind::Ident);
                    if self.is_typedef_name(t) || next_ident {
                        s.base.push(text.to_string());
                        s.type_names.push(text.to_string());
                        saw_type = true;
                        out.push(self.take(NodeKind::Token));
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        if !saw_type && s.base.is_empty() && s.storage == Storage::None && !s.is_inline {
            return self.err("expected declaration specifiers");
        }
        if !saw_type {
            // implicit int (`static x;`, `unsigned`) is tolerated
            if s.base.is_empty() {
                s.base.push("int".into());
            }
        }
        Ok(s)
    }

    fn tagged_type(&mut self, out: &mut Vec<AstNode>, s: &mut Specifiers) -> PResult<()> {
        let kw = self.peek().map(|t| t.text.clone()).unwrap_or_default();
        out.push(self.take(NodeKind::Token));
        self.skip_attributes(out)?;
        s.base.push(kw.clone());
        let mut tag = None;
        if let Some(t) = self.peek().filter(|t| t.kind == TokKind::Ident) {
            tag = Some(t.text.clone());
            s.base.push(t.text.clone());
            out.push(self.take(NodeKind::Token));
        }
        if !self.at_punct("{") {
            if tag.is_none() {
                return self.err(format!("expected tag or body after `{kw}`"));
            }
            return Ok(());
        }
        if let Some(tag) = tag {
            s.tags_defined.push(tag);
        }
        s.base.push("{".into());
        out.push(self.take(NodeKind::Token));
        if kw == "enum" {
            while !self.at_punct("}") {
                let Some(t) = self.peek() else { return self.err("unterminated enum") };
                if t.kind != TokKind::Ident {
                    return self.err("expected enumerator");
                }
                s.enumerators.push(t.text.clone());
                s.base.push(t.text.clone());
                out.push(self.take(NodeKind::Token));
                if self.at_punct("=") {
                    s.base.push("=".into());
                    out.push(self.take(NodeKind::Token));
                    let e = self.expr_until(&[",", "}"])?;
                    collect_texts(&e, &mut s.base);
                    out.push(e);
                }
                if self.at_punct(",") {
                    s.base.push(",".into());
                    out.push(self.take(NodeKind::Token));
                }
            }
        } else {
            let mut depth = 0usize;
            while let Some(t) = self.peek() {
                if t.is_punct("{") {
                    depth += 1;
                } else if t.is_punct("}") {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                }
                s.base.push(t.text.clone());
                out.push(self.take(NodeKind::Token));
            }
        }
        s.base.push("}".into());
        out.push(self.expect("}")?);
        Ok(())
    }

    /// Parses a declaration, or with `allow_fn_def` a function definition.
    pub(super) fn declaration(&mut self, allow_fn_def: bool) -> PResult<AstNode> {
        let start = self.pos;
        let mut leaves = Vec::new();
        let spec = self.specifiers(&mut leaves)?;
        let base = join_tokens(&spec.base);
        let mut declarators = Vec::new();

        if self.at_punct(";") {
            leaves.push(self.take(NodeKind::Token));
        } else {
            loop {
                let d = self.declarator(&mut leaves, false, &base)?;
                self.skip_attributes(&mut leaves)?;
                if allow_fn_def && declarators.is_empty() && d.is_function() && self.at_punct("{") {
                    let header_text = self.src[self.toks[start].start..self.toks[self.pos - 1].end].to_string();
                    let body = self.compound()?;
                    leaves.push(body);
                    let mut n = self.node(NodeKind::FunctionDef, start, leaves);
                    n.decl = Some(Box::new(DeclInfo {
                        storage: spec.storage,
                        is_inline: spec.is_inline,
                        base_type: base,
                        declarators: vec![d],
                        tags_defined: spec.tags_defined,
                        enumerators: spec.enumerators,
                        type_names: spec.type_names,
                        header_text: Some(header_text),
                    }));
                    return Ok(n);
                }
                let mut d = d;
                if self.at_punct("=") {
                    leaves.push(self.take(NodeKind::Token));
                    let init = self.expr_until(&[",", ";"])?;
                    leaves.push(init);
                    d.has_init = true;
                }
                declarators.push(d);
                if self.at_punct(",") {
                    leaves.push(self.take(NodeKind::Token));
                    continue;
                }
                leaves.push(self.expect(";")?);
                break;
            }
        }
        if spec.storage == Storage::Typedef {
            for d in &declarators {
                if let Some(n) = &d.name {
                    self.typedefs.insert(n.clone());
                }
            }
        }
        let mut n = self.node(NodeKind::Declaration, start, leaves);
        n.decl = Some(Box::new(DeclInfo {
            storage: spec.storage,
            is_inline: spec.is_inline,
            base_type: base,
            declarators,
            tags_defined: spec.tags_defined,
            enumerators: spec.enumerators,
            type_names: spec.type_names,
            header_text: None,
        }));
        Ok(n)
    }

    fn nested_declarator_follows(&self, abstract_ok: bool) -> bool {
        let Some(n) = self.peek_at(1) else { return false };
        match n.kind {
            TokKind::Punct => matches!(n.text.as_str(), "*" | "^" | "("),
            TokKind::Ident => !abstract_ok || !self.is_typedef_name(n),
            TokKind::Keyword => ATTRIBUTES.contains(&n.text.as_str()),
            _ => false,
        }
    }

    fn declarator(&mut self, out: &mut Vec<AstNode>, abstract_ok: bool, base: &str) -> PResult<Declarator> {
        let start = self.pos;
        let mut tmpl: Vec<String> = Vec::new();
        let mut ptrs = 0usize;
        while self.at_punct("*") || self.at_punct("^") {
            tmpl.push("*".into());
            out.push(self.take(NodeKind::Token));
            ptrs += 1;
            while let Some(t) = self.peek() {
                if t.kind == TokKind::Keyword && QUALIFIERS.contains(&t.text.as_str()) {
                    tmpl.push(t.text.clone());
                    out.push(self.take(NodeKind::Token));
                } else if t.kind == TokKind::Keyword && ATTRIBUTES.contains(&t.text.as_str()) {
                    self.skip_attributes(out)?;
                } else {
                    break;
                }
            }
        }
        self.skip_attributes(out)?;

        let mut name = None;
        let mut inner_derived = Vec::new();
        let mut dim_idents = Vec::new();
        let mut params = None;
        let t = self.peek();
        if t.is_some_and(|t| t.kind == TokKind::Ident && !(abstract_ok && self.is_typedef_name(t))) {
            name = Some(t.unwrap().text.clone());
            tmpl.push(HOLE.into());
            out.push(self.take(NodeKind::Token));
        } else if self.at_punct("(") && self.nested_declarator_follows(abstract_ok) {
            tmpl.push("(".into());
            out.push(self.take(NodeKind::Token));
            let inner = self.declarator(out, abstract_ok, "")?;
            out.push(self.expect(")")?);
            tmpl.extend(template_tokens(&inner.template));
            tmpl.push(")".into());
            name = inner.name;
            inner_derived = inner.derived;
            dim_idents = inner.dim_idents;
            params = inner.params;
        } else if abstract_ok {
            tmpl.push(HOLE.into());
        } else {
            return self.err("expected declarator");
        }

        let mut suffix = Vec::new();
        loop {
            if self.at_punct("[") {
                tmpl.push("[".into());
                out.push(self.take(NodeKind::Token));
                let mut dim = Vec::new();
                if !self.at_punct("]") {
                    let e = self.expr_until(&["]"])?;
                    collect_texts(&e, &mut dim);
                    e.walk(&mut |n| {
                        if n.kind == NodeKind::Identifier && !dim_idents.contains(&n.text) {
                            dim_idents.push(n.text.clone());
                        }
                    });
                    out.push(e);
                }
                out.push(self.expect("]")?);
                suffix.push(Derived::Array(join_tokens(&dim)));
                tmpl.extend(dim);
                tmpl.push("]".into());
            } else if self.at_punct("(") {
                tmpl.push("(".into());
                out.push(self.take(NodeKind::Token));
                let list = self.param_list(out, &mut tmpl)?;
                out.push(self.expect(")")?);
                tmpl.push(")".into());
                if inner_derived.is_empty() && suffix.is_empty() {
                    params = Some(list);
                }
                suffix.push(Derived::Function);
            } else if self.peek().is_some_and(|t| t.kind == TokKind::Keyword && ATTRIBUTES.contains(&t.text.as_str())) {
                self.skip_attributes(out)?;
            } else {
                break;
            }
        }
        let mut derived = inner_derived;
        derived.extend(suffix);
        derived.extend(std::iter::repeat_n(Derived::Pointer, ptrs));

        let template = if base.is_empty() {
            join_tokens(&tmpl)
        } else {
            let mut all = template_tokens(base);
            all.extend(tmpl);
            join_tokens(&all)
        };
        Ok(Declarator { name, template, derived, params, dim_idents, has_init: false, span: self.span_from(start) })
    }

    fn param_list(&mut self, out: &mut Vec<AstNode>, tmpl: &mut Vec<String>) -> PResult<Vec<Declarator>> {
        let mut list = Vec::new();
        if self.at_punct(")") {
            return Ok(list);
        }
        loop {
            if self.at_punct("...") {
                tmpl.push("...".into());
                out.push(self.take(NodeKind::Token));
            } else {
                let spec = self.specifiers(out)?;
                let base = join_tokens(&spec.base);
                let d = self.declarator(out, true, &base)?;
                let shown = match &d.name {
                    Some(n) => ctype::substitute(&d.template, n),
                    None => ctype::abstract_of(&d.template),
                };
                tmpl.extend(template_tokens(&shown));
                list.push(d);
            }
            if self.at_punct(",") {
                tmpl.push(",".into());
                out.push(self.take(NodeKind::Token));
                continue;
            }
            break;
        }
        // `(void)` declares no parameters
        if list.len() == 1 && list[0].name.is_none() && list[0].template.trim() == "void @" {
            list.clear();
        }
        Ok(list)
    }

    // ---------------------------------------------------------------------
    // expressions
    // ---------------------------------------------------------------------

    /// Flat expression up to (not including) one of `stops` at nesting depth 0.
    pub(super) fn expr_until(&mut self, stops: &[&str]) -> PResult<AstNode> {
        let start = self.pos;
        let mut children = Vec::new();
        loop {
            let Some(t) = self.peek() else { return self.err("unexpected end of file in expression") };
            match t.kind {
                TokKind::Punct if stops.contains(&t.text.as_str()) => break,
                TokKind::Punct if matches!(t.text.as_str(), ")" | "]" | "}") => {
                    return self.err(format!("unbalanced `{}`", t.text));
                }
                TokKind::Punct if matches!(t.text.as_str(), "(" | "[" | "{") => {
                    let close = match t.text.as_str() {
                        "(" => ")",
                        "[" => "]",
                        _ => "}",
                    };
                    children.push(self.take(NodeKind::Token));
                    let inner = self.expr_until(&[close])?;
                    children.push(inner);
                    children.push(self.expect(close)?);
                }
                TokKind::Ident => {
                    let prev = self.pos.checked_sub(1).map(|i| &self.toks[i]);
                    let member = prev.is_some_and(|p| p.is_punct(".") || p.is_punct("->"));
                    if member {
                        children.push(self.take(NodeKind::Token));
                    } else if self.peek_at(1).is_some_and(|n| n.is_punct("(")) {
                        let call_start = self.pos;
                        let callee = self.take(NodeKind::Identifier);
                        let open = self.take(NodeKind::Token);
                        let args = self.expr_until(&[")"])?;
                        let close = self.expect(")")?;
                        children.push(self.node(NodeKind::CallExpr, call_start, vec![callee, open, args, close]));
                    } else {
                        children.push(self.take(NodeKind::Identifier));
                    }
                }
                TokKind::Keyword if matches!(t.text.as_str(), "struct" | "union" | "enum") => {
                    children.push(self.take(NodeKind::Token));
                    if self.peek().is_some_and(|n| n.kind == TokKind::Ident) {
                        children.push(self.take(NodeKind::Token));
                    }
                }
                TokKind::Directive => return self.err("preprocessor line inside expression"),
                _ => children.push(self.take(NodeKind::Token)),
            }
        }
        Ok(self.node(NodeKind::Expr, start, children))
    }

    // ---------------------------------------------------------------------
    // statements
    // ---------------------------------------------------------------------

    fn compound(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect("{")?;
        let mut children = Vec::new();
        loop {
            if self.at_punct("}") {
                break;
            }
            if self.peek().is_none() {
                return self.err("unterminated block");
            }
            let s = self.pos;
            match self.statement() {
                Ok(n) => children.push(n),
                Err(_) => {
                    self.pos = s;
                    children.push(self.recover());
                }
            }
        }
        self.expect("}")?;
        Ok(self.node(NodeKind::CompoundStmt, start, children))
    }

    fn statement(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let Some(t) = self.peek() else { return self.err("expected statement") };
        if t.kind == TokKind::Directive {
            return Ok(self.take(NodeKind::Directive));
        }
        if t.is_punct("{") {
            return self.compound();
        }
        if t.is_punct(";") {
            self.pos += 1;
            return Ok(self.node(NodeKind::ExprStmt, start, Vec::new()));
        }
        if t.kind == TokKind::Ident && self.peek_at(1).is_some_and(|n| n.is_punct(":")) {
            let label = t.text.clone();
            self.pos += 2;
            let mut n = self.node(NodeKind::LabelStmt, start, Vec::new());
            n.text = label;
            return Ok(n);
        }
        if t.kind == TokKind::Keyword {
            match t.text.as_str() {
                "for" => return self.for_stmt(),
                "while" => {
                    self.pos += 1;
                    self.expect("(")?;
                    let cond = self.expr_until(&[")"])?;
                    self.expect(")")?;
                    let body = self.statement()?;
                    return Ok(self.node(NodeKind::WhileStmt, start, vec![cond, body]));
                }
                "do" => {
                    self.pos += 1;
                    let body = self.statement()?;
                    if !self.at_keyword("while") {
                        return self.err("expected `while` after do-body");
                    }
                    self.pos += 1;
                    self.expect("(")?;
                    let cond = self.expr_until(&[")"])?;
                    self.expect(")")?;
                    self.expect(";")?;
                    let mut n = self.node(NodeKind::WhileStmt, start, vec![body, cond]);
                    n.text = "do".into();
                    return Ok(n);
                }
                "if" => {
                    self.pos += 1;
                    self.expect("(")?;
                    let cond = self.expr_until(&[")"])?;
                    self.expect(")")?;
                    let then = self.statement()?;
                    let mut children = vec![cond, then];
                    if self.at_keyword("else") {
                        self.pos += 1;
                        children.push(self.statement()?);
                    }
                    return Ok(self.node(NodeKind::IfStmt, start, children));
                }
                "return" => {
                    self.pos += 1;
                    let e = self.expr_until(&[";"])?;
                    self.expect(";")?;
                    return Ok(self.node(NodeKind::ReturnStmt, start, vec![e]));
                }
                "goto" => {
                    self.pos += 1;
                    let label = match self.peek() {
                        Some(l) if l.kind == TokKind::Ident => l.text.clone(),
                        _ => return self.err("expected label after goto"),
                    };
                    self.pos += 1;
                    self.expect(";")?;
                    let mut n = self.node(NodeKind::GotoStmt, start, Vec::new());
                    n.text = label;
                    return Ok(n);
                }
                "break" | "continue" => {
                    let kind = if t.text == "break" { NodeKind::BreakStmt } else { NodeKind::ContinueStmt };
                    self.pos += 1;
                    self.expect(";")?;
                    return Ok(self.node(kind, start, Vec::new()));
                }
                // outside the subset: kept verbatim
                "switch" | "case" | "default" | "asm" | "__asm__" | "__asm" | "_Static_assert" => {
                    return Ok(self.recover());
                }
                _ => {}
            }
        }
        if self.is_decl_start() {
            return self.declaration(false);
        }
        let e = self.expr_until(&[";"])?;
        self.expect(";")?;
        Ok(self.node(NodeKind::ExprStmt, start, vec![e]))
    }

    fn for_stmt(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        self.expect("(")?;
        let init = if self.is_decl_start() {
            self.declaration(false)?
        } else {
            let e = self.expr_until(&[";"])?;
            self.expect(";")?;
            e
        };
        let cond = self.expr_until(&[";"])?;
        self.expect(";")?;
        let step = self.expr_until(&[")"])?;
        self.expect(")")?;
        let body = self.statement()?;
        Ok(self.node(NodeKind::ForStmt, start, vec![init, cond, step, body]))
    }
}

fn template_tokens(s: &str) -> Vec<String> {
    super::lexer::tokenize(s).map(|v| v.into_iter().map(|t| t.text).collect()).unwrap_or_default()
}

fn collect_texts(n: &AstNode, out: &mut Vec<String>) {
    if n.children.is_empty() && n.kind != NodeKind::Expr {
        out.push(n.text.clone());
    }
    for c in &n.children {
        collect_texts(c, out);
    }
}
