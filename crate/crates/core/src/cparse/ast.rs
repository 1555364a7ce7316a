use std::fmt::Write as _;

/// Opaque handle for an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FileId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file_id: FileId,
    pub byte_start: usize,
    pub byte_end: usize,
    /// 1-based
    pub line_start: u32,
    pub line_end: u32,
}

impl SourceSpan {
    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.file_id == other.file_id && self.byte_start <= other.byte_start && other.byte_end <= self.byte_end
    }

    pub fn overlaps(&self, other: &SourceSpan) -> bool {
        self.file_id == other.file_id && self.byte_start < other.byte_end && other.byte_start < self.byte_end
    }

    pub fn cover(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file_id: self.file_id,
            byte_start: self.byte_start.min(other.byte_start),
            byte_end: self.byte_end.max(other.byte_end),
            line_start: self.line_start.min(other.line_start),
            line_end: self.line_end.max(other.line_end),
        }
    }

    pub fn lines(&self) -> u32 {
        self.line_end - self.line_start + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    TranslationUnit,
    FunctionDef,
    Declaration,
    ForStmt,
    /// `while` and `do ... while`; the latter has `text == "do"`.
    WhileStmt,
    IfStmt,
    CompoundStmt,
    ExprStmt,
    ReturnStmt,
    GotoStmt,
    LabelStmt,
    BreakStmt,
    ContinueStmt,
    PragmaDirective,
    /// Any non-pragma preprocessor line.
    Directive,
    CallExpr,
    Identifier,
    /// Flat token sequence of an expression; calls are nested as `CallExpr`.
    Expr,
    /// Leaf token that is not an identifier reference.
    Token,
    /// Unsupported region; children are its verbatim tokens.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Storage {
    None,
    Typedef,
    Extern,
    Static,
    Auto,
    Register,
    ThreadLocal,
}

/// One step of a declarator's type derivation, outermost first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derived {
    Pointer,
    Array(String),
    Function,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declarator {
    /// `None` for abstract declarators (unnamed parameters).
    pub name: Option<String>,
    /// Full declaration with the name replaced by `@`, e.g. `double (*@)[N]`.
    pub template: String,
    pub derived: Vec<Derived>,
    /// Parameter list when the outermost derivation is a function.
    pub params: Option<Vec<Declarator>>,
    /// Identifiers appearing inside array dimensions.
    pub dim_idents: Vec<String>,
    pub has_init: bool,
    pub span: SourceSpan,
}

impl Declarator {
    pub fn is_function(&self) -> bool {
        matches!(self.derived.first(), Some(Derived::Function))
    }

    pub fn is_array(&self) -> bool {
        matches!(self.derived.first(), Some(Derived::Array(_)))
    }

    /// Type text without the name, e.g. `double (*)[N]`.
    pub fn type_text(&self) -> String {
        super::ctype::abstract_of(&self.template)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclInfo {
    pub storage: Storage,
    pub is_inline: bool,
    /// Specifiers without storage class, e.g. `const double`.
    pub base_type: String,
    pub declarators: Vec<Declarator>,
    /// struct/union/enum tags given a body in this declaration.
    pub tags_defined: Vec<String>,
    pub enumerators: Vec<String>,
    /// Identifiers used as type names in the specifiers.
    pub type_names: Vec<String>,
    /// For function definitions: the source text of the header (up to the body).
    pub header_text: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: SourceSpan,
    pub children: Vec<AstNode>,
    /// Verbatim token text for leaf and opaque nodes; for statements with a
    /// name (goto/label) the label; for `TranslationUnit` the original source.
    pub text: String,
    pub decl: Option<Box<DeclInfo>>,
}

impl AstNode {
    pub fn leaf(kind: NodeKind, text: impl Into<String>, span: SourceSpan) -> Self {
        AstNode { kind, span, children: Vec::new(), text: text.into(), decl: None }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Identifier | NodeKind::Token | NodeKind::Directive | NodeKind::PragmaDirective)
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a AstNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Pre-order traversal that also passes the ancestor chain (outermost first).
    pub fn walk_with_ancestors<'a>(&'a self, f: &mut dyn FnMut(&'a AstNode, &[&'a AstNode])) {
        fn go<'a>(n: &'a AstNode, stack: &mut Vec<&'a AstNode>, f: &mut dyn FnMut(&'a AstNode, &[&'a AstNode])) {
            f(n, stack);
            stack.push(n);
            for c in &n.children {
                go(c, stack, f);
            }
            stack.pop();
        }
        go(self, &mut Vec::new(), f);
    }

    pub fn any(&self, pred: &dyn Fn(&AstNode) -> bool) -> bool {
        pred(self) || self.children.iter().any(|c| c.any(pred))
    }

    /// Finds the node of `kind` with exactly `span`.
    pub fn find(&self, kind: NodeKind, span: &SourceSpan) -> Option<&AstNode> {
        if self.kind == kind && self.span == *span {
            return Some(self);
        }
        self.children.iter().filter(|c| c.span.contains(span)).find_map(|c| c.find(kind, span))
    }

    /// `(init, cond, step, body)` of a `ForStmt`.
    pub fn for_slots(&self) -> Option<(&AstNode, &AstNode, &AstNode, &AstNode)> {
        match (self.kind, self.children.as_slice()) {
            (NodeKind::ForStmt, [a, b, c, d]) => Some((a, b, c, d)),
            _ => None,
        }
    }

    /// Structural equality: kinds, leaf texts and shape; spans are ignored.
    pub fn same_shape(&self, other: &AstNode) -> bool {
        self.kind == other.kind
            && (self.kind == NodeKind::TranslationUnit || self.text == other.text)
            && self.children.len() == other.children.len()
            && self.children.iter().zip(&other.children).all(|(a, b)| a.same_shape(b))
    }

    /// Prints the tree as a token stream that re-parses to the same shape.
    pub fn print(&self) -> String {
        let mut p = Printer::default();
        p.node(self);
        p.out.push('\n');
        p.out
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
    at_line_start: bool,
}

impl Printer {
    fn newline(&mut self) {
        if !self.out.is_empty() && !self.at_line_start {
            self.out.push('\n');
        }
        self.at_line_start = true;
    }

    fn tok(&mut self, t: &str) {
        if t == "}" {
            self.indent = self.indent.saturating_sub(1);
            self.newline();
        }
        if self.at_line_start {
            for _ in 0..self.indent {
                self.out.push_str("    ");
            }
        } else if !self.out.is_empty() {
            self.out.push(' ');
        }
        self.out.push_str(t);
        self.at_line_start = false;
        match t {
            "{" => {
                self.indent += 1;
                self.newline();
            }
            ";" | "}" => self.newline(),
            _ => {}
        }
    }

    fn directive(&mut self, t: &str) {
        self.newline();
        let _ = write!(self.out, "{t}");
        self.at_line_start = false;
        self.newline();
    }

    fn node(&mut self, n: &AstNode) {
        use NodeKind::*;
        match n.kind {
            Directive | PragmaDirective => self.directive(&n.text),
            Identifier | Token => self.tok(&n.text),
            ForStmt => {
                let (init, cond, step, body) = n.for_slots().expect("for slots");
                self.tok("for");
                self.tok("(");
                self.node(init);
                if init.kind != Declaration {
                    self.tok(";");
                }
                self.node(cond);
                self.tok(";");
                self.node(step);
                self.tok(")");
                self.node(body);
            }
            WhileStmt if n.text == "do" => {
                self.tok("do");
                self.node(&n.children[0]);
                self.tok("while");
                self.tok("(");
                self.node(&n.children[1]);
                self.tok(")");
                self.tok(";");
            }
            WhileStmt => {
                self.tok("while");
                self.tok("(");
                self.node(&n.children[0]);
                self.tok(")");
                self.node(&n.children[1]);
            }
            IfStmt => {
                self.tok("if");
                self.tok("(");
                self.node(&n.children[0]);
                self.tok(")");
                self.node(&n.children[1]);
                if let Some(e) = n.children.get(2) {
                    self.tok("else");
                    self.node(e);
                }
            }
            CompoundStmt => {
                self.tok("{");
                for c in &n.children {
                    self.node(c);
                }
                self.tok("}");
            }
            ExprStmt => {
                for c in &n.children {
                    self.node(c);
                }
                self.tok(";");
            }
            ReturnStmt => {
                self.tok("return");
                for c in &n.children {
                    self.node(c);
                }
                self.tok(";");
            }
            GotoStmt => {
                self.tok("goto");
                self.tok(&n.text);
                self.tok(";");
            }
            LabelStmt => {
                self.tok(&n.text);
                self.tok(":");
            }
            BreakStmt => {
                self.tok("break");
                self.tok(";");
            }
            ContinueStmt => {
                self.tok("continue");
                self.tok(";");
            }
            TranslationUnit | FunctionDef | Declaration | CallExpr | Expr | Other => {
                for c in &n.children {
                    self.node(c);
                }
            }
        }
    }
}
