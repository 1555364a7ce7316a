//! Tokenizer for the supported C subset.
//!
//! Comments and whitespace are dropped. Preprocessor lines are kept whole as
//! a single [`TokKind::Directive`] token so they can be reprinted verbatim.

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Keyword,
    Number,
    Str,
    Char,
    Punct,
    Directive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub line_start: u32,
    pub line_end: u32,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokKind::Punct && self.text == p
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        self.kind == TokKind::Keyword && self.text == k
    }

    pub fn is_pragma(&self) -> bool {
        self.kind == TokKind::Directive && directive_name(&self.text) == "pragma"
    }
}

/// Name of a directive line, e.g. `"include"` for `#  include <x.h>`.
pub fn directive_name(text: &str) -> &str {
    let rest = text.trim_start().trim_start_matches('#').trim_start();
    let end = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
    &rest[..end]
}

pub const KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "_Alignas",
    "_Alignof",
    "_Atomic",
    "_Bool",
    "_Complex",
    "_Generic",
    "_Imaginary",
    "_Noreturn",
    "_Static_assert",
    "_Thread_local",
    "__attribute__",
    "__attribute",
    "__asm__",
    "__asm",
    "asm",
    "__extension__",
    "__inline",
    "__inline__",
    "__restrict",
    "__restrict__",
    "__volatile__",
    "__const",
    "__thread",
    "__typeof__",
    "__typeof",
    "typeof",
    "__int128",
    "__declspec",
    "__builtin_va_list",
    "__alignof__",
    "_Float128",
    "__float128",
    "_Float64",
    "_Float32",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

const PUNCTS: &[&str] = &[
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "*=", "/=", "%=", "+=",
    "-=", "&=", "^=", "|=", "##", "[", "]", "(", ")", "{", "}", ".", "&", "*", "+", "-", "~", "!", "/", "%", "<", ">",
    "^", "|", "?", ":", ";", "=", ",", "#",
];

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self, off: usize) -> u8 {
        *self.bytes.get(self.pos + off).unwrap_or(&0)
    }

    fn bump(&mut self) {
        if self.peek(0) == b'\n' {
            self.line += 1;
        }
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b'$' || b >= 0x80
}

fn is_ident_char(b: u8) -> bool {
    is_ident_start(b) || b.is_ascii_digit()
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut c = Cursor { bytes: src.as_bytes(), pos: 0, line: 1 };
    let mut toks = Vec::new();
    // true while only whitespace has been seen since the last newline
    let mut line_start = true;

    while !c.at_end() {
        let b = c.peek(0);
        if b == b'\n' {
            c.bump();
            line_start = true;
            continue;
        }
        if b.is_ascii_whitespace() {
            c.bump();
            continue;
        }
        if b == b'\\' && c.peek(1) == b'\n' {
            c.bump();
            c.bump();
            continue;
        }
        if b == b'/' && c.peek(1) == b'/' {
            while !c.at_end() && c.peek(0) != b'\n' {
                c.bump();
            }
            continue;
        }
        if b == b'/' && c.peek(1) == b'*' {
            let open_line = c.line;
            c.bump();
            c.bump();
            loop {
                if c.at_end() {
                    return Err(ParseError::new("unterminated block comment", open_line));
                }
                if c.peek(0) == b'*' && c.peek(1) == b'/' {
                    c.bump();
                    c.bump();
                    break;
                }
                c.bump();
            }
            continue;
        }

        let start = c.pos;
        let line0 = c.line;
        let kind;
        if b == b'#' && line_start {
            lex_directive(&mut c);
            kind = TokKind::Directive;
        } else if is_ident_start(b) {
            while is_ident_char(c.peek(0)) {
                c.bump();
            }
            let word = &src[start..c.pos];
            let q = c.peek(0);
            if (q == b'"' || q == b'\'') && matches!(word, "L" | "u" | "U" | "u8") {
                lex_quoted(&mut c, q);
                kind = if q == b'"' { TokKind::Str } else { TokKind::Char };
            } else if is_keyword(word) {
                kind = TokKind::Keyword;
            } else {
                kind = TokKind::Ident;
            }
        } else if b.is_ascii_digit() || (b == b'.' && c.peek(1).is_ascii_digit()) {
            lex_number(&mut c);
            kind = TokKind::Number;
        } else if b == b'"' || b == b'\'' {
            lex_quoted(&mut c, b);
            kind = if b == b'"' { TokKind::Str } else { TokKind::Char };
        } else {
            let rest = &src[c.pos..];
            let len = PUNCTS
                .iter()
                .find(|p| rest.starts_with(*p))
                .map(|p| p.len())
                .unwrap_or_else(|| rest.chars().next().map(char::len_utf8).unwrap_or(1));
            for _ in 0..len {
                c.bump();
            }
            kind = TokKind::Punct;
        }
        line_start = false;
        let text = if kind == TokKind::Directive {
            src[start..c.pos].trim_end().to_string()
        } else {
            src[start..c.pos].to_string()
        };
        let end = start + text.len();
        let line_end = line0 + text.matches('\n').count() as u32;
        toks.push(Token { kind, text, start, end, line_start: line0, line_end });
    }
    Ok(toks)
}

fn lex_directive(c: &mut Cursor<'_>) {
    while !c.at_end() {
        let b = c.peek(0);
        if b == b'\\' && c.peek(1) == b'\n' {
            c.bump();
            c.bump();
            continue;
        }
        if b == b'\\' && c.peek(1) == b'\r' && c.peek(2) == b'\n' {
            c.bump();
            c.bump();
            c.bump();
            continue;
        }
        if b == b'\n' {
            break;
        }
        // a block comment may continue the directive across lines
        if b == b'/' && c.peek(1) == b'*' {
            c.bump();
            c.bump();
            while !c.at_end() && !(c.peek(0) == b'*' && c.peek(1) == b'/') {
                c.bump();
            }
            if !c.at_end() {
                c.bump();
                c.bump();
            }
            continue;
        }
        c.bump();
    }
}

fn lex_number(c: &mut Cursor<'_>) {
    loop {
        let b = c.peek(0);
        if (b == b'e' || b == b'E' || b == b'p' || b == b'P') && (c.peek(1) == b'+' || c.peek(1) == b'-') {
            c.bump();
            c.bump();
        } else if is_ident_char(b) || b == b'.' {
            c.bump();
        } else {
            break;
        }
    }
}

fn lex_quoted(c: &mut Cursor<'_>, quote: u8) {
    c.bump();
    while !c.at_end() {
        let b = c.peek(0);
        if b == b'\\' {
            c.bump();
            if !c.at_end() {
                c.bump();
            }
            continue;
        }
        if b == b'\n' {
            // unterminated literal; stop at end of line
            return;
        }
        c.bump();
        if b == quote {
            return;
        }
    }
}
