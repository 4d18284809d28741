//! A small hand-rolled lexer shared by the `.spl`, `.wf` and `.dom` readers.
//!
//! `#` starts a line comment. Identifiers are `[A-Za-z_][A-Za-z0-9_-]*`
//! (the dash admits participant kinds like `org-unit`).

use crate::diag::{DiagKind, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

const PUNCTS: &[&str] = &[
    "::", "<=", ">=", "!=", "(", ")", "{", "}", "[", "]", ",", ";", ":", "?", "=", "<", ">", "&",
    "|", "!", ".",
];

pub fn lex(file: &str, src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = src.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    'outer: loop {
        // skip whitespace and comments
        loop {
            match chars.peek() {
                Some(c) if c.is_whitespace() => {
                    bump!();
                }
                Some('#') => {
                    while let Some(c) = chars.peek() {
                        if *c == '\n' {
                            break;
                        }
                        bump!();
                    }
                }
                _ => break,
            }
        }
        let (tline, tcol) = (line, col);
        let c = match chars.peek() {
            None => break 'outer,
            Some(c) => *c,
        };
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = chars.peek() {
                if c.is_ascii_alphanumeric() || *c == '_' || *c == '-' {
                    s.push(*c);
                    bump!();
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
        } else if c.is_ascii_digit() || c == '-' {
            let mut s = String::new();
            if c == '-' {
                s.push(c);
                bump!();
                if !chars.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    return Err(ParseError::new(file, tline, tcol, DiagKind::Syntax, "expected digit after `-`"));
                }
            }
            while let Some(c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(*c);
                    bump!();
                } else {
                    break;
                }
            }
            let n: i64 = s.parse().map_err(|_| {
                ParseError::new(file, tline, tcol, DiagKind::Syntax, format!("bad integer `{s}`"))
            })?;
            out.push(Spanned { tok: Tok::Int(n), line: tline, col: tcol });
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match bump!() {
                    None | Some('\n') => {
                        return Err(ParseError::new(file, tline, tcol, DiagKind::Syntax, "unterminated string"));
                    }
                    Some('"') => break,
                    Some(c) => s.push(c),
                }
            }
            out.push(Spanned { tok: Tok::Str(s), line: tline, col: tcol });
        } else {
            let mut matched = None;
            for p in PUNCTS {
                if src_matches(&mut chars.clone(), p) {
                    matched = Some(*p);
                    break;
                }
            }
            match matched {
                Some(p) => {
                    for _ in 0..p.len() {
                        bump!();
                    }
                    out.push(Spanned { tok: Tok::Punct(p), line: tline, col: tcol });
                }
                None => {
                    return Err(ParseError::new(
                        file,
                        tline,
                        tcol,
                        DiagKind::Syntax,
                        format!("unexpected character `{c}`"),
                    ));
                }
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

fn src_matches(chars: &mut std::iter::Peekable<std::str::Chars<'_>>, pat: &str) -> bool {
    for pc in pat.chars() {
        if chars.next() != Some(pc) {
            return false;
        }
    }
    true
}

/// Cursor over lexed tokens with positioned error helpers.
pub struct Cursor<'a> {
    file: String,
    toks: &'a [Spanned],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(file: &str, toks: &'a [Spanned]) -> Self {
        Cursor { file: file.to_string(), toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos.min(self.toks.len() - 1)].tok
    }

    pub fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    pub fn here(&self) -> (u32, u32) {
        let s = &self.toks[self.pos.min(self.toks.len() - 1)];
        (s.line, s.col)
    }

    #[allow(clippy::should_implement_trait)] // a cursor, not an Iterator
    pub fn next(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn save(&self) -> usize {
        self.pos
    }

    pub fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn err(&self, kind: DiagKind, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(&self.file, line, col, kind, msg)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(DiagKind::Syntax, format!("expected `{p}`, found {}", self.peek().describe())))
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.err(DiagKind::Syntax, format!("expected `{kw}`, found {}", self.peek().describe())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err(DiagKind::Syntax, format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn expect_int(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            other => Err(self.err(DiagKind::Syntax, format!("expected integer, found {}", other.describe()))),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}
