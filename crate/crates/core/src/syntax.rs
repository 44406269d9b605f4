//! Concrete syntax: a small hand-written lexer and recursive-descent parser.
//!
//! ```text
//! term    := binder | spine
//! binder  := '\' ident+ '.' term
//!          | 'del' ident '.' term
//!          | 'dup' ident 'as' '(' ident ',' ident ')' '.' term
//! spine   := postfix+ binder?
//! postfix := atom ('[' term '/' ident ']')*
//! atom    := ident | '(' term ')'
//! ```

use crate::term::{fv_list, name, Name, Term};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    LBrack,
    Slash,
    RBrack,
    Del,
    Dup,
    As,
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lambda => "'\\'".into(),
            Tok::Dot => "'.'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::LBrack => "'['".into(),
            Tok::Slash => "'/'".into(),
            Tok::RBrack => "']'".into(),
            Tok::Del => "'del'".into(),
            Tok::Dup => "'dup'".into(),
            Tok::As => "'as'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, cl) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let simple = match c {
            '\\' => Some(Tok::Lambda),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '[' => Some(Tok::LBrack),
            '/' => Some(Tok::Slash),
            ']' => Some(Tok::RBrack),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            col += 1;
            out.push(Spanned { tok, line: l, col: cl });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let tok = match s.as_str() {
                "del" => Tok::Del,
                "dup" => Tok::Dup,
                "as" => Tok::As,
                _ => Tok::Ident(s),
            };
            out.push(Spanned { tok, line: l, col: cl });
            continue;
        }
        return Err(ParseError { line: l, col: cl, msg: format!("unexpected character '{c}'") });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

#[derive(Clone, Copy)]
struct Mode {
    resource_ops: bool,
    substitutions: bool,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    mode: Mode,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError { line: s.line, col: s.col, msg: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(name(&s))
            }
            other => self.err(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn starts_binder(&self) -> bool {
        matches!(self.peek(), Tok::Lambda | Tok::Del | Tok::Dup)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.starts_binder() {
            self.binder()
        } else {
            self.spine()
        }
    }

    fn binder(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let mut xs = vec![self.ident()?];
                while let Tok::Ident(_) = self.peek() {
                    xs.push(self.ident()?);
                }
                self.expect(Tok::Dot)?;
                let mut body = self.term()?;
                for x in xs.into_iter().rev() {
                    body = Term::Abs(x, Box::new(body));
                }
                Ok(body)
            }
            Tok::Del => {
                if !self.mode.resource_ops {
                    return self.err("'del' is not allowed in plain terms");
                }
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Dot)?;
                Ok(Term::Era(x, Box::new(self.term()?)))
            }
            Tok::Dup => {
                if !self.mode.resource_ops {
                    return self.err("'dup' is not allowed in plain terms");
                }
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::As)?;
                self.expect(Tok::LParen)?;
                let l = self.ident()?;
                self.expect(Tok::Comma)?;
                let r = self.ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                Ok(Term::Dup(x, l, r, Box::new(self.term()?)))
            }
            _ => self.err("expected binder"),
        }
    }

    fn spine(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return self.err(format!("expected term, found {}", self.peek().describe()));
        }
        let mut acc = self.postfix()?;
        loop {
            if self.starts_atom() {
                let a = self.postfix()?;
                acc = Term::App(Box::new(acc), Box::new(a));
            } else if self.starts_binder() {
                let a = self.binder()?;
                return Ok(Term::App(Box::new(acc), Box::new(a)));
            } else {
                return Ok(acc);
            }
        }
    }

    fn postfix(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::LBrack {
            if !self.mode.substitutions {
                return self.err("explicit substitution is not allowed here");
            }
            self.bump();
            let n = self.term()?;
            self.expect(Tok::Slash)?;
            let x = self.ident()?;
            self.expect(Tok::RBrack)?;
            t = Term::Sub(Box::new(t), Box::new(n), x);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::Var(name(&s)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.err(format!("expected term, found {}", other.describe())),
        }
    }
}

fn run(text: &str, mode: Mode) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, mode };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", p.peek().describe()));
    }
    Ok(t)
}

/// Check that binders are pairwise distinct and disjoint from free names.
pub fn check_barendregt(t: &Term) -> Result<(), String> {
    let free: HashSet<Name> = fv_list(t).into_iter().collect();
    let mut seen = HashSet::new();
    for b in t.binder_names() {
        if free.contains(&b) {
            return Err(format!("name '{b}' is both bound and free"));
        }
        if !seen.insert(b.clone()) {
            return Err(format!("binder name '{b}' is used more than once"));
        }
    }
    Ok(())
}

fn barendregt_at_end(t: Term) -> Result<Term, ParseError> {
    check_barendregt(&t).map_err(|msg| ParseError { line: 1, col: 1, msg })?;
    Ok(t)
}

/// Parse a resource term.  Explicit substitutions are rejected.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    barendregt_at_end(run(text, Mode { resource_ops: true, substitutions: false })?)
}

/// Parse a term that may contain explicit substitutions `M[N/x]`.
pub fn parse_sterm(text: &str) -> Result<Term, ParseError> {
    barendregt_at_end(run(text, Mode { resource_ops: true, substitutions: true })?)
}

/// Parse an ordinary lambda term.  Shadowing is allowed here; the bridge
/// renames binders apart before translating.
pub fn parse_plain(text: &str) -> Result<Term, ParseError> {
    run(text, Mode { resource_ops: false, substitutions: false })
}
