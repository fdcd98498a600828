//! Lexer and recursive-descent parsers for the ASCII surface syntax.
//!
//! Grammar reference lives in `docs/grammar.md`. Comments run from `--` to
//! end of line. Bound-output sugar is expanded at parse time; the printer in
//! [`crate::print`] re-sugars it.

use crate::ast::{Process, Term};
use crate::names::Name;
use crate::types::Ty;
use std::fmt;
use thiserror::Error;

/// Byte range in one source file.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub file: u32,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(file: u32, start: usize, end: usize) -> SourceSpan {
        assert!(start <= end);
        SourceSpan { file, start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Error, Debug)]
#[error("syntax error at {span}: found {found}, expected {}", expected.join(", "))]
pub struct SyntaxError {
    pub span: SourceSpan,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Num(u8),
    Kw(&'static str),
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Dot,
    Comma,
    Semi,
    Colon,
    Pipe,
    Bang,
    Star,
    Amp,
    Plus,
    Eq,
    Backslash,
    // multi-char
    Lolli,    // -o
    Arrow,    // ->
    Implies,  // =>
    Wedge,    // /\
    LArrow,   // <-
    Turnstile, // |-
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Num(n) => write!(f, "'{n}'"),
            Tok::Kw(s) => write!(f, "'{s}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Lt => write!(f, "'<'"),
            Tok::Gt => write!(f, "'>'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Comma => write!(f, "','"),
            Tok::Semi => write!(f, "';'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Pipe => write!(f, "'|'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Amp => write!(f, "'&'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Eq => write!(f, "'='"),
            Tok::Backslash => write!(f, "'\\'"),
            Tok::Lolli => write!(f, "'-o'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Implies => write!(f, "'=>'"),
            Tok::Wedge => write!(f, "'/\\'"),
            Tok::LArrow => write!(f, "'<-'"),
            Tok::Turnstile => write!(f, "'|-'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "fwd", "new", "srv", "send", "sendty", "recvty", "case", "inl", "inr", "let", "in", "pack",
    "with", "unpack", "as", "quote", "spawn", "of", "forall", "exists", "true", "false", "fst",
    "snd",
];

fn lex(src: &str, file: u32) -> Result<Vec<(Tok, SourceSpan)>, SyntaxError> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && i + 1 < b.len() && b[i + 1] == b'-' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let two = if i + 1 < b.len() { &src[i..i + 2] } else { "" };
        let tok = match two {
            "-o" => {
                i += 2;
                Some(Tok::Lolli)
            }
            "->" => {
                i += 2;
                Some(Tok::Arrow)
            }
            "=>" => {
                i += 2;
                Some(Tok::Implies)
            }
            "/\\" => {
                i += 2;
                Some(Tok::Wedge)
            }
            "<-" => {
                i += 2;
                Some(Tok::LArrow)
            }
            "|-" => {
                i += 2;
                Some(Tok::Turnstile)
            }
            _ => None,
        };
        let tok = match tok {
            Some(t) => t,
            None => {
                i += 1;
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '|' => Tok::Pipe,
                    '!' => Tok::Bang,
                    '*' => Tok::Star,
                    '&' => Tok::Amp,
                    '+' => Tok::Plus,
                    '=' => Tok::Eq,
                    '\\' => Tok::Backslash,
                    '0' => Tok::Num(0),
                    '1' => Tok::Num(1),
                    '2' => Tok::Num(2),
                    _ if c.is_ascii_alphabetic() || c == '_' => {
                        while i < b.len()
                            && ((b[i] as char).is_ascii_alphanumeric()
                                || b[i] == b'_'
                                || b[i] == b'\'')
                        {
                            i += 1;
                        }
                        let word = &src[start..i];
                        if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                            Tok::Kw(kw)
                        } else {
                            Tok::Ident(word.to_string())
                        }
                    }
                    _ => {
                        return Err(SyntaxError {
                            span: SourceSpan::new(file, start, i),
                            found: format!("'{c}'"),
                            expected: vec!["a token".into()],
                        })
                    }
                }
            }
        };
        out.push((tok, SourceSpan::new(file, start, i)));
    }
    out.push((Tok::Eof, SourceSpan::new(file, src.len(), src.len())));
    Ok(out)
}

/// Parse an identifier into a name, splitting a `_<digits>` suffix back into
/// the numeric disambiguator so printing round-trips exactly.
pub fn name_of_ident(s: &str) -> Name {
    if let Some(pos) = s.rfind('_') {
        let (base, digits) = (&s[..pos], &s[pos + 1..]);
        if !base.is_empty() && !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit()) {
            if let Ok(id) = digits.parse::<u32>() {
                if id > 0 {
                    return Name::with_id(base, id);
                }
            }
        }
    }
    Name::new(s)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }
    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(SyntaxError {
            span: self.span(),
            found: self.peek().to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }
    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(&[what])
        }
    }
    fn eat(&mut self, t: Tok) -> bool {
        if *self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }
    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(name_of_ident(&s))
            }
            _ => self.err(&[what]),
        }
    }

    // ---------------- types ----------------

    fn ty(&mut self) -> PResult<Ty> {
        match self.peek().clone() {
            Tok::Kw("forall") => {
                self.bump();
                let x = self.ident("type variable")?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Ty::Forall(x, Box::new(self.ty()?)))
            }
            Tok::Kw("exists") => {
                self.bump();
                let x = self.ident("type variable")?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Ty::Exists(x, Box::new(self.ty()?)))
            }
            _ => self.arrow_ty(),
        }
    }

    fn arrow_ty(&mut self) -> PResult<Ty> {
        let lhs = self.sum_ty()?;
        match self.peek() {
            Tok::Lolli => {
                self.bump();
                Ok(Ty::lolli(lhs, self.ty()?))
            }
            Tok::Arrow => {
                self.bump();
                Ok(Ty::arrow(lhs, self.ty()?))
            }
            Tok::Implies => {
                self.bump();
                Ok(Ty::impl_(lhs, self.ty()?))
            }
            Tok::Wedge => {
                self.bump();
                Ok(Ty::and(lhs, self.ty()?))
            }
            _ => Ok(lhs),
        }
    }

    fn sum_ty(&mut self) -> PResult<Ty> {
        let mut lhs = self.prod_ty()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ty::plus(lhs, self.prod_ty()?);
                }
                Tok::Amp => {
                    self.bump();
                    lhs = Ty::with(lhs, self.prod_ty()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn prod_ty(&mut self) -> PResult<Ty> {
        let mut lhs = self.bang_ty()?;
        while self.eat(Tok::Star) {
            lhs = Ty::tensor(lhs, self.bang_ty()?);
        }
        Ok(lhs)
    }

    fn bang_ty(&mut self) -> PResult<Ty> {
        if self.eat(Tok::Bang) {
            Ok(Ty::bang(self.bang_ty()?))
        } else {
            self.atom_ty()
        }
    }

    fn atom_ty(&mut self) -> PResult<Ty> {
        match self.peek().clone() {
            Tok::Num(1) => {
                self.bump();
                Ok(Ty::One)
            }
            Tok::Num(2) => {
                self.bump();
                Ok(Ty::Two)
            }
            Tok::Ident(_) => Ok(Ty::Var(self.ident("type")?)),
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::LBrace => {
                self.bump();
                let mut ctx = Vec::new();
                if !matches!(self.peek(), Tok::Turnstile) {
                    loop {
                        let x = self.ident("channel name")?;
                        self.expect(Tok::Colon, "':'")?;
                        let t = self.ty()?;
                        ctx.push((x, t));
                        if !self.eat(Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::Turnstile, "'|-'")?;
                let z = self.ident("channel name")?;
                self.expect(Tok::Colon, "':'")?;
                let a = self.ty()?;
                self.expect(Tok::RBrace, "'}'")?;
                Ok(Ty::Monad(ctx, z, Box::new(a)))
            }
            _ => self.err(&["a type"]),
        }
    }

    // ---------------- terms ----------------

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Backslash => {
                self.bump();
                let x = self.ident("variable")?;
                self.expect(Tok::Colon, "':'")?;
                let t = self.ty()?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Term::Lam(x, t, Box::new(self.term()?)))
            }
            Tok::Wedge => {
                self.bump();
                let x = self.ident("type variable")?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Term::TLam(x, Box::new(self.term()?)))
            }
            Tok::Kw("let") => {
                self.bump();
                match self.peek().clone() {
                    Tok::Num(1) => {
                        self.bump();
                        self.expect(Tok::Eq, "'='")?;
                        let m = self.term()?;
                        self.expect(Tok::Kw("in"), "'in'")?;
                        let n = self.term()?;
                        Ok(Term::let_unit(m, n))
                    }
                    Tok::Bang => {
                        self.bump();
                        let u = self.ident("variable")?;
                        self.expect(Tok::Eq, "'='")?;
                        let m = self.term()?;
                        self.expect(Tok::Kw("in"), "'in'")?;
                        let n = self.term()?;
                        Ok(Term::LetBang(u, Box::new(m), Box::new(n)))
                    }
                    Tok::Ident(_) => {
                        let x = self.ident("variable")?;
                        self.expect(Tok::Star, "'*'")?;
                        let y = self.ident("variable")?;
                        self.expect(Tok::Eq, "'='")?;
                        let m = self.term()?;
                        self.expect(Tok::Kw("in"), "'in'")?;
                        let n = self.term()?;
                        Ok(Term::LetPair(x, y, Box::new(m), Box::new(n)))
                    }
                    _ => self.err(&["'1'", "'!'", "a variable"]),
                }
            }
            Tok::Kw("unpack") => {
                self.bump();
                let m = self.term()?;
                self.expect(Tok::Kw("as"), "'as'")?;
                self.expect(Tok::LParen, "'('")?;
                let x = self.ident("type variable")?;
                self.expect(Tok::Comma, "','")?;
                let y = self.ident("variable")?;
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::Kw("in"), "'in'")?;
                let n = self.term()?;
                Ok(Term::LetPack(x, y, Box::new(m), Box::new(n)))
            }
            Tok::Kw("pack") => {
                self.bump();
                let a = self.ty()?;
                self.expect(Tok::Kw("with"), "'with'")?;
                let m = self.term()?;
                let asc = if self.eat(Tok::Kw("as")) {
                    Some(self.ty()?)
                } else {
                    None
                };
                Ok(Term::Pack(a, Box::new(m), asc))
            }
            Tok::Kw("case") => {
                self.bump();
                let m = self.term()?;
                self.expect(Tok::Kw("of"), "'of'")?;
                self.expect(Tok::Kw("inl"), "'inl'")?;
                let x = self.ident("variable")?;
                self.expect(Tok::Implies, "'=>'")?;
                let n1 = self.term()?;
                self.expect(Tok::Pipe, "'|'")?;
                self.expect(Tok::Kw("inr"), "'inr'")?;
                let y = self.ident("variable")?;
                self.expect(Tok::Implies, "'=>'")?;
                let n2 = self.term()?;
                Ok(Term::CaseSum(Box::new(m), x, Box::new(n1), y, Box::new(n2)))
            }
            _ => self.app_term(),
        }
    }

    fn app_term(&mut self) -> PResult<Term> {
        let mut head = self.atom_term()?;
        loop {
            match self.peek() {
                Tok::LBracket => {
                    self.bump();
                    let a = self.ty()?;
                    self.expect(Tok::RBracket, "']'")?;
                    head = Term::TApp(Box::new(head), a);
                }
                Tok::Ident(_)
                | Tok::LParen
                | Tok::Bang
                | Tok::Kw("true")
                | Tok::Kw("false")
                | Tok::Kw("fst")
                | Tok::Kw("snd")
                | Tok::Kw("inl")
                | Tok::Kw("inr")
                | Tok::Kw("quote") => {
                    let arg = self.atom_term()?;
                    head = Term::app(head, arg);
                }
                _ => return Ok(head),
            }
        }
    }

    fn atom_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(_) => Ok(Term::Var(self.ident("term")?)),
            Tok::Kw("true") => {
                self.bump();
                Ok(Term::True)
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(Term::False)
            }
            Tok::Bang => {
                self.bump();
                Ok(Term::bang(self.atom_term()?))
            }
            Tok::Kw("fst") => {
                self.bump();
                Ok(Term::Fst(Box::new(self.atom_term()?)))
            }
            Tok::Kw("snd") => {
                self.bump();
                Ok(Term::Snd(Box::new(self.atom_term()?)))
            }
            Tok::Kw("inl") => {
                self.bump();
                self.expect(Tok::Lt, "'<'")?;
                let t = self.ty()?;
                self.expect(Tok::Gt, "'>'")?;
                Ok(Term::Inj(true, t, Box::new(self.atom_term()?)))
            }
            Tok::Kw("inr") => {
                self.bump();
                self.expect(Tok::Lt, "'<'")?;
                let t = self.ty()?;
                self.expect(Tok::Gt, "'>'")?;
                Ok(Term::Inj(false, t, Box::new(self.atom_term()?)))
            }
            Tok::Kw("quote") => {
                self.bump();
                self.expect(Tok::LBrace, "'{'")?;
                let z = self.ident("channel")?;
                let ann = if self.eat(Tok::Colon) {
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::LArrow, "'<-'")?;
                let p = self.process()?;
                let mut ctx = Vec::new();
                if self.eat(Tok::LArrow) {
                    loop {
                        let x = self.ident("channel")?;
                        self.expect(Tok::Colon, "':'")?;
                        let t = self.ty()?;
                        ctx.push((x, t));
                        if !self.eat(Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace, "'}'")?;
                Ok(Term::Quote(z, ann, Box::new(p), ctx))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(Tok::RParen) {
                    return Ok(Term::Unit);
                }
                let m = self.term()?;
                match self.peek() {
                    Tok::Star => {
                        self.bump();
                        let n = self.term()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Term::pair(m, n))
                    }
                    Tok::Amp => {
                        self.bump();
                        let n = self.term()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Term::WithPair(Box::new(m), Box::new(n)))
                    }
                    Tok::RParen => {
                        self.bump();
                        Ok(m)
                    }
                    _ => self.err(&["'*'", "'&'", "')'"]),
                }
            }
            _ => self.err(&["a term"]),
        }
    }

    // ---------------- processes ----------------

    fn process(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(Process::Zero)
            }
            Tok::Kw("fwd") => {
                self.bump();
                let x = self.ident("channel")?;
                let y = self.ident("channel")?;
                Ok(Process::Fwd(x, y))
            }
            Tok::Kw("new") => {
                self.bump();
                let x = self.ident("channel")?;
                let ty = if self.eat(Tok::Colon) {
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Dot, "'.'")?;
                Ok(Process::New(x, ty, Box::new(self.process()?)))
            }
            Tok::Kw("srv") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::LParen, "'('")?;
                let y = self.ident("channel")?;
                self.expect(Tok::RParen, "')'")?;
                self.eat(Tok::Dot);
                Ok(Process::Rep(x, y, Box::new(self.process()?)))
            }
            Tok::Kw("send") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::LParen, "'('")?;
                let y = self.ident("channel")?;
                let provider = if self.eat(Tok::Colon) {
                    Some(self.process()?)
                } else {
                    None
                };
                self.expect(Tok::RParen, "')'")?;
                let cont = self.process()?;
                let body = match provider {
                    Some(p) => Process::par(p, cont),
                    None => cont,
                };
                Ok(Process::bout(x, y, None, body))
            }
            Tok::Kw("sendty") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::Lt, "'<'")?;
                let a = self.ty()?;
                self.expect(Tok::Gt, "'>'")?;
                self.eat(Tok::Dot);
                Ok(Process::TyOut(x, a, Box::new(self.process()?)))
            }
            Tok::Kw("recvty") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::LParen, "'('")?;
                let v = self.ident("type variable")?;
                self.expect(Tok::RParen, "')'")?;
                self.eat(Tok::Dot);
                Ok(Process::TyIn(x, v, Box::new(self.process()?)))
            }
            Tok::Kw("case") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::LParen, "'('")?;
                let p = self.process()?;
                self.expect(Tok::Comma, "','")?;
                let q = self.process()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Process::Case(x, Box::new(p), Box::new(q)))
            }
            Tok::Kw("spawn") => {
                self.bump();
                let x = self.ident("channel")?;
                self.expect(Tok::LArrow, "'<-'")?;
                let m = self.term()?;
                let mut ys = Vec::new();
                if self.eat(Tok::LArrow) {
                    while let Tok::Ident(_) = self.peek() {
                        ys.push(self.ident("channel")?);
                    }
                }
                self.expect(Tok::Semi, "';'")?;
                Ok(Process::Spawn(x, m, ys, Box::new(self.process()?)))
            }
            Tok::LParen => {
                self.bump();
                let mut ps = vec![self.process()?];
                while self.eat(Tok::Pipe) {
                    ps.push(self.process()?);
                }
                self.expect(Tok::RParen, "')'")?;
                let mut it = ps.into_iter().rev();
                let last = it.next().unwrap();
                Ok(it.fold(last, |acc, p| Process::par(p, acc)))
            }
            Tok::Ident(_) => {
                let x = self.ident("channel")?;
                match self.peek().clone() {
                    Tok::LParen => {
                        self.bump();
                        let y = self.ident("channel")?;
                        self.expect(Tok::RParen, "')'")?;
                        self.eat(Tok::Dot);
                        Ok(Process::In(x, y, Box::new(self.process()?)))
                    }
                    Tok::Lt => {
                        self.bump();
                        if self.eat(Tok::LBrace) {
                            // explicit term payload x<{M}>.P
                            let m = self.term()?;
                            self.expect(Tok::RBrace, "'}'")?;
                            self.expect(Tok::Gt, "'>'")?;
                            self.eat(Tok::Dot);
                            return Ok(Process::TermOut(x, m, Box::new(self.process()?)));
                        }
                        let m = self.term()?;
                        self.expect(Tok::Gt, "'>'")?;
                        self.eat(Tok::Dot);
                        let cont = self.process()?;
                        match m {
                            Term::Var(y) => Ok(Process::Out(x, y, Box::new(cont))),
                            m => Ok(Process::TermOut(x, m, Box::new(cont))),
                        }
                    }
                    Tok::Dot => {
                        self.bump();
                        match self.peek().clone() {
                            Tok::Kw("inl") => {
                                self.bump();
                                self.expect(Tok::Semi, "';'")?;
                                Ok(Process::Inl(x, Box::new(self.process()?)))
                            }
                            Tok::Kw("inr") => {
                                self.bump();
                                self.expect(Tok::Semi, "';'")?;
                                Ok(Process::Inr(x, Box::new(self.process()?)))
                            }
                            _ => self.err(&["'inl'", "'inr'"]),
                        }
                    }
                    _ => self.err(&["'('", "'<'", "'.'"]),
                }
            }
            _ => self.err(&["a process"]),
        }
    }
}

fn finish<T>(mut p: Parser, v: T) -> PResult<T> {
    if *p.peek() == Tok::Eof {
        Ok(v)
    } else {
        p.err(&["end of input"])
    }
}

pub fn parse_process(src: &str) -> Result<Process, SyntaxError> {
    let mut p = Parser { toks: lex(src, 0)?, pos: 0 };
    let v = p.process()?;
    finish(p, v)
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { toks: lex(src, 0)?, pos: 0 };
    let v = p.term()?;
    finish(p, v)
}

pub fn parse_type(src: &str) -> Result<Ty, SyntaxError> {
    let mut p = Parser { toks: lex(src, 0)?, pos: 0 };
    let v = p.ty()?;
    finish(p, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fwd() {
        assert_eq!(
            parse_process("fwd x z").unwrap(),
            Process::Fwd(Name::new("x"), Name::new("z"))
        );
    }

    #[test]
    fn parse_input_then_send_of_variable() {
        // "z(x).z<x>.0" — input then (term-)output of a variable; the raw
        // parse yields a name output, typing reinterprets it when z carries a
        // value type.
        let p = parse_process("z(x).z<x>.0").unwrap();
        let expect = Process::In(
            Name::new("z"),
            Name::new("x"),
            Box::new(Process::Out(
                Name::new("z"),
                Name::new("x"),
                Box::new(Process::Zero),
            )),
        );
        assert_eq!(p, expect);
    }

    #[test]
    fn parse_lambda() {
        let m = parse_term("\\x:1. x").unwrap();
        assert_eq!(m, Term::lam("x", Ty::One, Term::var("x")));
    }

    #[test]
    fn parse_types() {
        assert_eq!(
            parse_type("forall X. !((1 + X) -o X) -o X").unwrap(),
            Ty::nat()
        );
        // -o is right-associative, * binds tighter
        assert_eq!(
            parse_type("1 -o 1 * 1 -o 1").unwrap(),
            Ty::lolli(Ty::One, Ty::lolli(Ty::tensor(Ty::One, Ty::One), Ty::One))
        );
    }

    #[test]
    fn parse_bound_output_sugar() {
        let p = parse_process("send x (y: 0) fwd x z").unwrap();
        let expect = Process::bout(
            Name::new("x"),
            Name::new("y"),
            None,
            Process::par(Process::Zero, Process::Fwd(Name::new("x"), Name::new("z"))),
        );
        assert_eq!(p, expect);
        let q = parse_process("send x (y) 0").unwrap();
        assert_eq!(
            q,
            Process::bout(Name::new("x"), Name::new("y"), None, Process::Zero)
        );
    }

    #[test]
    fn parse_monad_type_and_quote() {
        let t = parse_type("{x:1, y:1*1 |- z:1}").unwrap();
        match t {
            Ty::Monad(ctx, _, a) => {
                assert_eq!(ctx.len(), 2);
                assert_eq!(*a, Ty::One);
            }
            other => panic!("{other:?}"),
        }
        let m = parse_term("quote {z:1 <- fwd x z <- x:1}").unwrap();
        match m {
            Term::Quote(_, ann, _, ctx) => {
                assert_eq!(ctx.len(), 1);
                assert_eq!(ann, Some(Ty::One));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_has_span_and_expectations() {
        let e = parse_process("fwd x").unwrap_err();
        assert!(!e.expected.is_empty());
        assert!(e.span.start <= e.span.end);
    }
}
