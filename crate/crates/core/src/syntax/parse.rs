use super::{Atom, CutSequent, Formula, Predicate, Sym, Term};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: arity mismatch for `{symbol}`: declared {expected}, used with {found}")]
    Arity { line: usize, col: usize, symbol: String, expected: usize, found: usize },
    #[error("cut {index} is not a dual pair")]
    MalformedCut { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    Star,
    Bar,
    Tilde,
    Colon,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Eof => f.write_str("end of input"),
            t => {
                let s = match t {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Semi => ";",
                    Tok::Dot => ".",
                    Tok::Star => "*",
                    Tok::Bar => "|",
                    Tok::Tilde => "~",
                    _ => ":",
                };
                write!(f, "`{s}`")
            }
        }
    }
}

pub struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

impl Lexer {
    pub fn new(src: &str) -> Result<Lexer, ParseError> {
        let mut toks = Vec::new();
        let chars: Vec<char> = src.chars().collect();
        let (mut i, mut line, mut col) = (0, 1, 1);
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                col += 1;
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ',' => Some(Tok::Comma),
                ';' => Some(Tok::Semi),
                '.' => Some(Tok::Dot),
                '*' => Some(Tok::Star),
                '|' => Some(Tok::Bar),
                '~' => Some(Tok::Tilde),
                ':' => Some(Tok::Colon),
                _ => None,
            };
            if let Some(t) = single {
                toks.push((t, l0, c0));
                i += 1;
                col += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s.parse().map_err(|_| ParseError::Syntax {
                    line: l0,
                    col: c0,
                    msg: format!("number `{s}` out of range"),
                })?;
                toks.push((Tok::Num(n), l0, c0));
                continue;
            }
            if c.is_alphabetic() || c == '_' || c == '#' {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                toks.push((Tok::Ident(s), l0, c0));
                continue;
            }
            return Err(ParseError::Syntax { line: l0, col: c0, msg: format!("unexpected character `{c}`") });
        }
        toks.push((Tok::Eof, line, col));
        Ok(Lexer { toks })
    }
}

/// Predicate and function arities seen so far.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    preds: HashMap<String, usize>,
    funs: HashMap<String, usize>,
}

impl Signature {
    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.preds.get(name).copied()
    }
    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.funs.get(name).copied()
    }
}

/// Bare lowercase identifiers starting with `a`..`e` denote constants.
pub fn is_constant_name(s: &str) -> bool {
    matches!(s.chars().next(), Some('a'..='e'))
}

fn is_var_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_lowercase()) && !is_constant_name(s)
}

fn is_pred_name(s: &str) -> bool {
    matches!(s.chars().next(), Some(c) if c.is_uppercase() || c == '#')
}

pub struct Parser {
    lex: Lexer,
    pos: usize,
    pub sig: Signature,
    /// Only treat `f(` as an application when `(` touches the symbol.
    pub tight: bool,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { lex: Lexer::new(src)?, pos: 0, sig: Signature::default(), tight: false })
    }

    pub fn peek(&self) -> &Tok {
        &self.lex.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.lex.toks.len() - 1);
        &self.lex.toks[i].0
    }

    pub fn next(&mut self) -> Tok {
        let t = self.lex.toks[self.pos].0.clone();
        if self.pos + 1 < self.lex.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        let (_, line, col) = self.lex.toks[self.pos];
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    pub fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {t}"))),
        }
    }

    pub fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            t => Err(self.error(format!("expected number, found {t}"))),
        }
    }

    pub fn variable(&mut self) -> Result<Sym, ParseError> {
        let s = self.ident()?;
        if !is_var_name(&s) {
            self.pos -= 1;
            return Err(self.error(format!("`{s}` is not a variable name")));
        }
        Ok(Sym::new(&s))
    }

    fn arity_check(&mut self, pred: bool, name: &str, n: usize, at: usize) -> Result<(), ParseError> {
        let table = if pred { &mut self.sig.preds } else { &mut self.sig.funs };
        match table.get(name) {
            Some(&k) if k != n => {
                let (_, line, col) = self.lex.toks[at];
                Err(ParseError::Arity { line, col, symbol: name.to_string(), expected: k, found: n })
            }
            Some(_) => Ok(()),
            None => {
                table.insert(name.to_string(), n);
                Ok(())
            }
        }
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.pos;
        let name = self.ident()?;
        if !matches!(name.chars().next(), Some(c) if c.is_lowercase()) {
            self.pos = at;
            return Err(self.error(format!("`{name}` is not a term")));
        }
        let touching = {
            let (_, l0, c0) = self.lex.toks[at];
            let (_, l1, c1) = self.lex.toks[self.pos];
            l0 == l1 && c1 == c0 + name.chars().count()
        };
        if *self.peek() == Tok::LParen && (touching || !self.tight) {
            self.next();
            let mut args = Vec::new();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term()?);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
            self.arity_check(false, &name, args.len(), at)?;
            Ok(Term::App(Sym::new(&name), args))
        } else if is_constant_name(&name) {
            self.arity_check(false, &name, 0, at)?;
            Ok(Term::App(Sym::new(&name), Vec::new()))
        } else {
            Ok(Term::Var(Sym::new(&name)))
        }
    }

    pub fn atom(&mut self) -> Result<Atom, ParseError> {
        let positive = if *self.peek() == Tok::Tilde {
            self.next();
            false
        } else {
            true
        };
        let at = self.pos;
        let name = self.ident()?;
        if !is_pred_name(&name) {
            self.pos = at;
            return Err(self.error(format!("expected predicate, found `{name}`")));
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            if *self.peek() != Tok::RParen {
                loop {
                    args.push(self.term()?);
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.arity_check(true, &name, args.len(), at)?;
        Ok(Atom { pred: Predicate { name: Sym::new(&name), positive }, args })
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Bar {
            self.next();
            let g = self.conj()?;
            f = Formula::par(f, g);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Star {
            self.next();
            let g = self.unary()?;
            f = Formula::tensor(f, g);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(k) if (k == "all" || k == "ex") && matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.next();
                let x = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if k == "all" {
                    Formula::Forall(x, Box::new(body))
                } else {
                    Formula::Exists(x, Box::new(body))
                })
            }
            _ => Ok(Formula::Atom(self.atom()?)),
        }
    }

    /// A comma-separated sequent; stops at end of input or at an identifier
    /// followed by `:` (a section header such as `links:`).
    pub fn sequent(&mut self) -> Result<CutSequent, ParseError> {
        let mut s = CutSequent::default();
        let at_end = |p: &Parser| {
            p.at_eof() || (matches!(p.peek(), Tok::Ident(_)) && *p.peek_at(1) == Tok::Colon)
        };
        if at_end(self) {
            return Ok(s);
        }
        loop {
            if matches!(self.peek(), Tok::Ident(k) if k == "cut") && *self.peek_at(1) == Tok::LBrace {
                self.next();
                self.next();
                let l = self.formula()?;
                self.expect(Tok::Semi)?;
                let r = self.formula()?;
                self.expect(Tok::RBrace)?;
                if !r.alpha_eq(&l.dual()) {
                    return Err(ParseError::MalformedCut { index: s.cuts.len() });
                }
                s.cuts.push((l, r));
            } else {
                s.formulas.push(self.formula()?);
            }
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        Ok(s)
    }
}

pub fn parse_sequent(src: &str) -> Result<CutSequent, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.sequent()?;
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {}", p.peek())));
    }
    Ok(s)
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {}", p.peek())));
    }
    Ok(f)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if !p.at_eof() {
        return Err(p.error(format!("unexpected {}", p.peek())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_sequent() {
        let s = parse_sequent("all x. ~P(f(x)), ex z. (P(z) * (~Q(z) | Q(z)))").unwrap();
        assert_eq!(s.formulas.len(), 2);
        assert_eq!(s.leaf_count(), 4);
    }

    #[test]
    fn empty() {
        assert_eq!(parse_sequent("").unwrap(), CutSequent::default());
    }

    #[test]
    fn arity_enforced() {
        let e = parse_sequent("P(x), P(x,y)").unwrap_err();
        assert!(matches!(e, ParseError::Arity { expected: 1, found: 2, .. }), "{e}");
        assert!(parse_sequent("P(f(x)), Q(f)").is_ok());
        assert!(parse_sequent("P(f(x)), Q(f(x, y))").is_err());
    }

    #[test]
    fn constants_and_variables() {
        assert_eq!(parse_term("a").unwrap(), Term::constant("a"));
        assert_eq!(parse_term("x").unwrap(), Term::var("x"));
        assert_eq!(parse_term("k()").unwrap(), Term::constant("k"));
    }

    #[test]
    fn quantifier_extends_right() {
        let f = parse_formula("P | all x. Q(x) * R").unwrap();
        assert!(matches!(f, Formula::Par(_, ref b) if matches!(**b, Formula::Forall(..))));
    }

    #[test]
    fn syntax_error_position() {
        match parse_sequent("P(x),\n  Q(y") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn malformed_cut() {
        assert!(matches!(parse_sequent("cut{P ; P}"), Err(ParseError::MalformedCut { index: 0 })));
        assert!(parse_sequent("cut{ex x. P(x) ; all y. ~P(y)}").is_ok());
    }
}
