use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{BasicFormula, Relation};
use crate::poly::{Poly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("non-rational literal `{text}` at byte {pos}")]
    NonRational { text: String, pos: usize },
    #[error("variable `{name}` declared twice")]
    DuplicateVariable { name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

const SYMBOLS: &[&str] = &[
    "!=", ">=", "<=", "≠", "≥", "≤", "=", ">", "<", "+", "-", "*", "/", "^", "(", ")", ",", ";",
];

const CONNECTIVES: &[&str] = &[
    "or", "and", "not", "exists", "forall", "|", "||", "&&", "&", "!", "∨", "∧", "¬", "∃", "∀",
];

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        lx.scan()?;
        Ok(lx.toks)
    }

    fn scan(&mut self) -> Result<(), ParseError> {
        let s = self.src;
        let mut i = 0;
        while i < s.len() {
            let rest = &s[i..];
            let c = rest.chars().next().unwrap();
            if c.is_whitespace() {
                i += c.len_utf8();
                continue;
            }
            if c.is_ascii_digit() {
                let end = rest
                    .find(|ch: char| !ch.is_ascii_digit())
                    .unwrap_or(rest.len());
                let after = &rest[end..];
                if after.starts_with('.') || after.starts_with('e') || after.starts_with('E') {
                    let tail = after
                        .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '.'))
                        .unwrap_or(after.len());
                    return Err(ParseError::NonRational {
                        text: rest[..end + tail].to_string(),
                        pos: i,
                    });
                }
                self.toks.push((Tok::Int(rest[..end].parse().unwrap()), i));
                i += end;
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let end = rest
                    .find(|ch: char| !(ch.is_alphanumeric() || ch == '_' || ch == '\''))
                    .unwrap_or(rest.len());
                let word = &rest[..end];
                if CONNECTIVES.contains(&word) {
                    return Err(connective(word, i));
                }
                self.toks.push((Tok::Ident(word.to_string()), i));
                i += end;
                continue;
            }
            if let Some(conn) = ["||", "&&", "|", "&", "∨", "∧", "¬", "∃", "∀"]
                .iter()
                .find(|p| rest.starts_with(**p))
            {
                return Err(connective(conn, i));
            }
            if rest.starts_with('!') && !rest.starts_with("!=") {
                return Err(connective("!", i));
            }
            match SYMBOLS.iter().find(|p| rest.starts_with(**p)) {
                Some(sym) => {
                    self.toks.push((Tok::Sym(sym), i));
                    i += sym.len();
                }
                None if c == '.' => {
                    return Err(ParseError::NonRational {
                        text: rest.split_whitespace().next().unwrap_or(".").to_string(),
                        pos: i,
                    })
                }
                None => {
                    return Err(ParseError::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        Ok(())
    }
}

fn connective(word: &str, pos: usize) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: format!("`{word}` is not allowed: only conjunctions of polynomial constraints"),
    }
}

pub(crate) struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    vars: Vec<Var>,
    declared: BTreeSet<String>,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: Lexer::run(src)?,
            at: 0,
            end: src.len(),
            vars: Vec::new(),
            declared: BTreeSet::new(),
        })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`")))
        }
    }

    fn error(&self, msg: String) -> ParseError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Int(n)) => format!("`{n}`"),
            Some(Tok::Sym(s)) => format!("`{s}`"),
        };
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("{msg}, found {found}"),
        }
    }

    fn header(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(w)) if w == "vars" => self.at += 1,
            _ => return Err(self.error("expected `vars`".into())),
        }
        if self.eat(";") {
            return Ok(());
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    self.at += 1;
                    if !self.declared.insert(name.clone()) {
                        return Err(ParseError::DuplicateVariable { name });
                    }
                    self.vars.push(Var::new(&name));
                }
                _ => return Err(self.error("expected a variable name".into())),
            }
            if self.eat(";") {
                return Ok(());
            }
            self.expect(",")?;
        }
    }

    fn relation(&mut self) -> Result<Relation, ParseError> {
        let rel = match self.peek() {
            Some(Tok::Sym("=")) => Relation::Eq,
            Some(Tok::Sym("!=")) | Some(Tok::Sym("≠")) => Relation::Neq,
            Some(Tok::Sym(">")) => Relation::Gt,
            Some(Tok::Sym("<")) => Relation::Lt,
            Some(Tok::Sym(">=")) | Some(Tok::Sym("≥")) => Relation::Geq,
            Some(Tok::Sym("<=")) | Some(Tok::Sym("≤")) => Relation::Leq,
            _ => return Err(self.error("expected a relation".into())),
        };
        self.at += 1;
        Ok(rel)
    }

    pub(crate) fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut acc = if self.eat("-") {
            -self.term()?
        } else {
            self.eat("+");
            self.term()?
        };
        loop {
            if self.eat("+") {
                acc = acc + self.term()?;
            } else if self.eat("-") {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            if self.eat("*") {
                acc = acc * self.power()?;
            } else if matches!(self.peek(), Some(Tok::Sym("/"))) {
                let pos = self.pos();
                self.at += 1;
                let d = self.power()?;
                match d.constant_value() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::one() / c)),
                    Some(_) => {
                        return Err(ParseError::Syntax {
                            pos,
                            msg: "division by zero".into(),
                        })
                    }
                    None => {
                        return Err(ParseError::Syntax {
                            pos,
                            msg: "division by a non-constant polynomial".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if !self.eat("^") {
            return Ok(base);
        }
        match self.peek().cloned() {
            Some(Tok::Int(e)) => {
                self.at += 1;
                let e: u32 = e
                    .try_into()
                    .map_err(|_| self.error("exponent too large".into()))?;
                Ok(base.pow(e))
            }
            _ => Err(self.error("expected a non-negative integer exponent".into())),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Poly::constant(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if !self.declared.contains(&name) {
                    return Err(ParseError::UnknownVariable { name, pos });
                }
                Ok(Poly::var(name.as_str()))
            }
            Some(Tok::Sym("(")) => {
                self.at += 1;
                let p = self.poly()?;
                self.expect(")")?;
                Ok(p)
            }
            Some(Tok::Sym("-")) => {
                self.at += 1;
                Ok(-self.power()?)
            }
            _ => Err(self.error("expected a number, variable or `(`".into())),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at < self.toks.len() {
            Err(self.error("unexpected trailing input".into()))
        } else {
            Ok(())
        }
    }
}

/// Parses `vars x, y; constraint, constraint, ...`.
pub fn parse_formula(text: &str) -> Result<BasicFormula, ParseError> {
    let mut p = Parser::new(text)?;
    p.header()?;
    let mut f = BasicFormula::new(p.vars.clone());
    loop {
        let lhs = p.poly()?;
        let rel = p.relation()?;
        let rhs = p.poly()?;
        f.add_constraint(&lhs - &rhs, rel);
        if !p.eat(",") {
            break;
        }
    }
    p.finish()?;
    Ok(f)
}

/// Parses a polynomial over the given variables.
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<Poly, ParseError> {
    let mut p = Parser::new(text)?;
    p.declared = vars.iter().map(|s| s.to_string()).collect();
    let q = p.poly()?;
    p.finish()?;
    Ok(q)
}

/// Parses a polynomial, declaring every identifier it meets.
pub fn parse_poly_free(text: &str) -> Result<Poly, ParseError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser::new(text)?;
    p.declared = toks
        .into_iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) => Some(s),
            _ => None,
        })
        .collect();
    let q = p.poly()?;
    p.finish()?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_decimals() {
        assert!(matches!(
            parse_formula("vars x; x > 0.5"),
            Err(ParseError::NonRational { .. })
        ));
    }

    #[test]
    fn rejects_unknown_variable() {
        assert_eq!(
            parse_formula("vars x; y > 0"),
            Err(ParseError::UnknownVariable {
                name: "y".into(),
                pos: 8
            })
        );
    }

    #[test]
    fn rejects_disjunction() {
        assert!(matches!(
            parse_formula("vars x; x > 0 or x < -1"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("vars x; x > 0 | x < -1"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        match parse_formula("vars x; x + > 0") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_literals() {
        let p = parse_poly("3/4*x - 1/2", &["x"]).unwrap();
        assert_eq!(p.to_string(), "3/4*x - 1/2");
    }

    #[test]
    fn unary_minus_binds_below_power() {
        assert_eq!(parse_poly("-x^2", &["x"]).unwrap(), -Poly::var("x").pow(2));
    }
}
