//! Parser for the exponent-structure grammar: atoms `Q[k,n](t)`, `!Q[k,n](t)`,
//! `t = t`, `t != t`; terms `s^m(x)`, `s(x)`, bare variables, and integer
//! constants (at least 1); connectives `AND`, `OR`, `NOT`; quantifiers
//! `ALL x.` / `EXISTS x.`; literals `true` / `false`.

use super::{NAtom, NBase, NFormula, NTerm};
use crate::formula::Quantifier;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at offset {pos}: {message}")]
pub struct NParseError {
    pub pos: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, NParseError> {
    Err(NParseError { pos, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Q,
    Bang,
    LBracket,
    RBracket,
    Comma,
    LParen,
    RParen,
    Dot,
    Eq,
    Neq,
    Caret,
    Minus,
    S,
    All,
    Exists,
    And,
    Or,
    Not,
    True,
    False,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(text: &str) -> Result<Lexer, NParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '[' => { toks.push((Tok::LBracket, pos)); i += 1; }
            ']' => { toks.push((Tok::RBracket, pos)); i += 1; }
            ',' => { toks.push((Tok::Comma, pos)); i += 1; }
            '(' => { toks.push((Tok::LParen, pos)); i += 1; }
            ')' => { toks.push((Tok::RParen, pos)); i += 1; }
            '.' => { toks.push((Tok::Dot, pos)); i += 1; }
            '^' => { toks.push((Tok::Caret, pos)); i += 1; }
            '-' | '\u{2212}' => { toks.push((Tok::Minus, pos)); i += 1; }
            '!' => {
                if chars.get(i + 1).map(|&(_, c)| c) == Some('=') {
                    toks.push((Tok::Neq, pos));
                    i += 2;
                } else {
                    toks.push((Tok::Bang, pos));
                    i += 1;
                }
            }
            '=' => { toks.push((Tok::Eq, pos)); i += 1; }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().map(|&(_, c)| c).collect();
                match digits.parse::<u64>() {
                    Ok(n) => toks.push((Tok::Int(n), pos)),
                    Err(_) => return err(pos, "integer literal out of range"),
                }
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().map(|&(_, c)| c).collect();
                let tok = match word.as_str() {
                    "ALL" => Tok::All,
                    "EXISTS" => Tok::Exists,
                    "AND" => Tok::And,
                    "OR" => Tok::Or,
                    "NOT" => Tok::Not,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "Q" => Tok::Q,
                    "s" => Tok::S,
                    _ => Tok::Ident(word),
                };
                toks.push((tok, pos));
                i = j;
            }
            other => return err(pos, format!("unexpected character {other:?}")),
        }
    }
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.0.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), NParseError> {
        if self.peek() == Some(want) {
            self.i += 1;
            Ok(())
        } else {
            err(self.pos(), format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<NFormula, NParseError> {
        match self.peek() {
            Some(Tok::All) | Some(Tok::Exists) => self.quantified(),
            _ => self.or_expr(),
        }
    }

    fn quantified(&mut self) -> Result<NFormula, NParseError> {
        let quantifier = match self.bump() {
            Some(Tok::All) => Quantifier::All,
            Some(Tok::Exists) => Quantifier::Exists,
            _ => unreachable!(),
        };
        let var_pos = self.pos();
        let var = match self.bump() {
            Some(Tok::Ident(v)) => v,
            _ => return err(var_pos, "expected a variable after the quantifier"),
        };
        if self.bound.contains(&var) {
            return err(var_pos, format!("variable '{var}' is already bound on this branch"));
        }
        self.expect(&Tok::Dot, "'.' after the quantifier binder")?;
        self.bound.push(var.clone());
        let body = self.formula()?;
        self.bound.pop();
        Ok(NFormula::Quant { quantifier, var, body: Box::new(body) })
    }

    fn or_expr(&mut self) -> Result<NFormula, NParseError> {
        let mut f = self.and_expr()?;
        while self.peek() == Some(&Tok::Or) {
            self.i += 1;
            f = NFormula::or(f, self.and_expr()?);
        }
        Ok(f)
    }

    fn and_expr(&mut self) -> Result<NFormula, NParseError> {
        let mut f = self.not_expr()?;
        while self.peek() == Some(&Tok::And) {
            self.i += 1;
            f = NFormula::and(f, self.not_expr()?);
        }
        Ok(f)
    }

    fn not_expr(&mut self) -> Result<NFormula, NParseError> {
        if self.peek() == Some(&Tok::Not) {
            self.i += 1;
            Ok(NFormula::not(self.not_expr()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<NFormula, NParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::All) | Some(Tok::Exists) => self.quantified(),
            Some(Tok::True) => {
                self.i += 1;
                Ok(NFormula::True)
            }
            Some(Tok::False) => {
                self.i += 1;
                Ok(NFormula::False)
            }
            Some(Tok::Q) => {
                let a = self.q_atom(false)?;
                Ok(NFormula::Atom(a))
            }
            Some(Tok::Bang) => {
                self.i += 1;
                let a = self.q_atom(true)?;
                Ok(NFormula::Atom(a))
            }
            _ => {
                let lhs = self.term()?;
                let op_pos = self.pos();
                match self.bump() {
                    Some(Tok::Eq) => Ok(NFormula::Atom(NAtom::Eq(lhs, self.term()?))),
                    Some(Tok::Neq) => Ok(NFormula::Atom(NAtom::Neq(lhs, self.term()?))),
                    _ => err(op_pos, "expected '=' or '!='"),
                }
            }
        }
    }

    fn q_atom(&mut self, negated: bool) -> Result<NAtom, NParseError> {
        let q_pos = self.pos();
        self.expect(&Tok::Q, "'Q'")?;
        self.expect(&Tok::LBracket, "'['")?;
        let k_pos = self.pos();
        let k = match self.bump() {
            Some(Tok::Int(k)) => k,
            _ => return err(k_pos, "expected residue k"),
        };
        self.expect(&Tok::Comma, "','")?;
        let n_pos = self.pos();
        let n = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => return err(n_pos, "expected modulus n"),
        };
        if n < 2 {
            return err(n_pos, format!("modulus must be >= 2, got {n}"));
        }
        if k >= n {
            return err(q_pos, format!("residue {k} must be below the modulus {n}"));
        }
        self.expect(&Tok::RBracket, "']'")?;
        self.expect(&Tok::LParen, "'('")?;
        let term = self.term()?;
        self.expect(&Tok::RParen, "')'")?;
        Ok(if negated {
            NAtom::not_q(k, n, term)
        } else {
            NAtom::q(k, n, term)
        })
    }

    fn term(&mut self) -> Result<NTerm, NParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::S) => {
                // s(x) or s^m(x) with m possibly negative
                let shift: i64 = if self.peek() == Some(&Tok::Caret) {
                    self.i += 1;
                    let neg = if self.peek() == Some(&Tok::Minus) {
                        self.i += 1;
                        true
                    } else {
                        false
                    };
                    let m_pos = self.pos();
                    let m = match self.bump() {
                        Some(Tok::Int(m)) => m,
                        _ => return err(m_pos, "expected a shift count after '^'"),
                    };
                    let m = i64::try_from(m)
                        .map_err(|_| NParseError { pos: m_pos, message: "shift too large".into() })?;
                    if neg { -m } else { m }
                } else {
                    1
                };
                self.expect(&Tok::LParen, "'(' after s")?;
                let inner = self.term()?;
                self.expect(&Tok::RParen, "')'")?;
                // Compose shifts; a constant base absorbs floored shifts.
                match inner.base {
                    NBase::Var(v) => Ok(NTerm { base: NBase::Var(v), shift: inner.shift + shift }),
                    NBase::One => {
                        let v = inner.const_value().expect("constant") as i64 + shift;
                        Ok(NTerm::constant(v.max(1) as u64))
                    }
                }
            }
            Some(Tok::Int(c)) => {
                if c < 1 {
                    return err(pos, "constants start at 1");
                }
                Ok(NTerm::constant(c))
            }
            Some(Tok::Ident(v)) => Ok(NTerm { base: NBase::Var(v), shift: 0 }),
            _ => err(pos, "expected a term"),
        }
    }
}

pub fn parse_nformula(text: &str) -> Result<NFormula, NParseError> {
    let lexer = lex(text)?;
    let mut p = Parser { toks: lexer.toks, i: 0, end: text.len(), bound: Vec::new() };
    let f = p.formula()?;
    if p.i != p.toks.len() {
        return err(p.pos(), "unexpected trailing input");
    }
    Ok(f)
}
