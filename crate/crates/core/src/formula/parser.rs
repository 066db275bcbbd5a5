//! Hand-rolled lexer and recursive-descent parser for the formula grammar.
//!
//! Grammar (UTF-8): variables `[a-zA-Z_][a-zA-Z0-9_]*`; unsigned integer
//! literals (signs belong to the term grammar); scalar multiples written
//! `3x`, `3*x`, or `3 x`; operators `+`, `-` (also U+2212), `=`, `!=`,
//! `≡_n` (also spelled `=mod n`); connectives `AND`, `OR`, `NOT`;
//! quantifiers `ALL x.` / `EXISTS x.` and `ALL x IN P.` / `EXISTS x IN P.`;
//! parentheses. `P` is reserved for the predicate.

use super::{Atom, Formula, LinearTerm, Quantifier};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigUint),
    Plus,
    Minus,
    Star,
    Eq,
    Neq,
    /// `≡_n`
    Cong(BigUint),
    /// `=mod` (modulus follows as an Int token)
    EqMod,
    LParen,
    RParen,
    Dot,
    All,
    Exists,
    In,
    And,
    Or,
    Not,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => { out.push(Spanned { tok: Tok::LParen, pos }); i += 1; }
            ')' => { out.push(Spanned { tok: Tok::RParen, pos }); i += 1; }
            '.' => { out.push(Spanned { tok: Tok::Dot, pos }); i += 1; }
            '+' => { out.push(Spanned { tok: Tok::Plus, pos }); i += 1; }
            '-' | '\u{2212}' => { out.push(Spanned { tok: Tok::Minus, pos }); i += 1; }
            '*' => { out.push(Spanned { tok: Tok::Star, pos }); i += 1; }
            '!' => {
                if chars.get(i + 1).map(|&(_, c)| c) == Some('=') {
                    out.push(Spanned { tok: Tok::Neq, pos });
                    i += 2;
                } else {
                    return err(pos, "expected '=' after '!'");
                }
            }
            '=' => {
                // `=mod` must be adjacent to distinguish it from `=` then a variable.
                let is_mod = chars.get(i + 1).map(|&(_, c)| c) == Some('m')
                    && chars.get(i + 2).map(|&(_, c)| c) == Some('o')
                    && chars.get(i + 3).map(|&(_, c)| c) == Some('d')
                    && chars
                        .get(i + 4)
                        .is_none_or(|&(_, c)| !c.is_alphanumeric() && c != '_');
                if is_mod {
                    out.push(Spanned { tok: Tok::EqMod, pos });
                    i += 4;
                } else {
                    out.push(Spanned { tok: Tok::Eq, pos });
                    i += 1;
                }
            }
            '\u{2261}' => {
                // ≡_n
                if chars.get(i + 1).map(|&(_, c)| c) != Some('_') {
                    return err(pos, "expected '_' after '≡'");
                }
                let mut j = i + 2;
                let start = j;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return err(pos, "expected modulus digits after '≡_'");
                }
                let digits: String = chars[start..j].iter().map(|&(_, c)| c).collect();
                let n: BigUint = digits.parse().expect("digit string");
                check_modulus(&n, pos)?;
                out.push(Spanned { tok: Tok::Cong(n), pos });
                i = j;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().map(|&(_, c)| c).collect();
                out.push(Spanned { tok: Tok::Int(digits.parse().expect("digit string")), pos });
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
                    "IN" => Tok::In,
                    "AND" => Tok::And,
                    "OR" => Tok::Or,
                    "NOT" => Tok::Not,
                    _ => Tok::Ident(word),
                };
                out.push(Spanned { tok, pos });
                i = j;
            }
            other => return err(pos, format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

fn check_modulus(n: &BigUint, pos: usize) -> Result<(), ParseError> {
    if *n < BigUint::from(2u32) {
        err(pos, format!("congruence modulus must be >= 2, got {n}"))
    } else {
        Ok(())
    }
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    end: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|s| &s.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |s| s.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|s| s.tok.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.i += 1;
            Ok(())
        } else {
            err(self.pos(), format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::All) | Some(Tok::Exists) => self.quantified(),
            _ => self.or_expr(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let quantifier = match self.bump() {
            Some(Tok::All) => Quantifier::All,
            Some(Tok::Exists) => Quantifier::Exists,
            _ => unreachable!(),
        };
        let var_pos = self.pos();
        let var = match self.bump() {
            Some(Tok::Ident(name)) => name,
            _ => return err(var_pos, "expected a variable after the quantifier"),
        };
        if var == "P" {
            return err(var_pos, "'P' is reserved for the predicate");
        }
        if self.bound.contains(&var) {
            return err(var_pos, format!("variable '{var}' is already bound on this branch"));
        }
        let in_p = if self.peek() == Some(&Tok::In) {
            self.i += 1;
            let p_pos = self.pos();
            match self.bump() {
                Some(Tok::Ident(p)) if p == "P" => true,
                _ => return err(p_pos, "expected 'P' after 'IN'"),
            }
        } else {
            false
        };
        self.expect(&Tok::Dot, "'.' after the quantifier binder")?;
        self.bound.push(var.clone());
        let body = self.formula()?;
        self.bound.pop();
        Ok(Formula::Quant { quantifier, var, in_p, body: Box::new(body) })
    }

    fn or_expr(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and_expr()?;
        while self.peek() == Some(&Tok::Or) {
            self.i += 1;
            let r = self.and_expr()?;
            f = Formula::or(f, r);
        }
        Ok(f)
    }

    fn and_expr(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.not_expr()?;
        while self.peek() == Some(&Tok::And) {
            self.i += 1;
            let r = self.not_expr()?;
            f = Formula::and(f, r);
        }
        Ok(f)
    }

    fn not_expr(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(&Tok::Not) {
            self.i += 1;
            Ok(Formula::not(self.not_expr()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(f)
            }
            Some(Tok::All) | Some(Tok::Exists) => self.quantified(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let op_pos = self.pos();
        let atom = match self.bump() {
            Some(Tok::Eq) => Atom::eq0(lhs.sub(&self.term()?)),
            Some(Tok::Neq) => Atom::neq0(lhs.sub(&self.term()?)),
            Some(Tok::Cong(n)) => Atom::congruence(lhs.sub(&self.term()?), n),
            Some(Tok::EqMod) => {
                let n_pos = self.pos();
                let n = match self.bump() {
                    Some(Tok::Int(n)) => n,
                    _ => return err(n_pos, "expected a modulus after '=mod'"),
                };
                check_modulus(&n, n_pos)?;
                Atom::congruence(lhs.sub(&self.term()?), n)
            }
            _ => return err(op_pos, "expected '=', '!=', '≡_n', or '=mod n'"),
        };
        Ok(Formula::Atom(atom))
    }

    fn term(&mut self) -> Result<LinearTerm, ParseError> {
        let mut t = LinearTerm::zero();
        let mut sign = BigInt::one();
        match self.peek() {
            Some(Tok::Minus) => {
                self.i += 1;
                sign = -sign;
            }
            Some(Tok::Plus) => {
                self.i += 1;
            }
            _ => {}
        }
        self.product(&mut t, sign)?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => BigInt::one(),
                Some(Tok::Minus) => -BigInt::one(),
                _ => break,
            };
            self.i += 1;
            self.product(&mut t, sign)?;
        }
        Ok(t)
    }

    /// One summand: an integer, a variable, or a scalar multiple of one.
    fn product(&mut self, acc: &mut LinearTerm, sign: BigInt) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let c = sign * BigInt::from(n);
                if self.peek() == Some(&Tok::Star) {
                    self.i += 1;
                    let v_pos = self.pos();
                    match self.bump() {
                        Some(Tok::Ident(name)) => self.push_var(acc, name, c, v_pos)?,
                        _ => return err(v_pos, "expected a variable after '*'"),
                    }
                } else if let Some(Tok::Ident(_)) = self.peek() {
                    let v_pos = self.pos();
                    match self.bump() {
                        Some(Tok::Ident(name)) => self.push_var(acc, name, c, v_pos)?,
                        _ => unreachable!(),
                    }
                } else {
                    acc.add_constant(c);
                }
                Ok(())
            }
            Some(Tok::Ident(name)) => self.push_var(acc, name, sign, pos),
            _ => err(pos, "expected an integer or a variable"),
        }
    }

    fn push_var(
        &self,
        acc: &mut LinearTerm,
        name: String,
        c: BigInt,
        pos: usize,
    ) -> Result<(), ParseError> {
        if name == "P" {
            return err(pos, "'P' is reserved for the predicate");
        }
        acc.add_coeff(name, c);
        Ok(())
    }
}

/// Parses a formula in the surface grammar; the printer emits the same
/// grammar, and `parse(print(f))` is structurally equal to `f`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, end: text.len(), bound: Vec::new() };
    let f = p.formula()?;
    if p.i != p.toks.len() {
        return err(p.pos(), "unexpected trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AtomKind;

    #[test]
    fn collects_repeated_variables() {
        let f = parse_formula("x + x - y = 0").unwrap();
        match f {
            Formula::Atom(a) => {
                assert_eq!(a.kind, AtomKind::Eq0);
                assert_eq!(a.term.coefficient("x"), BigInt::from(2));
                assert_eq!(a.term.coefficient("y"), BigInt::from(-1));
            }
            other => panic!("expected atom, got {other:?}"),
        }
    }

    #[test]
    fn bounded_quantifier_tree() {
        let f = parse_formula("ALL a IN P. EXISTS y. y + y = a").unwrap();
        match &f {
            Formula::Quant { quantifier: Quantifier::All, var, in_p: true, body } => {
                assert_eq!(var, "a");
                match body.as_ref() {
                    Formula::Quant { quantifier: Quantifier::Exists, in_p: false, .. } => {}
                    other => panic!("expected inner EXISTS, got {other:?}"),
                }
            }
            other => panic!("expected ALL..IN P, got {other:?}"),
        }
    }

    #[test]
    fn modulus_one_rejected_with_position() {
        let e = parse_formula("x ≡_1 0").unwrap_err();
        assert!(e.message.contains("modulus must be >= 2"), "{e}");
        let e = parse_formula("x =mod 1 0").unwrap_err();
        assert!(e.message.contains("modulus must be >= 2"), "{e}");
    }

    #[test]
    fn eqmod_spelling_matches_unicode() {
        let a = parse_formula("x ≡_5 2").unwrap();
        let b = parse_formula("x =mod 5 2").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_multiples() {
        let a = parse_formula("2x - 3*y + 4 z = 1").unwrap();
        match a {
            Formula::Atom(at) => {
                assert_eq!(at.term.coefficient("x"), BigInt::from(2));
                assert_eq!(at.term.coefficient("y"), BigInt::from(-3));
                assert_eq!(at.term.coefficient("z"), BigInt::from(4));
                assert_eq!(*at.term.constant_part(), BigInt::from(-1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rebinding_rejected() {
        let e = parse_formula("ALL x. EXISTS x. x = 0").unwrap_err();
        assert!(e.message.contains("already bound"), "{e}");
        // Same variable on parallel branches is fine.
        parse_formula("(ALL x. x = 0) AND (EXISTS x. x = 1)").unwrap();
    }

    #[test]
    fn minus_unicode_accepted() {
        let a = parse_formula("x \u{2212} y = 0").unwrap();
        let b = parse_formula("x - y = 0").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_positions_point_at_offender() {
        let e = parse_formula("x = ").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_formula("x + # = 0").unwrap_err();
        assert_eq!(e.pos, 4);
    }

    #[test]
    fn print_parse_round_trip_samples() {
        for text in [
            "x + x - y = 0",
            "ALL a IN P. EXISTS y. y + y = a",
            "(x = 0 AND y != 2) OR NOT (z ≡_3 1)",
            "2x - 3y + 7 ≡_12 0",
            "EXISTS b. (b = 0 OR b - 1 = 0)",
        ] {
            let f = parse_formula(text).unwrap();
            let printed = f.to_string();
            let g = parse_formula(&printed).unwrap_or_else(|e| panic!("reparse {printed:?}: {e}"));
            assert_eq!(f, g, "round trip through {printed:?}");
        }
    }
}
