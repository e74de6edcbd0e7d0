//! F-set expressions and their text syntax.
//!
//! ```text
//! expr     := term (('∪' | '|') term)*
//! term     := item ('+' item)*
//! item     := '{' point '}' | point | cycle | subgroup | int ('ℤ' | 'Z')
//! cycle    := 'C(' point ';' int ')'
//! subgroup := 'H[' point (',' point)* ']'
//! point    := '(' int (',' int)* ')' | int
//! ```
//! Points in a term add up to its base point; several subgroups add up to the
//! subgroup they generate together.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupElement, Lattice};

/// `gamma0 + C(g_1; d_1) + ... + C(g_k; d_k) + H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub point: GroupElement,
    pub cycles: Vec<(GroupElement, u32)>,
    pub subgroup: Lattice,
}

impl Term {
    pub fn point(point: GroupElement) -> Self {
        let d = point.dim();
        Term {
            point,
            cycles: vec![],
            subgroup: Lattice::trivial(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }
}

/// A finite union of terms in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSetExpr {
    pub dim: usize,
    pub terms: Vec<Term>,
}

impl FSetExpr {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.dim() != dim
                || t.subgroup.dim() != dim
                || t.cycles.iter().any(|(g, _)| g.dim() != dim)
            {
                return Err(Error::DimensionMismatch { expected: dim, got: t.dim() });
            }
            if t.cycles.iter().any(|&(_, delta)| delta == 0) {
                return Err(Error::pre("cycle step must be at least 1"));
            }
        }
        Ok(FSetExpr { dim, terms })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).expr()
    }
}

impl std::str::FromStr for FSetExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FSetExpr::parse(s)
    }
}

fn point_str(x: &GroupElement) -> String {
    if x.dim() == 1 {
        x.to_string()
    } else {
        let parts: Vec<String> = x.coords().iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", point_str(&self.point))?;
        for (g, d) in &self.cycles {
            write!(f, " + C({};{})", point_str(g), d)?;
        }
        if !self.subgroup.is_trivial() {
            let gens: Vec<String> = self.subgroup.basis().iter().map(point_str).collect();
            write!(f, " + H[{}]", gens.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for FSetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

enum Item {
    Point(GroupElement),
    Cycle(GroupElement, u32),
    Subgroup(Vec<GroupElement>),
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<FSetExpr> {
        let mut terms = vec![self.term()?];
        while matches!(self.peek(), Some('∪') | Some('|')) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        let dim = terms[0].dim();
        if terms.iter().any(|t| t.dim() != dim) {
            return Err(Error::Parse {
                pos: 0,
                msg: "terms of different dimensions".into(),
            });
        }
        FSetExpr::new(dim, terms)
    }

    fn term(&mut self) -> Result<Term> {
        let start = self.pos;
        let mut items = vec![self.item()?];
        while self.eat('+') {
            items.push(self.item()?);
        }
        let mut dim = None;
        let mut check = |d: usize, p: &Parser| -> Result<()> {
            match dim {
                None => {
                    dim = Some(d);
                    Ok(())
                }
                Some(e) if e == d => Ok(()),
                Some(_) => p.err("mixed dimensions in a term"),
            }
        };
        for it in &items {
            match it {
                Item::Point(x) | Item::Cycle(x, _) => check(x.dim(), self)?,
                Item::Subgroup(gs) => {
                    for g in gs {
                        check(g.dim(), self)?;
                    }
                }
            }
        }
        let Some(d) = dim else {
            self.pos = start;
            return self.err("empty term");
        };
        let mut point = GroupElement::zero(d);
        let mut cycles = vec![];
        let mut gens = vec![];
        for it in items {
            match it {
                Item::Point(x) => point = &point + &x,
                Item::Cycle(g, delta) => cycles.push((g, delta)),
                Item::Subgroup(gs) => gens.extend(gs),
            }
        }
        Ok(Term {
            point,
            cycles,
            subgroup: Lattice::new(d, &gens),
        })
    }

    fn item(&mut self) -> Result<Item> {
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let p = self.point()?;
                self.expect('}')?;
                Ok(Item::Point(p))
            }
            Some('C') => {
                self.pos += 1;
                self.expect('(')?;
                let g = self.point()?;
                self.expect(';')?;
                let delta = self.int()?;
                let delta = delta
                    .to_u32()
                    .filter(|&d| d >= 1)
                    .map_or_else(|| self.err("cycle step must be a positive integer"), Ok)?;
                self.expect(')')?;
                Ok(Item::Cycle(g, delta))
            }
            Some('H') => {
                self.pos += 1;
                self.expect('[')?;
                let mut gens = vec![];
                if !self.eat(']') {
                    gens.push(self.point()?);
                    while self.eat(',') {
                        gens.push(self.point()?);
                    }
                    self.expect(']')?;
                }
                if gens.is_empty() {
                    return self.err("H[] needs at least one generator");
                }
                Ok(Item::Subgroup(gens))
            }
            Some(_) => {
                let p = self.point()?;
                if matches!(self.chars.get(self.pos), Some('ℤ') | Some('Z')) {
                    self.pos += 1;
                    if p.dim() != 1 {
                        return self.err("kℤ needs an integer k");
                    }
                    return Ok(Item::Subgroup(vec![p]));
                }
                Ok(Item::Point(p))
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn point(&mut self) -> Result<GroupElement> {
        if self.eat('(') {
            let mut coords = vec![self.int()?];
            while self.eat(',') {
                coords.push(self.int()?);
            }
            self.expect(')')?;
            Ok(GroupElement::new(coords))
        } else {
            Ok(GroupElement::new(vec![self.int()?]))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let mut neg = false;
        while let Some(&c) = self.chars.get(self.pos) {
            if c == '-' || c == '−' {
                neg = !neg;
                self.pos += 1;
                self.skip_ws();
            } else {
                break;
            }
        }
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        if self.pos - start > 4000 {
            return self.err("integer literal too long");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: BigInt = s.parse().expect("ascii digits");
        Ok(if neg && !v.is_zero() { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar_forms() {
        let e = FSetExpr::parse("{2} + C(3;1) + H[5]").unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].point, GroupElement::from_i64s(&[2]));
        assert_eq!(e.terms[0].cycles, vec![(GroupElement::from_i64s(&[3]), 1)]);
        assert_eq!(e.terms[0].subgroup, Lattice::scaled(1, 5));
        assert_eq!(FSetExpr::parse("2+C(3;1)+H[5]").unwrap(), e);
        assert_eq!(FSetExpr::parse("2 + C(3;1) + 5ℤ").unwrap(), e);
        let u = FSetExpr::parse("C(1;1) ∪ 3ℤ").unwrap();
        assert_eq!(u.terms.len(), 2);
        assert_eq!(u.terms[1].point, GroupElement::from_i64s(&[0]));
        let two = FSetExpr::parse("{(1,-2)} + C((0,1);2) + H[(2,0),(0,4)] | {(0,0)}").unwrap();
        assert_eq!(two.dim, 2);
    }

    #[test]
    fn display_round_trips() {
        for s in ["{2} + C(3;1) + H[5]", "{(1,-2)} + C((0,1);2) ∪ {(0,0)} + H[(2,0),(0,4)]", "{0}"] {
            let e = FSetExpr::parse(s).unwrap();
            assert_eq!(FSetExpr::parse(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn rejects_bad_input() {
        for s in ["", "C(1;0)", "{1", "1 + (1,2)", "C(1;1) ∪ {(1,2)}", "H[]", "{1} 2", "(1,2)ℤ"] {
            assert!(matches!(FSetExpr::parse(s), Err(Error::Parse { .. }) | Err(Error::DimensionMismatch { .. })), "{s}");
        }
    }
}
