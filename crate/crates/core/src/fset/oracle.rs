//! Brute-force membership for F-set expressions inside a sup-norm box, by
//! direct enumeration of partial sums and coset residues.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::group::{Endomorphism, GroupElement, Lattice};

use super::expr::{FSetExpr, Term};
use super::normal::box_points;

#[derive(Clone, Debug)]
enum OracleTerm {
    Points(BTreeSet<GroupElement>),
    Cosets(Lattice, BTreeSet<GroupElement>),
}

/// Supported terms: a full-rank subgroup (any cycles), or a trivial subgroup
/// with all cycles in the nonnegative (or all in the nonpositive) orthant
/// and `F^delta` having nonnegative entries, so partial sums are monotone.
#[derive(Clone, Debug)]
pub struct FSetOracle {
    dim: usize,
    bound: BigInt,
    terms: Vec<OracleTerm>,
}

fn orthant_sign(x: &GroupElement) -> Option<i8> {
    let pos = x.coords().iter().all(|c| !c.is_negative());
    let neg = x.coords().iter().all(|c| !c.is_positive());
    match (pos, neg) {
        (true, true) => Some(0),
        (true, false) => Some(1),
        (false, true) => Some(-1),
        _ => None,
    }
}

fn cycle_points(f: &Endomorphism, g: &GroupElement, delta: u32, limit: &BigInt) -> Vec<GroupElement> {
    let step = f.pow(delta);
    let mut out = Vec::new();
    let mut sum = g.clone();
    let mut summand = g.clone();
    while &sum.sup_norm() <= limit {
        out.push(sum.clone());
        if summand.is_zero() {
            break;
        }
        summand = step.apply(&summand).expect("dimension checked");
        sum = &sum + &summand;
    }
    out
}

fn cycle_residues(f: &Endomorphism, g: &GroupElement, delta: u32, h: &Lattice) -> BTreeSet<GroupElement> {
    let step = f.pow(delta);
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    let mut sum = h.coset_reduce(g);
    let mut summand = sum.clone();
    while seen.insert((sum.clone(), summand.clone())) {
        out.insert(sum.clone());
        summand = h.coset_reduce(&step.apply(&summand).expect("dimension checked"));
        sum = h.coset_reduce(&(&sum + &summand));
    }
    out
}

fn term_oracle(t: &Term, f: &Endomorphism, bound: &BigInt) -> Result<OracleTerm> {
    if !t.subgroup.is_trivial() {
        if t.subgroup.rank() != t.dim() {
            return Err(Error::pre("brute force needs trivial or full-rank subgroups"));
        }
        let h = &t.subgroup;
        let mut res = BTreeSet::from([h.coset_reduce(&t.point)]);
        for (g, delta) in &t.cycles {
            let cr = cycle_residues(f, g, *delta, h);
            res = res
                .iter()
                .flat_map(|a| cr.iter().map(move |b| h.coset_reduce(&(a + b))))
                .collect();
        }
        return Ok(OracleTerm::Cosets(h.clone(), res));
    }
    let signs: Vec<i8> = t
        .cycles
        .iter()
        .map(|(g, _)| orthant_sign(g).ok_or_else(|| Error::pre("brute force needs cycles in one orthant")))
        .collect::<Result<_>>()?;
    if signs.contains(&1) && signs.contains(&-1) {
        return Err(Error::pre("brute force needs all cycles of a term in one orthant"));
    }
    for (_, delta) in &t.cycles {
        if f.pow(*delta).as_matrix().iter().flatten().any(|x| x.is_negative()) {
            return Err(Error::pre("brute force needs F^delta with nonnegative entries"));
        }
    }
    let limit = bound + t.point.sup_norm();
    let mut partial: BTreeSet<GroupElement> = BTreeSet::from([GroupElement::zero(t.dim())]);
    for (g, delta) in &t.cycles {
        let pts = cycle_points(f, g, *delta, &limit);
        partial = partial
            .iter()
            .flat_map(|a| pts.iter().map(move |b| a + b))
            .filter(|x| x.sup_norm() <= limit)
            .collect();
    }
    Ok(OracleTerm::Points(
        partial
            .into_iter()
            .map(|x| &x + &t.point)
            .filter(|x| &x.sup_norm() <= bound)
            .collect(),
    ))
}

impl FSetOracle {
    pub fn new(e: &FSetExpr, f: &Endomorphism, bound: i64) -> Result<Self> {
        if e.dim != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: e.dim,
            });
        }
        if bound < 0 {
            return Err(Error::pre("bound must be nonnegative"));
        }
        let bound = BigInt::from(bound);
        let terms = e.terms.iter().map(|t| term_oracle(t, f, &bound)).collect::<Result<_>>()?;
        Ok(FSetOracle { dim: e.dim, bound, terms })
    }

    /// Membership of a point inside the box.
    pub fn contains(&self, x: &GroupElement) -> bool {
        self.terms.iter().any(|t| match t {
            OracleTerm::Points(s) => s.contains(x),
            OracleTerm::Cosets(h, r) => r.contains(&h.coset_reduce(x)),
        })
    }

    /// All members inside the box.
    pub fn members(&self) -> BTreeSet<GroupElement> {
        let mut out = BTreeSet::new();
        let bound = i64::try_from(&self.bound).expect("bound came from an i64");
        let mut cosets = false;
        for t in &self.terms {
            match t {
                OracleTerm::Points(s) => out.extend(s.iter().cloned()),
                OracleTerm::Cosets(..) => cosets = true,
            }
        }
        if cosets {
            out.extend(box_points(self.dim, bound).into_iter().filter(|x| self.contains(x)));
        }
        out
    }
}
