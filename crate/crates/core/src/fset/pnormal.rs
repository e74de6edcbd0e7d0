//! Derksen's p-normal sets over `Z`, and conversion to and from F-sets for
//! `F = p`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{Endomorphism, GroupElement, Lattice};
use crate::json::{array_field, int_from_json, int_to_json, usize_field};

use super::expr::{FSetExpr, Term};
use super::power::cycle_to_power;

/// `S~_{p^delta}(c0; c1..cd) = {(c0 + c1 q^{l1} + ... + cd q^{ld}) / (q - 1)}`
/// with `q = p^delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryNested {
    p: u64,
    delta: u32,
    c0: BigInt,
    cs: Vec<BigInt>,
}

impl ElementaryNested {
    pub fn new(p: u64, delta: u32, c0: BigInt, cs: Vec<BigInt>) -> Result<Self> {
        if p < 2 || delta == 0 {
            return Err(Error::pre("need p >= 2 and delta >= 1"));
        }
        let e = ElementaryNested { p, delta, c0, cs };
        let total: BigInt = &e.c0 + e.cs.iter().sum::<BigInt>();
        if !total.is_multiple_of(&(e.q() - 1)) {
            return Err(Error::pre(format!(
                "p^delta - 1 = {} does not divide c0 + ... + cd = {total}",
                e.q() - 1
            )));
        }
        Ok(e)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn c0(&self) -> &BigInt {
        &self.c0
    }

    pub fn cs(&self) -> &[BigInt] {
        &self.cs
    }

    /// `q = p^delta`.
    pub fn q(&self) -> BigInt {
        BigInt::from(self.p).pow(self.delta)
    }

    /// Elements in `[lo, hi]`. Needs `c1..cd` of one sign, so that every
    /// summand moves away from `c0` as its exponent grows.
    pub fn elements_in(&self, lo: &BigInt, hi: &BigInt) -> Result<BTreeSet<BigInt>> {
        let pos = self.cs.iter().all(|c| !c.is_negative());
        let neg = self.cs.iter().all(|c| !c.is_positive());
        if !pos && !neg {
            return Err(Error::pre("enumeration needs c1..cd of one sign"));
        }
        let q = self.q();
        let qm1 = &q - 1;
        // Scaled window: n in [lo, hi] iff (q-1) n in [lo (q-1), hi (q-1)].
        let (slo, shi): (BigInt, BigInt) = (lo * &qm1, hi * &qm1);
        let span = shi.abs().max(slo.abs()) + self.c0.abs() + self.cs.iter().map(|c| c.abs()).sum::<BigInt>();
        let mut partial: BTreeSet<BigInt> = BTreeSet::from([self.c0.clone()]);
        for (i, c) in self.cs.iter().enumerate() {
            let rest: BigInt = self.cs[i + 1..].iter().sum();
            let mut next = BTreeSet::new();
            for base in &partial {
                let mut term = c.clone();
                loop {
                    let v = base + &term;
                    // The remaining summands contribute at least `rest` in the direction of their sign.
                    let lowest = &v + &rest;
                    if (pos && lowest > shi) || (neg && lowest < slo) {
                        break;
                    }
                    next.insert(v);
                    if c.is_zero() || term.abs() > span {
                        break;
                    }
                    term *= &q;
                }
            }
            partial = next;
        }
        Ok(partial
            .into_iter()
            .filter(|v| *v >= slo && *v <= shi)
            .map(|v| v / &qm1)
            .collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "delta": self.delta,
            "c0": int_to_json(&self.c0),
            "c": self.cs.iter().map(int_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let p = usize_field(v, "p")? as u64;
        let delta = u32::try_from(usize_field(v, "delta")?).map_err(|_| Error::Malformed("delta out of range".into()))?;
        let c0 = int_from_json(v.get("c0").ok_or_else(|| Error::Malformed("missing c0".into()))?)?;
        let cs = array_field(v, "c")?.iter().map(int_from_json).collect::<Result<_>>()?;
        ElementaryNested::new(p, delta, c0, cs)
    }
}

impl std::fmt::Display for ElementaryNested {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cs: Vec<String> = self.cs.iter().map(|c| c.to_string()).collect();
        write!(f, "S~_{}^{}({};{})", self.p, self.delta, self.c0, cs.join(","))
    }
}

/// A finite union of elementary p-nested sets and cosets `a + mZ`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PNormal {
    pub nested: Vec<ElementaryNested>,
    /// `(a, m)` with `0 <= a < m`; `m = 1` is all of `Z`.
    pub cosets: Vec<(BigInt, BigInt)>,
}

impl PNormal {
    pub fn contains_in(&self, lo: &BigInt, hi: &BigInt) -> Result<BTreeSet<BigInt>> {
        let mut out = BTreeSet::new();
        for e in &self.nested {
            out.extend(e.elements_in(lo, hi)?);
        }
        for (a, m) in &self.cosets {
            let mut x = lo + (a - lo).mod_floor(m);
            while &x <= hi {
                out.insert(x.clone());
                x += m;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nested": self.nested.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            "cosets": self.cosets.iter().map(|(a, m)| json!({"offset": int_to_json(a), "modulus": int_to_json(m)})).collect::<Vec<_>>(),
        })
    }
}

/// Residues mod `m` of `C(k; delta)` for multiplication by `p`: the pairs
/// (partial sum, next summand) mod `m` are eventually periodic.
fn cycle_residues(p: &BigInt, k: &BigInt, delta: u32, m: &BigInt) -> BTreeSet<BigInt> {
    let q = p.pow(delta).mod_floor(m);
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    let mut sum = k.mod_floor(m);
    let mut summand = sum.clone();
    while seen.insert((sum.clone(), summand.clone())) {
        out.insert(sum.clone());
        summand = (&summand * &q).mod_floor(m);
        sum = (&sum + &summand).mod_floor(m);
    }
    out
}

fn one_dim_scalar(e: &FSetExpr) -> Result<()> {
    if e.dim != 1 {
        return Err(Error::pre("p-normal conversion is for subsets of Z"));
    }
    Ok(())
}

fn scalar(x: &GroupElement) -> BigInt {
    x.coords()[0].clone()
}

/// Each term becomes either a finite union of cosets (nontrivial subgroup) or,
/// after equalizing cycle steps to their lcm, a union of elementary nested sets
/// `S~(k0 (q-1) - k1 - ... - kd; q k1, ..., q kd)`.
pub fn to_pnormal(e: &FSetExpr, p: u64) -> Result<PNormal> {
    one_dim_scalar(e)?;
    if p < 2 {
        return Err(Error::pre("p must be at least 2"));
    }
    let f = Endomorphism::scalar(p as i64, 1)?;
    let pb = BigInt::from(p);
    let mut out = PNormal::default();
    for t in &e.terms {
        if !t.subgroup.is_trivial() {
            let m = t.subgroup.index().expect("nonzero subgroup of Z has finite index");
            let mut res: BTreeSet<BigInt> = BTreeSet::from([scalar(&t.point).mod_floor(&m)]);
            for (g, delta) in &t.cycles {
                let cr = cycle_residues(&pb, &scalar(g), *delta, &m);
                let m = &m;
                res = res.iter().flat_map(|a| cr.iter().map(move |b| (a + b).mod_floor(m))).collect();
            }
            out.cosets.extend(res.into_iter().map(|a| (a, m.clone())));
            continue;
        }
        let l = t.cycles.iter().fold(1u32, |acc, &(_, d)| acc.lcm(&d));
        // Per cycle: the alternatives (point, optional cycle generator) with step l.
        let mut choices: Vec<(BigInt, Vec<BigInt>)> = vec![(scalar(&t.point), vec![])];
        for (g, delta) in &t.cycles {
            let pieces = cycle_to_power(&f, g, *delta, l / delta)?;
            let mut alts: Vec<(BigInt, Option<BigInt>)> = Vec::new();
            for pc in pieces {
                if let Some(s) = &pc.singleton {
                    alts.push((scalar(s), None));
                }
                alts.push((scalar(&pc.translate), Some(scalar(&pc.cycle.0))));
            }
            choices = choices
                .iter()
                .flat_map(|(k0, ks)| {
                    alts.iter().map(move |(t, c)| {
                        let mut ks = ks.clone();
                        ks.extend(c.iter().cloned());
                        (k0 + t, ks)
                    })
                })
                .collect();
        }
        let q = pb.pow(l);
        for (k0, ks) in choices {
            let c0 = &k0 * (&q - 1) - ks.iter().sum::<BigInt>();
            let cs = ks.iter().map(|k| &q * k).collect();
            out.nested.push(ElementaryNested::new(p, l, c0, cs)?);
        }
    }
    Ok(out)
}

/// `S~(c0; c1..cd) = k0 + sum_i ({0} ∪ C(c_i; delta))` with
/// `k0 = (c0 + c1 + ... + cd) / (q - 1)`, expanded over subsets of indices.
pub fn from_pnormal(s: &ElementaryNested) -> FSetExpr {
    let total: BigInt = &s.c0 + s.cs.iter().sum::<BigInt>();
    let k0: BigInt = total / (s.q() - 1);
    let nz: Vec<&BigInt> = s.cs.iter().filter(|c| !c.is_zero()).collect();
    let mut terms = Vec::with_capacity(1 << nz.len());
    for mask in 0u64..(1u64 << nz.len()) {
        let cycles = nz
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| (GroupElement::new(vec![(*c).clone()]), s.delta))
            .collect();
        terms.push(Term {
            point: GroupElement::new(vec![k0.clone()]),
            cycles,
            subgroup: Lattice::trivial(1),
        });
    }
    FSetExpr::new(1, terms).expect("well-formed terms")
}

/// A coset `a + mZ` as an F-set expression.
pub fn coset_expr(a: &BigInt, m: &BigInt) -> FSetExpr {
    let term = Term {
        point: GroupElement::new(vec![a.clone()]),
        cycles: vec![],
        subgroup: if m.is_one() { Lattice::full(1) } else { Lattice::new(1, &[GroupElement::new(vec![m.clone()])]) },
    };
    FSetExpr::new(1, vec![term]).expect("well-formed term")
}

/// Back to an F-set expression: the union of all nested sets and cosets.
pub fn pnormal_to_expr(pn: &PNormal) -> Option<FSetExpr> {
    let mut terms = Vec::new();
    for e in &pn.nested {
        terms.extend(from_pnormal(e).terms);
    }
    for (a, m) in &pn.cosets {
        terms.extend(coset_expr(a, m).terms);
    }
    if terms.is_empty() {
        return None;
    }
    FSetExpr::new(1, terms).ok()
}
