//! F-normal form: each term `gamma0 + C(g_1; d) + ... + C(g_k; d) + H` is a
//! finite union of `gamma + T + H` with `T` the value set of a sparse language.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_integer::Integer;
use serde_json::{json, Value};

use crate::automata::{enumerate_elements, Alphabet, Block, Dfa, Nfa};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Lattice};
use crate::json::{elem_to_json, lattice_to_json, spanning_to_json};
use crate::spanning::{expand_greedy, power_digits, sigma_power, SpanningSet};
use crate::sparse::{certify, SparseCertificate};

use super::expr::{FSetExpr, Term};
use super::power::cycle_to_power;

/// Largest digit set built when extending a spanning set to hold block digits.
pub const MAX_BLOCK_DIGITS: usize = 20_000;

/// `gamma + {[w] : w in L(dfa)} + subgroup`, words read over `spanning`.
#[derive(Clone, Debug)]
pub struct NormalComponent {
    pub gamma: GroupElement,
    pub spanning: SpanningSet,
    pub dfa: Dfa,
    pub subgroup: Lattice,
    pub certificate: SparseCertificate,
    /// The starred blocks, as digits of `spanning`.
    pub blocks: Vec<GroupElement>,
}

#[derive(Clone, Debug, Default)]
pub struct NormalForm {
    pub adjust_add: Vec<GroupElement>,
    pub adjust_remove: Vec<GroupElement>,
    pub components: Vec<NormalComponent>,
}

impl NormalForm {
    pub fn to_json(&self) -> Value {
        json!({
            "adjustAdd": self.adjust_add.iter().map(elem_to_json).collect::<Vec<_>>(),
            "adjustRemove": self.adjust_remove.iter().map(elem_to_json).collect::<Vec<_>>(),
            "components": self.components.iter().map(|c| json!({
                "gamma": elem_to_json(&c.gamma),
                "sparseDfa": c.dfa.to_json(),
                "spanning": spanning_to_json(&c.spanning),
                "subgroup": lattice_to_json(&c.subgroup),
                "degree": c.certificate.degree,
            })).collect::<Vec<_>>(),
        })
    }

    /// Points of sup-norm at most `bound`, with sparse parts enumerated over
    /// words of length at most `maxlen`. Nontrivial subgroups must have full rank.
    pub fn members_in_box(&self, bound: i64, maxlen: usize) -> Result<BTreeSet<GroupElement>> {
        let mut out = BTreeSet::new();
        let in_box = |x: &GroupElement| x.sup_norm() <= bound.into();
        for c in &self.components {
            let vals = enumerate_elements(&c.dfa, &c.spanning, maxlen)?;
            if c.subgroup.is_trivial() {
                out.extend(vals.iter().map(|t| &c.gamma + t).filter(in_box));
                continue;
            }
            if c.subgroup.rank() != c.subgroup.dim() {
                return Err(Error::pre("box enumeration needs a full-rank subgroup"));
            }
            let res: BTreeSet<GroupElement> = vals.iter().map(|t| c.subgroup.coset_reduce(&(&c.gamma + t))).collect();
            for x in box_points(c.gamma.dim(), bound) {
                if res.contains(&c.subgroup.coset_reduce(&x)) {
                    out.insert(x);
                }
            }
        }
        for x in &self.adjust_remove {
            out.remove(x);
        }
        out.extend(self.adjust_add.iter().filter(|x| in_box(x)).cloned());
        Ok(out)
    }
}

pub(crate) fn box_points(dim: usize, bound: i64) -> Vec<GroupElement> {
    (0..dim)
        .map(|_| -bound..=bound)
        .multi_cartesian_product()
        .map(|c| GroupElement::from_i64s(&c))
        .collect()
}

/// For each term, cycles are rewritten with a common step `delta'` (a
/// multiple of the spanning power); for every choice of pieces and every
/// ordering `sigma` of the remaining cycles the language is
/// `U_1 U_1* U_2* ... U_k*` with `U_j` the sum of the cycles from position
/// `j` of the ordering on. Each language is certified sparse.
pub fn normalize(e: &FSetExpr, sigma: &SpanningSet) -> Result<NormalForm> {
    if e.dim != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: e.dim,
        });
    }
    let f = sigma.endo();
    for t in &e.terms {
        for (_, delta) in &t.cycles {
            if !f.no_unit_eigenvalue(*delta) {
                return Err(Error::EigenvalueOne(*delta));
            }
        }
        if !t.subgroup.is_invariant(f) {
            return Err(Error::NotInvariant);
        }
    }
    let mut out = NormalForm::default();
    for t in &e.terms {
        out.components.extend(normalize_term(t, sigma)?);
    }
    Ok(out)
}

fn normalize_term(t: &Term, sigma: &SpanningSet) -> Result<Vec<NormalComponent>> {
    let f = sigma.endo();
    let p = sigma.power();
    let step = t.cycles.iter().fold(p, |acc, &(_, d)| acc.lcm(&d));
    let base = if step == p { sigma.clone() } else { sigma_power(sigma, step / p)? };

    let mut choices: Vec<(GroupElement, Vec<GroupElement>)> = vec![(t.point.clone(), vec![])];
    for (g, delta) in &t.cycles {
        let pieces = cycle_to_power(f, g, *delta, step / delta)?;
        let mut alts: Vec<(GroupElement, Option<GroupElement>)> = Vec::new();
        for pc in pieces {
            if let Some(s) = pc.singleton {
                alts.push((s, None));
            }
            alts.push((pc.translate, Some(pc.cycle.0)));
        }
        choices = choices
            .iter()
            .flat_map(|(pt, gens)| {
                alts.iter().map(move |(x, c)| {
                    let mut gens = gens.clone();
                    gens.extend(c.iter().cloned());
                    (pt + x, gens)
                })
            })
            .collect();
    }

    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (gamma, gens) in choices {
        let orders: Vec<Vec<GroupElement>> = if gens.is_empty() {
            vec![vec![]]
        } else {
            gens.iter().cloned().permutations(gens.len()).collect()
        };
        for order in orders {
            let blocks: Vec<GroupElement> = (0..order.len())
                .map(|j| order[j..].iter().fold(GroupElement::zero(t.dim()), |a, b| &a + b))
                .collect();
            if !seen.insert((gamma.clone(), blocks.clone())) {
                continue;
            }
            out.push(component(&gamma, &blocks, &base, &t.subgroup)?);
        }
    }
    Ok(out)
}

fn component(gamma: &GroupElement, blocks: &[GroupElement], base: &SpanningSet, h: &Lattice) -> Result<NormalComponent> {
    let mut m = 1;
    for b in blocks {
        m = m.max(expand_greedy(base, b)?.len());
    }
    let theta = if m <= 1 {
        base.clone()
    } else {
        let digits = power_digits(base, m as u32);
        if digits.len() > MAX_BLOCK_DIGITS {
            return Err(Error::cap("block digit set", MAX_BLOCK_DIGITS));
        }
        SpanningSet::new(digits, base.endo().clone(), base.power())?
    };
    let alphabet = Alphabet::new(theta.digits().to_vec(), 1)?;
    let syms: Vec<usize> = blocks
        .iter()
        .map(|b| theta.index_of(b).expect("block is a digit of the extension"))
        .collect();
    let piece: Vec<Block> = match syms.split_first() {
        None => vec![],
        Some((&first, _)) => {
            let mut p = vec![Block::Word(vec![first])];
            p.extend(syms.iter().map(|&s| Block::Star(vec![s])));
            p
        }
    };
    let dfa = Nfa::from_pieces(&[piece]).determinize(alphabet)?.minimize();
    let certificate = certify(&dfa)?;
    if !certificate.sparse {
        return Err(Error::Inconclusive("block language failed the sparseness check".into()));
    }
    Ok(NormalComponent {
        gamma: gamma.clone(),
        spanning: theta,
        dfa,
        subgroup: h.clone(),
        certificate,
        blocks: blocks.to_vec(),
    })
}
