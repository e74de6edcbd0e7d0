use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::spanning::{expand_greedy, SpanningSet};

use super::Dfa;

/// Membership of `x` for a saturated automaton: run its greedy expansion.
pub fn contains(d: &Dfa, sigma: &SpanningSet, x: &GroupElement) -> Result<bool> {
    if d.alphabet().arity() != 1 || d.alphabet().digits() != sigma.digits() {
        return Err(Error::AlphabetMismatch);
    }
    d.accepts(&expand_greedy(sigma, x)?)
}

/// `{[w] : w in L(D), |w| <= maxlen}`.
pub fn enumerate_elements(d: &Dfa, sigma: &SpanningSet, maxlen: usize) -> Result<BTreeSet<GroupElement>> {
    if d.alphabet().arity() != 1 || d.alphabet().digits() != sigma.digits() {
        return Err(Error::AlphabetMismatch);
    }
    let live = d.coaccessible();
    let g = sigma.base();
    let mut out = BTreeSet::new();
    let zero = GroupElement::zero(sigma.dim());
    let mut level: HashSet<(usize, GroupElement)> = HashSet::new();
    if live[d.initial()] {
        level.insert((d.initial(), zero));
    }
    let mut scale: Vec<GroupElement> = sigma.digits().to_vec();
    for j in 0..=maxlen {
        for (q, v) in &level {
            if d.is_accepting(*q) {
                out.insert(v.clone());
            }
        }
        if j == maxlen {
            break;
        }
        let mut next = HashSet::with_capacity(level.len());
        for (q, v) in &level {
            for (a, sa) in scale.iter().enumerate() {
                let q2 = d.next(*q, a);
                if live[q2] {
                    next.insert((q2, v + sa));
                }
            }
        }
        level = next;
        scale = scale.iter().map(|x| g.apply_unchecked(x)).collect();
    }
    Ok(out)
}

/// All accepted words of length at most `maxlen`, shortlex order.
pub fn enumerate_words(d: &Dfa, maxlen: usize) -> Vec<Vec<usize>> {
    let live = d.coaccessible();
    let mut out = Vec::new();
    let mut level: Vec<(usize, Vec<usize>)> = vec![(d.initial(), vec![])];
    for j in 0..=maxlen {
        level.retain(|(q, _)| live[*q]);
        out.extend(level.iter().filter(|(q, _)| d.is_accepting(*q)).map(|(_, w)| w.clone()));
        if j == maxlen {
            break;
        }
        let mut next = Vec::new();
        for (q, w) in &level {
            for s in 0..d.num_symbols() {
                let mut w2 = w.clone();
                w2.push(s);
                next.push((d.next(*q, s), w2));
            }
        }
        level = next;
    }
    out
}
