//! Complete deterministic automata over digit alphabets, and the arithmetic
//! constructions on expansion languages: equality/addition automata, kernel
//! synthesis, saturation, change of base and element enumeration.

mod arith;
mod classical;
mod json;
mod kernel;
mod nfa;
mod ops;
mod rebase;

pub use arith::{
    addition_automaton, equality_automaton, relational_image, saturate, sum_image, zero_pad_closure,
    quotient_zeros, Arith,
};
pub(crate) use arith::{saturate_with, sum_with};
pub use classical::{classical_agreement_check, classical_disagreement, ClassicalDfa};
pub use kernel::{dfa_from_kernel, KernelDfa, KernelOracle, DEFAULT_STATE_CAP};
pub use nfa::{Block, Nfa};
pub use ops::{contains, enumerate_elements, enumerate_words};
pub use rebase::rebase;

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Base digits and the tuple arity; symbol `j` is the row-major index of a
/// tuple of base digit indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet {
    digits: Vec<GroupElement>,
    arity: usize,
}

impl Alphabet {
    pub fn new(digits: Vec<GroupElement>, arity: usize) -> Result<Self> {
        if digits.is_empty() || !(1..=3).contains(&arity) {
            return Err(Error::pre("alphabet needs digits and arity 1..=3"));
        }
        let count = digits.len().checked_pow(arity as u32);
        if count.is_none_or(|c| c > u32::MAX as usize) {
            return Err(Error::pre("alphabet too large"));
        }
        Ok(Alphabet { digits, arity })
    }

    /// The symbols `0..k` as one-dimensional digits.
    pub fn plain(k: usize) -> Self {
        Alphabet {
            digits: (0..k as i64).map(|i| GroupElement::from_i64s(&[i])).collect(),
            arity: 1,
        }
    }

    pub fn digits(&self) -> &[GroupElement] {
        &self.digits
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base_len(&self) -> usize {
        self.digits.len()
    }

    pub fn len(&self) -> usize {
        self.digits.len().pow(self.arity as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol index of a tuple of base digit indices.
    pub fn symbol(&self, parts: &[usize]) -> usize {
        assert_eq!(parts.len(), self.arity);
        parts.iter().fold(0, |acc, &p| acc * self.digits.len() + p)
    }

    pub fn components(&self, sym: usize) -> Vec<usize> {
        let n = self.digits.len();
        let mut out = vec![0; self.arity];
        let mut s = sym;
        for slot in out.iter_mut().rev() {
            *slot = s % n;
            s /= n;
        }
        out
    }

    /// Same base digits with a different arity.
    pub fn with_arity(&self, arity: usize) -> Result<Self> {
        Alphabet::new(self.digits.clone(), arity)
    }

    /// Zips equal-length words into one word of tuple symbols.
    pub fn zip(&self, words: &[&[usize]]) -> Result<Vec<usize>> {
        if words.len() != self.arity {
            return Err(Error::pre("wrong number of tracks"));
        }
        let m = words[0].len();
        if words.iter().any(|w| w.len() != m) {
            return Err(Error::pre("tracks must have equal length"));
        }
        Ok((0..m)
            .map(|j| {
                let parts: Vec<usize> = words.iter().map(|w| w[j]).collect();
                self.symbol(&parts)
            })
            .collect())
    }
}

/// A complete DFA. Transitions are stored row-major, one row per state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    accepting: Vec<bool>,
    trans: Vec<u32>,
}

impl Dfa {
    pub fn new(alphabet: Alphabet, initial: usize, accepting: Vec<bool>, trans: Vec<u32>) -> Result<Self> {
        let n = accepting.len();
        let k = alphabet.len();
        if n == 0 || initial >= n {
            return Err(Error::Malformed("initial state out of range".into()));
        }
        if trans.len() != n * k {
            return Err(Error::Malformed(format!(
                "expected {} transitions, got {}",
                n * k,
                trans.len()
            )));
        }
        if let Some(t) = trans.iter().find(|&&t| t as usize >= n) {
            return Err(Error::Malformed(format!("transition target {t} out of range")));
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            trans,
        })
    }

    pub(crate) fn from_parts(alphabet: Alphabet, initial: usize, accepting: Vec<bool>, trans: Vec<u32>) -> Self {
        debug_assert_eq!(trans.len(), accepting.len() * alphabet.len());
        Dfa {
            alphabet,
            initial,
            accepting,
            trans,
        }
    }

    /// One rejecting state.
    pub fn empty(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::from_parts(alphabet, 0, vec![false], vec![0; k])
    }

    /// One accepting state.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::from_parts(alphabet, 0, vec![true], vec![0; k])
    }

    /// Accepts exactly the given word.
    pub fn literal(alphabet: Alphabet, word: &[usize]) -> Result<Self> {
        let k = alphabet.len();
        if let Some(&s) = word.iter().find(|&&s| s >= k) {
            return Err(Error::InvalidDigit(s));
        }
        let n = word.len() + 2;
        let dead = (n - 1) as u32;
        let mut trans = vec![dead; n * k];
        for (i, &s) in word.iter().enumerate() {
            trans[i * k + s] = (i + 1) as u32;
        }
        let mut accepting = vec![false; n];
        accepting[word.len()] = true;
        Ok(Dfa::from_parts(alphabet, 0, accepting, trans))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    #[inline]
    pub fn next(&self, q: usize, sym: usize) -> usize {
        self.trans[q * self.alphabet.len() + sym] as usize
    }

    pub fn row(&self, q: usize) -> &[u32] {
        let k = self.alphabet.len();
        &self.trans[q * k..(q + 1) * k]
    }

    pub fn run(&self, word: &[usize]) -> Result<usize> {
        let k = self.num_symbols();
        let mut q = self.initial;
        for &s in word {
            if s >= k {
                return Err(Error::InvalidDigit(s));
            }
            q = self.next(q, s);
        }
        Ok(q)
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool> {
        Ok(self.accepting[self.run(word)?])
    }

    pub fn accepts_from(&self, q: usize, word: &[usize]) -> bool {
        let q = word.iter().fold(q, |q, &s| self.next(q, s));
        self.accepting[q]
    }

    pub fn complement(&self) -> Dfa {
        let mut out = self.clone();
        out.accepting.iter_mut().for_each(|a| *a = !*a);
        out
    }

    /// Reachable states, in BFS order over symbols (canonical numbering).
    pub fn reachable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for &t in self.row(q) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t as usize);
                }
            }
        }
        order
    }

    /// Drops unreachable states and renumbers in BFS order.
    pub fn trim(&self) -> Dfa {
        let order = self.reachable_order();
        self.renumber(&order)
    }

    fn renumber(&self, order: &[usize]) -> Dfa {
        let mut new_id = vec![u32::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            new_id[q] = i as u32;
        }
        let k = self.num_symbols();
        let mut trans = Vec::with_capacity(order.len() * k);
        for &q in order {
            trans.extend(self.row(q).iter().map(|&t| new_id[t as usize]));
        }
        let accepting = order.iter().map(|&q| self.accepting[q]).collect();
        Dfa::from_parts(self.alphabet.clone(), 0, accepting, trans)
    }

    /// States from which an accepting state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n {
            for &t in self.row(q) {
                rev[t as usize].push(q as u32);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    stack.push(p as usize);
                }
            }
        }
        live
    }

    pub fn is_empty_language(&self) -> bool {
        self.reachable_order().iter().all(|&q| !self.accepting[q])
    }

    /// The unique minimal complete DFA, with canonical BFS numbering.
    pub fn minimize(&self) -> Dfa {
        let t = self.trim();
        let n = t.num_states();
        let k = t.num_symbols();
        let mut class: Vec<u32> = t.accepting.iter().map(|&a| a as u32).collect();
        let mut count = {
            let mut c = class.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut ids: std::collections::HashMap<Vec<u32>, u32> = std::collections::HashMap::new();
            let mut next = Vec::with_capacity(n);
            let mut sig = Vec::with_capacity(k + 1);
            for q in 0..n {
                sig.clear();
                sig.push(class[q]);
                sig.extend(t.row(q).iter().map(|&s| class[s as usize]));
                let len = ids.len() as u32;
                let id = *ids.entry(sig.clone()).or_insert(len);
                next.push(id);
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut rep = vec![usize::MAX; count];
        for q in 0..n {
            if rep[class[q] as usize] == usize::MAX {
                rep[class[q] as usize] = q;
            }
        }
        let trans: Vec<u32> = rep
            .iter()
            .flat_map(|&q| t.row(q).iter().map(|&s| class[s as usize]).collect::<Vec<_>>())
            .collect();
        let accepting = rep.iter().map(|&q| t.accepting[q]).collect();
        let quotient = Dfa::from_parts(t.alphabet.clone(), class[t.initial] as usize, accepting, trans);
        quotient.trim()
    }

    fn check_same(&self, other: &Dfa) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    /// Reachable part of the product automaton with acceptance `op`.
    pub fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        self.check_same(other)?;
        let k = self.num_symbols();
        let mut ids = std::collections::HashMap::new();
        let mut states = vec![(self.initial, other.initial)];
        ids.insert((self.initial, other.initial), 0u32);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (p, q) = states[i];
            i += 1;
            for s in 0..k {
                let pair = (self.next(p, s), other.next(q, s));
                let len = states.len() as u32;
                let id = *ids.entry(pair).or_insert_with(|| {
                    states.push(pair);
                    len
                });
                trans.push(id);
            }
        }
        let accepting = states.iter().map(|&(p, q)| op(self.accepting[p], other.accepting[q])).collect();
        Ok(Dfa::from_parts(self.alphabet.clone(), 0, accepting, trans))
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && !b)
    }

    /// A shortest word accepted by exactly one of the two automata.
    pub fn counterexample(&self, other: &Dfa) -> Result<Option<Vec<usize>>> {
        self.check_same(other)?;
        let k = self.num_symbols();
        let mut parent: std::collections::HashMap<(usize, usize), Option<((usize, usize), usize)>> =
            std::collections::HashMap::new();
        let start = (self.initial, other.initial);
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some((p, q)) = queue.pop_front() {
            if self.accepting[p] != other.accepting[q] {
                let mut word = Vec::new();
                let mut cur = (p, q);
                while let Some(Some((prev, s))) = parent.get(&cur) {
                    word.push(*s);
                    cur = *prev;
                }
                word.reverse();
                return Ok(Some(word));
            }
            for s in 0..k {
                let nxt = (self.next(p, s), other.next(q, s));
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(nxt) {
                    e.insert(Some(((p, q), s)));
                    queue.push_back(nxt);
                }
            }
        }
        Ok(None)
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        Ok(self.counterexample(other)?.is_none())
    }

    /// Accepts `0 w` for every accepted `w` (0 is symbol 0).
    pub fn prepend_zero(&self) -> Dfa {
        let n = self.num_states();
        let k = self.num_symbols();
        let dead = n + 1;
        let mut trans = Vec::with_capacity((n + 2) * k);
        trans.extend_from_slice(&self.trans);
        for s in 0..k {
            trans.push(if s == 0 { self.initial as u32 } else { dead as u32 });
        }
        trans.extend(std::iter::repeat_n(dead as u32, k));
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        accepting.push(false);
        Dfa::from_parts(self.alphabet.clone(), n, accepting, trans)
    }

    /// Graphviz rendering; dead states are omitted.
    pub fn to_dot(&self) -> String {
        let live = self.coaccessible();
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in 0..self.num_states() {
            if !live[q] && q != self.initial {
                continue;
            }
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            out.push_str(&format!("  q{q} [shape={shape}];\n"));
        }
        out.push_str(&format!("  start -> q{};\n", self.initial));
        for q in 0..self.num_states() {
            if !live[q] {
                continue;
            }
            let mut by_target: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
            for s in 0..self.num_symbols() {
                let t = self.next(q, s);
                if live[t] {
                    by_target.entry(t).or_default().push(self.symbol_label(s));
                }
            }
            for (t, labels) in by_target {
                out.push_str(&format!("  q{q} -> q{t} [label=\"{}\"];\n", labels.join(" ")));
            }
        }
        out.push_str("}\n");
        out
    }

    fn symbol_label(&self, s: usize) -> String {
        let parts: Vec<String> = self
            .alphabet
            .components(s)
            .iter()
            .map(|&i| self.alphabet.digits[i].to_string())
            .collect();
        if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("<{}>", parts.join("|"))
        }
    }
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DFA with {} states over {} symbols ({} accepting)",
            self.num_states(),
            self.num_symbols(),
            self.accepting.iter().filter(|&&a| a).count()
        )
    }
}

#[cfg(test)]
mod tests;
