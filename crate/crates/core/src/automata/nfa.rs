//! Nondeterministic automata, used to build DFAs of small regular expressions.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

use super::{Alphabet, Dfa};

/// A block of a star expression `v_1 w_1* v_2 w_2* ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Word(Vec<usize>),
    Star(Vec<usize>),
}

#[derive(Clone, Debug, Default)]
pub struct Nfa {
    trans: Vec<Vec<(usize, usize)>>,
    eps: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    initial: Vec<usize>,
}

impl Nfa {
    pub fn new() -> Self {
        Nfa::default()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.trans.push(vec![]);
        self.eps.push(vec![]);
        self.accepting.push(accepting);
        self.trans.len() - 1
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial.push(q);
    }

    pub fn set_accepting(&mut self, q: usize, a: bool) {
        self.accepting[q] = a;
    }

    pub fn add_edge(&mut self, from: usize, sym: usize, to: usize) {
        self.trans[from].push((sym, to));
    }

    pub fn add_eps(&mut self, from: usize, to: usize) {
        self.eps[from].push(to);
    }

    /// Appends a path reading `word` from `from`; returns its end state.
    pub fn add_path(&mut self, from: usize, word: &[usize]) -> usize {
        let mut cur = from;
        for &s in word {
            let next = self.add_state(false);
            self.add_edge(cur, s, next);
            cur = next;
        }
        cur
    }

    /// Appends a loop reading `word` at `at`.
    pub fn add_loop(&mut self, at: usize, word: &[usize]) {
        if word.is_empty() {
            return;
        }
        let mut cur = at;
        for (i, &s) in word.iter().enumerate() {
            let next = if i + 1 == word.len() { at } else { self.add_state(false) };
            self.add_edge(cur, s, next);
            cur = next;
        }
    }

    /// Union of star expressions.
    pub fn from_pieces(pieces: &[Vec<Block>]) -> Self {
        let mut nfa = Nfa::new();
        for piece in pieces {
            let start = nfa.add_state(false);
            nfa.set_initial(start);
            let mut cur = start;
            for b in piece {
                match b {
                    Block::Word(v) => cur = nfa.add_path(cur, v),
                    Block::Star(w) => {
                        let hub = nfa.add_state(false);
                        nfa.add_eps(cur, hub);
                        nfa.add_loop(hub, w);
                        cur = hub;
                    }
                }
            }
            nfa.set_accepting(cur, true);
        }
        nfa
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    pub fn determinize(&self, alphabet: Alphabet) -> Result<Dfa> {
        let k = alphabet.len();
        if self.trans.iter().flatten().any(|&(s, _)| s >= k) {
            return Err(Error::InvalidDigit(k));
        }
        let mut start: BTreeSet<usize> = self.initial.iter().copied().collect();
        self.closure(&mut start);
        let mut ids: HashMap<BTreeSet<usize>, u32> = HashMap::from([(start.clone(), 0)]);
        let mut sets = vec![start];
        let mut trans = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            i += 1;
            let mut by_sym: HashMap<usize, BTreeSet<usize>> = HashMap::new();
            for &q in &cur {
                for &(s, t) in &self.trans[q] {
                    by_sym.entry(s).or_default().insert(t);
                }
            }
            for s in 0..k {
                let mut next = by_sym.remove(&s).unwrap_or_default();
                self.closure(&mut next);
                let len = sets.len() as u32;
                let id = *ids.entry(next).or_insert_with_key(|key| {
                    sets.push(key.clone());
                    len
                });
                trans.push(id);
            }
        }
        let accepting = sets.iter().map(|s| s.iter().any(|&q| self.accepting[q])).collect();
        Ok(Dfa::from_parts(alphabet, 0, accepting, trans))
    }
}

impl Dfa {
    /// The minimal DFA of the reversed language.
    pub fn reverse(&self) -> Dfa {
        let mut nfa = Nfa::new();
        for q in 0..self.num_states() {
            nfa.add_state(q == self.initial());
        }
        for q in 0..self.num_states() {
            for (s, &t) in self.row(q).iter().enumerate() {
                nfa.add_edge(t as usize, s, q);
            }
            if self.is_accepting(q) {
                nfa.set_initial(q);
            }
        }
        nfa.determinize(self.alphabet().clone()).expect("same alphabet").minimize()
    }
}
