//! Automata from finite kernels: states are semantic descriptions of the
//! quotient sets `S_w = {x : [w] + G^{|w|} x in S}`.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

use super::{Alphabet, Dfa};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// A kernel given by a canonical semantic state per quotient set.
pub trait KernelOracle {
    type State: Clone + Eq + Hash;

    fn initial(&self) -> Self::State;

    /// The state for `S_{wx}` given the state for `S_w` and digit index `x`.
    fn step(&self, state: &Self::State, digit: usize) -> Self::State;

    /// Whether `0` lies in the set.
    fn accepting(&self, state: &Self::State) -> bool;
}

/// A kernel-built automaton together with the semantic state of each DFA state.
#[derive(Clone, Debug)]
pub struct KernelDfa<S> {
    pub dfa: Dfa,
    pub states: Vec<S>,
}

/// Breadth-first exploration of the kernel; symbols are visited in index order.
pub fn dfa_from_kernel<K: KernelOracle>(oracle: &K, alphabet: Alphabet, cap: usize) -> Result<KernelDfa<K::State>> {
    let k = alphabet.len();
    let start = oracle.initial();
    let mut ids: HashMap<K::State, u32> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let cur = states[i].clone();
        i += 1;
        for s in 0..k {
            let nxt = oracle.step(&cur, s);
            let id = match ids.get(&nxt) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(Error::cap("kernel states", cap));
                    }
                    let id = states.len() as u32;
                    ids.insert(nxt.clone(), id);
                    states.push(nxt);
                    id
                }
            };
            trans.push(id);
        }
    }
    let accepting = states.iter().map(|s| oracle.accepting(s)).collect();
    Ok(KernelDfa {
        dfa: Dfa::from_parts(alphabet, 0, accepting, trans),
        states,
    })
}
