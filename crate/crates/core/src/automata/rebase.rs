//! Change of spanning set: from `(Sigma, F^r)` to `(Theta, F^{rs})`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::spanning::{expand_greedy, SpanningSet};

use super::kernel::{dfa_from_kernel, KernelOracle, DEFAULT_STATE_CAP};
use super::{Alphabet, Dfa};

struct Rebase<'a> {
    d: &'a Dfa,
    sigma: &'a SpanningSet,
    theta: &'a SpanningSet,
    s: usize,
    accept_memo: std::cell::RefCell<HashMap<(usize, GroupElement), bool>>,
}

impl Rebase<'_> {
    fn expansion(&self, x: &GroupElement) -> Vec<usize> {
        expand_greedy(self.sigma, x).expect("valid spanning set")
    }
}

impl KernelOracle for Rebase<'_> {
    /// `(q, g)`: the state of `D` after the digits fed so far, and the carry.
    type State = (usize, GroupElement);

    fn initial(&self) -> Self::State {
        (self.d.initial(), GroupElement::zero(self.sigma.dim()))
    }

    fn step(&self, (q, g): &Self::State, digit: usize) -> Self::State {
        let v = g + self.theta.digit(digit);
        let mut w = self.expansion(&v);
        if w.len() < self.s {
            w.resize(self.s, 0);
        }
        let mut q2 = *q;
        for &a in &w[..self.s] {
            q2 = self.d.next(q2, a);
        }
        let tail = self.sigma.eval(&w[self.s..]).expect("digits in range");
        (q2, tail)
    }

    fn accepting(&self, (q, g): &Self::State) -> bool {
        if let Some(&v) = self.accept_memo.borrow().get(&(*q, g.clone())) {
            return v;
        }
        let v = self.d.accepts_from(*q, &self.expansion(g));
        self.accept_memo.borrow_mut().insert((*q, g.clone()), v);
        v
    }
}

/// Rebases a saturated automaton over `Sigma` to one over `Theta`, where
/// `Theta` is a spanning set for `F^{rs}`. States pair a state of `D` with a
/// carry; each `Theta` digit is added to the carry, the low `s` digits of a
/// `Sigma` expansion are fed to `D`, and the rest becomes the new carry.
pub fn rebase(d: &Dfa, sigma: &SpanningSet, theta: &SpanningSet) -> Result<Dfa> {
    if d.alphabet().arity() != 1 || d.alphabet().digits() != sigma.digits() {
        return Err(Error::AlphabetMismatch);
    }
    if sigma.endo() != theta.endo() || !theta.power().is_multiple_of(sigma.power()) {
        return Err(Error::pre("target spanning set must be for a power of the source base"));
    }
    let s = (theta.power() / sigma.power()) as usize;
    let oracle = Rebase {
        d,
        sigma,
        theta,
        s,
        accept_memo: Default::default(),
    };
    let alphabet = Alphabet::new(theta.digits().to_vec(), 1)?;
    let built = dfa_from_kernel(&oracle, alphabet, DEFAULT_STATE_CAP).map_err(|e| match e {
        Error::CapExceeded { cap, .. } => Error::cap("rebase carry states (input may be unsaturated)", cap),
        other => other,
    })?;
    Ok(built.dfa.minimize())
}
