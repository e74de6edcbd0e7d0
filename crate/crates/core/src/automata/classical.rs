//! Cross-check against classical base-`k` automata on `Z`.

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::spanning::SpanningSet;

use super::{contains, Alphabet, Dfa};

/// Classical automata over `{0..k-1}`, least significant digit first:
/// `positive` reads `n >= 0`, `negative` reads `-n` for `n < 0`.
#[derive(Clone, Debug)]
pub struct ClassicalDfa {
    pub k: u32,
    pub positive: Dfa,
    pub negative: Dfa,
}

impl ClassicalDfa {
    pub fn new(k: u32, positive: Dfa, negative: Dfa) -> Result<Self> {
        let alpha = Alphabet::plain(k as usize);
        if positive.alphabet() != &alpha || negative.alphabet() != &alpha {
            return Err(Error::AlphabetMismatch);
        }
        Ok(ClassicalDfa { k, positive, negative })
    }

    pub fn digits(&self, mut m: u64) -> Vec<usize> {
        let mut out = Vec::new();
        while m > 0 {
            out.push((m % self.k as u64) as usize);
            m /= self.k as u64;
        }
        out
    }

    pub fn contains(&self, n: i64) -> bool {
        let (dfa, m) = if n >= 0 {
            (&self.positive, n as u64)
        } else {
            (&self.negative, n.unsigned_abs())
        };
        dfa.accepts(&self.digits(m)).expect("digits in range")
    }
}

/// True iff both automata agree on every `|n| <= bound`.
pub fn classical_agreement_check(s: &Dfa, sigma: &SpanningSet, classical: &ClassicalDfa, bound: i64) -> Result<bool> {
    Ok(classical_disagreement(s, sigma, classical, bound)?.is_none())
}

/// The first `n` (by `|n|`, then sign) on which they differ.
pub fn classical_disagreement(
    s: &Dfa,
    sigma: &SpanningSet,
    classical: &ClassicalDfa,
    bound: i64,
) -> Result<Option<i64>> {
    if sigma.dim() != 1 {
        return Err(Error::pre("classical agreement needs d = 1"));
    }
    for m in 0..=bound {
        for n in [-m, m] {
            if contains(s, sigma, &GroupElement::from_i64s(&[n]))? != classical.contains(n) {
                return Ok(Some(n));
            }
        }
    }
    Ok(None)
}
