//! Zero sets of closed-form sequences as `p`-automatic sets, by a Frobenius
//! kernel construction.
//!
//! Write `u = t^{1/p^E}` for the deepest level among the bases. Every `x` in
//! `K = F_q(u)` splits uniquely as `x = sum_{k<p} u^k y_k^p`. For a state
//! sequence `n -> sum_i c_i alpha_i^n`,
//! `a_{j+pm} = sum_k u^k (sum_i y_k(c_i alpha_i^j) alpha_i^m)^p`, which
//! vanishes exactly when each of the `p` inner sequences does. A state is thus
//! the `K`-span of the coefficient tuples of a family of sequences that must
//! all vanish, kept in reduced row echelon form.

use serde_json::{json, Value};

use crate::automata::{dfa_from_kernel, Alphabet, Dfa, KernelDfa, KernelOracle};
use crate::error::{Error, Result};
use crate::sparse::{certify, SparseCertificate};

use super::closure::PerfectClosureElem as Pce;
use super::sequence::{cross_validate, cross_validate_backward, ClosedFormSequence, LinearRecurrence};

/// Default bound on kernel states.
pub const SML_STATE_CAP: usize = 100_000;

/// Reduced row echelon basis of a subspace of `K^mu`.
pub type KernelState = Vec<Vec<Pce>>;

/// The kernel of a closed form; see the module docs.
pub struct ZeroSetKernel<'a> {
    seq: &'a ClosedFormSequence,
    level: u32,
}

impl<'a> ZeroSetKernel<'a> {
    pub fn new(seq: &'a ClosedFormSequence) -> Self {
        let level = seq.alpha().iter().chain(seq.b()).map(Pce::level).max().unwrap_or(0);
        ZeroSetKernel { seq, level }
    }

    /// `(y_0, ..., y_{p-1})` with `x = sum_k u^k y_k^p`.
    pub fn frobenius_coordinates(&self, x: &Pce) -> Vec<Pce> {
        let f = self.seq.field();
        let p = f.p() as usize;
        let (num, den) = x.at_level(self.level);
        // x = num den^{p-1} / den^p
        let d_p1 = Pce::new(f, self.level, den.clone(), vec![1])
            .expect("valid")
            .pow(p as i64 - 1)
            .expect("nonnegative power");
        let m = Pce::new(f, self.level, num, vec![1]).expect("valid").mul(&d_p1);
        let (m, _) = m.at_level(self.level);
        let den_inv = Pce::new(f, self.level, vec![1], den).expect("nonzero denominator");
        (0..p)
            .map(|k| {
                // Q_k(u^p) collects the coefficients of u^{k + p i}.
                let mut q = vec![0; m.len()];
                for i in (k..m.len()).step_by(p) {
                    q[i - k] = m[i];
                }
                Pce::new(f, self.level, q, vec![1]).expect("valid").pth_root().mul(&den_inv)
            })
            .collect()
    }

    /// The sequence `m -> sum_i c_i alpha_i^m` at `m`.
    pub fn eval_row(&self, row: &[Pce], m: i64) -> Pce {
        row.iter()
            .zip(self.seq.alpha())
            .fold(Pce::zero(self.seq.field()), |acc, (c, a)| acc.add(&c.mul(&a.pow(m).expect("nonzero base"))))
    }
}

/// Reduced row echelon form with zero rows dropped.
pub fn row_reduce(rows: Vec<Vec<Pce>>) -> KernelState {
    let mut rows: Vec<Vec<Pce>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = rows[rank][col].inv().expect("nonzero pivot");
        rows[rank] = rows[rank].iter().map(|x| x.mul(&inv)).collect();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let k = rows[r][col].clone();
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = x.sub(&k.mul(y));
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows
}

impl KernelOracle for ZeroSetKernel<'_> {
    type State = KernelState;

    fn initial(&self) -> KernelState {
        vec![self.seq.b().to_vec()]
    }

    fn step(&self, state: &KernelState, digit: usize) -> KernelState {
        let p = self.seq.field().p() as usize;
        let powers: Vec<Pce> = self
            .seq
            .alpha()
            .iter()
            .map(|a| a.pow(digit as i64).expect("nonnegative power"))
            .collect();
        let mut rows = Vec::with_capacity(state.len() * p);
        for row in state {
            let coords: Vec<Vec<Pce>> = row
                .iter()
                .zip(&powers)
                .map(|(c, a)| self.frobenius_coordinates(&c.mul(a)))
                .collect();
            rows.extend((0..p).map(|k| coords.iter().map(|y| y[k].clone()).collect::<Vec<_>>()));
        }
        row_reduce(rows)
    }

    fn accepting(&self, state: &KernelState) -> bool {
        let zero = Pce::zero(self.seq.field());
        state.iter().all(|row| row.iter().fold(zero.clone(), |acc, x| acc.add(x)).is_zero())
    }
}

/// DFA over digits `0..p` (least significant first) accepting the base-`p`
/// expansions of `{n >= 0 : a_n = 0}`, with the kernel state of each DFA state.
pub fn zero_set_kernel(seq: &ClosedFormSequence, cap: usize) -> Result<KernelDfa<KernelState>> {
    let kernel = ZeroSetKernel::new(seq);
    let p = seq.field().p() as usize;
    dfa_from_kernel(&kernel, Alphabet::plain(p), cap).map_err(|e| match e {
        Error::CapExceeded { cap, .. } => Error::CapExceeded {
            what: "zero-set kernel states (Derksen's theorem says there are finitely many; raise the cap)".into(),
            cap,
        },
        e => e,
    })
}

/// Minimal DFA for the zero set.
pub fn zero_set_automaton(seq: &ClosedFormSequence) -> Result<Dfa> {
    Ok(zero_set_kernel(seq, SML_STATE_CAP)?.dfa.minimize())
}

/// Base-`p` digits of `n`, least significant first.
pub fn digits_lsd(n: u64, p: u32) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = n;
    while n > 0 {
        out.push((n % p as u64) as usize);
        n /= p as u64;
    }
    out
}

/// Words with a nonzero digit, i.e. expansions of `n >= 1`.
fn positive_dfa(p: usize) -> Dfa {
    let mut trans = vec![0u32; 2 * p];
    for d in 0..p {
        trans[p + d] = 1;
        trans[d] = if d == 0 { 0 } else { 1 };
    }
    Dfa::new(Alphabet::plain(p), 0, vec![false, true], trans).expect("well formed")
}

/// The zero set on both sides of `0`: a DFA for `{n >= 0 : a_n = 0}` and one
/// for `{m >= 1 : a_{-m} = 0}`. The closed form (if given, else found by the
/// factoring helper) is checked against the recurrence on `|n| <= 1024`.
pub fn zero_set_bidirectional(rec: &LinearRecurrence, closed: Option<&ClosedFormSequence>) -> Result<(Dfa, Dfa)> {
    if rec.coefficients()[0].is_zero() {
        return Err(Error::pre("c_0 = 0: the recurrence cannot run backwards"));
    }
    let seq = match closed {
        Some(c) => c.clone(),
        None => super::sequence::closed_form_from_recurrence(rec)?,
    };
    if let Some(n) = cross_validate(&seq, rec, 1024)? {
        return Err(Error::pre(format!("closed form and recurrence differ at n = {n}")));
    }
    if let Some(m) = cross_validate_backward(&seq, rec, 1024)? {
        return Err(Error::pre(format!("closed form and recurrence differ at n = -{m}")));
    }
    let pos = zero_set_automaton(&seq)?;
    let neg = zero_set_automaton(&seq.inverted())?
        .intersection(&positive_dfa(seq.field().p() as usize))?
        .minimize();
    Ok((pos, neg))
}

/// `{n >= 0 : n = a mod m}` over base-`p` digits.
pub fn progression_dfa(p: u32, a: u64, m: u64) -> Result<Dfa> {
    if m == 0 || a >= m {
        return Err(Error::pre("need 0 <= a < m"));
    }
    struct Prog {
        p: u64,
        a: u64,
        m: u64,
    }
    impl KernelOracle for Prog {
        /// `([w] mod m, p^{|w|} mod m)`
        type State = (u64, u64);
        fn initial(&self) -> (u64, u64) {
            (0, 1 % self.m)
        }
        fn step(&self, &(v, e): &(u64, u64), d: usize) -> (u64, u64) {
            ((v + e * d as u64) % self.m, e * self.p % self.m)
        }
        fn accepting(&self, &(v, _): &(u64, u64)) -> bool {
            v == self.a
        }
    }
    let k = dfa_from_kernel(&Prog { p: p as u64, a, m }, Alphabet::plain(p as usize), usize::MAX)?;
    Ok(k.dfa.minimize())
}

/// Largest modulus tried by [`analyze_zero_set`].
pub const MAX_PROGRESSION_MODULUS: u64 = 64;

#[derive(Clone, Debug)]
pub struct ZeroSetReport {
    pub certificate: SparseCertificate,
    /// Minimal progressions `a + m N` (with `m <= 64`) inside the set.
    pub progressions: Vec<(u64, u64)>,
    /// Whether the set is exactly the union of those progressions.
    pub periodic: bool,
}

impl ZeroSetReport {
    pub fn to_json(&self) -> Value {
        json!({
            "sparse": self.certificate.to_json(),
            "progressions": self.progressions.iter().map(|(a, m)| json!({"a": a, "m": m})).collect::<Vec<_>>(),
            "periodic": self.periodic,
        })
    }
}

/// Sparseness certificate of the zero-set language plus the arithmetic
/// progressions it contains.
pub fn analyze_zero_set(d: &Dfa) -> Result<ZeroSetReport> {
    let p = d.num_symbols();
    if p < 2 || d.alphabet().arity() != 1 {
        return Err(Error::pre("expected a DFA over base-p digits"));
    }
    let certificate = certify(d)?;
    let mut found: Vec<(u64, u64)> = Vec::new();
    let mut union = Dfa::empty(d.alphabet().clone());
    for m in 1..=MAX_PROGRESSION_MODULUS {
        for a in 0..m {
            if found.iter().any(|&(a2, m2)| m % m2 == 0 && a % m2 == a2) {
                continue;
            }
            let prog = progression_dfa(p as u32, a, m)?;
            if prog.difference(d)?.is_empty_language() {
                found.push((a, m));
                union = union.union(&prog)?.minimize();
            }
        }
    }
    let periodic = union.equivalent(d)?;
    Ok(ZeroSetReport {
        certificate,
        progressions: found,
        periodic,
    })
}

/// First `n <= n_max` where the automaton and direct evaluation disagree.
pub fn brute_force_mismatch(d: &Dfa, seq: &ClosedFormSequence, n_max: u64) -> Result<Option<u64>> {
    let p = seq.field().p();
    let vals = seq.values(n_max)?;
    for (n, v) in vals.iter().enumerate() {
        if d.accepts(&digits_lsd(n as u64, p))? != v.is_zero() {
            return Ok(Some(n as u64));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::sml::field::Field;

    fn derksen() -> ClosedFormSequence {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let one = Pce::one(&f);
        let t = Pce::t(&f);
        ClosedFormSequence::new(&f, vec![one.clone(); 3], vec![one.add(&t), t, one]).unwrap()
    }

    fn one_then_zeros() -> Dfa {
        // 1 0*
        Dfa::new(Alphabet::plain(2), 0, vec![false, true, false], vec![2, 1, 1, 2, 2, 2]).unwrap()
    }

    /// Words whose last digit is nonzero (or the empty word).
    fn no_trailing_zero(p: usize) -> Dfa {
        let mut trans = vec![0u32; 2 * p];
        for d in 0..p {
            let to = if d == 0 { 1 } else { 0 };
            trans[d] = to;
            trans[p + d] = to;
        }
        Dfa::new(Alphabet::plain(p), 0, vec![true, false], trans).unwrap()
    }

    #[test]
    fn powers_of_two() {
        let s = derksen();
        let kd = zero_set_kernel(&s, SML_STATE_CAP).unwrap();
        let d = kd.dfa.minimize();
        // Least significant digit first, with trailing zeros: 0* 1 0*.
        let canonical = d.intersection(&no_trailing_zero(2)).unwrap();
        assert!(canonical.reverse().equivalent(&one_then_zeros()).unwrap());
        assert!(d.reverse().equivalent(&d).unwrap());
        assert_eq!(brute_force_mismatch(&d, &s, 1024).unwrap(), None);
        let k = ZeroSetKernel::new(&s);
        for (q, st) in kd.states.iter().enumerate() {
            for m in 0..=32u64 {
                let acc = kd.dfa.accepts_from(q, &digits_lsd(m, 2));
                let zero = st.iter().all(|row| k.eval_row(row, m as i64).is_zero());
                assert_eq!(acc, zero, "state {q}, m = {m}");
            }
        }
        let rec = LinearRecurrence::from_closed_form(&s);
        let (pos, neg) = zero_set_bidirectional(&rec, Some(&s)).unwrap();
        assert!(pos.equivalent(&d).unwrap());
        assert!(neg.is_empty_language());
        let r = analyze_zero_set(&d).unwrap();
        assert!(r.certificate.sparse);
        assert!(r.progressions.is_empty());
        assert!(!r.periodic);
    }

    #[test]
    fn fibonacci() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let one = Pce::one(&f);
        let rec = LinearRecurrence::new(&f, vec![one.clone(), one.clone()], vec![Pce::zero(&f), one]).unwrap();
        let (pos, neg) = zero_set_bidirectional(&rec, None).unwrap();
        let three = progression_dfa(2, 0, 3).unwrap();
        assert!(pos.equivalent(&three).unwrap());
        assert!(neg.equivalent(&three.intersection(&positive_dfa(2)).unwrap()).unwrap());
        let r = analyze_zero_set(&pos).unwrap();
        assert!(!r.certificate.sparse);
        assert_eq!(r.progressions, vec![(0, 3)]);
        assert!(r.periodic);
    }

    #[test]
    fn coordinates_reassemble() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let t = Pce::t(&f);
        let s = ClosedFormSequence::new(&f, vec![Pce::one(&f)], vec![t.pth_root()]).unwrap();
        let k = ZeroSetKernel::new(&s);
        let x = Pce::new(&f, 1, vec![2, 1, 0, 1, 2], vec![1, 0, 1]).unwrap();
        let ys = k.frobenius_coordinates(&x);
        let u = t.pth_root();
        let back = ys
            .iter()
            .enumerate()
            .fold(Pce::zero(&f), |acc, (i, y)| acc.add(&u.pow(i as i64).unwrap().mul(&y.pow(3).unwrap())));
        assert_eq!(back, x);
    }
}
