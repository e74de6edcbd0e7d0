//! Compilation of F-set expressions into saturated automata.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::automata::{
    dfa_from_kernel, rebase, Alphabet, Arith, Dfa, KernelOracle, Nfa, DEFAULT_STATE_CAP,
};
use crate::error::{Error, Result};
use crate::group::{invariant_saturation, solve_congruence, Endomorphism, GroupElement, Lattice};
use crate::spanning::{expand_greedy, power_digits, SpanningSet};

use super::expr::{FSetExpr, Term};
use super::power::cycle_to_power;

/// How cycle automata are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CycleStrategy {
    /// Literal language, extending the digit set when needed, unless the
    /// extended digit set would exceed [`Compiler::max_extended_digits`].
    #[default]
    Auto,
    /// Always the literal language `(gamma 0...0)* gamma`, then saturation.
    Literal,
    /// Always the semantic cycle kernel.
    Kernel,
}

/// Compiles F-sets over one spanning set; the arithmetic tables are shared.
#[derive(Clone, Debug)]
pub struct Compiler {
    sigma: SpanningSet,
    arith: Arith,
    alphabet: Alphabet,
    pub strategy: CycleStrategy,
    pub state_cap: usize,
    pub max_extended_digits: usize,
}

struct Finite<'a> {
    sigma: &'a SpanningSet,
    targets: BTreeSet<GroupElement>,
}

impl KernelOracle for Finite<'_> {
    /// The elements of `S_w`.
    type State = BTreeSet<GroupElement>;

    fn initial(&self) -> Self::State {
        self.targets.clone()
    }

    fn step(&self, s: &Self::State, digit: usize) -> Self::State {
        let x = self.sigma.digit(digit);
        s.iter().filter_map(|g| self.sigma.base().solve(&(g - x))).collect()
    }

    fn accepting(&self, s: &Self::State) -> bool {
        s.iter().any(|g| g.is_zero())
    }
}

/// Kernel of a subgroup `N` with `G^{-1}(N) = N`: each `S_w` is one coset or empty.
struct Cosets<'a> {
    sigma: &'a SpanningSet,
    lattice: Lattice,
}

impl KernelOracle for Cosets<'_> {
    type State = Option<GroupElement>;

    fn initial(&self) -> Self::State {
        Some(GroupElement::zero(self.sigma.dim()))
    }

    fn step(&self, s: &Self::State, digit: usize) -> Self::State {
        let c = s.as_ref()?;
        let y = solve_congruence(self.sigma.base(), &self.lattice, &(c - self.sigma.digit(digit)))?;
        Some(self.lattice.coset_reduce(&y))
    }

    fn accepting(&self, s: &Self::State) -> bool {
        s.as_ref().is_some_and(|c| c.is_zero())
    }
}

/// Largest `[Z^d : H]` for which a term with subgroup `H` is compiled as a
/// union of cosets of `H`.
pub const MAX_RESIDUE_INDEX: u64 = 4096;

/// Kernel of a union of cosets of a finite-index `H` with `F(H) ⊆ H`: each
/// `S_w` is again such a union, kept as a set of residues. `x = d + G y`
/// lies in `S_w` iff `G y` lies in `S_w - d`, which depends on `y mod H`
/// only.
struct Residues {
    /// `shift[d][y]`: the residue of `d + G y`.
    shift: Vec<Vec<usize>>,
    targets: Vec<bool>,
    zero: usize,
}

impl Residues {
    fn new(sigma: &SpanningSet, h: &Lattice, targets: &BTreeSet<GroupElement>) -> Result<Self> {
        let reps = Lattice::full(h.dim()).coset_reps_of(h)?;
        let reps: Vec<GroupElement> = reps.iter().map(|r| h.coset_reduce(r)).collect();
        let index: std::collections::HashMap<&GroupElement, usize> = reps.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let of = |x: &GroupElement| index[&h.coset_reduce(x)];
        let images: Vec<GroupElement> = reps.iter().map(|y| sigma.base().apply_unchecked(y)).collect();
        let shift = sigma
            .digits()
            .iter()
            .map(|d| images.iter().map(|gy| of(&(d + gy))).collect())
            .collect();
        let mut marks = vec![false; reps.len()];
        for t in targets {
            marks[of(t)] = true;
        }
        Ok(Residues {
            shift,
            targets: marks,
            zero: of(&GroupElement::zero(h.dim())),
        })
    }
}

impl KernelOracle for Residues {
    type State = Vec<bool>;

    fn initial(&self) -> Self::State {
        self.targets.clone()
    }

    fn step(&self, s: &Self::State, digit: usize) -> Self::State {
        self.shift[digit].iter().map(|&r| s[r]).collect()
    }

    fn accepting(&self, s: &Self::State) -> bool {
        s[self.zero]
    }
}

/// A finite union of points and shifted cycle copies
/// `a + G^p C(gamma_k; e_k)` (with `p >= 1` after normalization).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleState {
    pub points: BTreeSet<GroupElement>,
    pub tails: BTreeSet<(GroupElement, u32, usize)>,
}

struct CycleKernel<'a> {
    sigma: &'a SpanningSet,
    /// `(gamma_k, e_k)` with steps in powers of the base `G`.
    cycles: Vec<(GroupElement, u32)>,
    start: CycleState,
    powers: Vec<Endomorphism>,
}

impl<'a> CycleKernel<'a> {
    fn new(sigma: &'a SpanningSet, cycles: Vec<(GroupElement, u32)>, points: Vec<GroupElement>, tails: Vec<(GroupElement, usize)>) -> Self {
        let max_e = cycles.iter().map(|c| c.1).max().unwrap_or(1);
        let powers = (0..=max_e).map(|p| sigma.base().pow(p)).collect();
        let mut k = CycleKernel {
            sigma,
            cycles,
            start: CycleState {
                points: BTreeSet::new(),
                tails: BTreeSet::new(),
            },
            powers,
        };
        let mut st = CycleState {
            points: points.into_iter().collect(),
            tails: BTreeSet::new(),
        };
        for (a, idx) in tails {
            k.push_tail(&mut st, a, 0, idx);
        }
        k.start = st;
        k
    }

    fn push_tail(&self, st: &mut CycleState, a: GroupElement, p: u32, k: usize) {
        if p == 0 {
            let (g, e) = &self.cycles[k];
            let b = &a + g;
            st.points.insert(b.clone());
            st.tails.insert((b, *e, k));
        } else {
            st.tails.insert((a, p, k));
        }
    }

    fn in_cycle(&self, mut y: GroupElement, k: usize) -> bool {
        let (g, e) = &self.cycles[k];
        let mut seen = BTreeSet::new();
        loop {
            if &y == g {
                return true;
            }
            if !seen.insert(y.clone()) {
                return false;
            }
            match self.powers[*e as usize].solve(&(&y - g)) {
                Some(z) => y = z,
                None => return false,
            }
        }
    }
}

impl KernelOracle for CycleKernel<'_> {
    type State = CycleState;

    fn initial(&self) -> CycleState {
        self.start.clone()
    }

    fn step(&self, st: &CycleState, digit: usize) -> CycleState {
        let x = self.sigma.digit(digit);
        let g = self.sigma.base();
        let mut out = CycleState {
            points: BTreeSet::new(),
            tails: BTreeSet::new(),
        };
        for a in &st.points {
            if let Some(b) = g.solve(&(a - x)) {
                out.points.insert(b);
            }
        }
        for (a, p, k) in &st.tails {
            if let Some(b) = g.solve(&(a - x)) {
                self.push_tail(&mut out, b, p - 1, *k);
            }
        }
        out
    }

    fn accepting(&self, st: &CycleState) -> bool {
        if st.points.iter().any(|a| a.is_zero()) {
            return true;
        }
        st.tails.iter().any(|(a, p, k)| {
            self.powers[*p as usize]
                .solve(&-a)
                .is_some_and(|y| self.in_cycle(y, *k))
        })
    }
}

impl Compiler {
    pub fn new(sigma: &SpanningSet) -> Result<Self> {
        Ok(Compiler {
            arith: Arith::new(sigma)?,
            alphabet: Alphabet::new(sigma.digits().to_vec(), 1)?,
            sigma: sigma.clone(),
            strategy: CycleStrategy::Auto,
            state_cap: DEFAULT_STATE_CAP,
            max_extended_digits: 1500,
        })
    }

    pub fn sigma(&self) -> &SpanningSet {
        &self.sigma
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn endo(&self) -> &Endomorphism {
        self.sigma.endo()
    }

    fn check_dim(&self, x: &GroupElement) -> Result<()> {
        if x.dim() != self.sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    fn check_alphabet(&self, d: &Dfa) -> Result<()> {
        if d.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    pub fn empty(&self) -> Dfa {
        Dfa::empty(self.alphabet.clone())
    }

    pub fn universal(&self) -> Dfa {
        Dfa::universal(self.alphabet.clone())
    }

    /// Exactly the expansions of `g`.
    pub fn singleton(&self, g: &GroupElement) -> Result<Dfa> {
        self.finite(std::slice::from_ref(g))
    }

    /// A finite set; states are the finite sets `S_w`.
    pub fn finite(&self, points: &[GroupElement]) -> Result<Dfa> {
        for g in points {
            self.check_dim(g)?;
        }
        let oracle = Finite {
            sigma: &self.sigma,
            targets: points.iter().cloned().collect(),
        };
        Ok(dfa_from_kernel(&oracle, self.alphabet.clone(), self.state_cap)?.dfa.minimize())
    }

    /// The coset kernel of `N*` (which must satisfy `F^{-1}(N*) = N*`).
    pub fn coset_kernel(&self, n_star: &Lattice) -> Result<Dfa> {
        let oracle = Cosets {
            sigma: &self.sigma,
            lattice: n_star.clone(),
        };
        Ok(dfa_from_kernel(&oracle, self.alphabet.clone(), self.state_cap)?.dfa.minimize())
    }

    /// An `F`-invariant subgroup: saturate to `N* = F^{-r}(N)`, take its coset
    /// kernel, push it forward by the base `G = F^p` until `F^k(N*) ⊆ N`
    /// (`k` the least multiple of `p` with `k >= r`), then union the
    /// translates over coset representatives of `N / F^k(N*)`.
    pub fn subgroup(&self, n: &Lattice) -> Result<Dfa> {
        if n.dim() != self.sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.dim(),
                got: n.dim(),
            });
        }
        let (r, n_star) = invariant_saturation(self.endo(), n)?;
        let mut d = self.coset_kernel(&n_star)?;
        let p = self.sigma.power() as usize;
        let times = r.div_ceil(p);
        for _ in 0..times {
            d = self.image_under_base(&d)?;
        }
        let pushed = n_star.image(&self.endo().pow((times * p) as u32));
        let reps = n.coset_reps_of(&pushed)?;
        if reps.len() == 1 {
            return self.translate(&d, &reps[0]);
        }
        self.sum(&d, &self.finite(&reps)?)
    }

    /// `G(S)`: prepend a zero digit, then saturate.
    pub fn image_under_base(&self, d: &Dfa) -> Result<Dfa> {
        self.check_alphabet(d)?;
        Ok(self.saturate(&d.prepend_zero()))
    }

    pub fn saturate(&self, d: &Dfa) -> Dfa {
        crate::automata::saturate_with(&self.arith, d)
    }

    pub fn sum(&self, a: &Dfa, b: &Dfa) -> Result<Dfa> {
        self.check_alphabet(a)?;
        self.check_alphabet(b)?;
        Ok(crate::automata::sum_with(&self.arith, a, b))
    }

    /// `g + S`, as a sum with the singleton `{g}`.
    pub fn translate(&self, d: &Dfa, g: &GroupElement) -> Result<Dfa> {
        if g.is_zero() {
            self.check_alphabet(d)?;
            return Ok(d.minimize());
        }
        self.sum(d, &self.singleton(g)?)
    }

    /// `C(gamma; delta)` with `delta` in powers of `F`.
    pub fn cycle(&self, gamma: &GroupElement, delta: u32) -> Result<Dfa> {
        self.check_dim(gamma)?;
        if delta == 0 {
            return Err(Error::pre("cycle step must be at least 1"));
        }
        if !self.endo().no_unit_eigenvalue(delta) {
            return Err(Error::EigenvalueOne(delta));
        }
        let p = self.sigma.power();
        if delta.is_multiple_of(p) {
            return self.base_cycle(gamma, delta / p);
        }
        let s = p / p.gcd(&delta);
        let pieces = cycle_to_power(self.endo(), gamma, delta, s)?;
        if self.strategy == CycleStrategy::Kernel {
            let cycles = pieces.iter().map(|pc| (pc.cycle.0.clone(), pc.cycle.1 / p)).collect();
            let points = pieces.iter().filter_map(|pc| pc.singleton.clone()).collect();
            let tails = pieces.iter().enumerate().map(|(k, pc)| (pc.translate.clone(), k)).collect();
            return self.cycle_kernel(cycles, points, tails);
        }
        let mut out = self.empty();
        for pc in pieces {
            let c = self.base_cycle(&pc.cycle.0, pc.cycle.1 / p)?;
            let mut part = self.translate(&c, &pc.translate)?;
            if let Some(x) = &pc.singleton {
                part = part.union(&self.singleton(x)?)?;
            }
            out = out.union(&part)?.minimize();
        }
        Ok(out)
    }

    /// `C(gamma; e)` in base `G`: `gamma + G^e gamma + ...`.
    pub fn base_cycle(&self, gamma: &GroupElement, e: u32) -> Result<Dfa> {
        let w = expand_greedy(&self.sigma, gamma)?;
        let m = w.len();
        let strategy = match self.strategy {
            CycleStrategy::Auto if m <= e as usize => CycleStrategy::Literal,
            CycleStrategy::Auto => {
                if self.extended_size_at_most(m as u32, self.max_extended_digits) {
                    CycleStrategy::Literal
                } else {
                    CycleStrategy::Kernel
                }
            }
            s => s,
        };
        match strategy {
            CycleStrategy::Kernel => self.cycle_kernel(vec![(gamma.clone(), e)], vec![], vec![(GroupElement::zero(gamma.dim()), 0)]),
            _ if m <= e as usize => {
                let mut u = w.clone();
                u.resize(e as usize, 0);
                let lit = star_then(&self.alphabet, &u, &w)?;
                Ok(self.saturate(&lit))
            }
            _ => {
                let ext = SpanningSet::new(power_digits(&self.sigma, m as u32), self.endo().clone(), self.sigma.power())?;
                let g = ext.index_of(gamma).expect("gamma is a digit of the extension");
                let mut u = vec![g];
                u.resize(e as usize, 0);
                let alpha = Alphabet::new(ext.digits().to_vec(), 1)?;
                let lit = star_then(&alpha, &u, &[g])?;
                let sat = crate::automata::saturate(&lit, &ext)?;
                rebase(&sat, &ext, &self.sigma)
            }
        }
    }

    /// Crude box bound on `|power_digits(Sigma, m)|`.
    fn extended_size_at_most(&self, m: u32, limit: usize) -> bool {
        let norm: BigInt = self
            .sigma
            .base()
            .as_matrix()
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default();
        let mut radius = BigInt::zero();
        let mut x = self.sigma.height();
        for _ in 0..m {
            radius += &x;
            x *= &norm;
        }
        let side: BigInt = 2 * radius + 1;
        side.pow(self.sigma.dim() as u32) <= BigInt::from(limit)
    }

    fn cycle_kernel(
        &self,
        cycles: Vec<(GroupElement, u32)>,
        points: Vec<GroupElement>,
        tails: Vec<(GroupElement, usize)>,
    ) -> Result<Dfa> {
        let oracle = CycleKernel::new(&self.sigma, cycles, points, tails);
        Ok(dfa_from_kernel(&oracle, self.alphabet.clone(), self.state_cap)?.dfa.minimize())
    }

    pub fn term(&self, t: &Term) -> Result<Dfa> {
        if t.subgroup.is_full() {
            return Ok(self.universal());
        }
        let mut parts: Vec<Dfa> = Vec::new();
        for (g, delta) in &t.cycles {
            parts.push(self.cycle(g, *delta)?);
        }
        let small = t.subgroup.index().is_some_and(|i| i <= BigInt::from(MAX_RESIDUE_INDEX));
        if small && self.strategy != CycleStrategy::Literal {
            return self.coset_union(t);
        }
        if !t.subgroup.is_trivial() {
            parts.push(self.subgroup(&t.subgroup)?);
        }
        let Some(first) = parts.pop() else {
            return self.singleton(&t.point);
        };
        let mut acc = first;
        while let Some(p) = parts.pop() {
            acc = self.sum(&acc, &p)?;
        }
        self.translate(&acc, &t.point)
    }

    /// `point + cycles + H` for `H` of finite index: the residues of
    /// `point + cycles` modulo `H` (each cycle is eventually periodic there),
    /// then the residue kernel.
    fn coset_union(&self, t: &Term) -> Result<Dfa> {
        let h = &t.subgroup;
        let mut sums = BTreeSet::from([h.coset_reduce(&t.point)]);
        for (g, delta) in &t.cycles {
            let step = self.endo().pow(*delta);
            let mut seen = BTreeSet::new();
            let mut cycle = BTreeSet::new();
            let (mut s, mut x) = (h.coset_reduce(g), h.coset_reduce(g));
            while seen.insert((s.clone(), x.clone())) {
                cycle.insert(s.clone());
                x = h.coset_reduce(&step.apply_unchecked(&x));
                s = h.coset_reduce(&(&s + &x));
            }
            sums = sums.iter().flat_map(|a| cycle.iter().map(move |c| h.coset_reduce(&(a + c)))).collect();
        }
        let oracle = Residues::new(&self.sigma, h, &sums)?;
        Ok(dfa_from_kernel(&oracle, self.alphabet.clone(), self.state_cap)?.dfa.minimize())
    }

    /// Union of the term automata, minimized.
    pub fn compile(&self, e: &FSetExpr) -> Result<Dfa> {
        if e.dim != self.sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.dim(),
                got: e.dim,
            });
        }
        for t in &e.terms {
            for (_, delta) in &t.cycles {
                if !self.endo().no_unit_eigenvalue(*delta) {
                    return Err(Error::EigenvalueOne(*delta));
                }
            }
            if !t.subgroup.is_invariant(self.endo()) {
                return Err(Error::NotInvariant);
            }
        }
        let mut out = self.empty();
        for t in &e.terms {
            out = out.union(&self.term(t)?)?.minimize();
        }
        Ok(out)
    }
}

/// DFA of `u* w`.
fn star_then(alphabet: &Alphabet, u: &[usize], w: &[usize]) -> Result<Dfa> {
    let mut nfa = Nfa::new();
    let hub = nfa.add_state(false);
    nfa.set_initial(hub);
    nfa.add_loop(hub, u);
    let end = nfa.add_path(hub, w);
    nfa.set_accepting(end, true);
    nfa.determinize(alphabet.clone())
}

pub fn singleton_dfa(g: &GroupElement, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.singleton(g)
}

pub fn subgroup_dfa(n: &Lattice, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.subgroup(n)
}

pub fn cycle_dfa(gamma: &GroupElement, delta: u32, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.cycle(gamma, delta)
}

pub fn sum_dfa(a: &Dfa, b: &Dfa, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.sum(a, b)
}

pub fn translate_dfa(d: &Dfa, g: &GroupElement, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.translate(d, g)
}

pub fn union_dfa(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    Ok(a.union(b)?.minimize())
}

/// Image under the base `F^r` of the spanning set (under `F` itself when `r = 1`).
pub fn image_under_f(d: &Dfa, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.image_under_base(d)
}

pub fn compile_fset(e: &FSetExpr, sigma: &SpanningSet) -> Result<Dfa> {
    Compiler::new(sigma)?.compile(e)
}
