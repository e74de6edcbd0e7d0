//! Spanning sets of digits, greedy expansion and the carry/division word algorithms.
//!
//! Digits are kept in a canonical order: by sup-norm, then lexicographically by
//! coordinates. Index 0 is always the zero digit. Every "least" witness in this
//! module is least with respect to digit indices, which makes all downstream
//! automata deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{eval_expansion, inverse_rational, Endomorphism, GroupElement, Lattice};

/// Digit indices, least significant first.
pub type Word = Vec<usize>;

/// Sup-norm first, then coordinates.
pub fn canonical_cmp(a: &GroupElement, b: &GroupElement) -> Ordering {
    a.sup_norm().cmp(&b.sup_norm()).then_with(|| a.cmp(b))
}

/// A finite symmetric digit set for the base `F^r`.
#[derive(Clone)]
pub struct SpanningSet {
    digits: Vec<GroupElement>,
    endo: Endomorphism,
    power: u32,
    base: Endomorphism,
    index: HashMap<GroupElement, usize>,
    residues: Lattice,
    tables: OnceLock<Tables>,
}

#[derive(Clone, Debug)]
struct Tables {
    /// `t + G t'` -> least `(t, t')`.
    two_digit: HashMap<GroupElement, (usize, usize)>,
    /// `G t` -> `t`.
    divide: HashMap<GroupElement, usize>,
    /// Coset representative mod `G(Z^d)` -> digits in canonical order.
    buckets: HashMap<GroupElement, Vec<usize>>,
}

impl fmt::Debug for SpanningSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpanningSet")
            .field("endo", &self.endo)
            .field("power", &self.power)
            .field("digits", &self.digits)
            .finish()
    }
}

impl PartialEq for SpanningSet {
    fn eq(&self, other: &Self) -> bool {
        self.digits == other.digits && self.endo == other.endo && self.power == other.power
    }
}

impl Eq for SpanningSet {}

impl SpanningSet {
    /// Checks shape (zero present, symmetric, no duplicates, dimensions) and
    /// sorts digits canonically. Axioms are checked by [`verify_spanning`].
    pub fn new(digits: Vec<GroupElement>, endo: Endomorphism, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(Error::pre("power must be at least 1"));
        }
        let d = endo.dim();
        if let Some(bad) = digits.iter().find(|x| x.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        let set: HashSet<&GroupElement> = digits.iter().collect();
        if set.len() != digits.len() {
            return Err(Error::pre("duplicate digits"));
        }
        if !set.contains(&GroupElement::zero(d)) {
            return Err(Error::pre("digit set must contain zero"));
        }
        if let Some(x) = digits.iter().find(|x| !set.contains(&-*x)) {
            return Err(Error::pre(format!("digit set is not symmetric: missing -{x}")));
        }
        Ok(Self::from_parts_unchecked(digits, endo, power))
    }

    fn from_parts_unchecked(mut digits: Vec<GroupElement>, endo: Endomorphism, power: u32) -> Self {
        digits.sort_by(canonical_cmp);
        let index = digits.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let base = endo.pow(power);
        let residues = base.image_lattice();
        SpanningSet {
            digits,
            endo,
            power,
            base,
            index,
            residues,
            tables: OnceLock::new(),
        }
    }

    /// Like [`SpanningSet::new`] but without the symmetry requirement, so that
    /// [`verify_spanning`] can report on arbitrary candidate sets.
    pub fn candidate(digits: Vec<GroupElement>, endo: Endomorphism, power: u32) -> Result<Self> {
        let d = endo.dim();
        if power == 0 || digits.iter().any(|x| x.dim() != d) {
            return Err(Error::pre("bad candidate digit set"));
        }
        let mut uniq: Vec<GroupElement> = digits.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        uniq.sort_by(canonical_cmp);
        Ok(Self::from_parts_unchecked(uniq, endo, power))
    }

    pub fn digits(&self) -> &[GroupElement] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> &GroupElement {
        &self.digits[i]
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.endo.dim()
    }

    /// The endomorphism `F`.
    pub fn endo(&self) -> &Endomorphism {
        &self.endo
    }

    /// `r`, so that this is an `F^r`-spanning set.
    pub fn power(&self) -> u32 {
        self.power
    }

    /// `F^r`, the base of all expansions over this set.
    pub fn base(&self) -> &Endomorphism {
        &self.base
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn zero_index(&self) -> usize {
        0
    }

    /// `[w]` in base `F^r`.
    pub fn eval(&self, word: &[usize]) -> Result<GroupElement> {
        eval_expansion(&self.digits, &self.base, word)
    }

    /// Canonical representative of `x` modulo `F^r(Z^d)`.
    pub fn residue(&self, x: &GroupElement) -> GroupElement {
        self.residues.coset_reduce(x)
    }

    pub fn residue_lattice(&self) -> &Lattice {
        &self.residues
    }

    fn tables(&self) -> &Tables {
        self.tables.get_or_init(|| {
            let mut two_digit = HashMap::new();
            let images: Vec<GroupElement> = self.digits.iter().map(|t| self.base.apply_unchecked(t)).collect();
            for (i, t) in self.digits.iter().enumerate() {
                for (j, ft) in images.iter().enumerate() {
                    two_digit.entry(t + ft).or_insert((i, j));
                }
            }
            let divide = images.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
            let mut buckets: HashMap<GroupElement, Vec<usize>> = HashMap::new();
            for (i, x) in self.digits.iter().enumerate() {
                buckets.entry(self.residue(x)).or_default().push(i);
            }
            Tables {
                two_digit,
                divide,
                buckets,
            }
        })
    }

    /// Least `(t, t')` with `s = t + F^r t'`.
    pub fn two_digit(&self, s: &GroupElement) -> Option<(usize, usize)> {
        self.tables().two_digit.get(s).copied()
    }

    /// The digit `t` with `F^r t = s`.
    pub fn divide_digit(&self, s: &GroupElement) -> Option<usize> {
        self.tables().divide.get(s).copied()
    }

    /// Digits congruent to `x` modulo `F^r(Z^d)`, in canonical order.
    pub fn residue_bucket(&self, x: &GroupElement) -> &[usize] {
        self.tables()
            .buckets
            .get(&self.residue(x))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Digit indices whose digit is in `F^r(Sigma)`, mapped to the quotient digit.
    pub fn hat_table(&self) -> Vec<Option<usize>> {
        self.digits.iter().map(|x| self.divide_digit(x)).collect()
    }

    /// Largest sup-norm among digits.
    pub fn height(&self) -> BigInt {
        self.digits.iter().map(|x| x.sup_norm()).max().unwrap_or_else(BigInt::zero)
    }
}

/// Parameters of the height argument; the height is the sup-norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightParams {
    pub d: BigRational,
    pub kappa: BigRational,
    /// `h(F a) >= C h(a)` for all `a` (no exceptional set for the sup-norm).
    pub c: BigRational,
    pub exceptional_bound: BigInt,
}

impl HeightParams {
    /// `D = 1`, `kappa = 0`, `C = 1 / ||F^{-1}||_inf`.
    pub fn sup_norm(f: &Endomorphism) -> Result<Self> {
        let inv = inverse_rational(&f.as_matrix()).ok_or(Error::NotInjective)?;
        let norm: BigRational = inv
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<BigRational>())
            .max()
            .unwrap_or_else(BigRational::one);
        Ok(HeightParams {
            d: BigRational::one(),
            kappa: BigRational::zero(),
            c: norm.recip(),
            exceptional_bound: BigInt::zero(),
        })
    }
}

/// Outcome of one axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    /// Failure with a concrete witness.
    Fail(String),
    /// Axiom (iii) proven by residue completeness plus the descent box.
    Certified,
    /// Axiom (iii) could not be decided by the descent criterion.
    Inconclusive(String),
}

impl AxiomStatus {
    pub fn ok(&self) -> bool {
        matches!(self, AxiomStatus::Pass | AxiomStatus::Certified)
    }
}

impl fmt::Display for AxiomStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomStatus::Pass => write!(f, "pass"),
            AxiomStatus::Fail(w) => write!(f, "fail: {w}"),
            AxiomStatus::Certified => write!(f, "certified"),
            AxiomStatus::Inconclusive(w) => write!(f, "inconclusive: {w}"),
        }
    }
}

/// Per-axiom results for the five spanning axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub zero_symmetric: AxiomStatus,
    pub divides_back: AxiomStatus,
    pub expressible: AxiomStatus,
    pub five_sums: AxiomStatus,
    pub three_sums: AxiomStatus,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.statuses().iter().all(|s| s.ok())
    }

    pub fn statuses(&self) -> [&AxiomStatus; 5] {
        [
            &self.zero_symmetric,
            &self.divides_back,
            &self.expressible,
            &self.five_sums,
            &self.three_sums,
        ]
    }

    /// True if some axiom fails outright (as opposed to being inconclusive).
    pub fn has_failure(&self) -> bool {
        self.statuses().iter().any(|s| matches!(s, AxiomStatus::Fail(_)))
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["(i)", "(ii)", "(iii)", "(iv)", "(v)"];
        for (n, s) in names.iter().zip(self.statuses()) {
            writeln!(f, "{n}: {s}")?;
        }
        Ok(())
    }
}

/// All sums of exactly `k` digits (zero allowed), as i64 vectors.
fn sumset(digits: &[Vec<i64>], k: usize) -> HashSet<Vec<i64>> {
    let d = digits.first().map_or(0, |v| v.len());
    let mut cur: HashSet<Vec<i64>> = HashSet::from([vec![0; d]]);
    for _ in 0..k {
        let mut next = HashSet::with_capacity(cur.len() * 2);
        for s in &cur {
            for x in digits {
                next.insert(s.iter().zip(x).map(|(a, b)| a + b).collect::<Vec<i64>>());
            }
        }
        cur = next;
    }
    cur
}

fn sorted_elems(set: HashSet<Vec<i64>>) -> Vec<GroupElement> {
    let mut v: Vec<GroupElement> = set.into_iter().map(|c| GroupElement::from_i64s(&c)).collect();
    v.sort();
    v
}

/// Checks the five spanning axioms for base `F^r`.
pub fn verify_spanning(sigma: &SpanningSet) -> AxiomReport {
    let d = sigma.dim();
    let g = sigma.base();
    let set: HashSet<&GroupElement> = sigma.digits().iter().collect();

    let zero_symmetric = if !set.contains(&GroupElement::zero(d)) {
        AxiomStatus::Fail("0 is not a digit".into())
    } else if let Some(x) = sigma.digits().iter().find(|x| !set.contains(&-*x)) {
        AxiomStatus::Fail(format!("{x} is a digit but {} is not", -x))
    } else {
        AxiomStatus::Pass
    };

    let divides_back = match sigma
        .digits()
        .iter()
        .find_map(|y| g.solve(y).filter(|x| !set.contains(x)).map(|x| (x, y)))
    {
        Some((x, y)) => AxiomStatus::Fail(format!("F({x}) = {y} is a digit but {x} is not")),
        None => AxiomStatus::Pass,
    };

    let small: Option<Vec<Vec<i64>>> = sigma.digits().iter().map(|x| x.to_i64s()).collect();
    let Some(small) = small else {
        let inc = AxiomStatus::Inconclusive("digits too large for exhaustive checks".into());
        return AxiomReport {
            zero_symmetric,
            divides_back,
            expressible: inc.clone(),
            five_sums: inc.clone(),
            three_sums: inc,
        };
    };

    let five_sums = {
        let mut status = AxiomStatus::Pass;
        for s in sorted_elems(sumset(&small, 5)) {
            if sigma.two_digit(&s).is_none() {
                status = AxiomStatus::Fail(format!("sum {s} of five digits is not t + F t'"));
                break;
            }
        }
        status
    };

    let three_sums = {
        let mut status = AxiomStatus::Pass;
        for s in sorted_elems(sumset(&small, 3)) {
            if let Some(t) = g.solve(&s) {
                if !set.contains(&t) {
                    status = AxiomStatus::Fail(format!("sum {s} of three digits is F({t}) with {t} not a digit"));
                    break;
                }
            }
        }
        status
    };

    let expressible = check_expressible(sigma);

    AxiomReport {
        zero_symmetric,
        divides_back,
        expressible,
        five_sums,
        three_sums,
    }
}

/// Axiom (iii): complete residues, then every element of the descent box is
/// expressible. A minimal-height counterexample `x = x_0 + G y` with
/// `h(y) >= h(x)` forces `(C - 1) h(x) <= N`, so the box of radius
/// `ceil(N / (C - 1))` is enough.
fn check_expressible(sigma: &SpanningSet) -> AxiomStatus {
    let g = sigma.base();
    let index = g.index();
    let classes: HashSet<GroupElement> = sigma.digits().iter().map(|x| sigma.residue(x)).collect();
    if BigInt::from(classes.len()) != index {
        let lat = sigma.residue_lattice();
        let missing = residue_system(lat, sigma.dim())
            .into_iter()
            .find(|r| !classes.contains(r))
            .map(|r| r.to_string())
            .unwrap_or_default();
        return AxiomStatus::Fail(format!("residue class of {missing} modulo F^r has no digit"));
    }
    let Ok(h) = HeightParams::sup_norm(g) else {
        return AxiomStatus::Inconclusive("F^r not injective".into());
    };
    if h.c <= BigRational::one() {
        return AxiomStatus::Inconclusive("F^r does not expand the sup-norm".into());
    }
    let n = BigRational::from_integer(sigma.height());
    let bound = (n / (&h.c - BigRational::one())).ceil().to_integer();
    let Some(b) = bound.to_i64().filter(|&b| b <= 10_000) else {
        return AxiomStatus::Inconclusive("descent box too large".into());
    };
    let d = sigma.dim();
    let boxed = ball(d, b);
    if boxed.len() > 5_000_000 {
        return AxiomStatus::Inconclusive("descent box too large".into());
    }
    let mut known: HashSet<GroupElement> = HashSet::from([GroupElement::zero(d)]);
    let mut pending: Vec<GroupElement> = boxed.into_iter().filter(|x| !x.is_zero()).collect();
    loop {
        let before = pending.len();
        pending.retain(|x| {
            if sigma.index_of(x).is_some() {
                known.insert(x.clone());
                return false;
            }
            for &i in sigma.residue_bucket(x) {
                let y = g.solve(&(x - sigma.digit(i))).expect("same residue class");
                if known.contains(&y) {
                    known.insert(x.clone());
                    return false;
                }
            }
            true
        });
        if pending.is_empty() {
            return AxiomStatus::Certified;
        }
        if pending.len() == before {
            return AxiomStatus::Fail(format!("{} has no expansion", pending[0]));
        }
    }
}

/// Complete residue system of `Z^d / L` for full-rank `L`.
fn residue_system(lat: &Lattice, d: usize) -> Vec<GroupElement> {
    Lattice::full(d).coset_reps_of(lat).unwrap_or_default()
}

/// Sup-norm ball of radius `n` in `Z^d`, sorted canonically.
pub fn ball(d: usize, n: i64) -> Vec<GroupElement> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * (2 * n as usize + 1));
        for v in &out {
            for c in -n..=n {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    let mut v: Vec<GroupElement> = out.iter().map(|c| GroupElement::from_i64s(c)).collect();
    v.sort_by(canonical_cmp);
    v
}

/// The set `{-(k-1),...,k-1}^d` as a `k`-spanning set, verified before return.
pub fn default_spanning(k: i64, d: usize) -> Result<SpanningSet> {
    if k.abs() < 4 {
        return Err(Error::pre("default spanning set needs |k| >= 4"));
    }
    let f = Endomorphism::scalar(k, d)?;
    let n = k.abs() - 1;
    let sigma = SpanningSet::new(ball(d, n), f, 1)?;
    let report = verify_spanning(&sigma);
    if !report.all_pass() {
        return Err(Error::pre(format!("default set failed verification:\n{report}")));
    }
    Ok(sigma)
}

/// `Sigma_N`: all `x` with `h(x) <= N` (the sup-norm is symmetric).
pub fn sigma_n_build(f: &Endomorphism, h: &HeightParams, n: u32) -> Result<Vec<GroupElement>> {
    if !f.is_expansive() {
        return Err(Error::NotExpansive);
    }
    if h.d != BigRational::one() || !h.kappa.is_zero() {
        return Err(Error::pre("only the sup-norm height (D = 1, kappa = 0) is supported"));
    }
    Ok(ball(f.dim(), n as i64))
}

/// Bounds for [`find_spanning_with`].
#[derive(Clone, Copy, Debug)]
pub struct SpanningSearch {
    pub max_power: u32,
    /// How far past the starting radius to look for each power.
    pub extra_radius: u32,
    pub max_digits: usize,
}

impl Default for SpanningSearch {
    fn default() -> Self {
        SpanningSearch {
            max_power: 6,
            extra_radius: 4,
            max_digits: 4000,
        }
    }
}

/// Smallest `N` such that `{0..N}^d` meets every class modulo `G(Z^d)`.
fn start_radius(g: &Endomorphism) -> Option<u32> {
    let idx = g.index().to_u64()?;
    let d = g.dim() as u32;
    let lat = g.image_lattice();
    let mut n: u32 = 0;
    while ((n as u64) + 1).checked_pow(d).is_some_and(|c| c < idx) {
        n += 1;
    }
    loop {
        let cube = (0..d).try_fold(vec![vec![]], |acc: Vec<Vec<i64>>, _| {
            let mut next = Vec::new();
            for v in &acc {
                for c in 0..=n as i64 {
                    let mut w = v.clone();
                    w.push(c);
                    next.push(w);
                }
            }
            if next.len() > 10_000_000 {
                None
            } else {
                Some(next)
            }
        })?;
        let classes: HashSet<GroupElement> = cube.iter().map(|c| lat.coset_reduce(&GroupElement::from_i64s(c))).collect();
        if classes.len() as u64 == idx {
            return Some(n);
        }
        n += 1;
    }
}

/// Search for an `F^r`-spanning set among the balls `Sigma_N`.
pub fn find_spanning(f: &Endomorphism) -> Result<SpanningSet> {
    find_spanning_with(f, SpanningSearch::default())
}

/// Powers `r` are tried in increasing order; for each, radii start at the
/// smallest `N` whose nonnegative box `{0..N}^d` holds a complete residue
/// system modulo `F^r(Z^d)` (the analogue of the classical digits
/// `{0..k-1}`) and increase from there.
pub fn find_spanning_with(f: &Endomorphism, search: SpanningSearch) -> Result<SpanningSet> {
    if !f.is_expansive() {
        return Err(Error::NotExpansive);
    }
    let h = HeightParams::sup_norm(f)?;
    for r in 1..=search.max_power {
        let g = f.pow(r);
        let Some(n0) = start_radius(&g) else { continue };
        for n in n0..=n0 + search.extra_radius {
            let count = (2 * n as u64 + 1).checked_pow(f.dim() as u32);
            if count.is_none_or(|c| c > search.max_digits as u64) {
                break;
            }
            let digits = sigma_n_build(f, &h, n)?;
            let sigma = SpanningSet::new(digits, f.clone(), r)?;
            if verify_spanning(&sigma).all_pass() {
                return Ok(sigma);
            }
        }
    }
    Err(Error::Inconclusive(format!(
        "no spanning ball found for powers up to {}",
        search.max_power
    )))
}

/// `Sigma^(m) = {[w] : |w| = m}` as an `F^{rm}`-spanning set.
pub fn sigma_power(sigma: &SpanningSet, m: u32) -> Result<SpanningSet> {
    if m == 0 {
        return Err(Error::pre("m must be at least 1"));
    }
    let values = power_digits(sigma, m);
    SpanningSet::new(values, sigma.endo().clone(), sigma.power() * m)
}

/// The digits of `Sigma^(m)` kept over the same base `F^r`.
pub fn power_digits(sigma: &SpanningSet, m: u32) -> Vec<GroupElement> {
    let g = sigma.base();
    let mut acc: BTreeSet<GroupElement> = BTreeSet::from([GroupElement::zero(sigma.dim())]);
    for _ in 0..m {
        let shifted: Vec<GroupElement> = acc.iter().map(|x| g.apply_unchecked(x)).collect();
        let mut next = BTreeSet::new();
        for s in &shifted {
            for x in sigma.digits() {
                next.insert(x + s);
            }
        }
        acc = next;
    }
    acc.into_iter().collect()
}

/// Greedy expansion: a digit `x` is emitted as is; otherwise the least digit
/// (in canonical order) congruent to `x` is emitted and the quotient expanded.
pub fn expand_greedy(sigma: &SpanningSet, x: &GroupElement) -> Result<Word> {
    expand_greedy_capped(sigma, x, 100_000)
}

pub fn expand_greedy_capped(sigma: &SpanningSet, x: &GroupElement, cap: usize) -> Result<Word> {
    if x.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: x.dim(),
        });
    }
    let g = sigma.base();
    let mut word = Vec::new();
    let mut cur = x.clone();
    let mut seen = HashSet::new();
    while !cur.is_zero() {
        if let Some(i) = sigma.index_of(&cur) {
            word.push(i);
            return Ok(word);
        }
        if word.len() >= cap {
            return Err(Error::cap("greedy expansion length", cap));
        }
        if !seen.insert(cur.clone()) {
            return Err(Error::pre(format!("greedy expansion of {x} cycles; digit set is not spanning")));
        }
        let &i = sigma
            .residue_bucket(&cur)
            .first()
            .ok_or_else(|| Error::pre(format!("no digit congruent to {cur}")))?;
        word.push(i);
        cur = g.solve(&(&cur - sigma.digit(i))).expect("congruent digit");
    }
    Ok(word)
}

fn check_words(sigma: &SpanningSet, ws: [&[usize]; 3]) -> Result<usize> {
    let m = ws[0].len();
    if ws.iter().any(|w| w.len() != m) {
        return Err(Error::pre("words must have equal length"));
    }
    for w in ws {
        if let Some(&i) = w.iter().find(|&&i| i >= sigma.len()) {
            return Err(Error::InvalidDigit(i));
        }
    }
    Ok(m)
}

fn trim_zeros(mut w: Word) -> Word {
    while w.len() > 1 && w.last() == Some(&0) {
        w.pop();
    }
    w
}

fn two_digit_or_err(sigma: &SpanningSet, s: &GroupElement) -> Result<(usize, usize)> {
    sigma
        .two_digit(s)
        .ok_or_else(|| Error::pre(format!("{s} is not t + F t'; digit set fails axiom (iv)")))
}

/// `u` with `[u] = [w1] + [w2] + [w3]`, by the carry recursion.
///
/// The recursion emits one digit per position plus a final carry, so
/// `|u| <= m + 1`; trailing zero digits are trimmed (keeping at least one).
pub fn add_words(sigma: &SpanningSet, w1: &[usize], w2: &[usize], w3: &[usize]) -> Result<Word> {
    let m = check_words(sigma, [w1, w2, w3])?;
    let mut out = Vec::with_capacity(m + 1);
    let mut carry = GroupElement::zero(sigma.dim());
    for j in 0..m {
        let s = &(&(&carry + sigma.digit(w1[j])) + sigma.digit(w2[j])) + sigma.digit(w3[j]);
        let (t, t2) = two_digit_or_err(sigma, &s)?;
        out.push(t);
        carry = sigma.digit(t2).clone();
    }
    out.push(sigma.index_of(&carry).expect("carry is a digit"));
    Ok(trim_zeros(out))
}

/// `u` with `F^r [u] = [w1] + [w2] + [w3]`; errors if the sum is not in `F^r(Z^d)`.
pub fn divide_by_f(sigma: &SpanningSet, w1: &[usize], w2: &[usize], w3: &[usize]) -> Result<Word> {
    let m = check_words(sigma, [w1, w2, w3])?;
    let total = &(&sigma.eval(w1)? + &sigma.eval(w2)?) + &sigma.eval(w3)?;
    if sigma.base().solve(&total).is_none() {
        return Err(Error::NotInImage(total.to_string()));
    }
    if m == 0 {
        return Ok(vec![0]);
    }
    let three = |j: usize| &(sigma.digit(w1[j]) + sigma.digit(w2[j])) + sigma.digit(w3[j]);
    let first = three(0);
    let q = sigma.base().solve(&first).expect("low digits sum into the image");
    let mut carry = sigma
        .index_of(&q)
        .ok_or_else(|| Error::pre(format!("{first} = F({q}) with {q} not a digit; axiom (v) fails")))?;
    let mut out = Vec::with_capacity(m);
    for j in 1..m {
        let s = &three(j) + sigma.digit(carry);
        let (t, t2) = two_digit_or_err(sigma, &s)?;
        out.push(t);
        carry = t2;
    }
    out.push(carry);
    Ok(trim_zeros(out))
}
