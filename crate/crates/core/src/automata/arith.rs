//! Equality and addition automata, and the relational images built on them.
//!
//! State `(x, y)` of the equality automaton holds the pending difference
//! `x + G y`; it dies once `x` is not in `G(Sigma)`. All witness choices come
//! from least-index tables, so constructions are deterministic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::spanning::SpanningSet;

use super::{Alphabet, Dfa};

const NONE: u32 = u32::MAX;

/// Small-integer lookup tables for one spanning set.
#[derive(Clone, Debug)]
pub struct Arith {
    sigma: SpanningSet,
    n: usize,
    d: usize,
    dig: Vec<i64>,
    /// `hat[x] = t` when digit `x` equals `G t`.
    hat: Vec<u32>,
    /// `neg_g[y]` = index of `-G y` when that is a digit.
    neg_g: Vec<u32>,
    radius: i64,
    side: i64,
    witness: Vec<u32>,
    basis: Vec<Vec<i64>>,
    buckets: Vec<Vec<u32>>,
}

fn i64s(x: &GroupElement) -> Result<Vec<i64>> {
    x.to_i64s().ok_or_else(|| Error::pre("digit coordinates too large"))
}

impl Arith {
    pub fn new(sigma: &SpanningSet) -> Result<Self> {
        let n = sigma.len();
        let d = sigma.dim();
        let g = sigma.base();
        let mut dig = Vec::with_capacity(n * d);
        for x in sigma.digits() {
            dig.extend(i64s(x)?);
        }
        let h: i64 = dig.iter().map(|v| v.abs()).max().unwrap_or(0);
        let radius = 5 * h;
        let side = 2 * radius + 1;
        let cells = (side as usize)
            .checked_pow(d as u32)
            .filter(|&c| c <= 50_000_000)
            .ok_or_else(|| Error::pre("digit set too large for the arithmetic tables"))?;
        let mut gd: Vec<Option<Vec<i64>>> = Vec::with_capacity(n);
        for x in sigma.digits() {
            gd.push(g.apply_unchecked(x).to_i64s());
        }
        let hat = sigma.hat_table().into_iter().map(|t| t.map_or(NONE, |t| t as u32)).collect();
        let neg_g = gd
            .iter()
            .map(|v| {
                v.as_ref()
                    .and_then(|v| sigma.index_of(&-GroupElement::from_i64s(v)))
                    .map_or(NONE, |i| i as u32)
            })
            .collect();
        let basis: Vec<Vec<i64>> = sigma
            .residue_lattice()
            .basis()
            .iter()
            .map(i64s)
            .collect::<Result<_>>()?;
        let mut arith = Arith {
            sigma: sigma.clone(),
            n,
            d,
            dig,
            hat,
            neg_g,
            radius,
            side,
            witness: vec![NONE; cells],
            basis,
            buckets: Vec::new(),
        };
        let mut s = vec![0i64; d];
        for t in 0..n {
            for (t2, gt2) in gd.iter().enumerate() {
                let Some(gt2) = gt2 else { continue };
                for k in 0..d {
                    s[k] = arith.dig[t * d + k] + gt2[k];
                }
                if let Some(e) = arith.enc(&s) {
                    if arith.witness[e] == NONE {
                        arith.witness[e] = (t * n + t2) as u32;
                    }
                }
            }
        }
        let classes: usize = (0..d).map(|i| arith.basis[i][i] as usize).product();
        let mut buckets = vec![Vec::new(); classes];
        for x in 0..n {
            let c = arith.class(&arith.dig[x * d..(x + 1) * d]);
            buckets[c].push(x as u32);
        }
        arith.buckets = buckets;
        Ok(arith)
    }

    pub fn sigma(&self) -> &SpanningSet {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn digit(&self, i: usize) -> &[i64] {
        &self.dig[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    fn enc(&self, v: &[i64]) -> Option<usize> {
        let mut e = 0i64;
        for &c in v {
            if c < -self.radius || c > self.radius {
                return None;
            }
            e = e * self.side + c + self.radius;
        }
        Some(e as usize)
    }

    /// Residue class id of `v` modulo `G(Z^d)`.
    #[inline]
    fn class(&self, v: &[i64]) -> usize {
        let mut w = v.to_vec();
        let mut id = 0usize;
        for i in 0..self.d {
            let p = self.basis[i][i];
            let q = w[i].div_euclid(p);
            if q != 0 {
                for k in i..self.d {
                    w[k] -= q * self.basis[i][k];
                }
            }
            id = id * p as usize + w[i] as usize;
        }
        id
    }

    /// Least `(t, t')` with `z = t + G t'`.
    #[inline]
    fn split(&self, z: &[i64]) -> (u32, u32) {
        let w = self.enc(z).map_or(NONE, |e| self.witness[e]);
        assert!(w != NONE, "sum outside the witness table; digit set fails axiom (iv)");
        ((w as usize / self.n) as u32, (w as usize % self.n) as u32)
    }

    #[inline]
    fn bucket_of(&self, v: &[i64]) -> &[u32] {
        &self.buckets[self.class(v)]
    }

    #[inline]
    fn accepting_pair(&self, x: u32, y: u32) -> bool {
        self.neg_g[y as usize] == x
    }

    /// One step of the equality automaton on `(a, b)`.
    pub fn eq_step(&self, (x, y): (u32, u32), a: usize, b: usize) -> Option<(u32, u32)> {
        let h = self.hat[x as usize];
        if h == NONE {
            return None;
        }
        let z: Vec<i64> = (0..self.d)
            .map(|k| self.digit(h as usize)[k] + self.digit(y as usize)[k] + self.digit(a)[k] - self.digit(b)[k])
            .collect();
        Some(self.split(&z))
    }

    /// One step of the addition automaton on `(a, b, c)`.
    pub fn add_step(&self, (x, y): (u32, u32), a: usize, b: usize, c: usize) -> Option<(u32, u32)> {
        let h = self.hat[x as usize];
        if h == NONE {
            return None;
        }
        let z: Vec<i64> = (0..self.d)
            .map(|k| {
                self.digit(h as usize)[k] + self.digit(y as usize)[k] + self.digit(a)[k] + self.digit(b)[k]
                    - self.digit(c)[k]
            })
            .collect();
        Some(self.split(&z))
    }

    fn materialize(&self, arity: usize) -> Dfa {
        let n = self.n;
        let alphabet = Alphabet::new(self.sigma.digits().to_vec(), arity).expect("valid alphabet");
        let k = alphabet.len();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::from([((0, 0), 0)]);
        let mut states = vec![(0u32, 0u32)];
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let dead = u32::MAX - 1;
        let mut i = 0;
        while i < states.len() {
            let st = states[i];
            i += 1;
            let mut row = Vec::with_capacity(k);
            for s in 0..k {
                let parts = alphabet.components(s);
                let nxt = if arity == 2 {
                    self.eq_step(st, parts[0], parts[1])
                } else {
                    self.add_step(st, parts[0], parts[1], parts[2])
                };
                row.push(match nxt {
                    None => dead,
                    Some(p) => {
                        let len = states.len() as u32;
                        *ids.entry(p).or_insert_with(|| {
                            states.push(p);
                            len
                        })
                    }
                });
            }
            rows.push(row);
        }
        let dead_id = states.len() as u32;
        let mut trans: Vec<u32> = rows
            .into_iter()
            .flatten()
            .map(|t| if t == dead { dead_id } else { t })
            .collect();
        trans.extend(std::iter::repeat_n(dead_id, k));
        let mut accepting: Vec<bool> = states.iter().map(|&(x, y)| self.accepting_pair(x, y)).collect();
        accepting.push(false);
        let _ = n;
        Dfa::from_parts(alphabet, 0, accepting, trans)
    }

    /// Macro states are sorted lists of `(x, y, q)`.
    fn image_eq(&self, src: &Dfa) -> Dfa {
        let n = self.n;
        let d = self.d;
        let live = src.coaccessible();
        let mut ids: HashMap<Vec<(u32, u32, u32)>, u32> = HashMap::new();
        let start = if live[src.initial()] {
            vec![(0u32, 0u32, src.initial() as u32)]
        } else {
            vec![]
        };
        ids.insert(start.clone(), 0);
        let mut macros = vec![start];
        let mut trans = Vec::new();
        let mut s = vec![0i64; d];
        let mut t = vec![0i64; d];
        let mut z = vec![0i64; d];
        let mut i = 0;
        while i < macros.len() {
            let cur = std::mem::take(&mut macros[i]);
            for b in 0..n {
                let mut next: Vec<(u32, u32, u32)> = Vec::new();
                for &(x, y, q) in &cur {
                    let h = self.hat[x as usize] as usize;
                    for k in 0..d {
                        s[k] = self.digit(h)[k] + self.digit(y as usize)[k];
                        t[k] = self.digit(b)[k] - s[k];
                    }
                    for &a in self.bucket_of(&t) {
                        let q2 = src.next(q as usize, a as usize);
                        if !live[q2] {
                            continue;
                        }
                        for k in 0..d {
                            z[k] = s[k] + self.digit(a as usize)[k] - self.digit(b)[k];
                        }
                        let (x2, y2) = self.split(&z);
                        if self.hat[x2 as usize] == NONE {
                            continue;
                        }
                        next.push((x2, y2, q2 as u32));
                    }
                }
                next.sort_unstable();
                next.dedup();
                let len = macros.len() as u32;
                let id = *ids.entry(next).or_insert_with_key(|key| {
                    macros.push(key.clone());
                    len
                });
                trans.push(id);
            }
            macros[i] = cur;
            i += 1;
        }
        let accepting = macros
            .iter()
            .map(|m| {
                m.iter()
                    .any(|&(x, y, q)| self.accepting_pair(x, y) && src.is_accepting(q as usize))
            })
            .collect();
        Dfa::from_parts(src.alphabet().clone(), 0, accepting, trans)
    }

    /// `{w : exists u in L1, v in L2 of the same length, [u] + [v] = [w]}`.
    fn image_add(&self, d1: &Dfa, d2: &Dfa) -> Dfa {
        let n = self.n;
        let d = self.d;
        let live1 = d1.coaccessible();
        let live2 = d2.coaccessible();
        type Elem = (u32, u32, u32, u32);
        let mut ids: HashMap<Vec<Elem>, u32> = HashMap::new();
        let start = if live1[d1.initial()] && live2[d2.initial()] {
            vec![(0u32, 0u32, d1.initial() as u32, d2.initial() as u32)]
        } else {
            vec![]
        };
        ids.insert(start.clone(), 0);
        let mut macros = vec![start];
        let mut trans = Vec::new();
        let mut s = vec![0i64; d];
        let mut t = vec![0i64; d];
        let mut z = vec![0i64; d];
        let mut i = 0;
        while i < macros.len() {
            let cur = std::mem::take(&mut macros[i]);
            for c in 0..n {
                let mut next: Vec<Elem> = Vec::new();
                for &(x, y, q1, q2) in &cur {
                    let h = self.hat[x as usize] as usize;
                    for a in 0..n {
                        let p1 = d1.next(q1 as usize, a);
                        if !live1[p1] {
                            continue;
                        }
                        for k in 0..d {
                            s[k] = self.digit(h)[k] + self.digit(y as usize)[k] + self.digit(a)[k];
                            t[k] = self.digit(c)[k] - s[k];
                        }
                        for &b in self.bucket_of(&t) {
                            let p2 = d2.next(q2 as usize, b as usize);
                            if !live2[p2] {
                                continue;
                            }
                            for k in 0..d {
                                z[k] = s[k] + self.digit(b as usize)[k] - self.digit(c)[k];
                            }
                            let (x2, y2) = self.split(&z);
                            if self.hat[x2 as usize] == NONE {
                                continue;
                            }
                            next.push((x2, y2, p1 as u32, p2 as u32));
                        }
                    }
                }
                next.sort_unstable();
                next.dedup();
                let len = macros.len() as u32;
                let id = *ids.entry(next).or_insert_with_key(|key| {
                    macros.push(key.clone());
                    len
                });
                trans.push(id);
            }
            macros[i] = cur;
            i += 1;
        }
        let accepting = macros
            .iter()
            .map(|m| {
                m.iter().any(|&(x, y, q1, q2)| {
                    self.accepting_pair(x, y) && d1.is_accepting(q1 as usize) && d2.is_accepting(q2 as usize)
                })
            })
            .collect();
        Dfa::from_parts(d1.alphabet().clone(), 0, accepting, trans)
    }
}

fn digit_alphabet(sigma: &SpanningSet) -> Alphabet {
    Alphabet::new(sigma.digits().to_vec(), 1).expect("nonempty digits")
}

fn check_alphabet(d: &Dfa, sigma: &SpanningSet) -> Result<()> {
    if d.alphabet() != &digit_alphabet(sigma) {
        return Err(Error::AlphabetMismatch);
    }
    Ok(())
}

/// Accepts `(w, u)` of equal length iff `[w] = [u]`.
pub fn equality_automaton(sigma: &SpanningSet) -> Result<Dfa> {
    Ok(Arith::new(sigma)?.materialize(2))
}

/// Accepts `(u, v, w)` of equal length iff `[u] + [v] = [w]`.
pub fn addition_automaton(sigma: &SpanningSet) -> Result<Dfa> {
    Ok(Arith::new(sigma)?.materialize(3))
}

/// Projection onto the last track of `R` restricted to the sources on the
/// other tracks, determinized by the subset construction.
pub fn relational_image(r: &Dfa, sources: &[&Dfa]) -> Result<Dfa> {
    let arity = r.alphabet().arity();
    if arity < 2 || sources.len() != arity - 1 {
        return Err(Error::pre("relation arity must be one more than the number of sources"));
    }
    let base = r.alphabet().with_arity(1)?;
    if sources.iter().any(|s| s.alphabet() != &base) {
        return Err(Error::AlphabetMismatch);
    }
    let n = base.len();
    let lives: Vec<Vec<bool>> = sources.iter().map(|s| s.coaccessible()).collect();
    let r_live = r.coaccessible();
    let mut start_elem = vec![r.initial() as u32];
    start_elem.extend(sources.iter().map(|s| s.initial() as u32));
    let start = vec![start_elem];
    let mut ids: HashMap<Vec<Vec<u32>>, u32> = HashMap::from([(start.clone(), 0)]);
    let mut macros = vec![start];
    let mut trans = Vec::new();
    let inputs = arity - 1;
    let combos = n.pow(inputs as u32);
    let mut i = 0;
    while i < macros.len() {
        let cur = macros[i].clone();
        i += 1;
        for o in 0..n {
            let mut next = Vec::new();
            for elem in &cur {
                'combo: for c in 0..combos {
                    let mut parts = Vec::with_capacity(arity);
                    let mut rest = c;
                    let mut digits = vec![0; inputs];
                    for slot in digits.iter_mut().rev() {
                        *slot = rest % n;
                        rest /= n;
                    }
                    parts.extend(&digits);
                    parts.push(o);
                    let r2 = r.next(elem[0] as usize, r.alphabet().symbol(&parts));
                    if !r_live[r2] {
                        continue;
                    }
                    let mut e = vec![r2 as u32];
                    for (j, s) in sources.iter().enumerate() {
                        let q = s.next(elem[j + 1] as usize, digits[j]);
                        if !lives[j][q] {
                            continue 'combo;
                        }
                        e.push(q as u32);
                    }
                    next.push(e);
                }
            }
            next.sort_unstable();
            next.dedup();
            let len = macros.len() as u32;
            let id = *ids.entry(next).or_insert_with_key(|key| {
                macros.push(key.clone());
                len
            });
            trans.push(id);
        }
    }
    let accepting = macros
        .iter()
        .map(|m| {
            m.iter().any(|e| {
                r.is_accepting(e[0] as usize)
                    && sources.iter().enumerate().all(|(j, s)| s.is_accepting(e[j + 1] as usize))
            })
        })
        .collect();
    Ok(Dfa::from_parts(base, 0, accepting, trans))
}

/// `L 0*`.
pub fn zero_pad_closure(d: &Dfa) -> Dfa {
    let k = d.num_symbols();
    let mut ids: HashMap<(usize, bool), u32> = HashMap::new();
    let start = (d.initial(), d.is_accepting(d.initial()));
    ids.insert(start, 0);
    let mut states = vec![start];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (q, acc) = states[i];
        i += 1;
        for s in 0..k {
            let q2 = d.next(q, s);
            let acc2 = d.is_accepting(q2) || (s == 0 && acc);
            let len = states.len() as u32;
            let id = *ids.entry((q2, acc2)).or_insert_with(|| {
                states.push((q2, acc2));
                len
            });
            trans.push(id);
        }
    }
    let accepting = states.iter().map(|&(_, a)| a).collect();
    Dfa::from_parts(d.alphabet().clone(), 0, accepting, trans)
}

/// Accepts `w` iff some `w 0^i` is accepted.
pub fn quotient_zeros(d: &Dfa) -> Dfa {
    let n = d.num_states();
    let mut acc: Vec<Option<bool>> = vec![None; n];
    for q in 0..n {
        if acc[q].is_some() {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = q;
        let mut on_path = std::collections::HashSet::new();
        let result = loop {
            if let Some(v) = acc[cur] {
                break v;
            }
            if d.is_accepting(cur) {
                break true;
            }
            if !on_path.insert(cur) {
                break false;
            }
            path.push(cur);
            cur = d.next(cur, 0);
        };
        for p in path {
            acc[p] = Some(result);
        }
        acc[q].get_or_insert(result);
    }
    let accepting = acc.into_iter().map(|v| v.unwrap_or(false)).collect();
    let mut out = d.clone();
    out.accepting = accepting;
    out
}

/// Accepts exactly the expansions of the elements `[u]`, `u` in `L(D)`.
pub fn saturate(d: &Dfa, sigma: &SpanningSet) -> Result<Dfa> {
    check_alphabet(d, sigma)?;
    let arith = Arith::new(sigma)?;
    Ok(saturate_with(&arith, d))
}

pub(crate) fn saturate_with(arith: &Arith, d: &Dfa) -> Dfa {
    let padded = zero_pad_closure(&d.minimize());
    let image = arith.image_eq(&padded);
    quotient_zeros(&image).minimize()
}

/// Saturated automaton of `S1 + S2` from saturated inputs.
pub fn sum_image(d1: &Dfa, d2: &Dfa, sigma: &SpanningSet) -> Result<Dfa> {
    check_alphabet(d1, sigma)?;
    check_alphabet(d2, sigma)?;
    let arith = Arith::new(sigma)?;
    Ok(sum_with(&arith, d1, d2))
}

pub(crate) fn sum_with(arith: &Arith, d1: &Dfa, d2: &Dfa) -> Dfa {
    let image = arith.image_add(&d1.minimize(), &d2.minimize());
    quotient_zeros(&image).minimize()
}
