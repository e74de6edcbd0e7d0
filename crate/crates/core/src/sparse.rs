//! Sparse regular languages: growth counts, the single-cycle condition on
//! strongly connected components, and decomposition into finite unions of
//! `v_1 w_1* v_2 w_2* ... v_{k+1}`.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigUint;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde_json::{json, Value};

use crate::automata::{Alphabet, Block, Dfa, Nfa};
use crate::error::{Error, Result};
use crate::json::array_field;

/// `f_L(0..=n)`: the number of accepted words of length at most `i`.
pub fn growth_count(d: &Dfa, n: usize) -> Vec<BigUint> {
    let mut at: Vec<BigUint> = vec![BigUint::zero(); d.num_states()];
    at[d.initial()] = BigUint::from(1u32);
    let mut total = BigUint::zero();
    let mut out = Vec::with_capacity(n + 1);
    for len in 0..=n {
        for (q, c) in at.iter().enumerate() {
            if d.is_accepting(q) {
                total += c;
            }
        }
        out.push(total.clone());
        if len == n {
            break;
        }
        let mut next = vec![BigUint::zero(); d.num_states()];
        for (q, c) in at.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &t in d.row(q) {
                next[t as usize] += c;
            }
        }
        at = next;
    }
    out
}

/// `u {a, b}* v` inside the language, with `|a| = |b|` and `a != b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub u: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub v: Vec<usize>,
}

impl Witness {
    /// Every `u x v` with `x` in `{a, b}^{<= 4}` is accepted.
    pub fn validate(&self, d: &Dfa) -> bool {
        if self.a.is_empty() || self.a.len() != self.b.len() || self.a == self.b {
            return false;
        }
        let mut mids: Vec<Vec<usize>> = vec![vec![]];
        let mut frontier = mids.clone();
        for _ in 0..4 {
            let mut next = Vec::new();
            for m in &frontier {
                for piece in [&self.a, &self.b] {
                    let mut x = m.clone();
                    x.extend(piece);
                    next.push(x);
                }
            }
            mids.extend(next.iter().cloned());
            frontier = next;
        }
        mids.iter().all(|m| {
            let w: Vec<usize> = self.u.iter().chain(m).chain(&self.v).copied().collect();
            d.accepts(&w).unwrap_or(false)
        })
    }

    pub fn to_json(&self) -> Value {
        json!({"u": self.u, "a": self.a, "b": self.b, "v": self.v})
    }
}

/// A finite union of star expressions over alphabet indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub pieces: Vec<Vec<Block>>,
}

impl Decomposition {
    pub fn to_dfa(&self, alphabet: &Alphabet) -> Result<Dfa> {
        Ok(Nfa::from_pieces(&self.pieces).determinize(alphabet.clone())?.minimize())
    }

    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|p| {
                let blocks: Vec<Value> = p
                    .iter()
                    .map(|b| match b {
                        Block::Word(v) => json!({"v": v}),
                        Block::Star(w) => json!({"wStar": w}),
                    })
                    .collect();
                json!({"blocks": blocks})
            })
            .collect();
        json!({"pieces": pieces})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let word = |x: &Value| -> Result<Vec<usize>> {
            x.as_array()
                .ok_or_else(|| Error::Malformed("block word must be an array".into()))?
                .iter()
                .map(|s| {
                    s.as_u64()
                        .map(|s| s as usize)
                        .ok_or_else(|| Error::Malformed("symbol must be a nonnegative integer".into()))
                })
                .collect()
        };
        let mut pieces = Vec::new();
        for p in array_field(v, "pieces")? {
            let mut blocks = Vec::new();
            for b in array_field(p, "blocks")? {
                match (b.get("v"), b.get("wStar")) {
                    (Some(x), None) => blocks.push(Block::Word(word(x)?)),
                    (None, Some(x)) => {
                        let w = word(x)?;
                        if w.is_empty() {
                            return Err(Error::Malformed("starred word must be non-empty".into()));
                        }
                        blocks.push(Block::Star(w))
                    }
                    _ => return Err(Error::Malformed("block needs exactly one of v, wStar".into())),
                }
            }
            pieces.push(blocks);
        }
        Ok(Decomposition { pieces })
    }
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let word = |w: &[usize]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".");
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| {
                if p.is_empty() {
                    return "ε".to_string();
                }
                p.iter()
                    .map(|b| match b {
                        Block::Word(v) => word(v),
                        Block::Star(w) => format!("({})*", word(w)),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Largest number of starred blocks in a piece: `f_L(n) = O(n^d)`.
pub fn degree_bound(dec: &Decomposition) -> usize {
    dec.pieces
        .iter()
        .map(|p| p.iter().filter(|b| matches!(b, Block::Star(_))).count())
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseCertificate {
    pub sparse: bool,
    pub decomposition: Option<Decomposition>,
    pub degree: Option<usize>,
    pub witness: Option<Witness>,
}

impl SparseCertificate {
    /// A decomposition must re-compile to `d`; a witness must validate.
    pub fn validate(&self, d: &Dfa) -> Result<bool> {
        if let Some(dec) = &self.decomposition {
            if !dec.to_dfa(d.alphabet())?.equivalent(d)? {
                return Ok(false);
            }
            if self.degree.is_some_and(|k| k != degree_bound(dec)) {
                return Ok(false);
            }
        }
        if let Some(w) = &self.witness {
            if !w.validate(d) {
                return Ok(false);
            }
        }
        Ok(self.sparse == self.witness.is_none())
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"sparse": self.sparse});
        if let Some(dec) = &self.decomposition {
            v["decomposition"] = dec.to_json();
        }
        if let Some(k) = self.degree {
            v["degree"] = json!(k);
        }
        if let Some(w) = &self.witness {
            v["witness"] = w.to_json();
        }
        v
    }
}

/// States reachable from `init` and co-reachable to an accepting state,
/// never passing through `removed`.
struct View<'a> {
    d: &'a Dfa,
    removed: &'a [bool],
    init: usize,
    accepting: &'a [bool],
}

impl View<'_> {
    fn succ(&self, q: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.d
            .row(q)
            .iter()
            .enumerate()
            .map(|(s, &t)| (s, t as usize))
            .filter(|&(_, t)| !self.removed[t])
    }

    fn useful(&self) -> Vec<bool> {
        let n = self.d.num_states();
        let mut reach = vec![false; n];
        if self.removed[self.init] {
            return reach;
        }
        reach[self.init] = true;
        let mut stack = vec![self.init];
        while let Some(q) = stack.pop() {
            for (_, t) in self.succ(q) {
                if !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut co: Vec<bool> = (0..n).map(|q| self.accepting[q] && reach[q]).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if reach[q] && !co[q] && self.succ(q).any(|(_, t)| co[t]) {
                    co[q] = true;
                    changed = true;
                }
            }
        }
        co
    }

    /// Shortest word from `from` to a state satisfying `goal`, within `allowed`.
    fn path(&self, from: usize, allowed: &[bool], goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let n = self.d.num_states();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            if goal(q) {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = prev[cur] {
                    w.push(s);
                    cur = p;
                }
                w.reverse();
                return Some(w);
            }
            for (s, t) in self.succ(q) {
                if allowed[t] && !seen[t] {
                    seen[t] = true;
                    prev[t] = Some((q, s));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Strongly connected components of the useful part.
    fn components(&self, useful: &[bool]) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..self.d.num_states()).map(|q| g.add_node(q)).collect();
        for q in (0..self.d.num_states()).filter(|&q| useful[q]) {
            for (_, t) in self.succ(q) {
                if useful[t] {
                    g.add_edge(nodes[q], nodes[t], ());
                }
            }
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| c.into_iter().map(|n| g[n]).filter(|&q| useful[q]).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect()
    }

    /// Symbols leading from `q` back into `class`.
    fn internal(&self, q: usize, class: &[bool]) -> Vec<(usize, usize)> {
        self.succ(q).filter(|&(_, t)| class[t]).collect()
    }
}

/// A state on a useful component with two internal edges gives two distinct
/// first-return words `w`, `w'`; the witness is `(u, w^|w'|, w'^|w|, v)`.
fn find_witness(view: &View<'_>) -> Option<Witness> {
    let n = view.d.num_states();
    let useful = view.useful();
    for comp in view.components(&useful) {
        let mut class = vec![false; n];
        for &q in &comp {
            class[q] = true;
        }
        for &q in &comp {
            let inner = view.internal(q, &class);
            if inner.len() < 2 {
                continue;
            }
            let back = |(s, t): (usize, usize)| -> Vec<usize> {
                let mut w = vec![s];
                w.extend(view.path(t, &class, |x| x == q).expect("strongly connected"));
                w
            };
            let w1 = back(inner[0]);
            let w2 = back(inner[1]);
            let all = vec![true; n];
            let u = view.path(view.init, &all, |x| x == q).expect("useful state is reachable");
            let v = view.path(q, &all, |x| view.accepting[x]).expect("useful state is co-reachable");
            return Some(Witness {
                u,
                a: w1.repeat(w2.len()),
                b: w2.repeat(w1.len()),
                v,
            });
        }
    }
    None
}

/// Sparseness by the single-cycle condition on useful components, with a
/// `u {a, b}* v` witness on failure.
pub fn is_sparse(d: &Dfa) -> SparseCertificate {
    let removed = vec![false; d.num_states()];
    let accepting: Vec<bool> = (0..d.num_states()).map(|q| d.is_accepting(q)).collect();
    let view = View {
        d,
        removed: &removed,
        init: d.initial(),
        accepting: &accepting,
    };
    let witness = find_witness(&view);
    SparseCertificate {
        sparse: witness.is_none(),
        decomposition: None,
        degree: None,
        witness,
    }
}

/// Verdict, and the decomposition with its degree when sparse.
pub fn certify(d: &Dfa) -> Result<SparseCertificate> {
    let mut cert = is_sparse(d);
    if cert.sparse {
        let dec = decompose_sparse(d)?;
        cert.degree = Some(degree_bound(&dec));
        cert.decomposition = Some(dec);
    }
    Ok(cert)
}

fn push_word(piece: &mut Vec<Block>, w: &[usize]) {
    if w.is_empty() {
        return;
    }
    if let Some(Block::Word(last)) = piece.last_mut() {
        last.extend_from_slice(w);
    } else {
        piece.push(Block::Word(w.to_vec()));
    }
}

fn concat(a: &[Block], b: &[Block]) -> Vec<Block> {
    let mut out = a.to_vec();
    for blk in b {
        match blk {
            Block::Word(w) => push_word(&mut out, w),
            Block::Star(w) => out.push(Block::Star(w.clone())),
        }
    }
    out
}

/// Induction on the number of useful states. Pick the class `[q]` of the
/// useful state found last by breadth-first search; `L'` avoids `[q]` and is
/// handled on the automaton with `[q]` excised; `L''` is the union of
/// `A a (s_i .. s_{i-1})* u_ij b B` over entries into and exits from `[q]`,
/// where the prefix sets `A` and suffix sets `B` recurse on excised automata.
fn decompose_rec(view: &View<'_>) -> Result<Vec<Vec<Block>>> {
    let n = view.d.num_states();
    let useful = view.useful();
    if !useful.iter().any(|&u| u) {
        return Ok(vec![]);
    }
    let mut order = vec![view.init];
    let mut seen = vec![false; n];
    seen[view.init] = true;
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        i += 1;
        for (_, t) in view.succ(q) {
            if useful[t] && !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
    }
    let q = *order.last().expect("initial state is useful");
    let comp = view
        .components(&useful)
        .into_iter()
        .find(|c| c.contains(&q))
        .expect("every useful state lies in a component");
    let mut class = vec![false; n];
    for &x in &comp {
        class[x] = true;
    }

    // The cycle q_1 = q, q_{i+1} = delta(q_i, s_i), if the class is not trivial.
    let mut cycle: Vec<(usize, usize)> = Vec::new();
    let first = view.internal(q, &class);
    if !first.is_empty() {
        let mut cur = q;
        loop {
            let inner = view.internal(cur, &class);
            if inner.len() != 1 {
                return Err(Error::pre("language is not sparse"));
            }
            let (s, t) = inner[0];
            cycle.push((cur, s));
            cur = t;
            if cur == q {
                break;
            }
        }
        if cycle.len() != comp.len() {
            return Err(Error::pre("language is not sparse"));
        }
    } else {
        cycle.push((q, usize::MAX));
    }
    let d_len = cycle.len();
    let trivial = first.is_empty();
    let pos = |x: usize| cycle.iter().position(|&(c, _)| c == x).expect("state of the class");
    let loop_from = |i: usize| -> Vec<usize> { (0..d_len).map(|k| cycle[(i + k) % d_len].1).collect() };
    let path_between = |i: usize, j: usize| -> Vec<usize> {
        let steps = (j + d_len - i) % d_len;
        (0..steps).map(|k| cycle[(i + k) % d_len].1).collect()
    };

    let mut removed = view.removed.to_vec();
    for &x in &comp {
        removed[x] = true;
    }

    // L'
    let mut pieces = decompose_rec(&View {
        d: view.d,
        removed: &removed,
        init: view.init,
        accepting: view.accepting,
    })?;

    // Entries: (index in the cycle, prefix pieces ending with the entering letter).
    let mut entries: Vec<(usize, Vec<Vec<Block>>)> = Vec::new();
    if class[view.init] {
        entries.push((pos(view.init), vec![vec![]]));
    }
    for r in 0..n {
        if removed[r] || class[r] {
            continue;
        }
        for (a, t) in view.succ(r) {
            if !class[t] {
                continue;
            }
            let mut only_r = vec![false; n];
            only_r[r] = true;
            let prefixes = decompose_rec(&View {
                d: view.d,
                removed: &removed,
                init: view.init,
                accepting: &only_r,
            })?;
            if prefixes.is_empty() {
                continue;
            }
            let with_a = prefixes.iter().map(|p| concat(p, &[Block::Word(vec![a])])).collect();
            entries.push((pos(t), with_a));
        }
    }

    // Exits: (index in the cycle, suffix pieces starting with the leaving letter).
    let mut exits: Vec<(usize, Vec<Vec<Block>>)> = Vec::new();
    for (j, &(qj, _)) in cycle.iter().enumerate() {
        if view.accepting[qj] {
            exits.push((j, vec![vec![]]));
        }
        for (b, s) in view.succ(qj) {
            if class[s] {
                continue;
            }
            let suffixes = decompose_rec(&View {
                d: view.d,
                removed: &removed,
                init: s,
                accepting: view.accepting,
            })?;
            if suffixes.is_empty() {
                continue;
            }
            exits.push((j, suffixes.iter().map(|p| concat(&[Block::Word(vec![b])], p)).collect()));
        }
    }

    for (i, pre) in &entries {
        for (j, post) in &exits {
            let mut middle = Vec::new();
            if !trivial {
                middle.push(Block::Star(loop_from(*i)));
                push_word(&mut middle, &path_between(*i, *j));
            }
            for p in pre {
                let head = concat(p, &middle);
                for s in post {
                    pieces.push(concat(&head, s));
                }
            }
        }
    }
    Ok(pieces)
}

/// Decomposition of a sparse language into star expressions.
pub fn decompose_sparse(d: &Dfa) -> Result<Decomposition> {
    if !is_sparse(d).sparse {
        return Err(Error::pre("language is not sparse"));
    }
    let removed = vec![false; d.num_states()];
    let accepting: Vec<bool> = (0..d.num_states()).map(|q| d.is_accepting(q)).collect();
    let mut pieces = decompose_rec(&View {
        d,
        removed: &removed,
        init: d.initial(),
        accepting: &accepting,
    })?;
    let mut seen = BTreeSet::new();
    pieces.retain(|p| seen.insert(format!("{p:?}")));
    Ok(Decomposition { pieces })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(k: usize, pieces: &[Vec<Block>]) -> Dfa {
        Nfa::from_pieces(pieces).determinize(Alphabet::plain(k)).unwrap().minimize()
    }

    #[test]
    fn growth_examples() {
        let all = Dfa::universal(Alphabet::plain(7));
        let g = growth_count(&all, 2);
        assert_eq!(g, vec![1u32.into(), 8u32.into(), 57u32.into()]);
        let e = Dfa::empty(Alphabet::plain(2));
        assert!(growth_count(&e, 5).iter().all(|x| x.is_zero()));
        let d = lit(2, &[vec![Block::Star(vec![1, 0]), Block::Word(vec![1])]]);
        let g = growth_count(&d, 20);
        for i in 1..g.len() {
            assert!(&g[i] - &g[i - 1] <= 1u32.into());
        }
    }

    #[test]
    fn verdicts() {
        let chain = lit(4, &[vec![Block::Word(vec![3]), Block::Star(vec![3]), Block::Star(vec![2])]]);
        let c = certify(&chain).unwrap();
        assert!(c.sparse);
        assert_eq!(c.degree, Some(2));
        assert!(c.validate(&chain).unwrap());

        let all = Dfa::universal(Alphabet::plain(2));
        let c = is_sparse(&all);
        assert_eq!(c.witness, Some(Witness { u: vec![], a: vec![0], b: vec![1], v: vec![] }));
        assert!(c.validate(&all).unwrap());
        assert!(decompose_sparse(&all).is_err());

        let e = Dfa::empty(Alphabet::plain(2));
        let c = certify(&e).unwrap();
        assert!(c.sparse);
        assert_eq!(c.decomposition.unwrap().pieces.len(), 0);
    }

    #[test]
    fn decompositions() {
        let d = lit(2, &[vec![Block::Star(vec![1, 0]), Block::Word(vec![1])]]);
        let dec = decompose_sparse(&d).unwrap();
        assert_eq!(dec.pieces, vec![vec![Block::Star(vec![1, 0]), Block::Word(vec![1])]]);
        assert_eq!(degree_bound(&dec), 1);

        let single = Dfa::literal(Alphabet::plain(2), &[1, 0, 1]).unwrap().minimize();
        let dec = decompose_sparse(&single).unwrap();
        assert_eq!(dec.pieces, vec![vec![Block::Word(vec![1, 0, 1])]]);
        assert_eq!(degree_bound(&dec), 0);

        let j = dec.to_json();
        assert_eq!(Decomposition::from_json(&j).unwrap(), dec);
        assert!(Decomposition::from_json(&json!({"pieces": [{"blocks": [{"wStar": []}]}]})).is_err());
    }
}
