use std::sync::Arc;

use proptest::prelude::*;

use fauto::automata::{addition_automaton, contains, Alphabet, Dfa};
use fauto::fset::{compile_fset, FSetExpr};
use fauto::sml::{Field, PerfectClosureElem};
use fauto::spanning::{default_spanning, expand_greedy};
use fauto::{GroupElement, SpanningSet};

fn four() -> SpanningSet {
    default_spanning(4, 1).unwrap()
}

fn field(p: u64, s: u32) -> Arc<Field> {
    Arc::new(Field::new(p, s).unwrap())
}

fn elem(f: &Arc<Field>, level: u32, num: Vec<u32>, den: Vec<u32>) -> PerfectClosureElem {
    let q = f.size();
    let num = num.into_iter().map(|c| c % q).collect();
    let mut den: Vec<u32> = den.into_iter().map(|c| c % q).collect();
    if den.iter().all(|&c| c == 0) {
        den = vec![1];
    }
    PerfectClosureElem::new(f, level, num, den).unwrap()
}

fn pce_args() -> impl Strategy<Value = ((u64, u32), u32, Vec<u32>, Vec<u32>)> {
    (
        prop_oneof![Just((2, 1)), Just((3, 1)), Just((2, 2)), Just((5, 1))],
        0u32..4,
        prop::collection::vec(0u32..25, 0..5),
        prop::collection::vec(0u32..25, 1..4),
    )
}

fn expr_text() -> impl Strategy<Value = String> {
    let term = (-30i64..30, prop::collection::vec((1i64..4, 1u32..3), 0..3), prop::bool::ANY, 2i64..7).prop_map(
        |(p, cycles, neg, m)| {
            let sign = if neg { -1 } else { 1 };
            let mut parts = vec![p.to_string()];
            parts.extend(cycles.iter().map(|(g, d)| format!("C({};{d})", g * sign)));
            if m == 6 {
                parts.push("H[3]".into());
            }
            parts.join("+")
        },
    );
    prop::collection::vec(term, 1..3).prop_map(|ts| ts.join(" | "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pth_root_inverts_frobenius((ps, level, num, den) in pce_args()) {
        let f = field(ps.0, ps.1);
        let x = elem(&f, level, num, den);
        let r = x.pth_root();
        prop_assert_eq!(r.pow(ps.0 as i64).unwrap(), x.clone());
        prop_assert_eq!(x.pow(ps.0 as i64).unwrap().pth_root(), x);
    }

    #[test]
    fn closure_field_laws(
        (ps, l1, n1, d1) in pce_args(),
        (l2, n2, d2) in (0u32..4, prop::collection::vec(0u32..25, 0..4), prop::collection::vec(0u32..25, 1..3)),
    ) {
        let f = field(ps.0, ps.1);
        let a = elem(&f, l1, n1, d1);
        let b = elem(&f, l2, n2, d2);
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        if let Some(bi) = b.inv() {
            prop_assert_eq!(a.mul(&b).mul(&bi), a.clone());
        }
        let json = a.to_json();
        prop_assert_eq!(PerfectClosureElem::from_json(&f, &json).unwrap(), a);
    }

    #[test]
    fn greedy_expansion_evaluates_back(x in -1_000_000i64..1_000_000) {
        let s = four();
        let g = GroupElement::from_i64s(&[x]);
        let w = expand_greedy(&s, &g).unwrap();
        prop_assert_eq!(s.eval(&w).unwrap(), g);
    }

    /// A compiled F-set accepts either every expansion of `x` or none.
    #[test]
    fn compiled_sets_are_saturated(text in expr_text(), words in prop::collection::vec(prop::collection::vec(0usize..7, 0..9), 16)) {
        let s = four();
        let d = compile_fset(&FSetExpr::parse(&text).unwrap(), &s).unwrap();
        for w in words {
            let x = s.eval(&w).unwrap();
            prop_assert_eq!(d.accepts(&w).unwrap(), contains(&d, &s, &x).unwrap(), "{} {:?}", text, w);
        }
    }

    #[test]
    fn expressions_print_and_parse_back(text in expr_text()) {
        let e = FSetExpr::parse(&text).unwrap();
        prop_assert_eq!(FSetExpr::parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn addition_reads_sums(
        a in prop::collection::vec(0usize..7, 0..6),
        b in prop::collection::vec(0usize..7, 0..6),
        c in prop::collection::vec(0usize..7, 0..7),
    ) {
        let s = four();
        let add = addition_automaton(&s).unwrap();
        let n = a.len().max(b.len()).max(c.len());
        let pad = |w: &[usize]| {
            let zero = s.index_of(&GroupElement::from_i64s(&[0])).unwrap();
            let mut w = w.to_vec();
            w.resize(n, zero);
            w
        };
        let (pa, pb, pc) = (pad(&a), pad(&b), pad(&c));
        let word: Vec<usize> = (0..n).map(|i| add.alphabet().symbol(&[pa[i], pb[i], pc[i]])).collect();
        let sum = &s.eval(&a).unwrap() + &s.eval(&b).unwrap();
        prop_assert_eq!(add.accepts(&word).unwrap(), sum == s.eval(&c).unwrap());
    }

    #[test]
    fn dfa_json_round_trip(k in 1usize..4, n in 1usize..6, seed in prop::collection::vec(0u32..100, 24), acc in prop::collection::vec(prop::bool::ANY, 6)) {
        let trans: Vec<u32> = seed.iter().take(n * k).map(|t| t % n as u32).collect();
        let d = Dfa::new(Alphabet::plain(k), 0, acc[..n].to_vec(), trans).unwrap();
        let back = Dfa::from_json(&d.to_json()).unwrap();
        prop_assert!(back.equivalent(&d).unwrap());
        prop_assert!(d.reverse().reverse().equivalent(&d.minimize()).unwrap());
    }
}
