use super::*;
use crate::spanning::{default_spanning, expand_greedy, sigma_power, SpanningSet};

fn g(v: i64) -> GroupElement {
    GroupElement::from_i64s(&[v])
}

fn sig() -> SpanningSet {
    default_spanning(4, 1).unwrap()
}

fn w(s: &SpanningSet, ds: &[i64]) -> Vec<usize> {
    ds.iter().map(|&d| s.index_of(&g(d)).unwrap()).collect()
}

fn alpha(s: &SpanningSet) -> Alphabet {
    Alphabet::new(s.digits().to_vec(), 1).unwrap()
}

fn all_words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    out
}

#[test]
fn equality_examples() {
    let s = sig();
    let eq = equality_automaton(&s).unwrap();
    let a2 = eq.alphabet().clone();
    let pair = |x: &[i64], y: &[i64]| a2.zip(&[&w(&s, x), &w(&s, y)]).unwrap();
    assert!(eq.accepts(&pair(&[3, 1], &[-1, 2])).unwrap());
    assert!(eq.accepts(&pair(&[0, 0], &[0, 0])).unwrap());
    assert!(!eq.accepts(&pair(&[1], &[2])).unwrap());
}

#[test]
fn equality_exhaustive_short() {
    let s = sig();
    let eq = equality_automaton(&s).unwrap();
    for len in 0..=3 {
        let words = all_words(7, len);
        for u in &words {
            for v in &words {
                let sym = eq.alphabet().zip(&[u, v]).unwrap();
                assert_eq!(eq.accepts(&sym).unwrap(), s.eval(u).unwrap() == s.eval(v).unwrap());
            }
        }
    }
}

#[test]
fn addition_examples() {
    let s = sig();
    let add = addition_automaton(&s).unwrap();
    let a3 = add.alphabet().clone();
    let t = |x: &[i64], y: &[i64], z: &[i64]| a3.zip(&[&w(&s, x), &w(&s, y), &w(&s, z)]).unwrap();
    assert!(add.accepts(&t(&[1], &[2], &[3])).unwrap());
    assert!(!add.accepts(&t(&[3], &[3], &[2])).unwrap());
    assert!(add.accepts(&t(&[3, 0], &[3, 0], &[2, 1])).unwrap());
    assert!(add.accepts(&t(&[0], &[0], &[0])).unwrap());
}

#[test]
fn combinators() {
    let s = sig();
    let a = alpha(&s);
    let three = saturate(&Dfa::literal(a.clone(), &w(&s, &[3])).unwrap(), &s).unwrap();
    let five = saturate(&Dfa::literal(a.clone(), &w(&s, &[1, 1])).unwrap(), &s).unwrap();
    let u = three.union(&five).unwrap();
    for x in [3, 5] {
        assert!(contains(&u, &s, &g(x)).unwrap());
    }
    assert!(!contains(&u, &s, &g(4)).unwrap());
    assert!(u.complement().complement().equivalent(&u).unwrap());
    let p = u.intersection(&u).unwrap().minimize();
    assert_eq!(p, u.minimize());
    assert!(u.minimize().minimize() == u.minimize());
    let other = Dfa::empty(Alphabet::plain(2));
    assert_eq!(u.union(&other), Err(Error::AlphabetMismatch));
}

#[test]
fn kernel_trivial() {
    struct Const(bool);
    impl KernelOracle for Const {
        type State = ();
        fn initial(&self) {}
        fn step(&self, _: &(), _: usize) {}
        fn accepting(&self, _: &()) -> bool {
            self.0
        }
    }
    let a = alpha(&sig());
    let e = dfa_from_kernel(&Const(false), a.clone(), 10).unwrap().dfa;
    assert_eq!(e.num_states(), 1);
    assert!(e.is_empty_language());
    let u = dfa_from_kernel(&Const(true), a, 10).unwrap().dfa;
    assert_eq!(u.num_states(), 1);
    assert!(u.is_accepting(0));

    struct Counter;
    impl KernelOracle for Counter {
        type State = u64;
        fn initial(&self) -> u64 {
            0
        }
        fn step(&self, s: &u64, d: usize) -> u64 {
            s * 7 + d as u64 + 1
        }
        fn accepting(&self, _: &u64) -> bool {
            false
        }
    }
    let r = dfa_from_kernel(&Counter, alpha(&sig()), 100);
    assert!(matches!(r, Err(Error::CapExceeded { .. })));
}

#[test]
fn saturate_literal() {
    let s = sig();
    let lit = Dfa::literal(alpha(&s), &w(&s, &[3, 1])).unwrap();
    let sat = saturate(&lit, &s).unwrap();
    assert!(sat.accepts(&w(&s, &[-1, 2])).unwrap());
    assert!(sat.accepts(&w(&s, &[3, 1, 0])).unwrap());
    for len in 0..=5 {
        for u in all_words(7, len) {
            assert_eq!(sat.accepts(&u).unwrap(), s.eval(&u).unwrap() == g(7), "{u:?}");
        }
    }
    assert!(saturate(&sat, &s).unwrap().equivalent(&sat).unwrap());
    let empty = saturate(&Dfa::empty(alpha(&s)), &s).unwrap();
    assert!(empty.is_empty_language());
}

#[test]
fn fast_and_generic_images_agree() {
    let s = sig();
    let a = alpha(&s);
    let lit = zero_pad_closure(&Dfa::literal(a.clone(), &w(&s, &[3, 1])).unwrap());
    let eq = equality_automaton(&s).unwrap();
    let generic = quotient_zeros(&relational_image(&eq, &[&lit]).unwrap()).minimize();
    assert!(generic.equivalent(&saturate(&lit, &s).unwrap()).unwrap());

    let x = saturate(&Dfa::literal(a.clone(), &w(&s, &[2])).unwrap(), &s).unwrap();
    let y = saturate(&Dfa::literal(a.clone(), &w(&s, &[-3, 1])).unwrap(), &s).unwrap();
    let add = addition_automaton(&s).unwrap();
    let generic = quotient_zeros(&relational_image(&add, &[&x, &y]).unwrap()).minimize();
    let fast = sum_image(&x, &y, &s).unwrap();
    assert!(generic.equivalent(&fast).unwrap());
    assert!(contains(&fast, &s, &g(3)).unwrap());
    assert_eq!(enumerate_elements(&fast, &s, 4).unwrap(), [g(3)].into());
}

#[test]
fn image_of_empty_source() {
    let s = sig();
    let eq = equality_automaton(&s).unwrap();
    let img = relational_image(&eq, &[&Dfa::empty(alpha(&s))]).unwrap();
    assert!(img.is_empty_language());
}

#[test]
fn zero_quotient_and_closure() {
    let a = Alphabet::plain(2);
    let l = Dfa::literal(a.clone(), &[1, 0]).unwrap().union(&Dfa::literal(a.clone(), &[1, 0, 0]).unwrap()).unwrap();
    let q = quotient_zeros(&l);
    assert!(q.accepts(&[1]).unwrap());
    let closed = zero_pad_closure(&Dfa::literal(a.clone(), &[1]).unwrap());
    assert!(quotient_zeros(&closed).equivalent(&closed).unwrap());
    let orig = Dfa::literal(a, &[1, 1]).unwrap();
    let round = quotient_zeros(&zero_pad_closure(&orig));
    assert!(orig.difference(&round).unwrap().is_empty_language());
}

#[test]
fn rebase_singleton() {
    let s = sig();
    let sat = saturate(&Dfa::literal(alpha(&s), &w(&s, &[3, 1])).unwrap(), &s).unwrap();
    let theta = sigma_power(&s, 2).unwrap();
    let r = rebase(&sat, &s, &theta).unwrap();
    assert!(r.accepts(&[theta.index_of(&g(7)).unwrap()]).unwrap());
    for x in -300..=300 {
        let word = expand_greedy(&theta, &g(x)).unwrap();
        assert_eq!(r.accepts(&word).unwrap(), x == 7);
    }
    let e = rebase(&Dfa::empty(alpha(&s)), &s, &theta).unwrap();
    assert!(e.is_empty_language());
}

#[test]
fn enumeration() {
    let s = sig();
    let a = alpha(&s);
    let eps = Dfa::literal(a.clone(), &[]).unwrap();
    assert_eq!(enumerate_elements(&eps, &s, 0).unwrap(), [g(0)].into());
    assert!(enumerate_elements(&Dfa::empty(a), &s, 3).unwrap().is_empty());
}

#[test]
fn json_round_trip() {
    let s = sig();
    let sat = saturate(&Dfa::literal(alpha(&s), &w(&s, &[3, 1])).unwrap(), &s).unwrap();
    let back = Dfa::from_json(&sat.to_json()).unwrap();
    assert_eq!(back, sat);
    assert!(sat.to_dot().starts_with("digraph"));
    let bad = serde_json::json!({"alphabet": [[0]], "arity": 1, "initial": 3, "accepting": [], "transitions": [[0]]});
    assert!(Dfa::from_json(&bad).is_err());
}
