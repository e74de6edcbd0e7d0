//! Rewriting `C(gamma; delta)` as a finite union of translates of cycles with
//! step `r delta`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::{solve_rational, Endomorphism, GroupElement, IntMatrix};

/// `{singleton} ∪ (translate + C(cycle))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclePiece {
    pub singleton: Option<GroupElement>,
    pub translate: GroupElement,
    pub cycle: (GroupElement, u32),
}

fn apply_rat(m: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                .sum()
        })
        .collect()
}

fn integral(v: &[BigRational]) -> Result<GroupElement> {
    if v.iter().any(|x| !x.is_integer()) {
        return Err(Error::pre("non-integral cycle parameter"));
    }
    Ok(GroupElement::new(v.iter().map(|x| x.to_integer()).collect()))
}

/// `beta` with `F^delta beta - beta = gamma`, over the rationals.
pub fn cycle_beta(f: &Endomorphism, gamma: &GroupElement, delta: u32) -> Result<Vec<BigRational>> {
    let mut a = f.pow(delta).as_matrix();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= BigInt::one();
    }
    solve_rational(&a, gamma.coords()).ok_or(Error::EigenvalueOne(delta))
}

/// For `m = 0..r`: the point `-beta + F^{(m+1)delta} beta` and the cycle
/// `C(F^{(r+m+1)delta} beta - F^{(m+1)delta} beta; r delta)` translated by it.
pub fn cycle_to_power(f: &Endomorphism, gamma: &GroupElement, delta: u32, r: u32) -> Result<Vec<CyclePiece>> {
    if gamma.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: gamma.dim(),
        });
    }
    if delta == 0 || r == 0 {
        return Err(Error::pre("delta and r must be positive"));
    }
    let beta = cycle_beta(f, gamma, delta)?;
    if r == 1 {
        return Ok(vec![CyclePiece {
            singleton: None,
            translate: GroupElement::zero(f.dim()),
            cycle: (gamma.clone(), delta),
        }]);
    }
    let step = f.pow(delta).as_matrix();
    let big = f.pow(r * delta).as_matrix();
    let mut cur = apply_rat(&step, &beta);
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        let t: Vec<BigRational> = cur.iter().zip(&beta).map(|(a, b)| a - b).collect();
        let far = apply_rat(&big, &cur);
        let g: Vec<BigRational> = far.iter().zip(&cur).map(|(a, b)| a - b).collect();
        let t = integral(&t)?;
        out.push(CyclePiece {
            singleton: Some(t.clone()),
            translate: t,
            cycle: (integral(&g)?, r * delta),
        });
        cur = apply_rat(&step, &cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: i64) -> GroupElement {
        GroupElement::from_i64s(&[v])
    }

    #[test]
    fn two_to_four() {
        let f = Endomorphism::scalar(2, 1).unwrap();
        let p = cycle_to_power(&f, &g(1), 1, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].translate.clone(), p[0].cycle.clone()), (g(1), (g(6), 2)));
        assert_eq!((p[1].translate.clone(), p[1].cycle.clone()), (g(3), (g(12), 2)));
        assert_eq!(p[0].singleton, Some(g(1)));
    }

    #[test]
    fn identity_and_errors() {
        let f = Endomorphism::scalar(4, 1).unwrap();
        let p = cycle_to_power(&f, &g(3), 1, 1).unwrap();
        assert_eq!(p, vec![CyclePiece { singleton: None, translate: g(0), cycle: (g(3), 1) }]);
        let rot = Endomorphism::matrix_i64(&[&[0, -1], &[1, 0]]).unwrap();
        let e = cycle_to_power(&rot, &GroupElement::from_i64s(&[1, 0]), 4, 2);
        assert_eq!(e, Err(Error::EigenvalueOne(4)));
    }
}
