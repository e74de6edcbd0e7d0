//! Exact arithmetic in `Z^d` with an injective endomorphism, plus lattice algebra.
//!
//! Lattices are stored in Hermite normal form (row style, positive pivots,
//! entries above a pivot reduced into `[0, pivot)`), so two lattices are equal
//! iff their bases are equal and `coset_reduce` gives canonical representatives.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(coords: Vec<BigInt>) -> Self {
        GroupElement { coords }
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        GroupElement {
            coords: v.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        GroupElement {
            coords: vec![BigInt::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Sup-norm `max |x_i|`; the height used throughout.
    pub fn sup_norm(&self) -> BigInt {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GroupElement {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Coordinates as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.coords.iter().map(|c| c.to_i64()).collect()
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "group element dimension mismatch");
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        self.check_dim(rhs);
        GroupElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self.check_dim(rhs);
        GroupElement {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        &self + &rhs
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        &self - &rhs
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        -&self
    }
}

/// Integer matrix stored row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

/// An injective endomorphism of `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Endomorphism {
    /// Multiplication by `k` with `|k| >= 2`.
    Scalar { k: BigInt, dim: usize },
    /// A square integer matrix with nonzero determinant.
    Matrix(IntMatrix),
}

impl Endomorphism {
    pub fn scalar(k: i64, dim: usize) -> Result<Self> {
        Self::scalar_big(BigInt::from(k), dim)
    }

    pub fn scalar_big(k: BigInt, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::pre("dimension must be positive"));
        }
        if k.abs() < BigInt::from(2) {
            return Err(Error::NotInjective);
        }
        Ok(Endomorphism::Scalar { k, dim })
    }

    /// Builds a matrix endomorphism; rejects singular or non-square input.
    pub fn matrix(rows: IntMatrix) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::pre("matrix must be square and nonempty"));
        }
        if determinant(&rows).is_zero() {
            return Err(Error::NotInjective);
        }
        Ok(Endomorphism::Matrix(rows))
    }

    pub fn matrix_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::matrix(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            Endomorphism::Scalar { dim, .. } => *dim,
            Endomorphism::Matrix(m) => m.len(),
        }
    }

    pub fn as_matrix(&self) -> IntMatrix {
        match self {
            Endomorphism::Scalar { k, dim } => (0..*dim)
                .map(|i| {
                    (0..*dim)
                        .map(|j| if i == j { k.clone() } else { BigInt::zero() })
                        .collect()
                })
                .collect(),
            Endomorphism::Matrix(m) => m.clone(),
        }
    }

    pub fn det(&self) -> BigInt {
        match self {
            Endomorphism::Scalar { k, dim } => num_traits::pow(k.clone(), *dim),
            Endomorphism::Matrix(m) => determinant(m),
        }
    }

    /// `|Z^d / F(Z^d)|`.
    pub fn index(&self) -> BigInt {
        self.det().abs()
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &GroupElement) -> GroupElement {
        match self {
            Endomorphism::Scalar { k, .. } => x.scale(k),
            Endomorphism::Matrix(m) => GroupElement::new(
                m.iter()
                    .map(|row| row.iter().zip(x.coords()).map(|(a, b)| a * b).sum())
                    .collect(),
            ),
        }
    }

    /// `F^n`.
    pub fn pow(&self, n: u32) -> Endomorphism {
        match self {
            Endomorphism::Scalar { k, dim } => Endomorphism::Scalar {
                k: num_traits::pow(k.clone(), n as usize),
                dim: *dim,
            },
            Endomorphism::Matrix(m) => {
                let d = m.len();
                let mut acc = identity(d);
                for _ in 0..n {
                    acc = mat_mul(&acc, m);
                }
                Endomorphism::Matrix(acc)
            }
        }
    }

    /// Applies `F^n`.
    pub fn apply_pow(&self, x: &GroupElement, n: u32) -> GroupElement {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.apply_unchecked(&y);
        }
        y
    }

    /// The unique `a` with `F a = x`, if it exists.
    pub fn solve(&self, x: &GroupElement) -> Option<GroupElement> {
        match self {
            Endomorphism::Scalar { k, .. } => {
                let mut out = Vec::with_capacity(x.dim());
                for c in x.coords() {
                    let (q, r) = c.div_rem(k);
                    if !r.is_zero() {
                        return None;
                    }
                    out.push(q);
                }
                Some(GroupElement::new(out))
            }
            Endomorphism::Matrix(m) => {
                let sol = solve_rational(m, x.coords())?;
                let mut out = Vec::with_capacity(sol.len());
                for q in sol {
                    if !q.is_integer() {
                        return None;
                    }
                    out.push(q.to_integer());
                }
                Some(GroupElement::new(out))
            }
        }
    }

    /// `F(Z^d)` as a lattice.
    pub fn image_lattice(&self) -> Lattice {
        let m = self.as_matrix();
        let d = m.len();
        let cols: Vec<GroupElement> = (0..d)
            .map(|j| GroupElement::new((0..d).map(|i| m[i][j].clone()).collect()))
            .collect();
        Lattice::new(d, &cols)
    }

    /// True iff `F^delta - 1` is invertible over the rationals.
    pub fn no_unit_eigenvalue(&self, delta: u32) -> bool {
        let mut m = self.pow(delta).as_matrix();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= BigInt::one();
        }
        !determinant(&m).is_zero()
    }

    /// Expansiveness: every eigenvalue has modulus greater than one.
    ///
    /// Decided by looking for `n <= 64` with `||F^{-n}||_inf < 1`, which holds
    /// for some `n` exactly when the spectral radius of `F^{-1}` is below one.
    pub fn is_expansive(&self) -> bool {
        match self {
            Endomorphism::Scalar { k, .. } => k.abs() >= BigInt::from(2),
            Endomorphism::Matrix(m) => {
                let Some(inv) = inverse_rational(m) else {
                    return false;
                };
                let mut p = inv.clone();
                for _ in 0..64 {
                    let norm: BigRational = p
                        .iter()
                        .map(|row| row.iter().map(|v| v.abs()).sum::<BigRational>())
                        .max()
                        .unwrap_or_else(BigRational::zero);
                    if norm < BigRational::one() {
                        return true;
                    }
                    p = rat_mat_mul(&p, &inv);
                }
                false
            }
        }
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endomorphism::Scalar { k, .. } => write!(f, "{k}"),
            Endomorphism::Matrix(m) => {
                write!(f, "[")?;
                for (i, row) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "[")?;
                    for (j, v) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{v}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Evaluates `F x`.
pub fn apply_endo(f: &Endomorphism, x: &GroupElement) -> Result<GroupElement> {
    f.apply(x)
}

/// `[w]_F = x_0 + F x_1 + ... + F^m x_m` for a word of digit indices.
pub fn eval_expansion(digits: &[GroupElement], f: &Endomorphism, word: &[usize]) -> Result<GroupElement> {
    let mut acc = GroupElement::zero(f.dim());
    for &i in word.iter().rev() {
        let d = digits.get(i).ok_or(Error::InvalidDigit(i))?;
        acc = &f.apply_unchecked(&acc) + d;
    }
    Ok(acc)
}

fn identity(d: usize) -> IntMatrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub(crate) fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn rat_mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn to_rat(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect()
}

/// Inverse over the rationals, `None` if singular.
pub fn inverse_rational(m: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a = to_rat(m);
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let pv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &pv;
            inv[c][j] = &inv[c][j] / &pv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[i][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

/// Solves `m a = x` over the rationals.
pub fn solve_rational(m: &IntMatrix, x: &[BigInt]) -> Option<Vec<BigRational>> {
    let inv = inverse_rational(m)?;
    Some(
        inv.iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(a, b)| a * BigRational::from_integer(b.clone()))
                    .sum()
            })
            .collect(),
    )
}

/// A subgroup of `Z^d`, kept in Hermite normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn new(dim: usize, gens: &[GroupElement]) -> Self {
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                assert_eq!(g.dim(), dim, "lattice generator dimension mismatch");
                g.coords().to_vec()
            })
            .collect();
        Lattice {
            dim,
            basis: hnf(rows, dim),
        }
    }

    pub fn trivial(dim: usize) -> Self {
        Lattice { dim, basis: vec![] }
    }

    pub fn full(dim: usize) -> Self {
        Lattice {
            dim,
            basis: identity(dim),
        }
    }

    /// `k Z^d`.
    pub fn scaled(dim: usize, k: i64) -> Self {
        let gens: Vec<GroupElement> = (0..dim)
            .map(|i| {
                let mut v = vec![0i64; dim];
                v[i] = k;
                GroupElement::from_i64s(&v)
            })
            .collect();
        Lattice::new(dim, &gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// HNF basis rows.
    pub fn basis(&self) -> Vec<GroupElement> {
        self.basis.iter().map(|r| GroupElement::new(r.clone())).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim && self.basis.iter().enumerate().all(|(i, r)| r[i].is_one())
    }

    /// Index in `Z^d` for full-rank lattices.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() < self.dim {
            return None;
        }
        Some(
            self.basis
                .iter()
                .enumerate()
                .map(|(i, r)| r[i].clone())
                .product(),
        )
    }

    fn pivot(row: &[BigInt]) -> usize {
        row.iter().position(|v| !v.is_zero()).expect("zero row in HNF")
    }

    /// Canonical representative of `x + N`.
    pub fn coset_reduce(&self, x: &GroupElement) -> GroupElement {
        let mut v = x.coords().to_vec();
        for row in &self.basis {
            let p = Self::pivot(row);
            let q = v[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &q * b;
                }
            }
        }
        GroupElement::new(v)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.coset_reduce(x).is_zero()
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    /// `F(N)`.
    pub fn image(&self, f: &Endomorphism) -> Lattice {
        let gens: Vec<GroupElement> = self.basis().iter().map(|b| f.apply_unchecked(b)).collect();
        Lattice::new(self.dim, &gens)
    }

    /// `F^{-1}(N) = {a : F a in N}`.
    pub fn preimage(&self, f: &Endomorphism) -> Lattice {
        let d = self.dim;
        let m = f.as_matrix();
        let k = self.basis.len();
        // Kernel of (a, n) -> F a - B^T n.
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(d + k);
        for j in 0..d {
            cols.push((0..d).map(|i| m[i][j].clone()).collect());
        }
        for row in &self.basis {
            cols.push(row.iter().map(|v| -v).collect());
        }
        let kernel = integer_kernel(&cols, d);
        let gens: Vec<GroupElement> = kernel
            .into_iter()
            .map(|v| GroupElement::new(v[..d].to_vec()))
            .collect();
        Lattice::new(d, &gens)
    }

    pub fn is_invariant(&self, f: &Endomorphism) -> bool {
        self.image(f).is_subset_of(self)
    }

    /// Representatives of `self / sub` when `sub` has finite index in `self`.
    pub fn coset_reps_of(&self, sub: &Lattice) -> Result<Vec<GroupElement>> {
        if !sub.is_subset_of(self) || sub.rank() != self.rank() {
            return Err(Error::pre("sublattice must have finite index"));
        }
        let basis = self.basis();
        let k = basis.len();
        // Express sub's basis in coordinates of self's basis.
        let coords: Vec<Vec<BigInt>> = sub
            .basis()
            .iter()
            .map(|v| express_in_basis(&self.basis, v.coords()).expect("sub is a sublattice"))
            .collect();
        let h = hnf(coords, k);
        let mut reps = vec![vec![BigInt::zero(); k]];
        for (i, row) in h.iter().enumerate() {
            let piv = &row[i];
            let mut next = Vec::new();
            for r in &reps {
                let mut a = BigInt::zero();
                while &a < piv {
                    let mut v = r.clone();
                    v[i] = a.clone();
                    next.push(v);
                    a += 1;
                }
            }
            reps = next;
        }
        let mut out: Vec<GroupElement> = reps
            .into_iter()
            .map(|c| {
                let mut v = GroupElement::zero(self.dim);
                for (ci, b) in c.iter().zip(&basis) {
                    v = &v + &b.scale(ci);
                }
                sub.coset_reduce(&v)
            })
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Exact membership test.
pub fn lattice_membership(n: &Lattice, x: &GroupElement) -> bool {
    n.contains(x)
}

/// Canonical representative of `x + N`.
pub fn coset_reduce(n: &Lattice, x: &GroupElement) -> GroupElement {
    n.coset_reduce(x)
}

/// `F^{-1}(N)`.
pub fn lattice_preimage(f: &Endomorphism, n: &Lattice) -> Lattice {
    n.preimage(f)
}

/// First `r` with `F^{-r-1}(N) = F^{-r}(N)`, and `N* = F^{-r}(N)`.
pub fn invariant_saturation(f: &Endomorphism, n: &Lattice) -> Result<(usize, Lattice)> {
    if n.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: n.dim(),
        });
    }
    if !n.is_invariant(f) {
        return Err(Error::NotInvariant);
    }
    let mut cur = n.clone();
    let mut r = 0;
    loop {
        let next = cur.preimage(f);
        if next == cur {
            return Ok((r, cur));
        }
        cur = next;
        r += 1;
    }
}

/// Some `y` with `F y - t` in `N`, if one exists.
pub fn solve_congruence(f: &Endomorphism, n: &Lattice, t: &GroupElement) -> Option<GroupElement> {
    let d = f.dim();
    let m = f.as_matrix();
    // Rows (F e_j | e_j) and (b | 0); reduce (t | 0) on the first d columns.
    let mut rows: Vec<Vec<BigInt>> = (0..d)
        .map(|j| {
            let mut r: Vec<BigInt> = (0..d).map(|i| m[i][j].clone()).collect();
            r.extend((0..d).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    for b in n.basis() {
        let mut r = b.coords().to_vec();
        r.extend(std::iter::repeat_n(BigInt::zero(), d));
        rows.push(r);
    }
    let h = hnf(rows, 2 * d);
    let mut rest: Vec<BigInt> = t.coords().to_vec();
    rest.extend(std::iter::repeat_n(BigInt::zero(), d));
    for row in &h {
        let p = Lattice::pivot(row);
        if p >= d {
            break;
        }
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (a, b) in rest.iter_mut().zip(row) {
            *a -= &q * b;
        }
    }
    if rest[..d].iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(GroupElement::new(rest[d..].iter().map(|v| -v).collect()))
}

/// Row-style Hermite normal form; zero rows dropped.
pub(crate) fn hnf(mut rows: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    let mut top = 0;
    for col in 0..dim {
        if top >= rows.len() {
            break;
        }
        loop {
            let best = (top..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(best) = best else { break };
            rows.swap(top, best);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[top][col]);
                let (head, tail) = rows.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[top]) {
                    *a -= &q * b;
                }
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if top < rows.len() && !rows[top][col].is_zero() {
            if rows[top][col].is_negative() {
                for v in rows[top].iter_mut() {
                    *v = -&*v;
                }
            }
            for i in 0..top {
                let q = rows[i][col].div_floor(&rows[top][col]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(top);
                    for (a, b) in head[i].iter_mut().zip(&tail[0]) {
                        *a -= &q * b;
                    }
                }
            }
            top += 1;
        }
    }
    rows.truncate(top);
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    rows
}

/// Integer kernel of the map `x -> sum_j x_j cols[j]` (each column of length `m`).
pub(crate) fn integer_kernel(cols: &[Vec<BigInt>], m: usize) -> Vec<Vec<BigInt>> {
    let n = cols.len();
    // Rows [col_j | e_j]; reduce the first m columns.
    let rows: Vec<Vec<BigInt>> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut r = c.clone();
            r.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let h = hnf(rows, m + n);
    h.into_iter()
        .filter(|r| r[..m].iter().all(Zero::is_zero))
        .map(|r| r[m..].to_vec())
        .collect()
}

fn express_in_basis(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut out = Vec::with_capacity(basis.len());
    for row in basis {
        let p = Lattice::pivot(row);
        let (q, r) = rest[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for (a, b) in rest.iter_mut().zip(row) {
            *a -= &q * b;
        }
        out.push(q);
    }
    if rest.iter().all(Zero::is_zero) {
        Some(out)
    } else {
        None
    }
}

/// Smith invariants `d_1 | d_2 | ...` of the lattice spanned by `gens`.
pub fn smith_invariants(dim: usize, gens: &[GroupElement]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    let rows = m.len();
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(dim) {
        // Find smallest nonzero entry in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t].div_floor(&m[t][t]);
            if !q.is_zero() {
                let (head, tail) = m.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[t]) {
                    *a -= &q * b;
                }
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..dim {
            let q = m[t][j].div_floor(&m[t][t]);
            if !q.is_zero() {
                for row in m.iter_mut() {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility by folding a non-divisible entry into row t.
        let pivot = m[t][t].clone();
        let bad = (t + 1..rows).find(|&i| (t + 1..dim).any(|j| !(&m[i][j] % &pivot).is_zero()));
        if let Some(i) = bad {
            let (head, tail) = m.split_at_mut(i);
            for (a, b) in head[t].iter_mut().zip(&tail[0]) {
                *a += b;
            }
            continue;
        }
        out.push(pivot.abs());
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[i64]) -> GroupElement {
        GroupElement::from_i64s(v)
    }

    #[test]
    fn apply_scalar_and_matrix() {
        let f = Endomorphism::scalar(3, 2).unwrap();
        assert_eq!(f.apply(&g(&[2, -1])).unwrap(), g(&[6, -3]));
        let m = Endomorphism::matrix_i64(&[&[2, 1], &[0, 2]]).unwrap();
        assert_eq!(m.apply(&g(&[1, 1])).unwrap(), g(&[3, 2]));
        assert!(f.apply(&g(&[1])).is_err());
        assert!(Endomorphism::scalar(1, 1).is_err());
        assert!(Endomorphism::matrix_i64(&[&[1, 2], &[2, 4]]).is_err());
    }

    #[test]
    fn expansion_values() {
        let f = Endomorphism::scalar(10, 1).unwrap();
        let digits = vec![g(&[0]), g(&[1]), g(&[2]), g(&[3])];
        assert_eq!(eval_expansion(&digits, &f, &[3, 2, 1]).unwrap(), g(&[123]));
        assert_eq!(eval_expansion(&digits, &f, &[]).unwrap(), g(&[0]));
        assert!(eval_expansion(&digits, &f, &[7]).is_err());
    }

    #[test]
    fn membership_and_cosets() {
        let n = Lattice::new(1, &[g(&[3])]);
        assert!(n.contains(&g(&[6])));
        assert_eq!(n.coset_reduce(&g(&[7])), n.coset_reduce(&g(&[1])));
        assert_eq!(n.coset_reduce(&g(&[-2])), g(&[1]));
        let n2 = Lattice::new(2, &[g(&[2, 0]), g(&[0, 2])]);
        assert!(!n2.contains(&g(&[1, 1])));
        assert_eq!(n2, Lattice::scaled(2, 2));
    }

    #[test]
    fn preimages() {
        let two = Endomorphism::scalar(2, 1).unwrap();
        assert_eq!(Lattice::new(1, &[g(&[6])]).preimage(&two), Lattice::new(1, &[g(&[3])]));
        assert_eq!(Lattice::new(1, &[g(&[3])]).preimage(&two), Lattice::new(1, &[g(&[3])]));
        let m = Endomorphism::matrix_i64(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(Lattice::full(2).preimage(&m), Lattice::full(2));
    }

    #[test]
    fn saturation_chain() {
        let two = Endomorphism::scalar(2, 1).unwrap();
        let (r, n) = invariant_saturation(&two, &Lattice::new(1, &[g(&[12])])).unwrap();
        assert_eq!((r, n), (2, Lattice::new(1, &[g(&[3])])));
        let (r, _) = invariant_saturation(&two, &Lattice::new(1, &[g(&[3])])).unwrap();
        assert_eq!(r, 0);
        let four = Endomorphism::scalar(4, 1).unwrap();
        assert_eq!(invariant_saturation(&four, &Lattice::full(1)).unwrap(), (0, Lattice::full(1)));
        let m = Endomorphism::matrix_i64(&[&[0, 1], &[2, 0]]).unwrap();
        let n = Lattice::new(2, &[g(&[1, 0])]);
        assert_eq!(invariant_saturation(&m, &n), Err(Error::NotInvariant));
    }

    #[test]
    fn coset_reps_count() {
        let n = Lattice::new(1, &[g(&[3])]);
        let sub = Lattice::new(1, &[g(&[12])]);
        let reps = n.coset_reps_of(&sub).unwrap();
        assert_eq!(reps, vec![g(&[0]), g(&[3]), g(&[6]), g(&[9])]);
        let full = Lattice::full(2);
        let m = Endomorphism::matrix_i64(&[&[2, 1], &[0, 2]]).unwrap();
        assert_eq!(full.coset_reps_of(&full.image(&m)).unwrap().len(), 4);
    }

    #[test]
    fn smith_of_diagonalish() {
        let s = smith_invariants(2, &[g(&[2, 4]), g(&[6, 8])]);
        assert_eq!(s, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(smith_invariants(1, &[g(&[4]), g(&[6])]), vec![BigInt::from(2)]);
    }

    #[test]
    fn expansiveness() {
        assert!(Endomorphism::matrix_i64(&[&[2, 1], &[0, 2]]).unwrap().is_expansive());
        assert!(Endomorphism::matrix_i64(&[&[0, -2], &[2, 0]]).unwrap().is_expansive());
        assert!(!Endomorphism::matrix_i64(&[&[1, 1], &[0, 2]]).unwrap().is_expansive());
        assert!(!Endomorphism::matrix_i64(&[&[2, 1], &[1, 1]]).unwrap().is_expansive());
    }

    #[test]
    fn congruences() {
        let f = Endomorphism::scalar(4, 1).unwrap();
        let n = Lattice::scaled(1, 3);
        for t in -10..10 {
            let y = solve_congruence(&f, &n, &GroupElement::from_i64s(&[t])).unwrap();
            assert!(n.contains(&(f.apply(&y).unwrap() - GroupElement::from_i64s(&[t]))));
        }
        let two = Endomorphism::scalar(2, 1).unwrap();
        assert!(solve_congruence(&two, &Lattice::scaled(1, 4), &GroupElement::from_i64s(&[1])).is_none());
        let m = Endomorphism::matrix_i64(&[&[2, 1], &[0, 2]]).unwrap();
        let n = Lattice::new(2, &[GroupElement::from_i64s(&[3, 0]), GroupElement::from_i64s(&[0, 6])]);
        let t = GroupElement::from_i64s(&[5, -8]);
        assert!(solve_congruence(&m, &n, &GroupElement::from_i64s(&[5, -7])).is_none());
        let y = solve_congruence(&m, &n, &t).unwrap();
        assert!(n.contains(&(m.apply(&y).unwrap() - t)));
        let triv = Lattice::trivial(2);
        assert!(solve_congruence(&m, &triv, &GroupElement::from_i64s(&[1, 1])).is_none());
        assert_eq!(
            solve_congruence(&m, &triv, &GroupElement::from_i64s(&[3, 2])),
            Some(GroupElement::from_i64s(&[1, 1]))
        );
    }

    #[test]
    fn solve_inverts() {
        let m = Endomorphism::matrix_i64(&[&[2, 1], &[0, 2]]).unwrap();
        assert_eq!(m.solve(&g(&[3, 2])), Some(g(&[1, 1])));
        assert_eq!(m.solve(&g(&[1, 0])), None);
    }
}
