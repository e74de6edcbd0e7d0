//! `F_{p^s}` with log tables, and dense polynomials over it.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// `F_p[x] / (m(x))`, where by default `m` is the first monic polynomial of
/// degree `s` (coefficients read as base-`p` digits, lowest first) whose root
/// `x` generates the multiplicative group. An element is the integer
/// `c_0 + c_1 p + ... + c_{s-1} p^{s-1}` of its coefficient vector.
#[derive(Clone)]
pub struct Field {
    p: u32,
    s: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.s, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    pub fn new(p: u64, s: u32) -> Result<Self> {
        Self::check(p, s)?;
        let q = p.pow(s);
        for k in 0..q {
            let mut m: Vec<u32> = digits(k as u32, p as u32, s);
            m.push(1);
            if let Some(f) = Self::try_modulus(p as u32, s, m) {
                return Ok(f);
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    /// With an explicit monic modulus (lowest coefficient first) whose root
    /// must be primitive.
    pub fn with_modulus(p: u64, modulus: Vec<u32>) -> Result<Self> {
        let s = modulus.len().saturating_sub(1) as u32;
        Self::check(p, s)?;
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c as u64 >= p) {
            return Err(Error::pre("modulus must be monic with coefficients below p"));
        }
        Self::try_modulus(p as u32, s, modulus).ok_or_else(|| Error::pre("modulus root is not primitive"))
    }

    fn check(p: u64, s: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::pre(format!("{p} is not prime")));
        }
        if s == 0 || p.checked_pow(s).is_none_or(|q| q > MAX_FIELD_SIZE) {
            return Err(Error::pre(format!("field size p^s must be at most {MAX_FIELD_SIZE}")));
        }
        Ok(())
    }

    fn try_modulus(p: u32, s: u32, modulus: Vec<u32>) -> Option<Self> {
        let q = p.pow(s);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        // Powers of the generator: x mod m for s > 1, a primitive root for s = 1.
        let gen = if s == 1 {
            (1..p).find(|&g| {
                let mut x = 1u64;
                (1..p - 1).all(|_| {
                    x = x * g as u64 % p as u64;
                    x != 1
                })
            })?
        } else {
            p
        };
        let mut cur = 1u32;
        for i in 0..q - 1 {
            if log[cur as usize] != u32::MAX {
                return None;
            }
            log[cur as usize] = i;
            exp.push(cur);
            cur = if s == 1 {
                (cur as u64 * gen as u64 % p as u64) as u32
            } else {
                times_x(cur, p, s, &modulus)
            };
        }
        (cur == 1).then_some(Field { p, s, q, modulus, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Result<u32> {
        if c.len() > self.s as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::Malformed(format!("not an element of F_{}^{}: {c:?}", self.p, self.s)));
        }
        Ok(c.iter().rev().fold(0, |acc, &x| acc * self.p + x))
    }

    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.s)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.s == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.s == 1 {
            return (self.p - a) % self.p;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn pow(&self, a: u32, n: u64) -> u32 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u128 * n as u128) % (self.q as u128 - 1);
        self.exp[l as usize]
    }

    /// The unique `b` with `b^p = a`.
    pub fn frobenius_inv(&self, a: u32) -> u32 {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// The image of an integer.
    pub fn int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

fn digits(mut a: u32, p: u32, s: u32) -> Vec<u32> {
    (0..s)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn times_x(a: u32, p: u32, s: u32, m: &[u32]) -> u32 {
    let mut c = digits(a, p, s);
    c.insert(0, 0);
    let top = c.pop().expect("s >= 1 coefficients");
    for (i, ci) in c.iter_mut().enumerate() {
        *ci = (*ci + (p - top) * m[i]) % p;
    }
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Dense polynomial, lowest coefficient first, no trailing zeros.
pub type Poly = Vec<u32>;

pub fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn poly_add(f: &Field, a: &[u32], b: &[u32]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect();
    trim(&mut out);
    out
}

pub fn poly_neg(f: &Field, a: &[u32]) -> Poly {
    a.iter().map(|&x| f.neg(x)).collect()
}

pub fn poly_scale(f: &Field, a: &[u32], c: u32) -> Poly {
    let mut out: Poly = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut out);
    out
}

pub fn poly_mul(f: &Field, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
pub fn poly_divrem(f: &Field, a: &[u32], b: &[u32]) -> (Poly, Poly) {
    let lead_inv = f.inv(*b.last().expect("nonzero divisor")).expect("nonzero leading coefficient");
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![0u32; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = f.mul(*r.last().expect("nonempty"), lead_inv);
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Monic gcd.
pub fn poly_gcd(f: &Field, a: &[u32], b: &[u32]) -> Poly {
    let mut a: Poly = a.to_vec();
    let mut b: Poly = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = poly_divrem(f, &a, &b);
        a = b;
        b = r;
    }
    make_monic(f, &a).0
}

/// `(a / lc(a), lc(a))`; zero stays zero with factor 1.
pub fn make_monic(f: &Field, a: &[u32]) -> (Poly, u32) {
    match a.last() {
        None => (vec![], 1),
        Some(&lc) => (poly_scale(f, a, f.inv(lc).expect("nonzero")), lc),
    }
}

pub fn poly_eval(f: &Field, a: &[u32], x: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f4 = Field::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        for a in f4.elements() {
            assert_eq!(f4.pow(f4.frobenius_inv(a), 2), a);
            if a != 0 {
                assert_eq!(f4.mul(a, f4.inv(a).unwrap()), 1);
            }
        }
        let f7 = Field::new(7, 1).unwrap();
        assert_eq!(f7.mul(3, 5), 1);
        assert_eq!(f7.add(3, 5), 1);
        let f27 = Field::new(3, 3).unwrap();
        for a in f27.elements() {
            for b in f27.elements() {
                assert_eq!(f27.mul(a, b), f27.mul(b, a));
                assert_eq!(f27.sub(f27.add(a, b), b), a);
            }
        }
        assert!(Field::new(4, 1).is_err());
        assert!(Field::with_modulus(2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn polynomials() {
        let f = Field::new(2, 1).unwrap();
        let a = vec![1, 1];
        let sq = poly_mul(&f, &a, &a);
        assert_eq!(sq, vec![1, 0, 1]);
        let (q, r) = poly_divrem(&f, &sq, &a);
        assert_eq!((q, r), (vec![1, 1], vec![]));
        assert_eq!(poly_gcd(&f, &sq, &[1, 0, 0, 1]), vec![1, 1]);
    }
}
