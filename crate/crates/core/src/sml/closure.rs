//! Rational functions in `u = t^{1/p^e}` over `F_{p^s}`: elements of the
//! perfect closure of `F_{p^s}(t)`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::field::{make_monic, poly_add, poly_divrem, poly_gcd, poly_mul, poly_neg, trim, Field, Poly};

/// Kept in lowest terms, with monic denominator and the least level `e`.
#[derive(Clone)]
pub struct PerfectClosureElem {
    field: Arc<Field>,
    level: u32,
    num: Poly,
    den: Poly,
}

impl PartialEq for PerfectClosureElem {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.num == other.num && self.den == other.den
    }
}

impl Eq for PerfectClosureElem {}

impl Hash for PerfectClosureElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.level.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

/// Substitute `u -> u^k`.
fn inflate(a: &[u32], k: usize) -> Poly {
    if a.is_empty() || k == 1 {
        return a.to_vec();
    }
    let mut out = vec![0; (a.len() - 1) * k + 1];
    for (i, &c) in a.iter().enumerate() {
        out[i * k] = c;
    }
    out
}

fn all_exponents_divisible(a: &[u32], p: usize) -> bool {
    a.iter().enumerate().all(|(i, &c)| c == 0 || i % p == 0)
}

fn deflate(a: &[u32], p: usize) -> Poly {
    a.iter().step_by(p).copied().collect()
}

impl PerfectClosureElem {
    /// `num(u) / den(u)` at level `e`, normalized.
    pub fn new(field: &Arc<Field>, level: u32, num: Poly, den: Poly) -> Result<Self> {
        let q = field.size();
        if num.iter().chain(&den).any(|&c| c >= q) {
            return Err(Error::Malformed("coefficient outside the field".into()));
        }
        let mut den = den;
        trim(&mut den);
        if den.is_empty() {
            return Err(Error::pre("zero denominator"));
        }
        if level > 16 {
            return Err(Error::Malformed("level too large".into()));
        }
        Ok(Self::normalized(field.clone(), level, num, den))
    }

    fn normalized(field: Arc<Field>, mut level: u32, mut num: Poly, mut den: Poly) -> Self {
        trim(&mut num);
        trim(&mut den);
        if num.is_empty() {
            return PerfectClosureElem {
                field,
                level: 0,
                num: vec![],
                den: vec![1],
            };
        }
        let g = poly_gcd(&field, &num, &den);
        if g.len() > 1 {
            num = poly_divrem(&field, &num, &g).0;
            den = poly_divrem(&field, &den, &g).0;
        }
        let (d, lc) = make_monic(&field, &den);
        den = d;
        let inv = field.inv(lc).expect("nonzero");
        num = num.iter().map(|&c| field.mul(c, inv)).collect();
        let p = field.p() as usize;
        while level > 0 && all_exponents_divisible(&num, p) && all_exponents_divisible(&den, p) {
            num = deflate(&num, p);
            den = deflate(&den, p);
            level -= 1;
        }
        PerfectClosureElem { field, level, num, den }
    }

    pub fn zero(field: &Arc<Field>) -> Self {
        Self::constant(field, 0)
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &Arc<Field>, c: u32) -> Self {
        Self::normalized(field.clone(), 0, vec![c], vec![1])
    }

    /// `t`.
    pub fn t(field: &Arc<Field>) -> Self {
        Self::normalized(field.clone(), 0, vec![0, 1], vec![1])
    }

    /// A polynomial in `t`.
    pub fn poly(field: &Arc<Field>, coeffs: &[u32]) -> Self {
        Self::normalized(field.clone(), 0, coeffs.to_vec(), vec![1])
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn num(&self) -> &[u32] {
        &self.num
    }

    pub fn den(&self) -> &[u32] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num == [1] && self.den == [1]
    }

    /// Numerator and denominator as polynomials in `t^{1/p^level}`;
    /// `level` must be at least `self.level()`.
    pub fn at_level(&self, level: u32) -> (Poly, Poly) {
        self.lifted(level)
    }

    fn lifted(&self, level: u32) -> (Poly, Poly) {
        let k = (self.field.p() as usize).pow(level - self.level);
        (inflate(&self.num, k), inflate(&self.den, k))
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "elements of different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let f = &self.field;
        let e = self.level.max(other.level);
        let (a, b) = self.lifted(e);
        let (c, d) = other.lifted(e);
        if b == d {
            return Self::normalized(f.clone(), e, poly_add(f, &a, &c), b);
        }
        let num = poly_add(f, &poly_mul(f, &a, &d), &poly_mul(f, &c, &b));
        Self::normalized(f.clone(), e, num, poly_mul(f, &b, &d))
    }

    pub fn neg(&self) -> Self {
        PerfectClosureElem {
            field: self.field.clone(),
            level: self.level,
            num: poly_neg(&self.field, &self.num),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let e = self.level.max(other.level);
        let (a, b) = self.lifted(e);
        let (c, d) = other.lifted(e);
        Self::normalized(f.clone(), e, poly_mul(f, &a, &c), poly_mul(f, &b, &d))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalized(self.field.clone(), self.level, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.inv()?))
    }

    /// Integer powers; negative exponents invert.
    pub fn pow(&self, n: i64) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }

    /// The `y` with `y^p = self`: coefficients go through the inverse
    /// Frobenius and the level goes up by one (then back down if possible).
    pub fn pth_root(&self) -> Self {
        let f = &self.field;
        let num = self.num.iter().map(|&c| f.frobenius_inv(c)).collect();
        let den = self.den.iter().map(|&c| f.frobenius_inv(c)).collect();
        Self::normalized(f.clone(), self.level + 1, num, den)
    }

    /// `{"num": [[c...], ...], "den": [[c...], ...], "level": e}`.
    pub fn to_json(&self) -> Value {
        let coeffs = |a: &[u32]| a.iter().map(|&c| json!(self.field.coeffs(c))).collect::<Vec<_>>();
        json!({"num": coeffs(&self.num), "den": coeffs(&self.den), "level": self.level})
    }

    /// Coefficients may be vectors over `F_p` or, for `s = 1`, plain integers.
    pub fn from_json(field: &Arc<Field>, v: &Value) -> Result<Self> {
        let coeff = |c: &Value| -> Result<u32> {
            match c {
                Value::Array(xs) => {
                    let xs = xs
                        .iter()
                        .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()))
                        .collect::<Option<Vec<u32>>>()
                        .ok_or_else(|| Error::Malformed("coefficient vector entries must be small integers".into()))?;
                    field.from_coeffs(&xs)
                }
                other => {
                    let x = other
                        .as_i64()
                        .ok_or_else(|| Error::Malformed("coefficient must be an integer or a vector".into()))?;
                    if field.s() != 1 {
                        return Err(Error::Malformed("integer coefficients need s = 1".into()));
                    }
                    Ok(field.int(x))
                }
            }
        };
        let poly = |name: &str, default: Option<Poly>| -> Result<Poly> {
            match v.get(name) {
                None => default.ok_or_else(|| Error::Malformed(format!("missing field {name:?}"))),
                Some(Value::Array(cs)) => {
                    if cs.len() > 1 << 16 {
                        return Err(Error::Malformed("polynomial too long".into()));
                    }
                    cs.iter().map(coeff).collect()
                }
                Some(_) => Err(Error::Malformed(format!("field {name:?} must be an array"))),
            }
        };
        let level = match v.get("level") {
            None => 0,
            Some(l) => l
                .as_u64()
                .and_then(|l| u32::try_from(l).ok())
                .ok_or_else(|| Error::Malformed("level must be a nonnegative integer".into()))?,
        };
        Self::new(field, level, poly("num", None)?, poly("den", Some(vec![1]))?)
    }
}

fn poly_str(f: &Field, a: &[u32], var: &str) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let coef = |c: u32| {
        if f.s() == 1 {
            c.to_string()
        } else {
            format!("<{}>", f.coeffs(c).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
    };
    let mut parts = Vec::new();
    for (i, &c) in a.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => coef(c),
            (1, _) => mono,
            _ => format!("{}{}", coef(c), mono),
        });
    }
    parts.join("+")
}

impl fmt::Display for PerfectClosureElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.level == 0 {
            "t".to_string()
        } else {
            format!("t^(1/{})", (self.field.p() as u64).pow(self.level))
        };
        let n = poly_str(&self.field, &self.num, &var);
        if self.den == [1] {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({})", poly_str(&self.field, &self.den, &var))
        }
    }
}

impl fmt::Debug for PerfectClosureElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let t = PerfectClosureElem::t(&f);
        let t2 = t.mul(&t);
        assert_eq!(t2.pth_root(), t);
        let one_t2 = PerfectClosureElem::poly(&f, &[1, 0, 1]);
        assert_eq!(one_t2.pth_root(), PerfectClosureElem::poly(&f, &[1, 1]));
        let r = t.pth_root();
        assert_eq!(r.level(), 1);
        assert_eq!(r.pow(2).unwrap(), t);
        let x = PerfectClosureElem::new(&f, 2, vec![1, 1, 0, 1], vec![0, 1, 1]).unwrap();
        assert_eq!(x.pth_root().pow(2).unwrap(), x);
    }

    #[test]
    fn arithmetic() {
        let f = Arc::new(Field::new(3, 2).unwrap());
        let t = PerfectClosureElem::t(&f);
        let a = PerfectClosureElem::poly(&f, &[1, 2]);
        let q = a.div(&t).unwrap();
        assert_eq!(q.mul(&t), a);
        assert_eq!(q.sub(&q), PerfectClosureElem::zero(&f));
        assert_eq!(a.pow(-2).unwrap().mul(&a.pow(2).unwrap()), PerfectClosureElem::one(&f));
        let j = q.to_json();
        assert_eq!(PerfectClosureElem::from_json(&f, &j).unwrap(), q);
        let mixed = t.pth_root().add(&t);
        assert_eq!(mixed.level(), 1);
        assert_eq!(mixed.sub(&t), t.pth_root());
    }
}
