//! Sequences over `F_{p^s}(t)` and its perfect closure: closed forms
//! `a_n = sum b_i alpha_i^n` and linear recurrences.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::closure::PerfectClosureElem as Pce;
use super::field::{poly_eval, Field};

/// Largest index reached by direct iteration.
pub const ITERATION_BUDGET: u64 = 1 << 20;

/// `a_n = sum_i b_i alpha_i^n` with every `b_i` nonzero and the `alpha_i`
/// nonzero and pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormSequence {
    field: Arc<Field>,
    b: Vec<Pce>,
    alpha: Vec<Pce>,
}

fn same_field(field: &Arc<Field>, xs: &[Pce]) -> Result<()> {
    if xs.iter().any(|x| x.field() != field) {
        return Err(Error::pre("all elements must lie over one field"));
    }
    Ok(())
}

impl ClosedFormSequence {
    pub fn new(field: &Arc<Field>, b: Vec<Pce>, alpha: Vec<Pce>) -> Result<Self> {
        if b.len() != alpha.len() {
            return Err(Error::pre("b and alpha must have the same length"));
        }
        if b.is_empty() {
            return Err(Error::pre("a closed form needs at least one term"));
        }
        same_field(field, &b)?;
        same_field(field, &alpha)?;
        if b.iter().any(Pce::is_zero) {
            return Err(Error::pre("coefficients b_i must be nonzero"));
        }
        if alpha.iter().any(Pce::is_zero) {
            return Err(Error::pre("bases alpha_i must be nonzero"));
        }
        for i in 0..alpha.len() {
            if alpha[i + 1..].contains(&alpha[i]) {
                return Err(Error::pre("bases alpha_i must be pairwise distinct"));
            }
        }
        Ok(ClosedFormSequence {
            field: field.clone(),
            b,
            alpha,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn b(&self) -> &[Pce] {
        &self.b
    }

    pub fn alpha(&self) -> &[Pce] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// `a_n`, for any integer `n`.
    pub fn eval(&self, n: i64) -> Pce {
        self.b
            .iter()
            .zip(&self.alpha)
            .fold(Pce::zero(&self.field), |acc, (b, a)| acc.add(&b.mul(&a.pow(n).expect("nonzero base"))))
    }

    /// `a_0, ..., a_{n_max}` by repeated multiplication.
    pub fn values(&self, n_max: u64) -> Result<Vec<Pce>> {
        if n_max > ITERATION_BUDGET {
            return Err(Error::cap("sequence iteration", ITERATION_BUDGET as usize));
        }
        let mut cur = self.b.clone();
        let mut out = Vec::with_capacity(n_max as usize + 1);
        for _ in 0..=n_max {
            out.push(cur.iter().fold(Pce::zero(&self.field), |acc, x| acc.add(x)));
            for (c, a) in cur.iter_mut().zip(&self.alpha) {
                *c = c.mul(a);
            }
        }
        Ok(out)
    }

    /// `n -> a_{-n}`: the same coefficients with inverted bases.
    pub fn inverted(&self) -> Self {
        ClosedFormSequence {
            field: self.field.clone(),
            b: self.b.clone(),
            alpha: self.alpha.iter().map(|a| a.inv().expect("nonzero base")).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "b": self.b.iter().map(Pce::to_json).collect::<Vec<_>>(),
            "alpha": self.alpha.iter().map(Pce::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &Arc<Field>, v: &Value) -> Result<Self> {
        Self::new(field, elems(field, v, "b")?, elems(field, v, "alpha")?)
    }
}

fn elems(field: &Arc<Field>, v: &Value, name: &str) -> Result<Vec<Pce>> {
    let xs = v
        .get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed(format!("field {name:?} must be an array")))?;
    if xs.len() > 64 {
        return Err(Error::Malformed(format!("field {name:?} is too long")));
    }
    xs.iter().map(|x| Pce::from_json(field, x)).collect()
}

/// `a_{n+d} = c_{d-1} a_{n+d-1} + ... + c_0 a_n` with given `a_0..a_{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    field: Arc<Field>,
    c: Vec<Pce>,
    init: Vec<Pce>,
}

impl LinearRecurrence {
    pub fn new(field: &Arc<Field>, c: Vec<Pce>, init: Vec<Pce>) -> Result<Self> {
        if c.is_empty() || c.len() != init.len() {
            return Err(Error::pre("need d >= 1 coefficients and d initial values"));
        }
        same_field(field, &c)?;
        same_field(field, &init)?;
        Ok(LinearRecurrence {
            field: field.clone(),
            c,
            init,
        })
    }

    /// The recurrence with characteristic polynomial `prod (x - alpha_i)` and
    /// the first `mu` values of the closed form.
    pub fn from_closed_form(seq: &ClosedFormSequence) -> Self {
        let f = &seq.field;
        // prod (x - alpha_i), lowest coefficient first.
        let mut chi = vec![Pce::one(f)];
        for a in &seq.alpha {
            let mut next = vec![Pce::zero(f); chi.len() + 1];
            for (i, x) in chi.iter().enumerate() {
                next[i + 1] = next[i + 1].add(x);
                next[i] = next[i].sub(&x.mul(a));
            }
            chi = next;
        }
        let d = seq.len();
        let c = chi[..d].iter().map(Pce::neg).collect();
        let init = seq.values(d as u64 - 1).expect("small");
        LinearRecurrence {
            field: f.clone(),
            c,
            init,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coefficients(&self) -> &[Pce] {
        &self.c
    }

    pub fn initial(&self) -> &[Pce] {
        &self.init
    }

    /// `a_0, ..., a_{n_max}`.
    pub fn values(&self, n_max: u64) -> Result<Vec<Pce>> {
        if n_max > ITERATION_BUDGET {
            return Err(Error::cap("sequence iteration", ITERATION_BUDGET as usize));
        }
        let d = self.order();
        let mut out: Vec<Pce> = self.init.clone();
        while out.len() <= n_max as usize {
            let n = out.len() - d;
            let next = (0..d).fold(Pce::zero(&self.field), |acc, k| acc.add(&self.c[k].mul(&out[n + k])));
            out.push(next);
        }
        out.truncate(n_max as usize + 1);
        Ok(out)
    }

    /// `a_{-1}, ..., a_{-m_max}` by running the recurrence backwards.
    pub fn values_backward(&self, m_max: u64) -> Result<Vec<Pce>> {
        if m_max > ITERATION_BUDGET {
            return Err(Error::cap("sequence iteration", ITERATION_BUDGET as usize));
        }
        let c0_inv = self.c[0].inv().ok_or_else(|| Error::pre("c_0 = 0: the recurrence cannot run backwards"))?;
        let d = self.order();
        // window[k] = a_{n+k}; produce a_{n-1}.
        let mut window: Vec<Pce> = self.init.clone();
        let mut out = Vec::with_capacity(m_max as usize);
        for _ in 0..m_max {
            let mut rest = window[d - 1].clone();
            if d > 1 {
                // a_{n-1+d} = window[d-1]
                rest = (1..d).fold(rest, |acc, k| acc.sub(&self.c[k].mul(&window[k - 1])));
            }
            let prev = rest.mul(&c0_inv);
            window.pop();
            window.insert(0, prev.clone());
            out.push(prev);
        }
        Ok(out)
    }

    /// `a_n` by iteration in either direction.
    pub fn eval(&self, n: i64) -> Result<Pce> {
        if n >= 0 {
            Ok(self.values(n as u64)?.swap_remove(n as usize))
        } else {
            Ok(self.values_backward(n.unsigned_abs())?.pop().expect("m >= 1"))
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": self.c.iter().map(Pce::to_json).collect::<Vec<_>>(),
            "init": self.init.iter().map(Pce::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &Arc<Field>, v: &Value) -> Result<Self> {
        Self::new(field, elems(field, v, "c")?, elems(field, v, "init")?)
    }
}

/// `true` when the element is a constant of `F_{p^s}`.
fn as_constant(x: &Pce) -> Option<u32> {
    (x.level() == 0 && x.den() == [1] && x.num().len() <= 1).then(|| x.num().first().copied().unwrap_or(0))
}

/// Largest extension degree tried when factoring over a finite field.
const MAX_SPLITTING_DEGREE: u32 = 8;

/// For a recurrence whose coefficients and initial values are constants of
/// `F_p` (so `s = 1`), find a splitting field `F_{p^s'}` in which the
/// characteristic polynomial has distinct roots, and solve for the closed form
/// there. Returns the closed form over the new field.
pub fn closed_form_from_recurrence(rec: &LinearRecurrence) -> Result<ClosedFormSequence> {
    if rec.field.s() != 1 {
        return Err(Error::pre("the factoring helper needs coefficients in F_p (s = 1)"));
    }
    let consts = |xs: &[Pce]| -> Result<Vec<u32>> {
        xs.iter()
            .map(|x| as_constant(x).ok_or_else(|| Error::pre("the factoring helper needs constant coefficients")))
            .collect()
    };
    let c = consts(&rec.c)?;
    let init = consts(&rec.init)?;
    if c[0] == 0 {
        return Err(Error::pre("c_0 = 0"));
    }
    let p = rec.field.p() as u64;
    let d = c.len();
    for s in 1..=MAX_SPLITTING_DEGREE {
        if p.checked_pow(s).is_none_or(|q| q > super::field::MAX_FIELD_SIZE) {
            break;
        }
        let f = Field::new(p, s)?;
        // chi(x) = x^d - c_{d-1} x^{d-1} - ... - c_0; constants of F_p embed as themselves.
        let mut chi: Vec<u32> = c.iter().map(|&x| f.neg(x)).collect();
        chi.push(1);
        let roots: Vec<u32> = f.elements().filter(|&x| x != 0 && poly_eval(&f, &chi, x) == 0).collect();
        if roots.len() != d {
            continue;
        }
        let b = vandermonde_solve(&f, &roots, &init).ok_or_else(|| Error::pre("singular Vandermonde system"))?;
        let f = Arc::new(f);
        let (b, alpha): (Vec<Pce>, Vec<Pce>) = b
            .iter()
            .zip(&roots)
            .filter(|(&bi, _)| bi != 0)
            .map(|(&bi, &r)| (Pce::constant(&f, bi), Pce::constant(&f, r)))
            .unzip();
        if b.is_empty() {
            return Err(Error::pre("the zero sequence has no closed form with nonzero coefficients"));
        }
        return ClosedFormSequence::new(&f, b, alpha);
    }
    Err(Error::pre(format!(
        "characteristic polynomial does not split with distinct roots over F_{p}^s for s <= {MAX_SPLITTING_DEGREE}"
    )))
}

/// Solve `sum_i b_i r_i^n = v_n` for `n < d` by Gaussian elimination.
fn vandermonde_solve(f: &Field, roots: &[u32], v: &[u32]) -> Option<Vec<u32>> {
    let d = roots.len();
    let mut m: Vec<Vec<u32>> = (0..d)
        .map(|n| {
            let mut row: Vec<u32> = roots.iter().map(|&r| f.pow(r, n as u64)).collect();
            row.push(v[n]);
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = f.inv(m[col][col])?;
        for x in m[col].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..d {
            if r != col && m[r][col] != 0 {
                let k = m[r][col];
                for j in 0..=d {
                    m[r][j] = f.sub(m[r][j], f.mul(k, m[col][j]));
                }
            }
        }
    }
    Some(m.iter().map(|row| row[d]).collect())
}

/// A parsed sequence document: a field with a closed form, a recurrence, or both.
#[derive(Clone, Debug)]
pub struct SequenceInput {
    pub field: Arc<Field>,
    pub closed_form: Option<ClosedFormSequence>,
    pub recurrence: Option<LinearRecurrence>,
}

impl SequenceInput {
    /// `{"p", "s", "modulus"?, "closedForm"?, "recurrence"?}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let int = |name: &str| -> Result<Option<u64>> {
            match v.get(name) {
                None => Ok(None),
                Some(x) => x
                    .as_u64()
                    .map(Some)
                    .ok_or_else(|| Error::Malformed(format!("field {name:?} must be a nonnegative integer"))),
            }
        };
        let p = int("p")?.ok_or_else(|| Error::Malformed("missing field \"p\"".into()))?;
        let s = int("s")?.unwrap_or(1);
        let s = u32::try_from(s).map_err(|_| Error::Malformed("s too large".into()))?;
        let field = match v.get("modulus") {
            None => Field::new(p, s)?,
            Some(m) => {
                let m: Vec<u32> = m
                    .as_array()
                    .and_then(|xs| xs.iter().map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok())).collect())
                    .ok_or_else(|| Error::Malformed("modulus must be an array of integers".into()))?;
                if m.len() != s as usize + 1 {
                    return Err(Error::Malformed("modulus must have degree s".into()));
                }
                Field::with_modulus(p, m)?
            }
        };
        let field = Arc::new(field);
        let closed_form = v.get("closedForm").map(|c| ClosedFormSequence::from_json(&field, c)).transpose()?;
        let recurrence = v.get("recurrence").map(|c| LinearRecurrence::from_json(&field, c)).transpose()?;
        if closed_form.is_none() && recurrence.is_none() {
            return Err(Error::Malformed("need \"closedForm\" or \"recurrence\"".into()));
        }
        Ok(SequenceInput {
            field,
            closed_form,
            recurrence,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({"p": self.field.p(), "s": self.field.s(), "modulus": self.field.modulus()});
        if let Some(c) = &self.closed_form {
            out["closedForm"] = c.to_json();
        }
        if let Some(r) = &self.recurrence {
            out["recurrence"] = r.to_json();
        }
        out
    }

    /// The closed form given, or one found by the factoring helper.
    pub fn closed_form(&self) -> Result<ClosedFormSequence> {
        match (&self.closed_form, &self.recurrence) {
            (Some(c), _) => Ok(c.clone()),
            (None, Some(r)) => closed_form_from_recurrence(r),
            (None, None) => unreachable!("checked on construction"),
        }
    }
}

/// Maps a value of `rec` into the field of `seq` when `rec` has constant
/// coefficients in a subfield (as after [`closed_form_from_recurrence`]).
fn embed(x: &Pce, into: &Arc<Field>) -> Option<Pce> {
    if x.field() == into {
        return Some(x.clone());
    }
    let c = as_constant(x)?;
    (x.field().s() == 1 && x.field().p() == into.p()).then(|| Pce::constant(into, c))
}

/// First `n` with differing values for `n <= n_max`, or `None`.
pub fn cross_validate(seq: &ClosedFormSequence, rec: &LinearRecurrence, n_max: u64) -> Result<Option<u64>> {
    let a = seq.values(n_max)?;
    let b = rec.values(n_max)?;
    for (n, (x, y)) in a.iter().zip(&b).enumerate() {
        let y = embed(y, &seq.field).ok_or_else(|| Error::pre("closed form and recurrence live over unrelated fields"))?;
        if *x != y {
            return Ok(Some(n as u64));
        }
    }
    Ok(None)
}

/// Same as [`cross_validate`] for `a_{-1}, ..., a_{-m_max}`.
pub fn cross_validate_backward(seq: &ClosedFormSequence, rec: &LinearRecurrence, m_max: u64) -> Result<Option<u64>> {
    let a = seq.inverted().values(m_max)?;
    let b = rec.values_backward(m_max)?;
    for (m, (x, y)) in a.iter().skip(1).zip(&b).enumerate() {
        let y = embed(y, &seq.field).ok_or_else(|| Error::pre("closed form and recurrence live over unrelated fields"))?;
        if *x != y {
            return Ok(Some(m as u64 + 1));
        }
    }
    Ok(None)
}
