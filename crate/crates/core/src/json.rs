//! Small JSON helpers shared by the serializers.
//!
//! Integers are written as JSON numbers when they fit in `i64` and as decimal
//! strings otherwise; both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{Endomorphism, GroupElement, Lattice};
use crate::spanning::SpanningSet;

pub fn int_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(v.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::Malformed(format!("not an integer: {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| Error::Malformed(format!("not an integer: {s:?}"))),
        other => Err(Error::Malformed(format!("expected integer, got {other}"))),
    }
}

pub fn elem_to_json(x: &GroupElement) -> Value {
    Value::Array(x.coords().iter().map(int_to_json).collect())
}

/// Accepts `[a, b, ...]` or a bare integer for `d = 1`.
pub fn elem_from_json(v: &Value) -> Result<GroupElement> {
    match v {
        Value::Array(items) if !items.is_empty() => Ok(GroupElement::new(
            items.iter().map(int_from_json).collect::<Result<_>>()?,
        )),
        Value::Array(_) => Err(Error::Malformed("empty coordinate vector".into())),
        other => Ok(GroupElement::new(vec![int_from_json(other)?])),
    }
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    Value::Array(l.basis().iter().map(elem_to_json).collect())
}

pub fn lattice_from_json(v: &Value, dim: usize) -> Result<Lattice> {
    let gens = v
        .as_array()
        .ok_or_else(|| Error::Malformed("subgroup must be a list of generators".into()))?
        .iter()
        .map(elem_from_json)
        .collect::<Result<Vec<_>>>()?;
    if gens.iter().any(|g| g.dim() != dim) {
        return Err(Error::Malformed("generator dimension mismatch".into()));
    }
    Ok(Lattice::new(dim, &gens))
}

/// `4` (with a dimension supplied separately) or `[[2,1],[0,2]]`.
pub fn endo_from_json(v: &Value, dim: usize) -> Result<Endomorphism> {
    match v {
        Value::Array(rows) => {
            let m = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| Error::Malformed("matrix rows must be arrays".into()))?
                        .iter()
                        .map(int_from_json)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Endomorphism::matrix(m)
        }
        other => Endomorphism::scalar_big(int_from_json(other)?, dim),
    }
}

pub fn endo_to_json(f: &Endomorphism) -> Value {
    match f {
        Endomorphism::Scalar { k, .. } => int_to_json(k),
        Endomorphism::Matrix(m) => Value::Array(
            m.iter()
                .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
                .collect(),
        ),
    }
}

pub(crate) fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Malformed(format!("missing field {name:?}")))
}

pub(crate) fn array_field<'a>(v: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    field(v, name)?
        .as_array()
        .ok_or_else(|| Error::Malformed(format!("field {name:?} must be an array")))
}

pub(crate) fn usize_field(v: &Value, name: &str) -> Result<usize> {
    field(v, name)?
        .as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::Malformed(format!("field {name:?} must be a nonnegative integer")))
}

/// `{"r": r, "digits": [[...], ...]}`.
pub fn spanning_to_json(s: &SpanningSet) -> Value {
    serde_json::json!({
        "r": s.power(),
        "digits": s.digits().iter().map(elem_to_json).collect::<Vec<_>>(),
    })
}

/// The endomorphism is not part of the document and comes from the caller.
pub fn spanning_from_json(v: &Value, f: &Endomorphism) -> Result<SpanningSet> {
    let r = usize_field(v, "r")?;
    if r > 64 {
        return Err(Error::Malformed("r out of range".into()));
    }
    let digits = array_field(v, "digits")?
        .iter()
        .map(elem_from_json)
        .collect::<Result<Vec<_>>>()?;
    if digits.len() > 1_000_000 {
        return Err(Error::Malformed("too many digits".into()));
    }
    SpanningSet::new(digits, f.clone(), r as u32)
}
