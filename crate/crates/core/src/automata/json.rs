//! DFA JSON: `{"alphabet", "arity", "initial", "accepting", "transitions"}`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{elem_from_json, elem_to_json, usize_field, array_field};

use super::{Alphabet, Dfa};

impl Dfa {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.num_states()).map(|q| json!(self.row(q))).collect();
        json!({
            "alphabet": self.alphabet.digits().iter().map(elem_to_json).collect::<Vec<_>>(),
            "arity": self.alphabet.arity(),
            "initial": self.initial,
            "accepting": self.accepting_states(),
            "transitions": rows,
        })
    }

    pub fn from_json(v: &Value) -> Result<Dfa> {
        let digits = array_field(v, "alphabet")?
            .iter()
            .map(elem_from_json)
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = digits.first().map(|x| x.dim()) {
            if digits.iter().any(|x| x.dim() != d) {
                return Err(Error::Malformed("alphabet digits of mixed dimension".into()));
            }
        }
        let arity = usize_field(v, "arity")?;
        let alphabet = Alphabet::new(digits, arity).map_err(|e| Error::Malformed(e.to_string()))?;
        let initial = usize_field(v, "initial")?;
        let rows = array_field(v, "transitions")?;
        let n = rows.len();
        let k = alphabet.len();
        let mut trans = Vec::with_capacity(n.saturating_mul(k).min(1 << 24));
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Malformed("transition row is not an array".into()))?;
            if row.len() != k {
                return Err(Error::Malformed(format!("transition row has {} entries, expected {k}", row.len())));
            }
            for t in row {
                let t = t
                    .as_u64()
                    .filter(|&t| (t as usize) < n)
                    .ok_or_else(|| Error::Malformed("bad transition target".into()))?;
                trans.push(t as u32);
            }
        }
        let mut accepting = vec![false; n];
        for a in array_field(v, "accepting")? {
            let a = a
                .as_u64()
                .filter(|&a| (a as usize) < n)
                .ok_or_else(|| Error::Malformed("bad accepting state".into()))?;
            accepting[a as usize] = true;
        }
        Dfa::new(alphabet, initial, accepting, trans)
    }
}
