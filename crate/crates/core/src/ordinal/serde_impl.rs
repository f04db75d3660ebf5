//! JSON form: naturals are plain integers, anything else is a list of
//! `[exponent, coefficient]` pairs with exponents in the same form.

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Ordinal, DEFAULT_MAX_DEPTH};

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if let Some(n) = self.as_nat() {
            return s.serialize_u64(n);
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for t in self.terms.iter() {
            seq.serialize_element(&(&t.exp, t.coeff))?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Nat(u64),
    Terms(Vec<(Repr, u64)>),
}

impl Repr {
    fn into_ordinal(self) -> Result<Ordinal, String> {
        match self {
            Repr::Nat(n) => Ok(Ordinal::nat(n)),
            Repr::Terms(pairs) => {
                let pairs = pairs
                    .into_iter()
                    .map(|(e, c)| Ok((e.into_ordinal()?, c)))
                    .collect::<Result<Vec<_>, String>>()?;
                Ordinal::from_terms(pairs).map_err(|e| e.to_string())
            }
        }
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = Repr::deserialize(d)?.into_ordinal().map_err(D::Error::custom)?;
        let depth = value.exponent_depth();
        if depth > DEFAULT_MAX_DEPTH {
            return Err(D::Error::custom(format!(
                "exponent nesting depth {depth} exceeds limit {DEFAULT_MAX_DEPTH}"
            )));
        }
        Ok(value)
    }
}
