//! JSON form: `{"field", "top", "pieces": [{"end", "value": [re, im]}]}`.
//! Deserialisation re-checks every invariant, including canonical form.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Field, StepFun, C64};
use crate::ordinal::Ordinal;

#[derive(Serialize)]
struct WireRef<'a> {
    field: Field,
    top: &'a Ordinal,
    pieces: Vec<PieceRef<'a>>,
}

#[derive(Serialize)]
struct PieceRef<'a> {
    end: &'a Ordinal,
    value: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    field: Field,
    top: Ordinal,
    pieces: Vec<WirePiece>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePiece {
    end: Ordinal,
    value: [f64; 2],
}

impl Serialize for StepFun {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WireRef {
            field: self.field,
            top: &self.top,
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceRef {
                    end: &p.end,
                    value: [p.value.re, p.value.im],
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFun {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let pieces = w
            .pieces
            .into_iter()
            .map(|p| (p.end, C64::new(p.value[0], p.value[1])))
            .collect();
        StepFun::new_canonical(w.field, w.top, pieces).map_err(D::Error::custom)
    }
}
