//! The `ord` calculator: `side (cmp side)?` where `side` joins operands with
//! `⊕` (or `#`) and an operand is an ordinal optionally followed by `⊙2`
//! (or `@2`). Ordinary `+` belongs to the ordinal syntax itself.

use serde::Serialize;
use sprlab::{parse_ordinal, Ordinal, OrdinalError};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Cmp {
    const ALL: [(&'static str, Cmp); 5] = [
        ("<=", Cmp::Le),
        (">=", Cmp::Ge),
        ("==", Cmp::Eq),
        ("<", Cmp::Lt),
        (">", Cmp::Gt),
    ];

    fn holds(self, a: &Ordinal, b: &Ordinal) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Eq => a == b,
            Cmp::Ge => a >= b,
            Cmp::Gt => a > b,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Evaluation {
    Value {
        input: String,
        value: Ordinal,
        kind: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        cb_rank: Option<Ordinal>,
    },
    Comparison {
        input: String,
        lhs: Ordinal,
        cmp: Cmp,
        rhs: Ordinal,
        holds: bool,
    },
}

impl Evaluation {
    pub fn pretty(&self) -> String {
        match self {
            Evaluation::Value { input, value, .. } => format!("{input} = {value}"),
            Evaluation::Comparison { lhs, rhs, cmp, holds, .. } => {
                let op = Cmp::ALL.iter().find(|(_, c)| c == cmp).expect("listed").0;
                format!("{lhs} {op} {rhs}: {holds}")
            }
        }
    }

    pub fn row(&self) -> Vec<String> {
        match self {
            Evaluation::Value { input, value, .. } => vec![input.clone(), value.to_string()],
            Evaluation::Comparison { input, holds, .. } => vec![input.clone(), holds.to_string()],
        }
    }
}

fn syntax(src: &str, offset: usize, e: OrdinalError) -> CliError {
    match e {
        OrdinalError::Syntax { pos, msg } => {
            CliError::Usage(format!("{src:?}: syntax error at byte {}: {msg}", offset + pos))
        }
        OrdinalError::ZeroCoefficient { pos } => {
            CliError::Usage(format!("{src:?}: zero coefficient at byte {}", offset + pos))
        }
        other => CliError::Usage(format!("{src:?}: {other}")),
    }
}

/// Byte ranges of `s` between occurrences of any of `seps`.
fn split_on<'a>(s: &'a str, seps: &[&str]) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < s.len() {
        match seps.iter().find(|sep| s[i..].starts_with(**sep)) {
            Some(sep) => {
                out.push((start, &s[start..i]));
                i += sep.len();
                start = i;
            }
            None => i += s[i..].chars().next().map_or(1, char::len_utf8),
        }
    }
    out.push((start, &s[start..]));
    out
}

fn operand(src: &str, offset: usize, text: &str) -> Result<Ordinal, CliError> {
    let trimmed = text.trim_end();
    for dbl in ["⊙2", "@2"] {
        if let Some(base) = trimmed.strip_suffix(dbl) {
            let v = parse_ordinal(base).map_err(|e| syntax(src, offset, e))?;
            return v.nat_double().map_err(|e| syntax(src, offset, e));
        }
    }
    parse_ordinal(text).map_err(|e| syntax(src, offset, e))
}

fn side(src: &str, offset: usize, text: &str) -> Result<Ordinal, CliError> {
    let mut acc = Ordinal::zero();
    for (at, part) in split_on(text, &["⊕", "#"]) {
        let v = operand(src, offset + at, part)?;
        acc = acc.natural_sum(&v).map_err(|e| syntax(src, offset + at, e))?;
    }
    Ok(acc)
}

pub fn evaluate(src: &str) -> Result<Evaluation, CliError> {
    for (op, cmp) in Cmp::ALL {
        if let Some(at) = src.find(op) {
            let lhs = side(src, 0, &src[..at])?;
            let rhs = side(src, at + op.len(), &src[at + op.len()..])?;
            return Ok(Evaluation::Comparison {
                input: src.to_string(),
                holds: cmp.holds(&lhs, &rhs),
                lhs,
                cmp,
                rhs,
            });
        }
    }
    let value = side(src, 0, src)?;
    let kind = if value.is_zero() {
        "zero"
    } else if value.is_limit() {
        "limit"
    } else {
        "successor"
    };
    Ok(Evaluation::Value {
        input: src.to_string(),
        cb_rank: value.cb_rank().ok(),
        value,
        kind,
    })
}

/// The derived set `[1, top]^(order)`: the nonzero multiples of `w^order`
/// up to `top`, i.e. `{w^order * y : 1 <= y <= quotient}`.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    pub top: Ordinal,
    pub order: Ordinal,
    pub size: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<Ordinal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<Ordinal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Ordinal>,
    pub description: String,
}

pub fn derived_set(top: &Ordinal, order: &Ordinal) -> Result<Derived, CliError> {
    let wrap = |e: OrdinalError| CliError::Usage(e.to_string());
    if top.is_zero() {
        return Err(CliError::Usage("the interval [1, 0] is empty".into()));
    }
    // Terms of `top` of exponent >= order, with the exponents reduced by order.
    let kept: Vec<(Ordinal, u64)> = top
        .terms()
        .iter()
        .take_while(|t| t.exp >= *order)
        .map(|t| Ok((order.left_subtract(&t.exp)?, t.coeff)))
        .collect::<Result<_, OrdinalError>>()
        .map_err(wrap)?;
    if kept.is_empty() {
        return Ok(Derived {
            top: top.clone(),
            order: order.clone(),
            size: "empty",
            min: None,
            max: None,
            quotient: None,
            description: "empty".into(),
        });
    }
    let quotient = Ordinal::from_terms(kept).map_err(wrap)?;
    let base = Ordinal::omega_pow(order.clone());
    let max = Ordinal::from_terms(
        quotient
            .terms()
            .iter()
            .map(|t| Ok((order.add(&t.exp)?, t.coeff)))
            .collect::<Result<_, OrdinalError>>()
            .map_err(wrap)?,
    )
    .map_err(wrap)?;
    let (size, description) = if quotient == Ordinal::one() {
        ("singleton", format!("{{{max}}} (singleton)"))
    } else if let Some(q) = quotient.as_nat() {
        ("finite", format!("{{{base}*k : 1 <= k <= {q}}} ({q} points)"))
    } else {
        let label = if order.is_zero() {
            "all points"
        } else if *order == Ordinal::one() {
            "limit points"
        } else {
            "points"
        };
        ("infinite", format!("{label} {{{base}*y : 1 <= y <= {quotient}}}, maximum {max}"))
    };
    Ok(Derived {
        top: top.clone(),
        order: order.clone(),
        size,
        min: Some(base),
        max: Some(max),
        quotient: Some(quotient),
        description,
    })
}

pub fn parse_arg(what: &str, src: &str) -> Result<Ordinal, CliError> {
    parse_ordinal(src).map_err(|e| match syntax(src, 0, e) {
        CliError::Usage(m) => CliError::Usage(format!("{what} {m}")),
        other => other,
    })
}
