//! Ordinals below epsilon_0 in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + ... + w^ek*ck` with strictly
//! decreasing exponents and nonzero coefficients. Exponents are themselves
//! ordinals, so the representation is a tree. The empty sum is zero.

mod parse;
mod random;
mod serde_impl;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse_ordinal, parse_ordinal_with_limit};
pub use random::{random_below, random_ordinal};

/// Default bound on exponent nesting accepted from external input.
pub const DEFAULT_MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrdinalError {
    #[error("coefficient overflow")]
    Overflow,
    #[error("left subtraction undefined: {lhs} exceeds {rhs}")]
    NotLeftSubtractable { lhs: Ordinal, rhs: Ordinal },
    #[error("{0} is not a limit ordinal and has no fundamental sequence")]
    NotLimit(Ordinal),
    #[error("fundamental sequence index must be at least 1")]
    ZeroIndex,
    #[error("the Cantor-Bendixson rank of 0 is undefined")]
    RankOfZero,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("zero coefficient at byte {pos}")]
    ZeroCoefficient { pos: usize },
    #[error("exponent nesting depth {depth} exceeds limit {limit}")]
    TooDeep { depth: usize, limit: usize },
    #[error("not in Cantor normal form: {0}")]
    NotNormal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

/// One summand `w^exp * coeff` of a Cantor normal form; `coeff >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: Ordinal,
    pub coeff: u64,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Arc<[Term]>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Arc::from([]) }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: Arc::from([Term { exp: Ordinal::zero(), coeff: n }]),
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal {
            terms: Arc::from([Term { exp: e, coeff: 1 }]),
        }
    }

    /// `w^e * c`, zero when `c == 0`.
    pub fn monomial(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Ordinal {
            terms: Arc::from([Term { exp: e, coeff: c }]),
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs, rejecting
    /// anything that is not already in Cantor normal form.
    pub fn from_terms(pairs: Vec<(Ordinal, u64)>) -> Result<Self, OrdinalError> {
        let mut terms = Vec::with_capacity(pairs.len());
        for (exp, coeff) in pairs {
            if coeff == 0 {
                return Err(OrdinalError::NotNormal("zero coefficient".into()));
            }
            if let Some(prev) = terms.last().map(|t: &Term| &t.exp) {
                if *prev <= exp {
                    return Err(OrdinalError::NotNormal(format!(
                        "exponent {exp} does not decrease after {prev}"
                    )));
                }
            }
            terms.push(Term { exp, coeff });
        }
        Ok(Ordinal { terms: terms.into() })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match &self.terms[..] {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn leading_exp(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    pub fn trailing_exp(&self) -> Option<&Ordinal> {
        self.terms.last().map(|t| &t.exp)
    }

    pub fn classify(&self) -> OrdinalKind {
        match self.trailing_exp() {
            None => OrdinalKind::Zero,
            Some(e) if e.is_zero() => OrdinalKind::Successor,
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == OrdinalKind::Limit
    }

    pub fn is_successor(&self) -> bool {
        self.classify() == OrdinalKind::Successor
    }

    /// Nesting depth of exponents; 0 for naturals, 1 for `w*3 + 2`, 2 for `w^w`.
    pub fn exponent_depth(&self) -> usize {
        if self.is_finite() {
            return 0;
        }
        1 + self
            .terms
            .iter()
            .map(|t| t.exp.exponent_depth())
            .max()
            .unwrap_or(0)
    }

    pub fn successor(&self) -> Result<Self, OrdinalError> {
        self.add(&Self::one())
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Self> {
        let last = self.terms.last()?;
        if !last.exp.is_zero() {
            return None;
        }
        let mut terms = self.terms.to_vec();
        let last = terms.last_mut().expect("nonempty");
        last.coeff -= 1;
        if last.coeff == 0 {
            terms.pop();
        }
        Some(Ordinal { terms: terms.into() })
    }

    /// Ordinary (left-absorbing) ordinal addition.
    pub fn add(&self, other: &Self) -> Result<Self, OrdinalError> {
        let Some(head) = other.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut merged = None;
        for t in self.terms.iter() {
            match t.exp.cmp(&head.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => merged = Some(t.coeff),
                Ordering::Less => break,
            }
        }
        let mut rest = other.terms.iter();
        let first = rest.next().expect("nonempty");
        let coeff = match merged {
            Some(c) => c.checked_add(first.coeff).ok_or(OrdinalError::Overflow)?,
            None => first.coeff,
        };
        terms.push(Term { exp: first.exp.clone(), coeff });
        terms.extend(rest.cloned());
        Ok(Ordinal { terms: terms.into() })
    }

    /// Hessenberg natural sum: coefficients of equal exponents add.
    pub fn natural_sum(&self, other: &Self) -> Result<Self, OrdinalError> {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.exp.cmp(&b.exp) {
                Ordering::Greater => {
                    terms.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let coeff = a.coeff.checked_add(b.coeff).ok_or(OrdinalError::Overflow)?;
                    terms.push(Term { exp: a.exp.clone(), coeff });
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        Ok(Ordinal { terms: terms.into() })
    }

    /// `a ⊕ a`.
    pub fn nat_double(&self) -> Result<Self, OrdinalError> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    exp: t.exp.clone(),
                    coeff: t.coeff.checked_mul(2).ok_or(OrdinalError::Overflow)?,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ordinal { terms: terms.into() })
    }

    /// The unique `r` with `self + r == other`.
    pub fn left_subtract(&self, other: &Self) -> Result<Self, OrdinalError> {
        let fail = || OrdinalError::NotLeftSubtractable {
            lhs: self.clone(),
            rhs: other.clone(),
        };
        for (i, a) in self.terms.iter().enumerate() {
            let Some(b) = other.terms.get(i) else {
                return Err(fail());
            };
            if a == b {
                continue;
            }
            return match a.exp.cmp(&b.exp) {
                Ordering::Less => Ok(Ordinal {
                    terms: other.terms[i..].into(),
                }),
                Ordering::Greater => Err(fail()),
                Ordering::Equal if a.coeff < b.coeff => {
                    let mut terms = other.terms[i..].to_vec();
                    terms[0].coeff -= a.coeff;
                    Ok(Ordinal { terms: terms.into() })
                }
                Ordering::Equal => Err(fail()),
            };
        }
        Ok(Ordinal {
            terms: other.terms[self.terms.len()..].into(),
        })
    }

    /// `self * k` for a natural `k`; only the leading coefficient scales.
    pub fn mul_nat(&self, k: u64) -> Result<Self, OrdinalError> {
        if k == 0 || self.is_zero() {
            return Ok(Self::zero());
        }
        let mut terms = self.terms.to_vec();
        terms[0].coeff = terms[0].coeff.checked_mul(k).ok_or(OrdinalError::Overflow)?;
        Ok(Ordinal { terms: terms.into() })
    }

    /// The canonical fundamental sequence `self[n]`, `n >= 1`.
    ///
    /// For `self = x + w^b * k`: when `b = g + 1` the value is
    /// `x + w^b*(k-1) + w^g*n`, and when `b` is a limit it is
    /// `x + w^b*(k-1) + w^(b[n])`. Strictly increasing in `n` with supremum `self`.
    pub fn fundamental_seq(&self, n: u64) -> Result<Self, OrdinalError> {
        if n == 0 {
            return Err(OrdinalError::ZeroIndex);
        }
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        let mut terms = self.terms.to_vec();
        let last = terms.pop().expect("limit is nonzero");
        if last.coeff > 1 {
            terms.push(Term {
                exp: last.exp.clone(),
                coeff: last.coeff - 1,
            });
        }
        let tail = match last.exp.predecessor() {
            Some(g) => Term { exp: g, coeff: n },
            None => Term {
                exp: last.exp.fundamental_seq(n)?,
                coeff: 1,
            },
        };
        // The new exponent is below every remaining one, so this stays normal.
        terms.push(tail);
        Ok(Ordinal { terms: terms.into() })
    }

    /// `sup_n (d ⊕ b[n])` for a limit `b`.
    ///
    /// With `b = x + w^e*k` and `p = d ⊕ (x + w^e*(k-1))`, the supremum is the
    /// part of `p` with exponents `>= e`, followed by `w^e`.
    pub fn sup_natural_sum(d: &Self, b: &Self) -> Result<Self, OrdinalError> {
        if !b.is_limit() {
            return Err(OrdinalError::NotLimit(b.clone()));
        }
        let mut head = b.terms.to_vec();
        let last = head.pop().expect("limit is nonzero");
        if last.coeff > 1 {
            head.push(Term {
                exp: last.exp.clone(),
                coeff: last.coeff - 1,
            });
        }
        let p = d.natural_sum(&Ordinal { terms: head.into() })?;
        let high = Ordinal {
            terms: p.terms.iter().take_while(|t| t.exp >= last.exp).cloned().collect(),
        };
        high.natural_sum(&Self::omega_pow(last.exp))
    }

    /// Cantor-Bendixson rank of the point `self` in any interval `[1, t]`
    /// containing it: the trailing exponent of the normal form.
    pub fn cb_rank(&self) -> Result<Self, OrdinalError> {
        self.trailing_exp().cloned().ok_or(OrdinalError::RankOfZero)
    }

    /// `sup(self, other)`.
    pub fn max_of(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            let c = a.exp.cmp(&b.exp).then(a.coeff.cmp(&b.coeff));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            f.write_str("w")?;
            match t.exp.as_nat() {
                Some(1) => {}
                Some(n) => write!(f, "^{n}")?,
                None if t.exp == Ordinal::omega() => f.write_str("^w")?,
                None => write!(f, "^({})", t.exp)?,
            }
            if t.coeff != 1 {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}
