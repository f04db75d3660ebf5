//! Locally constant functions on an ordinal interval `[1, top]`.
//!
//! A [`StepFun`] is a finite list of pieces; piece `i` covers
//! `(end_{i-1}, end_i]` with `end_0 = 0`, ends strictly increase and the last
//! end is `top`. Adjacent pieces always carry distinct values, so two step
//! functions are pointwise equal exactly when their piece lists are equal.

mod random;
mod serde_impl;

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ordinal::{Ordinal, OrdinalError};

pub use random::{random_stepfun, ValueLaw, BREAKPOINT_COEFF};

pub type C64 = Complex64;

/// Default tolerance for comparing step functions numerically.
pub const EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuncError {
    #[error("top must be at least 1")]
    ZeroTop,
    #[error("a step function needs at least one piece")]
    NoPieces,
    #[error("piece ends do not strictly increase at index {0}")]
    Unordered(usize),
    #[error("last piece ends at {last}, expected top {top}")]
    BadTop { last: Ordinal, top: Ordinal },
    #[error("piece {0} carries the same value as its successor")]
    NotCanonical(usize),
    #[error("real step function has a value with nonzero imaginary part")]
    ComplexValue,
    #[error("non-finite value")]
    NonFinite,
    #[error("domains differ: [1, {0}] vs [1, {1}]")]
    TopMismatch(Ordinal, Ordinal),
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: Field, found: Field },
    #[error("point {p} lies outside [1, {top}]")]
    OutOfDomain { p: Ordinal, top: Ordinal },
    #[error("operation needs real-valued functions")]
    NotReal,
    #[error("empty or reversed interval ({lo}, {hi}]")]
    EmptyInterval { lo: Ordinal, hi: Ordinal },
    #[error("block content has top {found}, expected {expected}")]
    BlockLength { expected: Ordinal, found: Ordinal },
    #[error("blocks overlap below {0}")]
    Overlap(Ordinal),
    #[error("({lo}, {hi}] is not covered and no tail rule was given")]
    Gap { lo: Ordinal, hi: Ordinal },
    #[error("{0} is not an isolated point")]
    NotIsolated(Ordinal),
    #[error("expected {expected} coefficients, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub end: Ordinal,
    pub value: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFun {
    field: Field,
    top: Ordinal,
    pieces: Vec<Piece>,
}

/// A sub-interval `(lo, hi]` of an assembled domain together with a step
/// function on `[1, hi - lo]` that is translated onto it.
#[derive(Debug, Clone)]
pub struct Block {
    pub lo: Ordinal,
    pub hi: Ordinal,
    pub content: StepFun,
}

fn check_value(field: Field, v: C64) -> Result<(), FuncError> {
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(FuncError::NonFinite);
    }
    if field == Field::Real && v.im != 0.0 {
        return Err(FuncError::ComplexValue);
    }
    Ok(())
}

/// Appends a piece, extending the previous one when the values agree.
fn push_merged(pieces: &mut Vec<Piece>, end: Ordinal, value: C64) {
    match pieces.last_mut() {
        Some(last) if last.value == value => last.end = end,
        _ => pieces.push(Piece { end, value }),
    }
}

impl StepFun {
    /// Validates `(end, value)` pairs and merges equal neighbours.
    pub fn new(field: Field, top: Ordinal, pieces: Vec<(Ordinal, C64)>) -> Result<Self, FuncError> {
        let f = Self::from_raw(field, top, pieces)?;
        Ok(f.canonical())
    }

    /// Like [`StepFun::new`] but rejects equal adjacent values instead of merging them.
    pub fn new_canonical(
        field: Field,
        top: Ordinal,
        pieces: Vec<(Ordinal, C64)>,
    ) -> Result<Self, FuncError> {
        let f = Self::from_raw(field, top, pieces)?;
        if let Some(i) = f.pieces.windows(2).position(|w| w[0].value == w[1].value) {
            return Err(FuncError::NotCanonical(i));
        }
        Ok(f)
    }

    fn from_raw(field: Field, top: Ordinal, pieces: Vec<(Ordinal, C64)>) -> Result<Self, FuncError> {
        if top.is_zero() {
            return Err(FuncError::ZeroTop);
        }
        let Some(last) = pieces.last() else {
            return Err(FuncError::NoPieces);
        };
        if last.0 != top {
            return Err(FuncError::BadTop {
                last: last.0.clone(),
                top,
            });
        }
        let mut prev = Ordinal::zero();
        for (i, (end, v)) in pieces.iter().enumerate() {
            if *end <= prev {
                return Err(FuncError::Unordered(i));
            }
            check_value(field, *v)?;
            prev = end.clone();
        }
        let pieces = pieces
            .into_iter()
            .map(|(end, value)| Piece { end, value })
            .collect();
        Ok(StepFun { field, top, pieces })
    }

    fn canonical(self) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in self.pieces {
            push_merged(&mut pieces, p.end, p.value);
        }
        StepFun { pieces, ..self }
    }

    pub fn constant(field: Field, top: Ordinal, value: C64) -> Result<Self, FuncError> {
        Self::new(field, top.clone(), vec![(top, value)])
    }

    pub fn zero(field: Field, top: Ordinal) -> Result<Self, FuncError> {
        Self::constant(field, top, C64::new(0.0, 0.0))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn top(&self) -> &Ordinal {
        &self.top
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_constant(&self) -> bool {
        self.pieces.len() == 1
    }

    /// Start of the last piece: the function is constant on `(tail_start, top]`.
    pub fn tail_start(&self) -> Ordinal {
        match self.pieces.len() {
            0 | 1 => Ordinal::zero(),
            n => self.pieces[n - 2].end.clone(),
        }
    }

    /// Value at the top point.
    pub fn top_value(&self) -> C64 {
        self.pieces.last().expect("nonempty").value
    }

    /// The same function, tagged complex.
    pub fn to_complex(&self) -> StepFun {
        StepFun {
            field: Field::Complex,
            ..self.clone()
        }
    }

    fn index_of(&self, p: &Ordinal) -> usize {
        self.pieces.partition_point(|piece| piece.end < *p)
    }

    pub fn eval(&self, p: &Ordinal) -> Result<C64, FuncError> {
        if p.is_zero() || *p > self.top {
            return Err(FuncError::OutOfDomain {
                p: p.clone(),
                top: self.top.clone(),
            });
        }
        Ok(self.pieces[self.index_of(p)].value)
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().map(|p| p.value.norm()).fold(0.0, f64::max)
    }

    /// `f / ‖f‖`; the zero function is returned unchanged.
    pub fn normalized(&self) -> StepFun {
        let n = self.sup_norm();
        if n == 0.0 {
            return self.clone();
        }
        self.map(self.field, |v| v / n)
    }

    fn map(&self, field: Field, op: impl Fn(C64) -> C64) -> StepFun {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            push_merged(&mut pieces, p.end.clone(), op(p.value));
        }
        StepFun {
            field,
            top: self.top.clone(),
            pieces,
        }
    }

    /// Pointwise `op(f, g)` over the common refinement of both piece lists.
    pub fn zip_with(
        &self,
        other: &StepFun,
        field: Field,
        op: impl Fn(C64, C64) -> C64,
    ) -> Result<StepFun, FuncError> {
        if self.top != other.top {
            return Err(FuncError::TopMismatch(self.top.clone(), other.top.clone()));
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() + other.pieces.len());
        for (end, v, w) in refine(self, other) {
            let value = op(v, w);
            check_value(field, value)?;
            push_merged(&mut pieces, end.clone(), value);
        }
        Ok(StepFun {
            field,
            top: self.top.clone(),
            pieces,
        })
    }

    /// Value pairs `(f(p), g(p))` over the common refinement, one per cell.
    pub fn value_pairs(&self, other: &StepFun) -> Result<Vec<(C64, C64)>, FuncError> {
        if self.top != other.top {
            return Err(FuncError::TopMismatch(self.top.clone(), other.top.clone()));
        }
        Ok(refine(self, other).map(|(_, v, w)| (v, w)).collect())
    }

    /// `sum_i c_i f_i`; a real result requires real inputs and coefficients.
    pub fn linear_combine(coeffs: &[C64], fs: &[&StepFun]) -> Result<StepFun, FuncError> {
        if coeffs.len() != fs.len() {
            return Err(FuncError::LengthMismatch {
                expected: fs.len(),
                found: coeffs.len(),
            });
        }
        let Some(first) = fs.first() else {
            return Err(FuncError::NoPieces);
        };
        let field = fs.iter().fold(first.field, |acc, f| acc.join(f.field));
        if field == Field::Real && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(FuncError::NotReal);
        }
        let mut acc = first.map(field, |v| coeffs[0] * v);
        for (c, f) in coeffs.iter().zip(fs).skip(1) {
            acc = acc.zip_with(f, field, |a, b| a + c * b)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &StepFun) -> Result<StepFun, FuncError> {
        self.zip_with(other, self.field.join(other.field), |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFun) -> Result<StepFun, FuncError> {
        self.zip_with(other, self.field.join(other.field), |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> Result<StepFun, FuncError> {
        if self.field == Field::Real && c.im != 0.0 {
            return Err(FuncError::NotReal);
        }
        Ok(self.map(self.field, |v| c * v))
    }

    /// `|f|`, real-valued.
    pub fn modulus(&self) -> StepFun {
        self.map(Field::Real, |v| C64::new(v.norm(), 0.0))
    }

    pub fn conjugate(&self) -> StepFun {
        self.map(self.field, |v| v.conj())
    }

    pub fn re_part(&self) -> StepFun {
        self.map(Field::Real, |v| C64::new(v.re, 0.0))
    }

    pub fn pointwise_mul(&self, other: &StepFun) -> Result<StepFun, FuncError> {
        self.zip_with(other, self.field.join(other.field), |a, b| a * b)
    }

    /// Pointwise minimum of two real functions.
    pub fn meet(&self, other: &StepFun) -> Result<StepFun, FuncError> {
        self.require_real(other)?;
        self.zip_with(other, Field::Real, |a, b| C64::new(a.re.min(b.re), 0.0))
    }

    /// Pointwise maximum of two real functions.
    pub fn join(&self, other: &StepFun) -> Result<StepFun, FuncError> {
        self.require_real(other)?;
        self.zip_with(other, Field::Real, |a, b| C64::new(a.re.max(b.re), 0.0))
    }

    fn require_real(&self, other: &StepFun) -> Result<(), FuncError> {
        if self.field == Field::Real && other.field == Field::Real {
            Ok(())
        } else {
            Err(FuncError::NotReal)
        }
    }

    /// `‖f - g‖ <= tol` on a common domain.
    pub fn approx_eq(&self, other: &StepFun, tol: f64) -> bool {
        self.top == other.top
            && refine(self, other).all(|(_, v, w)| (v - w).norm() <= tol)
    }

    /// The restriction to `(lo, hi]`, re-indexed onto `[1, hi - lo]` so that
    /// the result at `p` equals `f(lo + p)`.
    pub fn restrict(&self, lo: &Ordinal, hi: &Ordinal) -> Result<StepFun, FuncError> {
        if lo >= hi {
            return Err(FuncError::EmptyInterval {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        if *hi > self.top {
            return Err(FuncError::OutOfDomain {
                p: hi.clone(),
                top: self.top.clone(),
            });
        }
        let top = lo.left_subtract(hi)?;
        let start = self.pieces.partition_point(|p| p.end <= *lo);
        let mut pieces = Vec::new();
        for p in &self.pieces[start..] {
            if p.end >= *hi {
                pieces.push(Piece {
                    end: top.clone(),
                    value: p.value,
                });
                break;
            }
            pieces.push(Piece {
                end: lo.left_subtract(&p.end)?,
                value: p.value,
            });
        }
        Ok(StepFun {
            field: self.field,
            top,
            pieces,
        })
    }

    /// Places translated blocks on `[1, top]`. Uncovered stretches take the
    /// constant `tail` if given and are an error otherwise.
    pub fn assemble(
        field: Field,
        top: Ordinal,
        mut blocks: Vec<Block>,
        tail: Option<C64>,
    ) -> Result<StepFun, FuncError> {
        if top.is_zero() {
            return Err(FuncError::ZeroTop);
        }
        if let Some(t) = tail {
            check_value(field, t)?;
        }
        blocks.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut pieces: Vec<Piece> = Vec::new();
        let mut covered = Ordinal::zero();
        let fill = |pieces: &mut Vec<Piece>, lo: &Ordinal, hi: &Ordinal| match tail {
            Some(t) => {
                push_merged(pieces, hi.clone(), t);
                Ok(())
            }
            None => Err(FuncError::Gap {
                lo: lo.clone(),
                hi: hi.clone(),
            }),
        };
        for b in blocks {
            if b.lo >= b.hi {
                return Err(FuncError::EmptyInterval { lo: b.lo, hi: b.hi });
            }
            if b.hi > top {
                return Err(FuncError::OutOfDomain { p: b.hi, top });
            }
            match b.lo.cmp(&covered) {
                Ordering::Less => return Err(FuncError::Overlap(b.lo)),
                Ordering::Greater => fill(&mut pieces, &covered, &b.lo)?,
                Ordering::Equal => {}
            }
            let expected = b.lo.left_subtract(&b.hi)?;
            if *b.content.top() != expected {
                return Err(FuncError::BlockLength {
                    expected,
                    found: b.content.top,
                });
            }
            if field == Field::Real && b.content.field == Field::Complex {
                return Err(FuncError::FieldMismatch {
                    expected: field,
                    found: b.content.field,
                });
            }
            let last = b.content.pieces.len() - 1;
            for (i, p) in b.content.pieces.into_iter().enumerate() {
                // The final piece ends exactly at `hi`; skip the addition there.
                let end = if i == last { b.hi.clone() } else { b.lo.add(&p.end)? };
                push_merged(&mut pieces, end, p.value);
            }
            covered = b.hi;
        }
        if covered < top {
            fill(&mut pieces, &covered, &top)?;
        }
        Ok(StepFun { field, top, pieces })
    }

    /// Indicator of `(lo, hi]` on `[1, top]`.
    pub fn indicator_interval(
        field: Field,
        top: &Ordinal,
        lo: &Ordinal,
        hi: &Ordinal,
    ) -> Result<StepFun, FuncError> {
        let one = C64::new(1.0, 0.0);
        let content = StepFun::constant(field, lo.left_subtract(hi)?, one)?;
        StepFun::assemble(
            field,
            top.clone(),
            vec![Block {
                lo: lo.clone(),
                hi: hi.clone(),
                content,
            }],
            Some(C64::new(0.0, 0.0)),
        )
    }

    /// Indicator of an isolated point `{p}` on `[1, top]`.
    pub fn indicator_point(field: Field, top: &Ordinal, p: &Ordinal) -> Result<StepFun, FuncError> {
        let Some(prev) = p.predecessor() else {
            return Err(FuncError::NotIsolated(p.clone()));
        };
        Self::indicator_interval(field, top, &prev, p)
    }
}

/// Cells of the common refinement of two piece lists over the same top.
fn refine<'a>(
    f: &'a StepFun,
    g: &'a StepFun,
) -> impl Iterator<Item = (&'a Ordinal, C64, C64)> + 'a {
    let (a, b) = (&f.pieces, &g.pieces);
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        let (pa, pb) = (a.get(i)?, b.get(j)?);
        let cell = (pa.value, pb.value);
        let end = match pa.end.cmp(&pb.end) {
            Ordering::Less => {
                i += 1;
                &pa.end
            }
            Ordering::Greater => {
                j += 1;
                &pb.end
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
                &pa.end
            }
        };
        Some((end, cell.0, cell.1))
    })
}

#[cfg(test)]
mod tests;
