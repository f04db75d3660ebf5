//! Concrete embeddings built from step functions and the overlap maps.
//!
//! * the complex `c0` system `x^(n)` in `C_0[1, w^2)`;
//! * the real embedding `Tf = U_{a,a}(f, f)`;
//! * the complex embedding `Tf = (U_{a,a}(f, f), U_{a,a}(f, i f))`, stored as
//!   one function on the doubled interval `[1, w^(a ⊙ 2) * 2]`;
//! * constant extension `C[1, w^a] -> C[1, w^b]` for `a < b`.

use serde::{Deserialize, Serialize};

use crate::funcspace::{Block, Field, FuncError, StepFun, C64};
use crate::ordinal::{Ordinal, OrdinalError};
use crate::overlap::{overlap_map, witness_point as overlap_witness, OverlapError, WitnessPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("index must be at least 1")]
    ZeroIndex,
    #[error("pair witnesses need m < n, got m = {m}, n = {n}")]
    PairOrder { m: u64, n: u64 },
    #[error("{kind} embedding expects a {expected} input, found {found}")]
    WrongField {
        kind: EmbeddingKind,
        expected: Field,
        found: Field,
    },
    #[error("expected an input on [1, {expected}], found [1, {found}]")]
    WrongDomain { expected: Ordinal, found: Ordinal },
    #[error("constant extension needs a < b, got a = {a}, b = {b}")]
    NotAbove { a: Ordinal, b: Ordinal },
    #[error("c0 input must vanish beyond index {bound}; it is {value} at {at}")]
    NotVanishing { bound: u64, at: Ordinal, value: C64 },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    C0,
    RealSpr,
    ComplexSpr,
    IntervalExtension,
}

impl std::fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EmbeddingKind::C0 => "c0",
            EmbeddingKind::RealSpr => "real",
            EmbeddingKind::ComplexSpr => "complex",
            EmbeddingKind::IntervalExtension => "interval-extension",
        })
    }
}

/// The SPR constant an embedding is known to achieve, and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    /// `None` when only a qualitative statement is available.
    pub constant: Option<f64>,
    pub basis: &'static str,
}

/// `w * k + j`.
fn omega_k_plus(k: u64, j: u64) -> Ordinal {
    let mut terms = Vec::new();
    if k > 0 {
        terms.push((Ordinal::one(), k));
    }
    if j > 0 {
        terms.push((Ordinal::zero(), j));
    }
    Ordinal::from_terms(terms).expect("exponents 1 > 0 are decreasing")
}

fn omega_squared() -> Ordinal {
    Ordinal::omega_pow(Ordinal::nat(2))
}

/// The `n`-th vector of the complex `c0` system on `[1, w^2]`: the point `n`
/// carries 1, the block `(w*n, w*(n+1)]` carries 1/2, and for `2 <= m <= n`
/// the points `w*(m-1) + 2n - 1` and `w*(m-1) + 2n` carry 1/2 and i/2.
pub fn c0_basis(n: u64) -> Result<StepFun, EmbeddingError> {
    if n == 0 {
        return Err(EmbeddingError::ZeroIndex);
    }
    let zero = C64::new(0.0, 0.0);
    let mut pieces = Vec::new();
    if n > 1 {
        pieces.push((Ordinal::nat(n - 1), zero));
    }
    pieces.push((Ordinal::nat(n), C64::new(1.0, 0.0)));
    for m in 2..=n {
        pieces.push((omega_k_plus(m - 1, 2 * n - 2), zero));
        pieces.push((omega_k_plus(m - 1, 2 * n - 1), C64::new(0.5, 0.0)));
        pieces.push((omega_k_plus(m - 1, 2 * n), C64::new(0.0, 0.5)));
    }
    pieces.push((omega_k_plus(n, 0), zero));
    pieces.push((omega_k_plus(n + 1, 0), C64::new(0.5, 0.0)));
    pieces.push((omega_squared(), zero));
    Ok(StepFun::new(Field::Complex, omega_squared(), pieces)?)
}

/// `sum_k alphas[k-1] * x^(k)`.
pub fn c0_combination(alphas: &[C64]) -> Result<StepFun, EmbeddingError> {
    if alphas.is_empty() {
        return Ok(StepFun::zero(Field::Complex, omega_squared())?);
    }
    let basis = (1..=alphas.len() as u64).map(c0_basis).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&StepFun> = basis.iter().collect();
    Ok(StepFun::linear_combine(alphas, &refs)?)
}

/// `r_n = n`.
pub fn c0_point_witness(n: u64) -> Result<WitnessPoint, EmbeddingError> {
    if n == 0 {
        return Err(EmbeddingError::ZeroIndex);
    }
    Ok(WitnessPoint {
        point: Ordinal::nat(n),
        source: (Ordinal::nat(n), Ordinal::nat(n)),
    })
}

/// `(r_{m,n}, r~_{m,n}) = (w*m + 2n - 1, w*m + 2n)` for `1 <= m < n`.
pub fn c0_pair_witnesses(m: u64, n: u64) -> Result<(WitnessPoint, WitnessPoint), EmbeddingError> {
    if m == 0 {
        return Err(EmbeddingError::ZeroIndex);
    }
    if m >= n {
        return Err(EmbeddingError::PairOrder { m, n });
    }
    let source = (Ordinal::nat(m), Ordinal::nat(n));
    Ok((
        WitnessPoint {
            point: omega_k_plus(m, 2 * n - 1),
            source: source.clone(),
        },
        WitnessPoint {
            point: omega_k_plus(m, 2 * n),
            source,
        },
    ))
}

fn require_field(kind: EmbeddingKind, f: &StepFun, expected: Field) -> Result<(), EmbeddingError> {
    if f.field() != expected {
        return Err(EmbeddingError::WrongField {
            kind,
            expected,
            found: f.field(),
        });
    }
    Ok(())
}

fn require_top(f: &StepFun, expected: &Ordinal) -> Result<(), EmbeddingError> {
    if f.top() != expected {
        return Err(EmbeddingError::WrongDomain {
            expected: expected.clone(),
            found: f.top().clone(),
        });
    }
    Ok(())
}

/// `Tf = U_{a,a}(f, f)` on `[1, w^(a ⊙ 2)]`.
pub fn embed_real(a: &Ordinal, f: &StepFun) -> Result<StepFun, EmbeddingError> {
    require_field(EmbeddingKind::RealSpr, f, Field::Real)?;
    Ok(overlap_map(a, a, f, f)?)
}

/// `U_{a,a}(f, f)` on `(0, w^(a ⊙ 2)]` followed by `U_{a,a}(f, i f)` on
/// `(w^(a ⊙ 2), w^(a ⊙ 2) * 2]`.
pub fn embed_complex(a: &Ordinal, f: &StepFun) -> Result<StepFun, EmbeddingError> {
    require_field(EmbeddingKind::ComplexSpr, f, Field::Complex)?;
    let plain = overlap_map(a, a, f, f)?;
    let rotated = overlap_map(a, a, f, &f.scale(C64::new(0.0, 1.0))?)?;
    let half = plain.top().clone();
    let top = half.mul_nat(2)?;
    let blocks = vec![
        Block {
            lo: Ordinal::zero(),
            hi: half.clone(),
            content: plain,
        },
        Block {
            lo: half,
            hi: top.clone(),
            content: rotated,
        },
    ];
    Ok(StepFun::assemble(Field::Complex, top, blocks, None)?)
}

/// Extends `f` on `[1, w^a]` to `[1, w^b]` by the constant `f(w^a)`.
pub fn interval_extend(f: &StepFun, a: &Ordinal, b: &Ordinal) -> Result<StepFun, EmbeddingError> {
    if a >= b {
        return Err(EmbeddingError::NotAbove { a: a.clone(), b: b.clone() });
    }
    require_top(f, &Ordinal::omega_pow(a.clone()))?;
    let blocks = vec![Block {
        lo: Ordinal::zero(),
        hi: f.top().clone(),
        content: f.clone(),
    }];
    Ok(StepFun::assemble(
        f.field(),
        Ordinal::omega_pow(b.clone()),
        blocks,
        Some(f.top_value()),
    )?)
}

/// A linear isometric embedding together with its witness points.
///
/// Sources live on `[1, source_top]`. For the `c0` system the source is a
/// finitely supported sequence, given as a function on `[1, w]` that vanishes
/// on `(bound, w]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    /// Source exponent; the `c0` system uses `a = 1`.
    pub alpha: Ordinal,
    /// Index bound of the `c0` system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Target exponent of a constant extension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Ordinal>,
    pub source_top: Ordinal,
    pub codomain_top: Ordinal,
    pub field: Field,
    pub claim: Claim,
}

impl Embedding {
    pub fn c0(bound: u64) -> Result<Self, EmbeddingError> {
        if bound == 0 {
            return Err(EmbeddingError::ZeroIndex);
        }
        Ok(Embedding {
            kind: EmbeddingKind::C0,
            alpha: Ordinal::one(),
            bound: Some(bound),
            beta: None,
            source_top: Ordinal::omega(),
            codomain_top: omega_squared(),
            field: Field::Complex,
            claim: Claim {
                constant: None,
                basis: "relaxed witness condition; SPR holds with an unspecified constant",
            },
        })
    }

    pub fn real(a: &Ordinal) -> Result<Self, EmbeddingError> {
        Ok(Embedding {
            kind: EmbeddingKind::RealSpr,
            alpha: a.clone(),
            bound: None,
            beta: None,
            source_top: Ordinal::omega_pow(a.clone()),
            codomain_top: Ordinal::omega_pow(a.nat_double()?),
            field: Field::Real,
            claim: Claim {
                constant: Some(3.0),
                basis: "normalised images overlap by at least 1/3",
            },
        })
    }

    pub fn complex(a: &Ordinal) -> Result<Self, EmbeddingError> {
        Ok(Embedding {
            kind: EmbeddingKind::ComplexSpr,
            alpha: a.clone(),
            bound: None,
            beta: None,
            source_top: Ordinal::omega_pow(a.clone()),
            codomain_top: Ordinal::omega_pow(a.nat_double()?).mul_nat(2)?,
            field: Field::Complex,
            claim: Claim {
                constant: None,
                basis: "plain and rotated witnesses; only a delta certificate is quantitative",
            },
        })
    }

    pub fn interval_extension(a: &Ordinal, b: &Ordinal, field: Field) -> Result<Self, EmbeddingError> {
        if a >= b {
            return Err(EmbeddingError::NotAbove { a: a.clone(), b: b.clone() });
        }
        Ok(Embedding {
            kind: EmbeddingKind::IntervalExtension,
            alpha: a.clone(),
            bound: None,
            beta: Some(b.clone()),
            source_top: Ordinal::omega_pow(a.clone()),
            codomain_top: Ordinal::omega_pow(b.clone()),
            field,
            claim: Claim {
                constant: None,
                basis: "unital lattice isometry; an SPR subspace keeps its constant under it",
            },
        })
    }

    /// Source field the embedding accepts.
    pub fn source_field(&self) -> Field {
        self.field
    }

    pub fn apply(&self, f: &StepFun) -> Result<StepFun, EmbeddingError> {
        require_top(f, &self.source_top)?;
        match self.kind {
            EmbeddingKind::C0 => {
                let bound = self.bound.expect("c0 embeddings carry a bound");
                let cut = Ordinal::nat(bound);
                // A piece ending past the bound contains a point past it.
                for p in f.pieces() {
                    if p.end > cut && p.value != C64::new(0.0, 0.0) {
                        return Err(EmbeddingError::NotVanishing {
                            bound,
                            at: p.end.clone(),
                            value: p.value,
                        });
                    }
                }
                let alphas = (1..=bound)
                    .map(|k| f.eval(&Ordinal::nat(k)))
                    .collect::<Result<Vec<_>, _>>()?;
                c0_combination(&alphas)
            }
            EmbeddingKind::RealSpr => embed_real(&self.alpha, f),
            EmbeddingKind::ComplexSpr => embed_complex(&self.alpha, f),
            EmbeddingKind::IntervalExtension => {
                require_field(self.kind, f, self.field)?;
                let b = self.beta.as_ref().expect("extensions carry a target exponent");
                interval_extend(f, &self.alpha, b)
            }
        }
    }

    fn check_source_point(&self, s: &Ordinal) -> Result<(), EmbeddingError> {
        if s.is_zero() || *s > self.source_top {
            return Err(OverlapError::OutOfRange {
                p: s.clone(),
                top: self.source_top.clone(),
            }
            .into());
        }
        Ok(())
    }

    /// `r_s` with `Tf(r_s) = f(s)` for every source `f`.
    pub fn witness_point(&self, s: &Ordinal) -> Result<WitnessPoint, EmbeddingError> {
        self.check_source_point(s)?;
        let point = match self.kind {
            // w^2 for the point w, where every source vanishes.
            EmbeddingKind::C0 => match s.as_nat() {
                Some(n) => c0_point_witness(n)?.point,
                None => omega_squared(),
            },
            EmbeddingKind::RealSpr | EmbeddingKind::ComplexSpr => {
                overlap_witness(&self.alpha, &self.alpha, s, s)?.point
            }
            EmbeddingKind::IntervalExtension => s.clone(),
        };
        Ok(WitnessPoint {
            point,
            source: (s.clone(), s.clone()),
        })
    }

    /// `r_{s,t}` with `Tf(r_{s,t}) = (f(s) + f(t)) / 2`; `None` when the
    /// embedding has no such point.
    pub fn witness_pair(&self, s: &Ordinal, t: &Ordinal) -> Result<Option<WitnessPoint>, EmbeddingError> {
        self.check_source_point(s)?;
        self.check_source_point(t)?;
        if s == t {
            return self.witness_point(s).map(Some);
        }
        let point = match self.kind {
            EmbeddingKind::C0 => c0_mixed_point(s, t, 1)?,
            EmbeddingKind::RealSpr | EmbeddingKind::ComplexSpr => {
                overlap_witness(&self.alpha, &self.alpha, s, t)?.point
            }
            EmbeddingKind::IntervalExtension => return Ok(None),
        };
        Ok(Some(WitnessPoint {
            point,
            source: (s.clone(), t.clone()),
        }))
    }

    /// `r~` with `Tf(r~) = (f(u) + i f(v)) / 2` where `(u, v)` is the recorded
    /// source, which is `(s, t)` or `(t, s)`. `None` when no such point exists.
    pub fn witness_rotated(&self, s: &Ordinal, t: &Ordinal) -> Result<Option<WitnessPoint>, EmbeddingError> {
        self.check_source_point(s)?;
        self.check_source_point(t)?;
        match self.kind {
            EmbeddingKind::C0 => {
                if s == t {
                    return Ok(None);
                }
                let (u, v) = if s < t { (s, t) } else { (t, s) };
                Ok(Some(WitnessPoint {
                    point: c0_mixed_point(u, v, 0)?,
                    source: (u.clone(), v.clone()),
                }))
            }
            EmbeddingKind::ComplexSpr => {
                let shift = Ordinal::omega_pow(self.alpha.nat_double()?);
                let r = overlap_witness(&self.alpha, &self.alpha, s, t)?.point;
                Ok(Some(WitnessPoint {
                    point: shift.add(&r)?,
                    source: (s.clone(), t.clone()),
                }))
            }
            EmbeddingKind::RealSpr | EmbeddingKind::IntervalExtension => Ok(None),
        }
    }
}

/// Pair witnesses of the `c0` system for distinct `s, t` in `[1, w]`; `back`
/// is 1 for the plain point `w*m + 2n - 1` and 0 for the rotated `w*m + 2n`.
fn c0_mixed_point(s: &Ordinal, t: &Ordinal, back: u64) -> Result<Ordinal, EmbeddingError> {
    let (lo, hi) = if s < t { (s, t) } else { (t, s) };
    let m = lo.as_nat().expect("the smaller of two distinct points of [1, w] is finite");
    match hi.as_nat() {
        Some(n) => Ok(omega_k_plus(m, 2 * n - back)),
        // Every source vanishes at w; the block after w*m carries alpha_m / 2.
        None => Ok(omega_k_plus(m, 1)),
    }
}
