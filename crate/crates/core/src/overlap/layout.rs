//! Block decompositions of the square `[1, w^A] x [1, w^B]` and where each
//! block lands in the codomain `[1, w^(A ⊕ B)]`, for `0 < A <= B`.
//!
//! Both domains are cut by a canonical partition `(P(n-1), P(n)]`. Every case
//! uses the same two block families indexed by `n >= 1`:
//!
//! * `P_n = U_{A, b_n}(f|(F(n-1), w^A], g|(G(n-1), G(n)])`
//! * `Q_n = U_{a_n, B}(f|(F(n-1), F(n)], g|(G(n), w^B])`
//!
//! where `a_n`, `b_n` are the block exponents of the two partitions. Cases
//! differ only in the codomain placement of these blocks and of the constant
//! regions between them.

use serde::Serialize;

use super::OverlapError;
use crate::ordinal::{Ordinal, OrdinalError};

/// The partition of `[1, w^x]` into blocks `(point(n-1), point(n)]`.
///
/// For `x = p + 1` the points are `w^p * n`; for a limit `x` they are
/// `w^(x[n])`. In both cases `point(0) = 0`.
#[derive(Debug, Clone)]
pub(crate) struct Partition {
    exp: Ordinal,
    pred: Option<Ordinal>,
}

impl Partition {
    pub fn new(exp: &Ordinal) -> Self {
        debug_assert!(!exp.is_zero());
        Partition {
            exp: exp.clone(),
            pred: exp.predecessor(),
        }
    }

    pub fn point(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if n == 0 {
            return Ok(Ordinal::zero());
        }
        match &self.pred {
            Some(p) => Ok(Ordinal::monomial(p.clone(), n)),
            None => Ok(Ordinal::omega_pow(self.exp.fundamental_seq(n)?)),
        }
    }

    /// Exponent `e` with `point(n) - point(n-1) = w^e`.
    pub fn block_exp(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        match &self.pred {
            Some(p) => Ok(p.clone()),
            None => self.exp.fundamental_seq(n),
        }
    }

    /// The `n >= 1` with `point(n-1) < s <= point(n)`, for `0 < s < w^x`.
    pub fn index_of(&self, s: &Ordinal) -> Result<u64, OrdinalError> {
        debug_assert!(!s.is_zero());
        if let Some(p) = &self.pred {
            let lead = &s.terms()[0];
            if lead.exp < *p {
                return Ok(1);
            }
            debug_assert!(lead.exp == *p, "{s} is not below w^{}", self.exp);
            return if s.terms().len() > 1 {
                lead.coeff.checked_add(1).ok_or(OrdinalError::Overflow)
            } else {
                Ok(lead.coeff)
            };
        }
        least_index(|n| Ok(self.point(n)? >= *s))
    }
}

/// Least `n >= 1` satisfying a monotone predicate, by galloping then bisection.
pub(crate) fn least_index(
    mut holds: impl FnMut(u64) -> Result<bool, OrdinalError>,
) -> Result<u64, OrdinalError> {
    let mut hi = 1u64;
    while !holds(hi)? {
        hi = hi.checked_mul(2).ok_or(OrdinalError::Overflow)?;
    }
    let mut lo = hi / 2; // predicate fails at lo (or lo == 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    Base,
    Swap,
    Constant,
    SuccSuccDiag,
    SuccSucc,
    SuccLimit,
    LimitBase,
    LimitSucc,
    LimitLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    SuccSucc,
    SuccLimit,
    LimitSucc,
    LimitLimit,
}

/// What fills a codomain interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Part {
    /// `U_{a,b}(f|(f_lo, f_hi], g|(g_lo, g_hi])`, translated onto the interval.
    Sub {
        a: Ordinal,
        b: Ordinal,
        f_lo: Ordinal,
        f_hi: Ordinal,
        g_lo: Ordinal,
        g_hi: Ordinal,
    },
    /// The constant `(f(s) + g(t)) / 2`.
    Half { s: Ordinal, t: Ordinal },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    P(u64),
    Q(u64),
    AfterP(u64),
    AfterQ(u64),
    /// Every block past the explicit rounds of a group; constant.
    Tail,
    /// The supremum of a group and whatever constant stretch follows it.
    Closing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Seg {
    pub lo: Ordinal,
    pub hi: Ordinal,
    pub label: Label,
    pub part: Part,
    /// Empty interval kept only as a record.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
}

/// A run of consecutive rounds filling `(start, sup)` in the codomain.
#[derive(Debug, Clone)]
struct Group {
    start: Ordinal,
    sup: Ordinal,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub a: Ordinal,
    pub b: Ordinal,
    shape: Shape,
    pub fp: Partition,
    pub gp: Partition,
    pub top_f: Ordinal,
    pub top_g: Ordinal,
    pub top: Ordinal,
    /// Block length for the families placed at multiples: `w^(pred A ⊕ B)`
    /// or `w^(A ⊕ pred B)`; two-block period for succ/succ.
    unit: Ordinal,
    groups: Vec<Group>,
}

fn wp(e: Ordinal) -> Ordinal {
    Ordinal::omega_pow(e)
}

impl Layout {
    /// Requires `0 < a <= b`.
    pub fn new(a: &Ordinal, b: &Ordinal) -> Result<Self, OverlapError> {
        debug_assert!(!a.is_zero() && a <= b);
        let shape = match (a.is_successor(), b.is_successor()) {
            (true, true) => Shape::SuccSucc,
            (true, false) => Shape::SuccLimit,
            (false, true) => Shape::LimitSucc,
            (false, false) => Shape::LimitLimit,
        };
        let top = wp(a.natural_sum(b)?);
        let pa = a.predecessor();
        let pb = b.predecessor();
        let (unit, groups) = match shape {
            Shape::SuccSucc => {
                let unit = wp(pa.as_ref().expect("successor").natural_sum(b)?);
                let groups = vec![Group {
                    start: Ordinal::zero(),
                    sup: top.clone(),
                }];
                (unit, groups)
            }
            Shape::SuccLimit => {
                let e = pa.as_ref().expect("successor").natural_sum(b)?;
                let gamma = Ordinal::sup_natural_sum(a, b)?;
                let groups = vec![
                    Group {
                        start: Ordinal::zero(),
                        sup: wp(gamma),
                    },
                    Group {
                        start: wp(e.clone()),
                        sup: wp(e.successor()?),
                    },
                ];
                (wp(e), groups)
            }
            Shape::LimitSucc => {
                let e = a.natural_sum(pb.as_ref().expect("successor"))?;
                let gamma = Ordinal::sup_natural_sum(b, a)?;
                let groups = vec![
                    Group {
                        start: Ordinal::zero(),
                        sup: wp(gamma),
                    },
                    Group {
                        start: wp(e.clone()),
                        sup: wp(e.successor()?),
                    },
                ];
                (wp(e), groups)
            }
            Shape::LimitLimit => {
                let gamma = Ordinal::sup_natural_sum(b, a)?.max_of(&Ordinal::sup_natural_sum(a, b)?);
                let groups = vec![Group {
                    start: Ordinal::zero(),
                    sup: wp(gamma),
                }];
                (Ordinal::zero(), groups)
            }
        };
        Ok(Layout {
            a: a.clone(),
            b: b.clone(),
            shape,
            fp: Partition::new(a),
            gp: Partition::new(b),
            top_f: wp(a.clone()),
            top_g: wp(b.clone()),
            top,
            unit,
            groups,
        })
    }

    pub fn tag(&self) -> CaseTag {
        match self.shape {
            Shape::SuccSucc if self.a == self.b => CaseTag::SuccSuccDiag,
            Shape::SuccSucc => CaseTag::SuccSucc,
            Shape::SuccLimit => CaseTag::SuccLimit,
            Shape::LimitSucc => CaseTag::LimitSucc,
            Shape::LimitLimit if self.a == self.b => CaseTag::LimitBase,
            Shape::LimitLimit => CaseTag::LimitLimit,
        }
    }

    pub fn p_part(&self, n: u64) -> Result<Part, OrdinalError> {
        Ok(Part::Sub {
            a: self.a.clone(),
            b: self.gp.block_exp(n)?,
            f_lo: self.fp.point(n - 1)?,
            f_hi: self.top_f.clone(),
            g_lo: self.gp.point(n - 1)?,
            g_hi: self.gp.point(n)?,
        })
    }

    pub fn q_part(&self, n: u64) -> Result<Part, OrdinalError> {
        Ok(Part::Sub {
            a: self.fp.block_exp(n)?,
            b: self.b.clone(),
            f_lo: self.fp.point(n - 1)?,
            f_hi: self.fp.point(n)?,
            g_lo: self.gp.point(n)?,
            g_hi: self.top_g.clone(),
        })
    }

    /// `max(a_n ⊕ B, A ⊕ b_n)`; only meaningful for two limit exponents.
    fn gamma_n(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        let x = self.a.fundamental_seq(n)?.natural_sum(&self.b)?;
        let y = self.a.natural_sum(&self.b.fundamental_seq(n)?)?;
        Ok(x.max_of(&y))
    }

    /// `w^(gamma_n) * 2`, zero for `n = 0`.
    fn limit_round_end(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if n == 0 {
            return Ok(Ordinal::zero());
        }
        wp(self.gamma_n(n)?).mul_nat(2)
    }

    fn seg(lo: Ordinal, hi: Ordinal, label: Label, part: Part) -> Seg {
        Seg {
            lo,
            hi,
            label,
            part,
            skipped: false,
        }
    }

    pub fn p_seg(&self, n: u64) -> Result<Seg, OrdinalError> {
        let (lo, hi) = match self.shape {
            Shape::SuccSucc => (self.unit.mul_nat(2 * n - 2)?, self.unit.mul_nat(2 * n - 1)?),
            Shape::SuccLimit => {
                let at = |k: u64| -> Result<Ordinal, OrdinalError> {
                    if k == 0 {
                        return Ok(Ordinal::zero());
                    }
                    Ok(wp(self.a.natural_sum(&self.b.fundamental_seq(k)?)?))
                };
                (at(n - 1)?, at(n)?)
            }
            Shape::LimitSucc => (self.unit.mul_nat(n)?, self.unit.mul_nat(n + 1)?),
            Shape::LimitLimit => {
                let lo = self.limit_round_end(n - 1)?;
                let len = wp(self.a.natural_sum(&self.b.fundamental_seq(n)?)?);
                let hi = lo.add(&len)?;
                (lo, hi)
            }
        };
        Ok(Self::seg(lo, hi, Label::P(n), self.p_part(n)?))
    }

    pub fn q_seg(&self, n: u64) -> Result<Seg, OrdinalError> {
        let (lo, hi) = match self.shape {
            Shape::SuccSucc => (self.unit.mul_nat(2 * n - 1)?, self.unit.mul_nat(2 * n)?),
            Shape::SuccLimit => (self.unit.mul_nat(n)?, self.unit.mul_nat(n + 1)?),
            Shape::LimitSucc => {
                let at = |k: u64| -> Result<Ordinal, OrdinalError> {
                    if k == 0 {
                        return Ok(Ordinal::zero());
                    }
                    Ok(wp(self.a.fundamental_seq(k)?.natural_sum(&self.b)?))
                };
                (at(n - 1)?, at(n)?)
            }
            Shape::LimitLimit => {
                let lo = wp(self.gamma_n(n)?);
                let len = wp(self.a.fundamental_seq(n)?.natural_sum(&self.b)?);
                let hi = lo.add(&len)?;
                (lo, hi)
            }
        };
        Ok(Self::seg(lo, hi, Label::Q(n), self.q_part(n)?))
    }

    /// The segments of round `n` of group `g`, in codomain order. Empty
    /// constant stretches are included with `skipped` set.
    pub fn round(&self, g: usize, n: u64) -> Result<Vec<Seg>, OrdinalError> {
        Ok(match (self.shape, g) {
            (Shape::SuccSucc, _) => vec![self.p_seg(n)?, self.q_seg(n)?],
            (Shape::SuccLimit, 0) | (Shape::LimitSucc, 1) => vec![self.p_seg(n)?],
            (Shape::SuccLimit, _) | (Shape::LimitSucc, _) => vec![self.q_seg(n)?],
            (Shape::LimitLimit, _) => {
                let p = self.p_seg(n)?;
                let q = self.q_seg(n)?;
                let after_p = Seg {
                    lo: p.hi.clone(),
                    hi: q.lo.clone(),
                    label: Label::AfterP(n),
                    part: Part::Half {
                        s: self.top_f.clone(),
                        t: self.gp.point(n)?,
                    },
                    skipped: p.hi == q.lo,
                };
                let end = self.limit_round_end(n)?;
                let after_q = Seg {
                    skipped: q.hi == end,
                    lo: q.hi.clone(),
                    hi: end,
                    label: Label::AfterQ(n),
                    part: Part::Half {
                        s: self.fp.point(n)?,
                        t: self.top_g.clone(),
                    },
                };
                vec![p, after_p, q, after_q]
            }
        })
    }

    pub fn round_end(&self, g: usize, n: u64) -> Result<Ordinal, OrdinalError> {
        Ok(self.round(g, n)?.pop().expect("rounds are nonempty").hi)
    }

    fn top_half(&self) -> Part {
        Part::Half {
            s: self.top_f.clone(),
            t: self.top_g.clone(),
        }
    }

    /// The full decomposition of the codomain with `rounds` explicit rounds per
    /// group; everything else is tail or closing and carries the top value.
    pub fn decomposition(&self, rounds: u64) -> Result<Vec<Seg>, OrdinalError> {
        let mut out = Vec::new();
        for (g, group) in self.groups.iter().enumerate() {
            let mut at = group.start.clone();
            for n in 1..=rounds {
                let segs = self.round(g, n)?;
                at = segs.last().expect("nonempty").hi.clone();
                out.extend(segs);
            }
            out.push(Seg {
                skipped: at == group.sup,
                lo: at,
                hi: group.sup.clone(),
                label: Label::Tail,
                part: self.top_half(),
            });
            let next = self.groups.get(g + 1).map_or(&self.top, |n| &n.start);
            out.push(Seg {
                skipped: group.sup == *next,
                lo: group.sup.clone(),
                hi: next.clone(),
                label: Label::Closing,
                part: self.top_half(),
            });
        }
        Ok(out)
    }

    /// The group and round containing `r`, if `r` lies strictly inside a group.
    pub fn locate(&self, r: &Ordinal) -> Result<Option<(usize, u64)>, OrdinalError> {
        for (g, group) in self.groups.iter().enumerate() {
            if group.start < *r && *r < group.sup {
                let n = least_index(|n| Ok(self.round_end(g, n)? >= *r))?;
                return Ok(Some((g, n)));
            }
        }
        Ok(None)
    }

    /// Checks that `segs` tiles `(0, top]` contiguously, that every block has
    /// the length of its sub-codomain and, for two limit exponents, that the
    /// round exponents strictly increase through round `rounds + 1`.
    pub fn validate(&self, segs: &[Seg], rounds: u64) -> Result<(), OverlapError> {
        let bad = |msg: String| Err(OverlapError::Invariant(msg));
        let mut at = Ordinal::zero();
        for s in segs {
            if s.lo != at {
                return bad(format!("{:?} starts at {} but coverage ends at {at}", s.label, s.lo));
            }
            if s.skipped {
                if s.lo != s.hi {
                    return bad(format!("{:?} marked skipped but nonempty", s.label));
                }
                continue;
            }
            if s.lo >= s.hi {
                return bad(format!("{:?} is empty or reversed: ({}, {}]", s.label, s.lo, s.hi));
            }
            if let Part::Sub { a, b, .. } = &s.part {
                let len = s.lo.left_subtract(&s.hi)?;
                let want = wp(a.natural_sum(b)?);
                if len != want {
                    return bad(format!("{:?} has length {len}, expected {want}", s.label));
                }
            }
            at = s.hi.clone();
        }
        if at != self.top {
            return bad(format!("coverage ends at {at}, expected {}", self.top));
        }
        if self.shape == Shape::LimitLimit {
            let mut prev = None;
            for n in 1..=rounds + 1 {
                let g = self.gamma_n(n)?;
                if prev.as_ref().is_some_and(|p| *p >= g) {
                    return bad(format!("round exponent does not increase at round {n}"));
                }
                prev = Some(g);
            }
        }
        Ok(())
    }
}
