//! The overlap maps `U_{a,b}: C[1, w^a] x C[1, w^b] -> C[1, w^(a ⊕ b)]`.
//!
//! `U` is linear, contractive, and every output value has the form
//! `(f(s) + g(t)) / 2`. Conversely every pair `(s, t)` is realised at some
//! witness point. The construction recurses on `(a, b)` through the block
//! layouts in [`layout`]; since inputs are locally constant, all but finitely
//! many blocks are constant and are emitted as a single tail value.

mod check;
mod layout;

use serde::Serialize;

use crate::funcspace::{Block, Field, FuncError, StepFun, C64};
use crate::ordinal::{Ordinal, OrdinalError};

pub use check::{
    check_overlap_properties, check_overlap_properties_with, random_point, PropertyReport, PropertyResult,
};
pub use layout::{CaseTag, Label, Part, Seg};
use layout::{Layout, Part as P};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OverlapError {
    #[error("{which} input lives on [1, {found}], expected [1, {expected}]")]
    DomainMismatch {
        which: &'static str,
        expected: Ordinal,
        found: Ordinal,
    },
    #[error("point {p} lies outside [1, {top}]")]
    OutOfRange { p: Ordinal, top: Ordinal },
    #[error("recursion depth limit {0} reached")]
    TooDeep(usize),
    #[error("representation too large: {0}")]
    TooLarge(String),
    #[error("internal decomposition invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Func(#[from] FuncError),
}

#[derive(Debug, Clone)]
pub struct OverlapConfig {
    pub max_depth: usize,
    /// Explicit rounds allowed per recursion node.
    pub max_rounds: u64,
    /// Pieces allowed in any intermediate or final result.
    pub max_pieces: usize,
    /// Re-check every decomposition; on by default in debug and test builds.
    pub validate: bool,
    /// Added to every tail value. Only for exercising the checkers.
    pub tail_offset: f64,
}

impl Default for OverlapConfig {
    fn default() -> Self {
        OverlapConfig {
            max_depth: 256,
            max_rounds: 1 << 16,
            max_pieces: 1 << 22,
            validate: cfg!(debug_assertions),
            tail_offset: 0.0,
        }
    }
}

/// A codomain point together with the source points it stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessPoint {
    pub point: Ordinal,
    pub source: (Ordinal, Ordinal),
}

/// One node of the recursion, as dumped for debugging.
#[derive(Debug, Clone, Serialize)]
pub struct CaseTree {
    pub tag: CaseTag,
    pub a: Ordinal,
    pub b: Ordinal,
    pub rounds: u64,
    pub intervals: Vec<TracedSeg>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TracedSeg {
    #[serde(flatten)]
    pub seg: Seg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub child: Option<Box<CaseTree>>,
}

/// The recorded decomposition of one `U_{a,b}` instance.
#[derive(Debug, Clone, Serialize)]
pub struct OverlapCase {
    pub tag: CaseTag,
    pub a: Ordinal,
    pub b: Ordinal,
    pub rounds: u64,
    pub intervals: Vec<Seg>,
}

fn half(v: C64, w: C64) -> C64 {
    (v + w) * 0.5
}

fn check_top(which: &'static str, f: &StepFun, e: &Ordinal) -> Result<(), OverlapError> {
    let expected = Ordinal::omega_pow(e.clone());
    if *f.top() != expected {
        return Err(OverlapError::DomainMismatch {
            which,
            expected,
            found: f.top().clone(),
        });
    }
    Ok(())
}

fn check_point(p: &Ordinal, top: &Ordinal) -> Result<(), OverlapError> {
    if p.is_zero() || p > top {
        return Err(OverlapError::OutOfRange {
            p: p.clone(),
            top: top.clone(),
        });
    }
    Ok(())
}

/// Number of explicit rounds: blocks from round `rounds + 1` on see only the
/// last pieces of `f` and `g`.
fn explicit_rounds(layout: &Layout, f: &StepFun, g: &StepFun) -> Result<u64, OrdinalError> {
    let k = |p: &layout::Partition, h: &StepFun| -> Result<u64, OrdinalError> {
        if h.is_constant() {
            Ok(0)
        } else {
            p.index_of(&h.tail_start())
        }
    };
    Ok(k(&layout.fp, f)?.max(k(&layout.gp, g)?))
}

/// The decomposition `overlap_map` uses for these inputs; `a, b` in either order.
pub fn overlap_case(a: &Ordinal, b: &Ordinal, f: &StepFun, g: &StepFun) -> Result<OverlapCase, OverlapError> {
    check_top("first", f, a)?;
    check_top("second", g, b)?;
    if a.is_zero() || b.is_zero() || (f.is_constant() && g.is_constant()) {
        let tag = if f.is_constant() && g.is_constant() {
            CaseTag::Constant
        } else {
            CaseTag::Base
        };
        return Ok(OverlapCase {
            tag,
            a: a.clone(),
            b: b.clone(),
            rounds: 0,
            intervals: Vec::new(),
        });
    }
    if a > b {
        let mut c = overlap_case(b, a, g, f)?;
        c.tag = CaseTag::Swap;
        return Ok(c);
    }
    let layout = Layout::new(a, b)?;
    let rounds = explicit_rounds(&layout, f, g)?;
    let intervals = layout.decomposition(rounds)?;
    layout.validate(&intervals, rounds)?;
    Ok(OverlapCase {
        tag: layout.tag(),
        a: a.clone(),
        b: b.clone(),
        rounds,
        intervals,
    })
}

pub fn overlap_map(a: &Ordinal, b: &Ordinal, f: &StepFun, g: &StepFun) -> Result<StepFun, OverlapError> {
    overlap_map_with(&OverlapConfig::default(), a, b, f, g)
}

pub fn overlap_map_with(
    cfg: &OverlapConfig,
    a: &Ordinal,
    b: &Ordinal,
    f: &StepFun,
    g: &StepFun,
) -> Result<StepFun, OverlapError> {
    Ok(Builder { cfg, trace: false }.run(a, b, f, g, 0)?.0)
}

/// Like [`overlap_map_with`], also returning the full recursion tree.
pub fn overlap_map_traced(
    cfg: &OverlapConfig,
    a: &Ordinal,
    b: &Ordinal,
    f: &StepFun,
    g: &StepFun,
) -> Result<(StepFun, CaseTree), OverlapError> {
    let (h, tree) = Builder { cfg, trace: true }.run(a, b, f, g, 0)?;
    Ok((h, tree.expect("tracing enabled")))
}

struct Builder<'a> {
    cfg: &'a OverlapConfig,
    trace: bool,
}

type Built = (StepFun, Option<CaseTree>);

impl Builder<'_> {
    fn leaf(&self, tag: CaseTag, a: &Ordinal, b: &Ordinal, h: StepFun) -> Built {
        let tree = self.trace.then(|| CaseTree {
            tag,
            a: a.clone(),
            b: b.clone(),
            rounds: 0,
            intervals: Vec::new(),
        });
        (h, tree)
    }

    fn run(&self, a: &Ordinal, b: &Ordinal, f: &StepFun, g: &StepFun, depth: usize) -> Result<Built, OverlapError> {
        if depth > self.cfg.max_depth {
            return Err(OverlapError::TooDeep(self.cfg.max_depth));
        }
        check_top("first", f, a)?;
        check_top("second", g, b)?;
        let field = f.field().join(g.field());
        if f.is_constant() && g.is_constant() {
            let top = Ordinal::omega_pow(a.natural_sum(b)?);
            let h = StepFun::constant(field, top, half(f.top_value(), g.top_value()))?;
            return Ok(self.leaf(CaseTag::Constant, a, b, h));
        }
        if a.is_zero() {
            let c = f.top_value();
            let h = StepFun::new(
                field,
                g.top().clone(),
                g.pieces().iter().map(|p| (p.end.clone(), half(c, p.value))).collect(),
            )?;
            return Ok(self.leaf(CaseTag::Base, a, b, h));
        }
        if a > b {
            let (h, child) = self.run(b, a, g, f, depth + 1)?;
            let tree = child.map(|c| CaseTree {
                tag: CaseTag::Swap,
                a: a.clone(),
                b: b.clone(),
                rounds: 0,
                intervals: vec![TracedSeg {
                    seg: Seg {
                        lo: Ordinal::zero(),
                        hi: h.top().clone(),
                        label: Label::Closing,
                        part: P::Sub {
                            a: b.clone(),
                            b: a.clone(),
                            f_lo: Ordinal::zero(),
                            f_hi: g.top().clone(),
                            g_lo: Ordinal::zero(),
                            g_hi: f.top().clone(),
                        },
                        skipped: false,
                    },
                    child: Some(Box::new(c)),
                }],
            });
            return Ok((h, tree));
        }

        let layout = Layout::new(a, b)?;
        let rounds = explicit_rounds(&layout, f, g)?;
        if rounds > self.cfg.max_rounds {
            return Err(OverlapError::TooLarge(format!(
                "U_{{{a},{b}}} needs {rounds} explicit rounds (limit {})",
                self.cfg.max_rounds
            )));
        }
        let segs = layout.decomposition(rounds)?;
        let tail = half(f.top_value(), g.top_value()) + self.cfg.tail_offset;
        if self.cfg.validate {
            layout.validate(&segs, rounds)?;
            self.check_tail_round(&layout, rounds, f, g)?;
        }

        let mut blocks = Vec::with_capacity(segs.len());
        let mut traced = Vec::new();
        for seg in segs {
            if seg.skipped || seg.label == Label::Tail {
                if self.trace {
                    traced.push(TracedSeg { seg, child: None });
                }
                continue;
            }
            let len = seg.lo.left_subtract(&seg.hi)?;
            let (content, child) = match &seg.part {
                P::Half { s, t } => {
                    let v = half(f.eval(s)?, g.eval(t)?);
                    (StepFun::constant(field, len, v)?, None)
                }
                P::Sub {
                    a: sa,
                    b: sb,
                    f_lo,
                    f_hi,
                    g_lo,
                    g_hi,
                } => {
                    let fr = f.restrict(f_lo, f_hi)?;
                    let gr = g.restrict(g_lo, g_hi)?;
                    self.run(sa, sb, &fr, &gr, depth + 1)?
                }
            };
            blocks.push(Block {
                lo: seg.lo.clone(),
                hi: seg.hi.clone(),
                content,
            });
            if self.trace {
                traced.push(TracedSeg {
                    seg,
                    child: child.map(Box::new),
                });
            }
        }
        let h = StepFun::assemble(field, layout.top.clone(), blocks, Some(tail))?;
        if h.num_pieces() > self.cfg.max_pieces {
            return Err(OverlapError::TooLarge(format!(
                "{} pieces exceed the limit {}",
                h.num_pieces(),
                self.cfg.max_pieces
            )));
        }
        let tree = self.trace.then(|| CaseTree {
            tag: layout.tag(),
            a: a.clone(),
            b: b.clone(),
            rounds,
            intervals: traced,
        });
        Ok((h, tree))
    }

    /// Every part of the first implicit round must see only the top values.
    fn check_tail_round(&self, layout: &Layout, rounds: u64, f: &StepFun, g: &StepFun) -> Result<(), OverlapError> {
        let (vf, vg) = (f.top_value(), g.top_value());
        for part in [layout.p_part(rounds + 1)?, layout.q_part(rounds + 1)?] {
            let P::Sub {
                f_lo,
                f_hi,
                g_lo,
                g_hi,
                ..
            } = part
            else {
                unreachable!("block families are sub-instances")
            };
            let fr = f.restrict(&f_lo, &f_hi)?;
            let gr = g.restrict(&g_lo, &g_hi)?;
            if !(fr.is_constant() && gr.is_constant() && fr.top_value() == vf && gr.top_value() == vg) {
                return Err(OverlapError::Invariant(format!(
                    "round {} of U_{{{},{}}} is not in the tail",
                    rounds + 1,
                    layout.a,
                    layout.b
                )));
            }
        }
        Ok(())
    }
}

/// A point `r` of `[1, w^(a ⊕ b)]` with `U(f, g)(r) = (f(s) + g(t)) / 2` for all `f, g`.
pub fn witness_point(a: &Ordinal, b: &Ordinal, s: &Ordinal, t: &Ordinal) -> Result<WitnessPoint, OverlapError> {
    check_point(s, &Ordinal::omega_pow(a.clone()))?;
    check_point(t, &Ordinal::omega_pow(b.clone()))?;
    Ok(WitnessPoint {
        point: witness_rec(a, b, s, t)?,
        source: (s.clone(), t.clone()),
    })
}

fn witness_rec(a: &Ordinal, b: &Ordinal, s: &Ordinal, t: &Ordinal) -> Result<Ordinal, OverlapError> {
    if a.is_zero() {
        return Ok(t.clone());
    }
    if b.is_zero() {
        return Ok(s.clone());
    }
    if a > b {
        return witness_rec(b, a, t, s);
    }
    let layout = Layout::new(a, b)?;
    let (s_top, t_top) = (*s == layout.top_f, *t == layout.top_g);
    if s_top && t_top {
        return Ok(layout.top);
    }
    // s in block k of f's partition, t in block m of g's. The P family holds
    // pairs with s past the start of t's block index; the Q family the rest.
    let use_p = s_top || (!t_top && layout.fp.index_of(s)? >= layout.gp.index_of(t)?);
    let seg = if use_p {
        layout.p_seg(layout.gp.index_of(t)?)?
    } else {
        layout.q_seg(layout.fp.index_of(s)?)?
    };
    let P::Sub {
        a: sa,
        b: sb,
        f_lo,
        g_lo,
        ..
    } = &seg.part
    else {
        unreachable!("block families are sub-instances")
    };
    let r = witness_rec(sa, sb, &f_lo.left_subtract(s)?, &g_lo.left_subtract(t)?)?;
    Ok(seg.lo.add(&r)?)
}

/// Source points `(s, t)` with `U(f, g)(r) = (f(s) + g(t)) / 2` for all `f, g`.
pub fn decompose_point(a: &Ordinal, b: &Ordinal, r: &Ordinal) -> Result<(Ordinal, Ordinal), OverlapError> {
    check_point(r, &Ordinal::omega_pow(a.natural_sum(b)?))?;
    decompose_rec(a, b, r)
}

fn decompose_rec(a: &Ordinal, b: &Ordinal, r: &Ordinal) -> Result<(Ordinal, Ordinal), OverlapError> {
    if a.is_zero() {
        return Ok((Ordinal::one(), r.clone()));
    }
    if b.is_zero() {
        return Ok((r.clone(), Ordinal::one()));
    }
    if a > b {
        let (t, s) = decompose_rec(b, a, r)?;
        return Ok((s, t));
    }
    let layout = Layout::new(a, b)?;
    let Some((g, n)) = layout.locate(r)? else {
        return Ok((layout.top_f, layout.top_g));
    };
    let seg = layout
        .round(g, n)?
        .into_iter()
        .find(|s| !s.skipped && s.lo < *r && *r <= s.hi)
        .ok_or_else(|| OverlapError::Invariant(format!("round {n} does not cover {r}")))?;
    match seg.part {
        P::Half { s, t } => Ok((s, t)),
        P::Sub {
            a: sa,
            b: sb,
            f_lo,
            g_lo,
            ..
        } => {
            let (s, t) = decompose_rec(&sa, &sb, &seg.lo.left_subtract(r)?)?;
            Ok((f_lo.add(&s)?, g_lo.add(&t)?))
        }
    }
}

/// Evaluates `(f(s) + g(t)) / 2`, the value any witness must reproduce.
pub fn half_sum(f: &StepFun, g: &StepFun, s: &Ordinal, t: &Ordinal) -> Result<C64, FuncError> {
    Ok(half(f.eval(s)?, g.eval(t)?))
}

/// Field of `U(f, g)`.
pub fn output_field(f: &StepFun, g: &StepFun) -> Field {
    f.field().join(g.field())
}
