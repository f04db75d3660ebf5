use rand::Rng;

use super::{Field, StepFun, C64};
use crate::ordinal::{random_below, Ordinal};

/// Coefficient bound for randomly drawn breakpoints.
pub const BREAKPOINT_COEFF: u64 = 3;

/// Distribution of piece values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueLaw {
    /// Real and imaginary parts uniform in `[-1, 1]`.
    Uniform,
    /// Real and imaginary parts in `{-2, ..., 2}`; produces exact ties.
    SmallIntegers,
    /// Modulus one; `±1` over the reals.
    UnitCircle,
}

fn draw<R: Rng + ?Sized>(rng: &mut R, field: Field, law: ValueLaw) -> C64 {
    let part = |rng: &mut R| match law {
        ValueLaw::Uniform => rng.gen_range(-1.0..=1.0),
        ValueLaw::SmallIntegers => rng.gen_range(-2i32..=2) as f64,
        ValueLaw::UnitCircle => unreachable!(),
    };
    match (law, field) {
        (ValueLaw::UnitCircle, Field::Real) => C64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0),
        (ValueLaw::UnitCircle, Field::Complex) => {
            C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
        }
        (_, Field::Real) => C64::new(part(rng), 0.0),
        (_, Field::Complex) => C64::new(part(rng), part(rng)),
    }
}

/// A random step function on `[1, top]` with at most `max_pieces` pieces.
///
/// Breakpoints come from [`random_below`], which mixes isolated points with
/// limit points of every rank present below `top`.
pub fn random_stepfun<R: Rng + ?Sized>(
    rng: &mut R,
    top: &Ordinal,
    field: Field,
    max_pieces: usize,
    law: ValueLaw,
) -> StepFun {
    let k = rng.gen_range(0..max_pieces.max(1));
    let mut ends: Vec<Ordinal> = (0..k)
        .map(|_| random_below(rng, top, BREAKPOINT_COEFF))
        .filter(|p| !p.is_zero())
        .collect();
    ends.sort();
    ends.dedup();
    ends.push(top.clone());
    let pieces = ends
        .into_iter()
        .map(|end| (end, draw(rng, field, law)))
        .collect();
    StepFun::new(field, top.clone(), pieces).expect("breakpoints are sorted and below top")
}
