use rand::Rng;

use super::{Ordinal, Term};

/// A random ordinal with exponent nesting at most `depth`, at most
/// `max_terms` summands per level and coefficients in `1..=max_coeff`.
pub fn random_ordinal<R: Rng + ?Sized>(
    rng: &mut R,
    depth: usize,
    max_terms: usize,
    max_coeff: u64,
) -> Ordinal {
    if depth == 0 {
        return Ordinal::nat(rng.gen_range(0..=max_coeff));
    }
    let k = rng.gen_range(0..=max_terms);
    let mut exps: Vec<Ordinal> = (0..k)
        .map(|_| random_ordinal(rng, depth - 1, max_terms, max_coeff))
        .collect();
    exps.sort_by(|a, b| b.cmp(a));
    exps.dedup();
    Ordinal {
        terms: exps
            .into_iter()
            .map(|exp| Term {
                exp,
                coeff: rng.gen_range(1..=max_coeff),
            })
            .collect(),
    }
}

/// A random ordinal in `[0, top)`; `top` must be nonzero.
///
/// Keeps a random prefix of `top`, lowers the next coefficient, then appends
/// a random tail below the lowered term. With probability one half the result
/// is truncated to a multiple of `w^e` for a random exponent `e` occurring in
/// it, so limit points of every available rank are drawn.
pub fn random_below<R: Rng + ?Sized>(rng: &mut R, top: &Ordinal, max_coeff: u64) -> Ordinal {
    assert!(!top.is_zero(), "no ordinal lies below 0");
    let i = rng.gen_range(0..top.terms.len());
    let mut terms = top.terms[..i].to_vec();
    let pivot = &top.terms[i];
    let c = rng.gen_range(0..pivot.coeff);
    if c > 0 {
        terms.push(Term {
            exp: pivot.exp.clone(),
            coeff: c,
        });
    }
    if !pivot.exp.is_zero() {
        // Up to two further terms with exponents below the pivot exponent.
        let mut exps: Vec<Ordinal> = (0..rng.gen_range(0..=2))
            .map(|_| random_below(rng, &pivot.exp, max_coeff))
            .collect();
        exps.sort_by(|a, b| b.cmp(a));
        exps.dedup();
        terms.extend(exps.into_iter().map(|exp| Term {
            exp,
            coeff: rng.gen_range(1..=max_coeff),
        }));
    }
    if terms.len() > 1 && rng.gen_bool(0.5) {
        let keep = rng.gen_range(1..terms.len());
        terms.truncate(keep);
    }
    Ordinal { terms: terms.into() }
}
