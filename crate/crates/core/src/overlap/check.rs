//! Randomised checks of the defining properties of `U`.

use rand::Rng;
use serde::Serialize;

use super::{decompose_point, overlap_map_with, witness_point, OverlapConfig, OverlapError};
use crate::funcspace::{random_stepfun, Field, StepFun, ValueLaw, C64, EQ_TOL};
use crate::ordinal::{random_below, Ordinal};

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PropertyReport {
    pub results: Vec<PropertyResult>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub(crate) fn tally(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let idx = match self.results.iter().position(|r| r.name == name) {
            Some(i) => i,
            None => {
                self.results.push(PropertyResult {
                    name: name.to_string(),
                    passed: true,
                    samples: 0,
                    counterexample: None,
                });
                self.results.len() - 1
            }
        };
        let r = &mut self.results[idx];
        r.samples += 1;
        if !ok && r.passed {
            r.passed = false;
            r.counterexample = Some(witness());
        }
    }
}

/// A random point of `[1, top]`, mixing isolated points, limit points and `top`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, top: &Ordinal) -> Ordinal {
    if rng.gen_ratio(1, 8) {
        return top.clone();
    }
    let x = random_below(rng, top, 6);
    if x.is_zero() || rng.gen_bool(0.5) {
        x.successor().expect("small coefficients")
    } else {
        x
    }
}

pub(crate) fn random_law<R: Rng + ?Sized>(rng: &mut R) -> ValueLaw {
    match rng.gen_range(0..3) {
        0 => ValueLaw::Uniform,
        1 => ValueLaw::SmallIntegers,
        _ => ValueLaw::UnitCircle,
    }
}

fn json(x: &impl Serialize) -> String {
    serde_json::to_string(x).unwrap_or_else(|e| format!("<unserialisable: {e}>"))
}

/// Samples `budget` input quadruples and checks linearity, the norm bound, the
/// witness identities in both directions, the finite value range, the tail
/// value and, off the diagonal, the swap symmetry.
pub fn check_overlap_properties<R: Rng + ?Sized>(
    a: &Ordinal,
    b: &Ordinal,
    budget: usize,
    rng: &mut R,
) -> Result<PropertyReport, OverlapError> {
    check_overlap_properties_with(&OverlapConfig::default(), a, b, budget, rng)
}

pub fn check_overlap_properties_with<R: Rng + ?Sized>(
    cfg: &OverlapConfig,
    a: &Ordinal,
    b: &Ordinal,
    budget: usize,
    rng: &mut R,
) -> Result<PropertyReport, OverlapError> {
    let (top_f, top_g) = (Ordinal::omega_pow(a.clone()), Ordinal::omega_pow(b.clone()));
    let top = Ordinal::omega_pow(a.natural_sum(b)?);
    let u = |f: &StepFun, g: &StepFun| overlap_map_with(cfg, a, b, f, g);
    let mut report = PropertyReport::default();
    for i in 0..budget {
        let field = if i % 2 == 0 { Field::Complex } else { Field::Real };
        let mut draw = |top: &Ordinal| {
            let law = random_law(rng);
            random_stepfun(rng, top, field, 6, law)
        };
        let (f1, f2, g1, g2) = (draw(&top_f), draw(&top_f), draw(&top_g), draw(&top_g));
        let h1 = u(&f1, &g1)?;
        let h2 = u(&f2, &g2)?;
        let pair = || json(&(&f1, &g1, &f2, &g2));

        let sum = u(&f1.add(&f2)?, &g1.add(&g2)?)?;
        report.tally("additivity", sum.approx_eq(&h1.add(&h2)?, EQ_TOL), pair);

        let lambda = match field {
            Field::Real => C64::new(rng.gen_range(-3.0..3.0), 0.0),
            Field::Complex => C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
        };
        let scaled = u(&f1.scale(lambda)?, &g1.scale(lambda)?)?;
        report.tally("homogeneity", scaled.approx_eq(&h1.scale(lambda)?, EQ_TOL), || {
            format!("lambda = {lambda}, inputs {}", json(&(&f1, &g1)))
        });

        let bound = 0.5 * (f1.sup_norm() + g1.sup_norm());
        report.tally("norm bound", h1.sup_norm() <= bound + EQ_TOL, || json(&(&f1, &g1)));

        report.tally(
            "tail value",
            (h1.top_value() - 0.5 * (f1.top_value() + g1.top_value())).norm() <= EQ_TOL,
            || json(&(&f1, &g1)),
        );

        // Every output value lies in the finite set {(v + w) / 2}.
        let in_range = h1.pieces().iter().all(|p| {
            f1.pieces().iter().any(|x| {
                g1.pieces()
                    .iter()
                    .any(|y| (p.value - 0.5 * (x.value + y.value)).norm() <= EQ_TOL)
            })
        });
        report.tally("value range", in_range, || json(&(&f1, &g1)));

        // On the diagonal the two argument orders give different maps.
        if a != b {
            let swapped = overlap_map_with(cfg, b, a, &g1, &f1)?;
            report.tally("swap symmetry", swapped == h1, || json(&(&f1, &g1)));
        }

        for _ in 0..4 {
            let (s, t) = (random_point(rng, &top_f), random_point(rng, &top_g));
            let w = witness_point(a, b, &s, &t)?;
            let want = 0.5 * (f1.eval(&s)? + g1.eval(&t)?);
            report.tally("witness identity", (h1.eval(&w.point)? - want).norm() <= EQ_TOL, || {
                format!("s = {s}, t = {t}, r = {}, inputs {}", w.point, json(&(&f1, &g1)))
            });
        }

        let mut probes: Vec<Ordinal> = h1.pieces().iter().map(|p| p.end.clone()).collect();
        probes.extend((0..4).map(|_| random_point(rng, &top)));
        for r in probes {
            let (s, t) = decompose_point(a, b, &r)?;
            let want = 0.5 * (f1.eval(&s)? + g1.eval(&t)?);
            report.tally("decomposition identity", (h1.eval(&r)? - want).norm() <= EQ_TOL, || {
                format!("r = {r}, s = {s}, t = {t}, inputs {}", json(&(&f1, &g1)))
            });
        }
    }
    Ok(report)
}
