//! Empirical SPR-constant estimation over sampled image pairs.
//!
//! Pair `i` is drawn from its own ChaCha stream `(seed, i)`, so reports do not
//! depend on the worker count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    default_delta, dist_up_to_phase, modulus_gap, overlap_norm, ratio_of, re_corr_norm, SprError, CERT_SLACK,
    DEFAULT_SEPARATION,
};
use crate::embeddings::{Embedding, EmbeddingKind};
use crate::funcspace::{random_stepfun, Field, StepFun, ValueLaw, BREAKPOINT_COEFF, C64, EQ_TOL};
use crate::ordinal::{random_below, Ordinal};

/// Failing pairs kept per certificate for replay.
const KEPT_FAILURES: usize = 3;

/// Functions in the spanning family behind each pair.
const FAMILY: usize = 4;

/// Draw attempts before a pair index is given up as degenerate.
const ATTEMPTS: usize = 16;

/// Worker count: `SPRLAB_THREADS` if set to a positive integer, otherwise
/// the available parallelism.
pub fn worker_threads() -> usize {
    std::env::var("SPRLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Extended reals as JSON: finite values are numbers, the rest strings.
mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not an extended real: {other:?}"))),
            },
        }
    }
}

/// How a sample pair was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRegime {
    /// Independent symmetric combinations of the family.
    Independent,
    /// Supports split at a random cut, then perturbed slightly.
    NearDisjoint,
    /// `g = λ f` plus a small perturbation.
    NearPhaseMultiple,
    /// `u ± v` (or `u + i v`) for disjoint `u, v`; equal moduli.
    EqualModulus,
}

impl PairRegime {
    pub fn of_index(i: u64) -> Self {
        match i % 4 {
            0 => PairRegime::Independent,
            1 => PairRegime::NearDisjoint,
            2 => PairRegime::NearPhaseMultiple,
            _ => PairRegime::EqualModulus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub phase: f64,
    pub certificate_slack: f64,
    pub norm: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtLeast,
    AtMost,
}

/// One certificate of a report. `observed` is the extreme value of the
/// certified quantity over the checked pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub comparison: Comparison,
    #[serde(with = "ext_real")]
    pub bound: f64,
    #[serde(with = "ext_real")]
    pub observed: f64,
    pub checked: usize,
    pub rejected: usize,
    pub passed: bool,
    /// Image pairs that violate the bound, at most a few.
    pub failing_pairs: Vec<(StepFun, StepFun)>,
}

impl Certificate {
    /// Whether `value` satisfies the bound.
    pub fn holds(&self, value: f64) -> bool {
        match self.comparison {
            Comparison::AtLeast => value >= self.bound,
            Comparison::AtMost => value <= self.bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprReport {
    pub embedding: EmbeddingKind,
    pub alpha: Ordinal,
    pub field: Field,
    /// Pairs evaluated; degenerate draws are not counted.
    pub samples: usize,
    #[serde(with = "ext_real")]
    pub worst_ratio: f64,
    pub worst_pair: Option<(StepFun, StepFun)>,
    pub worst_regime: Option<PairRegime>,
    pub certificates: Vec<Certificate>,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// The re-correlation threshold and the parameter it came from, when used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<(f64, f64)>,
}

impl SprReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    /// `(alpha, field, samples, worst_ratio, certificate, pass)` per certificate.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.certificates
            .iter()
            .map(|c| {
                [
                    self.alpha.to_string(),
                    self.field.to_string(),
                    self.samples.to_string(),
                    fmt_ext(self.worst_ratio),
                    c.name.clone(),
                    c.passed.to_string(),
                ]
            })
            .collect()
    }
}

fn fmt_ext(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn coefficient<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(rng.gen_range(-1.0..=1.0), 0.0),
        Field::Complex => C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
    }
}

fn unit<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0),
        Field::Complex => C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
    }
}

/// Restricts `f` to the support a source of `e` may have.
fn admissible(e: &Embedding, f: StepFun) -> Result<StepFun, SprError> {
    match e.bound {
        Some(n) => {
            let cut = StepFun::indicator_interval(e.field, &e.source_top, &Ordinal::zero(), &Ordinal::nat(n))?;
            Ok(f.pointwise_mul(&cut)?)
        }
        None => Ok(f),
    }
}

fn split<R: Rng + ?Sized>(rng: &mut R, e: &Embedding) -> Result<(StepFun, StepFun), SprError> {
    let top = &e.source_top;
    let cut = random_below(rng, top, BREAKPOINT_COEFF);
    let low = if cut.is_zero() {
        StepFun::zero(e.field, top.clone())?
    } else {
        StepFun::indicator_interval(e.field, top, &Ordinal::zero(), &cut)?
    };
    let high = StepFun::indicator_interval(e.field, top, &cut, top)?;
    Ok((low, high))
}

fn draw_pair<R: Rng + ?Sized>(
    rng: &mut R,
    e: &Embedding,
    regime: PairRegime,
) -> Result<(StepFun, StepFun), SprError> {
    let field = e.field;
    let family: Vec<StepFun> = (0..FAMILY)
        .map(|_| {
            let law = match rng.gen_range(0..3) {
                0 => ValueLaw::Uniform,
                1 => ValueLaw::SmallIntegers,
                _ => ValueLaw::UnitCircle,
            };
            admissible(e, random_stepfun(rng, &e.source_top, field, 6, law))
        })
        .collect::<Result<_, _>>()?;
    let refs: Vec<&StepFun> = family.iter().collect();
    let combo = |rng: &mut R| -> Result<StepFun, SprError> {
        let coeffs: Vec<C64> = (0..FAMILY).map(|_| coefficient(rng, field)).collect();
        Ok(StepFun::linear_combine(&coeffs, &refs)?)
    };
    let (f, g) = match regime {
        PairRegime::Independent => (combo(rng)?, combo(rng)?),
        PairRegime::NearDisjoint => {
            let (low, high) = split(rng, e)?;
            let eps = [0.0, 1e-3, 1e-1][rng.gen_range(0..3)];
            let f = combo(rng)?.pointwise_mul(&low)?.add(&combo(rng)?.scale(C64::new(eps, 0.0))?)?;
            let g = combo(rng)?.pointwise_mul(&high)?.add(&combo(rng)?.scale(C64::new(eps, 0.0))?)?;
            (f, g)
        }
        PairRegime::NearPhaseMultiple => {
            let f = combo(rng)?;
            let eps = [1e-1, 1e-2, 1e-4][rng.gen_range(0..3)];
            let g = f.scale(unit(rng, field))?.add(&combo(rng)?.scale(C64::new(eps, 0.0))?)?;
            (f, g)
        }
        PairRegime::EqualModulus => {
            let (low, high) = split(rng, e)?;
            let u = combo(rng)?.pointwise_mul(&low)?;
            let v = combo(rng)?.pointwise_mul(&high)?;
            let twist = match field {
                Field::Real => C64::new(-1.0, 0.0),
                Field::Complex => C64::new(0.0, 1.0),
            };
            (u.add(&v)?, u.add(&v.scale(twist)?)?)
        }
    };
    Ok((admissible(e, f)?, admissible(e, g)?))
}

/// The normalised source pair with index `index`, or `None` when every draw
/// for it was degenerate.
pub fn sample_pair(e: &Embedding, seed: u64, index: u64) -> Result<Option<(StepFun, StepFun)>, SprError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let regime = PairRegime::of_index(index);
    for _ in 0..ATTEMPTS {
        let (f, g) = draw_pair(&mut rng, e, regime)?;
        if f.sup_norm() > 0.0 && g.sup_norm() > 0.0 {
            return Ok(Some((f.normalized(), g.normalized())));
        }
    }
    Ok(None)
}

/// Scalar summary of one pair.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    ratio: f64,
    iso_err: f64,
    overlap: f64,
    re_corr: f64,
    source_dist: f64,
}

fn evaluate(e: &Embedding, seed: u64, index: u64, tol: f64) -> Result<Option<Outcome>, SprError> {
    let Some((f, g)) = sample_pair(e, seed, index)? else {
        return Ok(None);
    };
    let (tf, tg) = (e.apply(&f)?, e.apply(&g)?);
    let iso_err = (tf.sup_norm() - 1.0).abs().max((tg.sup_norm() - 1.0).abs());
    let dist = dist_up_to_phase(&tf, &tg, tol)?;
    let gap = modulus_gap(&tf, &tg)?;
    let complex = e.field == Field::Complex;
    Ok(Some(Outcome {
        ratio: ratio_of(dist, gap, tol),
        iso_err,
        overlap: overlap_norm(&tf, &tg)?,
        re_corr: if complex { re_corr_norm(&tf, &tg)? } else { f64::NAN },
        source_dist: if complex { dist_up_to_phase(&f, &g, tol)? } else { f64::NAN },
    }))
}

fn images(e: &Embedding, seed: u64, index: u64) -> Result<(StepFun, StepFun), SprError> {
    let (f, g) = sample_pair(e, seed, index)?.expect("index was evaluated before");
    Ok((e.apply(&f)?, e.apply(&g)?))
}

/// Builds one certificate from per-pair values; `None` values are rejected.
fn certify(
    e: &Embedding,
    seed: u64,
    name: &str,
    comparison: Comparison,
    bound: f64,
    values: &[(u64, Option<f64>)],
) -> Result<Certificate, SprError> {
    let mut cert = Certificate {
        name: name.to_string(),
        comparison,
        bound,
        observed: match comparison {
            Comparison::AtLeast => f64::INFINITY,
            Comparison::AtMost => f64::NEG_INFINITY,
        },
        checked: 0,
        rejected: 0,
        passed: true,
        failing_pairs: Vec::new(),
    };
    for &(index, v) in values {
        let Some(v) = v else {
            cert.rejected += 1;
            continue;
        };
        cert.checked += 1;
        cert.observed = match comparison {
            Comparison::AtLeast => cert.observed.min(v),
            Comparison::AtMost => cert.observed.max(v),
        };
        if !cert.holds(v) {
            cert.passed = false;
            if cert.failing_pairs.len() < KEPT_FAILURES {
                cert.failing_pairs.push(images(e, seed, index)?);
            }
        }
    }
    Ok(cert)
}

/// Knobs of [`estimate_spr_constant`]; the defaults are the certified values.
#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub tol: f64,
    /// Overrides the embedding's claimed constant in the overlap certificate.
    pub constant: Option<f64>,
    pub separation: f64,
    /// Overrides the re-correlation threshold.
    pub delta: Option<f64>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            tol: super::DEFAULT_TOL,
            constant: None,
            separation: DEFAULT_SEPARATION,
            delta: None,
        }
    }
}

/// Samples `budget` normalised source pairs, maps them through `e` and
/// records the worst `spr_ratio` of the images together with the
/// certificates that apply to `e`.
pub fn estimate_spr_constant(
    e: &Embedding,
    budget: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<SprReport, SprError> {
    let tol = opts.tol;
    if !(tol > 0.0) {
        return Err(SprError::BadTolerance(tol));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads())
        .build()
        .expect("thread pool construction");
    let outcomes: Vec<(u64, Outcome)> = pool.install(|| {
        (0..budget as u64)
            .into_par_iter()
            .map(|i| evaluate(e, seed, i, tol).map(|o| o.map(|o| (i, o))))
            .collect::<Result<Vec<_>, _>>()
    })?
    .into_iter()
    .flatten()
    .collect();

    // First index attaining the maximum; NaN never wins.
    let worst = outcomes
        .iter()
        .fold(None::<(u64, f64)>, |acc, &(i, o)| match acc {
            Some((_, r)) if !(o.ratio > r) => acc,
            _ if o.ratio.is_nan() => acc,
            _ => Some((i, o.ratio)),
        });
    let mut report = SprReport {
        embedding: e.kind,
        alpha: e.alpha.clone(),
        field: e.field,
        samples: outcomes.len(),
        worst_ratio: worst.map_or(1.0, |w| w.1),
        worst_pair: worst.map(|(i, _)| images(e, seed, i)).transpose()?,
        worst_regime: worst.map(|(i, _)| PairRegime::of_index(i)),
        certificates: Vec::new(),
        seed,
        tolerances: Tolerances {
            phase: tol,
            certificate_slack: CERT_SLACK,
            norm: EQ_TOL,
            separation: opts.separation,
        },
        delta: None,
    };
    if budget == 0 {
        return Ok(report);
    }

    let column = |pick: &dyn Fn(&Outcome) -> Option<f64>| -> Vec<(u64, Option<f64>)> {
        outcomes.iter().map(|(i, o)| (*i, pick(o))).collect()
    };
    report.certificates.push(certify(
        e,
        seed,
        "isometry",
        Comparison::AtMost,
        EQ_TOL,
        &column(&|o| Some(o.iso_err)),
    )?);
    match e.kind {
        EmbeddingKind::RealSpr => {
            let c = opts.constant.or(e.claim.constant).unwrap_or(f64::INFINITY);
            report.certificates.push(certify(
                e,
                seed,
                "overlap",
                Comparison::AtLeast,
                1.0 / c - CERT_SLACK,
                &column(&|o| Some(o.overlap)),
            )?);
            report.certificates.push(certify(
                e,
                seed,
                "ratio",
                Comparison::AtMost,
                c * std::f64::consts::SQRT_2 * (1.0 + tol),
                &column(&|o| Some(o.ratio)),
            )?);
        }
        EmbeddingKind::ComplexSpr | EmbeddingKind::C0 => {
            let (c, d) = default_delta();
            let delta = opts.delta.unwrap_or(d);
            report.delta = Some((c, delta));
            let sep = opts.separation;
            report.certificates.push(certify(
                e,
                seed,
                "re-correlation",
                Comparison::AtLeast,
                delta,
                &column(&|o| (o.source_dist >= sep).then_some(o.re_corr)),
            )?);
            report.certificates.push(certify(
                e,
                seed,
                "finite ratio",
                Comparison::AtMost,
                f64::MAX,
                &column(&|o| Some(o.ratio)),
            )?);
        }
        EmbeddingKind::IntervalExtension => {}
    }
    Ok(report)
}
