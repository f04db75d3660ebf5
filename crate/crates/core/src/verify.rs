//! Seeded invariant suites over every module, with JSON-serialisable reports.
//!
//! Reports contain no timings, so a fixed seed and budget reproduce them
//! byte for byte.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embeddings::{c0_combination, Embedding, EmbeddingError};
use crate::funcspace::{random_stepfun, Field, FuncError, StepFun, ValueLaw, C64, EQ_TOL};
use crate::ordinal::{parse_ordinal, random_below, random_ordinal, Ordinal, OrdinalError};
use crate::overlap::{check_overlap_properties_with, random_point, OverlapConfig, OverlapError, PropertyReport};
use crate::spr::{
    check_relaxed_overlap_hypothesis, dist_up_to_phase, estimate_spr_constant, modulus_gap, overlap_norm,
    EstimateOptions, SprError, DEFAULT_TOL,
};

/// Samples per property unless overridden.
pub const DEFAULT_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Ordinal,
    Funcspace,
    Overlap,
    Embeddings,
    Spr,
    All,
}

impl Suite {
    const PARTS: [Suite; 5] = [Suite::Ordinal, Suite::Funcspace, Suite::Overlap, Suite::Embeddings, Suite::Spr];

    fn name(self) -> &'static str {
        match self {
            Suite::Ordinal => "ordinal",
            Suite::Funcspace => "funcspace",
            Suite::Overlap => "overlap",
            Suite::Embeddings => "embeddings",
            Suite::Spr => "spr",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::PARTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub budget: usize,
    pub seed: u64,
    /// Added to every overlap tail value; nonzero only to test the harness.
    pub mutant_tail_offset: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
            seed: 0,
            mutant_tail_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    #[serde(flatten)]
    pub properties: PropertyReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub budget: usize,
    #[serde(skip_serializing_if = "is_zero")]
    pub mutant_tail_offset: f64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Spr(#[from] SprError),
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let parts: Vec<Suite> = match suite {
        Suite::All => Suite::PARTS.to_vec(),
        s => vec![s],
    };
    let mut suites = Vec::new();
    for s in parts {
        // Each suite owns a stream, so `all` reproduces the single suites.
        let stream = Suite::PARTS.iter().position(|p| *p == s).expect("a part") as u64 + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(stream);
        let properties = match s {
            Suite::Ordinal => ordinal_suite(opts.budget, &mut rng)?,
            Suite::Funcspace => funcspace_suite(opts.budget, &mut rng)?,
            Suite::Overlap => overlap_suite(opts, &mut rng)?,
            Suite::Embeddings => embeddings_suite(opts.budget, &mut rng)?,
            Suite::Spr => spr_suite(opts, &mut rng)?,
            Suite::All => unreachable!(),
        };
        suites.push(SuiteReport { suite: s, properties });
    }
    Ok(VerifyReport {
        seed: opts.seed,
        budget: opts.budget,
        mutant_tail_offset: opts.mutant_tail_offset,
        passed: suites.iter().all(|s| s.properties.passed()),
        suites,
    })
}

/// Least `n` among `1, 2, 4, ...` with `seq(n) > x`, if one exists below `2^40`.
fn overtakes(x: &Ordinal, seq: impl Fn(u64) -> Result<Ordinal, OrdinalError>) -> Result<bool, OrdinalError> {
    for k in 0..40 {
        if seq(1 << k)? > *x {
            return Ok(true);
        }
    }
    Ok(false)
}

fn ordinal_suite(budget: usize, rng: &mut ChaCha8Rng) -> Result<PropertyReport, VerifyError> {
    let mut rep = PropertyReport::default();
    let zero = Ordinal::zero();
    for _ in 0..budget {
        let draw = |rng: &mut ChaCha8Rng| random_ordinal(rng, 2, 3, 4);
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        let show = || format!("a = {a}, b = {b}, c = {c}");

        let ab = a.natural_sum(&b)?;
        rep.tally("natural sum commutes", ab == b.natural_sum(&a)?, show);
        rep.tally(
            "natural sum associates",
            ab.natural_sum(&c)? == a.natural_sum(&b.natural_sum(&c)?)?,
            show,
        );
        rep.tally("natural sum identity", a.natural_sum(&zero)? == a, show);
        rep.tally("doubling", a.nat_double()? == a.natural_sum(&a)?, show);
        rep.tally("natural sum dominates", ab >= a.add(&b)? && ab >= b.add(&a)?, show);
        rep.tally(
            "sum associates",
            a.add(&b)?.add(&c)? == a.add(&b.add(&c)?)?,
            show,
        );
        rep.tally(
            "sum is right monotone",
            (b < c) == (a.add(&b)? < a.add(&c)?),
            show,
        );
        rep.tally("left subtraction", a.left_subtract(&a.add(&b)?)? == b, show);

        let text = a.to_string();
        rep.tally("text round trip", parse_ordinal(&text).ok().as_ref() == Some(&a), show);
        let json = serde_json::to_string(&a).expect("ordinals serialise");
        rep.tally(
            "json round trip",
            serde_json::from_str::<Ordinal>(&json).ok().as_ref() == Some(&a),
            show,
        );

        if !a.is_zero() {
            let rank = a.cb_rank()?;
            // A point of rank r is w^r past a point of rank at least r.
            let head = Ordinal::from_terms(
                a.terms()[..a.terms().len() - 1]
                    .iter()
                    .map(|t| (t.exp.clone(), t.coeff))
                    .chain([(rank.clone(), a.terms().last().expect("nonzero").coeff - 1)])
                    .filter(|(_, k)| *k > 0)
                    .collect(),
            )?;
            let ok = head.add(&Ordinal::omega_pow(rank.clone()))? == a
                && (head.is_zero() || head.cb_rank()? >= rank);
            rep.tally("rank splits the point", ok, show);
            rep.tally("isolated iff successor", (rank.is_zero()) == a.is_successor(), show);
        }

        // Turn b into a limit so that sequences and suprema apply.
        let lim = b.add(&Ordinal::omega_pow(c.successor()?))?;
        let seq = |n| lim.fundamental_seq(n);
        let mut inc = true;
        for n in 1..6 {
            inc &= seq(n)? < seq(n + 1)? && seq(n + 1)? < lim;
        }
        rep.tally("fundamental sequence increases below its limit", inc, || lim.to_string());
        let below = random_below(rng, &lim, 4);
        rep.tally("fundamental sequence is cofinal", overtakes(&below, seq)?, || {
            format!("limit {lim}, below {below}")
        });

        let sup = Ordinal::sup_natural_sum(&a, &lim)?;
        let terms = |n| a.natural_sum(&lim.fundamental_seq(n)?);
        let mut bounded = true;
        for n in 1..6 {
            bounded &= terms(n)? < sup;
        }
        rep.tally("sup bounds every natural sum", bounded, || format!("d = {a}, b = {lim}"));
        let x = random_below(rng, &sup, 4);
        rep.tally("sup is least", overtakes(&x, terms)?, || format!("d = {a}, b = {lim}, x = {x}"));
    }
    Ok(rep)
}

fn random_field(rng: &mut ChaCha8Rng) -> Field {
    if rng.gen_bool(0.5) {
        Field::Complex
    } else {
        Field::Real
    }
}

fn random_law(rng: &mut ChaCha8Rng) -> ValueLaw {
    [ValueLaw::Uniform, ValueLaw::SmallIntegers, ValueLaw::UnitCircle][rng.gen_range(0..3)]
}

fn random_top(rng: &mut ChaCha8Rng) -> Ordinal {
    let exps = ["0", "1", "2", "w", "w+1"];
    Ordinal::omega_pow(parse_ordinal(exps[rng.gen_range(0..exps.len())]).expect("literal"))
}

fn funcspace_suite(budget: usize, rng: &mut ChaCha8Rng) -> Result<PropertyReport, VerifyError> {
    let mut rep = PropertyReport::default();
    for _ in 0..budget {
        let top = random_top(rng);
        let field = random_field(rng);
        let (lf, lg) = (random_law(rng), random_law(rng));
        let f = random_stepfun(rng, &top, field, 8, lf);
        let g = random_stepfun(rng, &top, field, 8, lg);
        let show = || serde_json::to_string(&(&f, &g)).expect("step functions serialise");

        let canonical = f.pieces().windows(2).all(|w| w[0].end < w[1].end && w[0].value != w[1].value)
            && f.pieces().last().map(|p| &p.end) == Some(&top);
        rep.tally("canonical pieces", canonical, show);

        let sum = f.add(&g)?;
        let p = random_point(rng, &top);
        let pointwise = (sum.eval(&p)? - f.eval(&p)? - g.eval(&p)?).norm() <= EQ_TOL;
        rep.tally("pointwise sum", pointwise, || format!("at {p}: {}", show()));
        rep.tally("triangle inequality", sum.sup_norm() <= f.sup_norm() + g.sup_norm() + EQ_TOL, show);

        let lambda = C64::new(rng.gen_range(-2.0..2.0), 0.0);
        let scaled = f.scale(lambda)?.sup_norm();
        rep.tally("norm homogeneity", (scaled - lambda.norm() * f.sup_norm()).abs() <= EQ_TOL, show);

        let (mf, mg) = (f.modulus(), g.modulus());
        let lattice = mf.meet(&mg)?.add(&mf.join(&mg)?)?.approx_eq(&mf.add(&mg)?, EQ_TOL);
        rep.tally("meet plus join", lattice, show);

        let json = serde_json::to_string(&f).expect("step functions serialise");
        let back = serde_json::from_str::<StepFun>(&json).ok();
        rep.tally("json round trip", back.as_ref() == Some(&f), show);

        let lo = random_below(rng, &top, 3);
        let hi = random_point(rng, &top);
        if lo < hi {
            let r = f.restrict(&lo, &hi)?;
            let q = random_point(rng, r.top());
            let ok = r.eval(&q)? == f.eval(&lo.add(&q)?)?;
            rep.tally("restriction translates", ok, || format!("({lo}, {hi}] at {q}: {}", show()));
        }
    }
    Ok(rep)
}

fn overlap_suite(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<PropertyReport, VerifyError> {
    let cfg = OverlapConfig {
        tail_offset: opts.mutant_tail_offset,
        ..OverlapConfig::default()
    };
    let mut rep = PropertyReport::default();
    for (a, b) in [("0", "1"), ("1", "1"), ("1", "2"), ("2", "2"), ("1", "w"), ("w", "w")] {
        let (a, b) = (parse_ordinal(a)?, parse_ordinal(b)?);
        let part = check_overlap_properties_with(&cfg, &a, &b, opts.budget, rng)?;
        for mut r in part.results {
            r.name = format!("({a}, {b}) {}", r.name);
            rep.results.push(r);
        }
    }
    Ok(rep)
}

fn embeddings_suite(budget: usize, rng: &mut ChaCha8Rng) -> Result<PropertyReport, VerifyError> {
    let mut rep = PropertyReport::default();
    for _ in 0..budget {
        let n = rng.gen_range(1..=25);
        let mut alphas: Vec<C64> = (0..n)
            .map(|_| C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let k = rng.gen_range(0..n);
        let m = alphas[k].norm();
        alphas[k] /= m;
        let x = c0_combination(&alphas)?;
        rep.tally("c0 span is isometric", (x.sup_norm() - 1.0).abs() <= EQ_TOL, || format!("{alphas:?}"));
    }

    let alphas = ["0", "1", "2", "w"].map(|s| parse_ordinal(s).expect("literal"));
    for i in 0..budget {
        let a = &alphas[i % alphas.len()];
        let e = if i % 2 == 0 {
            Embedding::real(a)?
        } else {
            Embedding::complex(a)?
        };
        let law = random_law(rng);
        let f = random_stepfun(rng, &e.source_top, e.field, 6, law);
        let g = random_stepfun(rng, &e.source_top, e.field, 6, law);
        let show = || format!("{} alpha = {a}: {}", e.kind, serde_json::to_string(&(&f, &g)).unwrap_or_default());
        let (tf, tg) = (e.apply(&f)?, e.apply(&g)?);
        rep.tally("isometry", (tf.sup_norm() - f.sup_norm()).abs() <= EQ_TOL, show);
        rep.tally("additivity", e.apply(&f.add(&g)?)?.approx_eq(&tf.add(&tg)?, EQ_TOL), show);
        let s = random_point(rng, &e.source_top);
        let t = random_point(rng, &e.source_top);
        let r = e.witness_point(&s)?;
        rep.tally("point witness", (tf.eval(&r.point)? - f.eval(&s)?).norm() <= EQ_TOL, show);
        if let Some(r) = e.witness_pair(&s, &t)? {
            let want = 0.5 * (f.eval(&s)? + f.eval(&t)?);
            rep.tally("pair witness", (tf.eval(&r.point)? - want).norm() <= EQ_TOL, show);
        }
        if let Some(r) = e.witness_rotated(&s, &t)? {
            let (u, v) = &r.source;
            let want = 0.5 * (f.eval(u)? + C64::i() * f.eval(v)?);
            rep.tally("rotated witness", (tf.eval(&r.point)? - want).norm() <= EQ_TOL, show);
        }
    }

    let grid: Vec<Ordinal> = (1..=20).map(Ordinal::nat).collect();
    let c0 = check_relaxed_overlap_hypothesis(&Embedding::c0(20)?, &grid)?;
    rep.tally("relaxed hypothesis for c0", c0.passed, || c0.failures.join("; "));
    // [1, w^2] has enough distinct small points for a grid of 20.
    let e = Embedding::complex(&Ordinal::nat(2))?;
    let mut grid = vec![e.source_top.clone()];
    while grid.len() < 20 {
        let p = random_point(rng, &e.source_top);
        if !grid.contains(&p) {
            grid.push(p);
        }
    }
    let cx = check_relaxed_overlap_hypothesis(&e, &grid)?;
    rep.tally("relaxed hypothesis for the complex embedding", cx.passed, || cx.failures.join("; "));
    Ok(rep)
}

fn spr_suite(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<PropertyReport, VerifyError> {
    let mut rep = PropertyReport::default();
    for _ in 0..opts.budget {
        let top = random_top(rng);
        let field = random_field(rng);
        let f = random_stepfun(rng, &top, field, 6, ValueLaw::Uniform);
        let g = random_stepfun(rng, &top, field, 6, ValueLaw::Uniform);
        let show = || serde_json::to_string(&(&f, &g)).expect("step functions serialise");
        let d = dist_up_to_phase(&f, &g, DEFAULT_TOL)?;
        rep.tally("reverse triangle", modulus_gap(&f, &g)? <= d + 2.0 * DEFAULT_TOL, show);
        let dg = dist_up_to_phase(&g, &f, DEFAULT_TOL)?;
        rep.tally("distance is symmetric", (d - dg).abs() <= 2.0 * DEFAULT_TOL, show);
        let lambda = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let rotated = match field {
            Field::Real => g.scale(C64::new(lambda.re.signum(), 0.0))?,
            Field::Complex => g.scale(lambda)?,
        };
        let dr = dist_up_to_phase(&f, &rotated, DEFAULT_TOL)?;
        rep.tally("distance is phase invariant", (d - dr).abs() <= 2.0 * DEFAULT_TOL, show);
        // The plain and flipped distances bound the minimum from above.
        let upper = f.sub(&g)?.sup_norm().min(f.add(&g)?.sup_norm());
        rep.tally("distance below the two real phases", d <= upper + DEFAULT_TOL, show);
    }

    let estimate_budget = opts.budget.max(1) * 2;
    let one = Ordinal::one();
    for e in [Embedding::real(&one)?, Embedding::complex(&one)?] {
        let report = estimate_spr_constant(&e, estimate_budget, opts.seed, &EstimateOptions::default())?;
        rep.tally(&format!("{} certificates", e.kind), report.passed(), || {
            serde_json::to_string(&report.certificates).unwrap_or_default()
        });
        rep.tally(&format!("{} worst ratio at least one", e.kind), report.worst_ratio >= 1.0 - 1e-6, || {
            report.worst_ratio.to_string()
        });
        if let Some(c) = e.claim.constant {
            let images = (0..estimate_budget as u64)
                .filter_map(|i| crate::spr::sample_pair(&e, opts.seed, i).transpose())
                .map(|p| p.and_then(|(f, g)| Ok(overlap_norm(&e.apply(&f)?, &e.apply(&g)?)?)))
                .collect::<Result<Vec<f64>, SprError>>()?;
            let worst = images.iter().copied().fold(f64::INFINITY, f64::min);
            rep.tally(&format!("{} overlap at least 1/{c}", e.kind), worst >= 1.0 / c - 1e-9, || worst.to_string());
        }
    }
    Ok(rep)
}
