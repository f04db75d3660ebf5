//! The `build` command: embedded images together with witness tables.

use serde::Serialize;
use sprlab::embeddings::{c0_basis, c0_pair_witnesses, c0_point_witness, Embedding, EmbeddingKind};
use sprlab::{Field, Ordinal, StepFun, WitnessPoint, C64};

use crate::CliError;

/// Breakpoints of the source that get witness rows.
const MAX_WITNESS_POINTS: usize = 8;

#[derive(Debug, Serialize)]
pub struct WitnessRow {
    pub s: Ordinal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Ordinal>,
    pub kind: &'static str,
    pub point: Ordinal,
    /// The image value at `point`, as `[re, im]`.
    pub value: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct BuildOutput {
    pub kind: EmbeddingKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Ordinal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<StepFun>,
    pub image: StepFun,
    pub witnesses: Vec<WitnessRow>,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn row(image: &StepFun, s: &Ordinal, t: Option<&Ordinal>, kind: &'static str, w: &WitnessPoint) -> Result<WitnessRow, CliError> {
    let v: C64 = image.eval(&w.point).map_err(usage)?;
    Ok(WitnessRow {
        s: s.clone(),
        t: t.cloned(),
        kind,
        point: w.point.clone(),
        value: [v.re, v.im],
    })
}

/// `x^(n)` with the point witness `r_n` and the pair witnesses `r_{m,n}`,
/// `r~_{m,n}` for every `m < n`.
pub fn build_c0(n: u64) -> Result<BuildOutput, CliError> {
    let image = c0_basis(n).map_err(usage)?;
    let nn = Ordinal::nat(n);
    let mut witnesses = vec![row(&image, &nn, None, "point", &c0_point_witness(n).map_err(usage)?)?];
    for m in 1..n {
        let (plain, rotated) = c0_pair_witnesses(m, n).map_err(usage)?;
        let mm = Ordinal::nat(m);
        witnesses.push(row(&image, &mm, Some(&nn), "pair", &plain)?);
        witnesses.push(row(&image, &mm, Some(&nn), "rotated", &rotated)?);
    }
    Ok(BuildOutput {
        kind: EmbeddingKind::C0,
        alpha: None,
        n: Some(n),
        source: None,
        image,
        witnesses,
    })
}

/// The image of `f` (default: the constant 1) under the real or complex
/// embedding at `alpha`, with witnesses for the first source breakpoints.
pub fn build_embedding(kind: EmbeddingKind, alpha: &Ordinal, f: Option<StepFun>) -> Result<BuildOutput, CliError> {
    let e = match kind {
        EmbeddingKind::RealSpr => Embedding::real(alpha),
        EmbeddingKind::ComplexSpr => Embedding::complex(alpha),
        other => return Err(CliError::Usage(format!("build does not handle {other}"))),
    }
    .map_err(usage)?;
    let f = match f {
        Some(f) => f,
        None => StepFun::constant(e.field, e.source_top.clone(), C64::new(1.0, 0.0)).map_err(usage)?,
    };
    let f = if f.field() == Field::Real && e.field == Field::Complex {
        f.to_complex()
    } else {
        f
    };
    let image = e.apply(&f).map_err(usage)?;
    let points: Vec<Ordinal> = f.pieces().iter().take(MAX_WITNESS_POINTS).map(|p| p.end.clone()).collect();
    let mut witnesses = Vec::new();
    for s in &points {
        witnesses.push(row(&image, s, None, "point", &e.witness_point(s).map_err(usage)?)?);
    }
    for s in &points {
        for t in points.iter().filter(|t| *t != s) {
            if let Some(w) = e.witness_pair(s, t).map_err(usage)? {
                witnesses.push(row(&image, s, Some(t), "pair", &w)?);
            }
            if let Some(w) = e.witness_rotated(s, t).map_err(usage)? {
                witnesses.push(row(&image, s, Some(t), "rotated", &w)?);
            }
        }
    }
    Ok(BuildOutput {
        kind,
        alpha: Some(alpha.clone()),
        n: None,
        source: Some(f),
        image,
        witnesses,
    })
}
