//! `sprlab`: ordinal calculator, embedding builder, verification suites and
//! SPR-constant estimates.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 I/O error.

mod build;
mod ord;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sprlab::embeddings::{Embedding, EmbeddingKind};
use sprlab::spr::{estimate_spr_constant, EstimateOptions, SprReport, DEFAULT_TOL};
use sprlab::verify::{run_suite, Suite, VerifyOptions, DEFAULT_BUDGET};
use sprlab::StepFun;

use output::{emit, json, Format, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// A check ran and failed; its report has already been written.
    Failed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "sprlab", version, about = "Stable phase retrieval on ordinal intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuildKind {
    C0,
    Real,
    Complex,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate ordinal expressions: `+` inside an ordinal, `⊕`/`#` natural
    /// sum, `⊙2`/`@2` doubling, and one of `< <= == >= >`.
    Ord {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Describe the derived set `[1, top]^(order)`.
    Cb {
        top: String,
        order: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build an embedded image and its witness table.
    Build {
        kind: BuildKind,
        /// Exponent of the source interval `[1, w^alpha]`.
        #[arg(long)]
        alpha: Option<String>,
        /// Index of the c0 basis vector.
        #[arg(long)]
        n: Option<u64>,
        /// Source step function: a JSON file path or inline JSON.
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run invariant suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
        #[command(flatten)]
        sample: SampleArgs,
        /// Perturb overlap tail values; the suites must then fail.
        #[arg(long, hide = true, default_value_t = 0.0)]
        mutant_tail_offset: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Estimate SPR constants and check the certificates.
    Estimate {
        /// Comma-separated exponents.
        #[arg(long)]
        alpha: String,
        #[arg(long, value_enum, default_value = "real")]
        field: FieldArg,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Ordinal,
    Funcspace,
    Overlap,
    Embeddings,
    Spr,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Ordinal => Suite::Ordinal,
            SuiteArg::Funcspace => Suite::Funcspace,
            SuiteArg::Overlap => Suite::Overlap,
            SuiteArg::Embeddings => Suite::Embeddings,
            SuiteArg::Spr => Suite::Spr,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("I/O error: {m}"),
                CliError::Failed => eprintln!("verification failed"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn budget(sample: &SampleArgs, default: usize) -> Result<usize, CliError> {
    match sample.budget.unwrap_or(default) {
        0 => Err(CliError::Usage("--budget must be at least 1".into())),
        b => Ok(b),
    }
}

/// Emits the report, then turns a failed check into exit code 1.
fn finish(text: String, out: Option<&Path>, passed: bool) -> Result<(), CliError> {
    emit(&text, out)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Ord { exprs, output } => {
            let evals = exprs.iter().map(|e| ord::evaluate(e)).collect::<Result<Vec<_>, _>>()?;
            let text = match output.format.unwrap_or(Format::Pretty) {
                Format::Json => json(&evals),
                Format::Csv => Table {
                    header: vec!["input", "result"],
                    rows: evals.iter().map(ord::Evaluation::row).collect(),
                }
                .csv()?,
                Format::Pretty => evals.iter().map(|e| e.pretty() + "\n").collect(),
            };
            emit(&text, output.out.as_deref())
        }
        Command::Cb { top, order, output } => {
            let d = ord::derived_set(&ord::parse_arg("top", &top)?, &ord::parse_arg("order", &order)?)?;
            let text = match output.format.unwrap_or(Format::Pretty) {
                Format::Json => json(&d),
                Format::Csv => Table {
                    header: vec!["top", "order", "size", "description"],
                    rows: vec![vec![d.top.to_string(), d.order.to_string(), d.size.into(), d.description.clone()]],
                }
                .csv()?,
                Format::Pretty => d.description.clone() + "\n",
            };
            emit(&text, output.out.as_deref())
        }
        Command::Build {
            kind,
            alpha,
            n,
            input,
            output,
        } => {
            let built = match kind {
                BuildKind::C0 => {
                    let n = match (n, &alpha) {
                        (Some(n), _) => n,
                        (None, Some(a)) => ord::parse_arg("alpha", a)?
                            .as_nat()
                            .ok_or_else(|| CliError::Usage("c0 needs a natural --n".into()))?,
                        (None, None) => return Err(CliError::Usage("c0 needs --n".into())),
                    };
                    build::build_c0(n)?
                }
                BuildKind::Real | BuildKind::Complex => {
                    let alpha = alpha.ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
                    let alpha = ord::parse_arg("alpha", &alpha)?;
                    let f = input.map(|i| read_stepfun(&i)).transpose()?;
                    let kind = if kind == BuildKind::Real {
                        EmbeddingKind::RealSpr
                    } else {
                        EmbeddingKind::ComplexSpr
                    };
                    build::build_embedding(kind, &alpha, f)?
                }
            };
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => json(&built),
                Format::Csv | Format::Pretty => {
                    let table = Table {
                        header: vec!["kind", "s", "t", "point", "re", "im"],
                        rows: built
                            .witnesses
                            .iter()
                            .map(|w| {
                                vec![
                                    w.kind.into(),
                                    w.s.to_string(),
                                    w.t.as_ref().map(ToString::to_string).unwrap_or_default(),
                                    w.point.to_string(),
                                    w.value[0].to_string(),
                                    w.value[1].to_string(),
                                ]
                            })
                            .collect(),
                    };
                    if output.format == Some(Format::Csv) {
                        table.csv()?
                    } else {
                        format!("image pieces: {}\n", built.image.num_pieces()) + &table.pretty()
                    }
                }
            };
            emit(&text, output.out.as_deref())
        }
        Command::Verify {
            suite,
            sample,
            mutant_tail_offset,
            output,
        } => {
            let opts = VerifyOptions {
                budget: budget(&sample, DEFAULT_BUDGET)?,
                seed: sample.seed,
                mutant_tail_offset,
            };
            let report = run_suite(suite.into(), &opts).map_err(|e| CliError::Usage(e.to_string()))?;
            let rows: Vec<Vec<String>> = report
                .suites
                .iter()
                .flat_map(|s| {
                    s.properties.results.iter().map(move |r| {
                        vec![
                            s.suite.to_string(),
                            r.name.clone(),
                            r.samples.to_string(),
                            if r.passed { "pass" } else { "FAIL" }.to_string(),
                        ]
                    })
                })
                .collect();
            let table = Table {
                header: vec!["suite", "property", "samples", "result"],
                rows,
            };
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => json(&report),
                Format::Csv => table.csv()?,
                Format::Pretty => table.pretty(),
            };
            finish(text, output.out.as_deref(), report.passed)
        }
        Command::Estimate {
            alpha,
            field,
            sample,
            tol,
            output,
        } => {
            if !(tol > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            let budget = budget(&sample, 10_000)?;
            let opts = EstimateOptions {
                tol,
                ..EstimateOptions::default()
            };
            let mut reports: Vec<SprReport> = Vec::new();
            for a in alpha.split(',') {
                let a = ord::parse_arg("alpha", a.trim())?;
                let e = match field {
                    FieldArg::Real => Embedding::real(&a),
                    FieldArg::Complex => Embedding::complex(&a),
                }
                .map_err(|e| CliError::Usage(e.to_string()))?;
                let r = estimate_spr_constant(&e, budget, sample.seed, &opts)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                reports.push(r);
            }
            let table = Table {
                header: vec!["alpha", "field", "samples", "worst_ratio", "certificate", "pass"],
                rows: reports.iter().flat_map(|r| r.csv_rows().into_iter().map(Vec::from)).collect(),
            };
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => json(&reports),
                Format::Csv => table.csv()?,
                Format::Pretty => table.pretty(),
            };
            finish(text, output.out.as_deref(), reports.iter().all(SprReport::passed))
        }
    }
}

fn read_stepfun(input: &str) -> Result<StepFun, CliError> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        std::fs::read_to_string(input).map_err(|e| CliError::Io(format!("{input}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("input step function: {e}")))
}
