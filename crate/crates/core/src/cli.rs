//! The `gpfactors` command line.
//!
//! Every subcommand writes a deterministic report to the output stream, as a
//! text table or as JSON (`--format json`). Parse and validation errors exit
//! with status 2, internal invariant violations with status 1.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::automatic::{Dfao, FactorBound, KernelCollision};
use crate::factordecide::{common_factors, CommonFactorReport, QuadraticPhase};
use crate::gpexpr::{parse_constant, GpExpr};
use crate::quadfield::QuadExt;
use crate::words::Word;
use crate::Error;

pub const THUE_MORSE: &str = "thue-morse";

#[derive(Debug, Parser)]
#[command(
    name = "gpfactors",
    version,
    about = "Common factors of automatic sequences and generalised polynomials, computed exactly"
)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, short = 'j', global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a generalised-polynomial expression exactly.
    EvalGp {
        expr: String,
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// Evaluate an automatic sequence (`thue-morse` or a JSON automaton file).
    EvalAutomatic {
        dfao: String,
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// Evaluate a quadratic-phase sequence, e.g. "alpha=sqrt(2); arc=(-1/4,1/4)".
    EvalPhase {
        phase: String,
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// List the factors of one length of an automatic sequence.
    Factors {
        dfao: String,
        #[arg(long, value_name = "L")]
        len: usize,
        /// Scan exactly the first N values.
        #[arg(long, value_name = "N", conflicts_with_all = ["certified", "doubling"])]
        prefix: Option<usize>,
        /// Use the proven appearance bound (Thue-Morse only).
        #[arg(long, conflicts_with = "doubling")]
        certified: bool,
        /// Double the prefix until the factor set is stable (not certified).
        #[arg(long)]
        doubling: bool,
    },
    /// Decide whether a 0/1 word is a factor of a quadratic-phase sequence.
    DecideFactor {
        phase: String,
        word: String,
        /// Print an exact interior parameter point and the floor assignment.
        #[arg(long)]
        witness: bool,
    },
    /// All common factors of an automatic sequence and a quadratic-phase sequence.
    CommonFactors {
        dfao: String,
        phase: String,
        #[arg(long, value_name = "L")]
        max_len: usize,
        /// Override: enumerate automaton factors from the first N values (not certified).
        #[arg(long, value_name = "N", conflicts_with = "doubling")]
        prefix: Option<usize>,
        /// Override: heuristic doubling enumeration (not certified).
        #[arg(long)]
        doubling: bool,
    },
    /// Smallest k-kernel collision x(k^r n + s) = x(k^r n + t).
    KernelCollision { dfao: String },
    /// First values of the Sturmian word floor(alpha(n+1)+rho) - floor(alpha n+rho) - floor(alpha).
    Sturmian {
        alpha: String,
        rho: String,
        #[arg(long, value_name = "N")]
        count: u64,
    },
}

/// Exact `a + b*sqrt(d)` with big-integer components as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub text: String,
    pub rational: [String; 2],
    pub surd: [String; 2],
    pub radicand: Option<u32>,
    pub approx: f64,
}

impl From<&QuadExt> for ExactValue {
    fn from(x: &QuadExt) -> Self {
        let pair = |r: &num_rational::BigRational| [r.numer().to_string(), r.denom().to_string()];
        ExactValue {
            text: x.to_string(),
            rational: pair(x.rational_part()),
            surd: pair(x.surd_part()),
            radicand: if x.is_rational() {
                None
            } else {
                x.field().map(|d| d.get())
            },
            approx: x.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalEntry {
    pub n: u64,
    pub value: ExactValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub source: String,
    pub values: Vec<EvalEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub n: u64,
    pub symbol: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolReport {
    pub source: String,
    pub values: Vec<SymbolEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorsReport {
    pub automaton: String,
    pub length: usize,
    pub prefix: usize,
    pub certified: bool,
    pub count: usize,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub beta: ExactValue,
    pub gamma: ExactValue,
    pub floors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub phase: String,
    pub word: Word,
    pub accepted: bool,
    pub branches: u64,
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonFactorsOutput {
    pub automaton: String,
    pub phase: String,
    pub max_len: usize,
    #[serde(flatten)]
    pub report: CommonFactorReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub automaton: String,
    pub base: u32,
    pub kernel_size: usize,
    #[serde(flatten)]
    pub collision: KernelCollision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmianReport {
    pub alpha: String,
    pub rho: String,
    pub expression: String,
    pub values: Word,
}

/// Resolves the built-in `thue-morse` name or reads a JSON automaton file.
pub fn load_dfao(source: &str) -> Result<Dfao, CliError> {
    if source == THUE_MORSE {
        return Ok(Dfao::thue_morse());
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| CliError::Usage(format!("cannot read automaton {source:?}: {e}")))?;
    Ok(Dfao::from_json(&text).map_err(Error::from)?)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match catch_unwind(AssertUnwindSafe(|| run(&config, out))) {
        Ok(Ok(())) => 0,
        Ok(Err(CliError::Io(e))) => {
            let _ = writeln!(err, "error: cannot write output: {e}");
            1
        }
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(err, "internal error: {msg}");
            1
        }
    }
}

pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        builder = builder.num_threads(j as usize);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let mut buffer = Vec::new();
    let result = pool.install(|| dispatch(config, &mut buffer));
    out.write_all(&buffer)?;
    result
}

fn emit<T: Serialize>(
    format: Format,
    out: &mut dyn Write,
    report: &T,
    text: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(|e| CliError::Io(e.into()))?;
            writeln!(out)?;
        }
        Format::Text => text(out)?,
    }
    Ok(())
}

fn dispatch(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let format = config.format;
    match &config.command {
        Command::EvalGp { expr, n } => {
            let e = GpExpr::parse(expr).map_err(Error::from)?;
            let report = EvalReport {
                source: e.to_string(),
                values: n
                    .iter()
                    .map(|&n| EvalEntry {
                        n,
                        value: ExactValue::from(&e.eval(n)),
                    })
                    .collect(),
            };
            emit(format, out, &report, |out| {
                writeln!(out, "# {}", report.source)?;
                writeln!(out, "n\tvalue\tapprox")?;
                for v in &report.values {
                    writeln!(out, "{}\t{}\t{:.12}", v.n, v.value.text, v.value.approx)?;
                }
                Ok(())
            })
        }
        Command::EvalAutomatic { dfao, n } => {
            let x = load_dfao(dfao)?;
            symbol_table(format, out, dfao.clone(), n, |n| x.eval(n))
        }
        Command::EvalPhase { phase, n } => {
            let p: QuadraticPhase = phase.parse().map_err(Error::from)?;
            symbol_table(format, out, p.to_string(), n, |n| p.eval(n))
        }
        Command::Factors {
            dfao,
            len,
            prefix,
            certified,
            doubling,
        } => {
            let x = load_dfao(dfao)?;
            let bound = match (prefix, certified, doubling) {
                (Some(n), _, _) => FactorBound::Prefix(*n),
                (None, true, _) => FactorBound::Certified,
                (None, false, true) => FactorBound::Doubling { start: 64 },
                (None, false, false) => {
                    return Err(CliError::Usage(
                        "choose one of --prefix N, --certified or --doubling".into(),
                    ))
                }
            };
            let set = x.enumerate_factors(*len, bound).map_err(|e| match e {
                crate::automatic::AutomatonError::NotCertifiable => CliError::Usage(format!(
                    "{e}; use --prefix N or --doubling for other automata"
                )),
                e => Error::from(e).into(),
            })?;
            let report = FactorsReport {
                automaton: dfao.clone(),
                length: *len,
                prefix: set.prefix,
                certified: set.certified,
                count: set.words.len(),
                words: set.words.into_iter().collect(),
            };
            emit(format, out, &report, |out| {
                writeln!(
                    out,
                    "# {} factors of length {} from a prefix of {} values ({})",
                    report.count,
                    report.length,
                    report.prefix,
                    if report.certified {
                        "certified"
                    } else {
                        "not certified"
                    }
                )?;
                for w in &report.words {
                    writeln!(out, "{w}")?;
                }
                Ok(())
            })
        }
        Command::DecideFactor {
            phase,
            word,
            witness,
        } => {
            let p: QuadraticPhase = phase.parse().map_err(Error::from)?;
            let w: Word = word.parse().map_err(Error::from)?;
            let d = p.decide_factor(&w)?;
            let report = DecisionReport {
                phase: p.to_string(),
                word: w,
                accepted: d.accepted,
                branches: d.branches,
                witness: d.witness.filter(|_| *witness).map(|wit| WitnessReport {
                    beta: ExactValue::from(&wit.beta),
                    gamma: ExactValue::from(&wit.gamma),
                    floors: wit.assignment.0.iter().map(|k| k.to_string()).collect(),
                }),
            };
            emit(format, out, &report, |out| {
                writeln!(
                    out,
                    "{}: {} ({} branches)",
                    if report.word.is_empty() {
                        "<empty>".to_string()
                    } else {
                        report.word.to_string()
                    },
                    if report.accepted {
                        "accepted"
                    } else {
                        "rejected"
                    },
                    report.branches
                )?;
                if let Some(wit) = &report.witness {
                    writeln!(out, "beta\t{}\t{:.12}", wit.beta.text, wit.beta.approx)?;
                    writeln!(out, "gamma\t{}\t{:.12}", wit.gamma.text, wit.gamma.approx)?;
                    writeln!(out, "floors\t[{}]", wit.floors.join(", "))?;
                }
                Ok(())
            })
        }
        Command::CommonFactors {
            dfao,
            phase,
            max_len,
            prefix,
            doubling,
        } => {
            let x = load_dfao(dfao)?;
            let p: QuadraticPhase = phase.parse().map_err(Error::from)?;
            let bound = match (prefix, doubling) {
                (Some(n), _) => FactorBound::Prefix(*n),
                (None, true) => FactorBound::Doubling { start: 64 },
                (None, false) => {
                    if !x.sequences_equal(&Dfao::thue_morse()).unwrap_or(false) {
                        return Err(CliError::Usage(
                            "no certified factor bound for this automaton; \
                             pass --prefix N or --doubling to accept an uncertified enumeration"
                                .into(),
                        ));
                    }
                    FactorBound::Certified
                }
            };
            let report = CommonFactorsOutput {
                automaton: dfao.clone(),
                phase: p.to_string(),
                max_len: *max_len,
                report: common_factors(&x, &p, *max_len, bound)?,
            };
            emit(format, out, &report, |out| write_common(out, &report))
        }
        Command::KernelCollision { dfao } => {
            let x = load_dfao(dfao)?;
            let collision = x.kernel_collision();
            let report = KernelReport {
                automaton: dfao.clone(),
                base: x.base(),
                kernel_size: x.kernel_size(),
                collision,
            };
            emit(format, out, &report, |out| {
                let kr = (report.base as u64).pow(collision.r);
                writeln!(
                    out,
                    "r={}, s={}, t={}",
                    collision.r, collision.s, collision.t
                )?;
                writeln!(
                    out,
                    "x({kr}n + {}) = x({kr}n + {}) for all n >= 0 (kernel size {})",
                    collision.s, collision.t, report.kernel_size
                )
            })
        }
        Command::Sturmian { alpha, rho, count } => {
            let a = parse_constant(alpha).map_err(Error::from)?;
            let r = parse_constant(rho).map_err(Error::from)?;
            let e = GpExpr::sturmian(&a, &r).map_err(Error::from)?;
            let seq = crate::gpexpr::GpSequence(e);
            let values = crate::words::SymbolSequence::prefix(&seq, *count as usize)?;
            let report = SturmianReport {
                alpha: a.to_string(),
                rho: r.to_string(),
                expression: seq.0.to_string(),
                values: Word::new(values),
            };
            emit(format, out, &report, |out| {
                writeln!(out, "{}", report.values)
            })
        }
    }
}

fn symbol_table(
    format: Format,
    out: &mut dyn Write,
    source: String,
    ns: &[u64],
    f: impl Fn(u64) -> u8,
) -> Result<(), CliError> {
    let report = SymbolReport {
        source,
        values: ns
            .iter()
            .map(|&n| SymbolEntry { n, symbol: f(n) })
            .collect(),
    };
    emit(format, out, &report, |out| {
        writeln!(out, "# {}", report.source)?;
        writeln!(out, "n\tvalue")?;
        for v in &report.values {
            writeln!(out, "{}\t{}", v.n, v.symbol)?;
        }
        Ok(())
    })
}

fn write_common(out: &mut dyn Write, r: &CommonFactorsOutput) -> std::io::Result<()> {
    writeln!(out, "automaton: {}", r.automaton)?;
    writeln!(out, "phase: {}", r.phase)?;
    writeln!(out, "length\tcommon")?;
    for level in &r.report.levels {
        writeln!(out, "{}\t{}", level.length, level.words.len())?;
    }
    writeln!(out, "longest: {}", r.report.longest)?;
    if r.report.complete {
        writeln!(
            out,
            "complete: yes (no common factor of length {})",
            r.report.longest + 1
        )?;
    } else {
        writeln!(out, "complete: no (stopped at --max-len {})", r.max_len)?;
    }
    writeln!(
        out,
        "certified enumeration: {}",
        if r.report.certified { "yes" } else { "no" }
    )?;
    writeln!(out, "candidates decided: {}", r.report.decided)?;
    writeln!(out, "maximal common factors ({}):", r.report.maximal.len())?;
    for w in &r.report.maximal {
        writeln!(out, "  {w}")?;
    }
    Ok(())
}
