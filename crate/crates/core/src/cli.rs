//! Command-line front end.
//!
//! Exit codes: 0 success, 1 grammar or internal error, 2 unreadable file,
//! 3 no reading, 4 unknown word, 5 reading index out of range.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::chart::{tokenize, Chart, ChartError, ParseOptions, Reading};
use crate::grammar::{parse_category, Grammar};
use crate::render::render_avm;
use crate::solver::{minimal_models, Mode, SolveOptions, SolverError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NO_READING: i32 = 3;
pub const EXIT_UNKNOWN_WORD: i32 = 4;
pub const EXIT_BAD_INDEX: i32 = 5;

/// Environment variable overriding the solver's step bound.
pub const FUEL_VAR: &str = "CCLG_FUEL";

#[derive(Parser, Debug)]
#[command(
    name = "cclg",
    version,
    about = "Constraint categorial grammar: check grammars, parse sentences, inspect models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a grammar and list each entry with its inferred type
    Check { grammar: PathBuf },
    /// Parse a sentence and print its readings
    Parse {
        grammar: PathBuf,
        /// the sentence; several arguments are joined with spaces
        #[arg(required = true)]
        sentence: Vec<String>,
        #[command(flatten)]
        opts: ParseFlags,
        #[arg(long, value_enum, default_value_t = Format::Lambda)]
        format: Format,
    },
    /// Print the solved form, residue and minimal models of one reading
    Models {
        grammar: PathBuf,
        #[arg(required = true)]
        sentence: Vec<String>,
        #[command(flatten)]
        opts: ParseFlags,
        /// 1-based reading number
        #[arg(long, default_value_t = 1)]
        reading: usize,
    },
}

#[derive(clap::Args, Debug, Clone)]
pub struct ParseFlags {
    /// category of a complete sentence
    #[arg(long = "cat", default_value = "s")]
    pub cat: String,
    /// solve edges while the chart is built
    #[arg(long)]
    pub interleave: bool,
    /// skip distribution in the solver (polynomial, may keep unsatisfiable readings)
    #[arg(long)]
    pub incomplete: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Avm,
    Lambda,
    Json,
    Dot,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Check { grammar } => cmd_check(grammar, out),
        Command::Parse {
            grammar,
            sentence,
            opts,
            format,
        } => cmd_parse(grammar, &sentence.join(" "), opts, *format, out),
        Command::Models {
            grammar,
            sentence,
            opts,
            reading,
        } => cmd_models(grammar, &sentence.join(" "), opts, *reading, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "cclg: {message}");
            code
        }
    }
}

/// A command's error: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        fail(EXIT_ERROR, format!("writing output: {e}"))
    }
}

fn load(path: &Path) -> Result<Grammar, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
    Grammar::parse(&src).map_err(|e| fail(EXIT_ERROR, format!("{}:{e}", path.display())))
}

fn solver_options(incomplete: bool) -> Result<SolveOptions, Failure> {
    let fuel = match std::env::var(FUEL_VAR) {
        Ok(v) => Some(v.trim().parse::<u64>().map_err(|_| {
            fail(
                EXIT_ERROR,
                format!("{FUEL_VAR} must be a non-negative integer, got `{v}`"),
            )
        })?),
        Err(_) => None,
    };
    Ok(SolveOptions {
        mode: if incomplete {
            Mode::Polynomial
        } else {
            Mode::Complete
        },
        fuel,
    })
}

fn chart_failure(e: ChartError) -> Failure {
    match e {
        ChartError::UnknownWords(_) => fail(EXIT_UNKNOWN_WORD, e.to_string()),
        other => fail(EXIT_ERROR, other.to_string()),
    }
}

pub fn cmd_check(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = load(path)?;
    let width = g.lexicon.iter().map(|e| e.word.len()).max().unwrap_or(0);
    let cat_width = g
        .lexicon
        .iter()
        .map(|e| e.cat.to_string().len())
        .max()
        .unwrap_or(0);
    for e in &g.lexicon {
        writeln!(
            out,
            "{:<width$}  {:<cat_width$}  : {}",
            e.word,
            e.cat.to_string(),
            e.ty
        )?;
    }
    for t in &g.transformations {
        writeln!(out, "rule {} => {}", t.from, t.to)?;
    }
    writeln!(
        out,
        "{}: {} entries, {} transformation(s), {} macro(s)",
        path.display(),
        g.lexicon.len(),
        g.transformations.len(),
        g.macros.len()
    )?;
    for w in &g.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(EXIT_OK)
}

fn parse_readings(
    g: &Grammar,
    sentence: &str,
    flags: &ParseFlags,
) -> Result<(Chart, Vec<Reading>), Failure> {
    let target = parse_category(&flags.cat).map_err(|e| fail(EXIT_ERROR, format!("--cat: {e}")))?;
    let opts = ParseOptions {
        interleave: flags.interleave,
        solver: solver_options(flags.incomplete)?,
    };
    let mut chart = Chart::parse(g, &tokenize(sentence), &opts).map_err(chart_failure)?;
    let readings = chart.readings(g, &target, &opts).map_err(chart_failure)?;
    Ok((chart, readings))
}

pub fn cmd_parse(
    path: &Path,
    sentence: &str,
    flags: &ParseFlags,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = load(path)?;
    let (chart, readings) = parse_readings(&g, sentence, flags)?;
    match format {
        Format::Dot => write!(out, "{}", chart.to_dot(&g))?,
        Format::Json => {
            let rs: Vec<serde_json::Value> = readings
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "derivation": r.derivation.to_string(),
                        "term": r.term,
                        "model": r.model().constraints().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "residue": r.state.residue,
                    })
                })
                .collect();
            let doc = serde_json::json!({ "sentence": chart.tokens.join(" "), "readings": rs });
            let text =
                serde_json::to_string_pretty(&doc).map_err(|e| fail(EXIT_ERROR, e.to_string()))?;
            writeln!(out, "{text}")?;
        }
        Format::Lambda | Format::Avm => {
            for (i, r) in readings.iter().enumerate() {
                writeln!(out, "reading {}: {}", i + 1, r.derivation)?;
                if format == Format::Lambda {
                    writeln!(out, "  {}", r.term)?;
                } else {
                    write!(out, "{}", render_avm(r.model()))?;
                    writeln!(out, "residue: {}", r.state.residue)?;
                }
                if i + 1 < readings.len() {
                    writeln!(out)?;
                }
            }
        }
    }
    if readings.is_empty() {
        return Err(fail(
            EXIT_NO_READING,
            format!("no reading of category {} for \"{sentence}\"", flags.cat),
        ));
    }
    Ok(EXIT_OK)
}

pub fn cmd_models(
    path: &Path,
    sentence: &str,
    flags: &ParseFlags,
    n: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let g = load(path)?;
    let (_, readings) = parse_readings(&g, sentence, flags)?;
    if readings.is_empty() {
        return Err(fail(
            EXIT_NO_READING,
            format!("no reading for \"{sentence}\""),
        ));
    }
    if n == 0 || n > readings.len() {
        return Err(fail(
            EXIT_BAD_INDEX,
            format!("reading {n} does not exist; there are {}", readings.len()),
        ));
    }
    let r = &readings[n - 1];
    let m = r.model();
    writeln!(out, "reading {n}: {}", r.derivation)?;
    writeln!(out, "model:")?;
    for c in m.constraints() {
        writeln!(out, "  {c}")?;
    }
    writeln!(out, "residue: {}", r.state.residue)?;
    if r.state.residue.is_const(true) {
        writeln!(out, "minimal models: 1 (the model itself)")?;
        return Ok(EXIT_OK);
    }
    match minimal_models(&r.state.residue) {
        Ok(models) => {
            writeln!(out, "minimal models of the residue: {}", models.len())?;
            for (i, mm) in models.iter().enumerate() {
                let mut full = m.clone();
                let consistent = mm
                    .constraints()
                    .iter()
                    .all(|c| full.assert_eq(&c.lhs, &c.rhs).is_ok());
                if !consistent {
                    continue;
                }
                writeln!(out, "model {}:", i + 1)?;
                for c in full.constraints() {
                    writeln!(out, "  {c}")?;
                }
            }
        }
        Err(SolverError::NotFirstOrder(_)) => {
            writeln!(out, "residue is not first-order; no model enumeration")?
        }
        Err(e) => writeln!(out, "models not enumerated: {e}")?,
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(
            std::iter::once("cclg").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn grammar_path(name: &str) -> String {
        format!("{}/grammars/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn check_lists_entries() {
        let (code, out, _) = run_args(&["check", &grammar_path("english.cclg")]);
        assert_eq!(code, 0);
        assert!(out.contains("16 entries"), "{out}");
    }

    #[test]
    fn missing_file() {
        let (code, _, err) = run_args(&["check", "/nonexistent/g.cclg"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.contains("/nonexistent/g.cclg"));
    }

    #[test]
    fn exit_codes_for_parse() {
        let g = grammar_path("english.cclg");
        assert_eq!(run_args(&["parse", &g, "book john"]).0, EXIT_NO_READING);
        let (code, _, err) = run_args(&["parse", &g, "john", "sleeps"]);
        assert_eq!(code, EXIT_UNKNOWN_WORD);
        assert!(err.contains("sleeps"));
        assert_eq!(
            run_args(&["models", &g, "john died", "--reading", "99"]).0,
            EXIT_BAD_INDEX
        );
    }

    #[test]
    fn toy_sentence() {
        let (code, out, _) = run_args(&["parse", &grammar_path("toy.cclg"), "John runs"]);
        assert_eq!(code, 0);
        assert!(out.contains("\\x_1. x_1.reln=run & x_1.arg1=john"), "{out}");
    }
}
