//! `rwbl`: prove, refute and inspect formulas of Basic Logic.
//!
//! Exit status: 0 provable/accepted, 1 not provable/rejected, 2 usage or
//! input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rwbl_core::prover::{check_no_tautology, check_tautology_with, CertificateJson, ProveResult};
use rwbl_core::reduction::{build_tree, tree_stats, Mode, TreeStats};
use rwbl_core::{eval, parse, Formula, Valuation};

#[derive(Parser)]
#[command(name = "rwbl", version, about = "Decide provability in Basic Logic with countermodels and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a formula is a theorem.
    Prove {
        formula: String,
        /// Print the countermodel of a non-theorem.
        #[arg(long)]
        countermodel: bool,
        /// Print the certificate of a non-theorem (rwbl mode only).
        #[arg(long)]
        certificate: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Rwbl)]
        mode: ModeArg,
        /// Maximum branch length in rhbl mode.
        #[arg(long, default_value_t = 1000)]
        depth_limit: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check a certificate of unprovability.
    Verify {
        formula: String,
        /// A certificate file, or the JSON output of `prove --certificate`.
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the reduction tree.
    Tree {
        formula: String,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
        /// Print tree statistics instead of the tree.
        #[arg(long)]
        stats: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Rwbl)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        depth_limit: usize,
    },
    /// Evaluate a formula under a valuation file.
    Eval {
        formula: String,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Rwbl,
    Rhbl,
}

impl ModeArg {
    fn mode(self) -> Mode {
        match self {
            ModeArg::Rwbl => Mode::Rwbl,
            ModeArg::Rhbl => Mode::Rhbl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Json,
}

/// Input problems; reported on stderr with exit status 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn read_formula(text: &str) -> Result<Formula, Failure> {
    parse(text).map_err(|e| {
        let caret = " ".repeat(e.position());
        Failure(format!("cannot parse formula: {e}\n  {text}\n  {caret}^"))
    })
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn prove(
    text: &str,
    countermodel: bool,
    certificate: bool,
    mode: ModeArg,
    depth_limit: usize,
    as_json: bool,
) -> Result<ExitCode, Failure> {
    if certificate && mode == ModeArg::Rhbl {
        return Err(Failure("certificates are only defined for --mode rwbl".into()));
    }
    let a = read_formula(text)?;
    let limit = match mode {
        ModeArg::Rwbl => a.complexity(),
        ModeArg::Rhbl => depth_limit,
    };
    let result = check_tautology_with(&a, mode.mode(), Some(limit))?;
    let refutation = match &result {
        ProveResult::Provable => None,
        ProveResult::NotProvable(r) => Some(r),
    };
    if as_json {
        let mut out = json!({ "formula": a.to_string(), "provable": result.is_provable() });
        if let Some(r) = refutation {
            if countermodel {
                out["countermodel"] = r.countermodel.to_json();
            }
            if let (true, Some(c)) = (certificate, &r.certificate) {
                out["certificate"] = serde_json::to_value(CertificateJson::new(&a, c))?;
            }
        }
        println!("{out}");
    } else {
        println!("{}", if result.is_provable() { "provable" } else { "not provable" });
        if let Some(r) = refutation {
            if countermodel {
                println!("countermodel: {}", r.countermodel);
            }
            if let (true, Some(c)) = (certificate, &r.certificate) {
                println!("certificate: {}", serde_json::to_string(&CertificateJson::new(&a, c))?);
            }
        }
    }
    Ok(status(result.is_provable()))
}

/// Accepts `{"formula", "moves"}` or a `prove --json` object holding one.
fn certificate_from(value: Value) -> Result<CertificateJson, Failure> {
    let inner = match value.get("certificate") {
        Some(c) => c.clone(),
        None => value,
    };
    serde_json::from_value(inner).map_err(|e| Failure(format!("not a certificate: {e}")))
}

fn verify(text: &str, path: &PathBuf, as_json: bool) -> Result<ExitCode, Failure> {
    let a = read_formula(text)?;
    let cert = certificate_from(read_json(path)?)?;
    let certified = cert.formula().map_err(|e| Failure(format!("certificate formula: {e}")))?;
    let verdict = if certified != a {
        Err(format!("certificate is for {certified}, not {a}"))
    } else {
        check_no_tautology(&a, &cert.certificate()).map_err(|e| e.to_string())
    };
    match (&verdict, as_json) {
        (Ok(v), true) => println!("{}", json!({ "accepted": true, "countermodel": v.to_json() })),
        (Ok(v), false) => println!("accepted\ncountermodel: {v}"),
        (Err(why), true) => println!("{}", json!({ "accepted": false, "reason": why })),
        (Err(why), false) => println!("rejected: {why}"),
    }
    Ok(status(verdict.is_ok()))
}

fn stats_text(s: &TreeStats) -> String {
    format!(
        "height {}\nnodes {}\nleaves {}\nmax branch weight {}\nreducible subformulas at root {}",
        s.height, s.node_count, s.leaf_count, s.max_branch_weight, s.root_reducible
    )
}

fn tree(text: &str, emit: Emit, stats: bool, mode: ModeArg, depth_limit: usize) -> Result<ExitCode, Failure> {
    let a = read_formula(text)?;
    let limit = match mode {
        ModeArg::Rwbl => a.complexity(),
        ModeArg::Rhbl => depth_limit,
    };
    if stats {
        let s = tree_stats(&a, mode.mode(), Some(limit))?;
        match emit {
            Emit::Json => println!("{}", serde_json::to_string(&s)?),
            Emit::Dot => println!("{}", stats_text(&s)),
        }
    } else {
        let t = build_tree(&a, mode.mode(), Some(limit))?;
        match emit {
            Emit::Json => println!("{}", t.to_json()),
            Emit::Dot => print!("{}", t.to_dot()),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn evaluate(text: &str, path: &PathBuf, as_json: bool) -> Result<ExitCode, Failure> {
    let a = read_formula(text)?;
    let v = Valuation::from_json(&read_json(path)?)?;
    let value = eval(&v, &a)?;
    if as_json {
        println!("{}", json!({ "formula": a.to_string(), "value": value.to_string() }));
    } else {
        println!("{value}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prove { formula, countermodel, certificate, mode, depth_limit, json } => {
            prove(&formula, countermodel, certificate, mode, depth_limit, json)
        }
        Command::Verify { formula, cert, json } => verify(&formula, &cert, json),
        Command::Tree { formula, emit, stats, mode, depth_limit } => tree(&formula, emit, stats, mode, depth_limit),
        Command::Eval { formula, valuation, json } => evaluate(&formula, &valuation, json),
    };
    result.unwrap_or_else(|Failure(message)| {
        eprintln!("error: {message}");
        ExitCode::from(2)
    })
}
