//! Command-line front end. Verdicts go to the writer as s-expressions.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::disambig::enumerate;
use crate::engine::prove::{print_trace, Goal, Outcome, Prover};
use crate::engine::sexp::quote;
use crate::engine::syntax::{parse_database, parse_model, parse_udrs, print_udrs};
use crate::modelsem::{resolve, Models, Oracle, QuantifierTable, Relation};
use crate::rules::{self, polarity, RuleError};
use crate::structure::*;

pub const HOLDS: i32 = 0;
pub const FAILS: i32 = 1;
pub const INAPPLICABLE: i32 = 2;
pub const INPUT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "udrs", about = "Reasoning with scope-underspecified DRSs")]
struct Cli {
    /// Threshold of `few`: at most this many.
    #[arg(long, global = true, default_value_t = 2)]
    few_k: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rel {
    R1,
    R3,
    R4,
    R8,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate the readings of a UDRS.
    Readings { file: PathBuf },
    /// Decide a consequence relation with the bounded-model oracle.
    Entail {
        #[arg(long, value_enum)]
        rel: Rel,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        db: PathBuf,
        goal: PathBuf,
        /// Directory of model files to use instead of every small model.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Search for a proof of GOAL from DB.
    Prove {
        db: PathBuf,
        goal: PathBuf,
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the polarity of every label.
    Polarity { file: PathBuf },
    /// Apply DIFF wherever it is enabled.
    Diff { db: PathBuf },
    /// Check a database file for well-formedness.
    Validate { file: PathBuf },
}

struct Failure(i32, String);

fn input<E: std::fmt::Display>(what: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure(INPUT_ERROR, format!("{}: {e}", what.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path))
}

fn database(path: &Path) -> Result<Database, Failure> {
    parse_database(&read(path)?).map_err(input(path))
}

fn udrs(path: &Path) -> Result<Udrs, Failure> {
    parse_udrs(&read(path)?).map_err(input(path))
}

fn well_formed(path: &Path, u: &Udrs) -> Result<(), Failure> {
    validate(u).map_err(input(path))
}

fn labels(ls: &[Label]) -> String {
    ls.iter().map(Label::to_string).collect::<Vec<_>>().join(" ")
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { INPUT_ERROR } else { HOLDS };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(out, "(error {})", quote(&msg));
            code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let table = QuantifierTable::standard(cli.few_k);
    let io = |e: std::io::Error| Failure(INPUT_ERROR, e.to_string());
    match &cli.cmd {
        Cmd::Readings { file } => {
            let u = udrs(file)?;
            well_formed(file, &u)?;
            let rs = enumerate(&u).map_err(input(file))?;
            writeln!(out, "(readings :count {}", rs.len()).map_err(io)?;
            for s in &rs {
                let orders: Vec<String> = s
                    .per_clause
                    .iter()
                    .map(|(c, o)| format!("({c} {})", labels(o)))
                    .collect();
                let drs = resolve(&u, s).map_err(input(file))?;
                writeln!(out, "  (reading {} {})", orders.join(" "), quote(&drs.to_string())).map_err(io)?;
            }
            writeln!(out, ")").map_err(io)?;
            Ok(HOLDS)
        }
        Cmd::Entail {
            rel,
            bound,
            db,
            goal,
            models,
        } => {
            let d = database(db)?;
            let g = udrs(goal)?;
            for e in d.entries.iter().chain([&g]) {
                well_formed(db, e)?;
            }
            let mut oracle = Oracle::new(table, *bound);
            if let Some(dir) = models {
                let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                    .map_err(input(dir))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "model"))
                    .collect();
                paths.sort();
                let ms = paths
                    .iter()
                    .map(|p| parse_model(&read(p)?).map_err(input(p)))
                    .collect::<Result<Vec<_>, _>>()?;
                oracle.models = Models::Explicit(ms);
            }
            let relation = match rel {
                Rel::R1 => Relation::R1,
                Rel::R3 => Relation::R3,
                Rel::R4 => Relation::R4,
                Rel::R8 => Relation::R8,
            };
            let v = oracle.entails_db(&d, &g, relation).map_err(input(goal))?;
            write!(
                out,
                "(verdict :relation {} :holds {} :bound {} :models {}",
                relation.name(),
                v.holds,
                v.bound,
                v.models
            )
            .map_err(io)?;
            if let Some(w) = &v.witness {
                write!(out, "\n  (countermodel {})", w.model).map_err(io)?;
            }
            writeln!(out, ")").map_err(io)?;
            Ok(if v.holds { HOLDS } else { FAILS })
        }
        Cmd::Prove {
            db,
            goal,
            budget,
            bound,
            trace,
        } => {
            let d = database(db)?;
            let g = udrs(goal)?;
            let prover = Prover::new(Oracle::new(table, *bound), *budget);
            let p = prover
                .prove(&d, &Goal::search(g))
                .map_err(|e| Failure(INPUT_ERROR, e.to_string()))?;
            let t = &p.trace;
            writeln!(
                out,
                "(prove :outcome {} :steps {} :budget {})",
                t.outcome.name(),
                t.steps.len(),
                t.budget
            )
            .map_err(io)?;
            if let Some(path) = trace {
                fs::write(path, print_trace(t)).map_err(input(path))?;
            }
            Ok(match t.outcome {
                Outcome::Proved => HOLDS,
                Outcome::Refuted => FAILS,
                Outcome::Exhausted => INAPPLICABLE,
            })
        }
        Cmd::Polarity { file } => {
            let u = udrs(file)?;
            well_formed(file, &u)?;
            let p = polarity(&u, &table).map_err(input(file))?;
            write!(out, "(polarity").map_err(io)?;
            for (l, s) in &p {
                write!(out, " ({l} {})", s.sign()).map_err(io)?;
            }
            writeln!(out, ")").map_err(io)?;
            Ok(HOLDS)
        }
        Cmd::Diff { db } => {
            let d = database(db)?;
            for e in &d.entries {
                well_formed(db, e)?;
            }
            let mut fresh = d.fresh();
            let mut applied = false;
            let mut falsity = false;
            writeln!(out, "(diff").map_err(io)?;
            for (i, a) in d.entries.iter().enumerate() {
                for (j, b) in d.entries.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    match rules::diff(a, b, &mut fresh) {
                        Ok(v) => {
                            applied = true;
                            let text = print_udrs(&v).replace('\n', "\n    ");
                            writeln!(out, "  (narrowed {i} {j}\n    {text})").map_err(io)?;
                        }
                        Err(RuleError::Inconsistent) => {
                            falsity = true;
                            writeln!(out, "  (falsity {i} {j})").map_err(io)?;
                        }
                        Err(_) => {}
                    }
                }
            }
            writeln!(out, ")").map_err(io)?;
            Ok(if falsity {
                FAILS
            } else if applied {
                HOLDS
            } else {
                INAPPLICABLE
            })
        }
        Cmd::Validate { file } => {
            let d = database(file)?;
            for (i, e) in d.entries.iter().enumerate() {
                if let Err(v) = validate(e) {
                    writeln!(out, "(invalid :entry {i} :rule {} {})", v.rule(), quote(&v.to_string())).map_err(io)?;
                    return Ok(FAILS);
                }
            }
            writeln!(out, "(valid :entries {})", d.entries.len()).map_err(io)?;
            Ok(HOLDS)
        }
    }
}
