//! Command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 invalid algebra file,
//! 3 precondition violated, 4 budget exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra::{parse_algebra_with, Algebra, Element};
use crate::closure::{closure_with, d_tuples};
use crate::criteria::{
    check_d_generation, decide_egp_idempotent, fmt_set, growth_profile, switch_tuples, GrowthMode, SubsetPair,
};
use crate::error::Error;
use crate::limits::Limits;
use crate::tuples::TupleSet;
use crate::witnesses::{
    evenize_nice, find_blocker_bounded, lemma2_sigma, nice_relation_from_nonswitchability,
    projectivity_counterexample, sigma_n_relation, verify_nice, verify_sigma,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_ALGEBRA: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "subpowers", version, about = "Generating sets of powers of finite algebras")]
pub struct Cli {
    /// Maximum operation applications per closure.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT_CLOSURE_STEPS)]
    pub closure_budget: u64,

    /// Exact generating-set search runs only when k^n is at most this.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT_EXACT)]
    pub exact_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an algebra file and summarize it.
    Validate { algebra: PathBuf },
    /// Decide PGP/EGP for an idempotent algebra.
    Decide {
        algebra: PathBuf,
        /// Search m = 1..=k+2 for d-generation evidence behind a PGP verdict.
        #[arg(long)]
        evidence: bool,
    },
    /// Check whether <D_{A,m}> is all of A^{2m}.
    DCheck {
        algebra: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Check whether A^n is generated by its tuples with at most r switches.
    Switchable {
        algebra: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
    },
    /// Emit generating-set sizes for n = 1..=n_max as CSV.
    Growth {
        algebra: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value = "exact")]
        mode: GrowthMode,
    },
    /// Construct and dump a witness.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Export a tuple set, one tuple per line.
    #[command(subcommand)]
    Dump(DumpCommand),
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Nice relation from a failure of r-switchability at n.
    Nice {
        algebra: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        /// Identify two variables to make the arity even.
        #[arg(long)]
        even: bool,
    },
    /// The relation σ of arity 2s+k built from a nice relation.
    Sigma {
        algebra: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        /// The n of the constructed σ.
        #[arg(long)]
        sigma_n: usize,
    },
    /// Matrix showing a non-projective operation breaks σ_s.
    Counterexample {
        algebra: PathBuf,
        /// Operation name; defaults to the only operation.
        #[arg(long)]
        op: Option<String>,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Bounded search for a blocker set containing B.
    Blocker {
        algebra: PathBuf,
        /// Comma-separated elements of B.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<Element>,
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Comma-separated elements of α.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<Element>,
    /// Comma-separated elements of β.
    #[arg(long, value_delimiter = ',', required = true)]
    beta: Vec<Element>,
}

#[derive(Debug, Subcommand)]
pub enum DumpCommand {
    /// D_{A,m}.
    D {
        algebra: PathBuf,
        #[arg(long)]
        m: usize,
        /// Dump the generated subpower instead of the seeds.
        #[arg(long)]
        closed: bool,
    },
    /// Tuples of A^n with at most r switches.
    Switch {
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        closed: bool,
    },
    /// σ_n for a subset pair.
    Sigma {
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        closed: bool,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_invalid_algebra() => EXIT_INVALID_ALGEBRA,
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::ElementOutOfRange { .. } | Error::ArityMismatch { .. } => EXIT_USAGE,
            _ => EXIT_PRECONDITION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: format!("write failed: {e}"),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let limits = Limits {
        closure_steps: cli.closure_budget,
        exact: cli.exact_budget,
        ..Limits::default()
    };
    let l = &limits;
    match &cli.command {
        Command::Validate { algebra } => {
            let alg = load(algebra, l)?;
            writeln!(out, "size: {}", alg.universe())?;
            writeln!(out, "operations: {}", alg.operations().len())?;
            for op in alg.operations() {
                writeln!(out, "  {} arity {}", op.name(), op.arity())?;
            }
            match alg.idempotence_failure() {
                None => writeln!(out, "idempotent: yes")?,
                Some((op, a, v)) => {
                    let diag = vec![a.to_string(); op.arity()].join(",");
                    writeln!(out, "idempotent: no ({}({diag}) = {v})", op.name())?
                }
            }
        }
        Command::Decide { algebra, evidence } => {
            let alg = load(algebra, l)?;
            let mut decision = decide_egp_idempotent(&alg)?;
            if *evidence {
                decision = decision.with_d_generation_evidence(&alg, 1..=alg.universe() + 2, l)?;
            }
            write!(out, "{decision}")?;
        }
        Command::DCheck { algebra, m } => {
            let alg = load(algebra, l)?;
            let d = d_tuples(alg.universe(), *m, l)?;
            let closed = closure_with(&alg, &d, l)?;
            writeln!(out, "m: {m}")?;
            writeln!(out, "d_size: {}", d.len())?;
            writeln!(out, "closure_size: {}", closed.len())?;
            writeln!(out, "space: {}", closed.space())?;
            writeln!(out, "full: {}", closed.is_full())?;
            if closed.is_full() {
                writeln!(out, "conclusion: PGP (d-generation m={m})")?;
            } else {
                writeln!(out, "conclusion: not full at m={m}; consistent with EGP, not a proof")?;
            }
            debug_assert_eq!(closed.is_full(), check_d_generation(&alg, *m, l)?);
        }
        Command::Switchable { algebra, r, n } => {
            let alg = load(algebra, l)?;
            let seeds = switch_tuples(alg.universe(), *n, *r, l)?;
            let closed = closure_with(&alg, &seeds, l)?;
            writeln!(out, "r: {r}")?;
            writeln!(out, "n: {n}")?;
            writeln!(out, "seeds: {}", seeds.len())?;
            writeln!(out, "closure_size: {}", closed.len())?;
            writeln!(out, "space: {}", closed.space())?;
            writeln!(out, "switchable: {}", closed.is_full())?;
        }
        Command::Growth { algebra, n_max, mode } => {
            let alg = load(algebra, l)?;
            let profile = growth_profile(&alg, *n_max, *mode, l)?;
            write!(out, "{}", profile.to_csv())?;
            for note in &profile.notes {
                writeln!(err, "note: {note}")?;
            }
        }
        Command::Witness(w) => witness(w, l, out)?,
        Command::Dump(d) => dump(d, l, out)?,
    }
    Ok(())
}

fn witness(cmd: &WitnessCommand, l: &Limits, out: &mut dyn Write) -> CmdResult {
    match cmd {
        WitnessCommand::Nice { algebra, r, n, even } => {
            let alg = load(algebra, l)?;
            let mut rel = nice_relation_from_nonswitchability(&alg, *r, *n, l)?;
            if *even {
                rel = evenize_nice(&rel)?;
            }
            write!(out, "{rel}")?;
            writeln!(out, "verified_nice: {}", verify_nice(&rel, l)?)?;
            if *even {
                writeln!(out, "contains_d: {}", rel.contains_d(l)?)?;
            }
        }
        WitnessCommand::Sigma { algebra, r, n, sigma_n } => {
            let alg = load(algebra, l)?;
            let rel = nice_relation_from_nonswitchability(&alg, *r, *n, l)?;
            let w = lemma2_sigma(&rel, *sigma_n, l)?;
            write!(out, "{w}")?;
            writeln!(out, "verified: {}", verify_sigma(&w))?;
        }
        WitnessCommand::Counterexample { algebra, op, pair } => {
            let alg = load(algebra, l)?;
            let table = match op {
                Some(name) => alg
                    .operation(name)
                    .ok_or_else(|| Error::precondition(format!("no operation named `{name}`")))?,
                None => match alg.operations() {
                    [only] => only,
                    _ => return Err(Error::precondition("--op is required unless the algebra has exactly one operation").into()),
                },
            };
            let pair = SubsetPair::from_elements(alg.universe(), &pair.alpha, &pair.beta)?;
            let cx = projectivity_counterexample(table, &pair)?;
            let sigma = sigma_n_relation(&pair, table.arity(), l)?;
            write!(out, "{cx}")?;
            let cols_ok = cx.columns().iter().all(|c| sigma.contains_tuple(c));
            writeln!(out, "columns_in_sigma: {cols_ok}")?;
            writeln!(out, "image_in_sigma: {}", sigma.contains_tuple(&cx.image))?;
        }
        WitnessCommand::Blocker { algebra, b, n_max } => {
            let alg = load(algebra, l)?;
            match find_blocker_bounded(&alg, b, *n_max, l)? {
                Some(c) => write!(out, "{c}")?,
                None => {
                    writeln!(out, "kind: blocker (candidate)")?;
                    writeln!(out, "checked: n=1..{n_max}")?;
                    writeln!(out, "B: {}", fmt_set(b))?;
                    writeln!(out, "C: none")?;
                }
            }
        }
    }
    Ok(())
}

fn dump(cmd: &DumpCommand, l: &Limits, out: &mut dyn Write) -> CmdResult {
    let (alg, set, closed): (Algebra, TupleSet, bool) = match cmd {
        DumpCommand::D { algebra, m, closed } => {
            let alg = load(algebra, l)?;
            let set = d_tuples(alg.universe(), *m, l)?;
            (alg, set, *closed)
        }
        DumpCommand::Switch { algebra, n, r, closed } => {
            let alg = load(algebra, l)?;
            let set = switch_tuples(alg.universe(), *n, *r, l)?;
            (alg, set, *closed)
        }
        DumpCommand::Sigma { algebra, n, pair, closed } => {
            let alg = load(algebra, l)?;
            let pair = SubsetPair::from_elements(alg.universe(), &pair.alpha, &pair.beta)?;
            let set = sigma_n_relation(&pair, *n, l)?;
            (alg, set, *closed)
        }
    };
    let set = if closed { closure_with(&alg, &set, l)? } else { set };
    set.write_export(out)?;
    Ok(())
}

fn load(path: &PathBuf, l: &Limits) -> std::result::Result<Algebra, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INVALID_ALGEBRA,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_algebra_with(&text, l).map_err(|e| Failure {
        code: EXIT_INVALID_ALGEBRA,
        message: format!("{}: {e}", path.display()),
    })
}
