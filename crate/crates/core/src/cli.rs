//! Command-line front end.
//!
//! Every command builds a [`Table`] in canonical order, so output does not
//! depend on `--jobs`. Exit codes: 0 all checks pass, 1 a mathematical check
//! failed, 2 invalid input.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rayon::prelude::*;

use crate::arith::{BigRat, HarmonicTable, Prime};
use crate::error::{Error, Result};
use crate::report::{Cell, Format, Table};
use crate::sequence::{
    is_exceptional, k_defects_from, lemma1_scan, u_direct, u_recurrence_upto, v_direct, v_identity,
};
use crate::series::{clear_denominators, first_nonvanishing, RnExpansion, DEFAULT_EXTRA_ORDER};
use crate::theorem::sweep_theorem1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dilog-padic",
    version,
    about = "Exact checks of p-adic valuation bounds for harmonic sums and the integer sequences built from them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output encoding.
    #[arg(long, value_enum, default_value = "table", global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Valuation of S(p,a,n) against n + 1 - 2 floor(log_p n).
    ///
    /// Columns: p,a,n,valuation,bound,gap,pass. Pairs with p | a are skipped
    /// with a note on stderr.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Comma-separated values of a; overrides --a-min/--a-max.
        #[arg(long = "a", value_delimiter = ',', allow_hyphen_values = true)]
        a: Option<Vec<i64>>,
        #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
        a_min: i64,
        #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
        a_max: i64,
        #[arg(long)]
        n_max: u64,
    },

    /// Vanishing of R_n to degree n and integrality of the cleared numerator U_n.
    ///
    /// Columns: a,n,vanishing,un_integral,un_head (leading U_n coefficients,
    /// space-separated).
    #[command(name = "series-check")]
    SeriesCheck {
        /// Comma-separated nonzero values of a.
        #[arg(
            long = "a",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        a: Vec<i64>,
        #[arg(long)]
        n_max: u64,
        /// Number of U_n coefficients recovered per n.
        #[arg(long, default_value_t = DEFAULT_EXTRA_ORDER)]
        extra_order: usize,
    },

    /// Exact terms of u, v or the K defect.
    ///
    /// Columns: n,value,integer,routes_agree. Values are "num/den" strings.
    Sequence {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        n_max: u64,
    },

    /// Exhaustive check of 2(s_2(n) + floor(log_2 n)) <= n + 1 for 8 <= n <= n_max.
    ///
    /// Columns: n,lhs,rhs_doubled,holds. Only rows that fail (all below 8)
    /// are emitted unless --all is given.
    Lemma1 {
        #[arg(long)]
        n_max: u64,
        /// Emit every record.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "u")]
    U,
    #[value(name = "v")]
    V,
    #[value(name = "K", alias = "k")]
    K,
}

/// Validated run parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunConfig {
    VerifyTheorem1 {
        primes: Vec<Prime>,
        a_values: Vec<i64>,
        n_max: u64,
    },
    SeriesCheck {
        a_values: Vec<i64>,
        n_max: u64,
        extra_order: usize,
    },
    Sequence {
        which: Which,
        n_max: u64,
    },
    Lemma1 {
        n_max: u64,
        all: bool,
    },
}

fn positive(name: &str, n: u64) -> Result<u64> {
    if n == 0 {
        Err(Error::Invalid(format!("{name} must be at least 1")))
    } else {
        Ok(n)
    }
}

impl RunConfig {
    pub fn from_command(cmd: &Command) -> Result<Self> {
        Ok(match cmd {
            Command::VerifyTheorem1 {
                primes,
                a,
                a_min,
                a_max,
                n_max,
            } => {
                let primes = primes
                    .iter()
                    .map(|&p| Prime::new(p))
                    .collect::<Result<Vec<_>>>()?;
                let a_values = match a {
                    Some(list) => list.clone(),
                    None if a_min <= a_max => (*a_min..=*a_max).collect(),
                    None => return Err(Error::Invalid(format!("empty a range {a_min}..{a_max}"))),
                };
                RunConfig::VerifyTheorem1 {
                    primes,
                    a_values,
                    n_max: positive("n-max", *n_max)?,
                }
            }
            Command::SeriesCheck {
                a,
                n_max,
                extra_order,
            } => {
                if a.contains(&0) {
                    return Err(Error::ZeroA);
                }
                if *extra_order == 0 {
                    return Err(Error::Invalid("extra-order must be at least 1".into()));
                }
                let mut a_values = a.clone();
                a_values.sort();
                a_values.dedup();
                RunConfig::SeriesCheck {
                    a_values,
                    n_max: positive("n-max", *n_max)?,
                    extra_order: *extra_order,
                }
            }
            Command::Sequence { which, n_max } => RunConfig::Sequence {
                which: *which,
                n_max: positive("n-max", *n_max)?,
            },
            Command::Lemma1 { n_max, all } => {
                if *n_max < 8 {
                    return Err(Error::NTooSmall { n: *n_max, min: 8 });
                }
                RunConfig::Lemma1 {
                    n_max: *n_max,
                    all: *all,
                }
            }
        })
    }
}

/// A finished command: the table plus diagnostics for stderr.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    /// Description of the first failed check, if any.
    pub failure: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failure.is_some() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }
}

/// Runs a validated config on a pool of `jobs` threads.
pub fn execute(config: &RunConfig, jobs: usize) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| match config {
        RunConfig::VerifyTheorem1 {
            primes,
            a_values,
            n_max,
        } => verify_theorem1(primes, a_values, *n_max),
        RunConfig::SeriesCheck {
            a_values,
            n_max,
            extra_order,
        } => Ok(series_check(a_values, *n_max, *extra_order)),
        RunConfig::Sequence { which, n_max } => Ok(sequence(*which, *n_max)),
        RunConfig::Lemma1 { n_max, all } => Ok(lemma1(*n_max, *all)),
    })
}

fn verify_theorem1(primes: &[Prime], a_values: &[i64], n_max: u64) -> Result<Outcome> {
    let out = sweep_theorem1(primes, a_values, n_max)?;
    if out.reports.is_empty() {
        return Err(Error::Invalid(
            "no usable (p, a) pair: each a is a multiple of its p".into(),
        ));
    }
    let mut notes: Vec<String> = out
        .skipped
        .iter()
        .map(|(p, a)| format!("skipped p = {p}, a = {a}: a is a multiple of p"))
        .collect();
    let g = &out.gaps;
    notes.push(format!(
        "{} reports; min gap {}; {} equality cases; {} vanishing sums",
        out.reports.len(),
        g.min.map_or("n/a".into(), |m| m.to_string()),
        g.equality_cases,
        g.infinite
    ));
    let hist: Vec<String> = g
        .histogram
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    notes.push(format!("gap histogram {}", hist.join(" ")));

    let mut table = Table::new(&["p", "a", "n", "valuation", "bound", "gap", "pass"]);
    for r in &out.reports {
        table.push(vec![
            r.p.into(),
            r.a.into(),
            r.n.into(),
            r.exact_valuation.into(),
            r.bound.into(),
            r.gap.into(),
            r.pass.into(),
        ]);
    }
    let failure = out.first_failure().map(|r| {
        format!(
            "bound violated at p = {}, a = {}, n = {}: valuation {} < {}",
            r.p, r.a, r.n, r.exact_valuation, r.bound
        )
    });
    Ok(Outcome {
        table,
        notes,
        failure,
    })
}

struct SeriesRow {
    a: i64,
    n: u64,
    vanishing: bool,
    integral: bool,
    head: String,
    error: Option<String>,
}

fn series_rows_for(a: i64, n_max: u64, extra_order: usize) -> Vec<SeriesRow> {
    let mut exp = RnExpansion::new(a, n_max as usize + extra_order).expect("a validated nonzero");
    (1..=n_max)
        .map(|n| {
            let rn = exp.advance().truncate(n as usize + extra_order);
            let vanishing = first_nonvanishing(&rn, n);
            match clear_denominators(a, n, &rn) {
                Ok(un) => SeriesRow {
                    a,
                    n,
                    vanishing: vanishing.is_none(),
                    integral: true,
                    head: un
                        .coeffs()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                    error: vanishing
                        .map(|d| format!("a = {a}, n = {n}: nonzero coefficient at degree {d}")),
                },
                Err(e) => SeriesRow {
                    a,
                    n,
                    vanishing: vanishing.is_none(),
                    integral: false,
                    head: String::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn series_check(a_values: &[i64], n_max: u64, extra_order: usize) -> Outcome {
    let rows: Vec<SeriesRow> = a_values
        .par_iter()
        .flat_map_iter(|&a| series_rows_for(a, n_max, extra_order))
        .collect();
    let mut table = Table::new(&["a", "n", "vanishing", "un_integral", "un_head"]);
    let mut failure = None;
    for r in rows {
        if failure.is_none() {
            failure = r.error.clone();
        }
        table.push(vec![
            r.a.into(),
            r.n.into(),
            r.vanishing.into(),
            r.integral.into(),
            Cell::Text(r.head),
        ]);
    }
    Outcome {
        table,
        notes: Vec::new(),
        failure,
    }
}

fn sequence(which: Which, n_max: u64) -> Outcome {
    let harmonic = HarmonicTable::with_max(2 * n_max as usize);
    let mut table = Table::new(&["n", "value", "integer", "routes_agree"]);
    let mut failure = None;
    let mut notes = Vec::new();
    let mut flag = |msg: String| {
        if failure.is_none() {
            failure = Some(msg);
        }
    };

    match which {
        Which::U => {
            let direct: Vec<BigRat> = (1..=n_max)
                .into_par_iter()
                .map(|n| u_direct(n, &harmonic).expect("n >= 1").value)
                .collect();
            let rec = u_recurrence_upto(n_max, &harmonic);
            for (i, value) in direct.into_iter().enumerate() {
                let n = i as u64 + 1;
                let agree = value == rec[n as usize].value;
                check_integral("u", n, &value, agree, &mut flag, &mut notes);
                table.push(table_row(n, value, agree));
            }
        }
        Which::V => {
            let pairs: Vec<(BigRat, BigRat)> = (1..=n_max)
                .into_par_iter()
                .map(|n| {
                    (
                        v_direct(n, &harmonic).expect("n >= 1").value,
                        v_identity(n, &harmonic).expect("n >= 1").value,
                    )
                })
                .collect();
            for (i, (direct, identity)) in pairs.into_iter().enumerate() {
                let n = i as u64 + 1;
                let agree = direct == identity;
                check_integral("v", n, &direct, agree, &mut flag, &mut notes);
                table.push(table_row(n, direct, agree));
            }
        }
        Which::K => {
            let pairs: Vec<(BigRat, bool)> = (1..=n_max)
                .into_par_iter()
                .map(|n| {
                    let d = v_direct(n, &harmonic).expect("n >= 1").value;
                    let agree = d == v_identity(n, &harmonic).expect("n >= 1").value;
                    (d, agree)
                })
                .collect();
            let mut v = vec![BigRat::default()];
            v.extend(pairs.iter().map(|(d, _)| d.clone()));
            for (i, k) in k_defects_from(&v).into_iter().enumerate() {
                let n = i as u64 + 1;
                let agree = pairs[i].1 && (i == 0 || pairs[i - 1].1);
                if !agree {
                    flag(format!("v routes disagree around n = {n}"));
                }
                table.push(table_row(n, k, agree));
            }
        }
    }
    Outcome {
        table,
        notes,
        failure,
    }
}

fn table_row(n: u64, value: BigRat, agree: bool) -> Vec<Cell> {
    let integer = value.is_integer();
    vec![n.into(), value.into(), integer.into(), agree.into()]
}

fn check_integral(
    name: &str,
    n: u64,
    value: &BigRat,
    agree: bool,
    flag: &mut impl FnMut(String),
    notes: &mut Vec<String>,
) {
    if !agree {
        flag(format!("{name}_{n}: routes disagree"));
    }
    if is_exceptional(n) {
        notes.push(format!(
            "{name}_{n} (excluded index) is {}an integer",
            if value.is_integer() { "" } else { "not " }
        ));
    } else if !value.is_integer() || !value.is_positive() {
        flag(format!("{name}_{n} is not a positive integer"));
    }
}

fn lemma1(n_max: u64, all: bool) -> Outcome {
    let mut table = Table::new(&["n", "lhs", "rhs_doubled", "holds"]);
    let mut notes = Vec::new();
    let mut failure = None;
    match lemma1_scan(n_max) {
        Ok(records) => {
            for r in &records {
                if !r.holds {
                    notes.push(format!(
                        "n = {}: 2*{} = {} > {} (below 8, informational)",
                        r.n,
                        r.lhs,
                        2 * r.lhs,
                        r.rhs_doubled
                    ));
                }
                if all || !r.holds {
                    table.push(vec![
                        r.n.into(),
                        r.lhs.into(),
                        r.rhs_doubled.into(),
                        r.holds.into(),
                    ]);
                }
            }
            notes.push(format!("no counterexample for 8 <= n <= {n_max}"));
        }
        Err(e) => failure = Some(e.to_string()),
    }
    Outcome {
        table,
        notes,
        failure,
    }
}

/// Parses, validates, runs and writes. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let config = match RunConfig::from_command(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if cli.output.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_INVALID;
    }
    let outcome = match execute(&config, cli.output.jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_input_error() {
                EXIT_INVALID
            } else {
                EXIT_CHECK_FAILED
            };
        }
    };
    let rendered = outcome.table.render(cli.output.format);
    match &cli.output.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INVALID;
            }
        }
        None => print!("{rendered}"),
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    if let Some(f) = &outcome.failure {
        eprintln!("FAILED: {f}");
    }
    outcome.exit_code()
}
