//! `hasse`: command-line frontend for hasse-core.
//!
//! Exit codes: 0 on success, 1 when the mathematical answer to an existence
//! query is negative, 2 on usage, budget or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hasse_core::census::{
    fermat_bound, fermat_census_with, quadruple_count, rows_to_csv, rows_to_json,
    rows_to_plot_data, thue_census_with, write_text, CensusOptions, CensusRow, DyadicBox,
};
use hasse_core::families::{default_modulus, pair_stream_with, triple_stream_with, StreamOptions};
use hasse_core::globalsearch::{abc_quality, fermat_solutions, height_bound, thue_solutions};
use hasse_core::localsolve::{
    certify_with, local_verdict, Equation, FermatEquation, SearchOptions, Strategy, ThueEquation,
    VerdictCache, DEFAULT_BUDGET,
};
use hasse_core::{Error, Parallelism, VERSION};
use serde::Serialize;
use serde_json::{json, Value};

/// Largest `H` accepted for `k = 3` Thue censuses without `--allow-large`:
/// the global bound grows linearly in `H` there, so the solution sweep is
/// quadratic in `H`.
const K3_HEIGHT_CAP: u64 = 500;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "hasse",
    version,
    about = "Local and global solubility of diagonal Thue and Fermat equations"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; the default depends on the subcommand.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Candidate evaluations allowed per (equation, prime).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Recorded in the output header; no subcommand is randomised.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct EquationArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: i64,
    #[arg(long, allow_negative_numbers = true)]
    b: i64,
    /// Third coefficient; selects the Fermat form `ax^k + by^k + cz^k = 0`.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<i64>,
    #[arg(long)]
    k: u32,
}

impl EquationArgs {
    fn equation(&self) -> Result<Equation, Error> {
        Ok(match self.c {
            Some(c) => FermatEquation::new(self.a, self.b, c, self.k)?.into(),
            None => ThueEquation::new(self.a, self.b, self.k)?.into(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum StrategyArg {
    Auto,
    Residue,
    Exhaustive,
}

#[derive(Args, Debug, Serialize)]
struct CensusArgs {
    #[arg(long)]
    k: u32,
    /// Ascending coefficient bounds, comma separated.
    #[arg(long = "H", value_delimiter = ',', required = true)]
    h: Vec<u64>,
    #[arg(long, default_value_t = 4.0)]
    slack: f64,
    /// Only count coefficient tuples with gcd 1.
    #[arg(long)]
    coprime_only: bool,
    /// Also write two-column `H ratio` data here.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Lift the height cap for cubic Thue censuses.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args, Debug, Serialize)]
struct FamilyArgs {
    #[arg(long)]
    k: u32,
    /// Congruence modulus for the primes (default: the degree's default).
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    limit: u64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Attach the full certificate to each family.
    #[arg(long)]
    certificates: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Solubility at one prime, with a Hensel witness.
    Local {
        #[command(flatten)]
        #[serde(flatten)]
        eq: EquationArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// Everywhere-local solubility certificate.
    Certify {
        #[command(flatten)]
        #[serde(flatten)]
        eq: EquationArgs,
    },
    /// Integer solutions of bounded height.
    Search {
        #[command(flatten)]
        #[serde(flatten)]
        eq: EquationArgs,
        /// Variable bound (default: derived from the coefficients and slack).
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 4.0)]
        slack: f64,
    },
    /// Local and global counts of Thue equations by coefficient height.
    CensusThue(CensusArgs),
    /// Local and global counts of Fermat equations by coefficient height.
    CensusFermat(CensusArgs),
    /// Certified prime pairs q x^k - r y^k = 1.
    FamiliesPairs(FamilyArgs),
    /// Certified prime triples q x^k - r y^k ∓ s z^k = 0.
    FamiliesTriples(FamilyArgs),
    /// Quadruples (a, b, x, y) in a dyadic box with a x^k - b y^k = 1.
    CountQuadruples {
        #[arg(long)]
        k: u32,
        #[arg(long = "X")]
        x: u64,
        #[arg(long = "Y")]
        y: u64,
        #[arg(long = "Z")]
        z: u64,
    },
    /// abc quality of u + v + w = 0.
    AbcQuality {
        #[arg(long, allow_negative_numbers = true)]
        u: i128,
        #[arg(long, allow_negative_numbers = true)]
        v: i128,
        #[arg(long, allow_negative_numbers = true)]
        w: i128,
    },
}

/// A finished computation: its payload in each format and whether the
/// answer was positive.
struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    default: Format,
    positive: bool,
}

impl Report {
    fn new(
        result: &impl Serialize,
        text: String,
        default: Format,
        positive: bool,
    ) -> Result<Self, Error> {
        Ok(Self {
            json: serde_json::to_value(result)?,
            text,
            csv: None,
            default,
            positive,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidInput("--jobs must be positive".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let report = pool.install(|| execute(cli))?;
    emit(cli, &report)?;
    Ok(report.positive)
}

fn search_options(cli: &Cli, strategy: Strategy) -> SearchOptions {
    SearchOptions {
        strategy,
        budget: cli.budget,
    }
}

fn execute(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Local { eq, p, strategy } => {
            let strategy = match strategy {
                StrategyArg::Auto => Strategy::Auto,
                StrategyArg::Residue => Strategy::ResidueSearch,
                StrategyArg::Exhaustive => Strategy::Exhaustive,
            };
            let equation = eq.equation()?;
            let v = local_verdict(&equation, *p, &search_options(cli, strategy))?;
            let text = match &v.witness {
                Some(w) => format!(
                    "{equation}: soluble at p = {p} (witness {:?}, n = {})\n",
                    w.point, w.n
                ),
                None => format!("{equation}: insoluble at p = {p}\n"),
            };
            Report::new(&v, text, Format::Json, v.soluble)
        }
        Command::Certify { eq } => {
            let equation = eq.equation()?;
            let cert = certify_with(&equation, &search_options(cli, Strategy::Auto))?;
            let text = match cert.failing_prime() {
                _ if !cert.real => format!("{equation}: no real solution\n"),
                Some(p) => format!("{equation}: insoluble at p = {p}\n"),
                None => format!(
                    "{equation}: everywhere locally soluble ({} primes checked)\n",
                    cert.primes.len()
                ),
            };
            Report::new(&cert, text, Format::Json, cert.everywhere)
        }
        Command::Search { eq, bound, slack } => {
            let equation = eq.equation()?;
            let h = equation
                .coefficients()
                .iter()
                .map(|c| c.unsigned_abs())
                .max()
                .unwrap_or(1);
            let (bound, derived) = match (bound, equation) {
                (Some(b), _) => (*b, false),
                (None, Equation::Thue(e)) => (height_bound(e.k, h, *slack)?.b, true),
                (None, Equation::Fermat(e)) => (fermat_bound(e.k, h, *slack)?, true),
            };
            let sols = match equation {
                Equation::Thue(e) => thue_solutions(&e, bound)?,
                Equation::Fermat(e) => fermat_solutions(&e, bound)?,
            };
            let mut text = String::new();
            for s in &sols {
                text.push_str(&format!("{:?}\n", s.point));
            }
            if sols.is_empty() {
                text.push_str(&format!("no solutions with height <= {bound}\n"));
            }
            let result = json!({ "bound": bound, "bound_derived": derived, "conditional": derived, "solutions": sols });
            Report::new(&result, text, Format::Text, !sols.is_empty())
        }
        Command::CensusThue(args) | Command::CensusFermat(args) => census(cli, args),
        Command::FamiliesPairs(args) => {
            let modulus = family_modulus(args)?;
            let run = pair_stream_with(
                args.k,
                modulus,
                args.limit,
                args.count,
                &stream_options(cli, args),
            )?;
            let text: String = run
                .items
                .iter()
                .map(|p| format!("{} {}\n", p.q, p.r))
                .collect();
            if !run.is_complete() {
                eprintln!(
                    "warning: prime limit exhausted after {} of {} pairs",
                    run.items.len(),
                    run.requested
                );
            }
            Report::new(&run, text, Format::Json, run.is_complete())
        }
        Command::FamiliesTriples(args) => {
            let modulus = family_modulus(args)?;
            let run = triple_stream_with(
                args.k,
                modulus,
                args.limit,
                args.count,
                &stream_options(cli, args),
            )?;
            let text: String = run
                .items
                .iter()
                .map(|t| format!("{} {} {} {:?}\n", t.q, t.r, t.s, t.sign_case))
                .collect();
            if !run.is_complete() {
                eprintln!(
                    "warning: prime limit exhausted after {} of {} triples",
                    run.items.len(),
                    run.requested
                );
            }
            Report::new(&run, text, Format::Json, run.is_complete())
        }
        Command::CountQuadruples { k, x, y, z } => {
            let n = quadruple_count(&DyadicBox {
                x: *x,
                y: *y,
                z: *z,
                k: *k,
            })?;
            Report::new(&n, format!("{n}\n"), Format::Text, true)
        }
        Command::AbcQuality { u, v, w } => {
            let t = abc_quality(*u, *v, *w)?;
            let text = format!("{:.6}\n", t.quality);
            Report::new(&t, text, Format::Text, true)
        }
    }
}

fn family_modulus(args: &FamilyArgs) -> Result<u64, Error> {
    match args.modulus {
        Some(m) => Ok(m),
        None => default_modulus(args.k),
    }
}

fn stream_options(cli: &Cli, args: &FamilyArgs) -> StreamOptions {
    StreamOptions {
        parallelism: Parallelism::Parallel,
        search: search_options(cli, Strategy::Auto),
        attach_certificates: args.certificates,
    }
}

fn census(cli: &Cli, args: &CensusArgs) -> Result<Report, Error> {
    let fermat = matches!(cli.command, Command::CensusFermat(_));
    let h_max = args.h.iter().copied().max().unwrap_or(0);
    if !fermat && args.k == 3 && h_max > K3_HEIGHT_CAP && !args.allow_large {
        return Err(Error::InvalidInput(format!(
            "H = {h_max} exceeds the cubic census cap {K3_HEIGHT_CAP}; pass --allow-large to override"
        )));
    }
    if fermat && args.k < 6 {
        eprintln!(
            "note: k = {} < 6 is exploratory for the ternary census",
            args.k
        );
    }
    let opts = CensusOptions {
        slack: args.slack,
        parallelism: Parallelism::Parallel,
        coprime_only: args.coprime_only,
        budget: cli.budget,
    };
    let cache = VerdictCache::from_env()?;
    let rows: Vec<CensusRow> = if fermat {
        fermat_census_with(args.k, &args.h, &opts, &cache)?
    } else {
        thue_census_with(args.k, &args.h, &opts, &cache)?
    };
    cache.persist_env()?;
    if let Some(path) = &args.plot_data {
        write_text(path, &rows_to_plot_data(&rows))?;
    }
    let csv = rows_to_csv(&rows);
    let mut report = Report::new(&rows, csv.clone(), Format::Csv, true)?;
    report.csv = Some(csv);
    // keep the JSON byte-stable with the library's row encoding
    report.json = serde_json::from_str(&rows_to_json(&rows)?)?;
    Ok(report)
}

fn config_json(cli: &Cli) -> Result<String, Error> {
    Ok(serde_json::to_string(cli)?)
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Error> {
    let format = cli.format.unwrap_or(report.default);
    let body = match format {
        Format::Json => {
            let doc = json!({ "config": serde_json::to_value(cli)?, "version": VERSION, "result": report.json });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let csv = report.csv.as_ref().ok_or_else(|| {
                Error::InvalidInput("csv output is only available for census subcommands".into())
            })?;
            format!("# hasse {VERSION} {}\n{csv}", config_json(cli)?)
        }
        Format::Text => match &cli.out {
            Some(_) => format!("# hasse {VERSION} {}\n{}", config_json(cli)?, report.text),
            None => report.text.clone(),
        },
    };
    match &cli.out {
        Some(path) => write_text(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
