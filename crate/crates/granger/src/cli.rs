//! Command-line front end: `test`, `search`, `lagselect`, and `simulate`
//! subcommands over CSV files.
//!
//! Exit codes: 0 success, 2 usage error, 1 data or compute error. All output
//! goes to stdout (or `--out`); the load report and errors go to stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::causality::{granger_causality_test_table, TestKind};
use crate::error::{Error, Result};
use crate::lagselect::granger_lag_select_table;
use crate::render::{render_granger_result, render_lag_scan, render_search, Format, RenderOptions};
use crate::search::{granger_search, Adjustment, SearchOptions};
use crate::series::{load_csv, LoadReport};
use crate::sim::{simulate, VarSpec};

#[derive(Debug, Parser)]
#[command(
    name = "granger",
    version,
    about = "Granger causality testing, pairwise search, and lag selection over CSV time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test causality between two columns, in both directions
    Test(TestArgs),
    /// Test every directed pair of numeric columns
    Search(SearchArgs),
    /// Scan a range of lag orders for one pair
    Lagselect(LagselectArgs),
    /// Generate synthetic data from a bivariate VAR specification
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format: text, csv, json, or svg
    #[arg(long, default_value = "text")]
    format: String,
    /// Write output to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn render_options(&self) -> Result<RenderOptions> {
        Ok(RenderOptions {
            format: self.format.parse::<Format>()?,
            output_path: self.out.clone(),
            ..RenderOptions::default()
        })
    }
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Input CSV file with a header row
    input: PathBuf,
    /// Column tested as the cause in the first direction
    #[arg(long)]
    x: String,
    /// Column tested as the effect in the first direction
    #[arg(long)]
    y: String,
    /// Lag order of the fitted models
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Hypothesis test; only "F" is supported
    #[arg(long, default_value = "F")]
    test: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Input CSV file with a header row
    input: PathBuf,
    /// Comma-separated column subset (default: all numeric columns)
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Lag order or sweep: N, A:B, or a comma list (e.g. 2, 1:4, 1,2,4)
    #[arg(long, visible_alias = "lags", default_value = "1")]
    lag: String,
    /// Significance level for filtering
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Report insignificant pairs too
    #[arg(long, default_value_t = false)]
    include_insignificant: bool,
    /// Multiple-testing correction: none, bonferroni, or bh
    #[arg(long, default_value = "none")]
    adjust: String,
    /// Worker threads for the pair sweep (default: all cores; 1 = serial)
    #[arg(long, env = "GRANGER_THREADS")]
    threads: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct LagselectArgs {
    /// Input CSV file with a header row
    input: PathBuf,
    /// First column of the pair
    #[arg(long)]
    x: String,
    /// Second column of the pair
    #[arg(long)]
    y: String,
    /// Lags to scan: N, A:B, or a comma list
    #[arg(long, visible_alias = "lag", default_value = "1:4")]
    lags: String,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Number of rows to generate after burn-in
    #[arg(long, default_value_t = 200)]
    len: usize,
    /// PRNG seed (SplitMix64 stream)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// VAR order
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Intercepts for the y and x equations, comma-separated
    #[arg(long, default_value = "0,0")]
    intercepts: String,
    /// Own-lag coefficients, equations separated by ';', lags by ','
    /// (e.g. "0.5;0.5" for order 1, "0.5,0.2;0.4,0.1" for order 2)
    #[arg(long, default_value = "0.5;0.5")]
    own: String,
    /// Cross-lag coefficients, same shape as --own
    #[arg(long, default_value = "0;0")]
    cross: String,
    /// Error standard deviations, comma-separated
    #[arg(long, default_value = "1,1")]
    noise_sd: String,
    /// Contemporaneous error correlation in (-1, 1)
    #[arg(long, default_value_t = 0.0)]
    noise_corr: f64,
    /// Samples discarded from the start
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse "2", "1:8", or "1,2,4" into a strictly increasing lag list.
pub fn parse_lag_spec(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::BadLagSpec(s.to_string());
    let lags: Vec<usize> = if let Some((a, b)) = s.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|part| part.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<usize>>>()?
    };
    if lags.is_empty() || lags[0] < 1 || lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(lags)
}

fn parse_pair(s: &str, what: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "{what} must be two comma-separated numbers, got {s:?}"
        )));
    }
    let a = parts[0]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what}: cannot parse {:?}", parts[0])))?;
    let b = parts[1]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what}: cannot parse {:?}", parts[1])))?;
    Ok([a, b])
}

fn parse_coeffs(s: &str, p: usize, what: &str) -> Result<[Vec<f64>; 2]> {
    let eqs: Vec<&str> = s.split(';').collect();
    if eqs.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "{what} must give two equations separated by ';', got {s:?}"
        )));
    }
    let mut out: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (eq, slot) in eqs.iter().zip(out.iter_mut()) {
        for part in eq.split(',') {
            let v: f64 = part.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{what}: cannot parse {:?}", part.trim()))
            })?;
            slot.push(v);
        }
        if slot.len() != p {
            return Err(Error::InvalidArgument(format!(
                "{what} must list {p} coefficient(s) per equation, got {}",
                slot.len()
            )));
        }
    }
    Ok(out)
}

fn report_load<E: Write>(report: &LoadReport, err: &mut E) {
    if !report.dropped.is_empty() {
        let _ = writeln!(
            err,
            "note: dropped non-numeric column(s): {}",
            report.dropped.join(", ")
        );
    }
}

fn emit<O: Write>(content: &str, had_out_path: bool, out: &mut O) -> Result<()> {
    if !had_out_path {
        out.write_all(content.as_bytes())?;
    }
    Ok(())
}

fn run_test<O: Write, E: Write>(args: &TestArgs, out: &mut O, err: &mut E) -> Result<()> {
    args.test.parse::<TestKind>()?;
    let (table, report) = load_csv(&args.input)?;
    report_load(&report, err);
    let result = granger_causality_test_table(&table, &args.x, &args.y, args.lag, args.alpha)?;
    let opts = args.output.render_options()?;
    let content = render_granger_result(&result, &opts)?;
    emit(&content, opts.output_path.is_some(), out)
}

fn run_search<O: Write, E: Write>(args: &SearchArgs, out: &mut O, err: &mut E) -> Result<()> {
    let lags = parse_lag_spec(&args.lag)?;
    let adjustment: Adjustment = args.adjust.parse()?;
    let (table, report) = load_csv(&args.input)?;
    report_load(&report, err);
    let opts = SearchOptions {
        lags,
        alpha: args.alpha,
        include_insignificant: args.include_insignificant,
        adjustment,
        threads: args.threads,
    };
    let result = granger_search(&table, &args.columns, &opts)?;
    let ropts = args.output.render_options()?;
    let content = render_search(&result, &ropts)?;
    emit(&content, ropts.output_path.is_some(), out)
}

fn run_lagselect<O: Write, E: Write>(args: &LagselectArgs, out: &mut O, err: &mut E) -> Result<()> {
    let lags = parse_lag_spec(&args.lags)?;
    let (table, report) = load_csv(&args.input)?;
    report_load(&report, err);
    let result = granger_lag_select_table(&table, &args.x, &args.y, &lags, args.alpha)?;
    let ropts = args.output.render_options()?;
    let content = render_lag_scan(&result, &ropts)?;
    emit(&content, ropts.output_path.is_some(), out)
}

fn run_simulate<O: Write>(args: &SimulateArgs, out: &mut O) -> Result<()> {
    let spec = VarSpec {
        p: args.p,
        intercepts: parse_pair(&args.intercepts, "--intercepts")?,
        own: parse_coeffs(&args.own, args.p, "--own")?,
        cross: parse_coeffs(&args.cross, args.p, "--cross")?,
        noise_sd: parse_pair(&args.noise_sd, "--noise-sd")?,
        noise_corr: args.noise_corr,
        len: args.len,
        seed: args.seed,
        burn_in: args.burn_in,
    };
    let table = simulate(&spec)?;
    let content = table.to_csv_string()?;
    if let Some(path) = &args.out {
        std::fs::write(path, &content)?;
    } else {
        out.write_all(content.as_bytes())?;
    }
    Ok(())
}

/// Parse and run. Returns the process exit code.
pub fn run_cli<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };

    let outcome = match &cli.command {
        Command::Test(args) => run_test(args, out, err),
        Command::Search(args) => run_search(args, out, err),
        Command::Lagselect(args) => run_lagselect(args, out, err),
        Command::Simulate(args) => run_simulate(args, out),
    };

    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
