//! `valdisc` — command-line front end for the disc-integral laboratory.
//!
//! Every run prints one JSON document: `{command, config, convention,
//! timestamp?, results, verdict}`. The echoed config is the merged
//! settings (file, then flags, then recorded defaults), so a report is
//! reproducible from its own output. Exit codes: 0 = ran and the
//! command's contract held, 1 = input or configuration error, 2 = ran
//! but the contract was violated.

mod commands;
mod report;
mod seq;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::{CommandOutput, Envelope, VERDICT_FAIL};
use settings::{CliError, CliResult, Settings};

#[derive(Parser)]
#[command(
    name = "valdisc",
    version,
    about = "Disc-integral laboratory: mean-value identities, growth reports, \
             exact ramification checks, and concentration experiments for rational maps"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Flat key=value settings file; command-line flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Verdict tolerance for the command (minimum 1e-12)
    #[arg(long, global = true, value_name = "NUM")]
    tol: Option<String>,
    /// RNG seed; recorded in every report
    #[arg(long, global = true, value_name = "N")]
    seed: Option<String>,
    /// Write the command's table to this CSV file
    #[arg(long, global = true, value_name = "FILE")]
    out_csv: Option<PathBuf>,
    /// Also write the JSON report to this file
    #[arg(long, global = true, value_name = "FILE")]
    out_json: Option<PathBuf>,
    /// Require exact (Gaussian-rational) coefficients in parsed inputs
    #[arg(long, global = true)]
    exact: bool,
    /// Omit the timestamp so identical runs emit identical bytes
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mean-value identity for an explicit potential (atoms + bivariate polynomial)
    Jensen(JensenArgs),
    /// Growth identity for a map against a metricized divisor
    Fmt(MapDivisorArgs),
    /// Degree-versus-radical slack for a coprime polynomial pair
    Mason(MasonArgs),
    /// Degree/ramification balance for a self-map of the line
    Rh(MapArgs),
    /// Boundary-reduced degree/ramification balance
    Logrh(LogrhArgs),
    /// Log-curvature disc identity (--map) or normalized trend experiment (--seq)
    Taut(TautArgs),
    /// Bubble-tree energy model (--map) or concentration scan (--seq)
    Bubble(BubbleArgs),
    /// Compactness harness for a family of maps
    Gromov(GromovArgs),
    /// Normalized-current probes for a family of maps
    Currents(CurrentsArgs),
}

#[derive(Args)]
struct JensenArgs {
    /// Logarithmic atom "a" or "a:mass" (repeatable)
    #[arg(long, value_name = "ATOM")]
    atom: Vec<String>,
    /// Bivariate polynomial rows: x-powers split by ';', y-power coefficients by ','
    #[arg(long, value_name = "ROWS")]
    bipoly: Option<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Comma-separated radii in (0, 1)
    #[arg(long, value_name = "LIST")]
    r_grid: Option<String>,
}

#[derive(Args)]
struct MapDivisorArgs {
    /// Map components "p0 | p1 | ..." with comma-separated coefficients
    #[arg(long, value_name = "MAP")]
    map: Option<String>,
    /// Divisor "degree; (exponents)=coeff, ..."
    #[arg(long, value_name = "DIV")]
    divisor: Option<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Comma-separated radii in (0, 1)
    #[arg(long, value_name = "LIST")]
    r_grid: Option<String>,
}

#[derive(Args)]
struct MasonArgs {
    /// First summand, comma-separated exact coefficients
    #[arg(long, value_name = "POLY")]
    a: Option<String>,
    /// Second summand, comma-separated exact coefficients
    #[arg(long, value_name = "POLY")]
    b: Option<String>,
}

#[derive(Args)]
struct MapArgs {
    /// Map components "p0 | p1" with comma-separated coefficients
    #[arg(long, value_name = "MAP")]
    map: Option<String>,
}

#[derive(Args)]
struct LogrhArgs {
    /// Map components "p0 | p1" with comma-separated coefficients
    #[arg(long, value_name = "MAP")]
    map: Option<String>,
    /// Comma-separated boundary points ('inf' allowed); default 0,1,inf
    #[arg(long, value_name = "PTS")]
    boundary: Option<String>,
}

#[derive(Args)]
struct TautArgs {
    /// Map components "p0 | p1" (identity mode)
    #[arg(long, value_name = "MAP")]
    map: Option<String>,
    /// Map family "family:[pattern],n=range" (trend mode)
    #[arg(long, value_name = "SEQ")]
    seq: Option<String>,
    /// Comma-separated boundary points ('inf' allowed); default 0,1,inf
    #[arg(long, value_name = "PTS")]
    boundary: Option<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Comma-separated radii in (0, 1)
    #[arg(long, value_name = "LIST")]
    r_grid: Option<String>,
}

#[derive(Args)]
struct BubbleArgs {
    /// Base map (model mode)
    #[arg(long, value_name = "MAP")]
    map: Option<String>,
    /// Map family "family:[pattern],n=range" (scan mode)
    #[arg(long, value_name = "SEQ")]
    seq: Option<String>,
    /// Divisor "degree; (exponents)=coeff, ..." (model mode)
    #[arg(long, value_name = "DIV")]
    divisor: Option<String>,
    /// Bubble tree "attach" or "attach:components" (repeatable, model mode)
    #[arg(long, value_name = "TREE")]
    bubble: Vec<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Concentration scan resolution (scan mode); default r/8
    #[arg(long, value_name = "EPS")]
    eps: Option<String>,
}

#[derive(Args)]
struct GromovArgs {
    /// Map family "family:[pattern],n=range"
    #[arg(long, value_name = "SEQ")]
    seq: Option<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Comma-separated radii in (0, 1)
    #[arg(long, value_name = "LIST")]
    r_grid: Option<String>,
    /// Graph sampling mesh (minimum 16); default 64
    #[arg(long, value_name = "N")]
    mesh: Option<String>,
    /// Uniform energy bound; default unbounded
    #[arg(long, value_name = "B")]
    bound: Option<String>,
}

#[derive(Args)]
struct CurrentsArgs {
    /// Map family "family:[pattern],n=range"
    #[arg(long, value_name = "SEQ")]
    seq: Option<String>,
    /// Positivity targets, '|'-separated divisors; default "1; (0,1)=1"
    #[arg(long, value_name = "DIVS")]
    divisor: Option<String>,
    /// Single radius in (0, 1)
    #[arg(long, value_name = "R")]
    r: Option<String>,
    /// Comma-separated radii in (0, 1)
    #[arg(long, value_name = "LIST")]
    r_grid: Option<String>,
    /// Tail-cluster certification diameter; default 0.05
    #[arg(long, value_name = "D")]
    cluster_tol: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("input error: {e}");
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(CliError::Input(m)) => {
            eprintln!("input error: {m}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> CliResult<ExitCode> {
    let mut settings = match &cli.common.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    if let Some(p) = &cli.common.config {
        settings.set_flag("config", Some(p.display().to_string()));
    }
    settings.set_flag("tol", cli.common.tol.clone());
    settings.set_flag("seed", cli.common.seed.clone());
    settings.set_flag(
        "out-csv",
        cli.common.out_csv.as_ref().map(|p| p.display().to_string()),
    );
    settings.set_flag(
        "out-json",
        cli.common.out_json.as_ref().map(|p| p.display().to_string()),
    );
    settings.set_switch("exact", cli.common.exact);
    settings.set_switch("no-timestamp", cli.common.no_timestamp);

    let (name, output) = dispatch(&cli.cmd, &mut settings)?;
    let envelope = Envelope::new(name, &settings, &output)?;
    envelope.emit(&settings, output.csv.as_deref())?;
    Ok(if output.verdict == VERDICT_FAIL {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn dispatch(cmd: &Cmd, settings: &mut Settings) -> CliResult<(&'static str, CommandOutput)> {
    let out = match cmd {
        Cmd::Jensen(a) => {
            settings.set_flag("atom", join_repeatable(&a.atom));
            settings.set_flag("bipoly", a.bipoly.clone());
            settings.set_flag("r", a.r.clone());
            settings.set_flag("r-grid", a.r_grid.clone());
            ("jensen", commands::disc::jensen(settings)?)
        }
        Cmd::Fmt(a) => {
            settings.set_flag("map", a.map.clone());
            settings.set_flag("divisor", a.divisor.clone());
            settings.set_flag("r", a.r.clone());
            settings.set_flag("r-grid", a.r_grid.clone());
            ("fmt", commands::disc::fmt(settings)?)
        }
        Cmd::Mason(a) => {
            settings.set_flag("a", a.a.clone());
            settings.set_flag("b", a.b.clone());
            ("mason", commands::exact::mason(settings)?)
        }
        Cmd::Rh(a) => {
            settings.set_flag("map", a.map.clone());
            ("rh", commands::exact::rh(settings)?)
        }
        Cmd::Logrh(a) => {
            settings.set_flag("map", a.map.clone());
            settings.set_flag("boundary", a.boundary.clone());
            ("logrh", commands::exact::logrh(settings)?)
        }
        Cmd::Taut(a) => {
            settings.set_flag("map", a.map.clone());
            settings.set_flag("seq", a.seq.clone());
            settings.set_flag("boundary", a.boundary.clone());
            settings.set_flag("r", a.r.clone());
            settings.set_flag("r-grid", a.r_grid.clone());
            ("taut", commands::disc::taut(settings)?)
        }
        Cmd::Bubble(a) => {
            settings.set_flag("map", a.map.clone());
            settings.set_flag("seq", a.seq.clone());
            settings.set_flag("divisor", a.divisor.clone());
            settings.set_flag("bubble", join_repeatable(&a.bubble));
            settings.set_flag("r", a.r.clone());
            settings.set_flag("eps", a.eps.clone());
            ("bubble", commands::limits::bubble(settings)?)
        }
        Cmd::Gromov(a) => {
            settings.set_flag("seq", a.seq.clone());
            settings.set_flag("r", a.r.clone());
            settings.set_flag("r-grid", a.r_grid.clone());
            settings.set_flag("mesh", a.mesh.clone());
            settings.set_flag("bound", a.bound.clone());
            ("gromov", commands::limits::gromov(settings)?)
        }
        Cmd::Currents(a) => {
            settings.set_flag("seq", a.seq.clone());
            settings.set_flag("divisor", a.divisor.clone());
            settings.set_flag("r", a.r.clone());
            settings.set_flag("r-grid", a.r_grid.clone());
            settings.set_flag("cluster-tol", a.cluster_tol.clone());
            ("currents", commands::limits::currents(settings)?)
        }
    };
    Ok(out)
}

fn join_repeatable(entries: &[String]) -> Option<String> {
    if entries.is_empty() {
        None
    } else {
        Some(entries.join(";"))
    }
}
