//! Library behind the `hardy` binary: runs the Hardy-inequality check
//! suites and writes CSV and JSON reports.
//!
//! Exit status is 0 when every row passes, 1 when any check fails and 2 on a
//! configuration or precondition error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::Settings;
use report::{sort_rows, summary_table, write_reports};
use suites::{plan, Kind};

#[derive(Parser, Debug)]
#[command(
    name = "hardy",
    version,
    about = "Numerical checks of Hardy-type inequalities"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-dimensional Hardy inequality on the half-line.
    VerifyClassical(RunArgs),
    /// Near-extremizer ratios approaching the sharp constant.
    SharpnessSweep(RunArgs),
    /// Weighted Hardy inequality with the gradient on the right.
    VerifyCazenave(RunArgs),
    /// Fractional Hardy quotients and their empirical constant.
    VerifyFractional(RunArgs),
    /// Logarithmic growth at the endpoint s p = n.
    EndpointBlowup(RunArgs),
    /// Point values and empirical constants of the maximal operators.
    MaximalSuite(RunArgs),
    /// Kernel split, duality, maximal bounds and majorization.
    ProofSteps(RunArgs),
    /// Every suite with its default parameters.
    All(RunArgs),
}

/// Flags mirror the config keys; values given here override the file.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the reports [default: reports].
    #[arg(long)]
    out: Option<String>,
    /// Dimension.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Split parameter, at least 2.
    #[arg(long)]
    kappa: Option<String>,
    /// Points per axis (cells for the half-line).
    #[arg(long = "N")]
    points: Option<String>,
    /// Half-width of the box (right end for the half-line).
    #[arg(long = "L")]
    half_width: Option<String>,
    /// Comma-separated cutoffs for the blow-up suite.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated cutoffs for the sharpness sweep.
    #[arg(long = "T")]
    cutoffs: Option<String>,
    /// Comma-separated family members, e.g. `gaussian,bump:0.5:1,bandlimited:3`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Constant used by verify-classical in place of (p/(p-1))^p.
    #[arg(long = "hardy-constant")]
    hardy_constant: Option<String>,
    /// Point-value tolerance in grid spacings [default: 2].
    #[arg(long = "tol-point")]
    tol_point: Option<String>,
    /// Relative change allowed under N -> 2N [default: 0.15].
    #[arg(long = "tol-refine")]
    tol_refine: Option<String>,
    /// Relative residual of A1 + A2 = A [default: 1e-12].
    #[arg(long = "tol-partition")]
    tol_partition: Option<String>,
    /// Relative residual of the duality identity [default: 1e-10].
    #[arg(long = "tol-duality")]
    tol_duality: Option<String>,
    /// Relative deviation of blow-up increments [default: 0.15].
    #[arg(long = "tol-blowup")]
    tol_blowup: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> [(&'static str, Option<&String>); 18] {
        [
            ("out", self.out.as_ref()),
            ("n", self.n.as_ref()),
            ("p", self.p.as_ref()),
            ("s", self.s.as_ref()),
            ("q", self.q.as_ref()),
            ("kappa", self.kappa.as_ref()),
            ("N", self.points.as_ref()),
            ("L", self.half_width.as_ref()),
            ("eps", self.eps.as_ref()),
            ("T", self.cutoffs.as_ref()),
            ("family", self.family.as_ref()),
            ("seed", self.seed.as_ref()),
            ("hardy-constant", self.hardy_constant.as_ref()),
            ("tol-point", self.tol_point.as_ref()),
            ("tol-refine", self.tol_refine.as_ref()),
            ("tol-partition", self.tol_partition.as_ref()),
            ("tol-duality", self.tol_duality.as_ref()),
            ("tol-blowup", self.tol_blowup.as_ref()),
        ]
    }
}

fn split(command: &Command) -> (Option<Kind>, &RunArgs) {
    match command {
        Command::VerifyClassical(a) => (Some(Kind::Classical), a),
        Command::SharpnessSweep(a) => (Some(Kind::Sharpness), a),
        Command::VerifyCazenave(a) => (Some(Kind::Cazenave), a),
        Command::VerifyFractional(a) => (Some(Kind::Fractional), a),
        Command::EndpointBlowup(a) => (Some(Kind::Endpoint), a),
        Command::MaximalSuite(a) => (Some(Kind::Maximal), a),
        Command::ProofSteps(a) => (Some(Kind::ProofSteps), a),
        Command::All(a) => (None, a),
    }
}

/// Returns whether every row passed.
fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let (kind, args) = split(command);
    let settings = Settings::load(args.config.as_deref(), args.overrides())?;
    let (stem, kinds, suite_settings) = match kind {
        Some(k) => (k.name(), vec![k], settings.clone()),
        None => ("all", Kind::ALL.to_vec(), settings.shared_only()),
    };

    let plans = kinds
        .iter()
        .map(|&k| {
            plan(k, &suite_settings)
                .map_err(|e| e.context(format!("{}: invalid configuration", k.name())))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (suite, p) in plans.iter().enumerate() {
        let mut suite_rows = p.run()?;
        for (i, row) in suite_rows.iter_mut().enumerate() {
            row.order = (suite, i);
        }
        rows.append(&mut suite_rows);
    }
    sort_rows(&mut rows);

    let mut echo = settings.echo().clone();
    echo.insert("command".into(), stem.into());
    let dir = Path::new(settings.str_or("out", "reports"));
    let (csv_path, json_path) = write_reports(dir, stem, &echo, &rows)?;

    write!(out, "{}", summary_table(&rows))?;
    writeln!(
        out,
        "wrote {} and {}",
        csv_path.display(),
        json_path.display()
    )?;
    match rows.iter().find(|r| !r.pass) {
        Some(r) => {
            writeln!(
                err,
                "error: check failed: {} (lhs = {}, rhs = {}, ratio = {})",
                r.experiment, r.lhs, r.rhs, r.ratio
            )?;
            Ok(false)
        }
        None => Ok(true),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout(), &mut io::stderr())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}
