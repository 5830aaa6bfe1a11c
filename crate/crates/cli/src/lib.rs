//! Command-line front end for `holonomy-core`.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 computation
//! error, 4 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod report;

use config::{OutputFormat, Settings};
use report::RunReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("computation error: {0}")]
    Computation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holonomy-lab", version, about = "Geometric phases: Berry, Pancharatnam and Aharonov-Bohm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Path options shared by `berry` and `ab`. Numbers accept constant
/// expressions such as `pi/3`.
#[derive(Debug, Args)]
pub struct PathArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Circle center, `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub winding: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    /// Explicit closed polygon, `x1,y1; x2,y2; ...`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["center", "radius", "samples", "winding"])]
    pub vertices: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)] // parsed once per process
pub enum Command {
    /// Lower band of the two-level reference family around the unit circle.
    DemoSpinor {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Loop phase of one band of a Hamiltonian family around a closed path.
    Berry {
        /// Built-in family: `spinor` (r, phi) or `spinor-cartesian` (x, y).
        #[arg(long, conflicts_with_all = ["dsl", "family_file"])]
        family: Option<String>,
        /// Matrix text such as `[[x, y],[y, -x]]`.
        #[arg(long, conflicts_with = "family_file")]
        dsl: Option<String>,
        #[arg(long)]
        family_file: Option<PathBuf>,
        /// Parameter names of a matrix-text family, comma separated.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        band: Option<String>,
        /// Closing-point offset for `--vertices` paths over angle coordinates.
        #[arg(long, allow_hyphen_values = true)]
        closure_shift: Option<String>,
        /// Gauge phase g as an expression in the family parameters.
        #[arg(long, allow_hyphen_values = true)]
        gauge: Option<String>,
        /// Declared number of turns of the gauge around the path; checked.
        #[arg(long, allow_hyphen_values = true)]
        gauge_winding: Option<String>,
        /// Expected loop phase; adds a pass/fail check at `--tol`.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        gap_tol: Option<String>,
        /// Add a convergence table over decades of sample counts.
        #[arg(long)]
        convergence: bool,
        #[command(flatten)]
        path: PathArgs,
    },
    /// Phase of an explicit closed chain of states given as JSON
    /// `[[[re, im], ...], ...]`.
    Pancharatnam {
        #[arg(long, conflicts_with = "chain_file", required_unless_present = "chain_file")]
        chain: Option<String>,
        #[arg(long)]
        chain_file: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Aharonov-Bohm phase of a closed planar path around a thin solenoid.
    Ab {
        #[arg(long, allow_hyphen_values = true)]
        flux: Option<String>,
        /// Solenoid axis position, `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        solenoid: Option<String>,
        #[command(flatten)]
        path: PathArgs,
    },
    /// Boson, fermion or anyon from a single-exchange phase.
    ClassifyExchange {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        dimension: i64,
        #[arg(long, default_value = "1e-12")]
        tol: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Whether two phases sum to zero mod 2π.
    CheckComplementarity {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value = "1e-12")]
        tol: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Where and how to write the report.
struct Destination {
    format: OutputFormat,
    output: Option<PathBuf>,
}

fn settings_from(path: &PathArgs, extra: &[(&str, Option<&String>)]) -> Result<Settings, CliError> {
    let file = match &path.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("reading {}: {e}", p.display())))?;
            Settings::parse_file_text(&text)?
        }
        None => Settings::default(),
    };
    let mut flags = Settings::default();
    let common = [
        ("center", path.center.as_ref()),
        ("radius", path.radius.as_ref()),
        ("winding", path.winding.as_ref()),
        ("samples", path.samples.as_ref()),
        ("vertices", path.vertices.as_ref()),
    ];
    for (key, value) in common.iter().chain(extra) {
        if let Some(v) = value {
            flags.set(key, v.as_str());
        }
    }
    if let Some(f) = path.out.format {
        flags.set("format", f.to_string());
    }
    if let Some(o) = &path.out.output {
        flags.set("output", o.display().to_string());
    }
    Ok(file.overridden_by(&flags))
}

fn plain_destination(out: &OutputArgs) -> Destination {
    Destination {
        format: out.format.unwrap_or_default(),
        output: out.output.clone(),
    }
}

fn settings_destination(settings: &Settings) -> Result<Destination, CliError> {
    Ok(Destination {
        format: settings.get("format").map(OutputFormat::parse).transpose()?.unwrap_or_default(),
        output: settings.get("output").map(PathBuf::from),
    })
}

fn execute(command: Command) -> Result<(RunReport, Destination), CliError> {
    match command {
        Command::DemoSpinor { samples, out } => Ok((commands::demo_spinor(samples)?, plain_destination(&out))),
        Command::Berry {
            family,
            dsl,
            family_file,
            params,
            band,
            closure_shift,
            gauge,
            gauge_winding,
            expect,
            tol,
            gap_tol,
            convergence,
            path,
        } => {
            let family_file = family_file.map(|p| p.display().to_string());
            let convergence = convergence.then(|| "true".to_owned());
            let settings = settings_from(
                &path,
                &[
                    ("family", family.as_ref()),
                    ("dsl", dsl.as_ref()),
                    ("family_file", family_file.as_ref()),
                    ("params", params.as_ref()),
                    ("band", band.as_ref()),
                    ("closure_shift", closure_shift.as_ref()),
                    ("gauge", gauge.as_ref()),
                    ("gauge_winding", gauge_winding.as_ref()),
                    ("expect", expect.as_ref()),
                    ("tol", tol.as_ref()),
                    ("gap_tol", gap_tol.as_ref()),
                    ("convergence", convergence.as_ref()),
                ],
            )?;
            let dest = settings_destination(&settings)?;
            Ok((commands::berry(&settings)?, dest))
        }
        Command::Pancharatnam { chain, chain_file, out } => {
            let json = match (chain, chain_file) {
                (Some(c), _) => c,
                (None, Some(p)) => {
                    std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("reading {}: {e}", p.display())))?
                }
                (None, None) => return Err(CliError::Config("give --chain or --chain-file".into())),
            };
            Ok((commands::pancharatnam(&json)?, plain_destination(&out)))
        }
        Command::Ab { flux, solenoid, path } => {
            let settings = settings_from(&path, &[("flux", flux.as_ref()), ("solenoid", solenoid.as_ref())])?;
            let dest = settings_destination(&settings)?;
            Ok((commands::ab(&settings)?, dest))
        }
        Command::ClassifyExchange {
            theta,
            dimension,
            tol,
            out,
        } => Ok((commands::classify_exchange(&theta, dimension, &tol)?, plain_destination(&out))),
        Command::CheckComplementarity { a, b, tol, out } => {
            Ok((commands::check_complementarity(&a, &b, &tol)?, plain_destination(&out)))
        }
    }
}

fn render(report: &RunReport, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut s = report.to_json().into_bytes();
            s.push(b'\n');
            s
        }
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).expect("writing to memory cannot fail");
            buf
        }
    }
}

/// Parses `args`, runs the command and writes the report; returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    let result = execute(cli.command).and_then(|(report, dest)| {
        let bytes = render(&report, dest.format);
        match &dest.output {
            Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
            None => stdout.write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
