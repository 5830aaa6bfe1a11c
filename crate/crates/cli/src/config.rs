//! Run configuration from a file, command-line flags, or both.
//!
//! The file format is UTF-8 text with one `key = value` per line, `#`
//! comments, and at most one fenced block holding matrix-family text:
//!
//! ````text
//! params = x, y
//! radius = 0.5
//! center = 2, 0
//! ```
//! [[x, y],
//!  [y, -x]]
//! ```
//! ````
//!
//! Flags override file values key by key, except that a family given by
//! flag replaces any family source in the file together with its `params`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use holonomy_core::hamiltonian_dsl::parse_scalar;

use crate::CliError;

/// Keys that select where the Hamiltonian family comes from.
pub const FAMILY_KEYS: [&str; 3] = ["family", "dsl", "family_file"];

pub const KNOWN_KEYS: &[&str] = &[
    "family",
    "dsl",
    "family_file",
    "params",
    "band",
    "center",
    "radius",
    "winding",
    "samples",
    "vertices",
    "closure_shift",
    "gauge",
    "gauge_winding",
    "flux",
    "solenoid",
    "expect",
    "tol",
    "gap_tol",
    "convergence",
    "format",
    "output",
];

pub const DEFAULT_SAMPLES: usize = 1000;

/// Raw, untyped settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse_file_text(text: &str) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        let mut lines = text.lines().enumerate();
        while let Some((n, line)) = lines.next() {
            let line_no = n + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed.starts_with("```") {
                let mut block = String::new();
                let mut closed = false;
                for (_, inner) in lines.by_ref() {
                    if inner.trim().starts_with("```") {
                        closed = true;
                        break;
                    }
                    block.push_str(inner);
                    block.push('\n');
                }
                if !closed {
                    return Err(CliError::Config(format!("line {line_no}: unterminated fenced block")));
                }
                settings.insert_new("dsl", block.trim().to_owned(), line_no)?;
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(CliError::Config(format!("line {line_no}: expected `key = value`, got `{trimmed}`")));
            };
            settings.insert_new(key.trim(), value.trim().to_owned(), line_no)?;
        }
        Ok(settings)
    }

    fn insert_new(&mut self, key: &str, value: String, line_no: usize) -> Result<(), CliError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("line {line_no}: unknown key `{key}`")));
        }
        if self.values.insert(key.to_owned(), value).is_some() {
            return Err(CliError::Config(format!("line {line_no}: key `{key}` given twice")));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KNOWN_KEYS.contains(&key), "{key}");
        self.values.insert(key.to_owned(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// `self` with every value in `flags` applied on top.
    pub fn overridden_by(mut self, flags: &Settings) -> Settings {
        if FAMILY_KEYS.iter().any(|k| flags.values.contains_key(*k)) {
            // parameter names belong to the family they came with
            for k in FAMILY_KEYS.iter().chain(&["params"]) {
                self.values.remove(*k);
            }
        }
        for (k, v) in &flags.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }
}

/// A real number written as a constant expression such as `pi/3` or `-1.5e-2`.
pub fn parse_real(key: &str, text: &str) -> Result<f64, CliError> {
    let expr = parse_scalar(text, &[]).map_err(|e| CliError::Config(format!("{key}: {e}")))?;
    let value = expr
        .eval_real(&[])
        .map_err(|e| CliError::Config(format!("{key}: {e}")))?;
    Ok(value)
}

pub fn parse_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|item| parse_real(key, item.trim())).collect()
}

fn parse_pair(key: &str, text: &str) -> Result<[f64; 2], CliError> {
    match parse_list(key, text)?.as_slice() {
        [a, b] => Ok([*a, *b]),
        other => Err(CliError::Config(format!("{key}: expected two numbers, got {}", other.len()))),
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, text: &str) -> Result<T, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{text}` is not a valid integer")))
}

fn parse_bool(key: &str, text: &str) -> Result<bool, CliError> {
    match text.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::Config(format!("{key}: `{other}` is not true/false"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text.trim() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(CliError::Config(format!("format: `{other}` is not json or csv"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    /// `spinor` (parameters `r, phi`) or `spinor-cartesian` (`x, y`).
    Builtin(String),
    Text(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
        winding: i64,
        samples: usize,
    },
    /// Explicit closed polygon; the closing point is the first vertex plus
    /// `closure_shift`.
    Vertices {
        points: Vec<Vec<f64>>,
        closure_shift: Option<Vec<f64>>,
    },
}

/// Typed settings for `berry` and `ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Option<FamilySource>,
    pub params: Option<Vec<String>>,
    pub band: usize,
    pub path: PathSpec,
    pub gauge: Option<String>,
    pub gauge_winding: Option<i64>,
    pub flux: Option<f64>,
    pub solenoid: [f64; 2],
    pub expect: Option<f64>,
    pub tol: f64,
    pub gap_tol: f64,
    pub convergence: bool,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let sources: Vec<&str> = FAMILY_KEYS.iter().copied().filter(|k| s.get(k).is_some()).collect();
        if sources.len() > 1 {
            return Err(CliError::Config(format!(
                "exactly one family source is allowed, got {}",
                sources.join(" and ")
            )));
        }
        let family = match sources.first() {
            Some(&"family") => Some(FamilySource::Builtin(s.get("family").unwrap_or_default().to_owned())),
            Some(&"dsl") => Some(FamilySource::Text(s.get("dsl").unwrap_or_default().to_owned())),
            Some(_) => Some(FamilySource::File(PathBuf::from(s.get("family_file").unwrap_or_default()))),
            None => None,
        };
        let params = s.get("params").map(|p| {
            p.split(',')
                .map(|n| n.trim().to_owned())
                .filter(|n| !n.is_empty())
                .collect::<Vec<_>>()
        });

        let path = match s.get("vertices") {
            Some(text) => {
                for key in ["center", "radius", "winding", "samples"] {
                    if s.get(key).is_some() {
                        return Err(CliError::Config(format!("`{key}` cannot be combined with `vertices`")));
                    }
                }
                let points = text
                    .split(';')
                    .filter(|v| !v.trim().is_empty())
                    .map(|v| parse_list("vertices", v))
                    .collect::<Result<Vec<_>, _>>()?;
                if points.len() < 3 {
                    return Err(CliError::Config(format!(
                        "vertices: a closed path needs at least 3 points, got {}",
                        points.len()
                    )));
                }
                let closure_shift = s.get("closure_shift").map(|t| parse_list("closure_shift", t)).transpose()?;
                PathSpec::Vertices { points, closure_shift }
            }
            None => {
                if s.get("closure_shift").is_some() {
                    return Err(CliError::Config("`closure_shift` only applies to `vertices` paths".into()));
                }
                let samples = s.get("samples").map(|t| parse_int("samples", t)).transpose()?.unwrap_or(DEFAULT_SAMPLES);
                if samples < 3 {
                    return Err(CliError::Config(format!("samples must be at least 3, got {samples}")));
                }
                let winding = s.get("winding").map(|t| parse_int("winding", t)).transpose()?.unwrap_or(1);
                if winding == 0 {
                    return Err(CliError::Config("winding must be non-zero".into()));
                }
                let radius = s.get("radius").map(|t| parse_real("radius", t)).transpose()?.unwrap_or(1.0);
                #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails
                if !(radius > 0.0) {
                    return Err(CliError::Config(format!("radius must be positive, got {radius}")));
                }
                PathSpec::Circle {
                    center: s.get("center").map(|t| parse_pair("center", t)).transpose()?.unwrap_or([0.0, 0.0]),
                    radius,
                    winding,
                    samples,
                }
            }
        };

        let tol = s.get("tol").map(|t| parse_real("tol", t)).transpose()?.unwrap_or(1e-6);
        let gap_tol = s
            .get("gap_tol")
            .map(|t| parse_real("gap_tol", t))
            .transpose()?
            .unwrap_or(holonomy_core::spectral::DEFAULT_GAP_TOL);
        for (key, v) in [("tol", tol), ("gap_tol", gap_tol)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key} must be a non-negative number, got {v}")));
            }
        }

        Ok(Self {
            family,
            params,
            band: s.get("band").map(|t| parse_int("band", t)).transpose()?.unwrap_or(0),
            path,
            gauge: s.get("gauge").map(str::to_owned),
            gauge_winding: s.get("gauge_winding").map(|t| parse_int("gauge_winding", t)).transpose()?,
            flux: s.get("flux").map(|t| parse_real("flux", t)).transpose()?,
            solenoid: s.get("solenoid").map(|t| parse_pair("solenoid", t)).transpose()?.unwrap_or([0.0, 0.0]),
            expect: s.get("expect").map(|t| parse_real("expect", t)).transpose()?,
            tol,
            gap_tol,
            convergence: s.get("convergence").map(|t| parse_bool("convergence", t)).transpose()?.unwrap_or(false),
            format: s.get("format").map(OutputFormat::parse).transpose()?.unwrap_or_default(),
            output: s.get("output").map(PathBuf::from),
        })
    }
}
