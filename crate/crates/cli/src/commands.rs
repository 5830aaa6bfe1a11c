//! One function per subcommand, each producing a [`RunReport`].

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use holonomy_core::aharonov_bohm::{
    ab_phase, complementarity_check, complementary_phase_hypothesis, AbError, PlanarPath, Point2, SolenoidField,
};
use holonomy_core::berry::{
    apply_gauge, audit_section, connection_line_integral, connection_numeric, default_step, orthogonal_gauge_check,
    section_loop_phase, BerryError, GaugeFunction, SingleValuednessAudit,
};
use holonomy_core::exchange_stats::{ExchangeError, ExchangePhase, SpatialDimension};
use holonomy_core::hamiltonian_dsl::{builtin_spinor_cartesian_family, builtin_spinor_family, parse_family, parse_scalar};
use holonomy_core::pancharatnam::{loop_phase_discrete, overlap_phase, parallel_transport, OverlapChain, PancharatnamError};
use holonomy_core::spectral::{continue_branch, SpectralError, DEFAULT_GAP_TOL};
use holonomy_core::{canonicalize_phase, phase_distance, GeometricPhase, HamiltonianFamily, ParamPath, ParameterPoint, QuantumState};
use num_complex::Complex64;

use crate::config::{parse_real, FamilySource, PathSpec, RunConfig, Settings};
use crate::report::{AuditEntry, Classification, ConvergenceRow, Quantity, RunReport, Topology};
use crate::CliError;

/// Sample counts of the demo convergence table.
pub const DEMO_CONVERGENCE_SAMPLES: [usize; 3] = [100, 1_000, 10_000];

const LOOP_PHASE_TOL: f64 = 1e-4;
const AUDIT_PHASE_TOL: f64 = 1e-6;
const ORTHOGONAL_TOL: f64 = 1e-10;
const CONNECTION_TOL: f64 = 1e-6;
const AB_TOL: f64 = 1e-9;
const COMPLEMENTARITY_TOL: f64 = 1e-12;
/// Angle at which the demo samples the gauged connection.
const DEMO_CONNECTION_PHI: f64 = 1.0;

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<BerryError> for CliError {
    fn from(e: BerryError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<PancharatnamError> for CliError {
    fn from(e: PancharatnamError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<AbError> for CliError {
    fn from(e: AbError) -> Self {
        CliError::Computation(e.to_string())
    }
}

fn audit_entry(name: &str, audit: &SingleValuednessAudit) -> AuditEntry {
    AuditEntry {
        name: name.to_owned(),
        closure_phase: audit.closure_phase.value(),
        single_valued: audit.single_valued,
        sign_flip: audit.sign_flip,
    }
}

fn loop_quantity(name: &str, phase: GeometricPhase) -> Quantity {
    Quantity::phase(name, phase.value(), phase)
}

fn raw_phase(name: &str, raw: f64) -> Quantity {
    Quantity::phase(name, raw, holonomy_core::berry::canonical(raw))
}

fn finish(mut report: RunReport, start: Instant) -> RunReport {
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    report
}

/// The two-level reference family on the unit circle, end to end.
pub fn demo_spinor(samples: usize) -> Result<RunReport, CliError> {
    let start = Instant::now();
    if samples < 3 {
        return Err(CliError::Config(format!("samples must be at least 3, got {samples}")));
    }
    let mut report = RunReport::new("demo-spinor");
    report.input("samples", samples);
    report.input("family", "spinor");
    report.input("band", 0);

    let family = builtin_spinor_family();
    let path = ParamPath::polar_circle(1.0, samples, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let section = continue_branch(&family, &path, 0, DEFAULT_GAP_TOL)?;
    let gauge = GaugeFunction::half_angle(1);
    let gauged = apply_gauge(&section, &gauge)?;

    report
        .quantities
        .push(loop_quantity("loop_phase", section_loop_phase(&section)?).expect(PI, LOOP_PHASE_TOL));
    report
        .quantities
        .push(loop_quantity("gauged_loop_phase", section_loop_phase(&gauged)?).expect(PI, LOOP_PHASE_TOL));

    let pt = audit_section(&section)?;
    let ga = audit_section(&gauged)?;
    report
        .quantities
        .push(loop_quantity("parallel_transport_closure_phase", pt.closure_phase).expect(PI, AUDIT_PHASE_TOL));
    report
        .quantities
        .push(loop_quantity("gauged_closure_phase", ga.closure_phase).expect(0.0, AUDIT_PHASE_TOL));
    report
        .quantities
        .push(Quantity::scalar("orthogonal_gauge_check", orthogonal_gauge_check(&section)).at_most(ORTHOGONAL_TOL));

    let point = ParameterPoint::new(vec![1.0, DEMO_CONNECTION_PHI]).map_err(|e| CliError::Computation(e.to_string()))?;
    let a = connection_numeric(&family, 0, &point, default_step(&point), Some(&gauge))?;
    report
        .quantities
        .push(Quantity::scalar("gauged_connection_r", a.components[0]).expect(0.0, CONNECTION_TOL));
    report
        .quantities
        .push(Quantity::scalar("gauged_connection_phi", a.components[1]).expect(0.5, CONNECTION_TOL));
    report.input("connection_phi", DEMO_CONNECTION_PHI);

    report
        .quantities
        .push(raw_phase("parallel_transport_connection_integral", connection_line_integral(&section)?));
    report
        .quantities
        .push(raw_phase("gauged_connection_integral", connection_line_integral(&gauged)?).expect(PI, LOOP_PHASE_TOL));

    report.audits.push(audit_entry("parallel_transport", &pt));
    report.audits.push(audit_entry("half_angle_gauge", &ga));

    if samples >= 10_000 {
        for n in DEMO_CONVERGENCE_SAMPLES {
            let path = ParamPath::polar_circle(1.0, n, 1).map_err(|e| CliError::Computation(e.to_string()))?;
            let phase = section_loop_phase(&continue_branch(&family, &path, 0, DEFAULT_GAP_TOL)?)?;
            report.convergence.push(ConvergenceRow {
                n,
                phase: phase.value(),
                abs_error: phase_distance(phase, GeometricPhase::PI),
            });
        }
    }
    Ok(finish(report, start))
}

/// Whether the family's parameters are polar `(r, phi)`, in which case circle
/// paths are laid out in the Cartesian plane and converted.
struct LoadedFamily {
    family: HamiltonianFamily,
    polar: bool,
}

fn load_family(cfg: &RunConfig) -> Result<LoadedFamily, CliError> {
    let source = cfg
        .family
        .as_ref()
        .ok_or_else(|| CliError::Config("no family given; use --family, --dsl or --family-file".into()))?;
    let from_text = |text: &str| -> Result<LoadedFamily, CliError> {
        let params = cfg
            .params
            .as_ref()
            .ok_or_else(|| CliError::Config("a matrix-text family needs `params` (e.g. --params x,y)".into()))?;
        let names: Vec<&str> = params.iter().map(String::as_str).collect();
        let family = parse_family(text, &names).map_err(|e| CliError::Config(format!("family: {e}")))?;
        Ok(LoadedFamily { family, polar: false })
    };
    let loaded = match source {
        FamilySource::Builtin(name) => {
            if cfg.params.is_some() {
                return Err(CliError::Config("`params` only applies to matrix-text families".into()));
            }
            match name.as_str() {
                "spinor" => LoadedFamily {
                    family: builtin_spinor_family(),
                    polar: true,
                },
                "spinor-cartesian" => LoadedFamily {
                    family: builtin_spinor_cartesian_family(),
                    polar: false,
                },
                other => {
                    return Err(CliError::Config(format!(
                        "unknown built-in family `{other}` (expected spinor or spinor-cartesian)"
                    )))
                }
            }
        }
        FamilySource::Text(text) => from_text(text)?,
        FamilySource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            from_text(&text)?
        }
    };
    if cfg.band >= loaded.family.dim() {
        return Err(CliError::Config(format!(
            "band {} does not exist in a {}x{} family",
            cfg.band,
            loaded.family.dim(),
            loaded.family.dim()
        )));
    }
    Ok(loaded)
}

/// Circle in the Cartesian plane expressed in `(r, phi)` with `phi`
/// unwrapped along the way; the closing point carries the accumulated angle.
fn polar_circle_path(center: [f64; 2], radius: f64, samples: usize, winding: i64) -> Result<ParamPath, CliError> {
    let total = TAU * winding as f64;
    let mut points = Vec::with_capacity(samples);
    let mut prev_phi: Option<f64> = None;
    let mut first_phi = 0.0;
    for k in 0..=samples {
        let t = total * k as f64 / samples as f64;
        let (x, y) = (center[0] + radius * t.cos(), center[1] + radius * t.sin());
        let raw = y.atan2(x);
        let phi = match prev_phi {
            None => {
                first_phi = raw;
                raw
            }
            Some(p) => p + holonomy_core::berry::canonical(raw - p).value(),
        };
        prev_phi = Some(phi);
        if k < samples {
            points.push(ParameterPoint::new(vec![x.hypot(y), phi]).map_err(|e| CliError::Config(e.to_string()))?);
        }
    }
    let shift = vec![0.0, prev_phi.unwrap_or(first_phi) - first_phi];
    ParamPath::with_closure_shift(points, true, shift).map_err(|e| CliError::Config(e.to_string()))
}

fn build_param_path(loaded: &LoadedFamily, spec: &PathSpec, samples_override: Option<usize>) -> Result<ParamPath, CliError> {
    let params = loaded.family.parameter_count();
    match spec {
        PathSpec::Circle {
            center,
            radius,
            winding,
            samples,
        } => {
            let samples = samples_override.unwrap_or(*samples);
            if loaded.polar {
                polar_circle_path(*center, *radius, samples, *winding)
            } else if params == 2 {
                ParamPath::cartesian_circle(*center, *radius, samples, *winding)
                    .map_err(|e| CliError::Config(e.to_string()))
            } else {
                Err(CliError::Config(format!(
                    "circle paths need a two-parameter family, this one has {params}; give `vertices` instead"
                )))
            }
        }
        PathSpec::Vertices { points, closure_shift } => {
            let pts = points
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    if p.len() != params {
                        return Err(CliError::Config(format!(
                            "vertex {k} has {} coordinates, the family has {params} parameters",
                            p.len()
                        )));
                    }
                    ParameterPoint::new(p.clone()).map_err(|e| CliError::Config(format!("vertex {k}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let shift = closure_shift.clone().unwrap_or_else(|| vec![0.0; params]);
            ParamPath::with_closure_shift(pts, true, shift).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn build_gauge(cfg: &RunConfig, family: &HamiltonianFamily) -> Result<Option<GaugeFunction>, CliError> {
    let Some(text) = &cfg.gauge else {
        return Ok(None);
    };
    let names: Vec<&str> = family.parameter_names().iter().map(String::as_str).collect();
    let expr = parse_scalar(text, &names).map_err(|e| CliError::Config(format!("gauge: {e}")))?;
    let f = move |p: &ParameterPoint| expr.eval_real(p.coords()).unwrap_or(f64::NAN);
    Ok(Some(match cfg.gauge_winding {
        Some(w) => GaugeFunction::new(text.clone(), w, f),
        None => GaugeFunction::pointwise(text.clone(), f),
    }))
}

fn echo_settings(report: &mut RunReport, settings: &Settings) {
    for (k, v) in settings.iter() {
        report.input(k, v);
    }
}

/// Loop phase, audit and connection integral of a family band around a
/// closed path.
pub fn berry(settings: &Settings) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let cfg = RunConfig::from_settings(settings)?;
    let mut report = RunReport::new("berry");
    echo_settings(&mut report, settings);

    let loaded = load_family(&cfg)?;
    let path = build_param_path(&loaded, &cfg.path, None)?;
    let gauge = build_gauge(&cfg, &loaded.family)?;
    if cfg.convergence && !matches!(cfg.path, PathSpec::Circle { .. }) {
        return Err(CliError::Config("a convergence table needs a circle path".into()));
    }

    let section = continue_branch(&loaded.family, &path, cfg.band, cfg.gap_tol)?;
    let phase = section_loop_phase(&section)?;
    let mut q = loop_quantity("loop_phase", phase);
    if let Some(e) = cfg.expect {
        q = q.expect(e, cfg.tol);
    }
    report.quantities.push(q);
    report
        .quantities
        .push(raw_phase("parallel_transport_connection_integral", connection_line_integral(&section)?));
    let pt = audit_section(&section)?;
    report
        .quantities
        .push(loop_quantity("parallel_transport_closure_phase", pt.closure_phase));
    report
        .quantities
        .push(Quantity::scalar("orthogonal_gauge_check", orthogonal_gauge_check(&section)));
    report.audits.push(audit_entry("parallel_transport", &pt));

    if let Some(g) = &gauge {
        g.check_winding(&path)?;
        let gauged = apply_gauge(&section, g)?;
        report
            .quantities
            .push(loop_quantity("gauged_loop_phase", section_loop_phase(&gauged)?));
        report
            .quantities
            .push(raw_phase("gauged_connection_integral", connection_line_integral(&gauged)?));
        let ga = audit_section(&gauged)?;
        report.quantities.push(loop_quantity("gauged_closure_phase", ga.closure_phase));
        report.audits.push(audit_entry("gauged", &ga));
    }

    if cfg.convergence {
        let PathSpec::Circle { samples, .. } = cfg.path else {
            unreachable!("checked above");
        };
        let reference = cfg.expect.map(canonicalize_phase).transpose().map_err(|e| CliError::Config(e.to_string()))?;
        let reference = reference.unwrap_or(phase);
        let mut n = 100;
        let mut sizes = Vec::new();
        while n < samples {
            sizes.push(n);
            n *= 10;
        }
        sizes.push(samples);
        for n in sizes.into_iter().filter(|&n| n >= 3) {
            let p = build_param_path(&loaded, &cfg.path, Some(n))?;
            let ph = section_loop_phase(&continue_branch(&loaded.family, &p, cfg.band, cfg.gap_tol)?)?;
            report.convergence.push(ConvergenceRow {
                n,
                phase: ph.value(),
                abs_error: phase_distance(ph, reference),
            });
        }
    }
    Ok(finish(report, start))
}

/// A JSON chain of states, `[[[re, im], ...], ...]`.
pub fn parse_chain(json: &str) -> Result<Vec<QuantumState>, CliError> {
    let raw: Vec<Vec<(f64, f64)>> =
        serde_json::from_str(json).map_err(|e| CliError::Config(format!("state chain: {e}")))?;
    raw.into_iter()
        .enumerate()
        .map(|(k, amps)| {
            let amps = amps.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            QuantumState::new(amps).map_err(|e| CliError::Config(format!("state {k}: {e}")))
        })
        .collect()
}

/// Discrete loop phase and holonomy of an explicit closed chain of states.
/// States are normalized on input.
pub fn pancharatnam(chain_json: &str) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let states = parse_chain(chain_json)?;
    let mut report = RunReport::new("pancharatnam");
    report.input("states", states.len());
    report.input("dimension", states.first().map_or(0, QuantumState::dim));
    let chain = OverlapChain::closed(states).map_err(|e| match e {
        PancharatnamError::UndefinedPhase { .. } => CliError::Computation(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;

    let phase = loop_phase_discrete(&chain)?;
    report.quantities.push(loop_quantity("loop_phase", phase));
    let (_, holonomy) = parallel_transport(&chain)?;
    report.quantities.push(loop_quantity("holonomy", holonomy));
    let s = chain.states();
    let mut total = 0.0;
    for (i, j) in chain.pairs() {
        let step = overlap_phase(&s[i], &s[j])?;
        total += step.value();
        report
            .quantities
            .push(loop_quantity(&format!("overlap_phase_{i}_{j}"), step));
    }
    report.quantities.push(raw_phase("step_phase_sum", total));
    Ok(finish(report, start))
}

fn planar_path(spec: &PathSpec) -> Result<PlanarPath, CliError> {
    let to_config = |e: AbError| CliError::Config(e.to_string());
    match spec {
        PathSpec::Circle {
            center,
            radius,
            winding,
            samples,
        } => PlanarPath::circle(Point2::new(center[0], center[1]), *radius, *samples, *winding).map_err(to_config),
        PathSpec::Vertices { points, closure_shift } => {
            if closure_shift.is_some() {
                return Err(CliError::Config("`closure_shift` does not apply to planar paths".into()));
            }
            let pts = points
                .iter()
                .enumerate()
                .map(|(k, p)| match p.as_slice() {
                    [x, y] => Ok(Point2::new(*x, *y)),
                    _ => Err(CliError::Config(format!("vertex {k}: planar vertices need two coordinates"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            PlanarPath::new(pts, true).map_err(to_config)
        }
    }
}

/// Aharonov–Bohm phase of a closed planar path around a solenoid, with the
/// complementary-phase hypothesis and its check.
pub fn ab(settings: &Settings) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let cfg = RunConfig::from_settings(settings)?;
    let mut report = RunReport::new("ab");
    echo_settings(&mut report, settings);
    if cfg.family.is_some() || cfg.gauge.is_some() {
        return Err(CliError::Config("`ab` takes a flux and a planar path, not a family or gauge".into()));
    }
    let flux = cfg.flux.ok_or_else(|| CliError::Config("`ab` needs --flux".into()))?;
    let field = SolenoidField::new(flux, Point2::new(cfg.solenoid[0], cfg.solenoid[1]))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let path = planar_path(&cfg.path)?;

    let phase = ab_phase(&field, &path)?;
    let hypothesis = complementary_phase_hypothesis(&field, &path)?;
    let check = complementarity_check(phase.canonical, hypothesis, COMPLEMENTARITY_TOL);

    let expected = phase.winding as f64 * flux;
    let mut q = Quantity::phase("ab_phase", phase.raw, phase.canonical);
    q.tolerance = Some(AB_TOL);
    q.pass = Some((phase.raw - expected).abs() <= AB_TOL);
    report.quantities.push(q);
    report
        .quantities
        .push(Quantity::phase("complementary_phase", -phase.raw, hypothesis));
    let mut sum = Quantity::phase("complementarity_sum", phase.canonical.value() + hypothesis.value(), check.sum);
    sum.tolerance = Some(COMPLEMENTARITY_TOL);
    sum.pass = Some(check.vanishes);
    report.quantities.push(sum);
    report.topology = Some(Topology {
        winding_number: phase.winding,
    });
    Ok(finish(report, start))
}

/// Statistics of an exchange phase in two or three dimensions.
pub fn classify_exchange(theta: &str, dimension: i64, tol: &str) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("classify-exchange");
    report.input("theta", theta);
    report.input("dimension", dimension);
    report.input("tol", tol);
    let theta_value = parse_real("theta", theta)?;
    let tol = parse_real("tol", tol)?;
    let dim = SpatialDimension::from_int(dimension).map_err(|e| CliError::Config(e.to_string()))?;
    let x = ExchangePhase::new(theta_value, dim).map_err(|e| match e {
        ExchangeError::ForbiddenInThreeD { .. } => CliError::Computation(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let stats = x.classify(tol);
    report
        .quantities
        .push(Quantity::phase("exchange_phase", theta_value, x.theta()));
    report
        .quantities
        .push(Quantity::phase("circulation_phase", 2.0 * theta_value, x.circulation_phase()));
    report.classification = Some(Classification {
        statistics: stats.name().to_owned(),
        theta: x.theta().value(),
        circulation_phase: x.circulation_phase().value(),
    });
    Ok(finish(report, start))
}

/// Whether two phases cancel mod 2π.
pub fn check_complementarity(a: &str, b: &str, tol: &str) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("check-complementarity");
    report.input("a", a);
    report.input("b", b);
    report.input("tol", tol);
    let to_phase = |key: &str, text: &str| -> Result<(f64, GeometricPhase), CliError> {
        let v = parse_real(key, text)?;
        Ok((v, canonicalize_phase(v).map_err(|e| CliError::Config(e.to_string()))?))
    };
    let (a_raw, a) = to_phase("a", a)?;
    let (b_raw, b) = to_phase("b", b)?;
    let tol = parse_real("tol", tol)?;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails
    if !(tol >= 0.0) {
        return Err(CliError::Config(format!("tol must be non-negative, got {tol}")));
    }
    let check = complementarity_check(a, b, tol);
    report.quantities.push(Quantity::phase("a", a_raw, a));
    report.quantities.push(Quantity::phase("b", b_raw, b));
    let mut sum = Quantity::phase("sum", a_raw + b_raw, check.sum);
    sum.tolerance = Some(tol);
    sum.pass = Some(check.vanishes);
    report.quantities.push(sum);
    Ok(finish(report, start))
}
