//! Command-line front end: argument parsing, dispatch and report rendering.
//!
//! Every command produces a JSON value; `--format text` prints the same
//! values as `path = value` lines.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::certify::{self, Status};
use crate::error::{Error, Result};
use crate::fixing::{catalog_by_id, catalog_fixing, FixingGroup, FixingSystem, CATALOG_IDS};
use crate::geometry::{classify_orbit, orbit_tangent_jacobian, spin_to_rotation, PointSystem};
use crate::orbit_solve::{
    fixing_residuals, fourier_leading, plane_fix_enumerate_with, plane_h_zeros, plane_reduce, polygon_h,
    space_fix_enumerate_with, space_reduce_with, SolverOptions,
};
use crate::rigidity::{
    bricard_gauge, bricard_octahedron, build_extended, parse_off, reduce_polyhedron, rigidity_test, square,
    tetrahedron, trace_flex, ExtendedSystem, Gauge, Polyhedron, VerdictStatus,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

const EXIT_HELP: &str = "Exit codes: 0 success, 2 parse or input error, 3 certification failure, 4 solver failure.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Find one rotation putting the system on the fixing variety.
    Reduce,
    /// Enumerate every such rotation on the orbit.
    Fix,
    /// Check the hypotheses of a fixing system.
    Certify,
    /// First-order rigidity test of a polyhedron.
    Rigidity,
    /// Trace a flex of a polyhedron by continuation.
    Trace,
    /// Leading Fourier coefficient of the Astrelin function on a plane orbit.
    Fourier,
    /// Orbit type and linear dependence of a point system.
    Classify,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "orbitfix", version, about = "Gauge fixing of rotation orbits of point systems", after_help = EXIT_HELP)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Point system or polyhedron (JSON or OFF); `fixture:square`, `fixture:tetrahedron`, `fixture:bricard` for built-ins.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Catalog id, path to a fixing-system JSON, or `polygon` for the plane `H = sum w_j^{jn}`.
    #[arg(long, global = true)]
    pub gauge: Option<String>,
    /// Residual tolerance of the solvers, relative to the magnitude scale.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Configuration deduplication tolerance.
    #[arg(long = "dedup-tol", global = true, default_value_t = 1e-8)]
    pub dedup_tol: f64,
    /// Required lower bound for the no-real-points certificate.
    #[arg(long, global = true, default_value_t = certify::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Subdivision depth for the no-real-points certificate.
    #[arg(long, global = true, default_value_t = certify::DEFAULT_MAX_DEPTH)]
    pub depth: u32,
    /// Seed for randomized starts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Trace step length.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub step: f64,
    /// Number of trace steps.
    #[arg(long, global = true, default_value_t = 50)]
    pub steps: usize,
}

impl RunConfig {
    /// Defaults for a command, as if no flags were given.
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            gauge: None,
            tol: 1e-8,
            dedup_tol: 1e-8,
            epsilon: certify::DEFAULT_EPSILON,
            depth: certify::DEFAULT_MAX_DEPTH,
            seed: 0,
            format: Format::Json,
            output: None,
            step: 0.01,
            steps: 50,
        }
    }

    pub fn with_input(mut self, input: impl Into<PathBuf>) -> Self {
        self.input = Some(input.into());
        self
    }

    pub fn with_gauge(mut self, gauge: impl Into<String>) -> Self {
        self.gauge = Some(gauge.into());
        self
    }

    fn solver_options(&self) -> Result<SolverOptions> {
        for (name, v) in [("tol", self.tol), ("dedup-tol", self.dedup_tol), ("epsilon", self.epsilon), ("step", self.step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parse(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(SolverOptions { residual_tol: self.tol, dedup_tol: self.dedup_tol, ..SolverOptions::default() })
    }
}

/// A finished command: the report and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidPointSystem(_)
        | Error::InvalidPolynomial(_)
        | Error::InvalidPolyhedron(_)
        | Error::NonUnitSpin(_)
        | Error::UnsupportedCount { .. } => EXIT_PARSE,
        Error::CertificationFailed(_) | Error::StubRequiresCoefficients { .. } => EXIT_CERTIFICATION,
        _ => EXIT_SOLVER,
    }
}

/// Runs a command without touching stdout or the output file.
pub fn run(cfg: &RunConfig) -> Outcome {
    let result = match cfg.command {
        Command::Reduce => cmd_reduce(cfg),
        Command::Fix => cmd_fix(cfg),
        Command::Certify => cmd_certify(cfg),
        Command::Rigidity => cmd_rigidity(cfg),
        Command::Trace => cmd_trace(cfg),
        Command::Fourier => cmd_fourier(cfg),
        Command::Classify => cmd_classify(cfg),
    };
    match result {
        Ok((report, exit_code)) => Outcome { report, exit_code },
        Err(e) => Outcome { report: json!({ "error": e.to_string() }), exit_code: exit_code_for(&e) },
    }
}

/// Entry point used by the binary: parses arguments, runs, writes the report.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out = run(&cfg);
    let text = render(&out.report, cfg.format);
    let written = match &cfg.output {
        Some(p) => std::fs::write(p, &text).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return EXIT_PARSE;
    }
    if out.exit_code != EXIT_OK {
        if let Some(msg) = out.report.get("error").and_then(Value::as_str) {
            eprintln!("error: {msg}");
        }
    }
    out.exit_code
}

/// JSON (pretty, trailing newline) or `path = value` lines.
pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            text_lines(v, "", &mut s);
            s
        }
    }
}

fn text_lines(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                text_lines(x, &p, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                text_lines(x, &format!("{path}[{i}]"), out);
            }
        }
        _ => {
            let _ = writeln!(out, "{path} = {v}");
        }
    }
}

fn read_input(cfg: &RunConfig) -> Result<(String, PathBuf)> {
    let path = cfg.input.clone().ok_or_else(|| Error::Parse("--input is required".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((text, path))
}

fn read_points(cfg: &RunConfig) -> Result<PointSystem> {
    let (text, _) = read_input(cfg)?;
    Ok(serde_json::from_str(&text)?)
}

fn resolve_fixing(gauge: Option<&str>, n: usize, group: FixingGroup) -> Result<FixingSystem> {
    match gauge {
        None => catalog_fixing(n, group),
        Some(id) if CATALOG_IDS.contains(&id) => catalog_by_id(id),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("gauge `{path}` is neither a catalog id nor a readable file: {e}")))?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn spin_json(s: &crate::geometry::Spin) -> Result<Value> {
    let r = spin_to_rotation(s)?;
    let m = r.matrix();
    let rows: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect();
    Ok(json!({ "alpha": [s.alpha.re, s.alpha.im], "beta": [s.beta.re, s.beta.im], "matrix": rows }))
}

pub fn cmd_reduce(cfg: &RunConfig) -> Result<(Value, i32)> {
    let opts = cfg.solver_options()?;
    let s = read_points(cfg)?;
    if s.dim() == 2 {
        let rho = plane_reduce(&s)?;
        let rotated = crate::geometry::rotate_plane(&s, rho)?;
        let a = crate::fixing::astrelin_eval(&rotated)?;
        return Ok((json!({ "mode": "plane", "theta": rho.theta(), "residual": a.abs() }), EXIT_OK));
    }
    let fs = resolve_fixing(cfg.gauge.as_deref(), s.len(), FixingGroup::RotationsOnly)?;
    let q = space_reduce_with(&s, &fs, &opts)?;
    let res = fixing_residuals(&s, &fs, &q)?;
    Ok((
        json!({ "mode": "space", "gauge": fs.provenance(), "spin": spin_json(&q)?, "residuals": res }),
        EXIT_OK,
    ))
}

pub fn cmd_fix(cfg: &RunConfig) -> Result<(Value, i32)> {
    let opts = cfg.solver_options()?;
    let s = read_points(cfg)?;
    if s.dim() == 2 {
        let (kind, angles) = match cfg.gauge.as_deref() {
            Some("polygon") => ("polygon-imh", plane_h_zeros(&polygon_h(s.len())?, &s, &opts)?),
            None | Some("astrelin") => ("astrelin", plane_fix_enumerate_with(&s, &opts)?),
            Some(other) => return Err(Error::Parse(format!("unknown plane gauge `{other}` (astrelin, polygon)"))),
        };
        return Ok((json!({ "mode": "plane", "gauge": kind, "count": angles.len(), "angles": angles }), EXIT_OK));
    }
    let fs = resolve_fixing(cfg.gauge.as_deref(), s.len(), FixingGroup::RotationsOnly)?;
    let rep = space_fix_enumerate_with(&s, &fs, &opts)?;
    let mut v = serde_json::to_value(&rep)?;
    if rep.lines.iter().any(|l| l.stabilizer) {
        v["note"] = json!("H vanishes identically on some lines: the points lie on the z-axis there and the whole stabilizer circle gives one configuration");
    }
    Ok((v, EXIT_OK))
}

pub fn cmd_certify(cfg: &RunConfig) -> Result<(Value, i32)> {
    cfg.solver_options()?;
    let fs = match (cfg.gauge.as_deref(), &cfg.input) {
        (Some(g), _) => resolve_fixing(Some(g), 0, FixingGroup::RotationsOnly)?,
        (None, Some(_)) => {
            let (text, _) = read_input(cfg)?;
            serde_json::from_str(&text)?
        }
        (None, None) => return Err(Error::Parse("certify needs --gauge or --input".into())),
    };
    let mut certs = certify::preflight(&fs, cfg.epsilon, cfg.depth)?;
    if fs.n() == 3 {
        certs.pop();
        certs.push(certify::check_plane_smooth_with(fs.f(), cfg.seed, 64)?);
    }
    let refuted = certs.iter().any(|c| c.status == Status::Refuted);
    let code = if refuted { EXIT_CERTIFICATION } else { EXIT_OK };
    Ok((json!({ "gauge": fs.provenance(), "certificates": certs }), code))
}

fn load_polyhedron(cfg: &RunConfig) -> Result<(Polyhedron, Gauge)> {
    let input = cfg.input.as_ref().ok_or_else(|| Error::Parse("--input is required".into()))?;
    let name = input.to_string_lossy();
    let p = match name.strip_prefix("fixture:") {
        Some("square") => square(),
        Some("tetrahedron") => tetrahedron(),
        Some("bricard") => bricard_octahedron(),
        Some(other) => return Err(Error::Parse(format!("unknown fixture `{other}` (square, tetrahedron, bricard)"))),
        None => {
            let (text, path) = read_input(cfg)?;
            if is_off(&path, &text) {
                parse_off(&text)?
            } else {
                serde_json::from_str(&text)?
            }
        }
    };
    let gauge = if p.dim() == 2 {
        Gauge::Plane
    } else if cfg.gauge.is_none() && name == "fixture:bricard" {
        bricard_gauge()
    } else {
        Gauge::Space { system: resolve_fixing(cfg.gauge.as_deref(), p.vertices().len(), FixingGroup::FullIsometry)? }
    };
    Ok((p, gauge))
}

fn is_off(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("off")) || text.trim_start().starts_with("OFF")
}

fn reduced_system(cfg: &RunConfig) -> Result<ExtendedSystem> {
    cfg.solver_options()?;
    let (p, gauge) = load_polyhedron(cfg)?;
    let reduced = reduce_polyhedron(&p, &gauge)?;
    build_extended(&reduced, gauge)
}

pub fn cmd_rigidity(cfg: &RunConfig) -> Result<(Value, i32)> {
    let es = reduced_system(cfg)?;
    let v = rigidity_test(&es)?;
    Ok((
        json!({
            "equations": es.equation_count(),
            "variables": es.variable_count(),
            "base": es.base(),
            "verdict": v,
        }),
        EXIT_OK,
    ))
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<(Value, i32)> {
    let es = reduced_system(cfg)?;
    let v = rigidity_test(&es)?;
    if v.status != VerdictStatus::FlexDirectionFound {
        return Err(Error::Precondition(format!("no flex direction at the base ({})", v.status.as_str())));
    }
    // orient the first kernel vector so that its largest entry is positive
    let mut dir = v.kernel[0].clone();
    let big = dir.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if big < 0.0 {
        dir.iter_mut().for_each(|x| *x = -*x);
    }
    let tr = trace_flex(&es, &dir, cfg.step, cfg.steps)?;
    let code = if tr.diverged { EXIT_SOLVER } else { EXIT_OK };
    Ok((
        json!({
            "dim": es.dim(),
            "base": es.base(),
            "step": cfg.step,
            "count": tr.configurations.len(),
            "trace": tr,
        }),
        code,
    ))
}

pub fn cmd_fourier(cfg: &RunConfig) -> Result<(Value, i32)> {
    let s = read_points(cfg)?;
    let c = fourier_leading(&s)?;
    Ok((json!({ "order": 4 * s.len() - 2, "a": c.re, "b": c.im }), EXIT_OK))
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<(Value, i32)> {
    let s = read_points(cfg)?;
    let class = classify_orbit(&s);
    let mut v = json!({ "orbit_class": class.tag.as_str(), "dependence": class.dependence });
    if s.dim() == 3 && s.len() >= 2 {
        let j = orbit_tangent_jacobian(&s)?;
        v["immersion_minor"] = json!(crate::geometry::immersion_minor(&j));
    }
    Ok((v, EXIT_OK))
}
