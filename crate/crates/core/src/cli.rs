//! Problem-file ingestion, pipeline orchestration and report emission.
//!
//! Problem files are line-oriented `key = value` text under `[problem]`,
//! `[newton]` and `[rigor]` sections. The structured output format is a
//! flat `key = value` document, one key per line, with directed 17-digit
//! decimal rounding on every certified bound so the printed numbers are
//! themselves valid bounds.

use crate::expr;
use crate::galerkin::{
    self, newton_trace, NewtonParams, ProblemSpec, QuadMode, RigorParams, SolveError,
};
use crate::interval::{format_directed, RoundDir};
use crate::rigor::{certify, CertStatus, CertifyOutcome};
use crate::series::CosCoeffs;
use std::fmt;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;
pub const EXIT_RIGOR: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Syntax { line: usize, msg: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(msg) => write!(f, "cannot read problem file: {msg}"),
            ConfigError::Syntax { line, msg } => write!(f, "problem file line {line}: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "invalid problem: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeFlag {
    Solve,
    Certify,
}

/// Command-line configuration: the problem file plus overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem_path: PathBuf,
    pub m: Option<usize>,
    pub solver_panels: Option<usize>,
    pub rigor_panels: Option<usize>,
    pub subdiv: Option<usize>,
    pub max_iter: Option<usize>,
    pub mode: ModeFlag,
    /// Raw cosine amplitudes. With `--mode solve` they replace the Newton
    /// initial guess; with `--mode certify` they are certified directly and
    /// the Newton stage is skipped.
    pub b0: Option<Vec<f64>>,
    pub format: OutputFormat,
}

pub const USAGE: &str = "usage: certify <problem-file> [options]
options:
  --m N                 override the truncation dimension m
  --solver-panels N     Simpson panels for the Newton stage (default 1024)
  --rigor-panels N      panels for the rigorous quadrature (default 64)
  --subdiv N            subdivision count for the sup bounds (default 256)
  --max-iter N          Newton iteration cap (default 50)
  --mode solve|certify  stop after the solve, or solve then certify (default)
  --format text|kv      human-readable report or flat key = value lines
  --b0 a1,a2,...        raw cosine amplitudes: initial guess with --mode
                        solve, certified as-is (Newton skipped) with
                        --mode certify
  --help                print this message";

/// Reads and validates a problem file, applying defaults for every key the
/// file leaves out.
pub fn load_problem(path: &Path) -> Result<ProblemSpec, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_problem_text(&text)
}

pub fn parse_problem_text(text: &str) -> Result<ProblemSpec, ConfigError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Problem,
        Newton,
        Rigor,
    }
    let mut section = Section::None;
    let mut f: Option<expr::Expr> = None;
    let mut m = galerkin::DEFAULT_M;
    let mut r = galerkin::DEFAULT_R;
    let mut b0: Vec<f64> = Vec::new();
    let mut tol = galerkin::DEFAULT_TOL;
    let mut max_iter = galerkin::DEFAULT_MAX_ITER;
    let mut panels = galerkin::DEFAULT_RIGOR_PANELS;
    let mut subdiv = galerkin::DEFAULT_SUBDIV;
    let mut mode = QuadMode::Simpson;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |msg: String| ConfigError::Syntax { line: lineno, msg };
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "problem" => Section::Problem,
                "newton" => Section::Newton,
                "rigor" => Section::Rigor,
                other => return Err(syntax(format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax("expected `key = value`".to_string()))?;
        let key = key.trim();
        let value = value.trim();
        match (section, key) {
            (Section::Problem, "f") => {
                let inner = value
                    .strip_prefix('"')
                    .and_then(|s| s.strip_suffix('"'))
                    .ok_or_else(|| syntax("f must be a quoted expression".to_string()))?;
                let parsed = expr::parse(inner)
                    .map_err(|e| syntax(format!("bad expression: {e}")))?;
                f = Some(parsed);
            }
            (Section::Problem, "m") => {
                m = value
                    .parse()
                    .map_err(|_| syntax(format!("bad integer `{value}` for m")))?;
            }
            (Section::Problem, "R") => {
                r = value
                    .parse()
                    .map_err(|_| syntax(format!("bad number `{value}` for R")))?;
            }
            (Section::Newton, "b0") => {
                b0 = value
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| syntax(format!("bad amplitude list `{value}`")))?;
            }
            (Section::Newton, "tol") => {
                tol = value
                    .parse()
                    .map_err(|_| syntax(format!("bad number `{value}` for tol")))?;
            }
            (Section::Newton, "max_iter") => {
                max_iter = value
                    .parse()
                    .map_err(|_| syntax(format!("bad integer `{value}` for max_iter")))?;
            }
            (Section::Rigor, "panels") => {
                panels = value
                    .parse()
                    .map_err(|_| syntax(format!("bad integer `{value}` for panels")))?;
            }
            (Section::Rigor, "subdiv") => {
                subdiv = value
                    .parse()
                    .map_err(|_| syntax(format!("bad integer `{value}` for subdiv")))?;
            }
            (Section::Rigor, "quad_mode") => {
                mode = match value {
                    "simpson" => QuadMode::Simpson,
                    "riemann" => QuadMode::Riemann,
                    other => {
                        return Err(syntax(format!(
                            "quad_mode must be simpson or riemann, got `{other}`"
                        )))
                    }
                };
            }
            (Section::None, _) => {
                return Err(syntax(format!("key `{key}` outside any section")));
            }
            (_, other) => {
                return Err(syntax(format!("unknown key `{other}`")));
            }
        }
    }

    let f = f.ok_or_else(|| ConfigError::Invalid("problem.f is required".to_string()))?;
    let spec = ProblemSpec {
        f,
        m,
        search_radius: r,
        solver_panels: galerkin::DEFAULT_SOLVER_PANELS,
        newton: NewtonParams {
            b0_amplitudes: b0,
            tol,
            max_iter,
        },
        rigor: RigorParams {
            panels,
            subdiv,
            mode,
        },
    };
    spec.validate().map_err(ConfigError::Invalid)?;
    Ok(spec)
}

/// Parses command-line arguments into a run configuration.
pub fn parse_args(args: &[String]) -> Result<RunConfig, String> {
    let mut it = args.iter();
    let problem_path = match it.next() {
        Some(p) if !p.starts_with("--") => PathBuf::from(p),
        _ => return Err("missing problem file".to_string()),
    };
    let mut cfg = RunConfig {
        problem_path,
        m: None,
        solver_panels: None,
        rigor_panels: None,
        subdiv: None,
        max_iter: None,
        mode: ModeFlag::Certify,
        b0: None,
        format: OutputFormat::Text,
    };
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{name} needs a value"))
        };
        match flag.as_str() {
            "--m" => cfg.m = Some(parse_usize(&value("--m")?, "--m")?),
            "--solver-panels" => {
                cfg.solver_panels = Some(parse_usize(&value("--solver-panels")?, "--solver-panels")?)
            }
            "--rigor-panels" => {
                cfg.rigor_panels = Some(parse_usize(&value("--rigor-panels")?, "--rigor-panels")?)
            }
            "--subdiv" => cfg.subdiv = Some(parse_usize(&value("--subdiv")?, "--subdiv")?),
            "--max-iter" => cfg.max_iter = Some(parse_usize(&value("--max-iter")?, "--max-iter")?),
            "--mode" => {
                cfg.mode = match value("--mode")?.as_str() {
                    "solve" => ModeFlag::Solve,
                    "certify" => ModeFlag::Certify,
                    other => return Err(format!("--mode must be solve or certify, got `{other}`")),
                }
            }
            "--format" => {
                cfg.format = match value("--format")?.as_str() {
                    "text" => OutputFormat::Text,
                    "kv" => OutputFormat::Kv,
                    other => return Err(format!("--format must be text or kv, got `{other}`")),
                }
            }
            "--b0" => {
                let list = value("--b0")?
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| "bad amplitude list for --b0".to_string())?;
                cfg.b0 = Some(list);
            }
            other => return Err(format!("unknown option `{other}`")),
        }
    }
    Ok(cfg)
}

fn parse_usize(s: &str, flag: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("{flag} needs an integer, got `{s}`"))
}

fn nearest17(x: f64) -> String {
    format!("{x:.16e}")
}

fn up(x: f64) -> String {
    format_directed(x, RoundDir::Up)
}

fn down(x: f64) -> String {
    format_directed(x, RoundDir::Down)
}

fn candidate_lines(out: &mut String, b: &CosCoeffs, format: OutputFormat) {
    match format {
        OutputFormat::Kv => {
            for k in 1..=b.m() {
                out.push_str(&format!("candidate.b.{k} = {}\n", nearest17(b.coeffs()[k - 1])));
            }
            for k in 1..=b.m() {
                out.push_str(&format!("candidate.amp.{k} = {}\n", nearest17(b.amplitude(k))));
            }
        }
        OutputFormat::Text => {
            out.push_str("candidate (weighted coordinates b_k; raw cosine amplitudes amp_k):\n");
            for k in 1..=b.m() {
                out.push_str(&format!(
                    "  k={k}  b = {:+.17e}   amp = {:+.17e}\n",
                    b.coeffs()[k - 1],
                    b.amplitude(k)
                ));
            }
        }
    }
}

fn certify_report(b: &CosCoeffs, outcome: &CertifyOutcome, format: OutputFormat) -> String {
    let mut s = String::new();
    let bounds = &outcome.bounds;
    let cert = &outcome.certificate;
    let fallback = if outcome.quad_fallback.is_empty() {
        "none".to_string()
    } else {
        outcome.quad_fallback.join(",")
    };
    match format {
        OutputFormat::Kv => {
            candidate_lines(&mut s, b, format);
            s.push_str(&format!("bounds.eta = {}\n", up(bounds.eta)));
            s.push_str(&format!("bounds.N = {}\n", up(bounds.n)));
            s.push_str(&format!("bounds.K = {}\n", up(bounds.k)));
            s.push_str(&format!("bounds.nu0 = {}\n", down(bounds.nu0)));
            s.push_str(&format!("bounds.L = {}\n", down(bounds.l)));
            s.push_str(&format!("bounds.nu = {}\n", down(bounds.nu)));
            s.push_str(&format!("bounds.r = {}\n", up(bounds.r)));
            s.push_str(&format!("certificate.status = {}\n", cert.status));
            s.push_str(&format!("certificate.t_star = {}\n", up(cert.t_star)));
            s.push_str(&format!("certificate.t_dstar = {}\n", down(cert.t_dstar)));
            s.push_str(&format!("certificate.radius_h2 = {}\n", up(cert.radius_h2)));
            s.push_str(&format!("certificate.radius_c1 = {}\n", up(cert.radius_c1)));
            s.push_str(&format!(
                "certificate.uniqueness_radius = {}\n",
                down(cert.uniqueness_radius)
            ));
            s.push_str(&format!("meta.quad_fallback = {fallback}\n"));
        }
        OutputFormat::Text => {
            candidate_lines(&mut s, b, format);
            s.push_str("certified bounds:\n");
            s.push_str(&format!("  eta  <= {}\n", up(bounds.eta)));
            s.push_str(&format!("  N    <= {}\n", up(bounds.n)));
            s.push_str(&format!("  K    <= {}\n", up(bounds.k)));
            s.push_str(&format!("  nu0  >= {}\n", down(bounds.nu0)));
            s.push_str(&format!("  L    >= {}\n", down(bounds.l)));
            s.push_str(&format!("  nu   >= {}\n", down(bounds.nu)));
            s.push_str(&format!("  r     = {} (Lipschitz ball radius)\n", up(bounds.r)));
            s.push_str("certificate:\n");
            s.push_str(&format!("  status: {}\n", cert.status));
            s.push_str(&format!("  t_star  <= {}\n", up(cert.t_star)));
            s.push_str(&format!("  t_dstar >= {}\n", down(cert.t_dstar)));
            s.push_str(&format!("  radius_h2 <= {}\n", up(cert.radius_h2)));
            s.push_str(&format!("  radius_c1 <= {}\n", up(cert.radius_c1)));
            s.push_str(&format!(
                "  uniqueness radius = {}\n",
                down(cert.uniqueness_radius)
            ));
            s.push_str(&format!("quadrature fallback: {fallback}\n"));
        }
    }
    s
}

fn solve_report(b: &CosCoeffs, residual: f64, iterations: usize, format: OutputFormat) -> String {
    let mut s = String::new();
    candidate_lines(&mut s, b, format);
    match format {
        OutputFormat::Kv => {
            s.push_str(&format!("solver.residual_inf = {}\n", up(residual)));
            s.push_str(&format!("solver.iterations = {iterations}\n"));
        }
        OutputFormat::Text => {
            s.push_str(&format!(
                "solver: converged after {iterations} iterations, residual sup {}\n",
                up(residual)
            ));
        }
    }
    s
}

fn apply_overrides(spec: &mut ProblemSpec, cfg: &RunConfig) {
    if let Some(m) = cfg.m {
        spec.m = m;
    }
    if let Some(p) = cfg.solver_panels {
        spec.solver_panels = p;
    }
    if let Some(p) = cfg.rigor_panels {
        spec.rigor.panels = p;
    }
    if let Some(s) = cfg.subdiv {
        spec.rigor.subdiv = s;
    }
    if let Some(n) = cfg.max_iter {
        spec.newton.max_iter = n;
    }
    if cfg.mode == ModeFlag::Solve {
        if let Some(b0) = &cfg.b0 {
            spec.newton.b0_amplitudes = b0.clone();
        }
    }
}

/// Runs the configured pipeline and returns the process exit code:
/// 0 success, 2 configuration error, 3 solver failure, 4 certification
/// failure, 5 internal rigor-stage error.
pub fn run(cfg: &RunConfig) -> i32 {
    let mut spec = match load_problem(&cfg.problem_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    apply_overrides(&mut spec, cfg);
    if let Err(e) = spec.validate() {
        eprintln!("error: invalid problem after overrides: {e}");
        return EXIT_CONFIG;
    }

    // candidate: supplied directly (certify-with-given-b) or from Newton
    let candidate: CosCoeffs;
    let mut solve_info: Option<(f64, usize)> = None;
    match (&cfg.mode, &cfg.b0) {
        (ModeFlag::Certify, Some(amps)) => {
            if amps.len() > spec.m {
                eprintln!(
                    "error: --b0 has {} entries but m = {}",
                    amps.len(),
                    spec.m
                );
                return EXIT_CONFIG;
            }
            let mut padded = amps.clone();
            padded.resize(spec.m, 0.0);
            candidate = CosCoeffs::from_amplitudes(&padded);
        }
        _ => match newton_trace(&spec) {
            Ok((b, history)) => {
                let final_res = *history.last().expect("history is never empty");
                solve_info = Some((final_res, history.len() - 1));
                candidate = b;
            }
            Err(e @ (SolveError::SingularJacobian | SolveError::NoConvergence { .. })) => {
                eprintln!("error: solver failed: {e}");
                return EXIT_SOLVER;
            }
            Err(e) => {
                eprintln!("error: solver failed: {e}");
                return EXIT_SOLVER;
            }
        },
    }

    if cfg.mode == ModeFlag::Solve {
        let (residual, iterations) = solve_info.expect("solve mode ran Newton");
        print!("{}", solve_report(&candidate, residual, iterations, cfg.format));
        return EXIT_OK;
    }

    match certify(&spec, &candidate) {
        Ok(outcome) => {
            print!("{}", certify_report(&candidate, &outcome, cfg.format));
            match outcome.certificate.status {
                CertStatus::Verified => EXIT_OK,
                CertStatus::Failed(reason) => {
                    eprintln!("certification failed: kantorovich: {reason}");
                    EXIT_CERTIFICATION
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RIGOR
        }
    }
}

/// Entry point used by the `certify` binary.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.iter().any(|a| a == "--help") {
        println!("{USAGE}");
        return EXIT_OK;
    }
    match parse_args(args) {
        Ok(cfg) => run(&cfg),
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!("{USAGE}");
            EXIT_CONFIG
        }
    }
}
