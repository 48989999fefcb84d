//! Command-line front end. Every command prints one JSON document on
//! stdout; failures print a JSON error object on stderr.
//!
//! Exit status: 0 success, 2 invalid input, 3 numerical non-convergence,
//! 4 a property check failed.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::check::check_derivatives;
use crate::error::{Error, Result};
use crate::graph_pde::{
    bound_sandwich_holds, ellipticity_coefficients, mean_curvature_type_bound, tilted_graph_residual, GraphPoint,
    SamplerConfig, TiltedFrame,
};
use crate::gridio::{load_grid, save_grid};
use crate::metric::{MetricParams, PhiFamily};
use crate::solver::{planarity_deviation, solve_minimal_graph, Grid, GridProblem};
use crate::translation::{
    compatibility_check, lambda_mu, parse_rational, rat_string, rigidity_table, translation_residual,
    CompatibilityReport, RigidityRow, TranslationPoint,
};
use crate::volume::{bh_factor_closed, bh_factor_sweep, QuadraturePolicy, VolumeBranch, VolumeFactorRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PROPERTY: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "fm",
    version,
    about = "Minimal surfaces in the Matsumoto space: volume factors, residuals, checks and grid solves"
)]
pub struct RunConfig {
    /// Leave the timestamp out of the output so runs are byte-comparable.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Busemann–Hausdorff volume factor by quadrature, with the closed form where known.
    Volume(VolumeArgs),
    /// Minimal-graph residual at one point, optionally over a tilted plane.
    ResidualGraph(ResidualGraphArgs),
    /// λ f″ + μ g″ for a translation surface at one point.
    ResidualTranslation(ResidualTranslationArgs),
    /// Closed-form gradient and Hessian of the area integrand against dual numbers and finite differences.
    CheckDerivatives(CheckDerivativesArgs),
    /// Exact (K/L)′ table and compatibility report for translation surfaces.
    CheckTranslation(CheckTranslationArgs),
    /// Ellipticity lower bound and the sampled mean-curvature-type constant.
    Ellipticity(EllipticityArgs),
    /// Solve the minimal-graph equation on a rectangle with Dirichlet data.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct VolumeArgs {
    /// Comma-separated values of b.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub b: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// matsumoto, randers or euclidean.
    #[arg(long, default_value = "matsumoto", value_parser = parse_family)]
    pub family: PhiFamily,
    /// bh (Busemann–Hausdorff) or ht (Holmes–Thompson, not implemented).
    #[arg(long, default_value = "bh", value_parser = parse_branch)]
    pub branch: VolumeBranch,
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 16384)]
    pub max_nodes: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ResidualGraphArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub b: Vec<f64>,
    /// "f1=..,f2=..,h11=..,h12=..,h22=..".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Unit normal k of the base plane as "k1,k2,k3"; default (0,0,1).
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct ResidualTranslationArgs {
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub b: Vec<f64>,
    /// "fp=..,fpp=..,gp=..,gpp=..".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Args, Debug, Clone)]
pub struct CheckDerivativesArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4")]
    pub b: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub dual_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub fd_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CheckTranslationArgs {
    /// Comma-separated exact values of b², e.g. "0,1/100,0.04".
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub b2: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0,1/2,1,2,5,10")]
    pub p: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct EllipticityArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<f64>,
    /// Unit normal k of the base plane as "k1,k2,k3"; default (0,0,1).
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
    #[arg(long, default_value_t = 512)]
    pub t_nodes: usize,
    #[arg(long, default_value_t = 256)]
    pub angles: usize,
    /// Random (∇f, ξ) pairs for the lower-bound check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also estimate the constant with a 10× larger horizon and report the change.
    #[arg(long)]
    pub horizon_check: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub b: Vec<f64>,
    /// Nodes per side including the boundary.
    #[arg(long, default_value_t = 65)]
    pub nodes: usize,
    /// "x0,x1,y0,y1".
    #[arg(long, default_value = "-1,1,-1,1", allow_hyphen_values = true)]
    pub domain: String,
    /// affine:A,B,C (A x + B y + C) | scherk | zero | csv:PATH (grid taken from the file).
    #[arg(long, default_value = "zero", allow_hyphen_values = true)]
    pub boundary: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Write the solution as a grid CSV file (single b only).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<PhiFamily, String> {
    match s {
        "matsumoto" => Ok(PhiFamily::Matsumoto),
        "randers" => Ok(PhiFamily::Randers),
        "euclidean" => Ok(PhiFamily::Euclidean),
        _ => Err(format!("unknown family '{s}' (expected matsumoto, randers or euclidean)")),
    }
}

fn parse_branch(s: &str) -> std::result::Result<VolumeBranch, String> {
    match s {
        "bh" => Ok(VolumeBranch::BusemannHausdorff),
        "ht" => Ok(VolumeBranch::HolmesThompson),
        _ => Err(format!("unknown branch '{s}' (expected bh or ht)")),
    }
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Argument(format!("{what}: cannot parse '{t}'"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Argument(format!("{what}: expected {n} comma-separated numbers, got {}", v.len())));
    }
    Ok(v)
}

fn parse_named(s: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let mut out = vec![None; keys.len()];
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Argument(format!("expected key=value, got '{tok}'")))?;
        let slot = keys
            .iter()
            .position(|&name| name == k.trim())
            .ok_or_else(|| Error::Argument(format!("unknown key '{}' (expected {})", k.trim(), keys.join(", "))))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Argument(format!("cannot parse value in '{tok}'")))?;
        out[slot] = Some(v);
    }
    keys.iter().zip(out).map(|(k, v)| v.ok_or_else(|| Error::Argument(format!("missing key '{k}'")))).collect()
}

fn frame_from(k: &Option<String>) -> Result<TiltedFrame> {
    match k {
        None => Ok(TiltedFrame::identity()),
        Some(s) => {
            let v = parse_floats(s, 3, "k")?;
            TiltedFrame::with_k([v[0], v[1], v[2]])
        }
    }
}

fn matsumoto_bs(bs: &[f64]) -> Result<()> {
    bs.iter().try_for_each(|&b| MetricParams::matsumoto(b).map(|_| ()))
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    notes: Vec<String>,
    results: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<String>,
}

struct Outcome<T: Serialize> {
    notes: Vec<String>,
    results: T,
    summary: Option<String>,
    passed: bool,
}

impl<T: Serialize> Outcome<T> {
    fn ok(results: T) -> Self {
        Self { notes: Vec::new(), results, summary: None, passed: true }
    }
}

fn degeneration_note(bs: &[f64]) -> Vec<String> {
    if bs.contains(&0.0) {
        vec!["b = 0 is the Euclidean degeneration: F reduces to the Euclidean norm".to_string()]
    } else {
        Vec::new()
    }
}

#[derive(Serialize)]
struct VolumeRecord {
    b: f64,
    n: usize,
    family: PhiFamily,
    quadrature: f64,
    closed: Option<f64>,
    abs_diff: Option<f64>,
}

fn cmd_volume(a: &VolumeArgs) -> Result<Outcome<Vec<VolumeRecord>>> {
    let policy = QuadraturePolicy { max_nodes: a.max_nodes, rel_tol: a.rel_tol, ..Default::default() };
    let reqs: Vec<VolumeFactorRequest> =
        a.b.iter()
            .map(|&b| VolumeFactorRequest::new(MetricParams::new(b, a.family)?, a.n, policy, a.branch))
            .collect::<Result<_>>()?;
    let values = bh_factor_sweep(&reqs);
    let mut records = Vec::new();
    for (req, q) in reqs.iter().zip(values) {
        let q = q?;
        let closed = bh_factor_closed(req.params(), a.n);
        records.push(VolumeRecord {
            b: req.params().b(),
            n: a.n,
            family: a.family,
            quadrature: q,
            closed,
            abs_diff: closed.map(|c| (q - c).abs()),
        });
    }
    let mut out = Outcome::ok(records);
    out.notes = degeneration_note(&a.b);
    Ok(out)
}

#[derive(Serialize)]
struct GraphRecord {
    b: f64,
    point: GraphPoint,
    k: [f64; 3],
    residual: f64,
}

fn cmd_residual_graph(a: &ResidualGraphArgs) -> Result<Outcome<Vec<GraphRecord>>> {
    matsumoto_bs(&a.b)?;
    let v = parse_named(&a.point, &["f1", "f2", "h11", "h12", "h22"])?;
    let gp = GraphPoint::new(v[0], v[1], v[2], v[3], v[4])?;
    let frame = frame_from(&a.k)?;
    let records =
        a.b.iter()
            .map(|&b| GraphRecord { b, point: gp, k: frame.k(), residual: tilted_graph_residual(&gp, &frame, b) })
            .collect();
    let mut out = Outcome::ok(records);
    out.notes = degeneration_note(&a.b);
    Ok(out)
}

#[derive(Serialize)]
struct TranslationRecord {
    b: f64,
    point: TranslationPoint,
    lambda: f64,
    mu: f64,
    residual: f64,
}

fn cmd_residual_translation(a: &ResidualTranslationArgs) -> Result<Outcome<Vec<TranslationRecord>>> {
    matsumoto_bs(&a.b)?;
    let v = parse_named(&a.point, &["fp", "fpp", "gp", "gpp"])?;
    let tp = TranslationPoint::new(v[0], v[1], v[2], v[3]);
    let records =
        a.b.iter()
            .map(|&b| {
                let (lambda, mu) = lambda_mu(tp.r(), tp.s(), b);
                TranslationRecord { b, point: tp, lambda, mu, residual: translation_residual(&tp, b) }
            })
            .collect();
    let mut out = Outcome::ok(records);
    out.notes = degeneration_note(&a.b);
    Ok(out)
}

#[derive(Serialize)]
struct DerivativeRecord {
    #[serde(flatten)]
    report: crate::check::DerivativeCheckReport,
    seed: u64,
    dual_tol: f64,
    fd_tol: f64,
    passed: bool,
}

fn cmd_check_derivatives(a: &CheckDerivativesArgs) -> Result<Outcome<DerivativeRecord>> {
    matsumoto_bs(&a.b)?;
    if a.samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let report = check_derivatives(a.samples, &a.b, a.seed)?;
    let passed = report.passes(a.dual_tol, a.fd_tol);
    let mut out =
        Outcome::ok(DerivativeRecord { report, seed: a.seed, dual_tol: a.dual_tol, fd_tol: a.fd_tol, passed });
    out.passed = passed;
    out.notes = degeneration_note(&a.b);
    Ok(out)
}

#[derive(Serialize)]
struct TranslationCheckRecord {
    b2: String,
    rows: Vec<RigidityRow>,
    compatibility: CompatibilityReport,
    message: String,
}

fn cmd_check_translation(a: &CheckTranslationArgs) -> Result<Outcome<Vec<TranslationCheckRecord>>> {
    let b2s: Vec<BigRational> = a.b2.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
    let ps: Vec<BigRational> = a.p.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
    if let Some(p) = ps.iter().find(|p| p < &&BigRational::zero()) {
        return Err(Error::InvalidParameter(format!("p = {} is negative", rat_string(p))));
    }
    let mut records = Vec::new();
    let mut consistent = true;
    for b2 in &b2s {
        let rows = rigidity_table(b2, &ps)?;
        let compatibility = compatibility_check(b2)?;
        let all_one = rows.iter().all(|r| r.ratio_derivative == "1/1");
        let none_pm_one = rows.iter().all(|r| !r.is_plus_minus_one);
        let message = if b2.is_zero() {
            consistent &= all_one && compatibility.both_hold;
            if all_one {
                "(K/L)_p = 1 at all nodes".to_string()
            } else {
                "(K/L)_p differs from 1 at some node".to_string()
            }
        } else {
            consistent &= none_pm_one && !compatibility.both_hold;
            if none_pm_one {
                "(K/L)_p != ±1 at all nodes".to_string()
            } else {
                "(K/L)_p = ±1 at some node".to_string()
            }
        };
        records.push(TranslationCheckRecord { b2: rat_string(b2), rows, compatibility, message });
    }
    let summary = if consistent {
        "rigidity criterion satisfied only at b=0".to_string()
    } else {
        "rigidity criterion does not single out b=0 on these nodes".to_string()
    };
    let mut out = Outcome::ok(records);
    out.summary = Some(format!(
        "{}; {summary}",
        out.results.iter().map(|r| format!("b2={}: {}", r.b2, r.message)).collect::<Vec<_>>().join("; ")
    ));
    out.passed = consistent;
    Ok(out)
}

#[derive(Serialize)]
struct EllipticityRecord {
    b: f64,
    k: [f64; 3],
    sampler: SamplerConfig,
    bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_10x_horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon_relative_change: Option<f64>,
    samples: usize,
    /// min over samples of W²·a(ξ, ξ)/|ξ|²; the lower bound needs > 1.
    min_normalized_form: f64,
    lower_bound_holds: bool,
    sandwich_holds: bool,
}

/// Random gradients in [−5, 5]², random unit ξ: smallest W²·a(ξ,ξ)/|ξ|².
pub fn ellipticity_lower_bound(frame: &TiltedFrame, b: f64, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let gp = GraphPoint::slope(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xi = [ang.cos(), ang.sin()];
        let c = ellipticity_coefficients(&gp, frame, b)?;
        worst = worst.min(c.w2 * c.quadratic_form(xi));
    }
    Ok(worst)
}

fn cmd_ellipticity(a: &EllipticityArgs) -> Result<Outcome<Vec<EllipticityRecord>>> {
    matsumoto_bs(&a.b)?;
    let frame = frame_from(&a.k)?;
    let cfg = SamplerConfig { t_max: a.t_max, t_nodes: a.t_nodes, angle_nodes: a.angles, ..Default::default() };
    let mut records = Vec::new();
    let mut passed = true;
    for &b in &a.b {
        let bound = mean_curvature_type_bound(&frame, b, &cfg)?;
        let (wide, change) = if a.horizon_check {
            let wide = mean_curvature_type_bound(&frame, b, &SamplerConfig { t_max: 10.0 * a.t_max, ..cfg })?;
            let change = if bound == 0.0 { (wide - bound).abs() } else { (wide - bound).abs() / bound };
            passed &= change < 0.01;
            (Some(wide), Some(change))
        } else {
            (None, None)
        };
        let min_form = ellipticity_lower_bound(&frame, b, a.samples, a.seed)?;
        let lower_bound_holds = min_form > 1.0 || (b == 0.0 && min_form >= 1.0 - 1e-12);
        let sandwich_holds = bound_sandwich_holds(&frame, b, &cfg, bound)?;
        passed &= lower_bound_holds && sandwich_holds && bound.is_finite();
        records.push(EllipticityRecord {
            b,
            k: frame.k(),
            sampler: cfg,
            bound,
            bound_10x_horizon: wide,
            horizon_relative_change: change,
            samples: a.samples,
            min_normalized_form: min_form,
            lower_bound_holds,
            sandwich_holds,
        });
    }
    let mut out = Outcome::ok(records);
    out.passed = passed;
    out.notes = degeneration_note(&a.b);
    out.notes.push("the constant is a sampled estimate from below, not a proof".into());
    Ok(out)
}

#[derive(Serialize)]
struct SolveRecord {
    b: f64,
    grid: Grid,
    boundary: String,
    iterations: usize,
    residual_norm: f64,
    history: Vec<f64>,
    planarity_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_error_vs_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

enum Boundary {
    Affine(f64, f64, f64),
    Scherk,
    Zero,
    Csv(Grid, Vec<f64>),
}

impl Boundary {
    fn parse(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("affine:") {
            let v = parse_floats(rest, 3, "affine boundary")?;
            return Ok(Boundary::Affine(v[0], v[1], v[2]));
        }
        if let Some(path) = s.strip_prefix("csv:") {
            let (g, f) = load_grid(std::path::Path::new(path))?;
            return Ok(Boundary::Csv(g, f));
        }
        match s {
            "scherk" => Ok(Boundary::Scherk),
            "zero" => Ok(Boundary::Zero),
            _ => Err(Error::Argument(format!(
                "unknown boundary '{s}' (expected affine:A,B,C, scherk, zero or csv:PATH)"
            ))),
        }
    }

    fn exact(&self) -> Option<Box<dyn Fn(f64, f64) -> f64 + '_>> {
        match *self {
            Boundary::Affine(a, b, c) => Some(Box::new(move |x, y| a * x + b * y + c)),
            Boundary::Scherk => Some(Box::new(scherk)),
            Boundary::Zero => Some(Box::new(|_, _| 0.0)),
            Boundary::Csv(..) => None,
        }
    }
}

/// log(cos x / cos y), minimal for b = 0 on |x|, |y| < π/2.
pub fn scherk(x: f64, y: f64) -> f64 {
    (x.cos() / y.cos()).ln()
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome<Vec<SolveRecord>>> {
    matsumoto_bs(&a.b)?;
    if a.output.is_some() && a.b.len() != 1 {
        return Err(Error::Argument("--output needs exactly one value of b".into()));
    }
    let boundary = Boundary::parse(&a.boundary)?;
    let grid = match &boundary {
        Boundary::Csv(g, _) => *g,
        _ => {
            let d = parse_floats(&a.domain, 4, "domain")?;
            let n =
                a.nodes.checked_sub(2).ok_or_else(|| Error::InvalidParameter(format!("{} nodes per side", a.nodes)))?;
            Grid::new(d[0], d[1], d[2], d[3], n, n)?
        }
    };
    if matches!(boundary, Boundary::Scherk) && [grid.x0, grid.x1, grid.y0, grid.y1].iter().any(|v| v.abs() >= 1.5) {
        return Err(Error::InvalidParameter("Scherk data needs the domain inside (−1.5, 1.5)²".into()));
    }
    let mut records = Vec::new();
    for &b in &a.b {
        let problem = match &boundary {
            Boundary::Csv(_, f) => GridProblem::with_nodal_boundary(grid, b, f.clone())?,
            other => GridProblem::new(grid, b, other.exact().expect("analytic boundary"))?,
        };
        let sol = solve_minimal_graph(&problem, a.tol, a.max_iter)?;
        let max_error_vs_exact = match (&boundary, b == 0.0) {
            (Boundary::Scherk, true) | (Boundary::Affine(..) | Boundary::Zero, _) => {
                let exact = grid.sample(boundary.exact().expect("analytic boundary"));
                Some(sol.f.iter().zip(&exact).fold(0.0f64, |m, (u, v)| m.max((u - v).abs())))
            }
            _ => None,
        };
        let output = match &a.output {
            Some(path) => {
                save_grid(path, &grid, &sol.f)?;
                Some(path.display().to_string())
            }
            None => None,
        };
        records.push(SolveRecord {
            b,
            grid,
            boundary: a.boundary.clone(),
            iterations: sol.iterations,
            residual_norm: sol.residual_norm,
            planarity_deviation: planarity_deviation(&sol),
            history: sol.history,
            max_error_vs_exact,
            output,
        });
    }
    let mut out = Outcome::ok(records);
    out.notes = degeneration_note(&a.b);
    Ok(out)
}

/// Caps the global rayon pool at `FM_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("FM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn emit<T: Serialize>(
    cfg: &RunConfig,
    name: &'static str,
    res: Result<Outcome<T>>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match res {
        Ok(o) => {
            let timestamp_unix = (!cfg.no_timestamp)
                .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
            let env =
                Envelope { command: name, timestamp_unix, notes: o.notes, results: o.results, summary: o.summary };
            let text = if cfg.pretty { serde_json::to_string_pretty(&env) } else { serde_json::to_string(&env) }
                .expect("records serialize");
            if writeln!(out, "{text}").is_err() {
                return EXIT_INVALID;
            }
            if o.passed {
                EXIT_OK
            } else {
                EXIT_PROPERTY
            }
        }
        Err(e) => {
            let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INVALID };
            let history = match &e {
                Error::SolverNonConvergence { history } | Error::Stagnation { history } => Some(history.clone()),
                _ => None,
            };
            let body =
                serde_json::json!({ "command": name, "error": e.to_string(), "exit_code": code, "history": history });
            let _ = writeln!(err, "{body}");
            code
        }
    }
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    init_threads();
    match &cfg.command {
        Command::Volume(a) => emit(cfg, "volume", cmd_volume(a), out, err),
        Command::ResidualGraph(a) => emit(cfg, "residual-graph", cmd_residual_graph(a), out, err),
        Command::ResidualTranslation(a) => emit(cfg, "residual-translation", cmd_residual_translation(a), out, err),
        Command::CheckDerivatives(a) => emit(cfg, "check-derivatives", cmd_check_derivatives(a), out, err),
        Command::CheckTranslation(a) => emit(cfg, "check-translation", cmd_check_translation(a), out, err),
        Command::Ellipticity(a) => emit(cfg, "ellipticity", cmd_ellipticity(a), out, err),
        Command::Solve(a) => emit(cfg, "solve", cmd_solve(a), out, err),
    }
}
