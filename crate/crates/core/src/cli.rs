//! Command-line front end. Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{c_est_series, end_separation, estimate_constant, min_window_start};
use crate::bounds::{check_all_with_grid, check_one, BoundId, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::funnel::{excess_region_bound, funnel_avoiding_half_cylinder, verify_wing_containment};
use crate::profile_ode::{graph_view, solve_bowl, solve_wing, translator_residual, SolverConfig};
use crate::report::{BoundReport, Verdict};
use crate::subsolution::{
    audit_tables, derive_polynomial, paper_coefficients, parse_rational, taylor_shift,
    verify_lemmas, Basis, RationalPolynomial,
};
use crate::sweep::{sweep_aperture_with, sweep_translate_with, ObstacleProfile, SweepSetup};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "soliton",
    version,
    about = "Translating solitons of mean curvature flow"
)]
struct Cli {
    /// Report destination (the profile CSV for `solve`); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a wing (or the bowl) and write its profile.
    Solve(SolveArgs),
    /// Check the sampled inequalities along a wing.
    Bounds(BoundsArgs),
    /// Funnel containment, excess region and cylinder avoidance.
    Funnel(FunnelArgs),
    /// Exact sign analysis of the subsolution polynomial.
    Subsol(SubsolArgs),
    /// Fit the additive constants of the ends.
    Asymfit(AsymfitArgs),
    /// Aperture or translate sweep against an obstacle polyline.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "R", required_unless_present = "bowl")]
    #[serde(rename = "R")]
    r: Option<f64>,
    #[arg(long, conflicts_with = "r")]
    bowl: bool,
    #[arg(long, default_value_t = 100.0)]
    rmax: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("which").required(true).args(["bound", "all"])))]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    r: f64,
    #[arg(long, default_value_t = 100.0)]
    rmax: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Bound identifier, e.g. PHI_ENVELOPE; repeatable.
    #[arg(long)]
    bound: Vec<String>,
    #[arg(long)]
    all: bool,
    #[arg(long = "quad-tol", default_value_t = 1e-8)]
    quad_tol: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["check_wing", "excess", "avoid_cylinder"])))]
struct FunnelArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "R0")]
    #[serde(rename = "R0")]
    r0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long = "check-wing")]
    check_wing: bool,
    #[arg(long)]
    excess: bool,
    /// Half-cylinder radius and height.
    #[arg(long = "avoid-cylinder", num_args = 2, value_names = ["RHO", "H0"], allow_negative_numbers = true)]
    avoid_cylinder: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100.0)]
    rmax: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["verify", "tables", "diff"])))]
struct SubsolArgs {
    /// Dimension, or a comma-separated list.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Exact base point such as 0, 1/2 or 2.5; comma-separated list allowed.
    #[arg(long = "Rstar", value_delimiter = ',', required = true)]
    #[serde(rename = "Rstar")]
    r_star: Vec<String>,
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    tables: bool,
    #[arg(long)]
    diff: bool,
}

#[derive(Debug, Args, Serialize)]
struct AsymfitArgs {
    #[arg(long)]
    n: usize,
    /// Aperture; 0 selects the bowl.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    r: f64,
    /// Fit window `A,B`.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    window: Vec<f64>,
    /// Integration radius; defaults to 1.2 times the window end (at least 100).
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Writes `branch,r,C_est` rows.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("family").required(true).args(["aperture", "translate"])))]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    /// Largest aperture R0.
    #[arg(long)]
    aperture: Option<f64>,
    /// Translation direction, +1 or -1.
    #[arg(long, allow_negative_numbers = true)]
    translate: Option<i32>,
    #[arg(long)]
    obstacle: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    grid: usize,
}

#[derive(Serialize)]
struct Report {
    tool_version: &'static str,
    subcommand: &'static str,
    params: Value,
    results: Vec<Value>,
    verdict: Verdict,
}

struct Outcome {
    subcommand: &'static str,
    params: Value,
    results: Vec<Value>,
    verdict: Verdict,
    /// Replaces the JSON report when the csv format is requested.
    csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("--n must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!(
            "--{name} must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn solver(tol: f64, rmax: f64) -> Result<SolverConfig> {
    check_positive("tol", tol)?;
    check_positive("rmax", rmax)?;
    let cfg = SolverConfig::default().with_tol(tol).with_r_max(rmax);
    cfg.validate()?;
    Ok(cfg)
}

fn verdict_of(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut s = String::from("check,r_lo,r_hi,grid_size,min_margin,worst_r,tolerance,verdict\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.check,
            fmt_f(r.r_range.0),
            fmt_f(r.r_range.1),
            r.grid_size,
            fmt_f(r.min_margin),
            fmt_f(r.worst_r),
            fmt_f(r.tolerance),
            if r.passed() { "pass" } else { "fail" }
        ));
    }
    s
}

fn write_file(path: &Path, data: &[u8]) -> Result<()> {
    let mut f = BufWriter::new(
        File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
    );
    f.write_all(data)?;
    f.flush()?;
    Ok(())
}

fn cmd_solve(a: &SolveArgs, format: Format, out: Option<&Path>) -> Result<(Outcome, bool)> {
    check_n(a.n)?;
    let cfg = solver(a.tol, a.rmax)?;
    let aperture = if a.bowl { 0.0 } else { a.r.unwrap_or(0.0) };
    if !(aperture >= 0.0 && aperture.is_finite()) {
        return Err(invalid(format!("--R must be >= 0, got {aperture}")));
    }
    let (curve, summary) = if aperture == 0.0 {
        let c = solve_bowl(a.n, &cfg)?;
        let s = json!({"kind": "bowl", "n": a.n, "samples": c.len(), "r_extent": c.r_extent()});
        (c, s)
    } else {
        let w = solve_wing(a.n, aperture, &cfg)?;
        let c = w.meridian();
        let s = json!({
            "kind": "wing", "n": a.n, "R": aperture, "R_star": w.r_star, "depth": w.depth,
            "samples": c.len(), "r_extent": c.r_extent(),
        });
        (c, s)
    };
    let mut summary = summary;
    summary["residual"] = json!(translator_residual(&curve)?);
    let mut buf = vec![];
    curve.write_csv(&mut buf)?;
    let csv = String::from_utf8(buf).expect("ascii csv");
    let wrote_file = if let Some(p) = out {
        write_file(p, csv.as_bytes())?;
        summary["csv"] = json!(p.display().to_string());
        true
    } else {
        false
    };
    let outcome = Outcome {
        subcommand: "solve",
        params: to_value(a),
        results: vec![summary],
        verdict: Verdict::Pass,
        csv: (format == Format::Csv && !wrote_file).then_some(csv),
    };
    Ok((outcome, wrote_file))
}

fn cmd_bounds(a: &BoundsArgs, format: Format) -> Result<Outcome> {
    check_n(a.n)?;
    check_positive("R", a.r)?;
    check_positive("quad-tol", a.quad_tol)?;
    if a.grid < 2 {
        return Err(invalid("--grid must be >= 2"));
    }
    let ids: Vec<BoundId> = a.bound.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let cfg = solver(a.tol, a.rmax)?;
    let w = solve_wing(a.n, a.r, &cfg)?;
    let reports = if a.all {
        check_all_with_grid(&w, a.rmax, a.quad_tol, a.grid)
    } else {
        ids.iter()
            .map(|&id| check_one(&w, id, a.rmax, a.quad_tol, a.grid))
            .collect()
    };
    let ok = reports.iter().all(BoundReport::passed);
    Ok(Outcome {
        subcommand: "bounds",
        params: to_value(a),
        csv: (format == Format::Csv).then(|| bounds_csv(&reports)),
        results: reports.iter().map(to_value).collect(),
        verdict: verdict_of(ok),
    })
}

fn cmd_funnel(a: &FunnelArgs) -> Result<Outcome> {
    check_n(a.n)?;
    if !(a.lambda >= 0.0 && a.lambda.is_finite()) {
        return Err(invalid(format!("--lambda must be >= 0, got {}", a.lambda)));
    }
    let need_r0 = || {
        a.r0.ok_or_else(|| invalid("--R0 is required for this mode"))
    };
    let (results, ok) = if a.check_wing {
        let r0 = need_r0()?;
        check_positive("R0", r0)?;
        let cfg = solver(a.tol, a.rmax)?;
        let w = solve_wing(a.n, r0, &cfg)?;
        let rep = verify_wing_containment(&w, a.lambda, a.rmax)?;
        let ok = rep.passed();
        (vec![to_value(&rep)], ok)
    } else if a.excess {
        let r0 = need_r0()?;
        (
            vec![to_value(&excess_region_bound(a.n, a.lambda, r0)?)],
            true,
        )
    } else {
        let v = a.avoid_cylinder.as_deref().unwrap_or_default();
        let f = funnel_avoiding_half_cylinder(a.n, v[0], v[1], a.lambda)?;
        (vec![to_value(&f)], true)
    };
    Ok(Outcome {
        subcommand: "funnel",
        params: to_value(a),
        results,
        verdict: verdict_of(ok),
        csv: None,
    })
}

fn cmd_subsol(a: &SubsolArgs) -> Result<Outcome> {
    for &n in &a.n {
        check_n(n)?;
    }
    let grid: Vec<BigRational> = a
        .r_star
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    if let Some(r) = grid
        .iter()
        .find(|r| *r < &BigRational::from_integer(0.into()))
    {
        return Err(invalid(format!("--Rstar must be >= 0, got {r}")));
    }
    let (results, ok) = if a.verify {
        let rep = verify_lemmas(&a.n, &grid)?;
        let ok = rep.all_nonpositive;
        (rep.entries.iter().map(to_value).collect(), ok)
    } else if a.tables {
        let mut out = vec![];
        for &n in &a.n {
            for r in &grid {
                let derived = derive_polynomial(n, r)?;
                let row = |basis| -> Result<Vec<String>> {
                    Ok(RationalPolynomial::new(paper_coefficients(n, r, basis)?).to_strings())
                };
                out.push(json!({
                    "n": n,
                    "R_star": r.to_string(),
                    "printed_origin": row(Basis::Origin)?,
                    "printed_centered": row(Basis::Centered)?,
                    "derived_origin": derived.to_strings(),
                    "derived_centered": taylor_shift(&derived, r).to_strings(),
                }));
            }
        }
        (out, true)
    } else {
        let mut out = vec![];
        let mut ok = true;
        for &n in &a.n {
            for r in &grid {
                let audit = audit_tables(n, r)?;
                ok &= audit.shifted_origin_vs_centered.proportional
                    && audit.centered_vs_derived.proportional
                    && audit.origin_vs_derived.proportional;
                out.push(to_value(&audit));
            }
        }
        (out, ok)
    };
    Ok(Outcome {
        subcommand: "subsol",
        params: to_value(a),
        results,
        verdict: verdict_of(ok),
        csv: None,
    })
}

fn cmd_asymfit(a: &AsymfitArgs, format: Format) -> Result<Outcome> {
    check_n(a.n)?;
    if a.window.len() != 2 {
        return Err(invalid("--window takes exactly two values A,B"));
    }
    let window = (a.window[0], a.window[1]);
    check_positive("window", window.0)?;
    if !(window.1 > window.0) {
        return Err(invalid("--window needs A < B"));
    }
    if !(a.r >= 0.0 && a.r.is_finite()) {
        return Err(invalid(format!("--R must be >= 0, got {}", a.r)));
    }
    let rmax = a.rmax.unwrap_or((1.2 * window.1).max(100.0));
    let cfg = solver(a.tol, rmax)?;
    let mut series: Vec<(&str, f64, f64)> = vec![];
    let results = if a.r == 0.0 {
        if window.0 < min_window_start(0.0) {
            return Err(Error::Fit(format!(
                "window must start at r >= {}",
                min_window_start(0.0)
            )));
        }
        let g = graph_view(&solve_bowl(a.n, &cfg)?, 0.0)?;
        let fit = estimate_constant(&g, window)?;
        series.extend(
            c_est_series(&g, window)?
                .into_iter()
                .map(|(r, c)| ("bowl", r, c)),
        );
        vec![json!({"branch": "bowl", "fit": to_value(&fit)})]
    } else {
        let w = solve_wing(a.n, a.r, &cfg)?;
        let sep = end_separation(&w, window)?;
        for (name, curve) in [("upper", &w.upper), ("lower", &w.lower)] {
            let g = graph_view(curve, 0.5 * window.0)?;
            series.extend(
                c_est_series(&g, window)?
                    .into_iter()
                    .map(|(r, c)| (name, r, c)),
            );
        }
        vec![to_value(&sep)]
    };
    let mut csv = String::from("branch,r,C_est\n");
    for (b, r, c) in &series {
        csv.push_str(&format!("{b},{},{}\n", fmt_f(*r), fmt_f(*c)));
    }
    if let Some(p) = &a.csv {
        write_file(p, csv.as_bytes())?;
    }
    Ok(Outcome {
        subcommand: "asymfit",
        params: to_value(a),
        results,
        verdict: Verdict::Pass,
        csv: (format == Format::Csv).then_some(csv),
    })
}

fn cmd_sweep(a: &SweepArgs) -> Result<Outcome> {
    check_n(a.n)?;
    check_positive("tol", a.tol)?;
    let file =
        File::open(&a.obstacle).map_err(|e| Error::Io(format!("{}: {e}", a.obstacle.display())))?;
    let obstacle = ObstacleProfile::read_csv(file)?;
    let setup = SweepSetup {
        grid: a.grid,
        ..SweepSetup::default()
    };
    let res = match (a.aperture, a.translate) {
        (Some(r0), None) => sweep_aperture_with(&obstacle, a.n, r0, a.tol, &setup),
        (None, Some(sign)) => sweep_translate_with(&obstacle, a.n, sign, a.tol, &setup),
        _ => return Err(invalid("exactly one of --aperture, --translate")),
    };
    let (results, ok) = match res {
        Ok(r) => (vec![to_value(&r)], true),
        Err(Error::Hypothesis(msg)) => (vec![json!({"hypothesis_violated": msg})], false),
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        subcommand: "sweep",
        params: to_value(a),
        results,
        verdict: verdict_of(ok),
        csv: None,
    })
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let first = text
                    .lines()
                    .find(|l| !l.trim().is_empty())
                    .unwrap_or("usage error");
                let _ = writeln!(stderr, "soliton: {}", first.trim());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "soliton: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let mut report_to = cli.out.as_deref();
    let outcome = match &cli.command {
        Command::Solve(a) => {
            let (o, wrote) = cmd_solve(a, cli.format, cli.out.as_deref())?;
            if wrote {
                report_to = None;
            }
            o
        }
        Command::Bounds(a) => cmd_bounds(a, cli.format)?,
        Command::Funnel(a) => cmd_funnel(a)?,
        Command::Subsol(a) => cmd_subsol(a)?,
        Command::Asymfit(a) => cmd_asymfit(a, cli.format)?,
        Command::Sweep(a) => cmd_sweep(a)?,
    };
    let code = if outcome.verdict.passed() { 0 } else { 1 };
    let body = match (cli.format, outcome.csv) {
        (Format::Csv, Some(csv)) => csv,
        (Format::Csv, None) if !matches!(cli.command, Command::Solve(_)) => {
            return Err(invalid(format!(
                "--format csv is not available for {}",
                outcome.subcommand
            )));
        }
        _ => {
            let report = Report {
                tool_version: TOOL_VERSION,
                subcommand: outcome.subcommand,
                params: outcome.params,
                results: outcome.results,
                verdict: outcome.verdict,
            };
            let mut s =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match report_to {
        Some(p) => write_file(p, body.as_bytes())?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(code)
}
