//! `hcurv`: reports, identity suites, λ-scans and integral checks.
//!
//! Exit codes: 0 when every check passes, 1 when an identity fails, 2 on usage
//! or evaluation errors.

use clap::{Parser, Subcommand};
use hermitian_curvature::catalog::{self, HopfClosedForms};
use hermitian_curvature::forms::Herm11;
use hermitian_curvature::identities::{analyze, closed_form_residuals, residuals, verify, Residual};
use hermitian_curvature::integrate::{check_identity, Identity, DEFAULT_SAMPLES, DEFAULT_TOLERANCE, SCHEMA_VERSION};
use hermitian_curvature::jets::{JetMode, MetricSpec};
use hermitian_curvature::{curvature::ScalarSet, C64};
use serde::Serialize;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hcurv", version, about = "Curvature of Hermitian metrics, evaluated numerically")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Everything computed at one point, with the residual table.
    Report {
        metric: String,
        /// Comma-separated complex coordinates, e.g. `1,0` or `0.5+0.2i,-0.1i`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "analytic")]
        mode: JetMode,
        #[arg(long, conflicts_with = "table")]
        json: bool,
        #[arg(long)]
        table: bool,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The pointwise identity suite at random chart points.
    Verify {
        metric: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "analytic")]
        mode: JetMode,
    },
    /// Scalar curvatures of the Hopf family along a λ grid, as CSV.
    ScanLambda {
        n: usize,
        /// Comma-separated values, or `start:stop:count`.
        #[arg(allow_hyphen_values = true)]
        grid: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        csv: Option<String>,
    },
    /// A global integral identity by Monte Carlo.
    Integrate {
        metric: String,
        /// volume, ddbar-omega, torsion-wedge, k-gauduchon or balanced-diagnostic.
        identity: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Lists the metric catalog.
    Catalog,
}

type Failure = String;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<bool, Failure> {
    match cmd {
        Cmd::Report { metric, point, mode, json, table, tol } => {
            let spec = load(&metric, mode)?;
            let z = parse_point(&point)?;
            let report = build_report(&spec, &z, tol.unwrap_or(mode.default_tolerance()))?;
            if table && !json {
                emit(&render_table(&report))?;
            } else {
                print_json(&report)?;
            }
            Ok(report.pass)
        }
        Cmd::Verify { metric, points, seed, tol, mode } => {
            let spec = load(&metric, mode)?;
            let summary = verify(&spec, points, seed, tol.unwrap_or(mode.default_tolerance())).map_err(err)?;
            print_json(&Versioned { schema_version: SCHEMA_VERSION, body: &summary })?;
            Ok(summary.pass)
        }
        Cmd::ScanLambda { n, grid, csv } => scan_lambda(n, &grid, csv.as_deref()),
        Cmd::Integrate { metric, identity, samples, seed, k, tol } => {
            let spec = load(&metric, JetMode::Analytic)?;
            let id = Identity::parse(&identity, k).map_err(err)?;
            let report = check_identity(&spec, id, samples, seed, tol).map_err(err)?;
            print_json(&report)?;
            Ok(report.pass)
        }
        Cmd::Catalog => {
            #[derive(Serialize)]
            struct Entry {
                id: &'static str,
                description: &'static str,
            }
            let list: Vec<Entry> = catalog::entries().into_iter().map(|(id, description)| Entry { id, description }).collect();
            print_json(&list)?;
            Ok(true)
        }
    }
}

fn err(e: hermitian_curvature::Error) -> Failure {
    e.to_string()
}

fn load(id: &str, mode: JetMode) -> Result<MetricSpec, Failure> {
    Ok(catalog::parse(id).map_err(err)?.with_mode(mode))
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
    emit(&format!("{s}\n"))
}

/// Writes to stdout; a closed pipe (`hcurv … | head`) is not an error.
fn emit(s: &str) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(s.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.to_string()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Parses `a`, `a+bi`, `a-bi` or `bi`.
fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse().ok().map(|re| C64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let im_of = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, im_of(&body[k..])?)),
        None => Some(C64::new(0.0, im_of(body)?)),
    }
}

fn parse_point(s: &str) -> Result<Vec<C64>, Failure> {
    s.split(',').map(|t| parse_complex(t).ok_or_else(|| format!("cannot parse coordinate `{t}`"))).collect()
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix(h: &Herm11) -> Vec<Vec<[f64; 2]>> {
    let m = &h.0;
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

#[derive(Serialize)]
struct RicciMatrices {
    scr_ric: Vec<Vec<[f64; 2]>>,
    ric_h: Vec<Vec<[f64; 2]>>,
    lc1: Vec<Vec<[f64; 2]>>,
    lc2: Vec<Vec<[f64; 2]>>,
    chern1: Vec<Vec<[f64; 2]>>,
    chern2: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    metric: String,
    mode: JetMode,
    point: Vec<[f64; 2]>,
    ricci: RicciMatrices,
    scalars: ScalarSet,
    torsion_norm_sq: f64,
    dstar_norm_sq: f64,
    tol: f64,
    residuals: Vec<Residual>,
    pass: bool,
}

fn build_report(spec: &MetricSpec, z: &[C64], tol: f64) -> Result<Report, Failure> {
    let g = analyze(spec, z).map_err(err)?;
    let mut rows = residuals(&g, tol).map_err(err)?;
    rows.extend(closed_form_residuals(spec, &g, tol).map_err(err)?);
    let r = &g.ricci;
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        metric: spec.id(),
        mode: spec.mode,
        point: z.iter().copied().map(pair).collect(),
        ricci: RicciMatrices {
            scr_ric: matrix(&r.scr_ric),
            ric_h: matrix(&r.ric_h),
            lc1: matrix(&r.lc1),
            lc2: matrix(&r.lc2),
            chern1: matrix(&r.chern1),
            chern2: matrix(&r.chern2),
        },
        scalars: g.scalars,
        torsion_norm_sq: g.tp.norm_sq,
        dstar_norm_sq: g.dstar_norm_sq,
        tol,
        pass: rows.iter().all(|r| r.pass),
        residuals: rows,
    })
}

/// Short decimal form: rounds away representation noise below 1e-12.
fn num(x: f64) -> String {
    if x.abs() < 5e-13 {
        return "0".into();
    }
    let s = format!("{x:.12}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn complex(z: [f64; 2]) -> String {
    match (num(z[0]).as_str(), num(z[1])) {
        (re, im) if im == "0" => re.to_string(),
        ("0", im) => format!("{im}i"),
        (re, im) if im.starts_with('-') => format!("{re}{im}i"),
        (re, im) => format!("{re}+{im}i"),
    }
}

fn render_table(r: &Report) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let point: Vec<String> = r.point.iter().map(|z| complex(*z)).collect();
    let _ = writeln!(out, "metric  {}", r.metric);
    let _ = writeln!(out, "mode    {}", if r.mode == JetMode::Analytic { "analytic" } else { "numeric" });
    let _ = writeln!(out, "point   ({})", point.join(", "));
    let _ = writeln!(out, "\nscalar curvatures");
    let s = &r.scalars;
    for (name, v) in [("s", s.s), ("s_R", s.s_r), ("s_H", s.s_h), ("s_LC", s.s_lc), ("s_C", s.s_c), ("s*", s.s_star)] {
        let _ = writeln!(out, "  {name} = {}", num(v));
    }
    let _ = writeln!(out, "  |T|^2 = {}", num(r.torsion_norm_sq));
    let _ = writeln!(out, "  |d*w|^2 = {}", num(r.dstar_norm_sq));
    let _ = writeln!(out, "\nRicci forms (coefficients of i dz^i ^ dzbar^j)");
    let ric = &r.ricci;
    for (name, m) in [
        ("Ric (1,1)", &ric.scr_ric),
        ("Ric_H", &ric.ric_h),
        ("r1 (LC)", &ric.lc1),
        ("r2 (LC)", &ric.lc2),
        ("Theta1 (Chern)", &ric.chern1),
        ("Theta2 (Chern)", &ric.chern2),
    ] {
        let _ = writeln!(out, "  {name}");
        for row in m {
            let cells: Vec<String> = row.iter().map(|z| format!("{:>14}", complex(*z))).collect();
            let _ = writeln!(out, "    [{} ]", cells.join(""));
        }
    }
    let _ = writeln!(out, "\nresiduals (tol {:e})", r.tol);
    let width = r.residuals.iter().map(|x| x.name.len()).max().unwrap_or(0);
    for row in &r.residuals {
        let flag = if row.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  {:width$}  {:>10.3e}  {flag}", row.name, row.value);
    }
    let _ = writeln!(out, "\n{}", if r.pass { "all identities pass" } else { "some identities FAIL" });
    out
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || format!("cannot parse λ grid `{s}`");
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let m: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return Ok(match m {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..m).map(|k| a + (b - a) * k as f64 / (m - 1) as f64).collect(),
        });
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

#[derive(Serialize)]
struct ScanRow {
    lambda: f64,
    s: f64,
    #[serde(rename = "s_C")]
    s_c: f64,
    #[serde(rename = "s_LC")]
    s_lc: f64,
    #[serde(rename = "s_H")]
    s_h: f64,
    #[serde(rename = "s_R")]
    s_r: f64,
    torsion_norm_sq: f64,
    predicted_s: f64,
}

/// Evaluates the Hopf family at `(1, 0, …, 0)`; every scalar is constant on the manifold.
fn scan_lambda(n: usize, grid: &str, path: Option<&str>) -> Result<bool, Failure> {
    if n < 1 {
        return Err("n must be at least 1".into());
    }
    let lambdas = parse_grid(grid)?;
    if let Some(l) = lambdas.iter().find(|l| l.is_nan() || **l <= -1.0) {
        return Err(format!("λ must exceed −1, got {l}"));
    }
    let mut z = vec![C64::new(0.0, 0.0); n];
    z[0] = C64::new(1.0, 0.0);
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut ok = true;
    for &lambda in &lambdas {
        let spec = catalog::hopf_family(n, lambda).map_err(err)?;
        let g = analyze(&spec, &z).map_err(err)?;
        let s = &g.scalars;
        let predicted_s = HopfClosedForms { n, lambda }.scalar();
        ok &= (s.s - predicted_s).abs() <= 1e-8 * predicted_s.abs().max(1.0);
        rows.push(ScanRow {
            lambda,
            s: s.s,
            s_c: s.s_c,
            s_lc: s.s_lc,
            s_h: s.s_h,
            s_r: s.s_r,
            torsion_norm_sq: g.tp.norm_sq,
            predicted_s,
        });
    }
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| format!("{p}: {e}"))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_coordinates() {
        assert_eq!(parse_complex("1"), Some(C64::new(1.0, 0.0)));
        assert_eq!(parse_complex("0.5+0.25i"), Some(C64::new(0.5, 0.25)));
        assert_eq!(parse_complex("-1e-3-2i"), Some(C64::new(-1e-3, -2.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("2.5e+1i"), Some(C64::new(0.0, 25.0)));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-0.5,0,1").unwrap(), vec![-0.5, 0.0, 1.0]);
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.49999999999999994), "0.5");
        assert_eq!(num(-1e-17), "0");
        assert_eq!(complex([1.0, -2.0]), "1-2i");
    }
}
