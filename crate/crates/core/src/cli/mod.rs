//! The `plasmonic` command line: `spectrum`, `perturb`, `dn-derivative` and
//! `validate`.
//!
//! Every subcommand reads a JSON job file, writes `<command>.json` and a CSV
//! mirror into `--out`, plus a `timing.json` sidecar. Wall-clock time lives
//! only in the sidecar so that the main record is byte-identical across runs
//! of the same job.
//!
//! Exit codes: 0 pass, 1 validation failure, 2 configuration error,
//! 3 numerical error.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bem::{build_dtn, write_operator};
use crate::curve::{sample_curve, CurveParam, ShapeFn2D};
use crate::dtn_shape::{self, Side};
use crate::error::{Error, Result};
use crate::perturb;
use crate::spectrum::{np_route, solve_plasmonic, Route};
use crate::sphere::{ShField, SphereGeometry};
use crate::validate::{self, FD_STEPS};

#[derive(Debug, Parser)]
#[command(name = "plasmonic", version, about = "Plasmonic eigenvalues and their shape derivatives")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON job file; `validate` falls back to the default suite without one.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for randomised probes; overrides the job file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for assembly and step-size sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand, PartialEq, Eq)]
pub enum Command {
    /// Plasmonic spectrum of a plane curve.
    Spectrum,
    /// Eigenvalue derivatives on the ball or a plane curve.
    Perturb,
    /// Shape derivative of the DtN operator against finite differences.
    DnDerivative,
    /// The acceptance suite.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Perturb => "perturb",
            Command::DnDerivative => "dn_derivative",
            Command::Validate => "validation",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub curve: CurveParam,
    #[serde(rename = "N")]
    pub n: usize,
    pub num_eigs: usize,
    #[serde(default = "default_route")]
    pub route: Route,
    /// The curve is multiplied by this before sampling.
    #[serde(default = "one")]
    pub scale: f64,
    /// Also write `N₋`, `N₊` as binary operator dumps.
    #[serde(default)]
    pub dump_operators: bool,
}

fn default_route() -> Route {
    Route::Dtn
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub enum SphereTag {
    #[serde(rename = "sphere")]
    Sphere,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Geometry {
    Sphere(SphereTag),
    Curve(CurveParam),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    Sphere(ShField),
    Fourier(ShapeFn2D),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbTolerances {
    pub gauge: f64,
    pub compatibility: f64,
    pub routes: f64,
    pub neutral: f64,
    pub fd_slope_target: f64,
    pub fd_slope_band: f64,
    pub fd_discrepancy: f64,
}

impl Default for PerturbTolerances {
    fn default() -> Self {
        PerturbTolerances {
            gauge: 1e-10,
            compatibility: 1e-8,
            routes: 1e-8,
            neutral: 1e-8,
            fd_slope_target: 2.0,
            fd_slope_band: 0.2,
            fd_discrepancy: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    pub geometry: Geometry,
    /// Degree of the ball eigenspace.
    #[serde(default)]
    pub k: Option<usize>,
    /// Eigenpair index (ascending `ε`) on a curve.
    #[serde(default)]
    pub index: Option<usize>,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default = "default_num")]
    pub num_eigs: usize,
    pub shape: Shape,
    /// Steps of the finite-difference check on a curve.
    #[serde(default)]
    pub h_list: Vec<f64>,
    #[serde(default = "zero_e")]
    pub gauge: String,
    #[serde(default)]
    pub tolerances: PerturbTolerances,
}

fn default_n() -> usize {
    128
}

fn default_num() -> usize {
    10
}

fn zero_e() -> String {
    "zeroE".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnDerivativeConfig {
    pub curve: CurveParam,
    pub shape: ShapeFn2D,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default = "default_steps")]
    pub h_list: Vec<f64>,
    #[serde(default = "interior")]
    pub side: Side,
    #[serde(default = "min_slope")]
    pub min_central_slope: f64,
}

fn default_steps() -> Vec<f64> {
    FD_STEPS.to_vec()
}

fn interior() -> Side {
    Side::Interior
}

fn min_slope() -> f64 {
    1.8
}

/// One named pass/fail flag of a record.
#[derive(Debug, Clone, Serialize)]
pub struct Flag {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Flag {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Flag {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }
}

/// What every subcommand writes to `<command>.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub command: &'static str,
    pub version: &'static str,
    pub job: Value,
    pub outputs: Value,
    pub checks: Vec<Flag>,
    pub passed: bool,
}

struct Outcome {
    outputs: Value,
    checks: Vec<Flag>,
    csv: Vec<Vec<String>>,
    timing: Value,
}

fn read_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn spectrum(cfg: &SpectrumConfig, out: &Path) -> Result<Outcome> {
    if cfg.scale.is_nan() || cfg.scale <= 0.0 {
        return Err(Error::Config("scale must be positive".into()));
    }
    let curve = cfg.curve.scaled(cfg.scale);
    let dtn = build_dtn(&sample_curve(&curve, cfg.n)?)?;
    let spec = match cfg.route {
        Route::Dtn => solve_plasmonic(&dtn, cfg.num_eigs)?,
        Route::Np => np_route(&dtn, cfg.num_eigs)?,
    };
    if cfg.dump_operators {
        write_operator(&out.join("nminus.bin"), &dtn.nminus, &curve)?;
        write_operator(&out.join("nplus.bin"), &dtn.nplus, &curve)?;
    }
    let mut csv = vec![vec!["k".into(), "epsilon".into(), "residual".into()]];
    for (k, (e, r)) in spec.eigenvalues.iter().zip(&spec.residuals).enumerate() {
        csv.push(vec![k.to_string(), e.to_string(), r.to_string()]);
    }
    Ok(Outcome {
        outputs: json!({
            "curve": curve,
            "N": cfg.n,
            "route": cfg.route,
            "eigenvalues": spec.eigenvalues,
            "residuals": spec.residuals,
            "clustering": spec.clustering,
        }),
        checks: vec![],
        csv,
        timing: Value::Null,
    })
}

fn perturb_sphere(cfg: &PerturbConfig, a: &ShField) -> Result<Outcome> {
    let t = &cfg.tolerances;
    let k = cfg
        .k
        .ok_or_else(|| Error::Config("sphere jobs need the degree k".into()))?;
    let report = perturb::q1_matrix(k, a)?;
    let mut branches = Vec::new();
    let mut csv = vec![vec!["branch".into(), "epsilon".into(), "epsdot".into(), "epsddot".into()]];
    let (mut gauge, mut compat, mut routes, mut size) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for b in 0..report.dimension {
        let udot = perturb::solve_udot(&report, b, a)?;
        let second = perturb::epsddot(&report, b, a, &udot, SphereGeometry::UNIT);
        gauge = gauge.max(second.gauge_residual);
        compat = compat.max(udot.compatibility_residual);
        routes = routes.max((second.epsddot - second.compatibility_route).abs());
        size = size.max(report.branch_values[b].abs()).max(second.epsddot.abs());
        csv.push(vec![
            b.to_string(),
            report.epsilon.to_string(),
            report.branch_values[b].to_string(),
            second.epsddot.to_string(),
        ]);
        branches.push(json!({
            "branch": b,
            "epsilon": report.epsilon,
            "epsdot": report.branch_values[b],
            "epsddot": second.epsddot,
            "diagnostics": {
                "coefficients": report.coefficients[b],
                "compatibility_residual": udot.compatibility_residual,
                "equation_residual": udot.equation_residual,
                "gauge_residual": second.gauge_residual,
                "compatibility_route": second.compatibility_route,
                "lines": second.lines,
            },
        }));
    }
    let mut checks = vec![
        Flag::at_most("gauge independence", gauge, t.gauge),
        Flag::at_most("compatibility", compat, t.compatibility),
        Flag::at_most("second-order routes agree", routes, t.routes),
    ];
    if a.degree(0.0) == 0 {
        // a constant shift of the unit sphere is a dilation
        checks.push(Flag::at_most("dilation is neutral", size, t.neutral));
    }
    Ok(Outcome {
        outputs: json!({
            "geometry": "sphere",
            "k": k,
            "q1": report.q1,
            "q1_asymmetry": report.q1_asymmetry,
            "branches": branches,
        }),
        checks,
        csv,
        timing: Value::Null,
    })
}

fn perturb_curve_job(cfg: &PerturbConfig, curve: &CurveParam, a: &ShapeFn2D) -> Result<Outcome> {
    let t = &cfg.tolerances;
    let index = cfg.index.unwrap_or(0);
    let dtn = build_dtn(&sample_curve(curve, cfg.n)?)?;
    let spec = solve_plasmonic(&dtn, cfg.num_eigs)?;
    let epsdot = perturb::epsdot_2d(&dtn, &spec, index, a)?;
    let mut checks = vec![];
    let mut fd = Value::Null;
    if !cfg.h_list.is_empty() {
        let rep = perturb::fd_epsdot_2d(curve, cfg.n, cfg.num_eigs, index, a, &cfg.h_list)?;
        checks.push(Flag {
            name: "finite-difference slope".into(),
            passed: (rep.slope - t.fd_slope_target).abs() <= t.fd_slope_band,
            value: rep.slope,
            tolerance: t.fd_slope_band,
        });
        checks.push(Flag::at_most("Richardson discrepancy", rep.discrepancy, t.fd_discrepancy));
        fd = serde_json::to_value(rep)?;
    }
    let eps = spec.eigenvalues[index];
    Ok(Outcome {
        outputs: json!({
            "geometry": curve,
            "N": cfg.n,
            "branches": [{
                "branch": index,
                "epsilon": eps,
                "epsdot": epsdot,
                "epsddot": Value::Null,
                "diagnostics": { "fd": fd },
            }],
        }),
        checks,
        csv: vec![
            vec!["branch".into(), "epsilon".into(), "epsdot".into()],
            vec![index.to_string(), eps.to_string(), epsdot.to_string()],
        ],
        timing: Value::Null,
    })
}

fn perturb_job(cfg: &PerturbConfig) -> Result<Outcome> {
    if cfg.gauge != "zeroE" {
        return Err(Error::Config(format!("unknown gauge {:?}; only \"zeroE\"", cfg.gauge)));
    }
    match (&cfg.geometry, &cfg.shape) {
        (Geometry::Sphere(_), Shape::Sphere(a)) => perturb_sphere(cfg, a),
        (Geometry::Curve(c), Shape::Fourier(a)) => perturb_curve_job(cfg, c, a),
        (Geometry::Sphere(_), _) => Err(Error::Config("sphere jobs need a spherical-harmonic shape {L, coeffs}".into())),
        (Geometry::Curve(_), _) => Err(Error::Config("curve jobs need a Fourier shape {cos, sin}".into())),
    }
}

fn dn_derivative(cfg: &DnDerivativeConfig) -> Result<Outcome> {
    let rep = dtn_shape::fd_shape_derivative(&cfg.curve, &cfg.shape, cfg.n, &cfg.h_list, cfg.side)?;
    let mut csv = vec![vec!["h".into(), "one_sided".into(), "central".into()]];
    for i in 0..rep.h_list.len() {
        csv.push(vec![
            rep.h_list[i].to_string(),
            rep.one_sided_errors[i].to_string(),
            rep.central_errors[i].to_string(),
        ]);
    }
    let checks = vec![Flag {
        name: "central slope".into(),
        passed: rep.slopes.central >= cfg.min_central_slope,
        value: rep.slopes.central,
        tolerance: cfg.min_central_slope,
    }];
    Ok(Outcome {
        outputs: json!({
            "curve": rep.curve,
            "a": rep.a,
            "side": rep.side,
            "h_list": rep.h_list,
            "slopes": { "one_sided": finite_or_str(rep.slopes.one_sided), "central": finite_or_str(rep.slopes.central) },
            "max_errors": rep.max_errors,
        }),
        checks,
        csv,
        timing: Value::Null,
    })
}

/// JSON has no infinity; exact cases report the slope as `"inf"`.
fn finite_or_str(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn validate_job(cfg: &validate::ValidateConfig) -> Outcome {
    let results = validate::run_all(cfg);
    println!("{:<6} {:>2} {:<32} detail", "status", "id", "criterion");
    for r in &results {
        println!("{r}");
    }
    let mut csv = vec![vec!["id".into(), "name".into(), "passed".into(), "detail".into()]];
    for r in &results {
        csv.push(vec![r.id.to_string(), r.name.into(), r.passed.to_string(), r.detail.clone()]);
    }
    let timing = json!(results
        .iter()
        .map(|r| json!({"id": r.id, "seconds": r.seconds}))
        .collect::<Vec<_>>());
    Outcome {
        checks: results
            .iter()
            .map(|r| Flag {
                name: format!("{} {}", r.id, r.name),
                passed: r.passed,
                value: if r.passed { 1.0 } else { 0.0 },
                tolerance: 1.0,
            })
            .collect(),
        outputs: json!(results),
        csv,
        timing,
    }
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one invocation and returns the record that was written.
pub fn execute(cli: &Cli) -> Result<ResultRecord> {
    let start = Instant::now();
    fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", cli.out.display())))?;
    let config = cli.config.as_deref();
    let (job, outcome) = match cli.command {
        Command::Spectrum => {
            let cfg: SpectrumConfig = read_config(config)?;
            (serde_json::to_value(&cfg)?, spectrum(&cfg, &cli.out)?)
        }
        Command::Perturb => {
            let cfg: PerturbConfig = read_config(config)?;
            (serde_json::to_value(&cfg)?, perturb_job(&cfg)?)
        }
        Command::DnDerivative => {
            let cfg: DnDerivativeConfig = read_config(config)?;
            (serde_json::to_value(&cfg)?, dn_derivative(&cfg)?)
        }
        Command::Validate => {
            let mut cfg: validate::ValidateConfig = match config {
                Some(_) => read_config(config)?,
                None => validate::ValidateConfig::default(),
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            (serde_json::to_value(&cfg)?, validate_job(&cfg))
        }
    };
    let name = cli.command.name();
    let record = ResultRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        job,
        passed: outcome.checks.iter().all(|c| c.passed),
        outputs: outcome.outputs,
        checks: outcome.checks,
    };
    fs::write(
        cli.out.join(format!("{name}.json")),
        serde_json::to_string_pretty(&record)?,
    )?;
    write_csv(&cli.out.join(format!("{name}.csv")), &outcome.csv)?;
    fs::write(
        cli.out.join("timing.json"),
        serde_json::to_string_pretty(&json!({
            "command": name,
            "wall_seconds": start.elapsed().as_secs_f64(),
            "checks": outcome.timing,
        }))?,
    )?;
    Ok(record)
}

/// Exit code for an error: 2 for configuration and I/O problems, 3 for
/// numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() || matches!(e, Error::Io(_)) {
        2
    } else {
        3
    }
}

/// Entry point of the binary.
pub fn main_with(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match execute(&cli) {
        Ok(record) => {
            if cli.command != Command::Validate {
                for c in &record.checks {
                    println!("[{}] {} = {:e} (tol {:e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
                }
            }
            println!("wrote {}", cli.out.join(format!("{}.json", record.command)).display());
            if record.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
