//! `convex-lines`: command-line experiments on convex lattice polygonal lines.
//!
//! Exit status: 0 on success, 1 when a check or computation fails, 2 on a
//! usage or configuration error.

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use convex_lines::calibration::{asymptotic_params, exact_calibrate, predicted_log_pnk, CalibrationTarget};
use convex_lines::count::{count_lines_k_budgeted, max_vertices_budgeted};
use convex_lines::experiments::{
    asymptotics_table, gibbs_shape_distances, jarnik_formula, jarnik_greedy, median, mixed_shape_table,
    run_jarnik, run_suite, sample_valtr, valtr_outside_regime, valtr_shape_distances, SuiteConfig,
};
use convex_lines::gibbs::{sample_omega_on, SampleRecord, SiteSet};
use convex_lines::shapes::{normalize, svg, ShapeCurve};
use convex_lines::tolerances::{CALIBRATION_RESIDUAL, DEFAULT_COUNT_BUDGET, DEFAULT_TRUNCATION};
use convex_lines::{omega_to_polyline, Error, GibbsParams64, ShapeCurve64};

#[derive(Parser, Debug)]
#[command(name = "convex-lines", version, about = "Experiments on convex lattice polygonal lines")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed of every random stream; runs are reproducible for a fixed seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Energy cutoff T of the Gibbs truncation.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNCATION)]
    trunc: f64,
    /// Number of curve samples for Hausdorff distances and drawings.
    #[arg(long, global = true, default_value_t = 1000)]
    mesh: usize,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// File of `key=value` lines; each key is a long flag name. Flags given
    /// on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Linear,
    Euclidean,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Gibbs,
    Valtr,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact numbers of convex lines to (n1, n2) by vertex count.
    Count {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = DEFAULT_COUNT_BUDGET)]
        budget: f64,
    },
    /// Maximal vertex number of a convex line to (n1, n2).
    Maxvert {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        #[arg(long, default_value_t = DEFAULT_COUNT_BUDGET)]
        budget: f64,
    },
    /// Gibbs parameters matching endpoint (n1, n2) and k vertices.
    Calibrate {
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        k: u64,
        /// Solve the exact moment equations instead of the leading-order ones.
        #[arg(long)]
        exact: bool,
    },
    /// Samples of the Gibbs measure.
    SampleGibbs {
        #[arg(long, value_enum, default_value_t = Model::Linear)]
        model: Model,
        #[arg(long, default_value_t = 0.1)]
        beta1: f64,
        /// Defaults to beta1.
        #[arg(long)]
        beta2: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        mixing: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Uniform lines to (n, n) with k edges by reordering random increments.
    SampleValtr {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Hausdorff distances of sampled lines to the parabola.
    ShapeDistance {
        #[arg(long, value_enum, default_value_t = Source::Gibbs)]
        source: Source,
        #[arg(long)]
        n: u64,
        /// Edge count for the reordering sampler.
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// c(ell) and e(ell) on a grid `a:b:step`.
    AsymptoticsTable {
        #[arg(long, default_value = "0.1:3:0.1")]
        ell_grid: String,
    },
    /// Euclidean-length model: vertex and entropy constants, circle distance.
    Jarnik {
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Also run the greedy maximal-edge construction at this length.
        #[arg(long)]
        greedy_length: Option<f64>,
    },
    /// Mixed-norm limit curves: lengths, endpoint checks, Gibbs profiles.
    MixedShapes {
        /// Comma-separated mixing parameters.
        #[arg(long, default_value = "-3,-0.5,0,1,5")]
        mixing: String,
        #[arg(long, default_value_t = 0.04)]
        beta: f64,
    },
    /// Named check suite: counting, calibration, shapes, jarnik or mixed.
    Suite { name: String },
}

/// Failure of a command, with the exit status it maps to.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::UnknownSuite(_)
            | Error::CapExceeded { .. }
            | Error::BudgetExceeded { .. }
            | Error::Divergent(_)
            | Error::SingularQuadrature(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

fn main() -> ExitCode {
    let args = match with_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

/// Appends `--key=value` for every config line whose flag is not already on
/// the command line.
fn with_config(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        p.to_string()
    } else {
        args.get(pos + 1).cloned().ok_or("--config needs a file")?
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
    let given: HashSet<String> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config {path} line {}: expected key=value", i + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("config {path} line {}: bad key", i + 1));
        }
        if !given.contains(&key) {
            args.push(format!("--{key}={}", value.trim()));
        }
    }
    Ok(args)
}

fn emit(global: &Global, text: &str) -> Result<(), Failure> {
    match &global.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn require(global: &Global, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&global.format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("format {:?} is not available for this command", global.format)))
    }
}

fn pretty(v: &serde_json::Value) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let g = &cli.global;
    if !(g.trunc > 0.0 && g.trunc.is_finite()) {
        return Err(Failure::Usage("--trunc must be positive".into()));
    }
    match &cli.command {
        Command::Count { n1, n2, kmax, budget } => {
            require(g, &[Format::Json, Format::Csv])?;
            let table = count_lines_k_budgeted(*n1, *n2, *kmax, *budget)?;
            let text = match g.format {
                Format::Csv => table.to_csv(),
                _ => table.to_json()? + "\n",
            };
            emit(g, &text)?;
        }
        Command::Maxvert { n1, n2, budget } => {
            require(g, &[Format::Json, Format::Csv])?;
            let m = max_vertices_budgeted(*n1, *n2, *budget)?;
            let text = match g.format {
                Format::Csv => format!("n1,n2,max_vertices\n{n1},{n2},{m}\n"),
                _ => pretty(&json!({ "n1": n1, "n2": n2, "max_vertices": m }))?,
            };
            emit(g, &text)?;
        }
        Command::Calibrate { n1, n2, k, exact } => {
            require(g, &[Format::Json])?;
            let target = CalibrationTarget::new(*n1, *n2, *k)?;
            if *exact {
                let r = exact_calibrate(&target, g.trunc)?;
                let p = predicted_log_pnk(&target, &r, true)?;
                let converged = !r.degraded && r.max_residual() <= CALIBRATION_RESIDUAL;
                emit(g, &pretty(&json!({ "target": target, "converged": converged, "result": r, "prediction": p }))?)?;
                return Ok(converged);
            }
            let (b1, b2, l): (f64, f64, f64) = asymptotic_params(&target)?;
            emit(g, &pretty(&json!({ "target": target, "beta1": b1, "beta2": b2, "lambda": l }))?)?;
        }
        Command::SampleGibbs { model, beta1, beta2, lambda, mixing, samples } => {
            require(g, &[Format::Json, Format::Svg])?;
            let params: GibbsParams64 = match model {
                Model::Linear => GibbsParams64::linear(*beta1, beta2.unwrap_or(*beta1), *lambda),
                Model::Euclidean => GibbsParams64::euclidean(*beta1, *lambda),
                Model::Mixed => GibbsParams64::mixed(*beta1, *mixing),
            }
            .with_truncation(g.trunc);
            let sites = SiteSet::for_params(&params)?;
            let omegas = (0..*samples as u64)
                .map(|i| sample_omega_on(&params, &sites, g.seed.wrapping_add(i)))
                .collect::<Result<Vec<_>, _>>()?;
            let text = match g.format {
                Format::Svg => {
                    let curve: ShapeCurve64 = match model {
                        Model::Linear => ShapeCurve::parabola(),
                        Model::Euclidean => ShapeCurve::Circle,
                        Model::Mixed => ShapeCurve::mixed(*mixing)?,
                    };
                    let lines = omegas
                        .iter()
                        .map(|w| {
                            let line = omega_to_polyline(w);
                            let e = line.endpoint();
                            normalize(&line, [e[0].max(1) as f64, e[1].max(1) as f64])
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    svg(&curve, &lines, g.mesh)
                }
                _ => {
                    let mut s = String::new();
                    for (i, w) in omegas.iter().enumerate() {
                        let rec = SampleRecord { seed: g.seed.wrapping_add(i as u64), params: &params, omega: w };
                        s.push_str(&rec.to_json_line()?);
                        s.push('\n');
                    }
                    s
                }
            };
            emit(g, &text)?;
        }
        Command::SampleValtr { n, k, samples } => {
            require(g, &[Format::Json, Format::Svg])?;
            if valtr_outside_regime(*n, *k) {
                eprintln!("warning: k^3 >= n ({k}^3 >= {n}); the sampler is outside its asymptotic regime");
            }
            let lines = (0..*samples as u64)
                .map(|i| sample_valtr(*n, *k, g.seed.wrapping_add(i)))
                .collect::<Result<Vec<_>, _>>()?;
            let text = match g.format {
                Format::Svg => {
                    let normalized = lines
                        .iter()
                        .map(|l| normalize(l, [*n as f64, *n as f64]))
                        .collect::<Result<Vec<_>, _>>()?;
                    svg(&ShapeCurve::parabola(), &normalized, g.mesh)
                }
                _ => {
                    let mut s = String::new();
                    for (i, l) in lines.iter().enumerate() {
                        s.push_str(&serde_json::to_string(&json!({ "seed": g.seed.wrapping_add(i as u64), "line": l }))?);
                        s.push('\n');
                    }
                    s
                }
            };
            emit(g, &text)?;
        }
        Command::ShapeDistance { source, n, k, samples } => {
            require(g, &[Format::Json, Format::Csv])?;
            let d = match source {
                Source::Gibbs => gibbs_shape_distances(*n, *samples, g.seed, g.mesh)?,
                Source::Valtr => {
                    if valtr_outside_regime(*n, *k) {
                        eprintln!("warning: k^3 >= n ({k}^3 >= {n}); the sampler is outside its asymptotic regime");
                    }
                    valtr_shape_distances(*n, *k, *samples, g.seed, g.mesh)?
                }
            };
            let text = match g.format {
                Format::Csv => {
                    let mut s = String::from("sample,distance\n");
                    for (i, x) in d.iter().enumerate() {
                        s.push_str(&format!("{i},{x:.9}\n"));
                    }
                    s
                }
                _ => pretty(&json!({
                    "source": format!("{source:?}").to_lowercase(),
                    "n": n,
                    "samples": d.len(),
                    "seed": g.seed,
                    "mesh": g.mesh,
                    "median": median(&d),
                    "max": d.iter().cloned().fold(0.0, f64::max),
                }))?,
            };
            emit(g, &text)?;
        }
        Command::AsymptoticsTable { ell_grid } => {
            require(g, &[Format::Json, Format::Csv])?;
            let grid = parse_grid(ell_grid)?;
            let rows = asymptotics_table(&grid)?;
            let text = match g.format {
                Format::Csv => {
                    let mut s = String::from("ell,c,e\n");
                    for r in &rows {
                        s.push_str(&format!("{},{:.12},{:.12}\n", r.ell, r.c_value, r.e_value));
                    }
                    s
                }
                _ => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(g, &text)?;
        }
        Command::Jarnik { beta, lambda, samples, greedy_length } => {
            require(g, &[Format::Json])?;
            let report = run_jarnik(*beta, *lambda, *samples, g.seed, g.mesh)?;
            let mut value = serde_json::to_value(&report)?;
            if let Some(l) = greedy_length {
                value["greedy"] = json!({
                    "length": l,
                    "max_edges": jarnik_greedy(*l)?,
                    "formula": jarnik_formula(*l),
                });
            }
            emit(g, &pretty(&value)?)?;
        }
        Command::MixedShapes { mixing, beta } => {
            require(g, &[Format::Json, Format::Csv, Format::Svg])?;
            let mixings = mixing
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(format!("--mixing: {e}")))?;
            let text = match g.format {
                Format::Svg => {
                    let mut s = String::new();
                    for &m in &mixings {
                        s.push_str(&svg(&ShapeCurve::mixed(m)?, &[], g.mesh));
                    }
                    s
                }
                Format::Csv => {
                    let rows = mixed_shape_table(&mixings, *beta, g.trunc, g.mesh)?;
                    let mut s = String::from("mixing,length,endpoint_error,profile_distance,beta\n");
                    for r in rows {
                        s.push_str(&format!(
                            "{},{:.12},{:.3e},{:.6e},{}\n",
                            r.mixing, r.length, r.endpoint_error, r.profile_distance, r.beta
                        ));
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&mixed_shape_table(&mixings, *beta, g.trunc, g.mesh)?)? + "\n",
            };
            emit(g, &text)?;
        }
        Command::Suite { name } => {
            require(g, &[Format::Json])?;
            let config = SuiteConfig { seed: g.seed, truncation: g.trunc, mesh: g.mesh };
            let report = run_suite(name, &config)?;
            emit(g, &(report.to_json()? + "\n"))?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

/// `a:b:step`, inclusive of `b` up to rounding.
fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--ell-grid expects a:b:step, got `{text}`"));
    let parts = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    let [a, b, step] = parts[..] else {
        return Err(bad());
    };
    if !(a > 0.0 && b >= a && step > 0.0) || !(a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(bad());
    }
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}
