//! The `run`, `figure`, `lattice`, `verify` and `batch` verbs.
//!
//! Each verb writes its report to `out` and returns the process exit code;
//! errors carry their own code through [`ScenarioError::exit_code`].

use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::{Scenario, ScenarioConfig, Split, System};
use super::record::{Format, TraceRecord};
use super::verify::verify as verify_scenario;
use super::{exit, preset, ScenarioError, ScenarioResult};
use crate::evolution::LocalEvolution;
use crate::linalg::unitarity_residual;
use crate::phase::{detect_cycles, fractional_lattice, run_trace, single_qudit_trace};
use crate::state::entanglement_report;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub output: Option<PathBuf>,
    pub format: Format,
    pub steps: Option<usize>,
    pub tolerance: Option<f64>,
    pub split: Split,
}

fn io(e: std::io::Error) -> ScenarioError {
    ScenarioError::Config(format!("write failed: {e}"))
}

/// Read a scenario file; a missing path that names a preset loads the preset.
pub fn load(source: &str) -> ScenarioResult<ScenarioConfig> {
    let path = Path::new(source);
    if !path.exists() && super::preset_names().contains(&source) {
        return preset(source);
    }
    ScenarioConfig::load(path)
}

fn prepare(mut cfg: ScenarioConfig, opts: &Options) -> ScenarioResult<Scenario> {
    if let Some(steps) = opts.steps {
        cfg.grid.steps = steps;
    }
    cfg.build(opts.split)
}

fn max_residual(paths: &[&LocalEvolution], times: &[f64]) -> ScenarioResult<f64> {
    let mut worst = 0.0f64;
    for p in paths {
        for &t in times {
            worst = worst.max(unitarity_residual(&p.synthesize(t)?.0));
        }
    }
    Ok(worst)
}

/// Trace, cycles and diagnostics of a built scenario.
pub fn execute(scenario: &Scenario) -> ScenarioResult<TraceRecord> {
    let name = &scenario.config.name;
    let mut record = match &scenario.system {
        System::Pair { alpha, pair } => {
            let trace = run_trace(alpha, pair)?;
            let cycles = detect_cycles(&trace, alpha, pair, scenario.config.tolerances.cyclic)?;
            let report = entanglement_report(alpha);
            let mut r = TraceRecord::from_trace(name, &trace).with_cycles(&cycles);
            r.push_diagnostic("concurrence", vec![report.concurrence]);
            r.push_diagnostic("max_concurrence", vec![report.max_concurrence]);
            r.push_diagnostic("trace_powers", report.trace_powers.clone());
            r.push_diagnostic("det_q", vec![report.det_q]);
            r.push_diagnostic(
                "max_unitarity_residual",
                vec![max_residual(&[&pair.a, &pair.b], &trace.t)?],
            );
            r
        }
        System::Single { rho, path } => {
            let trace = single_qudit_trace(rho, path, &scenario.grid)?;
            let mut r = TraceRecord::from_trace(name, &trace);
            r.push_diagnostic("purity", vec![rho.q()]);
            r.push_diagnostic("eigenvalues", rho.eigenvalues());
            r.push_diagnostic(
                "max_unitarity_residual",
                vec![max_residual(&[path], &trace.t)?],
            );
            r
        }
    };
    record.warnings = scenario.warnings.clone();
    Ok(record)
}

fn emit(record: &TraceRecord, opts: &Options, out: &mut dyn Write) -> ScenarioResult<()> {
    match &opts.output {
        Some(path) => {
            record.write(path, opts.format)?;
            writeln!(
                out,
                "{}: {} rows, {} cycles -> {}",
                record.name,
                record.rows(),
                record.cycles.len(),
                path.display()
            )
            .map_err(io)
        }
        None => {
            let body = match opts.format {
                Format::Csv => record.to_csv(),
                Format::Json => record.to_json(),
            };
            out.write_all(body.as_bytes()).map_err(io)
        }
    }
}

fn report_warnings(scenario: &Scenario, err: &mut dyn Write) {
    for w in &scenario.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

pub fn run(
    source: &str,
    opts: &Options,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ScenarioResult<i32> {
    let scenario = prepare(load(source)?, opts)?;
    report_warnings(&scenario, err);
    emit(&execute(&scenario)?, opts, out)?;
    Ok(exit::OK)
}

/// Print a preset as TOML, or run it when an output path is given.
pub fn figure(
    name: &str,
    opts: &Options,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ScenarioResult<i32> {
    let cfg = preset(name)?;
    if opts.output.is_none() {
        out.write_all(cfg.to_toml_string().as_bytes()).map_err(io)?;
        return Ok(exit::OK);
    }
    let scenario = prepare(cfg, opts)?;
    report_warnings(&scenario, err);
    emit(&execute(&scenario)?, opts, out)?;
    Ok(exit::OK)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `2 pi m / l` as a reduced multiple of pi, e.g. `2π/3`.
pub fn pi_fraction(m: usize, l: usize) -> String {
    let (num, den) = (2 * m, l);
    if num == 0 {
        return "0".into();
    }
    let g = gcd(num, den);
    let (p, q) = (num / g, den / g);
    match (p, q) {
        (1, 1) => "π".into(),
        (p, 1) => format!("{p}π"),
        (1, q) => format!("π/{q}"),
        (p, q) => format!("{p}π/{q}"),
    }
}

pub fn lattice(d_a: usize, d_b: usize, out: &mut dyn Write) -> ScenarioResult<i32> {
    let l = fractional_lattice(d_a, d_b)?;
    let symbolic: Vec<String> = l
        .numerators
        .iter()
        .map(|&m| pi_fraction(m, l.denominator))
        .collect();
    let radians: Vec<String> = l.values.iter().map(|v| format!("{v:.12}")).collect();
    writeln!(out, "{}", symbolic.join(", ")).map_err(io)?;
    writeln!(out, "{}", radians.join(", ")).map_err(io)?;
    Ok(exit::OK)
}

pub fn verify(
    source: &str,
    opts: &Options,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ScenarioResult<i32> {
    let scenario = prepare(load(source)?, opts)?;
    report_warnings(&scenario, err);
    let tolerance = opts.tolerance.unwrap_or(scenario.config.tolerances.oracle);
    let report = verify_scenario(&scenario, tolerance)?;
    out.write_all(report.render().as_bytes()).map_err(io)?;
    Ok(report.exit_code())
}

/// Run every `*.toml` in `dir` concurrently. Records go to `opts.output`
/// (a directory, created if needed) or next to the scenarios, named after
/// each file with the chosen format's extension. Returns the largest exit
/// code.
pub fn batch(dir: &Path, opts: &Options, out: &mut dyn Write) -> ScenarioResult<i32> {
    let listing = std::fs::read_dir(dir)
        .map_err(|e| ScenarioError::Config(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = listing
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    let target = opts.output.clone().unwrap_or_else(|| dir.to_path_buf());
    std::fs::create_dir_all(&target)
        .map_err(|e| ScenarioError::Config(format!("{}: {e}", target.display())))?;
    let ext = match opts.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let results: Vec<(PathBuf, ScenarioResult<String>)> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|file| {
                let target = &target;
                s.spawn(move || {
                    let stem = file
                        .file_stem()
                        .unwrap_or_default()
                        .to_string_lossy()
                        .into_owned();
                    let job = Options {
                        output: Some(target.join(format!("{stem}.{ext}"))),
                        ..opts.clone()
                    };
                    let mut msg = Vec::new();
                    let result = ScenarioConfig::load(file)
                        .and_then(|cfg| prepare(cfg, &job))
                        .and_then(|sc| execute(&sc))
                        .and_then(|rec| emit(&rec, &job, &mut msg))
                        .map(|_| String::from_utf8_lossy(&msg).into_owned());
                    (file.clone(), result)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });
    let mut code = exit::OK;
    for (file, result) in results {
        match result {
            Ok(msg) => write!(out, "{msg}").map_err(io)?,
            Err(e) => {
                writeln!(out, "{}: {e}", file.display()).map_err(io)?;
                code = code.max(e.exit_code());
            }
        }
    }
    writeln!(out, "{} scenarios processed", files.len()).map_err(io)?;
    Ok(code)
}
