use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use ccsim_core::hilbert::{
    annihilator, charge_boson, charge_fermion, excitation_subspace, pauli, total_n_subspace, Level, Pauli, Subspace,
};
use ccsim_core::hspec::{lower, parse_file, render_term_list};
use ccsim_core::james::{default_resonance_tol, effective_hamiltonian, project_onto};
use ccsim_core::model::Sign;
use ccsim_core::verify::{
    check_anticommutation, check_conjugation, check_derivation, check_pulse_condition, rwa_infidelity, CheckReport,
};
use ccsim_core::{Scenario, Scheme, SpaceDescriptor};

use crate::config::{load_config, ALL_CHECKS};
use crate::error::{CliError, Status};
use crate::report::{compare_csv, float, render_checks, render_scan, write_file, ScanRow};

/// Where a command's CSV goes and what it is checked against.
#[derive(Debug, Clone, Default)]
pub struct OutputOptions {
    /// Overrides the path from the config's `[output]` section.
    pub output: Option<PathBuf>,
    pub golden: Option<PathBuf>,
    /// Rewrite the golden file instead of comparing.
    pub bless: bool,
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let n = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))
}

fn sectors_up_to(space: &SpaceDescriptor, n_max: usize) -> Result<Subspace, CliError> {
    let mut out = Subspace::new(space, Vec::new())?;
    for n in 0..=n_max {
        out = out.union(&total_n_subspace(space, &[0, 1], n)?)?;
    }
    Ok(out)
}

fn with_context(mut r: CheckReport, scenario: &Scenario) -> CheckReport {
    r.context = format!("{};{}", scenario.context(), r.context);
    r
}

/// Runs one named check. The flag is set when the numerics themselves failed.
pub fn run_check(scenario: &Scenario, name: &str) -> Result<(CheckReport, bool), CliError> {
    let fermion = matches!(scenario.scheme, Scheme::FermionTwoIon { .. });
    let report = match name {
        "anticommutation" => {
            let space = scenario.space()?;
            let c = scenario.target()?;
            let (q, sub) = if fermion {
                (charge_fermion(&space, 0, 1)?, Subspace::full(&space))
            } else {
                (charge_boson(&space, 0, 1)?, sectors_up_to(&space, scenario.cutoff)?)
            };
            with_context(check_anticommutation(&c, &q, &sub)?, scenario)
        }
        "conjugation" => {
            let space = scenario.space()?;
            let c = scenario.target()?;
            let r = if fermion {
                let low = excitation_subspace(&space, &[0, 1], 0)?.union(&excitation_subspace(&space, &[0, 1], 1)?)?;
                let (s1, s2) = (pauli(&space, 0, Pauli::Minus)?, pauli(&space, 1, Pauli::Minus)?);
                check_conjugation(&c, &s1, &s2, Sign::Plus, &low)?
            } else {
                let sub = sectors_up_to(&space, scenario.cutoff - 1)?;
                let (a, b) = (annihilator(&space, 0)?, annihilator(&space, 1)?);
                check_conjugation(&c, &a, &b, scenario.parity, &sub)?
            };
            with_context(r, scenario)
        }
        "derivation" => check_derivation(scenario)?,
        "pulse_condition" => check_pulse_condition(scenario)?,
        "rwa" => {
            let (infidelity, defect) = rwa_infidelity(scenario)?;
            let r = CheckReport::new(
                "rwa",
                infidelity,
                scenario.rwa_tolerance,
                format!("{};unitarity_defect={}", scenario.context(), float(defect)),
            );
            let failed = defect > scenario.unitarity_bound || !infidelity.is_finite();
            return Ok((r, failed));
        }
        other => return Err(CliError::Config(format!("unknown check `{other}`"))),
    };
    Ok((report, false))
}

fn emit(text: &str, opts: &OutputOptions, default_path: Option<&Path>) -> Result<Status, CliError> {
    match opts.output.as_deref().or(default_path) {
        Some(path) => write_file(path, text)?,
        None => print!("{text}"),
    }
    let Some(golden) = &opts.golden else {
        if opts.bless {
            return Err(CliError::Config("--bless needs --golden <path>".into()));
        }
        return Ok(Status::Ok);
    };
    if opts.bless {
        write_file(golden, text)?;
        log::info!("blessed {}", golden.display());
        return Ok(Status::Ok);
    }
    let expected = std::fs::read_to_string(golden)
        .map_err(|e| CliError::Config(format!("cannot read golden file {}: {e}", golden.display())))?;
    match compare_csv(text, &expected) {
        Ok(()) => Ok(Status::Ok),
        Err(diff) => {
            eprintln!("golden mismatch against {}: {diff}", golden.display());
            Ok(Status::CheckFailed)
        }
    }
}

fn run_checks(scenario: &Scenario, checks: &[String], jobs: Option<usize>) -> Result<(Vec<CheckReport>, Status), CliError> {
    let results: Vec<Result<(CheckReport, bool), CliError>> =
        pool(jobs)?.install(|| checks.par_iter().map(|c| run_check(scenario, c)).collect());
    let mut reports = Vec::with_capacity(results.len());
    let mut status = Status::Ok;
    for r in results {
        let (report, numerical) = r?;
        if numerical {
            eprintln!("numerical failure in `{}`: {}", report.name, report.context);
            status = status.combine(Status::NumericalFailure);
        } else if !report.passed {
            eprintln!("{report}");
            status = status.combine(Status::CheckFailed);
        }
        reports.push(report);
    }
    Ok((reports, status))
}

/// Builds the scenario from `config` and runs its configured checks.
pub fn cmd_run(config: &Path, jobs: Option<usize>, opts: &OutputOptions) -> Result<Status, CliError> {
    let cfg = load_config(config)?;
    let (reports, status) = run_checks(&cfg.scenario, &cfg.checks, jobs)?;
    let golden = emit(&render_checks(&reports), opts, cfg.report.as_deref())?;
    Ok(status.combine(golden))
}

/// The exact checks only: everything except the time-dependent comparison.
pub fn cmd_verify(config: &Path, jobs: Option<usize>, opts: &OutputOptions) -> Result<Status, CliError> {
    let cfg = load_config(config)?;
    if let Scheme::Custom { .. } = cfg.scenario.scheme {
        return Err(CliError::Config("verify needs a built-in scheme".into()));
    }
    let checks: Vec<String> = ALL_CHECKS.iter().filter(|c| **c != "rwa").map(|c| c.to_string()).collect();
    let (reports, status) = run_checks(&cfg.scenario, &checks, jobs)?;
    let golden = emit(&render_checks(&reports), opts, cfg.report.as_deref())?;
    Ok(status.combine(golden))
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("--grid: `{s}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Config("--grid is empty".into()));
    }
    Ok(values)
}

/// Full-versus-effective infidelity for each grid value of `param`.
pub fn cmd_scan(
    config: &Path,
    param: &str,
    grid: &[f64],
    jobs: Option<usize>,
    opts: &OutputOptions,
) -> Result<Status, CliError> {
    let cfg = load_config(config)?;
    let names = cfg.scenario.param_names();
    if !names.contains(&param) {
        return Err(CliError::Config(format!(
            "unknown --param `{param}` for scheme {} (expected one of: {})",
            cfg.scenario.scheme.name(),
            names.join(", ")
        )));
    }
    if grid.is_empty() {
        return Err(CliError::Config("--grid is empty".into()));
    }
    // resolve every point before spending time on propagation
    let scenarios = grid
        .iter()
        .map(|&v| {
            let mut s = cfg.scenario.clone();
            s.set_param(param, v)?;
            s.pulse_duration()?;
            Ok(s)
        })
        .collect::<Result<Vec<Scenario>, CliError>>()?;
    let rows: Vec<Result<ScanRow, CliError>> = pool(jobs)?.install(|| {
        grid.par_iter()
            .zip(&scenarios)
            .map(|(&v, s)| {
                let start = Instant::now();
                let (infidelity, unitarity_defect) = rwa_infidelity(s)?;
                Ok(ScanRow {
                    param_value: v,
                    infidelity,
                    unitarity_defect,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                })
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut status = Status::Ok;
    for r in &rows {
        if r.unitarity_defect > cfg.scenario.unitarity_bound || !r.infidelity.is_finite() {
            eprintln!(
                "numerical failure at {param}={}: unitarity defect {:.3e}",
                r.param_value, r.unitarity_defect
            );
            status = Status::NumericalFailure;
        }
    }
    let golden = emit(&render_scan(&rows), opts, cfg.scan_report.as_deref())?;
    Ok(status.combine(golden))
}

/// `name=g` or `name=e`.
fn parse_projection(spec: &ccsim_core::hspec::HamiltonianSpec, text: &str) -> Result<(usize, Level), CliError> {
    let bad = || CliError::Config(format!("--project expects <qubit>=g or <qubit>=e, got `{text}`"));
    let (name, level) = text.split_once('=').ok_or_else(bad)?;
    let level = match level.trim() {
        "g" => Level::Ground,
        "e" => Level::Excited,
        _ => return Err(bad()),
    };
    let q = spec
        .qubit_index(name.trim())
        .ok_or_else(|| CliError::Config(format!("--project: no qubit named `{}`", name.trim())))?;
    Ok((q, level))
}

/// Static effective Hamiltonian of an `.hspec` file, as `.hspec` text.
pub fn derive_text(path: &Path, tol: Option<f64>, project: Option<&str>) -> Result<String, CliError> {
    let spec = parse_file(path).map_err(|e| match e {
        ccsim_core::Error::Diagnostic(d) => CliError::Config(format!("{}:{d}", path.display())),
        other => CliError::from(other),
    })?;
    let list = lower(&spec).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let tol = match tol {
        Some(t) if t >= 0.0 && t.is_finite() => t,
        Some(t) => return Err(CliError::Config(format!("--tol must be non-negative, got {t}"))),
        None => default_resonance_tol(&list),
    };
    let result = effective_hamiltonian(&list, tol)?;
    let mut terms = result.static_terms;
    if let Some(p) = project {
        let (q, level) = parse_projection(&spec, p)?;
        terms = project_onto(&terms, q, level)?;
    }
    let mut text = render_term_list(&terms, &spec);
    text.push_str(&format!(
        "# dropped {} of {} products (resonance tolerance {})\n",
        result.dropped_terms.len(),
        result.product_count,
        float(tol)
    ));
    Ok(text)
}

pub fn cmd_derive(path: &Path, tol: Option<f64>, project: Option<&str>, output: Option<&Path>) -> Result<Status, CliError> {
    let text = derive_text(path, tol, project)?;
    match output {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}
