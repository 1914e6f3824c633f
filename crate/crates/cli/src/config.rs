//! TOML scenario files.
//!
//! ```toml
//! [scenario]
//! scheme = "boson_cavity"    # boson_cavity | two_axis | fermion_two_ion | custom
//! [hilbert]
//! cutoff = 6
//! [model]
//! omega = { abs = 1e6, arg = 1.5707963267948966 }
//! corrected_detunings = true
//! [verify]
//! checks = ["pulse_condition", "rwa"]
//! ```

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use ccsim_core::model::{BosonCavityParams, EffectiveForm, FermionParams, Sign, TwoAxisParams};
use ccsim_core::{Scenario, Scheme};

use crate::error::CliError;

/// Every check `run` knows about, in report order.
pub const ALL_CHECKS: [&str; 5] = ["anticommutation", "conjugation", "derivation", "pulse_condition", "rwa"];

/// A complex number written as a plain number, `{ re, im }` or `{ abs, arg }`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Cartesian { re: f64, im: f64 },
    Polar { abs: f64, arg: f64 },
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Cartesian { re, im } => Complex64::new(re, im),
            ComplexValue::Polar { abs, arg } => Complex64::from_polar(abs, arg),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    scheme: String,
    hspec: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HilbertSection {
    cutoff: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    parity: Option<i64>,
    // boson_cavity
    omega: Option<ComplexValue>,
    eta_l: Option<f64>,
    lambda_a: Option<ComplexValue>,
    omega0: Option<f64>,
    omega_l: Option<f64>,
    omega_f: Option<f64>,
    nu: Option<f64>,
    corrected_detunings: Option<bool>,
    // two_axis
    eta_x: Option<f64>,
    eta_y: Option<f64>,
    omega_x_rabi: Option<ComplexValue>,
    omega_y_rabi: Option<ComplexValue>,
    nu_x: Option<f64>,
    nu_y: Option<f64>,
    omega_x: Option<f64>,
    omega_y: Option<f64>,
    with_rabi: Option<bool>,
    // two_axis and fermion_two_ion
    delta: Option<f64>,
    // fermion_two_ion
    lambda: Option<ComplexValue>,
    tau: Option<f64>,
}

impl ModelSection {
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! note {
            ($($f:ident),*) => { $( if self.$f.is_some() { keys.push(stringify!($f)); } )* };
        }
        note!(
            parity, omega, eta_l, lambda_a, omega0, omega_l, omega_f, nu, corrected_detunings, eta_x, eta_y,
            omega_x_rabi, omega_y_rabi, nu_x, nu_y, omega_x, omega_y, with_rabi, delta, lambda, tau
        );
        keys
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct JamesSection {
    resonance_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolveSection {
    tau: Option<f64>,
    tau_scale: Option<f64>,
    steps_per_period: Option<usize>,
    unitarity_bound: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifySection {
    checks: Option<Vec<String>>,
    rwa_tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    report: Option<PathBuf>,
    scan: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: ScenarioSection,
    #[serde(default)]
    hilbert: HilbertSection,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    james: JamesSection,
    #[serde(default)]
    evolve: EvolveSection,
    #[serde(default)]
    verify: VerifySection,
    #[serde(default)]
    output: OutputSection,
}

/// A loaded config: the scenario plus what to check and where to write.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub checks: Vec<String>,
    pub report: Option<PathBuf>,
    pub scan_report: Option<PathBuf>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn allowed_keys(scheme: &str) -> &'static [&'static str] {
    match scheme {
        "boson_cavity" => &[
            "parity", "omega", "eta_l", "lambda_a", "omega0", "omega_l", "omega_f", "nu", "corrected_detunings",
        ],
        "two_axis" => &[
            "parity", "eta_x", "eta_y", "omega_x_rabi", "omega_y_rabi", "nu_x", "nu_y", "omega_x", "omega_y",
            "omega0", "with_rabi", "delta",
        ],
        "fermion_two_ion" => &["lambda", "delta", "tau"],
        _ => &[],
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

fn build_scheme(scheme: &str, m: &ModelSection, base_dir: &Path, hspec: Option<&Path>) -> Result<Scheme, CliError> {
    Ok(match scheme {
        "boson_cavity" => {
            let d = BosonCavityParams::default();
            let params = BosonCavityParams {
                omega: m.omega.map_or(d.omega, ComplexValue::value),
                eta_l: m.eta_l.unwrap_or(d.eta_l),
                lambda_a: m.lambda_a.map_or(d.lambda_a, ComplexValue::value),
                omega0: m.omega0.unwrap_or(d.omega0),
                omega_l: m.omega_l.unwrap_or(d.omega_l),
                omega_f: m.omega_f.unwrap_or(d.omega_f),
                nu: m.nu.unwrap_or(d.nu),
            };
            let form = if m.corrected_detunings.unwrap_or(false) {
                EffectiveForm::Corrected
            } else {
                EffectiveForm::Printed
            };
            Scheme::BosonCavity { params, form }
        }
        "two_axis" => {
            let d = TwoAxisParams::default();
            let mut params = TwoAxisParams {
                eta_x: m.eta_x.unwrap_or(d.eta_x),
                eta_y: m.eta_y.unwrap_or(d.eta_y),
                omega_x_rabi: m.omega_x_rabi.map_or(d.omega_x_rabi, ComplexValue::value),
                omega_y_rabi: m.omega_y_rabi.map_or(d.omega_y_rabi, ComplexValue::value),
                nu_x: m.nu_x.unwrap_or(d.nu_x),
                nu_y: m.nu_y.unwrap_or(d.nu_y),
                omega_x: m.omega_x.unwrap_or(d.omega_x),
                omega_y: m.omega_y.unwrap_or(d.omega_y),
                omega0: m.omega0.unwrap_or(d.omega0),
            };
            if let Some(delta) = m.delta {
                if m.omega_x.is_some() || m.omega_y.is_some() {
                    return Err(bad("[model] give either delta or omega_x/omega_y, not both"));
                }
                params = params.with_delta(delta);
            } else if m.omega_x.is_none() && m.omega_y.is_none() {
                // keep the default detuning relative to the given omega0 and nu
                params = params.with_delta(d.delta_x());
            }
            Scheme::TwoAxis {
                params,
                with_rabi: m.with_rabi.unwrap_or(false),
            }
        }
        "fermion_two_ion" => {
            let d = FermionParams::default();
            let lambda = m.lambda.map_or(d.lambda, ComplexValue::value);
            let delta = m.delta.unwrap_or(d.delta);
            let tau = match m.tau {
                Some(t) => positive("[model] tau", t)?,
                None if lambda.norm_sqr() > 0.0 => FRAC_PI_2 * delta.abs() / lambda.norm_sqr(),
                None => return Err(bad("[model] lambda is zero; give tau explicitly")),
            };
            Scheme::FermionTwoIon {
                params: FermionParams { lambda, delta, tau },
            }
        }
        "custom" => {
            let path = hspec.ok_or_else(|| bad("[scenario] scheme \"custom\" needs an hspec path"))?;
            let path = base_dir.join(path);
            if !path.is_file() {
                return Err(bad(format!("hspec file {} does not exist", path.display())));
            }
            Scheme::Custom { path }
        }
        other => {
            return Err(bad(format!(
                "unknown scheme \"{other}\" (expected boson_cavity, two_axis, fermion_two_ion or custom)"
            )))
        }
    })
}

/// Parses config text; relative `hspec` paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))?;
    let scheme_name = file.scenario.scheme.as_str();
    if scheme_name != "custom" && file.scenario.hspec.is_some() {
        return Err(bad("[scenario] hspec is only used with scheme \"custom\""));
    }
    let allowed = allowed_keys(scheme_name);
    if let Some(k) = file.model.present().into_iter().find(|k| !allowed.contains(k)) {
        return Err(bad(format!("[model] key `{k}` does not apply to scheme \"{scheme_name}\"")));
    }
    let scheme = build_scheme(scheme_name, &file.model, base_dir, file.scenario.hspec.as_deref())?;
    let is_custom = matches!(scheme, Scheme::Custom { .. });

    let mut scenario = Scenario::new(scheme);
    if let Some(c) = file.hilbert.cutoff {
        if c == 0 {
            return Err(bad("[hilbert] cutoff must be at least 1"));
        }
        scenario.cutoff = c;
    }
    if let Some(p) = file.model.parity {
        scenario.parity = Sign::from_value(p as f64).map_err(|e| bad(format!("[model] parity: {e}")))?;
    }
    if let Some(t) = file.evolve.tau {
        scenario.tau = Some(positive("[evolve] tau", t)?);
    }
    if let Some(s) = file.evolve.tau_scale {
        scenario.tau_scale = positive("[evolve] tau_scale", s)?;
    }
    if let Some(n) = file.evolve.steps_per_period {
        if n == 0 {
            return Err(bad("[evolve] steps_per_period must be at least 1"));
        }
        scenario.steps_per_period = n;
    }
    if let Some(b) = file.evolve.unitarity_bound {
        scenario.unitarity_bound = positive("[evolve] unitarity_bound", b)?;
    }
    if let Some(t) = file.james.resonance_tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(bad(format!("[james] resonance_tol must be non-negative, got {t}")));
        }
        scenario.resonance_tol = Some(t);
    }
    if let Some(t) = file.verify.rwa_tolerance {
        scenario.rwa_tolerance = positive("[verify] rwa_tolerance", t)?;
    }
    if is_custom && scenario.tau.is_none() {
        return Err(bad("[evolve] tau is required for custom scenarios"));
    }

    let checks = match file.verify.checks {
        Some(list) => {
            if let Some(c) = list.iter().find(|c| !ALL_CHECKS.contains(&c.as_str())) {
                return Err(bad(format!("[verify] unknown check `{c}` (expected one of: {})", ALL_CHECKS.join(", "))));
            }
            // report order is fixed, duplicates collapse
            ALL_CHECKS.iter().filter(|c| list.iter().any(|x| x == *c)).map(|c| c.to_string()).collect()
        }
        None if is_custom => vec!["rwa".to_string()],
        None => ALL_CHECKS.iter().map(|c| c.to_string()).collect(),
    };
    if is_custom {
        if let Some(c) = checks.iter().find(|c| c.as_str() != "rwa") {
            return Err(bad(format!("check `{c}` needs a built-in scheme; custom scenarios support only `rwa`")));
        }
    }

    Ok(RunConfig {
        scenario,
        checks,
        report: file.output.report,
        scan_report: file.output.scan,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        parse_config(text, Path::new("."))
    }

    #[test]
    fn complex_forms() {
        let c = parse(
            "[scenario]\nscheme = \"boson_cavity\"\n[model]\nomega = { re = 0.0, im = 2.0 }\nlambda_a = { abs = 3.0, arg = 0.0 }\n",
        )
        .unwrap();
        let Scheme::BosonCavity { params, form } = &c.scenario.scheme else { panic!() };
        assert_eq!(params.omega, Complex64::new(0.0, 2.0));
        assert_eq!(params.lambda_a, Complex64::new(3.0, 0.0));
        assert_eq!(*form, EffectiveForm::Printed);
        let c = parse("[scenario]\nscheme = \"fermion_two_ion\"\n[model]\nlambda = 2\ndelta = 8.0\n").unwrap();
        let Scheme::FermionTwoIon { params } = &c.scenario.scheme else { panic!() };
        assert_eq!(params.lambda, Complex64::new(2.0, 0.0));
        assert!((params.tau - FRAC_PI_2 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn config_errors() {
        assert!(parse("[scenario]\nscheme = \"nope\"\n").is_err());
        assert!(parse("[scenario]\nscheme = \"two_axis\"\n[model]\nlambda = 1.0\n").is_err());
        assert!(parse("[scenario]\nscheme = \"two_axis\"\n[hilbert]\ncutof = 3\n").is_err());
        assert!(parse("[scenario]\nscheme = \"two_axis\"\n[verify]\nchecks = [\"bogus\"]\n").is_err());
        assert!(parse("[scenario]\nscheme = \"two_axis\"\n[model]\nparity = 2\n").is_err());
        assert!(parse("[scenario]\nscheme = \"custom\"\nhspec = \"missing.hspec\"\n[evolve]\ntau = 1.0\n").is_err());
    }

    #[test]
    fn checks_are_ordered_and_defaulted() {
        let c = parse("[scenario]\nscheme = \"two_axis\"\n[verify]\nchecks = [\"rwa\", \"conjugation\", \"rwa\"]\n").unwrap();
        assert_eq!(c.checks, vec!["conjugation", "rwa"]);
        let c = parse("[scenario]\nscheme = \"two_axis\"\n[model]\ndelta = 2.0\n").unwrap();
        assert_eq!(c.checks.len(), ALL_CHECKS.len());
        let Scheme::TwoAxis { params, .. } = &c.scenario.scheme else { panic!() };
        assert_eq!(params.common_delta().unwrap(), 2.0);
    }
}
