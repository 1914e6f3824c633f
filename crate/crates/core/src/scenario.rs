//! A scheme plus the settings needed to build, evolve and check it.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::evolve::EvolveOptions;
use crate::hilbert::{excitation_subspace, make_space, total_n_subspace, Operator, SpaceDescriptor, Subspace};
use crate::james::{default_resonance_tol, effective_hamiltonian};
use crate::model::{
    boson_cavity_eff, boson_cavity_rwa, fermion_eff, fermion_interaction, ideal_c_boson, ideal_c_fermion,
    two_axis_eff, two_axis_rwa, BosonCavityParams, EffectiveForm, FermionParams, Sign, TwoAxisParams,
};
use crate::terms::TermList;

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    BosonCavity { params: BosonCavityParams, form: EffectiveForm },
    TwoAxis { params: TwoAxisParams, with_rabi: bool },
    FermionTwoIon { params: FermionParams },
    /// Hamiltonian read from an `.hspec` file; its effective form is derived.
    Custom { path: PathBuf },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::BosonCavity { .. } => "boson_cavity",
            Scheme::TwoAxis { .. } => "two_axis",
            Scheme::FermionTwoIon { .. } => "fermion_two_ion",
            Scheme::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scheme: Scheme,
    /// Fock cutoff used for every mode.
    pub cutoff: usize,
    /// Conjugation parity of the boson target.
    pub parity: Sign,
    /// Explicit pulse duration; otherwise derived from the coupling.
    pub tau: Option<f64>,
    pub tau_scale: f64,
    pub steps_per_period: usize,
    pub resonance_tol: Option<f64>,
    pub unitarity_bound: f64,
    /// Pass threshold for the full-versus-effective infidelity.
    pub rwa_tolerance: f64,
}

impl Scenario {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            cutoff: 6,
            parity: Sign::Plus,
            tau: None,
            tau_scale: 1.0,
            steps_per_period: 200,
            resonance_tol: None,
            unitarity_bound: 1e-8,
            rwa_tolerance: 1e-2,
        }
    }

    pub fn boson_cavity() -> Self {
        Self::new(Scheme::BosonCavity {
            params: BosonCavityParams::default(),
            form: EffectiveForm::Corrected,
        })
    }

    pub fn two_axis() -> Self {
        Self::new(Scheme::TwoAxis {
            params: TwoAxisParams::default(),
            with_rabi: false,
        })
    }

    pub fn fermion_two_ion() -> Self {
        Self::new(Scheme::FermionTwoIon {
            params: FermionParams::default(),
        })
    }

    fn custom_spec(&self) -> Result<Option<(crate::hspec::HamiltonianSpec, TermList)>> {
        match &self.scheme {
            Scheme::Custom { path } => {
                let spec = crate::hspec::parse_file(path)?;
                let list = crate::hspec::lower(&spec)?;
                Ok(Some((spec, list)))
            }
            _ => Ok(None),
        }
    }

    pub fn space(&self) -> Result<SpaceDescriptor> {
        let c = self.cutoff;
        match &self.scheme {
            Scheme::BosonCavity { .. } | Scheme::TwoAxis { .. } => make_space(&[c, c], 1),
            Scheme::FermionTwoIon { .. } => make_space(&[c], 2),
            Scheme::Custom { .. } => Ok(self.custom_spec()?.expect("custom").1.space().clone()),
        }
    }

    /// The oscillating Hamiltonian before adiabatic elimination.
    pub fn full_hamiltonian(&self) -> Result<TermList> {
        let space = self.space()?;
        match &self.scheme {
            Scheme::BosonCavity { params, .. } => boson_cavity_rwa(&space, params),
            Scheme::TwoAxis { params, with_rabi } => two_axis_rwa(&space, params, *with_rabi),
            Scheme::FermionTwoIon { params } => fermion_interaction(&space, params),
            Scheme::Custom { .. } => Ok(self.custom_spec()?.expect("custom").1),
        }
    }

    /// The static effective Hamiltonian from the closed-form coefficients,
    /// or derived by the second-order rule for custom schemes.
    pub fn effective_hamiltonian(&self) -> Result<TermList> {
        let space = self.space()?;
        match &self.scheme {
            Scheme::BosonCavity { params, form } => Ok(boson_cavity_eff(&space, params, *form)?.0),
            Scheme::TwoAxis { params, with_rabi } => two_axis_eff(&space, params, *with_rabi),
            Scheme::FermionTwoIon { params } => fermion_eff(&space, params),
            Scheme::Custom { .. } => {
                let full = self.full_hamiltonian()?;
                let tol = self.resonance_tol.unwrap_or_else(|| default_resonance_tol(&full));
                Ok(effective_hamiltonian(&full, tol)?.static_terms)
            }
        }
    }

    /// Duration of the charge-conjugation pulse.
    pub fn pulse_duration(&self) -> Result<f64> {
        let base = match (&self.tau, &self.scheme) {
            (Some(t), _) => *t,
            (None, Scheme::BosonCavity { params, form }) => {
                let (_, d) = boson_cavity_eff(&self.space()?, params, *form)?;
                if d.g.norm() == 0.0 {
                    return Err(Error::ZeroDenominator("beam-splitter coupling |g|"));
                }
                FRAC_PI_2 / d.g.norm()
            }
            (None, Scheme::TwoAxis { params, with_rabi }) => {
                let delta = params.common_delta()?;
                let (kx, ky) = if *with_rabi {
                    (params.omega_x_rabi.norm() * params.eta_x, params.omega_y_rabi.norm() * params.eta_y)
                } else {
                    (params.eta_x, params.eta_y)
                };
                let cross = (kx * ky / delta).abs();
                if cross == 0.0 {
                    return Err(Error::ZeroDenominator("two-axis cross coupling"));
                }
                FRAC_PI_2 / cross
            }
            (None, Scheme::FermionTwoIon { params }) => params.tau,
            (None, Scheme::Custom { .. }) => {
                return Err(Error::InvalidParameter("custom scenarios need an explicit tau".into()))
            }
        };
        Ok(base * self.tau_scale)
    }

    /// The ideal charge-conjugation operator for this scheme.
    pub fn target(&self) -> Result<Operator> {
        let space = self.space()?;
        match &self.scheme {
            Scheme::BosonCavity { .. } | Scheme::TwoAxis { .. } => ideal_c_boson(&space, 0, 1, self.parity),
            Scheme::FermionTwoIon { .. } => ideal_c_fermion(&space, 0, 1),
            Scheme::Custom { .. } => Err(Error::InvalidParameter("custom scenarios have no target operator".into())),
        }
    }

    /// Sectors on which the effective pulse is compared with the target:
    /// total-number sectors up to the cutoff with the ion in `|g>`, or the
    /// excitation sectors of the two ions with the cavity empty.
    pub fn sectors(&self) -> Result<Vec<Subspace>> {
        let space = self.space()?;
        match &self.scheme {
            Scheme::BosonCavity { .. } | Scheme::TwoAxis { .. } => {
                let ground = excitation_subspace(&space, &[0], 0)?;
                (0..=self.cutoff)
                    .map(|n| total_n_subspace(&space, &[0, 1], n)?.intersect(&ground))
                    .collect()
            }
            Scheme::FermionTwoIon { .. } => {
                let vacuum = total_n_subspace(&space, &[0], 0)?;
                (0..=2)
                    .map(|k| excitation_subspace(&space, &[0, 1], k)?.intersect(&vacuum))
                    .collect()
            }
            Scheme::Custom { .. } => Ok(vec![Subspace::full(&space)]),
        }
    }

    /// Subspace on which full and effective evolution are compared.
    pub fn comparison_subspace(&self) -> Result<Subspace> {
        let sectors = self.sectors()?;
        let mut out = Subspace::new(&self.space()?, Vec::new())?;
        for s in &sectors {
            out = out.union(s)?;
        }
        Ok(out)
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            periodic: true,
            steps_per_period: self.steps_per_period,
            unitarity_bound: self.unitarity_bound,
            ..EvolveOptions::default()
        }
    }

    /// Coupling-to-detuning ratio of the scheme.
    pub fn ratio(&self) -> Result<f64> {
        match &self.scheme {
            Scheme::BosonCavity { params, .. } => Ok(params.weak_coupling_ratio()),
            Scheme::TwoAxis { params, with_rabi } => {
                let k = if *with_rabi { params.eta_x * params.omega_x_rabi.norm() } else { params.eta_x };
                Ok(k / params.common_delta()?.abs())
            }
            Scheme::FermionTwoIon { params } => Ok(params.lambda.norm() / params.delta.abs()),
            Scheme::Custom { .. } => Err(Error::InvalidParameter("custom scenarios have no ratio".into())),
        }
    }

    /// Rescales the detuning(s) so that [`Scenario::ratio`] equals `r`,
    /// keeping the pulse area fixed.
    pub fn with_ratio(&self, r: f64) -> Result<Scenario> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("ratio must be positive, got {r}")));
        }
        let scale = self.ratio()? / r;
        let mut out = self.clone();
        match &mut out.scheme {
            Scheme::BosonCavity { params, .. } => {
                params.omega_f = params.omega0 - params.cavity_detuning() * scale;
                params.omega_l = params.omega0 - params.nu - params.laser_detuning() * scale;
            }
            Scheme::TwoAxis { params, .. } => {
                let delta = params.common_delta()? * scale;
                *params = params.clone().with_delta(delta);
            }
            Scheme::FermionTwoIon { params } => {
                params.delta *= scale;
                params.tau *= scale;
            }
            Scheme::Custom { .. } => unreachable!("ratio() rejects custom schemes"),
        }
        if let Some(t) = out.tau.as_mut() {
            *t *= scale;
        }
        Ok(out)
    }

    /// Names accepted by [`Scenario::set_param`] for this scheme.
    pub fn param_names(&self) -> &'static [&'static str] {
        match &self.scheme {
            Scheme::BosonCavity { .. } => &[
                "ratio", "tau_scale", "cutoff", "delta", "eta_l", "omega_abs", "lambda_a", "omega0", "omega_l", "omega_f",
                "nu",
            ],
            Scheme::TwoAxis { .. } => &["ratio", "tau_scale", "cutoff", "delta", "eta", "eta_x", "eta_y"],
            Scheme::FermionTwoIon { .. } => &["ratio", "tau_scale", "cutoff", "delta", "lambda", "tau"],
            Scheme::Custom { .. } => &["tau_scale", "tau"],
        }
    }

    /// Sets a named parameter. `delta` rescales the detunings with the pulse
    /// area held fixed; magnitudes keep the phase of complex couplings.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite")));
        }
        let rephase = |z: &mut num_complex::Complex64| {
            let arg = if z.norm() == 0.0 { 0.0 } else { z.arg() };
            *z = num_complex::Complex64::from_polar(value, arg);
        };
        match (name, &mut self.scheme) {
            ("ratio", _) => *self = self.with_ratio(value)?,
            ("tau_scale", _) => self.tau_scale = value,
            ("cutoff", s) if !matches!(s, Scheme::Custom { .. }) => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("cutoff must be a positive integer, got {value}")));
                }
                self.cutoff = value as usize;
            }
            ("tau", Scheme::FermionTwoIon { params }) => params.tau = value,
            ("tau", Scheme::Custom { .. }) => self.tau = Some(value),
            ("delta", Scheme::BosonCavity { params, .. }) => {
                params.omega_f = params.omega0 - value;
                params.omega_l = params.omega0 - params.nu - value;
            }
            ("eta_l", Scheme::BosonCavity { params, .. }) => params.eta_l = value,
            ("omega_abs", Scheme::BosonCavity { params, .. }) => rephase(&mut params.omega),
            ("lambda_a", Scheme::BosonCavity { params, .. }) => rephase(&mut params.lambda_a),
            ("omega0", Scheme::BosonCavity { params, .. }) => params.omega0 = value,
            ("omega_l", Scheme::BosonCavity { params, .. }) => params.omega_l = value,
            ("omega_f", Scheme::BosonCavity { params, .. }) => params.omega_f = value,
            ("nu", Scheme::BosonCavity { params, .. }) => params.nu = value,
            ("delta", Scheme::TwoAxis { params, .. }) => *params = params.clone().with_delta(value),
            ("eta", Scheme::TwoAxis { params, .. }) => {
                params.eta_x = value;
                params.eta_y = value;
            }
            ("eta_x", Scheme::TwoAxis { params, .. }) => params.eta_x = value,
            ("eta_y", Scheme::TwoAxis { params, .. }) => params.eta_y = value,
            ("delta", Scheme::FermionTwoIon { params }) => {
                if params.delta == 0.0 {
                    return Err(Error::ZeroDenominator("fermion detuning"));
                }
                params.tau *= value / params.delta;
                params.delta = value;
            }
            ("lambda", Scheme::FermionTwoIon { params }) => {
                let old = params.lambda.norm_sqr();
                rephase(&mut params.lambda);
                if params.lambda.norm_sqr() > 0.0 {
                    params.tau *= old / params.lambda.norm_sqr();
                }
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter `{name}` for scheme {} (expected one of: {})",
                    self.scheme.name(),
                    self.param_names().join(", ")
                )))
            }
        }
        Ok(())
    }

    /// One-line `key=value` snapshot for reports.
    pub fn context(&self) -> String {
        let mut parts = vec![format!("scheme={}", self.scheme.name()), format!("cutoff={}", self.cutoff)];
        if let Ok(r) = self.ratio() {
            parts.push(format!("ratio={r:.6e}"));
        }
        if let Ok(t) = self.pulse_duration() {
            parts.push(format!("tau={t:.6e}"));
        }
        parts.join(";")
    }
}
