//! Builders for the three charge-conjugation schemes and their targets.
//!
//! Layout conventions: for the boson schemes mode 0 is `a` (cavity or x axis),
//! mode 1 is `b` (vibration or y axis) and qubit 0 is the ion. The fermion
//! scheme uses mode 0 for the cavity and qubits 0 and 1 for the two ions.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    excitation_subspace, pauli, total_n_subspace, Operator, Pauli, SpaceDescriptor, ONE, ZERO,
};
use crate::linalg::sector_exponential;
use crate::terms::{Factor, Ladder, OpProduct, TermList};

/// A sign choice, used both for the conjugation parity `p` and for the
/// sign pair of the engineered fermion operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Sign> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {v}")))
        }
    }
}

/// Which coefficient formulas to use for the cavity scheme's effective form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EffectiveForm {
    /// Denominators `(w0 - nu)` and `(wl - w0)` as printed.
    #[default]
    Printed,
    /// Denominators taken from the RWA exponents, `(w0 - wf)` and
    /// `(w0 - wl - nu)`, with the signs of the second-order rule.
    Corrected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BosonCavityParams {
    /// Laser Rabi coupling `Omega`.
    pub omega: Complex64,
    pub eta_l: f64,
    /// Cavity coupling `lambda`.
    pub lambda_a: Complex64,
    pub omega0: f64,
    pub omega_l: f64,
    pub omega_f: f64,
    pub nu: f64,
}

impl Default for BosonCavityParams {
    /// `lambda = 1e5`, `eta = 0.1`, `|Omega| = 1e6` at phase pi/2 and both
    /// detunings `1e7`, so the corrected coupling `g` is real.
    fn default() -> Self {
        let omega0 = 1.0e10;
        let nu = 1.0e6;
        let detuning = 1.0e7;
        Self {
            omega: Complex64::new(0.0, 1.0e6),
            eta_l: 0.1,
            lambda_a: Complex64::new(1.0e5, 0.0),
            omega0,
            omega_l: omega0 - nu - detuning,
            omega_f: omega0 - detuning,
            nu,
        }
    }
}

impl BosonCavityParams {
    /// `w0 - wl - nu`, the exponent of the laser sideband term.
    pub fn laser_detuning(&self) -> f64 {
        self.omega0 - self.omega_l - self.nu
    }

    /// `w0 - wf`, the exponent of the cavity term.
    pub fn cavity_detuning(&self) -> f64 {
        self.omega0 - self.omega_f
    }

    pub fn weak_coupling_ratio(&self) -> f64 {
        let coupling = (self.eta_l * self.omega.norm()).max(self.lambda_a.norm());
        let detuning = self.laser_detuning().abs().min(self.cavity_detuning().abs());
        coupling / detuning
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BosonCavityEff {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoAxisParams {
    pub eta_x: f64,
    pub eta_y: f64,
    pub omega_x_rabi: Complex64,
    pub omega_y_rabi: Complex64,
    pub nu_x: f64,
    pub nu_y: f64,
    /// Laser angular frequencies.
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega0: f64,
}

impl Default for TwoAxisParams {
    /// `eta = 0.1` on both axes and `delta = 1e4`.
    fn default() -> Self {
        let omega0 = 1.0e10;
        let nu = 1.0e6;
        let delta = 1.0e4;
        Self {
            eta_x: 0.1,
            eta_y: 0.1,
            omega_x_rabi: ONE,
            omega_y_rabi: ONE,
            nu_x: nu,
            nu_y: nu,
            omega_x: omega0 - nu + delta,
            omega_y: omega0 - nu + delta,
            omega0,
        }
    }
}

impl TwoAxisParams {
    pub fn delta_x(&self) -> f64 {
        self.omega_x - self.omega0 + self.nu_x
    }

    pub fn delta_y(&self) -> f64 {
        self.omega_y - self.omega0 + self.nu_y
    }

    /// Sets both laser frequencies so that `delta_x = delta_y = delta`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.omega_x = self.omega0 - self.nu_x + delta;
        self.omega_y = self.omega0 - self.nu_y + delta;
        self
    }

    fn couplings(&self, with_rabi: bool) -> (Complex64, Complex64) {
        if with_rabi {
            (self.omega_x_rabi * self.eta_x, self.omega_y_rabi * self.eta_y)
        } else {
            (Complex64::new(self.eta_x, 0.0), Complex64::new(self.eta_y, 0.0))
        }
    }

    /// The common detuning, or an error if the axes differ or it vanishes.
    pub fn common_delta(&self) -> Result<f64> {
        let (dx, dy) = (self.delta_x(), self.delta_y());
        if (dx - dy).abs() > 1e-12 * dx.abs().max(dy.abs()) {
            return Err(Error::UnequalDetunings(dx, dy));
        }
        if dx == 0.0 {
            return Err(Error::ZeroDenominator("two-axis detuning"));
        }
        Ok(dx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionParams {
    pub lambda: Complex64,
    /// `w0 - wa`.
    pub delta: f64,
    pub tau: f64,
}

impl Default for FermionParams {
    /// `lambda = 1e5`, `delta = 1e7`, and `tau` giving `(lambda^2/delta) tau = pi/2`.
    fn default() -> Self {
        let lambda: f64 = 1.0e5;
        let delta = 1.0e7;
        Self {
            lambda: Complex64::new(lambda, 0.0),
            delta,
            tau: FRAC_PI_2 * delta / (lambda * lambda),
        }
    }
}

impl FermionParams {
    /// `|lambda|^2 / delta`.
    pub fn coupling(&self) -> Result<f64> {
        if self.delta == 0.0 {
            return Err(Error::ZeroDenominator("fermion detuning"));
        }
        Ok(self.lambda.norm_sqr() / self.delta)
    }
}

fn product(factors: &[Factor]) -> OpProduct {
    let (s, p) = OpProduct::from_factors(factors);
    debug_assert_eq!(s, 1.0);
    p
}

fn mode(m: usize, l: Ladder) -> Factor {
    Factor::Mode(m, l)
}

fn qubit(q: usize, p: Pauli) -> Factor {
    Factor::Qubit(q, p)
}

fn require_shape(space: &SpaceDescriptor, modes: usize, qubits: usize) -> Result<()> {
    if space.mode_count() < modes || space.qubit_count() < qubits {
        return Err(Error::ShapeMismatch {
            expected: format!("at least {modes} mode(s) and {qubits} qubit(s)"),
            found: space.to_string(),
        });
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Cavity scheme after the RWA: laser sideband on `b`, cavity coupling on `a`.
pub fn boson_cavity_rwa(space: &SpaceDescriptor, params: &BosonCavityParams) -> Result<TermList> {
    require_shape(space, 2, 1)?;
    let r = params.weak_coupling_ratio();
    if r > 0.1 {
        log::warn!("weak-coupling ratio {r:.3e} exceeds 0.1");
    }
    let mut h = TermList::new(space);
    h.push_with_conjugate(
        product(&[mode(1, Ladder::Lower), qubit(0, Pauli::Plus)]),
        Complex64::i() * params.omega * params.eta_l,
        params.laser_detuning(),
    )?;
    h.push_with_conjugate(
        product(&[mode(0, Ladder::Lower), qubit(0, Pauli::Plus)]),
        params.lambda_a,
        params.cavity_detuning(),
    )?;
    Ok(h)
}

/// Static `w_a a^dag a + w_b b^dag b + g a^dag b + g^* b^dag a`.
pub fn effective_beamsplitter(
    space: &SpaceDescriptor,
    omega_a: f64,
    omega_b: f64,
    g: Complex64,
) -> Result<TermList> {
    require_shape(space, 2, 0)?;
    let mut h = TermList::new(space);
    if omega_a != 0.0 {
        h.push_product(product(&[mode(0, Ladder::Raise), mode(0, Ladder::Lower)]), real(omega_a), 0.0)?;
    }
    if omega_b != 0.0 {
        h.push_product(product(&[mode(1, Ladder::Raise), mode(1, Ladder::Lower)]), real(omega_b), 0.0)?;
    }
    if g != ZERO {
        h.push_with_conjugate(product(&[mode(0, Ladder::Raise), mode(1, Ladder::Lower)]), g, 0.0)?;
    }
    Ok(h)
}

/// Effective cavity-scheme Hamiltonian on the qubit ground state.
pub fn boson_cavity_eff(
    space: &SpaceDescriptor,
    params: &BosonCavityParams,
    form: EffectiveForm,
) -> Result<(TermList, BosonCavityEff)> {
    let lam2 = params.lambda_a.norm_sqr();
    let drive2 = params.eta_l * params.eta_l * params.omega.norm_sqr();
    let coupling = Complex64::i() * params.omega * params.eta_l * params.lambda_a.conj();
    let derived = match form {
        EffectiveForm::Printed => {
            let d_a = params.omega0 - params.nu;
            let d_b = params.omega_l - params.omega0;
            if d_a == 0.0 {
                return Err(Error::ZeroDenominator("w0 - nu"));
            }
            if d_b == 0.0 {
                return Err(Error::ZeroDenominator("wl - w0"));
            }
            BosonCavityEff {
                omega_a: lam2 / d_a,
                omega_b: drive2 / d_b,
                g: coupling / d_a,
            }
        }
        EffectiveForm::Corrected => {
            let d_a = params.cavity_detuning();
            let d_b = params.laser_detuning();
            if d_a == 0.0 {
                return Err(Error::ZeroDenominator("w0 - wf"));
            }
            if d_b == 0.0 {
                return Err(Error::ZeroDenominator("w0 - wl - nu"));
            }
            let g = if coupling == ZERO {
                ZERO
            } else if (d_a - d_b).abs() > 1e-12 * d_a.abs().max(d_b.abs()) {
                return Err(Error::UnequalDetunings(d_a, d_b));
            } else {
                -coupling / d_a
            };
            BosonCavityEff {
                omega_a: -lam2 / d_a,
                omega_b: -drive2 / d_b,
                g,
            }
        }
    };
    let h = effective_beamsplitter(space, derived.omega_a, derived.omega_b, derived.g)?;
    Ok((h, derived))
}

/// `g a^dag b + g^* b^dag a`.
pub fn boson_beamsplitter(space: &SpaceDescriptor, g: Complex64) -> Result<TermList> {
    require_shape(space, 2, 0)?;
    let mut h = TermList::new(space);
    h.push_with_conjugate(product(&[mode(0, Ladder::Raise), mode(1, Ladder::Lower)]), g, 0.0)?;
    Ok(h)
}

/// Two-axis red-sideband couplings after the RWA. Zero couplings are omitted.
pub fn two_axis_rwa(space: &SpaceDescriptor, params: &TwoAxisParams, with_rabi: bool) -> Result<TermList> {
    require_shape(space, 2, 1)?;
    let (kx, ky) = params.couplings(with_rabi);
    let mut h = TermList::new(space);
    for (m, k, delta) in [(0, kx, params.delta_x()), (1, ky, params.delta_y())] {
        if k == ZERO {
            continue;
        }
        h.push_with_conjugate(
            product(&[mode(m, Ladder::Lower), qubit(0, Pauli::Plus)]),
            -Complex64::i() * k,
            -delta,
        )?;
    }
    Ok(h)
}

/// Two-axis effective beam splitter for equal detunings.
pub fn two_axis_eff(space: &SpaceDescriptor, params: &TwoAxisParams, with_rabi: bool) -> Result<TermList> {
    require_shape(space, 2, 0)?;
    let delta = params.common_delta()?;
    let (kx, ky) = params.couplings(with_rabi);
    effective_beamsplitter(
        space,
        kx.norm_sqr() / delta,
        ky.norm_sqr() / delta,
        kx.conj() * ky / delta,
    )
}

/// Two identical ions coupled to one cavity mode.
pub fn fermion_interaction(space: &SpaceDescriptor, params: &FermionParams) -> Result<TermList> {
    require_shape(space, 1, 2)?;
    let mut h = TermList::new(space);
    for q in 0..2 {
        h.push_with_conjugate(
            product(&[mode(0, Ladder::Lower), qubit(q, Pauli::Plus)]),
            params.lambda,
            params.delta,
        )?;
    }
    Ok(h)
}

/// Dispersive two-ion Hamiltonian with the cavity-number shift.
pub fn fermion_eff(space: &SpaceDescriptor, params: &FermionParams) -> Result<TermList> {
    require_shape(space, 1, 2)?;
    let k = real(params.coupling()?);
    let mut h = TermList::new(space);
    for q in 0..2 {
        h.push_product(product(&[qubit(q, Pauli::Plus), qubit(q, Pauli::Minus)]), k, 0.0)?;
    }
    for q in 0..2 {
        h.push_product(
            product(&[mode(0, Ladder::Raise), mode(0, Ladder::Lower), qubit(q, Pauli::Z)]),
            k,
            0.0,
        )?;
    }
    h.push_with_conjugate(product(&[qubit(0, Pauli::Plus), qubit(1, Pauli::Minus)]), k, 0.0)?;
    Ok(h)
}

fn distinct(kind: &'static str, i: usize, j: usize) -> Result<()> {
    if i == j {
        Err(Error::DuplicateIndex { kind, index: i })
    } else {
        Ok(())
    }
}

/// `exp[-(i pi/2)(a^dag b + b^dag a - p(a^dag a + b^dag b))]`, exponentiated
/// one total-number sector at a time.
pub fn ideal_c_boson(space: &SpaceDescriptor, mode_a: usize, mode_b: usize, p: Sign) -> Result<Operator> {
    distinct("mode", mode_a, mode_b)?;
    let (ca, cb) = (space.cutoff(mode_a)?, space.cutoff(mode_b)?);
    if ca != cb {
        return Err(Error::UnequalCutoffs { left: ca, right: cb });
    }
    let x = product(&[mode(mode_a, Ladder::Raise), mode(mode_b, Ladder::Lower)]).operator(space)?;
    let x = &x + &x.adjoint();
    let n = &crate::hilbert::number(space, mode_a)? + &crate::hilbert::number(space, mode_b)?;
    let generator = &x - &(&n * p.value());
    let sectors = (0..=ca + cb)
        .map(|k| total_n_subspace(space, &[mode_a, mode_b], k))
        .collect::<Result<Vec<_>>>()?;
    Operator::new(
        space.clone(),
        sector_exponential(generator.matrix(), &sectors, FRAC_PI_2),
    )
}

fn fermion_generator(space: &SpaceDescriptor, q1: usize, q2: usize, number: f64, flip: f64) -> Result<Operator> {
    distinct("qubit", q1, q2)?;
    space.check_qubit(q1)?;
    space.check_qubit(q2)?;
    let e1 = crate::hilbert::excited_projector(space, q1)?;
    let e2 = crate::hilbert::excited_projector(space, q2)?;
    let hop = &pauli(space, q1, Pauli::Plus)? * &pauli(space, q2, Pauli::Minus)?;
    let hop = &hop + &hop.adjoint();
    Ok(&(&(&e1 + &e2) * number) + &(&hop * flip))
}

fn fermion_exponential(space: &SpaceDescriptor, q1: usize, q2: usize, generator: &Operator) -> Result<Operator> {
    let sectors = (0..=2)
        .map(|k| excitation_subspace(space, &[q1, q2], k))
        .collect::<Result<Vec<_>>>()?;
    Operator::new(
        space.clone(),
        sector_exponential(generator.matrix(), &sectors, FRAC_PI_2),
    )
}

/// `exp[-(i pi/2)(s1+ s2- + s2+ s1- - n1 - n2)]` on the pseudo-spin pair.
pub fn ideal_c_fermion(space: &SpaceDescriptor, q1: usize, q2: usize) -> Result<Operator> {
    let generator = fermion_generator(space, q1, q2, -1.0, 1.0)?;
    fermion_exponential(space, q1, q2, &generator)
}

/// `exp{-(i pi/2)[s_a (n1 + n2) + s_b (s1+ s2- + s1- s2+)]}`.
pub fn engineered_c_fermion(
    space: &SpaceDescriptor,
    q1: usize,
    q2: usize,
    sign_a: Sign,
    sign_b: Sign,
) -> Result<Operator> {
    let generator = fermion_generator(space, q1, q2, sign_a.value(), sign_b.value())?;
    fermion_exponential(space, q1, q2, &generator)
}
