//! Propagators and unitary comparisons.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{unitarity_defect, CMatrix, CVector, Operator, Subspace, ZERO};
use crate::linalg::{expm_hermitian, unitary_power};
use crate::terms::TermList;

/// `exp(-i H t)` for a static list.
pub fn propagate_static(h: &TermList, t: f64) -> Result<Operator> {
    let op = h.static_operator()?;
    Operator::new(h.space().clone(), expm_hermitian(op.matrix(), t))
}

/// `200 * max(1, t * max|nu| / 2pi)` steps, rounded up.
pub fn default_steps(h: &TermList, t_final: f64) -> usize {
    let periods = t_final.abs() * h.max_abs_frequency() / TAU;
    (200.0 * periods.max(1.0)).ceil() as usize
}

/// Smallest `T > 0` with `H(t + T) = H(t)`, if every frequency is an integer
/// multiple (up to 16 subdivisions of the slowest one) of a common base.
pub fn common_period(h: &TermList) -> Option<f64> {
    let freqs: Vec<f64> = h
        .terms()
        .iter()
        .map(|t| t.frequency.abs())
        .filter(|&f| f > 0.0)
        .collect();
    let slowest = freqs.iter().copied().fold(f64::INFINITY, f64::min);
    if !slowest.is_finite() {
        return None;
    }
    (1..=16).find_map(|d| {
        let base = slowest / d as f64;
        let ok = freqs.iter().all(|&f| {
            let q = f / base;
            (q - q.round()).abs() <= 1e-9 * q
        });
        ok.then_some(TAU / base)
    })
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Total midpoint steps; `None` uses [`default_steps`].
    pub steps: Option<usize>,
    /// Propagate one period and raise it to a power when `H` is periodic.
    pub periodic: bool,
    /// Steps per period in periodic mode.
    pub steps_per_period: usize,
    pub unitarity_bound: f64,
    pub initial_state: Option<CVector>,
    /// Record the state every this many steps (plain stepping only).
    pub sample_every: Option<usize>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            steps: None,
            periodic: false,
            steps_per_period: 200,
            unitarity_bound: 1e-8,
            initial_state: None,
            sample_every: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub propagator: Operator,
    pub sample_times: Vec<f64>,
    pub sampled_states: Option<Vec<CVector>>,
    /// Largest `||U^dag U - I||_F` seen during propagation.
    pub unitarity_defect: f64,
    pub failed: bool,
}

fn hamiltonian_at(groups: &[(f64, CMatrix)], dim: usize, t: f64) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    for (nu, s) in groups {
        h += s * Complex64::from_polar(1.0, nu * t);
    }
    h
}

// Midpoint steps over [t0, t0 + n dt], returning the ordered product.
fn midpoint_product(groups: &[(f64, CMatrix)], dim: usize, t0: f64, dt: f64, n: usize, defect: &mut f64) -> CMatrix {
    let mut u = CMatrix::identity(dim, dim);
    for k in 0..n {
        let mid = t0 + (k as f64 + 0.5) * dt;
        u = expm_hermitian(&hamiltonian_at(groups, dim, mid), dt) * u;
        *defect = defect.max(unitarity_defect(&u));
    }
    u
}

/// Exponential-midpoint propagation with `steps` equal steps.
pub fn propagate_timedep(h: &TermList, t_final: f64, steps: usize) -> Result<EvolutionResult> {
    propagate_with(
        h,
        t_final,
        &EvolveOptions {
            steps: Some(steps),
            ..EvolveOptions::default()
        },
    )
}

pub fn propagate_with(h: &TermList, t_final: f64, opts: &EvolveOptions) -> Result<EvolutionResult> {
    h.check_pairing()?;
    let space = h.space();
    let dim = space.dim();
    if let Some(psi) = &opts.initial_state {
        if psi.len() != dim {
            return Err(Error::ShapeMismatch {
                expected: format!("state of length {dim}"),
                found: format!("length {}", psi.len()),
            });
        }
    }
    let groups = h.frequency_groups();
    let mut defect: f64 = 0.0;

    let period = if opts.periodic { common_period(h) } else { None };
    if let Some(period) = period.filter(|&p| p < t_final.abs()) {
        let m = opts.steps_per_period.max(1);
        let sign = t_final.signum();
        let dt = sign * period / m as f64;
        let cycles = (t_final.abs() / period).floor();
        let rest = t_final.abs() - cycles * period;
        let one = midpoint_product(&groups, dim, 0.0, dt, m, &mut defect);
        let mut u = unitary_power(&one, cycles as u64);
        if rest > 0.0 {
            let n = ((m as f64) * rest / period).ceil().max(1.0) as usize;
            let tail = midpoint_product(&groups, dim, 0.0, sign * rest / n as f64, n, &mut defect);
            u = tail * u;
        }
        defect = defect.max(unitarity_defect(&u));
        let sampled_states = opts.initial_state.as_ref().map(|psi| vec![&u * psi]);
        return Ok(EvolutionResult {
            propagator: Operator::new(space.clone(), u)?,
            sample_times: vec![t_final],
            sampled_states,
            unitarity_defect: defect,
            failed: defect > opts.unitarity_bound,
        });
    }

    let steps = opts.steps.unwrap_or_else(|| default_steps(h, t_final));
    if steps == 0 {
        return Err(Error::InvalidParameter("step count must be at least 1".into()));
    }
    let dt = t_final / steps as f64;
    let mut u = CMatrix::identity(dim, dim);
    let mut times = vec![0.0];
    let mut states = opts.initial_state.clone().map(|psi| vec![psi]);
    let every = opts.sample_every.unwrap_or(steps).max(1);
    for k in 0..steps {
        let mid = (k as f64 + 0.5) * dt;
        u = expm_hermitian(&hamiltonian_at(&groups, dim, mid), dt) * u;
        defect = defect.max(unitarity_defect(&u));
        if (k + 1) % every == 0 || k + 1 == steps {
            times.push((k + 1) as f64 * dt);
            if let (Some(st), Some(psi)) = (states.as_mut(), opts.initial_state.as_ref()) {
                st.push(&u * psi);
            }
        }
    }
    if defect > opts.unitarity_bound {
        log::warn!("unitarity defect {defect:.3e} exceeds bound {:.1e}", opts.unitarity_bound);
    }
    Ok(EvolutionResult {
        propagator: Operator::new(space.clone(), u)?,
        sample_times: times,
        sampled_states: states,
        unitarity_defect: defect,
        failed: defect > opts.unitarity_bound,
    })
}

/// `|Tr(U_s^dag V_s)| / d` on the subspace (or the whole space), clamped to 1.
pub fn fidelity_unitary_phase_insensitive(u: &Operator, v: &Operator, sub: Option<&Subspace>) -> Result<f64> {
    u.space().ensure_same(v.space())?;
    let full;
    let sub = match sub {
        Some(s) => {
            s.space().ensure_same(u.space())?;
            s
        }
        None => {
            full = Subspace::full(u.space());
            &full
        }
    };
    if sub.is_empty() {
        return Err(Error::InvalidParameter("fidelity on an empty subspace".into()));
    }
    let (um, vm) = (u.matrix(), v.matrix());
    let mut tr = ZERO;
    for &i in sub.indices() {
        for &j in sub.indices() {
            tr += um[(j, i)].conj() * vm[(j, i)];
        }
    }
    Ok((tr.norm() / sub.dim() as f64).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorComparison {
    pub fidelities: Vec<f64>,
    /// Per sector, the larger leakage of `U` and `V`.
    pub leakage: Vec<f64>,
    pub leakage_flagged: bool,
}

impl SectorComparison {
    pub const LEAKAGE_BOUND: f64 = 1e-8;

    pub fn min_fidelity(&self) -> f64 {
        self.fidelities.iter().copied().fold(1.0, f64::min)
    }
}

/// Phase-insensitive fidelity in each of several disjoint sectors.
pub fn sectorwise_compare(u: &Operator, v: &Operator, sectors: &[Subspace]) -> Result<SectorComparison> {
    u.space().ensure_same(v.space())?;
    let mut owner = vec![false; u.dim()];
    for s in sectors {
        s.space().ensure_same(u.space())?;
        for &i in s.indices() {
            if std::mem::replace(&mut owner[i], true) {
                return Err(Error::OverlappingSectors(i));
            }
        }
    }
    let mut out = SectorComparison {
        fidelities: Vec::with_capacity(sectors.len()),
        leakage: Vec::with_capacity(sectors.len()),
        leakage_flagged: false,
    };
    for s in sectors {
        let leak = s.leakage(u)?.max(s.leakage(v)?);
        if leak > SectorComparison::LEAKAGE_BOUND {
            log::warn!("sector of dimension {} leaks {leak:.3e}", s.dim());
            out.leakage_flagged = true;
        }
        out.leakage.push(leak);
        out.fidelities.push(fidelity_unitary_phase_insensitive(u, v, Some(s))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_space, total_n_subspace, ONE};
    use crate::model::{boson_beamsplitter, ideal_c_boson, Sign};

    #[test]
    fn zero_hamiltonian_is_identity() {
        let space = make_space(&[2, 2], 0).unwrap();
        let h = TermList::new(&space);
        let u = propagate_static(&h, 3.0).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(&space)) < 1e-15);
    }

    #[test]
    fn real_beamsplitter_swaps_with_minus_i() {
        let space = make_space(&[2, 2], 0).unwrap();
        let g = 2.0;
        let h = boson_beamsplitter(&space, Complex64::new(g, 0.0)).unwrap();
        let u = propagate_static(&h, std::f64::consts::FRAC_PI_2 / g).unwrap();
        let v10 = space.basis_vector(&[1, 0], &[]).unwrap();
        let v01 = space.basis_vector(&[0, 1], &[]).unwrap();
        let out = u.apply(&v10);
        assert!((out - v01 * Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let space = make_space(&[], 1).unwrap();
        let u = Operator::identity(&space);
        let v = &u * Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
        assert!((fidelity_unitary_phase_insensitive(&u, &v, None).unwrap() - 1.0).abs() < 1e-15);
        let z = crate::hilbert::pauli(&space, 0, crate::hilbert::Pauli::Z).unwrap();
        assert!(fidelity_unitary_phase_insensitive(&u, &z, None).unwrap() < 1e-15);
    }

    #[test]
    fn sectors_must_be_disjoint() {
        let space = make_space(&[2, 2], 0).unwrap();
        let u = Operator::identity(&space);
        let s1 = total_n_subspace(&space, &[0, 1], 1).unwrap();
        let r = sectorwise_compare(&u, &u, &[s1.clone(), s1]);
        assert!(matches!(r, Err(Error::OverlappingSectors(_))));
    }

    #[test]
    fn beamsplitter_matches_ideal_sectorwise() {
        let space = make_space(&[4, 4], 0).unwrap();
        let h = boson_beamsplitter(&space, ONE).unwrap();
        let u = propagate_static(&h, std::f64::consts::FRAC_PI_2).unwrap();
        let c = ideal_c_boson(&space, 0, 1, Sign::Plus).unwrap();
        let sectors: Vec<_> = (0..=4).map(|n| total_n_subspace(&space, &[0, 1], n).unwrap()).collect();
        let cmp = sectorwise_compare(&u, &c, &sectors).unwrap();
        assert!(!cmp.leakage_flagged);
        assert!(cmp.fidelities.iter().all(|&f| f >= 1.0 - 1e-9), "{:?}", cmp.fidelities);
    }

    #[test]
    fn static_input_matches_exact_for_any_steps() {
        let space = make_space(&[2, 2], 0).unwrap();
        let h = boson_beamsplitter(&space, Complex64::new(0.4, 0.9)).unwrap();
        let exact = propagate_static(&h, 2.0).unwrap();
        for steps in [1, 3, 17] {
            let r = propagate_timedep(&h, 2.0, steps).unwrap();
            assert!(r.propagator.max_abs_diff(&exact) < 1e-9);
            assert!(r.unitarity_defect < 1e-10);
        }
    }

    #[test]
    fn periods() {
        let space = make_space(&[1], 1).unwrap();
        let p = crate::terms::OpProduct::from_factors(&[crate::terms::Factor::Mode(0, crate::terms::Ladder::Lower)]).1;
        let mut h = TermList::new(&space);
        h.push_with_conjugate(p.clone(), ONE, 2.0).unwrap();
        h.push_with_conjugate(p.clone(), ONE, 3.0).unwrap();
        assert!((common_period(&h).unwrap() - TAU).abs() < 1e-12);
        let mut irr = TermList::new(&space);
        irr.push_with_conjugate(p.clone(), ONE, 1.0).unwrap();
        irr.push_with_conjugate(p, ONE, std::f64::consts::SQRT_2).unwrap();
        assert!(common_period(&irr).is_none());
        assert!(common_period(&TermList::new(&space)).is_none());
    }

    #[test]
    fn periodic_shortcut_matches_plain_stepping() {
        let space = make_space(&[2], 1).unwrap();
        let p = crate::terms::OpProduct::from_factors(&[
            crate::terms::Factor::Mode(0, crate::terms::Ladder::Lower),
            crate::terms::Factor::Qubit(0, crate::hilbert::Pauli::Plus),
        ])
        .1;
        let mut h = TermList::new(&space);
        h.push_with_conjugate(p, Complex64::new(0.3, 0.0), 5.0).unwrap();
        let period = TAU / 5.0;
        let t = 7.0 * period + 0.25 * period;
        let plain = propagate_timedep(&h, t, 2900).unwrap();
        let opts = EvolveOptions {
            periodic: true,
            steps_per_period: 400,
            ..EvolveOptions::default()
        };
        let fast = propagate_with(&h, t, &opts).unwrap();
        assert!(plain.propagator.max_abs_diff(&fast.propagator) < 1e-10);
    }
}
