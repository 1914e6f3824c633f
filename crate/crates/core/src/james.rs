//! Second-order effective Hamiltonians from oscillating term lists.
//!
//! For `H(t) = sum_j A_j O_j exp(i nu_j t)` the static part of
//! `-i H(t) * integral H` is assembled from pairwise products whose
//! frequencies cancel; the result is symmetrized into a Hermitian operator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::{fidelity_unitary_phase_insensitive, propagate_static, propagate_timedep};
use crate::hilbert::{CMatrix, Level, Operator, Subspace, Subsystem, I};
use crate::terms::{Term, TermList};

/// `1e-9` times the largest `|nu|` in the list.
pub fn default_resonance_tol(h: &TermList) -> f64 {
    1e-9 * h.max_abs_frequency()
}

/// Replaces each amplitude `A` by the antiderivative coefficient `A/(i nu)`.
pub fn integrate_terms(h: &TermList) -> Result<TermList> {
    let mut out = TermList::new(h.space());
    for (index, t) in h.terms().iter().enumerate() {
        if t.frequency == 0.0 {
            return Err(Error::ZeroFrequency {
                index,
                label: t.describe(),
            });
        }
        let mut it = t.clone();
        it.amplitude = t.amplitude / Complex64::new(0.0, t.frequency);
        out.push(it)?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EffectiveResult {
    pub static_terms: TermList,
    /// Products whose frequencies do not cancel, with their summed frequency.
    pub dropped_terms: Vec<Term>,
    pub resonance_tol: f64,
    /// Total number of pairwise products formed.
    pub product_count: usize,
}

fn product_term(space: &crate::hilbert::SpaceDescriptor, left: &Term, right: &Term, amp: Complex64, nu: f64) -> Result<Term> {
    match (&left.label, &right.label) {
        (Some(l), Some(r)) => {
            let (s, label) = l.multiply(r);
            Term::from_product(space, label, amp * s, nu)
        }
        _ => Ok(Term::from_operator(&left.operator * &right.operator, amp, nu)),
    }
}

/// Keeps products with `|nu_j + nu_k| <= resonance_tol` and returns their
/// Hermitian part as a static list.
pub fn effective_hamiltonian(h: &TermList, resonance_tol: f64) -> Result<EffectiveResult> {
    if resonance_tol.is_nan() || resonance_tol < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "resonance tolerance must be non-negative, got {resonance_tol}"
        )));
    }
    let integrated = integrate_terms(h)?;
    let space = h.space();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for tj in h.terms() {
        for tk in integrated.terms() {
            let nu = tj.frequency + tk.frequency;
            let amp = -I * tj.amplitude * tk.amplitude;
            if nu.abs() <= resonance_tol {
                kept.push(product_term(space, tj, tk, amp, 0.0)?);
            } else {
                dropped.push(product_term(space, tj, tk, amp, nu)?);
            }
        }
    }
    let mut sym = TermList::new(space);
    for t in kept {
        let mut half = t.clone();
        half.amplitude *= 0.5;
        sym.push(half.conjugate())?;
        sym.push(half)?;
    }
    Ok(EffectiveResult {
        static_terms: sym.canonicalize()?,
        dropped_terms: dropped,
        resonance_tol,
        product_count: h.len() * h.len(),
    })
}

/// Replaces the factor on `qubit` by its diagonal element in `level`; the
/// result acts as the identity on that qubit.
pub fn project_onto(h: &TermList, qubit: usize, level: Level) -> Result<TermList> {
    let space = h.space();
    space.check_qubit(qubit)?;
    let excited = level.is_excited();
    let mut out = TermList::new(space);
    for t in h.terms() {
        match &t.label {
            Some(l) => {
                let (s, label) = l.project_qubit(qubit, excited);
                if s != 0.0 {
                    out.push_product(label, t.amplitude * s, t.frequency)?;
                }
            }
            None => {
                let m = project_matrix(t.operator.matrix(), space, qubit, excited);
                out.push(Term::from_operator(
                    Operator::new(space.clone(), m)?,
                    t.amplitude,
                    t.frequency,
                ))?;
            }
        }
    }
    out.canonicalize()
}

// <level| M |level> tensored with the qubit identity.
fn project_matrix(m: &CMatrix, space: &crate::hilbert::SpaceDescriptor, qubit: usize, excited: bool) -> CMatrix {
    let stride = space.stride(Subsystem::Qubit(qubit));
    let bit = |i: usize| (i / stride) % 2 == 1;
    let pin = |i: usize| {
        let base = i - if bit(i) { stride } else { 0 };
        if excited {
            base + stride
        } else {
            base
        }
    };
    let d = m.nrows();
    CMatrix::from_fn(d, d, |r, c| {
        if bit(r) == bit(c) {
            m[(pin(r), pin(c))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `1 - F` between the time-ordered propagator of `full` (midpoint stepping
/// with `steps` steps) and `exp(-i H_eff t_final)`, on `sub` if given.
pub fn validate_effective(
    full: &TermList,
    eff: &TermList,
    t_final: f64,
    steps: usize,
    sub: Option<&Subspace>,
) -> Result<f64> {
    full.space().ensure_same(eff.space())?;
    let u = propagate_timedep(full, t_final, steps)?;
    let v = propagate_static(eff, t_final)?;
    Ok(1.0 - fidelity_unitary_phase_insensitive(&u.propagator, &v, sub)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilator, frobenius, make_space, pauli, Pauli, ONE};
    use crate::terms::{Factor, Ladder, OpProduct};

    fn jc_pair(space: &crate::hilbert::SpaceDescriptor, lambda: Complex64, delta: f64) -> TermList {
        let p = OpProduct::from_factors(&[Factor::Mode(0, Ladder::Lower), Factor::Qubit(0, Pauli::Plus)]).1;
        let mut h = TermList::new(space);
        h.push_with_conjugate(p, lambda, delta).unwrap();
        h
    }

    #[test]
    fn integrate_divides_by_i_nu() {
        let space = make_space(&[2], 1).unwrap();
        let lambda = Complex64::new(0.4, 0.1);
        let h = jc_pair(&space, lambda, 3.0);
        let int = integrate_terms(&h).unwrap();
        assert!((int.terms()[0].amplitude - lambda / Complex64::new(0.0, 3.0)).norm() < 1e-15);
        // the conjugate partner maps to the conjugate of the image
        let c = int.terms()[0].conjugate();
        assert!((int.terms()[1].amplitude - c.amplitude).norm() < 1e-15);

        let mut bad = TermList::new(&space);
        bad.push_product(OpProduct::identity(), ONE, 0.0).unwrap();
        assert!(matches!(integrate_terms(&bad), Err(Error::ZeroFrequency { index: 0, .. })));
    }

    #[test]
    fn dispersive_pair_matches_commutator_rule() {
        let space = make_space(&[3], 1).unwrap();
        let lambda = Complex64::new(0.3, -0.2);
        let delta = 2.5;
        let h = jc_pair(&space, lambda, delta);
        let eff = effective_hamiltonian(&h, default_resonance_tol(&h)).unwrap();
        let got = eff.static_terms.static_operator().unwrap();
        // A at +delta: H_eff = [A, A^dag] / delta
        let a = &(&annihilator(&space, 0).unwrap() * &pauli(&space, 0, Pauli::Plus).unwrap()) * lambda;
        let expected = &a.commutator(&a.adjoint()).unwrap() * (1.0 / delta);
        assert!(got.max_abs_diff(&expected) < 1e-14);
        assert_eq!(eff.dropped_terms.len(), 2);
        assert!(eff.dropped_terms.iter().all(|t| (t.frequency.abs() - 2.0 * delta).abs() < 1e-12));
        assert!(got.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn nonresonant_input_has_empty_static_part() {
        let space = make_space(&[2], 1).unwrap();
        let p = OpProduct::from_factors(&[Factor::Mode(0, Ladder::Lower)]).1;
        let mut h = TermList::new(&space);
        h.push_product(p.clone(), ONE, 1.0).unwrap();
        h.push_product(p, ONE, 2.0).unwrap();
        let eff = effective_hamiltonian(&h, 1e-9).unwrap();
        assert!(eff.static_terms.is_empty());
        assert_eq!(eff.dropped_terms.len(), eff.product_count);
    }

    #[test]
    fn projection_keeps_diagonal_element() {
        let space = make_space(&[2], 1).unwrap();
        let h = jc_pair(&space, Complex64::new(0.5, 0.0), 1.0);
        let eff = effective_hamiltonian(&h, 1e-9).unwrap().static_terms;
        for level in [Level::Ground, Level::Excited] {
            let proj = project_onto(&eff, 0, level).unwrap().static_operator().unwrap();
            let unlabeled = eff.transformed(&Operator::identity(&space)).unwrap();
            let by_matrix = project_onto(&unlabeled, 0, level).unwrap().static_operator().unwrap();
            assert!(proj.max_abs_diff(&by_matrix) < 1e-15);
            let sub = Subspace::from_predicate(&space, |s| s.qubits[0] == level.is_excited());
            let full = eff.static_operator().unwrap();
            assert!(frobenius(&(sub.restrict(&proj).unwrap() - sub.restrict(&full).unwrap())) < 1e-15);
        }
    }

    #[test]
    fn static_full_equals_effective() {
        let space = make_space(&[2, 2], 0).unwrap();
        let h = crate::model::boson_beamsplitter(&space, Complex64::new(0.7, 0.2)).unwrap();
        let d = validate_effective(&h, &h, 1.3, 3, None).unwrap();
        assert!(d <= 1e-9);
    }
}
