use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ccsim_core::evolve::{propagate_static, propagate_timedep, propagate_with, EvolveOptions};
use ccsim_core::hilbert::{annihilator, excited_projector, make_space, total_n_subspace, Subspace};
use ccsim_core::linalg::expm_hermitian;
use ccsim_core::model::{boson_beamsplitter, boson_cavity_rwa, BosonCavityParams};
use ccsim_core::{CMatrix, CVector, Operator, TermList};

fn random_state(dim: usize, rng: &mut StdRng) -> CVector {
    let v = CVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

// U(t) = exp(i nu t P) exp(-i (H0 + nu P) t) for H(t) = A e^{i nu t} + h.c.
// when every term of A raises the qubit; P projects on |e>.
fn rotating_frame_exact(h: &TermList, t: f64) -> CMatrix {
    let space = h.space();
    let nu = h.terms().iter().map(|x| x.frequency.abs()).fold(0.0, f64::max);
    let h0 = h.matrix_at(0.0);
    let p = excited_projector(space, 0).unwrap();
    let frame = expm_hermitian(p.matrix(), -nu * t);
    frame * expm_hermitian(&(h0 + p.matrix() * Complex64::new(nu, 0.0)), t)
}

#[test]
fn beam_splitter_heisenberg_relation() {
    let cutoff = 5;
    let space = make_space(&[cutoff, cutoff], 0).unwrap();
    let a = annihilator(&space, 0).unwrap();
    let b = annihilator(&space, 1).unwrap();
    let mut sub = Subspace::new(&space, Vec::new()).unwrap();
    for n in 0..cutoff {
        sub = sub.union(&total_n_subspace(&space, &[0, 1], n).unwrap()).unwrap();
    }
    for (g, t) in [(Complex64::from_polar(1.3, 0.4), 0.7), (Complex64::new(0.0, 2.0), FRAC_PI_2 / 2.0)] {
        let u = propagate_static(&boson_beamsplitter(&space, g).unwrap(), t).unwrap();
        let lhs = &(&u.adjoint() * &a) * &u;
        let phase = Complex64::from_polar(1.0, g.arg());
        let rhs = &(&a * Complex64::new((g.norm() * t).cos(), 0.0))
            - &(&b * (Complex64::i() * phase * (g.norm() * t).sin()));
        let diff = (lhs.matrix() - rhs.matrix()).map(|z| z.norm());
        for &j in sub.indices() {
            assert!(diff.column(j).max() < 1e-12, "column {j}");
        }
    }
}

#[test]
fn static_evolution_conserves_energy_and_norm() {
    let mut rng = StdRng::seed_from_u64(11);
    let space = make_space(&[4, 4], 0).unwrap();
    let h = boson_beamsplitter(&space, Complex64::new(0.8, -0.3)).unwrap();
    let hm = h.static_operator().unwrap();
    let psi = random_state(space.dim(), &mut rng);
    let e0 = (psi.adjoint() * hm.matrix() * &psi)[(0, 0)].re;
    for t in [0.1, 1.0, 10.0, 100.0] {
        let phi = propagate_static(&h, t).unwrap().apply(&psi);
        let e = (phi.adjoint() * hm.matrix() * &phi)[(0, 0)].re;
        assert!((e - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        assert!((phi.norm() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn time_dependent_evolution_preserves_norm() {
    let mut rng = StdRng::seed_from_u64(12);
    let space = make_space(&[2, 2], 1).unwrap();
    let params = BosonCavityParams {
        omega: Complex64::new(0.0, 3.0),
        eta_l: 1.0,
        lambda_a: Complex64::new(2.0, 0.0),
        omega0: 100.0,
        omega_l: 100.0 - 1.0 - 40.0,
        omega_f: 60.0,
        nu: 1.0,
    };
    let h = boson_cavity_rwa(&space, &params).unwrap();
    let psi = random_state(space.dim(), &mut rng);
    let opts = EvolveOptions {
        steps: Some(500),
        initial_state: Some(psi),
        sample_every: Some(50),
        ..EvolveOptions::default()
    };
    let r = propagate_with(&h, 2.0, &opts).unwrap();
    let states = r.sampled_states.unwrap();
    assert_eq!(states.len(), r.sample_times.len());
    assert!(states.iter().all(|s| (s.norm() - 1.0).abs() <= 1e-10));
    assert!(r.unitarity_defect <= 1e-10);
}

#[test]
fn static_propagators_compose() {
    let space = make_space(&[3, 3], 0).unwrap();
    let h = boson_beamsplitter(&space, Complex64::new(0.4, 1.1)).unwrap();
    let (t1, t2) = (0.37, 1.91);
    let whole = propagate_static(&h, t1 + t2).unwrap();
    let split = &propagate_static(&h, t2).unwrap() * &propagate_static(&h, t1).unwrap();
    assert!((whole.matrix() - split.matrix()).norm() <= 1e-10);
}

#[test]
fn midpoint_of_static_list_is_exact() {
    let space = make_space(&[3, 3], 0).unwrap();
    let h = boson_beamsplitter(&space, Complex64::new(0.4, 1.1)).unwrap();
    let exact = propagate_static(&h, 2.2).unwrap();
    for steps in [1, 7, 64] {
        let r = propagate_timedep(&h, 2.2, steps).unwrap();
        assert!((r.propagator.matrix() - exact.matrix()).norm() <= 1e-9);
    }
}

#[test]
fn rotating_frame_oracle_agrees_with_fine_stepping() {
    let space = make_space(&[2, 2], 1).unwrap();
    let params = BosonCavityParams {
        omega: Complex64::new(0.0, 3.0),
        eta_l: 1.0,
        lambda_a: Complex64::new(2.0, 0.0),
        omega0: 100.0,
        omega_l: 100.0 - 1.0 - 40.0,
        omega_f: 60.0,
        nu: 1.0,
    };
    let h = boson_cavity_rwa(&space, &params).unwrap();
    let t = 1.0;
    let exact = rotating_frame_exact(&h, t);
    let mut errors = Vec::new();
    for steps in [400, 800, 1600] {
        let u = propagate_timedep(&h, t, steps).unwrap();
        assert!(u.unitarity_defect <= 1e-10);
        errors.push((u.propagator.matrix() - &exact).norm());
    }
    // second order: halving the step quarters the error
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.4..=4.6).contains(&ratio), "{errors:?}");
    }
    let unitary = Operator::new(space.clone(), exact).unwrap();
    assert!(unitary.unitarity_defect() < 1e-12);
}
