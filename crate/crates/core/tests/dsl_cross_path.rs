use std::path::PathBuf;

use ccsim_core::hilbert::{make_space, max_abs_diff};
use ccsim_core::hspec::{lower, parse, parse_file, serialize};
use ccsim_core::model::{
    boson_cavity_rwa, fermion_interaction, two_axis_rwa, BosonCavityParams, FermionParams, TwoAxisParams,
};
use ccsim_core::TermList;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("hspec").join(name)
}

// Every builder term has a DSL term with the same frequency and weighted
// matrix; the lists are the same length, so this is a bijection up to
// duplicates, which the builders never produce.
fn assert_same_terms(dsl: &TermList, built: &TermList, tol: f64) {
    assert_eq!(dsl.len(), built.len());
    for y in built.terms() {
        let scale = y.frequency.abs().max(1.0);
        let found = dsl.terms().iter().any(|x| {
            (x.frequency - y.frequency).abs() <= 1e-12 * scale
                && max_abs_diff(&x.weighted(), &y.weighted()) <= tol
        });
        assert!(found, "no DSL match for {}", y.describe());
    }
}

#[test]
fn two_axis_file_matches_builder() {
    let list = lower(&parse_file(&bundled("two_axis.hspec")).unwrap()).unwrap();
    let space = make_space(&[6, 6], 1).unwrap();
    let built = two_axis_rwa(&space, &TwoAxisParams::default(), false).unwrap();
    assert_eq!(list.len(), 4);
    assert_same_terms(&list, &built, 1e-12);
}

#[test]
fn fermion_file_matches_builder() {
    let list = lower(&parse_file(&bundled("fermion_two_ion.hspec")).unwrap()).unwrap();
    let space = make_space(&[6], 2).unwrap();
    let built = fermion_interaction(&space, &FermionParams::default()).unwrap();
    assert_same_terms(&list, &built, 1e-12);
}

#[test]
fn cavity_file_matches_builder() {
    let list = lower(&parse_file(&bundled("boson_cavity.hspec")).unwrap()).unwrap();
    let space = make_space(&[6, 6], 1).unwrap();
    let built = boson_cavity_rwa(&space, &BosonCavityParams::default()).unwrap();
    // amplitudes are ~1e5, compare relative to that
    assert_same_terms(&list, &built, 1e-12 * 1e5);
}

#[test]
fn bundled_files_round_trip() {
    for name in ["two_axis.hspec", "fermion_two_ion.hspec", "boson_cavity.hspec"] {
        let spec = parse_file(&bundled(name)).unwrap();
        let text = serialize(&spec);
        let again = parse(&text).unwrap();
        assert_eq!(spec, again, "{name}");
        assert_eq!(serialize(&again), text, "{name}");
    }
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(
        parse_file(&bundled("nope.hspec")),
        Err(ccsim_core::Error::Io { .. })
    ));
}
