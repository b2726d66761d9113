use std::path::PathBuf;

use galrefl_core::automorphisms::{from_words, iota_verify};
use galrefl_core::characters::{inner_product, irr_table, natural_character};
use galrefl_core::data::{load_named, ExplicitData};
use galrefl_core::groups::check_relations_matrices;
use galrefl_core::{CycMatrix, Rational};
use num_traits::{One, Zero};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn load(n: u32) -> ExplicitData {
    load_named(&data_dir(), &format!("G{n}")).unwrap()
}

#[test]
fn closures_match_recorded_orders_and_centers() {
    for n in 4..=21 {
        let data = load(n);
        let g = data.group().unwrap();
        assert_eq!(g.order(), data.order, "G{n}");
        assert_eq!(g.center().len(), data.center_order, "G{n}");
        assert_eq!(data.degrees.iter().product::<u32>() as usize, data.order, "G{n}");
        assert!(g.reflections().len() > 0);
    }
}

#[test]
fn presentations_hold_for_g4_to_g9() {
    for n in 4..=9 {
        let data = load(n);
        assert!(!data.relations.is_empty());
        let images = data.generator_list().into_iter().collect();
        for c in check_relations_matrices(&data.relation_list(), &images).unwrap() {
            assert!(c.holds, "G{n}: {}", c.relation);
        }
    }
}

#[test]
fn generators_are_reflections() {
    for n in 4..=21 {
        for (name, m) in load(n).generator_list() {
            assert_eq!(m.fixed_codim(), 1, "G{n} {name}");
        }
    }
}

#[test]
fn g4_character_table() {
    let g = load(4).group().unwrap();
    assert_eq!(g.order(), 24);
    let irr = irr_table(&g).unwrap();
    assert_eq!(irr.len(), 7);
    assert_eq!(irr.len(), g.classes().len());
    for (i, a) in irr.iter().enumerate() {
        for (j, b) in irr.iter().enumerate() {
            let want = if i == j { Rational::one() } else { Rational::zero() };
            assert_eq!(inner_product(&g, a, b).unwrap(), want);
        }
    }
}

#[test]
fn table_assignments_are_equivariant() {
    for n in 4..=21 {
        let data = load(n);
        let g = data.group().unwrap();
        let mats: Vec<CycMatrix> = (0..g.order() as u32).map(|x| g.matrix(x)).collect();
        let chi = natural_character(&g);
        for entry in &data.iota {
            let a = from_words(&g, &entry.images).unwrap();
            let rep = iota_verify(&g, entry.conductor, &[(entry.exponent, a)], &[chi.clone()], Some(&mats));
            assert!(rep.holds(), "G{n} σ_{}: {:?}", entry.exponent, rep.failures);
        }
    }
}

#[test]
fn full_assignments_are_homomorphisms() {
    for n in 4..=9 {
        let data = load(n);
        let g = data.group().unwrap();
        let mats: Vec<CycMatrix> = (0..g.order() as u32).map(|x| g.matrix(x)).collect();
        let assignment: Vec<_> =
            data.iota.iter().map(|e| (e.exponent, from_words(&g, &e.images).unwrap())).collect();
        let irr = irr_table(&g).unwrap();
        let rep = iota_verify(&g, data.iota[0].conductor, &assignment, &[natural_character(&g)], Some(&mats));
        assert!(rep.holds(), "G{n}: {:?}", rep.failures);
        assert!(irr.len() == g.classes().len());
    }
}

#[test]
fn g9_start_model_generates_g9() {
    let start = load_named(&data_dir(), "G9_start").unwrap();
    let g = start.group().unwrap();
    assert_eq!(g.order(), 192);
    let target = load(9).group().unwrap();
    let a = irr_table(&g).unwrap().len();
    assert_eq!(a, irr_table(&target).unwrap().len());
}
