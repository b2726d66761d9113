use std::collections::BTreeSet;
use std::path::PathBuf;

use galrefl_core::automorphisms::{
    aut_group, central_automorphisms, central_endomorphisms, central_factor, eta, from_images,
    from_words, inner_automorphisms, iota_twisted, iota_verify, irr_permutation, nbar_order,
    nbar_order_brute, outer_classes, reflection_preserving, reflection_set, verify_structure,
    Automorphism, AUT_BOUND,
};
use galrefl_core::characters::{galois_k, irr_table, natural_character, reflection_characters};
use galrefl_core::cyclotomic::{gcd, galois_units};
use galrefl_core::data::load_named;
use galrefl_core::groups::{Group, GroupSpec};
use galrefl_core::tableau::{build_model, enumerate_tuples, irreducible_models};

fn g(m: u32, e: u32, r: u32) -> Group {
    Group::imprimitive(GroupSpec::imprimitive(m, e, r).unwrap()).unwrap()
}

fn g4() -> Group {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    load_named(&dir, "G4").unwrap().group().unwrap()
}

#[test]
fn s4_has_only_inner_automorphisms() {
    let grp = g(1, 1, 4);
    let auts = aut_group(&grp, AUT_BOUND).unwrap();
    assert_eq!(auts.len(), 24);
    assert_eq!(inner_automorphisms(&grp), auts);
}

#[test]
fn s6_outer_class_moves_transpositions() {
    let grp = g(1, 1, 6);
    let auts = aut_group(&grp, AUT_BOUND).unwrap();
    assert_eq!(auts.len(), 1440);
    let irr = irr_table(&grp).unwrap();
    let classes = outer_classes(&grp, &auts, &irr);
    assert_eq!(classes.len(), 2);
    let refl = reflection_set(&grp);
    let outer = classes.iter().find(|c| !c.representative.preserves(&refl));
    assert!(outer.is_some());
    let report = verify_structure(&grp, AUT_BOUND).unwrap();
    assert!(!report.holds);
    assert_eq!(report.witnesses.len(), 720);
}

#[test]
fn dihedral_of_order_8() {
    assert_eq!(aut_group(&g(4, 4, 2), AUT_BOUND).unwrap().len(), 8);
}

#[test]
fn automorphisms_are_multiplicative() {
    for grp in [g(2, 1, 2), g(3, 1, 2), g(4, 4, 2), g(2, 2, 3), g(3, 3, 3), g4()] {
        for a in aut_group(&grp, AUT_BOUND).unwrap() {
            assert!(a.is_multiplicative(&grp), "{}", grp.label);
        }
    }
}

#[test]
fn inner_group_is_quotient_by_center() {
    for spec in small_specs() {
        let grp = Group::imprimitive(spec).unwrap();
        assert_eq!(inner_automorphisms(&grp).len() * grp.center().len(), grp.order(), "{spec}");
    }
}

fn small_specs() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for d in 1..=3 {
        for e in 1..=4 {
            for r in 1..=3 {
                let s = GroupSpec::new(d, e, r).unwrap();
                if s.order() <= 100 {
                    out.push(s);
                }
            }
        }
    }
    out
}

#[test]
fn out_acts_faithfully_on_irr() {
    for grp in [g(3, 1, 2), g(4, 2, 2), g(3, 3, 3), g(2, 2, 3), g(4, 4, 2), g(6, 6, 2), g4()] {
        let auts = aut_group(&grp, AUT_BOUND).unwrap();
        let irr = irr_table(&grp).unwrap();
        let classes = outer_classes(&grp, &auts, &irr);
        assert_eq!(classes.len() * inner_automorphisms(&grp).len(), auts.len());
        let sigs: BTreeSet<Vec<usize>> = classes.iter().map(|c| c.signature.clone()).collect();
        assert_eq!(sigs.len(), classes.len(), "{}", grp.label);
        let inn: BTreeSet<Automorphism> = inner_automorphisms(&grp).into_iter().collect();
        for c in &classes {
            let trivial = c.signature.iter().enumerate().all(|(i, &j)| i == j);
            assert_eq!(trivial, inn.contains(&c.representative), "{}", grp.label);
        }
    }
}

#[test]
fn central_automorphisms_form_a_normal_subgroup() {
    for grp in [g(3, 1, 2), g(2, 1, 2), g(4, 2, 2), g(6, 3, 2), g(3, 3, 3), g4()] {
        let c: BTreeSet<Automorphism> = central_automorphisms(&grp).into_iter().collect();
        for x in &c {
            for y in &c {
                assert!(c.contains(&x.compose(y)));
            }
        }
        for a in aut_group(&grp, AUT_BOUND).unwrap() {
            for x in &c {
                assert!(c.contains(&a.compose(x).compose(&a.inverse())), "{}", grp.label);
            }
        }
    }
}

#[test]
fn central_criterion_matches_bijectivity() {
    for grp in [g(3, 1, 2), g(2, 1, 3), g(6, 1, 2), g(4, 2, 2), g(6, 2, 2), g(3, 3, 3), g4()] {
        for c in central_endomorphisms(&grp) {
            assert_eq!(c.criterion, c.is_automorphism(), "{}", grp.label);
        }
    }
}

#[test]
fn g4_has_no_central_automorphisms() {
    assert_eq!(central_automorphisms(&g4()).len(), 1);
}

#[test]
fn symmetric_groups_have_trivial_c() {
    for r in 3..=5 {
        assert_eq!(central_automorphisms(&g(1, 1, r)).len(), 1);
    }
}

#[test]
fn reflection_preserving_acts_transitively_on_reflection_characters() {
    let grp = g(3, 1, 2);
    let auts = aut_group(&grp, AUT_BOUND).unwrap();
    let irr = irr_table(&grp).unwrap();
    let refl = reflection_characters(&grp, &irr);
    assert_eq!(refl.len(), 2);
    let v = irr.iter().position(|c| c.same_values(&natural_character(&grp))).unwrap();
    let orbit: BTreeSet<usize> = reflection_preserving(&grp, &auts)
        .iter()
        .map(|a| irr_permutation(&grp, a, &irr).unwrap()[v])
        .collect();
    let expected: BTreeSet<usize> =
        refl.iter().map(|c| irr.iter().position(|x| x.same_values(c)).unwrap()).collect();
    assert_eq!(orbit, expected);
}

#[test]
fn structure_theorem() {
    for grp in [g(2, 1, 2), g(3, 1, 2), g(4, 4, 2), g(3, 3, 3), g(2, 2, 3), g(4, 2, 2), g4()] {
        let rep = verify_structure(&grp, AUT_BOUND).unwrap();
        assert!(rep.holds, "{} {:?}", grp.label, rep);
    }
    let rep = verify_structure(&g(2, 2, 2), AUT_BOUND).unwrap();
    assert!(!rep.holds);
    assert_eq!((rep.aut_order, rep.c_order, rep.a_order), (6, 2, 2));
}

#[test]
fn nbar_is_gcd() {
    for (m, e, r) in [(4, 2, 2), (3, 3, 3), (2, 2, 4), (6, 3, 2), (3, 1, 3), (4, 4, 2), (6, 2, 2), (4, 2, 3)] {
        let spec = GroupSpec::imprimitive(m, e, r).unwrap();
        let want = gcd(e as u64, r as u64) as u32;
        assert_eq!(nbar_order(&spec).unwrap(), want, "{spec}");
        assert_eq!(nbar_order_brute(&Group::imprimitive(spec).unwrap()), want, "{spec}");
    }
}

#[test]
fn nbar_over_battery() {
    for spec in small_specs().into_iter().filter(|s| s.center_formula_applies() && s.r >= 2) {
        assert_eq!(nbar_order(&spec).unwrap(), gcd(spec.e as u64, spec.r as u64) as u32, "{spec}");
    }
}

#[test]
fn central_factor_decompositions() {
    for (m, e, r, drp) in [(3, 1, 2, 3), (3, 1, 3, 1), (6, 1, 2, 3), (2, 1, 3, 2), (4, 2, 2, 1)] {
        let rep = central_factor(&GroupSpec::imprimitive(m, e, r).unwrap()).unwrap();
        assert_eq!(rep.d_rprime, drp);
        assert!(rep.direct_product, "{rep:?}");
        assert_eq!(rep.max_kernel, rep.expected_kernel, "{rep:?}");
    }
    let rep = central_factor(&GroupSpec::imprimitive(3, 1, 2).unwrap()).unwrap();
    assert_eq!(rep.factor, "G(3,3,2)");
    assert_eq!(rep.non_abelian_factors, 1);
    let rep = central_factor(&GroupSpec::imprimitive(2, 1, 3).unwrap()).unwrap();
    assert_eq!(rep.non_abelian_factors, 2);
}

#[test]
fn central_factor_special_case() {
    let rep = central_factor(&GroupSpec::imprimitive(6, 2, 2).unwrap()).unwrap();
    assert!(rep.special_case);
    assert_eq!(rep.expected_kernel, 6);
    assert_eq!(rep.factor, "G(3,3,2)");
    assert!(rep.direct_product);
    assert_eq!(rep.max_kernel, 6);
}

#[test]
fn eta_makes_tableau_models_equivariant() {
    for d in 1..=4usize {
        for r in 1..=3u32 {
            let spec = GroupSpec::new(d as u32, 1, r).unwrap();
            let grp = Group::imprimitive(spec).unwrap();
            for t in enumerate_tuples(d, r) {
                let mats = build_model(&t).all_matrices(&grp).unwrap();
                let chi = galrefl_core::characters::ClassFunction::new(
                    t.label(),
                    build_model(&t).character_values(&grp).unwrap(),
                );
                let assignment: Vec<_> = galois_units(d as u32)
                    .iter()
                    .map(|s| (s.exponent, eta(&grp, s.exponent as i64).unwrap()))
                    .collect();
                let rep = iota_verify(&grp, d as u32, &assignment, &[chi], Some(&mats));
                assert!(rep.holds(), "{spec} {}: {:?}", t.label(), rep.failures);
            }
        }
    }
}

#[test]
fn restricted_models_are_twisted_equivariant() {
    for (m, e, r) in [(4, 2, 2), (3, 3, 3), (6, 3, 2), (4, 4, 2), (6, 6, 2), (2, 2, 3), (4, 2, 3)] {
        let spec = GroupSpec::imprimitive(m, e, r).unwrap();
        let grp = Group::imprimitive(spec).unwrap();
        for (t, i, model) in irreducible_models(&spec).unwrap() {
            let mats = model.all_matrices(&grp).unwrap();
            let chi = galrefl_core::characters::ClassFunction::new("chi", model.character_values(&grp).unwrap());
            let assignment: Vec<_> = galois_units(m)
                .iter()
                .map(|s| (s.exponent, iota_twisted(&grp, s.exponent as i64, i as i64).unwrap()))
                .collect();
            let rep = iota_verify(&grp, m, &assignment, &[chi], Some(&mats));
            assert!(rep.holds(), "{spec} {} θ^{i}: {:?}", t.label(), rep.failures);
        }
    }
}

#[test]
fn swapped_assignment_is_rejected() {
    let grp = g(4, 1, 2);
    let a3 = eta(&grp, 3).unwrap();
    let chi = natural_character(&grp);
    let good = iota_verify(&grp, 4, &[(3, a3.clone())], &[chi.clone()], None);
    assert!(good.holds());
    // images of t and s1 exchanged
    let imgs = a3.generator_images(&grp);
    let swapped: Vec<u32> = vec![imgs[1], imgs[0]];
    let bad = from_images(&grp, &swapped);
    let rep = match bad {
        Some(b) => iota_verify(&grp, 4, &[(3, b)], &[chi], None),
        None => {
            let words = [("t", grp.word_string(imgs[1])), ("s1", grp.word_string(imgs[0]))]
                .into_iter()
                .map(|(a, b)| (a.to_string(), b))
                .collect();
            assert!(from_words(&grp, &words).is_err());
            return;
        }
    };
    assert!(!rep.holds());
}

#[test]
fn wrong_galois_image_fails_equivariance() {
    let grp = g(5, 1, 2);
    let a2 = eta(&grp, 2).unwrap();
    let chi = natural_character(&grp);
    assert!(iota_verify(&grp, 5, &[(2, a2.clone())], &[chi.clone()], None).holds());
    // η(σ_4) has order 2, so it extends to a homomorphism of the cyclic group of order 4
    // but moves χ_V to the wrong Galois conjugate
    let rep = iota_verify(&grp, 5, &[(2, eta(&grp, 4).unwrap())], &[chi.clone()], None);
    assert!(rep.homomorphism);
    assert!(!rep.character_equivariant);
    assert!(!galois_k(2, &chi).same_values(&galois_k(4, &chi)));
}

#[test]
fn conflicting_generator_images_fail_homomorphism() {
    let grp = g(5, 1, 2);
    let chi = natural_character(&grp);
    let rep = iota_verify(&grp, 5, &[(2, eta(&grp, 2).unwrap()), (4, eta(&grp, 2).unwrap())], &[chi], None);
    assert!(!rep.homomorphism);
}
