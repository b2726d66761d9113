use std::collections::BTreeMap;

use galrefl_core::groups::{
    check_relations_monomial, enumerate, matrix_closure, Group, GroupSpec, MonomialElement,
};
use galrefl_core::{CycMatrix, Cyclotomic};
use proptest::prelude::*;

fn battery() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for d in 1..=4 {
        for e in 1..=4 {
            for r in 1..=4 {
                let s = GroupSpec::new(d, e, r).unwrap();
                if s.order() <= 400 {
                    out.push(s);
                }
            }
        }
    }
    out
}

#[test]
fn orders_and_centers() {
    for spec in battery() {
        let g = Group::imprimitive(spec).unwrap();
        assert_eq!(g.order() as u64, spec.order(), "{spec}");
        if spec.center_formula_applies() {
            assert_eq!(g.center().len() as u64, spec.center_order(), "{spec}");
        } else {
            assert_eq!(g.center().len(), g.order(), "{spec} is abelian");
        }
    }
}

#[test]
fn canonical_generators_satisfy_relations() {
    for spec in battery() {
        let g = Group::imprimitive(spec).unwrap();
        for c in g.check_own_relations().unwrap() {
            assert!(c.holds, "{spec}: {}", c.relation);
        }
    }
}

#[test]
fn generators_generate() {
    for spec in battery() {
        let g = Group::imprimitive(spec).unwrap();
        let reached = 1 + g.bfs_order().len();
        assert_eq!(reached, g.order(), "{spec}");
    }
}

#[test]
fn central_word_generates_center() {
    for spec in battery() {
        if (spec.r < 2 && spec.e > 1) || !spec.center_formula_applies() {
            continue;
        }
        let g = Group::imprimitive(spec).unwrap();
        let z = g.eval_word(&spec.central_word()).unwrap();
        assert!(g.center().contains(&z), "{spec}");
        assert_eq!(g.elt_order(z) as u64, spec.center_order(), "{spec}");
    }
}

#[test]
fn reflections_have_codimension_one() {
    for spec in battery().into_iter().filter(|s| s.order() <= 200) {
        let g = Group::imprimitive(spec).unwrap();
        for x in 0..g.order() as u32 {
            assert_eq!(g.is_reflection(x), g.matrix(x).fixed_codim() == 1, "{spec}");
        }
    }
}

#[test]
fn reflections_of_b2() {
    let g = Group::imprimitive(GroupSpec::imprimitive(2, 1, 2).unwrap()).unwrap();
    assert_eq!(g.reflections().len(), 4);
}

#[test]
fn center_of_g422() {
    let g = Group::imprimitive(GroupSpec::imprimitive(4, 2, 2).unwrap()).unwrap();
    assert_eq!(g.center().len(), 4);
}

#[test]
fn central_word_of_g312_is_scalar() {
    let spec = GroupSpec::imprimitive(3, 1, 2).unwrap();
    let g = Group::imprimitive(spec).unwrap();
    let z = g.eval_word(&spec.central_word()).unwrap();
    assert_eq!(g.matrix(z), CycMatrix::scalar(2, Cyclotomic::root(3, 1)));
}

#[test]
fn small_enumerations() {
    assert_eq!(enumerate(&GroupSpec::imprimitive(3, 1, 2).unwrap(), 100).unwrap().len(), 18);
    assert_eq!(enumerate(&GroupSpec::imprimitive(2, 2, 2).unwrap(), 100).unwrap().len(), 4);
    assert_eq!(enumerate(&GroupSpec::imprimitive(1, 1, 3).unwrap(), 100).unwrap().len(), 6);
    assert!(enumerate(&GroupSpec::imprimitive(4, 1, 4).unwrap(), 10).is_err());
}

#[test]
fn dihedral_element_orders() {
    for e in 3..=6 {
        let spec = GroupSpec::imprimitive(e, e, 2).unwrap();
        let g = Group::imprimitive(spec).unwrap();
        let x = g.mul(g.generator("s1'").unwrap(), g.generator("s1").unwrap());
        assert_eq!(g.elt_order(x), e);
    }
}

#[test]
fn diagonal_subgroup_order() {
    for spec in battery() {
        let elems = enumerate(&spec, 10_000).unwrap();
        let diag: Vec<&MonomialElement> =
            elems.iter().filter(|g| g.perm.iter().enumerate().all(|(i, &p)| p as usize == i)).collect();
        let expected = (spec.d as u64).pow(spec.r) * (spec.e as u64).pow(spec.r - 1);
        assert_eq!(diag.len() as u64, expected);
        let m = spec.de();
        for a in &diag {
            for b in &diag {
                assert!(spec.contains(&a.mul(b, m)));
            }
        }
    }
}

#[test]
fn swapped_images_in_s4() {
    let spec = GroupSpec::imprimitive(1, 1, 4).unwrap();
    let gens: BTreeMap<String, MonomialElement> = spec.generators().into_iter().collect();
    let mut swapped = gens.clone();
    swapped.insert("s1".into(), gens["s2"].clone());
    swapped.insert("s2".into(), gens["s1"].clone());
    let report = check_relations_monomial(&spec.relations(), &swapped, &spec).unwrap();
    let get = |name: &str| report.iter().find(|c| c.relation == name).unwrap().holds;
    assert!(get("s1 s2 s1 = s2 s1 s2"));
    assert!(!get("s1 s3 = s3 s1"));
}

#[test]
fn g423_relations() {
    let spec = GroupSpec::imprimitive(4, 2, 3).unwrap();
    let gens: BTreeMap<String, MonomialElement> = spec.generators().into_iter().collect();
    let report = check_relations_monomial(&spec.relations(), &gens, &spec).unwrap();
    assert!(report.iter().all(|c| c.holds));
}

#[test]
fn closures() {
    let c5 = matrix_closure("C5", &[("a".into(), CycMatrix::diag(vec![Cyclotomic::root(5, 1)]))], 100).unwrap();
    assert_eq!(c5.order(), 5);
    let swap = CycMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
    let sp = MonomialElement::s1_twisted(2, 5).to_matrix(5);
    let d5 = matrix_closure("D5", &[("s'".into(), sp), ("s".into(), swap)], 100).unwrap();
    assert_eq!(d5.order(), 10);
    assert!(matrix_closure("D5", &d5.generators, 5).is_err());
}

proptest! {
    #[test]
    fn monomial_product_matches_matrices(d in 1u32..4, e in 1u32..4, r in 1u32..4, i in 0usize..10_000, j in 0usize..10_000) {
        let spec = GroupSpec::new(d, e, r).unwrap();
        let elems = enumerate(&spec, 100_000).unwrap();
        let a = &elems[i % elems.len()];
        let b = &elems[j % elems.len()];
        let m = spec.de();
        prop_assert_eq!(a.mul(b, m).to_matrix(m), a.to_matrix(m).dot(&b.to_matrix(m)));
        prop_assert!(a.mul(&a.inverse(m), m).is_identity());
        prop_assert!(spec.contains(&a.mul(b, m)));
    }
}
