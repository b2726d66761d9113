use galrefl_core::characters::{
    inner_product, irr_table, reflection_character_v, sym2_ext2, trivial_character, ClassFunction,
};
use galrefl_core::descent::{all_matrices, is_equivariant, Images};
use galrefl_core::equivariant::*;
use galrefl_core::groups::{Group, GroupSpec};
use galrefl_core::{CycMatrix, Cyclotomic, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn imp(m: u32, e: u32, r: u32) -> Group {
    Group::imprimitive(GroupSpec::imprimitive(m, e, r).unwrap()).unwrap()
}

fn det_character(g: &Group) -> ClassFunction {
    ClassFunction::new("det", g.class_reps().iter().map(|&x| g.matrix(x).det().unwrap()).collect())
}

#[test]
fn trivial_from_v_tensor_dual_of_s3() {
    let g = imp(1, 1, 3);
    let rho = reflection_model(&g).unwrap();
    let dual: Images = rho.iter().map(|(k, m)| (k.clone(), m.inverse().unwrap().transpose())).collect();
    let out = isotypic_extract(&g, &tensor_models(&rho, &dual), &trivial_character(&g)).unwrap();
    assert!(out.values().all(|m| m.rows() == 1 && m.is_identity()));
}

#[test]
fn exterior_square_of_g212() {
    let g = imp(2, 1, 2);
    let rho = reflection_model(&g).unwrap();
    let (_, ext2) = sym2_ext2(&g, &reflection_character_v(&g));
    assert!(ext2.same_values(&det_character(&g)));
    let big = tensor_models(&rho, &rho);
    let p = isotypic_projector(&g, &all_matrices(&g, &big).unwrap(), &ext2);
    assert_eq!(p.rank(), 1);
    let out = isotypic_extract(&g, &big, &ext2).unwrap();
    assert_eq!(model_character(&g, &out).unwrap(), ext2.values);
}

#[test]
fn missing_constituent_is_rejected() {
    let g = imp(2, 1, 2);
    let rho = reflection_model(&g).unwrap();
    let triv = trivial_character(&g);
    let p = isotypic_projector(&g, &all_matrices(&g, &rho).unwrap(), &triv);
    assert!(p.is_zero());
    match isotypic_extract(&g, &rho, &triv) {
        Err(EquivariantError::Multiplicity { multiplicity, .. }) => assert!(multiplicity.is_zero()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn levels() {
    let g = imp(3, 1, 2);
    let v = reflection_character_v(&g);
    assert_eq!(level(&g, &trivial_character(&g), &v).unwrap(), Some(0));
    assert_eq!(level(&g, &v, &v).unwrap(), Some(1));
    let det = det_character(&g);
    let (_, ext2) = sym2_ext2(&g, &v);
    assert!(ext2.same_values(&det));
    assert!(inner_product(&g, &v, &det).unwrap().is_zero());
    assert_eq!(level(&g, &det, &v).unwrap(), Some(2));
}

#[test]
fn level_grows_by_at_most_one_under_tensoring() {
    for g in [imp(3, 1, 2), imp(2, 1, 3), imp(3, 3, 3)] {
        let v = reflection_character_v(&g);
        let irr = irr_table(&g).unwrap();
        let lv: Vec<u32> = irr.iter().map(|c| level(&g, c, &v).unwrap().unwrap()).collect();
        for (i, a) in irr.iter().enumerate() {
            let prod = a.mul(&v);
            for (j, b) in irr.iter().enumerate() {
                if inner_product(&g, &prod, b).unwrap() > Rational::zero() {
                    assert!(lv[j] <= lv[i] + 1);
                }
            }
        }
    }
}

fn bundle(g: &Group) -> ModelBundle {
    let rho0 = reflection_model(g).unwrap();
    let (n, iota) = eta_assignment(g).unwrap();
    assert!(is_equivariant(g, &rho0, &iota, &iota.keys().copied().collect::<Vec<_>>()).unwrap());
    build_by_level(g, &rho0, &iota, n).unwrap()
}

#[test]
fn bundles_are_complete() {
    for (m, e, r, count) in [(3, 1, 2, 9), (2, 1, 2, 5), (4, 1, 2, 14), (3, 3, 3, 10), (1, 1, 4, 5)] {
        let g = imp(m, e, r);
        let b = bundle(&g);
        assert_eq!(b.entries.len(), count, "{}", g.label);
        if e == 1 {
            assert!(b.multiplicity_failures.is_empty(), "{}", g.label);
            assert!(b.entries.iter().all(|x| x.twist.is_none()));
        }
        assert!(b.complete(), "{}: unreachable {:?}", g.label, b.unreachable());
        let root = b.entries.iter().filter(|e| e.parent.is_none()).count();
        assert_eq!(root, 1);
    }
}

#[test]
fn g333_needs_twisted_iota_for_some_characters() {
    let g = imp(3, 3, 3);
    let b = bundle(&g);
    let (_, eta) = eta_assignment(&g).unwrap();
    let irr = irr_table(&g).unwrap();
    let twisted: Vec<&BundleEntry> = b.entries.iter().filter(|x| x.twist.is_some()).collect();
    assert!(!twisted.is_empty());
    for x in twisted {
        assert!(!character_compatible(&g, &irr[x.index], &eta, &[1, 2]));
        assert!(x.equivariant && x.character_matches);
    }
}

#[test]
fn algorithm_l_fixpoints() {
    let a = algorithm_l(&imp(3, 1, 2), &[]).unwrap();
    assert!(a.complete() && a.total == 9 && a.rounds <= 3);
    let s3 = algorithm_l(&imp(1, 1, 3), &[]).unwrap();
    assert!(s3.complete() && s3.total == 3);
    assert_eq!(s3.rounds, 1);
    let c4 = algorithm_l(&imp(4, 1, 1), &[]).unwrap();
    assert!(c4.complete() && c4.total == 4);
    for (m, e, r) in [(2, 1, 2), (4, 1, 2), (3, 3, 3)] {
        assert!(algorithm_l(&imp(m, e, r), &[]).unwrap().complete());
    }
}

#[test]
fn exceptional_set_is_respected() {
    let g = imp(3, 1, 2);
    let full = algorithm_l(&g, &[]).unwrap();
    let excluded = *full.reached.iter().max().unwrap();
    let v = reflection_character_v(&g);
    let irr = irr_table(&g).unwrap();
    if !irr[excluded].same_values(&v) && !irr[excluded].same_values(&trivial_character(&g)) {
        assert!(!algorithm_l(&g, &[excluded]).unwrap().reached.contains(&excluded));
    }
}

fn small_matrix(vals: &[i64]) -> CycMatrix {
    let n = (vals.len() as f64).sqrt() as usize;
    let mut m = CycMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            m.set(i, j, Cyclotomic::from_i64(vals[i * n + j]));
        }
        m.set(i, i, Cyclotomic::from_i64(vals[i * n + i].abs() + 1));
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn conjugated_bundle_models_keep_characters(vals in proptest::collection::vec(-3i64..4, 9)) {
        let g = imp(3, 1, 2);
        let b = bundle(&g);
        for e in &b.entries {
            let model = e.model.as_ref().unwrap();
            let n = model.values().next().unwrap().rows();
            let p = small_matrix(&vals[..n * n]);
            let pi = p.inverse().unwrap();
            let moved: Images = model.iter().map(|(k, m)| (k.clone(), p.dot(m).dot(&pi))).collect();
            prop_assert_eq!(model_character(&g, &moved).unwrap(), model_character(&g, model).unwrap());
        }
    }

    #[test]
    fn extraction_reproduces_the_character(i in 0usize..9, j in 0usize..9) {
        let g = imp(3, 1, 2);
        let b = bundle(&g);
        let irr = irr_table(&g).unwrap();
        let (a, c) = (b.entries[i].model.clone().unwrap(), b.entries[j].model.clone().unwrap());
        let big = tensor_models(&a, &c);
        let prod = irr[i].mul(&irr[j]);
        for chi in &irr {
            if inner_product(&g, &prod, chi).unwrap() == Rational::one() {
                let out = isotypic_extract(&g, &big, chi).unwrap();
                prop_assert_eq!(model_character(&g, &out).unwrap(), chi.values.clone());
            }
        }
    }
}
