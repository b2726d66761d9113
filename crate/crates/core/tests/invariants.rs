use galrefl_core::groups::{Group, GroupSpec};
use galrefl_core::invariants::*;
use galrefl_core::{CycMatrix, Cyclotomic};
use proptest::prelude::*;

fn imp(m: u32, e: u32, r: u32) -> Group {
    Group::imprimitive(GroupSpec::imprimitive(m, e, r).unwrap()).unwrap()
}

fn mats(g: &Group) -> Vec<CycMatrix> {
    (0..g.order() as u32).map(|x| g.matrix(x)).collect()
}

fn int(k: i64) -> Cyclotomic {
    Cyclotomic::from_i64(k)
}

fn x() -> Poly {
    Poly::var(2, 0)
}

fn y() -> Poly {
    Poly::var(2, 1)
}

fn in_span(basis: &[Poly], f: &Poly) -> bool {
    let mut all = basis.to_vec();
    all.push(f.clone());
    independent_subset(&all).len() == basis.len()
}

#[test]
fn b2_invariants() {
    let g = imp(2, 1, 2);
    let rep = reynolds_invariants(&g, &[2, 4]).unwrap();
    let q = x().pow(2).add(&y().pow(2));
    assert_eq!(rep.bases[0], vec![q.clone()]);
    assert_eq!(rep.bases[1].len(), 2);
    assert!(in_span(&rep.bases[1], &x().pow(4).add(&y().pow(4))));
    assert!(in_span(&rep.bases[1], &x().pow(2).mul(&y().pow(2))));
    assert!(!rep.jacobian.is_zero());
    assert!(!rep.reducible);
    let m = mats(&g);
    assert!(rep.bases.iter().flatten().all(|f| is_invariant(&m, f)));
}

#[test]
fn dihedral_invariants() {
    for e in [3u32, 4, 5, 6] {
        let g = imp(e, e, 2);
        let degrees = reflection_degrees(&g.spec().unwrap());
        assert_eq!(degrees, vec![2, e]);
        let rep = reynolds_invariants(&g, &degrees).unwrap();
        assert!(in_span(&rep.bases[0], &x().mul(&y())));
        assert!(in_span(&rep.bases[1], &x().pow(e).add(&y().pow(e))));
        assert!(!rep.jacobian.is_zero());
    }
}

#[test]
fn symmetric_group_has_linear_invariant() {
    let g = imp(1, 1, 2);
    let rep = reynolds_invariants(&g, &reflection_degrees(&g.spec().unwrap())).unwrap();
    assert!(rep.reducible);
    assert_eq!(rep.bases[0], vec![x().add(&y())]);
}

#[test]
fn rational_invariants_are_kept() {
    let g = imp(2, 1, 2);
    let rep = reynolds_invariants(&g, &[2, 4]).unwrap();
    let out = galois_rationalize(&g, &rep.selected, 4).unwrap();
    assert_eq!(out.lambda, int(1));
    for (f, h) in rep.selected.iter().zip(&out.polys) {
        assert_eq!(h.scale(&Cyclotomic::from_frac(1, 2)), *f);
    }
}

#[test]
fn antisymmetric_input_skips_to_next_lambda() {
    let g = imp(2, 1, 2);
    let rep = reynolds_invariants(&g, &[2, 4]).unwrap();
    let i = Cyclotomic::root(4, 1);
    let twisted: Vec<Poly> = rep.selected.iter().map(|f| f.scale(&i)).collect();
    let out = galois_rationalize(&g, &twisted, 4).unwrap();
    assert!(out.tried > 1);
    assert_eq!(out.lambda, i);
    assert!(out.polys.iter().all(|p| p.is_rational()));
}

#[test]
fn rational_pairs_for_battery() {
    for (m, e, n) in [(2, 1, 4), (3, 3, 3), (4, 4, 4)] {
        let g = imp(m, e, 2);
        let rep = reynolds_invariants(&g, &reflection_degrees(&g.spec().unwrap())).unwrap();
        let z = Cyclotomic::root(n, 1);
        let moved: Vec<Poly> = rep.selected.iter().map(|f| f.scale(&z)).collect();
        let out = galois_rationalize(&g, &moved, n).unwrap();
        assert!(out.polys.iter().all(|p| p.is_rational()));
        assert!(!jacobian(&out.polys).is_zero());
        assert!(out.polys.iter().all(|p| is_invariant(&mats(&g), p)));
    }
}

#[test]
fn discriminant_of_s2() {
    let d = discriminant_rational(&imp(1, 1, 2)).unwrap();
    let diff = x().sub(&y());
    assert!(d.rational.ratio_to(&diff.pow(2)).is_some());
    assert_eq!(d.degree, 2);
}

#[test]
fn discriminant_of_b2() {
    let d = discriminant_rational(&imp(2, 1, 2)).unwrap();
    let expected = x().pow(2).mul(&y().pow(2)).mul(&x().pow(2).sub(&y().pow(2)).pow(2));
    assert!(d.rational.ratio_to(&expected).is_some_and(|c| c.is_rational()));
    assert_eq!(d.hyperplanes.len(), 4);
    assert!(d.hyperplanes.iter().all(|h| h.e_h == 2));
}

#[test]
fn discriminants_are_rational_semi_invariants() {
    for (m, e) in [(2, 1), (3, 3), (4, 4), (3, 1)] {
        let g = imp(m, e, 2);
        let d = discriminant_rational(&g).unwrap();
        assert!(d.rational.is_rational());
        assert!(d.rational.is_homogeneous());
        assert_eq!(d.rational.degree(), Some(d.degree));
        assert!(semi_invariant_factors(&g, &d.rational).is_some());
    }
}

#[test]
fn poly_json_round_trip() {
    let p = x().pow(3).add(&y().scale(&Cyclotomic::root(3, 1)));
    let s = serde_json::to_string(&p).unwrap();
    let back: Poly = serde_json::from_str(&s).unwrap();
    assert_eq!(back, p);
}

fn poly_from(coeffs: &[i64]) -> Poly {
    let mut p = Poly::zero(2);
    for (k, &c) in coeffs.iter().enumerate() {
        let a = (k % 3) as u32;
        let b = (k / 3) as u32;
        p.add_term(vec![a, b], int(c));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn composition_is_multiplicative(a in proptest::collection::vec(-3i64..4, 9), b in proptest::collection::vec(-3i64..4, 9), k in 0u32..32) {
        let g = imp(4, 1, 2);
        let m = g.matrix(k % g.order() as u32);
        let (f, h) = (poly_from(&a), poly_from(&b));
        prop_assert_eq!(f.mul(&h).compose_linear(&m), f.compose_linear(&m).mul(&h.compose_linear(&m)));
        prop_assert!(f.terms.values().all(|c| !c.is_zero()));
    }

    #[test]
    fn reynolds_images_are_invariant(a in proptest::collection::vec(-3i64..4, 9)) {
        let g = imp(3, 1, 2);
        let m = mats(&g);
        prop_assert!(is_invariant(&m, &reynolds(&m, &poly_from(&a))));
    }
}
