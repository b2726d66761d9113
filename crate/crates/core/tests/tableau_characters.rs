use galrefl_core::characters::{
    galois_k, galois_orbit, inner_product, irr_table, natural_character, reflection_character_v,
    reflection_characters, sym2_ext2, tensor_data, trivial_character,
};
use galrefl_core::cyclotomic::{euler_phi, gcd};
use galrefl_core::groups::{check_relations_matrices, Group, GroupSpec};
use galrefl_core::tableau::{
    build_model, clifford_split, enumerate_tuples, irreducible_models, reflection_tuples,
    standard_tableaux, PartitionTuple,
};
use galrefl_core::{CycMatrix, Cyclotomic, Rational};
use num_traits::{One, Zero};

fn g(m: u32, e: u32, r: u32) -> Group {
    Group::imprimitive(GroupSpec::imprimitive(m, e, r).unwrap()).unwrap()
}

fn small_specs() -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for d in 1..=4 {
        for e in 1..=4 {
            for r in 1..=3 {
                let s = GroupSpec::new(d, e, r).unwrap();
                if s.order() <= 200 {
                    out.push(s);
                }
            }
        }
    }
    out
}

#[test]
fn sum_of_squared_dimensions() {
    for d in 1..=4usize {
        for r in 1..=3u32 {
            let spec = GroupSpec::new(d as u32, 1, r).unwrap();
            let total: u64 = enumerate_tuples(d, r)
                .iter()
                .map(|t| (standard_tableaux(t).len() as u64).pow(2))
                .sum();
            assert_eq!(total, spec.order());
        }
    }
}

#[test]
fn singleton_box_tableaux() {
    for r in 2..=5 {
        let t = PartitionTuple::new(vec![vec![r - 1], vec![1]]);
        assert_eq!(standard_tableaux(&t).len() as u32, r);
    }
}

#[test]
fn models_satisfy_presentation() {
    for d in 1..=4usize {
        for r in 1..=3u32 {
            let spec = GroupSpec::new(d as u32, 1, r).unwrap();
            for t in enumerate_tuples(d, r) {
                let m = build_model(&t);
                for c in check_relations_matrices(&spec.relations(), &m.images).unwrap() {
                    assert!(c.holds, "{} {}: {}", spec, t.label(), c.relation);
                }
            }
        }
    }
}

#[test]
fn restricted_models_satisfy_presentation() {
    for spec in small_specs().into_iter().filter(|s| s.e > 1 && s.r >= 2) {
        for (t, i, m) in irreducible_models(&spec).unwrap() {
            for c in check_relations_matrices(&spec.relations(), &m.images).unwrap() {
                assert!(c.holds, "{} {}^{i}: {}", spec, t.label(), c.relation);
            }
        }
    }
}

#[test]
fn orthonormal_tables() {
    for spec in small_specs() {
        let grp = Group::imprimitive(spec).unwrap();
        let irr = irr_table(&grp).unwrap();
        assert_eq!(irr.len(), grp.classes().len(), "{spec}");
        assert!(irr[0].same_values(&trivial_character(&grp)));
        for (i, a) in irr.iter().enumerate() {
            for (j, b) in irr.iter().enumerate() {
                let expected = if i == j { Rational::one() } else { Rational::zero() };
                assert_eq!(inner_product(&grp, a, b).unwrap(), expected, "{spec} {i} {j}");
            }
        }
    }
}

#[test]
fn column_orthogonality() {
    for grp in [g(3, 1, 2), g(4, 2, 2), g(3, 3, 3)] {
        let irr = irr_table(&grp).unwrap();
        let k = grp.classes().len();
        for c in 0..k {
            for c2 in 0..k {
                let s = irr.iter().fold(Cyclotomic::zero(), |acc, chi| {
                    acc + &chi.values[c] * &chi.values[c2].conj()
                });
                let expected = if c == c2 { (grp.order() / grp.classes()[c].len()) as i64 } else { 0 };
                assert_eq!(s, Cyclotomic::from_i64(expected));
            }
        }
    }
}

#[test]
fn trace_formula_matches_models() {
    for spec in small_specs().into_iter().filter(|s| s.e > 1 && s.r >= 2) {
        let grp = Group::imprimitive(spec).unwrap();
        for (t, i, m) in irreducible_models(&spec).unwrap() {
            let c = clifford_split(&t, &spec).unwrap();
            assert_eq!(m.character_values(&grp).unwrap(), c.character_by_trace(&grp, i).unwrap());
        }
    }
}

#[test]
fn twisted_characters_follow_ad_t() {
    for spec in small_specs().into_iter().filter(|s| s.e > 1 && s.r >= 2) {
        let grp = Group::imprimitive(spec).unwrap();
        for (t, i, m) in irreducible_models(&spec).unwrap() {
            if i == 0 {
                continue;
            }
            let base = clifford_split(&t, &spec).unwrap().restricted_model(0).unwrap();
            let base_mats = base.all_matrices(&grp).unwrap();
            let mats = m.all_matrices(&grp).unwrap();
            for x in 0..grp.order() as u32 {
                let y = grp.ad_t(-(i as i64), x);
                assert_eq!(mats[x as usize].trace().unwrap(), base_mats[y as usize].trace().unwrap());
            }
        }
    }
}

#[test]
fn clifford_operator_properties() {
    for spec in small_specs().into_iter().filter(|s| s.e > 1 && s.r >= 2) {
        for t in enumerate_tuples(spec.de() as usize, spec.r) {
            let c = clifford_split(&t, &spec).unwrap();
            let amb = c.ambient_model();
            let s = &c.s;
            let tm = &amb.images["t"];
            for (name, a) in &amb.images {
                if name != "t" {
                    assert_eq!(s.dot(a), a.dot(s));
                }
            }
            let s1p = tm.inverse().unwrap().dot(&amb.images["s1"]).dot(tm);
            assert_eq!(s.dot(&s1p), s1p.dot(s));
            assert_eq!(s.dot(tm), tm.dot(s).scale(&c.theta));
            let n = c.basis.len();
            let mut total = CycMatrix::zeros(n, n);
            for i in 0..c.stabilizer_order {
                let p = c.projector(i).unwrap();
                assert_eq!(p.dot(&p), p);
                total = total.add(&p).unwrap();
            }
            assert!(total.is_identity());
        }
    }
}

#[test]
fn g222_splits_into_linear_characters() {
    let spec = GroupSpec::imprimitive(2, 2, 2).unwrap();
    let grp = Group::imprimitive(spec).unwrap();
    let t = PartitionTuple::new(vec![vec![1], vec![1]]);
    let c = clifford_split(&t, &spec).unwrap();
    assert_eq!(c.b, 1);
    let a = c.restricted_model(0).unwrap().character_values(&grp).unwrap();
    let b = c.restricted_model(1).unwrap().character_values(&grp).unwrap();
    assert_ne!(a, b);
    let lin: Vec<Vec<Cyclotomic>> = grp
        .linear_characters()
        .iter()
        .map(|l| grp.class_reps().iter().map(|&x| l.value(x)).collect())
        .collect();
    assert_eq!(lin.len(), 4);
    assert!(lin.contains(&a) && lin.contains(&b));
}

#[test]
fn inertia_group_of_central_tuple() {
    // λ_i = {r/v} at multiples of de/v has stabilizer of order v = gcd(e,r)
    for (m, e, r) in [(3, 3, 3), (4, 2, 2), (2, 2, 4), (6, 3, 3)] {
        let spec = GroupSpec::imprimitive(m, e, r).unwrap();
        let v = gcd(e as u64, r as u64) as u32;
        let mut parts = vec![Vec::new(); m as usize];
        for k in 0..v {
            parts[(k * m / v) as usize] = vec![r / v];
        }
        let c = clifford_split(&PartitionTuple::new(parts), &spec).unwrap();
        assert_eq!(c.stabilizer_order, v);
    }
}

#[test]
fn lambda_one_model_matches_natural_character() {
    for (m, e, r) in [(3, 1, 2), (4, 1, 3), (4, 2, 2), (3, 3, 3), (6, 3, 2)] {
        let spec = GroupSpec::imprimitive(m, e, r).unwrap();
        let grp = Group::imprimitive(spec).unwrap();
        let t = reflection_tuples(m as usize, r)[0].clone();
        let c = clifford_split(&t, &spec).unwrap();
        assert_eq!(c.stabilizer_order, 1);
        let model = if e == 1 { build_model(&t) } else { c.restricted_model(0).unwrap() };
        assert_eq!(model.character_values(&grp).unwrap(), natural_character(&grp).values);
    }
}

#[test]
fn reflection_tuple_counts() {
    assert_eq!(reflection_tuples(4, 3).len(), 2);
    assert_eq!(reflection_tuples(2, 2).len(), 1);
    for d in 2..=12 {
        assert_eq!(reflection_tuples(d, 3).len() as u32, euler_phi(d as u32));
    }
}

#[test]
fn reflection_models_send_reflections_to_reflections() {
    let grp = g(3, 1, 2);
    let t = &reflection_tuples(3, 2)[0];
    let m = build_model(t);
    assert_eq!(m.images["t"].fixed_codim(), 1);
    assert_eq!(m.images["s1"].fixed_codim(), 1);
    let mats = m.all_matrices(&grp).unwrap();
    for x in grp.reflections() {
        assert_eq!(mats[x as usize].fixed_codim(), 1);
    }
}

#[test]
fn galois_shift_is_compatible_with_models() {
    for d in 2..=4usize {
        let spec = GroupSpec::new(d as u32, 1, 2).unwrap();
        let grp = Group::imprimitive(spec).unwrap();
        for t in enumerate_tuples(d, 2) {
            let chi = build_model(&t).character_values(&grp).unwrap();
            for i in (1..d as i64).filter(|&i| gcd(i as u64, d as u64) == 1) {
                let lhs: Vec<Cyclotomic> = chi.iter().map(|v| v.galois(i)).collect();
                let rhs = build_model(&t.galois_shift(i)).character_values(&grp).unwrap();
                assert_eq!(lhs, rhs, "d={d} {} i={i}", t.label());
            }
        }
    }
}

#[test]
fn galois_shift_examples() {
    let l1 = &reflection_tuples(4, 2)[0];
    assert_eq!(&l1.galois_shift(3), &reflection_tuples(4, 2)[1]);
    let t = PartitionTuple::new(vec![vec![1], vec![], vec![1], vec![], vec![1]]);
    assert_eq!(t.galois_shift(2).galois_shift(3), t.galois_shift(6));
    assert_eq!(t.galois_shift(1), t);
    let mut s = t.clone();
    for _ in 0..5 {
        s = s.shift_sigma(1);
    }
    assert_eq!(s, t);
}

#[test]
fn known_table_sizes() {
    assert_eq!(irr_table(&g(3, 1, 2)).unwrap().len(), 9);
    let s4 = irr_table(&g(1, 1, 4)).unwrap();
    let mut dims: Vec<Cyclotomic> = s4.iter().map(|c| c.degree().clone()).collect();
    dims.sort_by_key(|d| d.to_rational().unwrap());
    assert_eq!(dims, [1, 1, 2, 3, 3].map(Cyclotomic::from_i64));
}

#[test]
fn reflection_characters_are_galois_orbits() {
    for (m, e, r) in [(4, 1, 2), (3, 1, 3), (4, 2, 2), (3, 3, 3), (3, 3, 2), (4, 4, 2), (5, 5, 2), (6, 6, 2), (1, 1, 4)] {
        let grp = g(m, e, r);
        let irr = irr_table(&grp).unwrap();
        let refl = reflection_characters(&grp, &irr);
        let orbit = galois_orbit(&reflection_character_v(&grp), m.max(1));
        assert_eq!(refl.len(), orbit.len(), "G({m},{e},{r})");
        for c in &orbit {
            assert!(refl.iter().any(|x| x.same_values(c)), "G({m},{e},{r})");
        }
    }
}

#[test]
fn galois_orbit_of_v_for_g412() {
    let grp = g(4, 1, 2);
    assert_eq!(galois_orbit(&natural_character(&grp), 4).len(), 2);
}

#[test]
fn natural_character_of_g312() {
    let grp = g(3, 1, 2);
    let chi = natural_character(&grp);
    assert_eq!(chi.values[0], Cyclotomic::from_i64(2));
    let t = grp.generator("t").unwrap();
    assert_eq!(chi.values[grp.class_of(t)], Cyclotomic::one() + Cyclotomic::root(3, 1));
    assert_eq!(inner_product(&grp, &chi, &chi).unwrap(), Rational::one());
}

#[test]
fn galois_permutes_irreducibles() {
    for grp in [g(3, 1, 2), g(4, 2, 2), g(3, 3, 3)] {
        let irr = irr_table(&grp).unwrap();
        for k in [1i64, 5, 7, 11] {
            for chi in &irr {
                let img = galois_k(k, chi);
                assert!(irr.iter().any(|x| x.same_values(&img)));
            }
        }
    }
}

#[test]
fn regular_character_identity() {
    let grp = g(2, 1, 2);
    let mut reg = vec![Cyclotomic::zero(); grp.classes().len()];
    reg[0] = Cyclotomic::from_i64(grp.order() as i64);
    let reg = galrefl_core::characters::ClassFunction::new("reg", reg);
    for chi in irr_table(&grp).unwrap() {
        assert_eq!(Cyclotomic::from_rational(inner_product(&grp, &reg, &chi).unwrap()), chi.values[0]);
    }
}

#[test]
fn multiplicity_bound_and_exterior_square() {
    for (d, r) in [(2, 2), (3, 2), (2, 3), (3, 3), (1, 3), (4, 2)] {
        let grp = g(d, 1, r);
        let irr = irr_table(&grp).unwrap();
        let v = reflection_character_v(&grp);
        for a in &irr {
            let mults = tensor_data(&grp, &irr, a, &v).unwrap();
            for (b, m) in irr.iter().zip(&mults) {
                if !a.same_values(b) {
                    assert!(*m <= Rational::one());
                }
            }
        }
        let (s2, l2) = sym2_ext2(&grp, &v);
        assert_eq!(s2.add(&l2).values, v.mul(&v).values);
        assert_eq!(inner_product(&grp, &l2, &l2).unwrap(), Rational::one());
    }
}
