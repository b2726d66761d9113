//! Automorphisms of small groups as permutations of the element list.
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::characters::ClassFunction;
use crate::cyclotomic::{gcd, GaloisAuto};
use crate::groups::{
    check_relations_with, enumerate, parse_word, Group, GroupError, GroupSpec, MonomialElement,
};
use crate::CycMatrix;

pub const AUT_BOUND: usize = 1000;

#[derive(Debug, Error)]
pub enum AutError {
    #[error("group of order {order} exceeds the automorphism bound {bound}")]
    TooLarge { order: usize, bound: usize },
    #[error("images do not define an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    pub map: Vec<u32>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Self {
        Automorphism { map: (0..n as u32).collect() }
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.map[x as usize]
    }

    /// (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &Self) -> Self {
        Automorphism { map: other.map.iter().map(|&y| self.map[y as usize]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y as usize] = x as u32;
        }
        Automorphism { map }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.map.len()), |acc, _| acc.compose(self))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| x as u32 == y)
    }

    pub fn generator_images(&self, group: &Group) -> Vec<u32> {
        group.generators().iter().map(|&(_, g)| self.apply(g)).collect()
    }

    /// Generator name ↦ word for its image.
    pub fn describe(&self, group: &Group) -> BTreeMap<String, String> {
        group
            .generators()
            .iter()
            .map(|(name, g)| (name.clone(), group.word_string(self.apply(*g))))
            .collect()
    }

    /// Exhaustive check over all pairs.
    pub fn is_multiplicative(&self, group: &Group) -> bool {
        let n = group.order() as u32;
        (0..n).all(|x| (0..n).all(|y| self.apply(group.mul(x, y)) == group.mul(self.apply(x), self.apply(y))))
    }

    pub fn preserves(&self, set: &BTreeSet<u32>) -> bool {
        set.iter().all(|x| set.contains(&self.apply(*x)))
    }
}

/// Extends generator images to a map; `None` unless it is a bijective homomorphism.
pub fn from_images(group: &Group, images: &[u32]) -> Option<Automorphism> {
    let n = group.order();
    let mut map = vec![u32::MAX; n];
    map[group.identity() as usize] = group.identity();
    for (x, p, g) in group.bfs_order() {
        map[x as usize] = group.mul(map[p as usize], images[g as usize]);
    }
    let gens = group.generators();
    for x in 0..n as u32 {
        for (gi, &(_, g)) in gens.iter().enumerate() {
            if map[group.mul(x, g) as usize] != group.mul(map[x as usize], images[gi]) {
                return None;
            }
        }
    }
    let mut seen = vec![false; n];
    for &y in &map {
        if std::mem::replace(&mut seen[y as usize], true) {
            return None;
        }
    }
    Some(Automorphism { map })
}

/// Images given as words in the generators.
pub fn from_words(group: &Group, images: &BTreeMap<String, String>) -> Result<Automorphism, AutError> {
    let mut elems = Vec::new();
    for (name, _) in group.generators() {
        let w = images.get(name).ok_or_else(|| GroupError::MissingGenerator(name.clone()))?;
        elems.push(group.eval_word(&parse_word(w)?)?);
    }
    from_images(group, &elems).ok_or_else(|| {
        let named: BTreeMap<String, u32> =
            group.generators().iter().map(|(n, _)| n.clone()).zip(elems.iter().copied()).collect();
        let failing = check_relations_with(
            group.relations(),
            &named,
            &group.identity(),
            &|a, b| group.mul(*a, *b),
            &|a| group.inv(*a),
            &|a, b| a == b,
        )
        .ok()
        .and_then(|r| r.into_iter().find(|c| !c.holds))
        .map(|c| format!("relation {} fails", c.relation))
        .unwrap_or_else(|| "images do not extend to a bijective homomorphism".to_string());
        AutError::NotAutomorphism(failing)
    })
}

/// Ad g : x ↦ g x g^{-1}.
pub fn inner(group: &Group, g: u32) -> Automorphism {
    let gi = group.inv(g);
    Automorphism { map: (0..group.order() as u32).map(|x| group.mul(group.mul(g, x), gi)).collect() }
}

pub fn inner_automorphisms(group: &Group) -> Vec<Automorphism> {
    let set: BTreeSet<Automorphism> = (0..group.order() as u32).map(|g| inner(group, g)).collect();
    set.into_iter().collect()
}

/// All of Aut(G), sorted. Generator images range over elements with the
/// same order and class size; partial tuples are pruned on orders of
/// pairwise products and quotients.
pub fn aut_group(group: &Group, bound: usize) -> Result<Vec<Automorphism>, AutError> {
    if group.order() > bound {
        return Err(AutError::TooLarge { order: group.order(), bound });
    }
    let gens: Vec<u32> = group.generators().iter().map(|&(_, g)| g).collect();
    let sizes = group.class_sizes();
    let size = |x: u32| sizes[group.class_of(x)];
    let candidates: Vec<Vec<u32>> = gens
        .iter()
        .map(|&g| {
            (0..group.order() as u32)
                .filter(|&y| group.elt_order(y) == group.elt_order(g) && size(y) == size(g))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(gens.len());
    search(group, &gens, &candidates, &mut chosen, &mut out);
    out.sort();
    Ok(out)
}

fn search(group: &Group, gens: &[u32], cands: &[Vec<u32>], chosen: &mut Vec<u32>, out: &mut Vec<Automorphism>) {
    let i = chosen.len();
    if i == gens.len() {
        if let Some(a) = from_images(group, chosen) {
            out.push(a);
        }
        return;
    }
    'next: for &y in &cands[i] {
        for j in 0..i {
            let x = chosen[j];
            if group.elt_order(group.mul(x, y)) != group.elt_order(group.mul(gens[j], gens[i]))
                || group.elt_order(group.mul(group.inv(x), y))
                    != group.elt_order(group.mul(group.inv(gens[j]), gens[i]))
            {
                continue 'next;
            }
        }
        chosen.push(y);
        search(group, gens, cands, chosen, out);
        chosen.pop();
    }
}

/// Index j with χ∘a = irr[j], for each χ.
pub fn irr_permutation(group: &Group, a: &Automorphism, irr: &[ClassFunction]) -> Option<Vec<usize>> {
    let reps = group.class_reps();
    irr.iter()
        .map(|chi| {
            let vals: Vec<_> = reps.iter().map(|&x| chi.values[group.class_of(a.apply(x))].clone()).collect();
            irr.iter().position(|psi| psi.values == vals)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct OuterClass {
    pub representative: Automorphism,
    pub size: usize,
    /// Induced permutation of Irr(G).
    pub signature: Vec<usize>,
    key: Vec<u32>,
}

/// Classes of `auts` modulo Inn(G), keyed by the least conjugate of the
/// generator image tuple.
pub fn outer_classes(group: &Group, auts: &[Automorphism], irr: &[ClassFunction]) -> Vec<OuterClass> {
    let gens: Vec<u32> = group.generators().iter().map(|&(_, g)| g).collect();
    let mut classes: BTreeMap<Vec<u32>, Vec<&Automorphism>> = BTreeMap::new();
    for a in auts {
        let key = (0..group.order() as u32)
            .map(|g| {
                let gi = group.inv(g);
                gens.iter().map(|&s| group.mul(group.mul(g, a.apply(s)), gi)).collect::<Vec<u32>>()
            })
            .min()
            .expect("nonempty group");
        classes.entry(key).or_default().push(a);
    }
    classes
        .into_iter()
        .map(|(key, members)| {
            let rep = members.iter().min().expect("nonempty class");
            OuterClass {
                representative: (*rep).clone(),
                size: members.len(),
                signature: irr_permutation(group, rep, irr).unwrap_or_default(),
                key,
            }
        })
        .collect()
}

pub fn outer_class_key(c: &OuterClass) -> &[u32] {
    &c.key
}

pub fn reflection_set(group: &Group) -> BTreeSet<u32> {
    group.reflections().into_iter().collect()
}

/// The subgroup A of automorphisms preserving the reflections.
pub fn reflection_preserving(group: &Group, auts: &[Automorphism]) -> Vec<Automorphism> {
    let refl = reflection_set(group);
    auts.iter().filter(|a| a.preserves(&refl)).cloned().collect()
}

/// α_χ(g) = g·χ(g)^{-1} for a linear character χ with values in ZG.
#[derive(Clone, Debug)]
pub struct CentralEndomorphism {
    pub character: usize,
    pub map: Vec<u32>,
    pub kernel: Vec<u32>,
    /// z ≠ χ(z) for all z ∈ ZG − {1}.
    pub criterion: bool,
}

impl CentralEndomorphism {
    pub fn is_automorphism(&self) -> bool {
        self.kernel.len() == 1
    }

    pub fn image(&self) -> BTreeSet<u32> {
        self.map.iter().copied().collect()
    }
}

/// Central endomorphisms for every linear character whose values are realized by central scalars.
pub fn central_endomorphisms(group: &Group) -> Vec<CentralEndomorphism> {
    let n = group.order() as u32;
    let mut out = Vec::new();
    for (ci, chi) in group.linear_characters().iter().enumerate() {
        let zs: Option<Vec<u32>> = (0..n).map(|x| group.element_with_scalar(&chi.value(x))).collect();
        let Some(zs) = zs else { continue };
        let map: Vec<u32> = (0..n).map(|x| group.mul(x, group.inv(zs[x as usize]))).collect();
        let kernel: Vec<u32> = (0..n).filter(|&x| map[x as usize] == group.identity()).collect();
        let criterion = (0..n)
            .filter(|&z| z != group.identity())
            .filter_map(|z| group.scalar(z).map(|c| (z, c)))
            .all(|(z, c)| *c != chi.value(z));
        out.push(CentralEndomorphism { character: ci, map, kernel, criterion });
    }
    out
}

/// The subgroup C of central automorphisms, sorted.
pub fn central_automorphisms(group: &Group) -> Vec<Automorphism> {
    let set: BTreeSet<Automorphism> = central_endomorphisms(group)
        .into_iter()
        .filter(|c| c.is_automorphism())
        .map(|c| Automorphism { map: c.map })
        .collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub group: String,
    pub claim: String,
    pub holds: bool,
    pub aut_order: usize,
    pub inn_order: usize,
    pub out_order: usize,
    pub c_order: usize,
    pub a_order: usize,
    pub c_cap_a: usize,
    /// Automorphisms that are not in C·A, as generator images.
    pub witnesses: Vec<BTreeMap<String, String>>,
}

/// Checks Aut(G) = C·A, and C ∩ A = 1 when the rank exceeds 2.
pub fn verify_structure(group: &Group, bound: usize) -> Result<StructureReport, AutError> {
    let auts = aut_group(group, bound)?;
    let c = central_automorphisms(group);
    let a: BTreeSet<Automorphism> = reflection_preserving(group, &auts).into_iter().collect();
    let cinv: Vec<Automorphism> = c.iter().map(|x| x.inverse()).collect();
    let witnesses: Vec<BTreeMap<String, String>> = auts
        .iter()
        .filter(|phi| !cinv.iter().any(|ci| a.contains(&ci.compose(phi))))
        .map(|phi| phi.describe(group))
        .collect();
    let c_cap_a = c.iter().filter(|x| a.contains(x)).count();
    let semidirect = group.dim() > 2;
    let holds = witnesses.is_empty() && (!semidirect || c_cap_a == 1);
    let inn = inner_automorphisms(group).len();
    Ok(StructureReport {
        group: group.label.clone(),
        claim: if semidirect { "Aut(G) = C ⋊ A" } else { "Aut(G) = C·A" }.to_string(),
        holds,
        aut_order: auts.len(),
        inn_order: inn,
        out_order: auts.len() / inn,
        c_order: c.len(),
        a_order: a.len(),
        c_cap_a,
        witnesses,
    })
}

/// Order of the image of Ad t in Out(G(de,e,r)): the least i ≥ 1 with
/// t^{-i}g scalar for some g ∈ G.
pub fn nbar_order(spec: &GroupSpec) -> Result<u32, AutError> {
    let m = spec.de();
    let diag: Vec<MonomialElement> = enumerate(spec, crate::groups::DEFAULT_ENUMERATION_BOUND)?
        .into_iter()
        .filter(|g| g.perm.iter().enumerate().all(|(i, &p)| p as usize == i))
        .collect();
    for i in 1..=m {
        let hit = diag.iter().any(|g| {
            let first = (g.exps[0] + m - i) % m;
            g.exps[1..].iter().all(|&a| a == first)
        });
        if hit {
            return Ok(i);
        }
    }
    Ok(m)
}

/// Ad t^k as an automorphism of G(de,e,r).
pub fn ad_t(group: &Group, k: i64) -> Automorphism {
    Automorphism { map: (0..group.order() as u32).map(|x| group.ad_t(k, x)).collect() }
}

/// Same quantity, by comparing Ad t^i with the inner automorphisms.
pub fn nbar_order_brute(group: &Group) -> u32 {
    let inn: BTreeSet<Automorphism> = inner_automorphisms(group).into_iter().collect();
    let m = group.spec().expect("imprimitive").de();
    (1..=m).find(|&i| inn.contains(&ad_t(group, i as i64))).unwrap_or(m)
}

/// η(gal α): t ↦ t^α, s_k ↦ s_k, i.e. α applied to every monomial entry.
pub fn eta(group: &Group, alpha: i64) -> Result<Automorphism, AutError> {
    let spec = group.spec().ok_or_else(|| AutError::Unsupported("η is defined on G(de,e,r)".into()))?;
    let m = spec.de() as i64;
    if gcd(alpha.rem_euclid(m) as u64, m as u64) != 1 {
        return Err(AutError::Unsupported(format!("{alpha} is not a unit modulo {m}")));
    }
    let mut map = Vec::with_capacity(group.order());
    for x in 0..group.order() as u32 {
        let g = group.monomial(x).expect("monomial");
        let h = MonomialElement {
            perm: g.perm.clone(),
            exps: g.exps.iter().map(|&a| (a as i64 * alpha).rem_euclid(m) as u32).collect(),
        };
        map.push(group.index_of_monomial(&h)?);
    }
    Ok(Automorphism { map })
}

/// ι̃ for ρ_{λ,θ^i}: Ad t^i ∘ η(gal α) ∘ Ad t^{-i}.
pub fn iota_twisted(group: &Group, alpha: i64, i: i64) -> Result<Automorphism, AutError> {
    Ok(ad_t(group, i).compose(&eta(group, alpha)?).compose(&ad_t(group, -i)))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IotaReport {
    pub group: String,
    pub conductor: u32,
    pub automorphisms_valid: bool,
    pub homomorphism: bool,
    pub character_equivariant: bool,
    pub model_equivariant: Option<bool>,
    pub failures: Vec<String>,
}

impl IotaReport {
    pub fn holds(&self) -> bool {
        self.automorphisms_valid
            && self.homomorphism
            && self.character_equivariant
            && self.model_equivariant.unwrap_or(true)
    }
}

/// Extends ι̃ from the listed generators of Γ ⊂ (ℤ/n)^× to the generated
/// subgroup; `Err` names the first exponent reached inconsistently.
pub fn extend_assignment(
    conductor: u32,
    gens: &[(u32, Automorphism)],
    n_elements: usize,
) -> Result<BTreeMap<u32, Automorphism>, u32> {
    let one = 1 % conductor.max(1);
    let mut map: BTreeMap<u32, Automorphism> = BTreeMap::new();
    map.insert(one, Automorphism::identity(n_elements));
    let mut frontier = vec![one];
    while let Some(k) = frontier.pop() {
        for (g, a) in gens {
            let prod = ((k as u64 * *g as u64) % conductor.max(1) as u64) as u32;
            let img = map[&k].compose(a);
            match map.get(&prod) {
                Some(prev) if *prev != img => return Err(prod),
                Some(_) => {}
                None => {
                    map.insert(prod, img);
                    frontier.push(prod);
                }
            }
        }
    }
    Ok(map)
}

/// Verifies a Galois-to-Aut assignment: validity, homomorphism, χ∘ι̃(γ) = γ(χ)
/// on `chars`, and γ(ρ(g)) = ρ(ι̃(γ)(g)) on generators when a model is given
/// (as one matrix per element).
pub fn iota_verify(
    group: &Group,
    conductor: u32,
    assignment: &[(u32, Automorphism)],
    chars: &[ClassFunction],
    model: Option<&[CycMatrix]>,
) -> IotaReport {
    let mut rep = IotaReport { group: group.label.clone(), conductor, ..Default::default() };
    rep.automorphisms_valid = assignment.iter().all(|(k, a)| {
        let ok = a.is_multiplicative(group) && GaloisAuto::new(conductor, *k as i64).is_ok();
        if !ok {
            rep.failures.push(format!("image of σ_{k} is not an automorphism"));
        }
        ok
    });
    let full = match extend_assignment(conductor, assignment, group.order()) {
        Ok(m) => {
            rep.homomorphism = true;
            m
        }
        Err(k) => {
            rep.failures.push(format!("assignment is not a homomorphism at σ_{k}"));
            return rep;
        }
    };
    let reps = group.class_reps();
    rep.character_equivariant = true;
    for (k, a) in &full {
        for chi in chars {
            let lhs: Vec<_> = reps.iter().map(|&x| chi.values[group.class_of(a.apply(x))].clone()).collect();
            let rhs: Vec<_> = chi.values.iter().map(|v| v.galois(*k as i64)).collect();
            if lhs != rhs {
                rep.character_equivariant = false;
                rep.failures.push(format!("χ∘ι̃(σ_{k}) ≠ σ_{k}(χ) for {}", chi.label));
            }
        }
    }
    if let Some(mats) = model {
        let ok = assignment.iter().all(|(k, a)| {
            group.generators().iter().all(|&(_, g)| {
                let good = mats[g as usize].galois(*k as i64) == mats[a.apply(g) as usize];
                if !good {
                    rep.failures.push(format!("model not equivariant for σ_{k}"));
                }
                good
            })
        });
        rep.model_equivariant = Some(ok);
    }
    rep
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralFactorReport {
    pub group: String,
    pub d_rprime: u32,
    pub special_case: bool,
    pub central_order: usize,
    pub factor: String,
    pub direct_product: bool,
    pub max_kernel: usize,
    pub expected_kernel: usize,
    /// Distinct complements of a maximal kernel arising as images of α_χ.
    pub non_abelian_factors: usize,
}

pub fn largest_coprime_factor(d: u32, r: u32) -> u32 {
    let mut x = d;
    loop {
        let g = gcd(x as u64, r as u64) as u32;
        if g == 1 {
            return x;
        }
        x /= g;
    }
}

/// Elements of G(de,e,r) forming the subgroup `hat` = G(m',e',r), embedded
/// by ζ_{m'} ↦ ζ_{de}^{de/m'}.
fn embedded(group: &Group, spec: &GroupSpec, hat: &GroupSpec) -> Result<BTreeSet<u32>, AutError> {
    let scale = spec.de() / hat.de();
    enumerate(hat, crate::groups::DEFAULT_ENUMERATION_BOUND)?
        .into_iter()
        .map(|g| {
            let h = MonomialElement { perm: g.perm, exps: g.exps.iter().map(|&a| a * scale).collect() };
            group.index_of_monomial(&h).map_err(AutError::from)
        })
        .collect()
}

/// Decomposition ℤ/d_{r'} × G(de,d_{r'}e,r) (or ℤ/2d × G(de',de',2) in the
/// special case r = 2, d odd, e = 2e' with e' odd), checked as an internal
/// direct product, plus the brute-force maximal kernel of the α_χ.
pub fn central_factor(spec: &GroupSpec) -> Result<CentralFactorReport, AutError> {
    let group = Group::imprimitive(*spec)?;
    let (d, e, r) = (spec.d, spec.e, spec.r);
    let special = r == 2 && d % 2 == 1 && e % 2 == 0 && (e / 2) % 2 == 1;
    let drp = largest_coprime_factor(d, r);
    let (zorder, hat) = if special {
        let m = d * e / 2;
        (2 * d, GroupSpec::imprimitive(m, m, 2)?)
    } else {
        (drp, GroupSpec::imprimitive(spec.de(), drp * e, r)?)
    };
    let center = group.center();
    let z: BTreeSet<u32> = center.iter().copied().filter(|&x| zorder % group.elt_order(x) == 0).collect();
    let ghat = embedded(&group, spec, &hat)?;
    let closed = ghat.iter().all(|&a| ghat.iter().all(|&b| ghat.contains(&group.mul(a, b))));
    let meet = z.iter().filter(|x| ghat.contains(x)).count();
    let direct_product = z.len() == zorder as usize
        && closed
        && meet == 1
        && z.len() * ghat.len() == group.order()
        && z.iter().all(|&a| ghat.iter().all(|&b| group.mul(a, b) == group.mul(b, a)));
    let ends = central_endomorphisms(&group);
    let max_kernel = ends.iter().map(|c| c.kernel.len()).max().unwrap_or(1);
    let mut factors: BTreeSet<Vec<u32>> = BTreeSet::new();
    for c in ends.iter().filter(|c| c.kernel.len() == max_kernel) {
        let im = c.image();
        let ker: BTreeSet<u32> = c.kernel.iter().copied().collect();
        if im.len() * ker.len() == group.order() && im.intersection(&ker).count() == 1 {
            factors.insert(im.into_iter().collect());
        }
    }
    Ok(CentralFactorReport {
        group: spec.label(),
        d_rprime: drp,
        special_case: special,
        central_order: z.len(),
        factor: hat.label(),
        direct_product,
        max_kernel,
        expected_kernel: zorder as usize,
        non_abelian_factors: factors.len(),
    })
}
