//! Equivariant models of all irreducibles from one equivariant model of the
//! reflection representation: isotypic projectors, levels and the fixpoint
//! algorithm on tensor products with ρ₀.
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::automorphisms::{eta, iota_twisted, Automorphism};
use crate::characters::{
    inner_product, irr_table, natural_character, reflection_character_v, trivial_character, CharError,
    ClassFunction,
};
use crate::cyclotomic::{gcd, rational_to_string, Cyclotomic, Rational};
use crate::descent::{
    all_matrices, auto_tower, descend_tower, is_equivariant, DescentError, Images, DEFAULT_NORM_HEIGHT,
};
use crate::groups::Group;
use crate::linalg::CycMatrix;

#[derive(Debug, Error)]
pub enum EquivariantError {
    #[error("multiplicity of {label} is {multiplicity}, expected 1")]
    Multiplicity { label: String, multiplicity: Rational },
    #[error("projector is not idempotent or has the wrong rank")]
    BadProjector,
    #[error("{0} has no irreducible reflection representation")]
    NoReflection(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Descent(#[from] DescentError),
}

/// Character of a model on the classes of `group`.
pub fn model_character(group: &Group, images: &Images) -> Result<Vec<Cyclotomic>, EquivariantError> {
    let mats = all_matrices(group, images)?;
    Ok(group.class_reps().iter().map(|&x| mats[x as usize].trace().expect("square").canonicalize()).collect())
}

/// p = (χ(1)/|G|) Σ_g χ(g^{-1}) ρ(g).
pub fn isotypic_projector(group: &Group, mats: &[CycMatrix], chi: &ClassFunction) -> CycMatrix {
    let n = mats[0].rows();
    let mut p = CycMatrix::zeros(n, n);
    for (x, m) in mats.iter().enumerate() {
        let c = &chi.values[group.class_of(group.inv(x as u32))];
        if !c.is_zero() {
            p = p.add(&m.scale(c)).expect("same size");
        }
    }
    let f = chi.degree().scale(&Rational::new(1.into(), (group.order() as i64).into()));
    p.scale(&f).canonicalize()
}

/// Restricts `big` to the χ-isotypic component, which must be irreducible.
/// The basis is the leftmost independent columns of p.
pub fn isotypic_extract(group: &Group, big: &Images, chi: &ClassFunction) -> Result<Images, EquivariantError> {
    let mats = all_matrices(group, big)?;
    let big_chi = ClassFunction::new(
        "big",
        group.class_reps().iter().map(|&x| mats[x as usize].trace().expect("square")).collect(),
    );
    let mult = inner_product(group, &big_chi, chi)?;
    if mult != Rational::one() {
        return Err(EquivariantError::Multiplicity { label: chi.label.clone(), multiplicity: mult });
    }
    let p = isotypic_projector(group, &mats, chi);
    let deg = chi.degree().to_rational().ok_or(EquivariantError::BadProjector)?;
    let k = usize::try_from(deg.to_integer()).map_err(|_| EquivariantError::BadProjector)?;
    if p.dot(&p) != p || p.rank() != k {
        return Err(EquivariantError::BadProjector);
    }
    let (_, pivots) = p.rref();
    let cols: Vec<Vec<Cyclotomic>> = pivots.iter().map(|&j| p.column(j)).collect();
    let basis = CycMatrix::from_rows(cols).transpose();
    let (_, row_pivots) = basis.transpose().rref();
    let square = CycMatrix::from_rows(row_pivots.iter().map(|&i| basis.row(i).to_vec()).collect());
    let square_inv = square.inverse().map_err(|_| EquivariantError::BadProjector)?;
    let mut out = Images::new();
    for (name, m) in big {
        let image = m.dot(&basis);
        let rows = CycMatrix::from_rows(row_pivots.iter().map(|&i| image.row(i).to_vec()).collect());
        out.insert(name.clone(), square_inv.dot(&rows).canonicalize());
    }
    Ok(out)
}

/// Kronecker product of two models, generator by generator.
pub fn tensor_models(a: &Images, b: &Images) -> Images {
    a.iter().map(|(k, m)| (k.clone(), m.kronecker(&b[k]))).collect()
}

/// Least n with ⟨χ, χ_V^n⟩ ≥ 1; None if no power below |G| contains χ.
pub fn level(group: &Group, chi: &ClassFunction, chi_v: &ClassFunction) -> Result<Option<u32>, EquivariantError> {
    let mut power = trivial_character(group);
    for n in 0..=group.order() as u32 {
        if inner_product(group, &power, chi)? > Rational::zero() {
            return Ok(Some(n));
        }
        power = power.mul(chi_v);
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityFailure {
    pub left: usize,
    pub right: usize,
    pub multiplicity: String,
}

/// Pairs (i, j) with ⟨χ_i ⊗ χ_V, χ_j⟩ > 1 for i ≠ j.
pub fn multiplicity_failures(
    group: &Group,
    irr: &[ClassFunction],
    chi_v: &ClassFunction,
) -> Result<Vec<MultiplicityFailure>, EquivariantError> {
    let mut out = Vec::new();
    for (i, a) in irr.iter().enumerate() {
        let prod = a.mul(chi_v);
        for (j, b) in irr.iter().enumerate() {
            if i == j {
                continue;
            }
            let m = inner_product(group, &prod, b)?;
            if m > Rational::one() {
                out.push(MultiplicityFailure { left: i, right: j, multiplicity: rational_to_string(&m) });
            }
        }
    }
    Ok(out)
}

/// η on a G(de,e,r) for every unit modulo de; the trivial assignment on other groups.
pub fn eta_assignment(group: &Group) -> Result<(u32, BTreeMap<u32, Automorphism>), EquivariantError> {
    let Some(spec) = group.spec() else {
        return Ok((1, BTreeMap::from([(0, Automorphism::identity(group.order()))])));
    };
    let n = spec.de();
    let mut out = BTreeMap::new();
    for k in (1..n.max(2)).filter(|&k| gcd(k as u64, n as u64) == 1) {
        out.insert(k % n.max(1), eta(group, k as i64).map_err(|e| DescentError::from(e))?);
    }
    Ok((n, out))
}

/// The reflection model: the natural matrices, with the trivial summand removed
/// for symmetric groups.
pub fn reflection_model(group: &Group) -> Result<Images, EquivariantError> {
    let natural: Images = group.generators().iter().map(|(n, g)| (n.clone(), group.matrix(*g))).collect();
    let v = reflection_character_v(group);
    if v.same_values(&natural_character(group)) {
        return Ok(natural);
    }
    isotypic_extract(group, &natural, &v)
}

/// χ(a_γ(g)) = γ(χ(g)) for every γ and every class.
pub fn character_compatible(
    group: &Group,
    chi: &ClassFunction,
    iota: &BTreeMap<u32, Automorphism>,
    exps: &[u32],
) -> bool {
    exps.iter().all(|k| {
        iota.get(k).is_some_and(|a| {
            group.class_reps().iter().enumerate().all(|(c, &x)| {
                chi.values[group.class_of(a.apply(x))] == chi.values[c].galois(*k as i64)
            })
        })
    })
}

struct Fixed {
    model: Images,
    twist: Option<i64>,
    descended: bool,
    equivariant: bool,
}

/// Keeps an η-equivariant model; otherwise tries ι̃ = Ad t^i ∘ η ∘ Ad t^{-i}
/// for i = 1, 2, … (first character-compatible twist), descending if needed.
fn make_equivariant(
    group: &Group,
    model: Images,
    chi: &ClassFunction,
    iota: &BTreeMap<u32, Automorphism>,
    exps: &[u32],
    conductor: u32,
) -> Result<Fixed, EquivariantError> {
    if is_equivariant(group, &model, iota, exps)? {
        return Ok(Fixed { model, twist: None, descended: false, equivariant: true });
    }
    let Some(spec) = group.spec() else {
        return Ok(Fixed { model, twist: None, descended: false, equivariant: false });
    };
    for i in 0..spec.e as i64 {
        let twisted: BTreeMap<u32, Automorphism> = exps
            .iter()
            .map(|&k| Ok((k, iota_twisted(group, k as i64, i).map_err(DescentError::from)?)))
            .collect::<Result<_, EquivariantError>>()?;
        if !character_compatible(group, chi, &twisted, exps) {
            continue;
        }
        if is_equivariant(group, &model, &twisted, exps)? {
            return Ok(Fixed { model, twist: Some(i), descended: false, equivariant: true });
        }
        if let Ok((out, report)) =
            descend_tower(group, &model, &twisted, conductor, &auto_tower(conductor), DEFAULT_NORM_HEIGHT)
        {
            return Ok(Fixed { model: out, twist: Some(i), descended: true, equivariant: report.equivariant });
        }
    }
    Ok(Fixed { model, twist: None, descended: false, equivariant: false })
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleEntry {
    pub index: usize,
    pub label: String,
    pub level: Option<u32>,
    pub parent: Option<usize>,
    /// ι̃_χ = Ad t^i ∘ η ∘ Ad t^{-i} when the model is not η-equivariant.
    pub twist: Option<i64>,
    /// The extracted model was conjugated by Galois descent.
    pub descended: bool,
    pub model: Option<Images>,
    pub character_matches: bool,
    pub equivariant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelBundle {
    pub group: String,
    pub conductor: u32,
    pub multiplicity_failures: Vec<MultiplicityFailure>,
    pub entries: Vec<BundleEntry>,
}

impl ModelBundle {
    pub fn complete(&self) -> bool {
        self.entries.iter().all(|e| e.model.is_some() && e.character_matches && e.equivariant)
    }

    pub fn unreachable(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| e.model.is_none()).map(|e| e.index).collect()
    }
}

/// Builds every irreducible in level order, each from the first built
/// character ψ of the previous level with ⟨ψ ⊗ χ_V, χ⟩ = 1. When no such ψ
/// exists, any built ψ is tried, and passes repeat until nothing new is built.
pub fn build_by_level(
    group: &Group,
    rho0: &Images,
    iota: &BTreeMap<u32, Automorphism>,
    conductor: u32,
) -> Result<ModelBundle, EquivariantError> {
    let irr = irr_table(group)?;
    let chi_v = ClassFunction::new("V", model_character(group, rho0)?);
    let exps: Vec<u32> = iota.keys().copied().collect();
    let trivial = trivial_character(group);
    let mut entries: Vec<BundleEntry> = Vec::new();
    for (i, chi) in irr.iter().enumerate() {
        entries.push(BundleEntry {
            index: i,
            label: chi.label.clone(),
            level: level(group, chi, &chi_v)?,
            parent: None,
            twist: None,
            descended: false,
            model: None,
            character_matches: false,
            equivariant: false,
        });
    }
    let mut order: Vec<usize> = (0..irr.len()).filter(|&i| entries[i].level.is_some()).collect();
    order.sort_by_key(|&i| (entries[i].level, i));
    let one: Images = group.generators().iter().map(|(n, _)| (n.clone(), CycMatrix::identity(1))).collect();
    loop {
        let mut progress = false;
        for &i in &order {
            if entries[i].model.is_some() {
                continue;
            }
            let chi = &irr[i];
            let lv = entries[i].level.expect("filtered");
            let built = if lv == 0 {
                if !chi.same_values(&trivial) {
                    continue;
                }
                Some((None, one.clone()))
            } else {
                let mut candidates: Vec<usize> =
                    order.iter().copied().filter(|&j| entries[j].level == Some(lv - 1)).collect();
                candidates.extend(order.iter().copied().filter(|&j| entries[j].level != Some(lv - 1)));
                let mut found = None;
                for j in candidates {
                    let Some(parent) = entries[j].model.clone() else { continue };
                    if inner_product(group, &irr[j].mul(&chi_v), chi)? != Rational::one() {
                        continue;
                    }
                    let big = tensor_models(&parent, rho0);
                    found = Some((Some(j), isotypic_extract(group, &big, chi)?));
                    break;
                }
                found
            };
            if let Some((parent, model)) = built {
                let fixed = make_equivariant(group, model, chi, iota, &exps, conductor)?;
                let e = &mut entries[i];
                e.character_matches = model_character(group, &fixed.model)? == chi.values;
                e.equivariant = fixed.equivariant;
                e.twist = fixed.twist;
                e.descended = fixed.descended;
                e.parent = parent;
                e.model = Some(fixed.model);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    Ok(ModelBundle {
        group: group.label.clone(),
        conductor,
        multiplicity_failures: multiplicity_failures(group, &irr, &chi_v)?,
        entries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmL {
    pub reached: BTreeSet<usize>,
    pub rounds: usize,
    pub total: usize,
}

impl AlgorithmL {
    pub fn complete(&self) -> bool {
        self.reached.len() == self.total
    }
}

/// L ← {1, ρ₀}; repeatedly add every ρ ∉ ℰ with ⟨ρ′ ⊗ ρ₀, ρ⟩ = 1 for some ρ′ ∈ L.
/// `rounds` counts the rounds that enlarged L.
pub fn algorithm_l(group: &Group, exceptional: &[usize]) -> Result<AlgorithmL, EquivariantError> {
    let irr = irr_table(group)?;
    let chi_v = reflection_character_v(group);
    let find = |c: &ClassFunction| irr.iter().position(|x| x.same_values(c));
    let t = find(&trivial_character(group)).expect("trivial character");
    let v = find(&chi_v).ok_or_else(|| EquivariantError::NoReflection(group.label.clone()))?;
    let mut reached = BTreeSet::from([t, v]);
    let mut rounds = 0;
    loop {
        let mut next = reached.clone();
        for &a in &reached {
            let prod = irr[a].mul(&chi_v);
            for (j, b) in irr.iter().enumerate() {
                if !exceptional.contains(&j) && inner_product(group, &prod, b)? == Rational::one() {
                    next.insert(j);
                }
            }
        }
        if next == reached {
            break;
        }
        reached = next;
        rounds += 1;
    }
    Ok(AlgorithmL { reached, rounds, total: irr.len() })
}
