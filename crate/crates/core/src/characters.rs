//! Class functions, character tables, Galois action on characters, and
//! reflection characters.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{galois_units, lcm, CycError, Cyclotomic, GaloisAuto, Rational};
use crate::groups::Group;
use crate::tableau::{irreducible_models, TableauError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("class functions have {0} and {1} values")]
    Mismatch(usize, usize),
    #[error("inner product is not rational")]
    NotRational,
    #[error("could not split the character table: found {found} of {classes} irreducibles")]
    Incomplete { found: usize, classes: usize },
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Field(#[from] CycError),
}

/// Values on the classes of a group, in the group's class order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassFunction {
    pub label: String,
    pub values: Vec<Cyclotomic>,
}

impl ClassFunction {
    pub fn new(label: impl Into<String>, values: Vec<Cyclotomic>) -> Self {
        ClassFunction { label: label.into(), values: values.iter().map(|v| v.canonicalize()).collect() }
    }

    pub fn degree(&self) -> &Cyclotomic {
        &self.values[0]
    }

    pub fn conductor(&self) -> u32 {
        self.values.iter().fold(1, |acc, v| lcm(acc, v.conductor()))
    }

    pub fn same_values(&self, other: &ClassFunction) -> bool {
        self.values == other.values
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ClassFunction) -> ClassFunction {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, q: &Rational) -> ClassFunction {
        ClassFunction::new(self.label.clone(), self.values.iter().map(|v| v.scale(q)).collect())
    }

    fn zip(&self, other: &ClassFunction, f: impl Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic) -> ClassFunction {
        ClassFunction::new(
            String::new(),
            self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        )
    }

    pub fn conj(&self) -> ClassFunction {
        ClassFunction::new(format!("conj {}", self.label), self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

pub fn trivial_character(group: &Group) -> ClassFunction {
    ClassFunction::new("1", vec![Cyclotomic::one(); group.classes().len()])
}

pub fn natural_character(group: &Group) -> ClassFunction {
    ClassFunction::new("natural", group.natural_character_values())
}

/// ⟨a, b⟩ = (1/|G|) Σ |C| a(C) conj(b(C)).
pub fn inner_product(group: &Group, a: &ClassFunction, b: &ClassFunction) -> Result<Rational, CharError> {
    if a.values.len() != b.values.len() || a.values.len() != group.classes().len() {
        return Err(CharError::Mismatch(a.values.len(), b.values.len()));
    }
    let mut acc = Cyclotomic::zero();
    for ((x, y), size) in a.values.iter().zip(&b.values).zip(group.class_sizes()) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc + (x * &y.conj()).scale(&Rational::from_integer((size as i64).into()));
    }
    let acc = acc.scale(&Rational::new(1.into(), (group.order() as i64).into()));
    acc.to_rational().ok_or(CharError::NotRational)
}

pub fn norm(group: &Group, a: &ClassFunction) -> Result<Rational, CharError> {
    inner_product(group, a, a)
}

/// Entrywise action of a Galois automorphism of a field containing the values.
pub fn galois_on_character(s: &GaloisAuto, a: &ClassFunction) -> Result<ClassFunction, CharError> {
    let values = a.values.iter().map(|v| s.apply(v)).collect::<Result<Vec<_>, _>>()?;
    Ok(ClassFunction::new(format!("gal{} {}", s.exponent, a.label), values))
}

/// Entrywise ζ ↦ ζ^k; k must be prime to every value conductor.
pub fn galois_k(k: i64, a: &ClassFunction) -> ClassFunction {
    ClassFunction::new(format!("gal{k} {}", a.label), a.values.iter().map(|v| v.galois(k)).collect())
}

/// Distinct Galois conjugates of a class function, in ascending exponent order.
pub fn galois_orbit(a: &ClassFunction, conductor: u32) -> Vec<ClassFunction> {
    let mut out: Vec<ClassFunction> = Vec::new();
    for g in galois_units(conductor) {
        let c = galois_k(g.exponent as i64, a);
        if !out.iter().any(|x| x.same_values(&c)) {
            out.push(c);
        }
    }
    out
}

/// χ_{S²} and χ_{Λ²}.
pub fn sym2_ext2(group: &Group, chi: &ClassFunction) -> (ClassFunction, ClassFunction) {
    let sq = group.power_map(2);
    let half = Rational::new(1.into(), 2.into());
    let mut s = Vec::new();
    let mut e = Vec::new();
    for (c, v) in chi.values.iter().enumerate() {
        let v2 = v * v;
        let w = &chi.values[sq[c]];
        s.push((&v2 + w).scale(&half));
        e.push((&v2 - w).scale(&half));
    }
    (
        ClassFunction::new(format!("S2 {}", chi.label), s),
        ClassFunction::new(format!("L2 {}", chi.label), e),
    )
}

/// Multiplicities of every irreducible in a·b.
pub fn tensor_data(
    group: &Group,
    irr: &[ClassFunction],
    a: &ClassFunction,
    b: &ClassFunction,
) -> Result<Vec<Rational>, CharError> {
    let p = a.mul(b);
    irr.iter().map(|chi| inner_product(group, &p, chi)).collect()
}

pub fn decompose(group: &Group, irr: &[ClassFunction], a: &ClassFunction) -> Result<Vec<Rational>, CharError> {
    irr.iter().map(|chi| inner_product(group, a, chi)).collect()
}

/// Irr(G). For G(de,e,r) from the Clifford-restricted tableau models; for
/// explicit groups by splitting tensor products of the natural character.
/// The trivial character comes first.
pub fn irr_table(group: &Group) -> Result<Vec<ClassFunction>, CharError> {
    let mut rows = match group.spec() {
        Some(spec) => {
            let mut rows = Vec::new();
            for (t, i, m) in irreducible_models(&spec)? {
                let label = if spec.e == 1 { t.label() } else { format!("{}^{i}", t.label()) };
                rows.push(ClassFunction::new(label, m.character_values(group)?));
            }
            rows
        }
        None => split_table(group)?,
    };
    let triv = trivial_character(group);
    if let Some(p) = rows.iter().position(|c| c.same_values(&triv)) {
        let t = rows.remove(p);
        rows.insert(0, t);
    }
    Ok(rows)
}

fn add_irreducible(irr: &mut Vec<ClassFunction>, chi: ClassFunction, conductor: u32) {
    for c in galois_orbit(&chi, conductor) {
        if !irr.iter().any(|x| x.same_values(&c)) {
            irr.push(ClassFunction::new(format!("X{}", irr.len()), c.values));
        }
    }
}

fn residual(group: &Group, irr: &[ClassFunction], a: &ClassFunction) -> Result<ClassFunction, CharError> {
    let mut r = a.clone();
    for chi in irr {
        let m = inner_product(group, a, chi)?;
        if !m.is_zero() {
            r = r.sub(&chi.scale(&m));
        }
    }
    Ok(r)
}

fn sum_of_squares(irr: &[ClassFunction]) -> Rational {
    irr.iter()
        .map(|c| {
            let d = c.degree().to_rational().expect("degree");
            &d * &d
        })
        .fold(Rational::from_integer(0.into()), |a, b| a + b)
}

fn split_table(group: &Group) -> Result<Vec<ClassFunction>, CharError> {
    let n = group.order();
    let classes = group.classes().len();
    let conductor = lcm(group.conductor(), exponent(group));
    let mut irr: Vec<ClassFunction> = Vec::new();
    for lc in group.linear_characters() {
        let v: Vec<Cyclotomic> = group.class_reps().iter().map(|&x| lc.value(x)).collect();
        add_irreducible(&mut irr, ClassFunction::new("", v), conductor);
    }
    let nat = natural_character(group);
    let target = Rational::from_integer((n as i64).into());
    let mut pending: Vec<ClassFunction> = vec![nat.clone(), nat.conj()];
    let mut tried = 0usize;
    let mut seen_products = 0usize;
    loop {
        if sum_of_squares(&irr) == target {
            break;
        }
        if tried < pending.len() {
            let cand = pending[tried].clone();
            tried += 1;
            let r = residual(group, &irr, &cand)?;
            if r.is_zero() {
                continue;
            }
            if norm(group, &r)? == Rational::from_integer(1.into()) {
                let r = if r.degree().to_rational().is_some_and(|d| d < Rational::from_integer(0.into())) {
                    r.scale(&Rational::from_integer((-1).into()))
                } else {
                    r
                };
                add_irreducible(&mut irr, r, conductor);
            }
            continue;
        }
        // enlarge the candidate pool with products of the irreducibles found so far
        if seen_products >= irr.len() {
            break;
        }
        let chi = irr[seen_products].clone();
        seen_products += 1;
        for psi in [nat.clone(), nat.conj()] {
            pending.push(chi.mul(&psi));
        }
        let (s2, l2) = sym2_ext2(group, &chi);
        pending.push(s2);
        pending.push(l2);
        for other in irr.clone().iter().take(seen_products) {
            pending.push(chi.mul(other));
            pending.push(chi.mul(&other.conj()));
        }
    }
    if irr.len() != classes || sum_of_squares(&irr) != target {
        return Err(CharError::Incomplete { found: irr.len(), classes });
    }
    irr.sort_by_key(|c| c.degree().to_rational().expect("degree"));
    for (i, c) in irr.iter_mut().enumerate() {
        c.label = format!("X{}", i + 1);
    }
    Ok(irr)
}

/// Least common multiple of the element orders.
pub fn exponent(group: &Group) -> u32 {
    (0..group.order() as u32).fold(1, |acc, x| lcm(acc, group.elt_order(x)))
}

/// The character of the reflection representation: the natural character,
/// except for the symmetric groups where the trivial summand is removed.
pub fn reflection_character_v(group: &Group) -> ClassFunction {
    let nat = natural_character(group);
    match group.spec() {
        Some(s) if s.is_symmetric() => {
            let mut v = nat.sub(&trivial_character(group));
            v.label = "V".into();
            v
        }
        _ => ClassFunction::new("V", nat.values),
    }
}

/// True when χ is the character of a faithful representation in which every
/// reflection of G acts as a reflection.
pub fn is_reflection_character(group: &Group, chi: &ClassFunction) -> bool {
    let deg = chi.degree().clone();
    let faithful = chi.values.iter().skip(1).all(|v| *v != deg);
    if !faithful {
        return false;
    }
    let Some(d) = deg.to_rational() else { return false };
    let target = d - Rational::from_integer(1.into());
    for class in group.classes() {
        if !group.is_reflection(class[0]) {
            continue;
        }
        let o = group.elt_order(class[0]) as i64;
        let mut acc = Cyclotomic::zero();
        for k in 0..o {
            acc = acc + &chi.values[group.class_of(group.pow(class[0], k))];
        }
        let fix = acc.scale(&Rational::new(1.into(), o.into()));
        if fix.to_rational() != Some(target.clone()) {
            return false;
        }
    }
    true
}

/// All irreducible reflection characters, in table order.
pub fn reflection_characters(group: &Group, irr: &[ClassFunction]) -> Vec<ClassFunction> {
    irr.iter().filter(|c| is_reflection_character(group, c)).cloned().collect()
}

/// Character table as JSON-ready data.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    pub group: String,
    pub classes: Vec<ClassHeader>,
    pub rows: Vec<ClassFunction>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassHeader {
    pub representative: String,
    pub size: usize,
    pub order: u32,
}

pub fn character_table(group: &Group) -> Result<CharacterTable, CharError> {
    let rows = irr_table(group)?;
    let classes = group
        .classes()
        .iter()
        .map(|c| ClassHeader {
            representative: group.word_string(c[0]),
            size: c.len(),
            order: group.elt_order(c[0]),
        })
        .collect();
    Ok(CharacterTable { group: group.label.clone(), classes, rows })
}
