//! Tableau models of Irr(G(d,1,r)) and their Clifford restriction to
//! G(de,e,r) on the basis of averaged S-orbits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{gcd, lcm, Cyclotomic, Rational};
use crate::groups::{Group, GroupSpec};
use crate::linalg::{unity_projector, CycMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("tuple has {got} slots, expected {expected}")]
    Slots { expected: usize, got: usize },
    #[error("omega index {0} is not below the stabilizer order {1}")]
    BadOmega(u32, u32),
    #[error("model has no image for generator {0}")]
    MissingImage(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A tuple of partitions (λ_0, …, λ_{d-1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitionTuple {
    pub parts: Vec<Vec<u32>>,
}

impl PartitionTuple {
    pub fn new(parts: Vec<Vec<u32>>) -> Self {
        PartitionTuple { parts }
    }

    pub fn slots(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().flatten().sum()
    }

    /// New slot k receives old slot k + shift.
    pub fn rotate(&self, shift: usize) -> Self {
        let n = self.parts.len();
        PartitionTuple { parts: (0..n).map(|k| self.parts[(k + shift) % n].clone()).collect() }
    }

    /// σ(𝛌) = (λ_d, λ_{d+1}, …) on a de-tuple.
    pub fn shift_sigma(&self, d: usize) -> Self {
        self.rotate(d)
    }

    /// The tuple μ with gal i ∘ ρ_𝛌 ≅ ρ_μ, namely μ_{ik} = λ_k.
    pub fn galois_shift(&self, i: i64) -> Self {
        let d = self.parts.len();
        let mut parts = vec![Vec::new(); d];
        for (k, p) in self.parts.iter().enumerate() {
            let target = (k as i64 * i).rem_euclid(d as i64) as usize;
            parts[target] = p.clone();
        }
        PartitionTuple { parts }
    }

    pub fn label(&self) -> String {
        let slots: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("[{}]", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("({})", slots.join(","))
    }
}

/// Partitions of n in lexicographically decreasing order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All d-tuples of partitions of total size r, sorted.
pub fn enumerate_tuples(d: usize, r: u32) -> Vec<PartitionTuple> {
    fn rec(d: usize, r: u32, cur: &mut Vec<Vec<u32>>, out: &mut Vec<PartitionTuple>) {
        if cur.len() == d - 1 {
            for p in partitions(r) {
                cur.push(p);
                out.push(PartitionTuple { parts: cur.clone() });
                cur.pop();
            }
            return;
        }
        for k in 0..=r {
            for p in partitions(k) {
                cur.push(p);
                rec(d, r - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(d, r, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Positions (slot, row, col) of 1, …, r.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TableauTuple {
    pub cells: Vec<(u32, u32, u32)>,
}

impl TableauTuple {
    /// 𝐓(m) for m = 1…r.
    pub fn content_vector(&self) -> Vec<u32> {
        self.cells.iter().map(|c| c.0).collect()
    }

    pub fn slot_of(&self, m: usize) -> u32 {
        self.cells[m - 1].0
    }

    /// a(i,i+1), or None when i and i+1 lie in different tableaux.
    pub fn axial_distance(&self, i: usize) -> Option<i64> {
        let (s0, r0, c0) = self.cells[i - 1];
        let (s1, r1, c1) = self.cells[i];
        (s0 == s1).then(|| (r0 as i64 - c0 as i64) - (r1 as i64 - c1 as i64))
    }

    /// 𝐓_{i↔i+1} when it is standard.
    pub fn swapped(&self, i: usize) -> Option<TableauTuple> {
        let (s0, r0, c0) = self.cells[i - 1];
        let (s1, r1, c1) = self.cells[i];
        if s0 == s1 && (r0 == r1 || c0 == c1) {
            return None;
        }
        let mut cells = self.cells.clone();
        cells.swap(i - 1, i);
        Some(TableauTuple { cells })
    }

    /// Moves every cell of slot c to slot c − shift (mod n).
    pub fn rotate(&self, shift: u32, n: u32) -> TableauTuple {
        TableauTuple {
            cells: self.cells.iter().map(|&(s, r, c)| ((s + n - shift % n) % n, r, c)).collect(),
        }
    }

    pub fn label(&self) -> String {
        let v: Vec<String> = self.cells.iter().map(|c| format!("{}:{}:{}", c.0, c.1, c.2)).collect();
        v.join(" ")
    }
}

/// Standard tableau tuples ordered by (𝐓(1),…,𝐓(r)) and then by cells.
pub fn standard_tableaux(t: &PartitionTuple) -> Vec<TableauTuple> {
    let r = t.size() as usize;
    let mut fill: Vec<Vec<u32>> = t.parts.iter().map(|p| vec![0; p.len()]).collect();
    let mut out = Vec::new();
    let mut cells = Vec::with_capacity(r);
    fn rec(
        t: &PartitionTuple,
        r: usize,
        fill: &mut Vec<Vec<u32>>,
        cells: &mut Vec<(u32, u32, u32)>,
        out: &mut Vec<TableauTuple>,
    ) {
        if cells.len() == r {
            out.push(TableauTuple { cells: cells.clone() });
            return;
        }
        for s in 0..t.parts.len() {
            for row in 0..t.parts[s].len() {
                let len = fill[s][row];
                if len < t.parts[s][row] && (row == 0 || fill[s][row - 1] > len) {
                    fill[s][row] += 1;
                    cells.push((s as u32, row as u32, len));
                    rec(t, r, fill, cells, out);
                    cells.pop();
                    fill[s][row] -= 1;
                }
            }
        }
    }
    rec(t, r, &mut fill, &mut cells, &mut out);
    out.sort_by(|a, b| (a.content_vector(), &a.cells).cmp(&(b.content_vector(), &b.cells)));
    out
}

/// A matrix model of a group: one image per named generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepModel {
    pub group: String,
    pub label: String,
    pub basis: Vec<String>,
    pub images: BTreeMap<String, CycMatrix>,
}

impl RepModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn conductor(&self) -> u32 {
        self.images.values().fold(1, |acc, m| lcm(acc, m.conductor()))
    }

    pub fn image(&self, name: &str) -> Result<&CycMatrix, TableauError> {
        self.images.get(name).ok_or_else(|| TableauError::MissingImage(name.to_string()))
    }

    /// ρ(x) for every element x of `group`, following breadth-first words.
    pub fn all_matrices(&self, group: &Group) -> Result<Vec<CycMatrix>, TableauError> {
        let imgs: Vec<&CycMatrix> =
            group.generators().iter().map(|(n, _)| self.image(n)).collect::<Result<_, _>>()?;
        let mut out = vec![CycMatrix::zeros(0, 0); group.order()];
        out[0] = CycMatrix::identity(self.dim());
        for (x, p, g) in group.bfs_order() {
            out[x as usize] = out[p as usize].dot(imgs[g as usize]);
        }
        Ok(out)
    }

    /// Character values on the classes of `group`.
    pub fn character_values(&self, group: &Group) -> Result<Vec<Cyclotomic>, TableauError> {
        let mats = self.all_matrices(group)?;
        Ok(group.class_reps().iter().map(|&x| mats[x as usize].trace().expect("square")).collect())
    }

    /// Conjugates every image: M ρ M^{-1}.
    pub fn conjugate(&self, m: &CycMatrix) -> Result<RepModel, TableauError> {
        let mi = m.inverse()?;
        let images = self.images.iter().map(|(k, v)| (k.clone(), m.dot(v).dot(&mi))).collect();
        Ok(RepModel { images, ..self.clone() })
    }

    pub fn canonicalize(&self) -> RepModel {
        let images = self.images.iter().map(|(k, v)| (k.clone(), v.canonicalize())).collect();
        RepModel { images, ..self.clone() }
    }
}

fn inv_rat(a: i64) -> Rational {
    Rational::new(1.into(), a.into())
}

fn s_matrix(basis: &[TableauTuple], i: usize) -> CycMatrix {
    let n = basis.len();
    let mut m = CycMatrix::zeros(n, n);
    for (col, t) in basis.iter().enumerate() {
        let a = t.axial_distance(i);
        if let Some(a) = a {
            m.set(col, col, Cyclotomic::from_rational(inv_rat(a)));
        }
        if let Some(sw) = t.swapped(i) {
            let row = basis.binary_search_by(|x| (x.content_vector(), &x.cells).cmp(&(sw.content_vector(), &sw.cells)))
                .expect("swapped tableau in basis");
            let coeff = match a {
                Some(a) => Rational::from_integer(1.into()) + inv_rat(a),
                None => Rational::from_integer(1.into()),
            };
            m.set(row, col, Cyclotomic::from_rational(coeff));
        }
    }
    m
}

fn t_matrix(basis: &[TableauTuple], d: u32) -> CycMatrix {
    CycMatrix::diag(basis.iter().map(|t| Cyclotomic::root(d, t.slot_of(1) as i64)).collect())
}

/// ρ_𝛌 of G(d,1,r) with d = number of slots.
pub fn build_model(t: &PartitionTuple) -> RepModel {
    let d = t.slots() as u32;
    let r = t.size();
    let spec = GroupSpec::new(d, 1, r).expect("valid spec");
    let basis = standard_tableaux(t);
    let mut images = BTreeMap::new();
    if d > 1 {
        images.insert("t".to_string(), t_matrix(&basis, d));
    }
    for i in 1..r as usize {
        images.insert(format!("s{i}"), s_matrix(&basis, i));
    }
    RepModel {
        group: spec.label(),
        label: t.label(),
        basis: basis.iter().map(|x| x.label()).collect(),
        images,
    }
}

/// ρ_{𝛌^{(i)}} tuples: {r−1} in slot 0 and {1} in slot i, i prime to d.
/// For d = 1 this is the single partition (r−1,1).
pub fn reflection_tuples(d: usize, r: u32) -> Vec<PartitionTuple> {
    if d == 1 {
        let p = if r >= 2 { vec![r - 1, 1] } else { vec![1] };
        return vec![PartitionTuple::new(vec![p])];
    }
    (1..d)
        .filter(|&i| gcd(i as u64, d as u64) == 1)
        .map(|i| {
            let mut parts = vec![Vec::new(); d];
            if r > 1 {
                parts[0] = vec![r - 1];
            }
            parts[i] = vec![1];
            PartitionTuple::new(parts)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CliffordData {
    pub tuple: PartitionTuple,
    pub spec: GroupSpec,
    pub b: u32,
    pub stabilizer_order: u32,
    pub s: CycMatrix,
    pub theta: Cyclotomic,
    pub basis: Vec<TableauTuple>,
    /// S sends basis[j] to basis[perm[j]].
    pub perm: Vec<usize>,
}

pub fn clifford_split(t: &PartitionTuple, spec: &GroupSpec) -> Result<CliffordData, TableauError> {
    let de = spec.de() as usize;
    if t.slots() != de {
        return Err(TableauError::Slots { expected: de, got: t.slots() });
    }
    let d = spec.d as usize;
    let b = (1..=spec.e).find(|&b| t.rotate(b as usize * d) == *t).expect("σ^e = 1");
    let basis = standard_tableaux(t);
    let key = |x: &TableauTuple| (x.content_vector(), x.cells.clone());
    let perm: Vec<usize> = basis
        .iter()
        .map(|x| {
            let y = x.rotate(b * spec.d, de as u32);
            basis.binary_search_by(|z| key(z).cmp(&key(&y))).expect("S preserves the shape")
        })
        .collect();
    let n = basis.len();
    let mut s = CycMatrix::zeros(n, n);
    for (j, &p) in perm.iter().enumerate() {
        s.set(p, j, Cyclotomic::one());
    }
    Ok(CliffordData {
        tuple: t.clone(),
        spec: *spec,
        b,
        stabilizer_order: spec.e / b,
        s,
        theta: Cyclotomic::root(spec.e, b as i64),
        basis,
        perm,
    })
}

impl CliffordData {
    /// S-orbits of the basis, each sorted, ordered by their minimal member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.basis.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for j in 0..n {
            if seen[j] {
                continue;
            }
            let mut orbit = vec![j];
            seen[j] = true;
            let mut k = self.perm[j];
            while k != j {
                seen[k] = true;
                orbit.push(k);
                k = self.perm[k];
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// p_ω for ω = θ^i.
    pub fn projector(&self, i: u32) -> Result<CycMatrix, TableauError> {
        let omega = self.theta.powu(i as u64);
        Ok(unity_projector(&self.s, &omega, self.stabilizer_order)?)
    }

    /// The ambient model ρ_𝛌 of G(de,1,r).
    pub fn ambient_model(&self) -> RepModel {
        build_model(&self.tuple)
    }

    /// ρ_{𝛌,θ^i} on the averaged-orbit basis.
    pub fn restricted_model(&self, i: u32) -> Result<RepModel, TableauError> {
        if i >= self.stabilizer_order {
            return Err(TableauError::BadOmega(i, self.stabilizer_order));
        }
        let spec = &self.spec;
        let de = spec.de();
        let amb = self.ambient_model();
        let t = t_matrix(&self.basis, de);
        let t_inv = t.inverse()?;
        let s1 = amb.images.get("s1").cloned();
        let orbits = self.orbits();
        let restrict = |a: &CycMatrix| -> CycMatrix {
            let k = orbits.len();
            let mut m = CycMatrix::zeros(k, k);
            for (j, oj) in orbits.iter().enumerate() {
                let w = Rational::new(1.into(), (oj.len() as i64).into());
                for (l, ol) in orbits.iter().enumerate() {
                    // row ol[0] of a·β_j, rescaled by |O_l|
                    let mut acc = Cyclotomic::zero();
                    for &c in oj {
                        let x = a.get(ol[0], c);
                        if !x.is_zero() {
                            acc = acc + x;
                        }
                    }
                    if !acc.is_zero() {
                        let f = &w * Rational::from_integer((ol.len() as i64).into());
                        m.set(l, j, acc.scale(&f));
                    }
                }
            }
            m
        };
        let twist_l = t_inv.pow(i as u64);
        let twist_r = t.pow(i as u64);
        let mut images = BTreeMap::new();
        for name in spec.generator_names() {
            let a = match name.as_str() {
                "t" | "t'" => t.pow(spec.e as u64),
                "s1'" => t_inv.dot(s1.as_ref().expect("r ≥ 2")).dot(&t),
                s => amb.images[s].clone(),
            };
            let a = twist_l.dot(&a).dot(&twist_r);
            images.insert(name, restrict(&a));
        }
        let basis = orbits.iter().map(|o| format!("({})", self.basis[o[0]].label())).collect();
        Ok(RepModel {
            group: spec.label(),
            label: format!("{}^{}", self.tuple.label(), i),
            basis,
            images,
        })
    }

    /// χ_{𝛌,θ^i}(g) = (1/#) Σ_k ω^{−k} Tr(ρ_𝛌(g) S^k), from the ambient matrices.
    pub fn character_by_trace(&self, group: &Group, i: u32) -> Result<Vec<Cyclotomic>, TableauError> {
        let amb_spec = self.spec.ambient();
        let amb_group = Group::imprimitive(amb_spec).map_err(|_| TableauError::MissingImage("ambient".into()))?;
        let mats = self.ambient_model().all_matrices(&amb_group)?;
        let omega_inv = self.theta.powu(i as u64).inv().expect("root of unity");
        let m = self.stabilizer_order;
        let inv_m = Rational::new(1.into(), (m as i64).into());
        let mut s_pows = vec![CycMatrix::identity(self.basis.len())];
        for k in 1..m as usize {
            s_pows.push(s_pows[k - 1].dot(&self.s));
        }
        Ok(group
            .class_reps()
            .iter()
            .map(|&x| {
                let a = &mats[group.ambient_index(x)];
                let mut acc = Cyclotomic::zero();
                let mut w = Cyclotomic::one();
                for sk in &s_pows {
                    acc = acc + &w * &a.dot(sk).trace().expect("square");
                    w = &w * &omega_inv;
                }
                acc.scale(&inv_m)
            })
            .collect())
    }
}

/// σ-orbit representatives (minimal in tuple order) of de-tuples of size r.
pub fn orbit_representatives(spec: &GroupSpec) -> Vec<PartitionTuple> {
    let d = spec.d as usize;
    enumerate_tuples(spec.de() as usize, spec.r)
        .into_iter()
        .filter(|t| (1..spec.e as usize).all(|k| t.rotate(k * d) >= *t))
        .collect()
}

/// Every irreducible model of G(de,e,r), indexed by (orbit representative, i).
pub fn irreducible_models(spec: &GroupSpec) -> Result<Vec<(PartitionTuple, u32, RepModel)>, TableauError> {
    let mut out = Vec::new();
    for t in orbit_representatives(spec) {
        let c = clifford_split(&t, spec)?;
        for i in 0..c.stabilizer_order {
            let m = if spec.e == 1 { build_model(&t) } else { c.restricted_model(i)? };
            out.push((t.clone(), i, m));
        }
    }
    Ok(out)
}
