//! Galois descent of matrix models: intertwiners, projective cocycles,
//! Nakayama classes, norm equations, Hilbert 90 and cyclic towers.
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::automorphisms::{aut_group, eta, inner_automorphisms, AutError, Automorphism, AUT_BOUND};
use crate::cyclotomic::{gcd, lcm, Cyclotomic, GaloisAuto, Rational};
use crate::groups::{Group, GroupError, GroupSpec};
use crate::linalg::{CycMatrix, LinalgError};

pub type Images = BTreeMap<String, CycMatrix>;

pub const DEFAULT_NORM_HEIGHT: i64 = 4;
pub const DEFAULT_SWEEP_BUDGET: usize = 10_000;

#[derive(Debug, Error)]
pub enum DescentError {
    #[error("models are not isomorphic")]
    NotIsomorphic,
    #[error("intertwiner space has dimension {0}; the models are not irreducible")]
    NotIrreducible(usize),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("twisted product is not scalar")]
    NotScalar,
    #[error("Hilbert 90 sweep exhausted after {0} candidates")]
    SweepExhausted(usize),
    #[error("norm equation unresolved for obstruction {scalar}")]
    Obstruction { scalar: Cyclotomic },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Aut(#[from] AutError),
}

fn units_mod(n: u32) -> Vec<u32> {
    (1..n.max(2)).filter(|&k| gcd(k as u64, n as u64) == 1).map(|k| k % n.max(1)).collect()
}

fn mulmod(a: u32, b: u32, n: u32) -> u32 {
    ((a as u64 * b as u64) % n as u64) as u32
}

/// Subgroup of (ℤ/n)^× generated by `gens`, sorted.
pub fn subgroup_generated(n: u32, gens: &[u32]) -> Vec<u32> {
    let one = 1 % n;
    let mut set: BTreeSet<u32> = BTreeSet::from([one]);
    let mut frontier = vec![one];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = mulmod(x, g % n, n);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// A quotient H/H₀ of subgroups of (ℤ/n)^×, represented by the least element of each coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Acting {
    pub conductor: u32,
    pub upper: Vec<u32>,
    pub lower: Vec<u32>,
    pub reps: Vec<u32>,
}

impl Acting {
    pub fn new(conductor: u32, upper: &[u32], lower: &[u32]) -> Self {
        let mut reps = Vec::new();
        let mut seen = BTreeSet::new();
        for &u in upper {
            if seen.contains(&u) {
                continue;
            }
            reps.push(u);
            for &h in lower {
                seen.insert(mulmod(u, h, conductor));
            }
        }
        Acting { conductor, upper: upper.to_vec(), lower: lower.to_vec(), reps }
    }

    /// The whole unit group acting with trivial kernel.
    pub fn full(conductor: u32) -> Self {
        let u = units_mod(conductor);
        Acting::new(conductor, &u, &[1 % conductor])
    }

    pub fn reduce(&self, k: u32) -> u32 {
        let k = k % self.conductor;
        *self
            .lower
            .iter()
            .map(|&h| mulmod(k, self.inverse_unit(h), self.conductor))
            .filter_map(|x| self.reps.iter().find(|&&r| r == x))
            .next()
            .expect("element of the acting group")
    }

    fn inverse_unit(&self, h: u32) -> u32 {
        (1..=self.conductor).find(|&x| mulmod(x, h, self.conductor) == 1 % self.conductor).unwrap_or(1)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(mulmod(a, b, self.conductor))
    }

    pub fn order_of(&self, k: u32) -> u32 {
        let mut x = self.reduce(k);
        let mut n = 1;
        let one = self.reduce(1);
        while x != one {
            x = self.mul(x, k);
            n += 1;
        }
        n
    }
}

/// Q-basis of the subfield of ℚ(ζ_n) fixed by `h`; the first element is 1.
pub fn fixed_field_basis(n: u32, h: &[u32]) -> Vec<Cyclotomic> {
    let target = crate::cyclotomic::euler_phi(n) as usize / h.len().max(1);
    let mut basis = vec![Cyclotomic::one()];
    let mut rows: Vec<Vec<Cyclotomic>> = vec![Cyclotomic::one().key_at(n).into_iter().map(Cyclotomic::from_rational).collect()];
    for k in 1..n as i64 {
        if basis.len() == target {
            break;
        }
        let x = h.iter().fold(Cyclotomic::zero_at(n), |acc, &g| acc + Cyclotomic::root(n, k * g as i64));
        if x.is_zero() {
            continue;
        }
        let row: Vec<Cyclotomic> = x.key_at(n).into_iter().map(Cyclotomic::from_rational).collect();
        let mut trial = rows.clone();
        trial.push(row.clone());
        if CycMatrix::from_rows(trial).rank() == rows.len() + 1 {
            rows.push(row);
            basis.push(x.canonicalize());
        }
    }
    basis
}

pub fn galois_images(images: &Images, k: u32) -> Images {
    images.iter().map(|(n, m)| (n.clone(), m.galois(k as i64))).collect()
}

/// ρ on every element, built along the breadth-first spanning tree.
pub fn all_matrices(group: &Group, images: &Images) -> Result<Vec<CycMatrix>, DescentError> {
    let names: Vec<&String> = group.generators().iter().map(|(n, _)| n).collect();
    let gens: Vec<&CycMatrix> = names
        .iter()
        .map(|n| images.get(*n).ok_or_else(|| GroupError::MissingGenerator((*n).clone())))
        .collect::<Result<_, _>>()?;
    let dim = gens.first().map_or(1, |m| m.rows());
    let mut mats = vec![CycMatrix::identity(dim); group.order()];
    for (x, p, g) in group.bfs_order() {
        mats[x as usize] = mats[p as usize].dot(gens[g as usize]);
    }
    Ok(mats)
}

/// ρ ∘ a on the generators.
pub fn twist(group: &Group, mats: &[CycMatrix], a: &Automorphism) -> Images {
    group.generators().iter().map(|(n, g)| (n.clone(), mats[a.apply(*g) as usize].clone())).collect()
}

/// X with X·m2(g) = m1(g)·X on all generators, first nonzero entry 1.
pub fn intertwiner(m1: &Images, m2: &Images) -> Result<CycMatrix, DescentError> {
    let n = m1.values().next().map_or(0, |m| m.rows());
    if m2.values().next().map_or(0, |m| m.rows()) != n || m1.keys().ne(m2.keys()) {
        return Err(DescentError::NotIsomorphic);
    }
    let nn = n * n;
    let mut rows = Vec::new();
    for (name, a) in m1 {
        let b = &m2[name];
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Cyclotomic::zero(); nn];
                for k in 0..n {
                    row[i * n + k] = &row[i * n + k] + b.get(k, j);
                    row[k * n + j] = &row[k * n + j] - a.get(i, k);
                }
                rows.push(row);
            }
        }
    }
    let null = CycMatrix::from_rows(rows).nullspace();
    match null.len() {
        0 => Err(DescentError::NotIsomorphic),
        1 => {
            let x = CycMatrix::new(n, n, null[0].clone())?;
            Ok(x.normalized())
        }
        k => Err(DescentError::NotIrreducible(k)),
    }
}

/// γ ↦ A_γ modulo scalars.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveCocycle {
    pub acting: Acting,
    pub maps: BTreeMap<u32, CycMatrix>,
}

impl ProjectiveCocycle {
    /// A_{st} ≡ A_s·s(A_t) modulo scalars for every pair of coset representatives.
    pub fn verify(&self) -> bool {
        self.pairs_ok(|x, y| x.proportional(y))
    }

    /// Exact condition A_{st} = A_s·s(A_t).
    pub fn is_exact(&self) -> bool {
        self.pairs_ok(|x, y| x == y)
    }

    fn pairs_ok(&self, eq: impl Fn(&CycMatrix, &CycMatrix) -> bool) -> bool {
        self.maps.iter().all(|(&s, a_s)| {
            self.maps.iter().all(|(&t, a_t)| {
                let st = self.acting.mul(s, t);
                match self.maps.get(&st) {
                    Some(a_st) => eq(a_st, &a_s.dot(&a_t.galois(s as i64))),
                    None => true,
                }
            })
        })
    }

    pub fn rescale(&self, scalars: &BTreeMap<u32, Cyclotomic>) -> Self {
        let maps = self
            .maps
            .iter()
            .map(|(k, m)| (*k, scalars.get(k).map_or_else(|| m.clone(), |c| m.scale(c))))
            .collect();
        ProjectiveCocycle { acting: self.acting.clone(), maps }
    }
}

/// A_γ with A_γ γ(ρ(g)) A_γ^{-1} = ρ(ι̃(γ)(g)) for every coset representative γ.
pub fn cocycle_from_model(
    group: &Group,
    images: &Images,
    iota: &BTreeMap<u32, Automorphism>,
    acting: &Acting,
) -> Result<ProjectiveCocycle, DescentError> {
    let mats = all_matrices(group, images)?;
    let mut maps = BTreeMap::new();
    for &g in &acting.reps {
        let a = iota.get(&g).ok_or_else(|| DescentError::Invalid(format!("ι̃ undefined at σ_{g}")))?;
        let m = intertwiner(&twist(group, &mats, a), &galois_images(images, g))
            .map_err(|_| DescentError::Invalid(format!("χ∘ι̃(σ_{g}) ≠ σ_{g}(χ)")))?;
        maps.insert(g, m);
    }
    let c = ProjectiveCocycle { acting: acting.clone(), maps };
    if !c.verify() {
        return Err(DescentError::NotCocycle("A_st is not proportional to A_s s(A_t)".into()));
    }
    Ok(c)
}

/// The Nakayama class of a cocycle restricted to the cyclic group generated by γ.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionClass {
    pub conductor: u32,
    pub generator: u32,
    pub order: u32,
    /// Ã_γ γ(Ã_γ) … γ^{n−1}(Ã_γ), an element of the fixed field of γ.
    pub scalar: Cyclotomic,
}

pub fn twisted_norm_product(a: &CycMatrix, gamma: u32, order: u32) -> CycMatrix {
    let mut p = CycMatrix::identity(a.rows());
    let mut k = 1i64;
    for _ in 0..order {
        p = p.dot(&a.galois(k));
        k *= gamma as i64;
    }
    p
}

pub fn nakayama_class(c: &ProjectiveCocycle, gamma: u32, order: u32) -> Result<ObstructionClass, DescentError> {
    let a = c.maps.get(&c.acting.reduce(gamma)).ok_or_else(|| DescentError::Invalid(format!("no A for σ_{gamma}")))?;
    let scalar = twisted_norm_product(a, gamma, order).as_scalar().ok_or(DescentError::NotScalar)?;
    let scalar = scalar.canonicalize();
    if scalar.galois(gamma as i64) != scalar {
        return Err(DescentError::NotScalar);
    }
    Ok(ObstructionClass { conductor: c.acting.conductor, generator: gamma, order, scalar })
}

pub fn norm_cyclic_k(x: &Cyclotomic, gamma: u32, order: u32) -> Cyclotomic {
    let mut p = Cyclotomic::one();
    let mut k = 1i64;
    for _ in 0..order {
        p = &p * &x.galois(k);
        k *= gamma as i64;
    }
    p.canonicalize()
}

pub fn verify_norm_witness(target: &Cyclotomic, witness: &Cyclotomic, gamma: u32, order: u32) -> bool {
    !witness.is_zero() && norm_cyclic_k(witness, gamma, order) == *target
}

/// Rationals of height exactly h (max(|p|, q) = h), in a fixed order.
fn rationals_of_height(h: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 1..=h {
        for p in 0..=h {
            if p.max(q) != h || gcd(p as u64, q as u64) != 1 {
                continue;
            }
            for s in [1, -1] {
                out.push(Rational::new(BigInt::from(s * p), BigInt::from(q)));
            }
        }
    }
    out.retain(|r| !r.is_zero());
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum NormSearch {
    Witness(Cyclotomic),
    Exhausted { candidates: usize },
}

/// Searches λ = Σ c_i b_i over the given field basis (at most three nonzero
/// c_i, each of height ≤ `height`) with λ γ(λ) … γ^{n−1}(λ) = target.
pub fn norm_search(target: &Cyclotomic, gamma: u32, order: u32, height: i64, basis: &[Cyclotomic]) -> NormSearch {
    let target = target.canonicalize();
    let mut values: Vec<Vec<Rational>> = vec![Vec::new()];
    for h in 1..=height {
        values.push(rationals_of_height(h));
    }
    let d = basis.len();
    let mut tried = 0usize;
    for h in 1..=height as usize {
        let allowed: Vec<&Rational> = values[1..=h].iter().flatten().collect();
        for k in 1..=d.min(3) {
            for support in combinations(d, k) {
                let mut idx = vec![0usize; k];
                loop {
                    let coeffs: Vec<&Rational> = idx.iter().map(|&i| allowed[i]).collect();
                    if coeffs.iter().any(|c| height_of(c) == h as i64) {
                        tried += 1;
                        let lambda = support
                            .iter()
                            .zip(&coeffs)
                            .fold(Cyclotomic::zero(), |acc, (&i, c)| acc + basis[i].scale(c));
                        if verify_norm_witness(&target, &lambda, gamma, order) {
                            return NormSearch::Witness(lambda.canonicalize());
                        }
                    }
                    let mut j = 0;
                    loop {
                        if j == k {
                            break;
                        }
                        idx[j] += 1;
                        if idx[j] < allowed.len() {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == k {
                        break;
                    }
                }
            }
        }
    }
    NormSearch::Exhausted { candidates: tried }
}

fn height_of(r: &Rational) -> i64 {
    let p = r.numer().abs();
    let q = r.denom().clone();
    let m = if p > q { p } else { q };
    i64::try_from(m).unwrap_or(i64::MAX)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// X = Σ_γ B_γ γ(C) over the coset representatives.
pub fn hilbert90_sum(b: &BTreeMap<u32, CycMatrix>, c: &CycMatrix) -> CycMatrix {
    let n = c.rows();
    b.iter().fold(CycMatrix::zeros(n, n), |acc, (&g, bg)| {
        acc.add(&bg.dot(&c.galois(g as i64))).expect("square matrices of one size")
    })
}

fn check_exact_cocycle(b: &BTreeMap<u32, CycMatrix>, acting: &Acting) -> Result<(), DescentError> {
    let c = ProjectiveCocycle { acting: acting.clone(), maps: b.clone() };
    if acting.reps.iter().any(|r| !b.contains_key(r)) || !c.is_exact() {
        return Err(DescentError::NotCocycle("B_st ≠ B_s s(B_t)".into()));
    }
    Ok(())
}

/// True when M^{-1}γ(M) = B_γ for every representative and h(M) = M on the kernel.
pub fn is_coboundary_of(m: &CycMatrix, b: &BTreeMap<u32, CycMatrix>, acting: &Acting) -> bool {
    let Ok(mi) = m.inverse() else { return false };
    b.iter().all(|(&g, bg)| mi.dot(&m.galois(g as i64)) == *bg)
        && acting.lower.iter().all(|&h| m.galois(h as i64) == *m)
}

fn root_of_unity_exponent(x: &Cyclotomic, n: u32) -> Option<u32> {
    (0..n).find(|&k| Cyclotomic::root(n, k as i64) == *x)
}

/// Diagonal cocycles with root-of-unity entries: M = Diag(m_i) with m_i
/// the root of unity of least order satisfying m_i^{-1}γ(m_i) = b_{γ,i}.
fn diagonal_roots_solution(b: &BTreeMap<u32, CycMatrix>, acting: &Acting) -> Option<CycMatrix> {
    let n = acting.conductor;
    let dim = b.values().next()?.rows();
    let two_n = lcm(n, 2);
    for bg in b.values() {
        for i in 0..dim {
            for j in 0..dim {
                if i != j && !bg.get(i, j).is_zero() {
                    return None;
                }
            }
            root_of_unity_exponent(bg.get(i, i), two_n)?;
        }
    }
    let mut order_ks: Vec<u32> = (0..two_n).collect();
    order_ks.sort_by_key(|&k| (two_n / gcd(k as u64, two_n as u64) as u32, k));
    let mut diag = Vec::new();
    for i in 0..dim {
        let m = order_ks.iter().map(|&k| Cyclotomic::root(two_n, k as i64)).find(|m| {
            let mi = m.inv().expect("root of unity");
            acting.upper.iter().all(|&u| {
                let want = if acting.lower.contains(&u) {
                    Cyclotomic::one()
                } else {
                    b[&acting.reduce(u)].get(i, i).clone()
                };
                &mi * &m.galois(u as i64) == want
            })
        })?;
        diag.push(m.canonicalize());
    }
    Some(CycMatrix::diag(diag))
}

/// M with B_γ = M^{-1}γ(M) for every γ, M fixed by the kernel of `acting`.
/// C runs over b·E_ij, b·(E_ij + cE_kl) with c ∈ {1,−1,2}, and b·I, where b
/// runs over `field_basis` (a basis of the field fixed by the kernel), then
/// over sums of two and of three distinct basis elements.
pub fn hilbert90_solve(
    b: &BTreeMap<u32, CycMatrix>,
    acting: &Acting,
    field_basis: &[Cyclotomic],
    budget: usize,
) -> Result<CycMatrix, DescentError> {
    check_exact_cocycle(b, acting)?;
    if let Some(m) = diagonal_roots_solution(b, acting) {
        if is_coboundary_of(&m, b, acting) {
            return Ok(m);
        }
    }
    let dim = b.values().next().map_or(1, |m| m.rows());
    let mut tried = 0;
    for scale in &sweep_scales(field_basis) {
        for c in sweep_candidates(dim) {
            if tried >= budget {
                return Err(DescentError::SweepExhausted(tried));
            }
            tried += 1;
            let x = hilbert90_sum(b, &c.scale(scale));
            if let Ok(m) = x.inverse() {
                let m = m.canonicalize();
                if is_coboundary_of(&m, b, acting) {
                    return Ok(m);
                }
                return Err(DescentError::NotCocycle("X^{-1} fails M^{-1}γ(M) = B_γ".into()));
            }
        }
    }
    Err(DescentError::SweepExhausted(tried))
}

fn sweep_scales(basis: &[Cyclotomic]) -> Vec<Cyclotomic> {
    let mut out = basis.to_vec();
    for k in [2, 3] {
        for idx in combinations(basis.len(), k) {
            out.push(idx.iter().fold(Cyclotomic::zero(), |acc, &i| acc + basis[i].clone()).canonicalize());
        }
    }
    out
}

fn sweep_candidates(n: usize) -> Vec<CycMatrix> {
    let unit = |i: usize, j: usize| {
        let mut m = CycMatrix::zeros(n, n);
        m.set(i, j, Cyclotomic::one());
        m
    };
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut out: Vec<CycMatrix> = cells.iter().map(|&(i, j)| unit(i, j)).collect();
    for c in [1, -1, 2] {
        for (a, &(i, j)) in cells.iter().enumerate() {
            for &(k, l) in &cells[a + 1..] {
                out.push(unit(i, j).add(&unit(k, l).scale(&Cyclotomic::from_i64(c))).expect("same size"));
            }
        }
    }
    out.push(CycMatrix::identity(n));
    out
}

/// One cyclic (or verified non-cyclic) step of a tower: the subgroup grows by `generators`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub generators: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub generators: Vec<u32>,
    pub quotient_order: usize,
    pub cocycle: BTreeMap<u32, CycMatrix>,
    pub obstructions: Vec<ObstructionClass>,
    pub norm_witnesses: Vec<Cyclotomic>,
    pub conjugator: CycMatrix,
}

/// Makes ι̃ total on (ℤ/N)^× from an assignment defined modulo n | N.
pub fn lift_assignment(
    assignment: &BTreeMap<u32, Automorphism>,
    from: u32,
    to: u32,
) -> Result<BTreeMap<u32, Automorphism>, DescentError> {
    if to % from != 0 {
        return Err(DescentError::Invalid(format!("{from} does not divide {to}")));
    }
    units_mod(to)
        .into_iter()
        .map(|k| {
            let a = assignment
                .get(&(k % from))
                .ok_or_else(|| DescentError::Invalid(format!("ι̃ undefined at σ_{}", k % from)))?;
            Ok((k, a.clone()))
        })
        .collect()
}

/// γ(ρ(g)) = ρ(ι̃(γ)(g)) for every γ in `exps` and every generator g.
pub fn is_equivariant(
    group: &Group,
    images: &Images,
    iota: &BTreeMap<u32, Automorphism>,
    exps: &[u32],
) -> Result<bool, DescentError> {
    let mats = all_matrices(group, images)?;
    Ok(exps.iter().all(|k| {
        iota.get(k).is_some_and(|a| {
            group
                .generators()
                .iter()
                .all(|(name, g)| images[name].galois(*k as i64) == mats[a.apply(*g) as usize])
        })
    }))
}

/// Conjugates `images` by M ∈ GL(Fix(lower)) so that equivariance extends
/// from `lower` to the subgroup generated by `lower` and the step generators.
pub fn descend_step(
    group: &Group,
    images: &Images,
    iota: &BTreeMap<u32, Automorphism>,
    conductor: u32,
    lower: &[u32],
    step: &Step,
    height: i64,
) -> Result<(Images, StepReport), DescentError> {
    let mut gens: Vec<u32> = lower.to_vec();
    gens.extend(step.generators.iter().map(|g| g % conductor));
    let upper = subgroup_generated(conductor, &gens);
    let acting = Acting::new(conductor, &upper, lower);
    let field = fixed_field_basis(conductor, lower);
    let mats = all_matrices(group, images)?;
    let mut b_gens = Vec::new();
    let mut obstructions = Vec::new();
    let mut witnesses = Vec::new();
    for &tau in &step.generators {
        let tau = acting.reduce(tau);
        let a = iota.get(&tau).ok_or_else(|| DescentError::Invalid(format!("ι̃ undefined at σ_{tau}")))?;
        let a_tau = intertwiner(&twist(group, &mats, a), &galois_images(images, tau))?;
        if lower.iter().any(|&h| a_tau.galois(h as i64) != a_tau) {
            return Err(DescentError::Invalid("normalized intertwiner is not fixed by the kernel".into()));
        }
        let order = acting.order_of(tau);
        let scalar = twisted_norm_product(&a_tau, tau, order).as_scalar().ok_or(DescentError::NotScalar)?.canonicalize();
        let mu = match norm_search(&scalar.inv().expect("nonzero"), tau, order, height, &field) {
            NormSearch::Witness(mu) => mu,
            NormSearch::Exhausted { .. } => return Err(DescentError::Obstruction { scalar }),
        };
        obstructions.push(ObstructionClass { conductor, generator: tau, order, scalar });
        witnesses.push(mu.clone());
        b_gens.push((tau, a_tau.scale(&mu).canonicalize()));
    }
    let b = extend_cocycle(&acting, &b_gens, images.values().next().map_or(1, |m| m.rows()))?;
    let m = hilbert90_solve(&b, &acting, &field, DEFAULT_SWEEP_BUDGET)?;
    let mi = m.inverse()?;
    let new: Images = images.iter().map(|(k, x)| (k.clone(), m.dot(x).dot(&mi).canonicalize())).collect();
    if !is_equivariant(group, &new, iota, &upper)? {
        return Err(DescentError::Invalid("conjugated model is not equivariant".into()));
    }
    let report = StepReport {
        generators: step.generators.clone(),
        quotient_order: acting.reps.len(),
        cocycle: b,
        obstructions,
        norm_witnesses: witnesses,
        conjugator: m,
    };
    Ok((new, report))
}

/// B_{στ} = B_σ σ(B_τ) along a breadth-first walk; conflicts mean the
/// chosen generator values do not form a cocycle.
pub fn extend_cocycle(
    acting: &Acting,
    gens: &[(u32, CycMatrix)],
    dim: usize,
) -> Result<BTreeMap<u32, CycMatrix>, DescentError> {
    let one = acting.reduce(1);
    let mut b: BTreeMap<u32, CycMatrix> = BTreeMap::from([(one, CycMatrix::identity(dim))]);
    let mut frontier = vec![one];
    while let Some(s) = frontier.pop() {
        for (t, bt) in gens {
            let st = acting.mul(s, *t);
            let val = b[&s].dot(&bt.galois(s as i64)).canonicalize();
            match b.get(&st) {
                Some(prev) if *prev != val => {
                    return Err(DescentError::NotCocycle(format!("values at σ_{st} disagree")));
                }
                Some(_) => {}
                None => {
                    b.insert(st, val);
                    frontier.push(st);
                }
            }
        }
    }
    Ok(b)
}

/// A composition series of (ℤ/n)^× with prime-order cyclic steps: at each
/// stage the least prime, then the least exponent of that order modulo the
/// current subgroup.
pub fn auto_tower(n: u32) -> Vec<Step> {
    let units = units_mod(n);
    let mut current = vec![1 % n];
    let mut steps = Vec::new();
    while current.len() < units.len() {
        let acting = Acting::new(n, &units, &current);
        let mut best: Option<(u32, u32)> = None;
        for &k in &units {
            if current.contains(&k) {
                continue;
            }
            let o = acting.order_of(k);
            if is_prime(o) && best.map_or(true, |(bo, _)| o < bo) {
                best = Some((o, k));
            }
        }
        let (_, k) = best.expect("a finite abelian group has an element of prime order modulo any proper subgroup");
        let mut g = current.clone();
        g.push(k);
        current = subgroup_generated(n, &g);
        steps.push(Step { generators: vec![k] });
    }
    steps
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub conductor: u32,
    pub steps: Vec<StepReport>,
    pub equivariant: bool,
    pub field_conductor: u32,
}

/// Runs the steps in order; each step keeps all previous equivariance.
pub fn descend_tower(
    group: &Group,
    images: &Images,
    iota: &BTreeMap<u32, Automorphism>,
    conductor: u32,
    tower: &[Step],
    height: i64,
) -> Result<(Images, TowerReport), DescentError> {
    let mut lower = vec![1 % conductor];
    let mut cur = images.clone();
    let mut steps = Vec::new();
    for step in tower {
        let (next, report) = descend_step(group, &cur, iota, conductor, &lower, step, height)?;
        let mut g = lower.clone();
        g.extend(step.generators.iter().copied());
        lower = subgroup_generated(conductor, &g);
        cur = next;
        steps.push(report);
    }
    let equivariant = is_equivariant(group, &cur, iota, &lower)?;
    let field_conductor = cur.values().fold(1, |acc, m| lcm(acc, m.canonicalize().conductor()));
    Ok((cur, TowerReport { conductor, steps, equivariant, field_conductor }))
}

/// 4 | e, or e has a prime factor ≡ 3 (mod 4).
pub fn dihedral_split_criterion(e: u32) -> bool {
    e % 4 == 0 || (3..=e).any(|p| is_prime(p) && p % 4 == 3 && e % p == 0)
}

/// iα ∈ ℚ(ζ_e) with α real and quadratic: i when 4 | e, else the Gauss sum √−p.
pub fn imaginary_quadratic(e: u32) -> Option<Cyclotomic> {
    if e % 4 == 0 {
        return Some(Cyclotomic::root(4, 1));
    }
    let p = (3..=e).find(|&p| is_prime(p) && p % 4 == 3 && e % p == 0)?;
    let mut g = Cyclotomic::zero_at(p);
    for a in 1..p {
        let residue = (1..p).any(|x| (x * x) % p == a);
        let r = Cyclotomic::root(p, a as i64);
        g = if residue { g + r } else { g - r };
    }
    Some(g.canonicalize())
}

/// M = (1/4iα)·[[1+iα, −1+iα], [−1+iα, 1+iα]].
pub fn dihedral_conjugator(ia: &Cyclotomic) -> CycMatrix {
    let one = Cyclotomic::one();
    let p = &one + ia;
    let q = ia - &one;
    let m = CycMatrix::from_rows(vec![vec![p.clone(), q.clone()], vec![q, p]]);
    m.scale(&(Cyclotomic::from_i64(4) * ia).inv().expect("nonzero"))
}

/// The 2-dimensional model s'_1 ↦ [[0, ζ_e^{-k}], [ζ_e^k, 0]], s_1 ↦ [[0,1],[1,0]].
pub fn dihedral_model(e: u32, k: u32) -> Images {
    let z = Cyclotomic::root(e, k as i64);
    let zi = Cyclotomic::root(e, -(k as i64));
    let zero = Cyclotomic::zero();
    let one = Cyclotomic::one();
    Images::from([
        ("s1'".to_string(), CycMatrix::from_rows(vec![vec![zero.clone(), zi], vec![z, zero.clone()]])),
        ("s1".to_string(), CycMatrix::from_rows(vec![vec![zero.clone(), one.clone()], vec![one, zero]])),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct DihedralModel {
    pub k: u32,
    pub images: Images,
    pub real: bool,
    pub equivariant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DihedralReport {
    pub e: u32,
    pub split: bool,
    pub imaginary_quadratic: Option<Cyclotomic>,
    /// Exponents of the section H ≅ Gal(K/ℚ) inside (ℤ/e)^×.
    pub section: Vec<u32>,
    pub models: Vec<DihedralModel>,
    /// ι̃ = η is injective on Gal(ℚ(ζ_e)/ℚ), and ι = η|_H on the section.
    pub iota_injective: bool,
    pub involutions_inner: Option<bool>,
}

impl DihedralReport {
    pub fn verified(&self) -> bool {
        self.iota_injective && self.models.iter().all(|m| m.real && m.equivariant)
    }
}

/// Every automorphism of order 2 is inner.
pub fn involutions_inner(group: &Group) -> Result<bool, DescentError> {
    let inn: BTreeSet<Automorphism> = inner_automorphisms(group).into_iter().collect();
    Ok(aut_group(group, AUT_BOUND)?
        .into_iter()
        .filter(|a| !a.is_identity() && a.compose(a).is_identity())
        .all(|a| inn.contains(&a)))
}

/// Models over ℚ(ζ_e + ζ_e^{-1}) of the 2-dimensional representations of G(e,e,2)
/// when the split criterion holds; otherwise only ι̃ = η on Gal(ℚ(ζ_e)/ℚ).
pub fn dihedral_equivariant(e: u32) -> Result<DihedralReport, DescentError> {
    if e < 3 {
        return Err(DescentError::Invalid("e must be at least 3".into()));
    }
    let group = Group::imprimitive(GroupSpec::imprimitive(e, e, 2)?)?;
    let units = units_mod(e);
    let etas: Vec<Automorphism> = units.iter().map(|&k| eta(&group, k as i64)).collect::<Result<_, _>>()?;
    let iota_injective = etas.iter().collect::<BTreeSet<_>>().len() == etas.len();
    let split = dihedral_split_criterion(e);
    let mut report = DihedralReport {
        e,
        split,
        imaginary_quadratic: None,
        section: Vec::new(),
        models: Vec::new(),
        iota_injective,
        involutions_inner: None,
    };
    if !split {
        report.involutions_inner = Some(involutions_inner(&group)?);
        return Ok(report);
    }
    let ia = imaginary_quadratic(e).expect("split criterion");
    let section: Vec<u32> = units.iter().copied().filter(|&k| ia.galois(k as i64) == ia).collect();
    let iota: BTreeMap<u32, Automorphism> = units.iter().copied().zip(etas).collect();
    let m = dihedral_conjugator(&ia);
    let mi = m.inverse()?;
    for k in 1..=(e - 1) / 2 {
        let rho = dihedral_model(e, k);
        let conj: Images = rho.iter().map(|(n, x)| (n.clone(), m.dot(x).dot(&mi).canonicalize())).collect();
        let real = conj.values().all(|x| x.galois(-1) == *x);
        let equivariant = is_equivariant(&group, &conj, &iota, &section)?;
        report.models.push(DihedralModel { k, images: conj, real, equivariant });
    }
    report.imaginary_quadratic = Some(ia);
    report.section = section;
    Ok(report)
}

/// The trivial coboundary check for a scalar: B_γ = λ^{-1}γ(λ).
pub fn scalar_hilbert90(b: &BTreeMap<u32, Cyclotomic>, acting: &Acting, field_basis: &[Cyclotomic]) -> Option<Cyclotomic> {
    for c in field_basis {
        let x = b.iter().fold(Cyclotomic::zero(), |acc, (&g, bg)| acc + bg * &c.galois(g as i64));
        if !x.is_zero() {
            let lambda = x.inv().ok()?.canonicalize();
            let ok = b.iter().all(|(&g, bg)| &lambda.inv().ok().unwrap() * &lambda.galois(g as i64) == *bg)
                && acting.lower.iter().all(|&h| lambda.galois(h as i64) == lambda);
            if ok {
                return Some(lambda);
            }
        }
    }
    None
}

pub fn galois_auto(conductor: u32, k: u32) -> Result<GaloisAuto, DescentError> {
    GaloisAuto::new(conductor, k as i64).map_err(|e| DescentError::Invalid(e.to_string()))
}

/// Conjugates by the rational matrix whose columns are eigenvectors of the
/// named generator (eigenvalues ζ^k by increasing k). Rational P keeps every
/// Galois equivariance. None if the generator has no rational eigenbasis.
pub fn diagonalize_rationally(images: &Images, name: &str) -> Option<(Images, CycMatrix)> {
    let t = images.get(name)?;
    let n = t.rows();
    let l = lcm(t.conductor(), 2);
    let mut cols: Vec<Vec<Cyclotomic>> = Vec::new();
    for k in 0..l {
        let z = Cyclotomic::root(l, k as i64);
        let shifted = t.sub(&CycMatrix::scalar(n, z)).ok()?;
        cols.extend(shifted.nullspace());
    }
    if cols.len() != n || cols.iter().flatten().any(|x| !x.is_rational()) {
        return None;
    }
    let p = CycMatrix::from_rows(cols).transpose();
    let pi = p.inverse().ok()?;
    let out = images.iter().map(|(k, x)| (k.clone(), pi.dot(x).dot(&p).canonicalize())).collect();
    Some((out, p))
}
