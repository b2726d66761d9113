//! Polynomial invariants: Reynolds averaging, Jacobian independence,
//! rationalization by Galois averaging and the rational discriminant.
use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::{gcd, Cyclotomic, Rational};
use crate::descent::{fixed_field_basis, scalar_hilbert90, Acting};
use crate::groups::{Group, GroupSpec};
use crate::linalg::CycMatrix;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("no algebraically independent selection among the invariants of degrees {0:?}")]
    NoIndependentSet(Vec<u32>),
    #[error("group too large for Reynolds averaging ({0} elements)")]
    TooLarge(usize),
    #[error("λ sweep exhausted after {0} candidates")]
    SweepExhausted(usize),
    #[error("{0}")]
    Invalid(String),
}

pub const REYNOLDS_BOUND: usize = 200;

/// A polynomial in `vars` variables with cyclotomic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, Cyclotomic>,
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    exps: Vec<u32>,
    coeff: Cyclotomic,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: usize,
    terms: Vec<PolyTerm>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self.terms.iter().map(|(e, c)| PolyTerm { exps: e.clone(), coeff: c.canonicalize() }).collect();
        PolyJson { vars: self.vars, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let mut p = Poly::zero(j.vars);
        for t in j.terms {
            if t.exps.len() != j.vars {
                return Err(serde::de::Error::custom("exponent vector length differs from vars"));
            }
            p.add_term(t.exps, t.coeff);
        }
        Ok(p)
    }
}

impl Poly {
    pub fn zero(vars: usize) -> Self {
        Poly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: Cyclotomic) -> Self {
        let mut p = Poly::zero(vars);
        p.add_term(vec![0; vars], c);
        p
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Poly::monomial(e, Cyclotomic::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Cyclotomic) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Linear form Σ c_i x_i.
    pub fn linear(coeffs: &[Cyclotomic]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&exps) {
            Some(old) => (&old + &c).canonicalize(),
            None => c.canonicalize(),
        };
        if !v.is_zero() {
            self.terms.insert(exps, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut ds = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match ds.next() {
            None => true,
            Some(d) => ds.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&Cyclotomic::from_i64(-1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Poly {
        let mut p = Poly::zero(self.vars);
        for (e, x) in &self.terms {
            p.add_term(e.clone(), x * c);
        }
        p
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero(self.vars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                p.add_term(e, x * y);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut p = Poly::constant(self.vars, Cyclotomic::one());
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Applies σ_k to every coefficient.
    pub fn galois(&self, k: i64) -> Poly {
        let mut p = Poly::zero(self.vars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c.galois(k));
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            p.add_term(f, c * &Cyclotomic::from_i64(e[i] as i64));
        }
        p
    }

    /// (f∘g)(x) = f(g·x).
    pub fn compose_linear(&self, g: &CycMatrix) -> Poly {
        let forms: Vec<Poly> = (0..self.vars).map(|i| Poly::linear(g.row(i))).collect();
        let mut cache: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero(self.vars);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(self.vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let pw = cache.entry((i, k)).or_insert_with(|| forms[i].pow(k)).clone();
                    term = term.mul(&pw);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &Cyclotomic)> {
        self.terms.iter().next_back()
    }

    /// c with self = c·other, if any.
    pub fn ratio_to(&self, other: &Poly) -> Option<Cyclotomic> {
        let (e, c) = other.leading()?;
        let r = self.terms.get(e)?.checked_div(c).ok()?;
        (other.scale(&r) == *self).then_some(r.canonicalize())
    }
}

fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    if vars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials(vars - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn group_matrices(group: &Group) -> Result<Vec<CycMatrix>, InvariantError> {
    if group.order() > REYNOLDS_BOUND && group.dim() > 2 {
        return Err(InvariantError::TooLarge(group.order()));
    }
    Ok((0..group.order() as u32).map(|x| group.matrix(x)).collect())
}

pub fn reynolds(group_mats: &[CycMatrix], f: &Poly) -> Poly {
    let mut acc = Poly::zero(f.vars);
    for g in group_mats {
        acc = acc.add(&f.compose_linear(g));
    }
    acc.scale(&Cyclotomic::from_rational(Rational::new(1.into(), (group_mats.len() as i64).into())))
}

pub fn is_invariant(group_mats: &[CycMatrix], f: &Poly) -> bool {
    group_mats.iter().all(|g| f.compose_linear(g) == *f)
}

/// Keeps the polynomials that are linearly independent of the earlier ones.
pub fn independent_subset(polys: &[Poly]) -> Vec<Poly> {
    let mut keys: Vec<Vec<u32>> = polys.iter().flat_map(|p| p.terms.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let row = |p: &Poly| keys.iter().map(|k| p.terms.get(k).cloned().unwrap_or_else(Cyclotomic::zero)).collect::<Vec<_>>();
    let mut rows: Vec<Vec<Cyclotomic>> = Vec::new();
    let mut out = Vec::new();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        let mut trial = rows.clone();
        trial.push(row(p));
        if CycMatrix::from_rows(trial.clone()).rank() == trial.len() {
            rows = trial;
            out.push(p.clone());
        }
    }
    out
}

/// A basis of the degree-d invariants: Reynolds images of monomials in
/// lexicographically decreasing order, independent ones kept.
pub fn invariant_basis(group_mats: &[CycMatrix], vars: usize, degree: u32) -> Vec<Poly> {
    let images: Vec<Poly> = monomials(vars, degree)
        .into_iter()
        .map(|m| reynolds(group_mats, &Poly::monomial(m, Cyclotomic::one())))
        .collect();
    independent_subset(&images)
        .into_iter()
        .map(|p| {
            let c = p.leading().map(|(_, c)| c.inv().expect("nonzero")).unwrap();
            p.scale(&c)
        })
        .collect()
}

/// det(∂f_i/∂x_j).
pub fn jacobian(fs: &[Poly]) -> Poly {
    let n = fs.len();
    let m: Vec<Vec<Poly>> = fs.iter().map(|f| (0..n).map(|j| f.derivative(j)).collect()).collect();
    poly_det(&m)
}

fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    let vars = m.first().and_then(|r| r.first()).map_or(0, |p| p.vars);
    if n == 0 {
        return Poly::constant(vars, Cyclotomic::one());
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(vars);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = m[0][j].mul(&poly_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// de, 2de, …, (r−1)de, rd for G(de,e,r), sorted.
pub fn reflection_degrees(spec: &GroupSpec) -> Vec<u32> {
    let mut d: Vec<u32> = (1..spec.r).map(|k| k * spec.de()).collect();
    d.push(spec.r * spec.d);
    d.sort();
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub degrees: Vec<u32>,
    pub bases: Vec<Vec<Poly>>,
    pub selected: Vec<Poly>,
    pub jacobian: Poly,
    /// A degree-1 invariant exists: the representation has a trivial summand.
    pub reducible: bool,
}

/// Reynolds bases for each degree and an algebraically independent choice
/// f_i of degree d_i (first basis element, then later ones, then pairwise sums).
pub fn reynolds_invariants(group: &Group, degrees: &[u32]) -> Result<InvariantReport, InvariantError> {
    let mats = group_matrices(group)?;
    let vars = group.dim();
    let bases: Vec<Vec<Poly>> = degrees.iter().map(|&d| invariant_basis(&mats, vars, d)).collect();
    let reducible = !invariant_basis(&mats, vars, 1).is_empty();
    let options: Vec<Vec<Poly>> = bases
        .iter()
        .map(|b| {
            let mut o = b.clone();
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    o.push(b[i].add(&b[j]));
                }
            }
            o
        })
        .collect();
    let mut idx = vec![0usize; degrees.len()];
    if options.iter().any(|o| o.is_empty()) {
        return Err(InvariantError::NoIndependentSet(degrees.to_vec()));
    }
    loop {
        let selected: Vec<Poly> = idx.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let jac = jacobian(&selected);
        if !jac.is_zero() && selected.len() == vars {
            return Ok(InvariantReport { degrees: degrees.to_vec(), bases, selected, jacobian: jac, reducible });
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Err(InvariantError::NoIndependentSet(degrees.to_vec()));
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn units(n: u32) -> Vec<u32> {
    (1..n.max(2)).filter(|&k| gcd(k as u64, n as u64) == 1).collect()
}

/// λ candidates: rationals of height ≤ 4, then Σ c_k ζ_n^k with at most two
/// nonzero c_k ∈ {±1, ±2}.
pub fn lambda_sweep(conductor: u32) -> Vec<Cyclotomic> {
    let mut out = Vec::new();
    for h in 1..=4i64 {
        for q in 1..=h {
            for p in (1..=h).flat_map(|p| [p, -p]) {
                if p.abs().max(q) == h && gcd(p.unsigned_abs(), q as u64) == 1 {
                    out.push(Cyclotomic::from_frac(p, q));
                }
            }
        }
    }
    let n = conductor.max(1);
    let coeffs = [1i64, -1, 2, -2];
    for k in 0..n as i64 {
        for &a in &coeffs {
            out.push(Cyclotomic::root(n, k).scale(&Rational::from_integer(a.into())).canonicalize());
        }
    }
    for k in 0..n as i64 {
        for l in k + 1..n as i64 {
            for &a in &coeffs {
                for &b in &coeffs {
                    let x = (Cyclotomic::root(n, k).scale(&Rational::from_integer(a.into()))
                        + Cyclotomic::root(n, l).scale(&Rational::from_integer(b.into())))
                    .canonicalize();
                    if !x.is_zero() {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Rationalized {
    pub lambda: Cyclotomic,
    pub tried: usize,
    pub polys: Vec<Poly>,
    pub jacobian: Poly,
}

/// g_i = Σ_γ γ(λ f_i) for the first λ in the sweep giving G-invariant,
/// rational and algebraically independent g_i.
pub fn galois_rationalize(group: &Group, fs: &[Poly], conductor: u32) -> Result<Rationalized, InvariantError> {
    let mats = group_matrices(group)?;
    let gamma = units(conductor);
    let sweep = lambda_sweep(conductor);
    for (tried, lambda) in sweep.iter().enumerate() {
        let gs: Vec<Poly> = fs
            .iter()
            .map(|f| {
                let lf = f.scale(lambda);
                gamma.iter().fold(Poly::zero(f.vars), |acc, &k| acc.add(&lf.galois(k as i64)))
            })
            .collect();
        if gs.iter().any(|g| g.is_zero() || !g.is_rational()) {
            continue;
        }
        let jac = jacobian(&gs);
        if jac.is_zero() || !gs.iter().all(|g| is_invariant(&mats, g)) {
            continue;
        }
        return Ok(Rationalized { lambda: lambda.clone(), tried: tried + 1, polys: gs, jacobian: jac });
    }
    Err(InvariantError::SweepExhausted(sweep.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Hyperplane {
    /// l_H with first nonzero coefficient 1.
    pub form: Vec<Cyclotomic>,
    /// Order of the pointwise stabilizer.
    pub e_h: u32,
}

/// Reflecting hyperplanes with their e_H.
pub fn hyperplanes(group: &Group) -> Vec<Hyperplane> {
    let mut by_form: BTreeMap<Vec<Vec<Rational>>, (Vec<Cyclotomic>, u32)> = BTreeMap::new();
    let n = group.dim();
    for x in group.reflections() {
        let m = group.matrix(x).sub(&CycMatrix::identity(n)).expect("square");
        let Some(row) = (0..n).map(|i| m.row(i).to_vec()).find(|r| r.iter().any(|c| !c.is_zero())) else { continue };
        let lead = row.iter().find(|c| !c.is_zero()).unwrap().inv().expect("nonzero");
        let form: Vec<Cyclotomic> = row.iter().map(|c| (c * &lead).canonicalize()).collect();
        let cond = form.iter().fold(1, |a, c| crate::cyclotomic::lcm(a, c.conductor()));
        let key: Vec<Vec<Rational>> = form.iter().map(|c| c.key_at(cond.max(1) * 2)).collect();
        by_form.entry(key).or_insert_with(|| (form, 1)).1 += 1;
    }
    by_form.into_values().map(|(form, e_h)| Hyperplane { form, e_h }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantReport {
    pub hyperplanes: Vec<Hyperplane>,
    pub delta: Poly,
    pub cocycle: BTreeMap<u32, Cyclotomic>,
    pub lambda: Cyclotomic,
    pub rational: Poly,
    pub degree: u32,
}

/// Δ = Π l_H^{e_H}, its cocycle γ(Δ) = λ_γ Δ, and λ^{-1}Δ with λ from the
/// scalar Hilbert 90 sum; the result has rational coefficients.
pub fn discriminant_rational(group: &Group) -> Result<DiscriminantReport, InvariantError> {
    let hs = hyperplanes(group);
    let n = group.dim();
    let mut delta = Poly::constant(n, Cyclotomic::one());
    for h in &hs {
        delta = delta.mul(&Poly::linear(&h.form).pow(h.e_h));
    }
    let conductor = delta.terms.values().fold(1, |a, c| crate::cyclotomic::lcm(a, c.conductor()));
    let conductor = if conductor % 4 == 2 { conductor / 2 } else { conductor };
    let mut cocycle = BTreeMap::new();
    for k in units(conductor) {
        let r = delta
            .galois(k as i64)
            .ratio_to(&delta)
            .ok_or_else(|| InvariantError::Invalid(format!("σ_{k}(Δ) is not a multiple of Δ")))?;
        cocycle.insert(k % conductor.max(1), r);
    }
    let acting = Acting::full(conductor.max(1));
    let lambda = scalar_hilbert90(&cocycle, &acting, &fixed_field_basis(conductor.max(1), &[1]))
        .ok_or_else(|| InvariantError::Invalid("scalar Hilbert 90 found no λ".into()))?;
    let rational = delta.scale(&lambda.inv().expect("nonzero"));
    if !rational.is_rational() {
        return Err(InvariantError::Invalid("λ^{-1}Δ is not rational".into()));
    }
    let degree = hs.iter().map(|h| h.e_h).sum();
    Ok(DiscriminantReport { hyperplanes: hs, delta, cocycle, lambda, rational, degree })
}

/// c_g with f∘g = c_g·f for every g, if f is semi-invariant.
pub fn semi_invariant_factors(group: &Group, f: &Poly) -> Option<Vec<Cyclotomic>> {
    (0..group.order() as u32).map(|x| f.compose_linear(&group.matrix(x)).ratio_to(f)).collect()
}
