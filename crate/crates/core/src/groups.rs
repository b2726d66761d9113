//! The groups G(de,e,r) as monomial matrices, closures of explicit matrix
//! generators, and the finite-group data (multiplication table, classes,
//! reflections, center, linear characters) shared by the other modules.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{gcd, lcm, Cyclotomic, Rational};
use crate::linalg::CycMatrix;

/// Groups above this order are never given a multiplication table.
pub const TABLE_BOUND: usize = 4096;
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group has {required} elements, above the bound {bound}")]
    TooLarge { required: u64, bound: u64 },
    #[error("invalid group parameters: {0}")]
    BadSpec(String),
    #[error("missing image for generator {0}")]
    MissingGenerator(String),
    #[error("unknown generator {0} in word")]
    UnknownGenerator(String),
    #[error("cannot parse word {0:?}")]
    BadWord(String),
    #[error("matrix is not invertible or has no finite order")]
    BadGenerator,
    #[error("element does not belong to the group")]
    NotInGroup,
}

/// Parameters of G(de,e,r).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    pub d: u32,
    pub e: u32,
    pub r: u32,
}

impl GroupSpec {
    pub fn new(d: u32, e: u32, r: u32) -> Result<Self, GroupError> {
        if d == 0 || e == 0 || r == 0 {
            return Err(GroupError::BadSpec(format!("d={d}, e={e}, r={r}")));
        }
        Ok(GroupSpec { d, e, r })
    }

    /// G(m,e,r) in the usual labelling, where e must divide m.
    pub fn imprimitive(m: u32, e: u32, r: u32) -> Result<Self, GroupError> {
        if e == 0 || m == 0 || m % e != 0 {
            return Err(GroupError::BadSpec(format!("G({m},{e},{r}): e must divide m")));
        }
        Self::new(m / e, e, r)
    }

    pub fn de(&self) -> u32 {
        self.d * self.e
    }

    pub fn order(&self) -> u64 {
        let fact: u64 = (1..=self.r as u64).product();
        (self.d as u64).pow(self.r) * (self.e as u64).pow(self.r - 1) * fact
    }

    pub fn center_order(&self) -> u64 {
        self.d as u64 * gcd(self.e as u64, self.r as u64)
    }

    /// False for S_2 = G(1,1,2) and G(2,2,2), which are abelian and fall
    /// outside the d·gcd(e,r) center formula.
    pub fn center_formula_applies(&self) -> bool {
        !(self.is_symmetric() && self.r == 2) && !self.is_g222()
    }

    pub fn is_symmetric(&self) -> bool {
        self.d == 1 && self.e == 1
    }

    pub fn is_g222(&self) -> bool {
        self.d == 1 && self.e == 2 && self.r == 2
    }

    /// The ambient G(de,1,r).
    pub fn ambient(&self) -> GroupSpec {
        GroupSpec { d: self.de(), e: 1, r: self.r }
    }

    pub fn label(&self) -> String {
        format!("G({},{},{})", self.de(), self.e, self.r)
    }

    /// Number of valid exponent vectors.
    fn exps_count(&self) -> usize {
        (self.de() as usize).pow(self.r - 1) * self.d as usize
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.d > 1 {
            names.push(if self.e == 1 { "t".to_string() } else { "t'".to_string() });
        }
        if self.e > 1 && self.r >= 2 {
            names.push("s1'".to_string());
        }
        for i in 1..self.r {
            names.push(format!("s{i}"));
        }
        names
    }

    pub fn generators(&self) -> Vec<(String, MonomialElement)> {
        let r = self.r as usize;
        let mut out = Vec::new();
        for name in self.generator_names() {
            let g = match name.as_str() {
                "t" | "t'" => MonomialElement::diagonal_t(r, self.e),
                "s1'" => MonomialElement::s1_twisted(r, self.de()),
                s => {
                    let i: usize = s[1..].parse().expect("generator index");
                    MonomialElement::transposition(r, i - 1)
                }
            };
            out.push((name, g));
        }
        out
    }

    /// Defining relations: orders, Eq. (1) braid relations, and the B_r-type
    /// relations when e = 1.
    pub fn relations(&self) -> Vec<Relation> {
        let mut rels = Vec::new();
        let w = |s: &str| parse_word(s).expect("static word");
        let r = self.r;
        let has_t = self.d > 1;
        let has_s1p = self.e > 1 && r >= 2;
        let tn = if self.e == 1 { "t" } else { "t'" };
        if has_t {
            rels.push(Relation::new(&format!("{tn}^{}", self.d), w(&format!("{tn}^{}", self.d)), vec![]));
        }
        if has_s1p {
            rels.push(Relation::new("s1'^2", w("s1'^2"), vec![]));
        }
        for i in 1..r {
            rels.push(Relation::new(&format!("s{i}^2"), w(&format!("s{i}^2")), vec![]));
        }
        if self.e == 1 {
            if has_t && r >= 2 {
                rels.push(Relation::from_strs("t s1 t s1 = s1 t s1 t"));
            }
            if has_t {
                for i in 2..r {
                    rels.push(Relation::from_strs(&format!("t s{i} = s{i} t")));
                }
            }
        } else if r >= 2 {
            if has_t {
                rels.push(Relation::from_strs("t' s1' s1 = s1' s1 t'"));
            }
            let alt = |start_primed: bool, k: u32| -> Vec<&str> {
                (0..k)
                    .map(|j| if (j % 2 == 0) == start_primed { "s1'" } else { "s1" })
                    .collect()
            };
            let e = self.e;
            let (lhs, rhs) = if has_t {
                let mut l = vec!["s1", "t'"];
                l.extend(alt(true, e - 1));
                let mut rr = vec!["t'"];
                rr.extend(alt(true, e));
                (l, rr)
            } else {
                (alt(false, e), alt(true, e))
            };
            rels.push(Relation::from_strs(&format!("{} = {}", lhs.join(" "), rhs.join(" "))));
            if has_t {
                for i in 2..r {
                    rels.push(Relation::from_strs(&format!("t' s{i} = s{i} t'")));
                }
            }
            if r >= 3 {
                rels.push(Relation::from_strs("s1' s1 s2 s1' s1 s2 = s2 s1' s1 s2 s1' s1"));
                rels.push(Relation::from_strs("s1' s2 s1' = s2 s1' s2"));
                for i in 3..r {
                    rels.push(Relation::from_strs(&format!("s1' s{i} = s{i} s1'")));
                }
            }
        }
        for i in 1..r {
            for j in i + 1..r {
                if j == i + 1 {
                    rels.push(Relation::from_strs(&format!("s{i} s{j} s{i} = s{j} s{i} s{j}")));
                } else {
                    rels.push(Relation::from_strs(&format!("s{i} s{j} = s{j} s{i}")));
                }
            }
        }
        rels
    }

    /// The word z generating the center.
    pub fn central_word(&self) -> Word {
        let r = self.r as i32;
        let mut w = Word::new();
        let cox: Vec<String> = self.generator_names();
        if self.e == 1 {
            for _ in 0..r {
                for n in &cox {
                    w.push((n.clone(), 1));
                }
            }
            return w;
        }
        let g = gcd(self.e as u64, self.r as u64) as i32;
        if self.d > 1 {
            w.push(("t'".to_string(), r / g));
        }
        let rest: Vec<String> = cox.into_iter().filter(|n| n != "t'").collect();
        for _ in 0..(self.e as i32 * (r - 1) / g) {
            for n in &rest {
                w.push((n.clone(), 1));
            }
        }
        w
    }

    fn rank(&self, g: &MonomialElement) -> usize {
        let r = self.r as usize;
        let de = self.de() as usize;
        let mut exps_idx = 0usize;
        for j in 0..r - 1 {
            exps_idx = exps_idx * de + g.exps[j] as usize;
        }
        exps_idx = exps_idx * self.d as usize + g.exps[r - 1] as usize / self.e as usize;
        lehmer_rank(&g.perm) * self.exps_count() + exps_idx
    }

    pub fn contains(&self, g: &MonomialElement) -> bool {
        g.perm.len() == self.r as usize
            && g.exps.iter().all(|&a| a < self.de())
            && g.exps.iter().map(|&a| a as u64).sum::<u64>() % self.e as u64 == 0
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn lehmer_rank(perm: &[u8]) -> usize {
    let r = perm.len();
    let mut rank = 0;
    for i in 0..r {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank = rank * (r - i) + smaller;
    }
    rank
}

fn permutations_lex(r: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    let mut used = vec![false; r];
    fn rec(r: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in 0..r {
            if !used[i] {
                used[i] = true;
                cur.push(i as u8);
                rec(r, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(r, &mut cur, &mut used, &mut out);
    out
}

/// D_a·P_π with P_π e_j = e_{π(j)}; exps are taken modulo the ambient de.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialElement {
    pub perm: Vec<u8>,
    pub exps: Vec<u32>,
}

impl MonomialElement {
    pub fn identity(r: usize) -> Self {
        MonomialElement { perm: (0..r as u8).collect(), exps: vec![0; r] }
    }

    /// Diag(ζ_{de}^k, 1, …, 1).
    pub fn diagonal_t(r: usize, k: u32) -> Self {
        let mut g = Self::identity(r);
        g.exps[0] = k;
        g
    }

    pub fn transposition(r: usize, i: usize) -> Self {
        let mut g = Self::identity(r);
        g.perm.swap(i, i + 1);
        g
    }

    /// s_1^t = t^{-1} s_1 t.
    pub fn s1_twisted(r: usize, m: u32) -> Self {
        let t = Self::diagonal_t(r, 1);
        t.inverse(m).mul(&Self::transposition(r, 0), m).mul(&t, m)
    }

    pub fn mul(&self, other: &Self, m: u32) -> Self {
        let r = self.perm.len();
        let mut perm = vec![0u8; r];
        let mut exps = self.exps.clone();
        for j in 0..r {
            let pj = self.perm[j] as usize;
            perm[j] = self.perm[other.perm[j] as usize];
            exps[pj] = (exps[pj] + other.exps[j]) % m;
        }
        MonomialElement { perm, exps }
    }

    pub fn inverse(&self, m: u32) -> Self {
        let r = self.perm.len();
        let mut perm = vec![0u8; r];
        let mut exps = vec![0u32; r];
        for j in 0..r {
            perm[self.perm[j] as usize] = j as u8;
        }
        for i in 0..r {
            exps[i] = (m - self.exps[self.perm[i] as usize] % m) % m;
        }
        MonomialElement { perm, exps }
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&a| a == 0) && self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    pub fn order(&self, m: u32) -> u32 {
        let mut x = self.clone();
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self, m);
            k += 1;
        }
        k
    }

    pub fn to_matrix(&self, m: u32) -> CycMatrix {
        let r = self.perm.len();
        let mut mat = CycMatrix::zeros(r, r);
        for j in 0..r {
            let i = self.perm[j] as usize;
            mat.set(i, j, Cyclotomic::root(m, self.exps[i] as i64));
        }
        mat
    }

    pub fn trace(&self, m: u32) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for j in 0..self.perm.len() {
            if self.perm[j] as usize == j {
                acc = acc + Cyclotomic::root(m, self.exps[j] as i64);
            }
        }
        acc
    }

    /// Codimension of the fixed space: r minus the number of cycles whose
    /// exponent sum vanishes modulo m.
    pub fn fixed_codim(&self, m: u32) -> usize {
        let r = self.perm.len();
        let mut seen = vec![false; r];
        let mut fixed = 0;
        for s in 0..r {
            if seen[s] {
                continue;
            }
            let mut j = s;
            let mut sum = 0u32;
            while !seen[j] {
                seen[j] = true;
                sum = (sum + self.exps[j]) % m;
                j = self.perm[j] as usize;
            }
            if sum == 0 {
                fixed += 1;
            }
        }
        r - fixed
    }

    pub fn scalar_exp(&self) -> Option<u32> {
        let id = self.perm.iter().enumerate().all(|(i, &p)| p as usize == i);
        (id && self.exps.iter().all(|&a| a == self.exps[0])).then_some(self.exps[0])
    }
}

/// All elements of G(de,e,r) in lexicographic (perm, exps) order.
pub fn enumerate(spec: &GroupSpec, bound: u64) -> Result<Vec<MonomialElement>, GroupError> {
    let n = spec.order();
    if n > bound {
        return Err(GroupError::TooLarge { required: n, bound });
    }
    let r = spec.r as usize;
    let de = spec.de();
    let mut exps_list = Vec::with_capacity(spec.exps_count());
    let mut cur = vec![0u32; r];
    loop {
        let s: u32 = cur[..r - 1].iter().sum();
        let base = (spec.e - s % spec.e) % spec.e;
        for k in 0..spec.d {
            cur[r - 1] = base + k * spec.e;
            exps_list.push(cur.clone());
        }
        // odometer on the first r-1 slots
        let mut i = r - 1;
        loop {
            if i == 0 {
                let mut out = Vec::with_capacity(n as usize);
                for p in permutations_lex(r) {
                    for ex in &exps_list {
                        out.push(MonomialElement { perm: p.clone(), exps: ex.clone() });
                    }
                }
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < de {
                break;
            }
            cur[i] = 0;
        }
    }
}

pub type Word = Vec<(String, i32)>;

/// Parses "s t^-1 s^2" into generator powers.
pub fn parse_word(s: &str) -> Result<Word, GroupError> {
    let mut w = Word::new();
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, pow) = match tok.split_once('^') {
            Some((n, p)) => (n, p.parse::<i32>().map_err(|_| GroupError::BadWord(s.to_string()))?),
            None => (tok, 1),
        };
        if name.is_empty() {
            return Err(GroupError::BadWord(s.to_string()));
        }
        w.push((name.to_string(), pow));
    }
    Ok(w)
}

pub fn word_to_string(w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter()
        .map(|(n, p)| if *p == 1 { n.clone() } else { format!("{n}^{p}") })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(name: &str, lhs: Word, rhs: Word) -> Self {
        Relation { name: name.to_string(), lhs, rhs }
    }

    /// "lhs = rhs" with whitespace separated tokens; a missing rhs means 1.
    pub fn from_strs(s: &str) -> Self {
        let (l, r) = s.split_once('=').unwrap_or((s, "1"));
        Relation {
            name: s.to_string(),
            lhs: parse_word(l).expect("relation word"),
            rhs: parse_word(r).expect("relation word"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
}

/// Evaluates a word in an arbitrary monoid given by `mul`, `inv`, `one`.
pub fn eval_word_with<T: Clone>(
    w: &Word,
    images: &BTreeMap<String, T>,
    one: &T,
    mul: &dyn Fn(&T, &T) -> T,
    inv: &dyn Fn(&T) -> T,
) -> Result<T, GroupError> {
    let mut acc = one.clone();
    for (name, p) in w {
        let g = images.get(name).ok_or_else(|| GroupError::MissingGenerator(name.clone()))?;
        let base = if *p < 0 { inv(g) } else { g.clone() };
        for _ in 0..p.unsigned_abs() {
            acc = mul(&acc, &base);
        }
    }
    Ok(acc)
}

pub fn check_relations_with<T: Clone>(
    rels: &[Relation],
    images: &BTreeMap<String, T>,
    one: &T,
    mul: &dyn Fn(&T, &T) -> T,
    inv: &dyn Fn(&T) -> T,
    eq: &dyn Fn(&T, &T) -> bool,
) -> Result<Vec<RelationCheck>, GroupError> {
    rels.iter()
        .map(|rel| {
            let l = eval_word_with(&rel.lhs, images, one, mul, inv)?;
            let r = eval_word_with(&rel.rhs, images, one, mul, inv)?;
            Ok(RelationCheck { relation: rel.name.clone(), holds: eq(&l, &r) })
        })
        .collect()
}

pub fn check_relations_matrices(
    rels: &[Relation],
    images: &BTreeMap<String, CycMatrix>,
) -> Result<Vec<RelationCheck>, GroupError> {
    let n = images.values().next().map_or(0, |m| m.rows());
    check_relations_with(
        rels,
        images,
        &CycMatrix::identity(n),
        &|a, b| a.dot(b),
        &|a| a.inverse().expect("generator image must be invertible"),
        &|a, b| a == b,
    )
}

pub fn check_relations_monomial(
    rels: &[Relation],
    images: &BTreeMap<String, MonomialElement>,
    spec: &GroupSpec,
) -> Result<Vec<RelationCheck>, GroupError> {
    let m = spec.de();
    check_relations_with(
        rels,
        images,
        &MonomialElement::identity(spec.r as usize),
        &|a, b| a.mul(b, m),
        &|a| a.inverse(m),
        &|a, b| a == b,
    )
}

/// Closure of explicit matrix generators.
#[derive(Clone, Debug)]
pub struct ExplicitGroup {
    pub label: String,
    pub generators: Vec<(String, CycMatrix)>,
    pub elements: Vec<CycMatrix>,
    /// right[g][x] = index of elements[x]·generators[g]
    right: Vec<Vec<u32>>,
    parent: Vec<(u32, u32)>,
}

fn matrix_key(m: &CycMatrix, conductor: u32) -> Vec<Rational> {
    m.entries().iter().flat_map(|x| x.key_at(conductor)).collect()
}

/// Breadth-first closure; elements are in order of discovery.
pub fn matrix_closure(
    label: &str,
    gens: &[(String, CycMatrix)],
    bound: usize,
) -> Result<ExplicitGroup, GroupError> {
    let n = gens.first().map_or(1, |g| g.1.rows());
    if gens.iter().any(|(_, g)| !g.is_square() || g.rows() != n || g.det().map_or(true, |d| d.is_zero())) {
        return Err(GroupError::BadGenerator);
    }
    let conductor = gens.iter().fold(1, |acc, (_, g)| lcm(acc, g.conductor()));
    let id = CycMatrix::identity(n);
    let mut index: HashMap<Vec<Rational>, u32> = HashMap::new();
    index.insert(matrix_key(&id, conductor), 0);
    let mut elements = vec![id];
    let mut parent = vec![(u32::MAX, u32::MAX)];
    let mut right: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    let mut x = 0usize;
    while x < elements.len() {
        for (gi, (_, g)) in gens.iter().enumerate() {
            let y = elements[x].dot(g);
            let key = matrix_key(&y, conductor);
            let idx = match index.get(&key) {
                Some(&i) => i,
                None => {
                    if elements.len() >= bound {
                        return Err(GroupError::TooLarge { required: elements.len() as u64 + 1, bound: bound as u64 });
                    }
                    let i = elements.len() as u32;
                    index.insert(key, i);
                    elements.push(y);
                    parent.push((x as u32, gi as u32));
                    i
                }
            };
            right[gi].push(idx);
        }
        x += 1;
    }
    Ok(ExplicitGroup { label: label.to_string(), generators: gens.to_vec(), elements, right, parent })
}

impl ExplicitGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn center_order(&self) -> usize {
        self.elements
            .iter()
            .enumerate()
            .filter(|(x, _)| {
                self.generators.iter().enumerate().all(|(gi, (_, g))| {
                    let left = g.dot(&self.elements[*x]);
                    left == self.elements[self.right[gi][*x] as usize]
                })
            })
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Imprimitive(GroupSpec),
    Explicit(String),
}

#[derive(Clone, Debug)]
enum Realization {
    Monomial(Vec<MonomialElement>),
    Matrices(Vec<CycMatrix>),
}

/// A finite group with everything precomputed for brute-force work.
#[derive(Clone, Debug)]
pub struct Group {
    pub label: String,
    pub kind: GroupKind,
    dim: usize,
    realization: Realization,
    n: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    ord: Vec<u32>,
    gens: Vec<(String, u32)>,
    parent: Vec<(u32, u32)>,
    classes: Vec<Vec<u32>>,
    class_of: Vec<u32>,
    reflection: Vec<bool>,
    scalar: Vec<Option<Cyclotomic>>,
    relations: Vec<Relation>,
    conductor: u32,
}

impl Group {
    pub fn imprimitive(spec: GroupSpec) -> Result<Self, GroupError> {
        let n = spec.order();
        if n > TABLE_BOUND as u64 {
            return Err(GroupError::TooLarge { required: n, bound: TABLE_BOUND as u64 });
        }
        let elems = enumerate(&spec, DEFAULT_ENUMERATION_BOUND)?;
        let n = elems.len();
        let m = spec.de();
        let mut table = vec![0u32; n * n];
        for (x, a) in elems.iter().enumerate() {
            for (y, b) in elems.iter().enumerate() {
                table[x * n + y] = spec.rank(&a.mul(b, m)) as u32;
            }
        }
        let gens: Vec<(String, u32)> = spec
            .generators()
            .into_iter()
            .map(|(name, g)| (name, spec.rank(&g) as u32))
            .collect();
        let reflection = elems.iter().map(|g| g.fixed_codim(m) == 1).collect();
        let scalar = elems.iter().map(|g| g.scalar_exp().map(|a| Cyclotomic::root(m, a as i64))).collect();
        Ok(Self::finish(
            spec.label(),
            GroupKind::Imprimitive(spec),
            spec.r as usize,
            Realization::Monomial(elems),
            table,
            gens,
            reflection,
            scalar,
            spec.relations(),
            m,
        ))
    }

    pub fn explicit(eg: &ExplicitGroup, relations: Vec<Relation>) -> Result<Self, GroupError> {
        let n = eg.order();
        if n > TABLE_BOUND {
            return Err(GroupError::TooLarge { required: n as u64, bound: TABLE_BOUND as u64 });
        }
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            table[x * n] = x as u32;
            for y in 1..n {
                let (p, g) = eg.parent[y];
                let xp = table[x * n + p as usize];
                table[x * n + y] = eg.right[g as usize][xp as usize];
            }
        }
        let gens: Vec<(String, u32)> = eg
            .generators
            .iter()
            .map(|(name, g)| {
                let idx = eg.elements.iter().position(|x| x == g).expect("generator in closure");
                (name.clone(), idx as u32)
            })
            .collect();
        let reflection = eg.elements.iter().map(|g| g.fixed_codim() == 1).collect();
        let scalar = eg.elements.iter().map(|g| g.as_scalar()).collect();
        let dim = eg.generators.first().map_or(0, |g| g.1.rows());
        let conductor = eg.generators.iter().fold(1, |acc, (_, g)| lcm(acc, g.conductor()));
        Ok(Self::finish(
            eg.label.clone(),
            GroupKind::Explicit(eg.label.clone()),
            dim,
            Realization::Matrices(eg.elements.clone()),
            table,
            gens,
            reflection,
            scalar,
            relations,
            conductor,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        label: String,
        kind: GroupKind,
        dim: usize,
        realization: Realization,
        table: Vec<u32>,
        gens: Vec<(String, u32)>,
        reflection: Vec<bool>,
        scalar: Vec<Option<Cyclotomic>>,
        relations: Vec<Relation>,
        conductor: u32,
    ) -> Self {
        let n = reflection.len();
        let mut inv = vec![0u32; n];
        for x in 0..n {
            for y in 0..n {
                if table[x * n + y] == 0 {
                    inv[x] = y as u32;
                    break;
                }
            }
        }
        let mut ord = vec![1u32; n];
        for x in 1..n {
            let mut y = x;
            let mut k = 1;
            while y != 0 {
                y = table[y * n + x] as usize;
                k += 1;
            }
            ord[x] = k;
        }
        let mut parent = vec![(u32::MAX, u32::MAX); n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (gi, (_, g)) in gens.iter().enumerate() {
                let y = table[x * n + *g as usize] as usize;
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = (x as u32, gi as u32);
                    queue.push_back(y);
                }
            }
        }
        let mut g = Group {
            label,
            kind,
            dim,
            realization,
            n,
            table,
            inv,
            ord,
            gens,
            parent,
            classes: Vec::new(),
            class_of: Vec::new(),
            reflection,
            scalar,
            relations,
            conductor,
        };
        g.compute_classes();
        g
    }

    fn compute_classes(&mut self) {
        let n = self.n;
        let mut class_of = vec![u32::MAX; n];
        let mut classes: Vec<Vec<u32>> = Vec::new();
        for x in 0..n {
            if class_of[x] != u32::MAX {
                continue;
            }
            let c = classes.len() as u32;
            let mut orbit = vec![x as u32];
            class_of[x] = c;
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for &(_, g) in &self.gens {
                    let z = self.mul(self.mul(self.inv[g as usize], y), g);
                    if class_of[z as usize] == u32::MAX {
                        class_of[z as usize] = c;
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            classes.push(orbit);
        }
        classes.sort_by_key(|c| (self.ord[c[0] as usize], c.len(), c[0]));
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x as usize] = i as u32;
            }
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> Option<GroupSpec> {
        match &self.kind {
            GroupKind::Imprimitive(s) => Some(*s),
            GroupKind::Explicit(_) => None,
        }
    }

    /// Conductor of the natural matrices.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn identity(&self) -> u32 {
        0
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize * self.n + y as usize]
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    pub fn elt_order(&self, x: u32) -> u32 {
        self.ord[x as usize]
    }

    pub fn pow(&self, x: u32, k: i64) -> u32 {
        let o = self.ord[x as usize] as i64;
        let k = k.rem_euclid(o);
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    /// y^{-1} x y
    pub fn conj(&self, x: u32, y: u32) -> u32 {
        self.mul(self.mul(self.inv(y), x), y)
    }

    pub fn generators(&self) -> &[(String, u32)] {
        &self.gens
    }

    pub fn generator(&self, name: &str) -> Option<u32> {
        self.gens.iter().find(|(n, _)| n == name).map(|(_, g)| *g)
    }

    pub fn generator_images(&self) -> BTreeMap<String, u32> {
        self.gens.iter().cloned().collect()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Generator indices spelling x from the identity.
    pub fn word_of(&self, x: u32) -> Vec<usize> {
        let mut w = Vec::new();
        let mut y = x as usize;
        while y != 0 {
            let (p, g) = self.parent[y];
            w.push(g as usize);
            y = p as usize;
        }
        w.reverse();
        w
    }

    pub fn word_string(&self, x: u32) -> String {
        let w: Word = self.word_of(x).into_iter().map(|g| (self.gens[g].0.clone(), 1)).collect();
        word_to_string(&w)
    }

    /// Elements in breadth-first order together with (parent, generator),
    /// so that x = parent·generator.
    pub fn bfs_order(&self) -> Vec<(u32, u32, u32)> {
        let mut order: Vec<u32> = (1..self.n as u32).collect();
        order.sort_by_key(|&x| self.word_of(x).len());
        order.into_iter().map(|x| (x, self.parent[x as usize].0, self.parent[x as usize].1)).collect()
    }

    pub fn eval_word(&self, w: &Word) -> Result<u32, GroupError> {
        let images = self.generator_images();
        eval_word_with(w, &images, &0u32, &|a, b| self.mul(*a, *b), &|a| self.inv(*a))
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_of(&self, x: u32) -> usize {
        self.class_of[x as usize] as usize
    }

    pub fn class_reps(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }

    /// Class of x^k for every class.
    pub fn power_map(&self, k: i64) -> Vec<usize> {
        self.classes.iter().map(|c| self.class_of(self.pow(c[0], k))).collect()
    }

    pub fn is_reflection(&self, x: u32) -> bool {
        self.reflection[x as usize]
    }

    pub fn reflections(&self) -> Vec<u32> {
        (0..self.n as u32).filter(|&x| self.reflection[x as usize]).collect()
    }

    pub fn center(&self) -> Vec<u32> {
        (0..self.n as u32)
            .filter(|&x| self.gens.iter().all(|&(_, g)| self.mul(x, g) == self.mul(g, x)))
            .collect()
    }

    /// The scalar by which x acts in the natural representation, if any.
    pub fn scalar(&self, x: u32) -> Option<&Cyclotomic> {
        self.scalar[x as usize].as_ref()
    }

    pub fn element_with_scalar(&self, c: &Cyclotomic) -> Option<u32> {
        (0..self.n as u32).find(|&x| self.scalar[x as usize].as_ref() == Some(c))
    }

    pub fn monomial(&self, x: u32) -> Option<&MonomialElement> {
        match &self.realization {
            Realization::Monomial(v) => Some(&v[x as usize]),
            Realization::Matrices(_) => None,
        }
    }

    pub fn index_of_monomial(&self, g: &MonomialElement) -> Result<u32, GroupError> {
        match &self.kind {
            GroupKind::Imprimitive(spec) if spec.contains(g) => Ok(spec.rank(g) as u32),
            _ => Err(GroupError::NotInGroup),
        }
    }

    pub fn index_of_matrix(&self, m: &CycMatrix) -> Option<u32> {
        match &self.realization {
            Realization::Matrices(v) => v.iter().position(|x| x == m).map(|i| i as u32),
            Realization::Monomial(v) => v
                .iter()
                .position(|x| x.to_matrix(self.conductor) == *m)
                .map(|i| i as u32),
        }
    }

    /// The natural (defining) matrix of x.
    pub fn matrix(&self, x: u32) -> CycMatrix {
        match &self.realization {
            Realization::Monomial(v) => v[x as usize].to_matrix(self.conductor),
            Realization::Matrices(v) => v[x as usize].clone(),
        }
    }

    /// Trace of the natural representation on each class.
    pub fn natural_character_values(&self) -> Vec<Cyclotomic> {
        self.classes
            .iter()
            .map(|c| match &self.realization {
                Realization::Monomial(v) => v[c[0] as usize].trace(self.conductor),
                Realization::Matrices(v) => v[c[0] as usize].trace().expect("square"),
            })
            .collect()
    }

    /// Ad(t)^k x = t^k x t^{-k} for the diagonal t = Diag(ζ_{de},1,…,1).
    pub fn ad_t(&self, k: i64, x: u32) -> u32 {
        let spec = self.spec().expect("Ad t is defined for G(de,e,r)");
        let m = spec.de();
        let r = spec.r as usize;
        let kk = k.rem_euclid(m as i64) as u32;
        let t = MonomialElement::diagonal_t(r, kk);
        let g = self.monomial(x).expect("monomial");
        let y = t.mul(g, m).mul(&t.inverse(m), m);
        spec.rank(&y) as u32
    }

    /// Index in the ambient G(de,1,r) of an element of G(de,e,r).
    pub fn ambient_index(&self, x: u32) -> usize {
        let spec = self.spec().expect("imprimitive");
        spec.ambient().rank(self.monomial(x).expect("monomial"))
    }

    pub fn check_own_relations(&self) -> Result<Vec<RelationCheck>, GroupError> {
        let images = self.generator_images();
        check_relations_with(
            &self.relations,
            &images,
            &0u32,
            &|a, b| self.mul(*a, *b),
            &|a| self.inv(*a),
            &|a, b| a == b,
        )
    }

    /// All homomorphisms G → ℂ^×, as exponent vectors of ζ_L.
    pub fn linear_characters(&self) -> Vec<LinearCharacter> {
        let orders: Vec<u32> = self.gens.iter().map(|&(_, g)| self.ord[g as usize]).collect();
        let l = orders.iter().fold(1, |acc, &o| lcm(acc, o));
        let bfs = self.bfs_order();
        let mut out = Vec::new();
        let mut assign = vec![0u32; orders.len()];
        loop {
            let vals: Vec<u32> = assign.iter().zip(&orders).map(|(&a, &o)| a * (l / o)).collect();
            let mut exps = vec![u32::MAX; self.n];
            exps[0] = 0;
            for &(x, p, g) in &bfs {
                exps[x as usize] = (exps[p as usize] + vals[g as usize]) % l;
            }
            let ok = (0..self.n).all(|x| {
                self.gens.iter().enumerate().all(|(gi, &(_, g))| {
                    exps[self.mul(x as u32, g) as usize] == (exps[x] + vals[gi]) % l
                })
            });
            if ok {
                out.push(LinearCharacter { modulus: l, exps });
            }
            let mut i = 0;
            loop {
                if i == assign.len() {
                    return out;
                }
                assign[i] += 1;
                if assign[i] < orders[i] {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCharacter {
    pub modulus: u32,
    pub exps: Vec<u32>,
}

impl LinearCharacter {
    pub fn value(&self, x: u32) -> Cyclotomic {
        Cyclotomic::root(self.modulus, self.exps[x as usize] as i64)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }
}
