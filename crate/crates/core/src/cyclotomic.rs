//! Exact arithmetic in cyclotomic fields ℚ(ζ_n).
//!
//! Elements are stored in the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}` modulo the
//! n-th cyclotomic polynomial. Binary operations coerce both operands to the
//! lcm of their conductors and never canonicalize on their own.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("conductor {from} does not divide {to}")]
    NotDivisible { from: u32, to: u32 },
    #[error("expected {expected} coefficients, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("{exponent} is not a unit modulo {conductor}")]
    NotUnit { exponent: i64, conductor: u32 },
    #[error("sigma_{exponent} mod {conductor} does not satisfy g^{order} = 1")]
    BadOrder { exponent: u32, conductor: u32, order: u32 },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u32, b: u32) -> u32 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a as u64 / gcd(a as u64, b as u64) * b as u64) as u32
}

pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn phi_cache() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (constant term first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = phi_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let q = cyclotomic_poly(d);
        num = exact_div_monic(&num, &q);
    }
    let poly: Vec<i64> = num.into_iter().map(|c| c as i64).collect();
    let poly = Arc::new(poly);
    phi_cache()
        .write()
        .unwrap()
        .entry(n)
        .or_insert(poly)
        .clone()
}

fn exact_div_monic(num: &[i128], den: &[i64]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i128; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        q[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj as i128;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Reduce a dense polynomial modulo Φ_n, returning exactly φ(n) coefficients.
fn reduce(n: u32, mut a: Vec<Rational>) -> Vec<Rational> {
    let p = cyclotomic_poly(n);
    let deg = p.len() - 1;
    if a.len() <= deg {
        a.resize(deg, Rational::zero());
        return a;
    }
    for k in (deg..a.len()).rev() {
        if a[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut a[k], Rational::zero());
        for (j, &pj) in p.iter().enumerate().take(deg) {
            match pj {
                0 => {}
                1 => a[k - deg + j] -= &c,
                -1 => a[k - deg + j] += &c,
                _ => a[k - deg + j] -= &c * Rational::from_integer(BigInt::from(pj)),
            }
        }
    }
    a.truncate(deg);
    a
}

pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, CycError> {
    let s = s.trim();
    let err = || CycError::Parse(s.to_string());
    match s.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| err())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| err())?;
            if b.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(a, b))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| err())?)),
    }
}

/// An element of ℚ(ζ_n).
#[derive(Clone)]
pub struct Cyclotomic {
    n: u32,
    c: Vec<Rational>,
}

impl Cyclotomic {
    pub fn new(conductor: u32, coeffs: Vec<Rational>) -> Result<Self, CycError> {
        let expected = euler_phi(conductor) as usize;
        if coeffs.len() != expected {
            return Err(CycError::BadLength { expected, got: coeffs.len() });
        }
        Ok(Cyclotomic { n: conductor, c: coeffs })
    }

    /// Builds an element from an arbitrary polynomial in ζ_n (any length).
    pub fn from_poly(conductor: u32, poly: Vec<Rational>) -> Self {
        Cyclotomic { n: conductor, c: reduce(conductor, poly) }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn zero_at(n: u32) -> Self {
        Cyclotomic { n, c: vec![Rational::zero(); euler_phi(n) as usize] }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclotomic { n: 1, c: vec![q] }
    }

    pub fn from_i64(k: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(k)))
    }

    pub fn from_frac(a: i64, b: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(a), BigInt::from(b)))
    }

    /// ζ_n^k.
    pub fn root(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        if n == 1 {
            return Self::one();
        }
        let mut dense = vec![Rational::zero(); e + 1];
        dense[e] = Rational::one();
        Cyclotomic { n, c: reduce(n, dense) }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c.iter().skip(1).all(|x| x.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.c[0].is_one()
    }

    /// The same field element expressed at conductor `m`.
    pub fn coerce(&self, m: u32) -> Result<Self, CycError> {
        if m == self.n {
            return Ok(self.clone());
        }
        if m == 0 || m % self.n != 0 {
            return Err(CycError::NotDivisible { from: self.n, to: m });
        }
        if self.is_zero() {
            return Ok(Self::zero_at(m));
        }
        if self.n == 1 {
            let mut c = vec![Rational::zero(); euler_phi(m) as usize];
            c[0] = self.c[0].clone();
            return Ok(Cyclotomic { n: m, c });
        }
        let f = (m / self.n) as usize;
        let mut dense = vec![Rational::zero(); (self.c.len() - 1) * f + 1];
        for (j, x) in self.c.iter().enumerate() {
            if !x.is_zero() {
                dense[j * f] = x.clone();
            }
        }
        Ok(Cyclotomic { n: m, c: reduce(m, dense) })
    }

    fn lift(&self, m: u32) -> Self {
        self.coerce(m).expect("conductor divides lcm")
    }

    /// Re-expresses the element at the smallest conductor whose field contains it.
    pub fn canonicalize(&self) -> Self {
        if self.n == 1 {
            return self.clone();
        }
        if self.is_rational() {
            return Self::from_rational(self.c[0].clone());
        }
        for d in divisors(self.n) {
            if d == self.n {
                break;
            }
            if d % 4 == 2 {
                continue;
            }
            let k = euler_phi(d) as usize;
            let cols: Vec<Vec<Rational>> =
                (0..k).map(|j| Self::root(d, j as i64).lift(self.n).c).collect();
            if let Some(sol) = solve_columns(&cols, &self.c) {
                return Cyclotomic { n: d, c: sol };
            }
        }
        self.clone()
    }

    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(Self::from_rational(self.c[0].recip()));
        }
        let phi: Vec<Rational> = cyclotomic_poly(self.n)
            .iter()
            .map(|&x| Rational::from_integer(BigInt::from(x)))
            .collect();
        let u = poly_inverse_mod(&self.c, &phi).ok_or(CycError::DivisionByZero)?;
        Ok(Cyclotomic::from_poly(self.n, u))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self, CycError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        Ok(base.powu(k.unsigned_abs()))
    }

    pub fn powu(&self, mut k: u64) -> Self {
        let mut result = Self::one();
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        result
    }

    /// ζ ↦ ζ^k on the element's own field; `k` must be prime to the conductor.
    /// For a conductor 2m with m odd, an even k is read modulo m (ℚ(ζ_2m) = ℚ(ζ_m)).
    pub fn galois(&self, k: i64) -> Self {
        let m = self.n as i64;
        if m <= 2 || self.is_rational() {
            return self.clone();
        }
        let mut k = k.rem_euclid(m);
        if m % 4 == 2 && k % 2 == 0 {
            k = (k + m / 2) % m;
        }
        let k = k as usize;
        debug_assert_eq!(gcd(k as u64, m as u64), 1);
        let mut dense = vec![Rational::zero(); m as usize];
        for (j, x) in self.c.iter().enumerate() {
            if !x.is_zero() {
                dense[(j * k) % m as usize] += x;
            }
        }
        Cyclotomic { n: self.n, c: reduce(self.n, dense) }
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic { n: self.n, c: self.c.iter().map(|x| x * q).collect() }
    }

    /// Coefficient vector at a fixed conductor, usable as a hash key.
    pub fn key_at(&self, m: u32) -> Vec<Rational> {
        self.lift(m).c
    }

    /// Complex approximation for debugging output only.
    pub fn approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, x) in self.c.iter().enumerate() {
            let v = x.to_f64().unwrap_or(f64::NAN);
            let a = 2.0 * std::f64::consts::PI * j as f64 / self.n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        (re, im)
    }
}

/// Solves Σ y_j cols[j] = rhs over ℚ; `None` when inconsistent.
fn solve_columns(cols: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let k = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=k {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut y = vec![Rational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        y[c] = m[i][k].clone();
    }
    Some(y)
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b[db].recip();
    let mut q = vec![Rational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &lead_inv;
        if !c.is_zero() {
            for (j, y) in b.iter().enumerate() {
                let t = &c * y;
                r[k + j] -= t;
            }
        }
        q[k] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
    let mut r0 = trim(m.to_vec());
    let mut r1 = trim(a.to_vec());
    let mut s0: Vec<Rational> = Vec::new();
    let mut s1 = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    if r0.len() != 1 {
        return None;
    }
    let g = r0[0].recip();
    Some(s0.into_iter().map(|x| x * &g).collect())
}

fn add_impl(a: &Cyclotomic, b: &Cyclotomic, sign: bool) -> Cyclotomic {
    let m = lcm(a.n, b.n);
    let (a, b) = (a.lift(m), b.lift(m));
    let c = a
        .c
        .iter()
        .zip(b.c.iter())
        .map(|(x, y)| if sign { x - y } else { x + y })
        .collect();
    Cyclotomic { n: m, c }
}

fn mul_impl(a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
    let m = lcm(a.n, b.n);
    if a.is_zero() || b.is_zero() {
        return Cyclotomic::zero_at(m);
    }
    if a.n == 1 {
        return b.lift(m).scale(&a.c[0]);
    }
    if b.n == 1 {
        return a.lift(m).scale(&b.c[0]);
    }
    let (a, b) = (a.lift(m), b.lift(m));
    let k = a.c.len();
    let mut dense = vec![Rational::zero(); 2 * k - 1];
    for (i, x) in a.c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.c.iter().enumerate() {
            if !y.is_zero() {
                dense[i + j] += x * y;
            }
        }
    }
    Cyclotomic { n: m, c: reduce(m, dense) }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(self, rhs)
            }
        }
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: Cyclotomic) -> Cyclotomic {
                $body(&self, &rhs)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(&self, rhs)
            }
        }
        impl $tr<Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $f(self, rhs: Cyclotomic) -> Cyclotomic {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| add_impl(a, b, false));
binop!(Sub, sub, |a, b| add_impl(a, b, true));
binop!(Mul, mul, mul_impl);

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        let m = lcm(self.n, other.n);
        self.lift(m).c == other.lift(m).c
    }
}

impl Eq for Cyclotomic {}

impl From<i64> for Cyclotomic {
    fn from(k: i64) -> Self {
        Cyclotomic::from_i64(k)
    }
}

impl From<Rational> for Cyclotomic {
    fn from(q: Rational) -> Self {
        Cyclotomic::from_rational(q)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let sign = if x.is_negative() { "-" } else { "+" };
            if first {
                if x.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = x.abs();
            match (j, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "E({})^{j}", self.n)?,
                (_, false) => write!(f, "{a}*E({})^{j}", self.n)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct CycRepr {
    conductor: u32,
    coeffs: Vec<String>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycRepr { conductor: self.n, coeffs: self.c.iter().map(rational_to_string).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = CycRepr::deserialize(d)?;
        if r.conductor == 0 {
            return Err(serde::de::Error::custom("conductor must be positive"));
        }
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Cyclotomic::new(r.conductor, coeffs).map_err(serde::de::Error::custom)
    }
}

/// σ_k : ζ_n ↦ ζ_n^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaloisAuto {
    pub conductor: u32,
    pub exponent: u32,
}

impl GaloisAuto {
    pub fn new(conductor: u32, k: i64) -> Result<Self, CycError> {
        if conductor == 1 {
            return Ok(GaloisAuto { conductor, exponent: 1 });
        }
        let e = k.rem_euclid(conductor as i64) as u32;
        if gcd(e as u64, conductor as u64) != 1 {
            return Err(CycError::NotUnit { exponent: k, conductor });
        }
        Ok(GaloisAuto { conductor, exponent: e })
    }

    pub fn identity(conductor: u32) -> Self {
        GaloisAuto { conductor, exponent: 1 % conductor.max(2) }
    }

    pub fn conjugation(conductor: u32) -> Self {
        Self::new(conductor, -1).expect("-1 is a unit")
    }

    pub fn is_identity(&self) -> bool {
        self.conductor <= 2 || self.exponent == 1
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor, "composing automorphisms of different fields");
        if self.conductor == 1 {
            return *self;
        }
        let e = (self.exponent as u64 * other.exponent as u64) % self.conductor as u64;
        GaloisAuto { conductor: self.conductor, exponent: e as u32 }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::identity(self.conductor);
        for _ in 0..k {
            r = r.compose(self);
        }
        r
    }

    pub fn inverse(&self) -> Self {
        let mut g = *self;
        while !g.compose(self).is_identity() {
            g = g.compose(self);
        }
        g
    }

    pub fn order(&self) -> u32 {
        let mut g = *self;
        let mut k = 1;
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }

    /// Restriction to ℚ(ζ_m) for m dividing the conductor.
    pub fn restrict(&self, m: u32) -> Self {
        assert_eq!(self.conductor % m, 0);
        if m == 1 {
            return GaloisAuto { conductor: 1, exponent: 1 };
        }
        GaloisAuto { conductor: m, exponent: self.exponent % m }
    }

    pub fn apply(&self, x: &Cyclotomic) -> Result<Cyclotomic, CycError> {
        if self.conductor % x.conductor() != 0 {
            return Err(CycError::NotDivisible { from: x.conductor(), to: self.conductor });
        }
        Ok(x.galois(self.exponent as i64))
    }
}

/// Gal(ℚ(ζ_n)/ℚ) as the units modulo n, ascending.
pub fn galois_units(n: u32) -> Vec<GaloisAuto> {
    if n == 1 {
        return vec![GaloisAuto { conductor: 1, exponent: 1 }];
    }
    (1..n)
        .filter(|&k| gcd(k as u64, n as u64) == 1)
        .map(|k| GaloisAuto { conductor: n, exponent: k })
        .collect()
}

/// x·g(x)·…·g^{order-1}(x).
pub fn norm_cyclic(x: &Cyclotomic, g: &GaloisAuto, order: u32) -> Result<Cyclotomic, CycError> {
    if !g.pow(order).is_identity() {
        return Err(CycError::BadOrder { exponent: g.exponent, conductor: g.conductor, order });
    }
    let mut acc = Cyclotomic::one();
    let mut y = x.clone();
    for i in 0..order {
        acc = &acc * &y;
        if i + 1 < order {
            y = g.apply(&y)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_roots() {
        assert!(Cyclotomic::root(1, 0).is_one());
        let i = Cyclotomic::root(4, 1);
        assert_eq!(i.coeffs().len(), 2);
        assert_eq!(&i * &i, Cyclotomic::from_i64(-1));
        let s = Cyclotomic::root(3, 1) + Cyclotomic::root(3, 2);
        assert_eq!(s, Cyclotomic::from_i64(-1));
    }

    #[test]
    fn phi_values() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(105).iter().filter(|&&c| c == -2).count(), 2);
    }

    #[test]
    fn mixed_conductors() {
        let x = Cyclotomic::root(3, 1) + Cyclotomic::root(6, 1);
        assert_eq!(x.conductor(), 6);
        assert_eq!(Cyclotomic::root(3, 1).coerce(6).unwrap(), Cyclotomic::root(6, 2));
        assert_eq!(Cyclotomic::root(6, 2).canonicalize().conductor(), 3);
        assert!(Cyclotomic::root(3, 1).coerce(4).is_err());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Cyclotomic::zero_at(8).inv(), Err(CycError::DivisionByZero));
    }

    #[test]
    fn rational_strings() {
        let q = parse_rational("-3/6").unwrap();
        assert_eq!(rational_to_string(&q), "-1/2");
        assert_eq!(rational_to_string(&parse_rational("5").unwrap()), "5/1");
        assert!(parse_rational("1.5").is_err());
    }
}
