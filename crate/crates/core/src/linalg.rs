//! Dense exact matrices over cyclotomic fields.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{lcm, CycError, Cyclotomic, GaloisAuto, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix (rank {rank})")]
    Singular { rank: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("S^{m} is not the identity")]
    NotOfOrder { m: u32 },
    #[error(transparent)]
    Field(#[from] CycError),
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Cyclotomic>,
}

impl CycMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Cyclotomic>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(CycMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Cyclotomic>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        CycMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Cyclotomic::from_i64(x)).collect()).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CycMatrix { rows, cols, entries: vec![Cyclotomic::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Cyclotomic::one())
    }

    pub fn scalar(n: usize, c: Cyclotomic) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = c.clone();
        }
        m
    }

    pub fn diag(values: Vec<Cyclotomic>) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.into_iter().enumerate() {
            m.entries[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Cyclotomic] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Cyclotomic) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Cyclotomic] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Cyclotomic> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// lcm of the entry conductors.
    pub fn conductor(&self) -> u32 {
        self.entries.iter().fold(1, |acc, x| lcm(acc, x.conductor()))
    }

    pub fn canonicalize(&self) -> Self {
        self.map(|x| x.canonicalize())
    }

    pub fn map(&self, f: impl Fn(&Cyclotomic) -> Cyclotomic) -> Self {
        CycMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        CycMatrix { rows: self.cols, cols: self.rows, entries: out }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Cyclotomic::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc + a * b;
                }
                out.push(acc);
            }
        }
        Ok(CycMatrix { rows: self.rows, cols: other.cols, entries: out })
    }

    /// Product for callers that already know the shapes agree.
    pub fn dot(&self, other: &Self) -> Self {
        self.mul(other).expect("dimension mismatch")
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&Cyclotomic, &Cyclotomic) -> Cyclotomic,
    ) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CycMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        self.map(|x| x * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn trace(&self) -> Result<Cyclotomic, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        Ok((0..self.rows).fold(Cyclotomic::zero(), |acc, i| acc + self.get(i, i)))
    }

    /// Determinant by Bareiss elimination.
    pub fn det(&self) -> Result<Cyclotomic, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Cyclotomic::one());
        }
        let mut a: Vec<Vec<Cyclotomic>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = false;
        let mut prev = Cyclotomic::one();
        for k in 0..n - 1 {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(Cyclotomic::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num.checked_div(&prev)?;
                }
                a[i][k] = Cyclotomic::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign { -d } else { d })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m: Vec<Vec<Cyclotomic>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][col].inv().expect("nonzero pivot");
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            for i in 0..self.rows {
                if i != r && !m[i][col].is_zero() {
                    let f = m[i][col].clone();
                    for j in col..self.cols {
                        if !m[r][j].is_zero() {
                            m[i][j] = &m[i][j] - &(&f * &m[r][j]);
                        }
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        (CycMatrix::from_rows_sized(m, self.rows, self.cols), pivots)
    }

    fn from_rows_sized(rows: Vec<Vec<Cyclotomic>>, r: usize, c: usize) -> Self {
        CycMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : self·x = 0}, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Cyclotomic>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Cyclotomic::zero(); self.cols];
                v[f] = Cyclotomic::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let mut aug = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = self.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { Cyclotomic::one() } else { Cyclotomic::zero() }));
            aug.push(row);
        }
        let (r, pivots) = CycMatrix::from_rows_sized(aug, n, 2 * n).rref();
        let rank = pivots.iter().filter(|&&p| p < n).count();
        if rank < n {
            return Err(LinalgError::Singular { rank });
        }
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            out.extend_from_slice(&r.row(i)[n..]);
        }
        Ok(CycMatrix { rows: n, cols: n, entries: out })
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut result = Self::identity(self.rows);
        let mut b = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.dot(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.dot(&b);
            }
        }
        result
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        m
    }

    pub fn galois_map(&self, s: &GaloisAuto) -> Result<Self, LinalgError> {
        let entries = self.entries.iter().map(|x| s.apply(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(CycMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Entrywise ζ ↦ ζ^k, each entry on its own field.
    pub fn galois(&self, k: i64) -> Self {
        self.map(|x| x.galois(k))
    }

    /// The scalar c with self = c·I, if any.
    pub fn as_scalar(&self) -> Option<Cyclotomic> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                let ok = if i == j { *x == c } else { x.is_zero() };
                if !ok {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// The scalar c ≠ 0 with self = c·other, found from the first nonzero entry.
    pub fn ratio_to(&self, other: &Self) -> Option<Cyclotomic> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let idx = other.entries.iter().position(|x| !x.is_zero())?;
        let c = self.entries[idx].checked_div(&other.entries[idx]).ok()?;
        if c.is_zero() {
            return None;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| *a == &c * b)
            .then_some(c)
    }

    pub fn proportional(&self, other: &Self) -> bool {
        self.ratio_to(other).is_some()
    }

    /// Scales so the first nonzero entry is 1.
    pub fn normalized(&self) -> Self {
        match self.entries.iter().find(|x| !x.is_zero()) {
            Some(x) => self.scale(&x.inv().expect("nonzero")),
            None => self.clone(),
        }
    }

    /// Rank of self − I; equals 1 exactly for reflections.
    pub fn fixed_codim(&self) -> usize {
        self.sub(&Self::identity(self.rows)).expect("square").rank()
    }
}

/// p_ω = (1/m) Σ_{i<m} ω^{−i} S^i, after checking S^m = I.
pub fn unity_projector(s: &CycMatrix, omega: &Cyclotomic, m: u32) -> Result<CycMatrix, LinalgError> {
    if !s.is_square() {
        return Err(LinalgError::NotSquare);
    }
    if !s.pow(m as u64).is_identity() {
        return Err(LinalgError::NotOfOrder { m });
    }
    let n = s.rows();
    let w_inv = omega.inv()?;
    let mut acc = CycMatrix::zeros(n, n);
    let mut si = CycMatrix::identity(n);
    let mut wi = Cyclotomic::one();
    for _ in 0..m {
        acc = acc.add(&si.scale(&wi))?;
        si = si.dot(s);
        wi = &wi * &w_inv;
    }
    let inv_m = Rational::new(1.into(), (m as i64).into());
    Ok(acc.map(|x| x.scale(&inv_m)))
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rational coefficient helper used by callers building vectors.
pub fn rat(a: i64, b: i64) -> Rational {
    let r = Rational::new(a.into(), b.into());
    debug_assert!(!r.denom().is_zero());
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_swap_has_det_minus_one() {
        let s = CycMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(s.det().unwrap(), Cyclotomic::from_i64(-1));
    }

    #[test]
    fn singular_reports_rank() {
        let m = CycMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.inverse(), Err(LinalgError::Singular { rank: 1 }));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = CycMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![Cyclotomic::from_i64(-2), Cyclotomic::from_i64(1)]);
    }
}
