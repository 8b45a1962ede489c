//! Exact integer linear algebra: matrices, Smith normal form and finitely
//! generated abelian groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{self, add, mul, neg, sub, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{rows}x{cols} matrix needs {expected} entries, got {got}")]
    EntryCount { rows: usize, cols: usize, expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("torsion coefficients {0} do not form an invariant-factor chain")]
    NotCanonical(String),
    #[error("cannot parse abelian group {0:?}")]
    ParseGroup(String),
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix<Z> {
    rows: usize,
    cols: usize,
    entries: Vec<Z>,
}

impl<Z: Scalar> IntMatrix<Z> {
    pub fn new(rows: usize, cols: usize, entries: Vec<Z>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Z::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Z::one();
        }
        m
    }

    pub fn diagonal(values: &[Z]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = v.clone();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let entries = rows.iter().flatten().map(|&v| scalar::int(v)).collect();
        Self { rows: rows.len(), cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Z] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Z {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Z) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = add(&out.entries[idx], &mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Fraction-free (Bareiss) determinant. `None` for non-square input.
    pub fn determinant(&self) -> Option<Z> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Z::one());
        }
        let mut a = self.entries.clone();
        let mut sign_flip = false;
        let mut prev = Z::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return Some(Z::zero());
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign_flip = !sign_flip;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = sub(&mul(&a[i * n + j], &a[k * n + k]), &mul(&a[i * n + k], &a[k * n + j]));
                    a[i * n + j] = v / prev.clone();
                }
            }
            prev = a[k * n + k].clone();
        }
        let det = a[n * n - 1].clone();
        Some(if sign_flip { neg(&det) } else { det })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &Z) {
        for j in 0..self.cols {
            let v = add(self.get(dst, j), &mul(factor, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &Z) {
        for i in 0..self.rows {
            let v = add(self.get(i, dst), &mul(factor, self.get(i, src)));
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = neg(self.get(r, j));
            self.set(r, j, v);
        }
    }
}

impl<Z: Scalar> std::ops::Mul for &IntMatrix<Z> {
    type Output = IntMatrix<Z>;

    /// Panics on a dimension mismatch; use [`IntMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: Self) -> IntMatrix<Z> {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl<Z: Scalar> fmt::Display for IntMatrix<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<Z> {
    pub d: IntMatrix<Z>,
    pub u: IntMatrix<Z>,
    pub v: IntMatrix<Z>,
}

impl<Z: Scalar> SmithForm<Z> {
    /// Diagonal entries `d[i][i]` for `i < min(rows, cols)`.
    pub fn invariants(&self) -> Vec<Z> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().iter().filter(|x| !x.is_zero()).count()
    }
}

fn smallest_nonzero<Z: Scalar>(m: &IntMatrix<Z>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), Z)> = None;
    for i in t..m.rows() {
        for j in t..m.cols() {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().map_or(true, |(_, b)| a < *b) {
                best = Some(((i, j), a));
            }
        }
    }
    best.map(|(idx, _)| idx)
}

/// Smith normal form with unimodular transforms.
///
/// Pivots on the entry of smallest absolute value in the remaining block.
/// The diagonal of `d` is nonnegative and each entry divides the next.
pub fn smith_normal_form<Z: Scalar>(m: &IntMatrix<Z>) -> SmithForm<Z> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    'outer: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                break 'outer;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = neg(&(d.get(i, t).clone() / pivot.clone()));
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = neg(&(d.get(t, j).clone() / pivot.clone()));
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = Z::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { d, u, v }
}

/// Cokernel of `m` acting on column vectors: `Z^rows / image(m)`.
pub fn cokernel<Z: Scalar>(m: &IntMatrix<Z>) -> AbelianGroup<Z> {
    let snf = smith_normal_form(m);
    let invariants = snf.invariants();
    let rank = invariants.iter().filter(|x| !x.is_zero()).count();
    let torsion = invariants.into_iter().filter(|x| *x > Z::one()).collect();
    AbelianGroup { free_rank: m.rows() - rank, torsion }
}

/// Finitely generated abelian group in invariant-factor form
/// `Z^free_rank + Z/d1 + ... + Z/dm` with `2 <= d1 | d2 | ... | dm`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup<Z> {
    free_rank: usize,
    torsion: Vec<Z>,
}

impl<Z: Scalar> AbelianGroup<Z> {
    /// Accepts only the canonical invariant-factor chain.
    pub fn new(free_rank: usize, torsion: Vec<Z>) -> Result<Self, LinalgError> {
        let two = scalar::int::<Z>(2);
        let ok = torsion.iter().all(|d| *d >= two)
            && torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !ok {
            let shown: Vec<String> = torsion.iter().map(ToString::to_string).collect();
            return Err(LinalgError::NotCanonical(shown.join(",")));
        }
        Ok(Self { free_rank, torsion })
    }

    /// `Z^free_rank` plus a cyclic summand `Z/n` for each order `n`.
    /// An order of 0 contributes a free summand, orders of ±1 vanish.
    pub fn from_orders(free_rank: usize, orders: impl IntoIterator<Item = Z>) -> Self {
        let orders: Vec<Z> = orders.into_iter().collect();
        let mut g = cokernel(&IntMatrix::diagonal(&orders));
        g.free_rank += free_rank;
        g
    }

    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[Z] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_orders(
            self.free_rank + other.free_rank,
            self.torsion.iter().chain(&other.torsion).cloned(),
        )
    }
}

impl<Z: Scalar> fmt::Display for AbelianGroup<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<Z: Scalar> FromStr for AbelianGroup<Z> {
    type Err = LinalgError;

    /// Parses sums such as `Z^2 + Z/3` (also `⊕` as separator). The result is
    /// canonicalised, so `Z/2 + Z/3` parses to `Z/6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinalgError::ParseGroup(s.to_string());
        let trimmed = s.trim();
        if trimmed == "0" {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut orders = Vec::new();
        for part in trimmed.split(['+', '⊕']) {
            let part = part.trim();
            if part == "Z" {
                free += 1;
            } else if let Some(exp) = part.strip_prefix("Z^") {
                free += exp.trim().parse::<usize>().map_err(|_| bad())?;
            } else if let Some(n) = part.strip_prefix("Z/") {
                let n: Z = scalar::parse(n).ok_or_else(bad)?;
                if n.is_zero() {
                    return Err(bad());
                }
                orders.push(n);
            } else if part != "0" {
                return Err(bad());
            }
        }
        Ok(Self::from_orders(free, orders))
    }
}

impl<Z: Scalar> Serialize for AbelianGroup<Z> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, Z: Scalar> Deserialize<'de> for AbelianGroup<Z> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
