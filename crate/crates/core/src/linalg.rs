//! Dense row-major matrices.
//!
//! Frames here are tiny (n ≤ ~12), so everything is stored densely and the
//! algorithms are the textbook ones.

use crate::error::{Error, Result};
use crate::scalar::{abs, from_f64, Real, Scalar};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A basis-coefficient matrix, not necessarily triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralFrame<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> GeneralFrame<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(GeneralFrame { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        GeneralFrame {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(GeneralFrame {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal_matrix(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
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
                    out.data[idx] = out.data[idx].clone() + a.clone() * other.get(k, j).clone();
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &T) -> Self {
        GeneralFrame {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> GeneralFrame<U> {
        GeneralFrame {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Largest entrywise absolute difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let mut m = T::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = abs(a.clone() - b.clone());
            if d > m {
                m = d;
            }
        }
        Some(m)
    }
}

impl<T: Real> GeneralFrame<T> {
    /// Inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self
            .data
            .iter()
            .fold(T::zero(), |m, v| m.max(v.abs()))
            .max(T::min_positive_value());
        let tiny = scale * T::epsilon() * from_f64::<T>(n as f64);
        for col in 0..n {
            let (piv, pmax) = (col..n)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny {
                return Err(Error::Degenerate {
                    index: col,
                    pivot: pmax.to_f64().unwrap_or(0.0),
                    threshold: tiny.to_f64().unwrap_or(0.0),
                });
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = *a.get(col, col);
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j] / p;
                inv.data[col * n + j] = inv.data[col * n + j] / p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = *a.get(r, col);
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    a.data[r * n + j] = a.data[r * n + j] - f * a.data[col * n + j];
                    inv.data[r * n + j] = inv.data[r * n + j] - f * inv.data[col * n + j];
                }
            }
        }
        Ok(inv)
    }

    /// Solves `self · x = rhs` for square `self` (Gaussian elimination, partial pivoting).
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let inv = self.inverse()?;
        Ok((0..self.rows)
            .map(|i| {
                inv.row(i)
                    .iter()
                    .zip(rhs)
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect())
    }

    /// Minimizes `‖self · x − rhs‖₂` for a tall matrix of full column rank
    /// (Householder QR).
    pub fn least_squares(&self, rhs: &[T]) -> Result<Vec<T>> {
        let (m, n) = (self.rows, self.cols);
        if rhs.len() != m || m < n {
            return Err(Error::Shape(format!(
                "least squares needs rows >= cols and a matching rhs, got {m}x{n} and {}",
                rhs.len()
            )));
        }
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        let scale = self
            .data
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
            .max(T::min_positive_value());
        let tiny = scale * T::epsilon() * from_f64::<T>(m as f64);
        for k in 0..n {
            let norm = (k..m).fold(T::zero(), |acc, i| acc + *a.get(i, k) * *a.get(i, k)).sqrt();
            if norm <= tiny {
                return Err(Error::Degenerate {
                    index: k,
                    pivot: norm.to_f64().unwrap_or(0.0),
                    threshold: tiny.to_f64().unwrap_or(0.0),
                });
            }
            let alpha = if *a.get(k, k) > T::zero() { -norm } else { norm };
            let mut v: Vec<T> = (k..m).map(|i| *a.get(i, k)).collect();
            v[0] = v[0] - alpha;
            let vv = dot(&v, &v);
            if vv > T::zero() {
                for j in k..n {
                    let s = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * *a.get(i, j));
                    let f = (s + s) / vv;
                    for i in k..m {
                        a.data[i * n + j] = a.data[i * n + j] - f * v[i - k];
                    }
                }
                let s = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * b[i]);
                let f = (s + s) / vv;
                for i in k..m {
                    b[i] = b[i] - f * v[i - k];
                }
            }
        }
        let mut x = vec![T::zero(); n];
        for k in (0..n).rev() {
            let s = (k + 1..n).fold(b[k], |acc, j| acc - *a.get(k, j) * x[j]);
            x[k] = s / *a.get(k, k);
        }
        Ok(x)
    }

    /// Orthogonal factor of the QR decomposition (modified Gram–Schmidt on columns).
    ///
    /// Used to turn a random square matrix into a random orthogonal one.
    pub fn orthonormalize(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("orthonormalize needs a square matrix".into()));
        }
        let n = self.rows;
        let mut cols: Vec<Vec<T>> = (0..n)
            .map(|j| (0..n).map(|i| *self.get(i, j)).collect())
            .collect();
        for j in 0..n {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = dot(&done[k], &rest[0]);
                for (c, q) in rest[0].iter_mut().zip(&done[k]) {
                    *c = *c - proj * *q;
                }
            }
            let norm = dot(&cols[j], &cols[j]).sqrt();
            if norm <= T::epsilon() {
                return Err(Error::Degenerate {
                    index: j,
                    pivot: norm.to_f64().unwrap_or(0.0),
                    threshold: T::epsilon().to_f64().unwrap_or(0.0),
                });
            }
            for c in cols[j].iter_mut() {
                *c = *c / norm;
            }
        }
        let mut q = Self::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                q.set(i, j, *v);
            }
        }
        Ok(q)
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

impl<T: Scalar + Serialize> Serialize for GeneralFrame<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for GeneralFrame<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        GeneralFrame::from_rows(rows).map_err(D::Error::custom)
    }
}
