//! Triangular parameterization of invariant metrics on `F^n`.
//!
//! An `Ad(diag F)`-invariant inner product on the Lie algebra of `F^n` is
//! fixed by an orthonormal frame `A` in the coordinate space `ℝⁿ`; left
//! multiplication by an orthogonal matrix gives the same inner product, and
//! every class has exactly one lower-triangular representative with positive
//! diagonal. That representative is [`TriangularMetric`].

use crate::error::{Error, Result};
use crate::linalg::GeneralFrame;
use crate::scalar::{from_f64, to_f64, Real, Scalar};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default lower bound on Cholesky pivots in [`cholesky_canonical`].
pub const DEFAULT_PIVOT_THRESHOLD: f64 = 1e-10;

/// Lower-triangular `n×n` matrix with positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularMetric<T> {
    frame: GeneralFrame<T>,
}

/// Position of `u_ij` (`j < i`, zero-based) in the packed off-diagonal vector.
///
/// Packing is row-major: `(1,0), (2,0), (2,1), (3,0), …`.
#[inline]
pub const fn u_index(i: usize, j: usize) -> usize {
    i * (i - 1) / 2 + j
}

/// Number of off-diagonal ratio coordinates for dimension `n`.
#[inline]
pub const fn off_diagonal_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl<T: Scalar> TriangularMetric<T> {
    /// Validates a square frame: zero above the diagonal, positive on it.
    pub fn new(frame: GeneralFrame<T>) -> Result<Self> {
        if !frame.is_square() || frame.rows() == 0 {
            return Err(Error::Shape(format!(
                "a metric frame must be square and non-empty, got {}x{}",
                frame.rows(),
                frame.cols()
            )));
        }
        let n = frame.rows();
        for i in 0..n {
            if !(frame.get(i, i).clone() > T::zero()) {
                return Err(Error::Domain(format!(
                    "diagonal entry {i} is not positive: {:?}",
                    frame.get(i, i)
                )));
            }
            for j in i + 1..n {
                if !frame.get(i, j).is_zero() {
                    return Err(Error::Domain(format!(
                        "entry ({i},{j}) above the diagonal is nonzero"
                    )));
                }
            }
        }
        Ok(TriangularMetric { frame })
    }

    /// Accepts either full square rows or ragged lower-triangular rows
    /// (row `i` holding `i + 1` entries).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let ragged = rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
        if ragged && n > 1 {
            let mut frame = GeneralFrame::zeros(n, n);
            for (i, r) in rows.into_iter().enumerate() {
                for (j, v) in r.into_iter().enumerate() {
                    frame.set(i, j, v);
                }
            }
            return Self::new(frame);
        }
        Self::new(GeneralFrame::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        TriangularMetric {
            frame: GeneralFrame::identity(n),
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        Self::new(GeneralFrame::diagonal_matrix(diag))
    }

    /// Number of simple factors in `G = F^n`.
    #[inline]
    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        self.frame.get(i, j)
    }

    pub fn as_frame(&self) -> &GeneralFrame<T> {
        &self.frame
    }

    pub fn into_frame(self) -> GeneralFrame<T> {
        self.frame
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n()).map(|i| self.get(i, i).clone()).collect()
    }

    /// `det A = ∏ α_ii`.
    pub fn volume(&self) -> T {
        (0..self.n()).fold(T::one(), |acc, i| acc * self.get(i, i).clone())
    }

    /// `A⁻¹` by forward substitution; lower triangular with `β_ii = 1/α_ii`.
    pub fn inverse(&self) -> GeneralFrame<T> {
        lower_inverse(&self.frame)
    }

    /// Multiplies every entry by `c > 0`.
    pub fn scale(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {c:?}")));
        }
        Ok(TriangularMetric {
            frame: self.frame.scaled(&c),
        })
    }

    /// Block-diagonal concatenation `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        block_diag_all(&[self.clone(), other.clone()]).expect("two non-empty blocks")
    }

    pub fn to_ratio_coords(&self) -> RatioCoordinates<T> {
        let n = self.n();
        let x = self.diagonal();
        let mut u = Vec::with_capacity(off_diagonal_len(n));
        for i in 1..n {
            for j in 0..i {
                u.push(self.get(i, j).clone() / x[j].clone());
            }
        }
        RatioCoordinates { x, u }
    }

    pub fn from_ratio_coords(c: &RatioCoordinates<T>) -> Result<Self> {
        if let Some((i, v)) = c.x.iter().enumerate().find(|(_, v)| !(**v > T::zero())) {
            return Err(Error::Domain(format!("x[{i}] = {v:?} is not positive")));
        }
        Ok(TriangularMetric {
            frame: lower_from_ratio(&c.x, &c.u),
        })
    }

    /// Converts entries through `f64` (lossless for `f32 → f64`).
    pub fn cast<U: Scalar>(&self) -> TriangularMetric<U> {
        TriangularMetric {
            frame: self.frame.map(|v| from_f64(to_f64(v))),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.frame.to_rows()
    }
}

/// Block-diagonal matrix of all `blocks`, in order.
pub fn block_diag_all<T: Scalar>(blocks: &[TriangularMetric<T>]) -> Result<TriangularMetric<T>> {
    if blocks.is_empty() {
        return Err(Error::Domain("block_diag needs at least one block".into()));
    }
    let n: usize = blocks.iter().map(TriangularMetric::n).sum();
    let mut frame = GeneralFrame::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.n() {
            for j in 0..=i {
                frame.set(off + i, off + j, b.get(i, j).clone());
            }
        }
        off += b.n();
    }
    Ok(TriangularMetric { frame })
}

/// Lower-triangular frame `α_ii = x_i`, `α_ij = u_ij · x_j`, without validation.
pub(crate) fn lower_from_ratio<T: Scalar>(x: &[T], u: &[T]) -> GeneralFrame<T> {
    let n = x.len();
    let mut a = GeneralFrame::zeros(n, n);
    for i in 0..n {
        a.set(i, i, x[i].clone());
        for j in 0..i {
            a.set(i, j, u[u_index(i, j)].clone() * x[j].clone());
        }
    }
    a
}

/// Inverse of a lower-triangular frame with nonzero diagonal.
pub(crate) fn lower_inverse<T: Scalar>(a: &GeneralFrame<T>) -> GeneralFrame<T> {
    let n = a.rows();
    let mut b = GeneralFrame::zeros(n, n);
    for k in 0..n {
        b.set(k, k, T::one() / a.get(k, k).clone());
        for i in k + 1..n {
            let mut s = T::zero();
            for l in k..i {
                s = s + a.get(i, l).clone() * b.get(l, k).clone();
            }
            b.set(i, k, -s / a.get(i, i).clone());
        }
    }
    b
}

/// Unique triangular representative of the left-orthogonal class `{Q·M}`:
/// the lower-triangular `L` with positive diagonal and `LᵀL = MᵀM`.
///
/// Computed as the `QL` factorization `M = Q·L` by Householder reflections,
/// so accuracy degrades with `cond(M)` rather than its square.
pub fn cholesky_canonical<T: Real>(m: &GeneralFrame<T>) -> Result<TriangularMetric<T>> {
    cholesky_canonical_with_threshold(m, from_f64(DEFAULT_PIVOT_THRESHOLD))
}

/// [`cholesky_canonical`] with an explicit lower bound on the diagonal of `L`.
pub fn cholesky_canonical_with_threshold<T: Real>(
    m: &GeneralFrame<T>,
    threshold: T,
) -> Result<TriangularMetric<T>> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Shape(format!(
            "canonicalization needs a square frame, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    // zero the entries above the diagonal, last column first
    for j in (0..n).rev() {
        let norm = (0..=j).fold(T::zero(), |s, i| s + *a.get(i, j) * *a.get(i, j)).sqrt();
        if !(norm > threshold) {
            return Err(Error::Degenerate {
                index: j,
                pivot: to_f64(&norm),
                threshold: to_f64(&threshold),
            });
        }
        let ajj = *a.get(j, j);
        let alpha = if ajj > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (0..=j).map(|i| *a.get(i, j)).collect();
        v[j] = v[j] - alpha;
        let vv = v.iter().fold(T::zero(), |s, x| s + *x * *x);
        if vv > T::zero() {
            for c in 0..=j {
                let s = (0..=j).fold(T::zero(), |s, i| s + v[i] * *a.get(i, c));
                let f = (s + s) / vv;
                for (i, vi) in v.iter().enumerate() {
                    let val = *a.get(i, c) - f * *vi;
                    a.set(i, c, val);
                }
            }
        }
        for i in 0..j {
            a.set(i, j, T::zero());
        }
    }
    for i in 0..n {
        if *a.get(i, i) < T::zero() {
            for c in 0..=i {
                let val = -*a.get(i, c);
                a.set(i, c, val);
            }
        }
    }
    Ok(TriangularMetric { frame: a })
}

impl<T: Scalar + Serialize> Serialize for TriangularMetric<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.frame.serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for TriangularMetric<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(d)?;
        TriangularMetric::from_rows(rows).map_err(D::Error::custom)
    }
}

/// Solver coordinates: diagonal entries `x_i = α_ii` and ratios `u_ij = α_ij / α_jj`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCoordinates<T> {
    pub x: Vec<T>,
    /// Packed row-major, see [`u_index`].
    pub u: Vec<T>,
}

impl<T: Scalar> RatioCoordinates<T> {
    pub fn new(x: Vec<T>, u: Vec<T>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Shape("at least one diagonal coordinate required".into()));
        }
        if u.len() != off_diagonal_len(x.len()) {
            return Err(Error::Shape(format!(
                "n = {} needs {} ratios, got {}",
                x.len(),
                off_diagonal_len(x.len()),
                u.len()
            )));
        }
        Ok(RatioCoordinates { x, u })
    }

    /// Unit diagonal, zero ratios.
    pub fn identity(n: usize) -> Self {
        RatioCoordinates {
            x: vec![T::one(); n],
            u: vec![T::zero(); off_diagonal_len(n)],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `u_ij` for zero-based `j < i`.
    pub fn u(&self, i: usize, j: usize) -> &T {
        &self.u[u_index(i, j)]
    }

    /// `x` followed by `u`.
    pub fn to_vec(&self) -> Vec<T> {
        self.x.iter().chain(&self.u).cloned().collect()
    }

    /// Inverse of [`RatioCoordinates::to_vec`].
    pub fn from_slice(n: usize, v: &[T]) -> Result<Self> {
        if v.len() != n + off_diagonal_len(n) {
            return Err(Error::Shape(format!(
                "expected {} coordinates for n = {n}, got {}",
                n + off_diagonal_len(n),
                v.len()
            )));
        }
        Self::new(v[..n].to_vec(), v[n..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &TriangularMetric<f64>, b: &TriangularMetric<f64>, tol: f64) -> bool {
        a.as_frame().max_abs_diff(b.as_frame()).is_some_and(|d| d <= tol)
    }

    #[test]
    fn validation() {
        assert!(TriangularMetric::from_rows(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        assert!(TriangularMetric::from_rows(vec![vec![1.0, 0.5], vec![2.0, 1.0]]).is_err());
        assert!(TriangularMetric::from_rows(vec![vec![-1.0]]).is_err());
        let ragged = TriangularMetric::from_rows(vec![vec![1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(ragged.to_rows(), vec![vec![1.0, 0.0], vec![2.0, 3.0]]);
    }

    #[test]
    fn ratio_coordinates_of_simple_matrices() {
        let c = TriangularMetric::<f64>::identity(2).to_ratio_coords();
        assert_eq!((c.x, c.u), (vec![1.0, 1.0], vec![0.0]));
        let a = TriangularMetric::from_rows(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let c = a.to_ratio_coords();
        assert_eq!((c.x, c.u), (vec![1.0, 1.0], vec![1.0]));
        let a = TriangularMetric::from_ratio_coords(&RatioCoordinates::new(vec![1.0, 1.0], vec![0.0]).unwrap()).unwrap();
        assert_eq!(a, TriangularMetric::identity(2));
    }

    #[test]
    fn from_ratio_coords_rejects_nonpositive_diagonal() {
        let c = RatioCoordinates::new(vec![1.0, 0.0], vec![0.3]).unwrap();
        assert!(matches!(TriangularMetric::from_ratio_coords(&c), Err(Error::Domain(_))));
        let c = RatioCoordinates::new(vec![1.0, -2.0], vec![0.3]).unwrap();
        assert!(TriangularMetric::from_ratio_coords(&c).is_err());
    }

    #[test]
    fn ratio_coordinate_shape_checked() {
        assert!(RatioCoordinates::new(vec![1.0, 1.0, 1.0], vec![0.0]).is_err());
        assert!(RatioCoordinates::<f64>::new(vec![], vec![]).is_err());
        assert!(RatioCoordinates::from_slice(2, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn inverse_two_by_two() {
        let (x, y, u): (f64, f64, f64) = (1.7, 0.6, -0.4);
        let a = TriangularMetric::from_rows(vec![vec![x, 0.0], vec![u * x, y]]).unwrap();
        let b = a.inverse();
        let want = [[1.0 / x, 0.0], [-u / y, 1.0 / y]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b.get(i, j) - want[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_third_row_matches_closed_form() {
        let a = TriangularMetric::from_rows(vec![
            vec![1.3_f64, 0.0, 0.0],
            vec![0.7, 0.9, 0.0],
            vec![-0.4, 1.1, 2.2],
        ])
        .unwrap();
        let b = a.inverse();
        let al = |i: usize, j: usize| *a.get(i, j);
        let b31 = (al(2, 1) * al(1, 0) - al(2, 0) * al(1, 1)) / (al(0, 0) * al(1, 1) * al(2, 2));
        let b32 = -al(2, 1) / (al(1, 1) * al(2, 2));
        let b21 = -al(1, 0) / (al(0, 0) * al(1, 1));
        assert!((b.get(2, 0) - b31).abs() < 1e-15);
        assert!((b.get(2, 1) - b32).abs() < 1e-15);
        assert!((b.get(1, 0) - b21).abs() < 1e-15);
        for i in 0..3 {
            assert_eq!(*b.get(i, i), 1.0 / al(i, i));
        }
    }

    #[test]
    fn cholesky_of_permutation_is_identity() {
        let p = GeneralFrame::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(close(&cholesky_canonical(&p).unwrap(), &TriangularMetric::identity(2), 1e-15));
    }

    #[test]
    fn cholesky_rejects_singular() {
        let m = GeneralFrame::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(cholesky_canonical(&m), Err(Error::Degenerate { index: 0, .. })));
        let m = GeneralFrame::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-11]]).unwrap();
        assert!(cholesky_canonical(&m).is_err());
        assert!(cholesky_canonical_with_threshold(&m, 1e-14).is_ok());
    }

    #[test]
    fn cholesky_quotients_left_orthogonal_factor() {
        let a = TriangularMetric::from_rows(vec![
            vec![0.9, 0.0, 0.0],
            vec![-0.3, 1.4, 0.0],
            vec![0.5, 0.8, 0.7],
        ])
        .unwrap();
        let q = GeneralFrame::from_rows(vec![
            vec![0.3, -1.2, 0.4],
            vec![2.0, 0.1, -0.7],
            vec![0.5, 0.9, 1.1],
        ])
        .unwrap()
        .orthonormalize()
        .unwrap();
        let qa = q.matmul(a.as_frame()).unwrap();
        assert!(close(&cholesky_canonical(&qa).unwrap(), &a, 1e-14));
        assert!(close(&cholesky_canonical(a.as_frame()).unwrap(), &a, 1e-15));
        // diag(1,-1)·(rows (1,0),(1,1))·T² is the identity
        let m = GeneralFrame::from_rows(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(close(&cholesky_canonical(&m).unwrap(), &TriangularMetric::identity(2), 0.0));
    }

    #[test]
    fn block_diag_and_scale() {
        let two = TriangularMetric::from_rows(vec![vec![2.0]]).unwrap();
        let d = two.block_diag(&two);
        assert_eq!(d, TriangularMetric::from_diagonal(&[2.0, 2.0]).unwrap());
        assert_eq!(TriangularMetric::<f64>::identity(1).scale(2.0).unwrap(), two);
        assert!(two.scale(0.0).is_err());
        assert!(two.scale(-1.0).is_err());
        assert!(block_diag_all::<f64>(&[]).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let a = TriangularMetric::from_rows(vec![vec![1.0, 0.0], vec![0.25, 2.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<TriangularMetric<f64>>(&s).unwrap(), a);
        assert!(serde_json::from_str::<TriangularMetric<f64>>("[[1.0,1.0],[0.0,1.0]]").is_err());
    }
}
