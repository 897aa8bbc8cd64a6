//! Normalized scalar curvature `S̃ = (4/p)·S` of the metric generated by a frame.
//!
//! With `β = A⁻¹` and `Λ_{ijk} = (∑_l α_il α_jl β_lk)²`,
//!
//! ```text
//! S̃ = 2 ∑_{i,j} α_ij² − ∑_{i,j,k} Λ_{ijk}
//! ```
//!
//! for any nonsingular frame, and for a lower-triangular one this collapses to
//! `∑ α_ii² − ∑_{k < min(i,j)} Λ_{ijk}`. The structure constants of `F` only
//! contribute the overall factor `p = dim F`, so nothing here depends on `F`.

use crate::error::{Error, Result};
use crate::linalg::GeneralFrame;
use crate::metric::{lower_from_ratio, lower_inverse, u_index, RatioCoordinates, TriangularMetric};
use crate::scalar::{lit, Real, Scalar};
use serde::{Deserialize, Serialize};

/// `Λ_{ijk} = (∑_l α_il α_jl β_lk)²` for zero-based indices.
pub fn lambda_term<T: Scalar>(
    a: &GeneralFrame<T>,
    beta: &GeneralFrame<T>,
    i: usize,
    j: usize,
    k: usize,
) -> Result<T> {
    let n = a.rows();
    if !a.is_square() || beta.rows() != n || beta.cols() != n {
        return Err(Error::Shape("frame and inverse must be square of equal size".into()));
    }
    if i >= n || j >= n || k >= n {
        return Err(Error::IndexOutOfRange(format!("({i},{j},{k}) with n = {n}")));
    }
    let m = bracket_coefficient(a, beta, i, j, k);
    Ok(m.clone() * m)
}

#[inline]
fn bracket_coefficient<T: Scalar>(a: &GeneralFrame<T>, beta: &GeneralFrame<T>, i: usize, j: usize, k: usize) -> T {
    let mut s = T::zero();
    for l in 0..a.cols() {
        s = s + a.get(i, l).clone() * a.get(j, l).clone() * beta.get(l, k).clone();
    }
    s
}

fn general_from_inverse<T: Scalar>(a: &GeneralFrame<T>, beta: &GeneralFrame<T>) -> T {
    let n = a.rows();
    let two = lit::<T>(2);
    let frob = a
        .as_slice()
        .iter()
        .fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
    let mut lambda = T::zero();
    for k in 0..n {
        let mut part = T::zero();
        for i in 0..n {
            for j in 0..n {
                let m = bracket_coefficient(a, beta, i, j, k);
                part = part + m.clone() * m;
            }
        }
        lambda = lambda + part;
    }
    two * frob - lambda
}

/// `S̃` of an arbitrary nonsingular square frame.
pub fn scalar_curvature_general<T: Real>(a: &GeneralFrame<T>) -> Result<T> {
    let beta = a.inverse()?;
    Ok(general_from_inverse(a, &beta))
}

/// `S̃` of a triangular frame, using the collapsed sum over `k < min(i,j)`.
pub fn scalar_curvature_triangular<T: Scalar>(a: &TriangularMetric<T>) -> T {
    triangular_from_frame(a.as_frame())
}

pub(crate) fn triangular_from_frame<T: Scalar>(a: &GeneralFrame<T>) -> T {
    let n = a.rows();
    let beta = lower_inverse(a);
    let diag = (0..n).fold(T::zero(), |acc, i| acc + a.get(i, i).clone() * a.get(i, i).clone());
    let mut lambda = T::zero();
    for k in 0..n {
        let mut part = T::zero();
        for i in k + 1..n {
            for j in k + 1..n {
                let m = bracket_coefficient(a, &beta, i, j, k);
                part = part + m.clone() * m;
            }
        }
        lambda = lambda + part;
    }
    diag - lambda
}

/// `S̃` directly from ratio coordinates (no positivity check).
pub fn s_tilde_ratio<T: Scalar>(c: &RatioCoordinates<T>) -> T {
    triangular_from_frame(&lower_from_ratio(&c.x, &c.u))
}

/// Full matrix gradient `∂S̃/∂α_ab` of the expanded formula at a nonsingular frame,
/// with `dβ = −β·dA·β` for the inverse.
pub fn matrix_gradient<T: Scalar>(a: &GeneralFrame<T>, beta: &GeneralFrame<T>) -> GeneralFrame<T> {
    let n = a.rows();
    // m[(i*n + j)*n + k] = ∑_l α_il α_jl β_lk
    let mut m = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m.push(bracket_coefficient(a, beta, i, j, k));
            }
        }
    }
    let mi = |i: usize, j: usize, k: usize| &m[(i * n + j) * n + k];

    // p_lk = ∑_{ij} M_ijk α_il α_jl
    let mut p = GeneralFrame::zeros(n, n);
    for l in 0..n {
        for k in 0..n {
            let mut s = T::zero();
            for i in 0..n {
                let ail = a.get(i, l).clone();
                if ail.is_zero() {
                    continue;
                }
                for j in 0..n {
                    s = s + mi(i, j, k).clone() * ail.clone() * a.get(j, l).clone();
                }
            }
            p.set(l, k, s);
        }
    }

    let four = lit::<T>(4);
    let two = lit::<T>(2);
    let mut g = GeneralFrame::zeros(n, n);
    for ai in 0..n {
        for b in 0..n {
            // direct dependence of M on α
            let mut direct = T::zero();
            for j in 0..n {
                let ajb = a.get(j, b).clone();
                if ajb.is_zero() {
                    continue;
                }
                for k in 0..n {
                    direct = direct + mi(ai, j, k).clone() * ajb.clone() * beta.get(b, k).clone();
                }
            }
            // dependence through β
            let mut via_inverse = T::zero();
            for l in 0..n {
                let bla = beta.get(l, ai).clone();
                if bla.is_zero() {
                    continue;
                }
                for k in 0..n {
                    via_inverse = via_inverse + bla.clone() * p.get(l, k).clone() * beta.get(b, k).clone();
                }
            }
            let v = four.clone() * a.get(ai, b).clone() - four.clone() * direct + two.clone() * via_inverse;
            g.set(ai, b, v);
        }
    }
    g
}

/// Analytic partials of `S̃` in ratio coordinates: `(∂S̃/∂x_i, ∂S̃/∂u_ij)`.
pub fn gradient_ratio<T: Scalar>(c: &RatioCoordinates<T>) -> (Vec<T>, Vec<T>) {
    ratio_gradient(&c.x, &c.u)
}

pub(crate) fn ratio_gradient<T: Scalar>(x: &[T], u: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let a = lower_from_ratio(x, u);
    let beta = lower_inverse(&a);
    let g = matrix_gradient(&a, &beta);
    let mut gx = Vec::with_capacity(n);
    for j in 0..n {
        let mut s = g.get(j, j).clone();
        for i in j + 1..n {
            s = s + g.get(i, j).clone() * u[u_index(i, j)].clone();
        }
        gx.push(s);
    }
    let mut gu = Vec::with_capacity(u.len());
    for i in 1..n {
        for j in 0..i {
            gu.push(g.get(i, j).clone() * x[j].clone());
        }
    }
    (gx, gu)
}

/// Einstein constant `λ = S̃ / (4n)` of an Einstein metric with normalized curvature `S̃`.
pub fn einstein_constant<T: Scalar>(s_tilde: T, n: usize) -> T {
    s_tilde / lit::<T>(4 * n as i64)
}

/// Curvature summary of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub s_tilde: f64,
    pub volume: f64,
    pub einstein_constant: f64,
    /// `S = (p/4)·S̃`, present when `p = dim F` is supplied.
    pub total_scalar: Option<f64>,
}

impl CurvatureReport {
    pub fn new(a: &TriangularMetric<f64>, p: Option<u32>) -> Self {
        let s_tilde = scalar_curvature_triangular(a);
        CurvatureReport {
            s_tilde,
            volume: a.volume(),
            einstein_constant: einstein_constant(s_tilde, a.n()),
            total_scalar: p.map(|p| f64::from(p) / 4.0 * s_tilde),
        }
    }
}
