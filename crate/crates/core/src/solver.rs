//! Critical points of `S̃` on metrics of fixed volume.
//!
//! `S̃` is homogeneous of degree two in the diagonal coordinates `x`, so the
//! Lagrange conditions `x_i ∂S̃/∂x_i = λ·V`, `∂S̃/∂u_ij = 0` can be normalized
//! to `λV = 2`, which forces `S̃ = n`. Every solution of
//!
//! ```text
//! x_i ∂S̃/∂x_i − 2 = 0   (i = 1..n),      ∂S̃/∂u_ij = 0   (j < i)
//! ```
//!
//! is a critical point up to homothety and vice versa. Roots are found by
//! damped Newton from many seeded random starts and deduplicated in raw
//! coordinates.

use crate::curvature::{einstein_constant, ratio_gradient, s_tilde_ratio};
use crate::error::{Error, Result};
use crate::linalg::GeneralFrame;
use crate::metric::{off_diagonal_len, RatioCoordinates, TriangularMetric};
use crate::scalar::{lit, DoubleDouble, Dual, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Iterates with any coordinate beyond this magnitude are treated as divergent.
const DIVERGENCE_BOUND: f64 = 1e6;
const POLISH_MAX_ITER: usize = 120;
const POLISH_HALVINGS: usize = 8;

/// Scale convention for reported critical points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Normalization {
    /// `S̃ = n`, i.e. Lagrange multiplier fixed to 2.
    #[default]
    #[serde(rename = "stilde-n")]
    STildeEqualsN,
    /// Einstein constant 1, i.e. `S̃ = 4n`.
    #[serde(rename = "einstein-1")]
    EinsteinConstantOne,
    /// `∏ α_ii = 1`.
    #[serde(rename = "unit-volume")]
    UnitVolume,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::STildeEqualsN => "stilde-n",
            Normalization::EinsteinConstantOne => "einstein-1",
            Normalization::UnitVolume => "unit-volume",
        }
    }

    /// Target value of `x_i ∂S̃/∂x_i` for a metric with curvature `s_tilde`.
    fn multiplier(self, n: usize, s_tilde: f64) -> f64 {
        match self {
            Normalization::STildeEqualsN => 2.0,
            Normalization::EinsteinConstantOne => 8.0,
            Normalization::UnitVolume => 2.0 * s_tilde / n as f64,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stilde-n" => Ok(Normalization::STildeEqualsN),
            "einstein-1" => Ok(Normalization::EinsteinConstantOne),
            "unit-volume" => Ok(Normalization::UnitVolume),
            other => Err(Error::Domain(format!("unknown convention {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub starts: usize,
    pub seed: u64,
    pub newton_max_iter: usize,
    /// Convergence threshold on the max-norm of the residual.
    pub newton_tol: f64,
    /// Max-norm distance under which two roots are the same point.
    pub dedup_tol: f64,
    /// Iterates with some `x_i` at or below this are rejected.
    pub diag_floor: f64,
    /// Starting `x_i` are `exp(U[-r, r])`.
    pub x_log_radius: f64,
    /// Starting `u_ij` are `U[-r, r]`.
    pub u_radius: f64,
    pub max_halvings: usize,
    /// Refine converged roots in double-double arithmetic.
    pub polish: bool,
    pub parallel: bool,
}

impl SolverOptions {
    /// Defaults sized for dimension `n`.
    pub fn for_dimension(n: usize) -> Self {
        let starts = match n {
            0 | 1 => 200,
            2 => 2_000,
            3 => 10_000,
            _ => 20_000,
        };
        SolverOptions {
            starts,
            seed: 42,
            newton_max_iter: 200,
            newton_tol: 1e-12,
            dedup_tol: 1e-7,
            diag_floor: 1e-6,
            x_log_radius: 1.0,
            u_radius: 2.5,
            max_halvings: 30,
            polish: true,
            parallel: true,
        }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions::for_dimension(3)
    }
}

/// A solved metric with its invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    #[serde(flatten)]
    pub coords: RatioCoordinates<f64>,
    pub matrix: TriangularMetric<f64>,
    pub s_tilde: f64,
    pub volume: f64,
    /// Max-norm of the Lagrange residual under this point's normalization.
    pub residual_norm: f64,
    #[serde(skip)]
    pub normalization: Normalization,
}

impl CriticalPoint {
    /// Evaluates curvature, volume and residual at `coords`.
    pub fn from_coords(coords: RatioCoordinates<f64>, normalization: Normalization) -> Result<Self> {
        let matrix = TriangularMetric::from_ratio_coords(&coords)?;
        let n = coords.n();
        let s_tilde = s_tilde_ratio(&coords);
        let target = normalization.multiplier(n, s_tilde);
        let residual_norm = max_abs(&residual_with_target(&coords.x, &coords.u, target));
        Ok(CriticalPoint {
            volume: matrix.volume(),
            matrix,
            s_tilde,
            residual_norm,
            normalization,
            coords,
        })
    }

    pub fn n(&self) -> usize {
        self.coords.n()
    }

    pub fn einstein_constant(&self) -> f64 {
        einstein_constant(self.s_tilde, self.n())
    }
}

/// Lagrange residual under `S̃ = n`: `x_i ∂S̃/∂x_i − 2`, then `∂S̃/∂u_ij` in packed order.
pub fn residual<T: Scalar>(c: &RatioCoordinates<T>) -> Vec<T> {
    residual_with_target(&c.x, &c.u, lit(2))
}

/// Residual with the multiplier `x_i ∂S̃/∂x_i = target`.
pub fn residual_with_target<T: Scalar>(x: &[T], u: &[T], target: T) -> Vec<T> {
    let (gx, gu) = ratio_gradient(x, u);
    let mut r: Vec<T> = gx
        .into_iter()
        .zip(x)
        .map(|(g, xi)| g * xi.clone() - target.clone())
        .collect();
    r.extend(gu);
    r
}

fn residual_packed<T: Scalar>(n: usize, z: &[T], target: T) -> Vec<T> {
    residual_with_target(&z[..n], &z[n..], target)
}

/// Jacobian of the residual at packed coordinates `z = (x, u)`, by forward-mode
/// differentiation of the analytic gradient.
pub fn jacobian(n: usize, z: &[f64], target: f64) -> GeneralFrame<f64> {
    let dim = z.len();
    let mut j = GeneralFrame::zeros(dim, dim);
    let mut zd: Vec<Dual<f64>> = z.iter().map(|v| Dual::constant(*v)).collect();
    for col in 0..dim {
        zd[col].eps = 1.0;
        let r = residual_packed(n, &zd, Dual::constant(target));
        for (row, v) in r.iter().enumerate() {
            j.set(row, col, v.eps);
        }
        zd[col].eps = 0.0;
    }
    j
}

#[inline]
fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[inline]
fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn admissible(n: usize, z: &[f64], floor: f64) -> bool {
    z.iter().all(|v| v.is_finite() && v.abs() <= DIVERGENCE_BOUND) && z[..n].iter().all(|x| *x > floor)
}

/// `(JᵀJ + μI) δ = −Jᵀf`, solved as the least-squares problem
/// `[J; √μ I] δ ≈ [−f; 0]` to avoid squaring the condition number.
fn levenberg_marquardt_step(j: &GeneralFrame<f64>, f: &[f64], mu: f64) -> Option<Vec<f64>> {
    let (m, n) = (j.rows(), j.cols());
    let mut aug = GeneralFrame::zeros(m + n, n);
    for r in 0..m {
        for c in 0..n {
            aug.set(r, c, *j.get(r, c));
        }
    }
    let damp = mu.sqrt();
    for c in 0..n {
        aug.set(m + c, c, damp);
    }
    let mut rhs: Vec<f64> = f.iter().map(|v| -v).collect();
    rhs.resize(m + n, 0.0);
    aug.least_squares(&rhs).ok().filter(|s| s.iter().all(|v| v.is_finite()))
}

fn newton_step(j: &GeneralFrame<f64>, f: &[f64]) -> Option<Vec<f64>> {
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    match j.solve(&neg) {
        Ok(step) if step.iter().all(|v| v.is_finite()) => Some(step),
        _ => levenberg_marquardt_step(j, f, l2(f).max(1e-14)),
    }
}

/// Why a Newton run gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonFailure {
    /// The start is outside the domain (non-finite, or `x_i ≤ diag_floor`).
    BadStart,
    /// No damped step decreased the residual.
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub point: Option<CriticalPoint>,
    pub iterations: usize,
    pub failure: Option<NewtonFailure>,
}

impl NewtonOutcome {
    fn failed(iterations: usize, why: NewtonFailure) -> Self {
        NewtonOutcome {
            point: None,
            iterations,
            failure: Some(why),
        }
    }
}

/// Damped Newton on the `S̃ = n` system from one start.
pub fn newton_solve(start: &RatioCoordinates<f64>, opts: &SolverOptions) -> Option<CriticalPoint> {
    newton_run(start, opts).point
}

/// [`newton_solve`] with iteration count and failure reason.
pub fn newton_run(start: &RatioCoordinates<f64>, opts: &SolverOptions) -> NewtonOutcome {
    let n = start.n();
    let mut z = start.to_vec();
    if start.u.len() != off_diagonal_len(n) || !admissible(n, &z, opts.diag_floor) {
        return NewtonOutcome::failed(0, NewtonFailure::BadStart);
    }
    let mut f = residual_packed(n, &z, 2.0);
    let mut norm = l2(&f);
    let mut iterations = 0;
    while !(max_abs(&f) <= opts.newton_tol) {
        if iterations >= opts.newton_max_iter {
            return NewtonOutcome::failed(iterations, NewtonFailure::MaxIterations);
        }
        iterations += 1;
        let j = jacobian(n, &z, 2.0);
        let Some(step) = newton_step(&j, &f) else {
            return NewtonOutcome::failed(iterations, NewtonFailure::Stalled);
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if admissible(n, &trial, opts.diag_floor) {
                let ft = residual_packed(n, &trial, 2.0);
                let nt = l2(&ft);
                if nt < norm {
                    z = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return NewtonOutcome::failed(iterations, NewtonFailure::Stalled);
        }
    }
    if opts.polish {
        z = polish(n, z, opts.diag_floor);
    }
    let point = RatioCoordinates::from_slice(n, &z)
        .and_then(|c| CriticalPoint::from_coords(c, Normalization::STildeEqualsN))
        .ok()
        .filter(|p| p.residual_norm <= opts.newton_tol.max(1e-11));
    match point {
        Some(p) => NewtonOutcome {
            point: Some(p),
            iterations,
            failure: None,
        },
        None => NewtonOutcome::failed(iterations, NewtonFailure::Stalled),
    }
}

/// Refines a converged root with the residual evaluated in double-double
/// arithmetic and Levenberg–Marquardt steps (`μ = ‖F‖`).
///
/// At a regular root this is one or two Newton steps. At a singular root
/// (rank-deficient Jacobian, e.g. the standard metric for n = 3) f64 Newton
/// stalls near √ε in the coordinates; the extended residual keeps the linear
/// convergence going down to f64 resolution.
fn polish(n: usize, z: Vec<f64>, floor: f64) -> Vec<f64> {
    let mut zd: Vec<DoubleDouble> = z.iter().map(|v| DoubleDouble::from_f64(*v)).collect();
    let eval = |zd: &[DoubleDouble]| -> Vec<f64> {
        residual_packed(n, zd, DoubleDouble::from_f64(2.0))
            .into_iter()
            .map(DoubleDouble::to_f64)
            .collect()
    };
    let mut f = eval(&zd);
    let mut norm = l2(&f);
    for _ in 0..POLISH_MAX_ITER {
        if !(norm > 1e-30) {
            break;
        }
        let zf: Vec<f64> = zd.iter().map(|v| v.to_f64()).collect();
        let j = jacobian(n, &zf, 2.0);
        let Some(step) = levenberg_marquardt_step(&j, &f, norm) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..POLISH_HALVINGS {
            let trial: Vec<DoubleDouble> = zd.iter().zip(&step).map(|(a, d)| a.add_f64(t * d)).collect();
            if trial[..n].iter().all(|x| x.to_f64() > floor) {
                let ft = eval(&trial);
                let nt = l2(&ft);
                if nt < norm {
                    zd = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    zd.into_iter().map(DoubleDouble::to_f64).collect()
}

/// Seeded starting points; the first `k` starts do not depend on `opts.starts`.
pub fn sample_starts(n: usize, opts: &SolverOptions) -> Vec<RatioCoordinates<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let m = off_diagonal_len(n);
    (0..opts.starts)
        .map(|_| {
            let x = (0..n)
                .map(|_| rng.random_range(-opts.x_log_radius..=opts.x_log_radius).exp())
                .collect();
            let u = (0..m).map(|_| rng.random_range(-opts.u_radius..=opts.u_radius)).collect();
            RatioCoordinates { x, u }
        })
        .collect()
}

fn lex_cmp(a: &CriticalPoint, b: &CriticalPoint) -> Ordering {
    a.coords
        .x
        .iter()
        .chain(&a.coords.u)
        .zip(b.coords.x.iter().chain(&b.coords.u))
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn coord_distance(a: &RatioCoordinates<f64>, b: &RatioCoordinates<f64>) -> f64 {
    if a.n() != b.n() {
        return f64::INFINITY;
    }
    a.x.iter()
        .chain(&a.u)
        .zip(b.x.iter().chain(&b.u))
        .fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

/// Keeps the first representative of every cluster (max-norm ≤ `tol`), then
/// sorts lexicographically by `(x, u)`.
pub fn dedup_points<I: IntoIterator<Item = CriticalPoint>>(points: I, tol: f64) -> Vec<CriticalPoint> {
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in points {
        if !kept.iter().any(|k| coord_distance(&k.coords, &p.coords) <= tol) {
            kept.push(p);
        }
    }
    kept.sort_by(lex_cmp);
    kept
}

/// Result of a multistart run with convergence statistics.
#[derive(Debug, Clone)]
pub struct Census {
    pub points: Vec<CriticalPoint>,
    pub starts: usize,
    pub converged: usize,
    /// Index of the last start that produced a previously unseen root.
    pub last_discovery: Option<usize>,
}

impl Census {
    /// No new root appeared in the second half of the starts.
    pub fn is_saturated(&self) -> bool {
        self.last_discovery.is_none_or(|i| 2 * i < self.starts)
    }
}

/// Runs Newton from every start and deduplicates the converged roots.
pub fn solve_from_starts(starts: &[RatioCoordinates<f64>], opts: &SolverOptions) -> Census {
    let results: Vec<Option<CriticalPoint>> = if opts.parallel {
        starts.par_iter().map(|s| newton_solve(s, opts)).collect()
    } else {
        starts.iter().map(|s| newton_solve(s, opts)).collect()
    };
    let converged = results.iter().filter(|r| r.is_some()).count();
    let mut kept: Vec<CriticalPoint> = Vec::new();
    let mut last_discovery = None;
    for (i, p) in results.into_iter().enumerate() {
        let Some(p) = p else { continue };
        if !kept.iter().any(|k| coord_distance(&k.coords, &p.coords) <= opts.dedup_tol) {
            kept.push(p);
            last_discovery = Some(i);
        }
    }
    kept.sort_by(lex_cmp);
    Census {
        points: kept,
        starts: starts.len(),
        converged,
        last_discovery,
    }
}

/// All critical points found from `opts.starts` seeded random starts.
pub fn multistart(n: usize, opts: &SolverOptions) -> Result<Vec<CriticalPoint>> {
    multistart_census(n, opts).map(|c| c.points)
}

pub fn multistart_census(n: usize, opts: &SolverOptions) -> Result<Census> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(solve_from_starts(&sample_starts(n, opts), opts))
}

/// Rescales a critical point to `convention`; ratios `u` are unchanged.
pub fn normalize(pt: &CriticalPoint, convention: Normalization) -> CriticalPoint {
    let n = pt.n() as f64;
    let factor = match convention {
        Normalization::STildeEqualsN => (n / pt.s_tilde).sqrt(),
        Normalization::EinsteinConstantOne => (4.0 * n / pt.s_tilde).sqrt(),
        Normalization::UnitVolume => pt.volume.powf(-1.0 / n),
    };
    let coords = RatioCoordinates {
        x: pt.coords.x.iter().map(|v| v * factor).collect(),
        u: pt.coords.u.clone(),
    };
    CriticalPoint::from_coords(coords, convention).expect("positive rescaling of a valid point")
}

/// File form of a solver run: `{ n, convention, points: [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointSet {
    pub n: usize,
    pub convention: Normalization,
    pub points: Vec<CriticalPoint>,
}

#[derive(Deserialize)]
struct RawPointSet {
    n: usize,
    convention: Normalization,
    points: Vec<CriticalPoint>,
}

impl<'de> Deserialize<'de> for CriticalPointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawPointSet::deserialize(d)?;
        CriticalPointSet::new(raw.n, raw.convention, raw.points).map_err(D::Error::custom)
    }
}

impl CriticalPointSet {
    /// Checks that every point has dimension `n` and tags it with `convention`.
    pub fn new(n: usize, convention: Normalization, mut points: Vec<CriticalPoint>) -> Result<Self> {
        for (i, p) in points.iter_mut().enumerate() {
            if p.coords.n() != n || p.coords.u.len() != off_diagonal_len(n) || p.matrix.n() != n {
                return Err(Error::Shape(format!("point {i} does not have dimension {n}")));
            }
            p.normalization = convention;
        }
        Ok(CriticalPointSet { n, convention, points })
    }
}
