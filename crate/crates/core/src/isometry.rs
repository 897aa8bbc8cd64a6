//! Isometry moves between triangular representatives and the resulting
//! classification of critical points.
//!
//! Three moves produce isometric metrics: left multiplication by an
//! orthogonal matrix, permutation of columns, and right multiplication by
//! `T^k`. Left-orthogonal moves are quotiented out by
//! [`cholesky_canonical`]; the other two generate a finite group of integer
//! right multipliers, which is enumerated once per `n` and cached. On product
//! metrics the moves of each factor apply separately, which links
//! representatives the full group alone does not.

use crate::error::{Error, Result};
use crate::linalg::GeneralFrame;
use crate::metric::{cholesky_canonical, TriangularMetric};
use crate::solver::CriticalPoint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

/// Largest `n` for which the move group is enumerated (`9! = 362880` elements).
pub const MAX_GROUP_DIM: usize = 8;
/// Entry tolerance of the lexicographic comparison in [`canonical_form`].
pub const CANONICAL_TOL: f64 = 1e-8;

/// Square integer matrix used as a right multiplier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl MoveMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        MoveMatrix { n, entries }
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("move matrix must be square".into()));
        }
        Ok(MoveMatrix {
            n,
            entries: rows.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        self.entries.chunks(self.n.max(1)).map(<[i8]>::to_vec).collect()
    }

    pub fn to_frame(&self) -> GeneralFrame<f64> {
        GeneralFrame::new(self.n, self.n, self.entries.iter().map(|&v| f64::from(v)).collect())
            .expect("square by construction")
    }

    /// Product `self · other`; fails if an entry leaves the `i8` range.
    pub fn mul(&self, other: &MoveMatrix) -> Result<MoveMatrix> {
        if self.n != other.n {
            return Err(Error::Shape(format!("cannot multiply {0}x{0} by {1}x{1}", self.n, other.n)));
        }
        let n = self.n;
        let mut entries = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                let s: i32 = (0..n).map(|k| i32::from(self.get(i, k)) * i32::from(other.get(k, j))).sum();
                entries[i * n + j] = i8::try_from(s)
                    .map_err(|_| Error::Capacity(format!("move matrix entry {s} overflows")))?;
            }
        }
        Ok(MoveMatrix { n, entries })
    }

    /// Exact determinant (fraction-free elimination).
    pub fn determinant(&self) -> i64 {
        let n = self.n;
        let mut a: Vec<i64> = self.entries.iter().map(|&v| i64::from(v)).collect();
        let mut sign = 1;
        let mut prev = 1i64;
        for k in 0..n {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = a[k * n + k];
        }
        if n == 0 {
            1
        } else {
            sign * a[n * n - 1]
        }
    }
}

/// A generator of the right-multiplier group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryMove {
    /// Column `j` of the result is column `perm[j]` of the input (zero-based).
    ColumnPermutation(Vec<usize>),
    /// Right multiplication by `T^k`, `k` one-based.
    BasePointSwap(usize),
}

impl IsometryMove {
    pub fn matrix(&self, n: usize) -> Result<MoveMatrix> {
        match self {
            IsometryMove::ColumnPermutation(perm) => permutation_matrix(perm).and_then(|p| {
                if p.n == n {
                    Ok(p)
                } else {
                    Err(Error::Shape(format!("permutation of {} columns for n = {n}", p.n)))
                }
            }),
            IsometryMove::BasePointSwap(k) => t_matrix(n, *k),
        }
    }
}

fn permutation_matrix(perm: &[usize]) -> Result<MoveMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut m = MoveMatrix {
        n,
        entries: vec![0; n * n],
    };
    for (j, &src) in perm.iter().enumerate() {
        if src >= n || seen[src] {
            return Err(Error::Domain(format!("{perm:?} is not a permutation")));
        }
        seen[src] = true;
        m.entries[src * n + j] = 1;
    }
    Ok(m)
}

/// `T^k`: the identity with row `k` replaced by all `−1` (`k` one-based).
pub fn t_matrix(n: usize, k: usize) -> Result<MoveMatrix> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("k = {k} not in 1..={n}")));
    }
    let mut m = MoveMatrix::identity(n);
    for j in 0..n {
        m.entries[(k - 1) * n + j] = -1;
    }
    Ok(m)
}

/// Adjacent column transpositions followed by `T^1..T^n`.
pub fn generators(n: usize) -> Vec<MoveMatrix> {
    let mut gens = Vec::with_capacity(2 * n);
    for j in 0..n.saturating_sub(1) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(j, j + 1);
        gens.push(permutation_matrix(&perm).expect("valid transposition"));
    }
    for k in 1..=n {
        gens.push(t_matrix(n, k).expect("k in range"));
    }
    gens
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Closure of [`generators`] under multiplication, in breadth-first order
/// starting from the identity. Cached per `n`.
pub fn orbit_group(n: usize) -> Result<Arc<Vec<MoveMatrix>>> {
    if n == 0 || n > MAX_GROUP_DIM {
        return Err(Error::Capacity(format!(
            "move group is enumerated for 1 <= n <= {MAX_GROUP_DIM}, got {n}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<MoveMatrix>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("group cache poisoned").get(&n) {
        return Ok(Arc::clone(g));
    }
    let group = Arc::new(close_group(n)?);
    let mut guard = cache.lock().expect("group cache poisoned");
    Ok(Arc::clone(guard.entry(n).or_insert(group)))
}

fn close_group(n: usize) -> Result<Vec<MoveMatrix>> {
    // generous guard in case the closure were larger than expected
    let budget = 4 * factorial(n + 1);
    let gens = generators(n);
    let id = MoveMatrix::identity(n);
    let mut seen: HashSet<MoveMatrix> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut head = 0;
    while head < elems.len() {
        let g = elems[head].clone();
        head += 1;
        for s in &gens {
            let h = g.mul(s)?;
            if seen.insert(h.clone()) {
                elems.push(h);
                if elems.len() > budget {
                    return Err(Error::Capacity(format!("move group for n = {n} exceeds {budget} elements")));
                }
            }
        }
    }
    Ok(elems)
}

fn right_multiply(a: &TriangularMetric<f64>, g: &MoveMatrix) -> GeneralFrame<f64> {
    let n = a.n();
    let mut out = GeneralFrame::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..=i {
                match g.get(k, j) {
                    0 => {}
                    1 => s += a.get(i, k),
                    -1 => s -= a.get(i, k),
                    c => s += f64::from(c) * a.get(i, k),
                }
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Triangular representative of `A·g`.
pub fn apply_move(a: &TriangularMetric<f64>, g: &MoveMatrix) -> Result<TriangularMetric<f64>> {
    if g.n() != a.n() {
        return Err(Error::Shape(format!("{0}x{0} move for a {1}x{1} metric", g.n(), a.n())));
    }
    cholesky_canonical(&right_multiply(a, g))
}

/// Row-major lexicographic order where entries within `tol` compare equal.
pub fn tolerant_cmp(a: &TriangularMetric<f64>, b: &TriangularMetric<f64>, tol: f64) -> Ordering {
    a.as_frame()
        .as_slice()
        .iter()
        .zip(b.as_frame().as_slice())
        .find(|(p, q)| (*p - *q).abs() > tol)
        .map_or(Ordering::Equal, |(p, q)| p.total_cmp(q))
}

/// Lexicographic minimum of `{cholesky_canonical(A·g) : g ∈ orbit_group(n)}`.
pub fn group_canonical_form(a: &TriangularMetric<f64>) -> Result<TriangularMetric<f64>> {
    let group = orbit_group(a.n())?;
    let mut best: Option<TriangularMetric<f64>> = None;
    for g in group.iter() {
        let c = apply_move(a, g)?;
        if best
            .as_ref()
            .is_none_or(|b| tolerant_cmp(&c, b, CANONICAL_TOL) == Ordering::Less)
        {
            best = Some(c);
        }
    }
    Ok(best.expect("group contains the identity"))
}

/// Upper bound on the representatives visited by [`isometry_closure`].
pub const CLOSURE_BUDGET: usize = 400_000;

/// Column groups on which the metric splits as a product: connected
/// components of the support of `AᵀA`, each sorted, ordered by first index.
pub fn factor_blocks(a: &TriangularMetric<f64>) -> Vec<Vec<usize>> {
    let n = a.n();
    let f = a.as_frame();
    let gram = f.transpose().matmul(f).expect("square");
    let scale = gram.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = 1e-10 * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if gram.get(i, j).abs() > cut {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        match blocks.iter_mut().find(|b| b[0] == r) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    blocks
}

/// `g` acting on the columns `cols` and as the identity elsewhere.
fn embed(n: usize, cols: &[usize], g: &MoveMatrix) -> MoveMatrix {
    let mut m = MoveMatrix::identity(n);
    for (a, &i) in cols.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            m.entries[i * n + j] = g.get(a, b);
        }
    }
    m
}

fn state_key(a: &TriangularMetric<f64>) -> Vec<i64> {
    a.as_frame().as_slice().iter().map(|v| (v * 1e9).round() as i64).collect()
}

/// Every triangular representative reachable from `A` by the move group and,
/// on product metrics, by the move group of any union of factors.
///
/// When `AᵀA` is block diagonal the metric is a product, and the moves of a
/// factor `F^J` (columns `J`) act on it without touching the other factors.
pub fn isometry_closure(a: &TriangularMetric<f64>) -> Result<Vec<TriangularMetric<f64>>> {
    let n = a.n();
    orbit_group(n)?;
    let full = generators(n);
    let start = cholesky_canonical(a.as_frame())?;
    let mut seen: HashSet<Vec<i64>> = HashSet::from([state_key(&start)]);
    let mut states = vec![start];
    let mut head = 0;
    while head < states.len() {
        let s = states[head].clone();
        head += 1;
        let mut moves: Vec<MoveMatrix> = full.clone();
        let blocks = factor_blocks(&s);
        let c = blocks.len();
        if c > 1 {
            for mask in 1..(1usize << c) - 1 {
                let mut cols: Vec<usize> = (0..c)
                    .filter(|b| mask >> b & 1 == 1)
                    .flat_map(|b| blocks[b].iter().copied())
                    .collect();
                cols.sort_unstable();
                moves.extend(generators(cols.len()).iter().map(|g| embed(n, &cols, g)));
            }
        }
        for g in &moves {
            let t = apply_move(&s, g)?;
            if seen.insert(state_key(&t)) {
                states.push(t);
                if states.len() > CLOSURE_BUDGET {
                    return Err(Error::Capacity(format!(
                        "isometry closure exceeds {CLOSURE_BUDGET} representatives"
                    )));
                }
            }
        }
    }
    Ok(states)
}

/// Lexicographic minimum of [`isometry_closure`]; constant on each closure.
pub fn canonical_form(a: &TriangularMetric<f64>) -> Result<TriangularMetric<f64>> {
    let states = isometry_closure(a)?;
    let mut best = &states[0];
    for c in &states[1..] {
        if tolerant_cmp(c, best, CANONICAL_TOL) == Ordering::Less {
            best = c;
        }
    }
    Ok(best.clone())
}

/// `diag(1,…,1,−1)·A·T^n`, brought back to triangular form.
pub fn hat(a: &TriangularMetric<f64>) -> Result<TriangularMetric<f64>> {
    let n = a.n();
    let mut m = right_multiply(a, &t_matrix(n, n)?);
    for j in 0..n {
        let v = -*m.get(n - 1, j);
        m.set(n - 1, j, v);
    }
    cholesky_canonical(&m)
}

/// The same map by its entry formula: last row `b_nj = a_nn − a_nj` (`j < n`).
pub fn hat_entrywise<T: crate::scalar::Scalar>(a: &TriangularMetric<T>) -> TriangularMetric<T> {
    let n = a.n();
    let mut rows = a.to_rows();
    let ann = a.get(n - 1, n - 1).clone();
    for j in 0..n - 1 {
        rows[n - 1][j] = ann.clone() - a.get(n - 1, j).clone();
    }
    TriangularMetric::from_rows(rows).expect("diagonal unchanged")
}

/// Critical points sharing a canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryClass {
    pub volume: f64,
    pub s_tilde: f64,
    #[serde(rename = "canonical_matrix")]
    pub canonical: TriangularMetric<f64>,
    #[serde(rename = "member_indices")]
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub classes: Vec<IsometryClass>,
}

/// Groups points whose canonical forms agree within `tol` entrywise.
/// Volume and `S̃` are compared first as cheap invariants.
pub fn classify(points: &[CriticalPoint], tol: f64) -> Result<Vec<IsometryClass>> {
    let canon: Vec<TriangularMetric<f64>> = points
        .par_iter()
        .map(|p| canonical_form(&p.matrix))
        .collect::<Result<_>>()?;
    let invariant_tol = 1e-9;
    let mut classes: Vec<IsometryClass> = Vec::new();
    for (idx, (p, c)) in points.iter().zip(canon).enumerate() {
        let found = classes.iter_mut().find(|k| {
            k.canonical.n() == c.n()
                && (k.volume - p.volume).abs() <= invariant_tol * k.volume.abs().max(1.0)
                && (k.s_tilde - p.s_tilde).abs() <= invariant_tol * k.s_tilde.abs().max(1.0)
                && k.canonical.as_frame().max_abs_diff(c.as_frame()).is_some_and(|d| d <= tol)
        });
        match found {
            Some(k) => k.members.push(idx),
            None => classes.push(IsometryClass {
                volume: p.volume,
                s_tilde: p.s_tilde,
                canonical: c,
                members: vec![idx],
            }),
        }
    }
    classes.sort_by(|a, b| {
        a.volume
            .total_cmp(&b.volume)
            .then_with(|| tolerant_cmp(&a.canonical, &b.canonical, CANONICAL_TOL))
    });
    Ok(classes)
}
