//! Standard and routine Einstein metrics, partition counts and the bounds
//! they give on the number of Einstein metrics.

use crate::error::{Error, Result};
use crate::isometry::hat_entrywise;
use crate::metric::{block_diag_all, TriangularMetric};
use crate::scalar::{from_f64, Real};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};
use std::sync::OnceLock;

/// Largest `n` accepted by [`routine_critical_points`] by default.
pub const DEFAULT_ROUTINE_BUDGET: usize = 8;
/// Largest `n` accepted by [`partition_count`].
pub const MAX_PARTITION_N: usize = 1000;
/// Largest `n` for which partitions and compositions are listed explicitly.
pub const MAX_LISTED_N: usize = 40;

/// Matrix of the standard metric: `a_ii = √((n−i+2)/(n−i+1))`,
/// `a_ij = 1/√((n−i+1)(n−i+2))` for `j < i` (one-based `i`).
pub fn standard_matrix<T: Real>(n: usize) -> Result<TriangularMetric<T>> {
    if n == 0 {
        return Err(Error::Domain("standard matrix needs n >= 1".into()));
    }
    let rows = (1..=n)
        .map(|i| {
            let a = from_f64::<T>((n - i + 1) as f64);
            let b = from_f64::<T>((n - i + 2) as f64);
            let off = T::one() / (a * b).sqrt();
            let mut row = vec![T::zero(); n];
            for v in row.iter_mut().take(i - 1) {
                *v = off;
            }
            row[i - 1] = (b / a).sqrt();
            row
        })
        .collect();
    TriangularMetric::from_rows(rows)
}

/// The standard metric scaled by `√(4(n+1)/(n+3))` to Einstein constant 1.
///
/// Each entry is taken as one square root of the combined ratio, so that
/// e.g. `n = 1` gives exactly `2`.
pub fn standard_einstein_matrix<T: Real>(n: usize) -> Result<TriangularMetric<T>> {
    if n == 0 {
        return Err(Error::Domain("standard matrix needs n >= 1".into()));
    }
    let c2 = 4.0 * (n as f64 + 1.0) / (n as f64 + 3.0);
    let rows = (1..=n)
        .map(|i| {
            let a = (n - i + 1) as f64;
            let b = (n - i + 2) as f64;
            let off = from_f64::<T>(c2 / (a * b)).sqrt();
            let mut row = vec![T::zero(); n];
            for v in row.iter_mut().take(i - 1) {
                *v = off;
            }
            row[i - 1] = from_f64::<T>(c2 * b / a).sqrt();
            row
        })
        .collect();
    TriangularMetric::from_rows(rows)
}

/// Block-diagonal product of standard Einstein matrices of the given sizes.
pub fn routine_from_partition(parts: &[usize]) -> Result<TriangularMetric<f64>> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(Error::Domain(format!("parts must be positive, got {parts:?}")));
    }
    let blocks = parts
        .iter()
        .map(|&k| standard_einstein_matrix(k))
        .collect::<Result<Vec<_>>>()?;
    block_diag_all(&blocks)
}

/// A non-increasing list of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Domain(format!("parts must be positive, got {parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// All partitions of `n`, largest first part first.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_LISTED_N {
        return Err(Error::Capacity(format!("partitions are listed for 1 <= n <= {MAX_LISTED_N}, got {n}")));
    }
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Ordered decompositions of `n` into positive parts, in lexicographic order.
pub fn enumerate_compositions(n: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || n > MAX_LISTED_N.min(24) {
        return Err(Error::Capacity(format!("compositions are listed for 1 <= n <= 24, got {n}")));
    }
    fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 1..=rest {
            cur.push(k);
            rec(rest - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    rec(n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Consecutive parts paired into super-blocks; an odd tail joins the last one.
/// A single part forms no super-block.
fn super_blocks(parts: &[usize]) -> Vec<Vec<usize>> {
    let l = parts.len();
    if l < 2 {
        return Vec::new();
    }
    let mut blocks: Vec<Vec<usize>> = parts.chunks(2).map(<[usize]>::to_vec).collect();
    if l % 2 == 1 {
        let tail = blocks.pop().expect("l >= 3");
        blocks.last_mut().expect("l >= 3").extend(tail);
    }
    blocks
}

/// Routine Einstein matrices (Einstein constant 1) with [`DEFAULT_ROUTINE_BUDGET`].
pub fn routine_critical_points(n: usize) -> Result<Vec<TriangularMetric<f64>>> {
    routine_critical_points_with_budget(n, DEFAULT_ROUTINE_BUDGET)
}

/// For every composition of `n`, the block-diagonal matrices whose
/// super-blocks are each either the product of standard blocks or its hat.
/// Exact duplicates (entrywise within 1e-10) are dropped; order is by
/// composition, then by variant bitmask.
pub fn routine_critical_points_with_budget(n: usize, budget: usize) -> Result<Vec<TriangularMetric<f64>>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > budget {
        return Err(Error::Capacity(format!("routine points are enumerated for n <= {budget}, got {n}")));
    }
    let mut out: Vec<TriangularMetric<f64>> = Vec::new();
    for comp in enumerate_compositions(n)? {
        let groups = super_blocks(&comp);
        if groups.is_empty() {
            push_unique(&mut out, routine_from_partition(&comp)?);
            continue;
        }
        let plain: Vec<TriangularMetric<f64>> =
            groups.iter().map(|g| routine_from_partition(g)).collect::<Result<_>>()?;
        let hatted: Vec<TriangularMetric<f64>> = plain.iter().map(hat_entrywise).collect();
        for mask in 0..1usize << groups.len() {
            let blocks: Vec<TriangularMetric<f64>> = (0..groups.len())
                .map(|b| if mask >> b & 1 == 1 { hatted[b].clone() } else { plain[b].clone() })
                .collect();
            push_unique(&mut out, block_diag_all(&blocks)?);
        }
    }
    Ok(out)
}

fn push_unique(out: &mut Vec<TriangularMetric<f64>>, m: TriangularMetric<f64>) {
    if !out
        .iter()
        .any(|o| o.as_frame().max_abs_diff(m.as_frame()).is_some_and(|d| d <= 1e-10))
    {
        out.push(m);
    }
}

fn partition_table() -> &'static [u128] {
    static TABLE: OnceLock<Vec<u128>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut p: Vec<i128> = vec![0; MAX_PARTITION_N + 1];
        p[0] = 1;
        for m in 1..=MAX_PARTITION_N {
            let mut acc: i128 = 0;
            for k in 1.. {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > m {
                    break;
                }
                let g2 = k * (3 * k + 1) / 2;
                let term = p[m - g1] + if g2 <= m { p[m - g2] } else { 0 };
                acc = if k % 2 == 1 {
                    acc.checked_add(term)
                } else {
                    acc.checked_sub(term)
                }
                .expect("p(n) for n <= 1000 fits in 128 bits");
            }
            p[m] = acc;
        }
        p.into_iter().map(|v| u128::try_from(v).expect("partition counts are positive")).collect()
    })
}

/// Number of partitions `p(n)` by the pentagonal-number recurrence.
pub fn partition_count(n: usize) -> Result<u128> {
    if n == 0 || n > MAX_PARTITION_N {
        return Err(Error::Capacity(format!(
            "partition counts are tabulated for 1 <= n <= {MAX_PARTITION_N}, got {n}"
        )));
    }
    Ok(partition_table()[n])
}

/// `exp(2.5√n) / (13n)`, a lower bound for `p(n)`.
pub fn maroti_bound(n: usize) -> f64 {
    let n = n as f64;
    (2.5 * n.sqrt()).exp() / (13.0 * n)
}

fn ln_maroti_bound(n: usize) -> f64 {
    let n = n as f64;
    2.5 * n.sqrt() - (13.0 * n).ln()
}

/// Leading Hardy–Ramanujan asymptotic `exp(π√(2n/3)) / (4n√3)`.
pub fn hardy_ramanujan(n: usize) -> f64 {
    let n = n as f64;
    (std::f64::consts::PI * (2.0 * n / 3.0).sqrt()).exp() / (4.0 * n * 3f64.sqrt())
}

/// `Σ_{l=1}^{n} C(n−1, l−1) · 2^⌊l/2⌋`: routine points counted over all
/// composition lengths.
pub fn rem_sum_bound(n: usize) -> BigUint {
    let mut total = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    for l in 1..=n {
        total += &binom << (l / 2);
        // C(n−1, l) from C(n−1, l−1)
        binom = binom * BigUint::from(n - l) / BigUint::from(l);
    }
    total
}

/// `(1+√2)^(n−1)`.
pub fn rem_sqrt2_bound(n: usize) -> f64 {
    (1.0 + std::f64::consts::SQRT_2).powi(n as i32 - 1)
}

/// `√2·π/3`, the lower constant reported for the `SU(2)` family.
pub fn emhs_lower_constant() -> f64 {
    std::f64::consts::SQRT_2 * std::f64::consts::PI / 3.0
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub n: usize,
    pub p_n: u128,
    pub maroti_bound: f64,
    pub hardy_ramanujan: f64,
    #[serde(serialize_with = "as_decimal")]
    pub rem_sum_bound: BigUint,
    pub rem_sqrt2_bound: f64,
    /// `p(n) > maroti_bound`, compared in logarithms.
    pub maroti_holds: bool,
}

pub fn bounds(n: usize) -> Result<PartitionSummary> {
    let p_n = partition_count(n)?;
    Ok(PartitionSummary {
        n,
        p_n,
        maroti_bound: maroti_bound(n),
        hardy_ramanujan: hardy_ramanujan(n),
        rem_sum_bound: rem_sum_bound(n),
        rem_sqrt2_bound: rem_sqrt2_bound(n),
        maroti_holds: (p_n as f64).ln() > ln_maroti_bound(n),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub n: usize,
    pub partitions: Vec<Partition>,
    pub routine_points: Vec<TriangularMetric<f64>>,
    pub counts: PartitionSummary,
}

pub fn catalog(n: usize) -> Result<Catalog> {
    Ok(Catalog {
        n,
        partitions: partitions(n)?,
        routine_points: routine_critical_points(n)?,
        counts: bounds(n)?,
    })
}
