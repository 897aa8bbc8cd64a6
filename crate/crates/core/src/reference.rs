//! Bundled reference critical points and matching against them.
//!
//! The table lists every critical point for n = 2 and n = 3 in the `S̃ = n`
//! scale, with closed forms and values rounded once from 30-digit evaluation
//! (see `assets/generate_reference.py`).

use crate::error::{Error, Result};
use crate::metric::{RatioCoordinates, TriangularMetric};
use crate::solver::{CriticalPoint, Normalization};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

static REFERENCE_JSON: &str = include_str!("../assets/reference.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub label: String,
    pub x_exact: Vec<String>,
    pub u_exact: Vec<String>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub volume_exact: String,
    pub volume: f64,
}

impl ReferencePoint {
    pub fn coords(&self) -> RatioCoordinates<f64> {
        RatioCoordinates {
            x: self.x.clone(),
            u: self.u.clone(),
        }
    }

    pub fn matrix(&self) -> TriangularMetric<f64> {
        TriangularMetric::from_ratio_coords(&self.coords()).expect("reference points have positive diagonal")
    }

    pub fn critical_point(&self) -> CriticalPoint {
        CriticalPoint::from_coords(self.coords(), Normalization::STildeEqualsN)
            .expect("reference points have positive diagonal")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub n: usize,
    pub points: Vec<ReferencePoint>,
}

#[derive(Debug, Deserialize)]
struct ReferenceFile {
    version: u32,
    #[allow(dead_code)]
    convention: Normalization,
    sets: Vec<ReferenceSet>,
}

fn bundled() -> &'static ReferenceFile {
    static FILE: OnceLock<ReferenceFile> = OnceLock::new();
    FILE.get_or_init(|| serde_json::from_str(REFERENCE_JSON).expect("bundled reference table parses"))
}

pub fn reference_version() -> u32 {
    bundled().version
}

/// Dimensions with a bundled reference table.
pub fn reference_dimensions() -> Vec<usize> {
    bundled().sets.iter().map(|s| s.n).collect()
}

pub fn reference_set(n: usize) -> Result<&'static ReferenceSet> {
    bundled()
        .sets
        .iter()
        .find(|s| s.n == n)
        .ok_or(Error::UnsupportedReference(n))
}

/// One-to-one matching of found points to reference points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    /// `(found index, reference index)` pairs.
    pub matched: Vec<(usize, usize)>,
    /// Reference indices with no partner.
    pub missing: Vec<usize>,
    /// Found indices with no partner.
    pub extra: Vec<usize>,
}

impl MatchReport {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

fn within(a: &RatioCoordinates<f64>, b: &RatioCoordinates<f64>, tol: f64) -> bool {
    a.x.len() == b.x.len()
        && a.u.len() == b.u.len()
        && a.x.iter().chain(&a.u).zip(b.x.iter().chain(&b.u)).all(|(p, q)| (p - q).abs() <= tol)
}

/// Maximum bipartite matching under max-norm distance `≤ tol` in `(x, u)`.
pub fn match_coordinates(found: &[RatioCoordinates<f64>], reference: &[RatioCoordinates<f64>], tol: f64) -> MatchReport {
    let adj: Vec<Vec<usize>> = found
        .iter()
        .map(|f| (0..reference.len()).filter(|&r| within(f, &reference[r], tol)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; reference.len()];

    fn augment(f: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[f] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|g| augment(g, adj, seen, owner)) {
                owner[r] = Some(f);
                return true;
            }
        }
        false
    }

    for f in 0..found.len() {
        let mut seen = vec![false; reference.len()];
        augment(f, &adj, &mut seen, &mut owner);
    }
    let mut matched: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .filter_map(|(r, f)| f.map(|f| (f, r)))
        .collect();
    matched.sort_unstable();
    let missing = (0..reference.len()).filter(|r| owner[*r].is_none()).collect();
    let extra = (0..found.len())
        .filter(|f| !matched.iter().any(|(g, _)| g == f))
        .collect();
    MatchReport {
        matched,
        missing,
        extra,
    }
}

/// Matches `points` (any convention; rescaled to `S̃ = n`) against `reference`.
pub fn verify_against_reference(points: &[CriticalPoint], reference: &ReferenceSet, tol: f64) -> MatchReport {
    let found: Vec<RatioCoordinates<f64>> = points
        .iter()
        .map(|p| match p.normalization {
            Normalization::STildeEqualsN => p.coords.clone(),
            _ => crate::solver::normalize(p, Normalization::STildeEqualsN).coords,
        })
        .collect();
    let refs: Vec<RatioCoordinates<f64>> = reference.points.iter().map(ReferencePoint::coords).collect();
    match_coordinates(&found, &refs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_shape() {
        assert_eq!(reference_version(), 1);
        assert_eq!(reference_set(2).unwrap().points.len(), 4);
        assert_eq!(reference_set(3).unwrap().points.len(), 29);
        assert!(matches!(reference_set(4), Err(Error::UnsupportedReference(4))));
    }

    #[test]
    fn every_reference_point_is_critical() {
        for n in reference_dimensions() {
            for p in &reference_set(n).unwrap().points {
                let cp = p.critical_point();
                assert!(cp.residual_norm < 1e-13, "n={n} {}: {}", p.label, cp.residual_norm);
                assert!((cp.volume - p.volume).abs() < 1e-14);
                assert!((cp.s_tilde - n as f64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn matching_prefers_a_perfect_assignment() {
        let c = |v: f64| RatioCoordinates { x: vec![v], u: vec![] };
        // greedy would pair found[0] with ref[0] and strand found[1]
        let found = [c(1.0), c(0.95)];
        let refs = [c(0.98), c(1.05)];
        let rep = match_coordinates(&found, &refs, 0.06);
        assert!(rep.is_exact(), "{rep:?}");
        assert_eq!(rep.matched, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn missing_and_extra() {
        let c = |v: f64| RatioCoordinates { x: vec![v], u: vec![] };
        let rep = match_coordinates(&[c(1.0), c(3.0)], &[c(1.0), c(2.0)], 1e-9);
        assert_eq!(rep.matched, vec![(0, 0)]);
        assert_eq!(rep.missing, vec![1]);
        assert_eq!(rep.extra, vec![1]);
    }
}
