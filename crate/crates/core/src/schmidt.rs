//! Schmidt vectors and the majorization preorder.
//!
//! A [`ProbVec`] is a probability vector kept in non-increasing order, the
//! canonical representative of a bipartite pure state up to local unitaries.
//! Trailing zeros are stored explicitly so that vectors of different Schmidt
//! rank can share a dimension.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::epsilon;

/// Non-increasing probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVec(Vec<f64>);

/// Outcome of comparing two vectors under majorization.
///
/// `Precedes` means the left vector is majorized by the right one, i.e. it is
/// the more entangled of the two and can be converted deterministically into
/// the right one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajOrder {
    Precedes,
    Succeeds,
    Equivalent,
    Incomparable,
}

impl MajOrder {
    /// `true` for `Precedes` and `Equivalent`: the left vector is majorized by
    /// the right one.
    pub fn is_majorized(self) -> bool {
        matches!(self, MajOrder::Precedes | MajOrder::Equivalent)
    }

    pub fn reverse(self) -> MajOrder {
        match self {
            MajOrder::Precedes => MajOrder::Succeeds,
            MajOrder::Succeeds => MajOrder::Precedes,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MajOrder::Precedes => "precedes",
            MajOrder::Succeeds => "succeeds",
            MajOrder::Equivalent => "equivalent",
            MajOrder::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for MajOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sort, clamp and validate a raw probability vector.
pub fn canonicalize(raw: &[f64]) -> Result<ProbVec> {
    ProbVec::new(raw.to_vec())
}

impl ProbVec {
    /// Canonicalize `entries`: reject non-finite values, entries below `-ε`
    /// and sums further than `ε` from one; clamp the rest to `>= 0` and sort
    /// in non-increasing order.
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        let eps = epsilon();
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < -eps {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > eps {
            return Err(Error::NotNormalized { sum });
        }
        for x in &mut entries {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        entries.sort_by(|a, b| b.total_cmp(a));
        Ok(ProbVec(entries))
    }

    /// Canonicalize and zero-pad to at least `dim` entries.
    pub fn with_dim(entries: Vec<f64>, dim: usize) -> Result<Self> {
        Ok(ProbVec::new(entries)?.padded(dim))
    }

    /// Uniform vector of dimension `d` (the bottom of the lattice).
    pub fn uniform(d: usize) -> Self {
        assert!(d > 0, "dimension must be positive");
        ProbVec(vec![1.0 / d as f64; d])
    }

    /// `(1, 0, ..., 0)`, a product state (the top of the lattice).
    pub fn product(d: usize) -> Self {
        assert!(d > 0, "dimension must be positive");
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        ProbVec(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Number of entries greater than `ε`.
    pub fn effective_rank(&self) -> usize {
        let eps = epsilon();
        self.0.iter().filter(|&&x| x > eps).count()
    }

    /// Copy padded with trailing zeros up to `dim`; never truncates.
    pub fn padded(&self, dim: usize) -> ProbVec {
        let mut v = self.0.clone();
        if v.len() < dim {
            v.resize(dim, 0.0);
        }
        ProbVec(v)
    }

    /// Partial sums `s_0 = 0, s_1, ..., s_d`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for &x in &self.0 {
            acc += x;
            out.push(acc);
        }
        out
    }

    /// Wrap entries already known to be sorted and (nearly) normalized.
    ///
    /// Used for lattice results and spectra computed from canonical inputs;
    /// tiny negative round-off is clamped and the order is re-established.
    pub(crate) fn from_computed(mut entries: Vec<f64>) -> Result<Self> {
        for x in &mut entries {
            if *x < 0.0 && *x >= -epsilon() {
                *x = 0.0;
            }
        }
        ProbVec::new(entries)
    }
}

impl Index<usize> for ProbVec {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbVec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVec::new(v)
    }
}

impl From<ProbVec> for Vec<f64> {
    fn from(p: ProbVec) -> Vec<f64> {
        p.0
    }
}

impl AsRef<[f64]> for ProbVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Common dimension of two vectors after zero padding.
pub fn common_dim(p: &ProbVec, q: &ProbVec) -> usize {
    p.dim().max(q.dim())
}

/// Smallest value of `s^q_k - s^p_k` over `k = 1..d-1`, after padding.
///
/// Non-negative (up to `ε`) exactly when `p` is majorized by `q`. For
/// `d = 1` there are no inequalities and the margin is `0`.
pub fn majorization_margin(p: &ProbVec, q: &ProbVec) -> f64 {
    let d = common_dim(p, q);
    let (mut sp, mut sq) = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    for k in 0..d.saturating_sub(1) {
        sp += p.as_slice().get(k).copied().unwrap_or(0.0);
        sq += q.as_slice().get(k).copied().unwrap_or(0.0);
        margin = margin.min(sq - sp);
    }
    if margin.is_infinite() {
        0.0
    } else {
        margin
    }
}

/// Four-way majorization comparison with tolerance `ε`.
pub fn compare(p: &ProbVec, q: &ProbVec) -> MajOrder {
    let eps = epsilon();
    let forward = majorization_margin(p, q) >= -eps;
    let backward = majorization_margin(q, p) >= -eps;
    match (forward, backward) {
        (true, true) => MajOrder::Equivalent,
        (true, false) => MajOrder::Precedes,
        (false, true) => MajOrder::Succeeds,
        (false, false) => MajOrder::Incomparable,
    }
}

/// `p` is majorized by `q` (within `ε`).
pub fn majorized_by(p: &ProbVec, q: &ProbVec) -> bool {
    majorization_margin(p, q) >= -epsilon()
}

pub fn effective_rank(p: &ProbVec) -> usize {
    p.effective_rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVec {
        canonicalize(v).unwrap()
    }

    #[test]
    fn canonicalize_sorts() {
        assert_eq!(pv(&[0.1, 0.5, 0.4]).as_slice(), &[0.5, 0.4, 0.1]);
        assert_eq!(pv(&[1.0]).as_slice(), &[1.0]);
    }

    #[test]
    fn canonicalize_rejects_bad_input() {
        assert!(matches!(
            canonicalize(&[0.3, 0.3, 0.3]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            canonicalize(&[1.2, -0.2]),
            Err(Error::NegativeEntry { index: 1, .. })
        ));
        assert_eq!(canonicalize(&[]), Err(Error::Empty));
        assert!(matches!(
            canonicalize(&[f64::NAN, 1.0]),
            Err(Error::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn canonicalize_clamps_tiny_negatives() {
        let p = pv(&[1.0 + 1e-12, -1e-12]);
        assert_eq!(p.as_slice()[1], 0.0);
    }

    #[test]
    fn compare_examples() {
        let p = pv(&[0.5, 0.4, 0.1]);
        let q = pv(&[0.6, 0.2, 0.2]);
        assert_eq!(compare(&p, &q), MajOrder::Incomparable);
        assert_eq!(compare(&p, &p), MajOrder::Equivalent);
        assert_eq!(compare(&ProbVec::uniform(3), &p), MajOrder::Precedes);
        assert_eq!(compare(&p, &ProbVec::uniform(3)), MajOrder::Succeeds);
    }

    #[test]
    fn compare_pads_shorter_vector() {
        let bell = pv(&[0.5, 0.5]);
        let three = pv(&[0.4, 0.3, 0.3]);
        assert_eq!(compare(&three, &bell), MajOrder::Precedes);
        assert_eq!(compare(&pv(&[1.0]), &three), MajOrder::Succeeds);
    }

    #[test]
    fn effective_rank_examples() {
        assert_eq!(pv(&[0.75, 0.25, 0.0]).effective_rank(), 2);
        assert_eq!(pv(&[1.0]).effective_rank(), 1);
        assert_eq!(pv(&[0.5, 0.3, 0.2]).effective_rank(), 3);
    }

    #[test]
    fn margin_is_zero_for_one_dimensional() {
        assert_eq!(majorization_margin(&pv(&[1.0]), &pv(&[1.0])), 0.0);
    }

    #[test]
    fn serde_round_trip_canonicalizes() {
        let p: ProbVec = serde_json::from_str("[0.1, 0.9]").unwrap();
        assert_eq!(p.as_slice(), &[0.9, 0.1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.9,0.1]");
        assert!(serde_json::from_str::<ProbVec>("[0.1, 0.1]").is_err());
    }
}
