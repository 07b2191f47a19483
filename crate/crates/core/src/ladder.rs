//! Entanglement monotones, optimal conversion probability and the ratio
//! ladder that defines the intermediate state of the optimal protocol.
//!
//! Indices called `l` in this module are 1-based Schmidt indices, so that a
//! ladder rung `(0.5, 3)` means "ratio 0.5, block starting at the third
//! coefficient".

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::tail_sums;
use crate::schmidt::{common_dim, ProbVec};
use crate::tolerance::epsilon;

/// Tail sums `E_l = sum_{i >= l} p_i` for `l = 1..d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonotoneProfile(Vec<f64>);

impl MonotoneProfile {
    /// `E_l` for 1-based `l`; `E_{d+1} = 0`.
    pub fn get(&self, l: usize) -> f64 {
        assert!(l >= 1, "monotone index is 1-based");
        self.0.get(l - 1).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

pub fn monotones(p: &ProbVec) -> MonotoneProfile {
    let mut t = tail_sums(p, p.dim());
    t.pop();
    MonotoneProfile(t)
}

/// One step of the ladder: `ratio = r_j`, `l = l_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub ratio: f64,
    pub l: usize,
}

/// The sequence `(r_j, l_j)` with `r_1 < ... < r_k` and
/// `d + 1 = l_0 > l_1 > ... > l_k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLadder {
    pub dim: usize,
    pub rungs: Vec<Rung>,
}

impl RatioLadder {
    /// Number of rungs `k`.
    pub fn k(&self) -> usize {
        self.rungs.len()
    }

    /// `r_1`, the optimal conversion probability.
    pub fn r1(&self) -> f64 {
        self.rungs[0].ratio
    }

    /// Ratio and 0-based index range of each block `[l_j, l_{j-1} - 1]`.
    pub fn blocks(&self) -> impl Iterator<Item = (f64, Range<usize>)> + '_ {
        let mut prev = self.dim + 1;
        self.rungs.iter().map(move |rung| {
            let range = rung.l - 1..prev - 1;
            prev = rung.l;
            (rung.ratio, range)
        })
    }

    /// Structural check of the ladder invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPlan(msg));
        if self.rungs.is_empty() {
            return bad("ladder has no rungs".into());
        }
        if self.rungs.last().map(|r| r.l) != Some(1) {
            return bad("ladder must end at l = 1".into());
        }
        let mut prev_l = self.dim + 1;
        let mut prev_r = 0.0;
        for rung in &self.rungs {
            if rung.l >= prev_l || rung.l == 0 {
                return bad(format!("ladder indices not strictly decreasing at l = {}", rung.l));
            }
            if rung.ratio.is_nan() || rung.ratio <= 0.0 || rung.ratio < prev_r - epsilon() {
                return bad(format!("ladder ratios not increasing at r = {}", rung.ratio));
            }
            prev_l = rung.l;
            prev_r = rung.ratio;
        }
        if self.r1() > 1.0 + epsilon() {
            return bad(format!("r_1 = {} exceeds 1", self.r1()));
        }
        Ok(())
    }
}

/// Block-constant vector `(r)_i = r_j` for `i` in block `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RVector(Vec<f64>);

impl RVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn r_vector(ladder: &RatioLadder) -> RVector {
    let mut r = vec![0.0; ladder.dim];
    for (ratio, range) in ladder.blocks() {
        r[range].fill(ratio);
    }
    RVector(r)
}

fn check_ranks(source: &ProbVec, target: &ProbVec) -> Result<()> {
    let (rs, rt) = (source.effective_rank(), target.effective_rank());
    if rt > rs {
        return Err(Error::RankDeficit {
            state: "target".into(),
            source_rank: rs,
            target_rank: rt,
        });
    }
    Ok(())
}

/// Minimum of `E_l(source) / E_l(target)` over `l` with `E_l(target) > ε`,
/// together with the smallest minimizing `l`.
fn first_rung(es: &[f64], et: &[f64], d: usize) -> Option<Rung> {
    let eps = epsilon();
    let mut best: Option<Rung> = None;
    for l in 1..=d {
        if et[l - 1] <= eps {
            continue;
        }
        let ratio = es[l - 1] / et[l - 1];
        if best.is_none_or(|b| ratio < b.ratio) {
            best = Some(Rung { ratio, l });
        }
    }
    best
}

/// Optimal probability of converting `source` into `target`.
pub fn p_max(source: &ProbVec, target: &ProbVec) -> Result<f64> {
    check_ranks(source, target)?;
    let d = common_dim(source, target);
    let es = tail_sums(source, d);
    let et = tail_sums(target, d);
    match first_rung(&es, &et, d) {
        Some(r) if r.ratio > 0.0 => Ok(r.ratio.min(1.0)),
        _ => Err(Error::RankDeficit {
            state: "target".into(),
            source_rank: source.effective_rank(),
            target_rank: target.effective_rank(),
        }),
    }
}

/// Build the ratio ladder for converting `source` into `target`.
///
/// Each `l_j` is the smallest minimizer. Numerators and denominators of the
/// later rungs are accumulated directly from the entries of the block
/// `[l, l_{j-1} - 1]` instead of as differences of tail sums.
pub fn ratio_ladder(source: &ProbVec, target: &ProbVec) -> Result<RatioLadder> {
    let r1 = p_max(source, target)?;
    let d = common_dim(source, target);
    let s = source.padded(d);
    let t = target.padded(d);
    let es = tail_sums(&s, d);
    let et = tail_sums(&t, d);
    let first = Rung { ratio: r1, ..first_rung(&es, &et, d).expect("p_max succeeded") };

    let mut rungs = vec![first];
    let mut prev = first.l;
    while prev != 1 {
        let (mut num, mut den) = (0.0, 0.0);
        let mut best: Option<Rung> = None;
        for l in (1..prev).rev() {
            num += s[l - 1];
            den += t[l - 1];
            debug_assert!(den > 0.0, "non-positive ladder denominator");
            let ratio = num / den;
            if best.is_none_or(|b| ratio <= b.ratio) {
                best = Some(Rung { ratio, l });
            }
        }
        let rung = best.expect("non-empty range");
        rungs.push(rung);
        prev = rung.l;
    }
    Ok(RatioLadder { dim: d, rungs })
}

/// Element-wise product `a ⊙ x`.
pub fn hadamard(a: &[f64], x: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), x.len(), "hadamard operands differ in length");
    a.iter().zip(x).map(|(a, x)| a * x).collect()
}

/// `r ⊙ target` for a ladder built against `target`.
pub fn intermediate_from_ladder(ladder: &RatioLadder, target: &ProbVec) -> Result<ProbVec> {
    let t = target.padded(ladder.dim);
    ProbVec::from_computed(hadamard(r_vector(ladder).values(), t.as_slice()))
}

/// The state reachable deterministically from `source` from which a single
/// two-outcome measurement yields `target` with probability `p_max`.
pub fn intermediate_state(source: &ProbVec, target: &ProbVec) -> Result<ProbVec> {
    let ladder = ratio_ladder(source, target)?;
    intermediate_from_ladder(&ladder, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::{canonicalize, compare};

    fn pv(v: &[f64]) -> ProbVec {
        canonicalize(v).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    fn psi() -> ProbVec {
        pv(&[0.5, 0.4, 0.1])
    }

    fn phi() -> ProbVec {
        pv(&[0.6, 0.2, 0.2])
    }

    #[test]
    fn monotone_examples() {
        assert_close(monotones(&psi()).values(), &[1.0, 0.5, 0.1]);
        assert_close(monotones(&pv(&[1.0, 0.0, 0.0])).values(), &[1.0, 0.0, 0.0]);
        assert_close(monotones(&phi()).values(), &[1.0, 0.4, 0.2]);
        assert_eq!(monotones(&psi()).get(4), 0.0);
    }

    #[test]
    fn p_max_examples() {
        assert!((p_max(&psi(), &phi()).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(p_max(&psi(), &psi()).unwrap(), 1.0);
        assert_eq!(p_max(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn rank_deficit() {
        let err = p_max(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(
            err,
            Error::RankDeficit { source_rank: 1, target_rank: 2, .. }
        ));
        assert!(ratio_ladder(&pv(&[1.0]), &pv(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn ladder_of_worked_pair() {
        let ladder = ratio_ladder(&psi(), &phi()).unwrap();
        assert_eq!(ladder.k(), 2);
        assert_eq!(ladder.rungs[0].l, 3);
        assert_eq!(ladder.rungs[1].l, 1);
        assert!((ladder.rungs[0].ratio - 0.5).abs() < 1e-12);
        assert!((ladder.rungs[1].ratio - 1.125).abs() < 1e-12);
        ladder.validate().unwrap();
    }

    #[test]
    fn ladder_against_meet_matches() {
        let ladder = ratio_ladder(&psi(), &pv(&[0.5, 0.3, 0.2])).unwrap();
        assert_eq!(ladder.rungs.iter().map(|r| r.l).collect::<Vec<_>>(), vec![3, 1]);
        assert!((ladder.rungs[0].ratio - 0.5).abs() < 1e-12);
        assert!((ladder.rungs[1].ratio - 1.125).abs() < 1e-12);
    }

    #[test]
    fn trivial_ladder() {
        let ladder = ratio_ladder(&psi(), &psi()).unwrap();
        assert_eq!(ladder.rungs, vec![Rung { ratio: 1.0, l: 1 }]);
        assert_eq!(r_vector(&ladder).values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn r_vector_layout() {
        let ladder = RatioLadder {
            dim: 3,
            rungs: vec![Rung { ratio: 0.5, l: 3 }, Rung { ratio: 1.125, l: 1 }],
        };
        assert_eq!(r_vector(&ladder).values(), &[1.125, 1.125, 0.5]);
    }

    #[test]
    fn intermediate_examples() {
        let chi = intermediate_state(&psi(), &phi()).unwrap();
        assert_close(chi.as_slice(), &[0.675, 0.225, 0.1]);
        assert!(compare(&psi(), &chi).is_majorized());
        assert!(compare(&phi(), &chi).is_majorized());

        let zeta = intermediate_state(&psi(), &pv(&[0.5, 0.3, 0.2])).unwrap();
        assert_close(zeta.as_slice(), &[0.5625, 0.3375, 0.1]);

        let low = pv(&[0.4, 0.3, 0.3]);
        assert_eq!(intermediate_state(&low, &psi()).unwrap(), psi());
    }

    #[test]
    fn lower_rank_target_keeps_zero_tail() {
        // E(s) = (1, 0.1, 0.05), E(t) = (1, 0.5, 0): l = 3 is excluded,
        // r_1 = 0.1 / 0.5 at l = 2, then r_2 = 0.9 / 0.5 at l = 1.
        let s = pv(&[0.9, 0.05, 0.05]);
        let t = pv(&[0.5, 0.5, 0.0]);
        let ladder = ratio_ladder(&s, &t).unwrap();
        ladder.validate().unwrap();
        assert_eq!(ladder.rungs.iter().map(|r| r.l).collect::<Vec<_>>(), vec![2, 1]);
        assert!((ladder.r1() - 0.2).abs() < 1e-12);
        let chi = intermediate_from_ladder(&ladder, &t).unwrap();
        assert_close(chi.as_slice(), &[0.9, 0.1, 0.0]);
        assert!(compare(&s, &chi).is_majorized());
    }

    #[test]
    fn validate_rejects_malformed_ladders() {
        let bad = RatioLadder { dim: 3, rungs: vec![Rung { ratio: 0.5, l: 2 }] };
        assert!(bad.validate().is_err());
        let bad = RatioLadder {
            dim: 3,
            rungs: vec![Rung { ratio: 0.9, l: 2 }, Rung { ratio: 0.5, l: 1 }],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic_pairs_give_exactly_one() {
        // both vectors sum to 1 only up to one ulp
        let p = ProbVec::new(vec![0.6077376110148786, 0.39226238898512145]).unwrap();
        let q = ProbVec::new(vec![0.6463249320715855, 0.3536750679284144]).unwrap();
        assert_eq!(p_max(&p, &q).unwrap(), 1.0);
        assert_eq!(ratio_ladder(&p, &q).unwrap().r1(), 1.0);
    }
}
