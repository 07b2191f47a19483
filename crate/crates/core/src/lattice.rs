//! Meet and join on the majorization lattice.
//!
//! Both operations work on tail sums `T_i = sum_{j >= i} p_j` rather than on
//! head partial sums. The two descriptions are equivalent (`T_i = 1 - s_i`),
//! but tail sums keep full relative precision for small trailing entries:
//! the meet's `T` is the pointwise maximum of the inputs' `T`, and the
//! join's `T` is the greatest convex minorant of their pointwise minimum.

use crate::error::{Error, Result};
use crate::schmidt::{common_dim, ProbVec};

/// Head partial sums `s_0 = 0, ..., s_d` of a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CumSum(Vec<f64>);

impl CumSum {
    pub fn of(p: &ProbVec) -> Self {
        CumSum(p.cumulative())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Consecutive differences `s_k - s_{k-1}`.
    pub fn increments(&self) -> Vec<f64> {
        self.0.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Increments non-increasing within `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        let inc = self.increments();
        inc.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

/// Tail sums `T_0..T_d` of `p` padded to `d`, with `T_d = 0`.
pub(crate) fn tail_sums(p: &ProbVec, d: usize) -> Vec<f64> {
    let mut t = vec![0.0; d + 1];
    for i in (0..d).rev() {
        t[i] = t[i + 1] + p.as_slice().get(i).copied().unwrap_or(0.0);
    }
    t
}

fn from_tail(t: &[f64]) -> Result<ProbVec> {
    let entries = t.windows(2).map(|w| w[0] - w[1]).collect();
    ProbVec::from_computed(entries)
}

/// Greatest lower bound: the least entangled state convertible into both.
pub fn meet(p: &ProbVec, q: &ProbVec) -> ProbVec {
    let d = common_dim(p, q);
    let tp = tail_sums(p, d);
    let tq = tail_sums(q, d);
    let t: Vec<f64> = tp.iter().zip(&tq).map(|(a, b)| a.max(*b)).collect();
    from_tail(&t).expect("meet of canonical vectors is canonical")
}

/// Least upper bound: the most entangled state reachable from both.
pub fn join(p: &ProbVec, q: &ProbVec) -> ProbVec {
    let d = common_dim(p, q);
    let tp = tail_sums(p, d);
    let tq = tail_sums(q, d);
    let lower: Vec<f64> = tp.iter().zip(&tq).map(|(a, b)| a.min(*b)).collect();
    let increments = convex_minorant_increments(&lower);
    ProbVec::from_computed(increments).expect("join of canonical vectors is canonical")
}

/// Slopes of the greatest convex minorant of the points `(i, y_i)`, one per
/// unit interval, negated so that a decreasing `y` yields positive entries.
///
/// Single monotone-stack sweep; collinear points are dropped so each hull
/// segment is maximal, and ties keep the earlier vertex.
pub(crate) fn convex_minorant_increments(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b if it lies on or above the chord a -> i
            let lhs = (y[b] - y[a]) * (i - a) as f64;
            let rhs = (y[i] - y[a]) * (b - a) as f64;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (y[a] - y[b]) / (b - a) as f64;
        out.extend(std::iter::repeat_n(slope, b - a));
    }
    out
}

/// Meet of a non-empty collection, folded left to right.
pub fn meet_many(vs: &[ProbVec]) -> Result<ProbVec> {
    let (first, rest) = vs.split_first().ok_or(Error::EmptyCollection)?;
    Ok(rest.iter().fold(first.clone(), |acc, v| meet(&acc, v)))
}

/// Join of a non-empty collection, folded left to right.
pub fn join_many(vs: &[ProbVec]) -> Result<ProbVec> {
    let (first, rest) = vs.split_first().ok_or(Error::EmptyCollection)?;
    Ok(rest.iter().fold(first.clone(), |acc, v| join(&acc, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::{canonicalize, compare, MajOrder};

    fn pv(v: &[f64]) -> ProbVec {
        canonicalize(v).unwrap()
    }

    fn close(a: &ProbVec, b: &[f64]) -> bool {
        a.dim() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn meet_of_worked_pair() {
        let m = meet(&pv(&[0.5, 0.4, 0.1]), &pv(&[0.6, 0.2, 0.2]));
        assert!(close(&m, &[0.5, 0.3, 0.2]), "{m:?}");
    }

    #[test]
    fn join_of_worked_pair() {
        let j = join(&pv(&[0.5, 0.4, 0.1]), &pv(&[0.6, 0.2, 0.2]));
        assert!(close(&j, &[0.6, 0.3, 0.1]), "{j:?}");
    }

    #[test]
    fn join_needs_envelope_when_max_is_not_concave() {
        // max of cumsums is (0.5, 0.625, 0.9, 1, 1): increments (0.5, 0.125, 0.275, ...)
        // are not sorted, so the chord from k=1 to k=3 takes over.
        let p = pv(&[0.5, 0.125, 0.125, 0.125, 0.125]);
        let q = pv(&[0.3, 0.3, 0.3, 0.1, 0.0]);
        let j = join(&p, &q);
        assert!(close(&j, &[0.5, 0.2, 0.2, 0.1, 0.0]), "{j:?}");
        assert!(compare(&p, &j).is_majorized());
        assert!(compare(&q, &j).is_majorized());
    }

    #[test]
    fn idempotence_and_bounds() {
        let p = pv(&[0.5, 0.4, 0.1]);
        assert!(close(&meet(&p, &p), p.as_slice()));
        assert!(close(&join(&p, &p), p.as_slice()));
        let prod = pv(&[1.0, 0.0]);
        assert!(close(&meet(&prod, &prod), &[1.0, 0.0]));
        assert!(close(&join(&ProbVec::uniform(3), &p), p.as_slice()));
        assert!(close(&meet(&ProbVec::uniform(3), &p), ProbVec::uniform(3).as_slice()));
    }

    #[test]
    fn comparable_inputs_return_endpoints() {
        let low = pv(&[0.4, 0.3, 0.3]);
        let high = pv(&[0.7, 0.2, 0.1]);
        assert_eq!(compare(&low, &high), MajOrder::Precedes);
        assert!(close(&meet(&low, &high), low.as_slice()));
        assert!(close(&join(&low, &high), high.as_slice()));
    }

    #[test]
    fn many_reduces_to_binary() {
        let a = pv(&[0.5, 0.4, 0.1]);
        let b = pv(&[0.6, 0.2, 0.2]);
        let c = pv(&[0.7, 0.2, 0.1]);
        assert_eq!(meet_many(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(meet_many(&[a.clone(), b.clone()]).unwrap(), meet(&a, &b));
        let three = meet_many(&[a.clone(), b.clone(), c.clone()]).unwrap();
        assert!(close(&three, meet(&meet(&a, &b), &c).as_slice()));
        assert_eq!(meet_many(&[]), Err(Error::EmptyCollection));
        assert_eq!(join_many(&[]), Err(Error::EmptyCollection));
    }

    #[test]
    fn mixed_dimensions_are_padded() {
        let m = meet(&pv(&[0.5, 0.5]), &pv(&[0.6, 0.3, 0.1]));
        assert_eq!(m.dim(), 3);
        assert!(close(&m, &[0.5, 0.4, 0.1]));
    }

    #[test]
    fn cumsum_concavity() {
        assert!(CumSum::of(&pv(&[0.5, 0.3, 0.2])).is_concave(0.0));
        let raw = CumSum(vec![0.0, 0.1, 0.5, 1.0]);
        assert!(!raw.is_concave(1e-12));
    }

    #[test]
    fn minorant_handles_collinear_points() {
        let inc = convex_minorant_increments(&[1.0, 0.75, 0.5, 0.25, 0.0]);
        assert_eq!(inc, vec![0.25; 4]);
    }
}
