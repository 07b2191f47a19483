//! Random instances for sweeps and tests.
//!
//! Vectors are drawn uniformly from the probability simplex (normalized
//! `Exp(1)` samples) and then sorted. Majorization witnesses are produced by
//! Robin Hood transfers: moving mass from a larger entry to a smaller one
//! yields a vector majorized by the original, and the reverse move yields
//! one that majorizes it.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::schmidt::{compare, MajOrder, ProbVec};

/// Sorted sample from the uniform distribution on the `d`-simplex.
pub fn random_probvec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ProbVec {
    assert!(d > 0, "dimension must be positive");
    let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    ProbVec::new(raw.into_iter().map(|x: f64| x / total).collect())
        .expect("normalized exponential sample")
}

/// Rejection-sample an incomparable pair; `None` after `max_tries` failures
/// (always the case for `d <= 2`).
pub fn random_incomparable_pair<R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
    max_tries: usize,
) -> Option<(ProbVec, ProbVec)> {
    (0..max_tries).find_map(|_| {
        let p = random_probvec(d, rng);
        let q = random_probvec(d, rng);
        (compare(&p, &q) == MajOrder::Incomparable).then_some((p, q))
    })
}

fn resorted(mut v: Vec<f64>) -> ProbVec {
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    ProbVec::new(v).expect("transfer preserves normalization")
}

/// One random Robin Hood transfer; the result is majorized by `p`.
pub fn robin_hood<R: Rng + ?Sized>(p: &ProbVec, rng: &mut R) -> ProbVec {
    let d = p.dim();
    if d < 2 {
        return p.clone();
    }
    let i = rng.random_range(0..d - 1);
    let j = rng.random_range(i + 1..d);
    let gap = p[i] - p[j];
    let delta = rng.random::<f64>() * gap / 2.0;
    let mut v = p.as_slice().to_vec();
    v[i] -= delta;
    v[j] += delta;
    resorted(v)
}

/// One random reverse transfer (poor to rich); the result majorizes `p`.
pub fn reverse_robin_hood<R: Rng + ?Sized>(p: &ProbVec, rng: &mut R) -> ProbVec {
    let d = p.dim();
    if d < 2 {
        return p.clone();
    }
    let i = rng.random_range(0..d - 1);
    let j = rng.random_range(i + 1..d);
    let delta = rng.random::<f64>() * p[j];
    let mut v = p.as_slice().to_vec();
    v[i] += delta;
    v[j] -= delta;
    resorted(v)
}

/// `steps` Robin Hood transfers: a random vector majorized by `p`.
pub fn descendant<R: Rng + ?Sized>(p: &ProbVec, steps: usize, rng: &mut R) -> ProbVec {
    (0..steps).fold(p.clone(), |acc, _| robin_hood(&acc, rng))
}

/// `steps` reverse transfers: a random vector majorizing `p`.
pub fn ancestor<R: Rng + ?Sized>(p: &ProbVec, steps: usize, rng: &mut R) -> ProbVec {
    (0..steps).fold(p.clone(), |acc, _| reverse_robin_hood(&acc, rng))
}

/// Inputs for the Hadamard-product majorization property: `x ≺ y` and a
/// non-increasing positive `a` with `a · x = a · y = 1`.
#[derive(Debug, Clone)]
pub struct HadamardInstance {
    pub x: ProbVec,
    pub y: ProbVec,
    pub a: Vec<f64>,
}

/// Draw a [`HadamardInstance`] of dimension `d`.
///
/// `a · (y - x) = sum_k (a_k - a_{k+1}) (s^y_k - s^x_k)` vanishes for
/// non-increasing `a` only if `a` steps down where the partial sums of `x`
/// and `y` agree. So `y` is split into random blocks, `x` is obtained by
/// transfers inside blocks, and `a` is block-constant.
pub fn hadamard_instance<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HadamardInstance {
    let y = random_probvec(d, rng);
    let mut cuts = vec![0];
    cuts.extend((1..d).filter(|_| rng.random_bool(0.4)));
    cuts.push(d);

    let mut x = y.as_slice().to_vec();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 2 {
            continue;
        }
        for _ in 0..4 {
            let i = rng.random_range(lo..hi - 1);
            let j = rng.random_range(i + 1..hi);
            let delta = rng.random::<f64>() * (x[i] - x[j]).max(0.0) / 2.0;
            x[i] -= delta;
            x[j] += delta;
            x[lo..hi].sort_by(|a, b| b.total_cmp(a));
        }
    }

    let blocks = cuts.len() - 1;
    let mut levels: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.05..2.0)).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    let mut a = vec![0.0; d];
    for (w, level) in cuts.windows(2).zip(&levels) {
        a[w[0]..w[1]].fill(*level);
    }
    let ax: f64 = a.iter().zip(&x).map(|(a, x)| a * x).sum();
    a.iter_mut().for_each(|v| *v /= ax);

    HadamardInstance { x: ProbVec::new(x).expect("transfers preserve normalization"), y, a }
}
