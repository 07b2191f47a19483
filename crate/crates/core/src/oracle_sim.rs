//! Dense bipartite state-vector simulator.
//!
//! States are stored as `d x d` amplitude matrices `A` with `A[(i, j)]` the
//! coefficient of `|i>_A |j>_B`. A local operator `K` on Alice's side acts
//! as `(K ⊗ I)|s> ↔ K · A`, and Schmidt coefficients are the squared
//! singular values of `A`. None of this goes through the spectrum-level
//! formulas in [`crate::protocols`], which makes the simulator usable as a
//! cross-check for them.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{ConversionPlan, KrausDiagonals, PlanStep};
use crate::schmidt::ProbVec;
use crate::tolerance::epsilon;

/// Name of the generator used by [`run_plan`].
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

/// Shots per independently seeded stream in [`run_plan`].
pub const SHOTS_PER_STREAM: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    amps: DMatrix<f64>,
}

impl BipartiteState {
    /// Wrap a square amplitude matrix of unit Frobenius norm.
    pub fn from_matrix(amps: DMatrix<f64>) -> Result<Self> {
        if !amps.is_square() {
            return Err(Error::DimensionMismatch { expected: amps.nrows(), got: amps.ncols() });
        }
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > epsilon() {
            return Err(Error::NotNormalized { sum: norm });
        }
        Ok(BipartiteState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn amplitudes(&self) -> &DMatrix<f64> {
        &self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Squared singular values, sorted.
    pub fn schmidt_spectrum(&self) -> Result<ProbVec> {
        let sv = self.amps.singular_values();
        ProbVec::new(sv.iter().map(|s| s * s).collect())
    }

    /// `(diag(k) ⊗ I)|s>` without renormalization.
    fn apply_local_diagonal(&self, k: &[f64]) -> DMatrix<f64> {
        let op = DMatrix::from_diagonal(&DVector::from_column_slice(k));
        &op * &self.amps
    }
}

/// Schmidt form `sum_i sqrt(p_i) |i>|i>`.
pub fn embed(p: &ProbVec) -> BipartiteState {
    let diag = DVector::from_iterator(p.dim(), p.iter().map(|x| x.sqrt()));
    BipartiteState { amps: DMatrix::from_diagonal(&diag) }
}

pub fn schmidt_spectrum(s: &BipartiteState) -> Result<ProbVec> {
    s.schmidt_spectrum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
}

/// Both branches of a two-outcome measurement, computed exactly.
#[derive(Debug, Clone)]
pub struct PreparedMeasurement {
    /// `[P(success), P(failure)]`.
    pub probabilities: [f64; 2],
    success: Option<BipartiteState>,
    failure: Option<BipartiteState>,
}

impl PreparedMeasurement {
    pub fn new(state: &BipartiteState, kraus: &KrausDiagonals) -> Result<Self> {
        kraus.check()?;
        if kraus.dim() != state.dim() {
            return Err(Error::DimensionMismatch { expected: state.dim(), got: kraus.dim() });
        }
        let eps = epsilon();
        let branch = |k: &[f64]| {
            let amps = state.apply_local_diagonal(k);
            let prob = amps.norm_squared();
            let post = (prob > eps).then(|| BipartiteState { amps: amps / prob.sqrt() });
            (prob, post)
        };
        let (ps, success) = branch(&kraus.m);
        let (pf, failure) = branch(&kraus.n);
        Ok(PreparedMeasurement { probabilities: [ps, pf], success, failure })
    }

    /// Post-measurement state of `outcome`.
    pub fn post(&self, outcome: Outcome) -> Result<&BipartiteState> {
        match outcome {
            Outcome::Success => self.success.as_ref().ok_or(Error::DegenerateBranch { branch: "success" }),
            Outcome::Failure => self.failure.as_ref().ok_or(Error::DegenerateBranch { branch: "failure" }),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        let total = self.probabilities[0] + self.probabilities[1];
        let u: f64 = rng.random::<f64>() * total;
        if u < self.probabilities[0] {
            Outcome::Success
        } else {
            Outcome::Failure
        }
    }
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: Outcome,
    pub post: BipartiteState,
    /// Exact `[P(success), P(failure)]`.
    pub probabilities: [f64; 2],
}

/// Sample one outcome of the measurement `kraus` on Alice's side.
pub fn measure<R: Rng + ?Sized>(
    state: &BipartiteState,
    kraus: &KrausDiagonals,
    rng: &mut R,
) -> Result<Measurement> {
    let prepared = PreparedMeasurement::new(state, kraus)?;
    let outcome = prepared.sample(rng);
    let post = prepared.post(outcome)?.clone();
    Ok(Measurement { outcome, post, probabilities: prepared.probabilities })
}

/// [`measure`] with a generator seeded from `seed`.
pub fn measure_seeded(state: &BipartiteState, kraus: &KrausDiagonals, seed: u64) -> Result<Measurement> {
    measure(state, kraus, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Monte Carlo tallies of a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStats {
    pub rng: String,
    pub seed: u64,
    pub shots: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub expected_success_prob: f64,
    /// `4 * sqrt(p (1 - p) / shots)` around the expected probability.
    pub half_width: f64,
    pub within_bound: bool,
    /// Mean Schmidt spectrum over failed shots, if any failed.
    pub residual_mean: Option<Vec<f64>>,
}

enum Stage {
    Replace,
    Measure {
        prepared: PreparedMeasurement,
        failure_spectrum: Option<Vec<f64>>,
    },
}

fn prepare_stages(plan: &ConversionPlan) -> Result<Vec<Stage>> {
    let mut current = embed(&plan.source.spectrum);
    let mut stages = Vec::with_capacity(plan.steps.len());
    for step in &plan.steps {
        match step {
            PlanStep::Deterministic { to, .. } => {
                current = embed(&to.spectrum);
                stages.push(Stage::Replace);
            }
            PlanStep::Probabilistic { kraus, .. } => {
                let d = kraus.dim().max(current.dim());
                let state = embed(&schmidt_spectrum(&current)?.padded(d));
                let prepared = PreparedMeasurement::new(&state, kraus)?;
                let failure_spectrum = match prepared.post(Outcome::Failure) {
                    Ok(post) => Some(post.schmidt_spectrum()?.into_vec()),
                    Err(_) => None,
                };
                current = prepared.post(Outcome::Success)?.clone();
                stages.push(Stage::Measure { prepared, failure_spectrum });
            }
        }
    }
    Ok(stages)
}

#[derive(Default)]
struct Tally {
    successes: u64,
    failures: u64,
    residual_sum: Vec<f64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.successes += other.successes;
        self.failures += other.failures;
        if self.residual_sum.len() < other.residual_sum.len() {
            self.residual_sum.resize(other.residual_sum.len(), 0.0);
        }
        for (a, b) in self.residual_sum.iter_mut().zip(&other.residual_sum) {
            *a += b;
        }
        self
    }
}

fn run_stream(stages: &[Stage], shots: u64, seed: u64, stream: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut tally = Tally::default();
    for _ in 0..shots {
        let mut failed = None;
        for stage in stages {
            if let Stage::Measure { prepared, failure_spectrum, .. } = stage {
                if prepared.sample(&mut rng) == Outcome::Failure {
                    failed = Some(failure_spectrum);
                    break;
                }
            }
        }
        match failed {
            None => tally.successes += 1,
            Some(spectrum) => {
                tally.failures += 1;
                if let Some(s) = spectrum {
                    if tally.residual_sum.len() < s.len() {
                        tally.residual_sum.resize(s.len(), 0.0);
                    }
                    for (a, b) in tally.residual_sum.iter_mut().zip(s) {
                        *a += b;
                    }
                }
            }
        }
    }
    tally
}

/// Sample `shots` executions of `plan`.
///
/// Deterministic steps replace the spectrum directly; measurement steps are
/// sampled from the exact branch probabilities of the dense state. Shots are
/// split into streams of [`SHOTS_PER_STREAM`] drawn from `ChaCha8Rng` seeded
/// with `seed` on stream index `0, 1, ...`; the result is independent of the
/// number of worker threads.
pub fn run_plan(plan: &ConversionPlan, shots: u64, seed: u64) -> Result<OutcomeStats> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let stages = prepare_stages(plan)?;
    let streams = shots.div_ceil(SHOTS_PER_STREAM);
    let tally = (0..streams)
        .into_par_iter()
        .map(|i| {
            let n = SHOTS_PER_STREAM.min(shots - i * SHOTS_PER_STREAM);
            run_stream(&stages, n, seed, i)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge);

    let p = plan.success_prob;
    let rate = tally.successes as f64 / shots as f64;
    let half_width = 4.0 * (p * (1.0 - p) / shots as f64).sqrt();
    let residual_mean = (tally.failures > 0).then(|| {
        tally.residual_sum.iter().map(|x| x / tally.failures as f64).collect()
    });
    Ok(OutcomeStats {
        rng: RNG_ALGORITHM.to_string(),
        seed,
        shots,
        successes: tally.successes,
        success_rate: rate,
        expected_success_prob: p,
        half_width,
        within_bound: (rate - p).abs() <= half_width,
        residual_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::ratio_ladder;
    use crate::protocols::{kraus_diagonals, plan_thrifty, plan_vidal, NamedState};
    use crate::schmidt::canonicalize;

    fn pv(v: &[f64]) -> ProbVec {
        canonicalize(v).unwrap()
    }

    fn worked_kraus() -> KrausDiagonals {
        kraus_diagonals(&ratio_ladder(&pv(&[0.5, 0.4, 0.1]), &pv(&[0.6, 0.2, 0.2])).unwrap())
    }

    #[test]
    fn embed_examples() {
        assert_eq!(embed(&pv(&[1.0])).amplitudes(), &DMatrix::from_element(1, 1, 1.0));
        let bell = embed(&pv(&[0.5, 0.5]));
        let h = 0.5f64.sqrt();
        assert_eq!(bell.amplitudes(), &DMatrix::from_row_slice(2, 2, &[h, 0.0, 0.0, h]));
        let p = pv(&[0.6, 0.2, 0.2]);
        let s = embed(&p);
        for i in 0..3 {
            assert!((s.amplitudes()[(i, i)].powi(2) - p[i]).abs() < 1e-15);
        }
        assert!((s.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_of_product_state() {
        // |+>|+> is a product state: rank-one amplitude matrix.
        let s = BipartiteState::from_matrix(DMatrix::from_element(2, 2, 0.5)).unwrap();
        let spec = s.schmidt_spectrum().unwrap();
        assert!((spec[0] - 1.0).abs() < 1e-12 && spec[1].abs() < 1e-12);
    }

    #[test]
    fn from_matrix_checks_norm() {
        assert!(BipartiteState::from_matrix(DMatrix::from_element(2, 2, 1.0)).is_err());
        assert!(BipartiteState::from_matrix(DMatrix::from_element(2, 3, 0.0)).is_err());
    }

    #[test]
    fn worked_measurement_branches() {
        let chi = embed(&pv(&[0.675, 0.225, 0.1]));
        let prepared = PreparedMeasurement::new(&chi, &worked_kraus()).unwrap();
        assert!((prepared.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((prepared.probabilities[1] - 0.5).abs() < 1e-12);
        let succ = prepared.post(Outcome::Success).unwrap().schmidt_spectrum().unwrap();
        let fail = prepared.post(Outcome::Failure).unwrap().schmidt_spectrum().unwrap();
        for (a, b) in succ.iter().zip([0.6, 0.2, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in fail.iter().zip([0.75, 0.25, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_measurement_always_succeeds() {
        let s = embed(&pv(&[0.5, 0.3, 0.2]));
        let m = measure_seeded(&s, &KrausDiagonals::identity(3), 7).unwrap();
        assert_eq!(m.outcome, Outcome::Success);
        assert_eq!(m.probabilities, [1.0, 0.0]);
        let prepared = PreparedMeasurement::new(&s, &KrausDiagonals::identity(3)).unwrap();
        assert!(matches!(prepared.post(Outcome::Failure), Err(Error::DegenerateBranch { .. })));
    }

    #[test]
    fn measure_rejects_bad_kraus() {
        let s = embed(&pv(&[0.5, 0.5]));
        let k = KrausDiagonals { m: vec![1.0, 1.0], n: vec![0.5, 0.0] };
        assert!(matches!(measure_seeded(&s, &k, 0), Err(Error::IncompleteKraus { index: 0, .. })));
        assert!(measure_seeded(&s, &KrausDiagonals::identity(3), 0).is_err());
    }

    #[test]
    fn deterministic_plan_always_succeeds() {
        let plan = plan_vidal(
            &NamedState::new("a", pv(&[0.4, 0.3, 0.3])),
            &NamedState::new("b", pv(&[0.5, 0.4, 0.1])),
        )
        .unwrap();
        let stats = run_plan(&plan, 1000, 1).unwrap();
        assert_eq!(stats.successes, 1000);
        assert_eq!(stats.success_rate, 1.0);
        assert!(stats.residual_mean.is_none());
    }

    #[test]
    fn single_shot_and_seed_determinism() {
        let plan = plan_thrifty(
            &NamedState::new("psi", pv(&[0.5, 0.4, 0.1])),
            &NamedState::new("phi", pv(&[0.6, 0.2, 0.2])),
        )
        .unwrap();
        let one = run_plan(&plan, 1, 3).unwrap();
        assert!(one.successes <= 1);
        let a = run_plan(&plan, 40_000, 11).unwrap();
        let b = run_plan(&plan, 40_000, 11).unwrap();
        assert_eq!(a, b);
        assert!(run_plan(&plan, 0, 0).is_err());
    }
}
