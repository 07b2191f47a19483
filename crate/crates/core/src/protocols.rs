//! Conversion protocols as executable plans.
//!
//! Three single-target protocols share one probabilistic phase (a
//! deterministic move to an intermediate state followed by a diagonal
//! two-outcome measurement):
//!
//! * `vidal`: `psi -> chi ~> phi`
//! * `greedy`: `psi -> join(psi, phi) -> chi ~> phi`
//! * `thrifty`: `psi -> zeta ~> meet(psi, phi) -> phi`
//!
//! where `->` is a deterministic step and `~>` the measurement. Greedy and
//! thrifty only differ from vidal when the endpoints are incomparable; on
//! comparable input they return the vidal plan.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{intermediate_from_ladder, p_max, r_vector, ratio_ladder, RatioLadder};
use crate::lattice::{join, join_many, meet, meet_many};
use crate::schmidt::{compare, MajOrder, ProbVec};
use crate::tolerance::epsilon;

/// Diagonals of the two Kraus operators of the measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausDiagonals {
    pub m: Vec<f64>,
    pub n: Vec<f64>,
}

impl KrausDiagonals {
    pub fn identity(d: usize) -> Self {
        KrausDiagonals { m: vec![1.0; d], n: vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Largest `|m_i^2 + n_i^2 - 1|`.
    pub fn completeness_error(&self) -> f64 {
        self.m
            .iter()
            .zip(&self.n)
            .map(|(m, n)| (m * m + n * n - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check(&self) -> Result<()> {
        if self.m.len() != self.n.len() {
            return Err(Error::DimensionMismatch { expected: self.m.len(), got: self.n.len() });
        }
        let eps = epsilon();
        for (index, (m, n)) in self.m.iter().zip(&self.n).enumerate() {
            let value = m * m + n * n;
            if *m < 0.0 || *n < 0.0 || (value - 1.0).abs() > eps {
                return Err(Error::IncompleteKraus { index, value });
            }
        }
        Ok(())
    }
}

/// `m_i = sqrt(r_1 / (r)_i)`, `n_i = sqrt(1 - m_i^2)`.
pub fn kraus_diagonals(ladder: &RatioLadder) -> KrausDiagonals {
    let r = r_vector(ladder);
    let r1 = ladder.r1();
    let (m, n) = r
        .values()
        .iter()
        .map(|&ri| {
            // (ri - r1) is exact when ri is close to r1
            ((r1 / ri).sqrt(), ((ri - r1).max(0.0) / ri).sqrt())
        })
        .unzip();
    KrausDiagonals { m, n }
}

/// Spectra and probability of both outcomes of a diagonal measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcome {
    pub success_prob: f64,
    pub success: ProbVec,
    /// `None` when the failure branch has probability below `ε`.
    pub failure: Option<ProbVec>,
}

impl TwoOutcome {
    pub fn failure(&self) -> Result<&ProbVec> {
        self.failure.as_ref().ok_or(Error::DegenerateBranch { branch: "failure" })
    }
}

fn normalized_branch(weights: Vec<f64>, total: f64) -> Result<ProbVec> {
    ProbVec::from_computed(weights.into_iter().map(|w| w / total).collect())
}

/// Born-rule outcome of measuring `kraus` on the state with spectrum `state`.
/// Post-measurement spectra are returned in canonical (sorted) order.
pub fn apply_two_outcome(state: &ProbVec, kraus: &KrausDiagonals) -> Result<TwoOutcome> {
    let d = kraus.dim();
    if state.dim() > d || kraus.n.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: state.dim() });
    }
    let lambda = state.padded(d);
    let ws: Vec<f64> = lambda.iter().zip(&kraus.m).map(|(l, m)| m * m * l).collect();
    let wf: Vec<f64> = lambda.iter().zip(&kraus.n).map(|(l, n)| n * n * l).collect();
    let p: f64 = ws.iter().sum();
    let q: f64 = wf.iter().sum();
    let eps = epsilon();
    if p <= eps {
        return Err(Error::DegenerateBranch { branch: "success" });
    }
    let success = normalized_branch(ws, p)?;
    let failure = if q > eps { Some(normalized_branch(wf, q)?) } else { None };
    Ok(TwoOutcome { success_prob: p, success, failure })
}

/// A spectrum with a display label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedState {
    pub name: String,
    pub spectrum: ProbVec,
}

impl NamedState {
    pub fn new(name: impl Into<String>, spectrum: ProbVec) -> Self {
        NamedState { name: name.into(), spectrum }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanStep {
    Deterministic {
        from: NamedState,
        to: NamedState,
    },
    Probabilistic {
        from: NamedState,
        to: NamedState,
        kraus: KrausDiagonals,
        success_prob: f64,
        failure: NamedState,
    },
}

impl PlanStep {
    pub fn from(&self) -> &NamedState {
        match self {
            PlanStep::Deterministic { from, .. } | PlanStep::Probabilistic { from, .. } => from,
        }
    }

    pub fn to(&self) -> &NamedState {
        match self {
            PlanStep::Deterministic { to, .. } | PlanStep::Probabilistic { to, .. } => to,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, PlanStep::Deterministic { .. })
    }

    /// Outcome probabilities and output spectra.
    pub fn outcomes(&self) -> Vec<(f64, &ProbVec)> {
        match self {
            PlanStep::Deterministic { to, .. } => vec![(1.0, &to.spectrum)],
            PlanStep::Probabilistic { to, success_prob, failure, .. } => vec![
                (*success_prob, &to.spectrum),
                (1.0 - success_prob, &failure.spectrum),
            ],
        }
    }

    /// Check the step on its own: Nielsen's condition for deterministic
    /// moves; completeness and Born-rule consistency for measurements.
    pub fn validate(&self) -> Result<()> {
        match self {
            PlanStep::Deterministic { from, to } => {
                if !compare(&from.spectrum, &to.spectrum).is_majorized() {
                    return Err(Error::InvalidPlan(format!(
                        "deterministic step {} -> {} violates majorization",
                        from.name, to.name
                    )));
                }
            }
            PlanStep::Probabilistic { from, to, kraus, success_prob, failure } => {
                kraus.check()?;
                if !(*success_prob > 0.0 && *success_prob <= 1.0) {
                    return Err(Error::InvalidPlan(format!(
                        "success probability {success_prob} outside (0, 1]"
                    )));
                }
                let out = apply_two_outcome(&from.spectrum, kraus)?;
                let eps = epsilon();
                if (out.success_prob - success_prob).abs() > eps {
                    return Err(Error::InvalidPlan(format!(
                        "measurement on {} succeeds with {} but plan states {}",
                        from.name, out.success_prob, success_prob
                    )));
                }
                if max_abs_diff(&out.success, &to.spectrum) > eps {
                    return Err(Error::InvalidPlan(format!(
                        "measurement on {} does not yield {}",
                        from.name, to.name
                    )));
                }
                if max_abs_diff(out.failure()?, &failure.spectrum) > eps {
                    return Err(Error::InvalidPlan(format!(
                        "failure branch of {} does not yield {}",
                        from.name, failure.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `min_l [E_l(in) - sum_o p_o E_l(out_o)]`: how far the step stays from
/// increasing any tail-sum monotone on average. Negative values beyond
/// round-off indicate an impossible step.
pub fn monotone_slack(step: &PlanStep) -> f64 {
    let input = &step.from().spectrum;
    let outcomes = step.outcomes();
    let d = outcomes.iter().map(|(_, s)| s.dim()).fold(input.dim(), usize::max);
    let e_in = crate::lattice::tail_sums(input, d);
    let mut e_out = vec![0.0; d + 1];
    for (p, spectrum) in outcomes {
        for (acc, e) in e_out.iter_mut().zip(crate::lattice::tail_sums(spectrum, d)) {
            *acc += p * e;
        }
    }
    e_in[..d]
        .iter()
        .zip(&e_out)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min)
}

/// Largest entrywise difference after zero padding.
pub fn max_abs_diff(a: &ProbVec, b: &ProbVec) -> f64 {
    let d = a.dim().max(b.dim());
    let (a, b) = (a.padded(d), b.padded(d));
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Vidal,
    Greedy,
    Thrifty,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Vidal => "vidal",
            Protocol::Greedy => "greedy",
            Protocol::Thrifty => "thrifty",
        })
    }
}

/// Ordered steps taking `source` to `target`, with at most one measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversionPlan {
    pub protocol: Protocol,
    pub source: NamedState,
    pub target: NamedState,
    /// Ladder of the measurement phase.
    pub ladder: RatioLadder,
    pub steps: Vec<PlanStep>,
    pub success_prob: f64,
    /// State left behind when the measurement fails.
    pub residual: Option<ProbVec>,
}

impl ConversionPlan {
    pub fn probabilistic_step(&self) -> Option<&PlanStep> {
        self.steps.iter().find(|s| !s.is_deterministic())
    }

    pub fn is_deterministic(&self) -> bool {
        self.probabilistic_step().is_none()
    }

    /// Re-check every plan invariant.
    pub fn validate(&self) -> Result<()> {
        let eps = epsilon();
        self.ladder.validate()?;
        let bad = |msg: String| Err(Error::InvalidPlan(msg));

        let mut cursor = &self.source;
        for step in &self.steps {
            if max_abs_diff(&step.from().spectrum, &cursor.spectrum) > eps {
                return bad(format!("step starts at {} but plan is at {}", step.from().name, cursor.name));
            }
            step.validate()?;
            cursor = step.to();
        }
        if max_abs_diff(&cursor.spectrum, &self.target.spectrum) > eps {
            return bad(format!("plan ends at {} instead of {}", cursor.name, self.target.name));
        }

        let product: f64 = self
            .steps
            .iter()
            .filter_map(|s| match s {
                PlanStep::Probabilistic { success_prob, .. } => Some(*success_prob),
                PlanStep::Deterministic { .. } => None,
            })
            .product();
        if (product - self.success_prob).abs() > eps {
            return bad(format!(
                "success probability {} differs from step product {product}",
                self.success_prob
            ));
        }
        let probabilistic = self.steps.iter().filter(|s| !s.is_deterministic()).count();
        if probabilistic > 1 {
            return bad(format!("{probabilistic} measurement steps"));
        }
        match (self.probabilistic_step(), &self.residual) {
            (Some(PlanStep::Probabilistic { failure, .. }), Some(residual)) => {
                if max_abs_diff(&failure.spectrum, residual) > eps {
                    return bad("residual differs from failure branch".into());
                }
            }
            (None, None) => {}
            _ => return bad("residual does not match the measurement step".into()),
        }
        Ok(())
    }
}

fn rank_check(source: &NamedState, target: &NamedState) -> Result<()> {
    p_max(&source.spectrum, &target.spectrum)
        .map(|_| ())
        .map_err(|e| match e {
            Error::RankDeficit { source_rank, target_rank, .. } => Error::RankDeficit {
                state: target.name.clone(),
                source_rank,
                target_rank,
            },
            other => other,
        })
}

struct Phase {
    ladder: RatioLadder,
    steps: Vec<PlanStep>,
    residual: Option<ProbVec>,
}

/// Optimal conversion `from -> to`: a deterministic move to the intermediate
/// state, then the measurement; a single deterministic step when `from` is
/// already majorized by `to`.
fn optimal_phase(from: &NamedState, to: &NamedState, inter: &str, residual: &str) -> Result<Phase> {
    rank_check(from, to)?;
    let ladder = ratio_ladder(&from.spectrum, &to.spectrum)?;
    match compare(&from.spectrum, &to.spectrum) {
        MajOrder::Equivalent => {
            return Ok(Phase { ladder, steps: vec![], residual: None });
        }
        MajOrder::Precedes => {
            let steps = vec![PlanStep::Deterministic { from: from.clone(), to: to.clone() }];
            return Ok(Phase { ladder, steps, residual: None });
        }
        MajOrder::Succeeds | MajOrder::Incomparable => {}
    }
    let mid = NamedState::new(inter, intermediate_from_ladder(&ladder, &to.spectrum)?);
    let kraus = kraus_diagonals(&ladder);
    let outcome = apply_two_outcome(&mid.spectrum, &kraus)?;
    let failure = NamedState::new(residual, outcome.failure()?.clone());
    let steps = vec![
        PlanStep::Deterministic { from: from.clone(), to: mid.clone() },
        PlanStep::Probabilistic {
            from: mid,
            to: to.clone(),
            kraus,
            success_prob: ladder.r1(),
            failure: failure.clone(),
        },
    ];
    Ok(Phase { ladder, steps, residual: Some(failure.spectrum) })
}

fn assemble(
    protocol: Protocol,
    source: &NamedState,
    target: &NamedState,
    phase: Phase,
    before: Option<PlanStep>,
    after: Option<PlanStep>,
) -> ConversionPlan {
    let steps: Vec<PlanStep> = before.into_iter().chain(phase.steps).chain(after).collect();
    let success_prob = if phase.residual.is_some() { phase.ladder.r1() } else { 1.0 };
    ConversionPlan {
        protocol,
        source: source.clone(),
        target: target.clone(),
        ladder: phase.ladder,
        steps,
        success_prob,
        residual: phase.residual,
    }
}

/// Vidal's optimal protocol.
pub fn plan_vidal(source: &NamedState, target: &NamedState) -> Result<ConversionPlan> {
    let phase = optimal_phase(source, target, "chi", "xi")?;
    Ok(assemble(Protocol::Vidal, source, target, phase, None, None))
}

fn incomparable(source: &NamedState, target: &NamedState) -> Result<bool> {
    rank_check(source, target)?;
    Ok(compare(&source.spectrum, &target.spectrum) == MajOrder::Incomparable)
}

/// Deterministic move to the join, then the optimal conversion to the target.
pub fn plan_greedy(source: &NamedState, target: &NamedState) -> Result<ConversionPlan> {
    if !incomparable(source, target)? {
        return plan_vidal(source, target);
    }
    let ocp = NamedState::new(
        format!("join({},{})", source.name, target.name),
        join(&source.spectrum, &target.spectrum),
    );
    let phase = optimal_phase(&ocp, target, "chi", "xi")?;
    let head = PlanStep::Deterministic { from: source.clone(), to: ocp };
    Ok(assemble(Protocol::Greedy, source, target, phase, Some(head), None))
}

/// Optimal conversion to the meet, then a deterministic move to the target.
pub fn plan_thrifty(source: &NamedState, target: &NamedState) -> Result<ConversionPlan> {
    if !incomparable(source, target)? {
        return plan_vidal(source, target);
    }
    let ocr = NamedState::new(
        format!("meet({},{})", source.name, target.name),
        meet(&source.spectrum, &target.spectrum),
    );
    let phase = optimal_phase(source, &ocr, "zeta", "nu")?;
    let tail = PlanStep::Deterministic { from: ocr, to: target.clone() };
    Ok(assemble(Protocol::Thrifty, source, target, phase, None, Some(tail)))
}

/// Probabilistic move to the meet of the source and every candidate target,
/// with one deterministic tail per target to run once the target is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTargetPlan {
    pub source: NamedState,
    pub ocr: NamedState,
    pub head: ConversionPlan,
    pub tails: Vec<PlanStep>,
    pub success_prob: f64,
    /// `p_max(source, target_j)` for each target, in input order.
    pub per_target_prob: Vec<f64>,
}

impl MultiTargetPlan {
    pub fn validate(&self) -> Result<()> {
        self.head.validate()?;
        for tail in &self.tails {
            if !tail.is_deterministic() || max_abs_diff(&tail.from().spectrum, &self.ocr.spectrum) > epsilon() {
                return Err(Error::InvalidPlan(format!("tail to {} does not start at the meet", tail.to().name)));
            }
            tail.validate()?;
        }
        Ok(())
    }
}

pub fn plan_multi_target(source: &NamedState, targets: &[NamedState]) -> Result<MultiTargetPlan> {
    if targets.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let per_target_prob = targets
        .iter()
        .map(|t| {
            rank_check(source, t)?;
            p_max(&source.spectrum, &t.spectrum)
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<ProbVec> = std::iter::once(&source.spectrum)
        .chain(targets.iter().map(|t| &t.spectrum))
        .cloned()
        .collect();
    let ocr = NamedState::new("ocr", meet_many(&all)?);
    let phase = optimal_phase(source, &ocr, "zeta", "nu")?;
    let head = assemble(Protocol::Thrifty, source, &ocr, phase, None, None);
    let tails = targets
        .iter()
        .map(|t| PlanStep::Deterministic { from: ocr.clone(), to: t.clone() })
        .collect();
    Ok(MultiTargetPlan {
        source: source.clone(),
        success_prob: head.success_prob,
        ocr,
        head,
        tails,
        per_target_prob,
    })
}

/// Deterministic moves from every candidate source into their common join
/// with the target, followed by one optimal conversion to the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSourcePlan {
    pub target: NamedState,
    pub ocp: NamedState,
    pub heads: Vec<PlanStep>,
    pub tail: ConversionPlan,
    pub success_prob: f64,
    /// `p_max(source_j, target)` for each source, in input order.
    pub per_source_prob: Vec<f64>,
}

impl MultiSourcePlan {
    pub fn validate(&self) -> Result<()> {
        for head in &self.heads {
            if !head.is_deterministic() || max_abs_diff(&head.to().spectrum, &self.ocp.spectrum) > epsilon() {
                return Err(Error::InvalidPlan(format!("head from {} does not end at the join", head.from().name)));
            }
            head.validate()?;
        }
        self.tail.validate()
    }
}

pub fn plan_multi_source(sources: &[NamedState], target: &NamedState) -> Result<MultiSourcePlan> {
    if sources.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let per_source_prob = sources
        .iter()
        .map(|s| {
            rank_check(s, target)?;
            p_max(&s.spectrum, &target.spectrum)
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<ProbVec> = sources
        .iter()
        .map(|s| &s.spectrum)
        .chain(std::iter::once(&target.spectrum))
        .cloned()
        .collect();
    let ocp = NamedState::new("ocp", join_many(&all)?);
    let heads = sources
        .iter()
        .map(|s| PlanStep::Deterministic { from: s.clone(), to: ocp.clone() })
        .collect();
    let phase = optimal_phase(&ocp, target, "chi", "xi")?;
    let tail = assemble(Protocol::Greedy, &ocp, target, phase, None, None);
    Ok(MultiSourcePlan {
        target: target.clone(),
        success_prob: tail.success_prob,
        ocp,
        heads,
        tail,
        per_source_prob,
    })
}
