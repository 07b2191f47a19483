//! Randomized property sweeps.
//!
//! Each instance `i` and property draws from its own `ChaCha8Rng` stream, so
//! a report depends only on `(dim, count, seed, properties)` and not on how
//! rayon schedules the work.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{hadamard, monotones, p_max, r_vector, ratio_ladder};
use crate::lattice::{join, join_many, meet, meet_many, CumSum};
use crate::oracle_sim::{embed, Outcome, PreparedMeasurement};
use crate::protocols::{
    apply_two_outcome, kraus_diagonals, max_abs_diff, monotone_slack, plan_greedy, plan_thrifty,
    plan_vidal, ConversionPlan, NamedState,
};
use crate::sampling::{ancestor, descendant, hadamard_instance, random_incomparable_pair, random_probvec};
use crate::schmidt::{majorization_margin, ProbVec};
use crate::tolerance::epsilon;

/// Tolerance for identities that hold exactly in real arithmetic.
pub const EQUALITY_TOL: f64 = 1e-12;
/// Tolerance for agreement between the simulator and the analytic formulas.
pub const ORACLE_TOL: f64 = 1e-9;
/// Distribution of the generated vectors.
pub const DISTRIBUTION: &str = "uniform on the simplex (normalized Exp(1)), sorted";

const PAIR_TRIES: usize = 200;
const MAX_ECHOED_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Meet/join bounds, witnesses, idempotence, absorption, fold order.
    Lattice,
    /// `p_max = 1` exactly when the source is majorized by the target.
    Nielsen,
    /// Monotones of the meet are the pointwise maximum.
    Lemma1,
    /// Hadamard products by non-increasing weights preserve majorization.
    Lemma2,
    /// Converting to the meet is as likely as converting to the target.
    Thm1,
    /// The thrifty residual and intermediate are majorized by the greedy ones.
    Thm2,
    /// Multi-target meet and multi-source join keep the worst-case probability.
    Thm3,
    /// Kraus completeness and block structure.
    Kraus,
    /// Dense simulator agrees with the spectrum-level measurement.
    Oracle,
    /// Plan validity, optimality agreement, rank drop, monotone soundness.
    Plans,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Lattice,
        Property::Nielsen,
        Property::Lemma1,
        Property::Lemma2,
        Property::Thm1,
        Property::Thm2,
        Property::Thm3,
        Property::Kraus,
        Property::Oracle,
        Property::Plans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Lattice => "lattice",
            Property::Nielsen => "nielsen",
            Property::Lemma1 => "lemma1",
            Property::Lemma2 => "lemma2",
            Property::Thm1 => "thm1",
            Property::Thm2 => "thm2",
            Property::Thm3 => "thm3",
            Property::Kraus => "kraus",
            Property::Oracle => "oracle",
            Property::Plans => "plans",
        }
    }

    fn index(self) -> u64 {
        Property::ALL.iter().position(|p| *p == self).unwrap() as u64
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown property `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub properties: Vec<Property>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance: usize,
    pub vectors: Vec<ProbVec>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    /// Instances the property applied to; always `passed + failed`.
    pub applicable: usize,
    pub not_applicable: usize,
    pub passed: usize,
    pub failed: usize,
    /// Most negative majorization margin seen (`None` if none was measured).
    pub worst_slack: Option<f64>,
    /// Largest deviation in an equality check (`None` if none was measured).
    pub max_deviation: Option<f64>,
    pub failures: Vec<FailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub distribution: String,
    pub rng: String,
    pub properties: Vec<PropertyReport>,
}

impl SweepReport {
    pub fn total_failures(&self) -> usize {
        self.properties.iter().map(|p| p.failed).sum()
    }
}

/// Result of one property on one instance.
#[derive(Debug, Clone)]
pub struct Check {
    pub applicable: bool,
    pub slack: f64,
    pub deviation: f64,
    pub failures: Vec<String>,
    pub vectors: Vec<ProbVec>,
}

impl Check {
    fn new() -> Self {
        Check {
            applicable: true,
            slack: f64::INFINITY,
            deviation: 0.0,
            failures: vec![],
            vectors: vec![],
        }
    }

    fn not_applicable() -> Self {
        Check { applicable: false, ..Check::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn with(mut self, vectors: &[&ProbVec]) -> Self {
        self.vectors = vectors.iter().map(|v| (*v).clone()).collect();
        self
    }

    /// Record `a ≺ b`.
    fn majorized(&mut self, label: &str, a: &ProbVec, b: &ProbVec) {
        let m = majorization_margin(a, b);
        self.slack = self.slack.min(m);
        if m < -epsilon() {
            self.failures.push(format!("{label}: margin {m:e}"));
        }
    }

    fn equal(&mut self, label: &str, deviation: f64, tol: f64) {
        self.deviation = self.deviation.max(deviation);
        if deviation.is_nan() || deviation > tol {
            self.failures.push(format!("{label}: deviation {deviation:e} > {tol:e}"));
        }
    }

    fn holds(&mut self, label: &str, ok: bool) {
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    fn result<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }
}

fn stream_rng(seed: u64, instance: usize, property: Property) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64 * 16 + property.index());
    rng
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Shift `delta` of mass from index `k` to `k - 1` (raises `s_k`).
fn shift_up(p: &ProbVec, k: usize, delta: f64) -> Option<ProbVec> {
    let mut v = p.as_slice().to_vec();
    v[k - 1] += delta;
    v[k] -= delta;
    ProbVec::new(v).ok()
}

fn check_lattice<R: Rng>(d: usize, rng: &mut R) -> Check {
    let p = random_probvec(d, rng);
    let q = random_probvec(d, rng);
    let r = random_probvec(d, rng);
    let s = random_probvec(d, rng);
    let mut ck = Check::new().with(&[&p, &q, &r, &s]);
    let eps = epsilon();
    let m = meet(&p, &q);
    let j = join(&p, &q);

    ck.majorized("meet ≺ p", &m, &p);
    ck.majorized("meet ≺ q", &m, &q);
    ck.majorized("p ≺ join", &p, &j);
    ck.majorized("q ≺ join", &q, &j);

    // any common lower bound lies below the meet
    let below = descendant(&p, 2, rng);
    if majorization_margin(&below, &q) >= -eps {
        ck.majorized("lower witness ≺ meet", &below, &m);
    }
    if majorization_margin(&r, &p) >= -eps && majorization_margin(&r, &q) >= -eps {
        ck.majorized("random lower bound ≺ meet", &r, &m);
    }
    // any common upper bound lies above the join
    let above = ancestor(&p, 2, rng);
    if majorization_margin(&q, &above) >= -eps {
        ck.majorized("join ≺ upper witness", &j, &above);
    }
    if majorization_margin(&p, &r) >= -eps && majorization_margin(&q, &r) >= -eps {
        ck.majorized("join ≺ random upper bound", &j, &r);
    }

    // raising any partial sum of the meet breaks one of the two bounds
    for k in 1..d {
        let room = m[k] - m.as_slice().get(k + 1).copied().unwrap_or(0.0);
        let delta = room.min(m[k]) / 2.0;
        if delta > 100.0 * eps {
            if let Some(up) = shift_up(&m, k, delta) {
                let still_below = majorization_margin(&up, &p) >= -eps
                    && majorization_margin(&up, &q) >= -eps;
                ck.holds("meet is not the greatest lower bound", !still_below);
            }
        }
    }
    // lowering the join where it touches max(s^p, s^q) breaks an upper bound
    let (sj, sp, sq) = (j.cumulative(), p.cumulative(), q.cumulative());
    for k in 1..d {
        let touches = (sj[k] - sp[k].max(sq[k])).abs() <= eps;
        let room = (j[k - 1] - j[k]) / 2.0;
        if touches && room > 100.0 * eps {
            if let Some(down) = shift_up(&j, k, -room) {
                let still_above = majorization_margin(&p, &down) >= -eps
                    && majorization_margin(&q, &down) >= -eps;
                ck.holds("join is not the least upper bound", !still_above);
            }
        }
    }

    ck.equal("meet idempotent", max_abs_diff(&meet(&p, &p), &p), eps);
    ck.equal("join idempotent", max_abs_diff(&join(&p, &p), &p), eps);
    ck.equal("meet absorbs join", max_abs_diff(&meet(&p, &j), &p), eps);
    ck.equal("join absorbs meet", max_abs_diff(&join(&p, &m), &p), eps);

    let cm = CumSum::of(&m);
    let mins: Vec<f64> = sp.iter().zip(&sq).map(|(a, b)| a.min(*b)).collect();
    ck.equal("cumsum(meet) = min", max_dev(cm.values(), &mins), eps);
    let cj = CumSum::of(&j);
    ck.holds("cumsum(join) concave", cj.is_concave(eps));
    ck.holds(
        "cumsum(join) >= max",
        cj.values().iter().zip(sp.iter().zip(&sq)).all(|(c, (a, b))| *c >= a.max(*b) - eps),
    );

    let list = vec![p.clone(), q.clone(), r.clone(), s.clone()];
    let mut shuffled = list.clone();
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.random_range(0..=i));
    }
    let reversed: Vec<ProbVec> = list.iter().rev().cloned().collect();
    let (m0, j0) = (meet_many(&list).unwrap(), join_many(&list).unwrap());
    for other in [&shuffled, &reversed] {
        ck.equal("meet fold order", max_abs_diff(&m0, &meet_many(other).unwrap()), eps);
        ck.equal("join fold order", max_abs_diff(&j0, &join_many(other).unwrap()), eps);
    }
    ck
}

fn check_nielsen<R: Rng>(d: usize, rng: &mut R) -> Check {
    let p = random_probvec(d, rng);
    let q = random_probvec(d, rng);
    let mut ck = Check::new().with(&[&p, &q]);
    let eps = epsilon();
    if let Some(pm) = ck.result("p_max", p_max(&p, &q)) {
        let majorized = majorization_margin(&p, &q) >= -eps;
        ck.holds("p_max = 1 iff majorized", (pm >= 1.0 - eps) == majorized);
        ck.holds("p_max in (0, 1]", pm > 0.0 && pm <= 1.0 + eps);
    }
    let lower = descendant(&q, 3, rng);
    if let Some(pm) = ck.result("p_max", p_max(&lower, &q)) {
        ck.equal("descendant converts deterministically", (1.0 - pm).abs(), eps);
    }
    ck
}

fn check_lemma1<R: Rng>(d: usize, rng: &mut R) -> Check {
    let p = random_probvec(d, rng);
    let q = random_probvec(d, rng);
    let r = random_probvec(d, rng);
    let mut ck = Check::new().with(&[&p, &q, &r]);
    let (ep, eq, er) = (monotones(&p), monotones(&q), monotones(&r));
    let pair_max: Vec<f64> = ep.values().iter().zip(eq.values()).map(|(a, b)| a.max(*b)).collect();
    ck.equal("E(meet) = max E", max_dev(monotones(&meet(&p, &q)).values(), &pair_max), EQUALITY_TOL);
    let triple_max: Vec<f64> = pair_max.iter().zip(er.values()).map(|(a, b)| a.max(*b)).collect();
    let m3 = meet_many(&[p.clone(), q.clone(), r.clone()]).unwrap();
    ck.equal("E(meet of three) = max E", max_dev(monotones(&m3).values(), &triple_max), EQUALITY_TOL);
    ck
}

fn check_lemma2<R: Rng>(d: usize, rng: &mut R) -> Check {
    let inst = hadamard_instance(d, rng);
    let mut ck = Check::new().with(&[&inst.x, &inst.y]);
    let ax = hadamard(&inst.a, inst.x.as_slice());
    let ay = hadamard(&inst.a, inst.y.as_slice());
    let (sx, sy): (f64, f64) = (ax.iter().sum(), ay.iter().sum());
    ck.equal("a·x = 1", (sx - 1.0).abs(), EQUALITY_TOL);
    ck.equal("a·y = 1", (sy - 1.0).abs(), EQUALITY_TOL);
    if let (Some(ax), Some(ay)) = (ck.result("a⊙x", ProbVec::new(ax)), ck.result("a⊙y", ProbVec::new(ay))) {
        ck.majorized("a⊙x ≺ a⊙y", &ax, &ay);
    }
    ck
}

fn check_thm1<R: Rng>(d: usize, rng: &mut R) -> Check {
    let Some((p, q)) = random_incomparable_pair(d, rng, PAIR_TRIES) else {
        return Check::not_applicable();
    };
    let mut ck = Check::new().with(&[&p, &q]);
    let m = meet(&p, &q);
    if let (Some(direct), Some(via_meet)) =
        (ck.result("ladder", ratio_ladder(&p, &q)), ck.result("ladder to meet", ratio_ladder(&p, &m)))
    {
        ck.equal("r1(p, meet) = r1(p, q)", (direct.r1() - via_meet.r1()).abs(), EQUALITY_TOL);
        ck.holds("l1 agrees", direct.rungs[0].l == via_meet.rungs[0].l);
    }
    ck
}

fn check_thm2<R: Rng>(d: usize, rng: &mut R) -> Check {
    let Some((p, q)) = random_incomparable_pair(d, rng, PAIR_TRIES) else {
        return Check::not_applicable();
    };
    let mut ck = Check::new().with(&[&p, &q]);
    let (src, tgt) = (NamedState::new("psi", p.clone()), NamedState::new("phi", q.clone()));
    let (Some(greedy), Some(thrifty)) =
        (ck.result("greedy", plan_greedy(&src, &tgt)), ck.result("thrifty", plan_thrifty(&src, &tgt)))
    else {
        return ck;
    };
    let (Some(xi), Some(nu)) = (greedy.residual.as_ref(), thrifty.residual.as_ref()) else {
        ck.holds("both plans have residuals", false);
        return ck;
    };
    ck.majorized("nu ≺ xi", nu, xi);
    let chi = &greedy.steps[1].to().spectrum;
    let zeta = &thrifty.steps[0].to().spectrum;
    ck.majorized("zeta ≺ chi", zeta, chi);

    // the ladder to the meet coincides with the ladder to the target
    let ls: Vec<usize> = greedy.ladder.rungs.iter().map(|r| r.l).collect();
    let lt: Vec<usize> = thrifty.ladder.rungs.iter().map(|r| r.l).collect();
    ck.holds("ladder indices agree", ls == lt);
    if ls == lt {
        let rs: Vec<f64> = greedy.ladder.rungs.iter().map(|r| r.ratio).collect();
        let rt: Vec<f64> = thrifty.ladder.rungs.iter().map(|r| r.ratio).collect();
        ck.equal("ladder ratios agree", max_dev(&rs, &rt), EQUALITY_TOL);
        let m = meet(&p, &q);
        let expected = hadamard(r_vector(&greedy.ladder).values(), m.as_slice());
        ck.equal("zeta = r ⊙ meet", max_dev(zeta.as_slice(), &expected), EQUALITY_TOL);
    }
    ck
}

fn check_thm3<R: Rng>(d: usize, rng: &mut R) -> Check {
    let count = rng.random_range(2..=4);
    let psi = random_probvec(d, rng);
    let targets: Vec<ProbVec> = (0..count).map(|_| random_probvec(d, rng)).collect();
    let sources: Vec<ProbVec> = (0..count).map(|_| random_probvec(d, rng)).collect();
    let phi = random_probvec(d, rng);
    let mut vectors: Vec<&ProbVec> = vec![&psi];
    vectors.extend(&targets);
    vectors.extend(&sources);
    vectors.push(&phi);
    let mut ck = Check::new().with(&vectors);

    let mut all = vec![psi.clone()];
    all.extend(targets.iter().cloned());
    let ocr = meet_many(&all).unwrap();
    let worst: Result<f64> = targets
        .iter()
        .map(|t| p_max(&psi, t))
        .try_fold(f64::INFINITY, |acc, p| p.map(|p| acc.min(p)));
    if let (Some(to_ocr), Some(worst)) = (ck.result("p_max to meet", p_max(&psi, &ocr)), ck.result("p_max", worst)) {
        ck.equal("p_max(psi, meet) = min_j p_max(psi, phi_j)", (to_ocr - worst).abs(), EQUALITY_TOL);
    }

    let mut all = sources.clone();
    all.push(phi.clone());
    let ocp = join_many(&all).unwrap();
    let worst: Result<f64> = sources
        .iter()
        .map(|s| p_max(s, &phi))
        .try_fold(f64::INFINITY, |acc, p| p.map(|p| acc.min(p)));
    if let (Some(from_ocp), Some(worst)) = (ck.result("p_max from join", p_max(&ocp, &phi)), ck.result("p_max", worst)) {
        ck.equal("p_max(join, phi) = min_j p_max(psi_j, phi)", (from_ocp - worst).abs(), EQUALITY_TOL);
    }
    ck
}

fn check_kraus<R: Rng>(d: usize, rng: &mut R) -> Check {
    let p = random_probvec(d, rng);
    let q = random_probvec(d, rng);
    let mut ck = Check::new().with(&[&p, &q]);
    let Some(ladder) = ck.result("ladder", ratio_ladder(&p, &q)) else {
        return ck;
    };
    let k = kraus_diagonals(&ladder);
    ck.equal("m² + n² = 1", k.completeness_error(), EQUALITY_TOL);
    ck.holds("m non-decreasing", k.m.windows(2).all(|w| w[0] <= w[1]));
    let first_block = ladder.blocks().next().unwrap().1;
    ck.holds("n vanishes on the first block", k.n[first_block].iter().all(|&n| n == 0.0));
    ck
}

fn check_oracle<R: Rng>(d: usize, rng: &mut R) -> Check {
    let p = random_probvec(d, rng);
    let q = random_probvec(d, rng);
    let mut ck = Check::new().with(&[&p, &q]);
    if let Some(spec) = ck.result("spectrum", embed(&p).schmidt_spectrum()) {
        ck.equal("spectrum(embed(p)) = p", max_abs_diff(&spec, &p), ORACLE_TOL);
    }
    let Some(ladder) = ck.result("ladder", ratio_ladder(&p, &q)) else {
        return ck;
    };
    let k = kraus_diagonals(&ladder);
    let m = meet(&p, &q);
    let states = [
        crate::ladder::intermediate_from_ladder(&ladder, &q),
        ratio_ladder(&p, &m).and_then(|l| crate::ladder::intermediate_from_ladder(&l, &m)),
    ];
    for state in states {
        let Some(state) = ck.result("intermediate", state) else { continue };
        let (Some(analytic), Some(dense)) = (
            ck.result("apply_two_outcome", apply_two_outcome(&state, &k)),
            ck.result("measure", PreparedMeasurement::new(&embed(&state), &k)),
        ) else {
            continue;
        };
        let [ps, pf] = dense.probabilities;
        ck.equal("norm preserved", (ps + pf - 1.0).abs(), ORACLE_TOL);
        ck.equal("success probability", (ps - analytic.success_prob).abs(), ORACLE_TOL);
        if let Some(post) = dense.post(Outcome::Success).ok().and_then(|s| s.schmidt_spectrum().ok()) {
            ck.equal("success spectrum", max_abs_diff(&post, &analytic.success), ORACLE_TOL);
        }
        match (&analytic.failure, dense.post(Outcome::Failure)) {
            (Some(fail), Ok(post)) => {
                if let Some(post) = ck.result("failure spectrum", post.schmidt_spectrum()) {
                    ck.equal("failure spectrum", max_abs_diff(&post, fail), ORACLE_TOL);
                }
            }
            (None, Err(_)) => {}
            (None, Ok(_)) => ck.equal("failure probability", pf, epsilon()),
            (Some(_), Err(_)) => ck.holds("dense failure branch present", false),
        }
    }
    ck
}

fn check_plans<R: Rng>(d: usize, rng: &mut R) -> Check {
    let Some((p, q)) = random_incomparable_pair(d, rng, PAIR_TRIES) else {
        return Check::not_applicable();
    };
    let mut ck = Check::new().with(&[&p, &q]);
    let (src, tgt) = (NamedState::new("psi", p.clone()), NamedState::new("phi", q.clone()));
    let plans: Vec<ConversionPlan> = [plan_vidal(&src, &tgt), plan_greedy(&src, &tgt), plan_thrifty(&src, &tgt)]
        .into_iter()
        .filter_map(|plan| ck.result("plan", plan))
        .collect();
    if plans.len() != 3 {
        return ck;
    }
    for plan in &plans {
        ck.result(&format!("{} validity", plan.protocol), plan.validate());
        for step in &plan.steps {
            ck.slack = ck.slack.min(monotone_slack(step));
            if monotone_slack(step) < -epsilon() {
                ck.failures.push(format!("{}: monotone increased on average", plan.protocol));
            }
        }
        let json = serde_json::to_string(plan).expect("plan serializes");
        match serde_json::from_str::<ConversionPlan>(&json) {
            Ok(back) => {
                ck.holds("JSON round trip", &back == plan);
                ck.result("re-parsed validity", back.validate());
            }
            Err(e) => ck.failures.push(format!("JSON round trip: {e}")),
        }
    }
    let (vidal, greedy, thrifty) = (&plans[0], &plans[1], &plans[2]);
    ck.equal("greedy = vidal probability", (greedy.success_prob - vidal.success_prob).abs(), EQUALITY_TOL);
    ck.equal("thrifty = vidal probability", (thrifty.success_prob - vidal.success_prob).abs(), EQUALITY_TOL);
    ck.equal(
        "greedy chi = vidal chi",
        max_abs_diff(&greedy.steps[1].to().spectrum, &vidal.steps[0].to().spectrum),
        ORACLE_TOL,
    );
    if let (Some(xi), Some(nu)) = (&greedy.residual, &thrifty.residual) {
        ck.holds("rank(xi) < rank(phi)", xi.effective_rank() < q.effective_rank());
        ck.holds("rank(nu) < rank(meet)", nu.effective_rank() < meet(&p, &q).effective_rank());
    } else {
        ck.holds("residuals present", false);
    }
    ck
}

/// Run a single property on instance `instance` of a sweep.
pub fn check_instance(property: Property, dim: usize, seed: u64, instance: usize) -> Check {
    let mut rng = stream_rng(seed, instance, property);
    match property {
        Property::Lattice => check_lattice(dim, &mut rng),
        Property::Nielsen => check_nielsen(dim, &mut rng),
        Property::Lemma1 => check_lemma1(dim, &mut rng),
        Property::Lemma2 => check_lemma2(dim, &mut rng),
        Property::Thm1 => check_thm1(dim, &mut rng),
        Property::Thm2 => check_thm2(dim, &mut rng),
        Property::Thm3 => check_thm3(dim, &mut rng),
        Property::Kraus => check_kraus(dim, &mut rng),
        Property::Oracle => check_oracle(dim, &mut rng),
        Property::Plans => check_plans(dim, &mut rng),
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    if config.dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {}", config.dim)));
    }
    if config.count < 1 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let properties = if config.properties.is_empty() {
        Property::ALL.to_vec()
    } else {
        config.properties.clone()
    };
    let reports = properties
        .iter()
        .map(|&property| {
            let checks: Vec<Check> = (0..config.count)
                .into_par_iter()
                .map(|i| check_instance(property, config.dim, config.seed, i))
                .collect();
            summarize(property, checks)
        })
        .collect();
    Ok(SweepReport {
        dim: config.dim,
        count: config.count,
        seed: config.seed,
        distribution: DISTRIBUTION.to_string(),
        rng: crate::oracle_sim::RNG_ALGORITHM.to_string(),
        properties: reports,
    })
}

fn summarize(property: Property, checks: Vec<Check>) -> PropertyReport {
    let mut report = PropertyReport {
        property,
        applicable: 0,
        not_applicable: 0,
        passed: 0,
        failed: 0,
        worst_slack: None,
        max_deviation: None,
        failures: vec![],
    };
    for (instance, check) in checks.into_iter().enumerate() {
        if !check.applicable {
            report.not_applicable += 1;
            continue;
        }
        report.applicable += 1;
        if check.slack.is_finite() {
            report.worst_slack = Some(report.worst_slack.map_or(check.slack, |w| w.min(check.slack)));
        }
        report.max_deviation = Some(report.max_deviation.map_or(check.deviation, |w| w.max(check.deviation)));
        if check.passed() {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.failures.len() < MAX_ECHOED_FAILURES {
                report.failures.push(FailureRecord {
                    instance,
                    vectors: check.vectors,
                    detail: check.failures.join("; "),
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert!("thm9".parse::<Property>().is_err());
    }

    #[test]
    fn small_sweep_passes_everything() {
        let report = run_sweep(&SweepConfig { dim: 4, count: 60, seed: 5, properties: vec![] }).unwrap();
        for p in &report.properties {
            assert_eq!(p.failed, 0, "{}: {:?}", p.property, p.failures);
            assert_eq!(p.passed + p.failed, p.applicable);
        }
        assert_eq!(report.total_failures(), 0);
    }

    #[test]
    fn two_dimensions_have_no_incomparable_pairs() {
        let cfg = SweepConfig { dim: 2, count: 10, seed: 1, properties: vec![Property::Thm1, Property::Thm2] };
        let report = run_sweep(&cfg).unwrap();
        assert!(report.properties.iter().all(|p| p.applicable == 0));
    }

    #[test]
    fn argument_validation() {
        let cfg = SweepConfig { dim: 4, count: 0, seed: 1, properties: vec![] };
        assert!(matches!(run_sweep(&cfg), Err(Error::InvalidArgument(_))));
        let cfg = SweepConfig { dim: 1, count: 3, seed: 1, properties: vec![] };
        assert!(matches!(run_sweep(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = SweepConfig { dim: 5, count: 30, seed: 9, properties: vec![Property::Thm2, Property::Lattice] };
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
    }
}
