//! DOT and CSV rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::protocols::{ConversionPlan, MultiSourcePlan, MultiTargetPlan, PlanStep};
use crate::schmidt::ProbVec;

fn short(v: &ProbVec) -> String {
    let entries: Vec<String> = v.iter().map(|x| format!("{:.4}", x)).collect();
    format!("({})", entries.join(", "))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

/// Digraph of plan steps: bold edges are deterministic, dashed edges are the
/// two outcomes of the measurement.
#[derive(Default)]
pub struct Dot {
    nodes: Vec<(String, String)>,
    seen: BTreeSet<String>,
    edges: Vec<String>,
}

impl Dot {
    fn node(&mut self, name: &str, spectrum: &ProbVec) {
        if self.seen.insert(name.to_string()) {
            self.nodes.push((name.to_string(), format!("{name}\n{}", short(spectrum))));
        }
    }

    pub fn step(&mut self, step: &PlanStep) {
        let (from, to) = (step.from(), step.to());
        self.node(&from.name, &from.spectrum);
        self.node(&to.name, &to.spectrum);
        match step {
            PlanStep::Deterministic { .. } => {
                self.edges.push(format!("  {} -> {} [style=bold];", quote(&from.name), quote(&to.name)));
            }
            PlanStep::Probabilistic { success_prob, failure, .. } => {
                self.node(&failure.name, &failure.spectrum);
                self.edges.push(format!(
                    "  {} -> {} [style=dashed, label=\"p = {:.6}\"];",
                    quote(&from.name),
                    quote(&to.name),
                    success_prob
                ));
                self.edges.push(format!(
                    "  {} -> {} [style=dashed, color=gray, label=\"1 - p\"];",
                    quote(&from.name),
                    quote(&failure.name)
                ));
            }
        }
    }

    pub fn plan(&mut self, plan: &ConversionPlan) {
        self.node(&plan.source.name, &plan.source.spectrum);
        self.node(&plan.target.name, &plan.target.spectrum);
        plan.steps.iter().for_each(|s| self.step(s));
    }

    pub fn render(&self, title: &str) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", quote(title)).unwrap();
        writeln!(out, "  rankdir=LR;").unwrap();
        writeln!(out, "  node [shape=box];").unwrap();
        for (name, label) in &self.nodes {
            writeln!(out, "  {} [label={}];", quote(name), quote(label)).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "{e}").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

pub fn plan_dot(plan: &ConversionPlan) -> String {
    let mut dot = Dot::default();
    dot.plan(plan);
    dot.render(&format!("{} plan", plan.protocol))
}

pub fn multi_target_dot(plan: &MultiTargetPlan) -> String {
    let mut dot = Dot::default();
    dot.plan(&plan.head);
    plan.tails.iter().for_each(|s| dot.step(s));
    dot.render("multi-target plan")
}

pub fn multi_source_dot(plan: &MultiSourcePlan) -> String {
    let mut dot = Dot::default();
    plan.heads.iter().for_each(|s| dot.step(s));
    dot.plan(&plan.tail);
    dot.render("multi-source plan")
}

/// Serialize rows with a header into CSV text.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.as_ref()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// Shortest round-trip decimal, as in the JSON output.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

pub fn join_entries(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

pub fn step_rows(steps: &[PlanStep]) -> Vec<Vec<String>> {
    steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let (p, failure) = match step {
                PlanStep::Deterministic { .. } => (1.0, String::new()),
                PlanStep::Probabilistic { success_prob, failure, .. } => {
                    (*success_prob, join_entries(failure.spectrum.as_slice()))
                }
            };
            vec![
                i.to_string(),
                if step.is_deterministic() { "deterministic" } else { "probabilistic" }.to_string(),
                step.from().name.clone(),
                step.to().name.clone(),
                join_entries(step.to().spectrum.as_slice()),
                num(p),
                failure,
            ]
        })
        .collect()
}

pub const STEP_HEADER: [&str; 7] = ["step", "kind", "from", "to", "to_spectrum", "success_prob", "failure_spectrum"];
