//! The `majlat` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain errors (and sweeps with failures),
//! 2 on usage errors or malformed input.

pub mod input;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::ladder::{intermediate_from_ladder, p_max, r_vector, ratio_ladder};
use crate::lattice::{join_many, meet_many};
use crate::oracle_sim::run_plan;
use crate::protocols::{
    kraus_diagonals, plan_greedy, plan_multi_source, plan_multi_target, plan_thrifty, plan_vidal,
    ConversionPlan, NamedState,
};
use crate::sampling::{random_incomparable_pair, random_probvec};
use crate::schmidt::{compare, ProbVec};
use crate::sweep::{run_sweep, Property, SweepConfig};
use crate::tolerance::set_epsilon;

pub use input::{Collection, InstanceFile};

const INCOMPARABLE_TRIES: usize = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "majlat", version, about = "Entanglement conversion on the majorization lattice")]
pub struct Cli {
    /// Numerical tolerance for normalization and majorization tests.
    #[arg(long, global = true, default_value_t = crate::tolerance::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Seed for `sweep`, `simulate` and `random`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Instance file providing named vectors, pairs and collections.
    #[arg(long, global = true, value_name = "FILE")]
    pub instances: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanKind {
    Vidal,
    Greedy,
    Thrifty,
    MultiTarget,
    MultiSource,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Source and target: inline JSON arrays or instance-file names.
    #[arg(num_args = 0..=2)]
    pub states: Vec<String>,
    /// Pair index in the instance file when no states are given.
    #[arg(long, default_value_t = 0)]
    pub pair: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Majorization order of two vectors.
    Compare(PairArgs),
    /// Meet (optimal common resource) of two or more vectors.
    Meet {
        #[arg(required = true, num_args = 2..)]
        vectors: Vec<String>,
    },
    /// Join (optimal common product) of two or more vectors.
    Join {
        #[arg(required = true, num_args = 2..)]
        vectors: Vec<String>,
    },
    /// Optimal conversion probability from source to target.
    Pmax(PairArgs),
    /// Ratio ladder, r-vector, intermediate state and Kraus diagonals.
    Ladder(PairArgs),
    /// Build a conversion plan.
    Plan {
        #[arg(value_enum)]
        protocol: PlanKind,
        /// States (multi-target: source then targets; multi-source: sources then target).
        states: Vec<String>,
        #[arg(long, default_value_t = 0)]
        pair: usize,
        /// Collection index in the instance file for multi-state plans.
        #[arg(long, default_value_t = 0)]
        collection: usize,
        /// Shorthand for `--format dot`.
        #[arg(long)]
        dot: bool,
    },
    /// Randomized property sweep.
    Sweep {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Comma-separated subset of: lattice, nielsen, lemma1, lemma2, thm1,
        /// thm2, thm3, kraus, oracle, plans (default: all).
        #[arg(long, value_delimiter = ',')]
        properties: Vec<String>,
    },
    /// Monte Carlo run of a plan through the dense simulator.
    Simulate {
        /// JSON plan file as emitted by `plan`.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["protocol", "states"])]
        plan: Option<PathBuf>,
        #[arg(value_enum)]
        protocol: Option<PlanKind>,
        states: Vec<String>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
    /// Random instance file.
    Random {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Emit incomparable pairs instead of single vectors.
        #[arg(long)]
        incomparable: bool,
    },
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command, writing to `--output` or stdout.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let (text, code) = render(cli)?;
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Usage(format!("`{command}` does not support --format {format:?}").to_lowercase())
}

/// Produce the output text and exit code of a command.
pub fn render(cli: &Cli) -> Result<(String, i32), CliError> {
    if !(cli.epsilon.is_finite() && cli.epsilon > 0.0 && cli.epsilon < 0.1) {
        return Err(CliError::Usage(format!("--epsilon must be in (0, 0.1), got {}", cli.epsilon)));
    }
    set_epsilon(cli.epsilon);
    let file = cli.instances.as_deref().map(InstanceFile::load).transpose()?;
    let file = file.as_ref();
    let format = cli.format;

    let text = match &cli.command {
        Command::Compare(args) => {
            let (p, q) = pair(args, file)?;
            let order = compare(&p.spectrum, &q.spectrum);
            match format {
                Format::Json => to_json(&json!({ "order": order })),
                Format::Csv => output::csv(&["order"], &[vec![order.to_string()]]),
                Format::Dot => return Err(unsupported(format, "compare")),
            }
        }
        Command::Meet { vectors } | Command::Join { vectors } => {
            let is_meet = matches!(cli.command, Command::Meet { .. });
            let vs = vectors.iter().map(|v| input::resolve_vec(v, file)).collect::<Result<Vec<_>, _>>()?;
            let result = if is_meet { meet_many(&vs)? } else { join_many(&vs)? };
            vector_output(&result, format, if is_meet { "meet" } else { "join" })?
        }
        Command::Pmax(args) => {
            let (p, q) = pair(args, file)?;
            let value = p_max(&p.spectrum, &q.spectrum).map_err(|e| rename(e, &q.name))?;
            match format {
                Format::Json => to_json(&json!({ "p_max": value })),
                Format::Csv => output::csv(&["p_max"], &[vec![output::num(value)]]),
                Format::Dot => return Err(unsupported(format, "pmax")),
            }
        }
        Command::Ladder(args) => {
            let (p, q) = pair(args, file)?;
            let ladder = ratio_ladder(&p.spectrum, &q.spectrum).map_err(|e| rename(e, &q.name))?;
            match format {
                Format::Json => {
                    let kraus = kraus_diagonals(&ladder);
                    let chi = intermediate_from_ladder(&ladder, &q.spectrum)?;
                    to_json(&json!({
                        "ladder": ladder,
                        "r_vector": r_vector(&ladder),
                        "intermediate": chi,
                        "kraus": kraus,
                    }))
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = ladder
                        .rungs
                        .iter()
                        .enumerate()
                        .map(|(j, r)| vec![(j + 1).to_string(), r.l.to_string(), output::num(r.ratio)])
                        .collect();
                    output::csv(&["j", "l", "ratio"], &rows)
                }
                Format::Dot => return Err(unsupported(format, "ladder")),
            }
        }
        Command::Plan { protocol, states, pair, collection, dot } => {
            let format = if *dot { Format::Dot } else { format };
            plan_output(*protocol, states, *pair, *collection, file, format)?
        }
        Command::Sweep { dim, count, properties } => {
            let properties = properties
                .iter()
                .map(|p| p.trim().parse::<Property>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let config = SweepConfig { dim: *dim, count: *count, seed: cli.seed, properties };
            let report = run_sweep(&config).map_err(|e| match e {
                Error::InvalidArgument(msg) => CliError::Usage(msg),
                other => CliError::Domain(other),
            })?;
            let code = if report.total_failures() == 0 { 0 } else { 1 };
            let text = match format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let opt = |x: Option<f64>| x.map(output::num).unwrap_or_default();
                    let rows: Vec<Vec<String>> = report
                        .properties
                        .iter()
                        .map(|p| {
                            vec![
                                p.property.to_string(),
                                p.applicable.to_string(),
                                p.not_applicable.to_string(),
                                p.passed.to_string(),
                                p.failed.to_string(),
                                opt(p.worst_slack),
                                opt(p.max_deviation),
                            ]
                        })
                        .collect();
                    let header =
                        ["property", "applicable", "not_applicable", "passed", "failed", "worst_slack", "max_deviation"];
                    output::csv(&header, &rows)
                }
                Format::Dot => return Err(unsupported(format, "sweep")),
            };
            return Ok((text, code));
        }
        Command::Simulate { plan, protocol, states, shots } => {
            if *shots == 0 {
                return Err(CliError::Usage("--shots must be at least 1".into()));
            }
            let plan = match (plan, protocol) {
                (Some(path), _) => load_plan(path)?,
                (None, Some(kind)) => single_plan(*kind, states, 0, file)?,
                (None, None) => return Err(CliError::Usage("give --plan FILE or a protocol and states".into())),
            };
            let stats = run_plan(&plan, *shots, cli.seed)?;
            match format {
                Format::Json => to_json(&stats),
                Format::Csv => {
                    let row = vec![
                        stats.rng.clone(),
                        stats.seed.to_string(),
                        stats.shots.to_string(),
                        stats.successes.to_string(),
                        output::num(stats.success_rate),
                        output::num(stats.expected_success_prob),
                        output::num(stats.half_width),
                        stats.within_bound.to_string(),
                        stats.residual_mean.as_deref().map(output::join_entries).unwrap_or_default(),
                    ];
                    let header = [
                        "rng",
                        "seed",
                        "shots",
                        "successes",
                        "success_rate",
                        "expected_success_prob",
                        "half_width",
                        "within_bound",
                        "residual_mean",
                    ];
                    output::csv(&header, &[row])
                }
                Format::Dot => return Err(unsupported(format, "simulate")),
            }
        }
        Command::Random { dim, count, incomparable } => {
            let instances = random_instances(*dim, *count, *incomparable, cli.seed)?;
            match format {
                Format::Json => to_json(&instances),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = instances
                        .vectors
                        .iter()
                        .map(|(name, v)| std::iter::once(name.clone()).chain(v.iter().map(|x| output::num(*x))).collect())
                        .collect();
                    let mut header = vec!["name".to_string()];
                    header.extend((1..=*dim).map(|i| format!("p{i}")));
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    output::csv(&header, &rows)
                }
                Format::Dot => return Err(unsupported(format, "random")),
            }
        }
    };
    Ok((text, 0))
}

/// Rank errors name the target as given on the command line.
fn rename(e: Error, target: &str) -> Error {
    match e {
        Error::RankDeficit { source_rank, target_rank, .. } => {
            Error::RankDeficit { state: target.to_string(), source_rank, target_rank }
        }
        other => other,
    }
}

fn pair(args: &PairArgs, file: Option<&InstanceFile>) -> Result<(NamedState, NamedState), CliError> {
    pair_from(&args.states, args.pair, file)
}

fn pair_from(states: &[String], index: usize, file: Option<&InstanceFile>) -> Result<(NamedState, NamedState), CliError> {
    match (states, file) {
        ([a, b], _) => Ok((input::resolve(a, "psi", file)?, input::resolve(b, "phi", file)?)),
        ([], Some(file)) => file.pair(index),
        ([], None) => Err(CliError::Usage("expected two states or --instances with pairs".into())),
        _ => Err(CliError::Usage(format!("expected exactly two states, got {}", states.len()))),
    }
}

fn vector_output(v: &ProbVec, format: Format, command: &str) -> Result<String, CliError> {
    let cumulative = v.cumulative();
    Ok(match format {
        Format::Json => to_json(&json!({ "vector": v, "cumulative": &cumulative[1..] })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = v
                .iter()
                .enumerate()
                .map(|(k, x)| vec![(k + 1).to_string(), output::num(*x), output::num(cumulative[k + 1])])
                .collect();
            output::csv(&["k", "value", "cumulative"], &rows)
        }
        Format::Dot => return Err(unsupported(format, command)),
    })
}

fn single_plan(
    kind: PlanKind,
    states: &[String],
    index: usize,
    file: Option<&InstanceFile>,
) -> Result<ConversionPlan, CliError> {
    let (p, q) = pair_from(states, index, file)?;
    let plan = match kind {
        PlanKind::Vidal => plan_vidal(&p, &q),
        PlanKind::Greedy => plan_greedy(&p, &q),
        PlanKind::Thrifty => plan_thrifty(&p, &q),
        PlanKind::MultiTarget | PlanKind::MultiSource => {
            return Err(CliError::Usage("simulate takes a single-pair protocol".into()))
        }
    };
    Ok(plan?)
}

fn load_plan(path: &std::path::Path) -> Result<ConversionPlan, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let plan: ConversionPlan = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed plan {}: {e}", path.display())))?;
    plan.validate()?;
    Ok(plan)
}

fn named_list(states: &[String], prefix: &str, file: Option<&InstanceFile>) -> Result<Vec<NamedState>, CliError> {
    states
        .iter()
        .enumerate()
        .map(|(i, s)| input::resolve(s, &format!("{prefix}{}", i + 1), file))
        .collect()
}

fn plan_output(
    kind: PlanKind,
    states: &[String],
    pair_index: usize,
    collection: usize,
    file: Option<&InstanceFile>,
    format: Format,
) -> Result<String, CliError> {
    let multi = |file: Option<&InstanceFile>| -> Result<(Vec<NamedState>, Vec<NamedState>), CliError> {
        match (states.len(), file) {
            (0, Some(file)) => file.collection(collection),
            (0, None) => Err(CliError::Usage("expected states or --instances with collections".into())),
            (1, _) => Err(CliError::Usage("multi-state plans need at least two states".into())),
            _ => Ok(match kind {
                PlanKind::MultiTarget => (
                    vec![input::resolve(&states[0], "psi", file)?],
                    named_list(&states[1..], "phi", file)?,
                ),
                _ => (
                    named_list(&states[..states.len() - 1], "psi", file)?,
                    vec![input::resolve(&states[states.len() - 1], "phi", file)?],
                ),
            }),
        }
    };
    match kind {
        PlanKind::MultiTarget => {
            let (sources, targets) = multi(file)?;
            let [source] = sources.as_slice() else {
                return Err(CliError::Usage(format!("multi-target needs one source, got {}", sources.len())));
            };
            let plan = plan_multi_target(source, &targets)?;
            match format {
                Format::Json => Ok(to_json(&plan)),
                Format::Dot => Ok(output::multi_target_dot(&plan)),
                Format::Csv => {
                    let mut steps = plan.head.steps.clone();
                    steps.extend(plan.tails.iter().cloned());
                    Ok(output::csv(&output::STEP_HEADER, &output::step_rows(&steps)))
                }
            }
        }
        PlanKind::MultiSource => {
            let (sources, targets) = multi(file)?;
            let [target] = targets.as_slice() else {
                return Err(CliError::Usage(format!("multi-source needs one target, got {}", targets.len())));
            };
            let plan = plan_multi_source(&sources, target)?;
            match format {
                Format::Json => Ok(to_json(&plan)),
                Format::Dot => Ok(output::multi_source_dot(&plan)),
                Format::Csv => {
                    let mut steps = plan.heads.clone();
                    steps.extend(plan.tail.steps.iter().cloned());
                    Ok(output::csv(&output::STEP_HEADER, &output::step_rows(&steps)))
                }
            }
        }
        _ => {
            let plan = single_plan(kind, states, pair_index, file)?;
            match format {
                Format::Json => Ok(to_json(&plan)),
                Format::Dot => Ok(output::plan_dot(&plan)),
                Format::Csv => Ok(output::csv(&output::STEP_HEADER, &output::step_rows(&plan.steps))),
            }
        }
    }
}

fn random_instances(dim: usize, count: usize, incomparable: bool, seed: u64) -> Result<InstanceFile, CliError> {
    if dim < 1 || count < 1 {
        return Err(CliError::Usage("--dim and --count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut file = InstanceFile::default();
    let width = (count - 1).to_string().len();
    for i in 0..count {
        if incomparable {
            let (p, q) = random_incomparable_pair(dim, &mut rng, INCOMPARABLE_TRIES).ok_or_else(|| {
                Error::InvalidArgument(format!("no incomparable pair found in dimension {dim}"))
            })?;
            let (a, b) = (format!("psi{i:0width$}"), format!("phi{i:0width$}"));
            file.vectors.insert(a.clone(), p.into_vec());
            file.vectors.insert(b.clone(), q.into_vec());
            file.pairs.push([a, b]);
        } else {
            file.vectors.insert(format!("v{i:0width$}"), random_probvec(dim, &mut rng).into_vec());
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn output_of(args: &[&str]) -> Result<(String, i32), CliError> {
        let cli = Cli::try_parse_from(std::iter::once("majlat").chain(args.iter().copied())).unwrap();
        render(&cli)
    }

    #[test]
    fn compare_worked_pair() {
        let (text, code) = output_of(&["compare", "[0.5,0.4,0.1]", "[0.6,0.2,0.2]"]).unwrap();
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["order"], "incomparable");
    }

    #[test]
    fn meet_and_join_many() {
        let (text, _) = output_of(&["meet", "[0.5,0.4,0.1]", "[0.6,0.2,0.2]"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let meet: Vec<f64> = serde_json::from_value(v["vector"].clone()).unwrap();
        assert!(meet.iter().zip([0.5, 0.3, 0.2]).all(|(a, b)| (a - b).abs() < 1e-12));
        let (csv, _) = output_of(&["join", "--format", "csv", "[0.5,0.4,0.1]", "[0.6,0.2,0.2]", "[1,0,0]"]).unwrap();
        assert!(csv.starts_with("k,value,cumulative\n1,1.0,1.0\n"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(output_of(&["compare", "[0.5,0.4]", "[1]"]).unwrap_err().exit_code(), 1);
        assert_eq!(output_of(&["compare", "[0.5,", "[1]"]).unwrap_err().exit_code(), 2);
        assert_eq!(output_of(&["sweep", "--count", "0"]).unwrap_err().exit_code(), 2);
        assert_eq!(output_of(&["sweep", "--properties", "thm7"]).unwrap_err().exit_code(), 2);
        assert_eq!(output_of(&["compare", "--format", "dot", "[1]", "[1]"]).unwrap_err().exit_code(), 2);
        let err = output_of(&["pmax", "[1,0,0]", "[0.5,0.5,0]"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("`phi`"));
    }

    #[test]
    fn random_incomparable_instances() {
        let (text, _) = output_of(&["random", "--dim", "4", "--count", "3", "--incomparable", "--seed", "3"]).unwrap();
        let file: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.pairs.len(), 3);
        for i in 0..3 {
            let (p, q) = file.pair(i).unwrap();
            assert_eq!(compare(&p.spectrum, &q.spectrum), crate::schmidt::MajOrder::Incomparable);
        }
        assert_eq!(output_of(&["random", "--dim", "2", "--incomparable"]).unwrap_err().exit_code(), 1);
    }
}
