//! Front end for the `qmw` binary: argument definitions, the four commands
//! and their report types.

pub mod analyze;
pub mod dump;
pub mod integrate;
pub mod renormalize;
pub mod report;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmw_core::graph::{FeynmanGraph, GraphError};
use qmw_core::igusa::{IgusaError, Scheme};
use qmw_core::motive::MotiveError;
use qmw_core::quadric::{DeformationSchedule, QuadricError};
use qmw_core::rational::{parse_rational, Rational};
use qmw_core::renorm::RenormError;
use qmw_core::transversality::TransversalityError;

pub const TOOL: &str = "qmw";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "qmw",
    version,
    about = "Quadric nets, motive classes and Feynman periods"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deform, certify and classify the quadric net of a graph.
    Analyze(AnalyzeArgs),
    /// Integrate the deformed integrand of a graph.
    Integrate(IntegrateArgs),
    /// Birkhoff-factorize a character over a subgraph table.
    Renormalize(RenormalizeArgs),
    /// Print the quadric net of a graph.
    DumpNet(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Human,
}

#[derive(Debug, Clone, Args)]
pub struct GraphInput {
    /// Graph document (JSON).
    pub graph: PathBuf,
    /// Override the spacetime dimension of the document.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Spanning tree edge ids; by default the tree that leaves the lowest-id edges as loops.
    #[arg(long, value_delimiter = ',')]
    pub tree: Option<Vec<String>>,
}

#[derive(Debug, Clone, Args)]
pub struct EpsilonArgs {
    /// Fixed deformation parameter.
    #[arg(long, value_parser = rational_arg, conflicts_with = "epsilon_search")]
    pub epsilon: Option<Rational>,
    /// Try ε = 1/k for k = 2..=MAX_K.
    #[arg(long, value_name = "MAX_K")]
    pub epsilon_search: Option<u64>,
    #[arg(long, default_value = "paper", value_parser = schedule_arg)]
    pub schedule: DeformationSchedule,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1 << 18)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "mc-cauchy", value_parser = scheme_arg)]
    pub scheme: Scheme,
    /// Work groups for the sampler; the result does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub chunks: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub epsilon: EpsilonArgs,
    /// Twist exponent of the Prym term.
    #[arg(long, allow_hyphen_values = true)]
    pub twist_exponent: Option<i32>,
    /// Dimension of the Prym variety.
    #[arg(long)]
    pub prym_dim: Option<u32>,
    /// Also integrate at this exponent.
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub epsilon: EpsilonArgs,
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Rational,
    /// Also report the Laurent coefficients γ_0..γ_K at s = α.
    #[arg(long, value_name = "K")]
    pub laurent: Option<usize>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FieldChoice {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, Args)]
pub struct RenormalizeArgs {
    /// Character values: `{"graph": {"center", "pole_order", "coeffs"}}`.
    pub characters: PathBuf,
    /// Subgraph table: `[{"graph", "loops"?, "subgraphs": [{"gamma", "quotient"}]}]`.
    pub fixtures: PathBuf,
    /// Restrict to these generators.
    #[arg(long = "graph")]
    pub graphs: Vec<String>,
    #[arg(long, value_enum, default_value_t = FieldChoice::Exact)]
    pub field: FieldChoice,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Dump the deformed net at this ε.
    #[arg(long, value_parser = rational_arg)]
    pub epsilon: Option<Rational>,
    #[arg(long, default_value = "paper", value_parser = schedule_arg)]
    pub schedule: DeformationSchedule,
}

pub fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn schedule_arg(text: &str) -> Result<DeformationSchedule, String> {
    text.parse()
}

fn scheme_arg(text: &str) -> Result<Scheme, String> {
    text.parse().map_err(|e: IgusaError| e.to_string())
}

/// Rendered report and the exit status it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Analyze(args) => analyze::run(args),
        Command::Integrate(args) => integrate::run(args),
        Command::Renormalize(args) => renormalize::run(args),
        Command::DumpNet(args) => dump::run(args),
    }
}

/// Module tag for an error chain, e.g. `quadric-net`.
pub fn module_tag(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if cause.is::<GraphError>() {
            return "graph-core";
        }
        if cause.is::<QuadricError>() {
            return "quadric-net";
        }
        if cause.is::<TransversalityError>() {
            return "transversality";
        }
        if cause.is::<MotiveError>() {
            return "motive-calculus";
        }
        if cause.is::<IgusaError>() {
            return "igusa-integrator";
        }
        if cause.is::<RenormError>() {
            return "ck-renorm";
        }
    }
    "cli-report"
}

pub(crate) fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn load_graph(input: &GraphInput) -> anyhow::Result<FeynmanGraph> {
    let text = read_text(&input.graph)?;
    let graph = FeynmanGraph::parse(&text)?;
    Ok(match input.dimension {
        Some(d) => graph.with_dimension(d)?,
        None => graph,
    })
}

pub(crate) fn choose_tree(
    graph: &FeynmanGraph,
    input: &GraphInput,
) -> anyhow::Result<qmw_core::graph::SpanningTree> {
    Ok(match &input.tree {
        Some(ids) => {
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            qmw_core::graph::SpanningTree::from_ids(graph, &ids)?
        }
        None => graph.first_tree(),
    })
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
