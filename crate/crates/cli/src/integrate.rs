//! `qmw integrate`: Monte Carlo or grid value of the deformed integral.

use std::fmt::Write as _;

use qmw_core::igusa::{
    integrate_eta, laurent_coefficients, Exponent, IntegrandSpec, IntegrationResult,
    LaurentCoefficients,
};
use qmw_core::quadric::{deform_net, verify_conditions, DeformationSchedule, QuadricNet};
use qmw_core::rational::{format_rational, Rational};
use qmw_core::transversality::{EpsilonSearch, TransversalityError};
use serde::Serialize;

use crate::analyze::{integration_options, DEFAULT_SEARCH_CUTOFF};
use crate::report::{GraphInputRecord, GraphSummary, ToolInfo};
use crate::{choose_tree, load_graph, to_json, Format, IntegrateArgs, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct IntegrateFlags {
    pub dimension: Option<usize>,
    pub tree: Option<Vec<String>>,
    pub epsilon: Option<String>,
    pub epsilon_search: Option<u64>,
    pub schedule: DeformationSchedule,
    pub alpha: String,
    pub laurent: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub scheme: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrationReport {
    pub tool: ToolInfo,
    pub input: GraphInputRecord,
    pub flags: IntegrateFlags,
    pub graph: GraphSummary,
    pub epsilon: String,
    pub alpha: String,
    /// `LD/(2n)`; the integral converges for α above it.
    pub threshold: String,
    pub result: IntegrationResult,
    pub laurent: Option<LaurentCoefficients>,
}

pub fn run(args: &IntegrateArgs) -> anyhow::Result<Outcome> {
    let report = integrate(args)?;
    let stdout = match args.format {
        Format::Json => to_json(&report)?,
        Format::Human => render_human(&report),
    };
    Ok(Outcome { stdout, code: 0 })
}

pub fn integrate(args: &IntegrateArgs) -> anyhow::Result<IntegrationReport> {
    let graph = load_graph(&args.input)?;
    let tree = choose_tree(&graph, &args.input)?;
    let net = QuadricNet::from_graph(&graph, &tree)?;
    let schedule = args.epsilon.schedule;
    let deformed = match &args.epsilon.epsilon {
        Some(eps) => deform_net(&net, &tree, &graph, eps, schedule)?,
        None => {
            // first 1/k at which the deformation conditions hold
            let search = EpsilonSearch {
                first_k: 2,
                cutoff: args.epsilon.epsilon_search.unwrap_or(DEFAULT_SEARCH_CUTOFF),
            };
            let mut failures = Vec::new();
            let mut found = None;
            for eps in search.candidates() {
                let d = deform_net(&net, &tree, &graph, &eps, schedule)?;
                let c = verify_conditions(&d);
                if c.all_hold() {
                    found = Some(d);
                    break;
                }
                failures.push(format!(
                    "epsilon {}: {}",
                    format_rational(&eps),
                    c.failures.join(", ")
                ));
            }
            found.ok_or(TransversalityError::SearchExhausted {
                first_k: search.first_k,
                cutoff: search.cutoff,
                failures,
            })?
        }
    };
    let epsilon: Rational = deformed.epsilon.clone();
    let spec = IntegrandSpec::new(deformed, Exponent::Rational(args.alpha.clone()))?;
    let opts = integration_options(&args.sampling);
    let result = integrate_eta(&spec, &opts)?;
    let laurent = match args.laurent {
        Some(k) => Some(laurent_coefficients(&spec, k, &opts)?),
        None => None,
    };
    Ok(IntegrationReport {
        tool: ToolInfo::default(),
        input: GraphInputRecord::new(&graph),
        flags: IntegrateFlags {
            dimension: args.input.dimension,
            tree: args.input.tree.clone(),
            epsilon: args.epsilon.epsilon.as_ref().map(format_rational),
            epsilon_search: args.epsilon.epsilon_search,
            schedule,
            alpha: format_rational(&args.alpha),
            laurent: args.laurent,
            samples: args.sampling.samples,
            seed: args.sampling.seed,
            scheme: args.sampling.scheme.name(),
        },
        graph: GraphSummary::new(&graph),
        epsilon: format_rational(&epsilon),
        alpha: format_rational(&args.alpha),
        threshold: format_rational(&spec.threshold()),
        result,
        laurent,
    })
}

pub fn render_human(r: &IntegrationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", r.tool.name, r.tool.version);
    let _ = writeln!(out, "input sha256  {}", r.input.sha256);
    let _ = writeln!(
        out,
        "graph         {} (D = {}, L = {})",
        r.graph.name, r.graph.dimension, r.graph.loops
    );
    let _ = writeln!(out, "epsilon       {}", r.epsilon);
    let _ = writeln!(out, "alpha         {} (threshold {})", r.alpha, r.threshold);
    let _ = writeln!(
        out,
        "value         {:.10e} ± {:.3e} ({} samples, seed {}, {})",
        r.result.value,
        r.result.std_error,
        r.result.samples,
        r.result.seed,
        r.result.scheme.name()
    );
    if let Some(l) = &r.laurent {
        for (k, g, e) in &l.coefficients {
            let _ = writeln!(out, "gamma_{k:<7} {g:.10e} ± {e:.3e}");
        }
    }
    out
}
