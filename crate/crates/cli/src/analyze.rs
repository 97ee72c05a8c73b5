//! `qmw analyze`: deformation, certificates, motive class and verdict.

use std::fmt::Write as _;

use qmw_core::graph::{FeynmanGraph, SpanningTree};
use qmw_core::igusa::{
    integrate_eta, Exponent, IntegrandSpec, IntegrationOptions, IntegrationResult,
};
use qmw_core::motive::{sunset_pipeline, PipelineOptions, PipelineOutput, Verdict};
use qmw_core::quadric::{
    deform_net, symbolic_deformation, verify_conditions, ConditionReport, DeformationSchedule,
    QuadricNet,
};
use qmw_core::rational::{format_rational, Rational};
use qmw_core::transversality::{
    certify_sunset_at, gradient_rank_spot_check, search_epsilon, CertificateSet, EpsilonSearch,
    EpsilonTrial, RankSpotCheck, SunsetTemplate, TransversalityError, HEURISTIC_LABEL,
};
use serde::Serialize;

use crate::report::{table, yes_no, GraphInputRecord, GraphSummary, ToolInfo};
use crate::{choose_tree, load_graph, to_json, AnalyzeArgs, Format, Outcome, SamplingArgs};

pub const DEFAULT_SEARCH_CUTOFF: u64 = 64;

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeFlags {
    pub dimension: Option<usize>,
    pub tree: Option<Vec<String>>,
    pub epsilon: Option<String>,
    pub epsilon_search: Option<u64>,
    pub schedule: DeformationSchedule,
    pub twist_exponent: Option<i32>,
    pub prym_dim: Option<u32>,
    pub alpha: Option<String>,
    pub samples: u64,
    pub seed: u64,
    pub scheme: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisInput {
    pub graph: GraphInputRecord,
    pub flags: AnalyzeFlags,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonReport {
    pub value: String,
    /// `fixed` or `search`.
    pub mode: &'static str,
    pub schedule: DeformationSchedule,
    pub trace: Vec<EpsilonTrial>,
}

/// `A_{i,ε}` diagonals as polynomials in ε.
#[derive(Debug, Clone, Serialize)]
pub struct DeformedForm {
    pub edge: String,
    pub symbolic: Vec<String>,
    pub value: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificates {
    /// `exact` when the determinant families apply, otherwise [`HEURISTIC_LABEL`].
    pub method: &'static str,
    pub pairwise: Option<CertificateSet>,
    pub triple: Option<CertificateSet>,
    pub spot_check: RankSpotCheck,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MotiveReport {
    pub complement_display: String,
    pub dual_display: String,
    pub cone_count: usize,
    #[serde(flatten)]
    pub pipeline: PipelineOutput,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub input: AnalysisInput,
    pub graph: GraphSummary,
    pub tree: Vec<String>,
    pub epsilon: EpsilonReport,
    pub deformed_forms: Vec<DeformedForm>,
    pub conditions: ConditionReport,
    pub certificates: Certificates,
    pub motive: Option<MotiveReport>,
    pub verdict: Verdict,
    pub integration: Option<IntegrationResult>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Indeterminate { .. } => 2,
            _ => 0,
        }
    }
}

pub fn run(args: &AnalyzeArgs) -> anyhow::Result<Outcome> {
    let report = analyze(args)?;
    let stdout = match args.format {
        Format::Json => to_json(&report)?,
        Format::Human => render_human(&report),
    };
    Ok(Outcome {
        stdout,
        code: report.exit_code(),
    })
}

pub fn integration_options(s: &SamplingArgs) -> IntegrationOptions {
    IntegrationOptions {
        scheme: s.scheme,
        samples: s.samples,
        seed: s.seed,
        chunks: s.chunks,
    }
}

struct Chosen {
    epsilon: Rational,
    trace: Vec<EpsilonTrial>,
    deformed: QuadricNet,
    conditions: ConditionReport,
    certificates: Certificates,
    template: Option<SunsetTemplate>,
}

pub fn analyze(args: &AnalyzeArgs) -> anyhow::Result<AnalysisReport> {
    let graph = load_graph(&args.input)?;
    let tree = choose_tree(&graph, &args.input)?;
    let net = QuadricNet::from_graph(&graph, &tree)?;
    let schedule = args.epsilon.schedule;
    let symbolic = symbolic_deformation(&net, schedule)?;

    let search = EpsilonSearch {
        first_k: 2,
        cutoff: args.epsilon.epsilon_search.unwrap_or(DEFAULT_SEARCH_CUTOFF),
    };
    let certified =
        schedule == DeformationSchedule::Paper && is_sunset_shaped(&graph, &tree, &net)?;
    let chosen = if certified {
        certified_choice(&graph, &tree, &net, args.epsilon.epsilon.as_ref(), search)?
    } else {
        heuristic_choice(
            &graph,
            &tree,
            &net,
            args.epsilon.epsilon.as_ref(),
            search,
            schedule,
        )?
    };

    let deformed_forms = chosen
        .deformed
        .forms
        .iter()
        .zip(symbolic.matrix_diagonals())
        .map(|(f, diag)| DeformedForm {
            edge: f.edge.clone(),
            symbolic: diag.iter().map(ToString::to_string).collect(),
            value: f
                .form
                .matrix()
                .diagonal()
                .iter()
                .map(format_rational)
                .collect(),
        })
        .collect();

    let (motive, verdict) = match &chosen.template {
        Some(t) => {
            let options = PipelineOptions {
                prym_dim: args.prym_dim,
                twist: args.twist_exponent,
            };
            let pipeline = sunset_pipeline(graph.dimension(), &t.mass_squares, options)?;
            let verdict = if chosen.certificates.pass {
                pipeline.verdict.clone()
            } else {
                Verdict::Indeterminate {
                    reason: format!(
                        "epsilon {} fails: {}",
                        format_rational(&chosen.epsilon),
                        chosen.trace.last().map(|t| t.reasons.join(", ")).unwrap_or_default()
                    ),
                }
            };
            let report = MotiveReport {
                complement_display: pipeline.complement.to_string(),
                dual_display: pipeline.dual.to_string(),
                cone_count: pipeline.ledger.cone_count(),
                pipeline,
            };
            (Some(report), verdict)
        }
        None => (
            None,
            Verdict::Indeterminate {
                reason: format!(
                    "no class formula for this net shape; transversality was spot-checked ({HEURISTIC_LABEL})"
                ),
            },
        ),
    };

    let integration = match &args.alpha {
        Some(alpha) => {
            let spec =
                IntegrandSpec::new(chosen.deformed.clone(), Exponent::Rational(alpha.clone()))?;
            Some(integrate_eta(&spec, &integration_options(&args.sampling))?)
        }
        None => None,
    };

    let flags = AnalyzeFlags {
        dimension: args.input.dimension,
        tree: args.input.tree.clone(),
        epsilon: args.epsilon.epsilon.as_ref().map(format_rational),
        epsilon_search: args.epsilon.epsilon_search,
        schedule,
        twist_exponent: args.twist_exponent,
        prym_dim: args.prym_dim,
        alpha: args.alpha.as_ref().map(format_rational),
        samples: args.sampling.samples,
        seed: args.sampling.seed,
        scheme: args.sampling.scheme.name(),
    };

    Ok(AnalysisReport {
        tool: ToolInfo::default(),
        input: AnalysisInput {
            graph: GraphInputRecord::new(&graph),
            flags,
        },
        graph: GraphSummary::new(&graph),
        tree: tree.edge_ids(&graph),
        epsilon: EpsilonReport {
            value: format_rational(&chosen.epsilon),
            mode: if args.epsilon.epsilon.is_some() {
                "fixed"
            } else {
                "search"
            },
            schedule,
            trace: chosen.trace,
        },
        deformed_forms,
        conditions: chosen.conditions,
        certificates: chosen.certificates,
        motive,
        verdict,
        integration,
    })
}

/// The determinant families apply when the deformed net matches the sunset template.
fn is_sunset_shaped(
    graph: &FeynmanGraph,
    tree: &SpanningTree,
    net: &QuadricNet,
) -> anyhow::Result<bool> {
    let probe = deform_net(
        net,
        tree,
        graph,
        &Rational::new(1.into(), 2.into()),
        DeformationSchedule::Paper,
    )?;
    match SunsetTemplate::recognise(&probe) {
        Ok(_) => Ok(true),
        Err(TransversalityError::UnsupportedNetShape { .. }) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

fn certified_choice(
    graph: &FeynmanGraph,
    tree: &SpanningTree,
    net: &QuadricNet,
    fixed: Option<&Rational>,
    search: EpsilonSearch,
) -> anyhow::Result<Chosen> {
    let (bundle, trace) = match fixed {
        Some(eps) => {
            let bundle = certify_sunset_at(graph, tree, net, eps)?;
            let mut reasons = bundle.conditions.failures.clone();
            reasons.extend(
                bundle
                    .pairwise
                    .first_failure
                    .iter()
                    .map(|l| format!("det {l} = 0")),
            );
            reasons.extend(
                bundle
                    .triple
                    .first_failure
                    .iter()
                    .map(|l| format!("det {l} = 0")),
            );
            let trial = EpsilonTrial {
                epsilon: eps.clone(),
                pass: bundle.pass,
                reasons,
            };
            (bundle, vec![trial])
        }
        None => search_epsilon(graph, tree, net, search)?,
    };
    let deformed = deform_net(
        net,
        tree,
        graph,
        &bundle.epsilon,
        DeformationSchedule::Paper,
    )?;
    let template = SunsetTemplate::recognise(&deformed)?;
    Ok(Chosen {
        epsilon: bundle.epsilon.clone(),
        trace,
        deformed,
        conditions: bundle.conditions,
        certificates: Certificates {
            method: "exact",
            pass: bundle.pass,
            pairwise: Some(bundle.pairwise),
            triple: Some(bundle.triple),
            spot_check: bundle.spot_check,
        },
        template: Some(template),
    })
}

fn heuristic_choice(
    graph: &FeynmanGraph,
    tree: &SpanningTree,
    net: &QuadricNet,
    fixed: Option<&Rational>,
    search: EpsilonSearch,
    schedule: DeformationSchedule,
) -> anyhow::Result<Chosen> {
    let candidates: Vec<Rational> = match fixed {
        Some(eps) => vec![eps.clone()],
        None => search.candidates().collect(),
    };
    let mut trace = Vec::new();
    for eps in candidates {
        let deformed = deform_net(net, tree, graph, &eps, schedule)?;
        let conditions = verify_conditions(&deformed);
        let spot_check = gradient_rank_spot_check(&deformed, usize::MAX)?;
        let pass = conditions.all_hold() && spot_check.pass;
        let mut reasons = conditions.failures.clone();
        if !spot_check.pass {
            reasons.push(format!(
                "rank drops at {} sampled points",
                spot_check.failures.len()
            ));
        }
        trace.push(EpsilonTrial {
            epsilon: eps.clone(),
            pass,
            reasons,
        });
        let chosen = Chosen {
            epsilon: eps,
            trace: Vec::new(),
            deformed,
            conditions,
            certificates: Certificates {
                method: HEURISTIC_LABEL,
                pairwise: None,
                triple: None,
                spot_check,
                pass,
            },
            template: None,
        };
        if pass || fixed.is_some() {
            return Ok(Chosen { trace, ..chosen });
        }
    }
    Err(TransversalityError::SearchExhausted {
        first_k: search.first_k,
        cutoff: search.cutoff,
        failures: trace
            .iter()
            .map(|t| {
                format!(
                    "epsilon {}: {}",
                    format_rational(&t.epsilon),
                    t.reasons.join(", ")
                )
            })
            .collect(),
    }
    .into())
}

pub fn render_human(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let g = &r.graph;
    let _ = writeln!(out, "{} {}", r.tool.name, r.tool.version);
    let _ = writeln!(out, "input sha256  {}", r.input.graph.sha256);
    let _ = writeln!(
        out,
        "graph         {} (D = {}, {} vertices, {} edges, L = {})",
        g.name, g.dimension, g.vertices, g.internal_edges, g.loops
    );
    let _ = writeln!(out, "masses        {}", g.masses.join(", "));
    let _ = writeln!(out, "tree          {}", r.tree.join(", "));
    let _ = writeln!(
        out,
        "epsilon       {} ({}, schedule {}, {} candidate(s) tried)",
        r.epsilon.value,
        r.epsilon.mode,
        r.epsilon.schedule,
        r.epsilon.trace.len()
    );
    for t in r.epsilon.trace.iter().filter(|t| !t.pass) {
        let _ = writeln!(
            out,
            "  rejected {}: {}",
            format_rational(&t.epsilon),
            t.reasons.join(", ")
        );
    }
    out.push('\n');
    let rows: Vec<Vec<String>> = r
        .deformed_forms
        .iter()
        .map(|f| vec![f.edge.clone(), f.symbolic.join(", "), f.value.join(", ")])
        .collect();
    out.push_str(&table(&["form", "diagonal in eps", "value"], &rows));
    out.push('\n');
    let c = &r.conditions;
    let rows = vec![
        vec!["(i) smooth".into(), yes_no(c.smooth).into()],
        vec!["(ii) real".into(), yes_no(c.real).into()],
        vec!["(iii) positive".into(), yes_no(c.positive).into()],
        vec!["(iv) conservation".into(), yes_no(c.conservation).into()],
    ];
    out.push_str(&table(&["condition", "holds"], &rows));
    out.push('\n');
    let cert = &r.certificates;
    let count =
        |s: &Option<CertificateSet>| s.as_ref().map_or("-".to_string(), |s| s.len().to_string());
    let _ = writeln!(
        out,
        "certificates  {} (pairwise {}, triple {}), pass {}",
        cert.method,
        count(&cert.pairwise),
        count(&cert.triple),
        yes_no(cert.pass)
    );
    let _ = writeln!(
        out,
        "rank check    {} points, {} failures",
        cert.spot_check.points_checked,
        cert.spot_check.failures.len()
    );
    if let Some(m) = &r.motive {
        let _ = writeln!(out, "complement    {}", m.complement_display);
        let _ = writeln!(out, "dual          {}", m.dual_display);
        let _ = writeln!(out, "cones         {}", m.cone_count);
    }
    let detail = match &r.verdict {
        Verdict::NotMixedTate { witness, .. } => format!(" (witness {witness})"),
        Verdict::Indeterminate { reason } => format!(" ({reason})"),
        Verdict::TateType => String::new(),
    };
    let _ = writeln!(out, "verdict       {}{}", r.verdict.name(), detail);
    if let Some(i) = &r.integration {
        let _ = writeln!(
            out,
            "integral      {:.10e} ± {:.3e} ({} samples, seed {}, {})",
            i.value,
            i.std_error,
            i.samples,
            i.seed,
            i.scheme.name()
        );
    }
    out
}
