//! `qmw dump-net`: the net of a graph as JSON, optionally deformed.

use qmw_core::quadric::{deform_net, QuadricNet};

use crate::{choose_tree, load_graph, to_json, DumpArgs, Outcome};

pub fn run(args: &DumpArgs) -> anyhow::Result<Outcome> {
    let graph = load_graph(&args.input)?;
    let tree = choose_tree(&graph, &args.input)?;
    let mut net = QuadricNet::from_graph(&graph, &tree)?;
    if let Some(eps) = &args.epsilon {
        net = deform_net(&net, &tree, &graph, eps, args.schedule)?;
    }
    Ok(Outcome {
        stdout: to_json(&net.to_dump())?,
        code: 0,
    })
}
