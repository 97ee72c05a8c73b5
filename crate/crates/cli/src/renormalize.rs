//! `qmw renormalize`: counterterms and renormalized values of a character.

use std::fmt::Write as _;

use qmw_core::renorm::{
    birkhoff_factorize, recombine, renormalized_value, CharacterMap, FixtureTable, HopfElement,
    RenormError, SeriesDocument, SeriesFromDocument, SubgraphRule,
};
use serde::Serialize;

use crate::report::{sha256_hex, ToolInfo};
use crate::{read_text, to_json, FieldChoice, Format, Outcome, RenormalizeArgs};

#[derive(Debug, Clone, Serialize)]
pub struct RenormalizedGraph {
    pub graph: String,
    pub loops: usize,
    /// `φ₋`, the counterterm.
    pub minus: SeriesDocument,
    /// `φ₊`, regular at the center.
    pub plus: SeriesDocument,
    pub renormalized: serde_json::Value,
    /// `(φ₋∘S) ⋆ φ₊` agrees with `φ` to the common truncation order.
    pub recombines: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RenormalizationReport {
    pub tool: ToolInfo,
    pub characters_sha256: String,
    pub fixtures_sha256: String,
    pub field: &'static str,
    pub center: String,
    pub graphs: Vec<RenormalizedGraph>,
}

pub fn run(args: &RenormalizeArgs) -> anyhow::Result<Outcome> {
    let report = renormalize(args)?;
    let stdout = match args.format {
        Format::Json => to_json(&report)?,
        Format::Human => render_human(&report),
    };
    Ok(Outcome { stdout, code: 0 })
}

trait Documented: SeriesFromDocument {
    const NAME: &'static str;
    fn document(s: &qmw_core::renorm::LaurentSeries<Self>) -> Result<SeriesDocument, RenormError>;
    fn json(x: &Self) -> serde_json::Value;
}

impl Documented for qmw_core::rational::Rational {
    const NAME: &'static str = "exact";
    fn document(s: &qmw_core::renorm::LaurentSeries<Self>) -> Result<SeriesDocument, RenormError> {
        Ok(SeriesDocument::from_rational(s)?)
    }
    fn json(x: &Self) -> serde_json::Value {
        serde_json::Value::String(qmw_core::rational::format_rational(x))
    }
}

impl Documented for f64 {
    const NAME: &'static str = "float";
    fn document(s: &qmw_core::renorm::LaurentSeries<Self>) -> Result<SeriesDocument, RenormError> {
        Ok(SeriesDocument::from_f64(s)?)
    }
    fn json(x: &Self) -> serde_json::Value {
        serde_json::json!(x)
    }
}

pub fn renormalize(args: &RenormalizeArgs) -> anyhow::Result<RenormalizationReport> {
    let characters = read_text(&args.characters)?;
    let fixtures = read_text(&args.fixtures)?;
    let table = FixtureTable::from_json(&fixtures)?;
    let (center, graphs, field) = match args.field {
        FieldChoice::Exact => {
            factorize_all::<qmw_core::rational::Rational>(&characters, &table, &args.graphs)?
        }
        FieldChoice::Float => factorize_all::<f64>(&characters, &table, &args.graphs)?,
    };
    Ok(RenormalizationReport {
        tool: ToolInfo::default(),
        characters_sha256: sha256_hex(characters.as_bytes()),
        fixtures_sha256: sha256_hex(fixtures.as_bytes()),
        field,
        center,
        graphs,
    })
}

fn factorize_all<F: Documented>(
    characters: &str,
    table: &FixtureTable,
    only: &[String],
) -> Result<(String, Vec<RenormalizedGraph>, &'static str), RenormError> {
    let phi = CharacterMap::<F>::from_json(characters)?;
    let mut names: Vec<String> = if only.is_empty() {
        table
            .generators()
            .filter(|g| phi.get(g).is_some())
            .cloned()
            .collect()
    } else {
        only.to_vec()
    };
    names.sort();
    names.dedup();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let x = HopfElement::generator(&name);
        let fact = birkhoff_factorize(&phi, &x, table)?;
        let recombined = recombine(&fact, &x, table)?;
        out.push(RenormalizedGraph {
            loops: table.loops(&name),
            minus: F::document(&fact.minus(&x)?)?,
            plus: F::document(&fact.plus(&x)?)?,
            renormalized: F::json(&renormalized_value(&fact, &x)?),
            recombines: recombined.agrees_with(&phi.evaluate(&x)?),
            steps: fact.steps,
            graph: name,
        });
    }
    Ok((
        qmw_core::rational::format_rational(phi.center()),
        out,
        F::NAME,
    ))
}

pub fn render_human(r: &RenormalizationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", r.tool.name, r.tool.version);
    let _ = writeln!(out, "field {}, center s = {}", r.field, r.center);
    for g in &r.graphs {
        let _ = writeln!(out, "\n{} (loops {}, {} steps)", g.graph, g.loops, g.steps);
        let _ = writeln!(
            out,
            "  minus        pole order {}: {}",
            g.minus.pole_order,
            coeffs(&g.minus)
        );
        let _ = writeln!(out, "  plus         {}", coeffs(&g.plus));
        let _ = writeln!(out, "  renormalized {}", plain(&g.renormalized));
        let _ = writeln!(
            out,
            "  recombines   {}",
            crate::report::yes_no(g.recombines)
        );
    }
    out
}

fn plain(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn coeffs(doc: &SeriesDocument) -> String {
    let parts: Vec<String> = doc.coeffs.iter().map(plain).collect();
    format!("[{}]", parts.join(", "))
}
