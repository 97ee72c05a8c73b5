//! Pieces shared by every report, plus a small text-table renderer.

use qmw_core::graph::{FeynmanGraph, GraphDocument};
use qmw_core::rational::format_rational;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{TOOL, VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL,
            version: VERSION,
        }
    }
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The canonical graph document and its hash.
#[derive(Debug, Clone, Serialize)]
pub struct GraphInputRecord {
    pub sha256: String,
    pub document: GraphDocument,
}

impl GraphInputRecord {
    pub fn new(graph: &FeynmanGraph) -> Self {
        Self {
            sha256: sha256_hex(graph.to_canonical_json().as_bytes()),
            document: graph.to_document(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub name: String,
    pub dimension: usize,
    pub vertices: usize,
    pub internal_edges: usize,
    pub loops: usize,
    pub masses: Vec<String>,
}

impl GraphSummary {
    pub fn new(graph: &FeynmanGraph) -> Self {
        Self {
            name: graph.name().to_string(),
            dimension: graph.dimension(),
            vertices: graph.vertex_count(),
            internal_edges: graph.edge_count(),
            loops: graph.loop_number(),
            masses: graph.masses().iter().map(format_rational).collect(),
        }
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(header.to_vec()));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
