//! Massive Feynman graphs: incidence data, loop number, spanning trees,
//! momentum conservation and superficial degree of divergence.
//!
//! A graph is stored in canonical form: vertices and both edge lists are
//! sorted by id, and edge indices everywhere else in the crate refer to the
//! position in the sorted internal edge list.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::RatMatrix;
use crate::rational::{format_rational, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("malformed graph document at {location}: {message}")]
    Malformed { location: String, message: String },
    #[error("non-positive mass {value} at {location}")]
    NonPositiveMass { location: String, value: String },
    #[error("duplicate id {id:?} at {location}")]
    DuplicateId { location: String, id: String },
    #[error("unknown vertex {vertex:?} at {location}")]
    UnknownVertex { location: String, vertex: String },
    #[error("momentum at {location} has length {found}, expected dimension {expected}")]
    MomentumLength {
        location: String,
        expected: usize,
        found: usize,
    },
    #[error("graph is disconnected: vertices {unreachable:?} are not reachable from {root:?}")]
    Disconnected {
        root: String,
        unreachable: Vec<String>,
    },
    #[error("external edge {edge:?} carries nonzero momentum; only vanishing external momentum is supported")]
    NonzeroExternalMomentum { edge: String },
    #[error("edge {edge:?} is a self-loop; momentum conservation does not constrain it")]
    SelfLoop { edge: String },
    #[error("not a spanning tree: {reason}")]
    InvalidTree { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalEdge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub mass: Rational,
}

impl InternalEdge {
    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalEdge {
    pub id: String,
    pub vertex: String,
    pub momentum: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeynmanGraph {
    name: String,
    dimension: usize,
    vertices: Vec<String>,
    internal_edges: Vec<InternalEdge>,
    external_edges: Vec<ExternalEdge>,
    // (source index, target index) per internal edge
    endpoints: Vec<(usize, usize)>,
}

// Document layout; field order is alphabetical so serialization is canonical.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub dimension: usize,
    #[serde(default)]
    pub external_edges: Vec<ExternalEdgeDocument>,
    pub internal_edges: Vec<InternalEdgeDocument>,
    pub name: String,
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternalEdgeDocument {
    pub id: String,
    pub mass: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalEdgeDocument {
    pub id: String,
    pub momentum: Vec<String>,
    pub vertex: String,
}

impl FeynmanGraph {
    /// Validates and canonicalizes a graph.
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        vertices: Vec<String>,
        internal_edges: Vec<InternalEdge>,
        external_edges: Vec<ExternalEdge>,
    ) -> Result<Self, GraphError> {
        let doc = GraphDocument {
            dimension,
            external_edges: external_edges
                .into_iter()
                .map(|e| ExternalEdgeDocument {
                    id: e.id,
                    momentum: e.momentum.iter().map(format_rational).collect(),
                    vertex: e.vertex,
                })
                .collect(),
            internal_edges: internal_edges
                .into_iter()
                .map(|e| InternalEdgeDocument {
                    id: e.id,
                    mass: format_rational(&e.mass),
                    source: e.source,
                    target: e.target,
                })
                .collect(),
            name: name.into(),
            vertices,
        };
        Self::from_document(doc)
    }

    /// The massive sunset graph: two vertices joined by three edges `v1 -> v2`.
    pub fn sunset(masses: [Rational; 3], dimension: usize) -> Result<Self, GraphError> {
        let edges = masses
            .into_iter()
            .enumerate()
            .map(|(i, mass)| InternalEdge {
                id: format!("e{}", i + 1),
                source: "v1".into(),
                target: "v2".into(),
                mass,
            })
            .collect();
        Self::new(
            "sunset",
            dimension,
            vec!["v1".into(), "v2".into()],
            edges,
            Vec::new(),
        )
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: GraphDocument =
            serde_path_to_error::deserialize(de).map_err(|e| GraphError::Malformed {
                location: match e.path().to_string() {
                    p if p == "." => "document".to_string(),
                    p => p,
                },
                message: e.inner().to_string(),
            })?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        if doc.dimension == 0 {
            return Err(GraphError::Malformed {
                location: "dimension".into(),
                message: "dimension must be a positive integer".into(),
            });
        }
        if doc.vertices.is_empty() {
            return Err(GraphError::Malformed {
                location: "vertices".into(),
                message: "a graph needs at least one vertex".into(),
            });
        }
        let mut seen_vertices = BTreeSet::new();
        for (i, v) in doc.vertices.iter().enumerate() {
            if !seen_vertices.insert(v.clone()) {
                return Err(GraphError::DuplicateId {
                    location: format!("vertices[{i}]"),
                    id: v.clone(),
                });
            }
        }
        let mut seen_edges = BTreeSet::new();
        let mut internal = Vec::with_capacity(doc.internal_edges.len());
        for (i, e) in doc.internal_edges.iter().enumerate() {
            let loc = format!("internal_edges[{i}]");
            if !seen_edges.insert(e.id.clone()) {
                return Err(GraphError::DuplicateId {
                    location: format!("{loc}.id"),
                    id: e.id.clone(),
                });
            }
            for (field, v) in [("source", &e.source), ("target", &e.target)] {
                if !seen_vertices.contains(v) {
                    return Err(GraphError::UnknownVertex {
                        location: format!("{loc}.{field}"),
                        vertex: v.clone(),
                    });
                }
            }
            let mass = parse_rational(&e.mass).map_err(|err| GraphError::Malformed {
                location: format!("{loc}.mass"),
                message: err.to_string(),
            })?;
            if !mass.is_positive() {
                return Err(GraphError::NonPositiveMass {
                    location: format!("{loc}.mass"),
                    value: e.mass.clone(),
                });
            }
            internal.push(InternalEdge {
                id: e.id.clone(),
                source: e.source.clone(),
                target: e.target.clone(),
                mass,
            });
        }
        let mut external = Vec::with_capacity(doc.external_edges.len());
        for (i, e) in doc.external_edges.iter().enumerate() {
            let loc = format!("external_edges[{i}]");
            if !seen_edges.insert(e.id.clone()) {
                return Err(GraphError::DuplicateId {
                    location: format!("{loc}.id"),
                    id: e.id.clone(),
                });
            }
            if !seen_vertices.contains(&e.vertex) {
                return Err(GraphError::UnknownVertex {
                    location: format!("{loc}.vertex"),
                    vertex: e.vertex.clone(),
                });
            }
            if e.momentum.len() != doc.dimension {
                return Err(GraphError::MomentumLength {
                    location: format!("{loc}.momentum"),
                    expected: doc.dimension,
                    found: e.momentum.len(),
                });
            }
            let momentum = e
                .momentum
                .iter()
                .enumerate()
                .map(|(r, m)| {
                    parse_rational(m).map_err(|err| GraphError::Malformed {
                        location: format!("{loc}.momentum[{r}]"),
                        message: err.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            external.push(ExternalEdge {
                id: e.id.clone(),
                vertex: e.vertex.clone(),
                momentum,
            });
        }

        let mut vertices = doc.vertices;
        vertices.sort();
        internal.sort_by(|a, b| a.id.cmp(&b.id));
        external.sort_by(|a, b| a.id.cmp(&b.id));
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let endpoints = internal
            .iter()
            .map(|e| (index[e.source.as_str()], index[e.target.as_str()]))
            .collect();

        let graph = FeynmanGraph {
            name: doc.name,
            dimension: doc.dimension,
            vertices,
            internal_edges: internal,
            external_edges: external,
            endpoints,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut uf = UnionFind::new(self.vertices.len());
        for &(s, t) in &self.endpoints {
            uf.union(s, t);
        }
        let root = uf.find(0);
        let unreachable: Vec<String> = (0..self.vertices.len())
            .filter(|&v| uf.find(v) != root)
            .map(|v| self.vertices[v].clone())
            .collect();
        if unreachable.is_empty() {
            Ok(())
        } else {
            Err(GraphError::Disconnected {
                root: self.vertices[0].clone(),
                unreachable,
            })
        }
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            dimension: self.dimension,
            external_edges: self
                .external_edges
                .iter()
                .map(|e| ExternalEdgeDocument {
                    id: e.id.clone(),
                    momentum: e.momentum.iter().map(format_rational).collect(),
                    vertex: e.vertex.clone(),
                })
                .collect(),
            internal_edges: self
                .internal_edges
                .iter()
                .map(|e| InternalEdgeDocument {
                    id: e.id.clone(),
                    mass: format_rational(&e.mass),
                    source: e.source.clone(),
                    target: e.target.clone(),
                })
                .collect(),
            name: self.name.clone(),
            vertices: self.vertices.clone(),
        }
    }

    /// Canonical JSON: sorted keys, lists sorted by id, exact rational strings.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph documents always serialize")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Same graph in another spacetime dimension. External momenta are
    /// resized with zeros or truncated.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self, GraphError> {
        let mut doc = self.to_document();
        doc.dimension = dimension;
        for e in &mut doc.external_edges {
            e.momentum.resize(dimension, "0".into());
        }
        Self::from_document(doc)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn internal_edges(&self) -> &[InternalEdge] {
        &self.internal_edges
    }

    pub fn external_edges(&self) -> &[ExternalEdge] {
        &self.external_edges
    }

    pub fn edge_count(&self) -> usize {
        self.internal_edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `(source, target)` vertex indices of internal edge `i`.
    pub fn endpoints(&self, i: usize) -> (usize, usize) {
        self.endpoints[i]
    }

    pub fn masses(&self) -> Vec<Rational> {
        self.internal_edges.iter().map(|e| e.mass.clone()).collect()
    }

    /// First Betti number `n - #V + 1`.
    pub fn loop_number(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let mut entries = vec![vec![0i8; self.edge_count()]; self.vertex_count()];
        for (i, &(s, t)) in self.endpoints.iter().enumerate() {
            if s != t {
                entries[s][i] = 1;
                entries[t][i] = -1;
            }
        }
        IncidenceMatrix { entries }
    }

    /// Spanning tree whose complement is lexicographically smallest, so loop
    /// momenta are the lowest-id edges possible.
    pub fn first_tree(&self) -> SpanningTree {
        let mut uf = UnionFind::new(self.vertex_count());
        let mut tree = Vec::new();
        for i in (0..self.edge_count()).rev() {
            let (s, t) = self.endpoints[i];
            if uf.union(s, t) {
                tree.push(i);
            }
        }
        SpanningTree::from_tree_edges(tree, self.edge_count())
    }

    /// All spanning trees, ordered by their complement in lexicographic order.
    /// The first entry equals [`FeynmanGraph::first_tree`].
    pub fn spanning_trees(&self) -> SpanningTrees<'_> {
        SpanningTrees {
            graph: self,
            combination: Some((0..self.loop_number()).collect()),
        }
    }

    pub fn is_spanning_tree(&self, tree: &SpanningTree) -> bool {
        if tree.edges.len() + 1 != self.vertex_count() {
            return false;
        }
        let mut uf = UnionFind::new(self.vertex_count());
        tree.edges
            .iter()
            .all(|&i| i < self.edge_count() && uf.union(self.endpoints[i].0, self.endpoints[i].1))
    }

    /// Linear momentum relations with vanishing external momenta and each
    /// internal momentum written in the loop momenta of `tree`'s complement.
    pub fn momentum_relations(&self, tree: &SpanningTree) -> Result<MomentumRelations, GraphError> {
        for e in &self.external_edges {
            if e.momentum.iter().any(|x| !x.is_zero()) {
                return Err(GraphError::NonzeroExternalMomentum { edge: e.id.clone() });
            }
        }
        if let Some(e) = self.internal_edges.iter().find(|e| e.is_self_loop()) {
            return Err(GraphError::SelfLoop { edge: e.id.clone() });
        }
        if !self.is_spanning_tree(tree) {
            return Err(GraphError::InvalidTree {
                reason: format!(
                    "edges {:?} do not form a spanning tree of {:?}",
                    tree.edge_ids(self),
                    self.name
                ),
            });
        }

        let incidence = self.incidence_matrix();
        // one vertex row is redundant on a connected graph
        let relations: Vec<Vec<Rational>> = incidence.entries[..self.vertex_count() - 1]
            .iter()
            .map(|row| row.iter().map(|&x| rat(x.into())).collect())
            .collect();
        let rank = if relations.is_empty() {
            0
        } else {
            RatMatrix::from_rows(relations.clone()).rank()
        };

        let n = self.edge_count();
        let loops = tree.complement.clone();
        let mut coefficients = vec![vec![0i64; loops.len()]; n];
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertex_count()];
        for &e in &tree.edges {
            let (s, t) = self.endpoints[e];
            adjacency[s].push((t, e));
            adjacency[t].push((s, e));
        }
        for (j, &loop_edge) in loops.iter().enumerate() {
            coefficients[loop_edge][j] = 1;
            let (s, t) = self.endpoints[loop_edge];
            // the loop momentum returns from t to s through the tree
            for (from, _to, e) in tree_path(&adjacency, t, s) {
                let sign = if self.endpoints[e].0 == from { 1 } else { -1 };
                coefficients[e][j] += sign;
            }
        }

        Ok(MomentumRelations {
            dimension: self.dimension,
            relations,
            rank,
            loop_edges: loops,
            coefficients,
            endpoints: self.endpoints.clone(),
        })
    }

    /// `D*L - 2*n*alpha`.
    pub fn superficial_degree(&self, alpha: &Rational) -> Rational {
        let dl = rat((self.dimension * self.loop_number()) as i64);
        dl - rat(2 * self.edge_count() as i64) * alpha
    }

    pub fn divergence(&self, alpha: &Rational) -> Divergence {
        Divergence::classify(&self.superficial_degree(alpha))
    }
}

/// Sign of the superficial degree of divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    Convergent,
    Logarithmic,
    Divergent,
}

impl Divergence {
    pub fn classify(degree: &Rational) -> Self {
        if degree.is_negative() {
            Divergence::Convergent
        } else if degree.is_zero() {
            Divergence::Logarithmic
        } else {
            Divergence::Divergent
        }
    }
}

/// Rows indexed by vertices, columns by internal edges: `+1` at the source,
/// `-1` at the target, zero columns for self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub entries: Vec<Vec<i8>>,
}

impl IncidenceMatrix {
    pub fn column(&self, edge: usize) -> Vec<i8> {
        self.entries.iter().map(|row| row[edge]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanningTree {
    /// Tree edge indices, ascending.
    pub edges: Vec<usize>,
    /// Complement edge indices, ascending; these carry the loop momenta.
    pub complement: Vec<usize>,
}

impl SpanningTree {
    pub fn from_tree_edges(mut edges: Vec<usize>, edge_count: usize) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let complement = (0..edge_count)
            .filter(|i| edges.binary_search(i).is_err())
            .collect();
        Self { edges, complement }
    }

    /// Looks up tree edges by id.
    pub fn from_ids(graph: &FeynmanGraph, ids: &[&str]) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for id in ids {
            let idx = graph
                .internal_edges
                .iter()
                .position(|e| e.id == *id)
                .ok_or_else(|| GraphError::InvalidTree {
                    reason: format!("unknown edge {id:?}"),
                })?;
            edges.push(idx);
        }
        let tree = Self::from_tree_edges(edges, graph.edge_count());
        if graph.is_spanning_tree(&tree) {
            Ok(tree)
        } else {
            Err(GraphError::InvalidTree {
                reason: format!("edges {ids:?} do not form a spanning tree"),
            })
        }
    }

    pub fn edge_ids(&self, graph: &FeynmanGraph) -> Vec<String> {
        self.edges
            .iter()
            .map(|&i| graph.internal_edges[i].id.clone())
            .collect()
    }

    pub fn complement_ids(&self, graph: &FeynmanGraph) -> Vec<String> {
        self.complement
            .iter()
            .map(|&i| graph.internal_edges[i].id.clone())
            .collect()
    }
}

/// Iterator over spanning trees; see [`FeynmanGraph::spanning_trees`].
pub struct SpanningTrees<'a> {
    graph: &'a FeynmanGraph,
    combination: Option<Vec<usize>>,
}

impl Iterator for SpanningTrees<'_> {
    type Item = SpanningTree;

    fn next(&mut self) -> Option<SpanningTree> {
        let n = self.graph.edge_count();
        loop {
            let comb = self.combination.take()?;
            self.combination = next_combination(&comb, n);
            let tree_edges: Vec<usize> =
                (0..n).filter(|i| comb.binary_search(i).is_err()).collect();
            let tree = SpanningTree::from_tree_edges(tree_edges, n);
            if self.graph.is_spanning_tree(&tree) {
                return Some(tree);
            }
        }
    }
}

fn next_combination(comb: &[usize], n: usize) -> Option<Vec<usize>> {
    let k = comb.len();
    let mut next = comb.to_vec();
    for i in (0..k).rev() {
        if next[i] < n - k + i {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            return Some(next);
        }
    }
    None
}

/// Steps `(from, to, edge)` along the unique tree path `start -> goal`.
fn tree_path(
    adjacency: &[Vec<(usize, usize)>],
    start: usize,
    goal: usize,
) -> Vec<(usize, usize, usize)> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; adjacency.len()];
    let mut visited = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    while let Some(v) = queue.pop_front() {
        if v == goal {
            break;
        }
        for &(w, e) in &adjacency[v] {
            if !visited[w] {
                visited[w] = true;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = goal;
    while let Some((p, e)) = parent[v] {
        path.push((p, v, e));
        v = p;
    }
    path.reverse();
    path
}

/// Momentum conservation with vanishing external momenta, solved over a
/// spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumRelations {
    pub dimension: usize,
    /// Independent conservation rows (all vertices but the last), one column
    /// per internal edge.
    pub relations: Vec<Vec<Rational>>,
    /// Number of independent relations `N = #V - 1`.
    pub rank: usize,
    /// Internal edges carrying the loop momenta, ascending.
    pub loop_edges: Vec<usize>,
    /// `coefficients[i][j]`: integer coefficient of loop momentum `j` in `k_i`.
    pub coefficients: Vec<Vec<i64>>,
    pub endpoints: Vec<(usize, usize)>,
}

impl MomentumRelations {
    pub fn loop_count(&self) -> usize {
        self.loop_edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.coefficients.len()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

impl Serialize for FeynmanGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(s)
    }
}
