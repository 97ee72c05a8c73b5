//! Commutative Hopf algebra of graph generators with a coproduct driven by
//! a table of admissible subgraphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::FeynmanGraph;
use crate::rational::{format_rational, rat, Rational};

use super::RenormError;

/// Sorted multiset of generator names; the empty monomial is the unit.
pub type Monomial = Vec<String>;

fn mul_monomials(a: &[String], b: &[String]) -> Monomial {
    let mut m = [a, b].concat();
    m.sort();
    m
}

/// Finite rational combination of monomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct HopfElement {
    terms: BTreeMap<Monomial, Rational>,
}

impl HopfElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::monomial(Vec::new())
    }

    pub fn generator(name: &str) -> Self {
        Self::monomial(vec![name.to_string()])
    }

    pub fn monomial(mut m: Monomial) -> Self {
        m.sort();
        Self::from_terms([(m, Rational::one())])
    }

    pub fn scalar(c: Rational) -> Self {
        Self::from_terms([(Vec::new(), c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut e = Self::default();
        for (mut m, c) in terms {
            m.sort();
            *e.terms.entry(m).or_insert_with(Rational::zero) += c;
        }
        e.terms.retain(|_, c| !c.is_zero());
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the unit monomial.
    pub fn scalar_part(&self) -> Rational {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.clone().into_iter().chain(other.terms.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|(a, x)| {
            other
                .terms
                .iter()
                .map(move |(b, y)| (mul_monomials(a, b), x * y))
        }))
    }

    /// Total loop number of each monomial must agree for a homogeneous element.
    pub fn degree(&self, rule: &dyn SubgraphRule) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|g| rule.loops(g)).sum())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body = if m.is_empty() {
                    "1".to_string()
                } else {
                    m.join("·")
                };
                format!("{}*{}", format_rational(c), body)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Finite combination of `x′ ⊗ x″`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Tensor {
    terms: BTreeMap<(Monomial, Monomial), Rational>,
}

impl Tensor {
    pub fn from_terms(terms: impl IntoIterator<Item = ((Monomial, Monomial), Rational)>) -> Self {
        let mut t = Self::default();
        for ((mut a, mut b), c) in terms {
            a.sort();
            b.sort();
            *t.terms.entry((a, b)).or_insert_with(Rational::zero) += c;
        }
        t.terms.retain(|_, c| !c.is_zero());
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, left: &[&str], right: &[&str]) -> Rational {
        let mut a: Monomial = left.iter().map(|s| s.to_string()).collect();
        let mut b: Monomial = right.iter().map(|s| s.to_string()).collect();
        a.sort();
        b.sort();
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|((a1, b1), x)| {
            other
                .terms
                .iter()
                .map(move |((a2, b2), y)| ((mul_monomials(a1, a2), mul_monomials(b1, b2)), x * y))
        }))
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: &Monomial| {
            if m.is_empty() {
                "1".to_string()
            } else {
                m.join("·")
            }
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("{}*{}⊗{}", format_rational(c), show(a), show(b)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One admissible subgraph `γ` (a product of generators) with quotient `Γ/γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphEntry {
    pub gamma: Monomial,
    pub quotient: Monomial,
}

/// Decides which subgraphs enter the coproduct.
pub trait SubgraphRule: Send + Sync {
    /// Admissible proper subgraphs of a generator with their quotients.
    fn subgraphs(&self, generator: &str) -> Vec<SubgraphEntry>;

    /// Loop number of a generator.
    fn loops(&self, generator: &str) -> usize;
}

/// Explicit subgraph table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixtureTable {
    loops: BTreeMap<String, usize>,
    subgraphs: BTreeMap<String, Vec<SubgraphEntry>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_monomial(self) -> Monomial {
        let mut m = match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        };
        m.sort();
        m
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSubgraph {
    pub gamma: OneOrMany,
    pub quotient: OneOrMany,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub graph: String,
    #[serde(default)]
    pub loops: Option<usize>,
    #[serde(default)]
    pub subgraphs: Vec<FixtureSubgraph>,
}

impl FixtureTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a generator; a generator without subgraphs is primitive.
    pub fn insert(&mut self, graph: &str, loops: usize, subgraphs: Vec<SubgraphEntry>) {
        self.loops.insert(graph.to_string(), loops);
        self.subgraphs.insert(graph.to_string(), subgraphs);
    }

    pub fn generators(&self) -> impl Iterator<Item = &String> {
        self.loops.keys()
    }

    /// Parses a list of `{"graph", "loops"?, "subgraphs": [{"gamma", "quotient"}]}`.
    /// Missing loop numbers are inferred as `loops(γ) + loops(Γ/γ)`, primitives default to 1.
    pub fn from_json(text: &str) -> Result<Self, RenormError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let entries: Vec<FixtureEntry> = serde_path_to_error::deserialize(de)
            .map_err(|e| RenormError::MalformedFixture(e.to_string()))?;
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<FixtureEntry>) -> Result<Self, RenormError> {
        let mut declared: BTreeMap<String, Option<usize>> = BTreeMap::new();
        let mut subgraphs: BTreeMap<String, Vec<SubgraphEntry>> = BTreeMap::new();
        for e in entries {
            if declared.insert(e.graph.clone(), e.loops).is_some() {
                return Err(RenormError::MalformedFixture(format!(
                    "graph {} declared twice",
                    e.graph
                )));
            }
            let subs = e
                .subgraphs
                .into_iter()
                .map(|s| SubgraphEntry {
                    gamma: s.gamma.into_monomial(),
                    quotient: s.quotient.into_monomial(),
                })
                .collect();
            subgraphs.insert(e.graph, subs);
        }
        let mentioned: BTreeSet<String> = subgraphs
            .values()
            .flatten()
            .flat_map(|s| s.gamma.iter().chain(&s.quotient).cloned())
            .collect();
        for name in mentioned {
            if !declared.contains_key(&name) {
                declared.insert(name.clone(), None);
                subgraphs.insert(name, Vec::new());
            }
        }
        let mut loops = BTreeMap::new();
        for name in declared.keys() {
            infer_loops(name, &declared, &subgraphs, &mut loops, &mut Vec::new())?;
        }
        let table = Self { loops, subgraphs };
        table.check_grading()?;
        Ok(table)
    }

    fn check_grading(&self) -> Result<(), RenormError> {
        for (g, subs) in &self.subgraphs {
            for s in subs {
                let parts: usize = s
                    .gamma
                    .iter()
                    .chain(&s.quotient)
                    .map(|x| self.loops(x))
                    .sum();
                if parts != self.loops(g) || s.gamma.is_empty() || s.quotient.is_empty() {
                    return Err(RenormError::MalformedFixture(format!(
                        "subgraph {:?} of {g} does not respect the loop grading",
                        s.gamma
                    )));
                }
            }
        }
        Ok(())
    }
}

fn infer_loops(
    name: &str,
    declared: &BTreeMap<String, Option<usize>>,
    subgraphs: &BTreeMap<String, Vec<SubgraphEntry>>,
    loops: &mut BTreeMap<String, usize>,
    stack: &mut Vec<String>,
) -> Result<usize, RenormError> {
    if let Some(&l) = loops.get(name) {
        return Ok(l);
    }
    if stack.iter().any(|s| s == name) {
        return Err(RenormError::MalformedFixture(format!(
            "cyclic subgraph table at {name}"
        )));
    }
    let l = match declared.get(name).copied().flatten() {
        Some(l) => l,
        None => match subgraphs.get(name).and_then(|s| s.first()) {
            None => 1,
            Some(first) => {
                stack.push(name.to_string());
                let mut total = 0;
                for g in first.gamma.iter().chain(&first.quotient) {
                    total += infer_loops(g, declared, subgraphs, loops, stack)?;
                }
                stack.pop();
                total
            }
        },
    };
    loops.insert(name.to_string(), l);
    Ok(l)
}

impl SubgraphRule for FixtureTable {
    fn subgraphs(&self, generator: &str) -> Vec<SubgraphEntry> {
        self.subgraphs.get(generator).cloned().unwrap_or_default()
    }

    fn loops(&self, generator: &str) -> usize {
        self.loops.get(generator).copied().unwrap_or(1)
    }
}

/// `Δ(g) = g⊗1 + 1⊗g + Σ γ⊗g/γ` on a generator.
pub fn coproduct_generator(generator: &str, rule: &dyn SubgraphRule) -> Tensor {
    let g = vec![generator.to_string()];
    let mut terms = vec![
        ((g.clone(), Vec::new()), Rational::one()),
        ((Vec::new(), g), Rational::one()),
    ];
    terms.extend(
        rule.subgraphs(generator)
            .into_iter()
            .map(|s| ((s.gamma, s.quotient), Rational::one())),
    );
    Tensor::from_terms(terms)
}

/// `Δ` extended multiplicatively and linearly.
pub fn coproduct(x: &HopfElement, rule: &dyn SubgraphRule) -> Tensor {
    let mut out = Tensor::default();
    for (m, c) in x.terms() {
        let mut t = Tensor::from_terms([((Vec::new(), Vec::new()), c.clone())]);
        for g in m {
            t = t.mul(&coproduct_generator(g, rule));
        }
        out = Tensor::from_terms(out.terms.into_iter().chain(t.terms));
    }
    out
}

/// `Δ(x) − x⊗1 − 1⊗x` restricted to terms with both sides non-scalar.
pub fn reduced_coproduct(x: &HopfElement, rule: &dyn SubgraphRule) -> Tensor {
    Tensor::from_terms(
        coproduct(x, rule)
            .terms
            .into_iter()
            .filter(|((a, b), _)| !a.is_empty() && !b.is_empty()),
    )
}

pub fn counit(x: &HopfElement) -> Rational {
    x.scalar_part()
}

/// `S(1) = 1`, `S(X) = −X − Σ S(X′) X″` on generators, multiplicative.
pub fn antipode(x: &HopfElement, rule: &dyn SubgraphRule) -> HopfElement {
    let mut memo = BTreeMap::new();
    let mut out = HopfElement::zero();
    for (m, c) in x.terms() {
        let mut t = HopfElement::scalar(c.clone());
        for g in m {
            t = t.mul(&antipode_generator(g, rule, &mut memo));
        }
        out = out.add(&t);
    }
    out
}

fn antipode_generator(
    g: &str,
    rule: &dyn SubgraphRule,
    memo: &mut BTreeMap<String, HopfElement>,
) -> HopfElement {
    if let Some(s) = memo.get(g) {
        return s.clone();
    }
    let mut s = HopfElement::generator(g).scale(&rat(-1));
    for entry in rule.subgraphs(g) {
        let mut left = HopfElement::unit();
        for h in &entry.gamma {
            left = left.mul(&antipode_generator(h, rule, memo));
        }
        s = s.sub(&left.mul(&HopfElement::monomial(entry.quotient.clone())));
    }
    memo.insert(g.to_string(), s.clone());
    s
}

/// `m ∘ (f ⊗ g) ∘ Δ` for linear maps `f, g` on monomials.
pub fn apply_tensor(
    t: &Tensor,
    f: &dyn Fn(&Monomial) -> HopfElement,
    g: &dyn Fn(&Monomial) -> HopfElement,
) -> HopfElement {
    let mut out = HopfElement::zero();
    for ((a, b), c) in t.terms() {
        out = out.add(&f(a).mul(&g(b)).scale(c));
    }
    out
}

/// A minimal undirected multigraph used to enumerate divergent subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SimpleGraph {
    vertices: usize,
    edges: Vec<(usize, usize, String)>,
}

impl SimpleGraph {
    fn from_feynman(g: &FeynmanGraph) -> Self {
        Self {
            vertices: g.vertex_count(),
            edges: (0..g.edge_count())
                .map(|i| {
                    let (s, t) = g.endpoints(i);
                    (s, t, format_rational(&g.internal_edges()[i].mass))
                })
                .collect(),
        }
    }

    fn loops(&self) -> usize {
        (self.edges.len() + components(self.vertices, self.edges.iter().map(|e| (e.0, e.1))))
            .saturating_sub(self.vertices)
    }

    /// Canonical label, minimal over vertex permutations.
    fn canonical(&self) -> String {
        let n = self.vertices;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<(usize, usize, String)>> = None;
        loop {
            let mut e: Vec<(usize, usize, String)> = self
                .edges
                .iter()
                .map(|(a, b, m)| {
                    let (x, y) = (perm[*a], perm[*b]);
                    (x.min(y), x.max(y), m.clone())
                })
                .collect();
            e.sort();
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        let body: Vec<String> = best
            .unwrap_or_default()
            .iter()
            .map(|(a, b, m)| format!("{a}-{b}:{m}"))
            .collect();
        format!("G{n}[{}]", body.join(","))
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

fn components(vertices: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut uf = crate::graph::UnionFind::new(vertices);
    let mut count = vertices;
    for (a, b) in edges {
        if uf.union(a, b) {
            count -= 1;
        }
    }
    count
}

/// Builds the subgraph table of the divergence rule: admissible `γ` are
/// products of vertex-disjoint proper 1PI subgraphs, each with superficial
/// degree `≥ 0` at the given dimension and `α`. Quotients and subgraph
/// components are added to the table under canonical names unless they are
/// isomorphic to a named input graph.
pub fn divergence_table(
    graphs: &[FeynmanGraph],
    dimension: usize,
    alpha: &Rational,
) -> FixtureTable {
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let mut queue: Vec<(String, SimpleGraph)> = Vec::new();
    for g in graphs {
        let s = SimpleGraph::from_feynman(g);
        names.insert(s.canonical(), g.name().to_string());
        queue.push((g.name().to_string(), s));
    }
    let mut table = FixtureTable::new();
    let two_alpha = alpha * rat(2);
    let divergent = |s: &SimpleGraph| -> bool {
        let delta = rat((dimension * s.loops()) as i64) - &two_alpha * rat(s.edges.len() as i64);
        delta >= Rational::zero()
    };
    while let Some((name, graph)) = queue.pop() {
        if table.loops.contains_key(&name) {
            continue;
        }
        let mut entries = Vec::new();
        let n = graph.edges.len();
        for mask in 1u64..(1u64 << n) - 1 {
            let chosen: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let Some(parts) = one_pi_components(&graph, &chosen) else {
                continue;
            };
            if !parts.iter().all(divergent) {
                continue;
            }
            let mut gamma = Vec::new();
            for p in &parts {
                let label = p.canonical();
                let pname = names.entry(label.clone()).or_insert(label).clone();
                queue.push((pname.clone(), p.clone()));
                gamma.push(pname);
            }
            let quotient = contract(&graph, &chosen);
            let qlabel = quotient.canonical();
            let qname = names.entry(qlabel.clone()).or_insert(qlabel).clone();
            queue.push((qname.clone(), quotient));
            gamma.sort();
            entries.push(SubgraphEntry {
                gamma,
                quotient: vec![qname],
            });
        }
        entries.sort_by(|a, b| (&a.gamma, &a.quotient).cmp(&(&b.gamma, &b.quotient)));
        table.insert(&name, graph.loops(), entries);
    }
    table
}

/// Components of the edge subset, if each is 1PI with at least one loop.
fn one_pi_components(graph: &SimpleGraph, chosen: &[usize]) -> Option<Vec<SimpleGraph>> {
    let mut uf = crate::graph::UnionFind::new(graph.vertices);
    for &i in chosen {
        let (a, b, _) = &graph.edges[i];
        uf.union(*a, *b);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in chosen {
        groups.entry(uf.find(graph.edges[i].0)).or_default().push(i);
    }
    let mut parts = Vec::new();
    for edges in groups.values() {
        let mut vs: Vec<usize> = edges
            .iter()
            .flat_map(|&i| [graph.edges[i].0, graph.edges[i].1])
            .collect();
        vs.sort();
        vs.dedup();
        let index = |v: usize| vs.binary_search(&v).unwrap();
        let part = SimpleGraph {
            vertices: vs.len(),
            edges: edges
                .iter()
                .map(|&i| {
                    let (a, b, m) = &graph.edges[i];
                    (index(*a), index(*b), m.clone())
                })
                .collect(),
        };
        if part.loops() == 0 {
            return None;
        }
        // bridgeless: dropping any edge keeps the component connected
        for skip in 0..part.edges.len() {
            let rest = part
                .edges
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .map(|(_, e)| (e.0, e.1));
            if components(part.vertices, rest) != 1 {
                return None;
            }
        }
        parts.push(part);
    }
    Some(parts)
}

/// Contracts every chosen edge, merging its endpoints.
fn contract(graph: &SimpleGraph, chosen: &[usize]) -> SimpleGraph {
    let mut uf = crate::graph::UnionFind::new(graph.vertices);
    for &i in chosen {
        uf.union(graph.edges[i].0, graph.edges[i].1);
    }
    let mut roots: Vec<usize> = (0..graph.vertices).map(|v| uf.find(v)).collect();
    let mut distinct = roots.clone();
    distinct.sort();
    distinct.dedup();
    for r in roots.iter_mut() {
        *r = distinct.binary_search(r).unwrap();
    }
    SimpleGraph {
        vertices: distinct.len(),
        edges: graph
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(_, (a, b, m))| (roots[*a], roots[*b], m.clone()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixtures() -> FixtureTable {
        FixtureTable::from_json(
            r#"[
                {"graph": "a"}, {"graph": "b"}, {"graph": "c"},
                {"graph": "G2", "subgraphs": [{"gamma": "a", "quotient": "a"}]},
                {"graph": "G3", "subgraphs": [
                    {"gamma": "a", "quotient": "G2"},
                    {"gamma": "G2", "quotient": "a"}
                ]},
                {"graph": "Xa", "subgraphs": [{"gamma": "a", "quotient": "c"}]},
                {"graph": "Xb", "subgraphs": [{"gamma": "b", "quotient": "c"}]},
                {"graph": "H", "subgraphs": [
                    {"gamma": "a", "quotient": "Xb"},
                    {"gamma": "b", "quotient": "Xa"},
                    {"gamma": ["a", "b"], "quotient": "c"}
                ]}
            ]"#,
        )
        .unwrap()
    }

    #[test]
    fn loops_are_inferred() {
        let t = fixtures();
        assert_eq!(t.loops("a"), 1);
        assert_eq!(t.loops("G2"), 2);
        assert_eq!(t.loops("G3"), 3);
        assert_eq!(t.loops("H"), 3);
        assert_eq!(t.loops("Xb"), 2);
        assert_eq!(t.loops("c"), 1);
    }

    #[test]
    fn primitive_coproduct() {
        let t = fixtures();
        let d = coproduct(&HopfElement::generator("a"), &t);
        assert_eq!(d.len(), 2);
        assert_eq!(d.coefficient(&["a"], &[]), rat(1));
        assert_eq!(d.coefficient(&[], &["a"]), rat(1));
    }

    #[test]
    fn product_coproduct_is_multiplicative() {
        let t = fixtures();
        let ab = HopfElement::monomial(vec!["a".into(), "b".into()]);
        let d = coproduct(&ab, &t);
        assert_eq!(d.len(), 4);
        assert_eq!(d.coefficient(&["a"], &["b"]), rat(1));
        assert_eq!(d.coefficient(&["b"], &["a"]), rat(1));
        assert_eq!(d.coefficient(&["a", "b"], &[]), rat(1));
    }

    #[test]
    fn one_subgraph_antipode() {
        let t = fixtures();
        assert_eq!(
            antipode(&HopfElement::generator("a"), &t),
            HopfElement::generator("a").scale(&rat(-1))
        );
        assert_eq!(antipode(&HopfElement::unit(), &t), HopfElement::unit());
        // S(G2) = -G2 - S(a) a = -G2 + a^2
        let expected = HopfElement::generator("G2")
            .scale(&rat(-1))
            .add(&HopfElement::monomial(vec!["a".into(), "a".into()]));
        assert_eq!(antipode(&HopfElement::generator("G2"), &t), expected);
    }

    #[test]
    fn malformed_fixtures() {
        assert!(FixtureTable::from_json(r#"[{"graph": "a", "bogus": 1}]"#).is_err());
        assert!(FixtureTable::from_json(r#"[{"graph": "a"}, {"graph": "a"}]"#).is_err());
        assert!(FixtureTable::from_json(
            r#"[{"graph": "x", "loops": 5, "subgraphs": [{"gamma": "a", "quotient": "b"}]}]"#
        )
        .is_err());
    }

    #[test]
    fn divergence_rule_on_sunset() {
        let g = FeynmanGraph::sunset([rat(1), rat(1), rat(1)], 4).unwrap();
        let t = divergence_table(&[g], 4, &rat(1));
        let subs = t.subgraphs("sunset");
        // each pair of edges forms a logarithmically divergent bubble
        assert_eq!(subs.len(), 3);
        let bubble = &subs[0].gamma[0];
        assert_eq!(t.loops(bubble), 1);
        assert_eq!(t.loops(&subs[0].quotient[0]), 1);
        assert!(t.subgraphs(bubble).is_empty());

        let convergent = FeynmanGraph::sunset([rat(1), rat(1), rat(1)], 2).unwrap();
        assert!(divergence_table(&[convergent], 2, &rat(1))
            .subgraphs("sunset")
            .is_empty());
    }
}
