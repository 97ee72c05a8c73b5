//! Nets of quadrics attached to a massive graph and their ε-deformations.
//!
//! Coordinates on the ambient projective space are `u = (u0, u1, ..., u_{LD})`
//! with `u0` the homogenizing variable and `(u_{jD+1}, ..., u_{(j+1)D})` the
//! components of the `j`-th loop momentum.
//!
//! Every form produced here carries a reduced factorization witness `T̄`, a
//! diagonal `LD x LD` matrix whose entry on slot `(j, r)` is the coefficient
//! of loop momentum `j` in the edge momentum. The form itself is
//! `diag(m², T̄ᵀT̄)`, i.e. the diagonal part of the propagator restricted to
//! the conservation subspace. With this representation the conservation law
//! `Σ_{s(e)=v} T̄_e = Σ_{t(e)=v} T̄_e` is an exact matrix identity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{FeynmanGraph, GraphError, MomentumRelations, SpanningTree};
use crate::linalg::RatMatrix;
use crate::rational::{exact_sqrt, format_rational, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadricError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has no loops: the projective ambient space is empty")]
    EmptyLoopSpace,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("deformation schedule is inconsistent: {reason}")]
    ScheduleInconsistent { reason: String },
    #[error("spanning tree {given:?} differs from the tree {expected:?} the net was built with")]
    TreeMismatch {
        given: Vec<String>,
        expected: Vec<String>,
    },
    #[error("malformed net dump at {location}: {message}")]
    MalformedDump { location: String, message: String },
}

/// `q(u) = <u, A u>` for a symmetric rational matrix `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: RatMatrix,
}

impl QuadraticForm {
    pub fn new(matrix: RatMatrix) -> Result<Self, QuadricError> {
        if !matrix.is_symmetric() {
            return Err(QuadricError::NotSymmetric);
        }
        Ok(Self { matrix })
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        Self {
            matrix: RatMatrix::from_diagonal(entries),
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn evaluate(&self, u: &[Rational]) -> Rational {
        self.matrix
            .mul_vec(u)
            .iter()
            .zip(u)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Coefficient of `u0²`.
    pub fn mass_term(&self) -> &Rational {
        &self.matrix[(0, 0)]
    }

    pub fn determinant(&self) -> Rational {
        self.matrix.determinant()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.matrix.is_positive_definite()
    }
}

/// A positive-definite real form vanishes at no real point.
pub fn no_real_points(form: &QuadraticForm) -> bool {
    form.is_positive_definite()
}

/// Propagators `k_i² + m_i² x²` in the `nD + 1` variables `(x, k_1, ..., k_n)`.
pub fn build_raw_forms(graph: &FeynmanGraph) -> Vec<QuadraticForm> {
    let d = graph.dimension();
    let n = graph.edge_count();
    graph
        .internal_edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut diag = vec![Rational::zero(); n * d + 1];
            diag[0] = &e.mass * &e.mass;
            for r in 0..d {
                diag[1 + i * d + r] = Rational::one();
            }
            QuadraticForm::diagonal(&diag)
        })
        .collect()
}

/// Substitution matrix `(nD+1) x (LD+1)` sending `(x, ℓ)` to `(x, k(ℓ))`.
pub fn substitution_matrix(relations: &MomentumRelations) -> RatMatrix {
    let d = relations.dimension;
    let n = relations.edge_count();
    let l = relations.loop_count();
    let mut s = RatMatrix::zeros(n * d + 1, l * d + 1);
    s[(0, 0)] = Rational::one();
    for (i, row) in relations.coefficients.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            for r in 0..d {
                s[(1 + i * d + r, 1 + j * d + r)] = rat(c);
            }
        }
    }
    s
}

/// Full pullback `Sᵀ A S` of each raw form to the conservation subspace,
/// including cross terms between distinct loop momenta.
pub fn exact_restriction(
    forms: &[QuadraticForm],
    relations: &MomentumRelations,
) -> Vec<QuadraticForm> {
    let s = substitution_matrix(relations);
    let st = s.transpose();
    forms
        .iter()
        .map(|f| QuadraticForm {
            matrix: st.mul(&f.matrix).mul(&s),
        })
        .collect()
}

/// One quadric of a net together with the edge it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetForm {
    pub edge: String,
    /// `(source, target)` vertex indices; `None` for free-standing forms.
    pub endpoints: Option<(usize, usize)>,
    pub form: QuadraticForm,
    /// Reduced witness `T̄ = P T P`, an `LD x LD` matrix.
    pub reduced_witness: Option<RatMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricNet {
    pub graph: String,
    pub dimension: usize,
    pub vertices: Vec<String>,
    /// Ids of the spanning-tree edges used to choose loop momenta.
    pub tree: Vec<String>,
    pub epsilon: Rational,
    pub forms: Vec<NetForm>,
}

impl QuadricNet {
    /// `LD`, the dimension of the projective ambient space.
    pub fn ambient_dimension(&self) -> usize {
        self.forms.first().map_or(0, |f| f.form.size() - 1)
    }

    pub fn form_count(&self) -> usize {
        self.forms.len()
    }

    pub fn matrices(&self) -> Vec<&RatMatrix> {
        self.forms.iter().map(|f| f.form.matrix()).collect()
    }

    /// Builds the undeformed net of `graph` with loop momenta on the
    /// complement of `tree`.
    pub fn from_graph(graph: &FeynmanGraph, tree: &SpanningTree) -> Result<Self, QuadricError> {
        let relations = graph.momentum_relations(tree)?;
        let raw = build_raw_forms(graph);
        restrict_to_subspace(graph, &raw, &relations)
    }

    /// A net with no graph structure, e.g. a single propagator.
    pub fn free_standing(
        name: &str,
        dimension: usize,
        forms: Vec<QuadraticForm>,
    ) -> Result<Self, QuadricError> {
        let size = forms.first().map_or(0, QuadraticForm::size);
        if let Some(f) = forms.iter().find(|f| f.size() != size) {
            return Err(QuadricError::DimensionMismatch {
                expected: size,
                found: f.size(),
            });
        }
        Ok(Self {
            graph: name.to_string(),
            dimension,
            vertices: Vec::new(),
            tree: Vec::new(),
            epsilon: Rational::zero(),
            forms: forms
                .into_iter()
                .enumerate()
                .map(|(i, form)| NetForm {
                    edge: format!("q{}", i + 1),
                    endpoints: None,
                    form,
                    reduced_witness: None,
                })
                .collect(),
        })
    }

    /// `diag(m², 1, ..., 1)` in `D + 1` variables: one free propagator.
    pub fn single_propagator(dimension: usize, mass: &Rational) -> Self {
        let mut diag = vec![Rational::one(); dimension + 1];
        diag[0] = mass * mass;
        let mut net = Self::free_standing(
            "propagator",
            dimension,
            vec![QuadraticForm::diagonal(&diag)],
        )
        .expect("a single form is always consistent");
        net.forms[0].reduced_witness = Some(RatMatrix::identity(dimension));
        net
    }
}

/// Restricts the raw propagators to the conservation subspace `H_Γ`, keeping
/// the diagonal part `diag(Sᵀ A S)` and recording the witness `T̄`.
pub fn restrict_to_subspace(
    graph: &FeynmanGraph,
    forms: &[QuadraticForm],
    relations: &MomentumRelations,
) -> Result<QuadricNet, QuadricError> {
    let l = relations.loop_count();
    if l == 0 {
        return Err(QuadricError::EmptyLoopSpace);
    }
    let d = relations.dimension;
    let expected = relations.edge_count() * d + 1;
    if let Some(f) = forms.iter().find(|f| f.size() != expected) {
        return Err(QuadricError::DimensionMismatch {
            expected,
            found: f.size(),
        });
    }
    let pulled = exact_restriction(forms, relations);
    let tree: Vec<String> = graph
        .internal_edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !relations.loop_edges.contains(i))
        .map(|(_, e)| e.id.clone())
        .collect();
    let net_forms = pulled
        .into_iter()
        .zip(graph.internal_edges())
        .enumerate()
        .map(|(i, (full, edge))| {
            let witness: Vec<Rational> = (0..l * d)
                .map(|slot| rat(relations.coefficients[i][slot / d]))
                .collect();
            NetForm {
                edge: edge.id.clone(),
                endpoints: Some(relations.endpoints[i]),
                form: QuadraticForm::diagonal(&full.matrix.diagonal()),
                reduced_witness: Some(RatMatrix::from_diagonal(&witness)),
            }
        })
        .collect();
    Ok(QuadricNet {
        graph: graph.name().to_string(),
        dimension: d,
        vertices: graph.vertices().to_vec(),
        tree,
        epsilon: Rational::zero(),
        forms: net_forms,
    })
}

/// How the off-tree forms are filled in on the slots they do not touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationSchedule {
    /// The `r`-th missing slot (1-based, in coordinate order) gets `ε^{2r}`.
    #[default]
    Paper,
    /// Every missing slot gets `ε²`.
    Uniform,
}

impl std::str::FromStr for DeformationSchedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Self::Paper),
            "uniform" => Ok(Self::Uniform),
            other => Err(format!("unknown deformation schedule {other:?}")),
        }
    }
}

impl fmt::Display for DeformationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Uniform => "uniform",
        })
    }
}

/// Univariate polynomial in ε with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct EpsilonPolynomial(Vec<Rational>);

impl EpsilonPolynomial {
    pub fn constant(c: Rational) -> Self {
        Self(vec![c]).normalized()
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self(coeffs).normalized()
    }

    /// `ε`.
    pub fn epsilon() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::constant(Rational::one()), |acc, _| &acc * self)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn evaluate(&self, eps: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * eps + c)
    }

    fn normalized(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }
}

impl fmt::Debug for EpsilonPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for EpsilonPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*eps"),
                _ => format!("{c}*eps^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &EpsilonPolynomial {
    type Output = EpsilonPolynomial;

    fn add(self, rhs: &EpsilonPolynomial) -> EpsilonPolynomial {
        let n = self.0.len().max(rhs.0.len());
        let zero = Rational::zero();
        EpsilonPolynomial(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&zero) + rhs.0.get(k).unwrap_or(&zero))
                .collect(),
        )
        .normalized()
    }
}

impl Neg for &EpsilonPolynomial {
    type Output = EpsilonPolynomial;

    fn neg(self) -> EpsilonPolynomial {
        EpsilonPolynomial(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &EpsilonPolynomial {
    type Output = EpsilonPolynomial;

    fn sub(self, rhs: &EpsilonPolynomial) -> EpsilonPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &EpsilonPolynomial {
    type Output = EpsilonPolynomial;

    fn mul(self, rhs: &EpsilonPolynomial) -> EpsilonPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return EpsilonPolynomial::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        EpsilonPolynomial(out).normalized()
    }
}

/// A deformation with entries kept symbolic in ε.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicDeformation {
    /// Per form: mass term and the diagonal of `T̄_ε`.
    pub mass_terms: Vec<Rational>,
    pub reduced_witnesses: Vec<Vec<EpsilonPolynomial>>,
}

impl SymbolicDeformation {
    /// Diagonal of `A_{i,ε}` as polynomials in ε.
    pub fn matrix_diagonals(&self) -> Vec<Vec<EpsilonPolynomial>> {
        self.mass_terms
            .iter()
            .zip(&self.reduced_witnesses)
            .map(|(m, w)| {
                std::iter::once(EpsilonPolynomial::constant(m.clone()))
                    .chain(w.iter().map(|t| t * t))
                    .collect()
            })
            .collect()
    }
}

/// Computes the deformation symbolically: off-tree forms are completed by the
/// schedule, tree forms are then solved from momentum conservation, sweeping
/// inward from the leaves of the tree.
pub fn symbolic_deformation(
    net: &QuadricNet,
    schedule: DeformationSchedule,
) -> Result<SymbolicDeformation, QuadricError> {
    let ld = net.ambient_dimension();
    let mut witnesses: Vec<Option<Vec<EpsilonPolynomial>>> = vec![None; net.forms.len()];
    let mut mass_terms = Vec::with_capacity(net.forms.len());

    for (i, f) in net.forms.iter().enumerate() {
        mass_terms.push(f.form.mass_term().clone());
        if f.endpoints.is_none() {
            return Err(QuadricError::ScheduleInconsistent {
                reason: format!("form {} has no graph edge", f.edge),
            });
        }
        let Some(w) = &f.reduced_witness else {
            return Err(QuadricError::ScheduleInconsistent {
                reason: format!("form {} has no factorization witness", f.edge),
            });
        };
        if !w.is_diagonal() {
            return Err(QuadricError::ScheduleInconsistent {
                reason: format!("witness of form {} is not diagonal", f.edge),
            });
        }
        if net.tree.contains(&f.edge) {
            continue;
        }
        let mut missing = 0u32;
        let entries = w
            .diagonal()
            .into_iter()
            .map(|t| {
                if t.is_zero() {
                    missing += 1;
                    let power = match schedule {
                        DeformationSchedule::Paper => missing,
                        DeformationSchedule::Uniform => 1,
                    };
                    EpsilonPolynomial::epsilon().pow(power)
                } else {
                    EpsilonPolynomial::constant(t)
                }
            })
            .collect();
        witnesses[i] = Some(entries);
    }

    let vertex_count = net.vertices.len();
    loop {
        let mut next: Option<(usize, usize)> = None;
        for v in 0..vertex_count {
            let pending: Vec<usize> = (0..net.forms.len())
                .filter(|&i| witnesses[i].is_none() && touches(net, i, v))
                .collect();
            if let [e] = pending[..] {
                if next.is_none_or(|(best, _)| e < best) {
                    next = Some((e, v));
                }
            }
        }
        let Some((e, v)) = next else { break };
        let mut acc = vec![EpsilonPolynomial::default(); ld];
        for (i, w) in witnesses.iter().enumerate() {
            let (Some(w), true) = (w, touches(net, i, v)) else {
                continue;
            };
            let sign = incidence_sign(net, i, v);
            for (slot, t) in w.iter().enumerate() {
                acc[slot] = if sign > 0 {
                    &acc[slot] + t
                } else {
                    &acc[slot] - t
                };
            }
        }
        // ε_{v,e} T̄_e = -Σ_{i≠e} ε_{v,i} T̄_i
        let solved = if incidence_sign(net, e, v) > 0 {
            acc.iter().map(|t| -t).collect()
        } else {
            acc
        };
        witnesses[e] = Some(solved);
    }

    let unresolved: Vec<String> = witnesses
        .iter()
        .zip(&net.forms)
        .filter(|(w, _)| w.is_none())
        .map(|(_, f)| f.edge.clone())
        .collect();
    if !unresolved.is_empty() {
        return Err(QuadricError::ScheduleInconsistent {
            reason: format!("tree sweep could not determine forms {unresolved:?}"),
        });
    }
    Ok(SymbolicDeformation {
        mass_terms,
        reduced_witnesses: witnesses.into_iter().map(Option::unwrap).collect(),
    })
}

fn touches(net: &QuadricNet, form: usize, vertex: usize) -> bool {
    net.forms[form]
        .endpoints
        .is_some_and(|(s, t)| s != t && (s == vertex || t == vertex))
}

fn incidence_sign(net: &QuadricNet, form: usize, vertex: usize) -> i32 {
    match net.forms[form].endpoints {
        Some((s, t)) if s == vertex && t != vertex => 1,
        Some((s, t)) if t == vertex && s != vertex => -1,
        _ => 0,
    }
}

/// Evaluates the symbolic deformation of `net` at `epsilon`.
pub fn deform_net(
    net: &QuadricNet,
    tree: &SpanningTree,
    graph: &FeynmanGraph,
    epsilon: &Rational,
    schedule: DeformationSchedule,
) -> Result<QuadricNet, QuadricError> {
    let given = tree.edge_ids(graph);
    if given != net.tree {
        return Err(QuadricError::TreeMismatch {
            given,
            expected: net.tree.clone(),
        });
    }
    deform_with_own_tree(net, epsilon, schedule)
}

/// Like [`deform_net`] with the tree recorded in the net.
pub fn deform_with_own_tree(
    net: &QuadricNet,
    epsilon: &Rational,
    schedule: DeformationSchedule,
) -> Result<QuadricNet, QuadricError> {
    let symbolic = symbolic_deformation(net, schedule)?;
    Ok(evaluate_deformation(net, &symbolic, epsilon))
}

pub fn evaluate_deformation(
    net: &QuadricNet,
    symbolic: &SymbolicDeformation,
    epsilon: &Rational,
) -> QuadricNet {
    let forms = net
        .forms
        .iter()
        .zip(&symbolic.reduced_witnesses)
        .zip(&symbolic.mass_terms)
        .map(|((f, w), m)| {
            let t: Vec<Rational> = w.iter().map(|p| p.evaluate(epsilon)).collect();
            let mut diag = vec![m.clone()];
            diag.extend(t.iter().map(|x| x * x));
            NetForm {
                edge: f.edge.clone(),
                endpoints: f.endpoints,
                form: QuadraticForm::diagonal(&diag),
                reduced_witness: Some(RatMatrix::from_diagonal(&t)),
            }
        })
        .collect();
    QuadricNet {
        epsilon: epsilon.clone(),
        forms,
        ..net.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorizationWitness {
    /// `T` materialized and `TᵀT = A` verified by exact multiplication.
    Exact {
        #[serde(serialize_with = "serialize_matrix")]
        t: RatMatrix,
    },
    /// Positivity certified by leading principal minors only.
    MinorCertified,
}

impl FactorizationWitness {
    /// Materializes `T` from the mass term and the reduced witness when all
    /// square roots involved are rational, and checks `TᵀT = A`.
    pub fn for_form(form: &NetForm) -> Option<Self> {
        let a = form.form.matrix();
        let m = exact_sqrt(form.form.mass_term())?;
        let n = a.rows();
        let mut t = RatMatrix::zeros(n, n);
        t[(0, 0)] = m;
        match &form.reduced_witness {
            Some(w) => {
                if w.rows() != n - 1 || w.cols() != n - 1 {
                    return None;
                }
                for r in 0..n - 1 {
                    for c in 0..n - 1 {
                        t[(r + 1, c + 1)] = w[(r, c)].clone();
                    }
                }
            }
            None => {
                if !a.is_diagonal() {
                    return None;
                }
                for i in 1..n {
                    t[(i, i)] = exact_sqrt(&a[(i, i)])?;
                }
            }
        }
        (t.transpose().mul(&t) == *a).then_some(Self::Exact { t })
    }
}

fn serialize_matrix<S: serde::Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(format_rational).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormConditions {
    pub edge: String,
    #[serde(with = "crate::rational::serde_str")]
    pub determinant: Rational,
    #[serde(with = "crate::rational::serde_str_vec")]
    pub leading_minors: Vec<Rational>,
    pub witness: FactorizationWitness,
}

/// Outcome of the four deformation conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    /// (i) every `det A_{i,ε} ≠ 0`.
    pub smooth: bool,
    /// (ii) all entries real; always true for rational input.
    pub real: bool,
    /// (iii) every `A_{i,ε}` positive definite, so `A = TᵀT` with `T` invertible.
    pub positive: bool,
    /// (iv) conservation of the reduced witnesses at every vertex.
    pub conservation: bool,
    pub offending_vertices: Vec<String>,
    pub forms: Vec<FormConditions>,
    pub failures: Vec<String>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.smooth && self.real && self.positive && self.conservation
    }
}

pub fn verify_conditions(net: &QuadricNet) -> ConditionReport {
    let mut failures = Vec::new();
    let mut smooth = true;
    let mut positive = true;
    let mut forms = Vec::with_capacity(net.forms.len());
    for f in &net.forms {
        let det = f.form.determinant();
        if det.is_zero() {
            smooth = false;
            failures.push(format!("(i) det A[{}] = 0", f.edge));
        }
        let minors = f.form.matrix().leading_principal_minors();
        let pd = f.form.matrix().is_symmetric() && minors.iter().all(Signed::is_positive);
        let witness = match FactorizationWitness::for_form(f) {
            Some(w) => w,
            None => {
                if f.reduced_witness.is_some() && exact_sqrt(f.form.mass_term()).is_some() {
                    positive = false;
                    failures.push(format!("(iii) witness of {} does not factor A", f.edge));
                }
                FactorizationWitness::MinorCertified
            }
        };
        if !pd {
            positive = false;
            failures.push(format!("(iii) A[{}] is not positive definite", f.edge));
        }
        forms.push(FormConditions {
            edge: f.edge.clone(),
            determinant: det,
            leading_minors: minors,
            witness,
        });
    }

    let mut offending_vertices = Vec::new();
    let mut conservation = true;
    let ld = net.ambient_dimension();
    for (v, name) in net.vertices.iter().enumerate() {
        let mut sum = RatMatrix::zeros(ld, ld);
        for (i, f) in net.forms.iter().enumerate() {
            let sign = incidence_sign(net, i, v);
            if sign == 0 {
                continue;
            }
            let Some(w) = &f.reduced_witness else {
                conservation = false;
                failures.push(format!("(iv) form {} has no reduced witness", f.edge));
                continue;
            };
            sum = sum.add(&w.scale(&rat(sign.into())));
        }
        if !sum.is_zero() {
            conservation = false;
            offending_vertices.push(name.clone());
            failures.push(format!("(iv) conservation fails at vertex {name}"));
        }
    }
    failures.dedup();

    ConditionReport {
        epsilon: net.epsilon.clone(),
        smooth,
        real: true,
        positive,
        conservation,
        offending_vertices,
        forms,
        failures,
    }
}

/// Serialized net: each form as a dense lower triangle of rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetDump {
    pub graph: String,
    pub dimension: usize,
    pub epsilon: String,
    pub tree: Vec<String>,
    pub vertices: Vec<String>,
    pub forms: Vec<FormDump>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDump {
    pub edge: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub lower: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_witness: Option<Vec<Vec<String>>>,
}

impl QuadricNet {
    pub fn to_dump(&self) -> NetDump {
        let strings = |rows: Vec<Vec<Rational>>| -> Vec<Vec<String>> {
            rows.iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect()
        };
        NetDump {
            graph: self.graph.clone(),
            dimension: self.dimension,
            epsilon: format_rational(&self.epsilon),
            tree: self.tree.clone(),
            vertices: self.vertices.clone(),
            forms: self
                .forms
                .iter()
                .map(|f| FormDump {
                    edge: f.edge.clone(),
                    source: f.endpoints.map(|(s, _)| self.vertices[s].clone()),
                    target: f.endpoints.map(|(_, t)| self.vertices[t].clone()),
                    lower: strings(f.form.matrix().lower_triangle()),
                    reduced_witness: f
                        .reduced_witness
                        .as_ref()
                        .map(|w| strings((0..w.rows()).map(|r| w.row(r).to_vec()).collect())),
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &NetDump) -> Result<Self, QuadricError> {
        let parse = |location: String, text: &str| {
            parse_rational(text).map_err(|e| QuadricError::MalformedDump {
                location,
                message: e.to_string(),
            })
        };
        let epsilon = parse("epsilon".into(), &dump.epsilon)?;
        let vertex_index =
            |location: String, name: &Option<String>| -> Result<Option<usize>, QuadricError> {
                match name {
                    None => Ok(None),
                    Some(n) => dump.vertices.iter().position(|v| v == n).map(Some).ok_or(
                        QuadricError::MalformedDump {
                            location,
                            message: format!("unknown vertex {n:?}"),
                        },
                    ),
                }
            };
        let mut forms = Vec::with_capacity(dump.forms.len());
        let mut size = None;
        for (i, f) in dump.forms.iter().enumerate() {
            let loc = format!("forms[{i}]");
            let lower = f
                .lower
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(c, x)| parse(format!("{loc}.lower[{r}][{c}]"), x))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let matrix =
                RatMatrix::from_lower_triangle(&lower).ok_or(QuadricError::MalformedDump {
                    location: format!("{loc}.lower"),
                    message: "rows must have lengths 1, 2, 3, ...".into(),
                })?;
            if *size.get_or_insert(matrix.rows()) != matrix.rows() {
                return Err(QuadricError::MalformedDump {
                    location: format!("{loc}.lower"),
                    message: "forms have different sizes".into(),
                });
            }
            let reduced_witness = match &f.reduced_witness {
                None => None,
                Some(rows) => {
                    let parsed = rows
                        .iter()
                        .enumerate()
                        .map(|(r, row)| {
                            row.iter()
                                .enumerate()
                                .map(|(c, x)| parse(format!("{loc}.reduced_witness[{r}][{c}]"), x))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if parsed.len() + 1 != matrix.rows()
                        || parsed.iter().any(|r| r.len() != parsed.len())
                    {
                        return Err(QuadricError::MalformedDump {
                            location: format!("{loc}.reduced_witness"),
                            message: "witness must be square of size LD".into(),
                        });
                    }
                    Some(RatMatrix::from_rows(parsed))
                }
            };
            let endpoints = match (
                vertex_index(format!("{loc}.source"), &f.source)?,
                vertex_index(format!("{loc}.target"), &f.target)?,
            ) {
                (Some(s), Some(t)) => Some((s, t)),
                (None, None) => None,
                _ => {
                    return Err(QuadricError::MalformedDump {
                        location: loc,
                        message: "source and target must be given together".into(),
                    })
                }
            };
            forms.push(NetForm {
                edge: f.edge.clone(),
                endpoints,
                form: QuadraticForm { matrix },
                reduced_witness,
            });
        }
        Ok(QuadricNet {
            graph: dump.graph.clone(),
            dimension: dump.dimension,
            vertices: dump.vertices.clone(),
            tree: dump.tree.clone(),
            epsilon,
            forms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, rpow};

    fn sunset_net(d: usize) -> (FeynmanGraph, SpanningTree, QuadricNet) {
        let g = FeynmanGraph::sunset([rat(1), rat(2), rat(3)], d).unwrap();
        let tree = SpanningTree::from_ids(&g, &["e3"]).unwrap();
        let net = QuadricNet::from_graph(&g, &tree).unwrap();
        (g, tree, net)
    }

    fn diag_of(net: &QuadricNet, i: usize) -> Vec<Rational> {
        net.forms[i].form.matrix().diagonal()
    }

    #[test]
    fn raw_forms_are_propagators() {
        let g = FeynmanGraph::sunset([rat(1), rat(2), rat(3)], 2).unwrap();
        let raw = build_raw_forms(&g);
        assert_eq!(raw.len(), 3);
        let mut expected = vec![rat(0); 7];
        expected[0] = rat(1);
        expected[1] = rat(1);
        expected[2] = rat(1);
        assert_eq!(raw[0].matrix().diagonal(), expected);
        assert!(raw.iter().all(|f| f.matrix().is_diagonal()));
        assert_eq!(raw[2].mass_term(), &rat(9));
    }

    #[test]
    fn sunset_restriction_matches_closed_form() {
        let (_, _, net) = sunset_net(2);
        assert_eq!(net.ambient_dimension(), 4);
        assert_eq!(
            diag_of(&net, 0),
            vec![rat(1), rat(1), rat(1), rat(0), rat(0)]
        );
        assert_eq!(
            diag_of(&net, 1),
            vec![rat(4), rat(0), rat(0), rat(1), rat(1)]
        );
        assert_eq!(
            diag_of(&net, 2),
            vec![rat(9), rat(1), rat(1), rat(1), rat(1)]
        );
        assert!(net.forms.iter().all(|f| f.form.matrix().is_diagonal()));
    }

    #[test]
    fn restriction_is_diagonal_part_of_pullback() {
        let g = FeynmanGraph::sunset([rat(1), rat(2), rat(3)], 2).unwrap();
        let tree = g.first_tree();
        let rel = g.momentum_relations(&tree).unwrap();
        let raw = build_raw_forms(&g);
        let full = exact_restriction(&raw, &rel);
        let net = restrict_to_subspace(&g, &raw, &rel).unwrap();
        for (f, n) in full.iter().zip(&net.forms) {
            assert_eq!(f.matrix().diagonal(), n.form.matrix().diagonal());
        }
        // the tree edge k3 = -(l1 + l2) carries the cross term l1·l2
        assert_eq!(full[2].matrix()[(1, 3)], rat(1));
    }

    #[test]
    fn tree_graph_has_no_ambient_space() {
        let g = FeynmanGraph::parse(
            r#"{"name":"p","dimension":2,"vertices":["a","b"],
               "internal_edges":[{"id":"e","source":"a","target":"b","mass":"1"}]}"#,
        )
        .unwrap();
        assert_eq!(
            QuadricNet::from_graph(&g, &g.first_tree()),
            Err(QuadricError::EmptyLoopSpace)
        );
    }

    #[test]
    fn parallel_pair_restriction_and_deformation() {
        let g = FeynmanGraph::parse(
            r#"{"name":"bubble","dimension":1,"vertices":["a","b"],
               "internal_edges":[{"id":"e1","source":"a","target":"b","mass":"1"},
                                 {"id":"e2","source":"a","target":"b","mass":"2"}]}"#,
        )
        .unwrap();
        let tree = g.first_tree();
        let net = QuadricNet::from_graph(&g, &tree).unwrap();
        assert_eq!(diag_of(&net, 0), vec![rat(1), rat(1)]);
        assert_eq!(diag_of(&net, 1), vec![rat(4), rat(1)]);
        let eps = ratio(1, 3);
        let deformed = deform_net(&net, &tree, &g, &eps, DeformationSchedule::Paper).unwrap();
        assert_eq!(diag_of(&deformed, 0), diag_of(&net, 0));
        assert_eq!(diag_of(&deformed, 1), diag_of(&net, 1));
        let w1 = deformed.forms[0].reduced_witness.clone().unwrap();
        let w2 = deformed.forms[1].reduced_witness.clone().unwrap();
        assert_eq!(w1, w2.scale(&rat(-1)));
        assert!(verify_conditions(&deformed).all_hold());
    }

    #[test]
    fn sunset_default_schedule_closed_form() {
        for d in 1..=3usize {
            let (g, tree, net) = sunset_net(d);
            let eps = ratio(1, 5);
            let deformed = deform_net(&net, &tree, &g, &eps, DeformationSchedule::Paper).unwrap();
            let mut a1 = vec![rat(1)];
            let mut a2 = vec![rat(4)];
            let mut a3 = vec![rat(9)];
            a1.extend((0..d).map(|_| rat(1)));
            a1.extend((1..=d as u32).map(|r| rpow(&eps, 2 * r)));
            a2.extend((1..=d as u32).map(|r| rpow(&eps, 2 * r)));
            a2.extend((0..d).map(|_| rat(1)));
            for _ in 0..2 {
                a3.extend((1..=d as u32).map(|r| rpow(&(rat(1) + rpow(&eps, r)), 2)));
            }
            assert_eq!(diag_of(&deformed, 0), a1);
            assert_eq!(diag_of(&deformed, 1), a2);
            assert_eq!(diag_of(&deformed, 2), a3);
        }
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let (g, tree, net) = sunset_net(2);
        for schedule in [DeformationSchedule::Paper, DeformationSchedule::Uniform] {
            let same = deform_net(&net, &tree, &g, &rat(0), schedule).unwrap();
            assert_eq!(same.matrices(), net.matrices());
        }
    }

    #[test]
    fn symbolic_continuity() {
        let (_, _, net) = sunset_net(3);
        let sym = symbolic_deformation(&net, DeformationSchedule::Paper).unwrap();
        for (i, diag) in sym.matrix_diagonals().iter().enumerate() {
            let at_zero: Vec<Rational> = diag.iter().map(|p| p.evaluate(&rat(0))).collect();
            assert_eq!(at_zero, diag_of(&net, i));
        }
    }

    #[test]
    fn condition_report_on_sunset() {
        let (g, tree, net) = sunset_net(2);
        let deformed =
            deform_net(&net, &tree, &g, &ratio(1, 2), DeformationSchedule::Paper).unwrap();
        let report = verify_conditions(&deformed);
        assert!(report.all_hold(), "{:?}", report.failures);
        assert!(report
            .forms
            .iter()
            .all(|f| matches!(f.witness, FactorizationWitness::Exact { .. })));

        let undeformed = verify_conditions(&net);
        assert!(!undeformed.smooth);
        assert_eq!(undeformed.forms[0].determinant, rat(0));
        assert_eq!(undeformed.forms[1].determinant, rat(0));
        assert_ne!(undeformed.forms[2].determinant, rat(0));
        assert!(undeformed.conservation);
    }

    #[test]
    fn broken_conservation_is_located() {
        let (g, tree, net) = sunset_net(2);
        let mut deformed =
            deform_net(&net, &tree, &g, &ratio(1, 2), DeformationSchedule::Paper).unwrap();
        // perturb one λ on e1 without touching e3
        let w = deformed.forms[0].reduced_witness.as_mut().unwrap();
        w[(2, 2)] = ratio(1, 3);
        let diag: Vec<Rational> = std::iter::once(rat(1))
            .chain(w.diagonal().iter().map(|x| x * x))
            .collect();
        deformed.forms[0].form = QuadraticForm::diagonal(&diag);
        let report = verify_conditions(&deformed);
        assert!(report.smooth && report.positive);
        assert!(!report.conservation);
        assert_eq!(
            report.offending_vertices,
            vec!["v1".to_string(), "v2".to_string()]
        );
    }

    #[test]
    fn real_points() {
        assert!(no_real_points(&QuadraticForm::diagonal(&[
            rat(1),
            rat(1),
            rat(1)
        ])));
        assert!(!no_real_points(&QuadraticForm::diagonal(&[
            rat(1),
            rat(-1)
        ])));
        let (g, tree, net) = sunset_net(2);
        let deformed =
            deform_net(&net, &tree, &g, &ratio(1, 3), DeformationSchedule::Uniform).unwrap();
        assert!(no_real_points(&deformed.forms[2].form));
    }

    #[test]
    fn dump_round_trip() {
        let (g, tree, net) = sunset_net(2);
        let deformed =
            deform_net(&net, &tree, &g, &ratio(1, 2), DeformationSchedule::Paper).unwrap();
        let dump = deformed.to_dump();
        let json = serde_json::to_string(&dump).unwrap();
        let back = QuadricNet::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, deformed);
        assert_eq!(dump.forms[0].lower[2], vec!["0", "0", "1"]);
    }

    #[test]
    fn tree_mismatch_is_rejected() {
        let (g, _, net) = sunset_net(2);
        let other = SpanningTree::from_ids(&g, &["e1"]).unwrap();
        assert!(matches!(
            deform_net(&net, &other, &g, &ratio(1, 2), DeformationSchedule::Paper),
            Err(QuadricError::TreeMismatch { .. })
        ));
    }
}
