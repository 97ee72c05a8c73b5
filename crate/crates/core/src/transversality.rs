//! Smoothness certificates for intersections of the deformed sunset quadrics
//! and the search for an admissible deformation parameter.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::{FeynmanGraph, GraphError, SpanningTree};
use crate::linalg::RatMatrix;
use crate::quadric::{
    deform_net, verify_conditions, ConditionReport, DeformationSchedule, QuadraticForm,
    QuadricError, QuadricNet,
};
use crate::rational::{format_rational, rat, ratio, rpow, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransversalityError {
    #[error("point has length {found}, form has size {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("net does not match the deformed sunset template: {reason}")]
    UnsupportedNetShape { reason: String },
    #[error(
        "no admissible epsilon among 1/{first_k} .. 1/{cutoff}: {}",
        summarize(failures)
    )]
    SearchExhausted {
        first_k: u64,
        cutoff: u64,
        failures: Vec<String>,
    },
    #[error(transparent)]
    Quadric(#[from] QuadricError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn summarize(failures: &[String]) -> String {
    const SHOWN: usize = 3;
    let mut text = failures
        .iter()
        .take(SHOWN)
        .cloned()
        .collect::<Vec<_>>()
        .join("; ");
    if failures.len() > SHOWN {
        text.push_str(&format!("; and {} more", failures.len() - SHOWN));
    }
    text
}

/// `∇q(u) = 2 A u`.
pub fn gradient(
    form: &QuadraticForm,
    point: &[Rational],
) -> Result<Vec<Rational>, TransversalityError> {
    if point.len() != form.size() {
        return Err(TransversalityError::DimensionMismatch {
            expected: form.size(),
            found: point.len(),
        });
    }
    let two = rat(2);
    Ok(form
        .matrix()
        .mul_vec(point)
        .into_iter()
        .map(|x| x * &two)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub family: String,
    pub indices: Vec<usize>,
    #[serde(serialize_with = "serialize_rows")]
    pub matrix: RatMatrix,
    #[serde(with = "crate::rational::serde_str")]
    pub det: Rational,
}

impl Certificate {
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        format!("{}({})", self.family, idx.join(","))
    }
}

fn serialize_rows<S: serde::Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = (0..m.rows())
        .map(|r| m.row(r).iter().map(format_rational).collect())
        .collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateSet {
    pub certificates: Vec<Certificate>,
    pub all_nonzero: bool,
    pub first_failure: Option<String>,
}

impl CertificateSet {
    fn from_certificates(certificates: Vec<Certificate>) -> Self {
        let first_failure = certificates
            .iter()
            .find(|c| c.det.is_zero())
            .map(Certificate::label);
        Self {
            all_nonzero: first_failure.is_none(),
            first_failure,
            certificates,
        }
    }

    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }
}

/// Parameters of a net recognised as the deformed sunset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunsetTemplate {
    pub dimension: usize,
    pub epsilon: Rational,
    /// `m₁², m₂², m₃²`.
    pub mass_squares: [Rational; 3],
}

impl SunsetTemplate {
    /// Matches `net` against `A₁ = diag(m₁², 1.., ε^{2r}..)`,
    /// `A₂ = diag(m₂², ε^{2r}.., 1..)`, `A₃ = diag(m₃², (1+ε^r)².., (1+ε^r)²..)`.
    pub fn recognise(net: &QuadricNet) -> Result<Self, TransversalityError> {
        let unsupported = |reason: &str| TransversalityError::UnsupportedNetShape {
            reason: reason.to_string(),
        };
        if net.forms.len() != 3 {
            return Err(unsupported("expected exactly three quadrics"));
        }
        let d = net.dimension;
        if d == 0 || net.ambient_dimension() != 2 * d {
            return Err(unsupported("expected ambient dimension 2D"));
        }
        if net.forms.iter().any(|f| !f.form.matrix().is_diagonal()) {
            return Err(unsupported("expected diagonal forms"));
        }
        let eps = &net.epsilon;
        let one = Rational::one();
        let small: Vec<Rational> = (1..=d as u32).map(|r| rpow(eps, 2 * r)).collect();
        let shifted: Vec<Rational> = (1..=d as u32)
            .map(|r| rpow(&(&one + rpow(eps, r)), 2))
            .collect();
        let ones = vec![one.clone(); d];
        let expected: [Vec<Rational>; 3] = [
            [ones.clone(), small.clone()].concat(),
            [small, ones].concat(),
            [shifted.clone(), shifted].concat(),
        ];
        let mut mass_squares: [Rational; 3] = Default::default();
        for (i, (f, want)) in net.forms.iter().zip(&expected).enumerate() {
            let diag = f.form.matrix().diagonal();
            if diag[1..] != want[..] {
                return Err(TransversalityError::UnsupportedNetShape {
                    reason: format!(
                        "form {} differs from the sunset template at epsilon {}",
                        f.edge, eps
                    ),
                });
            }
            mass_squares[i] = diag[0].clone();
        }
        Ok(Self {
            dimension: d,
            epsilon: eps.clone(),
            mass_squares,
        })
    }

    fn e2(&self, j: usize) -> Rational {
        rpow(&self.epsilon, 2 * j as u32)
    }

    fn shifted(&self, j: usize) -> Rational {
        rpow(&(Rational::one() + rpow(&self.epsilon, j as u32)), 2)
    }
}

#[derive(Clone, Copy)]
enum Arity {
    One,
    DistinctPair,
    DistinctTriple,
}

type Builder = fn(&SunsetTemplate, &[usize]) -> Vec<Vec<Rational>>;

fn index_tuples(d: usize, arity: Arity) -> Vec<Vec<usize>> {
    let range = 1..=d;
    match arity {
        Arity::One => range.map(|j| vec![j]).collect(),
        Arity::DistinctPair => range
            .clone()
            .flat_map(|j| (1..=d).filter(move |&k| k != j).map(move |k| vec![j, k]))
            .collect(),
        Arity::DistinctTriple => range
            .flat_map(|i| {
                (1..=d).flat_map(move |j| {
                    (1..=d)
                        .filter(move |&k| i != j && j != k && i != k)
                        .map(move |k| vec![i, j, k])
                })
            })
            .collect(),
    }
}

const PAIRWISE: [(&str, Arity, Builder); 12] = [
    ("P1", Arity::One, |t, x| {
        let [m1, m2, _] = t.mass_squares.clone();
        vec![vec![rat(1), m1], vec![t.e2(x[0]), m2]]
    }),
    ("P2", Arity::One, |t, x| {
        let [m1, m2, _] = t.mass_squares.clone();
        vec![vec![t.e2(x[0]), m1], vec![rat(1), m2]]
    }),
    ("P3", Arity::DistinctPair, |t, x| {
        vec![vec![rat(1), t.e2(x[1])], vec![t.e2(x[0]), rat(1)]]
    }),
    ("P4", Arity::DistinctPair, |t, x| {
        vec![vec![rat(1), rat(1)], vec![t.e2(x[0]), t.e2(x[1])]]
    }),
    ("P5", Arity::DistinctPair, |t, x| {
        vec![vec![t.e2(x[0]), t.e2(x[1])], vec![rat(1), rat(1)]]
    }),
    ("P6", Arity::One, |t, x| {
        let [m1, _, m3] = t.mass_squares.clone();
        vec![vec![rat(1), m1], vec![t.shifted(x[0]), m3]]
    }),
    ("P7", Arity::One, |t, x| {
        let [_, m2, m3] = t.mass_squares.clone();
        vec![vec![rat(1), m2], vec![t.shifted(x[0]), m3]]
    }),
    ("P8", Arity::One, |t, x| {
        let [m1, _, m3] = t.mass_squares.clone();
        vec![vec![t.e2(x[0]), m1], vec![t.shifted(x[0]), m3]]
    }),
    ("P9", Arity::One, |t, x| {
        let [_, m2, m3] = t.mass_squares.clone();
        vec![vec![t.e2(x[0]), m2], vec![t.shifted(x[0]), m3]]
    }),
    ("P10", Arity::DistinctPair, |t, x| {
        vec![
            vec![rat(1), t.e2(x[1])],
            vec![t.shifted(x[0]), t.shifted(x[1])],
        ]
    }),
    ("P11", Arity::DistinctPair, |t, x| {
        vec![
            vec![t.e2(x[0]), t.e2(x[1])],
            vec![t.shifted(x[0]), t.shifted(x[1])],
        ]
    }),
    ("P12", Arity::DistinctPair, |t, x| {
        vec![vec![rat(1), rat(1)], vec![t.shifted(x[0]), t.shifted(x[1])]]
    }),
];

fn shifted_row(t: &SunsetTemplate, x: &[usize]) -> Vec<Rational> {
    x.iter().map(|&j| t.shifted(j)).collect()
}

const TRIPLE: [(&str, Arity, Builder); 7] = [
    ("T1", Arity::DistinctPair, |t, x| {
        let [m1, m2, m3] = t.mass_squares.clone();
        vec![
            vec![rat(1), t.e2(x[1]), m1],
            vec![t.e2(x[0]), rat(1), m2],
            vec![t.shifted(x[0]), t.shifted(x[1]), m3],
        ]
    }),
    ("T2", Arity::DistinctPair, |t, x| {
        let [m1, m2, m3] = t.mass_squares.clone();
        vec![
            vec![rat(1), rat(1), m1],
            vec![t.e2(x[0]), t.e2(x[1]), m2],
            vec![t.shifted(x[0]), t.shifted(x[1]), m3],
        ]
    }),
    ("T3", Arity::DistinctPair, |t, x| {
        let [m1, m2, m3] = t.mass_squares.clone();
        vec![
            vec![t.e2(x[0]), t.e2(x[1]), m1],
            vec![rat(1), rat(1), m2],
            vec![t.shifted(x[0]), t.shifted(x[1]), m3],
        ]
    }),
    ("T4", Arity::DistinctTriple, |t, x| {
        vec![
            x.iter().map(|&j| t.e2(j)).collect(),
            vec![rat(1); 3],
            shifted_row(t, x),
        ]
    }),
    ("T5", Arity::DistinctTriple, |t, x| {
        vec![
            vec![rat(1); 3],
            x.iter().map(|&j| t.e2(j)).collect(),
            shifted_row(t, x),
        ]
    }),
    ("T6", Arity::DistinctTriple, |t, x| {
        vec![
            vec![rat(1), rat(1), t.e2(x[2])],
            vec![t.e2(x[0]), t.e2(x[1]), rat(1)],
            shifted_row(t, x),
        ]
    }),
    ("T7", Arity::DistinctTriple, |t, x| {
        vec![
            vec![rat(1), t.e2(x[1]), t.e2(x[2])],
            vec![t.e2(x[0]), rat(1), rat(1)],
            shifted_row(t, x),
        ]
    }),
];

fn evaluate_families(
    template: &SunsetTemplate,
    families: &[(&str, Arity, Builder)],
) -> CertificateSet {
    let jobs: Vec<(&str, Builder, Vec<usize>)> = families
        .iter()
        .flat_map(|&(name, arity, build)| {
            index_tuples(template.dimension, arity)
                .into_iter()
                .map(move |x| (name, build, x))
        })
        .collect();
    let certificates = jobs
        .into_par_iter()
        .map(|(name, build, indices)| {
            let matrix = RatMatrix::from_rows(build(template, &indices));
            Certificate {
                family: name.to_string(),
                det: matrix.determinant(),
                indices,
                matrix,
            }
        })
        .collect();
    CertificateSet::from_certificates(certificates)
}

/// Every 2×2 minor family guaranteeing that pairwise intersections are smooth.
pub fn pairwise_certificates(net: &QuadricNet) -> Result<CertificateSet, TransversalityError> {
    Ok(evaluate_families(
        &SunsetTemplate::recognise(net)?,
        &PAIRWISE,
    ))
}

/// Every 3×3 minor family guaranteeing that the triple intersection is smooth.
pub fn triple_certificates(net: &QuadricNet) -> Result<CertificateSet, TransversalityError> {
    Ok(evaluate_families(&SunsetTemplate::recognise(net)?, &TRIPLE))
}

/// Rejects index tuples that would make two columns of a family coincide.
pub fn family_certificate(
    net: &QuadricNet,
    family: &str,
    indices: &[usize],
) -> Result<Certificate, TransversalityError> {
    let template = SunsetTemplate::recognise(net)?;
    let (name, arity, build) = PAIRWISE
        .iter()
        .chain(TRIPLE.iter())
        .find(|(name, _, _)| *name == family)
        .ok_or_else(|| TransversalityError::UnsupportedNetShape {
            reason: format!("unknown certificate family {family}"),
        })?;
    if !index_tuples(template.dimension, *arity)
        .iter()
        .any(|x| x == indices)
    {
        return Err(TransversalityError::UnsupportedNetShape {
            reason: format!("index tuple {indices:?} is not admissible for {name}"),
        });
    }
    let matrix = RatMatrix::from_rows(build(&template, indices));
    Ok(Certificate {
        family: name.to_string(),
        indices: indices.to_vec(),
        det: matrix.determinant(),
        matrix,
    })
}

/// Rank check of gradient matrices at exact points of intersections.
///
/// For diagonal forms the intersection is linear in the squared coordinates
/// `w_k = u_k²`. At a point whose nonzero coordinates form the set `S`, the
/// gradients `2 a_i ∘ u` have the same rank as the coefficient rows `a_i`
/// restricted to `S`. Points are returned in `w` coordinates; negative
/// entries correspond to complex `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankSpotCheck {
    pub kind: &'static str,
    pub points_checked: usize,
    pub failures: Vec<RankFailure>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankFailure {
    pub forms: Vec<String>,
    #[serde(with = "crate::rational::serde_str_vec")]
    pub squared_point: Vec<Rational>,
    pub rank: usize,
}

pub const HEURISTIC_LABEL: &str = "heuristic, not a certificate";

/// Samples points on every pairwise and triple intersection of a diagonal net,
/// one per admissible support, and checks the gradient rank there.
pub fn gradient_rank_spot_check(
    net: &QuadricNet,
    max_points: usize,
) -> Result<RankSpotCheck, TransversalityError> {
    if net.forms.iter().any(|f| !f.form.matrix().is_diagonal()) {
        return Err(TransversalityError::UnsupportedNetShape {
            reason: "rank spot-check needs diagonal forms".into(),
        });
    }
    let n = net.forms.len();
    let size = net.ambient_dimension() + 1;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            groups.push(vec![i, j]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                groups.push(vec![i, j, k]);
            }
        }
    }
    let mut supports: Vec<Vec<usize>> = (1u64..(1u64 << size.min(20)))
        .map(|mask| (0..size).filter(|b| mask >> b & 1 == 1).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() >= 2)
        .collect();
    supports.sort_by_key(Vec::len);

    let jobs: Vec<(&Vec<usize>, &Vec<usize>)> = groups
        .iter()
        .flat_map(|g| supports.iter().map(move |s| (g, s)))
        .collect();
    let results: Vec<Option<Option<RankFailure>>> = jobs
        .par_iter()
        .map(|(group, support)| {
            let rows: Vec<Vec<Rational>> = group
                .iter()
                .map(|&i| {
                    let d = net.forms[i].form.matrix().diagonal();
                    support.iter().map(|&c| d[c].clone()).collect()
                })
                .collect();
            let coeffs = RatMatrix::from_rows(rows);
            let w_local = full_support_kernel_point(&coeffs)?;
            let rank = coeffs.rank();
            if rank == group.len() {
                return Some(None);
            }
            let mut w = vec![Rational::zero(); size];
            for (&c, x) in support.iter().zip(w_local) {
                w[c] = x;
            }
            Some(Some(RankFailure {
                forms: group.iter().map(|&i| net.forms[i].edge.clone()).collect(),
                squared_point: w,
                rank,
            }))
        })
        .collect();
    let mut points_checked = 0;
    let mut failures = Vec::new();
    for r in results.into_iter().flatten() {
        if points_checked == max_points {
            break;
        }
        points_checked += 1;
        failures.extend(r);
    }
    Ok(RankSpotCheck {
        kind: HEURISTIC_LABEL,
        points_checked,
        pass: failures.is_empty(),
        failures,
    })
}

/// A kernel vector with every coordinate nonzero, if one exists.
fn full_support_kernel_point(m: &RatMatrix) -> Option<Vec<Rational>> {
    let basis = m.nullspace();
    if basis.is_empty() {
        return None;
    }
    // some coordinate vanishes on the whole kernel: no point has this support
    if (0..m.cols()).any(|c| basis.iter().all(|b| b[c].is_zero())) {
        return None;
    }
    // the bad coefficient vectors form finitely many hyperplanes, so a
    // moment-curve sample c_t = s^t succeeds for some s <= cols + 1
    for s in 1..=(m.cols() as i64 + 2) {
        let mut p = vec![Rational::zero(); m.cols()];
        let mut c = Rational::one();
        for b in &basis {
            for (x, y) in p.iter_mut().zip(b) {
                *x += &c * y;
            }
            c *= rat(s);
        }
        if p.iter().all(|x| !x.is_zero()) {
            return Some(p);
        }
    }
    None
}

/// Candidates `ε = 1/k` for `k = first_k ..= cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpsilonSearch {
    pub first_k: u64,
    pub cutoff: u64,
}

impl Default for EpsilonSearch {
    fn default() -> Self {
        Self {
            first_k: 2,
            cutoff: 64,
        }
    }
}

impl EpsilonSearch {
    pub fn candidates(&self) -> impl Iterator<Item = Rational> {
        (self.first_k.max(1)..=self.cutoff).map(|k| ratio(1, k as i64))
    }
}

/// Everything that justifies a chosen ε.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceBundle {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub conditions: ConditionReport,
    pub pairwise: CertificateSet,
    pub triple: CertificateSet,
    pub spot_check: RankSpotCheck,
    pub pass: bool,
}

impl EvidenceBundle {
    /// Flat `{epsilon, conditions, certificates, pass}` view.
    pub fn to_json(&self) -> serde_json::Value {
        let certificates: Vec<serde_json::Value> = self
            .pairwise
            .certificates
            .iter()
            .chain(&self.triple.certificates)
            .map(|c| {
                serde_json::json!({
                    "family": c.family,
                    "indices": c.indices,
                    "det": format_rational(&c.det),
                })
            })
            .collect();
        serde_json::json!({
            "epsilon": format_rational(&self.epsilon),
            "conditions": self.conditions,
            "certificates": certificates,
            "spot_check": self.spot_check,
            "pass": self.pass,
        })
    }
}

/// The sunset graph with loop momenta on `e1, e2`.
pub fn sunset_net(
    masses: &[Rational; 3],
    dimension: usize,
) -> Result<(FeynmanGraph, SpanningTree, QuadricNet), TransversalityError> {
    let graph = FeynmanGraph::sunset(masses.clone(), dimension)?;
    let tree = SpanningTree::from_ids(&graph, &["e3"])?;
    let net = QuadricNet::from_graph(&graph, &tree)?;
    Ok((graph, tree, net))
}

/// Certifies the sunset net at a single ε.
pub fn certify_sunset_at(
    graph: &FeynmanGraph,
    tree: &SpanningTree,
    net: &QuadricNet,
    epsilon: &Rational,
) -> Result<EvidenceBundle, TransversalityError> {
    let deformed = deform_net(net, tree, graph, epsilon, DeformationSchedule::Paper)?;
    let conditions = verify_conditions(&deformed);
    let pairwise = pairwise_certificates(&deformed)?;
    let triple = triple_certificates(&deformed)?;
    let spot_check = gradient_rank_spot_check(&deformed, usize::MAX)?;
    let pass = conditions.all_hold() && pairwise.all_nonzero && triple.all_nonzero;
    Ok(EvidenceBundle {
        epsilon: epsilon.clone(),
        conditions,
        pairwise,
        triple,
        spot_check,
        pass,
    })
}

/// One candidate examined by the ε search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonTrial {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Walks the candidates of `search` in order and stops at the first passing ε.
/// Returns the bundle together with every trial made.
pub fn search_epsilon(
    graph: &FeynmanGraph,
    tree: &SpanningTree,
    net: &QuadricNet,
    search: EpsilonSearch,
) -> Result<(EvidenceBundle, Vec<EpsilonTrial>), TransversalityError> {
    let mut trials = Vec::new();
    for eps in search.candidates() {
        let bundle = certify_sunset_at(graph, tree, net, &eps)?;
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
        trials.push(EpsilonTrial {
            epsilon: eps,
            pass: bundle.pass,
            reasons,
        });
        if bundle.pass {
            return Ok((bundle, trials));
        }
    }
    Err(TransversalityError::SearchExhausted {
        first_k: search.first_k,
        cutoff: search.cutoff,
        failures: trials
            .iter()
            .map(|t| {
                format!(
                    "epsilon {}: {}",
                    format_rational(&t.epsilon),
                    t.reasons.join(", ")
                )
            })
            .collect(),
    })
}

/// First `ε = 1/k` passing the deformation conditions and every certificate.
pub fn find_admissible_epsilon(
    masses: &[Rational; 3],
    dimension: usize,
    search: EpsilonSearch,
) -> Result<EvidenceBundle, TransversalityError> {
    let (graph, tree, net) = sunset_net(masses, dimension)?;
    search_epsilon(&graph, &tree, &net, search).map(|(bundle, _)| bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn masses(a: i64, b: i64, c: i64) -> [Rational; 3] {
        [rat(a), rat(b), rat(c)]
    }

    fn deformed(m: [Rational; 3], d: usize, eps: Rational) -> QuadricNet {
        let (g, t, net) = sunset_net(&m, d).unwrap();
        deform_net(&net, &t, &g, &eps, DeformationSchedule::Paper).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let f = QuadraticForm::diagonal(&[rat(1), rat(1)]);
        assert_eq!(
            gradient(&f, &[rat(1), rat(0)]).unwrap(),
            vec![rat(2), rat(0)]
        );
        assert_eq!(
            gradient(&f, &[rat(0), rat(0)]).unwrap(),
            vec![rat(0), rat(0)]
        );
        assert!(gradient(&f, &[rat(1)]).is_err());

        let (_, _, net) = sunset_net(&masses(1, 2, 3), 2).unwrap();
        let u = [rat(1), rat(1), rat(0), rat(0), rat(0)];
        assert_eq!(
            gradient(&net.forms[0].form, &u).unwrap(),
            vec![rat(2), rat(2), rat(0), rat(0), rat(0)]
        );
    }

    #[test]
    fn first_pairwise_family_value() {
        let net = deformed([rat(1), rat(2), rat(5)], 2, ratio(1, 2));
        let c = family_certificate(&net, "P1", &[1]).unwrap();
        assert_eq!(c.det, ratio(15, 4));
    }

    #[test]
    fn family_sizes() {
        let net = deformed(masses(1, 2, 3), 2, ratio(1, 3));
        // 6 single-index families * 2 + 6 pair families * 2 ordered pairs
        assert_eq!(pairwise_certificates(&net).unwrap().len(), 24);
        // T4..T7 need three distinct indices and are empty for D = 2
        assert_eq!(triple_certificates(&net).unwrap().len(), 6);
        let net3 = deformed(masses(1, 2, 3), 3, ratio(1, 3));
        assert_eq!(triple_certificates(&net3).unwrap().len(), 3 * 6 + 4 * 6);
        let net1 = deformed(masses(1, 2, 3), 1, ratio(1, 3));
        assert_eq!(pairwise_certificates(&net1).unwrap().len(), 6);
        assert!(triple_certificates(&net1).unwrap().is_empty());
    }

    #[test]
    fn epsilon_zero_limits() {
        let net = deformed(masses(1, 2, 3), 2, rat(0));
        assert_eq!(family_certificate(&net, "P3", &[1, 2]).unwrap().det, rat(1));
        assert_eq!(
            family_certificate(&net, "T1", &[1, 2]).unwrap().det,
            rat(9 - 1 - 4)
        );
        let pythagorean = deformed(masses(3, 4, 5), 2, rat(0));
        assert_eq!(
            family_certificate(&pythagorean, "T1", &[1, 2]).unwrap().det,
            rat(0)
        );
    }

    #[test]
    fn epsilon_one_is_inadmissible() {
        let net = deformed(masses(1, 2, 3), 2, rat(1));
        let set = pairwise_certificates(&net).unwrap();
        assert!(!set.all_nonzero);
        assert_eq!(family_certificate(&net, "P4", &[1, 2]).unwrap().det, rat(0));
    }

    #[test]
    fn equal_indices_are_rejected() {
        let net = deformed(masses(1, 2, 3), 2, ratio(1, 2));
        assert!(family_certificate(&net, "P3", &[1, 1]).is_err());
        assert!(family_certificate(&net, "T1", &[2, 2]).is_err());
    }

    #[test]
    fn undeformed_net_is_unsupported() {
        let (_, _, net) = sunset_net(&masses(1, 2, 3), 2).unwrap();
        let mut net = net;
        net.epsilon = ratio(1, 2);
        assert!(matches!(
            pairwise_certificates(&net),
            Err(TransversalityError::UnsupportedNetShape { .. })
        ));
        let single = QuadricNet::single_propagator(2, &rat(1));
        assert!(triple_certificates(&single).is_err());
    }

    #[test]
    fn search_skips_degenerate_half() {
        // P7 at epsilon 1/2: 9 - 4 (3/2)^2 = 0
        let net = deformed(masses(1, 2, 3), 2, ratio(1, 2));
        assert_eq!(family_certificate(&net, "P7", &[1]).unwrap().det, rat(0));
        let bundle =
            find_admissible_epsilon(&masses(1, 2, 3), 2, EpsilonSearch::default()).unwrap();
        assert_eq!(bundle.epsilon, ratio(1, 3));
        assert!(bundle.pass && bundle.spot_check.pass);
    }

    #[test]
    fn search_exhausted_at_one() {
        let err = find_admissible_epsilon(
            &masses(1, 2, 3),
            2,
            EpsilonSearch {
                first_k: 1,
                cutoff: 1,
            },
        )
        .unwrap_err();
        match err {
            TransversalityError::SearchExhausted { failures, .. } => assert_eq!(failures.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spot_check_sees_degenerate_pair() {
        let net = deformed(masses(1, 2, 3), 2, ratio(1, 2));
        let check = gradient_rank_spot_check(&net, usize::MAX).unwrap();
        assert!(check.points_checked >= 10);
        assert!(!check.pass);
        let good = deformed(masses(1, 2, 3), 2, ratio(1, 3));
        assert!(gradient_rank_spot_check(&good, usize::MAX).unwrap().pass);
    }

    #[test]
    fn evidence_json_shape() {
        let bundle =
            find_admissible_epsilon(&masses(1, 2, 3), 1, EpsilonSearch::default()).unwrap();
        let json = bundle.to_json();
        assert!(json["certificates"].as_array().unwrap().len() == 6);
        assert_eq!(json["pass"], serde_json::Value::Bool(true));
        assert!(json["certificates"][0]["det"].is_string());
    }
}
