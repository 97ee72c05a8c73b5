//! Class-level motive arithmetic: Tate polynomials in `𝕃`, formal `h¹` terms
//! of abelian varieties, cut-and-paste triangles and the mixed-Tate verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub const PRYM: &str = "h1(Prym)";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MotiveError {
    #[error("Euler characteristic needs the dimension of {symbol}")]
    UnknownDimension { symbol: String },
    #[error("dimension {dimension} is too small: at least 2 is required")]
    DimensionTooSmall { dimension: usize },
    #[error("symbol {symbol} has conflicting dimensions {first:?} and {second:?}")]
    ConflictingDimension {
        symbol: String,
        first: Option<u32>,
        second: Option<u32>,
    },
    #[error("malformed class document: {0}")]
    Malformed(String),
}

/// `h¹(A₁)⋯h¹(A_s)·𝕃^twist`, symbols kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub symbols: Vec<String>,
    pub twist: i32,
}

impl Monomial {
    pub fn tate(twist: i32) -> Self {
        Self {
            symbols: Vec::new(),
            twist,
        }
    }

    pub fn is_tate(&self) -> bool {
        self.symbols.is_empty()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut symbols = [self.symbols.clone(), other.symbols.clone()].concat();
        symbols.sort();
        Monomial {
            symbols,
            twist: self.twist + other.twist,
        }
    }
}

/// Element of the cut-and-paste ring generated by `𝕃^{±1}` and formal `h¹` symbols.
#[derive(Clone, Default)]
pub struct MotiveClass {
    terms: BTreeMap<Monomial, i64>,
    dims: BTreeMap<String, Option<u32>>,
}

/// Equal terms, and equal dimensions for every symbol that occurs.
impl PartialEq for MotiveClass {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
            && self
                .terms
                .keys()
                .flat_map(|m| &m.symbols)
                .all(|s| self.dimension_of(s) == other.dimension_of(s))
    }
}

impl Eq for MotiveClass {}

impl MotiveClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::lefschetz_power(0)
    }

    /// `𝕃^k`.
    pub fn lefschetz_power(k: i32) -> Self {
        Self::from_terms([(Monomial::tate(k), 1)])
    }

    /// `h¹(symbol)·𝕃^twist` with optional known dimension.
    pub fn abelian(symbol: &str, twist: i32, dim: Option<u32>) -> Self {
        let mut c = Self::from_terms([(
            Monomial {
                symbols: vec![symbol.to_string()],
                twist,
            },
            1,
        )]);
        c.dims.insert(symbol.to_string(), dim);
        c
    }

    /// `Σ coeffs[i] 𝕃^i`.
    pub fn tate_polynomial(coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (Monomial::tate(k as i32), c)),
        )
    }

    fn from_terms(terms: impl IntoIterator<Item = (Monomial, i64)>) -> Self {
        let mut c = Self::default();
        for (m, k) in terms {
            *c.terms.entry(m).or_insert(0) += k;
        }
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut c = self.clone();
        for v in c.terms.values_mut() {
            *v *= k;
        }
        c.normalize();
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Coefficient of `𝕃^k`.
    pub fn tate_coefficient(&self, k: i32) -> i64 {
        self.coefficient(&Monomial::tate(k))
    }

    pub fn tate_part(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_tate())
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
            dims: BTreeMap::new(),
        }
    }

    pub fn exotic_part(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.is_tate())
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
            dims: self.dims.clone(),
        }
    }

    pub fn has_exotic(&self) -> bool {
        self.terms.keys().any(|m| !m.is_tate())
    }

    pub fn dimension_of(&self, symbol: &str) -> Option<u32> {
        self.dims.get(symbol).copied().flatten()
    }

    /// Records or updates the dimension of a symbol.
    pub fn with_dimension(mut self, symbol: &str, dim: Option<u32>) -> Self {
        self.dims.insert(symbol.to_string(), dim);
        self
    }

    /// `χ(𝕃) = 1`, `χ(h¹(A)) = −2 dim A`.
    pub fn euler(&self) -> Result<i64, MotiveError> {
        let mut total = 0i64;
        for (m, &c) in &self.terms {
            let mut value = c;
            for s in &m.symbols {
                let d = self
                    .dims
                    .get(s)
                    .copied()
                    .flatten()
                    .ok_or_else(|| MotiveError::UnknownDimension { symbol: s.clone() })?;
                value *= -2 * i64::from(d);
            }
            total += value;
        }
        Ok(total)
    }

    /// `Σ |coeff|` over all terms.
    pub fn total_rank(&self) -> i64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Lowest and highest Tate exponents present.
    pub fn tate_range(&self) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().filter(|m| m.is_tate()).map(|m| m.twist);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }

    fn merge_dims(&self, other: &Self) -> Result<BTreeMap<String, Option<u32>>, MotiveError> {
        let mut dims = self.dims.clone();
        for (s, d) in &other.dims {
            match dims.get(s) {
                Some(Some(a)) if d.is_some_and(|b| b != *a) => {
                    return Err(MotiveError::ConflictingDimension {
                        symbol: s.clone(),
                        first: Some(*a),
                        second: *d,
                    })
                }
                Some(Some(_)) => {}
                _ => {
                    dims.insert(s.clone(), *d);
                }
            }
        }
        Ok(dims)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, MotiveError> {
        let mut c = Self {
            terms: self.terms.clone(),
            dims: self.merge_dims(other)?,
        };
        for (m, k) in &other.terms {
            *c.terms.entry(m.clone()).or_insert(0) += k;
        }
        c.normalize();
        Ok(c)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, MotiveError> {
        let mut c = Self {
            terms: BTreeMap::new(),
            dims: self.merge_dims(other)?,
        };
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                *c.terms.entry(a.times(b)).or_insert(0) += x * y;
            }
        }
        c.normalize();
        Ok(c)
    }

    pub fn to_document(&self) -> ClassDocument {
        ClassDocument {
            tate: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_tate())
                .map(|(m, &c)| (m.twist, c))
                .collect(),
            exotic: self
                .terms
                .iter()
                .filter(|(m, _)| !m.is_tate())
                .map(|(m, &c)| ExoticTerm {
                    symbol: m.symbols.join("*"),
                    twist: m.twist,
                    coeff: c,
                    dim: match &m.symbols[..] {
                        [s] => self.dimension_of(s),
                        _ => None,
                    },
                })
                .collect(),
            euler: self.euler().ok(),
        }
    }

    pub fn from_document(doc: &ClassDocument) -> Result<Self, MotiveError> {
        let mut c = Self::from_terms(doc.tate.iter().map(|&(t, k)| (Monomial::tate(t), k)));
        for e in &doc.exotic {
            let mut symbols: Vec<String> = e.symbol.split('*').map(str::to_string).collect();
            if symbols.iter().any(String::is_empty) {
                return Err(MotiveError::Malformed(format!(
                    "empty symbol in {:?}",
                    e.symbol
                )));
            }
            symbols.sort();
            if let [s] = &symbols[..] {
                let known = c.dims.get(s).copied().flatten();
                if known.is_none() {
                    c.dims.insert(s.clone(), e.dim);
                }
            } else {
                for s in &symbols {
                    c.dims.entry(s.clone()).or_insert(None);
                }
            }
            *c.terms
                .entry(Monomial {
                    symbols,
                    twist: e.twist,
                })
                .or_insert(0) += e.coeff;
        }
        c.normalize();
        Ok(c)
    }
}

/// Panics on conflicting symbol dimensions; use `try_add` to handle them.
impl Add for &MotiveClass {
    type Output = MotiveClass;

    fn add(self, rhs: &MotiveClass) -> MotiveClass {
        self.try_add(rhs).expect("conflicting symbol dimensions")
    }
}

impl Neg for &MotiveClass {
    type Output = MotiveClass;

    fn neg(self) -> MotiveClass {
        self.scale(-1)
    }
}

impl Sub for &MotiveClass {
    type Output = MotiveClass;

    fn sub(self, rhs: &MotiveClass) -> MotiveClass {
        self + &(-rhs)
    }
}

impl Mul for &MotiveClass {
    type Output = MotiveClass;

    fn mul(self, rhs: &MotiveClass) -> MotiveClass {
        self.try_mul(rhs).expect("conflicting symbol dimensions")
    }
}

impl fmt::Display for MotiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, i64)> = self.terms().collect();
        ordered.sort_by_key(|(m, _)| (!m.is_tate(), m.twist, m.symbols.clone()));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let mut factors: Vec<String> = m.symbols.clone();
            match m.twist {
                0 => {}
                1 => factors.push("L".into()),
                t => factors.push(format!("L^{t}")),
            }
            let body = factors.join("*");
            let magnitude = c.unsigned_abs();
            let sign = if c < 0 { "-" } else { "+" };
            match (i, body.is_empty(), magnitude) {
                (0, _, _) if c < 0 => write!(f, "-")?,
                (0, _, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            match (body.is_empty(), magnitude) {
                (true, m) => write!(f, "{m}")?,
                (false, 1) => write!(f, "{body}")?,
                (false, m) => write!(f, "{m}{body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MotiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MotiveClass({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExoticTerm {
    pub symbol: String,
    pub twist: i32,
    pub coeff: i64,
    pub dim: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDocument {
    pub tate: Vec<(i32, i64)>,
    pub exotic: Vec<ExoticTerm>,
    pub euler: Option<i64>,
}

impl Serialize for MotiveClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MotiveClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ClassDocument::deserialize(d)?;
        Self::from_document(&doc).map_err(serde::de::Error::custom)
    }
}

/// `[ℙ^N] = 1 + 𝕃 + … + 𝕃^N`.
pub fn class_projective(n: usize) -> MotiveClass {
    MotiveClass::tate_polynomial(&vec![1; n + 1])
}

/// Smooth quadric of dimension `2D − 1` in `ℙ^{2D}`.
pub fn class_odd_quadric(d: usize) -> MotiveClass {
    MotiveClass::tate_polynomial(&vec![1; 2 * d])
}

/// Smooth complete intersection of two quadrics in `ℙ^{2D}`, `D ≥ 2`.
pub fn class_two_quadrics(d: usize) -> Result<MotiveClass, MotiveError> {
    if d < 2 {
        return Err(MotiveError::DimensionTooSmall { dimension: d });
    }
    let mut coeffs = vec![1i64; 2 * d - 1];
    coeffs[d - 1] = 2 * d as i64 + 2;
    Ok(MotiveClass::tate_polynomial(&coeffs))
}

/// Default twist of the Prym term for the triple intersection.
pub fn default_prym_twist(d: usize) -> i32 {
    d as i32 - 2
}

/// Default Prym dimension: 5 for `D = 2`, symbolic otherwise.
pub fn default_prym_dimension(d: usize) -> Option<u32> {
    (d == 2).then_some(5)
}

/// Smooth complete intersection of three quadrics in `ℙ^{2D}`, `D ≥ 2`.
pub fn class_three_quadrics(
    d: usize,
    prym_dim: Option<u32>,
    twist: Option<i32>,
) -> Result<MotiveClass, MotiveError> {
    if d < 2 {
        return Err(MotiveError::DimensionTooSmall { dimension: d });
    }
    let tate = MotiveClass::tate_polynomial(&vec![1; 2 * d - 2]);
    let prym = MotiveClass::abelian(
        PRYM,
        twist.unwrap_or_else(|| default_prym_twist(d)),
        prym_dim,
    );
    tate.try_add(&prym)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleKind {
    #[serde(rename = "MV")]
    MayerVietoris,
    Gysin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleRecord {
    pub kind: TriangleKind,
    /// The three objects `A → B → C → A[1]`, as descriptions.
    pub slots: [String; 3],
    /// Class of the cone slot after the triangle is applied.
    pub result: MotiveClass,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TriangleLedger {
    pub triangles: Vec<TriangleRecord>,
}

impl TriangleLedger {
    pub fn cone_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn record(
        &mut self,
        kind: TriangleKind,
        slots: [&str; 3],
        result: &MotiveClass,
        note: Option<&str>,
    ) {
        self.triangles.push(TriangleRecord {
            kind,
            slots: slots.map(str::to_string),
            result: result.clone(),
            note: note.map(str::to_string),
        });
    }

    pub fn count(&self, kind: TriangleKind) -> usize {
        self.triangles.iter().filter(|t| t.kind == kind).count()
    }
}

/// Inclusion–exclusion `Σ[Qᵢ] − Σ[Qᵢ∩Qⱼ] + [Q₁∩Q₂∩Q₃]`.
///
/// `pairs` and `triples` list the classes of the intersections; one
/// Mayer–Vietoris cone is recorded per quadric beyond the first.
pub fn union_class(
    quadrics: &[MotiveClass],
    pairs: &[MotiveClass],
    triples: &[MotiveClass],
    ledger: &mut TriangleLedger,
) -> Result<MotiveClass, MotiveError> {
    let mut total = MotiveClass::zero();
    for q in quadrics {
        total = total.try_add(q)?;
    }
    for p in pairs {
        total = total.try_add(&-p)?;
    }
    for t in triples {
        total = total.try_add(t)?;
    }
    for k in 1..quadrics.len() {
        let slot = format!("M^c(Q_1 ∪ … ∪ Q_{})", k + 1);
        ledger.record(
            TriangleKind::MayerVietoris,
            ["closed cover", "pieces and overlaps", &slot],
            &total,
            None,
        );
    }
    Ok(total)
}

/// `[X ∖ Z] = [X] − [Z]`, recording one Gysin cone.
pub fn complement_class(
    ambient: &MotiveClass,
    closed: &MotiveClass,
    ledger: &mut TriangleLedger,
) -> Result<MotiveClass, MotiveError> {
    let c = ambient.try_add(&-closed)?;
    ledger.record(
        TriangleKind::Gysin,
        ["M^c(Z)", "M^c(X)", "M^c(X \\ Z)"],
        &c,
        None,
    );
    Ok(c)
}

/// Duality on a smooth variety of dimension `n`.
///
/// `𝕃^k ↦ 𝕃^{n−k}` on Tate terms; a term carrying `s` factors `h¹` and
/// twist `t` maps to twist `n − s − t`, using `h¹(A)^∨ ≅ h¹(A)(1)`.
/// Homological shifts are dropped. The map is an involution.
pub fn dual_class(c: &MotiveClass, ambient_dim: usize) -> MotiveClass {
    let n = ambient_dim as i32;
    let mut out = MotiveClass {
        terms: BTreeMap::new(),
        dims: c.dims.clone(),
    };
    for (m, &k) in &c.terms {
        let s = m.symbols.len() as i32;
        let mapped = Monomial {
            symbols: m.symbols.clone(),
            twist: n - s - m.twist,
        };
        *out.terms.entry(mapped).or_insert(0) += k;
    }
    out.normalize();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    NotMixedTate {
        witness: String,
        mass_condition_checked: bool,
    },
    TateType,
    Indeterminate {
        reason: String,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::NotMixedTate { .. } => "NotMixedTate",
            Verdict::TateType => "TateType",
            Verdict::Indeterminate { .. } => "Indeterminate",
        }
    }
}

/// Applies the mass condition and the Totaro criterion shadow.
pub fn verdict_for(class: &MotiveClass, mass_squares: &[Rational; 3]) -> Verdict {
    let [m1, m2, m3] = mass_squares;
    if *m3 == m1 + m2 {
        return Verdict::Indeterminate {
            reason: format!("m3^2 = m1^2 + m2^2 ({m3} = {m1} + {m2}): the Prym term is not controlled on this mass locus"),
        };
    }
    match class.terms().find(|(m, _)| !m.is_tate()) {
        Some((m, c)) => Verdict::NotMixedTate {
            witness: MotiveClass::from_terms([(m.clone(), c)]).to_string(),
            mass_condition_checked: true,
        },
        None => Verdict::TateType,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PipelineOptions {
    pub prym_dim: Option<u32>,
    /// Twist of the Prym term; `None` uses `D − 2`.
    pub twist: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineOutput {
    pub dimension: usize,
    /// `[ℙ^{2D} ∖ (Q₁ ∪ Q₂ ∪ Q₃)]`.
    pub complement: MotiveClass,
    /// `[Q₁ ∪ Q₂ ∪ Q₃]`.
    pub union: MotiveClass,
    /// Dual class, the class-level image of the quadrics-motive.
    pub dual: MotiveClass,
    pub ledger: TriangleLedger,
    pub verdict: Verdict,
}

/// Assembles the class of the sunset complement along the route
///
/// ```text
/// U = ℙ∖(Q₁∪Q₂), V = ℙ∖Q₃, U₁₃ = ℙ∖(Q₁∩Q₃), U₂₃ = ℙ∖(Q₂∩Q₃)
/// Gysin: U, V     Gysin: U₁₃, U₂₃     Gysin: ℙ∖Q₁₂₃
/// MV: [U∪V] = [U₁₃] + [U₂₃] − [ℙ∖Q₁₂₃]
/// MV: [ℙ∖Q] = [U] + [V] − [U∪V]
/// ```
///
/// Each direct sum of two Gysin triangles counts as one cone.
pub fn sunset_pipeline(
    dimension: usize,
    mass_squares: &[Rational; 3],
    options: PipelineOptions,
) -> Result<PipelineOutput, MotiveError> {
    if dimension < 2 {
        return Err(MotiveError::DimensionTooSmall { dimension });
    }
    let d = dimension;
    let prym_dim = options.prym_dim.or_else(|| default_prym_dimension(d));
    let p = class_projective(2 * d);
    let q = class_odd_quadric(d);
    let q2 = class_two_quadrics(d)?;
    let q3 = class_three_quadrics(d, prym_dim, options.twist)?;
    let mut ledger = TriangleLedger::default();

    let q12_union = &(&q + &q) - &q2;
    let u = &p - &q12_union;
    let v = &p - &q;
    ledger.record(
        TriangleKind::Gysin,
        [
            "M^c(Q1 ∪ Q2) ⊕ M^c(Q3)",
            "M^c(P) ⊕ M^c(P)",
            "M^c(U) ⊕ M^c(V)",
        ],
        &(&u + &v),
        Some("direct sum of two Gysin triangles"),
    );
    let u13 = &p - &q2;
    let u23 = &p - &q2;
    ledger.record(
        TriangleKind::Gysin,
        [
            "M^c(Q1 ∩ Q3) ⊕ M^c(Q2 ∩ Q3)",
            "M^c(P) ⊕ M^c(P)",
            "M^c(U13) ⊕ M^c(U23)",
        ],
        &(&u13 + &u23),
        Some("direct sum of two Gysin triangles"),
    );
    let p_minus_q123 = p.try_add(&-&q3)?;
    ledger.record(
        TriangleKind::Gysin,
        ["M^c(Q123)", "M^c(P)", "M^c(P \\ Q123)"],
        &p_minus_q123,
        None,
    );
    let u_or_v = (&u13 + &u23).try_add(&-&p_minus_q123)?;
    ledger.record(
        TriangleKind::MayerVietoris,
        ["M^c(P \\ Q123)", "M^c(U13) ⊕ M^c(U23)", "M^c(U ∪ V)"],
        &u_or_v,
        None,
    );
    let complement = (&u + &v).try_add(&-&u_or_v)?;
    ledger.record(
        TriangleKind::MayerVietoris,
        ["M^c(U ∪ V)", "M^c(U) ⊕ M^c(V)", "M^c(P \\ Q)"],
        &complement,
        None,
    );
    assert!(ledger.cone_count() <= 5, "cone bound violated");

    let union = p.try_add(&-&complement)?;
    let verdict = verdict_for(&complement, mass_squares);
    if matches!(verdict, Verdict::TateType) {
        debug_assert!(!complement.has_exotic());
    }
    Ok(PipelineOutput {
        dimension: d,
        dual: dual_class(&complement, 2 * d),
        complement,
        union,
        ledger,
        verdict,
    })
}

/// The same complement computed as `[ℙ] − [Q₁ ∪ Q₂ ∪ Q₃]` by inclusion–exclusion.
pub fn sunset_complement_by_inclusion_exclusion(
    dimension: usize,
    options: PipelineOptions,
) -> Result<(MotiveClass, TriangleLedger), MotiveError> {
    let d = dimension;
    let prym_dim = options.prym_dim.or_else(|| default_prym_dimension(d));
    let q = class_odd_quadric(d);
    let q2 = class_two_quadrics(d)?;
    let q3 = class_three_quadrics(d, prym_dim, options.twist)?;
    let mut ledger = TriangleLedger::default();
    let union = union_class(
        &[q.clone(), q.clone(), q],
        &[q2.clone(), q2.clone(), q2],
        &[q3],
        &mut ledger,
    )?;
    let complement = complement_class(&class_projective(2 * d), &union, &mut ledger)?;
    Ok((complement, ledger))
}

/// Whether the Tate coefficient sequence reads the same from both ends.
pub fn is_palindromic(c: &MotiveClass) -> bool {
    let Some((lo, hi)) = c.tate_range() else {
        return true;
    };
    (lo..=hi).all(|k| c.tate_coefficient(k) == c.tate_coefficient(lo + hi - k))
}

pub fn mass_squares(masses: &[Rational; 3]) -> [Rational; 3] {
    masses.clone().map(|m| &m * &m)
}

/// `true` when `m` lies on the excluded locus `m₃² = m₁² + m₂²`.
pub fn on_excluded_locus(mass_squares: &[Rational; 3]) -> bool {
    let [a, b, c] = mass_squares;
    (a + b - c).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn l(k: i32) -> MotiveClass {
        MotiveClass::lefschetz_power(k)
    }

    #[test]
    fn tables() {
        assert_eq!(class_projective(0), MotiveClass::one());
        assert_eq!(class_projective(4).euler().unwrap(), 5);
        assert_eq!(
            class_odd_quadric(2),
            MotiveClass::tate_polynomial(&[1, 1, 1, 1])
        );
        assert_eq!(class_odd_quadric(1), class_projective(1));
        assert_eq!(
            class_two_quadrics(2).unwrap(),
            MotiveClass::tate_polynomial(&[1, 6, 1])
        );
        assert!(class_two_quadrics(1).is_err());
        for d in 2..8 {
            assert_eq!(class_odd_quadric(d).euler().unwrap(), 2 * d as i64);
            assert_eq!(class_two_quadrics(d).unwrap().total_rank(), 4 * d as i64);
            assert!(is_palindromic(&class_two_quadrics(d).unwrap()));
            assert!(is_palindromic(&class_odd_quadric(d)));
        }
    }

    #[test]
    fn genus_five_curve() {
        let c = class_three_quadrics(2, Some(5), None).unwrap();
        assert_eq!(c.to_string(), "1 + L + h1(Prym)");
        assert_eq!(c.euler().unwrap(), -8);
        let symbolic = class_three_quadrics(3, None, None).unwrap();
        assert_eq!(
            symbolic.euler(),
            Err(MotiveError::UnknownDimension {
                symbol: PRYM.into()
            })
        );
    }

    #[test]
    fn sunset_union_and_complement() {
        let mut ledger = TriangleLedger::default();
        let q = class_odd_quadric(2);
        let q2 = class_two_quadrics(2).unwrap();
        let q3 = class_three_quadrics(2, Some(5), None).unwrap();
        let union = union_class(
            &[q.clone(), q.clone(), q],
            &[q2.clone(), q2.clone(), q2],
            &[q3],
            &mut ledger,
        )
        .unwrap();
        let expected = &MotiveClass::tate_polynomial(&[1, -14, 0, 3])
            + &MotiveClass::abelian(PRYM, 0, Some(5));
        assert_eq!(union, expected);
        assert_eq!(union.euler().unwrap(), -20);
        assert_eq!(ledger.count(TriangleKind::MayerVietoris), 2);

        let comp = complement_class(&class_projective(4), &union, &mut ledger).unwrap();
        assert_eq!(comp.to_string(), "15L + L^2 - 2L^3 + L^4 - h1(Prym)");
        assert_eq!(comp.euler().unwrap(), 25);
        assert_eq!(ledger.cone_count(), 3);
    }

    #[test]
    fn complement_edge_cases() {
        let mut ledger = TriangleLedger::default();
        let p = class_projective(3);
        assert_eq!(
            complement_class(&p, &MotiveClass::zero(), &mut ledger).unwrap(),
            p
        );
        assert!(complement_class(&p, &p, &mut ledger).unwrap().is_zero());
        let mut single = TriangleLedger::default();
        let q = class_odd_quadric(2);
        assert_eq!(
            union_class(std::slice::from_ref(&q), &[], &[], &mut single).unwrap(),
            q
        );
        assert_eq!(single.cone_count(), 0);
    }

    #[test]
    fn duality() {
        assert_eq!(dual_class(&MotiveClass::one(), 4), l(4));
        let comp = sunset_pipeline(
            2,
            &mass_squares(&[rat(1), rat(2), rat(3)]),
            PipelineOptions::default(),
        )
        .unwrap()
        .complement;
        let dual = dual_class(&comp, 4);
        assert_eq!(dual_class(&dual, 4), comp);
        assert_eq!(
            dual.exotic_part().total_rank(),
            comp.exotic_part().total_rank()
        );
        assert_eq!(dual.euler().unwrap(), comp.euler().unwrap());
    }

    #[test]
    fn pipeline_verdicts() {
        let out = sunset_pipeline(
            2,
            &mass_squares(&[rat(1), rat(2), rat(3)]),
            PipelineOptions::default(),
        )
        .unwrap();
        assert_eq!(out.ledger.cone_count(), 5);
        assert_eq!(out.ledger.count(TriangleKind::MayerVietoris), 2);
        assert_eq!(out.ledger.count(TriangleKind::Gysin), 3);
        match &out.verdict {
            Verdict::NotMixedTate {
                witness,
                mass_condition_checked,
            } => {
                assert_eq!(witness, "-h1(Prym)");
                assert!(mass_condition_checked);
            }
            other => panic!("unexpected {other:?}"),
        }
        let (plain, _) =
            sunset_complement_by_inclusion_exclusion(2, PipelineOptions::default()).unwrap();
        assert_eq!(plain, out.complement);

        let pyth = sunset_pipeline(
            2,
            &mass_squares(&[rat(3), rat(4), rat(5)]),
            PipelineOptions::default(),
        )
        .unwrap();
        assert!(matches!(pyth.verdict, Verdict::Indeterminate { .. }));
        assert!(matches!(
            sunset_pipeline(
                1,
                &mass_squares(&[rat(1), rat(2), rat(3)]),
                PipelineOptions::default()
            ),
            Err(MotiveError::DimensionTooSmall { dimension: 1 })
        ));
    }

    #[test]
    fn tate_verdict_when_exotic_cancels() {
        let c = class_projective(3);
        assert_eq!(
            verdict_for(&c, &mass_squares(&[rat(1), rat(2), rat(3)])),
            Verdict::TateType
        );
    }

    #[test]
    fn json_round_trip() {
        let out = sunset_pipeline(
            2,
            &mass_squares(&[rat(1), rat(2), rat(3)]),
            PipelineOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_value(&out.complement).unwrap();
        assert_eq!(json["euler"], 25);
        assert_eq!(json["exotic"][0]["symbol"], PRYM);
        assert_eq!(json["exotic"][0]["dim"], 5);
        let back: MotiveClass = serde_json::from_value(json).unwrap();
        assert_eq!(back, out.complement);
    }

    #[test]
    fn configurable_twist() {
        let c = class_three_quadrics(3, Some(7), Some(2)).unwrap();
        assert_eq!(
            c.coefficient(&Monomial {
                symbols: vec![PRYM.into()],
                twist: 2
            }),
            1
        );
        assert_eq!(c.euler().unwrap(), 4 - 14);
    }
}
