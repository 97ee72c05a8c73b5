//! Characters into Laurent series and their Birkhoff factorization.

use std::collections::BTreeMap;

use crate::rational::{parse_rational, Rational};

use super::hopf::{antipode, coproduct, HopfElement, Monomial, SubgraphRule};
use super::series::{Field, LaurentSeries, SeriesDocument};
use super::RenormError;

/// Builds series of a given coefficient field from their JSON description.
pub trait SeriesFromDocument: Field {
    fn series_from_document(doc: &SeriesDocument) -> Result<LaurentSeries<Self>, RenormError>;
}

impl SeriesFromDocument for Rational {
    fn series_from_document(doc: &SeriesDocument) -> Result<LaurentSeries<Self>, RenormError> {
        Ok(doc.to_rational()?)
    }
}

impl SeriesFromDocument for f64 {
    fn series_from_document(doc: &SeriesDocument) -> Result<LaurentSeries<Self>, RenormError> {
        Ok(doc.to_f64()?)
    }
}

/// Algebra morphism fixed by its values on generators.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterMap<F: Field> {
    center: Rational,
    values: BTreeMap<String, LaurentSeries<F>>,
}

impl<F: Field> CharacterMap<F> {
    pub fn new(center: Rational) -> Self {
        Self {
            center,
            values: BTreeMap::new(),
        }
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn insert(&mut self, generator: &str, value: LaurentSeries<F>) -> Result<(), RenormError> {
        if value.center() != &self.center {
            return Err(RenormError::MalformedCharacter(format!(
                "value of {generator} is centered at {}, expected {}",
                value.center(),
                self.center
            )));
        }
        self.values.insert(generator.to_string(), value);
        Ok(())
    }

    pub fn with(mut self, generator: &str, value: LaurentSeries<F>) -> Result<Self, RenormError> {
        self.insert(generator, value)?;
        Ok(self)
    }

    pub fn get(&self, generator: &str) -> Option<&LaurentSeries<F>> {
        self.values.get(generator)
    }

    pub fn one(&self) -> LaurentSeries<F> {
        LaurentSeries::one(self.center.clone())
    }

    pub fn zero(&self) -> LaurentSeries<F> {
        LaurentSeries::zero(self.center.clone())
    }

    pub fn evaluate_monomial(&self, m: &Monomial) -> Result<LaurentSeries<F>, RenormError> {
        let mut acc = self.one();
        for g in m {
            let v = self
                .values
                .get(g)
                .ok_or_else(|| RenormError::MissingCharacter {
                    generator: g.clone(),
                })?;
            acc = acc.try_mul(v)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, x: &HopfElement) -> Result<LaurentSeries<F>, RenormError> {
        linear(x, self.zero(), |m| self.evaluate_monomial(m))
    }
}

impl<F: SeriesFromDocument> CharacterMap<F> {
    /// `{"graph": {"center", "pole_order", "coeffs"}, ...}`; all centers must agree.
    pub fn from_json(text: &str) -> Result<Self, RenormError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let docs: BTreeMap<String, SeriesDocument> = serde_path_to_error::deserialize(de)
            .map_err(|e| RenormError::MalformedCharacter(e.to_string()))?;
        let center = match docs.values().next() {
            Some(d) => parse_rational(&d.center)
                .map_err(|e| RenormError::MalformedCharacter(e.to_string()))?,
            None => Rational::from_integer(1.into()),
        };
        let mut map = Self::new(center);
        for (name, doc) in &docs {
            map.insert(name, F::series_from_document(doc)?)?;
        }
        Ok(map)
    }
}

fn linear<F: Field>(
    x: &HopfElement,
    zero: LaurentSeries<F>,
    mut f: impl FnMut(&Monomial) -> Result<LaurentSeries<F>, RenormError>,
) -> Result<LaurentSeries<F>, RenormError> {
    let mut acc = zero;
    for (m, c) in x.terms() {
        acc = acc.try_add(&f(m)?.scale(&F::from_rational(c)))?;
    }
    Ok(acc)
}

/// `φ₋` and `φ₊` on every generator reachable from the factorized element.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffFactorization<F: Field> {
    center: Rational,
    minus: BTreeMap<String, LaurentSeries<F>>,
    plus: BTreeMap<String, LaurentSeries<F>>,
    /// Recursion depth reached, bounded by the loop degree.
    pub steps: usize,
}

impl<F: Field> BirkhoffFactorization<F> {
    fn monomial(
        &self,
        table: &BTreeMap<String, LaurentSeries<F>>,
        m: &Monomial,
    ) -> Result<LaurentSeries<F>, RenormError> {
        let mut acc = LaurentSeries::one(self.center.clone());
        for g in m {
            let v = table.get(g).ok_or_else(|| RenormError::MissingCharacter {
                generator: g.clone(),
            })?;
            acc = acc.try_mul(v)?;
        }
        Ok(acc)
    }

    pub fn minus_monomial(&self, m: &Monomial) -> Result<LaurentSeries<F>, RenormError> {
        self.monomial(&self.minus, m)
    }

    pub fn plus_monomial(&self, m: &Monomial) -> Result<LaurentSeries<F>, RenormError> {
        self.monomial(&self.plus, m)
    }

    /// `φ₋(x)`, the counterterm.
    pub fn minus(&self, x: &HopfElement) -> Result<LaurentSeries<F>, RenormError> {
        linear(x, LaurentSeries::zero(self.center.clone()), |m| {
            self.minus_monomial(m)
        })
    }

    /// `φ₊(x)`, the renormalized part.
    pub fn plus(&self, x: &HopfElement) -> Result<LaurentSeries<F>, RenormError> {
        linear(x, LaurentSeries::zero(self.center.clone()), |m| {
            self.plus_monomial(m)
        })
    }
}

/// Inductive minimal-subtraction factorization
/// `φ₋(X) = −T(R̄(X))`, `φ₊(X) = (1 − T)(R̄(X))`,
/// `R̄(X) = φ(X) + Σ φ₋(X′) φ(X″)` over the reduced coproduct.
pub fn birkhoff_factorize<F: Field>(
    phi: &CharacterMap<F>,
    x: &HopfElement,
    rule: &dyn SubgraphRule,
) -> Result<BirkhoffFactorization<F>, RenormError> {
    let mut fact = BirkhoffFactorization {
        center: phi.center().clone(),
        minus: BTreeMap::new(),
        plus: BTreeMap::new(),
        steps: 0,
    };
    for (m, _) in x.terms() {
        for g in m {
            let depth = factor_generator(phi, g, rule, &mut fact)?;
            fact.steps = fact.steps.max(depth);
        }
    }
    Ok(fact)
}

/// Returns the recursion depth used for `g`.
fn factor_generator<F: Field>(
    phi: &CharacterMap<F>,
    g: &str,
    rule: &dyn SubgraphRule,
    fact: &mut BirkhoffFactorization<F>,
) -> Result<usize, RenormError> {
    if fact.minus.contains_key(g) {
        return Ok(0);
    }
    let mut depth = 0;
    let mut rbar = phi
        .get(g)
        .ok_or_else(|| RenormError::MissingCharacter {
            generator: g.to_string(),
        })?
        .clone();
    for entry in rule.subgraphs(g) {
        for h in entry.gamma.iter().chain(&entry.quotient) {
            depth = depth.max(factor_generator(phi, h, rule, fact)?);
        }
        let counter = fact.minus_monomial(&entry.gamma)?;
        rbar = rbar.try_add(&counter.try_mul(&phi.evaluate_monomial(&entry.quotient)?)?)?;
    }
    if let Some(t) = rbar.order() {
        if t < 0 {
            return Err(RenormError::TruncationExceeded {
                generator: g.to_string(),
                order: t,
            });
        }
    }
    let polar = rbar.polar_part();
    fact.minus.insert(g.to_string(), -&polar);
    fact.plus.insert(g.to_string(), &rbar - &polar);
    Ok(depth + 1)
}

/// `⟨φ₁ ⊗ φ₂, Δ(x)⟩`.
pub fn convolution<F: Field>(
    phi1: &dyn Fn(&Monomial) -> Result<LaurentSeries<F>, RenormError>,
    phi2: &dyn Fn(&Monomial) -> Result<LaurentSeries<F>, RenormError>,
    x: &HopfElement,
    rule: &dyn SubgraphRule,
    center: &Rational,
) -> Result<LaurentSeries<F>, RenormError> {
    let mut acc = LaurentSeries::zero(center.clone());
    for ((a, b), c) in coproduct(x, rule).terms() {
        let term = phi1(a)?.try_mul(&phi2(b)?)?;
        acc = acc.try_add(&term.scale(&F::from_rational(c)))?;
    }
    Ok(acc)
}

/// `(φ₋ ∘ S) ⋆ φ₊` evaluated on `x`; equals `φ(x)` for a correct factorization.
pub fn recombine<F: Field>(
    fact: &BirkhoffFactorization<F>,
    x: &HopfElement,
    rule: &dyn SubgraphRule,
) -> Result<LaurentSeries<F>, RenormError> {
    let minus_s = |m: &Monomial| fact.minus(&antipode(&HopfElement::monomial(m.clone()), rule));
    let plus = |m: &Monomial| fact.plus_monomial(m);
    convolution(&minus_s, &plus, x, rule, &fact.center)
}

/// `φ₊(x)` at the center.
pub fn renormalized_value<F: Field>(
    fact: &BirkhoffFactorization<F>,
    x: &HopfElement,
) -> Result<F, RenormError> {
    Ok(fact.plus(x)?.value_at_center()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use crate::renorm::FixtureTable;

    type Q = LaurentSeries<Rational>;

    fn pole(k: i32) -> Q {
        Q::monomial(rat(1), rat(1), -k)
    }

    fn table() -> FixtureTable {
        FixtureTable::from_json(
            r#"[{"graph": "g"}, {"graph": "G", "subgraphs": [{"gamma": "g", "quotient": "q"}]}]"#,
        )
        .unwrap()
    }

    #[test]
    fn primitive_minimal_subtraction() {
        let t = table();
        let a = ratio(3, 2);
        let b = rat(7);
        let phi = CharacterMap::new(rat(1))
            .with("g", &pole(1).scale(&a) + &Q::constant(rat(1), b.clone()))
            .unwrap();
        let f = birkhoff_factorize(&phi, &HopfElement::generator("g"), &t).unwrap();
        let x = HopfElement::generator("g");
        assert_eq!(f.minus(&x).unwrap(), pole(1).scale(&-a));
        assert_eq!(renormalized_value(&f, &x).unwrap(), b);

        let regular = CharacterMap::new(rat(1))
            .with("g", Q::constant(rat(1), rat(4)))
            .unwrap();
        let f = birkhoff_factorize(&regular, &x, &t).unwrap();
        assert!(f.minus(&x).unwrap().is_zero());
        assert_eq!(f.plus(&x).unwrap(), Q::constant(rat(1), rat(4)));
    }

    #[test]
    fn subdivergence_cancels() {
        let t = table();
        let phi = CharacterMap::new(rat(1))
            .with("g", pole(1))
            .unwrap()
            .with("q", pole(1))
            .unwrap()
            .with("G", pole(2))
            .unwrap();
        let x = HopfElement::generator("G");
        let f = birkhoff_factorize(&phi, &x, &t).unwrap();
        // R̄(G) = 1/x² − 1/x · 1/x = 0
        assert!(f.minus(&x).unwrap().is_zero());
        assert!(f.plus(&x).unwrap().is_zero());
        assert_eq!(renormalized_value(&f, &x).unwrap(), rat(0));
        assert!(recombine(&f, &x, &t)
            .unwrap()
            .agrees_with(&phi.evaluate(&x).unwrap()));
        assert_eq!(f.steps, 2);
    }

    #[test]
    fn truncation_is_reported() {
        let t = table();
        let short = Q::from_pole_data(rat(1), 2, vec![rat(1)]);
        let phi = CharacterMap::new(rat(1)).with("g", short).unwrap();
        assert!(matches!(
            birkhoff_factorize(&phi, &HopfElement::generator("g"), &t),
            Err(RenormError::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn unit_character_is_neutral() {
        let t = table();
        let phi = CharacterMap::new(rat(1))
            .with("g", &pole(1) + &Q::constant(rat(1), rat(2)))
            .unwrap()
            .with("q", Q::constant(rat(1), rat(3)))
            .unwrap()
            .with("G", pole(2))
            .unwrap();
        let counit = |m: &Monomial| -> Result<Q, RenormError> {
            Ok(if m.is_empty() {
                Q::one(rat(1))
            } else {
                Q::zero(rat(1))
            })
        };
        let eval = |m: &Monomial| phi.evaluate_monomial(m);
        let x = HopfElement::generator("G");
        assert_eq!(
            convolution(&counit, &eval, &x, &t, &rat(1)).unwrap(),
            phi.evaluate(&x).unwrap()
        );
    }

    #[test]
    fn character_json() {
        let phi = CharacterMap::<Rational>::from_json(
            r#"{"g": {"center": "1", "pole_order": 1, "coeffs": ["1", "2"]}}"#,
        )
        .unwrap();
        assert_eq!(phi.get("g").unwrap().coefficient(-1).unwrap(), rat(1));
        assert!(CharacterMap::<Rational>::from_json(
            r#"{"g": {"center": "1", "coeffs": ["1"]}, "h": {"center": "2", "coeffs": ["1"]}}"#
        )
        .is_err());
        let floats = CharacterMap::<f64>::from_json(r#"{"g": {"coeffs": [0.5, 1.5]}}"#).unwrap();
        assert_eq!(floats.get("g").unwrap().coefficient(1).unwrap(), 1.5);
    }
}
