use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use qmw_core::graph::FeynmanGraph;
use qmw_core::rational::{rat, Rational};
use qmw_core::renorm::{
    antipode, apply_tensor, birkhoff_factorize, convolution, coproduct, counit, divergence_table,
    recombine, rota_baxter_t, CharacterMap, FixtureTable, HopfElement, LaurentSeries, Monomial,
    RenormError, SubgraphRule,
};

type Q = LaurentSeries<Rational>;

const FIXTURES: [&str; 4] = ["primitive", "rainbow", "disjoint", "overlapping"];

fn fixture(name: &str) -> FixtureTable {
    let path = format!(
        "{}/../../data/fixtures/{name}.json",
        env!("CARGO_MANIFEST_DIR")
    );
    FixtureTable::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn all_tables() -> Vec<(String, FixtureTable)> {
    let mut out: Vec<(String, FixtureTable)> = FIXTURES
        .iter()
        .map(|n| (n.to_string(), fixture(n)))
        .collect();
    let sunset = FeynmanGraph::sunset([rat(1), rat(2), rat(3)], 4).unwrap();
    out.push(("sunset-d4".into(), divergence_table(&[sunset], 4, &rat(1))));
    out
}

type Triple = BTreeMap<(Monomial, Monomial, Monomial), Rational>;

fn push(out: &mut Triple, key: (Monomial, Monomial, Monomial), c: Rational) {
    let e = out.entry(key).or_insert_with(Rational::zero);
    *e += c;
}

fn left_iterated(x: &HopfElement, rule: &dyn SubgraphRule) -> Triple {
    let mut out = Triple::new();
    for ((a, b), c) in coproduct(x, rule).terms() {
        for ((a1, a2), c2) in coproduct(&HopfElement::monomial(a.clone()), rule).terms() {
            push(&mut out, (a1.clone(), a2.clone(), b.clone()), c * c2);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn right_iterated(x: &HopfElement, rule: &dyn SubgraphRule) -> Triple {
    let mut out = Triple::new();
    for ((a, b), c) in coproduct(x, rule).terms() {
        for ((b1, b2), c2) in coproduct(&HopfElement::monomial(b.clone()), rule).terms() {
            push(&mut out, (a.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn generators(t: &FixtureTable) -> Vec<String> {
    t.generators().cloned().collect()
}

#[test]
fn coassociativity_on_fixtures() {
    for (name, t) in all_tables() {
        for g in generators(&t) {
            let x = HopfElement::generator(&g);
            assert_eq!(left_iterated(&x, &t), right_iterated(&x, &t), "{name}: {g}");
        }
        let gens = generators(&t);
        let product = HopfElement::monomial(vec![gens[0].clone(), gens[gens.len() - 1].clone()]);
        assert_eq!(
            left_iterated(&product, &t),
            right_iterated(&product, &t),
            "{name}: product"
        );
    }
}

#[test]
fn counit_and_antipode_axioms() {
    for (name, t) in all_tables() {
        let s = |m: &Monomial| antipode(&HopfElement::monomial(m.clone()), &t);
        let id = |m: &Monomial| HopfElement::monomial(m.clone());
        for g in generators(&t) {
            let x = HopfElement::generator(&g);
            let d = coproduct(&x, &t);
            let zero = HopfElement::zero();
            assert_eq!(apply_tensor(&d, &s, &id), zero, "{name}: m(S⊗id)Δ({g})");
            assert_eq!(apply_tensor(&d, &id, &s), zero, "{name}: m(id⊗S)Δ({g})");

            let eps_left =
                |m: &Monomial| HopfElement::scalar(counit(&HopfElement::monomial(m.clone())));
            assert_eq!(apply_tensor(&d, &eps_left, &id), x, "{name}: (ε⊗id)Δ({g})");
            assert_eq!(apply_tensor(&d, &id, &eps_left), x, "{name}: (id⊗ε)Δ({g})");

            // S is an involution on a commutative Hopf algebra
            assert_eq!(antipode(&antipode(&x, &t), &t), x, "{name}: S∘S({g})");
        }
        let unit = HopfElement::unit();
        let d = coproduct(&unit, &t);
        assert_eq!(apply_tensor(&d, &s, &id), unit);
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

/// Series at center 1 with pole order ≤ `max_pole`, known through `order`.
fn series(max_pole: usize, order: i32) -> impl Strategy<Value = Q> {
    (0..=max_pole).prop_flat_map(move |pole| {
        let len = (order + pole as i32 + 1) as usize;
        prop::collection::vec(small_rational(), len)
            .prop_map(move |coeffs| Q::from_pole_data(rat(1), pole, coeffs))
    })
}

fn character_for(t: &FixtureTable, values: &[Q]) -> CharacterMap<Rational> {
    let mut phi = CharacterMap::new(rat(1));
    for (g, v) in generators(t).iter().zip(values.iter().cycle()) {
        phi.insert(g, v.clone()).unwrap();
    }
    phi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rota_baxter_identity(f in series(3, 8), g in series(3, 8)) {
        let t = rota_baxter_t::<Rational>;
        let lhs = &t(&f) * &t(&g);
        let rhs = &(&t(&(&f * &t(&g))) + &t(&(&t(&f) * &g))) - &t(&(&f * &g));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factorization_recombines(values in prop::collection::vec(series(3, 8), 6)) {
        for (name, t) in all_tables() {
            let phi = character_for(&t, &values);
            for g in generators(&t) {
                let x = HopfElement::generator(&g);
                let fact = birkhoff_factorize(&phi, &x, &t).unwrap();
                let minus = fact.minus(&x).unwrap();
                let plus = fact.plus(&x).unwrap();
                prop_assert!(minus.terms().all(|(k, _)| k < 0), "{}: φ₋({}) not polar", name, g);
                prop_assert!(plus.terms().all(|(k, _)| k >= 0), "{}: φ₊({}) not regular", name, g);
                let back = recombine(&fact, &x, &t).unwrap();
                prop_assert!(back.agrees_with(&phi.evaluate(&x).unwrap()), "{}: {}", name, g);
            }
        }
    }

    #[test]
    fn convolution_is_associative(
        a in prop::collection::vec(series(2, 6), 6),
        b in prop::collection::vec(series(2, 6), 6),
        c in prop::collection::vec(series(2, 6), 6),
    ) {
        for (name, t) in all_tables() {
            let (pa, pb, pc) = (character_for(&t, &a), character_for(&t, &b), character_for(&t, &c));
            let one = rat(1);
            let fa = |m: &Monomial| pa.evaluate_monomial(m);
            let fb = |m: &Monomial| pb.evaluate_monomial(m);
            let fc = |m: &Monomial| pc.evaluate_monomial(m);
            let ab = |m: &Monomial| convolution(&fa, &fb, &HopfElement::monomial(m.clone()), &t, &one);
            let bc = |m: &Monomial| convolution(&fb, &fc, &HopfElement::monomial(m.clone()), &t, &one);
            for g in generators(&t) {
                let x = HopfElement::generator(&g);
                let left = convolution(&ab, &fc, &x, &t, &one).unwrap();
                let right = convolution(&fa, &bc, &x, &t, &one).unwrap();
                prop_assert!(left.agrees_with(&right), "{}: {}", name, g);
            }
        }
    }
}

#[test]
fn counterterm_of_nested_rainbow() {
    // φ(g) = 1/x + 2, φ(G2) = 1/x² + 3/x + 5: R̄(G2) = 1/x + 5
    let t = fixture("rainbow");
    let x = |k: i32| Q::monomial(rat(1), rat(1), k);
    let phi = CharacterMap::new(rat(1))
        .with("g", &x(-1) + &Q::constant(rat(1), rat(2)))
        .unwrap()
        .with(
            "G2",
            &(&x(-2) + &x(-1).scale(&rat(3))) + &Q::constant(rat(1), rat(5)),
        )
        .unwrap();
    let g2 = HopfElement::generator("G2");
    let f = birkhoff_factorize(&phi, &g2, &t).unwrap();
    assert_eq!(f.minus(&g2).unwrap(), x(-1).scale(&rat(-1)));
    assert_eq!(f.plus(&g2).unwrap(), Q::constant(rat(1), rat(5)));
}

#[test]
fn missing_generator_is_reported() {
    let t = fixture("rainbow");
    let phi = CharacterMap::new(rat(1))
        .with("G2", Q::one(rat(1)))
        .unwrap();
    let err = birkhoff_factorize(&phi, &HopfElement::generator("G2"), &t).unwrap_err();
    assert_eq!(
        err,
        RenormError::MissingCharacter {
            generator: "g".into()
        }
    );
}
