//! Connes–Kreimer renormalization: Laurent series, the Hopf algebra of
//! graph generators, characters and their Birkhoff factorization.

mod birkhoff;
mod hopf;
mod series;

pub use birkhoff::{
    birkhoff_factorize, convolution, recombine, renormalized_value, BirkhoffFactorization,
    CharacterMap, SeriesFromDocument,
};
pub use hopf::{
    antipode, apply_tensor, coproduct, coproduct_generator, counit, divergence_table,
    reduced_coproduct, FixtureEntry, FixtureSubgraph, FixtureTable, HopfElement, Monomial,
    OneOrMany, SubgraphEntry, SubgraphRule, Tensor,
};
pub use series::{Field, LaurentSeries, SeriesDocument, SeriesError, DEFAULT_TRUNCATION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenormError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("malformed subgraph table: {0}")]
    MalformedFixture(String),
    #[error("malformed character: {0}")]
    MalformedCharacter(String),
    #[error("character has no value for generator {generator}")]
    MissingCharacter { generator: String },
    #[error(
        "series for {generator} is only known to order {order}; its regular value is undetermined"
    )]
    TruncationExceeded { generator: String, order: i32 },
}

/// Rota–Baxter operator of minimal subtraction: the polar part.
pub fn rota_baxter_t<F: Field>(f: &LaurentSeries<F>) -> LaurentSeries<F> {
    f.polar_part()
}
