//! Exact-arithmetic dynamics on towers of finite group quotients.
//!
//! A second-countable profinite group is represented here by a finite chain
//! of quotients `G_0 <- G_1 <- ... <- G_D` with surjective transition
//! homomorphisms ([`tower`]). Self-maps come in two flavors ([`maps`]):
//! compatible families, one map per level commuting with the transitions,
//! and precision maps, whose outputs at one level consume inputs at a
//! higher level. Everything downstream is decided level by level in exact
//! integer or rational arithmetic:
//!
//! - [`analysis`]: measure preservation (= level-wise bijectivity),
//!   ergodicity (= level-wise minimality), the four-way equivalence report,
//!   the total-ergodicity obstruction, orbits and pushforward measures;
//! - [`metric`]: the translation-invariant ultrametric of a tower and the
//!   isometry characterization of measure-preserving maps;
//! - [`shift_factor`]: symbol sequences, first-symbol determinism, and
//!   exact cylinder-word statistics;
//! - [`endo`]: homomorphism specializations (unit matrices, the factor
//!   criterion, the preimage-intersection closure);
//! - [`product`]: quotient-order sets, the coprimality criterion for
//!   product ergodicity, and the brute-force orbit oracle;
//! - [`sample`]: random towers and families for property testing;
//! - [`schema`]: serializable tower/map descriptions and their builders.
//!
//! All verdicts are certificates about the supplied tower: reports state
//! the level range they checked.

pub mod analysis;
pub mod endo;
pub mod error;
pub mod maps;
pub mod metric;
pub mod product;
pub mod quotient;
pub mod sample;
pub mod schema;
pub mod shift_factor;
pub mod tower;

pub use error::{Error, Result};
pub use maps::{CompatibleFamily, Dynamics, PrecisionMap};
pub use quotient::{Elem, FiniteQuotient};
pub use tower::{make_cyclic_tower, make_product_tower, Subgroup, Tower, TransitionMap};

/// Exact nonnegative rational, used for all frequencies and weights.
pub type Rational = num_rational::Ratio<u64>;

#[cfg(test)]
mod concurrency {
    // everything is immutable after construction and freely shareable
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::Tower>();
        assert_send_sync::<crate::FiniteQuotient>();
        assert_send_sync::<crate::CompatibleFamily>();
        assert_send_sync::<crate::PrecisionMap>();
        assert_send_sync::<crate::Subgroup>();
        assert_send_sync::<crate::metric::TowerMetric>();
    }
}
