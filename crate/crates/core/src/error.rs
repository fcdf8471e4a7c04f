use crate::quotient::Elem;

/// Errors raised by constructors and evaluation. Report-only verification
/// routines (`Tower::verify`, `equivalence_report`, ...) do not use this
/// type; they return structured reports instead.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("level order {requested} exceeds the capacity bound {max}")]
    Capacity { requested: u128, max: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty component list")]
    EmptyProduct,

    #[error("level {level} out of range for tower of depth {depth}")]
    InvalidLevel { level: usize, depth: usize },

    #[error("invalid level order: target level {to} exceeds source level {from}")]
    LevelOrder { from: usize, to: usize },

    #[error("element {element} out of range for quotient of order {order}")]
    ElementRange { element: Elem, order: u64 },

    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),

    #[error(
        "compatibility violated at level {level}: element {element} at level {} \
         projects to {projected_image} under the level-{level} map but maps to \
         {mapped_image} before projection", level + 1
    )]
    Incompatible {
        level: usize,
        element: Elem,
        projected_image: Elem,
        mapped_image: Elem,
    },

    #[error(
        "precision exhausted: outputs required at level {output_level} but the map \
         produces outputs only up to level {max_output_level} (tower depth {depth})"
    )]
    PrecisionExhausted {
        output_level: usize,
        max_output_level: usize,
        depth: usize,
    },

    #[error("input supplied at level {supplied} but level {required} is required")]
    InsufficientPrecision { supplied: usize, required: usize },

    #[error("level {level} map is not a group homomorphism: witness pair ({x}, {y})")]
    NotHomomorphism { level: usize, x: Elem, y: Elem },

    #[error("level {level} map is not surjective: {missing} has no preimage")]
    NotSurjective { level: usize, missing: Elem },

    #[error("subgroup at level {level} is not normal")]
    NotNormal { level: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("invalid group table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
