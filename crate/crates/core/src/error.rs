use thiserror::Error;

/// A chain of Hasse edges, named by the last element before its end, and
/// the composite of the restriction maps along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathProduct {
    pub via: String,
    pub product: String,
}

/// Errors raised by order, topology, linear-algebra and sheaf operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("relation is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error(
        "map is not order-preserving: `{x}` <= `{y}` but f({x}) = `{fx}` is not <= f({y}) = `{fy}`"
    )]
    NotMonotone {
        x: String,
        y: String,
        fx: String,
        fy: String,
    },
    #[error("map domain or codomain does not match: {0}")]
    SpaceMismatch(String),
    #[error("set is not open: `{member}` is included but its successor `{missing}` is not")]
    NotOpen { member: String, missing: String },
    #[error("open set is not contained in the enclosing open: `{0}` is missing")]
    NotContained(String),
    #[error("space has {size} elements, above the enumeration bound of {bound}")]
    EnumerationBound { size: usize, bound: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid scalar literal `{0}`")]
    InvalidScalar(String),
    #[error("division by zero in literal `{0}`")]
    ZeroDenominator(String),
    #[error("no matrix given for the Hasse edge `{0}` < `{1}`")]
    MissingEdgeMap(String, String),
    #[error("`{0}` < `{1}` is not a Hasse edge")]
    NotHasseEdge(String, String),
    #[error(
        "restriction maps are path dependent between `{from}` and `{to}`: via `{}` gives {}, via `{}` gives {}",
        .paths[0].via, .paths[0].product, .paths[1].via, .paths[1].product
    )]
    PathDependent {
        from: String,
        to: String,
        /// Two chains from `from` to `to` with different composites.
        paths: Box<[PathProduct; 2]>,
    },
    #[error("sheaves live on different base posets")]
    BaseMismatch,
    #[error("naturality fails on `{from}` <= `{to}`: target restriction after component gives {lhs}, component after source restriction gives {rhs}")]
    NotNatural {
        from: String,
        to: String,
        lhs: String,
        rhs: String,
    },
    #[error("section is not compatible: restriction from `{from}` to `{to}` gives {expected}, component is {actual}")]
    IncompatibleSection {
        from: String,
        to: String,
        expected: String,
        actual: String,
    },
    #[error("local sections disagree at `{element}`: {left} vs {right}")]
    GlueConflict {
        element: String,
        left: String,
        right: String,
    },
    #[error("cover does not match the given sections: {0}")]
    BadCover(String),
}

pub type Result<T> = std::result::Result<T, Error>;
