use thiserror::Error;

/// Library-wide error type. Variants carry enough ids to replay the failing check.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("input has {n} vertices, exact treewidth cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge set is not a forest (cycle through vertex {vertex})")]
    NotAForest { vertex: usize },
    #[error("edge {u}-{v} does not join an ancestor/descendant pair of the rooted tree")]
    NotInClosure { u: usize, v: usize },
    #[error("edge set is not a star forest (component of vertex {vertex} has two vertices of degree >= 2)")]
    NotStarForest { vertex: usize },
    #[error("edges {a} and {b} share a vertex and cross")]
    AdjacentCrossing { a: usize, b: usize },
    #[error("colouring is not transparent: edges {a} and {b} cross and both have colour {colour}")]
    NotTransparent { a: usize, b: usize, colour: usize },
    #[error("degenerate position: {reason} (primitives {ids:?})")]
    DegeneratePosition { reason: String, ids: Vec<usize> },
    #[error("duplicate chord {u}-{v}")]
    DuplicateChord { u: usize, v: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("star-forest cover does not refine the colouring at edge {edge}")]
    CoverMismatch { edge: usize },
    #[error("branch set of vertex {vertex} exceeds weak radius {bound} about its origin (distance {dist})")]
    RadiusExceeded { vertex: usize, bound: usize, dist: usize },
    #[error("distance bound is undefined at k = 0; walks have no lower-coloured interruptions")]
    KZero,
    #[error("model host does not match the supplied host graph: {0}")]
    ModelHostMismatch(String),
    #[error("drawing does not carry a circular order")]
    NotCircular,
    #[error("tree is not a spanning tree of the drawing's graph: {0}")]
    NotSpanning(String),
    #[error("vertex {vertex} is unreachable from the candidate origin")]
    Unreachable { vertex: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
