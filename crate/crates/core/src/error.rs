use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("vertices around index {0} are collinear")]
    CollinearTriple(usize),
    #[error("vertex {0} is not an ear")]
    NotAnEar(usize),
    #[error("found {0} ears, a simple polygon always has at least two")]
    NoTwoEars(usize),
    #[error("no ear can be clipped without creating a collinear triple")]
    NoClippableEar,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(Box<Error>),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("poles {0} and {1} coincide")]
    CoincidentPoles(usize, usize),
    #[error("evaluation point coincides with pole {0}")]
    AtPole(usize),
    #[error("root iteration did not converge (worst relative residual {worst_residual:e})")]
    RootsNotConverged { worst_residual: f64 },
    #[error("point {0} is not inside the unit disk")]
    OutOfDisk(num_complex::Complex64),
    #[error("point {0} is not in the upper half-plane")]
    NotUpperHalfPlane(num_complex::Complex64),
    #[error("ear corner is not an outside corner")]
    NotOutsideCorner,
    #[error("epsilon search exhausted at eps = {epsilon:e} (best margin {best_margin:e})")]
    EpsilonExhausted { epsilon: f64, best_margin: f64 },
    #[error("lengths must be positive")]
    NonpositiveLength,
    #[error("interval {k} touches the approach point {m}")]
    IndexAdjacent { m: usize, k: usize },
    #[error("index {0} out of range")]
    IndexRange(usize),
}
