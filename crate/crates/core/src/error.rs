use thiserror::Error;

use crate::matrix::DominanceProfile;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("inclusions intersect (inclusions {0} and {1})")]
    InclusionsIntersect(usize, usize),
    #[error("inadmissible geometry: {0}")]
    Inadmissible(String),
    #[error("no admissible delta for gap ({0}, {1})")]
    NoAdmissibleDelta(usize, usize),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("enumeration too large: order {0} exceeds {1}")]
    EnumerationTooLarge(usize, usize),
    #[error("column dominance fails at column {0}")]
    ColumnDominance(usize),
    #[error("matrix violates sign/dominance conditions: {0:?}")]
    Dominance(Box<DominanceProfile>),
    #[error("singular matrix (min pivot ratio {0:e})")]
    Singular(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coarse_n too small: {0} < 16")]
    CoarseTooSmall(usize),
    #[error("ill-posed boundary conditions: {0}")]
    IllPosed(String),
    #[error("unknown contour {0}")]
    UnknownContour(usize),
    #[error("point {index} is not inside the computational domain (distance {distance:e})")]
    PointOutside { index: usize, distance: f64 },
    #[error("capacity matrix violates the sign/dominance structure: {0}; refine the mesh")]
    CapacityStructure(String),
    #[error("insufficient points for slope: {0} < 3")]
    InsufficientPoints(usize),
    #[error("non-positive value in log-log fit: ({0}, {1})")]
    NonPositive(f64, f64),
    #[error("offset out of range: |x'| = {0} must be below {1}")]
    OffsetOutOfRange(f64, f64),
    #[error("degenerate Jacobian (|det| = {0:e})")]
    DegenerateJacobian(f64),
    #[error("non-symmetric coefficient matrix at ({0}, {1})")]
    NonSymmetric(f64, f64),
    #[error("coefficient field is not elliptic (min eigenvalue {0:e})")]
    NotElliptic(f64),
    #[error("conductivity ratio must be positive, got {0}")]
    NonPositiveConductivity(f64),
    #[error("discretization too coarse for energy sandwich at k = {k}: {detail}")]
    EnergySandwich { k: f64, detail: String },
    #[error("gap parameter out of range: {0}")]
    GapOutOfRange(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
