use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coincident centers")]
    CoincidentCenters,

    #[error("degenerate triple")]
    DegenerateTriple,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid center set: {0}")]
    InvalidCenterSet(String),

    #[error("not a ball-polyhedron")]
    NotABallPolyhedron,

    #[error("not reduced: center {0} generates an empty face")]
    NotReduced(usize),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("duality check failed: {0}")]
    DualityCheckFailed(String),

    #[error("tangential edge")]
    TangentialEdge,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent dihedral angle on edge {edge}: geometric {geometric}, closed form {closed_form}")]
    InconsistentDihedral {
        edge: usize,
        geometric: f64,
        closed_form: f64,
    },

    #[error("face angle undefined: {0}")]
    FaceAngle(String),

    #[error("degenerate span: vertices span {0} dimensions")]
    DegenerateSpan(usize),

    #[error("no 3-cell")]
    NoThreeCell,

    #[error("complement cell not convex: {0:?}")]
    ComplementNotConvex(Vec<usize>),

    #[error("corrupted complex: {0}")]
    CorruptedComplex(String),

    #[error("no lattice isomorphism")]
    NoLatticeIsomorphism,

    #[error("input not certified: {0}")]
    NotCertified(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
