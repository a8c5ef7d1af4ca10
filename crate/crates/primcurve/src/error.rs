use thiserror::Error;

/// Errors surfaced by validation and by the sequence constructions.
///
/// Variants are split into input-contract failures (bad data handed to the
/// library) and internal model defects (an existence claim the construction
/// relies on failed to materialize; these indicate a bug, not bad input).
#[derive(Debug, Error)]
pub enum Error {
    #[error("curve is not embedded: {0}")]
    NotEmbedded(String),
    #[error("portal transit mismatch: {0}")]
    PortalMismatch(String),
    #[error("curve does not bound a disk: reduced word {0:?} is nonempty")]
    NotADisk(Vec<i32>),
    #[error("disk is separating where a nonseparating disk is required")]
    SeparatingDisk,
    #[error("degenerate tangency or shared feature, input is not in general position: {0}")]
    NonTransversal(String),
    #[error("invalid chart: {0}")]
    BadChart(String),
    #[error("arc endpoints are not attached to the curve")]
    ArcNotAttached,
    #[error("arc interior meets the curve")]
    InteriorMeetsCurve,
    #[error("band crosses a curve it must avoid")]
    BandCrossesBoundary,
    #[error("band sum produced a separating disk")]
    ResultSeparating,
    #[error("no arc exists: the avoid region disconnects the endpoints")]
    NoArcExists,
    #[error("no handle available in the complement of the avoid region")]
    NoHandleAvailable,
    #[error("no progress: no trivial-word surgery found at minimal position")]
    NoProgress,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("torus parameters are not coprime: ({0}, {1})")]
    NotCoprime(i64, i64),
    #[error("bad torus-knot parameters: ({0}, {1})")]
    BadParameters(i64, i64),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error("internal model defect: {0}")]
    ModelDefect(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 2 for input errors, 3 for
    /// internal model defects.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ModelDefect(_) | Error::NoProgress => 3,
            _ => 2,
        }
    }
}
