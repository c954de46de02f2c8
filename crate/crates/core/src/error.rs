use thiserror::Error;

/// Errors raised by the eschlab operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("p and q must have equal sums (got {p_sum} and {q_sum})")]
    SumMismatch { p_sum: i128, q_sum: i128 },
    #[error("entry {value} exceeds the magnitude bound {limit}")]
    Overflow { value: i128, limit: i64 },
    #[error("pair ({p:?}, {q:?}) is not admissible")]
    NotAdmissible { p: [i64; 3], q: [i64; 3] },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not in su(3): {0}")]
    NotInAlgebra(String),
    #[error("matrix is not in SU(3): {0}")]
    NotInGroup(String),
    #[error("degenerate plane (Gram determinant {0:e})")]
    DegeneratePlane(f64),
    #[error("q = {0:?} is not pairwise relatively prime")]
    NotPairwiseCoprime([i64; 3]),
    #[error("Z must be non-zero")]
    ZeroZ,
    #[error("domain error: {0}")]
    Domain(DomainFlag),
    #[error("no gamma solves |sin(a)k11 - cos(a)conj(k12)|^2 = h: h = {h}, achievable range [{lo}, {hi}]")]
    NoGammaSolution { h: f64, lo: f64, hi: f64 },
    #[error("no theta in the window satisfies 0 < h < 1 and 0 < g < 1")]
    EmptyWindow,
    #[error("q = {0:?} is not a new Wilking candidate")]
    NotCandidate([i64; 3]),
    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),
}

/// The domain restriction violated by an `h`/`g` evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainFlag {
    SinThetaZero,
    DenominatorPlusZero,
    DenominatorMinusZero,
    EqualQ1Q2,
}

impl std::fmt::Display for DomainFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DomainFlag::SinThetaZero => "sin(theta) = 0",
            DomainFlag::DenominatorPlusZero => "p3 cos^2(theta) + q3 = 0",
            DomainFlag::DenominatorMinusZero => "p3 cos^2(theta) - q3 = 0",
            DomainFlag::EqualQ1Q2 => "q1 = q2",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
