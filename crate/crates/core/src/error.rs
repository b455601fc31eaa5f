use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ambiguity parameters violate alpha + beta + gamma = -1 (sum = {sum})")]
    OrderingConstraint { sum: f64 },

    #[error("delta is undefined for beta = -1 (BenDaniel-Duke ordering)")]
    BetaMinusOne,

    #[error("invalid mass profile: {0}")]
    InvalidProfile(String),

    #[error("x = {x} is outside the mass domain (c1*x + c2 = {arg} <= 0)")]
    OutOfDomain { x: f64, arg: f64 },

    #[error("q = {q} is not attained by the Liouville map")]
    OutOfRange { q: f64 },

    #[error("node x = {x} is within edge_epsilon of the mass singularity")]
    SingularEdge { x: f64 },

    #[error("bad interval ({a}, {b})")]
    BadInterval { a: f64, b: f64 },

    #[error("grid needs at least {min} interior nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("declared F'(q) disagrees with finite differences of F at q = {q} (|diff| = {diff:e})")]
    GeneratorMismatch { q: f64, diff: f64 },

    #[error("generator kind {0} has no closed form / analytic oracle")]
    UnsupportedGenerator(String),

    #[error("grid kind {found} is not valid here (expected {expected})")]
    WrongGrid {
        expected: &'static str,
        found: &'static str,
    },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("QR iteration did not converge while deflating index {index}")]
    NoConvergence {
        index: usize,
        converged: Vec<Complex64>,
    },

    #[error("brute-force oracle supports N <= 8, got {0}")]
    TooLarge(usize),

    #[error("eigenvector required for eigenvalue #{0} but none was computed")]
    MissingVectors(usize),

    #[error("{picture} picture has {found} bound states, {needed} required")]
    InsufficientBoundStates {
        picture: &'static str,
        found: usize,
        needed: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
