use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// Every variant maps to a short stable code (see [`Error::code`]) that the
/// CLI prints and tests match against.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tau must lie strictly inside (2, 3) with margin 1e-6, got {0}")]
    TauRange(f64),
    #[error("invalid argument: {0}")]
    BadArgs(String),
    #[error("degree sequence has odd total {0}")]
    Parity(u128),
    #[error("vertex {0} has degree zero")]
    ZeroDegree(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    MultiEdge(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    BadVertex { vertex: usize, n: usize },
    #[error("instance too large for exhaustive oracle: {0}")]
    OracleSize(String),
    #[error("degree sequence is not graphical")]
    NotGraphical,
    #[error("weight {weight} at vertex {vertex} is not a positive finite number")]
    BadWeight { vertex: usize, weight: f64 },
    #[error("no graph in the ensemble contains the conditioning edge set")]
    EmptyCondition,
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("sampled graph is not a member of the ensemble")]
    NotInEnsemble,
    #[error("quadrature did not reach tolerance {rel_tol:e}; best estimate {estimate} (error {error:e})")]
    NoConverge {
        estimate: f64,
        error: f64,
        rel_tol: f64,
    },
    #[error("degree k = {0} lies in Range III; use the Range-III integral")]
    UseRange3Integral(u64),
    #[error("k list is empty")]
    NoK,
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable short code for the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TauRange(_) => "tau-range",
            Error::BadArgs(_) => "bad-args",
            Error::Parity(_) => "parity",
            Error::ZeroDegree(_) => "zero-degree",
            Error::SelfLoop(_) => "self-loop",
            Error::MultiEdge(..) => "multi-edge",
            Error::BadVertex { .. } => "bad-vertex",
            Error::OracleSize(_) => "oracle-size",
            Error::NotGraphical => "not-graphical",
            Error::BadWeight { .. } => "bad-weight",
            Error::EmptyCondition => "empty-condition",
            Error::EmptyEnsemble => "empty-ensemble",
            Error::NotInEnsemble => "not-in-ensemble",
            Error::NoConverge { .. } => "no-converge",
            Error::UseRange3Integral(_) => "use-range3-integral",
            Error::NoK => "no-k",
            Error::Context { source, .. } => source.code(),
            Error::Parse(_) => "parse",
            Error::Io { .. } => "io",
        }
    }

    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
