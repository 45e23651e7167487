use serde::Serialize;
use thiserror::Error;

/// Which part of the library raised an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    GroupCore,
    Complex,
    Polyhedron,
    Holonomy,
    Gauge,
    Ribbon,
    Wilson,
    Cli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Error)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    #[error("structural error")]
    Structural,
    #[error("composability error")]
    Composability,
    #[error("gluing error")]
    Gluing,
    #[error("connectivity error")]
    Connectivity,
    #[error("move inapplicable")]
    MoveInapplicable,
    #[error("domain error")]
    Domain,
    #[error("geometry error")]
    Geometry,
    #[error("path error")]
    Path,
    #[error("incomplete decoration")]
    Incomplete,
    #[error("incomplete gerbe datum")]
    IncompleteDatum,
    #[error("incompatible configuration")]
    IncompatibleConfiguration,
    #[error("invalid gauge parameter")]
    InvalidParameter,
    #[error("stacking error")]
    Stacking,
    #[error("summability error")]
    Summability,
    #[error("contraction error")]
    Contraction,
    #[error("composition error")]
    Composition,
    #[error("pairing error")]
    Pairing,
    #[error("inconsistent gerbe")]
    InconsistentGerbe,
    #[error("unresolved reference")]
    Reference,
    #[error("schema violation")]
    Schema,
    #[error("i/o error")]
    Io,
}

/// Error record: originating module, kind, the violated precondition and a free-form detail.
#[derive(Debug, Clone, Serialize, Error)]
#[error("{module:?}: {kind} [{precondition}] {detail}")]
pub struct Error {
    pub module: Module,
    pub kind: ErrorKind,
    pub precondition: &'static str,
    pub detail: String,
}

impl Error {
    pub fn new(
        module: Module,
        kind: ErrorKind,
        precondition: &'static str,
        detail: impl Into<String>,
    ) -> Self {
        Error {
            module,
            kind,
            precondition,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
