use thiserror::Error;

use crate::complex::Simplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate simplex")]
    DegenerateSimplex,
    #[error("flat U has dimension 0")]
    ZeroDimFlat,
    #[error("point is at distance >= reach from the manifold")]
    NearMedialAxis,
    #[error("point is not on the manifold (residual {0:e})")]
    NotOnManifold(f64),
    #[error("infeasible sample spec: {0}")]
    InfeasibleSpec(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("input points are affinely degenerate")]
    AllCoplanar,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("simplex {0:?} not in complex")]
    SimplexNotFound(Simplex),
    #[error("simplex {0:?} is not free")]
    NotFree(Simplex),
    #[error("simplex {0:?} leaves the tubular neighborhood")]
    OutsideTube(Simplex),
    #[error("facet {facet:?} of {simplex:?} is vertical")]
    VerticalFacet { simplex: Simplex, facet: Simplex },
    #[error("facets of {0:?} do not split into upper and lower")]
    OneSided(Simplex),
    #[error("circumcenter of {0:?} lies on the manifold")]
    GenericityViolated(Simplex),
    #[error("no admissible sink or source among {0} remaining d-simplices")]
    Stuck(usize),
    #[error("beta radicand is negative")]
    ImaginaryBeta,
    #[error("angle bound argument {0} exceeds one")]
    BoundExceedsOne(f64),
    #[error("complex is not vertically convex")]
    NotVerticallyConvex,
    #[error("canonical embedding violated: {0}")]
    NotEmbedded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
