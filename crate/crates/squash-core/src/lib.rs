//! Reconstruction of smooth hypersurfaces from point samples by vertical
//! collapses of alpha-complexes, with numerical verification of every
//! hypothesis the correctness guarantees depend on.

pub mod complex;
pub mod conditions;
pub mod config;
pub mod delaunay;
pub mod error;
pub mod geom;
pub mod io;
pub mod manifold;
pub mod par;
pub mod report;
pub mod restricted;
pub mod sampling;
pub mod spatial;
pub mod squash;
pub mod vertical;

pub use complex::{Simplex, SimplicialComplex, TopologyCertificate};
pub use config::{Execution, Tolerances};
pub use delaunay::{alpha_complex, alpha_values, delaunay, AlphaComplex, DelaunayComplex};
pub use error::{Error, Result};
pub use geom::Point;
pub use manifold::{AnalyticManifold, ExpectedTopology};
pub use report::{reconstruct, report_schema, verify, RunConfig, RunMode, VerificationReport};
pub use sampling::{sample_manifold, verify_sample, PointCloud, SampleSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
