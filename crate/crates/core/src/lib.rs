//! Exact arithmetic for formal meromorphic connections on the punctured disk.

pub mod connection;
pub mod error;
pub mod formal;
pub mod io;
pub mod lattice;
pub mod laurent;
pub mod matrix;
pub mod moduli;
pub mod poly;
pub mod scalar;
pub mod strata;
pub mod toral;

pub use error::{Error, Result};
pub use laurent::{OneForm, Series, DEFAULT_DIGITS, MIN_DIGITS};
pub use matrix::{CMat, LMat};
pub use poly::Poly;
pub use scalar::{Field, Scalar};
pub use lattice::{GradedEndo, ParahoricContext};
pub use strata::{RegularityReport, Stratum, StratumSplit};
pub use toral::{TorusData, ToralElement};
pub use connection::{DiagonalizationResult, FormalConnection, SlopeResult};
pub use formal::{orbit_equivalent, FormalType, OrbitSearch, Validation, WeylElement};
pub use moduli::{assemble_global, GlobalConfig, GlobalConnection, OrbitDimensions, Point, PrincipalPart};
