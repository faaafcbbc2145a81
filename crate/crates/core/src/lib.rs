//! Spectral analysis of affine iterated function systems.
//!
//! An affine IFS is given by an expansive integer matrix `R` and a digit set
//! `B`; its maps are `tau_b(x) = R^{-1}(x + b)`. Together with a dual digit set
//! `L` (for `S = R^T`) the crate certifies Hadamard triples, evaluates the
//! Fourier transform of the invariant measure, bounds families of mutually
//! orthogonal exponentials, enumerates `W_B`-cycles and builds and verifies
//! candidate spectra.
//!
//! Exact paths use arbitrary-precision rationals throughout; floating point is
//! only used where a result is explicitly labelled numeric.

pub mod catalog;
pub mod cycles;
pub mod error;
pub mod fourier;
pub mod hadamard;
pub mod ifs;
pub mod lattice;
pub mod linalg;
pub mod pipeline;
pub mod spectrum;
pub mod system_file;
pub mod torus;
pub mod verify;

mod clique;
mod sampling;

pub use error::{AifsError, Result};
pub use fourier::{FourierKernel, MuHat, SymbolValue, TruncationPolicy};
pub use hadamard::{DualPair, HadamardTriple};
pub use ifs::{AffineSystem, AttractorCloud, AttractorMode, BoundingBox};
pub use linalg::{ExpansiveIntMatrix, Rational, RationalMatrix, Vector};
pub use cycles::CycleRecord;
pub use spectrum::SpectrumSet;
pub use torus::{OrbitResult, TorusPoint, ZeroSet};
pub use verify::{CompletenessReport, OrthogonalityCertificate};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
