//! Fourier analysis, Laplacians and hypercontractivity checks for functions on
//! spaces of linear maps over small finite fields.

pub mod calculus;
pub mod cube;
pub mod expansion;
pub mod field;
pub mod fixtures;
pub mod fourier;
pub mod global;
pub mod io;
pub mod laplacians;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod space;

pub use field::{Field, FieldElement, FieldError};
pub use fourier::{FourierError, Frame, MapFunction, RestrictionTriple, Spectrum};
pub use linalg::{Lattice, LinalgError, Mat, QuotientFrame, Subspace};
pub use scalar::Scalar;
pub use space::Space;

pub use cube::{CubeFunction, CubeSpectrum};

/// Double-precision instantiations, the default throughout the checks.
pub type MapFunction64 = MapFunction<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type CubeFunction64 = CubeFunction<f64>;
pub type CubeSpectrum64 = CubeSpectrum<f64>;

/// Single-precision instantiations for memory-bound experiments.
pub type MapFunction32 = MapFunction<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type CubeFunction32 = CubeFunction<f32>;
pub type CubeSpectrum32 = CubeSpectrum<f32>;
