//! Exact counting and character-sum machinery over prime fields `F_p`.
//!
//! * [`field`]: arithmetic, discrete logarithms, multiplicative characters.
//! * [`sets`]: intervals, subgroups, polynomial images, prime residues, random sets.
//! * [`energy`]: additive energies, `E3`, `T_k`, ratio multiplicities, coset statistics.
//! * [`geometry`]: line spectra, collinear triples, point-plane incidences.
//! * [`charsums`]: bilinear sums, the amplification map, complete product sums.
//! * [`bounds`]: bound skeletons, exponent regions, slope fitting.
//! * [`oracle`]: brute-force references for the fast counters.

pub mod bounds;
pub mod charsums;
pub mod conv;
pub mod energy;
pub mod field;
pub mod geometry;
pub mod numeric;
pub mod oracle;
pub mod sets;

pub use bounds::{BoundReport, BoundsError, ExponentPoint, RegionClass};
pub use charsums::{AmplificationParams, CharsumError, MultiplicityMap, WeightVector};
pub use energy::{EnergyError, MultiplicityFn};
pub use field::{Character, FieldError, PrimeField};
pub use geometry::{GeometryError, Line, LineSpectrum, Plane, Point3, TripleConvention};
pub use num_complex::Complex64;
pub use sets::{FpSet, SetError, SetTag};

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Charsum(#[from] CharsumError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}
