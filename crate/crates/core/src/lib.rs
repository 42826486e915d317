//! Fitting ideals, shifted Fitting ideals and determinants of perfect
//! complexes over finite-level group rings `Z_(p)[G]` and truncated
//! Iwasawa algebras `(Z/p^N)[G][T_1..T_d] / (deg >= M)`.
//!
//! Everything is generic over the coefficient ring through [`BaseRing`];
//! the aliases below fix the two supported choices.

pub mod arith;
pub mod complex;
pub mod echelon;
pub mod error;
pub mod fitting;
pub mod hom;
pub mod ideal;
pub mod matrix;
pub mod module;
pub mod ring;
pub mod scalar;
pub mod serial;
pub mod suites;

pub use error::{Error, Result};
pub use ideal::{FracElem, FracIdeal, Verdict};
pub use matrix::RMatrix;
pub use module::FPModule;
pub use ring::{Mode, Precision, Ring, RingElem, RingSpec};
pub use scalar::{BaseRing, ModPrimePower, PLocal};
pub use complex::PerfectComplex;

/// `Z_(p)[G]`, computed exactly.
pub type ExactRing = Ring<PLocal>;
pub type ExactElem = RingElem<PLocal>;
pub type ExactModule = FPModule<PLocal>;
pub type ExactIdeal = FracIdeal<PLocal>;
/// `(Z/p^N)[G][T]/(deg >= M)`.
pub type TruncatedRing = Ring<ModPrimePower>;
pub type TruncatedElem = RingElem<ModPrimePower>;
pub type TruncatedModule = FPModule<ModPrimePower>;
pub type TruncatedIdeal = FracIdeal<ModPrimePower>;
