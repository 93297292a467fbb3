//! Generalized Delsarte extremal problems on finite and finitely generated
//! discrete Abelian groups.
//!
//! The primal problem asks for the infimum of `⟨f, ρ⟩` over positive
//! definite `f` with `⟨f, σ⟩ = 1` and `f ≤ 0` off a set `Ω`; the dual asks
//! for the supremum of `s` such that `ρ − sσ` splits as a measure of positive
//! type minus a nonnegative measure supported off `Ω`. On finite groups both
//! are finite linear programs, solved here in exact rational arithmetic where
//! the character table allows it, and the absence of a duality gap is
//! certified by an independently checkable dual certificate.

pub mod constructions;
pub mod duality;
pub mod error;
pub mod function;
pub mod functionals;
pub mod group;
pub mod io;
pub mod lp;
pub mod scalar;
pub mod spectral;
pub mod zd;

pub use error::{Error, Result};
pub use function::GroupFunction;
pub use functionals::MeasureFunctional;
pub use group::{Element, GroupSpec, LatticeTiling, Region};
pub use scalar::{Mode, Rational, Scalar};
