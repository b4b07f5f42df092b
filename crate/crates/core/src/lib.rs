//! The small Schröder semigroup SS'_n of isotone, order-decreasing partial
//! transformations of `[n]` whose domain avoids 1, together with its ideals
//! K(n, p) and Rees quotients RSS'_n(p).
//!
//! * [`pmap`]: the element type and named elements.
//! * [`families`]: enumeration and closed-form counts.
//! * [`green`]: Cayley tables, Green's and starred Green's relations.
//! * [`rank`]: closures, the rank oracle and generating sets.
//! * [`verify`]: the aggregated checks behind the command-line reports.

pub mod error;
pub mod families;
pub mod green;
pub mod pmap;
pub mod rank;
pub mod verify;

pub use error::{Error, Result};
pub use families::{FamilyKind, FamilySpec};
pub use green::{Element, EqPartition, SemigroupTable};
pub use pmap::PartialMap;
