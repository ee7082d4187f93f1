//! Exact certificates for stick number, bridge index and superbridge index
//! of polygonal knots.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`geom`]: integer polygons, regular projection directions, exact
//!   projection to a diagram, height-function extrema.
//! - [`diagram`]: PD codes, Gauss codes, Wirtinger presentations, crossing
//!   changes, RI/RII simplification.
//! - [`quotients`]: transposition labelings and the search for surjections
//!   onto symmetric groups (bridge index lower bounds).
//! - [`invariants`]: Alexander polynomial, determinant, Fox colorings,
//!   Kauffman bracket.
//! - [`certify`]: interval facts and the derivation chain.
//! - [`store`]: coordinate files and the on-disk catalog.

pub mod certify;
pub mod diagram;
pub mod geom;
pub mod invariants;
pub mod quotients;
pub mod store;
