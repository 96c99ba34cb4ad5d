//! Exact-arithmetic finite type (Vassiliev) invariants of links in thickened
//! surfaces, in the twisted I-bundle over the projective plane, and in S^1 x S^2.
//!
//! The building blocks are chord diagrams whose skeleton arcs carry labels in
//! the fundamental group of the surface, together with an orientation character
//! on that group. On top of them the crate provides:
//!
//! * quotient spaces of labeled diagrams by the four-term and framing
//!   relations plus the label-specific relations of each target manifold,
//!   with exact rational dimension and membership computations;
//! * a degree-truncated universal invariant of tangles and links built from a
//!   rational Drinfeld associator that is solved for, not hard-coded;
//! * a Conway-style polynomial for links in thickened surfaces defined by a
//!   skein recursion over a signed skein ring;
//! * functoriality checks for finite coverings: pulling back diagrams along a
//!   coset table and lifting links to the covering surface commute with the
//!   universal invariant.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere. The crate is `no_std` (with `alloc`).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conway;
pub mod covers;
pub mod diagrams;
pub mod groups;
pub mod kontsevich;
pub mod linalg;
pub mod spaces;
pub mod surfaces;
pub mod tangles;
