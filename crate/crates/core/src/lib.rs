//! Exact arithmetic for affine diagonal systems: polynomial identities,
//! structure classification, and solution counting by enumeration and by
//! divisor search.

pub mod arith;
pub mod bench;
pub mod coeff;
pub mod counters;
pub mod identities;
pub mod intpoly;
pub mod linalg;
