//! Convex envelopes of sampled functions on compact convex domains.
//!
//! The crate works on functions `h: K -> [k, +inf]` sampled on a lattice over a
//! compact convex domain `K` (a box in one to three dimensions, or a convex
//! polygon). Around that discretization it provides:
//!
//! * Legendre-Fenchel conjugates, computed both by brute force and by a
//!   linear-time sweep over the lower convex hull ([`transform`]);
//! * the convex envelope (the supremum of all affine minorants), computed both
//!   by biconjugation and as the lower convex hull of the lifted samples;
//! * the lower semi-continuous hull, generalized minimizer sets, and the
//!   minimizer body of the envelope ([`minimize`]);
//! * subdifferentials of the conjugate through tilted minimization and sets of
//!   limiting gradients ([`subdiff`]);
//! * maxima of convex sums over extreme points ([`bauer`]);
//! * finite representing measures for envelope values ([`geometry`]).
//!
//! The crate is `no_std` and only needs `alloc`. Reading spec files, CSV and
//! JSON reports live in the `gammareg` command-line crate.
#![no_std]

extern crate alloc;

pub mod bauer;
pub mod error;
pub mod ext;
pub mod funclang;
pub mod function;
pub mod geometry;
pub mod grid;
pub mod minimize;
pub mod point;
pub mod subdiff;
pub mod transform;
pub mod types;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use function::SampledFunction;
pub use grid::{Domain, DomainKind, Grid};
pub use point::Point;
pub use types::{AffineFunction, ConvexBody, DiscreteMeasure, PointSet};
