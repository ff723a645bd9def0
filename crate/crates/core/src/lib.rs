//! Kinematic design optimization for a waist-mounted, dual-function robotic limb.
//!
//! The crate is `no_std` (with `alloc`). It covers the whole evaluation and
//! search pipeline:
//!
//! * [`kinematics`]: product-of-exponentials serial chains, the limb and
//!   reference-body models, and Monte Carlo workspace sampling.
//! * [`ellipsoid`]: minimum-volume enclosing ellipsoids (Khachiyan with away
//!   steps) and the four ellipsoid-similarity metrics.
//! * [`objectives`]: the eleven sub-objectives, the reference front and the
//!   generational-distance cost.
//! * [`solver`]: the multi-subpopulation correction firefly search plus a
//!   plain firefly and a random-search baseline.
//!
//! Enable `std` for `std::error::Error` integration and `parallel` to spread
//! fitness evaluations over a rayon pool. Results never depend on the number
//! of worker threads.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(a > b)` is used on purpose so NaN inputs fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ellipsoid;
pub mod error;
mod exec;
pub mod kinematics;
pub mod objectives;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
