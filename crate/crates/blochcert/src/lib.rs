//! Certified lower bounds for Bloch-type constants.
//!
//! This crate turns two fixed-point arguments, the Banach contraction
//! principle and the Earle-Hamilton theorem, into concrete certificates:
//! given a complex polynomial (or a polynomial map of several variables), it
//! certifies disks or balls in the image that are covered injectively, and it
//! evaluates the closed-form lower-bound formulas those arguments produce for
//! Bloch-type constants, in one variable and for K-mappings in several.
//!
//! The pieces:
//!
//! - [`series`]: univariate complex polynomials with an expansion center,
//!   Taylor shifts, and certified circle maxima.
//! - [`contraction`]: the fixed-point maps whose fixed points invert a
//!   polynomial, schlicht-disk certification, plain iteration, empirical
//!   certificate verification, and a deterministic center search.
//! - [`bounds`]: the closed-form bound expressions (one-variable, Landau
//!   refinement, K-mapping) and grid optimizers for their free parameters.
//! - [`multivariate`]: polynomial maps of several variables, Jacobian
//!   singular-value statistics, K-mapping constant estimation, and schlicht
//!   ball certification on polydisks.
//!
//! Numeric code is generic over the scalar through [`Real`] (implemented for
//! `f32` and `f64`); the aliases at the crate root fix the common concrete
//! choices.
//!
//! ```
//! use blochcert::contraction::certify_schlicht;
//! use blochcert::{C64, Poly64};
//!
//! // p(z) = z + z^3/3 + (4.66922/4) z^4, expanded about -0.07 on radius 0.59.
//! let p = Poly64::new(
//!     C64::new(0.0, 0.0),
//!     vec![
//!         C64::new(0.0, 0.0),
//!         C64::new(1.0, 0.0),
//!         C64::new(0.0, 0.0),
//!         C64::new(1.0 / 3.0, 0.0),
//!         C64::new(4.66922 / 4.0, 0.0),
//!     ],
//! )
//! .unwrap();
//! let cert = certify_schlicht(&p, C64::new(-0.07, 0.0), 0.59).unwrap();
//! assert!(cert.schlicht_radius > 0.43);
//! ```

pub mod bounds;
pub mod contraction;
pub mod error;
mod linalg;
pub mod multivariate;
mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::Real;

/// Single-precision complex scalar.
pub type C32 = num_complex::Complex<f32>;
/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision polynomial.
pub type Poly32 = series::Poly<f32>;
/// Double-precision polynomial.
pub type Poly64 = series::Poly<f64>;
/// Single-precision polynomial map.
pub type PolyMap32 = multivariate::PolyMap<f32>;
/// Double-precision polynomial map.
pub type PolyMap64 = multivariate::PolyMap<f64>;
