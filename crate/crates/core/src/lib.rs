//! Univalent harmonic maps of the unit disk onto Jordan polygons.
//!
//! A map is described by a [`StepMap`]: a polygon together with a partition of
//! the unit circle into arcs, one arc per vertex. Its Poisson extension is the
//! harmonic map `f = h + conj(g)` whose boundary values are the vertices. The
//! [`mapper`] builds, for any simple polygon, a partition for which every
//! finite zero of `h'` lies strictly outside the closed unit disk, which makes
//! the extension univalent onto the polygon interior. [`certify`] checks a
//! step map independently of how it was produced.
//!
//! ```
//! use polyharm::{mapper, Polygon, SolveOptions};
//! use num_complex::Complex64 as C;
//!
//! let square = Polygon::normalize(&[C::new(0., 0.), C::new(1., 0.), C::new(1., 1.), C::new(0., 1.)]).unwrap();
//! let cert = mapper::solve(&square, &SolveOptions::default()).unwrap();
//! assert!(cert.exterior_margin > 0.0);
//! assert_eq!(cert.step_map.partition().angles().len(), 5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod certify;
mod error;
pub mod mapper;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod poisson;
pub mod pole_sum;
pub mod polygon;

pub use certify::{verify, VerificationReport, VerifyOptions};
pub use error::{Error, Result};
pub use mapper::{solve, Certificate, EarStep, SolveOptions};
pub use num_complex::Complex64;
pub use poisson::{HalfPlaneStepMap, Partition, StepMap};
pub use pole_sum::{CertifiedRoots, PoleSum};
pub use polygon::{EarReport, Polygon};
