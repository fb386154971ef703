//! Numerical laboratory for simplicial de Rham cocycles on matrix Lie groups.
//!
//! Layers, from the bottom up:
//!
//! * [`linalg`], [`jet`], [`lie`]: matrix functions, exact forward-mode
//!   derivatives, typed group/algebra elements and invariant polynomials;
//! * [`simplex`]: barycentric points, face maps and simplex quadrature;
//! * [`bss`]: the forms ω_n on G^n from connection interpolation, closed-form
//!   oracles and the simplicial identities they satisfy;
//! * [`local`]: geodesic simplices, the forms β_{m,q} and η_l;
//! * [`gauge`]: loop and torus gauge groups, transgression, Kac–Moody and
//!   Feigin cocycles, the Chevalley–Eilenberg differential;
//! * [`lab`]: seeded verification suites and report writing.

pub mod bss;
pub mod error;
pub mod gauge;
pub mod jet;
pub mod lab;
pub mod lie;
pub mod linalg;
pub mod local;
pub mod numerics;
pub mod sampling;
pub mod simplex;

pub use error::{Error, Result};
pub use linalg::CMat;
