//! Casimir pressure between metallic plates from the Lifshitz formula,
//! with local Drude and plasma responses, a spatially nonlocal
//! Drude-type alternative, and dispersion-relation checks for the
//! nonlocal pair.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod kramers_kronig;
pub mod lifshitz;
pub mod optical_data;
pub mod quadrature;
pub mod reflection;
pub mod response;
pub mod sphere_plate;

pub use error::{CasimirError, Result};
