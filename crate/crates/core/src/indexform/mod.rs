//! Index form of piecewise-smooth transverse variation fields.
//!
//! Under the constant-shape ansatz every field is σ-independent, so each
//! worldsheet integral is `2π` times a τ integral.

mod field;
mod forms;
mod negative;
mod quad;
mod random;

pub use field::{Jet, NodeData, Side, VariationField, FIELD_RTOL};
pub use forms::{index_form, index_form_integrand, index_form_with_breaks, positivity_certificate, PositivityCertificate};
pub use negative::{broken_jacobi_field, negative_mode, EpsSample, NegativeMode, DEFAULT_EPS};
pub use random::{random_field, RandomFieldSpec};
