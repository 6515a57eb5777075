//! Killing vector fields of diagonal Riemannian metrics on R³.
//!
//! A metric `g = Σ f_i⁻² dx^i ⊗ dx^i` is described by its three frame scales
//! `f_i`, written as closed-form expressions ([`expr`]). Vector fields are
//! given by components in the orthonormal frame `E_i = f_i ∂/∂x^i`.
//!
//! - [`metric`]: validated metrics, frame coefficients and the Levi-Civita
//!   connection in the orthonormal frame.
//! - [`killing`]: the six Killing equations in frame form, an independent
//!   coordinate Lie-derivative check, grid verification and Lie brackets.
//! - [`families`]: classification of metrics into solved regimes and the
//!   closed-form Killing families for each of them.
//! - [`flow`]: RK4 flows and the isometry defect of the time-t flow map.
//! - [`export`]: text export of generated fields, with numeric primitives
//!   tabulated as cubic Hermite splines.
//! - [`catalog`]: bundled reference metrics and fields.

pub mod catalog;
pub mod export;
pub mod expr;
pub mod families;
pub mod flow;
pub mod killing;
pub mod metric;

pub use expr::{parse, Axis, Point, ScalarField};
pub use families::{classify, FamilyDescriptor, FamilyParams, FamilyTag};
pub use killing::{is_killing, FrameVectorField, KillingResidual};
pub use metric::{DiagonalMetric, DomainBox};
