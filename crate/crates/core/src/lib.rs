//! Real interpolation with slowly varying weights over the couple (L1, L∞).

pub mod dsl;
pub mod error;
pub mod scalar;
pub mod family;
pub mod holmstedt;
pub mod rinorm;
pub mod reiteration;
pub mod report;
pub mod sampling;
pub mod spaces;
pub mod svcalc;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Lq, Scalar};
pub use sampling::{Domain, GeometricGrid, KProfile, SampledFunction, StepFunction};
pub use svcalc::{End, Envelope, NormSide, SvExpr};
