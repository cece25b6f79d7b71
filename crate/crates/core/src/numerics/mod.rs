//! Precision-parameterised complex ball arithmetic and an adaptive
//! quadrature used as an independent oracle for the closed forms.

mod ball;
mod context;
mod mag;
mod quad;

pub use ball::{decimal, BallComplex};
pub use context::PrecisionContext;
pub use mag::{bigfloat_to_f64, Mag};
pub use quad::{quad_adaptive, quad_adaptive_with, GaussLegendre, UpperLimit, DEFAULT_MAX_PANELS, DEFAULT_ORDER};
