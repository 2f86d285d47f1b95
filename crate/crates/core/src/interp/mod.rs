//! Calderón products, K-functionals and the real method, and the interpolated
//! forms of the Lipschitz inequalities.

mod calderon;
mod checks;
mod kfunctional;

pub use calderon::{decomposition_gap, CalderonNorm, CalderonSpace};
pub use checks::{
    interp_domination_check, interpolated_lipschitz_check, interpolated_phi_check, interpolated_pointwise_check,
    InterpReport, LinearMap,
};
pub use kfunctional::{k_shape_violations, InterpolationCouple, KMethod};
