//! Tolerances shared by every check in the crate.

/// Exact (non-optimized) inequality and identity checks.
pub const EXACT: f64 = 1e-9;
/// Checks whose left-hand side comes out of an iterative optimizer.
pub const OPTIMIZED: f64 = 1e-6;
/// Metric axiom validation.
pub const METRIC_AXIOM: f64 = 1e-12;
/// Pseudo-distances at or below this are identified by the quotient.
pub const QUOTIENT_ZERO: f64 = 1e-9;
/// Relative error certified by the real-interpolation quadrature.
pub const QUADRATURE_RTOL: f64 = 1e-4;

/// Default cap on atom counts for commands that enumerate all subsets.
pub const DEFAULT_MAX_ATOMS: usize = 12;
/// Hard cap: subsets are stored as `u32` bitmasks and tables have `2^n` entries.
pub const MAX_ATOMS: usize = 20;

/// `value > bound` beyond an absolute slack of `tol`.
#[inline]
pub fn exceeds(value: f64, bound: f64, tol: f64) -> bool {
    value > bound + tol
}

/// `value > bound` beyond a slack of `tol` scaled by the magnitude of `bound`.
#[inline]
pub fn exceeds_rel(value: f64, bound: f64, tol: f64) -> bool {
    value > bound + tol * bound.abs().max(1.0)
}
