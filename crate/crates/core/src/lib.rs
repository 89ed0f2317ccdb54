//! Caputo fractional derivatives of order `0 < alpha < 1` through diffusive
//! (infinite-state) representations.
//!
//! Four representations are provided: the Yuan-Agrawal exponential kernel
//! ([`Method::Ya`]), the cosine and sine kernels ([`Method::Cdr`],
//! [`Method::Sdr`]) and the sine kernel after the substitution `z = theta^2`
//! ([`Method::Isdr`]). Each one writes the derivative as a weighted integral
//! over `z in (0, inf)` of states `omega(z, t)` that obey a local ODE in `t`.
//! The integral is discretized with a generalized Gauss-Laguerre rule and the
//! states are advanced with backward Euler or trapezoidal steps, so the cost
//! of producing the derivative on `n` grid points is `O(n * N)`.
//!
//! Everything numerical is generic over [`Real`] (implemented for `f32` and
//! `f64`); the `*F64` aliases below fix the scalar to double precision.
//!
//! ```
//! use fracdiff::{caputo_derivative, FractionalOrder, Method, Solver, TimeGrid, Signal};
//!
//! let alpha = FractionalOrder::new(0.6).unwrap();
//! let grid = TimeGrid::new(1.0, 1001).unwrap();
//! let signal = Signal::analytic(|t: f64| t * t * t, |t: f64| 3.0 * t * t);
//! let approx = caputo_derivative(Method::Cdr, Solver::Euler, alpha, 40, &grid, &signal).unwrap();
//! assert_eq!(approx.len(), 1001);
//! assert_eq!(approx[0], 0.0);
//! ```

// `!(x > 0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod convergence;
pub mod diffusive;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod specfun;

pub use convergence::{error_sweep, fit_loglog, SlopeFit, SweepPoint};
pub use diffusive::{
    advance_euler, advance_trapezoid, caputo_derivative, kernel_reference, max_error, Approximation, DerivativeMode,
    DiffusiveState, FractionalOrder, Method, Signal, Solver, Stepping, TimeGrid,
};
pub use error::{Error, Result};
pub use oracle::{caputo_l1, exact_bessel, exact_power, exact_sin, CaseId, TestCase};
pub use quadrature::{gauss_laguerre, integrate, jacobi_matrix, QuadratureRule};
pub use scalar::Real;

/// Double-precision quadrature rule.
pub type QuadratureRuleF64 = QuadratureRule<f64>;
/// Double-precision time grid.
pub type TimeGridF64 = TimeGrid<f64>;
/// Double-precision signal.
pub type SignalF64 = Signal<f64>;
/// Double-precision diffusive state.
pub type DiffusiveStateF64 = DiffusiveState<f64>;
/// Double-precision fractional order.
pub type FractionalOrderF64 = FractionalOrder<f64>;
/// Double-precision test case.
pub type TestCaseF64 = TestCase<f64>;
/// Double-precision approximation pipeline.
pub type ApproximationF64 = Approximation<f64>;

/// Single-precision quadrature rule.
pub type QuadratureRuleF32 = QuadratureRule<f32>;
/// Single-precision time grid.
pub type TimeGridF32 = TimeGrid<f32>;
