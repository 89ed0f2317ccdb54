//! Error sweeps over the quadrature order and log-log rate fits.

use crate::diffusive::{max_error, Approximation, FractionalOrder, Method, Solver, Stepping};
use crate::error::{Error, Result};
use crate::oracle::TestCase;
use crate::scalar::Real;

/// Quadrature orders of the standard sweep.
pub const DEFAULT_ORDERS: [usize; 5] = [10, 20, 40, 80, 160];
/// Time-grid size of the standard sweep.
pub const DEFAULT_COUNT: usize = 10_000;

/// Maximum error `E_inf` at one quadrature order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T> {
    pub order: usize,
    pub e_inf: T,
}

/// Runs `method` on `case` for each quadrature order and records `E_inf`
/// over the `count`-point grid.
pub fn error_sweep<T: Real>(
    case: &TestCase<T>,
    method: Method,
    solver: Solver,
    stepping: Stepping,
    orders: &[usize],
    count: usize,
) -> Result<Vec<SweepPoint<T>>> {
    let grid = case.grid(count)?;
    let exact = case.exact_on(&grid)?;
    orders
        .iter()
        .map(|&order| {
            let approx = Approximation::new(method, case.alpha, order)?
                .with_solver(solver)
                .with_stepping(stepping)
                .evaluate(&grid, &case.signal)?;
            Ok(SweepPoint {
                order,
                e_inf: max_error(&approx, &exact)?,
            })
        })
        .collect()
}

/// Exponent of `N` in the leading error term of each method.
pub fn expected_slope<T: Real>(method: Method, alpha: FractionalOrder<T>) -> T {
    let a = alpha.value();
    match method {
        Method::Cdr => a - T::lit(2.0),
        Method::Sdr => a - T::one(),
        Method::Ya | Method::Isdr => a + a - T::lit(2.0),
    }
}

/// Least-squares line through `(ln N, ln E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Standard error of the slope.
    pub stderr: T,
    /// The smallest `N` was dropped as pre-asymptotic.
    pub excluded_first: bool,
    pub points_used: usize,
}

fn least_squares<T: Real>(x: &[T], y: &[T]) -> (T, T, T, Vec<T>) {
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxx = x.iter().map(|&v| (v - mx) * (v - mx)).sum::<T>();
    let sxy = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<T> = x.iter().zip(y).map(|(&a, &b)| b - (intercept + slope * a)).collect();
    let ssr = residuals.iter().map(|&r| r * r).sum::<T>();
    let stderr = (ssr / (n - T::lit(2.0)) / sxx).sqrt();
    (slope, intercept, stderr, residuals)
}

/// Fits `ln E = c + s ln N`. When at least four points are given and the
/// residual of the smallest `N` exceeds twice the slope's standard error,
/// that point is dropped and the line refitted.
pub fn fit_loglog<T: Real>(orders: &[T], errors: &[T]) -> Result<SlopeFit<T>> {
    if orders.len() != errors.len() {
        return Err(Error::LengthMismatch {
            expected: orders.len(),
            actual: errors.len(),
        });
    }
    if orders.len() < 3 {
        return Err(Error::Domain("a slope fit needs at least three points".into()));
    }
    if orders.iter().chain(errors).any(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::Domain("log-log fit needs positive finite data".into()));
    }
    let mut idx: Vec<usize> = (0..orders.len()).collect();
    idx.sort_by(|&a, &b| orders[a].partial_cmp(&orders[b]).expect("finite"));
    let x: Vec<T> = idx.iter().map(|&i| orders[i].ln()).collect();
    let y: Vec<T> = idx.iter().map(|&i| errors[i].ln()).collect();

    let (slope, intercept, stderr, residuals) = least_squares(&x, &y);
    if x.len() >= 4 && residuals[0].abs() > T::lit(2.0) * stderr {
        let (slope, intercept, stderr, _) = least_squares(&x[1..], &y[1..]);
        return Ok(SlopeFit {
            slope,
            intercept,
            stderr,
            excluded_first: true,
            points_used: x.len() - 1,
        });
    }
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        excluded_first: false,
        points_used: x.len(),
    })
}

/// Fits the points of a sweep.
pub fn fit_sweep<T: Real>(points: &[SweepPoint<T>]) -> Result<SlopeFit<T>> {
    let orders: Vec<T> = points.iter().map(|p| T::of_usize(p.order)).collect();
    let errors: Vec<T> = points.iter().map(|p| p.e_inf).collect();
    fit_loglog(&orders, &errors)
}
