//! Ground truth independent of the diffusive machinery: closed-form Caputo
//! derivatives of the benchmark signals and the L1 product-integration scheme.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::diffusive::{FractionalOrder, Signal, TimeGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::{bessel_j, caputo_sin_series, gamma};

/// Truncation tolerance of the `sin t` series.
pub const SIN_SERIES_TOL: f64 = 1e-15;

/// `Gamma(p + 1) / Gamma(p + 1 - alpha) * t^(p - alpha)`, the derivative of `t^p`.
pub fn exact_power<T: Real>(p: T, alpha: FractionalOrder<T>, t: T) -> Result<T> {
    if !(p > T::zero()) {
        return Err(Error::Domain(format!("power must be positive, got {p}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let a = alpha.value();
    Ok(gamma(p + T::one())? / gamma(p + T::one() - a)? * t.powf(p - a))
}

/// Derivative of `sin t`.
pub fn exact_sin<T: Real>(alpha: FractionalOrder<T>, t: T) -> Result<T> {
    caputo_sin_series(alpha.value(), t, T::lit(SIN_SERIES_TOL))
}

/// `t^((nu - alpha) / 2) J_{nu - alpha}(2 sqrt t)`, the derivative of
/// `t^(nu / 2) J_nu(2 sqrt t)`.
pub fn exact_bessel<T: Real>(nu: T, alpha: FractionalOrder<T>, t: T) -> Result<T> {
    let order = nu - alpha.value();
    if !(order > -T::one()) {
        return Err(Error::Domain(format!("nu - alpha must exceed -1, got {order}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    Ok(t.powf(order * T::lit(0.5)) * bessel_j(order, T::lit(2.0) * t.sqrt())?)
}

/// L1 scheme on the grid:
/// `D(t_k) = h^{-a} / Gamma(2 - a) * sum_{m=1}^{k} b_m (y_{k-m+1} - y_{k-m})`
/// with `b_m = m^{1-a} - (m-1)^{1-a}`. Costs `O(n^2)`; error `O(h^{2-a})`.
pub fn caputo_l1<T: Real>(signal: &Signal<T>, alpha: FractionalOrder<T>, grid: &TimeGrid<T>) -> Result<Vec<T>> {
    let a = alpha.value();
    let y = signal.sample_values(grid)?;
    let n = y.len();
    let expo = T::one() - a;
    let scale = grid.step().powf(-a) / gamma(T::lit(2.0) - a)?;

    // b[m - 1] = m^{1-a} - (m-1)^{1-a}, formed without cancellation.
    let b: Vec<T> = (1..n)
        .map(|m| {
            let m = T::of_usize(m);
            -m.powf(expo) * (expo * (-m.recip()).ln_1p()).exp_m1()
        })
        .collect();
    let dy: Vec<T> = y.windows(2).map(|w| w[1] - w[0]).collect();

    let mut out = Vec::with_capacity(n);
    out.push(T::zero());
    for k in 1..n {
        let weights = &b[..k];
        let diffs = &dy[..k];
        let mut acc = [T::zero(); 4];
        let chunks = k / 4;
        for c in 0..chunks {
            for (lane, slot) in acc.iter_mut().enumerate() {
                let m = 4 * c + lane;
                *slot = *slot + weights[m] * diffs[k - 1 - m];
            }
        }
        let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for m in 4 * chunks..k {
            sum = sum + weights[m] * diffs[k - 1 - m];
        }
        out.push(scale * sum);
    }
    Ok(out)
}

/// Built-in benchmark signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// `t^1.6` on `[0, 3]`, `alpha = 0.4`.
    Power,
    /// `t^3` on `[0, 1]`, `alpha = 0.6`.
    Cubic,
    /// `sin t` on `[0, 1]`, `alpha = 0.5`.
    Sine,
    /// `t^{3/2} J_3(2 sqrt t)` on `[0, 1]`, `alpha = 0.5`.
    Bessel,
    /// `y = 1` on `[0, 1]`, `alpha = 0.5`; derivative zero.
    Constant,
}

impl CaseId {
    pub const BENCHMARKS: [CaseId; 4] = [CaseId::Power, CaseId::Cubic, CaseId::Sine, CaseId::Bessel];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Power => "power",
            CaseId::Cubic => "cubic",
            CaseId::Sine => "sine",
            CaseId::Bessel => "bessel",
            CaseId::Constant => "constant",
        }
    }

    /// Standard `(alpha, horizon)` of the case.
    pub fn defaults(self) -> (f64, f64) {
        match self {
            CaseId::Power => (0.4, 3.0),
            CaseId::Cubic => (0.6, 1.0),
            CaseId::Sine | CaseId::Bessel | CaseId::Constant => (0.5, 1.0),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "power" | "ex1" | "example1" => Ok(CaseId::Power),
            "cubic" | "ex2" | "example2" => Ok(CaseId::Cubic),
            "sine" | "sin" | "ex3" | "example3" => Ok(CaseId::Sine),
            "bessel" | "ex4" | "example4" => Ok(CaseId::Bessel),
            "constant" | "const" => Ok(CaseId::Constant),
            other => Err(Error::Domain(format!("unknown case `{other}`"))),
        }
    }
}

type ExactFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// A signal together with its order, horizon and exact Caputo derivative.
#[derive(Clone)]
pub struct TestCase<T> {
    pub name: String,
    pub signal: Signal<T>,
    pub alpha: FractionalOrder<T>,
    pub horizon: T,
    exact: ExactFn<T>,
}

impl<T> fmt::Debug for TestCase<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestCase")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

const BESSEL_NU: f64 = 3.0;

impl<T: Real> TestCase<T> {
    /// The case with its standard order and horizon.
    pub fn builtin(id: CaseId) -> Result<Self> {
        let (alpha, horizon) = id.defaults();
        Self::configured(id, FractionalOrder::new(T::lit(alpha))?, T::lit(horizon))
    }

    /// The signal of `id` with a caller-chosen order and horizon.
    pub fn configured(id: CaseId, alpha: FractionalOrder<T>, horizon: T) -> Result<Self> {
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        let (signal, exact): (Signal<T>, ExactFn<T>) = match id {
            CaseId::Power => (
                Signal::analytic(|t: T| t.powf(T::lit(1.6)), |t: T| T::lit(1.6) * t.powf(T::lit(0.6))),
                Arc::new(move |t| exact_power(T::lit(1.6), alpha, t)),
            ),
            CaseId::Cubic => (
                Signal::analytic(|t: T| t * t * t, |t: T| T::lit(3.0) * t * t),
                Arc::new(move |t| exact_power(T::lit(3.0), alpha, t)),
            ),
            CaseId::Sine => (
                Signal::analytic(|t: T| t.sin(), |t: T| t.cos()),
                Arc::new(move |t| exact_sin(alpha, t)),
            ),
            CaseId::Bessel => {
                let nu = T::lit(BESSEL_NU);
                // d/dt [t^{nu/2} J_nu(2 sqrt t)] = t^{(nu-1)/2} J_{nu-1}(2 sqrt t)
                let y = move |t: T| {
                    t.powf(nu * T::lit(0.5)) * bessel_j(nu, T::lit(2.0) * t.sqrt()).expect("non-negative argument")
                };
                let dy = move |t: T| {
                    t.powf((nu - T::one()) * T::lit(0.5))
                        * bessel_j(nu - T::one(), T::lit(2.0) * t.sqrt()).expect("non-negative argument")
                };
                (Signal::analytic(y, dy), Arc::new(move |t| exact_bessel(nu, alpha, t)))
            }
            CaseId::Constant => (
                Signal::analytic(|_t: T| T::one(), |_t: T| T::zero()),
                Arc::new(|_t| Ok(T::zero())),
            ),
        };
        Ok(Self {
            name: id.name().to_string(),
            signal,
            alpha,
            horizon,
            exact,
        })
    }

    /// Exact derivative at `t`.
    pub fn exact(&self, t: T) -> Result<T> {
        (self.exact)(t)
    }

    /// Exact derivative on every point of `grid`.
    pub fn exact_on(&self, grid: &TimeGrid<T>) -> Result<Vec<T>> {
        (0..grid.count()).map(|k| self.exact(grid.point(k))).collect()
    }

    /// Grid with `count` points over this case's horizon.
    pub fn grid(&self, count: usize) -> Result<TimeGrid<T>> {
        TimeGrid::new(self.horizon, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn power_rule_values() {
        // mpmath: Gamma(2.6) / Gamma(2.2)
        assert_relative_eq!(
            exact_power(1.6, order(0.4), 1.0).unwrap(),
            1.297_532_516_666_257,
            max_relative = 1e-13
        );
        assert_eq!(exact_power(3.0, order(0.6), 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            exact_power(1.0, order(0.5), 1.0).unwrap(),
            std::f64::consts::FRAC_2_SQRT_PI,
            max_relative = 1e-13
        );
        assert!(exact_power(0.0, order(0.5), 1.0).is_err());
    }

    #[test]
    fn sine_values() {
        assert_eq!(exact_sin(order(0.5), 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            exact_sin(order(0.5), 1.0).unwrap(),
            0.846_056_786_724_152_9,
            max_relative = 1e-13
        );
        // alpha -> 0 gives y(t) - y(0)
        assert!((exact_sin(order(1e-4), 1.0).unwrap() - 1f64.sin()).abs() < 1e-3);
    }

    #[test]
    fn bessel_values() {
        assert_eq!(exact_bessel(3.0, order(0.5), 0.0).unwrap(), 0.0);
        // J_{2.5}(2), mpmath
        assert_relative_eq!(
            exact_bessel(3.0, order(0.5), 1.0).unwrap(),
            0.223_924_531_468_915_77,
            max_relative = 1e-12
        );
        let t: f64 = 0.7;
        let y = t.powf(1.5) * crate::specfun::bessel_j(3.0, 2.0 * t.sqrt()).unwrap();
        assert!((exact_bessel(3.0, order(1e-5), t).unwrap() - y).abs() < 1e-4);
        assert!(exact_bessel(-0.5, order(0.6), 1.0).is_err());
    }

    #[test]
    fn l1_constant_and_linear() {
        let grid = TimeGrid::new(1.0, 10_000).unwrap();
        let c = Signal::analytic(|_t: f64| 2.0, |_t: f64| 0.0);
        assert!(caputo_l1(&c, order(0.5), &grid).unwrap().iter().all(|&v| v == 0.0));
        let lin = Signal::analytic(|t: f64| t, |_t: f64| 1.0);
        let d = caputo_l1(&lin, order(0.5), &grid).unwrap();
        assert!((d[grid.count() - 1] - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-4);
        // piecewise-linear data is integrated exactly
        for k in [1, 10, 5000] {
            let want = exact_power(1.0, order(0.5), grid.point(k)).unwrap();
            assert_relative_eq!(d[k], want, max_relative = 1e-10);
        }
    }

    #[test]
    fn l1_order_on_cubic() {
        let case = TestCase::<f64>::builtin(CaseId::Cubic).unwrap();
        let err = |n: usize| {
            let grid = case.grid(n).unwrap();
            let d = caputo_l1(&case.signal, case.alpha, &grid).unwrap();
            let e = case.exact_on(&grid).unwrap();
            crate::diffusive::max_error(&d, &e).unwrap()
        };
        let ratio = err(20_000) / err(10_000);
        let expected = 2f64.powf(-(2.0 - 0.6));
        assert!(
            (ratio / expected - 1.0).abs() <= 0.3,
            "ratio {ratio}, expected {expected}"
        );
    }

    #[test]
    fn builtin_cases_vanish_at_origin() {
        for id in CaseId::BENCHMARKS.into_iter().chain([CaseId::Constant]) {
            let case = TestCase::<f64>::builtin(id).unwrap();
            assert_eq!(case.exact(0.0).unwrap(), 0.0, "{id}");
        }
    }

    #[test]
    fn configured_case_uses_its_order() {
        let case = TestCase::<f64>::configured(CaseId::Cubic, order(0.3), 2.0).unwrap();
        assert_eq!(case.horizon, 2.0);
        assert_eq!(case.exact(1.5).unwrap(), exact_power(3.0, order(0.3), 1.5).unwrap());
        assert!(TestCase::<f64>::configured(CaseId::Cubic, order(0.3), 0.0).is_err());
    }

    #[test]
    fn case_names_parse() {
        for id in CaseId::BENCHMARKS {
            assert_eq!(id.name().parse::<CaseId>().unwrap(), id);
        }
        assert_eq!("ex2".parse::<CaseId>().unwrap(), CaseId::Cubic);
        assert!("nope".parse::<CaseId>().is_err());
    }

    #[test]
    fn bessel_signal_derivative_matches_difference() {
        let case = TestCase::<f64>::builtin(CaseId::Bessel).unwrap();
        let t = 0.6;
        let h = 1e-6;
        let fd = (case.signal.value(t + h).unwrap() - case.signal.value(t - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(case.signal.derivative(t).unwrap(), fd, max_relative = 1e-8);
    }
}
