//! Diffusive representations of the Caputo derivative and their time stepping.
//!
//! For every method the derivative is `int_0^inf z^p omega(z, t) dz` where the
//! state `omega(., t)` solves a local ODE in `t`:
//!
//! | method | `p`        | state ODE                                          |
//! |--------|------------|----------------------------------------------------|
//! | YA     | `2a - 1`   | `w' + z^2 w = k y'`, `k = 2 sin(pi a) / pi`         |
//! | CDR    | `a - 1`    | `w'' + z^2 w = k y''`, `k = 2 sin(pi a / 2) / pi`   |
//! | SDR    | `a`        | `w'' + z^2 w = k y'`, `k = 2 cos(pi a / 2) / pi`    |
//! | ISDR   | `2a - 1`   | `w'' + z^4 w = k z^2 y'`, `k = 4 cos(pi a / 2) / pi`|
//!
//! The second-order equations are stepped as systems in `(x1, x2) = (w, w')`.
//! The forcing enters through increments over a step: `y'` increments for CDR
//! and `y` increments for the others.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_laguerre, QuadratureRule};
use crate::scalar::Real;

/// Diffusive representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ya,
    Cdr,
    Sdr,
    Isdr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ya, Method::Cdr, Method::Sdr, Method::Isdr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ya => "YA",
            Method::Cdr => "CDR",
            Method::Sdr => "SDR",
            Method::Isdr => "ISDR",
        }
    }

    /// Exponent `gamma` of the Gauss-Laguerre weight `z^gamma e^{-z}`.
    pub fn quadrature_exponent<T: Real>(self, alpha: FractionalOrder<T>) -> T {
        let a = alpha.value();
        match self {
            Method::Ya | Method::Isdr => a + a - T::one(),
            Method::Cdr => a - T::one(),
            Method::Sdr => a,
        }
    }

    /// Constant in front of the forcing of the state equation.
    pub fn coupling<T: Real>(self, alpha: FractionalOrder<T>) -> T {
        let a = alpha.value();
        let pi = T::PI();
        let half_angle = pi * a * T::lit(0.5);
        match self {
            Method::Ya => T::lit(2.0) * (pi * a).sin() / pi,
            Method::Cdr => T::lit(2.0) * half_angle.sin() / pi,
            Method::Sdr => T::lit(2.0) * half_angle.cos() / pi,
            Method::Isdr => T::lit(4.0) * half_angle.cos() / pi,
        }
    }

    /// Coefficient of `w` in the state equation at node `z`.
    pub fn stiffness<T: Real>(self, z: T) -> T {
        let z2 = z * z;
        match self {
            Method::Isdr => z2 * z2,
            _ => z2,
        }
    }

    fn forcing_gain<T: Real>(self, z: T) -> T {
        match self {
            Method::Isdr => z * z,
            _ => T::one(),
        }
    }

    /// Whether the state equation is second order in time.
    pub fn is_second_order(self) -> bool {
        !matches!(self, Method::Ya)
    }

    /// Whether the stepping consumes increments of `y'` rather than of `y`.
    pub fn forced_by_derivative(self) -> bool {
        matches!(self, Method::Cdr)
    }

    /// `h * stiffness(4N + 2 gamma + 6)`, the step-size restriction that the
    /// error bounds assume. Values at or above one mean the bound does not apply.
    pub fn stability_product<T: Real>(self, alpha: FractionalOrder<T>, order: usize, step: T) -> T {
        let largest = T::of_usize(4 * order) + T::lit(2.0) * self.quadrature_exponent(alpha) + T::lit(6.0);
        step * self.stiffness(largest)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ya" => Ok(Method::Ya),
            "cdr" => Ok(Method::Cdr),
            "sdr" => Ok(Method::Sdr),
            "isdr" => Ok(Method::Isdr),
            other => Err(Error::Domain(format!("unknown method `{other}`"))),
        }
    }
}

/// Time integrator for the state equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Solver {
    #[default]
    Euler,
    Trapezoid,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Euler => "euler",
            Solver::Trapezoid => "trapezoid",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Solver::Euler),
            "trapezoid" | "trapezoidal" => Ok(Solver::Trapezoid),
            other => Err(Error::Domain(format!("unknown solver `{other}`"))),
        }
    }
}

/// How the `x1` update of the second-order systems picks its `x2`.
///
/// `SemiImplicit` uses the previous `x2` in the Euler step and the Euler
/// trajectory's new `x2` in the trapezoidal step, exactly as the schemes are
/// usually printed. `FullyImplicit` uses the freshly computed `x2` of the same
/// scheme, which turns both into the genuine backward Euler and trapezoidal
/// rules. The first-order YA equation is unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Stepping {
    #[default]
    SemiImplicit,
    FullyImplicit,
}

/// Order `alpha` of the derivative, `0 < alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha < T::one() {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "fractional order must lie in (0, 1), got {alpha}"
            )))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Uniform grid `t_k = k h`, `k = 0..n`, with `h = T / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    horizon: T,
    count: usize,
    step: T,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(horizon: T, count: usize) -> Result<Self> {
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if count < 2 {
            return Err(Error::Domain(format!("time grid needs at least 2 points, got {count}")));
        }
        let step = horizon / T::of_usize(count - 1);
        Ok(Self { horizon, count, step })
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// `t_k`; the last point is the horizon itself.
    pub fn point(&self, k: usize) -> T {
        if k + 1 == self.count {
            self.horizon
        } else {
            T::of_usize(k) * self.step
        }
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

/// Where `y'` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    /// An analytic `y'` supplied with the signal.
    #[default]
    Analytic,
    /// Differences of grid samples: `(y(h) - y(0)) / h` at the origin, central
    /// differences inside and a backward difference at the horizon.
    ForwardDifference,
}

type Func<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Source<T> {
    Analytic { y: Func<T>, dy: Option<Func<T>> },
    Tabulated(Vec<T>),
}

/// The function being differentiated.
#[derive(Clone)]
pub struct Signal<T> {
    source: Source<T>,
    mode: DerivativeMode,
}

impl<T> fmt::Debug for Signal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Analytic { dy: Some(_), .. } => "analytic(y, y')",
            Source::Analytic { dy: None, .. } => "analytic(y)",
            Source::Tabulated(v) => return write!(f, "Signal(tabulated[{}], {:?})", v.len(), self.mode),
        };
        write!(f, "Signal({kind}, {:?})", self.mode)
    }
}

impl<T: Real> Signal<T> {
    /// `y` with its analytic derivative.
    pub fn analytic<Y, D>(y: Y, dy: D) -> Self
    where
        Y: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            source: Source::Analytic {
                y: Arc::new(y),
                dy: Some(Arc::new(dy)),
            },
            mode: DerivativeMode::Analytic,
        }
    }

    /// `y` alone; derivatives come from grid differences.
    pub fn from_fn<Y>(y: Y) -> Self
    where
        Y: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            source: Source::Analytic {
                y: Arc::new(y),
                dy: None,
            },
            mode: DerivativeMode::ForwardDifference,
        }
    }

    /// Samples of `y` on a uniform grid, starting at `t = 0`.
    pub fn tabulated(values: Vec<T>) -> Self {
        Self {
            source: Source::Tabulated(values),
            mode: DerivativeMode::ForwardDifference,
        }
    }

    /// Overrides the derivative mode. Asking for analytic derivatives of a
    /// signal without one makes derivative sampling fail.
    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn has_analytic_derivative(&self) -> bool {
        matches!(self.source, Source::Analytic { dy: Some(_), .. })
    }

    /// `y(t)`, unavailable for tabulated signals.
    pub fn value(&self, t: T) -> Option<T> {
        match &self.source {
            Source::Analytic { y, .. } => Some(y(t)),
            Source::Tabulated(_) => None,
        }
    }

    /// Analytic `y'(t)`, if supplied.
    pub fn derivative(&self, t: T) -> Option<T> {
        match &self.source {
            Source::Analytic { dy: Some(dy), .. } => Some(dy(t)),
            _ => None,
        }
    }

    /// `y(t_k)` for every grid point.
    pub fn sample_values(&self, grid: &TimeGrid<T>) -> Result<Vec<T>> {
        match &self.source {
            Source::Analytic { y, .. } => Ok((0..grid.count()).map(|k| y(grid.point(k))).collect()),
            Source::Tabulated(v) => {
                if v.len() != grid.count() {
                    return Err(Error::LengthMismatch {
                        expected: grid.count(),
                        actual: v.len(),
                    });
                }
                Ok(v.clone())
            }
        }
    }

    /// `y'(t_k)` for every grid point, following the derivative mode.
    pub fn sample_derivative(&self, grid: &TimeGrid<T>) -> Result<Vec<T>> {
        match self.mode {
            DerivativeMode::Analytic => match &self.source {
                Source::Analytic { dy: Some(dy), .. } => Ok((0..grid.count()).map(|k| dy(grid.point(k))).collect()),
                _ => Err(Error::MissingDerivative("analytic derivative mode")),
            },
            DerivativeMode::ForwardDifference => {
                let y = self.sample_values(grid)?;
                Ok(difference_derivative(&y, grid.step()))
            }
        }
    }
}

fn difference_derivative<T: Real>(y: &[T], h: T) -> Vec<T> {
    let n = y.len();
    let mut dy = Vec::with_capacity(n);
    dy.push((y[1] - y[0]) / h);
    let two_h = h + h;
    for k in 1..n - 1 {
        dy.push((y[k + 1] - y[k - 1]) / two_h);
    }
    dy.push((y[n - 1] - y[n - 2]) / h);
    dy
}

/// States `(x1, x2)` at every quadrature node after `index` steps.
///
/// `x1` approximates `omega(z_i, t_index)`; `x2` its time derivative (unused
/// and kept at zero for YA).
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusiveState<T> {
    pub x1: Vec<T>,
    pub x2: Vec<T>,
    pub index: usize,
}

impl<T: Real> DiffusiveState<T> {
    /// State at `t = 0`. Only CDR starts from a non-zero `x2`, namely
    /// `k y'(0)` at every node.
    pub fn initial(method: Method, alpha: FractionalOrder<T>, nodes: usize, initial_slope: T) -> Self {
        let x2_0 = if method == Method::Cdr {
            method.coupling(alpha) * initial_slope
        } else {
            T::zero()
        };
        Self {
            x1: vec![T::zero(); nodes],
            x2: vec![x2_0; nodes],
            index: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }
}

/// Per-node coefficients of the Euler and trapezoidal updates for one step size.
#[derive(Debug, Clone)]
struct NodeStepper<T> {
    method: Method,
    stepping: Stepping,
    step: T,
    coupling: T,
    stiffness: Vec<T>,
    gain: Vec<T>,
    euler_inv: Vec<T>,
    trap_inv: Vec<T>,
    trap_keep: Vec<T>,
}

impl<T: Real> NodeStepper<T> {
    fn new(method: Method, alpha: FractionalOrder<T>, stepping: Stepping, nodes: &[T], step: T) -> Self {
        let stiffness: Vec<T> = nodes.iter().map(|&z| method.stiffness(z)).collect();
        let gain = nodes.iter().map(|&z| method.forcing_gain(z)).collect();
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        // YA is first order: the damping acts through h s instead of h^2 s.
        let damping: Vec<T> = if method.is_second_order() {
            stiffness.iter().map(|&s| s * step * step).collect()
        } else {
            stiffness.iter().map(|&s| s * step).collect()
        };
        let trap_scale = if method.is_second_order() { quarter } else { half };
        let euler_inv = damping.iter().map(|&d| T::one() / (T::one() + d)).collect();
        let trap_inv = damping
            .iter()
            .map(|&d| T::one() / (T::one() + trap_scale * d))
            .collect();
        let trap_keep = damping.iter().map(|&d| T::one() - trap_scale * d).collect();
        Self {
            method,
            stepping,
            step,
            coupling: method.coupling(alpha),
            stiffness,
            gain,
            euler_inv,
            trap_inv,
            trap_keep,
        }
    }

    fn check(&self, state: &DiffusiveState<T>) -> Result<()> {
        let n = self.stiffness.len();
        for len in [state.x1.len(), state.x2.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        Ok(())
    }

    fn euler(&self, state: &mut DiffusiveState<T>, increment: T) {
        let push = self.coupling * increment;
        let h = self.step;
        if !self.method.is_second_order() {
            for (x1, &inv) in state.x1.iter_mut().zip(&self.euler_inv) {
                *x1 = (*x1 + push) * inv;
            }
        } else {
            let fully = self.stepping == Stepping::FullyImplicit;
            for i in 0..state.x1.len() {
                let (x1, x2) = (state.x1[i], state.x2[i]);
                let x2_new = (x2 - self.stiffness[i] * h * x1 + push * self.gain[i]) * self.euler_inv[i];
                state.x1[i] = x1 + h * if fully { x2_new } else { x2 };
                state.x2[i] = x2_new;
            }
        }
        state.index += 1;
    }

    /// `euler_x2` is `x2` of the Euler trajectory at the new time; ignored
    /// when fully implicit or first order.
    fn trapezoid(&self, state: &mut DiffusiveState<T>, euler_x2: Option<&[T]>, increment: T) {
        let push = self.coupling * increment;
        let h = self.step;
        if !self.method.is_second_order() {
            for i in 0..state.x1.len() {
                state.x1[i] = (self.trap_keep[i] * state.x1[i] + push) * self.trap_inv[i];
            }
        } else {
            let half_h = h * T::lit(0.5);
            for i in 0..state.x1.len() {
                let (x1, x2) = (state.x1[i], state.x2[i]);
                let x2_new =
                    (self.trap_keep[i] * x2 - self.stiffness[i] * h * x1 + push * self.gain[i]) * self.trap_inv[i];
                let partner = match euler_x2 {
                    Some(e) if self.stepping == Stepping::SemiImplicit => e[i],
                    _ => x2_new,
                };
                state.x1[i] = x1 + half_h * (x2 + partner);
                state.x2[i] = x2_new;
            }
        }
        state.index += 1;
    }
}

/// One backward Euler step of every node's state, from `t_{k-1}` to `t_k`.
///
/// `forcing_prev`/`forcing_curr` are `y'` at the two times for CDR and `y`
/// for the other methods.
#[allow(clippy::too_many_arguments)]
pub fn advance_euler<T: Real>(
    method: Method,
    alpha: FractionalOrder<T>,
    stepping: Stepping,
    state: &DiffusiveState<T>,
    nodes: &[T],
    grid: &TimeGrid<T>,
    forcing_prev: T,
    forcing_curr: T,
) -> Result<DiffusiveState<T>> {
    let stepper = NodeStepper::new(method, alpha, stepping, nodes, grid.step());
    stepper.check(state)?;
    let mut next = state.clone();
    stepper.euler(&mut next, forcing_curr - forcing_prev);
    Ok(next)
}

/// One trapezoidal step. `euler_state` is the Euler trajectory already
/// advanced to `t_k`; its `x2` enters the `x1` update.
#[allow(clippy::too_many_arguments)]
pub fn advance_trapezoid<T: Real>(
    method: Method,
    alpha: FractionalOrder<T>,
    stepping: Stepping,
    state: &DiffusiveState<T>,
    euler_state: &DiffusiveState<T>,
    nodes: &[T],
    grid: &TimeGrid<T>,
    forcing_prev: T,
    forcing_curr: T,
) -> Result<DiffusiveState<T>> {
    let stepper = NodeStepper::new(method, alpha, stepping, nodes, grid.step());
    stepper.check(state)?;
    stepper.check(euler_state)?;
    if euler_state.index != state.index + 1 {
        return Err(Error::Domain(format!(
            "Euler partner is at step {} but the trapezoidal step targets {}",
            euler_state.index,
            state.index + 1
        )));
    }
    let mut next = state.clone();
    stepper.trapezoid(&mut next, Some(&euler_state.x2), forcing_curr - forcing_prev);
    Ok(next)
}

/// A configured diffusive approximation: method, quadrature rule and stepper.
#[derive(Debug, Clone)]
pub struct Approximation<T> {
    method: Method,
    solver: Solver,
    stepping: Stepping,
    alpha: FractionalOrder<T>,
    rule: QuadratureRule<T>,
}

impl<T: Real> Approximation<T> {
    /// Builds the `order`-point rule with the method's weight exponent.
    pub fn new(method: Method, alpha: FractionalOrder<T>, order: usize) -> Result<Self> {
        let rule = gauss_laguerre(order, method.quadrature_exponent(alpha))?;
        Ok(Self {
            method,
            solver: Solver::Euler,
            stepping: Stepping::SemiImplicit,
            alpha,
            rule,
        })
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    /// Derivative approximations at every grid point; the value at `t = 0` is 0.
    pub fn evaluate(&self, grid: &TimeGrid<T>, signal: &Signal<T>) -> Result<Vec<T>> {
        let forcing = if self.method.forced_by_derivative() {
            signal.sample_derivative(grid)?
        } else {
            signal.sample_values(grid)?
        };
        let initial_slope = if self.method == Method::Cdr {
            forcing[0]
        } else {
            T::zero()
        };

        let nodes = self.rule.nodes();
        let weights = self.rule.scaled_weights();
        let stepper = NodeStepper::new(self.method, self.alpha, self.stepping, nodes, grid.step());
        let mut state = DiffusiveState::initial(self.method, self.alpha, nodes.len(), initial_slope);
        let needs_partner = self.solver == Solver::Trapezoid
            && self.stepping == Stepping::SemiImplicit
            && self.method.is_second_order();
        let mut partner = needs_partner.then(|| state.clone());

        let mut out = Vec::with_capacity(grid.count());
        out.push(T::zero());
        for k in 1..grid.count() {
            let increment = forcing[k] - forcing[k - 1];
            match self.solver {
                Solver::Euler => stepper.euler(&mut state, increment),
                Solver::Trapezoid => {
                    if let Some(p) = partner.as_mut() {
                        stepper.euler(p, increment);
                    }
                    stepper.trapezoid(&mut state, partner.as_ref().map(|p| p.x2.as_slice()), increment);
                }
            }
            let value = weights
                .iter()
                .zip(&state.x1)
                .fold(T::zero(), |acc, (&w, &x)| acc + w * x);
            out.push(value);
        }
        Ok(out)
    }
}

/// Caputo derivative of `signal` on `grid` with the default semi-implicit stepping.
pub fn caputo_derivative<T: Real>(
    method: Method,
    solver: Solver,
    alpha: FractionalOrder<T>,
    order: usize,
    grid: &TimeGrid<T>,
    signal: &Signal<T>,
) -> Result<Vec<T>> {
    Approximation::new(method, alpha, order)?
        .with_solver(solver)
        .evaluate(grid, signal)
}

/// Largest absolute pointwise difference.
pub fn max_error<T: Real>(approx: &[T], exact: &[T]) -> Result<T> {
    if approx.len() != exact.len() {
        return Err(Error::LengthMismatch {
            expected: exact.len(),
            actual: approx.len(),
        });
    }
    Ok(approx
        .iter()
        .zip(exact)
        .fold(T::zero(), |m, (&a, &e)| m.max((a - e).abs())))
}

const REFERENCE_PANEL_BUDGET: usize = 1 << 22;
const LEGENDRE_POINTS: usize = 10;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `omega(z, t)` of the given method evaluated from its defining integral over
/// `[0, t]` by composite Gauss-Legendre panels, at least eight per oscillation
/// period, doubled until two levels agree within `tol`. Testing reference only.
pub fn kernel_reference<T: Real>(
    method: Method,
    alpha: FractionalOrder<T>,
    z: T,
    t: T,
    signal: &Signal<T>,
    tol: T,
) -> Result<T> {
    if !(z > T::zero()) {
        return Err(Error::Domain(format!("node must be positive, got {z}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    if !signal.has_analytic_derivative() {
        return Err(Error::MissingDerivative("kernel_reference"));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let rate = match method {
        Method::Cdr | Method::Sdr => z,
        Method::Ya | Method::Isdr => z * z,
    };
    let kernel = move |s: T| match method {
        Method::Cdr => (s * rate).cos(),
        Method::Sdr | Method::Isdr => (s * rate).sin(),
        Method::Ya => (-s * rate).exp(),
    };
    let integrand = |tau: T| kernel(t - tau) * signal.derivative(tau).expect("checked above");
    let rule: Vec<(T, T)> = gauss_legendre(LEGENDRE_POINTS)
        .into_iter()
        .map(|(x, w)| (T::lit(x), T::lit(w)))
        .collect();
    let composite = |panels: usize| {
        let width = t / T::of_usize(panels);
        let half = width * T::lit(0.5);
        let mut acc = T::zero();
        for p in 0..panels {
            let mid = width * T::of_usize(p) + half;
            let mut local = T::zero();
            for &(x, w) in &rule {
                local = local + w * integrand(mid + half * x);
            }
            acc = acc + local * half;
        }
        acc
    };

    let periods = (t * rate / T::TAU())
        .ceil()
        .to_usize()
        .unwrap_or(REFERENCE_PANEL_BUDGET);
    let mut panels = (8 * periods.max(1)).min(REFERENCE_PANEL_BUDGET);
    let mut coarse = composite(panels);
    let value = loop {
        if panels * 2 > REFERENCE_PANEL_BUDGET {
            return Err(Error::ToleranceUnreachable {
                tol: tol.to_f64().unwrap_or(f64::NAN),
                panels,
            });
        }
        panels *= 2;
        let fine = composite(panels);
        if (fine - coarse).abs() <= tol {
            break fine;
        }
        coarse = fine;
    };
    let scale = match method {
        Method::Sdr => method.coupling(alpha) / z,
        _ => method.coupling(alpha),
    };
    Ok(scale * value)
}
