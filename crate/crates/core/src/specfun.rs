//! Special functions used by the closed-form Caputo derivatives and by the
//! quadrature normalisation.

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Stop criterion floor so that series summed at zero terminate.
const SERIES_FLOOR: f64 = 1e-300;
const MAX_SERIES_TERMS: usize = 1000;

fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.floor()
}

/// Euler's Gamma function.
///
/// Lanczos approximation (g = 7, nine coefficients) for `x >= 0.5`, reflection
/// `Gamma(x) Gamma(1 - x) = pi / sin(pi x)` below.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x.to_f64().unwrap_or(f64::NAN)));
    }
    if x == x.floor() && x <= T::lit(30.0) {
        let mut fact = T::one();
        let mut k = T::lit(2.0);
        while k < x {
            fact = fact * k;
            k = k + T::one();
        }
        return Ok(fact);
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::of_usize(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    // t^(x+1/2) split in two factors keeps Gamma(171) finite.
    let root = t.powf((x + half) * half);
    (T::TAU()).sqrt() * root * (root * (-t).exp()) * acc
}

/// Natural logarithm of `|Gamma(x)|` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "ln_gamma needs a positive finite argument, got {x}"
        )));
    }
    if x < T::lit(0.5) || (x == x.floor() && x <= T::lit(30.0)) {
        return Ok(gamma(x)?.ln());
    }
    let half = T::lit(0.5);
    let xm = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (xm + T::of_usize(i));
    }
    let t = xm + T::lit(LANCZOS_G) + half;
    Ok(half * T::TAU().ln() + (xm + half) * t.ln() - t + acc.ln())
}

/// Bessel function of the first kind `J_nu(x)` from its ascending series.
///
/// Accurate on the small arguments (`x <= 4`) this crate needs; there is no
/// large-argument branch.
pub fn bessel_j<T: Real>(nu: T, x: T) -> Result<T> {
    if !(nu > -T::one()) {
        return Err(Error::Domain(format!("bessel_j needs nu > -1, got {nu}")));
    }
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    let half_x = x * T::lit(0.5);
    let q = half_x * half_x;
    let mut term = half_x.powf(nu) / gamma(nu + T::one())?;
    let mut sum = term;
    let eps = T::lit(1e-16);
    let floor = T::lit(SERIES_FLOOR);
    for m in 1..MAX_SERIES_TERMS {
        let m = T::of_usize(m);
        term = -term * q / (m * (m + nu));
        sum = sum + term;
        if term.abs() < eps * sum.abs() || term.abs() < floor {
            break;
        }
    }
    Ok(sum)
}

/// `t^(1-alpha) * sum_k (-t^2)^k / Gamma(2k + 2 - alpha)`, the Caputo derivative
/// of `sin t`. Summation stops once a term falls below `tol` times the partial sum.
pub fn caputo_sin_series<T: Real>(alpha: T, t: T, tol: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!("order must lie in (0, 1), got {alpha}")));
    }
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let q = -(t * t);
    let mut term = T::one() / gamma(T::lit(2.0) - alpha)?;
    let mut sum = term;
    let floor = T::lit(SERIES_FLOOR);
    for k in 1..MAX_SERIES_TERMS {
        let two_k = T::of_usize(2 * k);
        // Gamma(2k + 2 - a) = (2k + 1 - a)(2k - a) Gamma(2k - a)
        term = term * q / ((two_k + T::one() - alpha) * (two_k - alpha));
        sum = sum + term;
        if term.abs() < tol * sum.abs() || term.abs() < floor {
            break;
        }
    }
    Ok(t.powf(T::one() - alpha) * sum)
}
