//! Generalized Gauss-Laguerre rules for the weight `z^gamma e^{-z}` on `[0, inf)`.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of the
//! generalized Laguerre recurrence (Golub-Welsch), found with implicit-shift QL
//! iteration. The weights come from the first components of the normalized
//! eigenvectors. Those components shrink like `e^{-z/2}` at the large nodes,
//! where rotation-accumulated values only carry absolute accuracy, so after QL
//! each node is polished by Newton steps on the orthonormal recurrence and its
//! eigenvector is rebuilt from the same recurrence in log space. That gives the
//! `e^{z}`-scaled weights to full relative accuracy without ever forming `e^{z}`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::ln_gamma;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_SWEEPS: usize = 30;

const NEWTON_STEPS: usize = 3;
const RESCALE_AT: f64 = 1e120;

/// N-point generalized Gauss-Laguerre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    gamma: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    scaled_weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    /// Exponent of the weight function.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Number of nodes `N`.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Weights `w_i` for `int z^gamma e^{-z} f(z) dz ~ sum w_i f(z_i)`.
    /// They underflow to zero for nodes beyond roughly 700.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `w_i e^{z_i}`, for `int z^gamma g(z) dz ~ sum w_i e^{z_i} g(z_i)`.
    pub fn scaled_weights(&self) -> &[T] {
        &self.scaled_weights
    }

    /// `sum w_i f(z_i)`.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F) -> Result<T> {
        integrate(self, f)
    }

    /// `sum w_i e^{z_i} g(z_i)`, i.e. the rule applied to `int z^gamma g(z) dz`.
    pub fn integrate_scaled<F: Fn(T) -> T>(&self, g: F) -> Result<T> {
        let mut acc = T::zero();
        for (&z, &w) in self.nodes.iter().zip(&self.scaled_weights) {
            let v = g(z);
            if v.is_nan() {
                return Err(Error::Evaluation(z.to_f64().unwrap_or(f64::NAN)));
            }
            acc = acc + w * v;
        }
        Ok(acc)
    }
}

fn check_params<T: Real>(order: usize, gamma: T) -> Result<()> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be at least 1".into()));
    }
    if !(gamma > -T::one()) || !gamma.is_finite() {
        return Err(Error::Domain(format!("weight exponent must exceed -1, got {gamma}")));
    }
    Ok(())
}

/// Diagonal and off-diagonal of the Jacobi matrix for `z^gamma e^{-z}`:
/// `a_k = 2k + gamma + 1`, `b_k = sqrt(k (k + gamma))`.
pub fn jacobi_matrix<T: Real>(order: usize, gamma: T) -> Result<(Vec<T>, Vec<T>)> {
    check_params(order, gamma)?;
    let diag = (0..order).map(|k| T::of_usize(2 * k) + gamma + T::one()).collect();
    let offdiag = (1..order)
        .map(|k| {
            let k = T::of_usize(k);
            (k * (k + gamma)).sqrt()
        })
        .collect();
    Ok((diag, offdiag))
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalized eigenvector, sorted by eigenvalue.
///
/// Implicit-shift QL; only the first row of the eigenvector matrix is
/// accumulated.
pub fn symmetric_tridiagonal_eigen<T: Real>(diag: &[T], offdiag: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::LengthMismatch {
            expected: n - 1,
            actual: offdiag.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e: Vec<T> = offdiag.iter().copied().chain(std::iter::once(T::zero())).collect();
    let mut first = vec![T::zero(); n];
    first[0] = T::one();
    let eps = T::epsilon();
    let two = T::lit(2.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_QL_SWEEPS {
                return Err(Error::NoConvergence { index: l, sweeps });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| d[i]).collect();
    let components = order.iter().map(|&i| first[i]).collect();
    Ok((values, components))
}

/// Value and derivative of the degree-`N` orthonormal Laguerre polynomial,
/// jointly rescaled (the ratio is all Newton needs).
fn recurrence_newton_ratio<T: Real>(z: T, diag: &[T], offdiag_full: &[T]) -> T {
    let big = T::lit(RESCALE_AT);
    let (mut p_prev, mut p) = (T::zero(), T::one());
    let (mut dp_prev, mut dp) = (T::zero(), T::zero());
    for k in 0..diag.len() {
        let b_k = if k == 0 { T::zero() } else { offdiag_full[k - 1] };
        let b_next = offdiag_full[k];
        let p_next = ((z - diag[k]) * p - b_k * p_prev) / b_next;
        let dp_next = ((z - diag[k]) * dp + p - b_k * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if p.abs() > big || dp.abs() > big {
            let inv = T::one() / big;
            p = p * inv;
            p_prev = p_prev * inv;
            dp = dp * inv;
            dp_prev = dp_prev * inv;
        }
    }
    p / dp
}

/// `-ln(sum_{k<N} p_k(z)^2)` with `p_0 = 1`, i.e. `ln v_1^2` of the normalized
/// eigenvector belonging to eigenvalue `z`.
fn ln_first_component_sq<T: Real>(z: T, diag: &[T], offdiag: &[T]) -> T {
    let big = T::lit(RESCALE_AT);
    let (mut p_prev, mut p) = (T::zero(), T::one());
    let mut acc = T::one();
    let mut ln_scale = T::zero();
    for k in 0..diag.len() - 1 {
        let b_k = if k == 0 { T::zero() } else { offdiag[k - 1] };
        let p_next = ((z - diag[k]) * p - b_k * p_prev) / offdiag[k];
        p_prev = p;
        p = p_next;
        acc = acc + p * p;
        if p.abs() > big {
            let inv = T::one() / big;
            p = p * inv;
            p_prev = p_prev * inv;
            acc = acc * inv * inv;
            ln_scale = ln_scale + T::lit(2.0) * big.ln();
        }
    }
    -(acc.ln() + ln_scale)
}

/// Builds the N-point rule for `z^gamma e^{-z}`.
pub fn gauss_laguerre<T: Real>(order: usize, gamma: T) -> Result<QuadratureRule<T>> {
    let (diag, offdiag) = jacobi_matrix(order, gamma)?;
    let (mut nodes, _) = symmetric_tridiagonal_eigen(&diag, &offdiag)?;

    // b_N closes the recurrence for p_N, whose zeros are the nodes.
    let n = T::of_usize(order);
    let offdiag_full: Vec<T> = offdiag
        .iter()
        .copied()
        .chain(std::iter::once((n * (n + gamma)).sqrt()))
        .collect();
    for z in nodes.iter_mut() {
        for _ in 0..NEWTON_STEPS {
            let step = recurrence_newton_ratio(*z, &diag, &offdiag_full);
            if !step.is_finite() || step.abs() > T::lit(1e-6) * z.abs().max(T::one()) {
                break;
            }
            *z = *z - step;
            if step.abs() <= T::epsilon() * z.abs() {
                break;
            }
        }
    }

    let ln_mu0 = ln_gamma(gamma + T::one())?;
    let mut weights = Vec::with_capacity(order);
    let mut scaled_weights = Vec::with_capacity(order);
    for &z in &nodes {
        let ln_w = ln_mu0 + ln_first_component_sq(z, &diag, &offdiag);
        weights.push(ln_w.exp());
        scaled_weights.push((ln_w + z).exp());
    }
    Ok(QuadratureRule {
        gamma,
        nodes,
        weights,
        scaled_weights,
    })
}

/// `sum_i w_i f(z_i)`; a NaN from `f` is reported with the offending node.
pub fn integrate<T: Real, F: Fn(T) -> T>(rule: &QuadratureRule<T>, f: F) -> Result<T> {
    let mut acc = T::zero();
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if v.is_nan() {
            return Err(Error::Evaluation(z.to_f64().unwrap_or(f64::NAN)));
        }
        acc = acc + w * v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_small_orders() {
        let (d, o) = jacobi_matrix(1, 0.0).unwrap();
        assert_eq!(d, vec![1.0]);
        assert!(o.is_empty());

        let (d, o) = jacobi_matrix(2, 0.5).unwrap();
        assert_eq!(d, vec![1.5, 3.5]);
        assert_relative_eq!(o[0], 1.5f64.sqrt());

        let (d, o) = jacobi_matrix(3, -0.6).unwrap();
        for (a, b) in d.iter().zip([0.4, 2.4, 4.4]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_relative_eq!(o[0], 0.4f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(o[1], 2.8f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(jacobi_matrix(3, -1.0), Err(Error::Domain(_))));
        assert!(matches!(gauss_laguerre(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(gauss_laguerre(4, -1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn one_point_rule() {
        for g in [-0.6, 0.0, 0.4, 2.0] {
            let r = gauss_laguerre(1, g).unwrap();
            assert_relative_eq!(r.nodes()[0], g + 1.0, max_relative = 1e-14);
            assert_relative_eq!(r.weights()[0], gamma(g + 1.0).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn first_moment() {
        let r = gauss_laguerre(10, 0.0).unwrap();
        assert_relative_eq!(r.integrate(|z| z).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn fifth_moment() {
        let r = gauss_laguerre(20, -0.6).unwrap();
        let m5 = r.integrate(|z: f64| z.powi(5)).unwrap();
        // mpmath gamma(5.4)
        assert_relative_eq!(m5, 44.598_848_145_082_58, max_relative = 1e-11);
    }

    #[test]
    fn integrate_examples() {
        let r = gauss_laguerre(6, 0.3).unwrap();
        assert_relative_eq!(r.integrate(|_| 1.0).unwrap(), gamma(1.3).unwrap(), max_relative = 1e-12);
        let r = gauss_laguerre(4, 0.0).unwrap();
        assert_relative_eq!(r.integrate(|z| z * z).unwrap(), 2.0, max_relative = 1e-13);
        let r = gauss_laguerre(40, 0.0).unwrap();
        assert!((r.integrate(|z: f64| (-z).exp()).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let r = gauss_laguerre(5, 0.0).unwrap();
        assert!(matches!(r.integrate(|_| f64::NAN), Err(Error::Evaluation(_))));
        assert!(matches!(r.integrate_scaled(|_| f64::NAN), Err(Error::Evaluation(_))));
    }

    #[test]
    fn scaled_weights_consistent() {
        let r = gauss_laguerre(30, -0.4f64).unwrap();
        for ((&z, &w), &ws) in r.nodes().iter().zip(r.weights()).zip(r.scaled_weights()) {
            assert_relative_eq!(w * z.exp(), ws, max_relative = 1e-12);
        }
        // int_0^inf z^{g} e^{-2z} dz = Gamma(g+1) / 2^{g+1}, through the scaled form.
        let g: f64 = -0.4;
        let v = r.integrate_scaled(|z: f64| (-2.0 * z).exp()).unwrap();
        assert_relative_eq!(v, gamma(g + 1.0).unwrap() / 2f64.powf(g + 1.0), max_relative = 1e-10);
    }

    #[test]
    fn scaled_weights_finite_for_large_orders() {
        let r = gauss_laguerre(200, 0.2).unwrap();
        assert!(r.scaled_weights().iter().all(|w: &f64| w.is_finite() && *w > 0.0));
        assert!(r.nodes().last().unwrap() > &700.0);
    }

    #[test]
    fn ql_components_agree_with_recurrence() {
        let g = 0.5;
        let (d, o) = jacobi_matrix(25, g).unwrap();
        let (vals, first) = symmetric_tridiagonal_eigen(&d, &o).unwrap();
        let r = gauss_laguerre(25, g).unwrap();
        let mu0 = gamma(g + 1.0).unwrap();
        for i in 0..25 {
            assert_relative_eq!(vals[i], r.nodes()[i], max_relative = 1e-12);
            let w_ql = mu0 * first[i] * first[i];
            if w_ql > 1e-8 {
                assert_relative_eq!(w_ql, r.weights()[i], max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn eigen_length_mismatch() {
        assert!(matches!(
            symmetric_tridiagonal_eigen(&[1.0, 2.0], &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn single_precision_rule() {
        let r = gauss_laguerre(8, 0.5f32).unwrap();
        let m2 = r.integrate(|z| z * z).unwrap();
        // Gamma(3.5) = 3.32335097...
        assert_relative_eq!(m2, 3.323_351f32, max_relative = 1e-4);
    }
}
