use fracdiff::quadrature::symmetric_tridiagonal_eigen;
use fracdiff::specfun::gamma;
use fracdiff::{gauss_laguerre, jacobi_matrix};
use proptest::prelude::*;

/// Roots of the characteristic polynomial of a symmetric tridiagonal matrix,
/// found by Sturm-sequence bisection.
fn bisection_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0f64;
        for i in 0..n {
            let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
            d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let radius = diag.iter().map(|d| d.abs()).sum::<f64>() + 2.0 * off.iter().map(|b| b.abs()).sum::<f64>();
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn nodes_match_sturm_bisection() {
    for gam in [-0.9, -0.6, -0.4, 0.0, 0.5, 2.0] {
        for n in 1..=4 {
            let (d, e) = jacobi_matrix(n, gam).unwrap();
            let want = bisection_eigenvalues(&d, &e);
            let (got, _) = symmetric_tridiagonal_eigen(&d, &e).unwrap();
            let rule = gauss_laguerre(n, gam).unwrap();
            for k in 0..n {
                assert!((got[k] - want[k]).abs() <= 1e-12 * want[k].abs().max(1.0));
                assert!((rule.nodes()[k] - want[k]).abs() <= 1e-12 * want[k].abs().max(1.0));
            }
        }
    }
}

#[test]
fn two_point_rule_closed_form() {
    // L_2^(g)(z) is proportional to z^2 - 2(g + 2) z + (g + 1)(g + 2)
    let gam: f64 = 0.5;
    let rule = gauss_laguerre(2, gam).unwrap();
    let (a, b) = (1.0, -2.0 * (gam + 2.0));
    let c = (gam + 1.0) * (gam + 2.0);
    let disc = (b * b - 4.0 * a * c).sqrt();
    assert!((rule.nodes()[0] - (-b - disc) / 2.0).abs() < 1e-13);
    assert!((rule.nodes()[1] - (-b + disc) / 2.0).abs() < 1e-13);
}

#[test]
fn largest_node_growth_bound() {
    for gam in [-0.8, -0.2, 0.6] {
        for n in [5usize, 10, 40, 100, 160] {
            let rule = gauss_laguerre(n, gam).unwrap();
            let top = *rule.nodes().last().unwrap();
            assert!(top <= 4.0 * n as f64 + 2.0 * gam + 6.0, "N={n} gamma={gam} top={top}");
            assert!(rule.nodes()[0] > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rule_invariants(n in 1usize..80, gam in -0.95f64..3.0) {
        let rule = gauss_laguerre(n, gam).unwrap();
        prop_assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(rule.weights().iter().all(|&w| w >= 0.0));
        let total: f64 = rule.weights().iter().sum();
        let want = gamma(gam + 1.0).unwrap();
        prop_assert!((total - want).abs() <= 1e-12 * want);
        for (k, &z) in rule.nodes().iter().enumerate() {
            let w = rule.weights()[k];
            if w > 1e-250 {
                let s = rule.scaled_weights()[k];
                prop_assert!((s - w * z.exp()).abs() <= 1e-10 * s);
            }
        }
    }

    #[test]
    fn rule_is_exact_on_random_degree(n in 2usize..40, gam in -0.9f64..1.5, frac in 0.0f64..1.0) {
        let j = ((2 * n - 1) as f64 * frac) as i32;
        let rule = gauss_laguerre(n, gam).unwrap();
        let got = rule.integrate(|z: f64| z.powi(j)).unwrap();
        let want = gamma(gam + f64::from(j) + 1.0).unwrap();
        prop_assert!(((got - want) / want).abs() <= 1e-10);
    }
}
