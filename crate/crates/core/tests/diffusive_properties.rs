use fracdiff::oracle::caputo_l1;
use fracdiff::{
    advance_euler, caputo_derivative, kernel_reference, Approximation, CaseId, DiffusiveState, FractionalOrder, Method,
    Signal, Solver, Stepping, TestCase, TimeGrid,
};
use proptest::prelude::*;

fn order(a: f64) -> FractionalOrder<f64> {
    FractionalOrder::new(a).unwrap()
}

fn run_single(method: Method, alpha: FractionalOrder<f64>, z: f64, steps: usize, signal: &Signal<f64>) -> f64 {
    let grid = TimeGrid::new(1.0, steps + 1).unwrap();
    let f: Vec<f64> = if method.forced_by_derivative() {
        signal.sample_derivative(&grid).unwrap()
    } else {
        signal.sample_values(&grid).unwrap()
    };
    let slope0 = signal.sample_derivative(&grid).unwrap()[0];
    let mut s = DiffusiveState::initial(method, alpha, 1, slope0);
    for k in 1..=steps {
        s = advance_euler(method, alpha, Stepping::SemiImplicit, &s, &[z], &grid, f[k - 1], f[k]).unwrap();
    }
    s.x1[0]
}

#[test]
fn euler_state_tracks_kernel_across_stiffness() {
    let alpha = order(0.3);
    let signal = Signal::analytic(|t: f64| t * t, |t: f64| 2.0 * t);
    for m in Method::ALL {
        let reference = |z: f64| kernel_reference(m, alpha, z, 1.0, &signal, 1e-14).unwrap();
        let errors = |z: f64, steps: &[usize]| -> Vec<f64> {
            let r = reference(z);
            steps
                .iter()
                .map(|&n| (run_single(m, alpha, z, n, &signal) - r).abs())
                .collect()
        };
        // mild node: first order at h = 1e-2, 5e-3, 2.5e-3
        let errs = errors(0.5, &[100, 200, 400]);
        assert!(errs.windows(2).all(|w| w[1] <= 0.6 * w[0]), "{m}: {errs:?}");
        // stiff nodes: convergence once h resolves the node. The ISDR oscillator
        // at z = 50 has frequency 2500 and backward Euler damps its free
        // oscillation until h * 2500^2 is small.
        for z in [5.0, 50.0] {
            let steps: &[usize] = if m == Method::Isdr && z > 10.0 {
                &[4_000, 400_000, 4_000_000]
            } else {
                &[400, 4_000, 40_000]
            };
            let errs = errors(z, steps);
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{m} z={z}: {errs:?}");
            assert!(errs[2] <= 0.2 * errs[0], "{m} z={z}: {errs:?}");
        }
    }
}

#[test]
fn trapezoid_beats_euler_on_cubic() {
    let case = TestCase::<f64>::builtin(CaseId::Cubic).unwrap();
    let grid = case.grid(10_000).unwrap();
    let exact = case.exact_on(&grid).unwrap();
    for m in Method::ALL {
        let err = |s: Solver| {
            let d = Approximation::new(m, case.alpha, 50)
                .unwrap()
                .with_solver(s)
                .evaluate(&grid, &case.signal)
                .unwrap();
            fracdiff::max_error(&d, &exact).unwrap()
        };
        assert!(err(Solver::Trapezoid) <= err(Solver::Euler), "{m}");
    }
}

#[test]
fn fully_implicit_variant_stays_close() {
    let case = TestCase::<f64>::builtin(CaseId::Sine).unwrap();
    let grid = case.grid(4000).unwrap();
    let exact = case.exact_on(&grid).unwrap();
    for m in [Method::Cdr, Method::Sdr, Method::Isdr] {
        let a = Approximation::new(m, case.alpha, 40).unwrap();
        let semi = a.evaluate(&grid, &case.signal).unwrap();
        let full = a
            .clone()
            .with_stepping(Stepping::FullyImplicit)
            .evaluate(&grid, &case.signal)
            .unwrap();
        let es = fracdiff::max_error(&semi, &exact).unwrap();
        let ef = fracdiff::max_error(&full, &exact).unwrap();
        assert!(ef < 10.0 * es && es < 10.0 * ef, "{m}: {es:e} vs {ef:e}");
    }
}

#[test]
fn diffusive_methods_agree_with_l1() {
    let case = TestCase::<f64>::builtin(CaseId::Sine).unwrap();
    let grid = case.grid(2000).unwrap();
    let l1 = caputo_l1(&case.signal, case.alpha, &grid).unwrap();
    // the quadrature under-resolves the t^(1 - alpha) onset, so compare away from the origin
    let start = grid.count() / 10;
    let gap = |order: usize| {
        let d = caputo_derivative(Method::Cdr, Solver::Euler, case.alpha, order, &grid, &case.signal).unwrap();
        fracdiff::max_error(&d[start..], &l1[start..]).unwrap()
    };
    let (coarse, fine) = (gap(40), gap(160));
    assert!(fine < 1e-2 && fine < 0.5 * coarse, "{coarse:e} -> {fine:e}");
}

#[test]
fn single_precision_pipeline() {
    let grid = TimeGrid::<f32>::new(1.0, 500).unwrap();
    let signal = Signal::analytic(|t: f32| t * t, |t: f32| 2.0 * t);
    let alpha = FractionalOrder::new(0.5f32).unwrap();
    let d = caputo_derivative(Method::Cdr, Solver::Euler, alpha, 20, &grid, &signal).unwrap();
    let exact = fracdiff::exact_power(2.0f32, alpha, 1.0).unwrap();
    assert!((d[499] - exact).abs() < 0.05 * exact);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_the_signal(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        p in prop::array::uniform3(-1.0f64..1.0),
        q in prop::array::uniform3(-1.0f64..1.0),
        alpha in 0.05f64..0.95,
        mi in 0usize..4,
    ) {
        let m = Method::ALL[mi];
        let grid = TimeGrid::new(1.0, 300).unwrap();
        let mk = |c: [f64; 3]| Signal::analytic(
            move |t: f64| c[0] + c[1] * t + c[2] * t * t,
            move |t: f64| c[1] + 2.0 * c[2] * t,
        );
        let combo = [a * p[0] + b * q[0], a * p[1] + b * q[1], a * p[2] + b * q[2]];
        let run = |s: &Signal<f64>| caputo_derivative(m, Solver::Euler, order(alpha), 30, &grid, s).unwrap();
        let (dp, dq, dc) = (run(&mk(p)), run(&mk(q)), run(&mk(combo)));
        prop_assert_eq!(dc[0], 0.0);
        for k in 0..grid.count() {
            prop_assert!((dc[k] - (a * dp[k] + b * dq[k])).abs() <= 1e-11);
        }
    }

    #[test]
    fn constants_have_zero_derivative(c in -100.0f64..100.0, alpha in 0.05f64..0.95, mi in 0usize..4) {
        let grid = TimeGrid::new(2.0, 200).unwrap();
        let s = Signal::from_fn(move |_t: f64| c);
        let d = caputo_derivative(Method::ALL[mi], Solver::Trapezoid, order(alpha), 25, &grid, &s).unwrap();
        prop_assert!(d.iter().all(|v| v.abs() <= 1e-13));
    }
}
