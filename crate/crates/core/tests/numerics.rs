use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, StandardNormal};
use rvas_core::numerics::*;
use rvas_core::RandomStream;

// Reference values computed with scipy.stats / scipy.special.
const NCT_CASES: [(f64, f64, f64, f64); 8] = [
    (2.0, 18.0, 1.5, 0.6728479926807427),
    (-1.0, 5.0, 0.3, 0.11567086189181486),
    (0.5, 3.5, 2.0, 0.06566248013385886),
    (4.0, 30.0, 2.5, 0.9042134340189558),
    (10.0, 100.0, 8.0, 0.9470568743248287),
    (1.2, 1.0, -0.7, 0.9161773588505395),
    (-3.0, 12.0, -2.0, 0.21166343933034654),
    (6.0, 250.0, 4.0, 0.9729661244008682),
];

#[test]
fn noncentral_t_reference_values() {
    for &(x, df, d, want) in &NCT_CASES {
        let cdf = noncentral_t_cdf(x, df, d).unwrap();
        let sf = noncentral_t_sf(x, df, d).unwrap();
        assert!((cdf - want).abs() < 1e-9, "cdf({x},{df},{d}) = {cdf}, want {want}");
        assert!((sf - (1.0 - want)).abs() < 1e-9, "sf({x},{df},{d}) = {sf}");
    }
}

#[test]
fn central_t_quantile_reference_values() {
    let cases = [
        (0.975, 7.0, 2.3646242515927844),
        (0.9999, 18.0, 4.6480141551024285),
        (0.95, 5.0, 2.0150483733330233),
        (1.0 - 1e-4, 100.0, 3.8615997909500837),
        (0.01, 2.5, -5.353111173030873),
        (0.999, 1.0, 318.3088389855419),
    ];
    for &(p, df, want) in &cases {
        let got = central_t_quantile(p, df).unwrap();
        assert!(
            (got - want).abs() < 1e-9 * (1.0 + want.abs()),
            "q({p},{df}) = {got}, want {want}"
        );
    }
}

#[test]
fn incomplete_function_reference_values() {
    let gam = [
        (30.0, 38.0, 0.9203601793899068),
        (30.0, 20.0, 0.021818217525557418),
        (5.0, 0.1, 7.667801686189327e-08),
        (100.0, 130.0, 0.9972495916326934),
    ];
    for &(a, x, want) in &gam {
        let p = reg_lower_gamma(a, x).unwrap();
        let q = reg_upper_gamma(a, x).unwrap();
        assert!((p - want).abs() < 1e-13 * want.max(1e-3), "P({a},{x}) = {p}");
        assert!((q - (1.0 - want)).abs() < 1e-13);
    }
    let beta = [
        (0.5, 4.5, 0.1, 0.6565636038620863),
        (10.0, 3.0, 0.9, 0.889130022255),
        (2.5, 0.5, 0.999, 0.9463423453081866),
    ];
    for &(a, b, x, want) in &beta {
        assert!((reg_inc_beta(a, b, x).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn rising_factorial_spec_examples() {
    assert_eq!(log_rising_factorial(2.5, 0).unwrap(), 0.0);
    assert!((log_rising_factorial(1.0, 4).unwrap() - 24f64.ln()).abs() < 1e-14);
    assert!((log_rising_factorial(0.5, 3).unwrap() - 1.875f64.ln()).abs() < 1e-14);
    assert!(log_rising_factorial(-0.5, 3).is_err());
}

#[test]
fn poisson_sf_spec_examples() {
    assert_eq!(poisson_sf(12.0, 0).unwrap(), 1.0);
    assert_eq!(poisson_sf(0.0, 1).unwrap(), 0.0);
    assert!((poisson_sf(1.0, 1).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-15);
    assert!(poisson_sf(-0.1, 1).is_err());
}

/// Sample mean and standard error of `n` draws of `f`.
fn mc<F: FnMut() -> f64>(n: usize, mut f: F) -> (f64, f64) {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let v = f();
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let var = (s2 / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

#[test]
fn noncentral_t_matches_sampling_oracle() {
    let (x, df, delta) = (2.0, 18.0, 1.5);
    let mut rng = RandomStream::new(20).rng();
    let chi = ChiSquared::new(df).unwrap();
    let (p, se) = mc(2_000_000, || {
        let z: f64 = StandardNormal.sample(&mut rng);
        let v: f64 = chi.sample(&mut rng);
        let t = (z + delta) / (v / df).sqrt();
        f64::from(t <= x)
    });
    let got = noncentral_t_cdf(x, df, delta).unwrap();
    assert!((got - p).abs() < 3.0 * se, "{got} vs {p} ± {se}");
}

#[test]
fn beta_expectation_matches_sampling_oracle() {
    let mut rng = RandomStream::new(21).rng();
    let beta = Beta::new(0.5, 4.5).unwrap();
    let (m, se) = mc(2_000_000, || {
        let x: f64 = beta.sample(&mut rng);
        (1.0 - 0.9 * x).powi(10)
    });
    let got = beta_expectation_power(0.5, 4.5, 0.9, 10, 0.0, 0).unwrap();
    assert!((got - m).abs() < 3.0 * se, "{got} vs {m} ± {se}");
}

#[test]
fn beta_expectation_large_exponents_converge() {
    // Degree above the exact-rule limit: order doubling must converge to
    // the closed form E[(1-B)^m] = (b)_m / (a+b)_m.
    let (a, b, m) = (0.5, 4.5, 9000u64);
    let want = (log_rising_factorial(b, m).unwrap() - log_rising_factorial(a + b, m).unwrap()).exp();
    let got = beta_expectation_power(a, b, 1.0, m, 0.0, 0).unwrap();
    assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
}

#[test]
fn noncentral_t_rejects_bad_df() {
    assert!(noncentral_t_cdf(1.0, 0.0, 1.0).is_err());
    assert!(noncentral_t_cdf(1.0, f64::NAN, 1.0).is_err());
    assert!(central_t_quantile(0.3, -1.0).is_err());
}

#[test]
fn functions_are_pure() {
    let a = noncentral_t_cdf(1.7, 9.5, 0.4).unwrap();
    let b = noncentral_t_cdf(1.7, 9.5, 0.4).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    let r = GaussJacobiRule::new(30, 1.5, 2.5).unwrap();
    assert_eq!(r, GaussJacobiRule::new(30, 1.5, 2.5).unwrap());
}

#[test]
fn gauss_jacobi_exact_for_polynomials() {
    let mut rng = RandomStream::new(22).rng();
    for _ in 0..20 {
        let a: f64 = rng.random_range(0.05..6.0);
        let b: f64 = rng.random_range(0.05..6.0);
        let n = rng.random_range(2..40usize);
        let rule = GaussJacobiRule::new(n, a, b).unwrap();
        // E[B^j] = (a)_j / (a+b)_j for j < 2n
        for j in [1u64, (2 * n - 1) as u64] {
            let want = (log_rising_factorial(a, j).unwrap() - log_rising_factorial(a + b, j).unwrap()).exp();
            let got = rule.expect(|x| x.powi(j as i32));
            assert!(
                (got - want).abs() < 1e-11 * want.max(1e-300) + 1e-300,
                "a {a} b {b} n {n} j {j}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t_quantile_round_trip(p in 1e-6f64..(1.0 - 1e-6), df in 0.5f64..500.0) {
        let t = central_t_quantile(p, df).unwrap();
        prop_assert!((central_t_cdf(t, df).unwrap() - p).abs() < 1e-7);
        prop_assert!((noncentral_t_cdf(t, df, 0.0).unwrap() - p).abs() < 1e-7);
    }

    #[test]
    fn noncentral_t_monotone(x in -8.0f64..8.0, dx in 0.0f64..3.0, df in 0.5f64..300.0, d in -5.0f64..5.0, dd in 0.0f64..3.0) {
        let base = noncentral_t_cdf(x, df, d).unwrap();
        prop_assert!(noncentral_t_cdf(x + dx, df, d).unwrap() >= base - 1e-9);
        prop_assert!(noncentral_t_cdf(x, df, d + dd).unwrap() <= base + 1e-9);
    }

    #[test]
    fn beta_expectation_bounded_and_monotone(
        a in 0.05f64..8.0, b in 0.05f64..8.0,
        pf in 0.0f64..1.0, ef in 0u64..300,
        pp in 0.0f64..1.0, ep in 0u64..300,
        dp in 0.0f64..0.5, de in 0u64..50,
    ) {
        let v = beta_expectation_power(a, b, pf, ef, pp, ep).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        let tol = 1e-12;
        prop_assert!(beta_expectation_power(a, b, pf, ef + de, pp, ep).unwrap() <= v + tol);
        prop_assert!(beta_expectation_power(a, b, pf, ef, pp, ep + de).unwrap() <= v + tol);
        prop_assert!(beta_expectation_power(a, b, (pf + dp).min(1.0), ef, pp, ep).unwrap() <= v + tol);
        prop_assert!(beta_expectation_power(a, b, pf, ef, (pp + dp).min(1.0), ep).unwrap() <= v + tol);
    }

    #[test]
    fn poisson_sf_monotone(mean in 0.0f64..200.0, dm in 0.0f64..20.0, d in 0u64..250) {
        let v = poisson_sf(mean, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(poisson_sf(mean, d + 1).unwrap() <= v + 1e-15);
        prop_assert!(poisson_sf(mean + dm, d).unwrap() >= v - 1e-15);
    }
}
