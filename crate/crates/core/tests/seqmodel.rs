use proptest::prelude::*;
use rvas_core::seqmodel::*;
use rvas_core::simulate::{GenotypeMatrix, Ploidy};
use rvas_core::RandomStream;

/// `1 − Σ_{d<D} e^{−μ} μ^d / d!`, summed in log space.
fn tail_sum(mean: f64, threshold: u32) -> f64 {
    let below: f64 = (0..threshold)
        .map(|d| (-mean + d as f64 * mean.ln() - libm::lgamma(d as f64 + 1.0)).exp())
        .sum();
    1.0 - below
}

#[test]
fn detection_matches_tail_sum() {
    let cfg = SeqConfig::new(40.0, 30, 0.05).unwrap();
    let phi = detection_prob(&cfg).unwrap();
    assert!((phi - tail_sum(38.0, 30)).abs() < 1e-12);
    assert!(phi > 0.9 && phi < 1.0);
    // scipy.stats.poisson.sf(29, 38)
    assert!((phi - 0.9203601793899068).abs() < 1e-13);
}

#[test]
fn thinning_fraction_concentrates() {
    // λ(1 − p_err) = ln 2 with D = 1 gives φ = 1/2.
    let cfg = SeqConfig::new(std::f64::consts::LN_2, 1, 0.0).unwrap();
    let phi = detection_prob(&cfg).unwrap();
    assert!((phi - 0.5).abs() < 1e-15);
    let n = 1000;
    let ones = GenotypeMatrix::new(0, Ploidy::Binary, n, n, vec![1; n * n]).unwrap();
    let z = thin_matrix(&ones, &cfg, &RandomStream::new(1)).unwrap();
    let kept = z.entries().iter().filter(|&&e| e == 1).count() as f64 / (n * n) as f64;
    assert!((kept - phi).abs() < 3.0 * (0.25f64 / 1e6).sqrt(), "{kept}");
}

#[test]
fn read_level_thinning_has_the_same_law() {
    let cfg = SeqConfig::new(30.0, 30, 0.05).unwrap();
    let phi = detection_prob(&cfg).unwrap();
    let n = 400;
    let ones = GenotypeMatrix::new(0, Ploidy::Diploid, n, n, vec![2; n * n]).unwrap();
    let z = thin_matrix_by_reads(&ones, &cfg, &RandomStream::new(2)).unwrap();
    let kept = z.entries().iter().filter(|&&e| e == 2).count() as f64 / (n * n) as f64;
    assert!(z.entries().iter().all(|&e| e == 0 || e == 2));
    let se = (phi * (1.0 - phi) / (n * n) as f64).sqrt();
    assert!((kept - phi).abs() < 3.5 * se, "{kept} vs {phi}");
}

#[test]
fn thinning_is_deterministic() {
    let cfg = SeqConfig::new(25.0, 30, 0.05).unwrap();
    let x = GenotypeMatrix::new(0, Ploidy::Diploid, 20, 20, (0..400).map(|i| (i % 3) as u8).collect()).unwrap();
    let s = RandomStream::new(3).child(9);
    assert_eq!(thin_matrix(&x, &cfg, &s).unwrap(), thin_matrix(&x, &cfg, &s).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn thinning_never_creates_variants(
        rows in 1usize..12, cols in 1usize..12, diploid in any::<bool>(),
        depth in 0.0f64..80.0, threshold in 1u32..40, err in 0.0f64..0.5, seed in any::<u64>(),
        raw in proptest::collection::vec(0u8..3, 144),
    ) {
        let ploidy = if diploid { Ploidy::Diploid } else { Ploidy::Binary };
        let entries: Vec<u8> = raw[..rows * cols].iter().map(|&e| e.min(ploidy.max_entry())).collect();
        let x = GenotypeMatrix::new(0, ploidy, rows, cols, entries).unwrap();
        let cfg = SeqConfig::new(depth, threshold, err).unwrap();
        let z = thin_matrix(&x, &cfg, &RandomStream::new(seed)).unwrap();
        prop_assert_eq!((z.rows(), z.cols()), (x.rows(), x.cols()));
        for (zz, xx) in z.entries().iter().zip(x.entries()) {
            prop_assert!(*zz == 0 || zz == xx);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn detection_monotone(depth in 0.0f64..100.0, dd in 0.0f64..10.0, d in 1u32..60, err in 0.0f64..0.9, de in 0.0f64..0.09) {
        let phi = detection_prob(&SeqConfig::new(depth, d, err).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&phi));
        prop_assert!(detection_prob(&SeqConfig::new(depth + dd, d, err).unwrap()).unwrap() >= phi - 1e-15);
        prop_assert!(detection_prob(&SeqConfig::new(depth, d + 1, err).unwrap()).unwrap() <= phi + 1e-15);
        prop_assert!(detection_prob(&SeqConfig::new(depth, d, err + de).unwrap()).unwrap() <= phi + 1e-15);
    }

    #[test]
    fn budget_is_tight(budget in 1.0f64..1e6, depth in 0.1f64..200.0, k0 in 0.0f64..0.9, k1 in 0.1f64..5.0, groups in 1u32..4) {
        let cm = CostModel::new(k0, k1).unwrap();
        let m = max_samples_under_budget(budget, depth, &cm, groups).unwrap();
        let g = u64::from(groups);
        prop_assert!(cost(g * m, depth, &cm) <= budget);
        prop_assert!(cost(g * (m + 1), depth, &cm) > budget);
    }

    #[test]
    fn cost_is_affine(m in 0u64..10_000, depth in 0.0f64..200.0, k0 in 0.0f64..100.0, k1 in 0.1f64..5.0) {
        let cm = CostModel::new(k0, k1).unwrap();
        let c = cost(m, depth, &cm);
        prop_assert!((c - (m as f64 * depth * k1 + k0)).abs() <= 1e-9 * c.max(1.0));
        let step = cost(m + 1, depth, &cm) - c;
        prop_assert!((step - depth * k1).abs() <= 1e-9 * c.max(1.0));
    }
}
