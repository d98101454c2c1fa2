use gmax::bounds::{
    discretization_gap_upper_bound, expected_max_lower_bound, expected_max_upper_bound,
    white_noise_limit, CHAINING_CONSTANT,
};
use gmax::frac_calculus::GridFunction;
use gmax::gauss_inequalities::{
    chaining_upper, chatterjee_diff_bound, dyadic_nets, mills_tail_bound, sudakov_lower,
    ChainingNets, FiniteGaussian,
};
use gmax::kernels::{FredholmKernel, ProcessSpec};
use gmax::numeric::min_eigenvalue;
use gmax::PathSampler;
use proptest::prelude::*;

fn grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

fn every_family() -> Vec<(String, ProcessSpec<f64>)> {
    let mut out = vec![];
    for h in [0.05, 0.3, 0.5, 0.7, 0.95] {
        out.push((format!("fbm {h}"), ProcessSpec::fbm(h).unwrap()));
        out.push((format!("sub-fbm {h}"), ProcessSpec::sub_fbm(h).unwrap()));
        for k in [0.2, 0.5, 1.0] {
            out.push((
                format!("bi-fbm {h} {k}"),
                ProcessSpec::bi_fbm(h, k).unwrap(),
            ));
        }
    }
    let brownian = FredholmKernel::from_fn(257, |t, s| if s <= t { 1.0 } else { 0.0 }).unwrap();
    out.push(("fredholm brownian".into(), ProcessSpec::fredholm(brownian)));
    for h in [0.3, 0.7] {
        let f = GridFunction::from_fn(1024, |s| 1.0 + s * s).unwrap();
        out.push((
            format!("wiener integral {h}"),
            ProcessSpec::wiener_integral(f, h).unwrap(),
        ));
    }
    out
}

#[test]
fn covariance_matrices_are_psd_on_33_points() {
    let times = grid(32);
    for (name, spec) in every_family() {
        let cov = spec.covariance_matrix(&times).unwrap();
        let scale = (0..33).map(|i| cov[i * 33 + i]).fold(0.0, f64::max);
        let min = min_eigenvalue(&cov, 33).unwrap();
        assert!(min >= -1e-8 * scale.max(1.0), "{name}: {min:e}");
        FiniteGaussian::new(times.clone(), cov).unwrap();
    }
}

#[test]
fn fixed_depth_chaining_stays_bounded_as_hurst_vanishes() {
    // fixed-depth chaining is bounded as H → 0 while 1/√H is not
    let nets = dyadic_nets(3, None).unwrap();
    let tiny = chaining_upper(|t, s| (t - s).abs().powf(1e-6), &nets, CHAINING_CONSTANT);
    let levels_sum: f64 = (0..=3).map(|k| 2.0_f64.powf(k as f64 / 2.0)).sum();
    assert!(tiny <= CHAINING_CONSTANT * levels_sum);
    assert!(white_noise_limit(256).unwrap() < tiny);
}

#[test]
fn gap_bound_decreases_along_powers_of_four() {
    let mut previous = f64::INFINITY;
    for k in 1..=8 {
        let v = discretization_gap_upper_bound(1.0, 0.5, 1 << (2 * k)).unwrap();
        assert!(v < previous);
        previous = v;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariances_are_symmetric(t in 0.0..1.0f64, s in 0.0..1.0f64, h in 0.01..0.99f64, k in 0.05..1.0f64) {
        for spec in [ProcessSpec::fbm(h).unwrap(), ProcessSpec::sub_fbm(h).unwrap(), ProcessSpec::bi_fbm(h, k).unwrap()] {
            prop_assert_eq!(spec.covariance(t, s).unwrap(), spec.covariance(s, t).unwrap());
            prop_assert!(spec.increment_variance(t, s).unwrap() >= 0.0);
        }
    }

    #[test]
    fn nested_grid_maxima_are_monotone(seed in any::<u64>(), h in 0.05..0.95f64) {
        let batch = PathSampler::new(&ProcessSpec::fbm(h).unwrap(), 64).unwrap().sample(2, seed, false).unwrap();
        for p in batch.paths() {
            let mut previous = f64::NEG_INFINITY;
            for stride in [64, 16, 4, 1] {
                let m = p.iter().step_by(stride).copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(m >= previous);
                previous = m;
            }
        }
    }

    #[test]
    fn refining_an_inner_level_cannot_raise_chaining(extra in proptest::collection::vec(0.0..1.0f64, 0..8), h in 0.1..0.9f64) {
        let d = |t: f64, s: f64| (t - s).abs().powf(h);
        let eighths: Vec<f64> = (1..=8).map(|j| j as f64 / 8.0).collect();
        let finest: Vec<f64> = (1..=64).map(|j| j as f64 / 64.0).collect();
        let base = ChainingNets::new(vec![vec![0.5], vec![0.25, 0.75], eighths.clone(), finest.clone()]).unwrap();
        let mut refined_level = eighths;
        refined_level.extend(&extra);
        let refined = ChainingNets::new(vec![vec![0.5], vec![0.25, 0.75], refined_level, finest]).unwrap();
        prop_assert!(chaining_upper(d, &refined, 1.0) <= chaining_upper(d, &base, 1.0) + 1e-12);
    }

    #[test]
    fn mills_bound_is_scale_invariant(x in 0.1..10.0f64, sigma in 0.1..10.0f64, lambda in 0.1..10.0f64) {
        let a = mills_tail_bound(x, sigma).unwrap();
        let b = mills_tail_bound(lambda * x, lambda * sigma).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn sudakov_scales_linearly(c in 0.1..5.0f64, h in 0.1..0.9f64) {
        let times = grid(8);
        let spec = ProcessSpec::fbm(h).unwrap();
        let base = FiniteGaussian::from_spec(&spec, times.clone()).unwrap();
        let scaled = FiniteGaussian::from_spec(&spec.clone().with_scale(c).unwrap(), times).unwrap();
        let (a, b) = (sudakov_lower(&base).unwrap(), sudakov_lower(&scaled).unwrap());
        prop_assert!((b - c * a).abs() <= 1e-10 * b.max(1.0));
        prop_assert_eq!(chatterjee_diff_bound(&base, &scaled).unwrap(), chatterjee_diff_bound(&scaled, &base).unwrap());
    }

    #[test]
    fn closed_form_bounds_are_ordered(h in 0.001..0.999f64, c in 0.1..10.0f64) {
        let lo = expected_max_lower_bound(c, h).unwrap();
        let hi = expected_max_upper_bound(c, h).unwrap();
        prop_assert!(lo < hi);
        prop_assert!(lo > c / (5.0 * h.sqrt()));
        prop_assert!(hi < 16.3 * c / h.sqrt());
    }
}
