use std::f64::consts::PI;

use gmax::bounds::{brownian_grid_expected_max, white_noise_limit, white_noise_limit_with_origin};
use gmax::estimator::{estimate_expected_max, estimate_gaps};
use gmax::ProcessSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[test]
fn confidence_intervals_have_nominal_coverage() {
    // E max(B_0, B_1) = E ξ⁺ exactly; 90% intervals should miss ~20 of 200
    let spec = ProcessSpec::fbm(0.5).unwrap();
    let misses = (0..200)
        .filter(|&seed| {
            !estimate_expected_max(&spec, 1, 1_000, seed, 0.9)
                .unwrap()
                .contains(INV_SQRT_2PI)
        })
        .count();
    assert!((8..=33).contains(&misses), "{misses} misses out of 200");
}

/// Brute-force `(1/√2) E (max_{1≤i≤n} ξ_i − shift)⁺` with `shift` either 0 or
/// an independent normal.
fn white_noise_mc(n: usize, with_origin: bool, samples: usize) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let m = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .fold(f64::NEG_INFINITY, f64::max);
        let shift: f64 = if with_origin {
            rng.sample(StandardNormal)
        } else {
            0.0
        };
        let v = (m - shift).max(0.0) / 2.0_f64.sqrt();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean) * samples as f64 / (samples - 1) as f64;
    (mean, (var / samples as f64).sqrt())
}

#[test]
fn white_noise_limits_match_brute_force() {
    assert!((white_noise_limit(1).unwrap() - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-8);
    for n in [1, 2, 8, 64] {
        let samples = if n == 64 { 1_000_000 } else { 10_000_000 };
        for (with_origin, value) in [
            (false, white_noise_limit(n)),
            (true, white_noise_limit_with_origin(n)),
        ] {
            let value = value.unwrap();
            let (mean, se) = white_noise_mc(n, with_origin, samples);
            assert!(
                (mean - value).abs() < 4.0 * se,
                "n={n} origin={with_origin}: {mean} ± {se} vs {value}"
            );
        }
    }
}

#[test]
fn small_hurst_estimates_approach_the_limit_with_origin() {
    for n in [1, 2, 16] {
        let e =
            estimate_expected_max(&ProcessSpec::fbm(1e-4).unwrap(), n, 200_000, 5, 0.999).unwrap();
        let limit = white_noise_limit_with_origin(n).unwrap();
        assert!(
            (e.mean - limit).abs() < 4.0 * e.stderr + 0.01,
            "n={n}: {} vs {limit}",
            e.mean
        );
    }
    // for one step the grid maximum is ξ⁺ for every H, not the white-noise value
    let e = estimate_expected_max(&ProcessSpec::fbm(1e-4).unwrap(), 1, 200_000, 5, 0.999).unwrap();
    assert!(e.mean - white_noise_limit(1).unwrap() > 20.0 * e.stderr);
}

#[test]
fn brownian_estimates_match_the_exact_grid_value() {
    let spec = ProcessSpec::fbm(0.5).unwrap();
    for n in [1, 2, 16, 1024] {
        let e = estimate_expected_max(&spec, n, 100_000, 17, 0.999).unwrap();
        let exact = brownian_grid_expected_max(n).unwrap();
        assert!(
            (e.mean - exact).abs() < 4.0 * e.stderr,
            "n={n}: {} ± {} vs {exact}",
            e.mean,
            e.stderr
        );
    }
}

#[test]
fn grid_maxima_grow_along_nested_grids() {
    for h in [0.2, 0.5, 0.8] {
        let r = estimate_gaps(
            &ProcessSpec::fbm(h).unwrap(),
            &[32, 128, 512],
            2048,
            4_000,
            11,
        )
        .unwrap();
        let mut previous = f64::INFINITY;
        for g in &r.gaps {
            assert!(g.min_pathwise_gap >= 0.0);
            assert!(g.mean_gap <= previous);
            previous = g.mean_gap;
        }
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let e64 =
        estimate_expected_max(&ProcessSpec::fbm(0.4).unwrap(), 256, 20_000, 3, 0.999).unwrap();
    let e32 = estimate_expected_max(
        &ProcessSpec::<f32>::fbm(0.4).unwrap(),
        256,
        20_000,
        3,
        0.999,
    )
    .unwrap();
    assert!(
        (f64::from(e32.mean) - e64.mean).abs() < 1e-5,
        "{} vs {}",
        e32.mean,
        e64.mean
    );
}
