//! Closed-form bounds and limits for expected maxima of Hölder Gaussian
//! processes on `[0, 1]`.
//!
//! Throughout, `f(H) = E max_{[0,1]} B^H` and `f(H, n) = E max_i B^H_{i/n}`.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{check_open_unit, check_positive, erfc, integrate, normal_sf, pairwise_sum};
use crate::scalar::Scalar;

/// Chaining constant; the known proof gives `L < 3.75`, so evaluating at
/// 3.75 keeps upper bounds valid.
pub const CHAINING_CONSTANT: f64 = 3.75;

/// `−ζ(1/2)/√(2π)` at the printed precision: the Brownian grid gap behaves
/// like this constant times `n^{−1/2}`.
pub const BROWNIAN_GAP_CONSTANT: f64 = 0.5826;

/// Additive slack in the grid-maximum lower bound.
pub const GRID_BOUND_SLACK: f64 = 0.0107;

/// `(2π ln 2)^{−1/2}`.
pub fn sudakov_log_constant() -> f64 {
    1.0 / (2.0 * PI * LN_2).sqrt()
}

fn check_c<T: Scalar>(c: T) -> Result<f64> {
    let c = c.as_f64();
    check_positive("C", c)?;
    Ok(c)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Lower bound `C/√(4Hπe ln 2)` on `E max X` when
/// `‖X_t − X_s‖₂ ≥ C|t−s|^H`. Always exceeds `C/(5√H)`.
pub fn expected_max_lower_bound<T: Scalar>(c: T, hurst: T) -> Result<T> {
    let (c, h) = (check_c(c)?, hurst.as_f64());
    check_open_unit("H", h)?;
    Ok(T::lit(c / (4.0 * h * PI * E * LN_2).sqrt()))
}

/// The rounded form `C/(5√H)` of [`expected_max_lower_bound`].
pub fn expected_max_simple_lower_bound<T: Scalar>(c: T, hurst: T) -> Result<T> {
    let (c, h) = (check_c(c)?, hurst.as_f64());
    check_open_unit("H", h)?;
    Ok(T::lit(c / (5.0 * h.sqrt())))
}

/// Chaining upper bound `L C √(2π/(H ln³2)) erfc(√(H ln 2 / 2))` on
/// `E max X` when `‖X_t − X_s‖₂ ≤ C|t−s|^H`. Always below `16.3 C/√H`.
pub fn expected_max_upper_bound<T: Scalar>(c: T, hurst: T) -> Result<T> {
    let (c, h) = (check_c(c)?, hurst.as_f64());
    check_open_unit("H", h)?;
    let value = CHAINING_CONSTANT
        * c
        * (2.0 * PI / (h * LN_2.powi(3))).sqrt()
        * erfc((h * LN_2 / 2.0).sqrt());
    Ok(T::lit(value))
}

/// `C √(2π)`: comparison with Brownian motion, valid when the upper Hölder
/// bound holds with exponent at least ½. Loose by a factor π, since
/// `E max_{[0,1]} W = √(2/π)` (see [`brownian_expected_max`]).
pub fn brownian_comparison_upper_bound<T: Scalar>(c: T) -> Result<T> {
    let c = check_c(c)?;
    Ok(T::lit(c * (2.0 * PI).sqrt()))
}

/// `E max_{0≤t≤1} W_t = E|W_1| = √(2/π)` for standard Brownian motion.
pub fn brownian_expected_max() -> f64 {
    (2.0 / PI).sqrt()
}

/// Exact `E max_{0≤k≤n} W_{k/n} = (2πn)^{−1/2} Σ_{k=1}^n k^{−1/2}`, from
/// Spitzer's identity `E max_k S_k = Σ_k E S_k⁺ / k` for the Gaussian walk.
pub fn brownian_grid_expected_max(n: usize) -> Result<f64> {
    check_n(n)?;
    let terms: Vec<f64> = (1..=n).map(|k| 1.0 / (k as f64).sqrt()).collect();
    Ok(pairwise_sum(&terms) / (2.0 * PI * n as f64).sqrt())
}

/// Sudakov lower bound `C √(log₂(n+1)/(n^{2H} 2π))` on `E max_i X_{i/n}`
/// when `‖X_t − X_s‖₂ ≥ C|t−s|^H`.
pub fn grid_sudakov_lower_bound<T: Scalar>(c: T, hurst: T, n: usize) -> Result<T> {
    let (c, h) = (check_c(c)?, hurst.as_f64());
    check_open_unit("H", h)?;
    check_n(n)?;
    let n = n as f64;
    Ok(T::lit(
        c * ((n + 1.0).log2() / (n.powf(2.0 * h) * 2.0 * PI)).sqrt(),
    ))
}

/// Smallest `n` for which [`discretization_gap_upper_bound`] applies: `⌈2^{1/H}⌉`.
pub fn gap_bound_threshold(hurst: f64) -> f64 {
    2.0_f64.powf(1.0 / hurst)
}

/// Upper bound on `E max_{[0,1]} X − E max_i X_{i/n}` under
/// `‖X_t − X_s‖₂ ≤ C|t−s|^H`:
/// `(2C√(ln n)/n^H)(1 + 4/n^H + 0.0074/(ln n)^{3/2})`, valid for
/// `n ≥ 2^{1/H}`.
pub fn discretization_gap_upper_bound<T: Scalar>(c: T, hurst: T, n: usize) -> Result<T> {
    let (c, h) = (check_c(c)?, hurst.as_f64());
    check_open_unit("H", h)?;
    let threshold = gap_bound_threshold(h);
    if (n as f64) < threshold {
        return Err(Error::Validity(format!(
            "the gap bound needs n >= 2^(1/H) = {threshold}, got n = {n}"
        )));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let nh = nf.powf(h);
    Ok(T::lit(
        2.0 * c * ln.sqrt() / nh * (1.0 + 4.0 / nh + 0.0074 / ln.powf(1.5)),
    ))
}

/// Asymptotic Brownian grid gap `0.5826 n^{−1/2}`.
pub fn brownian_gap_asymptotic(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(BROWNIAN_GAP_CONSTANT / (n as f64).sqrt())
}

/// Modulus controlling `|f(H₁, n) − f(H₂, n)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityModulus {
    /// `max_{1≤j≤n} ((j/n)^{2H₁} − (j/n)^{2H₂})`.
    pub alpha_n: f64,
    /// `√(α_n ln n)`.
    pub modulus: f64,
    /// Closed-form majorant of `α_n`: `(H₂−H₁)/(e H₁)` for `H₁ > 0`,
    /// `1 − n^{−2H₂}` (attained) for `H₁ = 0`.
    pub alpha_bound: f64,
}

/// Continuity modulus of `H ↦ f(H, n)` between `0 ≤ H₁ < H₂ < 1`, from the
/// comparison of two Gaussian vectors through their increment variances.
pub fn continuity_modulus(h1: f64, h2: f64, n: usize) -> Result<ContinuityModulus> {
    if !(0.0..1.0).contains(&h1) || !(h1 < h2 && h2 < 1.0) {
        return Err(Error::Parameter(format!(
            "need 0 <= H1 < H2 < 1, got H1 = {h1}, H2 = {h2}"
        )));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let alpha_n = (1..=n)
        .map(|j| {
            let x = j as f64 / nf;
            x.powf(2.0 * h1) - x.powf(2.0 * h2)
        })
        .fold(0.0, f64::max);
    let alpha_bound = if h1 > 0.0 {
        (h2 - h1) / (E * h1)
    } else {
        1.0 - nf.powf(-2.0 * h2)
    };
    Ok(ContinuityModulus {
        alpha_n,
        modulus: (alpha_n * nf.ln()).sqrt(),
        alpha_bound,
    })
}

/// `lim_{H→0} f(H, n) = (1/√2) E (max_{i≤n} ξ_i)⁺ = (1/√2) ∫₀^∞ (1 − Φ(u)ⁿ) du`
/// for iid standard normals, by adaptive quadrature (absolute error below
/// 1e-8).
pub fn white_noise_limit(n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    // 1 − Φⁿ = −expm1(n ln(1 − Φc)) keeps full relative accuracy in the tail
    let tail = |u: f64| -(nf * (-normal_sf(u)).ln_1p()).exp_m1();
    let upper = 8.0 + (2.0 * nf.ln()).sqrt();
    let (value, _) = integrate(tail, 0.0, upper, 1e-12);
    Ok(value / 2.0_f64.sqrt())
}

/// `(1/√2) E (max_{i≤n} ξ_i − ξ_0)⁺` for iid standard normals: the limit of
/// `E max_{0≤i≤n} B^H_{i/n}` as `H → 0`, where the origin enters through
/// the common `−ξ_0`. Nested quadrature over `ξ_0 = z`.
pub fn white_noise_limit_with_origin(n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    let tail = |u: f64| -(nf * (-normal_sf(u)).ln_1p()).exp_m1();
    let upper = 8.0 + (2.0 * nf.ln()).sqrt();
    let inner = |z: f64| {
        if z >= upper {
            0.0
        } else {
            integrate(tail, z, upper, 1e-13).0
        }
    };
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let (value, _) = integrate(|z| density(z) * inner(z), -9.0, upper, 1e-11);
    Ok(value / 2.0_f64.sqrt())
}

/// Lower bound on `f(H, n)`: for `n ≥ 2^{1/H}`,
/// `max{1/(5√H) − 6√(ln n)/n^H, c₂√(ln n)/n^H} − c₁`; otherwise
/// `(c₂/2)√(ln n)`, with `c₁ = 0.0107` and `c₂ = (2π ln 2)^{−1/2}`.
pub fn grid_max_lower_bound(hurst: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    grid_max_lower_bound_ln(hurst, (n as f64).ln())
}

/// [`grid_max_lower_bound`] in terms of `ln n`, for grids too large to
/// count in a `usize`.
pub fn grid_max_lower_bound_ln(hurst: f64, ln_n: f64) -> Result<f64> {
    check_open_unit("H", hurst)?;
    if !(ln_n >= 0.0) || ln_n.is_infinite() {
        return Err(Error::domain("ln n", ln_n, "[0, ∞)"));
    }
    let c2 = sudakov_log_constant();
    let root_ln = ln_n.sqrt();
    // relative slack so that n = 2^{1/H} exactly lands in the first branch
    if ln_n >= LN_2 / hurst * (1.0 - 1e-12) {
        let nh = (hurst * ln_n).exp();
        let a = 1.0 / (5.0 * hurst.sqrt()) - 6.0 * root_ln / nh;
        let b = c2 * root_ln / nh;
        Ok(a.max(b) - GRID_BOUND_SLACK)
    } else {
        Ok(0.5 * c2 * root_ln)
    }
}

/// The `n`-free minorant `c₂/((6+c₂) 5√H) − c₁` of [`grid_max_lower_bound`]
/// on `n ≥ 2^{1/H}`.
pub fn grid_max_lower_bound_uniform(hurst: f64) -> Result<f64> {
    check_open_unit("H", hurst)?;
    let c2 = sudakov_log_constant();
    Ok(c2 / ((6.0 + c2) * 5.0 * hurst.sqrt()) - GRID_BOUND_SLACK)
}

/// A named bound value with the constants that entered it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub constants_used: BTreeMap<String, f64>,
    /// Applicability condition, when the bound has one.
    pub validity: Option<String>,
}

impl BoundReport {
    fn new(name: &str, value: f64, constants: &[(&str, f64)], validity: Option<String>) -> Self {
        Self {
            name: name.to_owned(),
            value,
            constants_used: constants.iter().map(|&(k, v)| (k.to_owned(), v)).collect(),
            validity,
        }
    }
}

/// Every bound for scale `C`, exponent `H` and grid size `n`. Bounds whose
/// validity condition fails are omitted.
pub fn bound_reports(c: f64, hurst: f64, n: usize) -> Result<Vec<BoundReport>> {
    let mut out = vec![
        BoundReport::new(
            "expected_max_lower",
            expected_max_lower_bound(c, hurst)?,
            &[("C", c)],
            None,
        ),
        BoundReport::new(
            "expected_max_upper",
            expected_max_upper_bound(c, hurst)?,
            &[("C", c), ("L", CHAINING_CONSTANT)],
            None,
        ),
        BoundReport::new(
            "brownian_comparison_upper",
            brownian_comparison_upper_bound(c)?,
            &[("C", c)],
            Some("upper Hölder bound with H >= 1/2".into()),
        ),
        BoundReport::new(
            "grid_sudakov_lower",
            grid_sudakov_lower_bound(c, hurst, n)?,
            &[("C", c)],
            None,
        ),
    ];
    if let Ok(v) = discretization_gap_upper_bound(c, hurst, n) {
        out.push(BoundReport::new(
            "gap_upper",
            v,
            &[("C", c)],
            Some(format!("n >= 2^(1/H) = {}", gap_bound_threshold(hurst))),
        ));
    }
    if hurst == 0.5 {
        out.push(BoundReport::new(
            "brownian_gap_asymptotic",
            brownian_gap_asymptotic(n)?,
            &[("alpha", BROWNIAN_GAP_CONSTANT)],
            Some("H = 1/2, n -> infinity".into()),
        ));
    }
    out.push(BoundReport::new(
        "grid_max_lower",
        grid_max_lower_bound(hurst, n)?,
        &[("c1", GRID_BOUND_SLACK), ("c2", sudakov_log_constant())],
        Some("fBm".into()),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lower_bound_values() {
        assert!(close(
            expected_max_lower_bound(1.0, 0.1).unwrap(),
            0.649_882_9,
            1e-6
        ));
        for h in [0.2, 0.5, 0.9] {
            let v = expected_max_lower_bound(1.0, h).unwrap();
            assert!(close(v * f64::sqrt(h), 0.205_511_0, 1e-6));
            assert!(close(
                expected_max_lower_bound(2.0, h).unwrap(),
                2.0 * v,
                1e-15
            ));
        }
        assert!(expected_max_lower_bound(1.0, 1.0).is_err());
        assert!(expected_max_lower_bound(0.0, 0.5).is_err());
    }

    #[test]
    fn upper_bound_values() {
        assert!(close(
            expected_max_upper_bound(1.0, 0.1).unwrap(),
            40.812_49,
            1e-4
        ));
        assert!(close(
            expected_max_upper_bound(1.0, 0.5).unwrap(),
            12.809_11,
            1e-4
        ));
        assert!(close(
            expected_max_upper_bound(1.0, 0.9).unwrap(),
            7.376_545,
            1e-5
        ));
        assert!(expected_max_upper_bound(1.0, 0.1).unwrap() < 16.3 / 0.1_f64.sqrt());
        assert!(close(
            expected_max_upper_bound(3.0, 0.4).unwrap(),
            3.0 * expected_max_upper_bound(1.0, 0.4).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn sandwich_and_simplified_constants() {
        for i in 1..1000 {
            let h = i as f64 / 1000.0;
            let lo = expected_max_lower_bound(1.0, h).unwrap();
            let hi = expected_max_upper_bound(1.0, h).unwrap();
            assert!(lo < hi);
            assert!(lo > 1.0 / (5.0 * h.sqrt()));
            assert!(hi < 16.3 / h.sqrt());
        }
    }

    #[test]
    fn brownian_comparison() {
        assert!(close(
            brownian_comparison_upper_bound(1.0).unwrap(),
            2.506_628_274_631,
            1e-12
        ));
        assert!(close(
            brownian_comparison_upper_bound(0.5).unwrap(),
            1.253_314_137_316,
            1e-12
        ));
        assert!(
            brownian_comparison_upper_bound(1.0).unwrap()
                < expected_max_upper_bound(1.0, 0.5).unwrap()
        );
    }

    #[test]
    fn grid_sudakov_values() {
        assert!(close(
            grid_sudakov_lower_bound(1.0, 0.5, 2).unwrap(),
            0.355_144_1,
            1e-7
        ));
        for h in [0.1, 0.7] {
            assert!(close(
                grid_sudakov_lower_bound(1.0, h, 1).unwrap(),
                0.398_942_280_4,
                1e-9
            ));
        }
        // the best n near e^{1/(2H)} recovers the continuous lower bound constant
        for h in [0.03_f64, 0.05, 0.1] {
            let x = (1.0 / (2.0 * h)).exp();
            let n = x.floor() as usize;
            let best = (n.saturating_sub(2).max(1)..=n + 2)
                .map(|k| grid_sudakov_lower_bound(1.0, h, k).unwrap())
                .fold(0.0, f64::max);
            assert!(best >= 0.2055 / h.sqrt(), "H={h}: {best}");
        }
    }

    #[test]
    fn gap_bound_values() {
        // direct evaluation: 2√(ln 16)/4 · (1 + 1 + 0.0074/(ln 16)^{3/2})
        assert!(close(
            discretization_gap_upper_bound(1.0, 0.5, 16).unwrap(),
            1.666_444,
            1e-6
        ));
        assert!(close(
            discretization_gap_upper_bound(1.0, 0.5, 256).unwrap(),
            0.368_107,
            1e-6
        ));
        assert!(matches!(
            discretization_gap_upper_bound(1.0, 0.5, 3),
            Err(Error::Validity(_))
        ));
        assert!(discretization_gap_upper_bound(1.0, 0.5, 4).is_ok());
        let mut previous = f64::INFINITY;
        for k in 1..=8 {
            let v = discretization_gap_upper_bound(1.0, 0.5, 4_usize.pow(k)).unwrap();
            assert!(v < previous);
            previous = v;
        }
    }

    #[test]
    fn brownian_gap_values() {
        assert!(close(
            brownian_gap_asymptotic(10_000).unwrap(),
            0.005_826,
            1e-15
        ));
        assert_eq!(brownian_gap_asymptotic(1).unwrap(), 0.5826);
        let r = brownian_gap_asymptotic(400).unwrap() / brownian_gap_asymptotic(100).unwrap();
        assert!(close(r, 0.5, 1e-15));
    }

    #[test]
    fn continuity_modulus_values() {
        let m = continuity_modulus(0.4, 0.5, 4).unwrap();
        assert!(close(m.alpha_n, 0.079_876_8, 1e-6), "{m:?}");
        assert!(close(m.modulus, 0.332_766, 1e-6), "{m:?}");
        let m = continuity_modulus(0.0, 0.5, 4).unwrap();
        assert!(close(m.alpha_n, 0.75, 1e-15));
        assert!(close(m.alpha_bound, 0.75, 1e-15));
        let m = continuity_modulus(0.0, 0.001, 16).unwrap();
        assert!(close(m.modulus, 0.123_822_2, 1e-7));
        let tiny = continuity_modulus(0.4, 0.400_001, 64).unwrap();
        assert!(tiny.modulus < 1e-2);
        assert!(continuity_modulus(0.5, 0.4, 4).is_err());
    }

    #[test]
    fn modulus_below_closed_majorant() {
        for &(h1, h2) in &[(0.1, 0.2), (0.3, 0.9), (0.05, 0.06)] {
            for n in [2, 16, 1024] {
                let m = continuity_modulus(h1, h2, n).unwrap();
                assert!(m.modulus <= ((n as f64).ln() * (h2 - h1) / (E * h1)).sqrt() + 1e-15);
            }
        }
    }

    #[test]
    fn white_noise_limit_values() {
        assert!(close(white_noise_limit(1).unwrap(), 0.5 / PI.sqrt(), 1e-8));
        assert!(close(white_noise_limit(8).unwrap(), 1.007_028, 1e-6));
        assert!(close(white_noise_limit(16).unwrap(), 1.248_745, 1e-6));
        assert!(close(white_noise_limit(64).unwrap(), 1.657_270, 1e-6));
        // high-precision quadrature of the same tail integral
        assert!(close(white_noise_limit(2).unwrap(), 0.481_566, 1e-6));
        let mut previous = 0.0;
        for n in 1..40 {
            let v = white_noise_limit(n).unwrap();
            assert!(v > previous);
            previous = v;
        }
    }

    #[test]
    fn brownian_grid_maxima() {
        assert!(close(
            brownian_expected_max(),
            0.797_884_560_802_865_4,
            1e-15
        ));
        assert!(close(
            brownian_grid_expected_max(1).unwrap(),
            0.398_942_280_401_432_7,
            1e-15
        ));
        let two = (1.0 + 0.5_f64.sqrt()) / (4.0 * PI).sqrt();
        assert!(close(brownian_grid_expected_max(2).unwrap(), two, 1e-15));
        for p in [10, 14, 16] {
            let n = 1usize << p;
            let gap = brownian_expected_max() - brownian_grid_expected_max(n).unwrap();
            // next term of the expansion is O(1/n)
            assert!(
                close(
                    gap * (n as f64).sqrt(),
                    0.582_597_5,
                    0.2 / (n as f64).sqrt()
                ),
                "n={n}: {gap}"
            );
        }
    }

    #[test]
    fn white_noise_limit_with_origin_values() {
        let cases = [
            (1, 0.398_942_280_401_430_2),
            (2, 0.598_413_420_602_149_1),
            (16, 1.268_508_539_737_379),
        ];
        for (n, want) in cases {
            let v = white_noise_limit_with_origin(n).unwrap();
            assert!(close(v, want, 1e-8), "n={n}: {v}");
            assert!(v > white_noise_limit(n).unwrap());
        }
    }

    #[test]
    fn simple_lower_bound_is_weaker() {
        assert_eq!(expected_max_simple_lower_bound(1.0, 0.04).unwrap(), 1.0);
        assert!(close(
            expected_max_simple_lower_bound(1.0, 0.5).unwrap(),
            0.282_842_7,
            1e-7
        ));
        for h in [0.1, 0.5, 0.9] {
            assert!(
                expected_max_simple_lower_bound(1.0, h).unwrap()
                    < expected_max_lower_bound(1.0, h).unwrap()
            );
        }
    }

    #[test]
    fn grid_max_lower_bound_branches() {
        let c2 = sudakov_log_constant();
        assert!(close(c2, 0.479_178_5, 1e-7));
        assert!(close(
            grid_max_lower_bound(0.1, 2).unwrap(),
            0.199_471_1,
            1e-7
        ));
        let v = grid_max_lower_bound(0.1, 1024).unwrap();
        assert!(close(v, 0.620_083, 1e-6), "{v}");
        let uniform = grid_max_lower_bound_uniform(0.1).unwrap();
        assert!(close(uniform, 0.036_1, 1e-4), "{uniform}");
        for n in [1024, 4096, 1 << 16] {
            assert!(grid_max_lower_bound(0.1, n).unwrap() >= uniform);
        }
        // diverges along H → 0 with n ≥ 2^{1/H}
        let a = grid_max_lower_bound(0.05, 1 << 20).unwrap();
        let b = grid_max_lower_bound(0.01, usize::MAX).unwrap();
        assert!(b > a && a > v);
    }

    #[test]
    fn reports_record_validity() {
        let r = bound_reports(1.0, 0.5, 3).unwrap();
        assert!(r.iter().all(|b| b.name != "gap_upper"));
        let r = bound_reports(1.0, 0.5, 256).unwrap();
        let gap = r.iter().find(|b| b.name == "gap_upper").unwrap();
        assert!(gap.validity.as_deref().unwrap().contains("2^(1/H)"));
        assert!(r.iter().all(|b| b.value.is_finite()));
    }
}
