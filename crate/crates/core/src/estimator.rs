//! Monte Carlo estimates of expected grid maxima and of the coupled gap
//! between a coarse and a fine grid.
//!
//! Estimates always use antithetic pairs. A base path `x` and its negation
//! share every random draw, so `max(−x) = −min(x)` and neither path needs to
//! be materialized: each pair contributes one observation
//! `(max x − min x)/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ProcessSpec, ProcessSpecFile};
use crate::numeric::{mean_and_variance, two_sided_z};
use crate::sampling::{check_path_count, PathSampler};
use crate::scalar::Scalar;

/// Confidence level used when none is given.
pub const DEFAULT_CI_LEVEL: f64 = 0.999;

/// Maximum entry of a path.
pub fn grid_max<T: Scalar>(path: &[T]) -> Result<T> {
    let (&first, rest) = path
        .split_first()
        .ok_or_else(|| Error::Shape("empty path".into()))?;
    Ok(rest.iter().fold(first, |acc, &x| acc.max(x)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEstimate<T> {
    pub spec: ProcessSpecFile,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub mean: T,
    pub stderr: T,
    pub ci_level: T,
    pub half_width: T,
}

impl<T: Scalar> MaxEstimate<T> {
    pub fn lower(&self) -> T {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> T {
        self.mean + self.half_width
    }

    pub fn contains(&self, value: T) -> bool {
        self.lower() <= value && value <= self.upper()
    }
}

/// Mean gap `E max_fine − E max_coarse` estimated on shared fine-grid paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate<T> {
    pub coarse_n: usize,
    pub fine_n: usize,
    pub m: usize,
    pub seed: u64,
    pub mean_gap: T,
    pub stderr: T,
    /// Smallest gap over all individual paths; never negative.
    pub min_pathwise_gap: T,
}

fn summarize<T: Scalar>(pair_values: &[f64]) -> (T, T) {
    let xs: Vec<T> = pair_values.iter().map(|&v| T::lit(v)).collect();
    let (mean, var) = mean_and_variance(&xs);
    (mean, (var / T::from_usize_lossy(xs.len())).sqrt())
}

fn max_min(path: &[f64], stride: usize) -> (f64, f64) {
    path.iter()
        .step_by(stride)
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &x| {
            (hi.max(x), lo.min(x))
        })
}

/// Antithetic estimate of `E max_{0≤i≤n} X_{i/n}` from `m` paths (`m/2`
/// pairs), with a two-sided normal confidence interval at `ci_level`.
pub fn estimate_expected_max<T: Scalar>(
    spec: &ProcessSpec<T>,
    n: usize,
    m: usize,
    seed: u64,
    ci_level: f64,
) -> Result<MaxEstimate<T>> {
    let sampler = PathSampler::new(spec, n)?;
    estimate_with_sampler(&sampler, m, seed, ci_level)
}

/// As [`estimate_expected_max`] with a prebuilt sampler.
pub fn estimate_with_sampler<T: Scalar>(
    sampler: &PathSampler<T>,
    m: usize,
    seed: u64,
    ci_level: f64,
) -> Result<MaxEstimate<T>> {
    check_pairs(m)?;
    let z = two_sided_z(ci_level)?;
    let pairs = sampler.map_base_paths(m / 2, seed, |p| {
        let (hi, lo) = max_min(p, 1);
        0.5 * (hi - lo)
    });
    let (mean, stderr) = summarize::<T>(&pairs);
    Ok(MaxEstimate {
        spec: ProcessSpecFile::describe(sampler.spec()),
        n: sampler.n(),
        m,
        seed,
        mean,
        stderr,
        ci_level: T::lit(ci_level),
        half_width: T::lit(z) * stderr,
    })
}

fn check_pairs(m: usize) -> Result<()> {
    check_path_count(m, true)?;
    if m < 4 {
        return Err(Error::Parameter(format!(
            "need at least 2 antithetic pairs for a standard error, got m = {m}"
        )));
    }
    Ok(())
}

/// Coupled gap between one coarse grid and the fine grid.
pub fn estimate_gap<T: Scalar>(
    spec: &ProcessSpec<T>,
    coarse_n: usize,
    fine_n: usize,
    m: usize,
    seed: u64,
) -> Result<GapEstimate<T>> {
    Ok(estimate_gaps(spec, &[coarse_n], fine_n, m, seed)?
        .gaps
        .remove(0))
}

/// Fine-grid estimate together with the gaps to every coarse grid, all from
/// the same paths.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedEstimates<T> {
    pub fine: MaxEstimate<T>,
    pub gaps: Vec<GapEstimate<T>>,
}

/// Samples once on the fine grid and evaluates every coarse grid by
/// subsampling, so each pathwise gap is a difference of maxima over nested
/// point sets and hence nonnegative.
pub fn estimate_gaps<T: Scalar>(
    spec: &ProcessSpec<T>,
    coarse_ns: &[usize],
    fine_n: usize,
    m: usize,
    seed: u64,
) -> Result<NestedEstimates<T>> {
    let sampler = PathSampler::new(spec, fine_n)?;
    estimate_gaps_with_sampler(&sampler, coarse_ns, m, seed, DEFAULT_CI_LEVEL)
}

pub fn estimate_gaps_with_sampler<T: Scalar>(
    sampler: &PathSampler<T>,
    coarse_ns: &[usize],
    m: usize,
    seed: u64,
    ci_level: f64,
) -> Result<NestedEstimates<T>> {
    check_pairs(m)?;
    let fine_n = sampler.n();
    let strides = coarse_ns
        .iter()
        .map(|&c| {
            if c == 0 || fine_n % c != 0 {
                Err(Error::Parameter(format!(
                    "coarse grid {c} does not divide the fine grid {fine_n}"
                )))
            } else {
                Ok(fine_n / c)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let z = two_sided_z(ci_level)?;
    // per pair: fine value, then for each coarse grid (pair-average gap, min of the two gaps)
    let rows = sampler.map_base_paths(m / 2, seed, |p| {
        let (hi, lo) = max_min(p, 1);
        let mut out = Vec::with_capacity(1 + 2 * strides.len());
        out.push(0.5 * (hi - lo));
        for &s in &strides {
            let (c_hi, c_lo) = max_min(p, s);
            let (g_plus, g_minus) = (hi - c_hi, c_lo - lo);
            out.push(0.5 * (g_plus + g_minus));
            out.push(g_plus.min(g_minus));
        }
        out
    });
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let (mean, stderr) = summarize::<T>(&column(0));
    let fine = MaxEstimate {
        spec: ProcessSpecFile::describe(sampler.spec()),
        n: fine_n,
        m,
        seed,
        mean,
        stderr,
        ci_level: T::lit(ci_level),
        half_width: T::lit(z) * stderr,
    };
    let gaps = coarse_ns
        .iter()
        .enumerate()
        .map(|(k, &coarse_n)| {
            let (mean_gap, stderr) = summarize::<T>(&column(1 + 2 * k));
            let min_gap = column(2 + 2 * k).into_iter().fold(f64::INFINITY, f64::min);
            GapEstimate {
                coarse_n,
                fine_n,
                m,
                seed,
                mean_gap,
                stderr,
                min_pathwise_gap: T::lit(min_gap),
            }
        })
        .collect();
    Ok(NestedEstimates { fine, gaps })
}
