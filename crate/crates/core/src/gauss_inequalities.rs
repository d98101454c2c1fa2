//! Finite-dimensional Gaussian comparison inequalities and the dyadic nets
//! used for chaining bounds.

use std::f64::consts::PI;

use num_traits::Float;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::ProcessSpec;
use crate::numeric::min_eigenvalue;
use crate::sampling::PSD_TOLERANCE;
use crate::scalar::Scalar;

/// Largest net depth whose levels (`2^{2^k}` points) are materialized.
pub const MAX_NET_DEPTH: usize = 4;

/// A centered Gaussian vector indexed by time points.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGaussian<T> {
    points: Vec<T>,
    cov: Vec<T>,
}

impl<T: Scalar> FiniteGaussian<T> {
    /// Validates symmetry and positive semidefiniteness (eigenvalues down to
    /// `−1e-8` relative to the largest variance).
    pub fn new(points: Vec<T>, cov: Vec<T>) -> Result<Self> {
        let n = points.len();
        if cov.len() != n * n {
            return Err(Error::Shape(format!(
                "{} points but {} covariance entries",
                n,
                cov.len()
            )));
        }
        let scale = (0..n)
            .map(|i| Float::abs(cov[i * n + i]).as_f64())
            .fold(0.0, f64::max)
            .max(1.0);
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (cov[i * n + j].as_f64(), cov[j * n + i].as_f64());
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Shape(format!(
                        "covariance not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        if n > 0 {
            let min = min_eigenvalue(&cov, n)?;
            if min < -PSD_TOLERANCE * scale {
                return Err(Error::NotPsd(format!("minimum eigenvalue {min:e}")));
            }
        }
        Ok(Self { points, cov })
    }

    /// The process `spec` observed at `points`.
    pub fn from_spec(spec: &ProcessSpec<T>, points: Vec<T>) -> Result<Self> {
        let cov = spec.covariance_matrix(&points)?;
        Self::new(points, cov)
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn covariance(&self) -> &[T] {
        &self.cov
    }

    /// `‖X_i − X_j‖₂²`.
    pub fn increment_sq(&self, i: usize, j: usize) -> f64 {
        let n = self.dim();
        let c = |a: usize, b: usize| self.cov[a * n + b].as_f64();
        (c(i, i) + c(j, j) - 2.0 * c(i, j)).max(0.0)
    }
}

/// Sudakov minoration `√(log₂ n / (2π)) · min_{i≠j} ‖X_i − X_j‖₂`, a lower
/// bound on `E max_i X_i`.
pub fn sudakov_lower<T: Scalar>(fg: &FiniteGaussian<T>) -> Result<f64> {
    let n = fg.dim();
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 points, got {n}")));
    }
    let mut min_sq = f64::INFINITY;
    for i in 0..n {
        for j in 0..i {
            min_sq = min_sq.min(fg.increment_sq(i, j));
        }
    }
    Ok(((n as f64).log2() / (2.0 * PI)).sqrt() * min_sq.sqrt())
}

/// `√(max_{i,j} |a_ij − b_ij| · ln n)` with `a_ij`, `b_ij` the squared
/// increment norms: bounds `|E max X − E max Y|`.
pub fn chatterjee_diff_bound<T: Scalar>(
    a: &FiniteGaussian<T>,
    b: &FiniteGaussian<T>,
) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Shape(format!(
            "dimensions differ: {n} vs {}",
            b.dim()
        )));
    }
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 points, got {n}")));
    }
    let mut gamma: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            gamma = gamma.max((a.increment_sq(i, j) - b.increment_sq(i, j)).abs());
        }
    }
    Ok((gamma * (n as f64).ln()).sqrt())
}

/// Point sets `T₀, T₁, …` with `|T₀| = 1` and `|T_k| ≤ 2^{2^k}`, each kept
/// sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainingNets {
    levels: Vec<Vec<f64>>,
}

fn level_capacity(k: usize) -> f64 {
    2.0_f64.powf(2.0_f64.powi(k as i32))
}

impl ChainingNets {
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() || levels[0].len() != 1 {
            return Err(Error::Construction(
                "level 0 must hold exactly one point".into(),
            ));
        }
        let mut sorted = Vec::with_capacity(levels.len());
        for (k, mut level) in levels.into_iter().enumerate() {
            if level.iter().any(|t| !t.is_finite()) {
                return Err(Error::Construction(format!(
                    "level {k} contains a non-finite point"
                )));
            }
            level.sort_by(f64::total_cmp);
            level.dedup();
            if level.len() as f64 > level_capacity(k) {
                return Err(Error::Construction(format!(
                    "level {k} has {} points, more than 2^(2^{k}); deepen the nets",
                    level.len()
                )));
            }
            sorted.push(level);
        }
        Ok(Self { levels: sorted })
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn final_level(&self) -> &[f64] {
        &self.levels[self.levels.len() - 1]
    }

    /// Whether every level contains the previous one.
    pub fn is_nested(&self) -> bool {
        self.levels.windows(2).all(|w| {
            w[0].iter()
                .all(|t| w[1].binary_search_by(|x| x.total_cmp(t)).is_ok())
        })
    }
}

/// `T₀ = {½}` and `T_k = {j 2^{−2^k} : 1 ≤ j ≤ 2^{2^k}}` for `k ≤ depth`. If
/// `extra` is given, one more level `T_depth ∪ extra` is appended; it must
/// respect the cardinality bound of its index.
pub fn dyadic_nets(depth: usize, extra: Option<&[f64]>) -> Result<ChainingNets> {
    if depth > MAX_NET_DEPTH {
        return Err(Error::Construction(format!(
            "depth {depth} exceeds the largest materializable depth {MAX_NET_DEPTH}"
        )));
    }
    let mut levels = vec![vec![0.5]];
    for k in 1..=depth {
        let size = 1usize << (1usize << k);
        let step = 1.0 / size as f64;
        levels.push((1..=size).map(|j| j as f64 * step).collect());
    }
    if let Some(extra) = extra {
        if let Some(bad) = extra.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Construction(format!(
                "extra point {bad} is outside [0, 1]"
            )));
        }
        let mut last = levels[depth].clone();
        last.extend_from_slice(extra);
        levels.push(last);
    }
    ChainingNets::new(levels)
}

/// Chaining bound `L max_{t ∈ T} Σ_k 2^{k/2} min_{s ∈ T_k} d(t, s)` over the
/// final level `T`, for an increment norm `d(t, s) = ‖X_t − X_s‖₂`.
///
/// Levels that contain `t` contribute nothing, so only the coarser levels
/// are scanned for each point.
pub fn chaining_upper<D>(increment_norm: D, nets: &ChainingNets, l: f64) -> f64
where
    D: Fn(f64, f64) -> f64 + Sync,
{
    let levels = nets.levels();
    nets.final_level()
        .par_iter()
        .map(|&t| {
            levels
                .iter()
                .enumerate()
                .map(|(k, level)| {
                    if level.binary_search_by(|x| x.total_cmp(&t)).is_ok() {
                        return 0.0;
                    }
                    let nearest = level
                        .iter()
                        .map(|&s| increment_norm(t, s))
                        .fold(f64::INFINITY, f64::min);
                    2.0_f64.powf(k as f64 / 2.0) * nearest
                })
                .sum::<f64>()
        })
        .reduce(|| 0.0, f64::max)
        * l
}

/// `L Σ_{k=0}^{depth} 2^{k/2} 2^{−H 2^k}`: the chaining bound for fBm on
/// dyadic nets, term by term. `depth = None` sums the whole series.
pub fn dyadic_chaining_majorant(hurst: f64, l: f64, depth: Option<usize>) -> f64 {
    let mut total = 0.0;
    for k in 0..=depth.unwrap_or(usize::MAX) {
        let term = 2.0_f64.powf(k as f64 / 2.0 - hurst * 2.0_f64.powi(k.min(1023) as i32));
        total += term;
        if depth.is_none() && (term < 1e-17 * total || k > 64) {
            break;
        }
    }
    l * total
}

/// Mills-ratio tail bound `(σ/(x√(2π))) e^{−x²/(2σ²)} ≥ P(ξ ≥ x)` for
/// `ξ ~ N(0, σ²)`.
pub fn mills_tail_bound(x: f64, sigma: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("x", x, "(0, ∞)"));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma", sigma, "(0, ∞)"));
    }
    Ok(sigma / (x * (2.0 * PI).sqrt()) * (-x * x / (2.0 * sigma * sigma)).exp())
}
