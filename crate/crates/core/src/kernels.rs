//! Covariance kernels for fBm and its relatives, L² increment norms, and
//! grid certification of two-sided Hölder bounds on those norms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac_calculus::{wiener_kernels, GridFunction};
use crate::numeric::{check_half_open_unit, check_open_unit, check_positive};
use crate::scalar::{lit, Scalar};

/// Radicands of increment variances more negative than this are reported as
/// an internal-consistency error instead of being clamped.
pub const NEGATIVE_RADICAND_TOLERANCE: f64 = 1e-12;

/// Relative slack applied when comparing increment ratios to certificate
/// constants, so that exact identities survive rounding.
pub const CERTIFY_RELATIVE_SLACK: f64 = 1e-9;

/// Default quadrature resolution for Fredholm and Wiener-integral kernels.
pub const DEFAULT_KERNEL_RESOLUTION: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "FBM")]
    Fbm,
    #[serde(rename = "SUBFBM")]
    SubFbm,
    #[serde(rename = "BIFBM")]
    BiFbm,
    #[serde(rename = "FREDHOLM")]
    Fredholm,
    #[serde(rename = "WIENER_INTEGRAL")]
    WienerIntegral,
}

/// Values of a Fredholm kernel `𝒦(t, u)` on the uniform grid
/// `{i/(size-1)}²`, stored row-major (`t` varies slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct FredholmKernel<T> {
    size: usize,
    values: Vec<T>,
}

impl<T: Scalar> FredholmKernel<T> {
    pub fn new(size: usize, values: Vec<T>) -> Result<Self> {
        if size < 2 {
            return Err(Error::Shape(format!(
                "kernel grid needs at least 2 points per axis, got {size}"
            )));
        }
        if values.len() != size * size {
            return Err(Error::Shape(format!(
                "kernel grid of size {size} needs {} values, got {}",
                size * size,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "kernel value #{bad} is not finite"
            )));
        }
        Ok(Self { size, values })
    }

    /// Samples `kernel(t, u)` on a `size × size` grid.
    pub fn from_fn(size: usize, kernel: impl Fn(T, T) -> T) -> Result<Self> {
        let step = T::one() / T::from_usize_lossy(size.saturating_sub(1).max(1));
        let mut values = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                values.push(kernel(
                    T::from_usize_lossy(i) * step,
                    T::from_usize_lossy(j) * step,
                ));
            }
        }
        Self::new(size, values)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, t_idx: usize) -> &[T] {
        &self.values[t_idx * self.size..(t_idx + 1) * self.size]
    }

    fn step(&self) -> T {
        T::one() / T::from_usize_lossy(self.size - 1)
    }

    /// Kernel row at an arbitrary `t ∈ [0, 1]`, linearly interpolated in `t`.
    fn row_at(&self, t: T) -> Vec<T> {
        let pos = t / self.step();
        let lo = pos.floor().to_usize().unwrap_or(0).min(self.size - 1);
        let w = pos - T::from_usize_lossy(lo);
        if lo == self.size - 1 || w == T::zero() {
            return self.row(lo).to_vec();
        }
        self.row(lo)
            .iter()
            .zip(self.row(lo + 1))
            .map(|(&a, &b)| a + w * (b - a))
            .collect()
    }

    fn trapezoid(&self, f: impl Fn(usize) -> T) -> T {
        let last = self.size - 1;
        let mut acc = lit::<T>(0.5) * (f(0) + f(last));
        for j in 1..last {
            acc += f(j);
        }
        acc * self.step()
    }

    /// Loads a kernel from CSV with header `t,s,value`, rows in row-major
    /// order over a uniform square grid on `[0, 1]²`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path.as_ref())?;
        let headers = reader.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["t", "s", "value"] {
            return Err(Error::Shape(format!(
                "expected header `t,s,value`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut records: Vec<(f64, f64, f64)> = Vec::new();
        for row in reader.deserialize() {
            records.push(row?);
        }
        let size = (records.len() as f64).sqrt().round() as usize;
        if size * size != records.len() {
            return Err(Error::Shape(format!(
                "{} rows do not form a square grid",
                records.len()
            )));
        }
        let step = 1.0 / (size.max(2) - 1) as f64;
        for (k, &(t, s, _)) in records.iter().enumerate() {
            let (i, j) = (k / size, k % size);
            if (t - i as f64 * step).abs() > 1e-9 || (s - j as f64 * step).abs() > 1e-9 {
                return Err(Error::Shape(format!(
                    "row {k}: ({t}, {s}) is not grid point ({}, {}) of a uniform row-major grid",
                    i as f64 * step,
                    j as f64 * step
                )));
            }
        }
        Self::new(size, records.into_iter().map(|r| T::lit(r.2)).collect())
    }

    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path.as_ref())?;
        writer.write_record(["t", "s", "value"])?;
        let step = self.step().as_f64();
        for i in 0..self.size {
            for j in 0..self.size {
                let v = self.values[i * self.size + j].as_f64();
                writer.serialize((i as f64 * step, j as f64 * step, v))?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

/// Trapezoidal approximation of `∫₀¹ (𝒦(t,u) − 𝒦(s,u))² du` for grid rows
/// `t_idx`, `s_idx`.
pub fn fredholm_increment_sq<T: Scalar>(
    kernel: &FredholmKernel<T>,
    t_idx: usize,
    s_idx: usize,
) -> Result<T> {
    if t_idx >= kernel.size || s_idx >= kernel.size {
        return Err(Error::Shape(format!(
            "indices ({t_idx}, {s_idx}) outside a kernel grid of size {}",
            kernel.size
        )));
    }
    let (a, b) = (kernel.row(t_idx), kernel.row(s_idx));
    Ok(kernel.trapezoid(|j| (a[j] - b[j]) * (a[j] - b[j])))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessKind<T> {
    Fbm {
        hurst: T,
    },
    SubFbm {
        hurst: T,
    },
    BiFbm {
        hurst: T,
        k: T,
    },
    Fredholm {
        kernel: FredholmKernel<T>,
    },
    WienerIntegral {
        integrand: GridFunction<T>,
        hurst: T,
    },
}

/// A zero-mean Gaussian process on `[0, 1]`, scaled by `C > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSpec<T> {
    kind: ProcessKind<T>,
    scale: T,
}

impl<T: Scalar> ProcessSpec<T> {
    /// Fractional Brownian motion, `H ∈ (0, 1]`.
    pub fn fbm(hurst: T) -> Result<Self> {
        check_half_open_unit("H", hurst.as_f64())?;
        Ok(Self::unscaled(ProcessKind::Fbm { hurst }))
    }

    pub fn sub_fbm(hurst: T) -> Result<Self> {
        check_open_unit("H", hurst.as_f64())?;
        Ok(Self::unscaled(ProcessKind::SubFbm { hurst }))
    }

    pub fn bi_fbm(hurst: T, k: T) -> Result<Self> {
        check_open_unit("H", hurst.as_f64())?;
        check_half_open_unit("K", k.as_f64())?;
        Ok(Self::unscaled(ProcessKind::BiFbm { hurst, k }))
    }

    pub fn fredholm(kernel: FredholmKernel<T>) -> Self {
        Self::unscaled(ProcessKind::Fredholm { kernel })
    }

    /// `X_t = ∫₀ᵗ f dB^H` for a sampled integrand `f`.
    pub fn wiener_integral(integrand: GridFunction<T>, hurst: T) -> Result<Self> {
        check_open_unit("H", hurst.as_f64())?;
        Ok(Self::unscaled(ProcessKind::WienerIntegral {
            integrand,
            hurst,
        }))
    }

    pub fn with_scale(mut self, scale: T) -> Result<Self> {
        check_positive("C", scale.as_f64())?;
        self.scale = scale;
        Ok(self)
    }

    fn unscaled(kind: ProcessKind<T>) -> Self {
        Self {
            kind,
            scale: T::one(),
        }
    }

    pub fn kind(&self) -> &ProcessKind<T> {
        &self.kind
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn family(&self) -> Family {
        match self.kind {
            ProcessKind::Fbm { .. } => Family::Fbm,
            ProcessKind::SubFbm { .. } => Family::SubFbm,
            ProcessKind::BiFbm { .. } => Family::BiFbm,
            ProcessKind::Fredholm { .. } => Family::Fredholm,
            ProcessKind::WienerIntegral { .. } => Family::WienerIntegral,
        }
    }

    pub fn hurst(&self) -> Option<T> {
        match self.kind {
            ProcessKind::Fbm { hurst }
            | ProcessKind::SubFbm { hurst }
            | ProcessKind::BiFbm { hurst, .. }
            | ProcessKind::WienerIntegral { hurst, .. } => Some(hurst),
            ProcessKind::Fredholm { .. } => None,
        }
    }

    /// Covariance `E X_t X_s`.
    pub fn covariance(&self, t: T, s: T) -> Result<T> {
        check_time(t)?;
        check_time(s)?;
        let c2 = self.scale * self.scale;
        let base = match &self.kind {
            ProcessKind::Fbm { hurst } => fbm_cov(t, s, *hurst)?,
            ProcessKind::SubFbm { hurst } => subfbm_cov(t, s, *hurst)?,
            ProcessKind::BiFbm { hurst, k } => bifbm_cov(t, s, *hurst, *k)?,
            ProcessKind::Fredholm { kernel } => {
                let (a, b) = (kernel.row_at(t), kernel.row_at(s));
                kernel.trapezoid(|j| a[j] * b[j])
            }
            ProcessKind::WienerIntegral { .. } => {
                let m = self.covariance_matrix(&[t, s])?;
                return Ok(m[1]);
            }
        };
        Ok(c2 * base)
    }

    /// `‖X_t − X_s‖₂²`, using cancellation-free closed forms where they exist.
    pub fn increment_variance(&self, t: T, s: T) -> Result<T> {
        check_time(t)?;
        check_time(s)?;
        let c2 = self.scale * self.scale;
        let d = Float::abs(t - s);
        let two = lit::<T>(2.0);
        let base = match &self.kind {
            ProcessKind::Fbm { hurst } => d.powf(two * *hurst),
            ProcessKind::SubFbm { hurst } => {
                let p = two * *hurst;
                (t + s).powf(p) + d.powf(p) - two.powf(p - T::one()) * (t.powf(p) + s.powf(p))
            }
            ProcessKind::BiFbm { hurst, k } => {
                let p = two * *hurst;
                let pk = p * *k;
                t.powf(pk) + s.powf(pk)
                    - two.powf(T::one() - *k) * ((t.powf(p) + s.powf(p)).powf(*k) - d.powf(pk))
            }
            ProcessKind::Fredholm { kernel } => {
                let (a, b) = (kernel.row_at(t), kernel.row_at(s));
                kernel.trapezoid(|j| (a[j] - b[j]) * (a[j] - b[j]))
            }
            ProcessKind::WienerIntegral { .. } => {
                let m = self.covariance_matrix(&[t, s])?;
                m[0] + m[3] - two * m[1]
            }
        };
        Ok(c2 * base)
    }

    /// Covariance matrix on `times`, row-major.
    pub fn covariance_matrix(&self, times: &[T]) -> Result<Vec<T>> {
        for &t in times {
            check_time(t)?;
        }
        if let ProcessKind::WienerIntegral { integrand, hurst } = &self.kind {
            let c2 = self.scale * self.scale;
            let kernels = wiener_kernels(integrand, times, *hurst)?;
            let n = times.len();
            let mut out = vec![T::zero(); n * n];
            for i in 0..n {
                for j in i..n {
                    let v = c2 * T::lit(kernels[i].inner_product(&kernels[j])?);
                    out[i * n + j] = v;
                    out[j * n + i] = v;
                }
            }
            return Ok(out);
        }
        let n = times.len();
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.covariance(times[i], times[j])?;
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(out)
    }

    /// Matrix of increment norms `‖X_{t_i} − X_{t_j}‖₂`, row-major.
    pub fn increment_norm_matrix(&self, times: &[T]) -> Result<Vec<T>> {
        let n = times.len();
        let mut out = vec![T::zero(); n * n];
        if matches!(self.kind, ProcessKind::WienerIntegral { .. }) {
            let cov = self.covariance_matrix(times)?;
            for i in 0..n {
                for j in 0..i {
                    let var = cov[i * n + i] + cov[j * n + j] - lit::<T>(2.0) * cov[i * n + j];
                    let v = checked_sqrt(var, times[i], times[j])?;
                    out[i * n + j] = v;
                    out[j * n + i] = v;
                }
            }
            return Ok(out);
        }
        for i in 0..n {
            for j in 0..i {
                let v = checked_sqrt(
                    self.increment_variance(times[i], times[j])?,
                    times[i],
                    times[j],
                )?;
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Ok(out)
    }
}

use num_traits::Float;

fn check_time<T: Scalar>(t: T) -> Result<()> {
    let v = t.as_f64();
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::domain("t", v, "[0, 1]"))
    }
}

fn checked_sqrt<T: Scalar>(var: T, t: T, s: T) -> Result<T> {
    if var >= T::zero() {
        Ok(var.sqrt())
    } else if var.as_f64() >= -NEGATIVE_RADICAND_TOLERANCE {
        Ok(T::zero())
    } else {
        Err(Error::InternalConsistency(format!(
            "increment variance {} < 0 at (t, s) = ({t}, {s})",
            var.as_f64()
        )))
    }
}

/// fBm covariance `½(t^{2H} + s^{2H} − |t−s|^{2H})`.
pub fn fbm_cov<T: Scalar>(t: T, s: T, hurst: T) -> Result<T> {
    check_half_open_unit("H", hurst.as_f64())?;
    check_nonneg(t, s)?;
    let p = lit::<T>(2.0) * hurst;
    Ok(lit::<T>(0.5) * (t.powf(p) + s.powf(p) - Float::abs(t - s).powf(p)))
}

/// Sub-fractional Brownian motion covariance.
pub fn subfbm_cov<T: Scalar>(t: T, s: T, hurst: T) -> Result<T> {
    check_open_unit("H", hurst.as_f64())?;
    check_nonneg(t, s)?;
    let p = lit::<T>(2.0) * hurst;
    Ok(t.powf(p) + s.powf(p) - lit::<T>(0.5) * ((t + s).powf(p) + Float::abs(t - s).powf(p)))
}

/// Bi-fractional Brownian motion covariance
/// `2^{−K}((t^{2H} + s^{2H})^K − |t−s|^{2HK})`.
pub fn bifbm_cov<T: Scalar>(t: T, s: T, hurst: T, k: T) -> Result<T> {
    check_open_unit("H", hurst.as_f64())?;
    check_half_open_unit("K", k.as_f64())?;
    check_nonneg(t, s)?;
    let p = lit::<T>(2.0) * hurst;
    let two = lit::<T>(2.0);
    Ok(two.powf(-k) * ((t.powf(p) + s.powf(p)).powf(k) - Float::abs(t - s).powf(p * k)))
}

fn check_nonneg<T: Scalar>(t: T, s: T) -> Result<()> {
    if t < T::zero() || !t.is_finite() {
        return Err(Error::domain("t", t.as_f64(), "[0, ∞)"));
    }
    if s < T::zero() || !s.is_finite() {
        return Err(Error::domain("s", s.as_f64(), "[0, ∞)"));
    }
    Ok(())
}

/// `‖X_t − X_s‖₂` for `t, s ∈ [0, 1]`.
pub fn increment_l2<T: Scalar>(spec: &ProcessSpec<T>, t: T, s: T) -> Result<T> {
    if t == s {
        check_time(t)?;
        return Ok(T::zero());
    }
    checked_sqrt(spec.increment_variance(t, s)?, t, s)
}

/// Covariance of the white-noise-plus-common-variable limit of fBm as
/// `H → 0`: 0 if either time is 0, 1 on the diagonal, ½ otherwise.
pub fn limit_cov_h_to_0<T: Scalar>(t: T, s: T) -> T {
    if t == T::zero() || s == T::zero() {
        T::zero()
    } else if t == s {
        T::one()
    } else {
        lit(0.5)
    }
}

/// Constants `(C₁, H₁, C₂, H₂)` of a two-sided Hölder bound
/// `C₁|t−s|^{H₁} ≤ ‖X_t − X_s‖₂ ≤ C₂|t−s|^{H₂}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderConstants<T> {
    pub c1: T,
    pub h1: T,
    pub c2: T,
    pub h2: T,
}

impl<T: Scalar> HolderConstants<T> {
    pub fn new(c1: T, h1: T, c2: T, h2: T) -> Result<Self> {
        check_positive("C1", c1.as_f64())?;
        check_positive("H1", h1.as_f64())?;
        check_positive("C2", c2.as_f64())?;
        check_positive("H2", h2.as_f64())?;
        Ok(Self { c1, h1, c2, h2 })
    }

    /// Both sides with the same constant and exponent.
    pub fn helix(c: T, h: T) -> Result<Self> {
        Self::new(c, h, c, h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderWitness<T> {
    pub t: T,
    pub s: T,
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCertificate<T> {
    #[serde(rename = "C1")]
    pub c1: T,
    #[serde(rename = "H1")]
    pub h1: T,
    #[serde(rename = "C2")]
    pub c2: T,
    #[serde(rename = "H2")]
    pub h2: T,
    pub grid_size: usize,
    pub passed: bool,
    pub lower_passed: bool,
    pub upper_passed: bool,
    /// Pair minimising `‖X_t − X_s‖₂ / |t−s|^{H₁}`.
    pub worst_lower_pair: HolderWitness<T>,
    /// Pair maximising `‖X_t − X_s‖₂ / |t−s|^{H₂}`.
    pub worst_upper_pair: HolderWitness<T>,
}

/// Checks both Hölder inequalities on every pair of the uniform grid
/// `{i/(grid_size−1)}` and records the extreme ratios.
pub fn certify_quasihelix<T: Scalar>(
    spec: &ProcessSpec<T>,
    constants: HolderConstants<T>,
    grid_size: usize,
) -> Result<HolderCertificate<T>> {
    if grid_size < 2 {
        return Err(Error::Parameter(format!(
            "grid_size must be at least 2, got {grid_size}"
        )));
    }
    let step = T::one() / T::from_usize_lossy(grid_size - 1);
    let times: Vec<T> = (0..grid_size)
        .map(|i| T::from_usize_lossy(i) * step)
        .collect();
    let norms = spec.increment_norm_matrix(&times)?;

    let mut lower = HolderWitness {
        t: T::zero(),
        s: T::zero(),
        ratio: T::infinity(),
    };
    let mut upper = HolderWitness {
        t: T::zero(),
        s: T::zero(),
        ratio: T::neg_infinity(),
    };
    for i in 0..grid_size {
        for j in 0..i {
            let d = times[i] - times[j];
            let norm = norms[i * grid_size + j];
            let lo = norm / d.powf(constants.h1);
            let hi = norm / d.powf(constants.h2);
            if lo < lower.ratio {
                lower = HolderWitness {
                    t: times[i],
                    s: times[j],
                    ratio: lo,
                };
            }
            if hi > upper.ratio {
                upper = HolderWitness {
                    t: times[i],
                    s: times[j],
                    ratio: hi,
                };
            }
        }
    }
    let slack = lit::<T>(CERTIFY_RELATIVE_SLACK);
    let lower_passed = lower.ratio >= constants.c1 * (T::one() - slack);
    let upper_passed = upper.ratio <= constants.c2 * (T::one() + slack);
    Ok(HolderCertificate {
        c1: constants.c1,
        h1: constants.h1,
        c2: constants.c2,
        h2: constants.h2,
        grid_size,
        passed: lower_passed && upper_passed,
        lower_passed,
        upper_passed,
        worst_lower_pair: lower,
        worst_upper_pair: upper,
    })
}

/// On-disk description of a [`ProcessSpec`]; kernels and integrands live in
/// companion CSV files referenced by path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ProcessSpecFile {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub H: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub K: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub C: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand_file: Option<String>,
}

impl ProcessSpecFile {
    pub fn fbm(hurst: f64) -> Self {
        Self {
            family: Family::Fbm,
            H: Some(hurst),
            K: None,
            C: None,
            kernel_file: None,
            integrand_file: None,
        }
    }

    /// Builds the in-memory spec; relative file paths resolve against `base_dir`.
    pub fn resolve<T: Scalar>(&self, base_dir: &Path) -> Result<ProcessSpec<T>> {
        let hurst = || {
            self.H
                .map(T::lit)
                .ok_or_else(|| Error::Parameter(format!("{:?} spec requires `H`", self.family)))
        };
        let spec = match self.family {
            Family::Fbm => ProcessSpec::fbm(hurst()?)?,
            Family::SubFbm => ProcessSpec::sub_fbm(hurst()?)?,
            Family::BiFbm => {
                let k = self
                    .K
                    .ok_or_else(|| Error::Parameter("BIFBM spec requires `K`".into()))?;
                ProcessSpec::bi_fbm(hurst()?, T::lit(k))?
            }
            Family::Fredholm => {
                let file = self.kernel_file.as_ref().ok_or_else(|| {
                    Error::Parameter("FREDHOLM spec requires `kernel_file`".into())
                })?;
                ProcessSpec::fredholm(FredholmKernel::from_csv(base_dir.join(file))?)
            }
            Family::WienerIntegral => {
                let file = self.integrand_file.as_ref().ok_or_else(|| {
                    Error::Parameter("WIENER_INTEGRAL spec requires `integrand_file`".into())
                })?;
                ProcessSpec::wiener_integral(
                    GridFunction::from_csv(base_dir.join(file))?,
                    hurst()?,
                )?
            }
        };
        match self.C {
            Some(c) => spec.with_scale(T::lit(c)),
            None => Ok(spec),
        }
    }

    /// Reads a JSON spec file and resolves companion files next to it.
    pub fn load<T: Scalar>(path: impl AsRef<Path>) -> Result<ProcessSpec<T>> {
        let path = path.as_ref();
        let file: ProcessSpecFile = serde_json::from_reader(std::fs::File::open(path)?)?;
        file.resolve(path.parent().unwrap_or_else(|| Path::new(".")))
    }

    /// Describes an in-memory spec; kernel and integrand data are not
    /// embedded, so their file fields are left empty.
    pub fn describe<T: Scalar>(spec: &ProcessSpec<T>) -> Self {
        let (h, k) = match spec.kind() {
            ProcessKind::BiFbm { hurst, k } => (Some(hurst.as_f64()), Some(k.as_f64())),
            _ => (spec.hurst().map(|h| h.as_f64()), None),
        };
        Self {
            family: spec.family(),
            H: h,
            K: k,
            C: Some(spec.scale().as_f64()),
            kernel_file: None,
            integrand_file: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fbm_cov_examples() {
        for h in [0.1, 0.5, 0.9, 1.0] {
            assert!(close(fbm_cov(1.0, 1.0, h).unwrap(), 1.0, 1e-15));
        }
        for (t, s) in [(0.3, 0.7), (0.9, 0.2), (0.5, 0.5)] {
            assert!(close(fbm_cov(t, s, 0.5).unwrap(), f64::min(t, s), 1e-15));
        }
        assert!(close(
            fbm_cov(0.5, 0.25, 0.75).unwrap(),
            0.176_776_695_296_636_9,
            1e-12
        ));
        assert!(fbm_cov(0.5, 0.5, 0.0).is_err());
        assert!(fbm_cov(0.5, 0.5, 1.2).is_err());
        assert!(fbm_cov(-0.1, 0.5, 0.5).is_err());
    }

    #[test]
    fn subfbm_cov_examples() {
        assert!(close(subfbm_cov(0.3, 0.8, 0.5).unwrap(), 0.3, 1e-15));
        assert!(close(
            subfbm_cov(1.0, 1.0, 0.75).unwrap(),
            0.585_786_437_626_904_9,
            1e-12
        ));
        assert_eq!(subfbm_cov(0.0, 0.4, 0.3).unwrap(), 0.0);
        assert!(subfbm_cov(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn bifbm_cov_examples() {
        for (t, s) in [(0.3, 0.7), (0.9, 0.2)] {
            let a = bifbm_cov(t, s, 0.35, 1.0).unwrap();
            let b = fbm_cov(t, s, 0.35).unwrap();
            assert!(close(a, b, 1e-14));
        }
        assert!(close(bifbm_cov(1.0, 1.0, 0.4, 0.3).unwrap(), 1.0, 1e-14));
        // direct evaluation 2^{-1/2} (2 · 0.5^{0.6})^{1/2} = 0.5^{0.3}
        assert!(close(
            bifbm_cov(0.5, 0.5, 0.3, 0.5).unwrap(),
            0.812_252_396_356_235_5,
            1e-12
        ));
        assert!(bifbm_cov(0.5, 0.5, 0.3, 0.0).is_err());
    }

    #[test]
    fn increment_examples() {
        let fbm = ProcessSpec::fbm(0.3).unwrap();
        assert!(close(
            increment_l2(&fbm, 0.8, 0.1).unwrap(),
            0.7_f64.powf(0.3),
            1e-14
        ));
        assert_eq!(increment_l2(&fbm, 0.4, 0.4).unwrap(), 0.0);
        let sub = ProcessSpec::sub_fbm(0.75).unwrap();
        assert!(close(
            increment_l2(&sub, 1.0, 0.0).unwrap(),
            0.765_366_864_730_179_5,
            1e-12
        ));
        let scaled = ProcessSpec::fbm(0.5).unwrap().with_scale(2.0).unwrap();
        assert!(close(increment_l2(&scaled, 0.5, 0.25).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn closed_form_increments_match_covariance_route() {
        let specs = [
            ProcessSpec::sub_fbm(0.3).unwrap(),
            ProcessSpec::bi_fbm(0.7, 0.4).unwrap(),
            ProcessSpec::fbm(0.2).unwrap(),
        ];
        for spec in &specs {
            for (t, s) in [(0.1, 0.9), (0.45, 0.5), (1.0, 0.0)] {
                let via_cov = spec.covariance(t, t).unwrap() + spec.covariance(s, s).unwrap()
                    - 2.0 * spec.covariance(t, s).unwrap();
                assert!(close(
                    spec.increment_variance(t, s).unwrap(),
                    via_cov,
                    1e-13
                ));
            }
        }
    }

    #[test]
    fn white_noise_limit_values() {
        assert_eq!(limit_cov_h_to_0(0.0, 1.0), 0.0);
        assert_eq!(limit_cov_h_to_0(0.3, 0.7), 0.5);
        assert_eq!(limit_cov_h_to_0(0.3, 0.3), 1.0);
    }

    #[test]
    fn fbm_covariance_tends_to_white_noise_limit() {
        let grid: Vec<f64> = (1..=16).map(|i| i as f64 / 16.0).collect();
        let worst = |h: f64| {
            let mut w: f64 = 0.0;
            for &t in &grid {
                for &s in &grid {
                    if t != s {
                        w = w.max((fbm_cov(t, s, h).unwrap() - limit_cov_h_to_0(t, s)).abs());
                    }
                }
            }
            w
        };
        let (a, b, c) = (worst(0.1), worst(0.01), worst(0.001));
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!(c < 0.01);
        // diagonal and time-zero entries converge as well
        assert!((fbm_cov(0.3, 0.3, 0.001).unwrap() - 1.0).abs() < 0.01);
        assert_eq!(fbm_cov(0.0, 0.3, 0.001).unwrap(), 0.0);
    }

    #[test]
    fn certificates_with_known_constants() {
        let fbm = ProcessSpec::fbm(0.4).unwrap();
        let cert =
            certify_quasihelix(&fbm, HolderConstants::helix(1.0, 0.4).unwrap(), 257).unwrap();
        assert!(cert.passed);
        assert!(close(cert.worst_lower_pair.ratio, 1.0, 1e-12));

        for h in [0.2, 0.6, 0.9] {
            let sub = ProcessSpec::sub_fbm(h).unwrap();
            let r = (2.0 - 2.0_f64.powf(2.0 * h - 1.0)).sqrt();
            let consts = HolderConstants::new(r.min(1.0), h, r.max(1.0), h).unwrap();
            let cert = certify_quasihelix(&sub, consts, 257).unwrap();
            assert!(cert.passed, "sub-fBm H={h}: {cert:?}");

            // constants 1 and sqrt(2 - 2^{H-1}) as often quoted; valid only up to H = 1/2
            let quoted =
                HolderConstants::new(1.0, h, (2.0 - 2.0_f64.powf(h - 1.0)).sqrt(), h).unwrap();
            let cert = certify_quasihelix(&sub, quoted, 257).unwrap();
            assert_eq!(cert.passed, h <= 0.5, "sub-fBm H={h}: {cert:?}");

            for k in [0.3, 0.7, 1.0] {
                let bi = ProcessSpec::bi_fbm(h, k).unwrap();
                let consts = HolderConstants::new(
                    2.0_f64.powf(-k / 2.0),
                    h * k,
                    2.0_f64.powf((1.0 - k) / 2.0),
                    h * k,
                )
                .unwrap();
                let cert = certify_quasihelix(&bi, consts, 257).unwrap();
                assert!(cert.passed, "bi-fBm H={h} K={k}: {cert:?}");
            }
        }
    }

    #[test]
    fn violated_upper_constant_fails_with_witness() {
        let sub = ProcessSpec::sub_fbm(0.6).unwrap();
        let cert = certify_quasihelix(&sub, HolderConstants::new(1.0, 0.6, 0.9, 0.6).unwrap(), 65)
            .unwrap();
        assert!(!cert.passed);
        assert!(!cert.upper_passed);
        assert!(cert.worst_upper_pair.ratio > 0.9);
        assert!(cert.worst_upper_pair.t != cert.worst_upper_pair.s);
    }

    #[test]
    fn brownian_volterra_kernel_increments() {
        let kernel =
            FredholmKernel::<f64>::from_fn(101, |t, u| if u < t { 1.0 } else { 0.0 }).unwrap();
        for (i, j) in [(10, 40), (100, 0), (55, 54)] {
            let got = fredholm_increment_sq(&kernel, i, j).unwrap();
            // the indicator drops at u = t, so the trapezoid is exact up to half a cell
            assert!(
                close(got, (i as f64 - j as f64).abs() / 100.0, 0.005 + 1e-12),
                "{i},{j}: {got}"
            );
        }
        assert_eq!(fredholm_increment_sq(&kernel, 7, 7).unwrap(), 0.0);
        assert!(fredholm_increment_sq(&kernel, 101, 0).is_err());

        let product = FredholmKernel::<f64>::from_fn(101, |t, u| t * u).unwrap();
        let got = fredholm_increment_sq(&product, 100, 0).unwrap();
        // trapezoid of u² on 100 cells: 1/3 + h²/6
        assert!(close(got, 1.0 / 3.0, 2e-5));
    }

    #[test]
    fn fredholm_kernel_rejects_bad_shapes() {
        assert!(FredholmKernel::<f64>::new(3, vec![0.0; 8]).is_err());
        assert!(FredholmKernel::<f64>::new(1, vec![0.0]).is_err());
    }

    #[test]
    fn spec_constructors_validate_domains() {
        assert!(ProcessSpec::<f64>::fbm(1.0).is_ok());
        assert!(ProcessSpec::<f64>::sub_fbm(1.0).is_err());
        assert!(ProcessSpec::<f64>::bi_fbm(0.5, 1.5).is_err());
        assert!(ProcessSpec::<f64>::fbm(0.5)
            .unwrap()
            .with_scale(0.0)
            .is_err());
    }

    #[test]
    fn spec_file_uses_exact_field_names() {
        let json = serde_json::to_string(&ProcessSpecFile {
            family: Family::BiFbm,
            H: Some(0.3),
            K: Some(0.5),
            C: Some(1.0),
            kernel_file: None,
            integrand_file: None,
        })
        .unwrap();
        assert_eq!(json, r#"{"family":"BIFBM","H":0.3,"K":0.5,"C":1.0}"#);
        let parsed: ProcessSpecFile =
            serde_json::from_str(r#"{"family":"SUBFBM","H":0.25,"K":null,"C":2.0,"kernel_file":null,"integrand_file":null}"#)
                .unwrap();
        let spec: ProcessSpec<f64> = parsed.resolve(Path::new(".")).unwrap();
        assert_eq!(spec.family(), Family::SubFbm);
        assert_eq!(spec.scale(), 2.0);
    }

    #[test]
    fn generic_over_f32() {
        let v: f32 = fbm_cov(0.5_f32, 0.25, 0.75).unwrap();
        assert!((v - 0.176_776_7).abs() < 1e-6);
    }
}
