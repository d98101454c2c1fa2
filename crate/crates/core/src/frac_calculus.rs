//! Right-sided Riemann–Liouville operators on uniformly sampled functions,
//! the `K^H` transfer operator, and Wiener integrals with respect to fBm.
//!
//! Everything here runs internally in `f64`; results are converted to the
//! caller's scalar type at the boundary.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::{check_open_unit, check_positive, gamma};
use crate::scalar::Scalar;

/// Resolution that integrands are refined to before building Wiener kernels.
pub const DEFAULT_WIENER_RESOLUTION: usize = 1024;

/// Smallest support (in cells) the product quadrature for kernel inner
/// products accepts; coarser supports are refined first.
const MIN_SUPPORT_CELLS: usize = 4;

/// A function sampled on `{i/q : i = 0..=q}`, optionally with derivative
/// samples.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    values: Vec<T>,
    derivative: Option<Vec<T>>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Shape(format!(
                "grid function needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("sample #{i} is not finite")));
        }
        Ok(Self {
            values,
            derivative: None,
        })
    }

    pub fn with_derivative(mut self, derivative: Vec<T>) -> Result<Self> {
        if derivative.len() != self.values.len() {
            return Err(Error::Shape(format!(
                "{} derivative samples for {} values",
                derivative.len(),
                self.values.len()
            )));
        }
        if let Some(i) = derivative.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "derivative sample #{i} is not finite"
            )));
        }
        self.derivative = Some(derivative);
        Ok(self)
    }

    pub fn from_fn(q: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let step = T::one() / T::from_usize_lossy(q.max(1));
        Self::new((0..=q).map(|i| f(T::from_usize_lossy(i) * step)).collect())
    }

    pub fn from_fn_with_derivative(
        q: usize,
        f: impl Fn(T) -> T,
        df: impl Fn(T) -> T,
    ) -> Result<Self> {
        let step = T::one() / T::from_usize_lossy(q.max(1));
        let derivative = (0..=q).map(|i| df(T::from_usize_lossy(i) * step)).collect();
        Self::from_fn(q, f)?.with_derivative(derivative)
    }

    pub fn constant(q: usize, c: T) -> Result<Self> {
        Self::new(vec![c; q + 1])?.with_derivative(vec![T::zero(); q + 1])
    }

    /// Samples of `1_{[0, t)}` with `t = t_idx/q`; the value at `t` itself is 0.
    pub fn indicator(q: usize, t_idx: usize) -> Result<Self> {
        if t_idx > q {
            return Err(Error::Parameter(format!(
                "index {t_idx} outside a grid of resolution {q}"
            )));
        }
        Self::new(
            (0..=q)
                .map(|i| if i < t_idx { T::one() } else { T::zero() })
                .collect(),
        )
    }

    /// Number of cells `q`.
    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> T {
        T::one() / T::from_usize_lossy(self.resolution())
    }

    pub fn t(&self, i: usize) -> T {
        T::from_usize_lossy(i) * self.step()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn derivative(&self) -> Option<&[T]> {
        self.derivative.as_deref()
    }

    /// Index of the grid point equal to `t`.
    pub fn index_of(&self, t: T) -> Result<usize> {
        grid_index(t.as_f64(), self.resolution())
    }

    /// Piecewise-linear refinement by an integer factor.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Parameter(
                "refinement factor must be positive".into(),
            ));
        }
        let lerp = |xs: &[T]| -> Vec<T> {
            let mut out = Vec::with_capacity((xs.len() - 1) * factor + 1);
            for w in xs.windows(2) {
                for k in 0..factor {
                    let frac = T::from_usize_lossy(k) / T::from_usize_lossy(factor);
                    out.push(w[0] + frac * (w[1] - w[0]));
                }
            }
            out.push(xs[xs.len() - 1]);
            out
        };
        let mut refined = Self::new(lerp(&self.values))?;
        if let Some(d) = &self.derivative {
            refined = refined.with_derivative(lerp(d))?;
        }
        Ok(refined)
    }

    /// Loads CSV with header `t,value` or `t,value,derivative` on a uniform grid.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path.as_ref())?;
        let headers: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().to_owned())
            .collect();
        let with_derivative = match headers.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["t", "value"] => false,
            ["t", "value", "derivative"] => true,
            _ => {
                return Err(Error::Shape(format!(
                    "expected header `t,value[,derivative]`, got `{}`",
                    headers.join(",")
                )))
            }
        };
        let (mut ts, mut vs, mut ds) = (Vec::new(), Vec::new(), Vec::new());
        for record in reader.records() {
            let record = record?;
            let row = ts.len() + 1;
            let field = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::Parameter(format!("bad number in column {k} of row {row}"))
                    })
            };
            ts.push(field(0)?);
            vs.push(T::lit(field(1)?));
            if with_derivative {
                ds.push(T::lit(field(2)?));
            }
        }
        if ts.len() < 2 {
            return Err(Error::Shape("grid function needs at least 2 rows".into()));
        }
        let q = ts.len() - 1;
        for (i, &t) in ts.iter().enumerate() {
            if (t - i as f64 / q as f64).abs() > 1e-9 {
                return Err(Error::Shape(format!(
                    "row {i}: t = {t} is not on the uniform grid of [0, 1]"
                )));
            }
        }
        let f = Self::new(vs)?;
        if with_derivative {
            f.with_derivative(ds)
        } else {
            Ok(f)
        }
    }

    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path.as_ref())?;
        match &self.derivative {
            Some(d) => {
                writer.write_record(["t", "value", "derivative"])?;
                for (i, (v, dv)) in self.values.iter().zip(d).enumerate() {
                    writer.serialize((self.t(i).as_f64(), v.as_f64(), dv.as_f64()))?;
                }
            }
            None => {
                writer.write_record(["t", "value"])?;
                for (i, v) in self.values.iter().enumerate() {
                    writer.serialize((self.t(i).as_f64(), v.as_f64()))?;
                }
            }
        }
        writer.flush()?;
        Ok(())
    }

    fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.as_f64()).collect()
    }
}

fn grid_index(t: f64, q: usize) -> Result<usize> {
    let pos = t * q as f64;
    let idx = pos.round();
    if !(0.0..=q as f64).contains(&idx) || (pos - idx).abs() > 1e-9 * q.max(1) as f64 {
        return Err(Error::Parameter(format!(
            "t = {t} is not a point of the grid with {q} cells"
        )));
    }
    Ok(idx as usize)
}

/// Product-integration weights for `∫ φ(u_j + w) w^{a−1} dw` over cells
/// `[m d, (m+1) d]` with `φ` linear on each cell: `(left, right)` coefficients
/// multiply `φ` at the cell's left and right nodes.
fn product_weights(a: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    let d = 1.0 / q as f64;
    let mut left = Vec::with_capacity(q);
    let mut right = Vec::with_capacity(q);
    for m in 0..q {
        let (lo, hi) = (m as f64 * d, (m + 1) as f64 * d);
        let i0 = (hi.powf(a) - lo.powf(a)) / a;
        let i1 = (hi.powf(a + 1.0) - lo.powf(a + 1.0)) / (a + 1.0);
        let r = (i1 - lo * i0) / d;
        left.push(i0 - r);
        right.push(r);
    }
    (left, right)
}

/// `Γ(a) · I^a_{1−}φ(u_j)` for `φ` piecewise linear on nodes `j..=end`,
/// integrating over `[u_j, u_end]`.
fn weighted_tail(phi: &[f64], j: usize, end: usize, left: &[f64], right: &[f64]) -> f64 {
    (0..end - j)
        .map(|m| left[m] * phi[j + m] + right[m] * phi[j + m + 1])
        .sum()
}

fn check_alpha(alpha: f64, lo: f64, hi: f64, domain: &'static str) -> Result<()> {
    if alpha > lo && alpha <= hi {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, domain))
    }
}

/// `(I^α_{1−} f)(t) = Γ(α)^{−1} ∫_t^1 f(s)(s−t)^{α−1} ds` for `α ∈ (0, 1]`,
/// integrating the piecewise-linear interpolant of `f` exactly against the
/// singular weight.
pub fn rl_integral_right<T: Scalar>(f: &GridFunction<T>, alpha: T, t: T) -> Result<T> {
    let a = alpha.as_f64();
    check_alpha(a, 0.0, 1.0, "(0, 1]")?;
    let q = f.resolution();
    let j = f.index_of(t)?;
    let (left, right) = product_weights(a, q);
    let phi = f.to_f64();
    Ok(T::lit(weighted_tail(&phi, j, q, &left, &right) / gamma(a)))
}

/// `I^α_{1−} f` at every grid node.
pub fn rl_integral_right_all<T: Scalar>(f: &GridFunction<T>, alpha: T) -> Result<GridFunction<T>> {
    let a = alpha.as_f64();
    check_alpha(a, 0.0, 1.0, "(0, 1]")?;
    let q = f.resolution();
    let (left, right) = product_weights(a, q);
    let phi = f.to_f64();
    let g = gamma(a);
    GridFunction::new(
        (0..=q)
            .map(|j| T::lit(weighted_tail(&phi, j, q, &left, &right) / g))
            .collect(),
    )
}

/// The order-zero operator, `f(t)`.
pub fn rl_identity<T: Scalar>(f: &GridFunction<T>, t: T) -> Result<T> {
    Ok(f.values[f.index_of(t)?])
}

/// `(I^α_{1−} f)(t) = −d/dt (I^{α+1}_{1−} f)(t)` for `α ∈ (−1, 0)`, by a
/// central difference with step equal to the grid spacing (one-sided at the
/// endpoints).
pub fn rl_derivative_right<T: Scalar>(f: &GridFunction<T>, alpha: T, t: T) -> Result<T> {
    let a = alpha.as_f64();
    if !(a > -1.0 && a < 0.0) {
        return Err(Error::domain("alpha", a, "(-1, 0)"));
    }
    let q = f.resolution();
    let j = f.index_of(t)?;
    let (left, right) = product_weights(a + 1.0, q);
    let phi = f.to_f64();
    let g = gamma(a + 1.0);
    let at = |k: usize| weighted_tail(&phi, k, q, &left, &right) / g;
    let d = 1.0 / q as f64;
    let (lo, hi) = (j.saturating_sub(1), (j + 1).min(q));
    Ok(T::lit(-(at(hi) - at(lo)) / ((hi - lo) as f64 * d)))
}

/// The constant `√(2H Γ(3/2−H) / (Γ(2−2H) Γ(H+1/2)))`.
pub fn normalizing_constant<T: Scalar>(hurst: T) -> Result<T> {
    let h = hurst.as_f64();
    check_open_unit("H", h)?;
    Ok(T::lit(
        (2.0 * h * gamma(1.5 - h) / (gamma(2.0 - 2.0 * h) * gamma(h + 0.5))).sqrt(),
    ))
}

/// Scale actually multiplying the fractional operator in `K^H`: the
/// normalizing constant times `Γ(H+1/2)`, which makes the transfer an
/// isometry onto the fBm covariance.
fn transfer_scale(h: f64) -> f64 {
    let c = (2.0 * h * gamma(1.5 - h) / (gamma(2.0 - 2.0 * h) * gamma(h + 0.5))).sqrt();
    c * gamma(h + 0.5)
}

/// `K^H` applied to `f · 1_{[0, u_end)}`, sampled on nodes `0..=end`.
///
/// Nodes where the result is singular (always `u = 0` unless `H = 1/2`, and
/// `u_end` when `H < 1/2`) are left as NaN; callers either extrapolate them
/// or replace them by cell means.
fn transfer(f: &[f64], end: usize, q: usize, h: f64) -> Vec<f64> {
    let d = 1.0 / q as f64;
    let u = |k: usize| k as f64 * d;
    let mut out = vec![f64::NAN; end + 1];
    if h == 0.5 {
        out.copy_from_slice(&f[..=end]);
        return out;
    }
    let scale = transfer_scale(h);
    if h > 0.5 {
        let a = h - 0.5;
        let (left, right) = product_weights(a, q);
        let phi: Vec<f64> = (0..=end).map(|k| u(k).powf(a) * f[k]).collect();
        let g = gamma(a);
        for j in 1..end {
            out[j] = scale * u(j).powf(-a) * weighted_tail(&phi, j, end, &left, &right) / g;
        }
        out[end] = 0.0;
    } else {
        // exact derivative of the piecewise-linear model, integrated by parts
        let a = h - 0.5;
        let phi: Vec<f64> = (0..=end)
            .map(|k| if k == 0 { 0.0 } else { u(k).powf(a) * f[k] })
            .collect();
        let moments: Vec<f64> = (0..end)
            .map(|m| {
                (((m + 1) as f64 * d).powf(a + 1.0) - (m as f64 * d).powf(a + 1.0)) / (a + 1.0)
            })
            .collect();
        let g = gamma(a + 1.0);
        let t = u(end);
        for j in 1..end {
            let mut acc = phi[end] * (t - u(j)).powf(a);
            for k in j..end {
                acc -= (phi[k + 1] - phi[k]) / d * moments[k - j];
            }
            out[j] = scale * u(j).powf(-a) * acc / g;
        }
    }
    out
}

/// `K^H` applied to an indicator-truncated integrand, with the quadrature
/// needed to form `L²` inner products despite endpoint singularities.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerKernel {
    hurst: f64,
    q: usize,
    end: usize,
    values: Vec<f64>,
}

impl WienerKernel {
    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Index of the right end of the support on the working grid.
    pub fn support_end(&self) -> usize {
        self.end
    }

    pub fn resolution(&self) -> usize {
        self.q
    }

    /// Samples on the full grid; singular endpoint nodes hold the kernel's
    /// mean over the adjacent half cell, nodes past the support hold 0.
    pub fn to_grid_function<T: Scalar>(&self) -> Result<GridFunction<T>> {
        let d = 1.0 / self.q as f64;
        let mut out = vec![0.0; self.q + 1];
        out[..=self.end].copy_from_slice(&self.values);
        if self.end >= 2 && self.hurst != 0.5 {
            let p = -(self.hurst - 0.5).abs();
            let c = self.values[1] / d.powf(p);
            out[0] = c * (0.5 * d).powf(p) / (p + 1.0);
            if self.hurst < 0.5 {
                let b = self.hurst - 0.5;
                let c = self.values[self.end - 1] / d.powf(b);
                out[self.end] = c * (0.5 * d).powf(b) / (b + 1.0);
            }
        }
        GridFunction::new(out.into_iter().map(T::lit).collect())
    }

    /// `∫₀¹ K_a(u) K_b(u) du` by product integration: the product is divided
    /// by its power-law behaviour at each end of the common support and the
    /// quotient integrated as a piecewise-linear function against the exact
    /// weight.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        if self.q != other.q || self.hurst != other.hurst {
            return Err(Error::Shape(format!(
                "kernels on different grids or exponents: ({}, {}) vs ({}, {})",
                self.q, self.hurst, other.q, other.hurst
            )));
        }
        let m = self.end.min(other.end);
        if m == 0 {
            return Ok(0.0);
        }
        if m < MIN_SUPPORT_CELLS {
            return Err(Error::Parameter(format!(
                "kernel support of {m} cells is too short for the product quadrature; refine the grid"
            )));
        }
        let h = self.hurst;
        let q = self.q;
        let d = 1.0 / q as f64;
        let u = |k: usize| k as f64 * d;
        let tm = u(m);
        let left_exp = -(2.0 * h - 1.0).abs();
        let right_exp = if h < 0.5 {
            (h - 0.5) * if self.end == other.end { 2.0 } else { 1.0 }
        } else {
            h - 0.5
        };
        let product: Vec<f64> = (0..=m)
            .map(|k| {
                if k == 0 || k == m {
                    f64::NAN
                } else {
                    self.values[k] * other.values[k]
                }
            })
            .collect();
        let moments = |w0: f64, w1: f64, p: f64| {
            (
                (w1.powf(p + 1.0) - w0.powf(p + 1.0)) / (p + 1.0),
                (w1.powf(p + 2.0) - w0.powf(p + 2.0)) / (p + 2.0),
            )
        };
        let half = m / 2;
        let mut total = 0.0;

        let mut r: Vec<f64> = (0..(half + 1).max(4))
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    product[k] / u(k).powf(left_exp)
                }
            })
            .collect();
        r[0] = 3.0 * r[1] - 3.0 * r[2] + r[3];
        for k in 0..half {
            let (m0, m1) = moments(u(k), u(k + 1), left_exp);
            let slope = (r[k + 1] - r[k]) / d;
            total += r[k] * m0 + slope * (m1 - u(k) * m0);
        }

        let mut r2 = vec![0.0; m + 1];
        for k in half.min(m - 3)..m {
            r2[k] = product[k] / (tm - u(k)).powf(right_exp);
        }
        r2[m] = 3.0 * r2[m - 1] - 3.0 * r2[m - 2] + r2[m - 3];
        for k in half..m {
            let (w0, w1) = (tm - u(k + 1), tm - u(k));
            let (m0, m1) = moments(w0, w1, right_exp);
            let slope = (r2[k] - r2[k + 1]) / d;
            total += r2[k + 1] * m0 + slope * (m1 - w0 * m0);
        }
        Ok(total)
    }

    pub fn norm_sq(&self) -> Result<f64> {
        self.inner_product(self)
    }
}

/// `K^H f` on `[0, 1]`.
pub fn kh_apply<T: Scalar>(f: &GridFunction<T>, hurst: T) -> Result<WienerKernel> {
    let h = hurst.as_f64();
    check_open_unit("H", h)?;
    let q = f.resolution();
    if q < MIN_SUPPORT_CELLS {
        return Err(Error::Parameter(format!(
            "grid resolution {q} is below the minimum of {MIN_SUPPORT_CELLS}"
        )));
    }
    Ok(WienerKernel {
        hurst: h,
        q,
        end: q,
        values: transfer(&f.to_f64(), q, q, h),
    })
}

/// Kernels `K^H[f · 1_{[0, t)}]` for each `t` in `times`.
///
/// The integrand is refined piecewise-linearly so the working grid has at
/// least [`DEFAULT_WIENER_RESOLUTION`] cells and every nonzero time spans at
/// least a few cells. Times must be points of the integrand's grid.
pub fn wiener_kernels<T: Scalar>(
    f: &GridFunction<T>,
    times: &[T],
    hurst: T,
) -> Result<Vec<WienerKernel>> {
    let h = hurst.as_f64();
    check_open_unit("H", h)?;
    let q0 = f.resolution();
    let indices = times
        .iter()
        .map(|&t| f.index_of(t))
        .collect::<Result<Vec<_>>>()?;
    let min_idx = indices
        .iter()
        .copied()
        .filter(|&i| i > 0)
        .min()
        .unwrap_or(q0);
    let factor = MIN_SUPPORT_CELLS
        .div_ceil(min_idx)
        .max(DEFAULT_WIENER_RESOLUTION.div_ceil(q0));
    let fine = if factor > 1 {
        f.refine(factor)?
    } else {
        f.clone()
    };
    let values = fine.to_f64();
    let q = fine.resolution();
    Ok(indices
        .iter()
        .map(|&i| {
            let end = i * factor;
            WienerKernel {
                hurst: h,
                q,
                end,
                values: transfer(&values, end, q, h),
            }
        })
        .collect())
}

/// `E X_t X_s` for `X_t = ∫₀ᵗ f dB^H`, via the isometry
/// `∫₀¹ K^H[f 1_{[0,t)}] K^H[f 1_{[0,s)}] du`.
pub fn wiener_integral_cov<T: Scalar>(f: &GridFunction<T>, t: T, s: T, hurst: T) -> Result<T> {
    let k = wiener_kernels(f, &[t, s], hurst)?;
    Ok(T::lit(k[0].inner_product(&k[1])?))
}

/// Covariance matrix of the Wiener integral on `times`, row-major.
pub fn wiener_integral_cov_matrix<T: Scalar>(
    f: &GridFunction<T>,
    times: &[T],
    hurst: T,
) -> Result<Vec<T>> {
    let kernels = wiener_kernels(f, times, hurst)?;
    let n = times.len();
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = T::lit(kernels[i].inner_product(&kernels[j])?);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionWitness<T> {
    pub t: T,
    pub value: T,
}

/// Outcome of checking sufficient conditions on `f` for the two Hölder
/// inequalities of `∫ f dB^H`. Witnesses mark the worst grid point of a
/// failed side.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport<T> {
    pub left_ok: bool,
    pub right_ok: bool,
    pub left_witness: Option<ConditionWitness<T>>,
    pub right_witness: Option<ConditionWitness<T>>,
}

/// Grid check of the sufficient conditions under which `∫ f dB^H` satisfies
/// `c|t−s|^H ≤ ‖X_t − X_s‖₂` (left) and `‖X_t − X_s‖₂ ≤ c|t−s|^H` (right).
///
/// For `H < 1/2` both `f` and `f − t f′/(H−1/2)` are checked, which needs
/// derivative samples. For `H ≥ 1/2` the left side needs `f ≥ c` or
/// `f ≤ −c` throughout and the right side `|f| ≤ c`.
pub fn check_sufficient_conditions<T: Scalar>(
    f: &GridFunction<T>,
    hurst: T,
    c: T,
) -> Result<ConditionReport<T>> {
    let h = hurst.as_f64();
    check_open_unit("H", h)?;
    check_positive("c", c.as_f64())?;
    let n = f.values.len();
    let (lower_side, upper_side): (Vec<T>, Vec<T>) = if h < 0.5 {
        let d = f.derivative.as_ref().ok_or_else(|| {
            Error::Parameter("derivative samples are required for H < 1/2".into())
        })?;
        let inv = T::lit(1.0 / (h - 0.5));
        (0..n)
            .map(|i| {
                let g = f.values[i] - inv * f.t(i) * d[i];
                (
                    f.values[i].min(g),
                    num_traits::Float::abs(f.values[i]).max(num_traits::Float::abs(g)),
                )
            })
            .unzip()
    } else {
        let sign = if f.values[0] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        (0..n)
            .map(|i| (sign * f.values[i], num_traits::Float::abs(f.values[i])))
            .unzip()
    };
    let worst = |xs: &[T], better: fn(T, T) -> bool| {
        let mut k = 0;
        for i in 1..xs.len() {
            if better(xs[k], xs[i]) {
                k = i;
            }
        }
        ConditionWitness {
            t: f.t(k),
            value: xs[k],
        }
    };
    let low = worst(&lower_side, |cur, x| x < cur);
    let high = worst(&upper_side, |cur, x| x > cur);
    let left_ok = low.value >= c;
    let right_ok = high.value <= c;
    Ok(ConditionReport {
        left_ok,
        right_ok,
        left_witness: (!left_ok).then_some(low),
        right_witness: (!right_ok).then_some(high),
    })
}
