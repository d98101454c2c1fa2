//! Exact Gaussian path sampling on the uniform grid `{i/n : i = 0..=n}`.
//!
//! fBm is sampled by circulant embedding of its increment sequence
//! (Davies–Harte); every other family by a Cholesky factor of its grid
//! covariance. Randomness comes from ChaCha streams selected by block index,
//! so output is a pure function of the seed whatever the thread count.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernels::{ProcessKind, ProcessSpec};
use crate::numeric::check_open_unit;
use crate::scalar::Scalar;

/// Negative circulant eigenvalues down to this fraction of the largest are
/// treated as roundoff and clamped to zero.
pub const EIGENVALUE_CLAMP_RELATIVE: f64 = 1e-9;

/// Covariance matrices may have eigenvalues down to this (relative) level
/// before sampling reports them as not positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Diagonal shift (relative) applied before the Cholesky factorization.
pub const CHOLESKY_SHIFT: f64 = 1e-12;

/// Pivots at or below this relative level are treated as exact zeros.
const CHOLESKY_ZERO_PIVOT: f64 = 1e-11;

/// Magic bytes opening a binary path-batch file.
pub const PATH_BATCH_MAGIC: &[u8; 8] = b"GMAXPB01";

/// Autocovariance of unit-step fractional Gaussian noise,
/// `γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance<T: Scalar>(k: usize, hurst: T) -> Result<T> {
    check_open_unit("H", hurst.as_f64())?;
    Ok(T::lit(fgn_gamma(k, hurst.as_f64())))
}

fn fgn_gamma(k: usize, h: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let p = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).powf(p))
}

/// Eigenvalues of the `2n`-circulant embedding of the fGn covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantSpectrum {
    pub n: usize,
    pub hurst: f64,
    /// Eigenvalues after clamping roundoff negatives to zero.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue before clamping.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Builds the circulant with first row `(γ(0), …, γ(n−1), γ(n), γ(n−1), …, γ(1))`
/// and diagonalizes it with a length-`2n` FFT.
pub fn circulant_spectrum(n: usize, hurst: f64) -> Result<CirculantSpectrum> {
    check_open_unit("H", hurst)?;
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let len = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..len)
        .map(|j| {
            let k = if j <= n { j } else { len - j };
            Complex::new(fgn_gamma(k, hurst), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut row);
    let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    let max_imag = row.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-9 * max.max(1.0) {
        return Err(Error::InternalConsistency(format!(
            "circulant eigenvalues have imaginary part {max_imag:e}"
        )));
    }
    if min < -EIGENVALUE_CLAMP_RELATIVE * max {
        return Err(Error::EmbeddingFailure {
            n,
            hurst,
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    Ok(CirculantSpectrum {
        n,
        hurst,
        eigenvalues: row.iter().map(|c| c.re.max(0.0)).collect(),
        min_eigenvalue: min,
        max_eigenvalue: max,
    })
}

/// Lower-triangular factor of a symmetric PSD matrix (row-major), tolerating
/// semidefiniteness: pivots that vanish up to roundoff zero their column.
pub fn cholesky_psd(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::Shape(format!(
            "{} entries do not form a {n}x{n} matrix",
            matrix.len()
        )));
    }
    let scale = (0..n)
        .map(|i| matrix[i * n + i].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let row_j = j * n;
        let mut d = matrix[row_j + j] + CHOLESKY_SHIFT * scale;
        for k in 0..j {
            d -= l[row_j + k] * l[row_j + k];
        }
        if d < -PSD_TOLERANCE * scale {
            return Err(Error::NotPsd(format!(
                "pivot {d:e} at index {j} (diagonal scale {scale:e})"
            )));
        }
        if d <= CHOLESKY_ZERO_PIVOT * scale {
            continue;
        }
        let pivot = d.sqrt();
        l[row_j + j] = pivot;
        for i in j + 1..n {
            let row_i = i * n;
            let mut s = matrix[row_i + j];
            for k in 0..j {
                s -= l[row_i + k] * l[row_j + k];
            }
            l[row_i + j] = s / pivot;
        }
    }
    Ok(l)
}

#[derive(Clone)]
enum Method {
    /// Square roots of `λ_k/(2n)` and the planned FFT.
    DaviesHarte {
        amplitudes: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
        scale: f64,
    },
    /// `X_t = C ξ t`, the fBm with `H = 1`.
    Ray { scale: f64 },
    /// Lower factor of the covariance on all `n+1` grid points.
    Cholesky { factor: Vec<f64> },
}

/// A ready-to-use exact sampler for one process on one grid.
#[derive(Clone)]
pub struct PathSampler<T> {
    spec: ProcessSpec<T>,
    n: usize,
    method: Method,
}

impl<T: Scalar> std::fmt::Debug for PathSampler<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let method = match self.method {
            Method::DaviesHarte { .. } => "davies-harte",
            Method::Ray { .. } => "ray",
            Method::Cholesky { .. } => "cholesky",
        };
        f.debug_struct("PathSampler")
            .field("spec", &self.spec)
            .field("n", &self.n)
            .field("method", &method)
            .finish()
    }
}

impl<T: Scalar> PathSampler<T> {
    /// Circulant embedding for fBm with `H < 1`, the ray for `H = 1`, and
    /// Cholesky for everything else.
    pub fn new(spec: &ProcessSpec<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        match spec.kind() {
            ProcessKind::Fbm { hurst } if hurst.as_f64() == 1.0 => Ok(Self {
                spec: spec.clone(),
                n,
                method: Method::Ray {
                    scale: spec.scale().as_f64(),
                },
            }),
            ProcessKind::Fbm { hurst } => {
                let h = hurst.as_f64();
                let spectrum = circulant_spectrum(n, h)?;
                let len = 2 * n;
                let amplitudes = spectrum
                    .eigenvalues
                    .iter()
                    .map(|&l| (l / len as f64).sqrt())
                    .collect();
                let fft = FftPlanner::new().plan_fft_forward(len);
                let scale = spec.scale().as_f64() * (n as f64).powf(-h);
                Ok(Self {
                    spec: spec.clone(),
                    n,
                    method: Method::DaviesHarte {
                        amplitudes,
                        fft,
                        scale,
                    },
                })
            }
            _ => Self::cholesky(spec, n),
        }
    }

    /// Cholesky sampling regardless of family.
    pub fn cholesky(spec: &ProcessSpec<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        let step = T::one() / T::from_usize_lossy(n);
        let times: Vec<T> = (0..=n).map(|i| T::from_usize_lossy(i) * step).collect();
        let cov: Vec<f64> = spec
            .covariance_matrix(&times)?
            .iter()
            .map(|v| v.as_f64())
            .collect();
        let factor = cholesky_psd(&cov, n + 1)?;
        Ok(Self {
            spec: spec.clone(),
            n,
            method: Method::Cholesky { factor },
        })
    }

    pub fn spec(&self) -> &ProcessSpec<T> {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Independent base paths produced per random stream.
    fn paths_per_block(&self) -> usize {
        match self.method {
            Method::DaviesHarte { .. } => 2,
            _ => 1,
        }
    }

    /// Generates the base paths of one block into `out` (one `n+1` row each).
    fn fill_block(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch, out: &mut [Vec<f64>]) {
        let n = self.n;
        match &self.method {
            Method::Ray { scale } => {
                let xi: f64 = rng.sample(StandardNormal);
                for (i, x) in out[0].iter_mut().enumerate() {
                    *x = scale * xi * i as f64 / n as f64;
                }
            }
            Method::Cholesky { factor } => {
                let dim = n + 1;
                scratch.normals.clear();
                scratch
                    .normals
                    .extend((0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
                let z = &scratch.normals;
                for (i, x) in out[0].iter_mut().enumerate() {
                    let row = &factor[i * dim..i * dim + i + 1];
                    *x = row.iter().zip(z).map(|(a, b)| a * b).sum();
                }
            }
            Method::DaviesHarte {
                amplitudes,
                fft,
                scale,
            } => {
                let buf = &mut scratch.complex;
                buf.clear();
                buf.extend(amplitudes.iter().map(|&a| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(a * re, a * im)
                }));
                scratch
                    .fft
                    .resize(fft.get_inplace_scratch_len(), Complex::default());
                fft.process_with_scratch(buf, &mut scratch.fft);
                let (first, second) = out.split_at_mut(1);
                let (mut re_acc, mut im_acc) = (0.0, 0.0);
                first[0][0] = 0.0;
                second[0][0] = 0.0;
                for i in 0..n {
                    re_acc += buf[i].re;
                    im_acc += buf[i].im;
                    first[0][i + 1] = scale * re_acc;
                    second[0][i + 1] = scale * im_acc;
                }
            }
        }
    }

    /// Applies `f` to base paths `0..count` and returns the results in index
    /// order. Base path `b` comes from stream `b / k` of the seed, where `k`
    /// paths share one block; the result does not depend on the number of
    /// threads.
    pub fn map_base_paths<R, F>(&self, count: usize, seed: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[f64]) -> R + Sync,
    {
        let per_block = self.paths_per_block();
        let blocks = count.div_ceil(per_block);
        let nested: Vec<Vec<R>> = (0..blocks)
            .into_par_iter()
            .map_init(
                || (Scratch::default(), vec![vec![0.0; self.n + 1]; per_block]),
                |(scratch, rows), block| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(block as u64);
                    self.fill_block(&mut rng, scratch, rows);
                    let take = per_block.min(count - block * per_block);
                    rows[..take].iter().map(|r| f(r)).collect()
                },
            )
            .collect();
        nested.into_iter().flatten().collect()
    }

    /// Samples `m` paths; with `antithetic`, paths `2j` and `2j+1` are a base
    /// path and its negation.
    pub fn sample(&self, m: usize, seed: u64, antithetic: bool) -> Result<PathBatch<T>> {
        check_path_count(m, antithetic)?;
        let base = if antithetic { m / 2 } else { m };
        let rows = self.map_base_paths(base, seed, |p| {
            p.iter().map(|&x| T::lit(x)).collect::<Vec<T>>()
        });
        let mut values = Vec::with_capacity(m * (self.n + 1));
        for row in rows {
            if antithetic {
                values.extend(row.iter().copied());
                values.extend(row.iter().map(|&x| -x));
            } else {
                values.extend(row);
            }
        }
        Ok(PathBatch {
            n: self.n,
            m,
            seed,
            antithetic,
            spec: self.spec.clone(),
            values,
        })
    }
}

#[derive(Default)]
struct Scratch {
    complex: Vec<Complex<f64>>,
    fft: Vec<Complex<f64>>,
    normals: Vec<f64>,
}

pub(crate) fn check_path_count(m: usize, antithetic: bool) -> Result<()> {
    if m == 0 {
        return Err(Error::Parameter("path count m must be at least 1".into()));
    }
    if antithetic && m % 2 == 1 {
        return Err(Error::Parameter(format!(
            "antithetic sampling needs an even path count, got {m}"
        )));
    }
    Ok(())
}

/// fBm paths by circulant embedding (or the ray when `H = 1`).
pub fn sample_fbm_paths<T: Scalar>(
    n: usize,
    m: usize,
    hurst: T,
    seed: u64,
    antithetic: bool,
) -> Result<PathBatch<T>> {
    PathSampler::new(&ProcessSpec::fbm(hurst)?, n)?.sample(m, seed, antithetic)
}

/// Paths of any covariance-defined process from the Cholesky factor of its
/// grid covariance.
pub fn sample_by_cholesky<T: Scalar>(
    spec: &ProcessSpec<T>,
    n: usize,
    m: usize,
    seed: u64,
    antithetic: bool,
) -> Result<PathBatch<T>> {
    PathSampler::cholesky(spec, n)?.sample(m, seed, antithetic)
}

/// `m` sampled paths on `{i/n}`, stored row-major as an `m × (n+1)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PathBatch<T> {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub spec: ProcessSpec<T>,
    values: Vec<T>,
}

impl<T: Scalar> PathBatch<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn path(&self, i: usize) -> &[T] {
        let w = self.n + 1;
        &self.values[i * w..(i + 1) * w]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.n + 1)
    }

    /// Binary layout: `GMAXPB01`, then `n`, `m`, `seed` as little-endian
    /// `u64`, then the values as little-endian `f64`, row by row.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(PATH_BATCH_MAGIC)?;
        for field in [self.n as u64, self.m as u64, self.seed] {
            w.write_all(&field.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 8 * self.values.len());
        self.write_binary(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(&mut file)?;
        file.flush()?;
        Ok(())
    }

    /// CSV with header `path,i,t,value`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(["path", "i", "t", "value"])?;
        for (p, row) in self.paths().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writer.serialize((p, i, i as f64 / self.n as f64, v.as_f64()))?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

/// Contents of a binary path-batch file.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPathBatch {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub values: Vec<f64>,
}

pub fn read_binary(mut r: impl Read) -> Result<RawPathBatch> {
    let mut header = [0u8; 32];
    r.read_exact(&mut header)?;
    if &header[..8] != PATH_BATCH_MAGIC {
        return Err(Error::Shape("missing GMAXPB01 magic".into()));
    }
    let word =
        |k: usize| u64::from_le_bytes(header[8 * k..8 * k + 8].try_into().expect("8-byte slice"));
    let (n, m, seed) = (word(1) as usize, word(2) as usize, word(3));
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * m * (n + 1) {
        return Err(Error::Shape(format!(
            "expected {} value bytes, found {}",
            8 * m * (n + 1),
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(RawPathBatch { n, m, seed, values })
}
