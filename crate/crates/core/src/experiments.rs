//! Parameter sweeps that regenerate the figures and numerical claims as CSV
//! (or JSON for certificates).
//!
//! Every table starts with a comment line carrying the SHA-256 of the
//! configuration with `threads` and `output_path` removed, so identical
//! inputs give identical bytes whatever the thread count.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    bound_reports, brownian_gap_asymptotic, continuity_modulus, discretization_gap_upper_bound,
    expected_max_simple_lower_bound, gap_bound_threshold, grid_max_lower_bound_ln,
    white_noise_limit, white_noise_limit_with_origin, CHAINING_CONSTANT,
};
use crate::error::{Error, Result};
use crate::estimator::{estimate_expected_max, estimate_gaps_with_sampler, DEFAULT_CI_LEVEL};
use crate::gauss_inequalities::{chaining_upper, dyadic_nets, MAX_NET_DEPTH};
use crate::kernels::{certify_quasihelix, HolderConstants, ProcessSpec, ProcessSpecFile};
use crate::numeric::check_open_unit;
use crate::sampling::PathSampler;

/// Largest grid (as a power of two) on which the small-H demo samples paths.
pub const DEMO_MAX_LOG2_N: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Experiment {
    Fig1,
    Fig2,
    BoundsTable,
    DeltaStudy,
    LimitH0,
    #[serde(rename = "SMALL_H_DEMO", alias = "THM3_DEMO")]
    SmallHDemo,
    Certify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::BoundsTable => "bounds",
            Self::DeltaStudy => "delta-study",
            Self::LimitH0 => "limit-h0",
            Self::SmallHDemo => "small-h-demo",
            Self::Certify => "certify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "H_grid", default)]
    pub h_grid: Vec<f64>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(alias = "m", default)]
    pub paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ci")]
    pub ci_level: f64,
    /// Fine grid for the gap study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_n: Option<usize>,
    /// Process to certify, inline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ProcessSpecFile>,
    /// Process to certify, from a JSON file (relative to the config file).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<HolderConstants<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Directory that relative `spec_file` paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_ci() -> f64 {
    DEFAULT_CI_LEVEL
}

fn tenths(from: usize, to: usize) -> Vec<f64> {
    (from..=to).map(|k| k as f64 / 10.0).collect()
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            h_grid: vec![],
            n_grid: vec![],
            paths: 20_000,
            seed: 20_240_601,
            ci_level: DEFAULT_CI_LEVEL,
            fine_n: None,
            spec: None,
            spec_file: None,
            constants: None,
            grid_size: None,
            output_path: None,
            threads: None,
            base_dir: None,
        };
        match experiment {
            Experiment::Fig1 => {
                cfg.h_grid = tenths(1, 10);
                cfg.n_grid = (5..=16).map(|k| 1 << k).collect();
            }
            Experiment::Fig2 => {
                cfg.h_grid = tenths(1, 9);
                cfg.n_grid = vec![1 << 16];
                cfg.paths = 200_000;
            }
            Experiment::BoundsTable => {
                cfg.h_grid = tenths(1, 9);
                cfg.n_grid = vec![16, 256, 4096, 1 << 16];
                cfg.paths = 0;
            }
            Experiment::DeltaStudy => {
                cfg.h_grid = vec![0.5];
                cfg.n_grid = vec![16, 64, 256];
                cfg.fine_n = Some(1 << 16);
            }
            Experiment::LimitH0 => {
                cfg.h_grid = vec![0.01, 0.001];
                cfg.n_grid = vec![16, 64];
            }
            Experiment::SmallHDemo => {
                cfg.h_grid = vec![0.1, 0.05, 0.02, 0.01, 0.005, 0.001];
                cfg.n_grid = vec![16];
            }
            Experiment::Certify => {
                cfg.spec = Some(ProcessSpecFile::fbm(0.4));
                cfg.constants = Some(HolderConstants {
                    c1: 1.0,
                    h1: 0.4,
                    c2: 1.0,
                    h2: 0.4,
                });
                cfg.grid_size = Some(257);
                cfg.paths = 0;
            }
        }
        cfg
    }

    /// Reads a JSON config; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = serde_json::from_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let needs_paths = !matches!(
            self.experiment,
            Experiment::BoundsTable | Experiment::Certify
        );
        if needs_paths && (self.paths < 4 || self.paths % 2 != 0) {
            return Err(Error::Parameter(format!(
                "paths must be even and at least 4, got {}",
                self.paths
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::domain("ci_level", self.ci_level, "(0, 1)"));
        }
        if self.threads == Some(0) {
            return Err(Error::Parameter("threads must be positive".into()));
        }
        if self.experiment == Experiment::Certify {
            if self.spec.is_none() && self.spec_file.is_none() {
                return Err(Error::Parameter("certify needs spec or spec_file".into()));
            }
            return Ok(());
        }
        if self.h_grid.is_empty() {
            return Err(Error::Parameter("H_grid is empty".into()));
        }
        for &h in &self.h_grid {
            let ok = match self.experiment {
                Experiment::Fig1 => h > 0.0 && h <= 1.0,
                _ => h > 0.0 && h < 1.0,
            };
            if !ok {
                return Err(Error::domain("H", h, "the experiment's Hurst range"));
            }
        }
        if self.n_grid.is_empty() && self.experiment != Experiment::SmallHDemo {
            return Err(Error::Parameter("n_grid is empty".into()));
        }
        if let Some(&bad) = self.n_grid.iter().find(|&&n| n == 0) {
            return Err(Error::Parameter(format!(
                "grid sizes must be positive, got {bad}"
            )));
        }
        if self.experiment == Experiment::DeltaStudy {
            let fine = self.fine_n.unwrap_or(1 << 16);
            if let Some(&bad) = self.n_grid.iter().find(|&&n| fine % n != 0) {
                return Err(Error::Parameter(format!(
                    "coarse grid {bad} does not divide the fine grid {fine}"
                )));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring `threads` and
    /// `output_path`.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.threads = None;
        canonical.output_path = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn resolve_spec(&self) -> Result<ProcessSpec<f64>> {
        let base = self.base_dir.clone().unwrap_or_default();
        match (&self.spec, &self.spec_file) {
            (Some(spec), _) => spec.resolve(&base),
            (None, Some(file)) => ProcessSpecFile::load(base.join(file)),
            (None, None) => Err(Error::Parameter("no process given".into())),
        }
    }
}

/// A rendered experiment: file contents plus the outcome of its checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub contents: String,
    /// Human-readable descriptions of failed checks; empty when all passed.
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self, cfg: &ExperimentConfig) -> Result<String> {
        let mut out = format!(
            "# gmax {} config_sha256={}\n",
            cfg.experiment.name(),
            cfg.hash()
        )
        .into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out).expect("CSV output is UTF-8"))
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

const NA: &str = "NA";

fn na() -> String {
    NA.to_owned()
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool
/// when `threads` is `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Parameter("threads must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs the experiment named in `cfg` on `cfg.threads` workers.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    with_threads(cfg.threads, || match cfg.experiment {
        Experiment::Fig1 => run_fig1(cfg),
        Experiment::Fig2 => run_fig2(cfg),
        Experiment::BoundsTable => run_bounds_table(cfg),
        Experiment::DeltaStudy => run_delta_study(cfg),
        Experiment::LimitH0 => run_limit_h0(cfg),
        Experiment::SmallHDemo => run_small_h_demo(cfg),
        Experiment::Certify => run_certify(cfg),
    })?
}

fn output(
    cfg: &ExperimentConfig,
    table: &Table,
    failures: Vec<String>,
) -> Result<ExperimentOutput> {
    Ok(ExperimentOutput {
        experiment: cfg.experiment,
        contents: table.render(cfg)?,
        failures,
    })
}

/// Expected fBm grid maxima over every `(H, n)` cell, all from the same
/// seed. Cells that fail keep a row with the error message.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&["H", "n", "mean", "stderr", "half_width", "seed", "error"]);
    for &h in &cfg.h_grid {
        for &n in &cfg.n_grid {
            let cell = ProcessSpec::fbm(h).and_then(|spec| {
                estimate_expected_max(&spec, n, cfg.paths, cfg.seed, cfg.ci_level)
            });
            table.push(match cell {
                Ok(e) => vec![
                    num(h),
                    n.to_string(),
                    num(e.mean),
                    num(e.stderr),
                    num(e.half_width),
                    cfg.seed.to_string(),
                    String::new(),
                ],
                Err(err) => vec![
                    num(h),
                    n.to_string(),
                    na(),
                    na(),
                    na(),
                    cfg.seed.to_string(),
                    err.to_string(),
                ],
            });
        }
    }
    output(cfg, &table, vec![])
}

/// Monte Carlo estimate against the lower bound `1/(5√H)`, one row per `H`
/// at the first grid size.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_grid[0];
    let estimate_col = format!("mc_estimate_n{n}");
    let mut table = Table::new(&["H", "lower_bound", &estimate_col, "stderr", "passed"]);
    let mut failures = vec![];
    for &h in &cfg.h_grid {
        let lower = expected_max_simple_lower_bound(1.0, h)?;
        let e = estimate_expected_max(&ProcessSpec::fbm(h)?, n, cfg.paths, cfg.seed, cfg.ci_level)?;
        let passed = e.mean >= lower - 3.0 * e.stderr;
        if !passed {
            failures.push(format!(
                "H={h}: estimate {} below 1/(5√H) = {lower} by more than 3 stderr",
                e.mean
            ));
        }
        table.push(vec![
            num(h),
            num(lower),
            num(e.mean),
            num(e.stderr),
            passed.to_string(),
        ]);
    }
    output(cfg, &table, failures)
}

/// Every closed-form bound on the `(H, n)` grid for unit scale.
pub fn run_bounds_table(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&["H", "n", "bound", "value", "validity"]);
    for &h in &cfg.h_grid {
        for &n in &cfg.n_grid {
            for r in bound_reports(1.0, h, n)? {
                table.push(vec![
                    num(h),
                    n.to_string(),
                    r.name,
                    num(r.value),
                    r.validity.unwrap_or_default(),
                ]);
            }
        }
    }
    output(cfg, &table, vec![])
}

/// Coupled gaps between each coarse grid and the fine grid, against the
/// discretization bound (`NA` where it does not apply) and, for `H = ½`,
/// the coupled Brownian asymptotic `α(n^{−1/2} − N^{−1/2})`.
pub fn run_delta_study(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let fine_n = cfg.fine_n.unwrap_or(1 << 16);
    let mut table = Table::new(&[
        "H",
        "n",
        "gap_estimate",
        "gap_stderr",
        "gap_bound",
        "chernoff_asymptotic",
        "passed",
    ]);
    let mut failures = vec![];
    for &h in &cfg.h_grid {
        let sampler = PathSampler::new(&ProcessSpec::fbm(h)?, fine_n)?;
        let nested =
            estimate_gaps_with_sampler(&sampler, &cfg.n_grid, cfg.paths, cfg.seed, cfg.ci_level)?;
        for g in &nested.gaps {
            let n = g.coarse_n;
            let bound = if (n as f64) >= gap_bound_threshold(h) {
                Some(discretization_gap_upper_bound(1.0, h, n)?)
            } else {
                None
            };
            let asymptotic = if h == 0.5 {
                Some(brownian_gap_asymptotic(n)? - brownian_gap_asymptotic(fine_n)?)
            } else {
                None
            };
            let passed =
                bound.is_none_or(|b| g.mean_gap <= b + 3.0 * g.stderr) && g.min_pathwise_gap >= 0.0;
            if !passed {
                failures.push(format!(
                    "H={h}, n={n}: gap {} exceeds bound {bound:?} by more than 3 stderr",
                    g.mean_gap
                ));
            }
            table.push(vec![
                num(h),
                n.to_string(),
                num(g.mean_gap),
                num(g.stderr),
                bound.map_or_else(na, num),
                asymptotic.map_or_else(na, num),
                passed.to_string(),
            ]);
        }
    }
    output(cfg, &table, failures)
}

/// Small-`H` estimates against the white-noise limit, checked within the
/// continuity modulus. `origin_limit` is the limit with the origin's
/// contribution kept (see [`white_noise_limit_with_origin`]).
pub fn run_limit_h0(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&[
        "n",
        "H",
        "mc_estimate",
        "quadrature_limit",
        "chatterjee_modulus",
        "stderr",
        "origin_limit",
        "passed",
    ]);
    let mut failures = vec![];
    for &n in &cfg.n_grid {
        let limit = white_noise_limit(n)?;
        let origin_limit = white_noise_limit_with_origin(n)?;
        for &h in &cfg.h_grid {
            let modulus = if n >= 2 {
                continuity_modulus(0.0, h, n)?.modulus
            } else {
                0.0
            };
            let e = match ProcessSpec::fbm(h)
                .and_then(|s| estimate_expected_max(&s, n, cfg.paths, cfg.seed, cfg.ci_level))
            {
                Ok(e) => e,
                Err(err @ Error::EmbeddingFailure { .. }) => {
                    failures.push(format!("n={n}, H={h}: {err}"));
                    continue;
                }
                Err(err) => return Err(err),
            };
            let passed = (e.mean - limit).abs() <= modulus + 3.0 * e.stderr;
            if !passed {
                failures.push(format!(
                    "n={n}, H={h}: |{} − {limit}| exceeds modulus {modulus} + 3 stderr",
                    e.mean
                ));
            }
            table.push(vec![
                n.to_string(),
                num(h),
                num(e.mean),
                num(limit),
                num(modulus),
                num(e.stderr),
                num(origin_limit),
                passed.to_string(),
            ]);
        }
    }
    output(cfg, &table, failures)
}

/// Behaviour of `E max_{0≤i≤n} B^H_{i/n}` as `H → 0` in three sweeps:
///
/// * `growing_n`: `n(H) = 2^{⌈1/(2H)⌉}`, so `n^H → √2`; the grid lower bound
///   grows like `1/√H` and paths are sampled while `n ≤ 2^16`.
/// * `fixed_n`: each `n` of the config; estimates stay below the
///   white-noise limit.
/// * `chaining`: dyadic nets augmented by `{i/n}` with `n = 2^{⌈1/H²⌉}`
///   truncated at `2^16`; the chaining bound times `√H` must decrease.
pub fn run_small_h_demo(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut table = Table::new(&[
        "sweep",
        "H",
        "log2_n",
        "n_pow_H",
        "mc_estimate",
        "stderr",
        "grid_max_lower",
        "limit",
        "origin_limit",
        "chaining_bound",
        "chaining_times_sqrt_H",
        "note",
    ]);
    let mut failures = vec![];
    for &h in &cfg.h_grid {
        check_open_unit("H", h)?;
    }

    for &h in &cfg.h_grid {
        let log2_n = (1.0 / (2.0 * h)).ceil() as u32;
        let ln_n = f64::from(log2_n) * std::f64::consts::LN_2;
        let lower = grid_max_lower_bound_ln(h, ln_n)?;
        let (mc, se, note) = if log2_n <= DEMO_MAX_LOG2_N {
            let e = estimate_expected_max(
                &ProcessSpec::fbm(h)?,
                1 << log2_n,
                cfg.paths,
                cfg.seed,
                cfg.ci_level,
            )?;
            (num(e.mean), num(e.stderr), String::new())
        } else {
            (
                na(),
                na(),
                format!("not sampled: n above 2^{DEMO_MAX_LOG2_N}"),
            )
        };
        table.push(vec![
            "growing_n".into(),
            num(h),
            log2_n.to_string(),
            num((h * ln_n).exp()),
            mc,
            se,
            num(lower),
            na(),
            na(),
            na(),
            na(),
            note,
        ]);
    }

    for &n in &cfg.n_grid {
        let limit = white_noise_limit(n)?;
        let origin_limit = white_noise_limit_with_origin(n)?;
        for &h in &cfg.h_grid {
            let e =
                estimate_expected_max(&ProcessSpec::fbm(h)?, n, cfg.paths, cfg.seed, cfg.ci_level)?;
            if e.mean > limit + 0.05 || e.mean - 3.0 * e.stderr > origin_limit {
                failures.push(format!(
                    "n={n}, H={h}: estimate {} above the white-noise ceiling",
                    e.mean
                ));
            }
            table.push(vec![
                "fixed_n".into(),
                num(h),
                num((n as f64).log2()),
                num((n as f64).powf(h)),
                num(e.mean),
                num(e.stderr),
                num(grid_max_lower_bound_ln(h, (n as f64).ln())?),
                num(limit),
                num(origin_limit),
                na(),
                na(),
                String::new(),
            ]);
        }
    }

    let mut previous = f64::INFINITY;
    for &h in &cfg.h_grid {
        let wanted = (1.0 / (h * h)).ceil();
        let log2_n = wanted.min(f64::from(DEMO_MAX_LOG2_N)) as u32;
        let n = 1usize << log2_n;
        // the smallest depth whose last dyadic level already holds {i/n}
        let depth = (0..=MAX_NET_DEPTH)
            .find(|&d| (1u64 << d) >= u64::from(log2_n))
            .unwrap_or(MAX_NET_DEPTH);
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let nets = dyadic_nets(depth, Some(&grid))?;
        let bound = chaining_upper(|t, s| (t - s).abs().powf(h), &nets, CHAINING_CONSTANT);
        let scaled = bound * h.sqrt();
        if scaled > previous {
            failures.push(format!(
                "H={h}: chaining bound times √H increased to {scaled}"
            ));
        }
        previous = scaled;
        let note = if wanted > f64::from(DEMO_MAX_LOG2_N) {
            format!("n truncated from 2^{wanted}")
        } else {
            String::new()
        };
        table.push(vec![
            "chaining".into(),
            num(h),
            log2_n.to_string(),
            num((n as f64).powf(h)),
            na(),
            na(),
            na(),
            na(),
            na(),
            num(bound),
            num(scaled),
            note,
        ]);
    }
    output(cfg, &table, failures)
}

/// Hölder certificate as pretty JSON; fails when either inequality breaks.
pub fn run_certify(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let spec = cfg.resolve_spec()?;
    let constants = match cfg.constants {
        Some(c) => HolderConstants::new(c.c1, c.h1, c.c2, c.h2)?,
        None => {
            let h = spec.hurst().ok_or_else(|| {
                Error::Parameter(
                    "constants are required for processes without a Hurst index".into(),
                )
            })?;
            HolderConstants::helix(spec.scale(), h)?
        }
    };
    let grid_size = cfg.grid_size.unwrap_or(257);
    let certificate = certify_quasihelix(&spec, constants, grid_size)?;
    let mut failures = vec![];
    if !certificate.lower_passed {
        failures.push(format!(
            "lower inequality fails at {:?}",
            certificate.worst_lower_pair
        ));
    }
    if !certificate.upper_passed {
        failures.push(format!(
            "upper inequality fails at {:?}",
            certificate.worst_upper_pair
        ));
    }
    let mut contents = serde_json::to_string_pretty(&certificate)?;
    contents.push('\n');
    Ok(ExperimentOutput {
        experiment: cfg.experiment,
        contents,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(experiment);
        cfg.paths = 200;
        cfg
    }

    #[test]
    fn config_round_trips_and_hash_ignores_threads() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig1);
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"experiment\":\"FIG1\""));
        assert!(json.contains("\"H_grid\""));
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let h = cfg.hash();
        assert_eq!(h.len(), 64);
        cfg.threads = Some(8);
        cfg.output_path = Some("x.csv".into());
        assert_eq!(cfg.hash(), h);
        cfg.seed += 1;
        assert_ne!(cfg.hash(), h);
    }

    #[test]
    fn experiment_names_parse() {
        let e: Experiment = serde_json::from_str("\"THM3_DEMO\"").unwrap();
        assert_eq!(e, Experiment::SmallHDemo);
        let e: Experiment = serde_json::from_str("\"BOUNDS_TABLE\"").unwrap();
        assert_eq!(e, Experiment::BoundsTable);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small(Experiment::Fig2);
        cfg.paths = 201;
        assert!(cfg.validate().is_err());
        let mut cfg = small(Experiment::Fig2);
        cfg.h_grid = vec![1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = small(Experiment::DeltaStudy);
        cfg.n_grid = vec![48];
        assert!(cfg.validate().is_err());
        let mut cfg = small(Experiment::Fig1);
        cfg.threads = Some(0);
        assert!(cfg.validate().is_err());
        assert!(
            serde_json::from_str::<ExperimentConfig>(r#"{"experiment":"FIG1","bogus":1}"#).is_err()
        );
    }

    #[test]
    fn fig1_records_failing_cells() {
        let mut cfg = small(Experiment::Fig1);
        cfg.h_grid = vec![0.5, 1.0];
        cfg.n_grid = vec![0, 8];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![8];
        let out = run(&cfg).unwrap();
        let lines: Vec<&str> = out.contents.lines().collect();
        assert!(lines[0].starts_with("# gmax fig1 config_sha256="));
        assert_eq!(lines[1], "H,n,mean,stderr,half_width,seed,error");
        assert_eq!(lines.len(), 4);
        assert!(out.passed());
    }

    #[test]
    fn fig2_bound_column_is_exact() {
        let mut cfg = small(Experiment::Fig2);
        cfg.h_grid = vec![0.04, 0.5];
        cfg.n_grid = vec![64];
        let out = run(&cfg).unwrap();
        let rows: Vec<Vec<&str>> = out
            .contents
            .lines()
            .skip(2)
            .map(|l| l.split(',').collect())
            .collect();
        assert_eq!(rows[0][1], "1");
        assert_eq!(rows[1][1], num(1.0 / (5.0 * 0.5_f64.sqrt())));
        assert!(out
            .contents
            .lines()
            .nth(1)
            .unwrap()
            .contains("mc_estimate_n64"));
        assert!(out.passed());
    }

    #[test]
    fn bounds_table_marks_invalid_gap_rows() {
        let mut cfg = small(Experiment::BoundsTable);
        cfg.h_grid = vec![0.1];
        cfg.n_grid = vec![16];
        let out = run(&cfg).unwrap();
        assert!(!out.contents.contains("gap_upper"));
        cfg.h_grid = vec![0.5];
        assert!(run(&cfg).unwrap().contents.contains("gap_upper"));
    }

    #[test]
    fn delta_study_rows() {
        let mut cfg = small(Experiment::DeltaStudy);
        cfg.h_grid = vec![0.5, 0.2];
        cfg.n_grid = vec![4, 64];
        cfg.fine_n = Some(256);
        let out = run(&cfg).unwrap();
        let rows: Vec<Vec<&str>> = out
            .contents
            .lines()
            .skip(2)
            .map(|l| l.split(',').collect())
            .collect();
        assert_eq!(rows.len(), 4);
        assert_ne!(rows[0][4], NA);
        assert_ne!(rows[0][5], NA);
        // 2^{1/0.2} = 32 > 4
        assert_eq!(rows[2][4], NA);
        assert_eq!(rows[2][5], NA);
        for r in &rows {
            assert!(r[2].parse::<f64>().unwrap() >= 0.0);
        }
    }

    #[test]
    fn certify_examples() {
        let cfg = ExperimentConfig::defaults(Experiment::Certify);
        let out = run(&cfg).unwrap();
        assert!(out.passed(), "{:?}", out.failures);
        let v: serde_json::Value = serde_json::from_str(&out.contents).unwrap();
        assert_eq!(v["passed"], true);

        let mut cfg = ExperimentConfig::defaults(Experiment::Certify);
        cfg.spec = Some(ProcessSpecFile {
            family: crate::kernels::Family::SubFbm,
            ..ProcessSpecFile::fbm(0.6)
        });
        cfg.constants = Some(HolderConstants {
            c1: 0.9,
            h1: 0.6,
            c2: 0.9,
            h2: 0.6,
        });
        let out = run(&cfg).unwrap();
        assert!(!out.passed());
        let v: serde_json::Value = serde_json::from_str(&out.contents).unwrap();
        assert_eq!(v["upper_passed"], false);
        assert!(v["worst_upper_pair"]["ratio"].as_f64().unwrap() > 0.9);
    }

    #[test]
    fn small_h_demo_growing_n_arithmetic() {
        let mut cfg = small(Experiment::SmallHDemo);
        cfg.h_grid = vec![0.1, 0.05];
        cfg.n_grid = vec![];
        let out = run(&cfg).unwrap();
        let rows: Vec<Vec<&str>> = out
            .contents
            .lines()
            .skip(2)
            .map(|l| l.split(',').collect())
            .collect();
        // ⌈1/(2·0.05)⌉ = 10 and 2^{10·0.05} = √2
        assert_eq!(rows[1][..3], ["growing_n", "0.05", "10"]);
        assert!((rows[1][3].parse::<f64>().unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(rows.iter().filter(|r| r[0] == "chaining").count(), 2);
        assert!(out.passed(), "{:?}", out.failures);
    }
}
