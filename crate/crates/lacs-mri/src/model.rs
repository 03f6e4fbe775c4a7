//! Core data types: images, k-space grids, sampling masks, line densities
//! and the experiment configuration shared by all modules.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real-valued square pixel grid. Intensity scale is deliberately
/// unnormalized; the grayscale-correction experiments depend on the
/// relative scale between reference and follow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pixels: Array2<f64>,
}

impl Image {
    pub fn new(pixels: Array2<f64>) -> Result<Self> {
        let (h, w) = pixels.dim();
        if h != w {
            return Err(Error::NonSquareImage { height: h, width: w });
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteImage);
        }
        Ok(Image { pixels })
    }

    pub fn zeros(n: usize) -> Self {
        Image { pixels: Array2::zeros((n, n)) }
    }

    pub fn n(&self) -> usize {
        self.pixels.nrows()
    }

    pub fn pixels(&self) -> &Array2<f64> {
        &self.pixels
    }

    pub fn into_pixels(self) -> Array2<f64> {
        self.pixels
    }

    pub fn frob_norm(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Pointwise scaled copy, used by the grayscale-corrected pipeline.
    pub fn scaled(&self, c: f64) -> Self {
        Image { pixels: &self.pixels * c }
    }
}

/// Complex k-space grid in centered coordinates: coordinate
/// `k in {-n/2, ..., n/2-1}` maps to storage row/column `k + n/2`, so the
/// zero frequency sits at the grid center.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceData {
    grid: Array2<Complex64>,
}

impl KSpaceData {
    pub fn new(grid: Array2<Complex64>) -> Result<Self> {
        let (h, w) = grid.dim();
        if h != w {
            return Err(Error::NonSquareImage { height: h, width: w });
        }
        Ok(KSpaceData { grid })
    }

    pub fn n(&self) -> usize {
        self.grid.nrows()
    }

    pub fn grid(&self) -> &Array2<Complex64> {
        &self.grid
    }

    pub fn grid_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.grid
    }

    pub fn frob_norm(&self) -> f64 {
        self.grid.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Storage row of a centered line index.
    pub fn row_of(&self, ky: i64) -> usize {
        centered_to_row(ky, self.n())
    }
}

/// Centered line index -> storage row.
pub fn centered_to_row(ky: i64, n: usize) -> usize {
    let half = n as i64 / 2;
    debug_assert!(ky >= -half && ky < half, "ky {ky} out of range for n={n}");
    (ky + half) as usize
}

/// Storage row -> centered line index.
pub fn row_to_centered(row: usize, n: usize) -> i64 {
    row as i64 - n as i64 / 2
}

/// Set of acquired phase-encode lines, stored as centered indices.
/// BTreeSet keeps iteration order deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    n: usize,
    lines: BTreeSet<i64>,
}

impl SamplingMask {
    pub fn empty(n: usize) -> Self {
        SamplingMask { n, lines: BTreeSet::new() }
    }

    pub fn full(n: usize) -> Self {
        let half = n as i64 / 2;
        SamplingMask { n, lines: (-half..half).collect() }
    }

    pub fn from_lines(n: usize, lines: impl IntoIterator<Item = i64>) -> Result<Self> {
        let half = n as i64 / 2;
        let mut set = BTreeSet::new();
        for ky in lines {
            if ky < -half || ky >= half {
                return Err(Error::DimensionMismatch { expected: n, got: ky.unsigned_abs() as usize });
            }
            set.insert(ky);
        }
        Ok(SamplingMask { n, lines: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn contains(&self, ky: i64) -> bool {
        self.lines.contains(&ky)
    }

    pub fn insert(&mut self, ky: i64) -> bool {
        let half = self.n as i64 / 2;
        assert!(ky >= -half && ky < half, "line {ky} out of range for n={}", self.n);
        self.lines.insert(ky)
    }

    /// Lines in ascending centered order.
    pub fn lines(&self) -> impl Iterator<Item = i64> + '_ {
        self.lines.iter().copied()
    }

    pub fn unacquired(&self) -> Vec<i64> {
        let half = self.n as i64 / 2;
        (-half..half).filter(|ky| !self.lines.contains(ky)).collect()
    }
}

/// Discrete probability density over the n k-space line indices.
/// Entry `i` corresponds to centered index `i - n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinePdf {
    n: usize,
    prob: Vec<f64>,
}

impl LinePdf {
    /// Normalizes a nonnegative weight vector. All-zero weights fall back
    /// to the uniform density.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let n = weights.len();
        assert!(n > 0);
        let total: f64 = weights.iter().sum();
        let prob = if total > 0.0 && total.is_finite() {
            weights.iter().map(|w| w.max(0.0) / total).collect()
        } else {
            vec![1.0 / n as f64; n]
        };
        LinePdf { n, prob }
    }

    pub fn uniform(n: usize) -> Self {
        LinePdf { n, prob: vec![1.0 / n as f64; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn prob_at(&self, ky: i64) -> f64 {
        self.prob[centered_to_row(ky, self.n)]
    }

    /// Two-column CSV (k_y, prob) for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_y,prob\n");
        for (row, p) in self.prob.iter().enumerate() {
            out.push_str(&format!("{},{:.12e}\n", row_to_centered(row, self.n), p));
        }
        out
    }
}

/// Variable-density kinds of Table 1's first column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableDensity {
    Vd,
    Vds,
}

/// Adaptive-density kinds of Table 1's second column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaptiveDensity {
    R,
    Nd,
    A,
}

/// Reconstruction algorithm of Table 1's third column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    LacsMri,
    L1W,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::LacsMri => write!(f, "LACS-MRI"),
            Algorithm::L1W => write!(f, "L1-W"),
        }
    }
}

/// One row of the 22-case reference table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub case_id: u32,
    pub vd: Option<VariableDensity>,
    pub ad: Option<AdaptiveDensity>,
    pub algo: Algorithm,
}

const CASE_TABLE: [(Option<VariableDensity>, Option<AdaptiveDensity>, Algorithm); 22] = {
    use AdaptiveDensity::*;
    use Algorithm::*;
    use VariableDensity::*;
    [
        (Some(Vd), Some(R), LacsMri),    // 1
        (Some(Vds), Some(R), LacsMri),   // 2
        (Some(Vd), None, LacsMri),       // 3
        (Some(Vds), None, LacsMri),      // 4
        (None, Some(R), LacsMri),        // 5
        (None, Some(A), LacsMri),        // 6
        (Some(Vd), Some(A), LacsMri),    // 7
        (Some(Vds), Some(A), LacsMri),   // 8
        (Some(Vd), Some(R), L1W),        // 9
        (Some(Vds), Some(R), L1W),       // 10
        (Some(Vd), None, L1W),           // 11
        (Some(Vds), None, L1W),          // 12
        (None, Some(R), L1W),            // 13
        (None, Some(A), L1W),            // 14
        (Some(Vd), Some(A), L1W),        // 15
        (Some(Vds), Some(A), L1W),       // 16
        (Some(Vd), Some(Nd), LacsMri),   // 17
        (Some(Vds), Some(Nd), LacsMri),  // 18
        (None, Some(Nd), LacsMri),       // 19
        (Some(Vd), Some(Nd), L1W),       // 20
        (Some(Vds), Some(Nd), L1W),      // 21
        (None, Some(Nd), L1W),           // 22
    ]
};

/// Looks up the (variable density, adaptive density, algorithm) triple for
/// a case id in 1..=22.
pub fn case_lookup(case_id: u32) -> Result<CaseSpec> {
    if case_id == 0 || case_id > 22 {
        return Err(Error::UnknownCase(case_id));
    }
    let (vd, ad, algo) = CASE_TABLE[(case_id - 1) as usize];
    Ok(CaseSpec { case_id, vd, ad, algo })
}

/// Which sparsifying transform the solvers use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsifierKind {
    Wavelet,
    Gradient,
}

/// Wavelet family for `SparsifierKind::Wavelet`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFamily {
    Haar,
    Db4,
}

/// Full experiment configuration. Solver parameters that the underlying
/// method leaves open (lambda, epsilon1, threshold decay, ...) are all
/// exposed here and reported in output metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case_id: u32,
    /// Compression level: fraction of k-space lines acquired, in (0, 1].
    pub eta: f64,
    /// Number of sampling rounds N.
    pub num_iterations: usize,
    pub trials: usize,
    /// Variable-density exponent p.
    pub p: f64,
    /// Cap constant C of the capped power-law density.
    pub vds_c: f64,
    /// Weight of the reference-similarity term.
    pub lambda: f64,
    /// Threshold of the two-branch sparsity weight update.
    pub epsilon1: f64,
    pub sparsifier: SparsifierKind,
    pub wavelet: WaveletFamily,
    pub seed: u64,
    /// Linear intensity scale applied to the follow-up relative to the
    /// reference; `None` disables the scale-correction pipeline.
    pub grayscale_c: Option<f64>,
    /// Use modulus sums instead of raw complex sums in the scale estimator.
    pub gsc_modulus_sums: bool,
    /// Data-consistency penalty weight; 1.0 means hard projection.
    pub mu: f64,
    /// Geometric decay factor of the soft-threshold schedule.
    pub threshold_decay: f64,
    /// Maximum inner solver iterations per round.
    pub max_iter: usize,
    /// Fixed mixture weight for L1-W pipelines (no weight matrices there).
    pub gamma_l1w: f64,
    /// Trace budget of the relaxed adaptive design; `None` derives it from
    /// the per-round measurement count.
    pub eps_tr: Option<f64>,
    /// Standard deviation of additive complex Gaussian acquisition noise.
    pub noise_std: f64,
    /// RSNR value reported when the error norm underflows.
    pub rsnr_cap_db: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            case_id: 1,
            eta: 0.12,
            num_iterations: 3,
            trials: 50,
            p: 1.0,
            vds_c: 1.0,
            lambda: 0.5,
            epsilon1: 0.1,
            sparsifier: SparsifierKind::Wavelet,
            wavelet: WaveletFamily::Db4,
            seed: 0,
            grayscale_c: None,
            gsc_modulus_sums: false,
            mu: 1.0,
            threshold_decay: 0.9,
            max_iter: 100,
            gamma_l1w: 0.5,
            eps_tr: None,
            noise_std: 0.0,
            rsnr_cap_db: 300.0,
        }
    }
}

/// Checks every config invariant against a target grid size, reporting the
/// first violated field.
pub fn validate_config(cfg: &ExperimentConfig, n: usize) -> Result<()> {
    if !(cfg.eta > 0.0 && cfg.eta <= 1.0) {
        return Err(Error::EtaOutOfRange(cfg.eta));
    }
    if cfg.num_iterations == 0 {
        return Err(Error::ConfigParse("num_iterations must be positive".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::ConfigParse("trials must be positive".into()));
    }
    if cfg.eta * (n as f64) < cfg.num_iterations as f64 {
        return Err(Error::TooFewLinesPerRound {
            eta: cfg.eta,
            n,
            rounds: cfg.num_iterations,
        });
    }
    case_lookup(cfg.case_id)?;
    if cfg.p < 0.0 {
        return Err(Error::ConfigParse("p must be nonnegative".into()));
    }
    if cfg.vds_c <= 0.0 {
        return Err(Error::ConfigParse("vds_c must be positive".into()));
    }
    if cfg.lambda < 0.0 {
        return Err(Error::ConfigParse("lambda must be nonnegative".into()));
    }
    if cfg.epsilon1 <= 0.0 {
        return Err(Error::ConfigParse("epsilon1 must be positive".into()));
    }
    if let Some(c) = cfg.grayscale_c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::ConfigParse("grayscale_c must be positive".into()));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses a plain-text `key=value` config file. Lines starting with `#`
    /// and blank lines are skipped; unknown keys are an error.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_pairs(&text)
    }

    pub fn from_str_pairs(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::ConfigParse(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::ConfigParse(format!("line {}: invalid {what} value '{value}'", lineno + 1))
            };
            match key {
                "case_id" => cfg.case_id = value.parse().map_err(|_| bad("case_id"))?,
                "eta" => cfg.eta = value.parse().map_err(|_| bad("eta"))?,
                "num_iterations" => {
                    cfg.num_iterations = value.parse().map_err(|_| bad("num_iterations"))?
                }
                "trials" => cfg.trials = value.parse().map_err(|_| bad("trials"))?,
                "p" => cfg.p = value.parse().map_err(|_| bad("p"))?,
                "vds_c" => cfg.vds_c = value.parse().map_err(|_| bad("vds_c"))?,
                "lambda" => cfg.lambda = value.parse().map_err(|_| bad("lambda"))?,
                "epsilon1" => cfg.epsilon1 = value.parse().map_err(|_| bad("epsilon1"))?,
                "sparsifier" => {
                    cfg.sparsifier = match value {
                        "wavelet" => SparsifierKind::Wavelet,
                        "gradient" => SparsifierKind::Gradient,
                        _ => return Err(bad("sparsifier")),
                    }
                }
                "wavelet" => {
                    cfg.wavelet = match value {
                        "haar" => WaveletFamily::Haar,
                        "db4" => WaveletFamily::Db4,
                        _ => return Err(bad("wavelet")),
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "grayscale_c" => {
                    cfg.grayscale_c = Some(value.parse().map_err(|_| bad("grayscale_c"))?)
                }
                "gsc_modulus_sums" => {
                    cfg.gsc_modulus_sums = value.parse().map_err(|_| bad("gsc_modulus_sums"))?
                }
                "mu" => cfg.mu = value.parse().map_err(|_| bad("mu"))?,
                "threshold_decay" => {
                    cfg.threshold_decay = value.parse().map_err(|_| bad("threshold_decay"))?
                }
                "max_iter" => cfg.max_iter = value.parse().map_err(|_| bad("max_iter"))?,
                "gamma_l1w" => cfg.gamma_l1w = value.parse().map_err(|_| bad("gamma_l1w"))?,
                "eps_tr" => cfg.eps_tr = Some(value.parse().map_err(|_| bad("eps_tr"))?),
                "noise_std" => cfg.noise_std = value.parse().map_err(|_| bad("noise_std"))?,
                "rsnr_cap_db" => cfg.rsnr_cap_db = value.parse().map_err(|_| bad("rsnr_cap_db"))?,
                _ => {
                    return Err(Error::ConfigParse(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Lines drawn per round.
    pub fn lines_per_round(&self, n: usize) -> usize {
        ((self.eta * n as f64) / self.num_iterations as f64).ceil() as usize
    }
}
