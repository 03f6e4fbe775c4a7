//! Grayscale correction: running estimate of the linear intensity scale
//! between the follow-up acquisition and the reference, and the corrected
//! reconstruction pipeline.

use crate::error::{Error, Result};
use crate::model::{AdaptiveDensity, Algorithm, ExperimentConfig, Image, VariableDensity};
use crate::recon::{run_pipeline, MeasurementOracle, PipelineSpec, RunResult};
use crate::transforms::MeasuredLines;

/// Running average of the per-round scale ratios. Before the first counted
/// round the scale is the neutral 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    c: f64,
    rounds: usize,
}

impl Default for ScaleEstimate {
    fn default() -> Self {
        Self::new()
    }
}

impl ScaleEstimate {
    pub fn new() -> Self {
        ScaleEstimate { c: 1.0, rounds: 0 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

/// Folds one round of measurements into the scale estimate. The raw ratio
/// is the real part of (sum of follow-up samples) / (sum of reference
/// samples), or the ratio of modulus sums when `modulus_sums` is set; the
/// estimate is the running average of the per-round ratios.
pub fn gsc_update(
    measured: &MeasuredLines,
    reference: &MeasuredLines,
    prev: &ScaleEstimate,
    modulus_sums: bool,
) -> Result<ScaleEstimate> {
    if measured.n() != reference.n() {
        return Err(Error::DimensionMismatch { expected: reference.n(), got: measured.n() });
    }
    let ratio = if modulus_sums {
        let denom = reference.modulus_sum();
        if denom <= 0.0 {
            return Err(Error::ZeroReferenceEnergy);
        }
        measured.modulus_sum() / denom
    } else {
        let denom = reference.complex_sum();
        if denom.norm() == 0.0 {
            return Err(Error::ZeroReferenceEnergy);
        }
        (measured.complex_sum() / denom).re
    };
    if !ratio.is_finite() {
        return Err(Error::ZeroReferenceEnergy);
    }
    let i = prev.rounds + 1;
    let c = if prev.rounds == 0 {
        ratio
    } else {
        ratio / i as f64 + prev.c * (prev.rounds as f64 / i as f64)
    };
    Ok(ScaleEstimate { c, rounds: i })
}

/// Grayscale-corrected adaptive reconstruction: the reference is rescaled
/// by the running estimate before every solve and weight update.
pub fn lacs_mri_sc(
    x_true: &Image,
    x0: &Image,
    cfg: &ExperimentConfig,
    vd: Option<VariableDensity>,
    ad: Option<AdaptiveDensity>,
) -> Result<RunResult> {
    let oracle = MeasurementOracle::new(x_true, cfg.noise_std);
    run_pipeline(
        &oracle,
        x0,
        cfg,
        &PipelineSpec { vd, ad, algo: Algorithm::LacsMri, scale_correct: true },
        cfg.seed,
    )
}
