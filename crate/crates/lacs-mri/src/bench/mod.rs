//! Benchmark harness: RSNR metric, the 22-case runner, parameter sweeps
//! and deterministic CSV emission.

mod pgm;
mod phantom;

pub use pgm::{load_image, save_image};
pub use phantom::{shepp_logan, PhantomSpec, TumorSpec};

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grayscale::lacs_mri_sc;
use crate::model::{case_lookup, Algorithm, CaseSpec, ExperimentConfig, Image};
use crate::recon::{l1w_pipeline, lacs_mri, RunResult};

/// Aggregate over the trials of one (case, eta) point.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case_id: u32,
    pub eta: f64,
    pub mean_rsnr_db: f64,
    pub std_rsnr_db: f64,
    pub trials: usize,
    pub runtime_seconds: f64,
}

/// One per-round CSV row of the trial trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub case_id: u32,
    pub eta: f64,
    pub trial: usize,
    pub round: usize,
    pub gamma: f64,
    pub c_estimate: f64,
    pub rsnr_db: f64,
}

/// One point of the p/C sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PcRow {
    pub p: f64,
    pub c: f64,
    pub mean_rsnr_db: f64,
    pub std_rsnr_db: f64,
}

/// One point of the grayscale sweep: scale-corrected and uncorrected means.
#[derive(Debug, Clone, PartialEq)]
pub struct GsRow {
    pub c: f64,
    pub eta: f64,
    pub sc_mean_rsnr_db: f64,
    pub sc_std_rsnr_db: f64,
    pub nsc_mean_rsnr_db: f64,
    pub nsc_std_rsnr_db: f64,
}

/// Reconstruction SNR in dB: 20 log10(||x*|| / ||x* - x_hat||), capped when
/// the error norm underflows.
pub fn rsnr(x_true: &Image, x_hat: &Image, cap_db: f64) -> Result<f64> {
    if x_true.n() != x_hat.n() {
        return Err(Error::DimensionMismatch { expected: x_true.n(), got: x_hat.n() });
    }
    let signal = x_true.frob_norm();
    if signal == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let err = (x_true.pixels() - x_hat.pixels())
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    if err == 0.0 {
        return Ok(cap_db);
    }
    Ok((20.0 * (signal / err).log10()).min(cap_db))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Runs `cfg.trials` independent seeded trials of one case. Trials run in
/// parallel; results come back sorted by trial index.
fn run_trials(
    spec: CaseSpec,
    truth: &Image,
    reference: &Image,
    cfg: &ExperimentConfig,
    scale_correct: bool,
) -> Result<Vec<(usize, RunResult)>> {
    let mut runs: Vec<(usize, RunResult)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut tcfg = cfg.clone();
            tcfg.seed = cfg.seed.wrapping_add(t as u64);
            let run = match (spec.algo, scale_correct) {
                (Algorithm::L1W, _) => l1w_pipeline(truth, reference, &tcfg, spec.vd, spec.ad)?,
                (Algorithm::LacsMri, false) => {
                    lacs_mri(truth, reference, &tcfg, spec.vd, spec.ad)?
                }
                (Algorithm::LacsMri, true) => {
                    lacs_mri_sc(truth, reference, &tcfg, spec.vd, spec.ad)?
                }
            };
            Ok((t, run))
        })
        .collect::<Result<Vec<_>>>()?;
    runs.sort_by_key(|(t, _)| *t);
    Ok(runs)
}

fn aggregate(case_id: u32, cfg: &ExperimentConfig, runs: &[(usize, RunResult)], secs: f64) -> (CaseResult, Vec<TrialRow>) {
    let finals: Vec<f64> = runs
        .iter()
        .map(|(_, r)| r.trace.last().expect("at least one round").rsnr_db)
        .collect();
    let (mean, std) = mean_std(&finals);
    let rows = runs
        .iter()
        .flat_map(|(t, r)| {
            r.trace.iter().map(move |rec| TrialRow {
                case_id,
                eta: cfg.eta,
                trial: *t,
                round: rec.round,
                gamma: rec.gamma,
                c_estimate: rec.c_estimate,
                rsnr_db: rec.rsnr_db,
            })
        })
        .collect();
    (
        CaseResult {
            case_id,
            eta: cfg.eta,
            mean_rsnr_db: mean,
            std_rsnr_db: std,
            trials: cfg.trials,
            runtime_seconds: secs,
        },
        rows,
    )
}

/// Runs one Table-1 case: dispatches on the case triple, simulates the
/// follow-up intensity scale when `grayscale_c` is set (with scale
/// correction for the adaptive algorithm), and aggregates per-trial RSNR.
pub fn run_case(
    case_id: u32,
    reference: &Image,
    followup: &Image,
    cfg: &ExperimentConfig,
) -> Result<(CaseResult, Vec<TrialRow>)> {
    let spec = case_lookup(case_id)?;
    let mut cfg = cfg.clone();
    cfg.case_id = case_id;
    let truth = match cfg.grayscale_c {
        Some(c) => followup.scaled(c),
        None => followup.clone(),
    };
    let scale_correct = cfg.grayscale_c.is_some() && spec.algo == Algorithm::LacsMri;
    let start = Instant::now();
    let runs = run_trials(spec, &truth, reference, &cfg, scale_correct)?;
    Ok(aggregate(case_id, &cfg, &runs, start.elapsed().as_secs_f64()))
}

/// Caps the round count at the feasible line budget for one compression
/// level, so a single sweep can cross levels whose budgets support
/// different round counts. Infeasible levels are left to validation.
fn clamp_rounds(cfg: &ExperimentConfig, eta: f64, n: usize) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.eta = eta;
    let feasible = (eta * n as f64).floor() as usize;
    if feasible >= 1 {
        c.num_iterations = c.num_iterations.min(feasible);
    }
    c
}

/// Runs every (case, eta) pair of a compression-level sweep.
pub fn sweep_eta(
    case_ids: &[u32],
    eta_list: &[f64],
    reference: &Image,
    followup: &Image,
    cfg: &ExperimentConfig,
) -> Result<(Vec<CaseResult>, Vec<TrialRow>)> {
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for &case_id in case_ids {
        for &eta in eta_list {
            let c = clamp_rounds(cfg, eta, reference.n());
            let (res, r) = run_case(case_id, reference, followup, &c)?;
            results.push(res);
            rows.extend(r);
        }
    }
    Ok((results, rows))
}

/// Capped power-law sweep: adaptive reconstruction with the 2D variable
/// density (case 4) per (p, C) grid point.
pub fn sweep_p_c(
    p_list: &[f64],
    c_list: &[f64],
    reference: &Image,
    followup: &Image,
    cfg: &ExperimentConfig,
) -> Result<Vec<PcRow>> {
    let mut rows = Vec::new();
    for &p in p_list {
        for &c in c_list {
            let mut pcfg = cfg.clone();
            pcfg.p = p;
            pcfg.vds_c = c;
            let (res, _) = run_case(4, reference, followup, &pcfg)?;
            rows.push(PcRow {
                p,
                c,
                mean_rsnr_db: res.mean_rsnr_db,
                std_rsnr_db: res.std_rsnr_db,
            });
        }
    }
    Ok(rows)
}

/// Grayscale sweep: for every (c, eta) runs the scale-corrected and the
/// uncorrected adaptive pipeline on the follow-up scaled by c.
pub fn sweep_grayscale(
    c_list: &[f64],
    eta_list: &[f64],
    reference: &Image,
    followup: &Image,
    cfg: &ExperimentConfig,
) -> Result<Vec<GsRow>> {
    let spec = case_lookup(cfg.case_id)?;
    if spec.algo != Algorithm::LacsMri {
        return Err(Error::ConfigParse(
            "grayscale sweep requires an adaptive (LACS-MRI) case".into(),
        ));
    }
    let mut rows = Vec::new();
    for &c in c_list {
        for &eta in eta_list {
            let mut gcfg = clamp_rounds(cfg, eta, reference.n());
            gcfg.grayscale_c = Some(c);
            let truth = followup.scaled(c);
            let start = Instant::now();
            let sc = run_trials(spec, &truth, reference, &gcfg, true)?;
            let nsc = run_trials(spec, &truth, reference, &gcfg, false)?;
            let _ = start;
            let (sc_res, _) = aggregate(cfg.case_id, &gcfg, &sc, 0.0);
            let (nsc_res, _) = aggregate(cfg.case_id, &gcfg, &nsc, 0.0);
            rows.push(GsRow {
                c,
                eta,
                sc_mean_rsnr_db: sc_res.mean_rsnr_db,
                sc_std_rsnr_db: sc_res.std_rsnr_db,
                nsc_mean_rsnr_db: nsc_res.mean_rsnr_db,
                nsc_std_rsnr_db: nsc_res.std_rsnr_db,
            });
        }
    }
    Ok(rows)
}

/// Fixed-schema per-round trace CSV.
pub fn trial_rows_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from("case_id,eta,trial,round,gamma,c_estimate,rsnr_db\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{},{},{:.9},{:.9},{:.6}\n",
            r.case_id, r.eta, r.trial, r.round, r.gamma, r.c_estimate, r.rsnr_db
        ));
    }
    out
}

/// Per-(case, eta) aggregate CSV. Runtime is excluded so identical seeds
/// yield byte-identical files.
pub fn case_results_csv(results: &[CaseResult]) -> String {
    let mut out = String::from("case_id,eta,trials,mean_rsnr_db,std_rsnr_db\n");
    for r in results {
        out.push_str(&format!(
            "{},{:.6},{},{:.6},{:.6}\n",
            r.case_id, r.eta, r.trials, r.mean_rsnr_db, r.std_rsnr_db
        ));
    }
    out
}

pub fn pc_rows_csv(rows: &[PcRow]) -> String {
    let mut out = String::from("p,c,mean_rsnr_db,std_rsnr_db\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            r.p, r.c, r.mean_rsnr_db, r.std_rsnr_db
        ));
    }
    out
}

pub fn gs_rows_csv(rows: &[GsRow]) -> String {
    let mut out =
        String::from("c,eta,sc_mean_rsnr_db,sc_std_rsnr_db,nsc_mean_rsnr_db,nsc_std_rsnr_db\n");
    for r in rows {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.c, r.eta, r.sc_mean_rsnr_db, r.sc_std_rsnr_db, r.nsc_mean_rsnr_db,
            r.nsc_std_rsnr_db
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn phantom_pair() -> (Image, Image) {
        shepp_logan(&PhantomSpec::default()).unwrap()
    }

    #[test]
    fn rsnr_exact_match_hits_cap() {
        let (img, _) = phantom_pair();
        assert_eq!(rsnr(&img, &img, 300.0).unwrap(), 300.0);
    }

    #[test]
    fn rsnr_zero_estimate_is_zero_db() {
        let (img, _) = phantom_pair();
        let z = Image::zeros(img.n());
        assert!(rsnr(&img, &z, 300.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rsnr_uniform_one_percent_error_is_40_db() {
        let (img, _) = phantom_pair();
        let scaled = img.scaled(1.01);
        let got = rsnr(&img, &scaled, 300.0).unwrap();
        assert!((got - 40.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn rsnr_rejects_zero_truth() {
        let z = Image::zeros(8);
        assert!(matches!(rsnr(&z, &z, 300.0), Err(Error::ZeroTruth)));
    }

    #[test]
    fn rsnr_rejects_dimension_mismatch() {
        let a = Image::zeros(8);
        let b = Image::new(Array2::from_elem((4, 4), 1.0)).unwrap();
        assert!(matches!(rsnr(&b, &a, 300.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn run_case_is_deterministic() {
        let (reference, followup) = phantom_pair();
        let cfg = ExperimentConfig {
            eta: 0.12,
            trials: 2,
            max_iter: 20,
            seed: 7,
            ..Default::default()
        };
        let a = run_case(3, &reference, &followup, &cfg).unwrap();
        let b = run_case(3, &reference, &followup, &cfg).unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(trial_rows_csv(&a.1), trial_rows_csv(&b.1));
        assert_eq!(a.0.mean_rsnr_db, b.0.mean_rsnr_db);
    }

    #[test]
    fn run_case_mean_lies_within_trial_range() {
        let (reference, followup) = phantom_pair();
        let cfg = ExperimentConfig {
            eta: 0.12,
            trials: 4,
            max_iter: 20,
            ..Default::default()
        };
        let (res, rows) = run_case(1, &reference, &followup, &cfg).unwrap();
        let finals: Vec<f64> = rows
            .iter()
            .filter(|r| r.round == cfg.num_iterations)
            .map(|r| r.rsnr_db)
            .collect();
        assert_eq!(finals.len(), 4);
        let lo = finals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(res.mean_rsnr_db >= lo - 1e-12 && res.mean_rsnr_db <= hi + 1e-12);
    }

    #[test]
    fn run_case_full_sampling_recovers() {
        let (reference, followup) = phantom_pair();
        let cfg = ExperimentConfig {
            eta: 1.0,
            trials: 1,
            max_iter: 30,
            ..Default::default()
        };
        for case_id in [3u32, 11] {
            let (res, _) = run_case(case_id, &reference, &followup, &cfg).unwrap();
            assert!(res.mean_rsnr_db >= 60.0, "case {case_id}: {}", res.mean_rsnr_db);
        }
    }

    #[test]
    fn sweep_eta_shapes() {
        let (reference, followup) = phantom_pair();
        let cfg = ExperimentConfig {
            trials: 1,
            max_iter: 10,
            ..Default::default()
        };
        let (empty, _) = sweep_eta(&[3], &[], &reference, &followup, &cfg).unwrap();
        assert!(empty.is_empty());
        let etas = [0.12, 0.21];
        let (rows, _) = sweep_eta(&[3, 11], &etas, &reference, &followup, &cfg).unwrap();
        assert_eq!(rows.len(), 4);
    }

    #[test]
    fn grayscale_sweep_rejects_l1w_case() {
        let (reference, followup) = phantom_pair();
        let cfg = ExperimentConfig { case_id: 11, trials: 1, ..Default::default() };
        assert!(sweep_grayscale(&[0.5], &[0.12], &reference, &followup, &cfg).is_err());
    }

    #[test]
    fn csv_headers_are_schema_stable() {
        assert!(trial_rows_csv(&[]).starts_with("case_id,eta,trial,round,gamma,c_estimate,rsnr_db\n"));
        assert!(case_results_csv(&[]).starts_with("case_id,eta,trials,mean_rsnr_db,std_rsnr_db\n"));
        assert!(pc_rows_csv(&[]).starts_with("p,c,mean_rsnr_db,std_rsnr_db\n"));
        assert!(gs_rows_csv(&[]).starts_with("c,eta,sc_mean_rsnr_db,"));
    }
}
