//! Benchmark CLI for the adaptive compressed-sensing reconstruction
//! library. Exit codes: 0 success, 2 configuration error, 3 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lacs_mri::bench::{
    case_results_csv, gs_rows_csv, load_image, pc_rows_csv, run_case, save_image, shepp_logan,
    sweep_eta, sweep_grayscale, sweep_p_c, trial_rows_csv, PhantomSpec, TumorSpec,
};
use lacs_mri::error::Error;
use lacs_mri::model::{ExperimentConfig, Image};
use lacs_mri::sampling::{pdf_r, pdf_vd, pdf_vds};
use lacs_mri::transforms::fft2_centered;

#[derive(Parser)]
#[command(name = "lacs-mri", version, about = "Adaptive compressed-sensing MRI benchmark")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// key=value experiment config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base RNG seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference scan (binary PGM). Defaults to the built-in phantom.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    /// Follow-up scan (binary PGM). Defaults to the built-in phantom with tumor.
    #[arg(long)]
    follow: Option<PathBuf>,
    /// Trials per case (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one Table-1 case and emit the per-round trace CSV.
    RunCase {
        /// Case id 1..=22; defaults to the config's case_id.
        #[arg(long)]
        case: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Run cases across a list of compression levels.
    SweepEta {
        #[arg(long, value_delimiter = ',', default_value = "1")]
        cases: Vec<u32>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.03,0.06,0.09,0.12,0.15,0.18,0.21"
        )]
        etas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the capped power-law density parameters (p, C).
    #[command(name = "sweep-p-c")]
    SweepPC {
        #[arg(long = "p-list", value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,1.0,1.5")]
        p_list: Vec<f64>,
        #[arg(long = "c-list", value_delimiter = ',', default_value = "1,0.1,0.01,0.001")]
        c_list: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep follow-up intensity scales with and without correction.
    SweepGrayscale {
        #[arg(
            long = "c-list",
            value_delimiter = ',',
            default_value = "0.25,0.5,0.75,1.0,1.25,1.5,1.75,2.0,2.25,2.5"
        )]
        c_list: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.15")]
        etas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the phantom pair as 16-bit PGM files.
    GenPhantom {
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Tumor as row,col,radius,delta; omit for identical images.
        #[arg(long)]
        tumor: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Dump a line sampling density as CSV.
    PdfDump {
        /// One of: vd, vds, r.
        #[arg(long, default_value = "vd")]
        density: String,
        #[command(flatten)]
        common: Common,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ConfigParse(_)
        | Error::EtaOutOfRange(_)
        | Error::UnknownCase(_)
        | Error::TooFewLinesPerRound { .. } => 2,
        _ => 3,
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        if trials == 0 {
            return Err(Error::ConfigParse("trials must be positive".into()));
        }
        cfg.trials = trials;
    }
    Ok(cfg)
}

fn load_images(common: &Common) -> Result<(Image, Image), Error> {
    let default_pair = || shepp_logan(&PhantomSpec::default());
    match (&common.reference, &common.follow) {
        (None, None) => default_pair(),
        (Some(r), None) => {
            let img = load_image(r)?;
            Ok((img.clone(), img))
        }
        (None, Some(f)) => {
            let img = load_image(f)?;
            Ok((img.clone(), img))
        }
        (Some(r), Some(f)) => Ok((load_image(r)?, load_image(f)?)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_tumor(s: &str) -> Result<TumorSpec, Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::ConfigParse(format!(
            "tumor must be row,col,radius,delta; got '{s}'"
        )));
    }
    let bad = |what: &str| Error::ConfigParse(format!("invalid tumor {what} in '{s}'"));
    Ok(TumorSpec {
        row: parts[0].trim().parse().map_err(|_| bad("row"))?,
        col: parts[1].trim().parse().map_err(|_| bad("col"))?,
        radius: parts[2].trim().parse().map_err(|_| bad("radius"))?,
        delta: parts[3].trim().parse().map_err(|_| bad("delta"))?,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::RunCase { case, common } => {
            let cfg = load_config(&common)?;
            let (reference, followup) = load_images(&common)?;
            let case_id = case.unwrap_or(cfg.case_id);
            let (_, rows) = run_case(case_id, &reference, &followup, &cfg)?;
            emit(&common.out, &trial_rows_csv(&rows))
        }
        Cmd::SweepEta { cases, etas, common } => {
            let cfg = load_config(&common)?;
            let (reference, followup) = load_images(&common)?;
            let (results, _) = sweep_eta(&cases, &etas, &reference, &followup, &cfg)?;
            emit(&common.out, &case_results_csv(&results))
        }
        Cmd::SweepPC { p_list, c_list, common } => {
            let cfg = load_config(&common)?;
            let (reference, followup) = load_images(&common)?;
            let rows = sweep_p_c(&p_list, &c_list, &reference, &followup, &cfg)?;
            emit(&common.out, &pc_rows_csv(&rows))
        }
        Cmd::SweepGrayscale { c_list, etas, common } => {
            let cfg = load_config(&common)?;
            let (reference, followup) = load_images(&common)?;
            let rows = sweep_grayscale(&c_list, &etas, &reference, &followup, &cfg)?;
            emit(&common.out, &gs_rows_csv(&rows))
        }
        Cmd::GenPhantom { n, tumor, common } => {
            let tumor = tumor.as_deref().map(parse_tumor).transpose()?;
            let (reference, followup) = shepp_logan(&PhantomSpec { n, tumor })?;
            let ref_path = common
                .reference
                .clone()
                .unwrap_or_else(|| Path::new("reference.pgm").to_path_buf());
            let follow_path = common
                .follow
                .clone()
                .unwrap_or_else(|| Path::new("followup.pgm").to_path_buf());
            save_image(&reference, &ref_path)?;
            save_image(&followup, &follow_path)?;
            Ok(())
        }
        Cmd::PdfDump { density, common } => {
            let cfg = load_config(&common)?;
            let (reference, _) = load_images(&common)?;
            let n = reference.n();
            let pdf = match density.as_str() {
                "vd" => pdf_vd(n, cfg.p),
                "vds" => pdf_vds(n, cfg.p, cfg.vds_c),
                "r" => pdf_r(&fft2_centered(&reference))?,
                other => {
                    return Err(Error::ConfigParse(format!(
                        "unknown density '{other}' (expected vd, vds or r)"
                    )))
                }
            };
            emit(&common.out, &pdf.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
