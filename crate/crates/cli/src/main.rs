use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use periometry::classify::ModelFamily;
use periometry::Units;
use periometry_cli::classify::ClassifyOptions;
use periometry_cli::evaluate::EvaluateOptions;
use periometry_cli::measure::UnitChoice;
use periometry_cli::{classify, dice, evaluate, measure, synth, Status};

#[derive(Parser)]
#[command(
    name = "periometry",
    version,
    about = "Periorbital measurements from segmentation masks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Rf,
    Gbt,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Px,
    Mm,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render synthetic faces with known measurements.
    Synth {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        disease_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        out_dir: PathBuf,
    },
    /// Measure every face listed in a manifest.
    Measure {
        manifest: PathBuf,
        out_csv: PathBuf,
        #[arg(long, value_enum, default_value_t = UnitChoice::Both)]
        units: UnitChoice,
        /// Skip the in-plane rotation correction.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Dice overlap between predicted and reference masks.
    Dice {
        pred_manifest: PathBuf,
        truth_manifest: PathBuf,
        out_csv: PathBuf,
    },
    /// Agreement of predicted measurements with reference values.
    Evaluate {
        pred_csv: PathBuf,
        truth_csv: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        bilateral_average: bool,
        #[arg(long)]
        filter_brow_outliers: bool,
        /// File of ids to leave out (the baseline's failures when --baseline is given).
        #[arg(long)]
        exclude_ids: Option<PathBuf>,
        /// Measurements from another method to compare against.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Train and test a healthy/disease classifier.
    Classify {
        features_csv: PathBuf,
        labels_csv: PathBuf,
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Family::Rf)]
        model: Family,
        /// JSON hyperparameter grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Training fraction.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, value_enum, default_value_t = UnitArg::Mm)]
        units: UnitArg,
        /// Train without left/right swap augmentation.
        #[arg(long)]
        no_augment: bool,
    },
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PERIOMETRY_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            anyhow::anyhow!("PERIOMETRY_THREADS must be a positive integer, got '{v}'")
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<Status> {
    match cmd {
        Cmd::Synth {
            n,
            disease_fraction,
            seed,
            out_dir,
        } => synth::run(n, disease_fraction, seed, &out_dir),
        Cmd::Measure {
            manifest,
            out_csv,
            units,
            no_normalize,
        } => measure::run(&manifest, &out_csv, units, !no_normalize),
        Cmd::Dice {
            pred_manifest,
            truth_manifest,
            out_csv,
        } => dice::run(&pred_manifest, &truth_manifest, &out_csv),
        Cmd::Evaluate {
            pred_csv,
            truth_csv,
            out_dir,
            bilateral_average,
            filter_brow_outliers,
            exclude_ids,
            baseline,
        } => evaluate::run(
            &pred_csv,
            &truth_csv,
            &out_dir,
            &EvaluateOptions {
                bilateral_average,
                filter_brow_outliers,
                exclude_ids,
                baseline,
            },
        ),
        Cmd::Classify {
            features_csv,
            labels_csv,
            out_dir,
            model,
            grid,
            seed,
            split,
            folds,
            units,
            no_augment,
        } => {
            let family = match model {
                Family::Rf => ModelFamily::Forest,
                Family::Gbt => ModelFamily::Boost,
            };
            let opts = ClassifyOptions {
                grid,
                split,
                folds,
                units: match units {
                    UnitArg::Px => Units::Px,
                    UnitArg::Mm => Units::Mm,
                },
                augment: !no_augment,
                ..ClassifyOptions::new(family, seed)
            };
            classify::run(&features_csv, &labels_csv, &out_dir, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| dispatch(cli.cmd));
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Failed.code())
        }
    }
}
