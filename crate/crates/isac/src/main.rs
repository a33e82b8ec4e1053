use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use irs_isac::config::ExperimentConfig;
use irs_isac::format::{load_dataset, save_dataset, save_model};
use irs_isac::harness::{
    chain_dataset, complexity_csv, dataset_path, evaluate, full_scale, history_csv, history_path, load_chain,
    model_path, nmse_csv, reproduce_figure, train_model, write_csv, EstimatorBank,
};
use irs_isac_core::estimator::{ChannelEstimator, LsEstimator};
use irs_isac_core::features::Standardizer;
use irs_isac_core::protocol::build_plan;
use irs_isac_core::{PairType, Stage};

#[derive(Parser)]
#[command(name = "irs-isac", version, about = "Three-stage channel estimation for IRS-assisted ISAC")]
struct Cli {
    /// JSON experiment configuration; defaults apply to omitted fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a training set for one stage and pair type.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        stage: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        pair: u32,
        /// Take earlier-stage estimates from LS instead of saved models.
        #[arg(long)]
        ls_priors: bool,
    },
    /// Train the network of one stage and pair type.
    Train {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        stage: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        pair: u32,
        /// Train on this dataset file instead of generating one.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Monte-Carlo NMSE of the configured estimator over the test SNR grid.
    Evaluate,
    /// Write the operation-count table.
    Complexity,
    /// Run one figure sweep (5, 6, 7 or 8).
    ReproduceFigure {
        figure: u32,
        /// Use the full-scale L, V and U.
        #[arg(long)]
        full: bool,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    Ok((cfg, out))
}

fn stage_pair(stage: u32, pair: u32) -> anyhow::Result<(Stage, PairType)> {
    Ok((Stage::from_index(stage)?, PairType::from_index(pair)?))
}

fn priors_source(
    out: &Path,
    cfg: &ExperimentConfig,
    stage: Stage,
    pair: PairType,
    ls_priors: bool,
) -> anyhow::Result<Box<dyn ChannelEstimator>> {
    let sys = cfg.system()?;
    let plan = build_plan(&sys)?;
    if ls_priors {
        return Ok(Box::new(LsEstimator::from_plan(&plan)?));
    }
    Ok(Box::new(load_chain(out, &sys, &plan, pair, stage.index() as usize - 1)?))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (mut cfg, out) = load_config(&cli)?;
    match cli.command {
        Command::Simulate { stage, pair, ls_priors } => {
            let (stage, pair) = stage_pair(stage, pair)?;
            let sys = cfg.system()?;
            let plan = build_plan(&sys)?;
            let priors = priors_source(&out, &cfg, stage, pair, ls_priors)?;
            let set = chain_dataset(&cfg, &sys, &plan, stage, pair, &cfg.train_snr_grid_db, 0, priors.as_ref())?;
            let scaler = Standardizer::fit(&set.samples)?;
            let path = dataset_path(&out, stage, pair);
            save_dataset(&path, &set, &scaler, sys.delta)?;
            println!("wrote {} ({} pairs)", path.display(), set.len());
        }
        Command::Train { stage, pair, dataset } => {
            let (stage, pair) = stage_pair(stage, pair)?;
            let sys = cfg.system()?;
            let set = match dataset {
                Some(path) => {
                    let (set, _, _) = load_dataset(&path).with_context(|| format!("loading {}", path.display()))?;
                    anyhow::ensure!(
                        set.stage == stage && set.pair == pair,
                        "{} holds stage {} / pair {} data",
                        path.display(),
                        set.stage.index(),
                        set.pair.index()
                    );
                    set
                }
                None => {
                    let plan = build_plan(&sys)?;
                    let priors = priors_source(&out, &cfg, stage, pair, false)?;
                    chain_dataset(&cfg, &sys, &plan, stage, pair, &cfg.train_snr_grid_db, 0, priors.as_ref())?
                }
            };
            let (model, history) = train_model(&cfg, &set, sys.delta, 0)?;
            let path = model_path(&out, stage, pair);
            save_model(&path, &model)?;
            write_csv(&history_path(&out, stage, pair), &history_csv(&history))?;
            println!(
                "wrote {} (best validation MSE {:?} after epoch {})",
                path.display(),
                history.best_val_mse,
                history.best_epoch
            );
        }
        Command::Evaluate => {
            let sys = cfg.system()?;
            let plan = build_plan(&sys)?;
            let est: Box<dyn ChannelEstimator> = match cfg.estimator.pair() {
                None => Box::new(LsEstimator::from_plan(&plan)?),
                Some(pair) => Box::new(load_chain(&out, &sys, &plan, pair, 3)?),
            };
            let banks = [EstimatorBank::single(cfg.estimator.label(), est)];
            let rows = evaluate(&sys, &plan, &banks, &cfg.test_snr_grid_db, cfg.t_on, cfg.seed)?;
            let path = out.join(format!("nmse_{}.csv", cfg.estimator.label()));
            write_csv(&path, &nmse_csv(&rows))?;
            println!("wrote {}", path.display());
        }
        Command::Complexity => {
            let path = out.join("complexity.csv");
            write_csv(&path, &complexity_csv()?)?;
            println!("wrote {}", path.display());
        }
        Command::ReproduceFigure { figure, full } => {
            if full {
                full_scale(&mut cfg);
            }
            let csv = reproduce_figure(figure, &cfg, full)?;
            let path = out.join(format!("figure{figure}.csv"));
            write_csv(&path, &csv)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
