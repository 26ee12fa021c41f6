//! `dockforge`: batch workflows over the dockforge library.
//!
//! Every subcommand writes only below its `--out` directory and appends a
//! run record to `<out>/manifest.json`. Exit status is 0 on success, 1 when
//! the pipeline fails and 2 for usage errors.

mod commands;
mod config;
mod error;
mod logging;
mod manifest;
mod workspace;

use clap::{Parser, Subcommand};
use commands::{EvalArgs, GenDataArgs, ScreenArgs, TrainArgs};
use error::CliError;
use manifest::RunManifest;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "dockforge",
    version,
    about = "Docking, pose denoising, evaluation and scaling sweeps"
)]
struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Base random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit debug-level log events.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate toy complexes with planted binding poses.
    GenToy {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dock sampled receptor-ligand pairs into sharded training data.
    GenData {
        #[arg(long)]
        receptors: PathBuf,
        #[arg(long)]
        ligands: PathBuf,
        /// JSON map from receptor name to pocket; other receptors get
        /// detected pockets.
        #[arg(long)]
        pockets: Option<PathBuf>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on docked poses from `gen-data`.
    Pretrain {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        receptors: PathBuf,
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        model_size: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on reference poses of a complex directory.
    Finetune {
        #[arg(long)]
        complexes: PathBuf,
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        model_size: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict and rank poses for every complex of a directory.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        complexes: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted poses against references.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// FASTA of training receptor sequences, for identity bins.
        #[arg(long)]
        train_seqs: Option<PathBuf>,
        /// JSON map from case id to family label.
        #[arg(long)]
        families: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank a ligand library against one receptor and report enrichment.
    Screen {
        #[arg(long)]
        receptor: PathBuf,
        /// JSON pocket; the top detected pocket otherwise.
        #[arg(long)]
        pocket: Option<PathBuf>,
        #[arg(long)]
        ligands: PathBuf,
        /// File listing active ligand ids, one per line.
        #[arg(long)]
        actives: PathBuf,
        /// Score with model predictions instead of minidock.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run model-size or data-size sweeps and fit power laws.
    Scaling {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenToy { .. } => "gen-toy",
            Command::GenData { .. } => "gen-data",
            Command::Pretrain { .. } => "pretrain",
            Command::Finetune { .. } => "finetune",
            Command::Predict { .. } => "predict",
            Command::Eval { .. } => "eval",
            Command::Screen { .. } => "screen",
            Command::Scaling { .. } => "scaling",
        }
    }

    fn out(&self) -> &PathBuf {
        match self {
            Command::GenToy { out, .. }
            | Command::GenData { out, .. }
            | Command::Pretrain { out, .. }
            | Command::Finetune { out, .. }
            | Command::Predict { out, .. }
            | Command::Eval { out, .. }
            | Command::Screen { out, .. }
            | Command::Scaling { out, .. } => out,
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Domain(format!("cannot start worker pool: {e}")))?;
    let cfg = config::load(cli.config.as_deref())?;
    let seed = cli.seed.unwrap_or(0);
    let out = cli.command.out().clone();
    let started_at = now();
    log::info!("{} started, {} workers", cli.command.name(), workers);

    let outcome = match &cli.command {
        Command::GenToy { n, out } => commands::gen_toy(*n, seed, out, &cfg)?,
        Command::GenData {
            receptors,
            ligands,
            pockets,
            pairs,
            out,
        } => commands::gen_data(
            GenDataArgs {
                receptors,
                ligands,
                pockets: pockets.as_deref(),
                pairs: *pairs,
            },
            seed,
            out,
            &cfg,
        )?,
        Command::Pretrain {
            data,
            receptors,
            init,
            model_size,
            steps,
            out,
        } => commands::pretrain(
            data,
            receptors,
            TrainArgs {
                init: init.as_deref(),
                model_size: *model_size,
                steps: *steps,
            },
            seed,
            out,
            &cfg,
        )?,
        Command::Finetune {
            complexes,
            init,
            model_size,
            steps,
            out,
        } => commands::finetune(
            complexes,
            TrainArgs {
                init: init.as_deref(),
                model_size: *model_size,
                steps: *steps,
            },
            seed,
            out,
            &cfg,
        )?,
        Command::Predict {
            model,
            complexes,
            samples,
            out,
        } => commands::predict_cmd(model, complexes, *samples, seed, out, &cfg)?,
        Command::Eval {
            pred,
            reference,
            train_seqs,
            families,
            out,
        } => commands::eval(
            EvalArgs {
                pred,
                reference,
                train_seqs: train_seqs.as_deref(),
                families: families.as_deref(),
            },
            out,
        )?,
        Command::Screen {
            receptor,
            pocket,
            ligands,
            actives,
            model,
            out,
        } => commands::screen(
            ScreenArgs {
                receptor,
                pocket: pocket.as_deref(),
                ligands,
                actives,
                model: model.as_deref(),
            },
            seed,
            out,
            &cfg,
        )?,
        Command::Scaling { spec, out } => commands::scaling(spec, cli.seed, out)?,
    };

    let input_refs: Vec<&std::path::Path> = outcome.inputs.iter().map(PathBuf::as_path).collect();
    let mut inputs = manifest::checksum_inputs(&input_refs)?;
    if let Some(c) = &cli.config {
        inputs.insert(c.display().to_string(), manifest::sha256_file(c)?);
    }
    let record = RunManifest {
        command: cli.command.name().into(),
        args: std::env::args().skip(1).collect(),
        config: outcome.config,
        tool_version: dockforge::TOOL_VERSION.into(),
        seeds: outcome.seeds,
        workers,
        inputs,
        outputs: manifest::checksum_outputs(&out)?,
        started_at,
        finished_at: now(),
    };
    manifest::append(&out, record)?;
    log::info!("{} finished", cli.command.name());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    logging::init(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{}", e.to_string().trim_end());
            eprint!("{e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
