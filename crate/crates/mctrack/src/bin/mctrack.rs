use clap::{Args, Parser, Subcommand};
use mctrack::evaluate::{evaluate, MatchMode};
use mctrack::flowgraph::{brute_force_map, solve};
use mctrack::io::{
    expand_hypotheses, read_annotations, read_topology, read_tracklets, render_report,
    write_annotations, write_topology, write_tracklets, write_trajectories, IoError, RunConfig,
};
use mctrack::pipeline::{prepare, PipelineError};
use mctrack::synth::{synth_scenario, SynthConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Multi-camera tracklet association and evaluation.
#[derive(Parser)]
#[command(name = "mctrack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Waiting-time threshold in frames
    #[arg(long, env = "MCT_ETA", default_value_t = 1500)]
    eta: i64,
    /// MUG threshold for equalization statistics
    #[arg(long, env = "MCT_EPSILON", default_value_t = 0.4)]
    epsilon: f64,
    /// Appearance feature weight
    #[arg(long, env = "MCT_K1", default_value_t = 1.0)]
    k1: f64,
    /// Motion feature weight
    #[arg(long, env = "MCT_K2", default_value_t = 1.0)]
    k2: f64,
    /// Motion similarity decay
    #[arg(long, env = "MCT_LAMBDA", default_value_t = 0.01)]
    lambda: f64,
    /// Minimum periodic time in frames
    #[arg(long, env = "MCT_GAMMA", default_value_t = 15)]
    gamma: usize,
    /// Box-overlap threshold for evaluation matching
    #[arg(long, env = "MCT_IOU_THRESHOLD", default_value_t = 0.5)]
    iou_threshold: f64,
    /// Disable the same-camera similarity compensation
    #[arg(long, env = "MCT_NO_EQUALIZE")]
    no_equalize: bool,
    /// Probability floor for transition features
    #[arg(long, env = "MCT_P_MIN", default_value_t = 1e-6)]
    p_min: f64,
    /// Seed for scenario generation
    #[arg(long, env = "MCT_SEED", default_value_t = 42)]
    seed: u64,
}

impl ConfigArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            eta: self.eta,
            epsilon: self.epsilon,
            k1: self.k1,
            k2: self.k2,
            lambda: self.lambda,
            gamma: self.gamma,
            iou_threshold: self.iou_threshold,
            equalize: !self.no_equalize,
            p_min: self.p_min,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Associate tracklets into global trajectories
    Track {
        /// Tracklet records file
        #[arg(long, env = "MCT_TRACKLETS")]
        tracklets: PathBuf,
        /// Camera topology document
        #[arg(long, env = "MCT_TOPOLOGY")]
        topology: PathBuf,
        /// Output trajectory file
        #[arg(long, env = "MCT_OUT_TRAJECTORIES")]
        out_trajectories: PathBuf,
        /// Output per-frame hypothesis file
        #[arg(long, env = "MCT_OUT_HYPOTHESES")]
        out_hypotheses: Option<PathBuf>,
        /// Dump the flow graph edge list for external cross-checks
        #[arg(long, env = "MCT_DUMP_GRAPH")]
        dump_graph: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score a hypothesis against ground truth (MCTA)
    Evaluate {
        /// Ground-truth annotation file
        #[arg(long, env = "MCT_GT")]
        gt: PathBuf,
        /// Hypothesis annotation file
        #[arg(long, env = "MCT_HYP")]
        hyp: PathBuf,
        /// Match boxes by identity instead of IoU (ground-truth-detections
        /// protocol; forces precision = recall = 1 when boxes coincide)
        #[arg(long, env = "MCT_IDENTITY_MATCH")]
        identity_match: bool,
        /// Write the report here in addition to stdout
        #[arg(long, env = "MCT_REPORT")]
        report: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Cross-check the solver against exhaustive enumeration (small inputs)
    Oracle {
        #[arg(long, env = "MCT_TRACKLETS")]
        tracklets: PathBuf,
        #[arg(long, env = "MCT_TOPOLOGY")]
        topology: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Generate a deterministic synthetic scenario
    Synth {
        #[arg(long, env = "MCT_OUT_TRACKLETS")]
        out_tracklets: PathBuf,
        #[arg(long, env = "MCT_OUT_TOPOLOGY")]
        out_topology: PathBuf,
        #[arg(long, env = "MCT_OUT_GT")]
        out_gt: PathBuf,
        #[arg(long, env = "MCT_N_CAMERAS", default_value_t = 3)]
        n_cameras: u32,
        #[arg(long, env = "MCT_N_TARGETS", default_value_t = 10)]
        n_targets: u32,
        /// Tracklet fragmentation rate
        #[arg(long, env = "MCT_FRAGMENTATION", default_value_t = 0.3)]
        fragmentation: f64,
        /// Cross-camera appearance shift
        #[arg(long, env = "MCT_SHIFT", default_value_t = 0.25)]
        shift: f64,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

enum CliError {
    Io(IoError),
    Pipeline(PipelineError),
    Input(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Pipeline(e)
    }
}

impl CliError {
    fn category(&self) -> &'static str {
        match self {
            CliError::Io(IoError::Io(_)) => "io",
            CliError::Io(IoError::Json(_)) | CliError::Io(IoError::Parse { .. }) => "parse",
            CliError::Io(IoError::Model(_)) | CliError::Io(IoError::Appearance(_)) => "validate",
            CliError::Pipeline(PipelineError::Model(_)) => "validate",
            CliError::Pipeline(_) => "pipeline",
            CliError::Input(_) => "input",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(e) => e.to_string(),
            CliError::Pipeline(e) => e.to_string(),
            CliError::Input(m) => m.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Track {
            tracklets,
            topology,
            out_trajectories,
            out_hypotheses,
            dump_graph,
            config,
        } => {
            let config = config.to_config();
            let tracklets = read_tracklets(&tracklets)?;
            let topology = read_topology(&topology)?;
            let prepared = prepare(tracklets, topology, &config)?;
            for r in &prepared.rejected {
                eprintln!("rejected tracklet {}: {}", r.id, r.reason);
            }
            if let Some(path) = dump_graph {
                std::fs::write(&path, prepared.graph.dump_edges()).map_err(IoError::Io)?;
            }
            let result = solve(&prepared.graph);
            write_trajectories(&result, &prepared.tracklets, &out_trajectories)?;
            if let Some(path) = out_hypotheses {
                write_annotations(&expand_hypotheses(&result, &prepared.tracklets), &path)?;
            }
            println!(
                "trajectories {} cost {} delta_mu {} delta_sigma {}",
                result.trajectories.len(),
                result.objective_cost,
                prepared.stats.delta_mu,
                prepared.stats.delta_sigma
            );
            Ok(())
        }
        Command::Evaluate {
            gt,
            hyp,
            identity_match,
            report,
            config,
        } => {
            let config = config.to_config();
            let gt = read_annotations(&gt)?;
            let hyp = read_annotations(&hyp)?;
            let mode = if identity_match {
                MatchMode::Identity
            } else {
                MatchMode::Iou(config.iou_threshold)
            };
            let result = evaluate(&gt, &hyp, mode, config.eta);
            let text = render_report(&result, None);
            print!("{text}");
            if let Some(path) = report {
                std::fs::write(&path, text).map_err(IoError::Io)?;
            }
            Ok(())
        }
        Command::Oracle {
            tracklets,
            topology,
            config,
        } => {
            let config = config.to_config();
            let tracklets = read_tracklets(&tracklets)?;
            let topology = read_topology(&topology)?;
            let prepared = prepare(tracklets, topology, &config)?;
            let solved = solve(&prepared.graph);
            let oracle = brute_force_map(&prepared.graph)
                .map_err(|e| CliError::Input(e.to_string()))?;
            println!("solver cost {}", solved.objective_cost);
            println!("oracle cost {}", oracle.objective_cost);
            if solved.objective_cost == oracle.objective_cost {
                println!("agreement exact");
                Ok(())
            } else {
                Err(CliError::Input("solver and oracle disagree".into()))
            }
        }
        Command::Synth {
            out_tracklets,
            out_topology,
            out_gt,
            n_cameras,
            n_targets,
            fragmentation,
            shift,
            config,
        } => {
            let scenario = synth_scenario(&SynthConfig {
                seed: config.seed,
                n_cameras,
                n_targets,
                fragmentation,
                appearance_shift: shift,
            });
            write_tracklets(&scenario.tracklets, &out_tracklets)?;
            write_topology(&scenario.topology, &out_topology)?;
            write_annotations(&scenario.ground_truth, &out_gt)?;
            println!(
                "tracklets {} targets {} cameras {}",
                scenario.tracklets.len(),
                n_targets,
                n_cameras
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error category={} {}", e.category(), e.message());
            ExitCode::FAILURE
        }
    }
}
