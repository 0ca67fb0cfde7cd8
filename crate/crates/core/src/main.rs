use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use avloop::eval::{session_stats, GroundTruth};
use avloop::scheduler::SessionMode;
use avloop::service::{self, ApiWorkbench, LocalClient, ServiceConfig};
use avloop::session::Session;
use avloop::sim::{self, SimAnnotator, SimAnnotatorPolicy};
use avloop::store::{self, export_json, ExportFrame, LoadedProject, StoreError};
use avloop::synth::{self, SynthConfig, SynthError};

#[derive(Parser)]
#[command(name = "avloop", version, about = "Audio-visual annotation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a project directory and write its project.json.
    Ingest { dir: PathBuf },
    /// Generate a synthetic project with ground truth, then ingest it.
    Synth {
        #[arg(long, default_value_t = 80)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        changes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        objects: usize,
        #[arg(long, default_value_t = 0.0)]
        miss_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        spurious_rate: f64,
        dir: PathBuf,
    },
    /// Run a simulated annotator through the session API.
    Simulate {
        #[arg(long, value_enum, default_value_t = PolicyArg::Perfect)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Guided)]
        mode: ModeArg,
        /// Override the policy's drawing jitter (pixels, one sigma).
        #[arg(long)]
        jitter: Option<f64>,
        /// Override the policy's wrong-candidate probability.
        #[arg(long)]
        wrong_pick: Option<f64>,
        dir: PathBuf,
    },
    /// Score a session against one or more reference annotations.
    Evaluate {
        /// Reference export file; repeat for several experts.
        #[arg(long, required = true)]
        truth: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        consensus: u32,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Session directory (`<project>/sessions/<id>`).
        session: PathBuf,
    },
    /// Serve the annotation API for every project under a directory.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        dir: Option<PathBuf>,
    },
    /// Print a session's annotations in export format.
    Export {
        session: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Perfect,
    Noisy,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Guided,
    Manual,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

/// Exit status 1 for bad input, 2 for everything else.
enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        let validation = e.chain().any(|c| {
            matches!(c.downcast_ref::<StoreError>(), Some(StoreError::Validation(_) | StoreError::NotIngested(_)))
                || matches!(c.downcast_ref::<SynthError>(), Some(SynthError::Invalid(_)))
                || matches!(c.downcast_ref::<sim::SimError>(), Some(sim::SimError::Policy(_) | sim::SimError::MissingTruth(_)))
        });
        if validation {
            Failure::Validation(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Validation(anyhow!("{msg}"))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest { dir } => {
            let m = store::ingest(&dir)?;
            println!(
                "ingested {}: {} frames at {} fps, {}x{}",
                m.id, m.n_frames, m.fps, m.dims.width, m.dims.height
            );
        }
        Command::Synth { frames, changes, seed, objects, miss_rate, spurious_rate, dir } => {
            let cfg = SynthConfig {
                n_frames: frames,
                n_changes: changes,
                objects_per_frame: objects,
                seed,
                miss_rate,
                spurious_rate,
                ..SynthConfig::default()
            };
            let clip = synth::synth(&cfg, &dir)?;
            let m = store::ingest(&dir)?;
            println!("wrote {} ({} frames, change points {:?})", dir.display(), m.n_frames, clip.change_points);
        }
        Command::Simulate { policy, seed, mode, jitter, wrong_pick, dir } => {
            let mut p = match policy {
                PolicyArg::Perfect => SimAnnotatorPolicy::perfect(seed),
                PolicyArg::Noisy => SimAnnotatorPolicy::noisy(seed),
            };
            if let Some(j) = jitter {
                p.box_jitter_px = j;
            }
            if let Some(w) = wrong_pick {
                p.wrong_pick_prob = w;
            }
            p.validate()?;
            let loaded = LoadedProject::open(&dir)?;
            let truth = loaded
                .ground_truth()?
                .ok_or_else(|| invalid(format!("{} has no {}", dir.display(), store::GROUND_TRUTH_FILE)))?;
            let mode = match mode {
                ModeArg::Guided => SessionMode::Guided,
                ModeArg::Manual => SessionMode::Manual,
            };
            let client = LocalClient::open(&dir)?;
            let mut bench = ApiWorkbench::create(&client, &loaded.manifest.id, mode).map_err(|e| anyhow!("{}", e.message))?;
            let mut annotator = SimAnnotator::new(p, truth.clone())?;
            let outcome = sim::run(&mut bench, &mut annotator, loaded.manifest.n_frames)?;
            let sid = bench.session_id.clone();
            let stats: avloop::eval::SessionStats =
                client.get(&format!("/api/v1/sessions/{sid}/stats")).map_err(|e| anyhow!("{}", e.message))?;
            println!("session {sid}");
            println!("path {}", loaded.sessions_dir().join(&sid).display());
            println!("requested frames {:?}", outcome.requested);
            print!("{}", stats.to_table());
        }
        Command::Evaluate { truth, consensus, format, session } => {
            if consensus == 0 {
                return Err(invalid("--consensus must be at least 1"));
            }
            let (loaded, s) = open_session(&session)?;
            let experts = truth
                .iter()
                .map(|p| store::read_json::<Vec<ExportFrame>>(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Validation(e.into()))?;
            let gt = GroundTruth { experts, consensus_param: consensus };
            let stats = session_stats(&loaded.project, &s.state, Some(&gt));
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize")),
                Format::Table => print!("{}", stats.to_table()),
            }
        }
        Command::Serve { port, dir } => {
            let mut cfg = ServiceConfig::load(dir)?;
            if let Some(p) = port {
                cfg.port = p;
            }
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            rt.block_on(service::serve(cfg))?;
        }
        Command::Export { session, output } => {
            let (_, s) = open_session(&session)?;
            let text = export_json(&s.export());
            match output {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

/// Open `<project>/sessions/<id>` read-only.
fn open_session(dir: &Path) -> Result<(LoadedProject, Session), Failure> {
    let id = dir
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| invalid(format!("{} is not a session directory", dir.display())))?;
    let project_dir = dir
        .parent()
        .and_then(Path::parent)
        .ok_or_else(|| invalid(format!("{} is not inside a project", dir.display())))?;
    let loaded = LoadedProject::open(project_dir)?;
    let s = Session::open(&loaded, Arc::new(loaded.project.clone()), id, false)?;
    Ok((loaded, s))
}
