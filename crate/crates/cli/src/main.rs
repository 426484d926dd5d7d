//! Experiment runner: seeded pipelines over statevector environments with
//! CSV/JSON outputs, plus a self-test command and the config schema.

mod config;
mod manifest;
mod pipelines;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{resolve_template, EnvSource, ExperimentConfig, TemplateSource};
use manifest::{sha256_hex, RunManifest};
use pipelines::RunError;

#[derive(Parser)]
#[command(
    name = "naqrl",
    version,
    about = "Statevector reinforcement learning over non-commuting unitary action sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file
    Run {
        /// Path to the experiment config (see `naqrl schema`)
        config: PathBuf,
        /// Override the config's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent rollouts (outputs do not depend on this)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the bundled invariant checks and print a pass/fail table
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the JSON schema of the experiment config format
    Schema,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            jobs,
        } => match run(&config, seed, out, jobs) {
            Ok((out_dir, files)) => {
                println!(
                    "wrote {} result file(s) + manifest to {}",
                    files.len(),
                    out_dir.display()
                );
                ExitCode::SUCCESS
            }
            Err(RunError::Config(message)) => {
                report_error("config", &message);
                ExitCode::from(2)
            }
            Err(RunError::Runtime(message)) => {
                report_error("runtime", &message);
                ExitCode::from(1)
            }
        },
        Command::Selftest { seed } => {
            if selftest::run(seed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Schema => {
            println!(
                "{}",
                serde_json::to_string_pretty(&config::schema_json()).expect("static schema")
            );
            ExitCode::SUCCESS
        }
    }
}

fn report_error(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::to_string(&json!({"error": {"kind": kind, "message": message}}))
            .expect("error serializes")
    );
}

/// Replaces path references (environment, templates) with their loaded
/// contents so the effective config is self-contained and hashable.
fn inline_sources(cfg: &mut ExperimentConfig, base: &Path) -> Result<(), String> {
    cfg.env = EnvSource::Inline(cfg.resolve_env(base)?);
    if let Some(pqc) = &mut cfg.pqc {
        pqc.template = TemplateSource::Inline(resolve_template(&pqc.template, base)?);
    }
    if let Some(agent) = &mut cfg.agent {
        agent.template = TemplateSource::Inline(resolve_template(&agent.template, base)?);
    }
    if let Some(bench) = &mut cfg.bench {
        bench.template = TemplateSource::Inline(resolve_template(&bench.template, base)?);
    }
    Ok(())
}

fn run(
    config_path: &Path,
    seed_override: Option<u64>,
    out_override: Option<PathBuf>,
    jobs_override: Option<usize>,
) -> Result<(PathBuf, Vec<PathBuf>), RunError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| RunError::Config(e.to_string()))?;

    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    if let Some(out) = out_override {
        cfg.out_dir = Some(out);
    }
    if let Some(jobs) = jobs_override {
        cfg.jobs = jobs.max(1);
    }
    cfg.validate().map_err(RunError::Config)?;

    let base_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    inline_sources(&mut cfg, &base_dir).map_err(RunError::Config)?;

    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| cfg.default_out_dir());
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| RunError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    // self-contained effective config: re-running it reproduces this run.
    // out_dir is placement, not experiment identity, so it is not part of
    // the effective config or its hash
    cfg.out_dir = None;
    let effective =
        serde_json::to_string_pretty(&cfg).map_err(|e| RunError::Runtime(e.to_string()))?;
    let config_hash = sha256_hex(effective.as_bytes());
    let effective_path = out_dir.join("config.json");
    std::fs::write(&effective_path, &effective).map_err(|e| RunError::Runtime(e.to_string()))?;

    let manifest = RunManifest::start(cfg.kind.as_str(), cfg.seed, cfg.jobs, config_hash.clone());
    manifest
        .write(&out_dir)
        .map_err(|e| RunError::Runtime(format!("cannot write manifest: {e}")))?;

    let run_id = &config_hash[..12];
    let mut files = pipelines::execute(&cfg, &base_dir, &out_dir, run_id)?;
    files.push(effective_path);

    manifest
        .finalize(&out_dir, &files)
        .map_err(|e| RunError::Runtime(format!("cannot finalize manifest: {e}")))?;
    Ok((out_dir, files))
}
