//! Pipeline dispatch: each experiment kind consumes the (fully inlined)
//! config, runs the corresponding core machinery, and emits plot-ready CSV
//! and JSON files into the run directory.
//!
//! Float fields in data files use Rust's shortest round-trip formatting, so
//! identical (config, seed) pairs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use naqrl_core::advantage::{quantum_advantage, train_classical, AdvantageConfig};
use naqrl_core::bellman::{advantage, train, value_iteration, LearnerConfig, QTable, StateRegistry};
use naqrl_core::noncomm::{commutator_subgroup, group_closure_named, pairwise_report};
use naqrl_core::pqc::{optimize, train_pqc_agent, train_pqc_agent_from, AgentConfig, ParamVector};
use naqrl_core::{EnvironmentSpec, Observable, SeededRng};

use crate::config::{resolve_template, ExperimentConfig, Kind};

/// Pipeline failure classes; config problems exit 2, runtime problems 1.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Runtime(String),
}

impl RunError {
    fn runtime(e: impl std::fmt::Display) -> Self {
        RunError::Runtime(e.to_string())
    }
}

type Files = Vec<PathBuf>;

pub fn execute(
    cfg: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
    run_id: &str,
) -> Result<Files, RunError> {
    let env = cfg.resolve_env(base_dir).map_err(RunError::Config)?;
    match cfg.kind {
        Kind::Qlearn => run_qlearn(cfg, &env, out_dir),
        Kind::ValueIter => run_value_iter(cfg, &env, out_dir),
        Kind::PqcOpt => run_pqc_opt(cfg, &env, base_dir, out_dir),
        Kind::PqcAgent => run_pqc_agent(cfg, &env, base_dir, out_dir),
        Kind::Advantage => run_advantage(cfg, &env, base_dir, out_dir, run_id),
        Kind::Noncomm => run_noncomm(cfg, &env, out_dir),
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Minimal CSV quoting: fields with commas, quotes, or newlines get quoted.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), RunError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let quoted: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        out.push_str(&quoted.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(RunError::runtime)?;
    file.write_all(out.as_bytes()).map_err(RunError::runtime)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).map_err(RunError::runtime)?;
    std::fs::write(path, text).map_err(RunError::runtime)
}

fn write_q_table(path: &Path, q: &QTable, env: &EnvironmentSpec) -> Result<(), RunError> {
    let mut rows = Vec::new();
    for key in q.known_keys() {
        for action in 0..q.num_actions() {
            let adv = advantage(q, key, action).map_err(RunError::runtime)?;
            rows.push(vec![
                key.to_string(),
                action.to_string(),
                env.actions()[action].name().to_string(),
                fmt(q.get(key, action)),
                fmt(adv),
            ]);
        }
    }
    write_csv(
        path,
        &["state_key", "action_index", "action_name", "q_value", "advantage"],
        &rows,
    )
}

fn run_qlearn(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    out_dir: &Path,
) -> Result<Files, RunError> {
    let section = cfg.learner.as_ref().expect("validated");
    let learner = LearnerConfig {
        alpha: section.alpha,
        epsilon: section.epsilon,
        episodes: section.episodes,
    };
    let registry = StateRegistry::new(section.fid_threshold);
    let mut rng = SeededRng::from_seed(cfg.seed);
    let result = train(env, &learner, registry, &mut rng).map_err(RunError::runtime)?;

    let q_path = out_dir.join("q_table.csv");
    write_q_table(&q_path, &result.q, env)?;

    let curve_path = out_dir.join("learning_curve.csv");
    let rows: Vec<Vec<String>> = result
        .curve
        .iter()
        .map(|e| vec![e.episode.to_string(), fmt(e.discounted_return), fmt(e.epsilon)])
        .collect();
    write_csv(&curve_path, &["episode", "discounted_return", "epsilon"], &rows)?;
    Ok(vec![q_path, curve_path])
}

fn run_value_iter(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    out_dir: &Path,
) -> Result<Files, RunError> {
    let section = cfg.value_iter.clone().unwrap_or_default();
    let mut registry = StateRegistry::new(section.fid_threshold);
    let result = value_iteration(env, &mut registry, section.tol).map_err(RunError::runtime)?;

    let q_path = out_dir.join("q_table.csv");
    write_q_table(&q_path, &result.q, env)?;

    let info_path = out_dir.join("value_iter.json");
    write_json(
        &info_path,
        &json!({
            "tol": section.tol,
            "fid_threshold": section.fid_threshold,
            "states": registry.len(),
            "sweeps": result.sweeps,
            "sup_deltas": result.sup_deltas,
        }),
    )?;
    Ok(vec![q_path, info_path])
}

fn run_pqc_opt(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<Files, RunError> {
    let section = cfg.pqc.as_ref().expect("validated");
    let template = resolve_template(&section.template, base_dir).map_err(RunError::Config)?;
    let theta0 = ParamVector::new(section.theta0.clone()).map_err(RunError::runtime)?;
    let observable = match &section.observable {
        Some(matrix) => Observable::new(matrix.clone()).map_err(RunError::runtime)?,
        None => env.reward().clone(),
    };
    let outcome =
        optimize(&template, &theta0, &observable, section.lr, section.iters).map_err(RunError::runtime)?;

    let trace_path = out_dir.join("opt_trace.csv");
    let rows: Vec<Vec<String>> = outcome
        .trace
        .iter()
        .map(|s| vec![s.iter.to_string(), fmt(s.cost), fmt(s.grad_norm)])
        .collect();
    write_csv(&trace_path, &["iter", "cost", "grad_norm"], &rows)?;

    let result_path = out_dir.join("pqc_opt.json");
    write_json(
        &result_path,
        &json!({
            "theta_star": outcome.theta.values(),
            "final_cost": outcome.final_cost,
            "iterations": outcome.trace.len(),
            "halted_non_finite": outcome.halted_non_finite,
        }),
    )?;
    Ok(vec![trace_path, result_path])
}

fn run_pqc_agent(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<Files, RunError> {
    let section = cfg.agent.as_ref().expect("validated");
    let template = resolve_template(&section.template, base_dir).map_err(RunError::Config)?;
    let agent_cfg = AgentConfig {
        episodes: section.episodes,
        batch: section.batch,
        h: section.h,
        lr: section.lr,
    };
    let rng = SeededRng::from_seed(cfg.seed);
    let result = match &section.theta0 {
        Some(theta0) => {
            let theta0 = ParamVector::new(theta0.clone()).map_err(RunError::runtime)?;
            train_pqc_agent_from(env, &template, &theta0, &agent_cfg, &rng)
        }
        None => train_pqc_agent(env, &template, &agent_cfg, &rng),
    }
    .map_err(RunError::runtime)?;

    let curve_path = out_dir.join("reward_curve.csv");
    let rows: Vec<Vec<String>> = result
        .reward_curve
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), fmt(*r)])
        .collect();
    write_csv(&curve_path, &["episode", "mean_return"], &rows)?;

    let result_path = out_dir.join("pqc_agent.json");
    write_json(
        &result_path,
        &json!({
            "theta": result.theta.values(),
            "best_return": result.best_return,
            "episodes": result.reward_curve.len(),
        }),
    )?;
    Ok(vec![curve_path, result_path])
}

fn run_advantage(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    base_dir: &Path,
    out_dir: &Path,
    run_id: &str,
) -> Result<Files, RunError> {
    let bench = cfg.bench.as_ref().expect("validated");
    let learner_section = cfg.learner.as_ref().expect("validated");
    let template = resolve_template(&bench.template, base_dir).map_err(RunError::Config)?;
    let theta = ParamVector::new(bench.theta.clone()).map_err(RunError::runtime)?;
    let learner = LearnerConfig {
        alpha: learner_section.alpha,
        epsilon: learner_section.epsilon,
        episodes: learner_section.episodes,
    };

    let root = SeededRng::from_seed(cfg.seed);
    let mut baseline_rng = root.derive(100);
    let baseline = train_classical(env, &learner, &mut baseline_rng).map_err(RunError::runtime)?;
    let adv_cfg = AdvantageConfig {
        eval_episodes: bench.eval_episodes,
        baseline_eval_epsilon: bench.baseline_eval_epsilon,
        jobs: cfg.jobs,
    };
    let report =
        quantum_advantage(env, &template, &theta, &baseline, &adv_cfg, &root).map_err(RunError::runtime)?;

    let report_path = out_dir.join("advantage_report.json");
    let value = serde_json::to_value(&report).map_err(RunError::runtime)?;
    write_json(&report_path, &value)?;

    let summary_path = out_dir.join("advantage_summary.csv");
    write_csv(
        &summary_path,
        &["run_id", "e_qq", "e_qc", "a_q", "episodes", "seed"],
        &[vec![
            run_id.to_string(),
            fmt(report.e_qq),
            fmt(report.e_qc),
            fmt(report.a_q),
            bench.eval_episodes.to_string(),
            cfg.seed.to_string(),
        ]],
    )?;
    Ok(vec![report_path, summary_path])
}

fn run_noncomm(
    cfg: &ExperimentConfig,
    env: &EnvironmentSpec,
    out_dir: &Path,
) -> Result<Files, RunError> {
    let section = cfg.noncomm.clone().unwrap_or_default();
    let report = pairwise_report(env.actions()).map_err(RunError::runtime)?;

    let csv_path = out_dir.join("noncomm.csv");
    let mut rows = Vec::new();
    for i in 0..report.names.len() {
        for j in (i + 1)..report.names.len() {
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                report.names[i].clone(),
                report.names[j].clone(),
                fmt(report.raw[i][j]),
                fmt(report.pairwise[i][j]),
            ]);
        }
    }
    write_csv(
        &csv_path,
        &["i", "j", "name_i", "name_j", "raw_degree", "normalized_degree"],
        &rows,
    )?;

    let named: Vec<(String, naqrl_core::ComplexMatrix)> = env
        .actions()
        .iter()
        .map(|a| (a.name().to_string(), a.matrix().clone()))
        .collect();
    let closure = group_closure_named(&named, section.closure_cap).map_err(RunError::runtime)?;
    let subgroup = if closure.is_closed {
        let sub = commutator_subgroup(&closure).map_err(RunError::runtime)?;
        json!({
            "size": sub.len(),
            "is_closed": sub.is_closed,
            "is_trivial": sub.len() == 1,
        })
    } else {
        serde_json::Value::Null
    };
    let closure_path = out_dir.join("closure.json");
    write_json(
        &closure_path,
        &json!({
            "generators": closure.generated_from,
            "size": closure.len(),
            "is_closed": closure.is_closed,
            "cap": closure.cap,
            "max_degree": report.max_degree,
            "commuting_pairs": report.commuting_pairs,
            "commutator_subgroup": subgroup,
        }),
    )?;
    Ok(vec![csv_path, closure_path])
}
