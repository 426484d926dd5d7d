//! Quantum-vs-classical comparison pipeline: a tabular baseline on the
//! measured environment, the expectation gap `a_q = E[Q_Q(θ)] − E[Q_C]`,
//! and the evaluation report.
//!
//! "Advantage" here is a measured performance gap on the simulated task
//! under each agent's own empirical visitation distributions; it makes no
//! complexity-theoretic claim. The classical state is the
//! computational-basis measurement outcome of the current environment state
//! (measured, collapsed, then acted on); both agents are evaluated through
//! that same measure-then-act loop so their distributions are comparable.
//!
//! `Q_Q(θ, s, a)` is the mean post-action reward expectation observed in
//! the quantum agent's rollouts; `E[Q_C]` reads the baseline's learned
//! table under the baseline's own rollout distributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bellman::LearnerConfig;
use crate::environment::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::pqc::{select_action, CircuitTemplate, ParamVector};
use crate::rng::SeededRng;

/// Tabular Q-learning baseline over measurement outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBaseline {
    num_actions: usize,
    q_table: BTreeMap<(usize, usize), f64>,
    visit_counts: BTreeMap<(usize, usize), u64>,
}

impl ClassicalBaseline {
    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn value(&self, outcome: usize, action: usize) -> f64 {
        self.q_table.get(&(outcome, action)).copied().unwrap_or(0.0)
    }

    pub fn visits(&self, outcome: usize, action: usize) -> u64 {
        self.visit_counts.get(&(outcome, action)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.q_table.is_empty()
    }

    pub fn greedy_action(&self, outcome: usize) -> usize {
        let mut best = 0;
        let mut best_value = self.value(outcome, 0);
        for a in 1..self.num_actions {
            let v = self.value(outcome, a);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    }

    fn max_value(&self, outcome: usize) -> f64 {
        (0..self.num_actions)
            .map(|a| self.value(outcome, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// ε-greedy Q-learning where the state is the measurement outcome of the
/// current quantum state. Each step measures (collapsing the state), picks
/// an action from the table, steps the environment from the collapsed
/// state, and measures again for the successor outcome.
pub fn train_classical(
    env: &EnvironmentSpec,
    cfg: &LearnerConfig,
    rng: &mut SeededRng,
) -> Result<ClassicalBaseline> {
    cfg.validate()?;
    let mut baseline = ClassicalBaseline {
        num_actions: env.num_actions(),
        q_table: BTreeMap::new(),
        visit_counts: BTreeMap::new(),
    };
    for _ in 0..cfg.episodes {
        let (mut outcome, mut state, _) = env.initial_state().measure_computational(rng);
        for _ in 0..env.horizon() {
            let action = if cfg.epsilon > 0.0 && rng.next_f64() < cfg.epsilon {
                rng.index(env.num_actions())
            } else {
                baseline.greedy_action(outcome)
            };
            let step = env.step(&state, action, rng)?;
            let (next_outcome, next_collapsed, _) = step.next_state.measure_computational(rng);
            let current = baseline.value(outcome, action);
            let target = step.reward + env.gamma() * baseline.max_value(next_outcome);
            baseline
                .q_table
                .insert((outcome, action), current + cfg.alpha * (target - current));
            *baseline.visit_counts.entry((outcome, action)).or_insert(0) += 1;
            outcome = next_outcome;
            state = next_collapsed;
        }
    }
    Ok(baseline)
}

/// `Σ_s Σ_a P(s)·P(a|s)·values(s,a)`.
///
/// `state_dist` must sum to 1 within 1e-9, and for every state with
/// positive probability the conditional `policy_dist` row must sum to 1
/// within 1e-9.
pub fn expected_value(
    values: impl Fn(usize, usize) -> f64,
    state_dist: &BTreeMap<usize, f64>,
    policy_dist: &BTreeMap<(usize, usize), f64>,
) -> Result<f64> {
    let state_sum: f64 = state_dist.values().sum();
    if (state_sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized {
            context: "state distribution",
            sum: state_sum,
        });
    }
    for (&s, &p) in state_dist {
        if p == 0.0 {
            continue;
        }
        let row_sum: f64 = policy_dist
            .iter()
            .filter(|((state, _), _)| *state == s)
            .map(|(_, &q)| q)
            .sum();
        if (row_sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized {
                context: "policy distribution",
                sum: row_sum,
            });
        }
    }
    let mut total = 0.0;
    for (&(s, a), &p_a) in policy_dist {
        if let Some(&p_s) = state_dist.get(&s) {
            total += p_s * p_a * values(s, a);
        }
    }
    Ok(total)
}

/// Evaluation settings for [`quantum_advantage`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdvantageConfig {
    /// Rollout episodes per agent.
    pub eval_episodes: usize,
    /// ε used by the baseline during evaluation rollouts (0 = greedy).
    #[serde(default)]
    pub baseline_eval_epsilon: f64,
    /// Worker threads for the rollouts; results are independent of this.
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl Default for AdvantageConfig {
    fn default() -> Self {
        Self {
            eval_episodes: 2000,
            baseline_eval_epsilon: 0.0,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct StateProb {
    outcome: usize,
    p: f64,
}

#[derive(Debug, Clone, Serialize)]
struct PolicyProb {
    outcome: usize,
    action: usize,
    p: f64,
}

#[derive(Debug, Clone, Serialize)]
struct RawReport {
    e_qq: f64,
    e_qc: f64,
    a_q: f64,
    state_distribution: Vec<StateProb>,
    policy_distribution: Vec<PolicyProb>,
    classical_state_distribution: Vec<StateProb>,
    classical_policy_distribution: Vec<PolicyProb>,
}

/// Comparison result. Distributions are empirical: `state_distribution`
/// sums to 1 and each `policy_distribution` row is conditional on its
/// outcome (rows sum to 1).
#[derive(Debug, Clone, Serialize)]
#[serde(into = "RawReport")]
pub struct AdvantageReport {
    pub e_qq: f64,
    pub e_qc: f64,
    pub a_q: f64,
    /// Quantum agent's empirical outcome distribution.
    pub state_distribution: BTreeMap<usize, f64>,
    /// Quantum agent's empirical conditional policy `P(a|s)`.
    pub policy_distribution: BTreeMap<(usize, usize), f64>,
    pub classical_state_distribution: BTreeMap<usize, f64>,
    pub classical_policy_distribution: BTreeMap<(usize, usize), f64>,
}

impl From<AdvantageReport> for RawReport {
    fn from(r: AdvantageReport) -> Self {
        let states = |m: &BTreeMap<usize, f64>| {
            m.iter()
                .map(|(&outcome, &p)| StateProb { outcome, p })
                .collect()
        };
        let policy = |m: &BTreeMap<(usize, usize), f64>| {
            m.iter()
                .map(|(&(outcome, action), &p)| PolicyProb { outcome, action, p })
                .collect()
        };
        RawReport {
            e_qq: r.e_qq,
            e_qc: r.e_qc,
            a_q: r.a_q,
            state_distribution: states(&r.state_distribution),
            policy_distribution: policy(&r.policy_distribution),
            classical_state_distribution: states(&r.classical_state_distribution),
            classical_policy_distribution: policy(&r.classical_policy_distribution),
        }
    }
}

enum AgentKind<'a> {
    Quantum {
        template: &'a CircuitTemplate,
        theta: &'a ParamVector,
    },
    Classical {
        baseline: &'a ClassicalBaseline,
        epsilon: f64,
    },
}

impl AgentKind<'_> {
    fn select(&self, outcome: usize, num_actions: usize, rng: &mut SeededRng) -> Result<usize> {
        match self {
            AgentKind::Quantum { template, theta } => {
                select_action(template, theta, num_actions, rng)
            }
            AgentKind::Classical { baseline, epsilon } => {
                if *epsilon > 0.0 && rng.next_f64() < *epsilon {
                    Ok(rng.index(num_actions))
                } else {
                    Ok(baseline.greedy_action(outcome))
                }
            }
        }
    }
}

/// Per-(outcome, action) visit counts and reward sums from one agent's
/// rollouts.
struct RolloutStats {
    visits: BTreeMap<(usize, usize), u64>,
    reward_sums: BTreeMap<(usize, usize), f64>,
    total_visits: u64,
}

fn rollout_episode(
    env: &EnvironmentSpec,
    agent: &AgentKind<'_>,
    rng: &mut SeededRng,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut records = Vec::with_capacity(env.horizon());
    let (mut outcome, mut state, _) = env.initial_state().measure_computational(rng);
    for _ in 0..env.horizon() {
        let action = agent.select(outcome, env.num_actions(), rng)?;
        let step = env.step(&state, action, rng)?;
        records.push((outcome, action, step.reward));
        let (next_outcome, next_collapsed, _) = step.next_state.measure_computational(rng);
        outcome = next_outcome;
        state = next_collapsed;
    }
    Ok(records)
}

fn collect_rollouts(
    env: &EnvironmentSpec,
    agent: &AgentKind<'_>,
    episodes: usize,
    jobs: usize,
    root: &SeededRng,
) -> Result<RolloutStats> {
    let jobs = jobs.max(1).min(episodes.max(1));
    let run_range = |range: std::ops::Range<usize>| -> Result<Vec<Vec<(usize, usize, f64)>>> {
        range
            .map(|e| {
                let mut rng = root.derive(e as u64);
                rollout_episode(env, agent, &mut rng)
            })
            .collect()
    };

    let per_episode: Vec<Vec<(usize, usize, f64)>> = if jobs <= 1 {
        run_range(0..episodes)?
    } else {
        let chunk = episodes.div_ceil(jobs);
        let mut partials: Vec<Result<Vec<Vec<(usize, usize, f64)>>>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let start = w * chunk;
                    let end = ((w + 1) * chunk).min(episodes);
                    scope.spawn(move || run_range(start..end.max(start)))
                })
                .collect();
            for h in handles {
                partials.push(h.join().expect("rollout worker panicked"));
            }
        });
        let mut all = Vec::with_capacity(episodes);
        for p in partials {
            all.extend(p?);
        }
        all
    };

    let mut stats = RolloutStats {
        visits: BTreeMap::new(),
        reward_sums: BTreeMap::new(),
        total_visits: 0,
    };
    for episode in per_episode {
        for (s, a, r) in episode {
            *stats.visits.entry((s, a)).or_insert(0) += 1;
            *stats.reward_sums.entry((s, a)).or_insert(0.0) += r;
            stats.total_visits += 1;
        }
    }
    Ok(stats)
}

fn distributions(
    stats: &RolloutStats,
) -> (BTreeMap<usize, f64>, BTreeMap<(usize, usize), f64>) {
    let mut state_counts: BTreeMap<usize, u64> = BTreeMap::new();
    for (&(s, _), &n) in &stats.visits {
        *state_counts.entry(s).or_insert(0) += n;
    }
    let state_dist: BTreeMap<usize, f64> = state_counts
        .iter()
        .map(|(&s, &n)| (s, n as f64 / stats.total_visits as f64))
        .collect();
    let policy_dist: BTreeMap<(usize, usize), f64> = stats
        .visits
        .iter()
        .map(|(&(s, a), &n)| ((s, a), n as f64 / state_counts[&s] as f64))
        .collect();
    (state_dist, policy_dist)
}

/// Runs greedy evaluation rollouts of the quantum agent `(template, θ)` and
/// of the trained baseline, estimates each agent's empirical state and
/// policy distributions, and reports
/// `a_q = E[Q_Q(θ)] − E[Q_C]` (exactly that difference, by construction).
pub fn quantum_advantage(
    env: &EnvironmentSpec,
    template: &CircuitTemplate,
    theta: &ParamVector,
    baseline: &ClassicalBaseline,
    cfg: &AdvantageConfig,
    rng: &SeededRng,
) -> Result<AdvantageReport> {
    if cfg.eval_episodes == 0 {
        return Err(Error::invalid("advantage evaluation", "eval_episodes must be positive"));
    }
    if baseline.num_actions() != env.num_actions() {
        return Err(Error::invalid(
            "advantage evaluation",
            format!(
                "baseline has {} actions, environment has {}",
                baseline.num_actions(),
                env.num_actions()
            ),
        ));
    }

    let quantum = AgentKind::Quantum { template, theta };
    let classical = AgentKind::Classical {
        baseline,
        epsilon: cfg.baseline_eval_epsilon,
    };
    let q_stats = collect_rollouts(env, &quantum, cfg.eval_episodes, cfg.jobs, &rng.derive(1))?;
    let c_stats = collect_rollouts(env, &classical, cfg.eval_episodes, cfg.jobs, &rng.derive(2))?;

    let (q_state_dist, q_policy_dist) = distributions(&q_stats);
    let (c_state_dist, c_policy_dist) = distributions(&c_stats);

    let q_values = |s: usize, a: usize| -> f64 {
        match (q_stats.reward_sums.get(&(s, a)), q_stats.visits.get(&(s, a))) {
            (Some(&sum), Some(&n)) if n > 0 => sum / n as f64,
            _ => 0.0,
        }
    };
    let e_qq = expected_value(q_values, &q_state_dist, &q_policy_dist)?;
    let e_qc = expected_value(|s, a| baseline.value(s, a), &c_state_dist, &c_policy_dist)?;

    Ok(AdvantageReport {
        e_qq,
        e_qc,
        a_q: e_qq - e_qc,
        state_distribution: q_state_dist,
        policy_distribution: q_policy_dist,
        classical_state_distribution: c_state_dist,
        classical_policy_distribution: c_policy_dist,
    })
}
