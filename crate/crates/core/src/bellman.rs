//! Tabular Q-learning and value iteration over fidelity-bucketed quantum
//! states, the reward-conjugation Bellman operator, truncated
//! infinite-horizon operator values, and the advantage function.
//!
//! Continuous quantum states are discretized by a [`StateRegistry`]: a state
//! is keyed to the first registered reference state with fidelity at or
//! above the registry threshold, and appended as a new reference otherwise.
//! The state value `V` is realized as `max_a Q(s, a)`, with argmax ties
//! broken toward the lowest action index so that runs are deterministic.

use std::collections::BTreeMap;

use crate::environment::{ActionUnitary, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::rng::SeededRng;
use crate::statevector::StateVector;

/// Default fidelity cutoff for state bucketing.
pub const DEFAULT_FID_THRESHOLD: f64 = 0.99;
/// Default cap on registry size.
pub const DEFAULT_REGISTRY_CAP: usize = 100_000;
/// Hard ceiling on value-iteration sweeps.
const MAX_SWEEPS: usize = 1_000_000;

/// Fidelity-bucketed registry of reference states.
#[derive(Debug, Clone)]
pub struct StateRegistry {
    reference_states: Vec<StateVector>,
    fid_threshold: f64,
    cap: usize,
}

impl StateRegistry {
    pub fn new(fid_threshold: f64) -> Self {
        Self::with_cap(fid_threshold, DEFAULT_REGISTRY_CAP)
    }

    pub fn with_cap(fid_threshold: f64, cap: usize) -> Self {
        assert!(
            fid_threshold > 0.0 && fid_threshold <= 1.0,
            "fidelity threshold must lie in (0, 1]"
        );
        Self {
            reference_states: Vec::new(),
            fid_threshold,
            cap,
        }
    }

    pub fn len(&self) -> usize {
        self.reference_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference_states.is_empty()
    }

    pub fn fid_threshold(&self) -> f64 {
        self.fid_threshold
    }

    pub fn reference_state(&self, key: usize) -> Result<&StateVector> {
        self.reference_states.get(key).ok_or(Error::UnknownStateKey { key })
    }

    /// Key of the first reference state with fidelity ≥ threshold; the state
    /// is appended as a new reference (and its fresh key returned) if none
    /// matches.
    pub fn state_key(&mut self, psi: &StateVector) -> Result<usize> {
        for (key, reference) in self.reference_states.iter().enumerate() {
            if reference.fidelity(psi)? >= self.fid_threshold {
                return Ok(key);
            }
        }
        if self.reference_states.len() >= self.cap {
            return Err(Error::RegistryOverflow { cap: self.cap });
        }
        self.reference_states.push(psi.clone());
        Ok(self.reference_states.len() - 1)
    }
}

impl Default for StateRegistry {
    fn default() -> Self {
        Self::new(DEFAULT_FID_THRESHOLD)
    }
}

/// Sparse action-value table; unseen pairs read as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    num_actions: usize,
    values: BTreeMap<(usize, usize), f64>,
}

impl QTable {
    pub fn new(num_actions: usize) -> Self {
        assert!(num_actions > 0, "a table needs at least one action");
        Self {
            num_actions,
            values: BTreeMap::new(),
        }
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn get(&self, key: usize, action: usize) -> f64 {
        self.values.get(&(key, action)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, key: usize, action: usize, value: f64) {
        self.values.insert((key, action), value);
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_known(&self, key: usize) -> bool {
        (0..self.num_actions).any(|a| self.values.contains_key(&(key, a)))
    }

    /// State keys with at least one stored entry, ascending.
    pub fn known_keys(&self) -> Vec<usize> {
        let mut keys: Vec<usize> = self.values.keys().map(|&(k, _)| k).collect();
        keys.dedup();
        keys
    }

    /// `max_a Q(key, a)` over all actions (unseen pairs count as 0).
    pub fn max_value(&self, key: usize) -> f64 {
        (0..self.num_actions)
            .map(|a| self.get(key, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Argmax action, lowest index on ties.
    pub fn greedy_action(&self, key: usize) -> usize {
        let mut best = 0;
        let mut best_value = self.get(key, 0);
        for a in 1..self.num_actions {
            let v = self.get(key, a);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    }
}

/// One temporal-difference update:
/// `Q(s,a) ← Q(s,a) + α·(r + γ·max_b Q(s',b) − Q(s,a))`.
pub fn q_update(
    q: &mut QTable,
    key: usize,
    action: usize,
    reward: f64,
    next_key: usize,
    alpha: f64,
    gamma: f64,
) {
    let current = q.get(key, action);
    let target = reward + gamma * q.max_value(next_key);
    q.set(key, action, current + alpha * (target - current));
}

/// Q-learning hyperparameters; the discount comes from the environment.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub episodes: usize,
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(
                "learner config",
                format!("alpha {} outside (0,1]", self.alpha),
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(
                "learner config",
                format!("epsilon {} outside [0,1]", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// Per-episode training record.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeReturn {
    pub episode: usize,
    pub discounted_return: f64,
    pub epsilon: f64,
}

/// Output of [`train`].
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub q: QTable,
    pub registry: StateRegistry,
    pub curve: Vec<EpisodeReturn>,
}

/// ε-greedy Q-learning for `cfg.episodes` episodes of `env.horizon()` steps.
pub fn train(
    env: &EnvironmentSpec,
    cfg: &LearnerConfig,
    mut registry: StateRegistry,
    rng: &mut SeededRng,
) -> Result<TrainResult> {
    cfg.validate()?;
    let mut q = QTable::new(env.num_actions());
    let mut curve = Vec::with_capacity(cfg.episodes);
    for episode in 0..cfg.episodes {
        let mut state = env.initial_state().clone();
        let mut key = registry.state_key(&state)?;
        let mut discounted = 0.0;
        let mut discount = 1.0;
        for _ in 0..env.horizon() {
            let action = if cfg.epsilon > 0.0 && rng.next_f64() < cfg.epsilon {
                rng.index(env.num_actions())
            } else {
                q.greedy_action(key)
            };
            let outcome = env.step(&state, action, rng)?;
            let next_key = registry.state_key(&outcome.next_state)?;
            q_update(&mut q, key, action, outcome.reward, next_key, cfg.alpha, env.gamma());
            discounted += discount * outcome.reward;
            discount *= env.gamma();
            state = outcome.next_state;
            key = next_key;
        }
        curve.push(EpisodeReturn {
            episode,
            discounted_return: discounted,
            epsilon: cfg.epsilon,
        });
    }
    Ok(TrainResult { q, registry, curve })
}

/// Output of [`value_iteration`].
#[derive(Debug, Clone)]
pub struct ValueIterationResult {
    pub q: QTable,
    pub sweeps: usize,
    /// Sup-norm distance between successive sweeps, one entry per sweep.
    pub sup_deltas: Vec<f64>,
}

/// Exact fixed-point iteration of
/// `Q(s,a) = r(s,a) + γ·max_b Q(s'(s,a), b)` on the registry closure of the
/// initial state. Requires a noiseless environment (transitions must be
/// deterministic for the tabulation to be exact).
pub fn value_iteration(
    env: &EnvironmentSpec,
    registry: &mut StateRegistry,
    tol: f64,
) -> Result<ValueIterationResult> {
    if !env.is_noiseless() {
        return Err(Error::invalid(
            "value iteration",
            format!("requires noise_p = 0, environment has {}", env.noise_p()),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(
            "value iteration",
            format!("tolerance {tol} must be positive"),
        ));
    }

    // close the registry under all actions, starting from the initial state
    registry.state_key(env.initial_state())?;
    let mut i = 0;
    while i < registry.len() {
        let state = registry.reference_state(i)?.clone();
        for action in env.actions() {
            let next = state.apply_matrix(action.matrix())?;
            registry.state_key(&next)?;
        }
        i += 1;
    }

    // deterministic transition and reward tables over the closed registry
    let num_states = registry.len();
    let num_actions = env.num_actions();
    let mut next_key = vec![vec![0usize; num_actions]; num_states];
    let mut reward = vec![vec![0f64; num_actions]; num_states];
    for s in 0..num_states {
        let state = registry.reference_state(s)?.clone();
        for (a, action) in env.actions().iter().enumerate() {
            let next = state.apply_matrix(action.matrix())?;
            next_key[s][a] = registry.state_key(&next)?;
            reward[s][a] = next.expectation(env.reward())?;
        }
    }

    let mut q = QTable::new(num_actions);
    let mut sup_deltas = Vec::new();
    loop {
        let mut next_q = QTable::new(num_actions);
        let mut delta = 0f64;
        for s in 0..num_states {
            for a in 0..num_actions {
                let value = reward[s][a] + env.gamma() * q.max_value(next_key[s][a]);
                delta = delta.max((value - q.get(s, a)).abs());
                next_q.set(s, a, value);
            }
        }
        q = next_q;
        sup_deltas.push(delta);
        if delta < tol {
            break;
        }
        if sup_deltas.len() >= MAX_SWEEPS {
            return Err(Error::invalid(
                "value iteration",
                format!("no convergence to {tol:e} within {MAX_SWEEPS} sweeps"),
            ));
        }
    }
    Ok(ValueIterationResult {
        sweeps: sup_deltas.len(),
        q,
        sup_deltas,
    })
}

/// Conjugates the reward observable by a transition unitary: `T†RT`.
pub fn bellman_operator(reward: &Observable, transition: &ActionUnitary) -> Result<Observable> {
    let t = transition.matrix();
    if t.rows() != reward.dim() {
        return Err(Error::ShapeMismatch {
            context: "bellman_operator",
            left_rows: reward.dim(),
            left_cols: reward.dim(),
            right_rows: t.rows(),
            right_cols: t.cols(),
        });
    }
    let conjugated = t.dagger().matmul(reward.matrix())?.matmul(t)?;
    Observable::new(conjugated)
}

/// Truncated discounted operator value of a cyclic action plan.
#[derive(Debug, Clone, Copy)]
pub struct DiscountedValue {
    pub value: f64,
    /// `γ^n·‖R‖_F/(1−γ)`, an upper bound on the discarded tail.
    pub truncation_bound: f64,
}

/// `Σ_{t<n} γ^t ⟨ψ_t|R|ψ_t⟩` where `ψ_t` is the initial state evolved by the
/// first `t+1` plan actions (the plan repeats from the start when exhausted).
pub fn discounted_operator_value(
    psi: &StateVector,
    plan: &[usize],
    env: &EnvironmentSpec,
    n_terms: usize,
) -> Result<DiscountedValue> {
    if plan.is_empty() {
        return Err(Error::EmptyPlan);
    }
    if !env.is_noiseless() {
        return Err(Error::invalid(
            "discounted_operator_value",
            format!("requires noise_p = 0, environment has {}", env.noise_p()),
        ));
    }
    let mut state = psi.clone();
    let mut value = 0.0;
    let mut discount = 1.0;
    for t in 0..n_terms {
        let action = env.action(plan[t % plan.len()])?;
        state = state.apply_matrix(action.matrix())?;
        value += discount * state.expectation(env.reward())?;
        discount *= env.gamma();
    }
    let truncation_bound =
        env.gamma().powi(n_terms as i32) * env.reward().frobenius_norm() / (1.0 - env.gamma());
    Ok(DiscountedValue {
        value,
        truncation_bound,
    })
}

/// `A(s,a) = Q(s,a) − max_b Q(s,b)`; ≤ 0, and 0 at every greedy action.
pub fn advantage(q: &QTable, key: usize, action: usize) -> Result<f64> {
    if !q.is_known(key) {
        return Err(Error::UnknownStateKey { key });
    }
    if action >= q.num_actions() {
        return Err(Error::IndexOutOfRange {
            context: "action index",
            index: action,
            bound: q.num_actions(),
        });
    }
    Ok(q.get(key, action) - q.max_value(key))
}

/// Expectation of the reward conjugated by a composed action sequence.
///
/// The list is in operator order: the composed unitary is
/// `actions[0]·actions[1]·…·actions[last]`, so the **last** element acts on
/// the state first.
pub fn sequence_q(
    psi: &StateVector,
    actions: &[&ActionUnitary],
    reward: &Observable,
) -> Result<f64> {
    let mut state = psi.clone();
    for action in actions.iter().rev() {
        state = state.apply_matrix(action.matrix())?;
    }
    state.expectation(reward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::{Complex64, ComplexMatrix};
    use crate::statevector::GateSpec;

    fn ix_env(gamma: f64, horizon: usize) -> EnvironmentSpec {
        EnvironmentSpec::new(
            1,
            vec![
                ActionUnitary::new("I", ComplexMatrix::identity(2)).unwrap(),
                ActionUnitary::new("X", gates::pauli_x()).unwrap(),
            ],
            Observable::new(gates::pauli_z()).unwrap(),
            gamma,
            0.0,
            horizon,
            StateVector::basis_state(1, 0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn registry_keys_and_idempotence() {
        let mut reg = StateRegistry::new(0.99);
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(reg.state_key(&zero).unwrap(), 0);
        assert_eq!(reg.len(), 1);
        assert_eq!(reg.state_key(&zero).unwrap(), 0);
        assert_eq!(reg.len(), 1);
        // fidelity ⟨0|1⟩ = 0 < 0.99, so |1⟩ opens a new bucket
        assert_eq!(reg.state_key(&one).unwrap(), 1);
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn registry_cap_overflow() {
        let mut reg = StateRegistry::with_cap(0.99, 2);
        for index in 0..2 {
            reg.state_key(&StateVector::basis_state(2, index).unwrap()).unwrap();
        }
        match reg.state_key(&StateVector::basis_state(2, 2).unwrap()) {
            Err(Error::RegistryOverflow { cap: 2 }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn q_update_examples() {
        let mut q = QTable::new(2);
        q_update(&mut q, 0, 0, 1.0, 1, 1.0, 0.0);
        assert_eq!(q.get(0, 0), 1.0);

        let mut q = QTable::new(2);
        q.set(0, 0, 0.75);
        q_update(&mut q, 0, 0, 5.0, 1, 0.0, 0.9);
        assert_eq!(q.get(0, 0), 0.75);

        // 0 + 0.5·(1 + 0.9·2 − 0) = 1.4
        let mut q = QTable::new(2);
        q.set(1, 1, 2.0);
        q_update(&mut q, 0, 0, 1.0, 1, 0.5, 0.9);
        assert!((q.get(0, 0) - 1.4).abs() <= 1e-12);
    }

    #[test]
    fn value_iteration_matches_geometric_series() {
        let env = ix_env(0.9, 8);
        let mut reg = StateRegistry::new(0.99);
        let result = value_iteration(&env, &mut reg, 1e-9).unwrap();
        assert_eq!(reg.len(), 2);
        // |0⟩ is absorbing under I with reward 1, so Q(0, I) = 1/(1−γ) = 10
        assert!((result.q.get(0, 0) - 10.0).abs() <= 1e-6);
        // Q(0, X) = −1 + γ·V(1) = −1 + 9 = 8
        assert!((result.q.get(0, 1) - 8.0).abs() <= 1e-6);
        assert_eq!(result.q.greedy_action(0), 0);
    }

    #[test]
    fn value_iteration_gamma_zero_is_myopic() {
        let env = ix_env(0.0, 4);
        let mut reg = StateRegistry::new(0.99);
        let result = value_iteration(&env, &mut reg, 1e-12).unwrap();
        assert_eq!(result.q.get(0, 0), 1.0);
        assert_eq!(result.q.get(0, 1), -1.0);
        assert_eq!(result.q.get(1, 0), -1.0);
        assert_eq!(result.q.get(1, 1), 1.0);
    }

    #[test]
    fn value_iteration_contracts_at_gamma_rate() {
        let env = ix_env(0.9, 8);
        let mut reg = StateRegistry::new(0.99);
        let result = value_iteration(&env, &mut reg, 1e-9).unwrap();
        let deltas = &result.sup_deltas;
        for pair in deltas.windows(2) {
            if pair[0] > 1e-12 {
                assert!(
                    pair[1] <= (env.gamma() + 0.01) * pair[0] + 1e-15,
                    "deltas {pair:?} violate contraction"
                );
            }
        }
    }

    #[test]
    fn value_iteration_rejects_noise() {
        let env = EnvironmentSpec::new(
            1,
            vec![ActionUnitary::new("I", ComplexMatrix::identity(2)).unwrap()],
            Observable::new(gates::pauli_z()).unwrap(),
            0.9,
            0.5,
            4,
            StateVector::basis_state(1, 0).unwrap(),
        )
        .unwrap();
        let mut reg = StateRegistry::new(0.99);
        assert!(value_iteration(&env, &mut reg, 1e-6).is_err());
    }

    #[test]
    fn value_iteration_closure_cap_is_reported() {
        // an irrational rotation generates an unbounded orbit of buckets
        let env = EnvironmentSpec::new(
            1,
            vec![ActionUnitary::new("R", gates::rotation(1.0)).unwrap()],
            Observable::new(gates::pauli_z()).unwrap(),
            0.9,
            0.0,
            4,
            StateVector::basis_state(1, 0).unwrap(),
        )
        .unwrap();
        let mut reg = StateRegistry::with_cap(0.999, 16);
        match value_iteration(&env, &mut reg, 1e-6) {
            Err(Error::RegistryOverflow { cap: 16 }) => {}
            other => panic!("expected registry overflow, got {other:?}"),
        }
    }

    #[test]
    fn training_agrees_with_value_iteration() {
        let env = ix_env(0.9, 10);
        let mut vi_reg = StateRegistry::new(0.99);
        let vi = value_iteration(&env, &mut vi_reg, 1e-9).unwrap();

        let cfg = LearnerConfig {
            alpha: 0.2,
            epsilon: 0.2,
            episodes: 5000,
        };
        let mut rng = SeededRng::from_seed(7);
        let result = train(&env, &cfg, StateRegistry::new(0.99), &mut rng).unwrap();
        assert_eq!(result.curve.len(), 5000);
        for key in 0..vi_reg.len() {
            assert_eq!(
                result.q.greedy_action(key),
                vi.q.greedy_action(key),
                "greedy policies disagree at key {key}"
            );
            for action in 0..env.num_actions() {
                let diff = (result.q.get(key, action) - vi.q.get(key, action)).abs();
                assert!(diff <= 0.05, "Q({key},{action}) differs by {diff}");
            }
        }
    }

    #[test]
    fn training_with_zero_epsilon_sticks_to_lowest_index_on_ties() {
        let env = ix_env(0.9, 5);
        let cfg = LearnerConfig {
            alpha: 0.5,
            epsilon: 0.0,
            episodes: 3,
        };
        let mut rng = SeededRng::from_seed(1);
        let result = train(&env, &cfg, StateRegistry::new(0.99), &mut rng).unwrap();
        // greedy on an all-zero table picks action 0 (I), which keeps the
        // state at |0⟩, so action X is never explored
        assert_eq!(result.q.get(0, 1), 0.0);
        assert!(result.q.get(0, 0) > 0.0);
        assert_eq!(result.registry.len(), 1);
    }

    #[test]
    fn training_zero_episodes() {
        let env = ix_env(0.9, 5);
        let cfg = LearnerConfig {
            alpha: 0.5,
            epsilon: 0.1,
            episodes: 0,
        };
        let mut rng = SeededRng::from_seed(1);
        let result = train(&env, &cfg, StateRegistry::new(0.99), &mut rng).unwrap();
        assert!(result.curve.is_empty());
        assert!(result.q.is_empty());
    }

    #[test]
    fn training_is_reproducible() {
        let env = ix_env(0.9, 6);
        let cfg = LearnerConfig {
            alpha: 0.3,
            epsilon: 0.3,
            episodes: 50,
        };
        let run = |seed: u64| {
            let mut rng = SeededRng::from_seed(seed);
            train(&env, &cfg, StateRegistry::new(0.99), &mut rng).unwrap()
        };
        let a = run(11);
        let b = run(11);
        assert_eq!(a.q, b.q);
        let curve_a: Vec<f64> = a.curve.iter().map(|e| e.discounted_return).collect();
        let curve_b: Vec<f64> = b.curve.iter().map(|e| e.discounted_return).collect();
        assert_eq!(curve_a, curve_b);
    }

    #[test]
    fn bellman_operator_examples() {
        let z = Observable::new(gates::pauli_z()).unwrap();

        let id = ActionUnitary::new("I", ComplexMatrix::identity(2)).unwrap();
        let out = bellman_operator(&z, &id).unwrap();
        assert_eq!(out.matrix().max_abs_diff(z.matrix()), 0.0);

        // XZX = −Z by direct 2×2 conjugation
        let x = ActionUnitary::new("X", gates::pauli_x()).unwrap();
        let out = bellman_operator(&z, &x).unwrap();
        let minus_z = gates::pauli_z().scale(Complex64::new(-1.0, 0.0));
        assert!(out.matrix().max_abs_diff(&minus_z) <= 1e-12);

        // HZH = X by direct 2×2 conjugation
        let h = ActionUnitary::new("H", gates::hadamard()).unwrap();
        let out = bellman_operator(&z, &h).unwrap();
        assert!(out.matrix().max_abs_diff(&gates::pauli_x()) <= 1e-12);
        assert!(out.matrix().hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn discounted_operator_value_geometric_series() {
        let env = ix_env(0.9, 4);
        let psi = StateVector::basis_state(1, 0).unwrap();
        let out = discounted_operator_value(&psi, &[0], &env, 200).unwrap();
        assert!((out.value - 10.0).abs() <= 1e-6 + out.truncation_bound);
        assert!(out.truncation_bound <= 1e-8);
    }

    #[test]
    fn discounted_operator_value_single_term() {
        let env = ix_env(0.9, 4);
        let psi = StateVector::basis_state(1, 0).unwrap();
        let out = discounted_operator_value(&psi, &[1], &env, 1).unwrap();
        assert!((out.value + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn discounted_operator_value_alternating_series() {
        // plan [X] cycled at γ=1/2: −1 + 1/2 − 1/4 + … = −2/3
        let env = ix_env(0.5, 4);
        let psi = StateVector::basis_state(1, 0).unwrap();
        let out = discounted_operator_value(&psi, &[1], &env, 60).unwrap();
        assert!((out.value + 2.0 / 3.0).abs() <= 1e-6);
    }

    #[test]
    fn discounted_operator_value_rejects_empty_plan() {
        let env = ix_env(0.5, 4);
        let psi = StateVector::basis_state(1, 0).unwrap();
        match discounted_operator_value(&psi, &[], &env, 10) {
            Err(Error::EmptyPlan) => {}
            other => panic!("expected empty plan error, got {other:?}"),
        }
    }

    #[test]
    fn bellman_operator_rejects_dimension_mismatch() {
        let z = Observable::new(gates::pauli_z()).unwrap();
        let big = ActionUnitary::new("I4", ComplexMatrix::identity(4)).unwrap();
        match bellman_operator(&z, &big) {
            Err(Error::ShapeMismatch { .. }) => {}
            other => panic!("expected shape mismatch, got {other:?}"),
        }
    }

    #[test]
    fn sequence_q_rejects_dimension_mismatch() {
        let z = Observable::new(gates::pauli_z()).unwrap();
        let psi = StateVector::basis_state(1, 0).unwrap();
        let big = ActionUnitary::new("I4", ComplexMatrix::identity(4)).unwrap();
        assert!(sequence_q(&psi, &[&big], &z).is_err());
    }

    #[test]
    fn converged_values_respect_the_reward_norm_bound() {
        let env = ix_env(0.9, 8);
        let mut reg = StateRegistry::new(0.99);
        let vi = value_iteration(&env, &mut reg, 1e-9).unwrap();
        let bound = env.reward().frobenius_norm() / (1.0 - env.gamma()) + 1e-6;
        for key in vi.q.known_keys() {
            for action in 0..env.num_actions() {
                assert!(vi.q.get(key, action).abs() <= bound);
            }
        }
    }

    #[test]
    fn advantage_normalization() {
        let env = ix_env(0.9, 8);
        let mut reg = StateRegistry::new(0.99);
        let vi = value_iteration(&env, &mut reg, 1e-9).unwrap();
        for key in 0..reg.len() {
            let best = (0..env.num_actions())
                .map(|a| advantage(&vi.q, key, a).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(best.abs() <= 1e-12, "max advantage at key {key} is {best}");
            for a in 0..env.num_actions() {
                assert!(advantage(&vi.q, key, a).unwrap() <= 1e-12);
            }
        }
        // from the geometric fixed point: A(0, X) = 8 − 10 = −2
        assert!((advantage(&vi.q, 0, 1).unwrap() + 2.0).abs() <= 1e-5);
    }

    #[test]
    fn advantage_on_single_action_table_is_zero() {
        let mut q = QTable::new(1);
        q.set(0, 0, 3.25);
        assert_eq!(advantage(&q, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn advantage_rejects_unknown_key() {
        let q = QTable::new(2);
        match advantage(&q, 5, 0) {
            Err(Error::UnknownStateKey { key: 5 }) => {}
            other => panic!("expected unknown key, got {other:?}"),
        }
    }

    #[test]
    fn sequence_q_empty_and_single() {
        let z = Observable::new(gates::pauli_z()).unwrap();
        let psi = StateVector::basis_state(1, 0).unwrap();
        assert!((sequence_q(&psi, &[], &z).unwrap() - 1.0).abs() <= 1e-12);

        let x = ActionUnitary::new("X", gates::pauli_x()).unwrap();
        assert!((sequence_q(&psi, &[&x], &z).unwrap() + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sequence_q_witnesses_order_dependence() {
        // with reward X: H·X|0⟩ = |−⟩ gives −1 while X·H|0⟩ = |+⟩ gives +1
        let reward = Observable::new(gates::pauli_x()).unwrap();
        let psi = StateVector::basis_state(1, 0).unwrap();
        let h = ActionUnitary::new("H", gates::hadamard()).unwrap();
        let x = ActionUnitary::new("X", gates::pauli_x()).unwrap();
        let hx = sequence_q(&psi, &[&h, &x], &reward).unwrap();
        let xh = sequence_q(&psi, &[&x, &h], &reward).unwrap();
        assert!((hx + 1.0).abs() <= 1e-12);
        assert!((xh - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sequence_q_is_permutation_invariant_for_commuting_actions() {
        let w = gates::hadamard();
        let phase = |alpha: f64| {
            ComplexMatrix::new(
                2,
                2,
                vec![
                    Complex64::new(0.0, alpha).exp(),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, -alpha).exp(),
                ],
            )
            .unwrap()
        };
        let a = ActionUnitary::new("A", w.matmul(&phase(0.8)).unwrap().matmul(&w).unwrap())
            .unwrap();
        let b = ActionUnitary::new("B", w.matmul(&phase(-0.3)).unwrap().matmul(&w).unwrap())
            .unwrap();
        let reward = Observable::new(gates::pauli_z()).unwrap();
        let psi = StateVector::basis_state(1, 0)
            .unwrap()
            .apply_gate(&GateSpec::r(0, 0.77))
            .unwrap();
        let orders: [[&ActionUnitary; 3]; 3] = [[&a, &b, &a], [&a, &a, &b], [&b, &a, &a]];
        let values: Vec<f64> = orders
            .iter()
            .map(|seq| sequence_q(&psi, seq, &reward).unwrap())
            .collect();
        for v in &values[1..] {
            assert!((v - values[0]).abs() <= 1e-10);
        }
    }
}
