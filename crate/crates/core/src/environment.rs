//! Episodic decision environment over unitary actions.
//!
//! An environment is a finite set of named unitaries, a Hermitian reward
//! observable, a discount factor, an optional per-step Pauli noise channel
//! (unraveled as a stochastic trajectory on pure states), and a finite
//! horizon. A step applies the chosen action, then noise, and the reward is
//! the expectation of the reward observable **on the post-action state** —
//! this makes the reward a deterministic function of (state, action) in the
//! noiseless case, which the Bellman machinery relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{ComplexMatrix, UNITARY_TOL};
use crate::observable::Observable;
use crate::rng::SeededRng;
use crate::statevector::{GateSpec, StateVector};

/// Named full-dimension unitary action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAction", into = "RawAction")]
pub struct ActionUnitary {
    name: String,
    matrix: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAction {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hamiltonian: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
}

impl TryFrom<RawAction> for ActionUnitary {
    type Error = Error;

    fn try_from(raw: RawAction) -> Result<Self> {
        match (raw.matrix, raw.hamiltonian, raw.dt) {
            (Some(m), None, None) => ActionUnitary::new(raw.name, m),
            (None, Some(h), Some(dt)) => ActionUnitary::from_hamiltonian(raw.name, &h, dt),
            _ => Err(Error::invalid(
                "action literal",
                "provide either \"matrix\" or \"hamiltonian\" with \"dt\"",
            )),
        }
    }
}

impl From<ActionUnitary> for RawAction {
    fn from(a: ActionUnitary) -> Self {
        RawAction {
            name: a.name,
            matrix: Some(a.matrix),
            hamiltonian: None,
            dt: None,
        }
    }
}

impl ActionUnitary {
    /// Wraps a matrix as an action; rejects non-unitary input.
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_unitary(UNITARY_TOL)?;
        Ok(Self {
            name: name.into(),
            matrix,
        })
    }

    /// `e^{−i·h·dt}` of a Hermitian generator, as an action.
    pub fn from_hamiltonian(name: impl Into<String>, h: &ComplexMatrix, dt: f64) -> Result<Self> {
        Self::new(name, h.expm_skew(dt)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Builds the action list `U_k = e^{−i·h_k·dt}`, named by index.
pub fn from_hamiltonians(h_list: &[ComplexMatrix], dt: f64) -> Result<Vec<ActionUnitary>> {
    h_list
        .iter()
        .enumerate()
        .map(|(k, h)| ActionUnitary::from_hamiltonian(format!("U{k}"), h, dt))
        .collect()
}

/// Pauli kinds used by the trajectory noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliKind {
    X,
    Y,
    Z,
}

impl PauliKind {
    fn from_index(i: usize) -> Self {
        match i {
            0 => PauliKind::X,
            1 => PauliKind::Y,
            _ => PauliKind::Z,
        }
    }
}

/// With probability `p`, applies one uniformly chosen Pauli on a uniformly
/// chosen qubit; otherwise leaves the state alone. Reports the event.
pub fn apply_noise(
    state: &StateVector,
    p: f64,
    rng: &mut SeededRng,
) -> Result<(StateVector, Option<(PauliKind, usize)>)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("noise probability", format!("{p} outside [0,1]")));
    }
    if p > 0.0 && rng.next_f64() < p {
        let kind_index = rng.index(3);
        let qubit = rng.index(state.num_qubits());
        let gate = GateSpec::custom(vec![qubit], gates::pauli_by_index(kind_index));
        let noisy = state.apply_gate(&gate)?;
        Ok((noisy, Some((PauliKind::from_index(kind_index), qubit))))
    } else {
        Ok((state.clone(), None))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawEnvironment {
    n: usize,
    gamma: f64,
    noise_p: f64,
    horizon: usize,
    reward: ComplexMatrix,
    actions: Vec<ActionUnitary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<StateVector>,
}

/// Full environment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnvironment", into = "RawEnvironment")]
pub struct EnvironmentSpec {
    num_qubits: usize,
    actions: Vec<ActionUnitary>,
    reward: Observable,
    gamma: f64,
    noise_p: f64,
    horizon: usize,
    initial_state: StateVector,
}

impl TryFrom<RawEnvironment> for EnvironmentSpec {
    type Error = Error;

    fn try_from(raw: RawEnvironment) -> Result<Self> {
        let initial = match raw.initial {
            Some(s) => s,
            None => StateVector::basis_state(raw.n, 0)?,
        };
        EnvironmentSpec::new(
            raw.n,
            raw.actions,
            Observable::new(raw.reward)?,
            raw.gamma,
            raw.noise_p,
            raw.horizon,
            initial,
        )
    }
}

impl From<EnvironmentSpec> for RawEnvironment {
    fn from(env: EnvironmentSpec) -> Self {
        RawEnvironment {
            n: env.num_qubits,
            gamma: env.gamma,
            noise_p: env.noise_p,
            horizon: env.horizon,
            reward: env.reward.matrix().clone(),
            actions: env.actions,
            initial: Some(env.initial_state),
        }
    }
}

impl EnvironmentSpec {
    pub fn new(
        num_qubits: usize,
        actions: Vec<ActionUnitary>,
        reward: Observable,
        gamma: f64,
        noise_p: f64,
        horizon: usize,
        initial_state: StateVector,
    ) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if actions.is_empty() {
            return Err(Error::invalid("environment", "at least one action required"));
        }
        for a in &actions {
            if a.matrix().rows() != dim || a.matrix().cols() != dim {
                return Err(Error::invalid(
                    "environment",
                    format!(
                        "action '{}' is {}x{}, expected {dim}x{dim}",
                        a.name(),
                        a.matrix().rows(),
                        a.matrix().cols()
                    ),
                ));
            }
        }
        if reward.dim() != dim {
            return Err(Error::invalid(
                "environment",
                format!("reward is {}x{}, expected {dim}x{dim}", reward.dim(), reward.dim()),
            ));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("environment", format!("gamma {gamma} outside [0,1)")));
        }
        if !(0.0..=1.0).contains(&noise_p) {
            return Err(Error::invalid(
                "environment",
                format!("noise_p {noise_p} outside [0,1]"),
            ));
        }
        if horizon == 0 {
            return Err(Error::invalid("environment", "horizon must be positive"));
        }
        if initial_state.num_qubits() != num_qubits {
            return Err(Error::invalid(
                "environment",
                format!(
                    "initial state has {} qubits, environment has {num_qubits}",
                    initial_state.num_qubits()
                ),
            ));
        }
        Ok(Self {
            num_qubits,
            actions,
            reward,
            gamma,
            noise_p,
            horizon,
            initial_state,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn actions(&self) -> &[ActionUnitary] {
        &self.actions
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, index: usize) -> Result<&ActionUnitary> {
        self.actions.get(index).ok_or(Error::IndexOutOfRange {
            context: "action index",
            index,
            bound: self.actions.len(),
        })
    }

    pub fn reward(&self) -> &Observable {
        &self.reward
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn noise_p(&self) -> f64 {
        self.noise_p
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise_p == 0.0
    }

    /// Applies action `action_index`, then noise; the reward is the
    /// expectation of the reward observable on the resulting state.
    pub fn step(
        &self,
        state: &StateVector,
        action_index: usize,
        rng: &mut SeededRng,
    ) -> Result<StepOutcome> {
        let action = self.action(action_index)?;
        let after_action = state.apply_matrix(action.matrix())?;
        let (next_state, noise_applied) = apply_noise(&after_action, self.noise_p, rng)?;
        let reward = next_state.expectation(&self.reward)?;
        Ok(StepOutcome {
            next_state,
            reward,
            noise_applied,
        })
    }

    /// Runs one episode of `horizon` steps under the given action selector.
    pub fn run_episode(
        &self,
        mut policy: impl FnMut(&StateVector, &mut SeededRng) -> Result<usize>,
        rng: &mut SeededRng,
    ) -> Result<EpisodeTrace> {
        let mut state = self.initial_state.clone();
        let mut steps = Vec::with_capacity(self.horizon);
        let mut cumulative = 0.0;
        let mut discounted = 0.0;
        let mut discount = 1.0;
        for _ in 0..self.horizon {
            let action = policy(&state, rng)?;
            let outcome = self.step(&state, action, rng)?;
            cumulative += outcome.reward;
            discounted += discount * outcome.reward;
            discount *= self.gamma;
            steps.push(EpisodeStep {
                state,
                action,
                reward: outcome.reward,
                noise_applied: outcome.noise_applied,
            });
            state = outcome.next_state;
        }
        Ok(EpisodeTrace {
            steps,
            final_state: state,
            cumulative_reward: cumulative,
            discounted_return: discounted,
        })
    }
}

/// Result of a single environment step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: StateVector,
    pub reward: f64,
    pub noise_applied: Option<(PauliKind, usize)>,
}

/// One entry of an episode trace; `state` is the state the action was taken
/// from.
#[derive(Debug, Clone)]
pub struct EpisodeStep {
    pub state: StateVector,
    pub action: usize,
    pub reward: f64,
    pub noise_applied: Option<(PauliKind, usize)>,
}

#[derive(Debug, Clone)]
pub struct EpisodeTrace {
    pub steps: Vec<EpisodeStep>,
    pub final_state: StateVector,
    pub cumulative_reward: f64,
    pub discounted_return: f64,
}
