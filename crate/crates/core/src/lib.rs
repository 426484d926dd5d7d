//! Statevector simulation of reinforcement learning agents whose actions are
//! non-commuting unitaries.
//!
//! The crate is organized around a small dense complex-matrix kernel
//! ([`linalg`]), an n-qubit pure-state simulator ([`statevector`]), an
//! episodic decision environment with unitary actions and a Hermitian reward
//! observable ([`environment`]), tabular Q-learning and value iteration over
//! fidelity-bucketed quantum states ([`bellman`]), parameterized quantum
//! circuits with exact shift-rule gradients ([`pqc`]), a quantum-vs-classical
//! comparison pipeline ([`advantage`]), and commutator-based diagnostics that
//! quantify how far an action set is from being abelian ([`noncomm`]).
//!
//! Conventions used throughout:
//!
//! * Qubit 0 is the **most significant bit** of a computational basis index,
//!   so `|10⟩` on two qubits is basis index 2.
//! * ħ = 1; time arguments to matrix exponentials are plain scalars.
//! * All randomness flows through [`rng::SeededRng`]; results are
//!   reproducible given (seed, stream, call sequence).

pub mod advantage;
pub mod bellman;
pub mod environment;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod noncomm;
pub mod observable;
pub mod pqc;
pub mod rng;
pub mod statevector;



pub use advantage::{AdvantageConfig, AdvantageReport, ClassicalBaseline};
pub use bellman::{LearnerConfig, QTable, StateRegistry, TrainResult, ValueIterationResult};
pub use environment::{ActionUnitary, EnvironmentSpec, EpisodeTrace, PauliKind, StepOutcome};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use noncomm::{FiniteGroupClosure, NoncommReport};
pub use observable::Observable;
pub use pqc::{AgentConfig, CircuitTemplate, ParamVector, Placement, PlacementKind};
pub use rng::SeededRng;
pub use statevector::{GateKind, GateSpec, StateVector};
