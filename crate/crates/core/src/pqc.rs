//! Parameterized quantum circuits: templates, cost, exact shift-rule
//! gradients, gradient descent, and the measurement-driven agent loop.
//!
//! Gradients use the parameter-shift rule. For `R` placements the two-term
//! `±π/2` rule is exact. A `CR` placement leaves the control-|0⟩ sector
//! untouched, so its cost picks up half-frequency terms in the angle and the
//! two-term rule is not exact there; `CR` placements use the four-term rule
//! (shifts `±π/2` and `±3π/2`) instead, which is exact for controlled
//! rotations. A central finite-difference gradient with caller-chosen step
//! is provided as the fallback and as an independent cross-check.

use serde::{Deserialize, Serialize};

use crate::environment::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::rng::SeededRng;
use crate::statevector::{GateSpec, StateVector};

/// Gate kinds allowed in a template. `R` and `CR` carry a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlacementKind {
    R,
    CR,
    H,
    CNOT,
}

impl PlacementKind {
    fn arity(self) -> usize {
        match self {
            PlacementKind::R | PlacementKind::H => 1,
            PlacementKind::CR | PlacementKind::CNOT => 2,
        }
    }

    fn parameterized(self) -> bool {
        matches!(self, PlacementKind::R | PlacementKind::CR)
    }
}

/// One gate placement in a template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub kind: PlacementKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param_index: Option<usize>,
}

impl Placement {
    pub fn r(qubit: usize, param_index: usize) -> Self {
        Self {
            kind: PlacementKind::R,
            targets: vec![qubit],
            param_index: Some(param_index),
        }
    }

    pub fn cr(control: usize, target: usize, param_index: usize) -> Self {
        Self {
            kind: PlacementKind::CR,
            targets: vec![control, target],
            param_index: Some(param_index),
        }
    }

    pub fn h(qubit: usize) -> Self {
        Self {
            kind: PlacementKind::H,
            targets: vec![qubit],
            param_index: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: PlacementKind::CNOT,
            targets: vec![control, target],
            param_index: None,
        }
    }

    fn gate(&self, angle: Option<f64>) -> GateSpec {
        match self.kind {
            PlacementKind::R => GateSpec::r(self.targets[0], angle.expect("validated")),
            PlacementKind::CR => {
                GateSpec::cr(self.targets[0], self.targets[1], angle.expect("validated"))
            }
            PlacementKind::H => GateSpec::h(self.targets[0]),
            PlacementKind::CNOT => GateSpec::cnot(self.targets[0], self.targets[1]),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTemplate {
    n: usize,
    params: usize,
    placements: Vec<Placement>,
}

/// Ordered gate layout over `num_qubits` qubits with `num_params` shared
/// rotation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTemplate", into = "RawTemplate")]
pub struct CircuitTemplate {
    num_qubits: usize,
    num_params: usize,
    placements: Vec<Placement>,
}

impl TryFrom<RawTemplate> for CircuitTemplate {
    type Error = Error;

    fn try_from(raw: RawTemplate) -> Result<Self> {
        CircuitTemplate::new(raw.n, raw.params, raw.placements)
    }
}

impl From<CircuitTemplate> for RawTemplate {
    fn from(t: CircuitTemplate) -> Self {
        RawTemplate {
            n: t.num_qubits,
            params: t.num_params,
            placements: t.placements,
        }
    }
}

impl CircuitTemplate {
    pub fn new(num_qubits: usize, num_params: usize, placements: Vec<Placement>) -> Result<Self> {
        let mut used = vec![false; num_params];
        for (i, p) in placements.iter().enumerate() {
            if p.targets.len() != p.kind.arity() {
                return Err(Error::invalid(
                    "template placement",
                    format!(
                        "placement {i} ({:?}) takes {} target(s), got {}",
                        p.kind,
                        p.kind.arity(),
                        p.targets.len()
                    ),
                ));
            }
            for &q in &p.targets {
                if q >= num_qubits {
                    return Err(Error::IndexOutOfRange {
                        context: "template target",
                        index: q,
                        bound: num_qubits,
                    });
                }
            }
            if p.targets.len() == 2 && p.targets[0] == p.targets[1] {
                return Err(Error::invalid(
                    "template placement",
                    format!("placement {i} targets the same qubit twice"),
                ));
            }
            match (p.kind.parameterized(), p.param_index) {
                (true, Some(k)) if k < num_params => used[k] = true,
                (true, Some(k)) => {
                    return Err(Error::IndexOutOfRange {
                        context: "param index",
                        index: k,
                        bound: num_params,
                    })
                }
                (true, None) => {
                    return Err(Error::invalid(
                        "template placement",
                        format!("placement {i} ({:?}) needs a param_index", p.kind),
                    ))
                }
                (false, Some(_)) => {
                    return Err(Error::invalid(
                        "template placement",
                        format!("placement {i} ({:?}) does not take a param_index", p.kind),
                    ))
                }
                (false, None) => {}
            }
        }
        if let Some(k) = used.iter().position(|&u| !u) {
            return Err(Error::invalid(
                "template",
                format!("param index {k} is not used by any placement"),
            ));
        }
        if num_qubits == 0 || num_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::invalid(
                "template",
                format!("{num_qubits} qubits outside 1..={}", crate::statevector::MAX_QUBITS),
            ));
        }
        Ok(Self {
            num_qubits,
            num_params,
            placements,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }
}

/// Bound parameter values, radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ParamVector {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ParamVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ParamVector::new(values)
    }
}

impl From<ParamVector> for Vec<f64> {
    fn from(v: ParamVector) -> Self {
        v.values
    }
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "parameter vector" });
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn shifted(&self, index: usize, delta: f64) -> ParamVector {
        let mut out = self.clone();
        out.values[index] += delta;
        out
    }
}

fn check_lengths(template: &CircuitTemplate, theta: &ParamVector) -> Result<()> {
    if theta.len() != template.num_params() {
        return Err(Error::invalid(
            "parameter binding",
            format!("template has {} params, vector has {}", template.num_params(), theta.len()),
        ));
    }
    Ok(())
}

/// Runs the template from |0…0⟩ with bound angles. `occurrence_shift` adds
/// an extra angle to one specific placement occurrence (used by the
/// per-occurrence shift rules, which must not move other placements that
/// share the same parameter).
fn evaluate_shifted(
    template: &CircuitTemplate,
    theta: &ParamVector,
    occurrence_shift: Option<(usize, f64)>,
) -> Result<StateVector> {
    check_lengths(template, theta)?;
    let mut state = StateVector::basis_state(template.num_qubits(), 0)?;
    for (i, placement) in template.placements().iter().enumerate() {
        let angle = placement.param_index.map(|k| {
            let mut a = theta.values()[k];
            if let Some((target, delta)) = occurrence_shift {
                if target == i {
                    a += delta;
                }
            }
            a
        });
        state = state.apply_gate(&placement.gate(angle))?;
    }
    Ok(state)
}

/// `|ψ(θ)⟩`: the template applied to |0…0⟩.
pub fn evaluate(template: &CircuitTemplate, theta: &ParamVector) -> Result<StateVector> {
    evaluate_shifted(template, theta, None)
}

/// `E(θ) = ⟨ψ(θ)|obs|ψ(θ)⟩`.
pub fn cost(template: &CircuitTemplate, theta: &ParamVector, obs: &Observable) -> Result<f64> {
    evaluate(template, theta)?.expectation(obs)
}

fn cost_with_occurrence_shift(
    template: &CircuitTemplate,
    theta: &ParamVector,
    obs: &Observable,
    occurrence: usize,
    delta: f64,
) -> Result<f64> {
    evaluate_shifted(template, theta, Some((occurrence, delta)))?.expectation(obs)
}

/// Exact gradient of `E(θ)` by parameter-shift rules (two-term for `R`,
/// four-term for `CR`). Parameters shared by several placements accumulate
/// one shift-rule term per occurrence.
pub fn gradient(
    template: &CircuitTemplate,
    theta: &ParamVector,
    obs: &Observable,
) -> Result<Vec<f64>> {
    check_lengths(template, theta)?;
    let half_pi = std::f64::consts::FRAC_PI_2;
    // four-term coefficients for controlled rotations
    let c1 = (2.0 + std::f64::consts::SQRT_2) / 8.0;
    let c2 = (2.0 - std::f64::consts::SQRT_2) / 8.0;

    let mut grad = vec![0.0; template.num_params()];
    for (i, placement) in template.placements().iter().enumerate() {
        let Some(k) = placement.param_index else { continue };
        let shift = |delta: f64| cost_with_occurrence_shift(template, theta, obs, i, delta);
        let contribution = match placement.kind {
            PlacementKind::R => (shift(half_pi)? - shift(-half_pi)?) / 2.0,
            PlacementKind::CR => {
                let d1 = shift(half_pi)? - shift(-half_pi)?;
                let d2 = shift(3.0 * half_pi)? - shift(-3.0 * half_pi)?;
                c1 * d1 - c2 * d2
            }
            PlacementKind::H | PlacementKind::CNOT => unreachable!("fixed gates carry no param"),
        };
        grad[k] += contribution;
    }
    Ok(grad)
}

/// Central finite-difference gradient with step `h`.
pub fn gradient_finite_difference(
    template: &CircuitTemplate,
    theta: &ParamVector,
    obs: &Observable,
    h: f64,
) -> Result<Vec<f64>> {
    check_lengths(template, theta)?;
    if !(h > 0.0) {
        return Err(Error::invalid("finite differences", format!("step {h} must be positive")));
    }
    (0..template.num_params())
        .map(|k| {
            let plus = cost(template, &theta.shifted(k, h), obs)?;
            let minus = cost(template, &theta.shifted(k, -h), obs)?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

/// One record of the optimizer trace.
#[derive(Debug, Clone, Copy)]
pub struct OptStep {
    pub iter: usize,
    pub cost: f64,
    pub grad_norm: f64,
}

/// Result of [`optimize`].
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub theta: ParamVector,
    pub trace: Vec<OptStep>,
    pub final_cost: f64,
    /// True when the run stopped because a non-finite cost appeared.
    pub halted_non_finite: bool,
}

/// Plain gradient descent `θ ← θ − lr·g`, for `iters` steps or until
/// `‖g‖∞ < 1e-8`. Monotone descent is not guaranteed and not asserted.
pub fn optimize(
    template: &CircuitTemplate,
    theta0: &ParamVector,
    obs: &Observable,
    lr: f64,
    iters: usize,
) -> Result<OptimizeOutcome> {
    if !(lr > 0.0) {
        return Err(Error::invalid("optimizer", format!("learning rate {lr} must be positive")));
    }
    check_lengths(template, theta0)?;
    let mut theta = theta0.clone();
    let mut trace = Vec::new();
    let mut halted = false;
    for iter in 0..iters {
        let e = cost(template, &theta, obs)?;
        if !e.is_finite() {
            trace.push(OptStep {
                iter,
                cost: e,
                grad_norm: f64::NAN,
            });
            halted = true;
            break;
        }
        let g = gradient(template, &theta, obs)?;
        let grad_norm = g.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        trace.push(OptStep {
            iter,
            cost: e,
            grad_norm,
        });
        if grad_norm < 1e-8 {
            break;
        }
        let values: Vec<f64> = theta
            .values()
            .iter()
            .zip(&g)
            .map(|(t, gk)| t - lr * gk)
            .collect();
        match ParamVector::new(values) {
            Ok(next) => theta = next,
            Err(_) => {
                halted = true;
                break;
            }
        }
    }
    let final_cost = cost(template, &theta, obs)?;
    Ok(OptimizeOutcome {
        theta,
        trace,
        final_cost,
        halted_non_finite: halted,
    })
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub(crate) fn ceil_log2(n: usize) -> usize {
    assert!(n > 0);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Selects an action by evaluating `|ψ(θ)⟩` and measuring: the leading
/// `⌈log₂ |A|⌉` qubits of the sampled outcome, taken modulo the action
/// count, are the action index.
pub fn select_action(
    template: &CircuitTemplate,
    theta: &ParamVector,
    num_actions: usize,
    rng: &mut SeededRng,
) -> Result<usize> {
    let needed = ceil_log2(num_actions);
    if template.num_qubits() < needed {
        return Err(Error::invalid(
            "action selection",
            format!(
                "{} actions need {} qubit(s), template has {}",
                num_actions,
                needed,
                template.num_qubits()
            ),
        ));
    }
    let policy_state = evaluate(template, theta)?;
    let (outcome, _, _) = policy_state.measure_computational(rng);
    let leading = outcome >> (template.num_qubits() - needed);
    Ok(leading % num_actions)
}

/// Mean discounted return of `batch` measurement-driven episodes at fixed
/// `θ`. Episode `e` uses the derived stream `eval_rng.derive(e)`, so a fixed
/// `eval_rng` gives common random numbers across different `θ`.
pub fn mean_batch_return(
    env: &EnvironmentSpec,
    template: &CircuitTemplate,
    theta: &ParamVector,
    batch: usize,
    eval_rng: &SeededRng,
) -> Result<f64> {
    if batch == 0 {
        return Err(Error::invalid("agent evaluation", "batch must be positive"));
    }
    let mut total = 0.0;
    for e in 0..batch {
        let mut rng = eval_rng.derive(e as u64);
        let trace = env.run_episode(
            |_, r| select_action(template, theta, env.num_actions(), r),
            &mut rng,
        )?;
        total += trace.discounted_return;
    }
    Ok(total / batch as f64)
}

/// Agent training hyperparameters. `episodes` counts optimization rounds;
/// each round measures the batch objective and takes one finite-difference
/// ascent step of size `lr` with probe step `h`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AgentConfig {
    pub episodes: usize,
    pub batch: usize,
    pub h: f64,
    pub lr: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            episodes: 100,
            batch: 16,
            h: 0.05,
            lr: 0.1,
        }
    }
}

/// Result of [`train_pqc_agent`].
#[derive(Debug, Clone)]
pub struct AgentResult {
    /// Best parameters seen, by measured batch return.
    pub theta: ParamVector,
    pub best_return: f64,
    /// Mean batch return at the start of each round.
    pub reward_curve: Vec<f64>,
}

/// Measurement-driven agent training with random initial parameters drawn
/// from `rng`.
pub fn train_pqc_agent(
    env: &EnvironmentSpec,
    template: &CircuitTemplate,
    cfg: &AgentConfig,
    rng: &SeededRng,
) -> Result<AgentResult> {
    let mut init = rng.derive(0);
    let theta0 = ParamVector::new(
        (0..template.num_params())
            .map(|_| init.next_f64() * std::f64::consts::TAU)
            .collect(),
    )?;
    train_pqc_agent_from(env, template, &theta0, cfg, rng)
}

/// Measurement-driven agent training from explicit initial parameters.
///
/// Per round: measure the batch objective at `θ` (recorded in the reward
/// curve), estimate the return gradient by central finite differences over
/// the same episode streams, and ascend. Returns the best `θ` observed.
pub fn train_pqc_agent_from(
    env: &EnvironmentSpec,
    template: &CircuitTemplate,
    theta0: &ParamVector,
    cfg: &AgentConfig,
    rng: &SeededRng,
) -> Result<AgentResult> {
    check_lengths(template, theta0)?;
    if !(cfg.h > 0.0) || !(cfg.lr > 0.0) {
        return Err(Error::invalid(
            "agent config",
            format!("h {} and lr {} must be positive", cfg.h, cfg.lr),
        ));
    }
    let mut theta = theta0.clone();
    let mut best_theta = theta.clone();
    let mut best_return = f64::NEG_INFINITY;
    let mut curve = Vec::with_capacity(cfg.episodes);
    for round in 0..cfg.episodes {
        let eval_rng = rng.derive(round as u64 + 1);
        let current = mean_batch_return(env, template, &theta, cfg.batch, &eval_rng)?;
        curve.push(current);
        if current > best_return {
            best_return = current;
            best_theta = theta.clone();
        }
        let mut next = theta.values().to_vec();
        for p in 0..template.num_params() {
            let plus =
                mean_batch_return(env, template, &theta.shifted(p, cfg.h), cfg.batch, &eval_rng)?;
            let minus =
                mean_batch_return(env, template, &theta.shifted(p, -cfg.h), cfg.batch, &eval_rng)?;
            next[p] += cfg.lr * (plus - minus) / (2.0 * cfg.h);
        }
        theta = ParamVector::new(next)?;
    }
    if cfg.episodes > 0 {
        let eval_rng = rng.derive(cfg.episodes as u64 + 1);
        let final_return = mean_batch_return(env, template, &theta, cfg.batch, &eval_rng)?;
        if final_return > best_return {
            best_return = final_return;
            best_theta = theta;
        }
    } else {
        best_theta = theta;
        best_return = f64::NAN;
    }
    Ok(AgentResult {
        theta: best_theta,
        best_return,
        reward_curve: curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::ActionUnitary;
    use crate::gates;
    use crate::linalg::{Complex64, ComplexMatrix};

    fn single_r_template() -> CircuitTemplate {
        CircuitTemplate::new(1, 1, vec![Placement::r(0, 0)]).unwrap()
    }

    fn z_observable() -> Observable {
        Observable::new(gates::pauli_z()).unwrap()
    }

    fn ix_env(gamma: f64, horizon: usize) -> EnvironmentSpec {
        EnvironmentSpec::new(
            1,
            vec![
                ActionUnitary::new("I", ComplexMatrix::identity(2)).unwrap(),
                ActionUnitary::new("X", gates::pauli_x()).unwrap(),
            ],
            z_observable(),
            gamma,
            0.0,
            horizon,
            StateVector::basis_state(1, 0).unwrap(),
        )
        .unwrap()
    }

    /// Deterministic random template over 2 qubits and 4 params, mixing R,
    /// CR, H, CNOT placements.
    fn random_template(rng: &mut SeededRng) -> (CircuitTemplate, ParamVector) {
        let mut placements = Vec::new();
        let mut param = 0usize;
        while param < 4 {
            match rng.index(4) {
                0 => {
                    placements.push(Placement::r(rng.index(2), param));
                    param += 1;
                }
                1 => {
                    let c = rng.index(2);
                    placements.push(Placement::cr(c, 1 - c, param));
                    param += 1;
                }
                2 => placements.push(Placement::h(rng.index(2))),
                _ => {
                    let c = rng.index(2);
                    placements.push(Placement::cnot(c, 1 - c));
                }
            }
        }
        let template = CircuitTemplate::new(2, 4, placements).unwrap();
        let theta =
            ParamVector::new((0..4).map(|_| rng.next_f64() * 6.28 - 3.14).collect()).unwrap();
        (template, theta)
    }

    fn random_observable(rng: &mut SeededRng) -> Observable {
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in i..4 {
                let re = rng.next_f64() * 2.0 - 1.0;
                let im = if i == j { 0.0 } else { rng.next_f64() * 2.0 - 1.0 };
                m.set(i, j, Complex64::new(re, im));
                m.set(j, i, Complex64::new(re, -im));
            }
        }
        Observable::new(m).unwrap()
    }

    #[test]
    fn evaluate_rotation_endpoints() {
        let template = single_r_template();
        let zero = evaluate(&template, &ParamVector::new(vec![0.0]).unwrap()).unwrap();
        assert!((zero.fidelity(&StateVector::basis_state(1, 0).unwrap()).unwrap() - 1.0).abs()
            <= 1e-12);

        let pi =
            evaluate(&template, &ParamVector::new(vec![std::f64::consts::PI]).unwrap()).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert!((pi.fidelity(&one).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn evaluate_fixed_hadamard_template() {
        let template = CircuitTemplate::new(1, 0, vec![Placement::h(0)]).unwrap();
        let state = evaluate(&template, &ParamVector::zeros(0)).unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes().entries()[0] - Complex64::new(amp, 0.0)).norm() <= 1e-12);
        assert!((state.amplitudes().entries()[1] - Complex64::new(amp, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn cost_is_cosine_for_r_z() {
        let template = single_r_template();
        let obs = z_observable();
        for (theta, expected) in [
            (0.0, 1.0),
            (std::f64::consts::PI, -1.0),
            (std::f64::consts::FRAC_PI_2, 0.0),
        ] {
            let e = cost(&template, &ParamVector::new(vec![theta]).unwrap(), &obs).unwrap();
            assert!((e - expected).abs() <= 1e-12, "cost({theta}) = {e}");
        }
    }

    #[test]
    fn gradient_matches_minus_sine() {
        let template = single_r_template();
        let obs = z_observable();
        let g0 = gradient(&template, &ParamVector::new(vec![0.0]).unwrap(), &obs).unwrap();
        assert!(g0[0].abs() <= 1e-12);
        let g = gradient(
            &template,
            &ParamVector::new(vec![std::f64::consts::FRAC_PI_2]).unwrap(),
            &obs,
        )
        .unwrap();
        assert!((g[0] + 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gradient_of_constant_template_is_empty() {
        let template =
            CircuitTemplate::new(2, 0, vec![Placement::h(0), Placement::cnot(0, 1)]).unwrap();
        let g = gradient(&template, &ParamVector::zeros(0), &z_observable()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn shift_rule_matches_finite_differences_including_cr() {
        let mut rng = SeededRng::from_seed(31);
        for _ in 0..10 {
            let (template, theta) = random_template(&mut rng);
            let obs = random_observable(&mut rng);
            let exact = gradient(&template, &theta, &obs).unwrap();
            let fd = gradient_finite_difference(&template, &theta, &obs, 1e-5).unwrap();
            for (k, (a, b)) in exact.iter().zip(&fd).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-5,
                    "component {k}: shift {a} vs fd {b} on {:?}",
                    template.placements()
                );
            }
        }
    }

    #[test]
    fn shared_parameter_accumulates_per_occurrence() {
        // one angle driving two rotations on different qubits
        let template = CircuitTemplate::new(
            2,
            1,
            vec![Placement::r(0, 0), Placement::cnot(0, 1), Placement::r(1, 0)],
        )
        .unwrap();
        let obs = Observable::new(gates::pauli_z().kron(&gates::pauli_z()).unwrap()).unwrap();
        let theta = ParamVector::new(vec![0.83]).unwrap();
        let exact = gradient(&template, &theta, &obs).unwrap();
        let fd = gradient_finite_difference(&template, &theta, &obs, 1e-5).unwrap();
        assert!((exact[0] - fd[0]).abs() <= 1e-5);
    }

    #[test]
    fn cost_bounded_by_observable_norm() {
        let mut rng = SeededRng::from_seed(5);
        for _ in 0..10 {
            let (template, theta) = random_template(&mut rng);
            let obs = random_observable(&mut rng);
            let e = cost(&template, &theta, &obs).unwrap();
            assert!(e.abs() <= obs.frobenius_norm() + 1e-12);
        }
    }

    #[test]
    fn optimizer_descends_the_cosine_landscape() {
        // dense grid oracle: E(θ) = cos θ has its minimum −1 at θ = π
        let template = single_r_template();
        let obs = z_observable();
        let mut grid_best = (f64::INFINITY, 0.0);
        let grid_points = 20_000;
        for i in 0..grid_points {
            let theta = i as f64 / grid_points as f64 * std::f64::consts::TAU;
            let e = cost(&template, &ParamVector::new(vec![theta]).unwrap(), &obs).unwrap();
            if e < grid_best.0 {
                grid_best = (e, theta);
            }
        }
        assert!((grid_best.0 + 1.0).abs() <= 1e-6);
        assert!((grid_best.1 - std::f64::consts::PI).abs() <= 1e-3);

        let out =
            optimize(&template, &ParamVector::new(vec![0.1]).unwrap(), &obs, 0.2, 500).unwrap();
        assert!(out.final_cost <= -0.999, "final cost {}", out.final_cost);
        let theta_star = out.theta.values()[0].rem_euclid(std::f64::consts::TAU);
        assert!(
            (theta_star - std::f64::consts::PI).abs() <= 1e-2,
            "theta* = {theta_star}"
        );
        assert!(!out.halted_non_finite);
        assert!(out.trace.len() <= 500);
    }

    #[test]
    fn optimizer_stays_at_stationary_point() {
        let template = single_r_template();
        let out = optimize(
            &template,
            &ParamVector::new(vec![0.0]).unwrap(),
            &z_observable(),
            0.2,
            50,
        )
        .unwrap();
        assert_eq!(out.theta.values()[0], 0.0);
        assert_eq!(out.trace.len(), 1); // gradient is 0 at θ = 0, stop immediately
    }

    #[test]
    fn optimizer_zero_iterations_returns_start() {
        let template = single_r_template();
        let theta0 = ParamVector::new(vec![1.3]).unwrap();
        let out = optimize(&template, &theta0, &z_observable(), 0.2, 0).unwrap();
        assert_eq!(out.theta, theta0);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn placement_order_changes_the_state() {
        let a = CircuitTemplate::new(2, 0, vec![Placement::h(0), Placement::cnot(0, 1)]).unwrap();
        let b = CircuitTemplate::new(2, 0, vec![Placement::cnot(0, 1), Placement::h(0)]).unwrap();
        let sa = evaluate(&a, &ParamVector::zeros(0)).unwrap();
        let sb = evaluate(&b, &ParamVector::zeros(0)).unwrap();
        assert!(sa.fidelity(&sb).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn action_selection_probability_tracks_cos_squared() {
        // P(action 0) = cos²(θ/2) for the single-R selector
        let template = single_r_template();
        let theta = ParamVector::new(vec![1.1]).unwrap();
        let expected = (1.1f64 / 2.0).cos().powi(2);
        let mut rng = SeededRng::from_seed(17);
        let trials = 40_000;
        let mut zeros = 0;
        for _ in 0..trials {
            if select_action(&template, &theta, 2, &mut rng).unwrap() == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / trials as f64;
        assert!((freq - expected).abs() <= 0.01, "freq {freq} vs {expected}");
    }

    #[test]
    fn agent_at_identity_angle_reaps_the_full_return() {
        // θ = 0 always measures 0, so the agent plays I forever and the
        // discounted return is the truncated geometric series
        let env = ix_env(0.9, 50);
        let template = single_r_template();
        let theta = ParamVector::new(vec![0.0]).unwrap();
        let rng = SeededRng::from_seed(3);
        let value = mean_batch_return(&env, &template, &theta, 4, &rng).unwrap();
        let oracle = (1.0 - 0.9f64.powi(50)) / (1.0 - 0.9);
        assert!((value - oracle).abs() <= 1e-9);
    }

    #[test]
    fn agent_training_improves_the_return() {
        let env = ix_env(0.9, 20);
        let template = single_r_template();
        // a wide probe step keeps the return difference well above the
        // Monte Carlo noise floor of the batch estimate
        let cfg = AgentConfig {
            episodes: 80,
            batch: 24,
            h: 0.3,
            lr: 0.2,
        };
        let rng = SeededRng::from_seed(11);
        let theta0 = ParamVector::new(vec![2.2]).unwrap();
        let result = train_pqc_agent_from(&env, &template, &theta0, &cfg, &rng).unwrap();
        assert_eq!(result.reward_curve.len(), 80);
        let first = result.reward_curve[0];
        assert!(
            result.best_return > first + 1.0,
            "no improvement: first {first}, best {}",
            result.best_return
        );
        // the optimum plays I from |0⟩; its truncated return is ≈ 8.78
        let oracle = (1.0 - 0.9f64.powi(20)) / (1.0 - 0.9);
        assert!(result.best_return > 0.8 * oracle);
    }

    #[test]
    fn agent_training_is_reproducible() {
        let env = ix_env(0.9, 10);
        let template = single_r_template();
        let cfg = AgentConfig {
            episodes: 10,
            batch: 8,
            h: 0.05,
            lr: 0.1,
        };
        let run =
            |seed: u64| train_pqc_agent(&env, &template, &cfg, &SeededRng::from_seed(seed)).unwrap();
        let a = run(21);
        let b = run(21);
        assert_eq!(a.reward_curve, b.reward_curve);
        assert_eq!(a.theta, b.theta);
    }

    #[test]
    fn agent_zero_episodes_keeps_theta() {
        let env = ix_env(0.9, 10);
        let template = single_r_template();
        let cfg = AgentConfig {
            episodes: 0,
            ..AgentConfig::default()
        };
        let theta0 = ParamVector::new(vec![0.7]).unwrap();
        let result =
            train_pqc_agent_from(&env, &template, &theta0, &cfg, &SeededRng::from_seed(1)).unwrap();
        assert_eq!(result.theta, theta0);
        assert!(result.reward_curve.is_empty());
    }

    #[test]
    fn template_validation_errors() {
        // param index out of range
        assert!(CircuitTemplate::new(1, 1, vec![Placement::r(0, 1)]).is_err());
        // unused param index
        assert!(CircuitTemplate::new(1, 2, vec![Placement::r(0, 0)]).is_err());
        // fixed gate with a param index
        let bad = Placement {
            kind: PlacementKind::H,
            targets: vec![0],
            param_index: Some(0),
        };
        assert!(CircuitTemplate::new(1, 1, vec![bad, Placement::r(0, 0)]).is_err());
        // rotation without a param index
        let bad = Placement {
            kind: PlacementKind::R,
            targets: vec![0],
            param_index: None,
        };
        assert!(CircuitTemplate::new(1, 0, vec![bad]).is_err());
        // target out of range
        assert!(CircuitTemplate::new(1, 1, vec![Placement::r(1, 0)]).is_err());
    }

    #[test]
    fn template_json_round_trip() {
        let template = CircuitTemplate::new(
            2,
            2,
            vec![
                Placement::h(0),
                Placement::r(0, 0),
                Placement::cr(0, 1, 1),
                Placement::cnot(1, 0),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&template).unwrap();
        let back: CircuitTemplate = serde_json::from_str(&text).unwrap();
        assert_eq!(template, back);

        let literal =
            r#"{"n":1,"params":1,"placements":[{"kind":"R","targets":[0],"param_index":0}]}"#;
        let parsed: CircuitTemplate = serde_json::from_str(literal).unwrap();
        assert_eq!(parsed.num_params(), 1);
    }
}
