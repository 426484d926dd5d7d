//! Experiment configuration: one JSON document selects a pipeline kind, an
//! environment (inline or by path), a seed, and per-kind settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use naqrl_core::bellman::DEFAULT_FID_THRESHOLD;
use naqrl_core::noncomm::DEFAULT_CLOSURE_CAP;
use naqrl_core::{CircuitTemplate, ComplexMatrix, EnvironmentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Qlearn,
    ValueIter,
    PqcOpt,
    PqcAgent,
    Advantage,
    Noncomm,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Qlearn => "qlearn",
            Kind::ValueIter => "value_iter",
            Kind::PqcOpt => "pqc_opt",
            Kind::PqcAgent => "pqc_agent",
            Kind::Advantage => "advantage",
            Kind::Noncomm => "noncomm",
        }
    }
}

/// Environment given inline or as a path to a JSON file.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum EnvSource {
    Inline(EnvironmentSpec),
    Path(PathBuf),
}

impl<'de> Deserialize<'de> for EnvSource {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(s) => Ok(EnvSource::Path(PathBuf::from(s))),
            other => serde_json::from_value::<EnvironmentSpec>(other)
                .map(EnvSource::Inline)
                .map_err(|e| D::Error::custom(format!("env: {e}"))),
        }
    }
}

/// Circuit template given inline or as a path to a JSON file.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TemplateSource {
    Inline(CircuitTemplate),
    Path(PathBuf),
}

impl<'de> Deserialize<'de> for TemplateSource {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(deserializer)?;
        match value {
            serde_json::Value::String(s) => Ok(TemplateSource::Path(PathBuf::from(s))),
            other => serde_json::from_value::<CircuitTemplate>(other)
                .map(TemplateSource::Inline)
                .map_err(|e| D::Error::custom(format!("template: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSection {
    pub alpha: f64,
    pub epsilon: f64,
    pub episodes: usize,
    #[serde(default = "default_fid_threshold")]
    pub fid_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueIterSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_fid_threshold")]
    pub fid_threshold: f64,
}

impl Default for ValueIterSection {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            fid_threshold: default_fid_threshold(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PqcSection {
    pub template: TemplateSource,
    pub theta0: Vec<f64>,
    pub lr: f64,
    pub iters: usize,
    /// Cost observable; the environment reward is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    pub template: TemplateSource,
    /// Random when absent (drawn from the run seed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    pub episodes: usize,
    #[serde(default = "default_batch")]
    pub batch: usize,
    #[serde(default = "default_probe_step")]
    pub h: f64,
    #[serde(default = "default_agent_lr")]
    pub lr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub template: TemplateSource,
    pub theta: Vec<f64>,
    pub eval_episodes: usize,
    #[serde(default)]
    pub baseline_eval_epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoncommSection {
    #[serde(default = "default_closure_cap")]
    pub closure_cap: usize,
}

impl Default for NoncommSection {
    fn default() -> Self {
        Self {
            closure_cap: default_closure_cap(),
        }
    }
}

fn default_fid_threshold() -> f64 {
    DEFAULT_FID_THRESHOLD
}

fn default_tol() -> f64 {
    1e-6
}

fn default_batch() -> usize {
    16
}

fn default_probe_step() -> f64 {
    0.05
}

fn default_agent_lr() -> f64 {
    0.1
}

fn default_closure_cap() -> usize {
    DEFAULT_CLOSURE_CAP
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Always explicit; there is no wall-clock seeding.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub env: EnvSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<LearnerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_iter: Option<ValueIterSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pqc: Option<PqcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<AgentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noncomm: Option<NoncommSection>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl ExperimentConfig {
    /// Checks that the sections required by `kind` are present.
    pub fn validate(&self) -> Result<(), String> {
        let need = |present: bool, field: &str| -> Result<(), String> {
            if present {
                Ok(())
            } else {
                Err(format!("kind \"{}\" requires the \"{field}\" section", self.kind.as_str()))
            }
        };
        match self.kind {
            Kind::Qlearn => need(self.learner.is_some(), "learner"),
            Kind::ValueIter => Ok(()), // value_iter section is optional (defaults)
            Kind::PqcOpt => need(self.pqc.is_some(), "pqc"),
            Kind::PqcAgent => need(self.agent.is_some(), "agent"),
            Kind::Advantage => {
                need(self.bench.is_some(), "bench")?;
                need(self.learner.is_some(), "learner")
            }
            Kind::Noncomm => Ok(()),
        }
    }

    /// Loads the environment, following a path if necessary.
    pub fn resolve_env(&self, base: &Path) -> Result<EnvironmentSpec, String> {
        match &self.env {
            EnvSource::Inline(env) => Ok(env.clone()),
            EnvSource::Path(path) => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| format!("cannot read environment file {}: {e}", full.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("invalid environment in {}: {e}", full.display()))
            }
        }
    }

    pub fn default_out_dir(&self) -> PathBuf {
        PathBuf::from(format!("runs/{}-{}", self.kind.as_str(), self.seed))
    }
}

pub fn resolve_template(source: &TemplateSource, base: &Path) -> Result<CircuitTemplate, String> {
    match source {
        TemplateSource::Inline(t) => Ok(t.clone()),
        TemplateSource::Path(path) => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| format!("cannot read template file {}: {e}", full.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid template in {}: {e}", full.display()))
        }
    }
}

/// Human- and machine-readable schema for the config document.
pub fn schema_json() -> serde_json::Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "naqrl experiment config",
        "type": "object",
        "required": ["kind", "seed", "env"],
        "additionalProperties": false,
        "properties": {
            "kind": {
                "enum": ["qlearn", "value_iter", "pqc_opt", "pqc_agent", "advantage", "noncomm"]
            },
            "seed": {"type": "integer", "minimum": 0, "description": "explicit 64-bit seed; no wall-clock seeding"},
            "out_dir": {"type": "string"},
            "jobs": {"type": "integer", "minimum": 1, "default": 1,
                     "description": "worker threads for independent rollouts; outputs are independent of this"},
            "env": {
                "oneOf": [
                    {"type": "string", "description": "path to an environment JSON file"},
                    {
                        "type": "object",
                        "required": ["n", "gamma", "noise_p", "horizon", "reward", "actions"],
                        "properties": {
                            "n": {"type": "integer", "minimum": 1, "maximum": 12},
                            "gamma": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                            "noise_p": {"type": "number", "minimum": 0, "maximum": 1},
                            "horizon": {"type": "integer", "minimum": 1},
                            "reward": {"$ref": "#/$defs/matrix"},
                            "actions": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/action"}},
                            "initial": {"$ref": "#/$defs/state", "description": "defaults to |0…0⟩"}
                        }
                    }
                ]
            },
            "learner": {
                "type": "object",
                "required": ["alpha", "epsilon", "episodes"],
                "properties": {
                    "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "epsilon": {"type": "number", "minimum": 0, "maximum": 1},
                    "episodes": {"type": "integer", "minimum": 0},
                    "fid_threshold": {"type": "number", "default": 0.99}
                }
            },
            "value_iter": {
                "type": "object",
                "properties": {
                    "tol": {"type": "number", "default": 1e-6},
                    "fid_threshold": {"type": "number", "default": 0.99}
                }
            },
            "pqc": {
                "type": "object",
                "required": ["template", "theta0", "lr", "iters"],
                "properties": {
                    "template": {"$ref": "#/$defs/template_or_path"},
                    "theta0": {"type": "array", "items": {"type": "number"}},
                    "lr": {"type": "number", "exclusiveMinimum": 0},
                    "iters": {"type": "integer", "minimum": 0},
                    "observable": {"$ref": "#/$defs/matrix", "description": "defaults to the environment reward"}
                }
            },
            "agent": {
                "type": "object",
                "required": ["template", "episodes"],
                "properties": {
                    "template": {"$ref": "#/$defs/template_or_path"},
                    "theta0": {"type": "array", "items": {"type": "number"}},
                    "episodes": {"type": "integer", "minimum": 0},
                    "batch": {"type": "integer", "minimum": 1, "default": 16},
                    "h": {"type": "number", "exclusiveMinimum": 0, "default": 0.05},
                    "lr": {"type": "number", "exclusiveMinimum": 0, "default": 0.1}
                }
            },
            "bench": {
                "type": "object",
                "required": ["template", "theta", "eval_episodes"],
                "properties": {
                    "template": {"$ref": "#/$defs/template_or_path"},
                    "theta": {"type": "array", "items": {"type": "number"}},
                    "eval_episodes": {"type": "integer", "minimum": 1},
                    "baseline_eval_epsilon": {"type": "number", "minimum": 0, "maximum": 1, "default": 0}
                }
            },
            "noncomm": {
                "type": "object",
                "properties": {
                    "closure_cap": {"type": "integer", "minimum": 1, "default": 512}
                }
            }
        },
        "$defs": {
            "matrix": {
                "type": "object",
                "required": ["rows", "cols", "re", "im"],
                "properties": {
                    "rows": {"type": "integer", "minimum": 1},
                    "cols": {"type": "integer", "minimum": 1},
                    "re": {"type": "array", "items": {"type": "number"}},
                    "im": {"type": "array", "items": {"type": "number"}}
                },
                "description": "flat row-major entries"
            },
            "state": {
                "type": "object",
                "required": ["n", "re", "im"],
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "re": {"type": "array", "items": {"type": "number"}},
                    "im": {"type": "array", "items": {"type": "number"}}
                }
            },
            "action": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"type": "string"},
                    "matrix": {"$ref": "#/$defs/matrix"},
                    "hamiltonian": {"$ref": "#/$defs/matrix"},
                    "dt": {"type": "number"}
                },
                "description": "either matrix, or hamiltonian with dt"
            },
            "template_or_path": {
                "oneOf": [
                    {"type": "string", "description": "path to a template JSON file"},
                    {
                        "type": "object",
                        "required": ["n", "params", "placements"],
                        "properties": {
                            "n": {"type": "integer", "minimum": 1},
                            "params": {"type": "integer", "minimum": 0},
                            "placements": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["kind", "targets"],
                                    "properties": {
                                        "kind": {"enum": ["R", "CR", "H", "CNOT"]},
                                        "targets": {"type": "array", "items": {"type": "integer"}},
                                        "param_index": {"type": "integer"}
                                    }
                                }
                            }
                        }
                    }
                ]
            }
        }
    })
}
