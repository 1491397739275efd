//! JSON interchange format for models and results.
//!
//! An MDP file names states and per-state actions by label:
//!
//! ```json
//! {
//!   "actions": [["stay", "go"], ["stay"]],
//!   "gamma": 0.9,
//!   "rewards": [{"a": "go", "r": 1.0, "s": "home", "sp": "away"}],
//!   "states": ["home", "away"],
//!   "transitions": [
//!     {"a": "stay", "dist": [{"p": 1.0, "sp": "home"}], "s": "home"},
//!     {"a": "go", "dist": [{"p": 1.0, "sp": "away"}], "s": "home"},
//!     {"a": "stay", "dist": [{"p": 1.0, "sp": "away"}], "s": "away"}
//!   ]
//! }
//! ```
//!
//! Reward triples that are not listed are 0. Files written by
//! [`MdpFile::to_json`] have keys in sorted order, transitions in state then
//! action order, only non-zero rewards, and floats in shortest round-trip
//! form, so writing a parsed canonical file reproduces it byte for byte.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::SolveResult;
use crate::dist::{Dist, MASS_TOLERANCE};
use crate::horizon::PolicySequence;
use crate::mdp::{DecisionRule, Mdp};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid model: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> FileError {
    FileError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub actions: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub rewards: Vec<RewardEntry>,
    pub states: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub a: String,
    pub dist: Vec<ProbEntry>,
    pub s: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbEntry {
    pub p: f64,
    pub sp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardEntry {
    pub a: String,
    pub r: f64,
    pub s: String,
    pub sp: String,
}

impl MdpFile {
    pub fn from_json(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("finite floats serialize");
        out.push('\n');
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.to_json()).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Canonical file for `mdp`; zero-valued rewards are omitted.
    pub fn from_model(mdp: &Mdp, gamma: Option<f64>) -> Self {
        let states = mdp.state_labels().to_vec();
        let actions: Vec<Vec<String>> = (0..mdp.n_states()).map(|s| mdp.action_labels(s).to_vec()).collect();
        let mut transitions = Vec::new();
        let mut rewards = Vec::new();
        for s in 0..mdp.n_states() {
            for (a, name) in actions[s].iter().enumerate() {
                transitions.push(TransitionEntry {
                    a: name.clone(),
                    dist: mdp
                        .transition(s, a)
                        .entries()
                        .iter()
                        .map(|&(p, sp)| ProbEntry {
                            p,
                            sp: states[sp].clone(),
                        })
                        .collect(),
                    s: states[s].clone(),
                });
                for (sp, &r) in mdp.rewards()[s][a].iter().enumerate() {
                    if r != 0.0 {
                        rewards.push(RewardEntry {
                            a: name.clone(),
                            r,
                            s: states[s].clone(),
                            sp: states[sp].clone(),
                        });
                    }
                }
            }
        }
        Self {
            actions,
            gamma,
            rewards,
            states,
            transitions,
        }
    }

    /// Validates the file and builds the model. Diagnostics name the first
    /// offending state-action pair.
    pub fn to_model(&self) -> Result<(Mdp, Option<f64>), FileError> {
        let n = self.states.len();
        if n == 0 {
            return Err(invalid("no states"));
        }
        let state_ix = index_labels(&self.states).map_err(|l| invalid(format!("duplicate state label {l:?}")))?;
        if self.actions.len() != n {
            return Err(invalid(format!("{} action lists for {} states", self.actions.len(), n)));
        }
        let mut action_ix = Vec::with_capacity(n);
        for (s, labels) in self.actions.iter().enumerate() {
            if labels.is_empty() {
                return Err(invalid(format!("state {:?} has no actions", self.states[s])));
            }
            action_ix.push(
                index_labels(labels)
                    .map_err(|l| invalid(format!("duplicate action label {l:?} at state {:?}", self.states[s])))?,
            );
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(invalid(format!("gamma {g} outside [0, 1)")));
            }
        }
        let lookup = |s: &str, a: &str, what: &str| -> Result<(usize, usize), FileError> {
            let si = *state_ix
                .get(s)
                .ok_or_else(|| invalid(format!("{what}: unknown state {s:?}")))?;
            let ai = *action_ix[si]
                .get(a)
                .ok_or_else(|| invalid(format!("{what}: unknown action {a:?} at state {s:?}")))?;
            Ok((si, ai))
        };

        let mut rows: Vec<Vec<Option<Dist>>> = self.actions.iter().map(|l| vec![None; l.len()]).collect();
        for t in &self.transitions {
            let (s, a) = lookup(&t.s, &t.a, "transition")?;
            let at = format!("transition (s={:?}, a={:?})", t.s, t.a);
            if rows[s][a].is_some() {
                return Err(invalid(format!("{at}: listed more than once")));
            }
            if t.dist.is_empty() {
                return Err(invalid(format!("{at}: empty distribution")));
            }
            let mut entries = Vec::with_capacity(t.dist.len());
            for e in &t.dist {
                let sp = *state_ix
                    .get(e.sp.as_str())
                    .ok_or_else(|| invalid(format!("{at}: unknown successor state {:?}", e.sp)))?;
                if !e.p.is_finite() || e.p < 0.0 {
                    return Err(invalid(format!("{at}: invalid probability {} for {:?}", e.p, e.sp)));
                }
                entries.push((e.p, sp));
            }
            let sum: f64 = entries.iter().map(|&(p, _)| p).sum();
            if (sum - 1.0).abs() > MASS_TOLERANCE {
                return Err(invalid(format!("{at}: probabilities sum to {sum}, expected 1")));
            }
            rows[s][a] = Some(Dist::new(n, entries).map_err(|e| invalid(format!("{at}: {e}")))?);
        }
        let mut transitions = Vec::with_capacity(n);
        for (s, row) in rows.into_iter().enumerate() {
            let mut dists = Vec::with_capacity(row.len());
            for (a, d) in row.into_iter().enumerate() {
                dists.push(d.ok_or_else(|| {
                    invalid(format!(
                        "transition (s={:?}, a={:?}): missing",
                        self.states[s], self.actions[s][a]
                    ))
                })?);
            }
            transitions.push(dists);
        }

        let mut rewards: Vec<Vec<Vec<f64>>> = self.actions.iter().map(|l| vec![vec![0.0; n]; l.len()]).collect();
        let mut seen = HashSet::new();
        for r in &self.rewards {
            let (s, a) = lookup(&r.s, &r.a, "reward")?;
            let at = format!("reward (s={:?}, a={:?}, sp={:?})", r.s, r.a, r.sp);
            let sp = *state_ix
                .get(r.sp.as_str())
                .ok_or_else(|| invalid(format!("{at}: unknown successor state")))?;
            if !r.r.is_finite() {
                return Err(invalid(format!("{at}: non-finite reward")));
            }
            if !seen.insert((s, a, sp)) {
                return Err(invalid(format!("{at}: listed more than once")));
            }
            rewards[s][a][sp] = r.r;
        }

        let mdp = Mdp::new(transitions, rewards)
            .and_then(|m| m.with_labels(self.states.clone(), self.actions.clone()))
            .map_err(|e| invalid(e.to_string()))?;
        Ok((mdp, self.gamma))
    }
}

fn index_labels(labels: &[String]) -> Result<HashMap<&str, usize>, String> {
    let mut map = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if map.insert(l.as_str(), i).is_some() {
            return Err(l.clone());
        }
    }
    Ok(map)
}

/// Maps each state label to the label of the action the rule picks.
pub fn rule_labels(mdp: &Mdp, rule: &DecisionRule) -> BTreeMap<String, String> {
    mdp.state_labels()
        .iter()
        .enumerate()
        .map(|(s, l)| (l.clone(), mdp.action_labels(s)[rule.action(s)].clone()))
        .collect()
}

/// Output of `mdpkit solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub algorithm: String,
    pub error_bound: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub policy: BTreeMap<String, String>,
    pub residual: f64,
    pub theta: f64,
    pub value: BTreeMap<String, f64>,
}

impl ResultFile {
    pub fn new(mdp: &Mdp, gamma: f64, theta: f64, result: &SolveResult) -> Self {
        Self {
            algorithm: result.algorithm.tag().to_string(),
            error_bound: result.error_bound,
            gamma,
            iterations: result.iterations,
            policy: rule_labels(mdp, &result.policy),
            residual: result.residual,
            theta,
            value: mdp
                .state_labels()
                .iter()
                .cloned()
                .zip(result.value.as_slice().iter().copied())
                .collect(),
        }
    }
}

/// Output of `mdpkit horizon` and `mdpkit oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonFile {
    pub gamma: f64,
    /// `backward-induction` or `enumeration`.
    pub method: String,
    pub n: usize,
    pub p0: String,
    /// One rule per step in time order; entry `k` applies with `n - k`
    /// steps remaining.
    pub sequence: Vec<BTreeMap<String, String>>,
    pub value: f64,
}

impl HorizonFile {
    pub fn new(mdp: &Mdp, gamma: f64, method: &str, p0: &str, value: f64, seq: &PolicySequence) -> Self {
        Self {
            gamma,
            method: method.to_string(),
            n: seq.len(),
            p0: p0.to_string(),
            sequence: seq.rules().iter().map(|r| rule_labels(mdp, r)).collect(),
            value,
        }
    }
}
