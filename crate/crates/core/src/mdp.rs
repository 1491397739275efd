//! Markov decision processes and their value calculus.
//!
//! An [`Mdp`] has per-state action sets, a transition distribution for every
//! `(s, a)` and a reward on every `(s, a, s')` triple. A [`DecisionRule`]
//! picks one action per state; following it forever is a stationary policy.
//! [`DiscountedProblem`] pairs a model with a discount `0 <= gamma < 1` and
//! provides the Bellman operators, long-term values and Q functions.

use crate::dist::{kleisli_iterate, Dist, Kernel};
use crate::error::{Error, Result};
use crate::fixpoint::{iterate_to_fixpoint, FixpointConfig, FixpointResult};
use crate::fnspace::ValueFn;
use crate::linalg::solve_dense;

/// A finite MDP with state-dependent action sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    transitions: Vec<Vec<Dist>>,
    rewards: Vec<Vec<Vec<f64>>>,
    expected_rewards: Vec<Vec<f64>>,
    state_labels: Vec<String>,
    action_labels: Vec<Vec<String>>,
}

impl Mdp {
    /// `transitions[s][a]` is `T(s, a)`, `rewards[s][a][s']` is `r(s, a, s')`.
    pub fn new(transitions: Vec<Vec<Dist>>, rewards: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = transitions.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if rewards.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: rewards.len(),
            });
        }
        for (s, (row, rrow)) in transitions.iter().zip(&rewards).enumerate() {
            if row.is_empty() {
                return Err(Error::NoActions { state: s });
            }
            if rrow.len() != row.len() {
                return Err(Error::InvalidModel(format!(
                    "state {s}: {} transition rows but {} reward rows",
                    row.len(),
                    rrow.len()
                )));
            }
            for (a, (d, r)) in row.iter().zip(rrow).enumerate() {
                if d.n() != n {
                    return Err(Error::CardinalityMismatch {
                        expected: n,
                        found: d.n(),
                    });
                }
                if r.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: r.len(),
                    });
                }
                if let Some(next) = r.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteReward {
                        state: s,
                        action: a,
                        next,
                    });
                }
            }
        }
        let expected_rewards = transitions
            .iter()
            .zip(&rewards)
            .map(|(row, rrow)| row.iter().zip(rrow).map(|(d, r)| d.expectation(|sp| r[sp])).collect())
            .collect();
        let state_labels = (0..n).map(|s| format!("s{s}")).collect();
        let action_labels = transitions
            .iter()
            .map(|row| (0..row.len()).map(|a| format!("a{a}")).collect())
            .collect();
        Ok(Self {
            transitions,
            rewards,
            expected_rewards,
            state_labels,
            action_labels,
        })
    }

    /// Builds the dense reward table from `reward(s, a, s')`.
    pub fn from_reward_fn<R>(transitions: Vec<Vec<Dist>>, reward: R) -> Result<Self>
    where
        R: Fn(usize, usize, usize) -> f64,
    {
        let n = transitions.len();
        let rewards = transitions
            .iter()
            .enumerate()
            .map(|(s, row)| {
                (0..row.len())
                    .map(|a| (0..n).map(|sp| reward(s, a, sp)).collect())
                    .collect()
            })
            .collect();
        Self::new(transitions, rewards)
    }

    /// Replaces the default `s{i}` / `a{j}` labels. Labels must be unique
    /// (action labels within their state).
    pub fn with_labels(mut self, states: Vec<String>, actions: Vec<Vec<String>>) -> Result<Self> {
        if states.len() != self.n_states() {
            return Err(Error::LengthMismatch {
                left: self.n_states(),
                right: states.len(),
            });
        }
        if let Some(dup) = first_duplicate(&states) {
            return Err(Error::InvalidModel(format!("duplicate state label {dup:?}")));
        }
        if actions.len() != self.n_states() {
            return Err(Error::LengthMismatch {
                left: self.n_states(),
                right: actions.len(),
            });
        }
        for (s, labels) in actions.iter().enumerate() {
            if labels.len() != self.n_actions(s) {
                return Err(Error::InvalidModel(format!(
                    "state {:?}: {} action labels for {} actions",
                    states[s],
                    labels.len(),
                    self.n_actions(s)
                )));
            }
            if let Some(dup) = first_duplicate(labels) {
                return Err(Error::InvalidModel(format!(
                    "duplicate action label {dup:?} at state {:?}",
                    states[s]
                )));
            }
        }
        self.state_labels = states;
        self.action_labels = actions;
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn n_actions(&self, s: usize) -> usize {
        self.transitions[s].len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.transitions.iter().map(Vec::len).collect()
    }

    /// `T(s, a)`.
    pub fn transition(&self, s: usize, a: usize) -> &Dist {
        &self.transitions[s][a]
    }

    /// `r(s, a, s')`.
    pub fn reward(&self, s: usize, a: usize, next: usize) -> f64 {
        self.rewards[s][a][next]
    }

    pub fn rewards(&self) -> &[Vec<Vec<f64>>] {
        &self.rewards
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn action_labels(&self, s: usize) -> &[String] {
        &self.action_labels[s]
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.state_labels.iter().position(|l| l == label)
    }

    /// `D = max |r(s, a, s')|`.
    pub fn reward_bound(&self) -> f64 {
        self.rewards.iter().flatten().flatten().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `r̄(s, a) = sum_{s'} r(s, a, s') T(s, a)(s')`.
    pub fn expected_immediate_reward(&self, s: usize, a: usize) -> Result<f64> {
        self.check_action(s, a)?;
        Ok(self.expected_rewards[s][a])
    }

    /// `r̄_π(s) = r̄(s, π(s))`.
    pub fn step_expected_reward(&self, rule: &DecisionRule) -> ValueFn {
        ValueFn::from_vec_unchecked(
            rule.0
                .iter()
                .enumerate()
                .map(|(s, &a)| self.expected_rewards[s][a])
                .collect(),
        )
    }

    /// The stationary kernel `T_π(s) = T(s, π(s))`.
    pub fn kernel_for_rule(&self, rule: &DecisionRule) -> Kernel {
        let rows = rule
            .0
            .iter()
            .enumerate()
            .map(|(s, &a)| self.transitions[s][a].clone())
            .collect();
        Kernel::new(self.n_states(), rows).expect("validated model")
    }

    /// Number of stationary decision rules, `prod_s |A(s)|`, as a float so
    /// large models do not overflow.
    pub fn rule_count(&self) -> f64 {
        self.transitions.iter().map(|r| r.len() as f64).product()
    }

    /// All decision rules in lexicographic order (state 0 most significant).
    pub fn rules(&self) -> RuleIter {
        RuleIter {
            counts: self.action_counts(),
            next: Some(vec![0; self.n_states()]),
        }
    }

    pub fn check_rule(&self, rule: &DecisionRule) -> Result<()> {
        if rule.0.len() != self.n_states() {
            return Err(Error::LengthMismatch {
                left: self.n_states(),
                right: rule.0.len(),
            });
        }
        rule.0
            .iter()
            .enumerate()
            .try_for_each(|(s, &a)| self.check_action(s, a))
    }

    pub fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.n_states() {
            return Err(Error::StateOutOfRange {
                state: s,
                n_states: self.n_states(),
            });
        }
        Ok(())
    }

    fn check_action(&self, s: usize, a: usize) -> Result<()> {
        self.check_state(s)?;
        if a >= self.n_actions(s) {
            return Err(Error::ActionOutOfRange {
                state: s,
                action: a,
                n_actions: self.n_actions(s),
            });
        }
        Ok(())
    }
}

fn first_duplicate(labels: &[String]) -> Option<&String> {
    let mut seen = std::collections::HashSet::new();
    labels.iter().find(|l| !seen.insert(l.as_str()))
}

/// One action per state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecisionRule(Vec<usize>);

impl DecisionRule {
    pub fn new(mdp: &Mdp, choices: Vec<usize>) -> Result<Self> {
        let rule = Self(choices);
        mdp.check_rule(&rule)?;
        Ok(rule)
    }

    /// Action 0 everywhere.
    pub fn first_actions(mdp: &Mdp) -> Self {
        Self(vec![0; mdp.n_states()])
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub(crate) fn from_vec_unchecked(choices: Vec<usize>) -> Self {
        Self(choices)
    }
}

/// Lexicographic enumeration of decision rules.
#[derive(Debug, Clone)]
pub struct RuleIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for RuleIter {
    type Item = DecisionRule;

    fn next(&mut self) -> Option<DecisionRule> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for s in (0..succ.len()).rev() {
            succ[s] += 1;
            if succ[s] < self.counts[s] {
                self.next = Some(succ);
                break;
            }
            succ[s] = 0;
        }
        Some(DecisionRule(current))
    }
}

/// An MDP with a discount factor in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountedProblem {
    pub mdp: Mdp,
    gamma: f64,
}

impl DiscountedProblem {
    pub fn new(mdp: Mdp, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidDiscount(gamma));
        }
        Ok(Self { mdp, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_states(&self) -> usize {
        self.mdp.n_states()
    }

    /// `D / (1 - gamma)`, a bound on every long-term value.
    pub fn value_bound(&self) -> f64 {
        self.mdp.reward_bound() / (1.0 - self.gamma)
    }

    /// The fixpoint configuration with the contraction modulus filled in.
    pub fn config(&self, cfg: &FixpointConfig) -> FixpointConfig {
        cfg.with_gamma(self.gamma)
    }

    /// One-step backup `r̄(s, a) + gamma E_{T(s, a)}[w]`.
    pub fn action_value(&self, s: usize, a: usize, w: &ValueFn) -> f64 {
        self.mdp.expected_rewards[s][a] + self.gamma * self.mdp.transitions[s][a].expectation(|sp| w[sp])
    }

    /// `B_π(w)(s) = r̄_π(s) + gamma E_{T_π(s)}[w]`.
    pub fn bellman_op(&self, rule: &DecisionRule, w: &ValueFn) -> ValueFn {
        debug_assert_eq!(w.len(), self.n_states());
        ValueFn::from_vec_unchecked(
            (0..self.n_states())
                .map(|s| self.action_value(s, rule.0[s], w))
                .collect(),
        )
    }

    /// `B̂(w)(s) = max_a (r̄(s, a) + gamma E_{T(s, a)}[w])`.
    pub fn bellman_max_op(&self, w: &ValueFn) -> ValueFn {
        debug_assert_eq!(w.len(), self.n_states());
        ValueFn::from_vec_unchecked(
            (0..self.n_states())
                .map(|s| {
                    (0..self.mdp.n_actions(s))
                        .map(|a| self.action_value(s, a, w))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect(),
        )
    }

    /// Expected reward at step `k` from `s0`: `E_{T_π^k(ret s0)}[r̄_π]`.
    pub fn expected_reward_at_step(&self, rule: &DecisionRule, s0: usize, k: usize) -> Result<f64> {
        self.mdp.check_rule(rule)?;
        let p0 = Dist::ret(s0, self.n_states()).map_err(|_| Error::StateOutOfRange {
            state: s0,
            n_states: self.n_states(),
        })?;
        let pk = kleisli_iterate(&p0, &self.mdp.kernel_for_rule(rule), k)?;
        let rbar = self.mdp.step_expected_reward(rule);
        rbar.pair(&pk)
    }

    /// `V_{π,n} = B_π^n(0)`, the `n`-step truncated long-term value.
    pub fn ltv_partial(&self, rule: &DecisionRule, n: usize) -> ValueFn {
        (0..n).fold(ValueFn::zeros(self.n_states()), |v, _| self.bellman_op(rule, &v))
    }

    /// Long-term value `V_π` as the fixed point of `B_π`, iterated from 0.
    pub fn ltv(&self, rule: &DecisionRule, cfg: &FixpointConfig) -> Result<FixpointResult> {
        self.mdp.check_rule(rule)?;
        iterate_to_fixpoint(
            |w| self.bellman_op(rule, w),
            ValueFn::zeros(self.n_states()),
            &self.config(cfg),
        )
    }

    /// `V_π` from the linear system `(I - gamma M_π) V = r̄_π`.
    ///
    /// Intended as a reference for the iterative path.
    pub fn ltv_exact(&self, rule: &DecisionRule) -> Result<ValueFn> {
        self.mdp.check_rule(rule)?;
        let n = self.n_states();
        let m = self.mdp.kernel_for_rule(rule).to_matrix();
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| f64::from(u8::from(i == j)) - self.gamma * m[i][j])
                    .collect()
            })
            .collect();
        let b = self.mdp.step_expected_reward(rule).into_vec();
        ValueFn::new(solve_dense(a, b)?)
    }

    /// `Q_π(s, a) = r̄(s, a) + gamma E_{T(s, a)}[V_π]`.
    pub fn q_function(&self, rule: &DecisionRule, cfg: &FixpointConfig) -> Result<QTable> {
        let v = self.ltv(rule, cfg)?.point;
        Ok(self.q_from_values(&v))
    }

    /// The table of one-step backups against `v`.
    pub fn q_from_values(&self, v: &ValueFn) -> QTable {
        QTable(
            (0..self.n_states())
                .map(|s| (0..self.mdp.n_actions(s)).map(|a| self.action_value(s, a, v)).collect())
                .collect(),
        )
    }
}

/// State-action values, `q[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable(Vec<Vec<f64>>);

impl QTable {
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.0[s][a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.0[s]
    }

    pub fn max(&self, s: usize) -> f64 {
        self.0[s].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
