//! Value iteration, greedy extraction and policy iteration.

use std::fmt;

use crate::error::{Error, Result};
use crate::fixpoint::{iterate_to_fixpoint, FixpointConfig, Implication};
use crate::fnspace::ValueFn;
use crate::mdp::{DecisionRule, DiscountedProblem};

/// Tolerance for treating two backups as tied when keeping the incumbent.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the conclusion of the policy improvement check.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    ValueIteration,
    PolicyIteration,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Self::ValueIteration => "vi",
            Self::PolicyIteration => "pi",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: ValueFn,
    pub policy: DecisionRule,
    /// Bellman backups for VI, improvement rounds for PI.
    pub iterations: usize,
    pub residual: f64,
    /// Bound on the distance of `value` from the exact fixed point.
    pub error_bound: f64,
    pub algorithm: Algorithm,
}

/// Iterates the Bellman optimality operator from `V_0 = 0` and extracts the
/// greedy rule of the converged value.
pub fn value_iteration(problem: &DiscountedProblem, cfg: &FixpointConfig) -> Result<SolveResult> {
    let fp = iterate_to_fixpoint(
        |w| problem.bellman_max_op(w),
        ValueFn::zeros(problem.n_states()),
        &problem.config(cfg),
    )?;
    let policy = greedy(problem, &fp.point);
    Ok(SolveResult {
        policy,
        iterations: fp.iterations,
        residual: fp.residual,
        error_bound: fp.error_bound.unwrap_or(0.0),
        value: fp.point,
        algorithm: Algorithm::ValueIteration,
    })
}

/// Per-state argmax of `a -> r̄(s, a) + gamma E_{T(s, a)}[v]`, lowest action
/// index on ties.
pub fn greedy(problem: &DiscountedProblem, v: &ValueFn) -> DecisionRule {
    let choices = (0..problem.n_states())
        .map(|s| {
            let mut best = 0;
            let mut best_value = problem.action_value(s, 0, v);
            for a in 1..problem.mdp.n_actions(s) {
                let q = problem.action_value(s, a, v);
                if q > best_value {
                    best = a;
                    best_value = q;
                }
            }
            best
        })
        .collect();
    DecisionRule::from_vec_unchecked(choices)
}

pub fn policy_evaluation(problem: &DiscountedProblem, rule: &DecisionRule, cfg: &FixpointConfig) -> Result<ValueFn> {
    Ok(problem.ltv(rule, cfg)?.point)
}

/// Improvement of `rule` against its own value.
pub fn improve(problem: &DiscountedProblem, rule: &DecisionRule, cfg: &FixpointConfig) -> Result<DecisionRule> {
    let v = policy_evaluation(problem, rule, cfg)?;
    Ok(improve_against(problem, rule, &v))
}

/// Greedy with respect to `v`, except that the incumbent action is kept
/// whenever it is within [`TIE_TOLERANCE`] of the maximum.
pub fn improve_against(problem: &DiscountedProblem, rule: &DecisionRule, v: &ValueFn) -> DecisionRule {
    let q = problem.q_from_values(v);
    let choices = (0..problem.n_states())
        .map(|s| {
            let row = q.row(s);
            let incumbent = rule.action(s);
            let max = q.max(s);
            if row[incumbent] >= max - TIE_TOLERANCE {
                incumbent
            } else {
                row.iter().position(|&x| x == max).expect("max is attained")
            }
        })
        .collect();
    DecisionRule::from_vec_unchecked(choices)
}

/// Every rule visited by policy iteration and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyIterationTrace {
    pub result: SolveResult,
    pub rules: Vec<DecisionRule>,
    pub values: Vec<ValueFn>,
}

pub fn policy_iteration(
    problem: &DiscountedProblem,
    initial: &DecisionRule,
    cfg: &FixpointConfig,
) -> Result<SolveResult> {
    policy_iteration_trace(problem, initial, cfg).map(|t| t.result)
}

/// Alternates evaluation and improvement until the improved rule equals the
/// incumbent.
pub fn policy_iteration_trace(
    problem: &DiscountedProblem,
    initial: &DecisionRule,
    cfg: &FixpointConfig,
) -> Result<PolicyIterationTrace> {
    problem.mdp.check_rule(initial)?;
    let max_rounds = problem.mdp.rule_count();
    let mut rule = initial.clone();
    let mut rules = Vec::new();
    let mut values = Vec::new();
    let mut rounds = 0usize;
    loop {
        let eval = problem.ltv(&rule, cfg)?;
        let next = improve_against(problem, &rule, &eval.point);
        rounds += 1;
        rules.push(rule.clone());
        values.push(eval.point.clone());
        if next == rule {
            let result = SolveResult {
                value: eval.point,
                policy: rule,
                iterations: rounds,
                residual: eval.residual,
                error_bound: eval.error_bound.unwrap_or(0.0),
                algorithm: Algorithm::PolicyIteration,
            };
            return Ok(PolicyIterationTrace { result, rules, values });
        }
        if rounds as f64 >= max_rounds {
            // only reachable if float noise makes the improvement cycle
            return Err(Error::NonConvergence {
                iterations: rounds,
                residual: eval.residual,
            });
        }
        rule = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyImprovementReport {
    /// `B_τ V_σ >= B_σ V_σ  =>  V_τ >= V_σ`.
    pub improves: Implication,
    /// `B_τ V_σ <= B_σ V_σ  =>  V_τ <= V_σ`.
    pub worsens: Implication,
}

impl PolicyImprovementReport {
    pub fn any_violated(&self) -> bool {
        self.improves.is_violated() || self.worsens.is_violated()
    }
}

/// Checks both directions of the policy improvement theorem for `(sigma,
/// tau)` using exact evaluation. Hypotheses are tested with slack
/// [`TIE_TOLERANCE`], conclusions with [`IMPROVEMENT_TOLERANCE`].
pub fn check_policy_improvement_theorem(
    problem: &DiscountedProblem,
    sigma: &DecisionRule,
    tau: &DecisionRule,
) -> Result<PolicyImprovementReport> {
    let v_sigma = problem.ltv_exact(sigma)?;
    let v_tau = problem.ltv_exact(tau)?;
    let b_sigma = problem.bellman_op(sigma, &v_sigma);
    let b_tau = problem.bellman_op(tau, &v_sigma);
    let improves = Implication::evaluate(
        b_sigma.le_within(&b_tau, TIE_TOLERANCE)?,
        v_sigma.le_within(&v_tau, IMPROVEMENT_TOLERANCE)?,
    );
    let worsens = Implication::evaluate(
        b_tau.le_within(&b_sigma, TIE_TOLERANCE)?,
        v_tau.le_within(&v_sigma, IMPROVEMENT_TOLERANCE)?,
    );
    Ok(PolicyImprovementReport { improves, worsens })
}
