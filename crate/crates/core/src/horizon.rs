//! Finite-horizon values for non-stationary rule sequences.
//!
//! For a sequence `π_0, .., π_{n-1}` and initial distribution `p0` the value
//! is `sum_k gamma^k <p0 T_{π_0} .. T_{π_{k-1}} | r̄_{π_k}>`. The best such
//! value over all length-`n` sequences equals `<p0 | B̂^n(0)>`;
//! [`optimal_finite_value`] computes the right side by backward induction and
//! [`brute_force_optimal`] the left side by exhaustive enumeration.

use crate::algorithms::greedy;
use crate::dist::{Dist, Kernel};
use crate::error::{Error, Result};
use crate::fnspace::ValueFn;
use crate::mdp::{DecisionRule, DiscountedProblem, Mdp};

/// Distribution over the initial state.
pub type InitialDistribution = Dist;

/// Largest number of sequences [`brute_force_optimal`] will enumerate.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

/// Decision rules to apply in order, `rules[0]` first.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolicySequence(Vec<DecisionRule>);

impl PolicySequence {
    pub fn new(mdp: &Mdp, rules: Vec<DecisionRule>) -> Result<Self> {
        rules.iter().try_for_each(|r| mdp.check_rule(r))?;
        Ok(Self(rules))
    }

    /// `rule` repeated `n` times.
    pub fn stationary(rule: DecisionRule, n: usize) -> Self {
        Self(vec![rule; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rules(&self) -> &[DecisionRule] {
        &self.0
    }
}

fn check_initial(mdp: &Mdp, p0: &Dist) -> Result<()> {
    if p0.n() != mdp.n_states() {
        return Err(Error::CardinalityMismatch {
            expected: mdp.n_states(),
            found: p0.n(),
        });
    }
    Ok(())
}

/// `p0 T_{π_0} .. T_{π_{k-1}}`, the state distribution after `k` steps.
pub fn sequence_kleisli_iter(mdp: &Mdp, p0: &Dist, seq: &PolicySequence, k: usize) -> Result<Dist> {
    check_initial(mdp, p0)?;
    if k > seq.len() {
        return Err(Error::StepOutOfRange { k, len: seq.len() });
    }
    seq.0[..k]
        .iter()
        .try_fold(p0.clone(), |p, rule| p.bind_kernel(&mdp.kernel_for_rule(rule)))
}

/// Forward evaluation of `<p0 | V_seq>` as a discounted sum of expected
/// step rewards.
pub fn finite_value(problem: &DiscountedProblem, p0: &Dist, seq: &PolicySequence) -> Result<f64> {
    let mdp = &problem.mdp;
    check_initial(mdp, p0)?;
    seq.0.iter().try_for_each(|r| mdp.check_rule(r))?;
    let mut p = p0.clone();
    let mut discount = 1.0;
    let mut total = 0.0;
    for rule in &seq.0 {
        total += discount * mdp.step_expected_reward(rule).pair(&p)?;
        p = p.bind_kernel(&mdp.kernel_for_rule(rule))?;
        discount *= problem.gamma();
    }
    Ok(total)
}

/// Per-state value of a sequence, `B_{π_0}(B_{π_1}(.. B_{π_{n-1}}(0)))`.
pub fn sequence_values(problem: &DiscountedProblem, seq: &PolicySequence) -> Result<ValueFn> {
    seq.0.iter().try_for_each(|r| problem.mdp.check_rule(r))?;
    Ok(seq.0.iter().rev().fold(ValueFn::zeros(problem.n_states()), |v, rule| {
        problem.bellman_op(rule, &v)
    }))
}

/// Head-recursive evaluation: `<p0 | r̄_{π_0} + gamma T_{π_0} V_tail>`.
pub fn finite_value_recursive(problem: &DiscountedProblem, p0: &Dist, seq: &PolicySequence) -> Result<f64> {
    check_initial(&problem.mdp, p0)?;
    sequence_values(problem, seq)?.pair(p0)
}

/// Backward induction result for horizon `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHorizonSolution {
    /// `B̂^n(0)`.
    pub value: ValueFn,
    /// Optimal rules in time order; `sequence.rules()[k]` is used when
    /// `n - k` steps remain.
    pub sequence: PolicySequence,
}

impl FiniteHorizonSolution {
    pub fn pair(&self, p0: &Dist) -> Result<f64> {
        self.value.pair(p0)
    }
}

/// `B̂^n(0)` together with the optimal non-stationary sequence.
pub fn optimal_finite_value(problem: &DiscountedProblem, n: usize) -> FiniteHorizonSolution {
    let mut value = ValueFn::zeros(problem.n_states());
    // greedy rule at level j is optimal with j + 1 steps left
    let mut by_level = Vec::with_capacity(n);
    for _ in 0..n {
        by_level.push(greedy(problem, &value));
        value = problem.bellman_max_op(&value);
    }
    by_level.reverse();
    FiniteHorizonSolution {
        value,
        sequence: PolicySequence(by_level),
    }
}

/// Exhaustive maximization of [`finite_value`] over all length-`n`
/// sequences. Ties go to the lexicographically smallest sequence.
pub fn brute_force_optimal(problem: &DiscountedProblem, p0: &Dist, n: usize) -> Result<(f64, PolicySequence)> {
    let mdp = &problem.mdp;
    check_initial(mdp, p0)?;
    let count = mdp.rule_count().powi(n as i32);
    if count > ENUMERATION_LIMIT as f64 {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let rules: Vec<DecisionRule> = mdp.rules().collect();
    let kernels: Vec<Kernel> = rules.iter().map(|r| mdp.kernel_for_rule(r)).collect();
    let rewards: Vec<ValueFn> = rules.iter().map(|r| mdp.step_expected_reward(r)).collect();
    let mut search = Search {
        gamma: problem.gamma(),
        n,
        kernels: &kernels,
        rewards: &rewards,
        prefix: Vec::with_capacity(n),
        best: None,
    };
    search.explore(p0, 0.0, 1.0)?;
    let (value, indices) = search.best.expect("at least one sequence");
    let seq = indices.into_iter().map(|i| rules[i].clone()).collect();
    Ok((value, PolicySequence(seq)))
}

struct Search<'a> {
    gamma: f64,
    n: usize,
    kernels: &'a [Kernel],
    rewards: &'a [ValueFn],
    prefix: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    // depth-first in lexicographic order; sums accumulate exactly as in
    // `finite_value`
    fn explore(&mut self, p: &Dist, total: f64, discount: f64) -> Result<()> {
        if self.prefix.len() == self.n {
            if self.best.as_ref().is_none_or(|(b, _)| total > *b) {
                self.best = Some((total, self.prefix.clone()));
            }
            return Ok(());
        }
        for i in 0..self.kernels.len() {
            let value = total + discount * self.rewards[i].pair(p)?;
            let next = p.bind_kernel(&self.kernels[i])?;
            self.prefix.push(i);
            self.explore(&next, value, discount * self.gamma)?;
            self.prefix.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::value_iteration;
    use crate::envs::{random_dist, rng, RandomMdp};
    use crate::fixpoint::FixpointConfig;

    fn problem(seed: u64, n: usize, actions: usize, gamma: f64) -> DiscountedProblem {
        DiscountedProblem::new(RandomMdp::new(n, vec![actions; n], (-1.0, 1.0)).generate(seed), gamma).unwrap()
    }

    /// Two states; action 0 stays, action 1 swaps. Reward 1 for landing in 1.
    fn toggle() -> DiscountedProblem {
        let t = (0..2)
            .map(|s| vec![Dist::ret(s, 2).unwrap(), Dist::ret(1 - s, 2).unwrap()])
            .collect();
        let mdp = Mdp::from_reward_fn(t, |_, _, sp| sp as f64).unwrap();
        DiscountedProblem::new(mdp, 0.5).unwrap()
    }

    fn all_sequences(mdp: &Mdp, n: usize) -> Vec<PolicySequence> {
        let rules: Vec<_> = mdp.rules().collect();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<DecisionRule>| {
                    rules.iter().map(move |r| {
                        let mut v = prefix.clone();
                        v.push(r.clone());
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(PolicySequence).collect()
    }

    #[test]
    fn kleisli_iter_examples() {
        let p = toggle();
        let p0 = Dist::ret(0, 2).unwrap();
        let stay = DecisionRule::new(&p.mdp, vec![0, 0]).unwrap();
        let swap = DecisionRule::new(&p.mdp, vec![1, 1]).unwrap();
        let seq = PolicySequence::new(&p.mdp, vec![swap.clone(), stay, swap]).unwrap();
        assert_eq!(sequence_kleisli_iter(&p.mdp, &p0, &seq, 0).unwrap(), p0);
        assert_eq!(
            sequence_kleisli_iter(&p.mdp, &p0, &seq, 1).unwrap().entries(),
            &[(1.0, 1)]
        );
        assert_eq!(
            sequence_kleisli_iter(&p.mdp, &p0, &seq, 2).unwrap().entries(),
            &[(1.0, 1)]
        );
        assert_eq!(
            sequence_kleisli_iter(&p.mdp, &p0, &seq, 3).unwrap().entries(),
            &[(1.0, 0)]
        );
        assert!(matches!(
            sequence_kleisli_iter(&p.mdp, &p0, &seq, 4),
            Err(Error::StepOutOfRange { k: 4, len: 3 })
        ));
    }

    #[test]
    fn stationary_sequence_reduces_to_kernel_power() {
        let p = problem(3, 4, 2, 0.9);
        let p0 = random_dist(&mut rng(1), 4);
        for rule in p.mdp.rules().step_by(3) {
            let seq = PolicySequence::stationary(rule.clone(), 5);
            for k in 0..=5 {
                let a = sequence_kleisli_iter(&p.mdp, &p0, &seq, k).unwrap();
                let b = crate::dist::kleisli_iterate(&p0, &p.mdp.kernel_for_rule(&rule), k).unwrap();
                assert!(a.approx_eq(&b, 1e-12));
            }
        }
    }

    #[test]
    fn finite_value_examples() {
        let p = problem(4, 3, 2, 0.9);
        let p0 = random_dist(&mut rng(2), 3);
        let empty = PolicySequence::default();
        assert_eq!(finite_value(&p, &p0, &empty).unwrap(), 0.0);
        assert_eq!(finite_value_recursive(&p, &p0, &empty).unwrap(), 0.0);
        for rule in p.mdp.rules() {
            let one = PolicySequence::stationary(rule.clone(), 1);
            let direct = p.mdp.step_expected_reward(&rule).pair(&p0).unwrap();
            assert!((finite_value(&p, &p0, &one).unwrap() - direct).abs() <= 1e-15);
            assert!((finite_value_recursive(&p, &p0, &one).unwrap() - direct).abs() <= 1e-15);
        }
    }

    #[test]
    fn forward_recursive_and_triple_sum_agree() {
        for seed in 0..5 {
            let p = problem(seed, 3, 2, 0.8);
            let p0 = random_dist(&mut rng(seed + 100), 3);
            let g = p.gamma();
            for seq in all_sequences(&p.mdp, 3) {
                let fwd = finite_value(&p, &p0, &seq).unwrap();
                let rec = finite_value_recursive(&p, &p0, &seq).unwrap();
                // explicit sum over state paths s0 -> s1 -> s2
                let [r0, r1, r2] = [0, 1, 2].map(|k| p.mdp.step_expected_reward(&seq.rules()[k]));
                let t = |k: usize, s: usize, sp: usize| p.mdp.transition(s, seq.rules()[k].action(s)).prob(sp);
                let mut direct = 0.0;
                for s0 in 0..3 {
                    let w0 = p0.prob(s0);
                    direct += w0 * r0[s0];
                    for s1 in 0..3 {
                        let w1 = w0 * t(0, s0, s1);
                        direct += g * w1 * r1[s1];
                        for s2 in 0..3 {
                            direct += g * g * w1 * t(1, s1, s2) * r2[s2];
                        }
                    }
                }
                assert!((fwd - rec).abs() <= 1e-10);
                assert!((fwd - direct).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn optimal_value_examples() {
        let p = problem(8, 3, 2, 0.9);
        let zero = optimal_finite_value(&p, 0);
        assert_eq!(zero.value, ValueFn::zeros(3));
        assert!(zero.sequence.is_empty());
        let one = optimal_finite_value(&p, 1);
        assert_eq!(one.value, p.bellman_max_op(&ValueFn::zeros(3)));
        assert_eq!(one.sequence.len(), 1);
    }

    #[test]
    fn optimal_sequence_attains_optimal_value() {
        for seed in 0..10 {
            let p = problem(seed, 3, 2, 0.9);
            for n in 0..=5 {
                let sol = optimal_finite_value(&p, n);
                let v = sequence_values(&p, &sol.sequence).unwrap();
                assert!(v.dist(&sol.value).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn brute_force_matches_backward_induction() {
        for seed in 0..10 {
            let p = problem(seed, 3, 2, 0.9);
            let p0 = random_dist(&mut rng(seed), 3);
            for n in 0..=3 {
                let (best, seq) = brute_force_optimal(&p, &p0, n).unwrap();
                assert_eq!(seq.len(), n);
                let bellman = optimal_finite_value(&p, n).pair(&p0).unwrap();
                assert!((best - bellman).abs() <= 1e-9);
                assert_eq!(finite_value(&p, &p0, &seq).unwrap(), best);
            }
            // pointwise: p0 = ret(s)
            let sol = optimal_finite_value(&p, 3);
            for s in 0..3 {
                let (best, _) = brute_force_optimal(&p, &Dist::ret(s, 3).unwrap(), 3).unwrap();
                assert!((best - sol.value[s]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn brute_force_edge_cases() {
        let p = problem(1, 2, 2, 0.9);
        let p0 = Dist::uniform(2).unwrap();
        assert_eq!(
            brute_force_optimal(&p, &p0, 0).unwrap(),
            (0.0, PolicySequence::default())
        );

        let single = problem(1, 3, 1, 0.9);
        let (_, seq) = brute_force_optimal(&single, &Dist::uniform(3).unwrap(), 4).unwrap();
        assert_eq!(
            seq,
            PolicySequence::stationary(DecisionRule::first_actions(&single.mdp), 4)
        );

        // 4 rules, n = 3: 64 sequences, value matches the recursion
        let (best, _) = brute_force_optimal(&p, &p0, 3).unwrap();
        assert_eq!(all_sequences(&p.mdp, 3).len(), 64);
        let max = all_sequences(&p.mdp, 3)
            .iter()
            .map(|s| finite_value(&p, &p0, s).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, max);

        let big = problem(1, 4, 3, 0.9);
        assert!(matches!(
            brute_force_optimal(&big, &Dist::uniform(4).unwrap(), 4),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(brute_force_optimal(&big, &Dist::uniform(3).unwrap(), 1).is_err());
    }

    #[test]
    fn brute_force_ties_go_to_smallest_sequence() {
        // every action identical: all sequences tie
        let t = vec![vec![Dist::uniform(2).unwrap(); 2]; 2];
        let mdp = Mdp::from_reward_fn(t, |_, _, sp| sp as f64).unwrap();
        let p = DiscountedProblem::new(mdp, 0.9).unwrap();
        let (_, seq) = brute_force_optimal(&p, &Dist::uniform(2).unwrap(), 2).unwrap();
        assert_eq!(seq, PolicySequence::stationary(DecisionRule::first_actions(&p.mdp), 2));
    }

    #[test]
    fn sup_splits_over_head_and_tail() {
        for seed in 0..5 {
            let p = problem(seed, 3, 2, 0.9);
            let p0 = random_dist(&mut rng(seed + 7), 3);
            let (joint, _) = brute_force_optimal(&p, &p0, 3).unwrap();
            let split = p
                .mdp
                .rules()
                .map(|head| {
                    let r = p.mdp.step_expected_reward(&head).pair(&p0).unwrap();
                    let next = p0.bind_kernel(&p.mdp.kernel_for_rule(&head)).unwrap();
                    let (tail, _) = brute_force_optimal(&p, &next, 2).unwrap();
                    r + p.gamma() * tail
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((joint - split).abs() <= 1e-12);
        }
    }

    #[test]
    fn horizon_approaches_infinite_value() {
        let p = problem(12, 3, 2, 0.9);
        let vi = value_iteration(&p, &FixpointConfig::default()).unwrap();
        let d = p.mdp.reward_bound();
        for n in 1..=50 {
            let v = optimal_finite_value(&p, n).value;
            let bound = p.gamma().powi(n as i32) * d / (1.0 - p.gamma()) + vi.error_bound;
            assert!(v.dist(&vi.value).unwrap() <= bound);
        }
    }

    #[test]
    fn pairing_is_linear() {
        let mut r = rng(3);
        for _ in 0..50 {
            let p = random_dist(&mut r, 5);
            let v = crate::envs::random_value_fn(&mut r, 5, 10.0);
            let w = crate::envs::random_value_fn(&mut r, 5, 10.0);
            let alpha = 2.5;
            let lhs = ValueFn::axpy(alpha, &v, &w).unwrap().pair(&p).unwrap();
            let rhs = alpha * v.pair(&p).unwrap() + w.pair(&p).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}
