//! Numeric certificates: contraction of the Bellman operators and the
//! order consequences around their fixed point.
//!
//! Run with `cargo run --example contraction_certificates`.

use mdpkit::envs::{random_value_fn, rng, RandomMdp};
use mdpkit::fixpoint::{check_contraction, check_order_coinduction, iterate_to_fixpoint, CoinductionTolerance};
use mdpkit::{DecisionRule, DiscountedProblem, FixpointConfig, Result, ValueFn};

fn main() -> Result<()> {
    let mut r = rng(3);
    let mdp = RandomMdp::new(5, vec![2; 5], (-3.0, 3.0)).generate_with(&mut r);
    let problem = DiscountedProblem::new(mdp, 0.9)?;
    let n = problem.n_states();
    let pairs: Vec<_> = (0..100)
        .map(|_| (random_value_fn(&mut r, n, 10.0), random_value_fn(&mut r, n, 10.0)))
        .collect();

    let rule = DecisionRule::first_actions(&problem.mdp);
    let single = check_contraction(|w| problem.bellman_op(&rule, w), 0.9, &pairs);
    let max = check_contraction(|w| problem.bellman_max_op(w), 0.9, &pairs);
    println!("B_rule: max ratio {:.4}, holds {}", single.max_ratio, single.holds);
    println!("B_max:  max ratio {:.4}, holds {}", max.max_ratio, max.holds);

    let cfg = problem.config(&FixpointConfig::default());
    let fix = iterate_to_fixpoint(|w| problem.bellman_max_op(w), ValueFn::zeros(n), &cfg)?;
    let tol = CoinductionTolerance {
        modulus: 0.9,
        eps: 1e-12,
        fix_error_bound: fix.error_bound.unwrap_or(0.0),
    };
    for shift in [-5.0, 5.0] {
        let x = fix.point.shift(shift)?;
        let report = check_order_coinduction(|w| problem.bellman_max_op(w), &x, &fix.point, &tol);
        println!("x = V* {shift:+}: upper {:?}, lower {:?}", report.upper, report.lower);
    }
    Ok(())
}
