//! Policy iteration on a random model, showing each improvement round.
//!
//! Run with `cargo run --example policy_iteration [seed]`.

use mdpkit::algorithms::{policy_iteration_trace, value_iteration};
use mdpkit::envs::RandomMdp;
use mdpkit::{DecisionRule, DiscountedProblem, FixpointConfig, Result};

fn main() -> Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mdp = RandomMdp::new(6, vec![3; 6], (-1.0, 1.0)).generate(seed);
    let problem = DiscountedProblem::new(mdp, 0.95)?;
    let cfg = FixpointConfig::default();

    let trace = policy_iteration_trace(&problem, &DecisionRule::first_actions(&problem.mdp), &cfg)?;
    for (round, (rule, v)) in trace.rules.iter().zip(&trace.values).enumerate() {
        let total: f64 = v.as_slice().iter().sum();
        println!("round {round}: rule {:?}  sum V = {total:.6}", rule.as_slice());
    }

    let vi = value_iteration(&problem, &cfg)?;
    println!(
        "policy iteration: {} rounds; value iteration: {} sweeps; |V_pi - V_vi| = {:.1e}",
        trace.result.iterations,
        vi.iterations,
        vi.value.dist(&trace.result.value)?
    );
    Ok(())
}
