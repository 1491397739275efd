//! Finite-horizon planning: backward induction against exhaustive search.
//!
//! Run with `cargo run --example finite_horizon`.

use mdpkit::envs::RandomMdp;
use mdpkit::horizon::{brute_force_optimal, finite_value, optimal_finite_value};
use mdpkit::{DiscountedProblem, Dist, Result};

fn main() -> Result<()> {
    let mdp = RandomMdp::new(3, vec![2, 3, 2], (-2.0, 2.0)).generate(11);
    let problem = DiscountedProblem::new(mdp, 0.9)?;
    let p0 = Dist::uniform(problem.n_states())?;

    for n in 0..=4 {
        let sol = optimal_finite_value(&problem, n);
        let (best, _) = brute_force_optimal(&problem, &p0, n)?;
        let forward = finite_value(&problem, &p0, &sol.sequence)?;
        println!(
            "n = {n}: backward {:>10.6}  forward {:>10.6}  enumeration {:>10.6}",
            sol.pair(&p0)?,
            forward,
            best
        );
    }

    let sol = optimal_finite_value(&problem, 4);
    for (k, rule) in sol.sequence.rules().iter().enumerate() {
        println!("step {k}: {:?}", rule.as_slice());
    }
    Ok(())
}
