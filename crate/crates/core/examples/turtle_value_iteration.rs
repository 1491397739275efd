//! Value iteration on the 5x5 turtle grid world, printed as a grid.
//!
//! Run with `cargo run --example turtle_value_iteration`.

use mdpkit::algorithms::value_iteration;
use mdpkit::envs::{turtle_mdp, TurtleSpec};
use mdpkit::{FixpointConfig, Result};

fn main() -> Result<()> {
    let problem = turtle_mdp(0.9)?;
    let solved = value_iteration(&problem, &FixpointConfig::default())?;
    let spec = TurtleSpec::default();

    println!(
        "converged in {} sweeps, residual {:.1e}, error bound {:.1e}",
        solved.iterations, solved.residual, solved.error_bound
    );
    for y in 1..=spec.height {
        let mut values = String::new();
        let mut arrows = String::new();
        for x in 1..=spec.width {
            let s = spec.state_index(x, y);
            values.push_str(&format!("{:>8.3}", solved.value[s]));
            let label = &problem.mdp.action_labels(s)[solved.policy.action(s)];
            arrows.push_str(&format!("{:>8}", label));
        }
        println!("{values}    {arrows}");
    }
    Ok(())
}
