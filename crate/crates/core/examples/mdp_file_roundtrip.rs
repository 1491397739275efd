//! Build a model by hand, save it as JSON, load it back and solve it.
//!
//! Run with `cargo run --example mdp_file_roundtrip`.

use mdpkit::algorithms::value_iteration;
use mdpkit::io::{rule_labels, MdpFile};
use mdpkit::{DiscountedProblem, Dist, FixpointConfig, Mdp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a two-state machine: keep working (risk a breakdown) or repair
    let transitions = vec![
        vec![Dist::new(2, vec![(0.9, 0), (0.1, 1)])?, Dist::ret(0, 2)?],
        vec![Dist::ret(1, 2)?, Dist::new(2, vec![(0.6, 0), (0.4, 1)])?],
    ];
    let mdp = Mdp::from_reward_fn(transitions, |s, a, _| match (s, a) {
        (0, 0) => 3.0,
        (0, 1) => -1.0,
        (1, 0) => 0.0,
        _ => -2.0,
    })?
    .with_labels(
        vec!["working".into(), "broken".into()],
        vec![
            vec!["run".into(), "service".into()],
            vec!["wait".into(), "repair".into()],
        ],
    )?;

    let dir = std::env::temp_dir().join("mdpkit-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("machine.json");
    MdpFile::from_model(&mdp, Some(0.9)).write(&path)?;
    println!("wrote {}", path.display());

    let (loaded, gamma) = MdpFile::read(&path)?.to_model()?;
    assert_eq!(loaded, mdp);
    let problem = DiscountedProblem::new(loaded, gamma.unwrap_or(0.9))?;
    let solved = value_iteration(&problem, &FixpointConfig::default())?;
    let policy = rule_labels(&problem.mdp, &solved.policy);
    for (s, label) in problem.mdp.state_labels().iter().enumerate() {
        println!("{label:<8} V = {:>9.4}  choose {}", solved.value[s], policy[label]);
    }
    Ok(())
}
