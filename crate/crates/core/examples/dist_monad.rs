//! Distributions as a monad: `ret`, `bind`, and compaction.
//!
//! Run with `cargo run --example dist_monad`.

use mdpkit::{Dist, Result};

fn main() -> Result<()> {
    // a fair coin over {0, 1}
    let coin = Dist::uniform(2)?;

    // flip again on heads; the raw result keeps duplicate outcomes
    let two_flips = coin.bind(|x| if x == 0 { Dist::uniform(2) } else { Dist::ret(1, 2) }.unwrap())?;
    println!("raw entries:     {:?}", two_flips.entries());
    println!("compacted:       {:?}", two_flips.compact().entries());
    println!("P(tails)       = {}", two_flips.prob(1));

    // right identity: p >>= ret == p
    let p = Dist::from_weights(&[0.2, 0.5, 0.3])?;
    let same = p.bind(|x| Dist::ret(x, 3).unwrap())?;
    println!("right identity:  {}", same.compact().approx_eq(&p, 1e-12));

    // expectation of a payoff
    let payoff = [0.0, 10.0, -4.0];
    println!("E[payoff]      = {}", p.expectation(|x| payoff[x]));
    Ok(())
}
