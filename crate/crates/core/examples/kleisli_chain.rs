//! Kleisli composition of stochastic kernels agrees with matrix products.
//!
//! Run with `cargo run --example kleisli_chain`.

use mdpkit::dist::{kleisli_compose, kleisli_iterate};
use mdpkit::{Dist, Kernel, Result};

fn main() -> Result<()> {
    // weather: sunny, cloudy, rainy
    let weather = Kernel::from_matrix(&[vec![0.7, 0.2, 0.1], vec![0.3, 0.4, 0.3], vec![0.2, 0.3, 0.5]])?;

    let two_days = kleisli_compose(&weather, &weather)?;
    for row in two_days.to_matrix() {
        println!("{row:.4?}");
    }

    let today = Dist::ret(0, 3)?;
    for k in [1, 2, 7, 30] {
        let later = kleisli_iterate(&today, &weather, k)?;
        println!("after {k:>2} days: {:.4?}", later.to_dense());
    }
    Ok(())
}
