//! Solvers for finite, discounted Markov decision processes.
//!
//! The crate is layered bottom-up:
//!
//! - [`dist`]: finitely supported distributions with `ret`, `bind` and
//!   Kleisli composition of stochastic kernels.
//! - [`fnspace`]: value functions with the sup norm and pointwise order.
//! - [`fixpoint`]: contraction iteration with posterior error bounds, plus
//!   numeric certificates for contraction and order properties.
//! - [`mdp`]: models, decision rules, Bellman operators, long-term values.
//! - [`algorithms`]: value iteration, greedy extraction, policy iteration.
//! - [`horizon`]: finite-horizon values and backward induction, with an
//!   exhaustive-enumeration reference.
//! - [`envs`]: the turtle grid world and seeded random models.
//! - [`io`] and [`cli`]: the JSON interchange format and the `mdpkit`
//!   command line.
//!
//! Runnable examples live in `examples/`: `dist_monad`, `kleisli_chain`,
//! `turtle_value_iteration`, `policy_iteration`, `finite_horizon`,
//! `contraction_certificates` and `mdp_file_roundtrip`.
//!
//! ```
//! use mdpkit::{algorithms, envs, FixpointConfig};
//!
//! let problem = envs::turtle_mdp(0.9).unwrap();
//! let solved = algorithms::value_iteration(&problem, &FixpointConfig::default()).unwrap();
//! let green = problem.mdp.state_index("(1,4)").unwrap();
//! assert_eq!(solved.value[green], 0.0);
//! ```

pub mod algorithms;
pub mod cli;
pub mod dist;
pub mod envs;
pub mod error;
pub mod fixpoint;
pub mod fnspace;
pub mod horizon;
pub mod io;
pub mod linalg;
pub mod mdp;

pub use algorithms::{Algorithm, SolveResult};
pub use dist::{Dist, Kernel};
pub use error::{Error, Result};
pub use fixpoint::{FixpointConfig, FixpointResult};
pub use fnspace::ValueFn;
pub use horizon::PolicySequence;
pub use mdp::{DecisionRule, DiscountedProblem, Mdp};
