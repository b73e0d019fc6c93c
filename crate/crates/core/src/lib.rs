//! Evidence measures for equivalence testing.
//!
//! An equivalence hypothesis asks whether a parameter lies inside a margin
//! `(theta1, theta2)`. The null (non-equivalence) is split into an upper- and a
//! lower-tailed test (TOST). This crate computes two kinds of evidence against
//! that null:
//!
//! - frequentist p-values, evaluated at the least favorable configuration and
//!   combined by taking the larger of the two tails;
//! - Bayesian posterior probabilities of the null under conjugate priors,
//!   combined by summing the two disjoint tail masses.
//!
//! Both are available for a binomial model with a Beta prior
//! ([`binomial_bayes`], [`equivalence`]) and for a normal mean with known
//! variance and a normal prior ([`normal`]). On top of those sit exact power and
//! conservativity curves ([`power`]), correlation results between the measures
//! ([`correlation`]) and a Benjamini-Hochberg simulation harness ([`fdr`]).
//!
//! All Monte Carlo code draws from [`rng::stream`], a ChaCha8 generator whose
//! stream id is derived from the work-item index, so results do not depend on
//! the number of worker threads.

pub mod binomial_bayes;
pub mod correlation;
pub mod equivalence;
pub mod error;
pub mod fdr;
pub mod normal;
pub mod power;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use special::Probability;
