//! LP relaxations for k-dimensional knapsack (packing and covering) whose
//! integrality gap is at most `1 + eps`, built from filtering (guessing the
//! most valuable items), residual problems and a disjunctive hull LP, plus a
//! cost-independent packing variant. Every value is an exact rational.

pub mod costfree;
pub mod disjunctive;
pub mod error;
pub mod exactlp;
pub mod filtering;
pub mod harness;
pub mod instance;
pub mod oracle;
pub mod rational;
pub mod rounding;

pub use error::{Error, Result};
pub use instance::{Bound, IntegralSolution, KnapsackInstance, NormalizedInstance, Sense};
pub use rational::Rational;
