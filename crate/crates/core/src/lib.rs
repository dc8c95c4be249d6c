//! Transient and stationary analysis of the infinite-server queue fed by a marked Hawkes process.
//!
//! Three routes compute the law of the number of customers `N(t)`: the characteristic ODE of the
//! joint transform (exponential kernel and service), the cluster fixed point with monotone bounds
//! (general kernel and service) and Monte Carlo simulation. Heavy-tail and heavy-traffic limits
//! live in [`asymptotics`].

pub mod asymptotics;
pub mod cluster;
pub mod config;
pub mod error;
pub mod grid;
pub mod harness;
pub mod inversion;
pub mod markov;
pub mod model;
pub mod moments;
pub mod quad;
pub mod sim;
pub mod special;

pub use error::{ErrorClass, HawkesError, Result};
pub use grid::{GridFunction, TimeGrid};
pub use model::{
    ExcitationKernel, HeavyTailSpec, LoadSummary, MarkDistribution, ModelConfig, ServiceDistribution,
    TabulatedKernel, TabulatedSurvival,
};
