//! Finite-state robust risk engine.
//!
//! Maxmin expected utility over polyhedral ambiguity sets, the coherent risk
//! measures and acceptance cones they induce, utility-based shortfall risk,
//! arbitrage detection and super-replication in one-period markets, and
//! maxmin portfolio selection under a super-replication budget.

pub mod axioms;
pub mod error;
pub mod lp;
pub mod market;
pub mod payoff;
pub mod portfolio;
pub mod risk;
pub mod scenario;
pub mod shortfall;

pub use axioms::{AxiomReport, Claim1Witness};
pub use error::{Error, ErrorClass, Result};
pub use lp::{LpError, LpProblem, LpSolution, LpStatus, Relation, Sense};
pub use market::{Market, StatePriceCertificate};
pub use payoff::{Cone, Payoff, ProbabilityVector};
pub use portfolio::{OptimizationResult, Scenario};
pub use risk::{AmbiguitySet, RiskReport};
pub use scenario::ScenarioFile;
pub use shortfall::{LossFunction, SrSpec};
