//! Nash equilibrium seeking for networks of general linear agents.
//!
//! This crate simulates a population of single-input single-output linear
//! agents whose scalar outputs are strategies in a quadratic aggregative
//! game. Each agent is disturbed by a known-model marginally stable
//! exosystem and runs an internal-model observer to cancel the disturbance
//! while a proportional-integral gradient loop drives its output to the
//! unique Nash equilibrium of the game.
//!
//! Two strategy-updating rules are implemented:
//!
//! * **perfect information** — every agent sees the true aggregate of all
//!   strategies and descends its own cost gradient;
//! * **imperfect information** — agents exchange data over an undirected
//!   connected graph and track the aggregate with a singularly perturbed
//!   dynamic average consensus estimator.
//!
//! The crate also verifies the design conditions behind those rules
//! (Kalman rank tests on the augmented loop, Hurwitz observer error
//! matrices, pole locations and a positive-realness frequency sweep) and
//! checks simulated trajectories against a closed-form equilibrium oracle.
//!
//! Module map:
//!
//! * [`linalg`] — dense matrix kernel: solve, eigenvalues, rank tests.
//! * [`graph`] — communication topology, Laplacians, consensus fast matrix.
//! * [`game`] — quadratic aggregative costs and the equilibrium oracle.
//! * [`plant`] — agent dynamics, exosystems, gains, condition verifier.
//! * [`rules`] — the two strategy-updating vector fields.
//! * [`sim`] — fixed-step integration, trajectories, metrics, CSV export.
//! * [`demo`] — bundled double-integrator and turbine-generator scenarios.

pub mod demo;
pub mod game;
pub mod graph;
pub mod linalg;
pub mod plant;
pub mod rules;
pub mod sim;

pub use game::{AggregativeCost, GameModel, MonotonicityCertificate};
pub use graph::Graph;
pub use linalg::Matrix;
pub use plant::{AgentPlant, AugmentedAgent, ConditionReport, Exosystem, Gains};
pub use rules::{Mode, NetworkState};
pub use sim::{ScenarioConfig, Trajectory};
