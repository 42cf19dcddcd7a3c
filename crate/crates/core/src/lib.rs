//! Two-firm Hotelling-Downs location game with a popularity externality.
//!
//! Consumers are spread uniformly on `[0, 1]`; buying from firm `i` located at
//! `x_i` with market share `s_i` yields `theta + a * s_i - |v - x_i|`. Because
//! shares feed back into utilities, a location pair can admit several market
//! equilibria, and firms must take a stance on which one they expect after a
//! deviation. This crate computes:
//!
//! * the market equilibria for fixed locations ([`model`]),
//! * Nash equilibria for pessimistic, neutral and optimistic firms
//!   ([`behaviors`]),
//! * consumer welfare, the social optimum and the price of anarchy / stability
//!   ([`welfare`]),
//! * brute-force grid oracles that certify all of the above ([`oracle`]).

pub mod behaviors;
mod error;
pub mod model;
pub mod oracle;
pub mod welfare;

pub use behaviors::{
    best_deviation, best_deviation_pessimistic, deviation_payoff, is_nash, is_nash_with,
    nash_check, nash_diameter_bounds_check, nash_region_a_half, neutral_nash,
    pessimistic_nash_interval, symmetric_pessimistic_nash_set, symmetric_region, BehaviorKind,
    DeviationReport, DeviationSearch, Firm, NashCheck, NashInterval,
};
pub use error::{Error, Result};
pub use model::{
    consumer_utility, enumerate_market_equilibria, is_market_equilibrium, market_equilibrium_count,
    BoundaryFlags, ConsumerPosition, EquilibriumCount, EquilibriumProfile, GameParams, Locations,
    MarketOutcome, OutcomeKind,
};
pub use oracle::{
    oracle_best_deviation, oracle_market_equilibria, oracle_ne_region_scan, oracle_scan,
    oracle_social_optimum, riemann_welfare, suites::SuiteReport, GridSpec, OracleDeviation,
    OracleOptimum, ScanRow, ShareCluster,
};
pub use welfare::{
    best_ne_branch_welfares, best_ne_pessimistic, best_ne_threshold, consumer_welfare, poa,
    poa_minimizer_pessimistic, pos, social_optimum, worst_ne_pessimistic, NeWelfare, OptimumRecord,
    PoaMinimizer, RatioReport, SocialOptimum, WelfareValue,
};

/// Absolute tolerance for comparing market shares.
pub const SHARE_TOL: f64 = 1e-12;

/// Slack granted to numerically searched best deviations in the Nash test.
pub const NASH_TOL: f64 = 1e-9;
