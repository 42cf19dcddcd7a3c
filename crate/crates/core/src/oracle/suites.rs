//! Randomized oracle-versus-closed-form suites with their grid tolerances.
//!
//! Each suite draws instances from a seeded ChaCha8 stream, so a run is
//! reproducible from `(seed, instances, grid)`. Instances whose answer
//! changes within grid resolution of them are skipped and counted; every
//! other instance must agree within the stated bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    oracle_best_deviation, oracle_market_equilibria, oracle_social_optimum, riemann_welfare,
    GridSpec,
};
use crate::behaviors::{
    best_deviation, pessimistic_nash_interval, BehaviorKind, DeviationSearch, Firm,
};
use crate::model::{enumerate_market_equilibria, GameParams, Locations, MarketOutcome};
use crate::welfare::{consumer_welfare, social_optimum};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub seed: u64,
    pub instances: usize,
    pub skipped: usize,
    pub disagreements: usize,
    /// Largest error seen on a checked instance.
    pub max_error: f64,
    /// Bound the errors were checked against (largest over instances when
    /// it depends on the instance).
    pub tolerance: f64,
    /// First disagreement, for diagnosis.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str, seed: u64) -> Self {
        Self {
            name,
            seed,
            instances: 0,
            skipped: 0,
            disagreements: 0,
            max_error: 0.0,
            tolerance: 0.0,
            first_failure: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements == 0
    }

    fn record(&mut self, error: f64, tolerance: f64, describe: impl FnOnce() -> String) {
        self.instances += 1;
        self.max_error = self.max_error.max(error);
        self.tolerance = self.tolerance.max(tolerance);
        if error.is_nan() || error > tolerance {
            self.disagreements += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_a(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.02..0.98)
}

fn random_locations(rng: &mut ChaCha8Rng) -> Locations {
    let (loc, _) = Locations::from_unordered(rng.gen(), rng.gen()).expect("unit draws");
    loc
}

/// Half-width of the run of passing candidates around an isolated
/// equilibrium: the utility gap moves with slope at least `min(2a, 2 - 2a)`
/// in the cut, against a tolerance of `(1 + a) ds`, plus one grid step.
fn cluster_half_width(a: f64, grid: &GridSpec) -> f64 {
    let ds = grid.share_step();
    (1.0 + a) * ds / (2.0 * a).min(2.0 - 2.0 * a) + ds
}

/// Distance, in share units, from the nearest change in the set of
/// equilibria: a kind switching on or off, or two kinds merging.
fn structural_margin(a: f64, loc: &Locations, outcomes: &[MarketOutcome]) -> f64 {
    let d = loc.gap();
    let s_left = 0.5 - d / (2.0 * a);
    let s_right = 0.5 + d / (2.0 * a);
    let mut margin = [
        (d - a).abs() / (2.0 * a),
        (s_left - loc.x1()).abs(),
        (s_right - loc.x2()).abs(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let shares = MarketOutcome::distinct_shares(outcomes);
    for w in shares.windows(2) {
        margin = margin.min(w[1] - w[0]);
    }
    margin
}

/// Cluster midpoints against the enumerated shares, within `2 / n_shares`.
pub fn market_equilibria_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("market_equilibria", seed);
    let mut rng = rng(seed);
    let tol = 2.0 / grid.n_shares as f64;
    while report.instances + report.skipped < instances {
        let params = GameParams::with_unit_theta(random_a(&mut rng)).expect("a in (0, 1)");
        let loc = random_locations(&mut rng);
        let outcomes = enumerate_market_equilibria(&params, &loc);
        let half = cluster_half_width(params.a(), grid);
        if structural_margin(params.a(), &loc, &outcomes) <= 4.0 * half {
            report.skipped += 1;
            continue;
        }
        let exact = MarketOutcome::distinct_shares(&outcomes);
        let clusters = oracle_market_equilibria(&params, &loc, grid);
        let error = if clusters.len() != exact.len() {
            f64::INFINITY
        } else {
            clusters
                .iter()
                .zip(&exact)
                .map(|(c, s)| (c.mid() - s).abs())
                .fold(0.0, f64::max)
        };
        report.record(error, tol, || {
            format!(
                "a = {}, x = ({}, {}): oracle {:?}, exact {:?}",
                params.a(),
                loc.x1(),
                loc.x2(),
                clusters.iter().map(|c| c.mid()).collect::<Vec<_>>(),
                exact
            )
        });
    }
    report
}

/// Mirrored locations give mirrored clusters, up to one share step.
pub fn mirror_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("mirror", seed);
    let mut rng = rng(seed);
    let tol = grid.share_step() + 1e-12;
    while report.instances < instances {
        let params = GameParams::with_unit_theta(random_a(&mut rng)).expect("a in (0, 1)");
        let loc = random_locations(&mut rng);
        let direct = oracle_market_equilibria(&params, &loc, grid);
        let mut mirrored: Vec<f64> = oracle_market_equilibria(&params, &loc.mirror(), grid)
            .iter()
            .map(|c| 1.0 - c.mid())
            .collect();
        mirrored.reverse();
        let error = if direct.len() != mirrored.len() {
            f64::INFINITY
        } else {
            direct
                .iter()
                .zip(&mirrored)
                .map(|(c, m)| (c.mid() - m).abs())
                .fold(0.0, f64::max)
        };
        report.record(error, tol, || {
            format!("a = {}, x = ({}, {})", params.a(), loc.x1(), loc.x2())
        });
    }
    report
}

/// Grid maximum of the deviation payoff against the analytic best deviation.
/// The grid can only undershoot, by at most the Lipschitz bound.
pub fn best_deviation_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("best_deviation", seed);
    let mut rng = rng(seed);
    let search = DeviationSearch::default();
    while report.instances < instances {
        let params = GameParams::with_unit_theta(random_a(&mut rng)).expect("a in (0, 1)");
        let behavior = BehaviorKind::ALL[rng.gen_range(0..3)];
        let x_other: f64 = rng.gen();
        let oracle = oracle_best_deviation(&params, behavior, x_other, grid).expect("unit");
        let exact =
            best_deviation(&params, behavior, Firm::One, x_other, None, &search).expect("unit");
        let under = exact.payoff - oracle.payoff;
        // Overshooting the analytic value by more than rounding is an error.
        let error = if under < -1e-12 { f64::INFINITY } else { under };
        report.record(error, grid.deviation_tolerance(&params), || {
            format!(
                "a = {}, {behavior}, x_other = {x_other}: oracle {:?}, exact {} at {}",
                params.a(),
                oracle,
                exact.payoff,
                exact.location
            )
        });
    }
    report
}

/// Pessimistic Nash verdicts from grid best deviations against the closed
/// interval. Profiles within the deviation tolerance of an interval end are
/// skipped.
pub fn nash_region_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("nash_region", seed);
    let mut rng = rng(seed);
    let n = grid.n_locations - 1;
    let mut attempts = 0;
    while report.instances < instances && attempts < 100 * instances {
        attempts += 1;
        let params = GameParams::with_unit_theta(random_a(&mut rng)).expect("a in (0, 1)");
        let (i, j) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        let (i, j) = (i.min(j), i.max(j));
        let loc = Locations::new(i as f64 / n as f64, j as f64 / n as f64).expect("ordered");
        let interval = pessimistic_nash_interval(&params, &loc);
        let tol = grid.deviation_tolerance(&params);
        let dev1 = oracle_best_deviation(&params, BehaviorKind::Pessimistic, loc.x2(), grid)
            .expect("unit");
        let dev2 = oracle_best_deviation(&params, BehaviorKind::Pessimistic, loc.x1(), grid)
            .expect("unit");
        for outcome in enumerate_market_equilibria(&params, &loc) {
            let s1 = outcome.s1();
            let margin = (s1 - interval.lo).abs().min((s1 - interval.hi).abs());
            if margin <= tol {
                report.skipped += 1;
                continue;
            }
            let oracle_ne = s1 >= dev1.payoff - 1e-12 && outcome.s2() >= dev2.payoff - 1e-12;
            let agree = oracle_ne == interval.contains(s1);
            report.record(if agree { 0.0 } else { 1.0 }, 0.0, || {
                format!(
                    "a = {}, x = ({}, {}), s1 = {s1}: oracle {oracle_ne}, interval {:?}",
                    params.a(),
                    loc.x1(),
                    loc.x2(),
                    interval
                )
            });
        }
    }
    report
}

/// Grid social optimum against the closed form. The grid cannot exceed the
/// optimum; it falls short by at most half a step times the partial-slope
/// bounds: 1 per location, `1 + 2a` for the cut.
pub fn social_optimum_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("social_optimum", seed);
    let mut rng = rng(seed);
    while report.instances < instances {
        let a = random_a(&mut rng);
        let theta = rng.gen_range(1.0..3.0);
        let params = GameParams::new(a, theta).expect("valid");
        let exact = social_optimum(&params).w;
        let oracle = oracle_social_optimum(&params, grid);
        let tol = grid.location_step() + (1.0 + 2.0 * a) * grid.share_step() / 2.0;
        let gap = exact - oracle.w;
        let error = if gap < -1e-12 { f64::INFINITY } else { gap };
        report.record(error, tol, || {
            format!("a = {a}, theta = {theta}: oracle {oracle:?}, exact {exact}")
        });
    }
    report
}

/// Midpoint-rule welfare with `n_consumers` against the antiderivative
/// formula, within `1e-5`.
pub fn welfare_suite(seed: u64, instances: usize, grid: &GridSpec) -> SuiteReport {
    let mut report = SuiteReport::new("welfare", seed);
    let mut rng = rng(seed);
    while report.instances < instances {
        let params = GameParams::new(random_a(&mut rng), rng.gen_range(1.0..3.0)).expect("valid");
        let (x1, x2, s1): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let exact = consumer_welfare(&params, x1, x2, s1).expect("unit").w;
        let approx = riemann_welfare(&params, x1, x2, s1, grid.n_consumers).expect("unit");
        report.record((exact - approx).abs(), 1e-5, || {
            format!(
                "a = {}, ({x1}, {x2}, {s1}): {exact} vs {approx}",
                params.a()
            )
        });
    }
    report
}

/// Every suite with the given instance count per suite. The social optimum
/// suite is the expensive one and runs a tenth as many instances.
pub fn run_all(seed: u64, instances: usize, grid: &GridSpec) -> Vec<SuiteReport> {
    vec![
        market_equilibria_suite(seed, instances, grid),
        mirror_suite(seed.wrapping_add(1), instances, grid),
        best_deviation_suite(seed.wrapping_add(2), instances, grid),
        nash_region_suite(seed.wrapping_add(3), instances, grid),
        social_optimum_suite(seed.wrapping_add(4), instances.div_ceil(10), grid),
        welfare_suite(seed.wrapping_add(5), instances, grid),
    ]
}
