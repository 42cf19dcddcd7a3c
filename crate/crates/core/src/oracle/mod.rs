//! Brute-force discretizations that check the closed forms independently.
//!
//! Every oracle works on uniform grids and states its own error bound:
//!
//! * market equilibria: a candidate cut passes when no grid consumer prefers
//!   the other firm by more than `(1 + a) * ds`, the change in the utility
//!   gap over one share step plus one consumer spacing;
//! * best deviations: payoffs are piecewise Lipschitz in the location with
//!   constant at most `1 / (1 - a)`, so the grid maximum is within
//!   `2 / (n_locations - 1) / (1 - a)` of the supremum away from jumps;
//! * social optimum: welfare is Lipschitz with constant at most `2 + 2a` in
//!   each argument.

pub mod suites;

use rayon::prelude::*;
use serde::Serialize;

use crate::behaviors::{is_nash_with, payoff_at, BehaviorKind, DeviationSearch};
use crate::error::{unit, Error, Result};
use crate::model::{enumerate_market_equilibria, EquilibriumProfile, GameParams, Locations};
use crate::welfare::consumer_welfare;

/// Grid resolutions. Points on `[0, 1]` are `i / (n - 1)`, except consumers,
/// which sit at cell midpoints `(k + 1/2) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub n_consumers: usize,
    pub n_locations: usize,
    pub n_shares: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_consumers: 10_000,
            n_locations: 2001,
            n_shares: 2001,
        }
    }
}

impl GridSpec {
    pub fn new(n_consumers: usize, n_locations: usize, n_shares: usize) -> Result<Self> {
        for (name, n) in [
            ("n_consumers", n_consumers),
            ("n_locations", n_locations),
            ("n_shares", n_shares),
        ] {
            if n < 2 {
                return Err(Error::InvalidGrid { name, value: n });
            }
        }
        Ok(Self {
            n_consumers,
            n_locations,
            n_shares,
        })
    }

    pub fn share_step(&self) -> f64 {
        1.0 / (self.n_shares - 1) as f64
    }

    pub fn location_step(&self) -> f64 {
        1.0 / (self.n_locations - 1) as f64
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + Clone {
        grid_points(self.n_locations)
    }

    /// Admissible error of a grid-searched best-deviation payoff.
    pub fn deviation_tolerance(&self, params: &GameParams) -> f64 {
        2.0 * self.location_step() / (1.0 - params.a())
    }
}

fn grid_points(n: usize) -> impl Iterator<Item = f64> + Clone {
    let last = (n - 1) as f64;
    (0..n).map(move |i| i as f64 / last)
}

/// A maximal run of consecutive passing share candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShareCluster {
    pub lo: f64,
    pub hi: f64,
}

impl ShareCluster {
    pub fn mid(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }
}

/// Market equilibria found by checking the definition at every grid consumer.
pub fn oracle_market_equilibria(
    params: &GameParams,
    loc: &Locations,
    grid: &GridSpec,
) -> Vec<ShareCluster> {
    let a = params.a();
    let (x1, x2) = (loc.x1(), loc.x2());
    let n = grid.n_consumers;
    let consumers: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
    // Preference for firm 1 is a (2 s1 - 1) + g(v).
    let g: Vec<f64> = consumers
        .iter()
        .map(|&v| (v - x2).abs() - (v - x1).abs())
        .collect();
    let mut prefix_min = vec![f64::INFINITY; n + 1];
    for k in 0..n {
        prefix_min[k + 1] = prefix_min[k].min(g[k]);
    }
    let mut suffix_max = vec![f64::NEG_INFINITY; n + 1];
    for k in (0..n).rev() {
        suffix_max[k] = suffix_max[k + 1].max(g[k]);
    }

    let tol = (1.0 + a) * grid.share_step();
    let passes = |s: f64| {
        let k = consumers.partition_point(|&v| v < s);
        let bonus = a * (2.0 * s - 1.0);
        bonus + prefix_min[k] >= -tol && bonus + suffix_max[k] <= tol
    };

    let mut clusters = Vec::new();
    let mut open: Option<ShareCluster> = None;
    for s in grid_points(grid.n_shares) {
        if passes(s) {
            open = Some(match open {
                Some(c) => ShareCluster { lo: c.lo, hi: s },
                None => ShareCluster { lo: s, hi: s },
            });
        } else if let Some(c) = open.take() {
            clusters.push(c);
        }
    }
    clusters.extend(open);
    clusters
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleDeviation {
    pub location: f64,
    pub payoff: f64,
}

/// Grid maximum of the deviation payoff, first maximizer on ties.
pub fn oracle_best_deviation(
    params: &GameParams,
    behavior: BehaviorKind,
    x_other: f64,
    grid: &GridSpec,
) -> Result<OracleDeviation> {
    unit("x_other", x_other)?;
    let mut best = OracleDeviation {
        location: 0.0,
        payoff: f64::NEG_INFINITY,
    };
    for x in grid.locations() {
        let payoff = payoff_at(params, behavior, x, x_other);
        if payoff > best.payoff {
            best = OracleDeviation {
                location: x,
                payoff,
            };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptimum {
    pub x1: f64,
    pub x2: f64,
    pub s1: f64,
    pub w: f64,
}

fn welfare(params: &GameParams, x1: f64, x2: f64, s1: f64) -> f64 {
    consumer_welfare(params, x1, x2, s1)
        .expect("grid points lie in [0, 1]")
        .w
}

/// Grid argmax of [`consumer_welfare`] over `x1 <= x2` and every cut.
///
/// For a fixed cut, welfare separates into a term in `x1` and a term in
/// `x2`, so `W(x1, x2) = W(x1, r) + W(r, x2) - W(r, r)` for any reference
/// `r`; a running prefix maximum then covers all ordered pairs in linear time.
/// Both orderings of the cut relative to the firms are searched.
pub fn oracle_social_optimum(params: &GameParams, grid: &GridSpec) -> OracleOptimum {
    let xs: Vec<f64> = grid.locations().collect();
    let shares: Vec<f64> = grid_points(grid.n_shares).collect();
    let per_share: Vec<OracleOptimum> = shares
        .par_iter()
        .map(|&s| {
            let r = 0.5;
            let base = welfare(params, r, r, s);
            let mut best = OracleOptimum {
                x1: 0.0,
                x2: 0.0,
                s1: s,
                w: f64::NEG_INFINITY,
            };
            let (mut lead_w, mut lead_x) = (f64::NEG_INFINITY, 0.0);
            for &x2 in &xs {
                let left = welfare(params, x2, r, s);
                if left > lead_w {
                    lead_w = left;
                    lead_x = x2;
                }
                let w = lead_w + welfare(params, r, x2, s) - base;
                if w > best.w {
                    best = OracleOptimum {
                        x1: lead_x,
                        x2,
                        s1: s,
                        w,
                    };
                }
            }
            best.w = welfare(params, best.x1, best.x2, s);
            best
        })
        .collect();
    per_share
        .into_iter()
        .fold(None::<OracleOptimum>, |acc, o| match acc {
            Some(b) if b.w >= o.w => Some(b),
            _ => Some(o),
        })
        .expect("share grid is non-empty")
}

/// One scanned profile: a grid location pair with one of its market
/// equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub profile: EquilibriumProfile,
    pub is_ne: bool,
    pub w: f64,
}

/// Every `(x1 <= x2)` location cell on the grid with each of its market
/// equilibria, tested for Nash. Rows are ordered by `x1`, then `x2`, then `s1`.
pub fn oracle_scan(
    params: &GameParams,
    behavior: BehaviorKind,
    grid: &GridSpec,
    search: &DeviationSearch,
) -> Vec<ScanRow> {
    let xs: Vec<f64> = grid.locations().collect();
    (0..xs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let x1 = xs[i];
            let mut rows = Vec::new();
            for &x2 in &xs[i..] {
                let loc = Locations::new(x1, x2).expect("ordered grid pair");
                for outcome in enumerate_market_equilibria(params, &loc) {
                    let profile =
                        EquilibriumProfile::new(params, loc, outcome).expect("enumerated outcome");
                    let is_ne = is_nash_with(params, behavior, &profile, search)
                        .expect("enumerated profile is a market equilibrium");
                    rows.push(ScanRow {
                        a: params.a(),
                        profile,
                        is_ne,
                        w: welfare(params, x1, x2, profile.s1()),
                    });
                }
            }
            rows
        })
        .collect()
}

/// Nash equilibria among all scanned profiles.
pub fn oracle_ne_region_scan(
    params: &GameParams,
    behavior: BehaviorKind,
    grid: &GridSpec,
) -> Vec<EquilibriumProfile> {
    oracle_scan(params, behavior, grid, &DeviationSearch::default())
        .into_iter()
        .filter(|r| r.is_ne)
        .map(|r| r.profile)
        .collect()
}

/// Midpoint-rule consumer welfare with `n` consumers.
pub fn riemann_welfare(params: &GameParams, x1: f64, x2: f64, s1: f64, n: usize) -> Result<f64> {
    unit("x1", x1)?;
    unit("x2", x2)?;
    unit("s1", s1)?;
    let a = params.a();
    let h = 1.0 / n as f64;
    let (u1, u2) = (params.theta() + a * s1, params.theta() + a * (1.0 - s1));
    let sum: f64 = (0..n)
        .map(|k| {
            let v = (k as f64 + 0.5) * h;
            // The cell straddling s1 is split between the two firms.
            let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
            let f1 = u1 - (v - x1).abs();
            let f2 = u2 - (v - x2).abs();
            if hi <= s1 {
                f1
            } else if lo >= s1 {
                f2
            } else {
                ((s1 - lo) * f1 + (hi - s1) * f2) / h
            }
        })
        .sum();
    Ok(sum * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviors::best_deviation_pessimistic;
    use crate::behaviors::Firm;
    use crate::welfare::social_optimum;

    fn p(a: f64) -> GameParams {
        GameParams::with_unit_theta(a).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 10, 10).is_err());
        assert!(GridSpec::new(2, 2, 2).is_ok());
        let g = GridSpec::default();
        assert_eq!(
            (g.n_consumers, g.n_locations, g.n_shares),
            (10_000, 2001, 2001)
        );
    }

    #[test]
    fn third_points_clusters() {
        let grid = GridSpec::default();
        let loc = Locations::new(1.0 / 3.0, 2.0 / 3.0).unwrap();
        let clusters = oracle_market_equilibria(&p(0.5), &loc, &grid);
        let expected = [0.0, 1.0 / 6.0, 0.5, 5.0 / 6.0, 1.0];
        assert_eq!(clusters.len(), 5, "{clusters:?}");
        for (c, e) in clusters.iter().zip(expected) {
            assert!(
                (c.mid() - e).abs() <= 2.0 / grid.n_shares as f64,
                "{c:?} vs {e}"
            );
        }
    }

    #[test]
    fn unique_cluster() {
        let loc = Locations::new(0.1, 0.9).unwrap();
        let clusters = oracle_market_equilibria(&p(0.1), &loc, &GridSpec::default());
        assert_eq!(clusters.len(), 1);
        assert!((clusters[0].mid() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn prefix_check_matches_naive() {
        let grid = GridSpec::new(200, 11, 101).unwrap();
        let params = p(0.35);
        let loc = Locations::new(0.3, 0.55).unwrap();
        let fast = oracle_market_equilibria(&params, &loc, &grid);
        let tol = (1.0 + 0.35) * grid.share_step();
        let mut naive = Vec::new();
        for s in grid_points(grid.n_shares) {
            let ok = (0..grid.n_consumers).all(|k| {
                let v = (k as f64 + 0.5) / grid.n_consumers as f64;
                let d = 0.35 * (2.0 * s - 1.0) + (v - 0.55f64).abs() - (v - 0.3f64).abs();
                if v < s {
                    d >= -tol
                } else {
                    d <= tol
                }
            });
            if ok {
                naive.push(s);
            }
        }
        let covered: Vec<f64> = grid_points(grid.n_shares)
            .filter(|&s| fast.iter().any(|c| c.lo <= s && s <= c.hi))
            .collect();
        assert_eq!(covered, naive);
    }

    #[test]
    fn best_deviation_examples() {
        let grid = GridSpec::default();
        let d = oracle_best_deviation(&p(0.3), BehaviorKind::Pessimistic, 0.4, &grid).unwrap();
        let exact = best_deviation_pessimistic(&p(0.3), Firm::One, 0.4).unwrap();
        assert!((d.location - 0.7).abs() < 2e-3);
        assert!(exact.payoff - d.payoff <= grid.deviation_tolerance(&p(0.3)));
        assert!(d.payoff <= exact.payoff);

        let d = oracle_best_deviation(&p(0.4), BehaviorKind::Optimistic, 0.5, &grid).unwrap();
        assert_eq!(d.payoff, 1.0);

        let d = oracle_best_deviation(&p(0.6), BehaviorKind::Neutral, 0.5, &grid).unwrap();
        assert!(d.payoff > 0.5);
    }

    fn exhaustive_optimum(params: &GameParams, grid: &GridSpec) -> OracleOptimum {
        let mut best = OracleOptimum {
            x1: 0.0,
            x2: 0.0,
            s1: 0.0,
            w: f64::NEG_INFINITY,
        };
        for s in grid_points(grid.n_shares) {
            for x1 in grid.locations() {
                for x2 in grid.locations().filter(|&x2| x2 >= x1) {
                    let w = welfare(params, x1, x2, s);
                    if w > best.w {
                        best = OracleOptimum { x1, x2, s1: s, w };
                    }
                }
            }
        }
        best
    }

    #[test]
    fn separable_optimum_matches_exhaustive() {
        let grid = GridSpec::new(2, 41, 41).unwrap();
        for a in [0.05, 0.2, 0.25, 0.3, 0.7] {
            let params = p(a);
            let fast = oracle_social_optimum(&params, &grid);
            let slow = exhaustive_optimum(&params, &grid);
            assert!(
                (fast.w - slow.w).abs() < 1e-12,
                "a = {a}: {fast:?} vs {slow:?}"
            );
        }
    }

    #[test]
    fn social_optimum_examples() {
        let grid = GridSpec::new(2, 401, 401).unwrap();
        let o = oracle_social_optimum(&p(0.1), &grid);
        assert!((o.w - 0.925).abs() < 1e-3);
        assert!((o.x1 - 0.25).abs() < 1e-2 && (o.x2 - 0.75).abs() < 1e-2);

        let o = oracle_social_optimum(&p(0.5), &grid);
        assert!((o.w - 1.25).abs() < 1e-3);
        let w = social_optimum(&p(0.5)).w;
        assert!(o.w <= w + 1e-12);
    }

    #[test]
    fn riemann_examples() {
        let w = riemann_welfare(&p(0.4), 0.3, 0.3, 0.5, 100_000).unwrap();
        assert!((w - 0.91).abs() < 1e-6);
        let w = riemann_welfare(&p(0.4), 0.2, 0.9, 0.123_456_7, 100_000).unwrap();
        let exact = consumer_welfare(&p(0.4), 0.2, 0.9, 0.123_456_7).unwrap().w;
        assert!((w - exact).abs() < 1e-8);
    }

    #[test]
    fn optimistic_scan_is_empty() {
        let grid = GridSpec::new(2, 21, 2).unwrap();
        assert!(oracle_ne_region_scan(&p(0.3), BehaviorKind::Optimistic, &grid).is_empty());
    }

    #[test]
    fn neutral_scan_finds_centre_only() {
        let grid = GridSpec::new(2, 21, 2).unwrap();
        // Kinds II, III and IV coincide at the centre; all three are listed.
        let ne = oracle_ne_region_scan(&p(0.3), BehaviorKind::Neutral, &grid);
        assert!(!ne.is_empty());
        assert!(ne
            .iter()
            .all(|q| (q.x1(), q.x2(), q.s1()) == (0.5, 0.5, 0.5)));
    }
}
