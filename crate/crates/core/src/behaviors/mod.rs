//! Firm attitudes toward multiple market equilibria and the Nash test.
//!
//! After a unilateral move the deviating firm faces the list of market
//! equilibria at the new location pair. A pessimistic firm expects its worst
//! share, an optimistic firm its best, a neutral firm the average over kinds.
//! The on-path share of a profile is never re-aggregated; only deviations are.

mod characterize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{unit, Result};
use crate::model::{
    enumerate_market_equilibria, interior_share, is_market_equilibrium, market_equilibrium_count,
    EquilibriumProfile, GameParams, Locations, MarketOutcome, OutcomeKind,
};
use crate::{Error, NASH_TOL, SHARE_TOL};

pub use characterize::{
    nash_diameter_bounds_check, nash_region_a_half, neutral_nash, pessimistic_nash_interval,
    symmetric_pessimistic_nash_set, symmetric_region, NashInterval,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BehaviorKind {
    Pessimistic,
    Neutral,
    Optimistic,
}

impl BehaviorKind {
    pub const ALL: [BehaviorKind; 3] = [
        BehaviorKind::Pessimistic,
        BehaviorKind::Neutral,
        BehaviorKind::Optimistic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BehaviorKind::Pessimistic => "pessimistic",
            BehaviorKind::Neutral => "neutral",
            BehaviorKind::Optimistic => "optimistic",
        }
    }

    /// Min, mean or max of the deviator's shares. Neutral firms weight each
    /// kind equally, so coinciding kinds are counted separately.
    pub fn aggregate(&self, shares: &[f64]) -> f64 {
        debug_assert!(!shares.is_empty());
        match self {
            BehaviorKind::Pessimistic => shares.iter().copied().fold(f64::INFINITY, f64::min),
            BehaviorKind::Optimistic => shares.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            BehaviorKind::Neutral => shares.iter().sum::<f64>() / shares.len() as f64,
        }
    }
}

impl fmt::Display for BehaviorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BehaviorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown behavior `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Firm {
    One,
    Two,
}

impl Firm {
    pub fn index(&self) -> u8 {
        match self {
            Firm::One => 1,
            Firm::Two => 2,
        }
    }

    pub fn other(&self) -> Firm {
        match self {
            Firm::One => Firm::Two,
            Firm::Two => Firm::One,
        }
    }
}

impl Serialize for Firm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.index())
    }
}

/// Evaluation of one deviation (or of the best deviation found).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub deviator: Firm,
    pub location: f64,
    pub payoff: f64,
    /// Equilibria at the sorted deviated pair, in increasing `s1`.
    pub outcomes_considered: Vec<MarketOutcome>,
    /// The deviator's share in each entry of `outcomes_considered`.
    pub deviator_shares: Vec<f64>,
    /// `payoff` is a one-sided limit as `location` is approached, not a value
    /// attained at `location` itself.
    pub limit: bool,
    /// Some existence condition is tight or two kinds share the same `s1`.
    pub boundary: bool,
}

/// Payoff of moving `deviator` to `x_dev` while the rival stays at `x_other`.
pub fn deviation_payoff(
    params: &GameParams,
    behavior: BehaviorKind,
    deviator: Firm,
    x_dev: f64,
    x_other: f64,
) -> Result<DeviationReport> {
    let (loc, on_right) = Locations::from_unordered(x_dev, x_other)?;
    let outcomes = enumerate_market_equilibria(params, &loc);
    let deviator_shares: Vec<f64> = outcomes.iter().map(|o| o.share_of(on_right)).collect();
    let payoff = behavior.aggregate(&deviator_shares);
    let boundary = market_equilibrium_count(params, &loc).tight.any()
        || MarketOutcome::distinct_shares(&outcomes).len() < outcomes.len();
    Ok(DeviationReport {
        deviator,
        location: x_dev,
        payoff,
        outcomes_considered: outcomes,
        deviator_shares,
        limit: false,
        boundary,
    })
}

/// Allocation-light payoff used inside searches. Inputs are in `[0, 1]`.
pub(crate) fn payoff_at(
    params: &GameParams,
    behavior: BehaviorKind,
    x_dev: f64,
    x_other: f64,
) -> f64 {
    let (lo, hi, on_right) = if x_dev <= x_other {
        (x_dev, x_other, false)
    } else {
        (x_other, x_dev, true)
    };
    let loc = Locations::new(lo, hi).expect("search points lie in [0, 1]");
    let outcomes = enumerate_market_equilibria(params, &loc);
    let mut shares = [0.0; 5];
    for (slot, o) in shares.iter_mut().zip(&outcomes) {
        *slot = o.share_of(on_right);
    }
    behavior.aggregate(&shares[..outcomes.len()])
}

/// Supremum of a pessimistic firm's deviation payoff against a rival at
/// `x_other`.
///
/// Any move within distance `a` of the rival admits the outcome where the
/// deviator gets nothing. Moving farther away yields the unique interior
/// equilibrium, whose share grows as the gap shrinks toward `a`, so the
/// supremum is the limit at `x_other + a` (or `x_other - a` when the rival is
/// right of centre). If that point is off the line, the supremum is 0.
pub fn best_deviation_pessimistic(
    params: &GameParams,
    deviator: Firm,
    x_other: f64,
) -> Result<DeviationReport> {
    unit("x_other", x_other)?;
    let a = params.a();
    let mirrored = x_other > 0.5;
    let near = if mirrored { 1.0 - x_other } else { x_other };

    if near + a >= 1.0 {
        let location = if mirrored { 0.0 } else { 1.0 };
        let mut report = deviation_payoff(
            params,
            BehaviorKind::Pessimistic,
            deviator,
            location,
            x_other,
        )?;
        report.payoff = 0.0;
        return Ok(report);
    }

    let payoff = 1.0 - near / (1.0 - a);
    let location = if mirrored { x_other - a } else { x_other + a };
    let (lo, hi) = if mirrored {
        (location, x_other)
    } else {
        (x_other, location)
    };
    let outcome = MarketOutcome::new(OutcomeKind::Unique, interior_share(a, lo, hi));
    Ok(DeviationReport {
        deviator,
        location,
        payoff,
        outcomes_considered: vec![outcome],
        deviator_shares: vec![outcome.share_of(!mirrored)],
        limit: true,
        boundary: false,
    })
}

/// Settings of the numerical best-deviation search used for neutral and
/// optimistic firms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSearch {
    /// Uniform grid resolution over `[0, 1]`.
    pub grid_points: usize,
    /// Golden-section pass on the best grid bracket.
    pub refine: bool,
    /// Offset used to probe one-sided limits at payoff breakpoints.
    pub limit_offset: f64,
}

impl Default for DeviationSearch {
    fn default() -> Self {
        Self {
            grid_points: 4001,
            refine: true,
            limit_offset: 1e-12,
        }
    }
}

/// Locations where the deviation payoff can jump or change slope: the gap
/// reaching `a`, kinds II/IV switching on or off, the label swap at the
/// rival's location, the mirror point and the end points.
fn breakpoints(a: f64, x_other: f64) -> Vec<f64> {
    let k = 1.0 - 2.0 * a;
    let mut pts = vec![
        0.0,
        1.0,
        0.5,
        x_other,
        1.0 - x_other,
        x_other - a,
        x_other + a,
        a + k * x_other,
    ];
    if k != 0.0 {
        pts.push((x_other - a) / k);
    }
    pts.retain(|p| p.is_finite() && (0.0..=1.0).contains(p));
    pts
}

struct Best {
    location: f64,
    payoff: f64,
}

impl Best {
    fn offer(&mut self, location: f64, payoff: f64) {
        if payoff > self.payoff {
            self.location = location;
            self.payoff = payoff;
        }
    }
}

/// Best deviation for neutral and optimistic firms.
///
/// The payoff is piecewise affine in the deviating location with pieces
/// delimited by [`breakpoints`], so probing each breakpoint and its two
/// neighbours yields the supremum. A uniform grid and a golden-section pass
/// follow unless the running best already exceeds `stop_above`.
fn search_best(
    params: &GameParams,
    behavior: BehaviorKind,
    x_other: f64,
    exclude: Option<f64>,
    search: &DeviationSearch,
    stop_above: Option<f64>,
) -> Best {
    let mut best = Best {
        location: f64::NAN,
        payoff: f64::NEG_INFINITY,
    };
    let probe = |best: &mut Best, x: f64| {
        if (0.0..=1.0).contains(&x) && Some(x) != exclude {
            best.offer(x, payoff_at(params, behavior, x, x_other));
        }
    };
    let delta = search.limit_offset;
    for b in breakpoints(params.a(), x_other) {
        probe(&mut best, b);
        probe(&mut best, b - delta);
        probe(&mut best, b + delta);
    }
    let done = |best: &Best| stop_above.is_some_and(|t| best.payoff > t);
    if done(&best) || search.grid_points < 2 {
        return best;
    }

    let n = search.grid_points;
    let step = 1.0 / (n - 1) as f64;
    let mut best_idx = 0;
    let mut best_grid = f64::NEG_INFINITY;
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        if Some(x) == exclude {
            continue;
        }
        let v = payoff_at(params, behavior, x, x_other);
        if v > best_grid {
            best_grid = v;
            best_idx = i;
        }
        best.offer(x, v);
    }
    if done(&best) || !search.refine {
        return best;
    }

    // Golden-section on [x_{k-1}, x_{k+1}] around the best grid point.
    let mut lo = (best_idx as f64 - 1.0).max(0.0) * step;
    let mut hi = ((best_idx + 1) as f64 * step).min(1.0);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let f = |x: f64| {
        if Some(x) == exclude {
            f64::NEG_INFINITY
        } else {
            payoff_at(params, behavior, x, x_other)
        }
    };
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        best.offer(c, fc);
        best.offer(d, fd);
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    best
}

/// Best deviation of `deviator` against a rival at `x_other`.
///
/// `x_current` is the deviator's present location, which does not count as a
/// deviation. Pessimistic firms use the exact supremum; the other attitudes
/// use [`DeviationSearch`].
pub fn best_deviation(
    params: &GameParams,
    behavior: BehaviorKind,
    deviator: Firm,
    x_other: f64,
    x_current: Option<f64>,
    search: &DeviationSearch,
) -> Result<DeviationReport> {
    unit("x_other", x_other)?;
    if behavior == BehaviorKind::Pessimistic {
        return best_deviation_pessimistic(params, deviator, x_other);
    }
    let best = search_best(params, behavior, x_other, x_current, search, None);
    deviation_payoff(params, behavior, deviator, best.location, x_other)
}

/// Outcome of the Nash test with both firms' best deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashCheck {
    pub behavior: BehaviorKind,
    pub is_nash: bool,
    pub firm1: DeviationReport,
    pub firm2: DeviationReport,
}

impl NashCheck {
    /// The firm whose best deviation has the largest gain over its on-path
    /// share, with that deviation.
    pub fn binding(&self, profile: &EquilibriumProfile) -> &DeviationReport {
        let gain1 = self.firm1.payoff - profile.s1();
        let gain2 = self.firm2.payoff - profile.s2();
        if gain1 >= gain2 {
            &self.firm1
        } else {
            &self.firm2
        }
    }
}

fn tolerance(behavior: BehaviorKind) -> f64 {
    match behavior {
        BehaviorKind::Pessimistic => SHARE_TOL,
        _ => NASH_TOL,
    }
}

fn ensure_market_equilibrium(params: &GameParams, profile: &EquilibriumProfile) -> Result<()> {
    if is_market_equilibrium(params, &profile.locations(), profile.s1())? {
        Ok(())
    } else {
        Err(Error::NotMarketEquilibrium {
            x1: profile.x1(),
            x2: profile.x2(),
            s1: profile.s1(),
        })
    }
}

/// Full Nash test reporting both firms' best deviations.
pub fn nash_check(
    params: &GameParams,
    behavior: BehaviorKind,
    profile: &EquilibriumProfile,
    search: &DeviationSearch,
) -> Result<NashCheck> {
    ensure_market_equilibrium(params, profile)?;
    let firm1 = best_deviation(
        params,
        behavior,
        Firm::One,
        profile.x2(),
        Some(profile.x1()),
        search,
    )?;
    let firm2 = best_deviation(
        params,
        behavior,
        Firm::Two,
        profile.x1(),
        Some(profile.x2()),
        search,
    )?;
    let tol = tolerance(behavior);
    let is_nash = profile.s1() >= firm1.payoff - tol && profile.s2() >= firm2.payoff - tol;
    Ok(NashCheck {
        behavior,
        is_nash,
        firm1,
        firm2,
    })
}

/// Whether neither firm gains by moving, with default search settings.
pub fn is_nash(
    params: &GameParams,
    behavior: BehaviorKind,
    profile: &EquilibriumProfile,
) -> Result<bool> {
    is_nash_with(params, behavior, profile, &DeviationSearch::default())
}

/// [`is_nash`] with explicit search settings. Stops at the first profitable
/// deviation found.
pub fn is_nash_with(
    params: &GameParams,
    behavior: BehaviorKind,
    profile: &EquilibriumProfile,
    search: &DeviationSearch,
) -> Result<bool> {
    ensure_market_equilibrium(params, profile)?;
    if behavior == BehaviorKind::Pessimistic {
        let d1 = best_deviation_pessimistic(params, Firm::One, profile.x2())?;
        let d2 = best_deviation_pessimistic(params, Firm::Two, profile.x1())?;
        return Ok(profile.s1() >= d1.payoff - SHARE_TOL && profile.s2() >= d2.payoff - SHARE_TOL);
    }
    let sides = [
        (profile.x2(), profile.x1(), profile.s1()),
        (profile.x1(), profile.x2(), profile.s2()),
    ];
    // Cheap breakpoint probes for both firms first; most profiles fail here.
    let quick = DeviationSearch {
        grid_points: 0,
        refine: false,
        ..*search
    };
    for search in [&quick, search] {
        for &(x_other, x_current, share) in &sides {
            let threshold = share + NASH_TOL;
            let best = search_best(
                params,
                behavior,
                x_other,
                Some(x_current),
                search,
                Some(threshold),
            );
            if best.payoff > threshold {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
