//! Domain types and market equilibria for fixed firm locations.
//!
//! For locations `x1 <= x2` write `d = x2 - x1`. The utility gap
//! `u1 - u2 = a (2 s1 - 1) + |v - x2| - |v - x1|` is non-increasing in the
//! consumer position `v`, so a market equilibrium is fully described by the
//! cut point `s1`. When `d > a` the cut is unique and interior; otherwise up to
//! five cuts exist (see [`OutcomeKind`]).

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{unit, Error, Result};
use crate::SHARE_TOL;

/// Externality magnitude `a` and intrinsic purchase utility `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    a: f64,
    theta: f64,
}

impl GameParams {
    pub fn new(a: f64, theta: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidExternality(a));
        }
        if !(theta.is_finite() && theta >= 1.0) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self { a, theta })
    }

    /// Parameters with `theta = 1`, the usual normalization.
    pub fn with_unit_theta(a: f64) -> Result<Self> {
        Self::new(a, 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Ordered firm positions `0 <= x1 <= x2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Locations {
    x1: f64,
    x2: f64,
}

impl Locations {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        unit("x1", x1)?;
        unit("x2", x2)?;
        if x1 > x2 {
            return Err(Error::UnorderedLocations { x1, x2 });
        }
        Ok(Self { x1, x2 })
    }

    /// Sorts an arbitrary pair. The flag is `true` when the inputs were
    /// swapped, i.e. the firm given first sits at `x2`.
    pub fn from_unordered(p: f64, q: f64) -> Result<(Self, bool)> {
        unit("x1", p)?;
        unit("x2", q)?;
        if p <= q {
            Ok((Self { x1: p, x2: q }, false))
        } else {
            Ok((Self { x1: q, x2: p }, true))
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn gap(&self) -> f64 {
        self.x2 - self.x1
    }

    /// Reflection `v -> 1 - v` of the characteristic space.
    pub fn mirror(&self) -> Self {
        Self {
            x1: 1.0 - self.x2,
            x2: 1.0 - self.x1,
        }
    }
}

/// Taxonomy of market equilibria.
///
/// `Unique` is the only equilibrium when `x2 - x1 > a`. Otherwise kinds I and V
/// (monopolies) always exist and II-IV exist under affine conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    #[serde(rename = "unique")]
    Unique,
    /// I: every consumer buys from firm 2.
    #[serde(rename = "i")]
    FirmTwoTakesAll,
    /// II: consumers left of `x1` are indifferent.
    #[serde(rename = "ii")]
    LeftIndifferent,
    /// III: a single indifferent consumer in `[x1, x2]`.
    #[serde(rename = "iii")]
    Interior,
    /// IV: consumers right of `x2` are indifferent.
    #[serde(rename = "iv")]
    RightIndifferent,
    /// V: every consumer buys from firm 1.
    #[serde(rename = "v")]
    FirmOneTakesAll,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 6] = [
        OutcomeKind::Unique,
        OutcomeKind::FirmTwoTakesAll,
        OutcomeKind::LeftIndifferent,
        OutcomeKind::Interior,
        OutcomeKind::RightIndifferent,
        OutcomeKind::FirmOneTakesAll,
    ];

    /// Label used in JSON and CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeKind::Unique => "unique",
            OutcomeKind::FirmTwoTakesAll => "i",
            OutcomeKind::LeftIndifferent => "ii",
            OutcomeKind::Interior => "iii",
            OutcomeKind::RightIndifferent => "iv",
            OutcomeKind::FirmOneTakesAll => "v",
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == label)
    }

    /// Kind obtained after reflecting locations; I<->V and II<->IV.
    pub fn mirror(&self) -> Self {
        match self {
            OutcomeKind::FirmTwoTakesAll => OutcomeKind::FirmOneTakesAll,
            OutcomeKind::FirmOneTakesAll => OutcomeKind::FirmTwoTakesAll,
            OutcomeKind::LeftIndifferent => OutcomeKind::RightIndifferent,
            OutcomeKind::RightIndifferent => OutcomeKind::LeftIndifferent,
            k => *k,
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One market equilibrium. Only `s1` is stored; `s2 = 1 - s1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketOutcome {
    kind: OutcomeKind,
    s1: f64,
}

impl MarketOutcome {
    pub(crate) fn new(kind: OutcomeKind, s1: f64) -> Self {
        Self {
            kind,
            s1: s1.clamp(0.0, 1.0),
        }
    }

    pub fn kind(&self) -> OutcomeKind {
        self.kind
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        1.0 - self.s1
    }

    /// Share of the firm in the given slot (`false` = left slot).
    pub(crate) fn share_of(&self, right_slot: bool) -> f64 {
        if right_slot {
            self.s2()
        } else {
            self.s1
        }
    }

    pub fn mirror(&self) -> Self {
        Self::new(self.kind.mirror(), 1.0 - self.s1)
    }

    /// Distinct shares of a list of outcomes, merging entries closer than
    /// [`SHARE_TOL`]. The list is expected in increasing `s1` order.
    pub fn distinct_shares(outcomes: &[MarketOutcome]) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            if out
                .last()
                .map_or(true, |&last| (o.s1 - last).abs() > SHARE_TOL)
            {
                out.push(o.s1);
            }
        }
        out
    }
}

impl Serialize for MarketOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record {
            kind: OutcomeKind,
            s1: f64,
            s2: f64,
        }
        Record {
            kind: self.kind,
            s1: self.s1,
            s2: self.s2(),
        }
        .serialize(serializer)
    }
}

/// Locations together with a market equilibrium supporting them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumProfile {
    locations: Locations,
    outcome: MarketOutcome,
}

impl EquilibriumProfile {
    /// Checks that `outcome` is a market equilibrium at `locations`.
    pub fn new(params: &GameParams, locations: Locations, outcome: MarketOutcome) -> Result<Self> {
        if !is_market_equilibrium(params, &locations, outcome.s1)? {
            return Err(Error::NotMarketEquilibrium {
                x1: locations.x1,
                x2: locations.x2,
                s1: outcome.s1,
            });
        }
        Ok(Self { locations, outcome })
    }

    pub(crate) fn trusted(locations: Locations, outcome: MarketOutcome) -> Self {
        Self { locations, outcome }
    }

    /// Looks up the enumerated outcome of the given kind.
    pub fn of_kind(params: &GameParams, locations: Locations, kind: OutcomeKind) -> Option<Self> {
        enumerate_market_equilibria(params, &locations)
            .into_iter()
            .find(|o| o.kind == kind)
            .map(|outcome| Self { locations, outcome })
    }

    pub fn locations(&self) -> Locations {
        self.locations
    }

    pub fn outcome(&self) -> MarketOutcome {
        self.outcome
    }

    pub fn kind(&self) -> OutcomeKind {
        self.outcome.kind
    }

    pub fn x1(&self) -> f64 {
        self.locations.x1
    }

    pub fn x2(&self) -> f64 {
        self.locations.x2
    }

    pub fn s1(&self) -> f64 {
        self.outcome.s1
    }

    pub fn s2(&self) -> f64 {
        self.outcome.s2()
    }

    pub fn mirror(&self) -> Self {
        Self {
            locations: self.locations.mirror(),
            outcome: self.outcome.mirror(),
        }
    }
}

/// A consumer's ideal characteristic in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConsumerPosition(f64);

impl ConsumerPosition {
    pub fn new(v: f64) -> Result<Self> {
        unit("v", v).map(Self)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

pub fn consumer_utility(params: &GameParams, v: ConsumerPosition, x: f64, s: f64) -> Result<f64> {
    unit("x", x)?;
    unit("s", s)?;
    Ok(params.theta + params.a * s - (v.0 - x).abs())
}

/// Cut point of the interior equilibrium, `(x1 + x2 - a) / (2 (1 - a))`.
pub(crate) fn interior_share(a: f64, x1: f64, x2: f64) -> f64 {
    (x1 + x2 - a) / (2.0 * (1.0 - a))
}

/// Existence tests in the `x2 - x1 <= a` branch. Comparisons are exact.
#[derive(Debug, Clone, Copy)]
struct Existence {
    left: bool,
    right: bool,
}

fn existence(a: f64, loc: &Locations) -> Existence {
    // Written in terms of the gap so coincident firms cancel exactly;
    // boundaries are inclusive within SHARE_TOL.
    let d = loc.gap();
    Existence {
        // kind II: a <= x2 - (1 - 2a) x1
        left: d >= a * (1.0 - 2.0 * loc.x1) - SHARE_TOL,
        // kind IV: x1 - (1 - 2a) x2 <= a
        right: d >= a * (2.0 * loc.x2 - 1.0) - SHARE_TOL,
    }
}

/// All market equilibria at `loc`, in increasing `s1` (kind order breaks
/// ties). Kinds that coincide numerically are kept as separate entries.
pub fn enumerate_market_equilibria(params: &GameParams, loc: &Locations) -> Vec<MarketOutcome> {
    let a = params.a;
    let d = loc.gap();
    if d > a {
        return vec![MarketOutcome::new(
            OutcomeKind::Unique,
            interior_share(a, loc.x1, loc.x2),
        )];
    }
    let ex = existence(a, loc);
    let mut out = Vec::with_capacity(5);
    out.push(MarketOutcome::new(OutcomeKind::FirmTwoTakesAll, 0.0));
    if ex.left {
        out.push(MarketOutcome::new(
            OutcomeKind::LeftIndifferent,
            0.5 - d / (2.0 * a),
        ));
    }
    if ex.left && ex.right {
        out.push(MarketOutcome::new(
            OutcomeKind::Interior,
            interior_share(a, loc.x1, loc.x2),
        ));
    }
    if ex.right {
        out.push(MarketOutcome::new(
            OutcomeKind::RightIndifferent,
            0.5 + d / (2.0 * a),
        ));
    }
    out.push(MarketOutcome::new(OutcomeKind::FirmOneTakesAll, 1.0));
    out
}

/// Decides the market-equilibrium definition for the cut `s1` directly.
///
/// Since the utility gap is continuous and non-increasing in `v`, the two
/// quantified conditions reduce to its sign at `v = s1`: zero for an interior
/// cut, non-positive at `s1 = 0`, non-negative at `s1 = 1`.
pub fn is_market_equilibrium(params: &GameParams, loc: &Locations, s1: f64) -> Result<bool> {
    unit("s1", s1)?;
    let gap = |v: f64| params.a * (2.0 * s1 - 1.0) + (v - loc.x2).abs() - (v - loc.x1).abs();
    let g = gap(s1);
    Ok(if s1 == 0.0 {
        g <= SHARE_TOL
    } else if s1 == 1.0 {
        g >= -SHARE_TOL
    } else {
        g.abs() <= SHARE_TOL
    })
}

/// Which existence conditions hold with equality (within [`SHARE_TOL`]).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BoundaryFlags {
    /// `x2 - x1 = a`
    pub gap: bool,
    /// `a = x2 - (1 - 2a) x1`
    pub left: bool,
    /// `x1 - (1 - 2a) x2 = a`
    pub right: bool,
}

impl BoundaryFlags {
    pub fn any(&self) -> bool {
        self.gap || self.left || self.right
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquilibriumCount {
    pub count: usize,
    pub tight: BoundaryFlags,
}

pub fn market_equilibrium_count(params: &GameParams, loc: &Locations) -> EquilibriumCount {
    let a = params.a;
    let d = loc.gap();
    let near = |u: f64, v: f64| (u - v).abs() <= SHARE_TOL;
    let tight = BoundaryFlags {
        gap: near(d, a),
        left: near(d, a * (1.0 - 2.0 * loc.x1)),
        right: near(d, a * (2.0 * loc.x2 - 1.0)),
    };
    EquilibriumCount {
        count: enumerate_market_equilibria(params, loc).len(),
        tight,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64) -> GameParams {
        GameParams::with_unit_theta(a).unwrap()
    }

    fn loc(x1: f64, x2: f64) -> Locations {
        Locations::new(x1, x2).unwrap()
    }

    fn kinds(v: &[MarketOutcome]) -> Vec<OutcomeKind> {
        v.iter().map(|o| o.kind()).collect()
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(0.0, 1.0).is_err());
        assert!(GameParams::new(1.0, 1.0).is_err());
        assert!(GameParams::new(0.5, 0.99).is_err());
        assert!(GameParams::new(f64::NAN, 1.0).is_err());
        assert!(GameParams::new(0.5, f64::INFINITY).is_err());
        assert!(GameParams::new(0.5, 1.0).is_ok());
    }

    #[test]
    fn unordered_locations_are_sorted_and_flagged() {
        let (l, swapped) = Locations::from_unordered(0.7, 0.2).unwrap();
        assert!(swapped);
        assert_eq!((l.x1(), l.x2()), (0.2, 0.7));
        assert!(Locations::new(0.7, 0.2).is_err());
        assert!(Locations::new(-0.1, 0.2).is_err());
    }

    #[test]
    fn utility_examples() {
        let theta = 3.0;
        let params = GameParams::new(0.5, theta).unwrap();
        let v = ConsumerPosition::new(1.0 / 6.0).unwrap();
        let u = consumer_utility(&params, v, 1.0 / 3.0, 1.0 / 6.0).unwrap();
        assert!((u - (theta - 1.0 / 12.0)).abs() < 1e-15);

        let v = ConsumerPosition::new(0.4).unwrap();
        assert_eq!(consumer_utility(&params, v, 0.4, 0.0).unwrap(), theta);

        let params = p(0.3);
        let v = ConsumerPosition::new(0.9).unwrap();
        let u = consumer_utility(&params, v, 0.2, 0.5).unwrap();
        assert!((u - 0.45).abs() < 1e-15);

        assert!(ConsumerPosition::new(1.5).is_err());
        assert!(consumer_utility(&params, v, 0.2, 1.5).is_err());
    }

    #[test]
    fn third_points_have_five_equilibria() {
        let out = enumerate_market_equilibria(&p(0.5), &loc(1.0 / 3.0, 2.0 / 3.0));
        let expected = [0.0, 1.0 / 6.0, 0.5, 5.0 / 6.0, 1.0];
        assert_eq!(out.len(), 5);
        for (o, e) in out.iter().zip(expected) {
            assert!((o.s1() - e).abs() < 1e-12, "{o:?} vs {e}");
        }
        assert_eq!(
            kinds(&out),
            vec![
                OutcomeKind::FirmTwoTakesAll,
                OutcomeKind::LeftIndifferent,
                OutcomeKind::Interior,
                OutcomeKind::RightIndifferent,
                OutcomeKind::FirmOneTakesAll
            ]
        );
    }

    #[test]
    fn far_apart_locations_give_unique_midpoint() {
        let out = enumerate_market_equilibria(&p(0.3), &loc(0.2, 0.8));
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].kind(), OutcomeKind::Unique);
        assert!((out[0].s1() - 0.5).abs() < 1e-15);
        assert_eq!(market_equilibrium_count(&p(0.1), &loc(0.1, 0.9)).count, 1);
    }

    #[test]
    fn three_equilibria_when_left_tail_fails() {
        let params = p(0.6);
        let l = loc(0.0, 0.5);
        let out = enumerate_market_equilibria(&params, &l);
        assert_eq!(
            kinds(&out),
            vec![
                OutcomeKind::FirmTwoTakesAll,
                OutcomeKind::RightIndifferent,
                OutcomeKind::FirmOneTakesAll
            ]
        );
        assert!((out[1].s1() - (0.5 + 0.5 / 1.2)).abs() < 1e-15);
        assert_eq!(market_equilibrium_count(&params, &l).count, 3);
    }

    #[test]
    fn definition_check_examples() {
        let params = p(0.5);
        let l = loc(1.0 / 3.0, 2.0 / 3.0);
        assert!(is_market_equilibrium(&params, &l, 1.0 / 6.0).unwrap());
        assert!(!is_market_equilibrium(&params, &l, 0.25).unwrap());
        assert!(is_market_equilibrium(&p(0.7), &loc(0.5, 0.5), 0.5).unwrap());
        assert!(is_market_equilibrium(&params, &l, 1.5).is_err());
    }

    #[test]
    fn coincident_locations() {
        // Left of 1/2 only the right tail survives; at 1/2 all three middle kinds
        // share s1 = 1/2.
        let out = enumerate_market_equilibria(&p(0.3), &loc(0.2, 0.2));
        assert_eq!(MarketOutcome::distinct_shares(&out), vec![0.0, 0.5, 1.0]);
        assert_eq!(out.len(), 3);
        let out = enumerate_market_equilibria(&p(0.3), &loc(0.5, 0.5));
        assert_eq!(out.len(), 5);
        assert_eq!(MarketOutcome::distinct_shares(&out), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn boundary_flags() {
        // x2 - x1 = a exactly: kind II sits on s1 = 0.
        let c = market_equilibrium_count(&p(0.5), &loc(0.25, 0.75));
        assert!(c.tight.gap);
        let c = market_equilibrium_count(&p(0.5), &loc(1.0 / 3.0, 2.0 / 3.0));
        assert!(!c.tight.any());
        // a = 1/2, x2 = 1/2 makes the kind II condition tight.
        let c = market_equilibrium_count(&p(0.5), &loc(0.3, 0.5));
        assert!(c.tight.left);
    }

    #[test]
    fn outcome_serializes_with_derived_s2() {
        let o = MarketOutcome::new(OutcomeKind::LeftIndifferent, 0.25);
        let json = serde_json::to_string(&o).unwrap();
        assert_eq!(json, r#"{"kind":"ii","s1":0.25,"s2":0.75}"#);
    }

    #[test]
    fn profile_constructor_rejects_non_equilibria() {
        let params = p(0.5);
        let l = loc(1.0 / 3.0, 2.0 / 3.0);
        let bad = MarketOutcome::new(OutcomeKind::Interior, 0.25);
        assert!(EquilibriumProfile::new(&params, l, bad).is_err());
        let ok = EquilibriumProfile::of_kind(&params, l, OutcomeKind::Interior).unwrap();
        assert!(EquilibriumProfile::new(&params, l, ok.outcome()).is_ok());
    }
}
