//! Closed-form descriptions of the Nash equilibria.

use serde::Serialize;

use crate::error::{unit, Error, Result};
use crate::model::{EquilibriumProfile, GameParams, Locations, MarketOutcome, OutcomeKind};
use crate::SHARE_TOL;

/// Admissible range of `s1` for a pessimistic equilibrium at fixed locations.
/// Raw bounds are kept; they may fall outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashInterval {
    pub lo: f64,
    pub hi: f64,
}

impl NashInterval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, s1: f64) -> bool {
        self.lo - SHARE_TOL <= s1 && s1 <= self.hi + SHARE_TOL
    }

    /// Bounds intersected with `[0, 1]`.
    pub fn clamped(&self) -> (f64, f64) {
        (self.lo.max(0.0), self.hi.min(1.0))
    }
}

/// `s1` must cover firm 1's best pessimistic deviation against `x2` and leave
/// firm 2 at least its best deviation against `x1`.
pub fn pessimistic_nash_interval(params: &GameParams, loc: &Locations) -> NashInterval {
    let a = params.a();
    let (x1, x2) = (loc.x1(), loc.x2());
    let w = 1.0 - a;
    if x2 <= 0.5 {
        NashInterval {
            lo: (1.0 - x2 - a) / w,
            hi: x1 / w,
        }
    } else if x1 <= 0.5 {
        NashInterval {
            lo: (x2 - a) / w,
            hi: x1 / w,
        }
    } else {
        NashInterval {
            lo: (x2 - a) / w,
            hi: (1.0 - x1) / w,
        }
    }
}

/// The unique neutral equilibrium: both firms at the centre splitting the
/// market, which exists exactly when `a <= 1/2`.
pub fn neutral_nash(params: &GameParams) -> Option<EquilibriumProfile> {
    (params.a() <= 0.5).then(|| {
        EquilibriumProfile::trusted(
            Locations::new(0.5, 0.5).expect("centre is a valid location"),
            MarketOutcome::new(OutcomeKind::Interior, 0.5),
        )
    })
}

/// Thresholds `(1-a)/2 <= (1-a^2)/2 <= 1-a` bounding the three regions of
/// symmetric pessimistic equilibria `(x1, 1 - x1)`.
fn symmetric_thresholds(a: f64) -> [f64; 3] {
    [(1.0 - a) / 2.0, (1.0 - a * a) / 2.0, 1.0 - a]
}

/// Highest region (1, 2 or 3) of symmetric pessimistic equilibria containing
/// `x1`, or `None` when `(x1, 1 - x1)` supports no equilibrium.
pub fn symmetric_region(params: &GameParams, x1: f64) -> Result<Option<u8>> {
    check_left_half(x1)?;
    let [r1, r2, r3] = symmetric_thresholds(params.a());
    Ok(if x1 >= r3 {
        Some(3)
    } else if x1 >= r2 {
        Some(2)
    } else if x1 >= r1 {
        Some(1)
    } else {
        None
    })
}

fn check_left_half(x1: f64) -> Result<()> {
    unit("x1", x1)?;
    if x1 > 0.5 {
        return Err(Error::NotLeftHalf(x1));
    }
    Ok(())
}

/// Shares `s1` for which `(x1, 1 - x1, s1, 1 - s1)` is a pessimistic
/// equilibrium, sorted and merged within [`SHARE_TOL`].
pub fn symmetric_pessimistic_nash_set(params: &GameParams, x1: f64) -> Result<Vec<f64>> {
    check_left_half(x1)?;
    let a = params.a();
    let [r1, r2, r3] = symmetric_thresholds(a);
    let tail = (1.0 - 2.0 * x1) / (2.0 * a);
    let mut shares = Vec::new();
    if r1 <= x1 && x1 <= r2 {
        shares.push(0.5);
    }
    if r2 <= x1 && x1 <= r3.min(0.5) {
        shares.extend([0.5, 0.5 - tail, 0.5 + tail]);
    }
    if r3 <= x1 {
        shares.extend([0.5, 0.5 - tail, 0.5 + tail, 0.0, 1.0]);
    }
    shares.sort_by(f64::total_cmp);
    shares.dedup_by(|b, a| (*b - *a).abs() <= SHARE_TOL);
    Ok(shares)
}

/// Kinds of market equilibrium that make `(x1, x2)` a pessimistic equilibrium
/// when `a = 1/2`. Boundaries are inclusive within [`SHARE_TOL`].
///
/// The interior kind is reported as [`OutcomeKind::Interior`] even on the
/// boundary `x2 - x1 = 1/2` where it is the unique equilibrium.
pub fn nash_region_a_half(x1: f64, x2: f64) -> Result<Vec<OutcomeKind>> {
    let loc = Locations::new(x1, x2)?;
    let (x1, x2) = (loc.x1(), loc.x2());
    let le = |u: f64, v: f64| u <= v + SHARE_TOL;
    let between = |lo: f64, x: f64, hi: f64| le(lo, x) && le(x, hi);
    let eq = |u: f64, v: f64| (u - v).abs() <= SHARE_TOL;

    let mut kinds = Vec::new();
    if between(0.0, x1, 0.5) && eq(x2, 0.5) {
        kinds.push(OutcomeKind::FirmTwoTakesAll);
    }
    let ii_cap = (3.0 + 2.0 * x1) / 6.0;
    if (between(0.0, x1, 0.5) && between(0.5, x2, ii_cap))
        || (between(0.5, x1, 0.75) && between(x1, x2, ii_cap))
    {
        kinds.push(OutcomeKind::LeftIndifferent);
    }
    if between(0.0, x1, 0.5) && between(0.5, x2, (1.0 + 2.0 * x1) / 2.0) {
        kinds.push(OutcomeKind::Interior);
    }
    if between(0.25, x1, 0.5) && between(x1, x2, (-1.0 + 6.0 * x1) / 2.0) {
        kinds.push(OutcomeKind::RightIndifferent);
    }
    if eq(x1, 0.5) && between(0.5, x2, 1.0) {
        kinds.push(OutcomeKind::FirmOneTakesAll);
    }
    Ok(kinds)
}

/// Location gap at most `a` and share gap at most `a / (1 - a)`.
pub fn nash_diameter_bounds_check(params: &GameParams, profile: &EquilibriumProfile) -> bool {
    let a = params.a();
    (profile.x2() - profile.x1()).abs() <= a + SHARE_TOL
        && (profile.s1() - profile.s2()).abs() <= a / (1.0 - a) + SHARE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64) -> GameParams {
        GameParams::with_unit_theta(a).unwrap()
    }

    fn close(u: f64, v: f64) -> bool {
        (u - v).abs() < 1e-12
    }

    #[test]
    fn interval_cases() {
        let i = pessimistic_nash_interval(&p(0.3), &Locations::new(0.4, 0.6).unwrap());
        assert!(close(i.lo, 0.3 / 0.7) && close(i.hi, 0.4 / 0.7));

        let i = pessimistic_nash_interval(&p(0.3), &Locations::new(0.5, 0.5).unwrap());
        assert!(close(i.lo, 0.2 / 0.7) && close(i.hi, 0.5 / 0.7));

        let i = pessimistic_nash_interval(&p(0.5), &Locations::new(0.5, 1.0).unwrap());
        assert_eq!((i.lo, i.hi), (1.0, 1.0));
        assert!(i.contains(1.0) && !i.contains(0.99));

        // Both-left case keeps raw bounds outside [0, 1].
        let i = pessimistic_nash_interval(&p(0.8), &Locations::new(0.1, 0.3).unwrap());
        assert!(i.lo < 0.0);
        assert_eq!(i.clamped().0, 0.0);
        let i = pessimistic_nash_interval(&p(0.3), &Locations::new(0.1, 0.2).unwrap());
        assert!(i.is_empty());
    }

    #[test]
    fn neutral_equilibrium_existence() {
        let prof = neutral_nash(&p(0.25)).unwrap();
        assert_eq!((prof.x1(), prof.x2(), prof.s1()), (0.5, 0.5, 0.5));
        assert!(neutral_nash(&p(0.5)).is_some());
        assert!(neutral_nash(&p(0.75)).is_none());
    }

    #[test]
    fn symmetric_set_examples() {
        assert_eq!(
            symmetric_pessimistic_nash_set(&p(0.5), 0.3).unwrap(),
            vec![0.5]
        );
        assert_eq!(
            symmetric_pessimistic_nash_set(&p(0.5), 0.5).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            symmetric_pessimistic_nash_set(&p(0.2), 0.45).unwrap(),
            vec![0.5]
        );
        assert!(symmetric_pessimistic_nash_set(&p(0.2), 0.3)
            .unwrap()
            .is_empty());
        assert!(symmetric_pessimistic_nash_set(&p(0.2), 0.6).is_err());

        // Region 2 at a = 0.5: x1 in [0.375, 0.5].
        let s = symmetric_pessimistic_nash_set(&p(0.5), 0.4).unwrap();
        assert_eq!(s.len(), 3);
        assert!(close(s[0], 0.3) && close(s[1], 0.5) && close(s[2], 0.7));
        assert_eq!(symmetric_region(&p(0.5), 0.4).unwrap(), Some(2));
        assert_eq!(symmetric_region(&p(0.5), 0.2).unwrap(), None);
    }

    #[test]
    fn a_half_region_examples() {
        use OutcomeKind::*;
        assert_eq!(
            nash_region_a_half(0.3, 0.5).unwrap(),
            vec![FirmTwoTakesAll, LeftIndifferent, Interior]
        );
        assert_eq!(
            nash_region_a_half(0.5, 0.9).unwrap(),
            vec![Interior, RightIndifferent, FirmOneTakesAll]
        );
        assert!(nash_region_a_half(0.1, 0.9).unwrap().is_empty());
        assert!(nash_region_a_half(0.6, 0.2).is_err());
    }

    #[test]
    fn bounds_predicate() {
        let params = p(0.3);
        let loc = Locations::new(0.4, 0.6).unwrap();
        let prof = EquilibriumProfile::of_kind(&params, loc, OutcomeKind::Interior).unwrap();
        assert!(nash_diameter_bounds_check(&params, &prof));

        let params = p(0.5);
        let loc = Locations::new(0.5, 0.5).unwrap();
        let prof = EquilibriumProfile::of_kind(&params, loc, OutcomeKind::FirmOneTakesAll).unwrap();
        assert!(nash_diameter_bounds_check(&params, &prof));

        let params = p(0.2);
        let loc = Locations::new(0.5, 0.5).unwrap();
        let prof = EquilibriumProfile::of_kind(&params, loc, OutcomeKind::FirmOneTakesAll).unwrap();
        assert!(!nash_diameter_bounds_check(&params, &prof));
    }
}
