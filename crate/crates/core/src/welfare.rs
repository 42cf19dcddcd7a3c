//! Consumer surplus, the social optimum and the efficiency of equilibria.
//!
//! Firms' total payoff is always 1, so welfare is consumer surplus:
//! `W = theta + a s1^2 + a (1 - s1)^2 - ∫_0^s1 |t - x1| dt - ∫_s1^1 |t - x2| dt`.

use serde::Serialize;

use crate::behaviors::{neutral_nash, BehaviorKind};
use crate::error::{unit, Error, Result};
use crate::model::{
    enumerate_market_equilibria, EquilibriumProfile, GameParams, Locations, OutcomeKind,
};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct WelfareValue {
    pub w: f64,
}

/// `∫_lo^hi |t - x| dt` for `lo <= hi`, split at `t = x`.
fn abs_distance_integral(lo: f64, hi: f64, x: f64) -> f64 {
    if x <= lo {
        ((hi - x).powi(2) - (lo - x).powi(2)) / 2.0
    } else if x >= hi {
        ((x - lo).powi(2) - (x - hi).powi(2)) / 2.0
    } else {
        ((x - lo).powi(2) + (hi - x).powi(2)) / 2.0
    }
}

/// Consumer surplus when `[0, s1)` buys from `x1` and `[s1, 1]` from `x2`.
/// `s1` need not lie between the two locations.
pub fn consumer_welfare(params: &GameParams, x1: f64, x2: f64, s1: f64) -> Result<WelfareValue> {
    unit("x1", x1)?;
    unit("x2", x2)?;
    unit("s1", s1)?;
    let a = params.a();
    let s2 = 1.0 - s1;
    let w = params.theta() + a * s1 * s1 + a * s2 * s2
        - abs_distance_integral(0.0, s1, x1)
        - abs_distance_integral(s1, 1.0, x2);
    Ok(WelfareValue { w })
}

fn welfare_of(params: &GameParams, profile: &EquilibriumProfile) -> f64 {
    consumer_welfare(params, profile.x1(), profile.x2(), profile.s1())
        .expect("profiles hold unit-interval values")
        .w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimumRecord {
    pub x1: f64,
    pub x2: f64,
    pub s1: f64,
    pub w: f64,
}

/// Welfare-maximizing configurations, unconstrained by equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocialOptimum {
    pub w: f64,
    /// Canonical optimum first. When one firm serves everyone the idle firm's
    /// location is irrelevant; it is reported at the nearest end point.
    pub optima: Vec<OptimumRecord>,
}

impl SocialOptimum {
    pub fn canonical(&self) -> OptimumRecord {
        self.optima[0]
    }
}

/// Split market below `a = 1/4`, single central firm above, both at `1/4`.
pub fn social_optimum(params: &GameParams) -> SocialOptimum {
    let (a, theta) = (params.a(), params.theta());
    let split_w = theta - 0.125 + a / 2.0;
    let mono_w = theta - 0.25 + a;
    let split = OptimumRecord {
        x1: 0.25,
        x2: 0.75,
        s1: 0.5,
        w: split_w,
    };
    let mono = [
        OptimumRecord {
            x1: 0.0,
            x2: 0.5,
            s1: 0.0,
            w: mono_w,
        },
        OptimumRecord {
            x1: 0.5,
            x2: 1.0,
            s1: 1.0,
            w: mono_w,
        },
    ];
    if a < 0.25 {
        SocialOptimum {
            w: split_w,
            optima: vec![split],
        }
    } else if a > 0.25 {
        SocialOptimum {
            w: mono_w,
            optima: mono.to_vec(),
        }
    } else {
        let mut optima = vec![split];
        optima.extend(mono);
        SocialOptimum { w: split_w, optima }
    }
}

/// An equilibrium profile with its welfare.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeWelfare {
    pub profile: EquilibriumProfile,
    pub w: f64,
}

/// The interior cut at `loc`, which is labelled `Unique` if rounding puts the
/// gap a hair above `a`.
fn interior_profile(params: &GameParams, loc: Locations) -> EquilibriumProfile {
    let outcome = enumerate_market_equilibria(params, &loc)
        .into_iter()
        .find(|o| matches!(o.kind(), OutcomeKind::Interior | OutcomeKind::Unique))
        .expect("interior cut exists at the characterized equilibria");
    EquilibriumProfile::new(params, loc, outcome).expect("enumerated outcome")
}

/// Lowest-welfare pessimistic equilibrium: both firms at `(1 - a) / 2`.
pub fn worst_ne_pessimistic(params: &GameParams) -> NeWelfare {
    let a = params.a();
    let x = (1.0 - a) / 2.0;
    let loc = Locations::new(x, x).expect("(1-a)/2 lies in [0, 1/2]");
    let profile = EquilibriumProfile::of_kind(params, loc, OutcomeKind::RightIndifferent)
        .expect("coincident firms left of centre admit the right-tail cut");
    NeWelfare {
        profile,
        w: params.theta() - (1.0 - a).powi(2) / 4.0,
    }
}

/// Threshold `(2 - sqrt 2) / 2` between the first two branches of the
/// best pessimistic equilibrium.
pub fn best_ne_threshold() -> f64 {
    (2.0 - std::f64::consts::SQRT_2) / 2.0
}

/// Closed-form welfare of each branch of the best pessimistic equilibrium,
/// evaluated at the given `a` regardless of which branch is active.
pub fn best_ne_branch_welfares(params: &GameParams) -> [f64; 3] {
    let (a, theta) = (params.a(), params.theta());
    let poly = 1.0 - 6.0 * a + 12.0 * a.powi(2) - 12.0 * a.powi(3) + 4.0 * a.powi(4);
    [
        theta - (1.0 - 4.0 * a + 2.0 * a * a) / 4.0,
        theta - poly / (4.0 * (1.0 - a).powi(2)),
        theta - 0.25 + a,
    ]
}

/// Highest-welfare pessimistic equilibrium. The welfare is evaluated with
/// [`consumer_welfare`] at the profile.
pub fn best_ne_pessimistic(params: &GameParams) -> NeWelfare {
    let a = params.a();
    let profile = if a <= best_ne_threshold() {
        let loc = Locations::new((1.0 - a) / 2.0, (1.0 + a) / 2.0).expect("valid");
        interior_profile(params, loc)
    } else if a <= 0.5 {
        let loc = Locations::new(0.5 - a, 0.5).expect("valid");
        interior_profile(params, loc)
    } else {
        let loc = Locations::new(0.0, 0.5).expect("valid");
        EquilibriumProfile::of_kind(params, loc, OutcomeKind::FirmTwoTakesAll)
            .expect("gap 1/2 < a admits the zero cut")
    };
    NeWelfare {
        w: welfare_of(params, &profile),
        profile,
    }
}

/// Price of anarchy or stability: optimal welfare over an extremal
/// equilibrium's welfare.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub behavior: BehaviorKind,
    pub a: f64,
    pub theta: f64,
    pub value: f64,
    pub optimum: OptimumRecord,
    pub extremal_ne: NeWelfare,
}

fn neutral_ratio(params: &GameParams) -> Result<RatioReport> {
    let (a, theta) = (params.a(), params.theta());
    let profile = neutral_nash(params).ok_or(Error::NoEquilibrium)?;
    let ne_w = theta - (0.25 - a / 2.0);
    let value = if a <= 0.25 {
        (theta - (0.125 - a / 2.0)) / ne_w
    } else {
        (theta - (0.25 - a)) / ne_w
    };
    Ok(RatioReport {
        behavior: BehaviorKind::Neutral,
        a,
        theta,
        value,
        optimum: social_optimum(params).canonical(),
        extremal_ne: NeWelfare {
            w: welfare_of(params, &profile),
            profile,
        },
    })
}

/// Price of anarchy. Optimistic firms never reach an equilibrium, nor do
/// neutral firms when `a > 1/2`.
pub fn poa(params: &GameParams, behavior: BehaviorKind) -> Result<RatioReport> {
    let (a, theta) = (params.a(), params.theta());
    match behavior {
        BehaviorKind::Optimistic => Err(Error::NoEquilibrium),
        BehaviorKind::Neutral => neutral_ratio(params),
        BehaviorKind::Pessimistic => {
            let worst = theta - (1.0 - a).powi(2) / 4.0;
            let value = if a <= 0.25 {
                (theta - (0.125 - a / 2.0)) / worst
            } else {
                (theta - (0.25 - a)) / worst
            };
            Ok(RatioReport {
                behavior,
                a,
                theta,
                value,
                optimum: social_optimum(params).canonical(),
                extremal_ne: worst_ne_pessimistic(params),
            })
        }
    }
}

/// Price of stability. Neutral firms have a unique equilibrium, so it equals
/// the price of anarchy.
pub fn pos(params: &GameParams, behavior: BehaviorKind) -> Result<RatioReport> {
    let (a, theta) = (params.a(), params.theta());
    match behavior {
        BehaviorKind::Optimistic => Err(Error::NoEquilibrium),
        BehaviorKind::Neutral => neutral_ratio(params),
        BehaviorKind::Pessimistic => {
            let q = 1.0 - 4.0 * a + 2.0 * a * a;
            let value = if a <= 0.25 {
                (theta - (0.125 - a / 2.0)) / (theta - q / 4.0)
            } else if a <= best_ne_threshold() {
                (theta - (0.25 - a)) / (theta - q / 4.0)
            } else if a <= 0.5 {
                let r = 1.0 - 2.0 * a + 2.0 * a * a;
                (theta - (0.25 - a)) / (theta - q * r / (4.0 * (1.0 - a).powi(2)))
            } else {
                1.0
            };
            Ok(RatioReport {
                behavior,
                a,
                theta,
                value,
                optimum: social_optimum(params).canonical(),
                extremal_ne: best_ne_pessimistic(params),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoaMinimizer {
    pub theta: f64,
    pub a_star: f64,
    pub poa: f64,
    /// Finite differences at step `1e-4` on both sides are non-negative.
    pub local_minimum: bool,
}

/// Minimizer of the pessimistic price of anarchy in `a`:
/// `a* = (1 - 8 theta + sqrt(64 theta^2 - 16 theta + 9)) / 4`.
pub fn poa_minimizer_pessimistic(theta: f64) -> Result<PoaMinimizer> {
    if !(theta.is_finite() && theta >= 1.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let a_star = (1.0 - 8.0 * theta + (64.0 * theta * theta - 16.0 * theta + 9.0).sqrt()) / 4.0;
    let at = |a: f64| -> Result<f64> {
        Ok(poa(&GameParams::new(a, theta)?, BehaviorKind::Pessimistic)?.value)
    };
    let h = 1e-4;
    let centre = at(a_star)?;
    let local_minimum = at(a_star - h)? >= centre && at(a_star + h)? >= centre;
    Ok(PoaMinimizer {
        theta,
        a_star,
        poa: centre,
        local_minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behaviors::is_nash;
    use crate::model::is_market_equilibrium;

    fn pt(a: f64, theta: f64) -> GameParams {
        GameParams::new(a, theta).unwrap()
    }

    #[test]
    fn distance_integral_cases() {
        assert!((abs_distance_integral(0.0, 0.5, 0.3) - 0.065).abs() < 1e-15);
        assert!((abs_distance_integral(0.5, 1.0, 0.3) - 0.225).abs() < 1e-15);
        assert!((abs_distance_integral(0.5, 1.0, 0.8) - (0.045 + 0.02)).abs() < 1e-15);
        assert_eq!(abs_distance_integral(0.4, 0.4, 0.1), 0.0);
    }

    #[test]
    fn welfare_examples() {
        for (a, theta) in [(0.1, 1.0), (0.3, 2.5)] {
            let w = consumer_welfare(&pt(a, theta), 0.25, 0.75, 0.5).unwrap().w;
            assert!((w - (theta - 0.125 + a / 2.0)).abs() < 1e-14);
            for x1 in [0.0, 0.4, 1.0] {
                let w = consumer_welfare(&pt(a, theta), x1, 0.5, 0.0).unwrap().w;
                assert!((w - (theta - 0.25 + a)).abs() < 1e-14);
            }
        }
        let w = consumer_welfare(&pt(0.4, 1.0), 0.3, 0.3, 0.5).unwrap().w;
        assert!((w - 0.91).abs() < 1e-14, "{w}");
        assert!(consumer_welfare(&pt(0.4, 1.0), 0.3, 1.2, 0.5).is_err());
    }

    #[test]
    fn welfare_bounds() {
        let params = pt(0.6, 1.3);
        for x1 in [0.0, 0.3, 1.0] {
            for x2 in [0.0, 0.5, 1.0] {
                for s in [0.0, 0.2, 0.9, 1.0] {
                    let w = consumer_welfare(&params, x1, x2, s).unwrap().w;
                    assert!(w <= 1.3 + 0.6 + 1e-15);
                    assert!(w >= 1.3 + 0.6 * (s * s + (1.0 - s) * (1.0 - s)) - 1.0 - 1e-15);
                }
            }
        }
    }

    #[test]
    fn social_optimum_examples() {
        let o = social_optimum(&pt(0.1, 1.0));
        assert!((o.w - 0.925).abs() < 1e-15);
        assert_eq!(o.optima.len(), 1);

        let o = social_optimum(&pt(0.25, 1.0));
        assert_eq!(o.optima.len(), 3);
        assert!((o.w - 1.0).abs() < 1e-15);
        assert!(o.optima.iter().all(|r| (r.w - 1.0).abs() < 1e-15));

        let o = social_optimum(&pt(0.5, 2.0));
        assert!((o.w - 2.25).abs() < 1e-15);
        assert_eq!((o.canonical().x2, o.canonical().s1), (0.5, 0.0));

        for a in [0.1, 0.25, 0.6] {
            let params = pt(a, 1.7);
            let o = social_optimum(&params);
            for r in &o.optima {
                let w = consumer_welfare(&params, r.x1, r.x2, r.s1).unwrap().w;
                assert!((w - o.w).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn worst_equilibrium_examples() {
        let params = pt(0.5, 1.0);
        let worst = worst_ne_pessimistic(&params);
        assert_eq!(
            (worst.profile.x1(), worst.profile.x2(), worst.profile.s1()),
            (0.25, 0.25, 0.5)
        );
        assert!((worst.w - 0.9375).abs() < 1e-15);
        assert!((worst_ne_pessimistic(&pt(0.9, 1.0)).w - 0.9975).abs() < 1e-14);
        for a in [0.05, 0.3, 0.5, 0.9] {
            let params = pt(a, 1.2);
            let worst = worst_ne_pessimistic(&params);
            assert!((worst.w - welfare_of(&params, &worst.profile)).abs() < 1e-14);
            assert!(is_nash(&params, BehaviorKind::Pessimistic, &worst.profile).unwrap());
        }
    }

    #[test]
    fn best_equilibrium_examples() {
        let best = best_ne_pessimistic(&pt(0.6, 1.0));
        assert_eq!(
            (best.profile.x1(), best.profile.x2(), best.profile.s1()),
            (0.0, 0.5, 0.0)
        );
        assert!((best.w - 1.35).abs() < 1e-14);

        let best = best_ne_pessimistic(&pt(0.2, 1.0));
        assert!((best.profile.x1() - 0.4).abs() < 1e-15);
        assert!((best.profile.x2() - 0.6).abs() < 1e-15);
        assert!((best.w - 0.93).abs() < 1e-14);

        for a in [0.05, 0.2, 0.3, 0.45, 0.5, 0.7] {
            let params = pt(a, 1.0);
            let best = best_ne_pessimistic(&params);
            let p = &best.profile;
            assert!(is_market_equilibrium(&params, &p.locations(), p.s1()).unwrap());
            assert!(
                is_nash(&params, BehaviorKind::Pessimistic, p).unwrap(),
                "a = {a}"
            );
        }
    }

    #[test]
    fn best_equilibrium_branches_are_continuous() {
        let t = best_ne_threshold();
        let [b1, b2, _] = best_ne_branch_welfares(&pt(t, 1.0));
        assert!((b1 - b2).abs() < 1e-9);
        let [_, b2, b3] = best_ne_branch_welfares(&pt(0.5, 1.0));
        assert!((b2 - b3).abs() < 1e-9);
    }

    #[test]
    fn ratio_examples() {
        let r = poa(&pt(0.25, 1.0), BehaviorKind::Neutral).unwrap();
        assert!((r.value - 8.0 / 7.0).abs() < 1e-12);

        let r = pos(&pt(0.7, 1.0), BehaviorKind::Pessimistic).unwrap();
        assert_eq!(r.value, 1.0);

        let r = pos(&pt(0.25, 1.0), BehaviorKind::Pessimistic).unwrap();
        assert!((r.value - 1.0 / 0.96875).abs() < 1e-12);

        let neutral_poa = poa(&pt(0.3, 1.0), BehaviorKind::Neutral).unwrap().value;
        let neutral_pos = pos(&pt(0.3, 1.0), BehaviorKind::Neutral).unwrap().value;
        assert_eq!(neutral_poa, neutral_pos);

        assert_eq!(
            poa(&pt(0.3, 1.0), BehaviorKind::Optimistic).unwrap_err(),
            Error::NoEquilibrium
        );
        assert_eq!(
            pos(&pt(0.6, 1.0), BehaviorKind::Neutral).unwrap_err(),
            Error::NoEquilibrium
        );
    }

    #[test]
    fn large_theta_drives_ratios_to_one() {
        for behavior in [BehaviorKind::Neutral, BehaviorKind::Pessimistic] {
            let r = poa(&pt(0.25, 1e9), behavior).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ratio_matches_its_records() {
        for a in [0.05, 0.2, 0.25, 0.3, 0.45, 0.5, 0.8] {
            let params = pt(a, 1.4);
            let mut reports = vec![
                poa(&params, BehaviorKind::Pessimistic).unwrap(),
                pos(&params, BehaviorKind::Pessimistic).unwrap(),
            ];
            if a <= 0.5 {
                reports.push(poa(&params, BehaviorKind::Neutral).unwrap());
            }
            for r in reports {
                let ratio = r.optimum.w / r.extremal_ne.w;
                assert!((r.value - ratio).abs() < 1e-12, "a = {a}: {r:?}");
                assert!(r.value >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn poa_minimizer_examples() {
        let m = poa_minimizer_pessimistic(1.0).unwrap();
        assert!((m.a_star - (57f64.sqrt() - 7.0) / 4.0).abs() < 1e-15);
        assert!((m.a_star - 0.137).abs() < 1e-3);
        assert!((m.poa - 1.159).abs() < 1e-3);
        assert!(m.local_minimum);

        let m = poa_minimizer_pessimistic(10.0).unwrap();
        assert!((m.a_star - (6249f64.sqrt() - 79.0) / 4.0).abs() < 1e-15);
        assert!((m.a_star - 0.01265).abs() < 1e-5);
        assert!(m.local_minimum);

        assert!(poa_minimizer_pessimistic(0.5).is_err());
    }
}
