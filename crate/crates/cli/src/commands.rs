//! One function per subcommand, each returning the rows it prints.

use std::path::Path;

use hotpop_core::oracle::suites;
use hotpop_core::{
    consumer_welfare, enumerate_market_equilibria, market_equilibrium_count, nash_check,
    oracle_scan, oracle_social_optimum, poa, pos, social_optimum, symmetric_pessimistic_nash_set,
    symmetric_region, BehaviorKind, DeviationSearch, EquilibriumProfile, Error, GameParams,
    GridSpec, Locations, RatioReport,
};

use crate::output::{write_atomic, Cell, Format, Table};
use crate::CliError;

/// Distance within which `--s1` is snapped to an enumerated equilibrium.
const SNAP: f64 = 1e-6;

/// Interior points `i / 200` of the unit interval, the a-grid for curves.
pub fn a_grid() -> Vec<f64> {
    (1..200).map(|i| i as f64 / 200.0).collect()
}

fn locations(x1: f64, x2: f64) -> Result<Locations, CliError> {
    Ok(Locations::new(x1, x2)?)
}

pub fn market_eq(params: &GameParams, x1: f64, x2: f64) -> Result<Table, CliError> {
    let loc = locations(x1, x2)?;
    let boundary = market_equilibrium_count(params, &loc).tight.any();
    let mut t = Table::new(
        "market-eq",
        &["a", "theta", "x1", "x2", "kind", "s1", "s2", "boundary"],
    );
    for o in enumerate_market_equilibria(params, &loc) {
        t.push(vec![
            params.a().into(),
            params.theta().into(),
            x1.into(),
            x2.into(),
            o.kind().as_str().into(),
            o.s1().into(),
            o.s2().into(),
            boundary.into(),
        ]);
    }
    Ok(t)
}

pub fn nash_check_cmd(
    params: &GameParams,
    behavior: BehaviorKind,
    x1: f64,
    x2: f64,
    s1: f64,
) -> Result<Table, CliError> {
    let loc = locations(x1, x2)?;
    let outcome = enumerate_market_equilibria(params, &loc)
        .into_iter()
        .find(|o| (o.s1() - s1).abs() <= SNAP)
        .ok_or(Error::NotMarketEquilibrium { x1, x2, s1 })?;
    let profile = EquilibriumProfile::new(params, loc, outcome)?;
    let check = nash_check(params, behavior, &profile, &DeviationSearch::default())?;
    let binding = check.binding(&profile);
    let mut t = Table::new(
        "nash-check",
        &[
            "a",
            "theta",
            "behavior",
            "x1",
            "x2",
            "kind",
            "s1",
            "s2",
            "is_nash",
            "binding_firm",
            "binding_location",
            "binding_payoff",
            "binding_limit",
            "firm1_location",
            "firm1_payoff",
            "firm2_location",
            "firm2_payoff",
        ],
    );
    t.push(vec![
        params.a().into(),
        params.theta().into(),
        behavior.as_str().into(),
        x1.into(),
        x2.into(),
        profile.kind().as_str().into(),
        profile.s1().into(),
        profile.s2().into(),
        check.is_nash.into(),
        Cell::Int(binding.deviator.index().into()),
        binding.location.into(),
        binding.payoff.into(),
        binding.limit.into(),
        check.firm1.location.into(),
        check.firm1.payoff.into(),
        check.firm2.location.into(),
        check.firm2.payoff.into(),
    ]);
    Ok(t)
}

pub fn nash_region(
    params: &GameParams,
    behavior: BehaviorKind,
    n_locations: usize,
) -> Result<Table, CliError> {
    let grid = GridSpec::new(2, n_locations, 2)?;
    let rows = oracle_scan(params, behavior, &grid, &DeviationSearch::default());
    let mut t = Table::new(
        "nash-region",
        &[
            "a", "theta", "behavior", "x1", "x2", "kind", "s1", "s2", "is_ne", "w",
        ],
    );
    for r in rows {
        let p = r.profile;
        t.push(vec![
            r.a.into(),
            params.theta().into(),
            behavior.as_str().into(),
            p.x1().into(),
            p.x2().into(),
            p.kind().as_str().into(),
            p.s1().into(),
            p.s2().into(),
            r.is_ne.into(),
            r.w.into(),
        ]);
    }
    Ok(t)
}

/// Symmetric pessimistic equilibria `(x1, 1 - x1)` for each `a`, one row per
/// equilibrium share; pairs without equilibria get a row with empty region.
pub fn symmetric_region_cmd(a_values: &[f64], n_locations: usize) -> Result<Table, CliError> {
    GridSpec::new(2, n_locations, 2)?;
    let mut t = Table::new("symmetric-region", &["a", "x1", "x2", "region", "s1"]);
    let last = (n_locations - 1) as f64;
    for &a in a_values {
        let params = GameParams::with_unit_theta(a)?;
        for i in 0..n_locations {
            let x1 = 0.5 * i as f64 / last;
            let region = symmetric_region(&params, x1)?;
            let shares = symmetric_pessimistic_nash_set(&params, x1)?;
            let base = |s1: Cell| {
                vec![
                    a.into(),
                    x1.into(),
                    (1.0 - x1).into(),
                    region.map(u64::from).into(),
                    s1,
                ]
            };
            if shares.is_empty() {
                t.push(base(Cell::Empty));
            }
            for s in shares {
                t.push(base(s.into()));
            }
        }
    }
    Ok(t)
}

pub fn welfare(params: &GameParams, x1: f64, x2: f64, s1: f64) -> Result<Table, CliError> {
    let w = consumer_welfare(params, x1, x2, s1)?.w;
    let mut t = Table::new("welfare", &["a", "theta", "x1", "x2", "s1", "w"]);
    t.push(vec![
        params.a().into(),
        params.theta().into(),
        x1.into(),
        x2.into(),
        s1.into(),
        w.into(),
    ]);
    Ok(t)
}

pub fn social_opt(params: &GameParams, oracle: Option<&GridSpec>) -> Result<Table, CliError> {
    let mut t = Table::new(
        "social-opt",
        &["a", "theta", "source", "x1", "x2", "s1", "w"],
    );
    let row = |source: &str, x1: f64, x2: f64, s1: f64, w: f64| -> Vec<Cell> {
        vec![
            params.a().into(),
            params.theta().into(),
            source.into(),
            x1.into(),
            x2.into(),
            s1.into(),
            w.into(),
        ]
    };
    for o in social_optimum(params).optima {
        t.push(row("closed_form", o.x1, o.x2, o.s1, o.w));
    }
    if let Some(grid) = oracle {
        let o = oracle_social_optimum(params, grid);
        t.push(row("oracle", o.x1, o.x2, o.s1, o.w));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Poa,
    Pos,
}

impl Measure {
    fn as_str(self) -> &'static str {
        match self {
            Measure::Poa => "poa",
            Measure::Pos => "pos",
        }
    }

    fn compute(
        self,
        params: &GameParams,
        behavior: BehaviorKind,
    ) -> hotpop_core::Result<RatioReport> {
        match self {
            Measure::Poa => poa(params, behavior),
            Measure::Pos => pos(params, behavior),
        }
    }
}

const CURVE_COLUMNS: [&str; 14] = [
    "a", "theta", "behavior", "measure", "value", "opt_x1", "opt_x2", "opt_s1", "opt_w", "ne_x1",
    "ne_x2", "ne_s1", "ne_kind", "ne_w",
];

/// Ratio rows over `a_values`. On the default grid, values of `a` without an
/// equilibrium are skipped; a single requested `a` without one is an error.
pub fn curve(
    measures: &[Measure],
    behavior: BehaviorKind,
    theta: f64,
    a_values: &[f64],
    skip_missing: bool,
) -> Result<Table, CliError> {
    if behavior == BehaviorKind::Optimistic {
        return Err(CliError::NoEquilibrium);
    }
    let command = match measures {
        [Measure::Poa] => "poa-curve",
        [Measure::Pos] => "pos-curve",
        _ => "ratio-curves",
    };
    let mut t = Table::new(command, &CURVE_COLUMNS);
    for &a in a_values {
        let params = GameParams::new(a, theta)?;
        for &m in measures {
            let r = match m.compute(&params, behavior) {
                Ok(r) => r,
                Err(Error::NoEquilibrium) if skip_missing => continue,
                Err(e) => return Err(e.into()),
            };
            let ne = r.extremal_ne.profile;
            t.push(vec![
                a.into(),
                theta.into(),
                behavior.as_str().into(),
                m.as_str().into(),
                r.value.into(),
                r.optimum.x1.into(),
                r.optimum.x2.into(),
                r.optimum.s1.into(),
                r.optimum.w.into(),
                ne.x1().into(),
                ne.x2().into(),
                ne.s1().into(),
                ne.kind().as_str().into(),
                r.extremal_ne.w.into(),
            ]);
        }
    }
    Ok(t)
}

/// Plot data at the given `theta`, written as CSV files into `dir`.
pub fn figures(dir: &Path, theta: f64, n_locations: usize) -> Result<Table, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| anyhow::anyhow!("creating {}: {e}", dir.display()))?;
    let grid = a_grid();
    let half = GameParams::new(0.5, theta)?;
    let outputs = [
        (
            "fig1_symmetric.csv",
            symmetric_region_cmd(&grid, n_locations)?,
        ),
        (
            "fig2_a_half.csv",
            nash_region(&half, BehaviorKind::Pessimistic, n_locations)?,
        ),
        (
            "fig3_poa_neutral.csv",
            curve(
                &[Measure::Poa, Measure::Pos],
                BehaviorKind::Neutral,
                theta,
                &grid,
                true,
            )?,
        ),
        (
            "fig4_poa_pessimistic.csv",
            curve(
                &[Measure::Poa],
                BehaviorKind::Pessimistic,
                theta,
                &grid,
                true,
            )?,
        ),
        (
            "fig5_pos_pessimistic.csv",
            curve(
                &[Measure::Pos],
                BehaviorKind::Pessimistic,
                theta,
                &grid,
                true,
            )?,
        ),
    ];
    let mut t = Table::new("figures", &["file", "command", "rows"]);
    for (name, table) in outputs {
        let path = dir.join(name);
        write_atomic(&path, &table.render(Format::Csv)?)?;
        t.push(vec![
            path.display().to_string().into(),
            table.command.into(),
            table.len().into(),
        ]);
    }
    Ok(t)
}

/// Oracle suites, with a description of each disagreeing suite.
pub fn verify(seed: u64, instances: usize, grid: &GridSpec) -> (Table, Vec<String>) {
    let reports = suites::run_all(seed, instances, grid);
    let mut t = Table::new(
        "verify",
        &[
            "suite",
            "seed",
            "instances",
            "skipped",
            "disagreements",
            "max_error",
            "tolerance",
            "passed",
        ],
    );
    let finite = |x: f64| -> Cell {
        if x.is_finite() {
            x.into()
        } else {
            "inf".into()
        }
    };
    for r in &reports {
        t.push(vec![
            r.name.into(),
            r.seed.into(),
            r.instances.into(),
            r.skipped.into(),
            r.disagreements.into(),
            finite(r.max_error),
            finite(r.tolerance),
            r.passed().into(),
        ]);
    }
    let failures = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{}: {} disagreements, first: {}",
                r.name,
                r.disagreements,
                r.first_failure.as_deref().unwrap_or("-")
            )
        })
        .collect();
    (t, failures)
}
