//! `hotpop`: equilibria, welfare and efficiency ratios of the location game
//! with popularity externalities, from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hotpop_core::{BehaviorKind, GameParams, GridSpec};

use commands::Measure;
use output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "hotpop", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the market equilibria at fixed locations.
    MarketEq {
        #[command(flatten)]
        game: Game,
        #[command(flatten)]
        loc: Loc,
        #[command(flatten)]
        out: Output,
    },
    /// Test a profile for Nash equilibrium and report the binding deviation.
    NashCheck {
        #[command(flatten)]
        game: Game,
        #[command(flatten)]
        loc: Loc,
        /// Firm 1's share; snapped to an enumerated equilibrium within 1e-6.
        #[arg(long)]
        s1: f64,
        #[arg(long, value_enum)]
        behavior: Behavior,
        #[command(flatten)]
        out: Output,
    },
    /// Scan all grid location pairs and their market equilibria for Nash.
    NashRegion {
        #[command(flatten)]
        game: Game,
        #[arg(long, value_enum, default_value = "pessimistic")]
        behavior: Behavior,
        #[arg(long, default_value_t = 201)]
        grid_locations: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Symmetric pessimistic equilibria (x1, 1 - x1); all a on the curve grid
    /// unless --a is given.
    SymmetricRegion {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 201)]
        grid_locations: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Consumer welfare of a configuration.
    Welfare {
        #[command(flatten)]
        game: Game,
        #[arg(long)]
        x1: f64,
        #[arg(long)]
        x2: f64,
        #[arg(long)]
        s1: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Welfare-maximizing configurations.
    SocialOpt {
        #[command(flatten)]
        game: Game,
        /// Also report the grid-search optimum.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        out: Output,
    },
    /// Price of anarchy over the a-grid 0.005..0.995 (or at --a).
    PoaCurve(CurveArgs),
    /// Price of stability over the a-grid 0.005..0.995 (or at --a).
    PosCurve(CurveArgs),
    /// Write every plot data set as CSV files into --out.
    Figures {
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 201)]
        grid_locations: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the oracle cross-check suites; exits 1 on any disagreement.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instances per suite (the social optimum suite runs a tenth).
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
struct Game {
    /// Externality magnitude in (0, 1).
    #[arg(long)]
    a: f64,
    /// Intrinsic utility, at least 1.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
}

impl Game {
    fn params(&self) -> Result<GameParams, CliError> {
        Ok(GameParams::new(self.a, self.theta)?)
    }
}

#[derive(Debug, Args)]
struct Loc {
    #[arg(long)]
    x1: f64,
    #[arg(long)]
    x2: f64,
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long)]
    grid_consumers: Option<usize>,
    #[arg(long)]
    grid_locations: Option<usize>,
    #[arg(long)]
    grid_shares: Option<usize>,
}

impl Grid {
    fn spec(&self) -> Result<GridSpec, CliError> {
        let d = GridSpec::default();
        Ok(GridSpec::new(
            self.grid_consumers.unwrap_or(d.n_consumers),
            self.grid_locations.unwrap_or(d.n_locations),
            self.grid_shares.unwrap_or(d.n_shares),
        )?)
    }
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, value_enum)]
    behavior: Behavior,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// A single value of a instead of the grid.
    #[arg(long)]
    a: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Behavior {
    Pessimistic,
    Neutral,
    Optimistic,
}

impl From<Behavior> for BehaviorKind {
    fn from(b: Behavior) -> Self {
        match b {
            Behavior::Pessimistic => BehaviorKind::Pessimistic,
            Behavior::Neutral => BehaviorKind::Neutral,
            Behavior::Optimistic => BehaviorKind::Optimistic,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid flag values; exit code 2 like parse errors.
    Usage(String),
    NoEquilibrium,
    Failed(anyhow::Error),
}

impl From<hotpop_core::Error> for CliError {
    fn from(e: hotpop_core::Error) -> Self {
        match e {
            hotpop_core::Error::NoEquilibrium => CliError::NoEquilibrium,
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failed(e)
    }
}

fn curve_cmd(measure: Measure, args: &CurveArgs) -> Result<(output::Table, &Output), CliError> {
    let (a_values, skip) = match args.a {
        Some(a) => (vec![a], false),
        None => (commands::a_grid(), true),
    };
    let t = commands::curve(
        &[measure],
        args.behavior.into(),
        args.theta,
        &a_values,
        skip,
    )?;
    Ok((t, &args.out))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (table, out, default_format) = match &cli.command {
        Command::MarketEq { game, loc, out } => (
            commands::market_eq(&game.params()?, loc.x1, loc.x2)?,
            out,
            Format::Json,
        ),
        Command::NashCheck {
            game,
            loc,
            s1,
            behavior,
            out,
        } => (
            commands::nash_check_cmd(&game.params()?, (*behavior).into(), loc.x1, loc.x2, *s1)?,
            out,
            Format::Json,
        ),
        Command::NashRegion {
            game,
            behavior,
            grid_locations,
            out,
        } => (
            commands::nash_region(&game.params()?, (*behavior).into(), *grid_locations)?,
            out,
            Format::Csv,
        ),
        Command::SymmetricRegion {
            a,
            grid_locations,
            out,
        } => {
            let a_values = a.map_or_else(commands::a_grid, |a| vec![a]);
            (
                commands::symmetric_region_cmd(&a_values, *grid_locations)?,
                out,
                Format::Csv,
            )
        }
        Command::Welfare {
            game,
            x1,
            x2,
            s1,
            out,
        } => (
            commands::welfare(&game.params()?, *x1, *x2, *s1)?,
            out,
            Format::Json,
        ),
        Command::SocialOpt {
            game,
            oracle,
            grid,
            out,
        } => {
            let spec = grid.spec()?;
            (
                commands::social_opt(&game.params()?, oracle.then_some(&spec))?,
                out,
                Format::Json,
            )
        }
        Command::PoaCurve(args) => {
            let (t, out) = curve_cmd(Measure::Poa, args)?;
            (t, out, Format::Csv)
        }
        Command::PosCurve(args) => {
            let (t, out) = curve_cmd(Measure::Pos, args)?;
            (t, out, Format::Csv)
        }
        Command::Figures {
            theta,
            grid_locations,
            out,
            format,
        } => {
            let t = commands::figures(out, *theta, *grid_locations)?;
            emit(&t, format.unwrap_or(Format::Json), None)?;
            return Ok(());
        }
        Command::Verify {
            seed,
            instances,
            grid,
            out,
        } => {
            let (t, failures) = commands::verify(*seed, *instances, &grid.spec()?);
            emit(&t, out.format.unwrap_or(Format::Json), out.out.as_deref())?;
            if failures.is_empty() {
                return Ok(());
            }
            for f in &failures {
                eprintln!("disagreement in {f}");
            }
            return Err(anyhow::anyhow!("{} oracle suite(s) disagreed", failures.len()).into());
        }
    };
    emit(
        &table,
        out.format.unwrap_or(default_format),
        out.out.as_deref(),
    )?;
    Ok(())
}

fn main() -> ExitCode {
    // Parse errors exit with code 2 through clap.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NoEquilibrium) => {
            eprintln!("error: no equilibrium exists");
            ExitCode::from(1)
        }
        Err(CliError::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
