//! Command-line arguments and their resolution into a validated run.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracdiff::convergence::{DEFAULT_COUNT, DEFAULT_ORDERS};
use fracdiff::{CaseId, DerivativeMode, FractionalOrder, Method, Signal, Solver, Stepping, TestCase, TimeGrid};
use serde::Serialize;

use crate::input::Samples;

#[derive(Debug, Parser)]
#[command(
    name = "fracdiff",
    version,
    about = "Diffusive approximations of the Caputo derivative"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointwise approximation and error for one method and one order.
    Deriv(RunArgs),
    /// E_inf over a sweep of quadrature orders with a log-log slope fit.
    Convergence(RunArgs),
    /// The convergence sweep for all four methods side by side.
    Compare(RunArgs),
    /// Dump a generalized Gauss-Laguerre rule.
    Nodes(NodesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DerivativeArg {
    /// Closed-form y' of a built-in case.
    Analytic,
    /// Forward difference at t = 0, central differences inside.
    Difference,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "cdr")]
    pub method: Method,
    #[arg(long, default_value = "euler")]
    pub solver: Solver,
    /// Fractional order in (0, 1); defaults to the case's own order.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Quadrature order.
    #[arg(long = "N", default_value_t = 50)]
    pub order: usize,
    /// Number of time points, including t = 0.
    #[arg(long = "n")]
    pub count: Option<usize>,
    /// Time horizon.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Built-in case: power, cubic, sine, bessel, constant (or ex1..ex4).
    #[arg(long)]
    pub case: Option<String>,
    /// CSV file with header `t,y` on a uniform grid starting at 0.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long, default_value = "fracdiff")]
    pub out: PathBuf,
    #[arg(long)]
    pub fully_implicit: bool,
    /// Comma-separated, strictly increasing quadrature orders.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    /// Source of y' for built-in cases.
    #[arg(long, value_enum, default_value_t = DerivativeArg::Analytic)]
    pub derivative: DerivativeArg,
    /// Silence the step-size stability warning.
    #[arg(long)]
    pub no_stability_warning: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NodesArgs {
    #[arg(long = "N")]
    pub order: usize,
    /// Laguerre exponent, greater than -1.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value = "fracdiff")]
    pub out: PathBuf,
}

/// Echo of a resolved run, written to the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub methods: Vec<String>,
    pub solver: String,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub orders: Vec<usize>,
    pub n: usize,
    pub horizon: f64,
    pub case: Option<String>,
    pub input: Option<String>,
    pub derivative: String,
    pub fully_implicit: bool,
    pub warn_stability: bool,
    pub output: String,
}

/// A validated run: the echo plus the objects the numerics need.
pub struct Run {
    pub config: RunConfig,
    pub method: Method,
    pub solver: Solver,
    pub stepping: Stepping,
    pub alpha: FractionalOrder<f64>,
    pub orders: Vec<usize>,
    pub grid: TimeGrid<f64>,
    pub signal: Signal<f64>,
    pub case: Option<TestCase<f64>>,
    pub prefix: PathBuf,
}

pub enum OrderSpec {
    Single,
    Sweep,
}

impl Run {
    pub fn resolve(args: &RunArgs, orders: OrderSpec, methods: &[Method]) -> Result<Self> {
        let case_id = args.case.as_deref().map(str::parse::<CaseId>).transpose()?;
        let samples = args.input.as_deref().map(Samples::read).transpose()?;

        let (grid, mut signal, alpha, case) = match (&samples, case_id) {
            (None, None) => bail!("either --case or --input is required"),
            (Some(s), _) => {
                if let Some(n) = args.count {
                    ensure!(
                        n == s.len(),
                        "--n {n} disagrees with the {} samples in the input file",
                        s.len()
                    );
                }
                if let Some(t) = args.horizon {
                    ensure!(
                        t == s.horizon(),
                        "--T {t} disagrees with the input horizon {}",
                        s.horizon()
                    );
                }
                let default_alpha = case_id.map(|id| id.defaults().0);
                let alpha = args
                    .alpha
                    .or(default_alpha)
                    .context("--alpha is required with --input")?;
                let alpha = FractionalOrder::new(alpha)?;
                let grid = TimeGrid::new(s.horizon(), s.len())?;
                let case = case_id
                    .map(|id| TestCase::configured(id, alpha, s.horizon()))
                    .transpose()?;
                (grid, s.signal(), alpha, case)
            }
            (None, Some(id)) => {
                let (default_alpha, default_horizon) = id.defaults();
                let alpha = FractionalOrder::new(args.alpha.unwrap_or(default_alpha))?;
                let horizon = args.horizon.unwrap_or(default_horizon);
                let count = args.count.unwrap_or(DEFAULT_COUNT);
                ensure!(count >= 2, "--n must be at least 2");
                let case = TestCase::configured(id, alpha, horizon)?;
                let grid = case.grid(count)?;
                let signal = case.signal.clone();
                (grid, signal, alpha, Some(case))
            }
        };
        if samples.is_none() && args.derivative == DerivativeArg::Difference {
            signal = signal.with_mode(DerivativeMode::ForwardDifference);
        }

        let orders = match orders {
            OrderSpec::Single => {
                ensure!(args.order >= 1, "--N must be at least 1");
                vec![args.order]
            }
            OrderSpec::Sweep => {
                let sweep = args.sweep.clone().unwrap_or_else(|| DEFAULT_ORDERS.to_vec());
                ensure!(
                    sweep.len() >= 4,
                    "a sweep needs at least four orders, got {}",
                    sweep.len()
                );
                ensure!(sweep[0] >= 1, "quadrature orders must be positive");
                ensure!(
                    sweep.windows(2).all(|w| w[0] < w[1]),
                    "sweep orders must be strictly increasing"
                );
                sweep
            }
        };

        let stepping = if args.fully_implicit {
            Stepping::FullyImplicit
        } else {
            Stepping::SemiImplicit
        };
        let config = RunConfig {
            methods: methods.iter().map(|m| m.name().to_string()).collect(),
            solver: args.solver.to_string(),
            alpha: alpha.value(),
            orders: orders.clone(),
            n: grid.count(),
            horizon: grid.horizon(),
            case: case.as_ref().map(|c| c.name.clone()),
            input: args.input.as_ref().map(|p| p.display().to_string()),
            derivative: match (&samples, args.derivative) {
                (Some(_), _) | (None, DerivativeArg::Difference) => "difference".into(),
                (None, DerivativeArg::Analytic) => "analytic".into(),
            },
            fully_implicit: args.fully_implicit,
            warn_stability: !args.no_stability_warning,
            output: args.out.display().to_string(),
        };
        Ok(Self {
            config,
            method: methods[0],
            solver: args.solver,
            stepping,
            alpha,
            orders,
            grid,
            signal,
            case,
            prefix: args.out.clone(),
        })
    }

    /// Warnings for every method and order whose step exceeds the
    /// stiffness of the largest quadrature node.
    pub fn stability_warnings(&self, methods: &[Method]) -> Vec<String> {
        if !self.config.warn_stability {
            return Vec::new();
        }
        let h = self.grid.step();
        let mut out = Vec::new();
        for &m in methods {
            for &order in &self.orders {
                let product = m.stability_product(self.alpha, order, h);
                if product >= 1.0 {
                    out.push(format!(
                        "{m} with N={order}: h * stiffness(z_max) = {product:.3e} >= 1, the implicit steps are far from the stiff nodes' time scale"
                    ));
                }
            }
        }
        out
    }

    pub fn require_case(&self) -> Result<&TestCase<f64>> {
        self.case
            .as_ref()
            .context("an exact derivative is needed: pass --case alongside --input")
    }
}
