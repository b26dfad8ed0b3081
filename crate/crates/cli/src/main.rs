use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trapz_core::harness::{
    catalog_lookup, default_threshold_exponent, emit, fit_rate, lemma_grid, read_records,
    run_study, CatalogEntry, CatalogParams, Emittable, OutputFormat, RateModel, StudyConfig,
    StudyMode,
};
use trapz_core::planner::plan;
use trapz_core::{Balance, DecayProfile, Error, PrecisionContext, Real};

const EXIT_INTERNAL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_ARGS: u8 = 3;
const EXIT_IO: u8 = 4;

/// Balanced truncated trapezoidal cubature at extended precision.
#[derive(Parser, Debug)]
#[command(name = "trapz", version)]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 120)]
    precision: u32,
    /// Floor factor for the truncation box, in (0, 1].
    #[arg(long, global = true, default_value = "1")]
    lambda: String,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BalanceArg {
    ApproxLog,
    LambertW,
}

impl From<BalanceArg> for Balance {
    fn from(b: BalanceArg) -> Self {
        match b {
            BalanceArg::ApproxLog => Balance::ApproxLog,
            BalanceArg::LambertW => Balance::LambertW,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    ExpRate,
    DexpRate,
}

impl From<ModelArg> for RateModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::ExpRate => RateModel::ExpRate,
            ModelArg::DexpRate => RateModel::DexpRate,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Step sizes, truncation box and error bounds for one budget.
    Plan {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = BalanceArg::ApproxLog)]
        balance: BalanceArg,
    },
    /// Plan and evaluate one budget; prints a single study record.
    Integrate {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = BalanceArg::ApproxLog)]
        balance: BalanceArg,
    },
    /// Convergence study over several budgets.
    Study {
        #[command(flatten)]
        target: Target,
        /// Comma-separated point budgets (planned mode).
        #[arg(long, value_delimiter = ',', required_unless_present = "adaptive")]
        budgets: Vec<u64>,
        /// Adaptive truncation with step π/M for each M of `--M-list`.
        #[arg(long, requires = "m_list")]
        adaptive: bool,
        /// Cut-off exponent: terms below exp(-a/h) are dropped.
        #[arg(long = "a")]
        a: Option<String>,
        #[arg(long = "M-list", value_delimiter = ',')]
        m_list: Vec<u64>,
        #[arg(long, value_enum, default_value_t = BalanceArg::ApproxLog)]
        balance: BalanceArg,
        /// Measure errors against the largest budget instead of the closed form.
        #[arg(long)]
        self_reference: bool,
    },
    /// Fit a convergence rate to a records file.
    Fit {
        /// Records written by `study` (CSV or JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        dims: usize,
    },
    /// Check the tail-sum bounds against brute-force sums.
    LemmaCheck,
}

#[derive(Args, Debug)]
struct Target {
    /// gaussian, gaussian_aniso, exp_moment or sinc.
    #[arg(long, default_value = "gaussian")]
    integrand: String,
    #[arg(long, default_value_t = 1)]
    dims: usize,
    /// Comma-separated σ_j for gaussian_aniso.
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<String>,
    /// Decay profile JSON; replaces the catalog profile for `plan`.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long = "decay-a")]
    decay_a: Option<String>,
    #[arg(long = "decay-b")]
    decay_b: Option<String>,
    #[arg(long = "decay-c")]
    decay_c: Option<String>,
    #[arg(long = "decay-d")]
    decay_d: Option<String>,
    #[arg(long = "decay-e")]
    decay_e: Option<String>,
}

impl Target {
    fn entry(&self, ctx: PrecisionContext) -> Result<CatalogEntry, Error> {
        let real = |v: &Option<String>| v.as_deref().map(|s| ctx.parse(s)).transpose();
        let sigma = if self.sigma.is_empty() {
            None
        } else {
            Some(
                self.sigma
                    .iter()
                    .map(|s| ctx.parse(s))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        };
        let params = CatalogParams {
            sigma,
            a: real(&self.decay_a)?,
            b: real(&self.decay_b)?,
            c: real(&self.decay_c)?,
            d: real(&self.decay_d)?,
            e: real(&self.decay_e)?,
        };
        catalog_lookup(ctx, &self.integrand, self.dims, &params)
    }

    fn profile(&self, ctx: PrecisionContext, entry: &CatalogEntry) -> Result<DecayProfile, Error> {
        match &self.profile {
            None => Ok(entry.profile.clone()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                DecayProfile::from_json(ctx, &text)
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let ctx = PrecisionContext::new(cli.precision)?;
    let lambda: Real = ctx.parse(&cli.lambda)?;
    let format = OutputFormat::from(cli.format);
    let out = cli.out.as_deref();

    match cli.command {
        Command::Plan {
            target,
            budget,
            balance,
        } => {
            let entry = target.entry(ctx)?;
            let profile = target.profile(ctx, &entry)?;
            let (p, report) = plan(ctx, &profile, budget, &lambda, balance.into())?;
            emit(ctx, Emittable::Plan(&p, &report), format, out)
        }
        Command::Integrate {
            target,
            budget,
            balance,
        } => {
            let entry = target.entry(ctx)?;
            let config = StudyConfig {
                budgets: vec![budget],
                lambda,
                mode: StudyMode::Planned {
                    balance: balance.into(),
                },
                self_reference: false,
            };
            let records = run_study(ctx, &entry, &config)?;
            emit(ctx, Emittable::Records(&records), format, out)
        }
        Command::Study {
            target,
            budgets,
            adaptive,
            a,
            m_list,
            balance,
            self_reference,
        } => {
            let entry = target.entry(ctx)?;
            let (budgets, mode) = if adaptive {
                let a = match a {
                    Some(text) => ctx.parse(&text)?,
                    None => ctx.real(default_threshold_exponent(entry.dims)),
                };
                (
                    m_list,
                    StudyMode::Adaptive {
                        threshold_exponent: a,
                    },
                )
            } else {
                (
                    budgets,
                    StudyMode::Planned {
                        balance: balance.into(),
                    },
                )
            };
            let config = StudyConfig {
                budgets,
                lambda,
                mode,
                self_reference,
            };
            let records = run_study(ctx, &entry, &config)?;
            emit(ctx, Emittable::Records(&records), format, out)
        }
        Command::Fit { input, model, dims } => {
            let records = read_records(ctx, &input)?;
            let fit = fit_rate(ctx, &records, model.into(), dims)?;
            emit(ctx, Emittable::Fit(&fit), format, out)
        }
        Command::LemmaCheck => {
            let checks = lemma_grid(ctx)?;
            emit(ctx, Emittable::Lemma(&checks), format, out)?;
            let (_, grid) = checks.split_last().expect("grid is non-empty");
            match grid.iter().find(|c| !(c.holds && c.converged)) {
                None => Ok(()),
                Some(c) => Err(Error::Malformed(format!("bound violated at {}", c.label))),
            }
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetTooSmall { .. } => EXIT_BUDGET,
        Error::Io { .. } => EXIT_IO,
        Error::NoDecayDetected { .. } | Error::DegenerateFit => EXIT_INTERNAL,
        _ => EXIT_ARGS,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_ARGS } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("trapz: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
