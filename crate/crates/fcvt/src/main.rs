use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fcvt::dataset::{Dataset, ResponseColumn};
use fcvt::laws::{DesignLaw, ErrorLaw};
use fcvt::report::{self, TestReportJson};
use fcvt::sim::{empirical_rate, synthetic_dataset, Model, SimulationConfig};
use fcvt::validation::{validate, SigmaPattern};
use fcvt::{Error, Result};
use fcvt_core::{cumulants_from_moments, ErrorMomentProfile, PreparedTest, Sidedness};

#[derive(Parser)]
#[command(name = "fcvt", version, about = "Homoscedasticity test for linear regression with many covariates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Test a CSV dataset for heteroscedastic errors.
    Test(TestArgs),
    /// Estimate empirical size or power by simulation.
    Simulate(SimulateArgs),
    /// Check closed-form moments against exact two-point enumeration.
    Validate(ValidateArgs),
}

#[derive(clap::Args)]
struct TestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Response column: header name or 1-based position.
    #[arg(long)]
    response: ResponseColumn,
    /// Prepend a column of ones (default).
    #[arg(long, overrides_with = "no_intercept")]
    intercept: bool,
    /// Use the covariates as given.
    #[arg(long, overrides_with = "intercept")]
    no_intercept: bool,
    /// Even moments M4 M6 M8 of the standardized error law.
    #[arg(long, num_args = 3, value_names = ["M4", "M6", "M8"], allow_negative_numbers = true)]
    moments: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Report a two-sided p-value instead of the upper tail.
    #[arg(long)]
    two_sided: bool,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value = "normal")]
    design: DesignLaw,
    #[arg(long, default_value = "normal")]
    error: ErrorLaw,
    #[arg(long, default_value = "null")]
    model: Model,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Condition on a single design draw.
    #[arg(long)]
    fixed_design: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the data of the first replication as CSV (response `y`).
    #[arg(long, value_name = "PATH")]
    emit_csv: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ValidateArgs {
    /// Sample size, at most 12.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Error scale pattern: const or half2.
    #[arg(long, default_value = "const")]
    sigma: SigmaPattern,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("alpha must lie in (0, 1) (got {alpha})")))
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn cmd_test(args: TestArgs) -> Result<ExitCode> {
    check_alpha(args.alpha)?;
    let profile = match args.moments.as_deref() {
        None => ErrorMomentProfile::gaussian(),
        Some(&[m4, m6, m8]) => cumulants_from_moments(m4, m6, m8)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        Some(_) => unreachable!("clap enforces three values"),
    };
    let data = Dataset::from_path(&args.data)?;
    let reg = data.regression(&args.response, !args.no_intercept)?;
    let sidedness = if args.two_sided {
        Sidedness::TwoSided
    } else {
        Sidedness::Upper
    };
    let report = PreparedTest::new(&reg.design, profile)?.test(&reg.response, sidedness)?;
    match args.format {
        Format::Text => print!("{}", report::test_report_text(&report, args.alpha)),
        Format::Json => println!("{}", to_json(&TestReportJson::new(&report, args.alpha))),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let config = SimulationConfig {
        n: args.n,
        p: args.p,
        design_law: args.design,
        error_law: args.error,
        model: args.model,
        reps: args.reps,
        alpha: args.alpha,
        seed: args.seed,
        fixed_design: args.fixed_design,
    };
    if let Some(path) = &args.emit_csv {
        let io_err = |source| Error::Io {
            path: path.clone(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io_err)?;
        synthetic_dataset(&config)?.write_csv(std::io::BufWriter::new(file))?;
    }
    let result = empirical_rate(&config)?;
    match args.format {
        Format::Text => print!("{}", report::simulation_text(&result)),
        Format::Json => println!("{}", to_json(&result)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let report = validate(args.n, args.p, args.seed, args.sigma)?;
    match args.format {
        Format::Text => print!("{}", report::validation_text(&report)),
        Format::Json => println!("{}", to_json(&report)),
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = fcvt::thread_pool_from_env().and_then(|pool| {
        pool.install(|| match cli.command {
            Command::Test(a) => cmd_test(a),
            Command::Simulate(a) => cmd_simulate(a),
            Command::Validate(a) => cmd_validate(a),
        })
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
