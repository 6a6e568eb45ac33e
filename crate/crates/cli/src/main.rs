//! Command-line harness: synthesize scenarios, run the estimator over logs,
//! and compare the two filter variants.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 filter failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cubature_ahrs::ahrs::{init_static, AhrsEstimator};
use cubature_ahrs::config::{default_config_text, FilterChoice, RunConfig};
use cubature_ahrs::eval::{
    compare, render_plot_csv, render_report_csv, render_report_table, CompareInput,
    CompareOptions,
};
use cubature_ahrs::linalg::FactorizationMethod;
use cubature_ahrs::sim::{gen_trajectory, load_csv, save_csv, synthesize};

#[derive(Parser)]
#[command(
    name = "cubature-ahrs",
    about = "IMU/MAG attitude estimation: simulation, replay, and CKF-vs-SVDCKF comparison",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a scenario into a sensor CSV with truth columns.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run one filter over a sensor CSV and write per-sample estimates.
    Estimate {
        /// Input sensor log.
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Filter variant to run.
        #[arg(long, value_parser = parse_single_filter)]
        filter: Option<FactorizationMethod>,
    },
    /// Feed one input stream to every requested filter and report RMSE.
    Compare {
        /// Sensor log to replay; a synthetic scenario is generated when
        /// omitted.
        input: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
        /// Filter set to run.
        #[arg(long, value_parser = parse_filter_choice)]
        filter: Option<FilterChoice>,
        /// Zero one covariance eigen-direction before this evaluated step.
        #[arg(long, value_name = "STEP")]
        inject_rank_deficiency: Option<u64>,
    },
    /// Write the documented default configuration file.
    InitConfig {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_filter_choice(s: &str) -> Result<FilterChoice, String> {
    FilterChoice::parse(s).ok_or_else(|| format!("'{s}' is not one of ckf|svdckf|both"))
}

fn parse_single_filter(s: &str) -> Result<FactorizationMethod, String> {
    match s {
        "ckf" => Ok(FactorizationMethod::Cholesky),
        "svdckf" => Ok(FactorizationMethod::Svd),
        _ => Err(format!("'{s}' is not one of ckf|svdckf")),
    }
}

enum CliError {
    Usage(String),
    Data(String),
    Filter(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Filter(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Filter(m) => m,
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.scenario.seed = seed;
    }
    Ok(cfg)
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

fn cmd_simulate(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    ensure_out_dir(&common.out)?;
    let truth = gen_trajectory(&cfg.scenario);
    let samples = synthesize(&truth, &cfg.scenario.noise, cfg.scenario.seed);
    let path = common.out.join(format!("{}.csv", cfg.scenario.name));
    save_csv(&path, &samples, Some(&truth)).map_err(|e| CliError::Data(e.to_string()))?;
    println!(
        "wrote {} samples ({} s at {} Hz, seed {}) to {}",
        samples.len(),
        cfg.scenario.duration_s,
        cfg.scenario.rate_hz,
        cfg.scenario.seed,
        path.display()
    );
    Ok(())
}

fn cmd_estimate(
    input: &Path,
    common: &CommonArgs,
    filter: Option<FactorizationMethod>,
) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    ensure_out_dir(&common.out)?;
    let log = load_csv(input).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    let window = cfg.ahrs.init_window.max(1);
    if log.samples.len() <= window + 1 {
        return Err(CliError::Data(format!(
            "log has {} samples, need more than {}",
            log.samples.len(),
            window + 1
        )));
    }
    let method = filter.unwrap_or(FactorizationMethod::Svd);
    let init = init_static(&log.samples[..window], &cfg.gate())
        .map_err(|e| CliError::Data(e.to_string()))?;
    let mut estimator = AhrsEstimator::new(cfg.ahrs_config(), init, method);

    let mut out = String::from("# angles rad, drift rad/s\n");
    out.push_str("t,roll,pitch,yaw,drift_x,drift_y,drift_z,accel_valid,mag_valid,updated\n");
    let mut failure: Option<String> = None;
    for (k, s) in log.samples[window..].iter().enumerate() {
        match estimator.step(s) {
            Ok(e) => {
                let _ = writeln!(
                    out,
                    "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{},{},{}",
                    e.t,
                    e.euler.roll,
                    e.euler.pitch,
                    e.euler.yaw,
                    e.drift[0],
                    e.drift[1],
                    e.drift[2],
                    u8::from(e.accel_valid),
                    u8::from(e.mag_valid),
                    u8::from(e.updated)
                );
            }
            Err(err) => {
                failure = Some(format!("filter failed at step {k}: {err}"));
                break;
            }
        }
    }
    let path = common.out.join("estimates.csv");
    std::fs::write(&path, out).map_err(|e| CliError::Data(e.to_string()))?;
    match failure {
        Some(msg) => {
            eprintln!("wrote partial estimates to {}", path.display());
            Err(CliError::Filter(msg))
        }
        None => {
            println!(
                "wrote {} estimates to {}",
                log.samples.len() - window,
                path.display()
            );
            Ok(())
        }
    }
}

fn cmd_compare(
    input: Option<&Path>,
    common: &CommonArgs,
    filter: Option<FilterChoice>,
    inject: Option<u64>,
) -> Result<(), CliError> {
    let mut cfg = load_config(common)?;
    if let Some(choice) = filter {
        cfg.filter_choice = choice;
    }
    ensure_out_dir(&common.out)?;

    let compare_input = match input {
        Some(path) => {
            let log =
                load_csv(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            CompareInput::Log(log)
        }
        None => CompareInput::Scenario(cfg.scenario.clone()),
    };
    let opts = CompareOptions {
        inject_rank_deficiency: inject,
    };
    let cmp = compare(&compare_input, &cfg, &opts).map_err(|e| CliError::Data(e.to_string()))?;

    let table = render_report_table(&cmp);
    let report_csv = render_report_csv(&cmp);
    let plot_csv = render_plot_csv(&cmp);
    for (name, content) in [
        ("report.txt", &table),
        ("report.csv", &report_csv),
        ("plot.csv", &plot_csv),
    ] {
        let path = common.out.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::Data(e.to_string()))?;
    }

    print!("{table}");
    // Runtimes go to the terminal only; the written artifacts stay
    // byte-reproducible under a fixed seed.
    for run in &cmp.runs {
        println!(
            "runtime {:<10} {:8.1} ms",
            run.label,
            run.runtime.as_secs_f64() * 1e3
        );
        if let Some(err) = &run.error {
            println!("  {}: {err}", run.label);
        }
    }
    println!("artifacts written to {}", common.out.display());

    let method_runs: Vec<_> = cmp.runs.iter().filter(|r| r.method.is_some()).collect();
    if !method_runs.is_empty() && method_runs.iter().all(|r| r.failed_at_step.is_some()) {
        return Err(CliError::Filter(
            "every requested filter failed".to_string(),
        ));
    }
    Ok(())
}

fn cmd_init_config(out: &Path) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let path = out.join("ahrs-config.txt");
    if path.exists() {
        return Err(CliError::Usage(format!(
            "{} already exists; remove it first",
            path.display()
        )));
    }
    std::fs::write(&path, default_config_text()).map_err(|e| CliError::Data(e.to_string()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate { common } => cmd_simulate(common),
        Command::Estimate {
            input,
            common,
            filter,
        } => cmd_estimate(input, common, *filter),
        Command::Compare {
            input,
            common,
            filter,
            inject_rank_deficiency,
        } => cmd_compare(
            input.as_deref(),
            common,
            *filter,
            *inject_rank_deficiency,
        ),
        Command::InitConfig { out } => cmd_init_config(out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            let _ = std::io::stdout().flush();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
