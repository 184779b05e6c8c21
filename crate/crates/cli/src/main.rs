mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpring::algebra::{Field, FreePoly};
use dpring::construction::{
    member_with, ConstructionError, Route, Space, SpanQuery,
};
use dpring::harness::{
    run_campaign, verify_series, CampaignConfig, CampaignReport, HarnessError, HarnessOptions,
    CAMPAIGNS, SCHEMA_VERSION,
};
use dpring::ore::{power_x0x, windowed_power, OreError};
use serde_json::{json, Value};
use thiserror::Error;

use config::{ConfigError, RunConfig};

const EXIT_CAMPAIGN_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "dpring", version, about = "Exact computation in differential polynomial rings over free algebras")]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    b: Option<u64>,
    #[arg(long, global = true)]
    r: Option<u64>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<u32>,
    /// `rationals` or `gfP` for a prime `P`.
    #[arg(long, global = true)]
    field: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand `(x0 X)^m`, optionally keeping only exponents `>= window`.
    Expand {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        window: Option<u64>,
    },
    /// Decide membership of the polynomial in FILE in one spanning component.
    Member {
        #[arg(long)]
        input: PathBuf,
        /// W, B, Bsum, I or I-truncated.
        #[arg(long)]
        space: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        degree: u64,
    },
    /// Run a verification campaign.
    Verify {
        #[arg(long)]
        campaign: String,
    },
    /// Print the validated parameters and their checkpoints.
    Params {
        #[arg(long)]
        validate: bool,
    },
    /// Run the nil-series mechanics on random matrices.
    Series {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Ore(#[from] OreError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let budget = match self {
            CliError::Harness(e) => e.is_budget(),
            CliError::Construction(ConstructionError::Budget { .. })
            | CliError::Construction(ConstructionError::Ore(OreError::BudgetExceeded { .. }))
            | CliError::Ore(OreError::BudgetExceeded { .. }) => true,
            _ => false,
        };
        if budget {
            EXIT_BUDGET
        } else {
            EXIT_VALIDATION
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(b) = cli.b {
        cfg.b = b;
    }
    if let Some(r) = cli.r {
        cfg.r = r;
    }
    if let Some(k) = cli.k_max {
        cfg.k_max = k;
    }
    if let Some(f) = &cli.field {
        cfg.field = Field::parse(f).map_err(|e| CliError::Input(e.to_string()))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn harness_options(cfg: &RunConfig) -> HarnessOptions {
    HarnessOptions {
        seed: cfg.seed,
        budget: cfg.budget(),
        expansion_budget: cfg.max_expansion_m,
        extra_fields: cfg.extra_fields.clone(),
        record_timings: false,
        embed_certificates: cfg.embed_certificates,
        cross_check_dim: cfg.cross_check_dim,
    }
}

fn campaign_config(name: &str, cfg: &RunConfig) -> Result<CampaignConfig, CliError> {
    let params = cfg.params()?;
    let k = cfg.k.unwrap_or(cfg.k_max);
    let n = params.block_size(k)? as usize;
    let default_trials = match name {
        "z-closure" | "phi" => 100,
        _ => 50,
    };
    Ok(CampaignConfig {
        k,
        h: cfg.h.unwrap_or(if name == "counterexample" { 2 } else { 1 }),
        trials: cfg.trials.unwrap_or(default_trials),
        m_max: cfg.m_max.unwrap_or(12),
        degree_cap: cfg.degree_cap.unwrap_or(4),
        lengths: cfg.lengths.clone().unwrap_or_else(|| vec![2 * n, 3 * n]),
        dimension: cfg.dimension.unwrap_or(3),
        params,
    })
}

fn emit(value: &Value, cfg: &RunConfig) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON serializes");
    println!("{text}");
    if let Some(path) = &cfg.output {
        write_file(path, &text)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, format!("{text}\n"))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit_report(report: &CampaignReport, cfg: &RunConfig) -> Result<u8, CliError> {
    emit(&serde_json::to_value(report).expect("report serializes"), cfg)?;
    eprintln!(
        "{}: {} ({} mandatory checks, {} failed, {} informational)",
        report.campaign,
        if report.passed() { "passed" } else { "FAILED" },
        report.summary.mandatory,
        report.summary.failed,
        report.summary.informational,
    );
    Ok(if report.passed() { 0 } else { EXIT_CAMPAIGN_FAILED })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Expand { m, window } => {
            let poly = match window {
                Some(t) => windowed_power(*m, *t, cfg.field)?,
                None => power_x0x(*m, cfg.field, cfg.max_expansion_m)?,
            };
            let coefficients: Vec<Value> = poly
                .iter()
                .rev()
                .map(|(t, a)| json!({ "t": t, "a": a.to_string(), "terms": a.num_terms() }))
                .collect();
            emit(
                &json!({
                    "schema": SCHEMA_VERSION,
                    "m": m,
                    "window": window,
                    "field": cfg.field.to_string(),
                    "poly": poly.to_string(),
                    "coefficients": coefficients,
                }),
                &cfg,
            )?;
            Ok(0)
        }
        Command::Member {
            input,
            space,
            k,
            length,
            degree,
        } => {
            let params = cfg.params()?;
            let space = Space::from_name(space, *k)
                .ok_or_else(|| CliError::Input(format!("unknown space `{space}`")))?;
            let text = std::fs::read_to_string(input)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
            let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
            let poly = FreePoly::parse(&text, cfg.field)
                .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let query = SpanQuery::new(space, *length, *degree);
            let budget = cfg.budget();
            let cert = member_with(&poly, &query, &params, Route::default_for(space), &budget)?;
            let verified = cert.verify(&params, &budget).is_ok();
            let mut value = serde_json::to_value(&cert).expect("certificate serializes");
            value["verified"] = Value::Bool(verified);
            value["schema"] = json!(SCHEMA_VERSION);
            emit(&value, &cfg)?;
            Ok(0)
        }
        Command::Verify { campaign } => {
            if !CAMPAIGNS.contains(&campaign.as_str()) {
                return Err(CliError::Input(format!(
                    "unknown campaign `{campaign}`; expected one of {}",
                    CAMPAIGNS.join(", ")
                )));
            }
            eprintln!("running campaign {campaign} (seed {})", cfg.seed);
            let ccfg = campaign_config(campaign, &cfg)?;
            let report = run_campaign(campaign, &ccfg, &harness_options(&cfg))?;
            emit_report(&report, &cfg)
        }
        Command::Params { validate: _ } => {
            let params = cfg.params()?;
            let levels: Vec<Value> = (1..=params.k_max)
                .map(|k| {
                    json!({
                        "k": k,
                        "block_size": params.block_size(k).ok(),
                        "checkpoints": params.checkpoints(k).ok(),
                        "degenerate": params.is_degenerate(k),
                    })
                })
                .collect();
            emit(
                &json!({
                    "schema": SCHEMA_VERSION,
                    "valid": true,
                    "params": params,
                    "levels": levels,
                }),
                &cfg,
            )?;
            Ok(0)
        }
        Command::Series { dim, trials } => {
            if *dim == 0 || *dim > 6 {
                return Err(CliError::Input(format!("--dim must be in 1..=6, got {dim}")));
            }
            eprintln!("running series mechanics ({dim}x{dim}, {trials} trials)");
            let report = verify_series(*dim, *trials, &harness_options(&cfg))?;
            emit_report(&report, &cfg)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on unknown subcommands and malformed flags
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
