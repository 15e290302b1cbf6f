use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use uavloc::harness::{
    aggregate, compare_planners, itu_sigma_db, preset, run_batch, write_comparison_csv,
    write_metrics_csv, write_run_results, ScenarioConfig, ITU_SIGMA_PRESETS, PRESET_NAMES,
};
use uavloc::{Error, PlannerKind};

#[derive(Parser)]
#[command(
    name = "uavloc",
    version,
    about = "RSS target localization with planned UAV trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planner and write a metrics CSV (and optionally per-run trajectories).
    Run {
        #[command(flatten)]
        common: Common,
        /// Planner to use instead of the scenario's own.
        #[arg(long)]
        planner: Option<PlannerKind>,
        /// Also write one JSON line per run with positions, estimates and errors.
        #[arg(long)]
        trajectories: bool,
    },
    /// Run several planners on identical noise and write a wide RMSE table.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Planners to compare, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "greedy,predictive,hybrid:10"
        )]
        planner: Vec<PlannerKind>,
        /// Also write one JSON line per run for every planner.
        #[arg(long)]
        trajectories: bool,
    },
    /// Repeat a run while varying one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Planner to use instead of the scenario's own.
        #[arg(long)]
        planner: Option<PlannerKind>,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Values, comma separated; sigma also accepts environment names such as urban_micro.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// List the bundled scenarios and named shadowing levels.
    Presets {
        /// Print this preset as a scenario file instead of the list.
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file or bundled preset name.
    #[arg(long)]
    scenario: String,
    /// Monte-Carlo runs, overriding the scenario's own count.
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed, overriding the scenario's own.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    #[value(name = "sigma_db")]
    SigmaDb,
    #[value(name = "switch_epoch")]
    SwitchEpoch,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut config = if Path::new(&self.scenario).is_file() {
            ScenarioConfig::load(&self.scenario)?
        } else if PRESET_NAMES.contains(&self.scenario.as_str()) {
            preset(&self.scenario)?
        } else {
            return Err(Error::Config(format!(
                "'{}' is neither a file nor a preset (try `uavloc presets`)",
                self.scenario
            ))
            .into());
        };
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        config.validate()?;
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        Ok(config)
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn file_tag(kind: PlannerKind) -> String {
    kind.to_string().replace(':', "")
}

/// Runs one configuration and writes `metrics_<tag>.csv`; returns the final RMSE.
fn run_one(config: &ScenarioConfig, out: &Path, tag: &str, trajectories: bool) -> Result<f64> {
    let runs = run_batch(config)?;
    let metrics = aggregate(&runs)?;
    let path = out.join(format!("metrics_{tag}.csv"));
    write_metrics_csv(create(&path)?, config.planner, &config.name, &metrics)?;
    if trajectories {
        write_run_results(create(&out.join(format!("runs_{tag}.jsonl")))?, &runs)?;
    }
    let last = metrics.last().map_or(f64::NAN, |m| m.rmse_m);
    println!("{tag}: final rmse {last:.3} m -> {}", path.display());
    Ok(last)
}

fn sigma_value(s: &str) -> Result<f64> {
    if let Some(v) = itu_sigma_db(s) {
        return Ok(v);
    }
    s.parse()
        .map_err(|_| Error::Config(format!("bad sigma value '{s}'")).into())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Presets { show: Some(name) } => {
            print!("{}", preset(&name)?.to_toml()?);
        }
        Command::Presets { show: None } => {
            for name in PRESET_NAMES {
                let c = preset(name)?;
                println!(
                    "{name:<18} uavs={} horizon={} sigma_db={} planner={} reach_ability={:.4}",
                    c.uav_starts.len(),
                    c.horizon,
                    c.channel.sigma_db,
                    c.planner,
                    c.reach_ability()
                );
            }
            println!();
            for (name, sigma) in ITU_SIGMA_PRESETS {
                println!("sigma {name:<15} {sigma} dB");
            }
        }
        Command::Run {
            common,
            planner,
            trajectories,
        } => {
            let mut config = common.load()?;
            if let Some(p) = planner {
                config = config.with_planner(p);
                config.validate()?;
            }
            run_one(
                &config,
                &common.out,
                &file_tag(config.planner),
                trajectories,
            )?;
        }
        Command::Compare {
            common,
            planner,
            trajectories,
        } => {
            let config = common.load()?;
            let cmp = compare_planners(&config, &planner)?;
            for (kind, metrics) in cmp.planners.iter().zip(&cmp.metrics) {
                let tag = file_tag(*kind);
                let path = common.out.join(format!("metrics_{tag}.csv"));
                write_metrics_csv(create(&path)?, *kind, &config.name, metrics)?;
            }
            if trajectories {
                for (kind, runs) in cmp.planners.iter().zip(&cmp.runs) {
                    let path = common.out.join(format!("runs_{}.jsonl", file_tag(*kind)));
                    write_run_results(create(&path)?, runs)?;
                }
            }
            let path = common.out.join("comparison.csv");
            write_comparison_csv(create(&path)?, &config.name, &cmp)?;
            for (kind, rmse) in cmp.planners.iter().zip(cmp.final_rmse()) {
                println!("{kind:<12} final rmse {rmse:.3} m");
            }
            println!("wrote {}", path.display());
        }
        Command::Sweep {
            common,
            planner,
            param,
            values,
        } => {
            let mut base = common.load()?;
            if let Some(p) = planner {
                base = base.with_planner(p);
            }
            let mut summary = String::from("value,final_rmse_m\n");
            for raw in &values {
                let mut config = base.clone();
                let tag = match param {
                    SweepParam::SigmaDb => {
                        config.channel.sigma_db = sigma_value(raw)?;
                        format!("sigma_{raw}")
                    }
                    SweepParam::SwitchEpoch => {
                        let k: usize = raw
                            .parse()
                            .map_err(|_| Error::Config(format!("bad switch epoch '{raw}'")))?;
                        config.planner = PlannerKind::Hybrid { switch_epoch: k };
                        format!("switch_{k}")
                    }
                };
                config.validate()?;
                let rmse = run_one(&config, &common.out, &tag, false)?;
                summary.push_str(&format!("{raw},{rmse}\n"));
            }
            let path = common.out.join("sweep.csv");
            fs::write(&path, summary).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(e) if e.is_config() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = execute(cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit_code(&e));
    }
    ExitCode::SUCCESS
}
