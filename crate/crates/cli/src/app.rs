//! Subcommands and process exit codes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use astsm_core::{run_scenario, ControllerKind, ScenarioConfigD, TrajectoryLogD};
use clap::{Parser, Subcommand};

use crate::config::{default_config, parse_config, parse_config_str, to_toml, BUILTIN_SCENARIOS};
use crate::csv::write_csv;
use crate::manifest::{RunManifest, RunRecord};
use crate::report::{scenario_report, to_json, to_markdown, ScenarioReport};
use crate::svg::{render_svg, Figure, Series};

const RUN_CHANNELS: [&str; 9] = ["phi", "theta", "psi", "p", "q", "r", "u1", "u2", "u3"];

#[derive(Debug, Parser)]
#[command(name = "astsm", version, about = "Quadcopter attitude control simulator: adaptive super-twisting SMC and baselines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write CSV, SVG and manifest.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Channels to plot.
        #[arg(long, value_delimiter = ',', default_values_t = RUN_CHANNELS.map(String::from))]
        channels: Vec<String>,
    },
    /// Run one scenario with several controllers and write a comparison report.
    Compare {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = ControllerKind::ALL)]
        controllers: Vec<ControllerKind>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = RUN_CHANNELS.map(String::from))]
        channels: Vec<String>,
    },
    /// Nominal, disturbance and parametric scenarios for every controller, with figures and report.
    Paper {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the fully expanded built-in configuration.
    Defaults,
}

/// Parses `args` and runs the command: 0 on success, 1 on runtime errors, 2 on usage errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, channels } => run(&config, &out, &channels),
        Command::Compare { config, controllers, out, channels } => compare(&config, &controllers, &out, &channels),
        Command::Paper { out } => experiment(&out),
        Command::Defaults => {
            print!("{}", to_toml(&default_config()));
            Ok(())
        }
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("cannot create output directory {}", path.display()))
}

fn simulate(config: &ScenarioConfigD) -> Result<TrajectoryLogD> {
    run_scenario(config).with_context(|| format!("scenario `{}` with {}", config.scenario.name, config.scenario.controller.label()))
}

fn save_csv(log: &TrajectoryLogD, out: &Path, rel: &str) -> Result<()> {
    let path = out.join(rel);
    write_csv(log, &path).with_context(|| format!("cannot write {}", path.display()))
}

fn save_svg(figure: &Figure<'_>, out: &Path, rel: &str) -> Result<()> {
    let path = out.join(rel);
    render_svg(figure, &path).with_context(|| format!("cannot write {}", path.display()))
}

fn save_text(text: &str, out: &Path, rel: &str) -> Result<()> {
    let path = out.join(rel);
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn channel_refs(channels: &[String]) -> Vec<&str> {
    channels.iter().map(String::as_str).collect()
}

/// Runs every config on its own thread; results keep the input order.
fn simulate_all(configs: &[ScenarioConfigD]) -> Vec<Result<TrajectoryLogD>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(move || simulate(c))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| bail!("simulation thread panicked"))).collect()
    })
}

fn run(config_path: &Path, out: &Path, channels: &[String]) -> Result<()> {
    let config = parse_config(config_path)?;
    let log = simulate(&config)?;
    let stem = format!("{}_{}", config.scenario.name, config.scenario.controller);
    let title = format!("{} / {}", config.scenario.name, config.scenario.controller.label());
    let series = [Series { label: config.scenario.controller.label().to_owned(), log: &log }];
    let figure = Figure::overlay(&title, &series, &channel_refs(channels))?;

    create_dir(out)?;
    let (csv, svg, manifest_name) = (format!("{stem}.csv"), format!("{stem}.svg"), format!("{stem}.manifest.json"));
    save_csv(&log, out, &csv)?;
    save_svg(&figure, out, &svg)?;
    let mut manifest = RunManifest::new("run");
    manifest.runs.push(RunRecord { label: stem.clone(), config, csv: csv.clone() });
    manifest.outputs = vec![csv, svg, manifest_name.clone()];
    save_text(&manifest.to_json(), out, &manifest_name)
}

fn compare(config_path: &Path, controllers: &[ControllerKind], out: &Path, channels: &[String]) -> Result<()> {
    if controllers.is_empty() {
        bail!("no controllers selected");
    }
    let base = parse_config(config_path)?;
    let mut unique = controllers.to_vec();
    unique.sort();
    unique.dedup();
    let configs: Vec<_> = unique
        .iter()
        .map(|&kind| {
            let mut c = base.clone();
            c.scenario.controller = kind;
            c
        })
        .collect();
    let logs = collect(&configs, simulate_all(&configs))?;
    let name = base.scenario.name.clone();

    create_dir(out)?;
    let mut manifest = RunManifest::new("compare");
    for (config, (label, log)) in configs.iter().zip(&logs) {
        let csv = format!("{name}_{label}.csv");
        save_csv(log, out, &csv)?;
        manifest.runs.push(RunRecord { label: label.clone(), config: config.clone(), csv: csv.clone() });
        manifest.outputs.push(csv);
    }
    let series = labelled_series(&logs);
    let figure = Figure::overlay(&name, &series, &channel_refs(channels))?;
    let reports = vec![scenario_report(&logs.iter().cloned().collect())?];
    let outputs = [
        (format!("{name}_compare.svg"), None),
        (format!("{name}_report.md"), Some(to_markdown(&reports))),
        (format!("{name}_report.json"), Some(to_json(&reports))),
    ];
    for (rel, text) in outputs {
        match text {
            None => save_svg(&figure, out, &rel)?,
            Some(t) => save_text(&t, out, &rel)?,
        }
        manifest.outputs.push(rel);
    }
    let manifest_name = format!("{name}_compare.manifest.json");
    manifest.outputs.push(manifest_name.clone());
    save_text(&manifest.to_json(), out, &manifest_name)
}

/// Pairs results with their controller names, failing with every error at once.
fn collect(configs: &[ScenarioConfigD], results: Vec<Result<TrajectoryLogD>>) -> Result<Vec<(String, TrajectoryLogD)>> {
    let mut logs = Vec::new();
    let mut failures = Vec::new();
    for (c, r) in configs.iter().zip(results) {
        match r {
            Ok(log) => logs.push((c.scenario.controller.name().to_owned(), log)),
            Err(e) => failures.push(format!("{e:#}")),
        }
    }
    if !failures.is_empty() {
        bail!("{} run(s) failed: {}", failures.len(), failures.join("; "));
    }
    Ok(logs)
}

fn labelled_series(logs: &[(String, TrajectoryLogD)]) -> Vec<Series<'_>> {
    logs.iter().map(|(_, log)| Series { label: log.controller.label().to_owned(), log }).collect()
}

/// Resolved configs of the built-in experiment, grouped by scenario.
pub fn builtin_configs() -> Result<Vec<(String, Vec<ScenarioConfigD>)>> {
    BUILTIN_SCENARIOS
        .iter()
        .map(|(name, overlay)| {
            let base = parse_config_str(overlay, &format!("built-in {name} scenario"))?;
            let configs = ControllerKind::ALL
                .iter()
                .map(|&kind| {
                    let mut c = base.clone();
                    c.scenario.controller = kind;
                    c
                })
                .collect();
            Ok(((*name).to_owned(), configs))
        })
        .collect()
}

fn experiment(out: &Path) -> Result<()> {
    let groups = builtin_configs()?;
    let flat: Vec<ScenarioConfigD> = groups.iter().flat_map(|(_, cs)| cs.iter().cloned()).collect();
    let mut results = simulate_all(&flat).into_iter();

    let mut manifest = RunManifest::new("paper");
    let mut by_scenario: BTreeMap<String, Vec<(String, TrajectoryLogD)>> = BTreeMap::new();
    let mut reports: Vec<ScenarioReport> = Vec::new();
    create_dir(out)?;
    for (name, configs) in &groups {
        let chunk: Vec<_> = results.by_ref().take(configs.len()).collect();
        let logs = collect(configs, chunk)?;
        create_dir(&out.join(name))?;
        for (config, (label, log)) in configs.iter().zip(&logs) {
            let csv = format!("{name}/{label}.csv");
            save_csv(log, out, &csv)?;
            manifest.runs.push(RunRecord { label: format!("{name}/{label}"), config: config.clone(), csv: csv.clone() });
            manifest.outputs.push(csv);
        }
        reports.push(scenario_report(&logs.iter().cloned().collect())?);
        by_scenario.insert(name.clone(), logs);
    }

    let nominal = labelled_series(&by_scenario["nominal"]);
    let disturbed = labelled_series(&by_scenario["disturbance"]);
    let parametric = labelled_series(&by_scenario["parametric"]);
    let adaptive: Vec<Series<'_>> = BUILTIN_SCENARIOS
        .iter()
        .map(|(name, _)| {
            let (_, log) = by_scenario[*name].iter().find(|(_, l)| l.controller == ControllerKind::Astsm).expect("ASTSM run present");
            Series { label: (*name).to_owned(), log }
        })
        .collect();
    let figures = [
        ("attitude_nominal.svg", Figure::overlay("Attitude and body rates, nominal", &nominal, &["phi", "theta", "psi", "p", "q", "r"])?),
        ("yaw_disturbance.svg", Figure::overlay("Yaw under a 0.5 N·m step disturbance", &disturbed, &["psi", "r"])?),
        ("roll_control_nominal.svg", Figure::overlay("Roll torque u1, nominal", &nominal, &["u1"])?),
        ("attitude_parametric.svg", Figure::overlay("Attitude with payload inertia", &parametric, &["phi", "theta", "psi"])?),
        ("alpha3_scenarios.svg", Figure::stacked("ASTSM gain α3", &adaptive, "a3")?),
    ];
    for (rel, figure) in &figures {
        save_svg(figure, out, rel)?;
        manifest.outputs.push((*rel).to_owned());
    }
    save_text(&to_markdown(&reports), out, "report.md")?;
    save_text(&to_json(&reports), out, "report.json")?;
    manifest.outputs.extend(["report.md".to_owned(), "report.json".to_owned(), "manifest.json".to_owned()]);
    save_text(&manifest.to_json(), out, "manifest.json")
}
