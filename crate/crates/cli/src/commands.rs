//! Subcommand implementations.

use std::fs;
use std::path::Path;

use propsim_core::datagen::{scenario_catalog, ScenarioLabel, CALIBRATED_SCHEDULE};
use propsim_core::harness::{
    run_cross_experiment, run_long_experiment, Hypothesis, ModelKind, ReplicateRecord,
    SummaryTable, ZipperSort, SUMMARY_SCHEMA_VERSION,
};
use propsim_core::report;

use crate::config::{Overrides, RunConfig};
use crate::svg;
use crate::{CliError, PlotCommand, ScenariosCommand, SimulateArgs, SortArg};

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `simulate`: run the configured experiment and write artifacts.
pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let text = read_file(&args.config)?;
    let mut cfg = RunConfig::parse(&text)?;
    let mut ov = Overrides {
        reps: args.reps,
        seed: args.seed,
        workers: args.workers,
    };
    if ov.workers.is_none() {
        if let Ok(w) = std::env::var("PROPSIM_WORKERS") {
            let parsed = w.parse::<usize>().map_err(|_| {
                CliError::Config(format!("PROPSIM_WORKERS must be an integer, got `{w}`"))
            })?;
            ov.workers = Some(parsed);
        }
    }
    cfg.apply(&ov);
    cfg.validate()?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    let (records_csv, summary) = match &cfg {
        RunConfig::Cross(_) => {
            let out = run_cross_experiment(&cfg.to_cross().expect("cross config"))?;
            (
                report::cross_records_csv(&out.records),
                SummaryTable::Cross {
                    schema_version: SUMMARY_SCHEMA_VERSION,
                    rows: out.summary,
                },
            )
        }
        RunConfig::Long(_) => {
            let out = run_long_experiment(&cfg.to_long().expect("long config"))?;
            (
                report::long_records_csv(&out.records),
                SummaryTable::Long {
                    schema_version: SUMMARY_SCHEMA_VERSION,
                    rows: out.summary,
                },
            )
        }
    };

    write_file(&args.out.join("replicates.csv"), &records_csv)?;
    write_file(
        &args.out.join("summary.json"),
        &report::summary_json(&summary),
    )?;
    write_file(
        &args.out.join("summary.csv"),
        &report::summary_csv(&summary),
    )?;
    write_file(&args.out.join("config-echo.json"), &cfg.echo_json())?;
    println!(
        "wrote replicates.csv, summary.json, summary.csv, config-echo.json to {}",
        args.out.display()
    );
    Ok(())
}

/// `plot power|zipper`.
pub fn plot(kind: &PlotCommand) -> Result<(), CliError> {
    match kind {
        PlotCommand::Power { input, out } => {
            let table = report::parse_summary_csv(&read_file(input)?)?;
            let rows = match table {
                SummaryTable::Cross { rows, .. } => rows,
                SummaryTable::Long { .. } => {
                    return Err(CliError::Config(
                        "power plot expects a cross-sectional summary".into(),
                    ))
                }
            };
            write_file(out, &svg::power::render(&rows)?)
        }
        PlotCommand::Zipper {
            input,
            out,
            sort,
            fraction,
            truth,
            filters,
        } => {
            let records = load_filtered_records(input, filters)?;
            let sort_key = match sort {
                SortArg::Bias => ZipperSort::StandardizedBias,
                SortArg::P => ZipperSort::PValue,
            };
            write_file(
                out,
                &svg::zipper::render(&records, *truth, sort_key, *fraction)?,
            )
        }
    }
}

/// One `--where column=value` clause.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Filter {
    BetaC(f64),
    Delta(f64),
    Scenario(ScenarioLabel),
    Hyp(Hypothesis),
    Model(ModelKind),
}

fn parse_filter(raw: &str) -> Result<Filter, CliError> {
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--where expects column=value, got `{raw}`")))?;
    let bad_value = || CliError::Config(format!("--where {key}: bad value `{value}`"));
    match key {
        "beta_c" => value.parse().map(Filter::BetaC).map_err(|_| bad_value()),
        "delta" => value.parse().map(Filter::Delta).map_err(|_| bad_value()),
        "scenario" => ScenarioLabel::parse(value)
            .map(Filter::Scenario)
            .map_err(|_| bad_value()),
        "hypothesis" => Hypothesis::parse(value).map(Filter::Hyp).ok_or_else(bad_value),
        "model" => ModelKind::parse(value).map(Filter::Model).ok_or_else(bad_value),
        _ => Err(CliError::Config(format!(
            "--where: unknown column `{key}` (expected beta_c, delta, scenario, hypothesis, or model)"
        ))),
    }
}

fn load_filtered_records(
    input: &Path,
    filters: &[String],
) -> Result<Vec<ReplicateRecord>, CliError> {
    let parsed: Vec<Filter> = filters
        .iter()
        .map(|f| parse_filter(f))
        .collect::<Result<_, _>>()?;
    let file = report::parse_records_csv(&read_file(input)?)?;
    match file {
        report::RecordsFile::Cross(rows) => {
            let keep: Vec<_> = rows
                .into_iter()
                .filter(|r| {
                    parsed.iter().all(|f| match f {
                        Filter::BetaC(v) => r.beta_c == *v,
                        Filter::Delta(v) => r.delta == *v,
                        Filter::Model(m) => r.rec.model == *m,
                        Filter::Scenario(_) | Filter::Hyp(_) => false,
                    })
                })
                .collect();
            let mut cells: Vec<(f64, f64)> = Vec::new();
            for r in &keep {
                if !cells.contains(&(r.beta_c, r.delta)) {
                    cells.push((r.beta_c, r.delta));
                }
            }
            if cells.len() > 1 {
                return Err(CliError::Config(format!(
                    "records span {} (beta_c, delta) cells; narrow with --where beta_c=... --where delta=...",
                    cells.len()
                )));
            }
            Ok(keep.into_iter().map(|r| r.rec).collect())
        }
        report::RecordsFile::Long(rows) => {
            let keep: Vec<_> = rows
                .into_iter()
                .filter(|r| {
                    parsed.iter().all(|f| match f {
                        Filter::Scenario(s) => r.scenario == *s,
                        Filter::Hyp(h) => r.hypothesis == *h,
                        Filter::Model(m) => r.rec.model == *m,
                        Filter::BetaC(_) | Filter::Delta(_) => false,
                    })
                })
                .collect();
            let mut cells: Vec<(ScenarioLabel, Hypothesis)> = Vec::new();
            for r in &keep {
                if !cells.contains(&(r.scenario, r.hypothesis)) {
                    cells.push((r.scenario, r.hypothesis));
                }
            }
            if cells.len() > 1 {
                return Err(CliError::Config(format!(
                    "records span {} (scenario, hypothesis) conditions; narrow with --where scenario=... --where hypothesis=...",
                    cells.len()
                )));
            }
            Ok(keep.into_iter().map(|r| r.rec).collect())
        }
    }
}

/// `scenarios list`.
pub fn scenarios(action: &ScenariosCommand) -> Result<(), CliError> {
    match action {
        ScenariosCommand::List { schedule } => {
            let schedule = schedule
                .clone()
                .unwrap_or_else(|| CALIBRATED_SCHEDULE.to_vec());
            let catalog = scenario_catalog(&schedule)?;
            let mut text = serde_json::to_string_pretty(&catalog).expect("catalog serializes");
            text.push('\n');
            print!("{text}");
            Ok(())
        }
    }
}
