mod args;
mod pipeline;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;

use args::{Cli, Command, DemoName, InitArg, InputArgs, Options, StepName};
use pipeline::{config_json, load, resolve_source, validate, Runner, StepOutcome, UsageError};

fn main() -> ExitCode {
    env_logger::Builder::new().parse_filters("warn").format_timestamp(None).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Joins the error chain, skipping causes already quoted by their wrapper.
fn describe(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !msg.ends_with(&text) {
            if !msg.is_empty() {
                msg.push_str(": ");
            }
            msg.push_str(&text);
        }
    }
    msg
}

fn run(cli: Cli) -> Result<()> {
    let (command, input, steps, opts, numbered) = match cli.command {
        Command::Build { input, affiliations, opts } => {
            let step = if affiliations { StepName::Affiliations } else { StepName::Cooccurrence };
            ("build", input, vec![step], opts, false)
        }
        Command::Prox { input, measure, opts } => ("prox", input, vec![measure.into()], opts, false),
        Command::Mds { input, opts } => ("mds", input, vec![StepName::Mds], opts, false),
        Command::Factor { input, opts } => ("factor", input, vec![StepName::Factor], opts, false),
        Command::Layout { input, opts } => ("layout", input, vec![StepName::Layout], opts, false),
        Command::Pipeline { input, steps, opts } => ("pipeline", input, steps, opts, true),
        Command::Demo { name, out } => return demo(name, &out),
    };
    let outcomes = execute(command, &input, &steps, &opts, numbered)?;
    for o in &outcomes {
        println!("{}", o.summary);
    }
    Ok(())
}

/// Validates, loads, runs and writes `report.json`.
fn execute(
    command: &str,
    input: &InputArgs,
    steps: &[StepName],
    opts: &Options,
    numbered: bool,
) -> Result<Vec<StepOutcome>> {
    if opts.init == InitArg::Random && opts.seed.is_none() {
        return Err(UsageError("--init random requires --seed".into()).into());
    }
    if opts.dims == 0 {
        return Err(UsageError("--dims must be at least 1".into()).into());
    }
    if !(opts.epsilon >= 0.0) || opts.max_iterations == 0 {
        return Err(UsageError("--epsilon must be non-negative and --max-iterations positive".into()).into());
    }
    let first = *steps.first().ok_or_else(|| UsageError("no steps given".into()))?;
    let source = resolve_source(&input.input, input.input_format, opts.kind, first)?;
    validate(source.ty(), steps)?;
    let (data, digest) = load(&source, opts)?;
    let runner = Runner { opts, out: opts.out.clone(), numbered };
    let outcomes = runner.run(data, steps)?;

    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let report = json!({
        "tool": "cocite",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": [{ "source": source.name, "sha256": digest }],
        "config": config_json(opts, &source, steps),
        "steps": outcomes.iter().map(|o| json!({
            "step": o.step,
            "results": o.results,
            "artifacts": o.artifacts.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "timestamp_unix": timestamp,
    });
    let path = opts.out.join("report.json");
    let text = serde_json::to_string_pretty(&report).context("serializing report")?;
    fs::write(&path, text + "\n").with_context(|| format!("io: writing {}", path.display()))?;
    Ok(outcomes)
}

#[derive(Parser)]
struct DefaultOptions {
    #[command(flatten)]
    opts: Options,
}

fn demo_options(out: &Path) -> Options {
    let mut opts = DefaultOptions::parse_from(["cocite"]).opts;
    opts.out = out.to_path_buf();
    opts
}

fn stress_of(o: &StepOutcome) -> f64 {
    o.results["stress"].as_f64().unwrap_or(f64::NAN)
}

fn demo(name: DemoName, out: &Path) -> Result<()> {
    let input = |n: &str| InputArgs { input: format!("builtin:{n}"), input_format: None };
    match name {
        DemoName::CitiesCorrect => {
            let o = execute("demo cities-correct", &input("cities"), &[StepName::Mds], &demo_options(out), false)?;
            println!("{}", o[0].summary);
            println!("map written to {}", out.join("map.svg").display());
        }
        DemoName::CitiesDistorted => {
            let correct_dir = out.join("correct");
            let distorted_dir = out.join("distorted");
            let correct = execute("demo cities-distorted", &input("cities"), &[StepName::Mds], &demo_options(&correct_dir), false)?;
            let distorted = execute(
                "demo cities-distorted",
                &input("cities"),
                &[StepName::Pearson, StepName::Mds],
                &demo_options(&distorted_dir),
                true,
            )?;
            let (s0, s1) = (stress_of(&correct[0]), stress_of(&distorted[1]));
            println!("direct mileages: normalized raw stress {s0:.6}");
            println!("pearson of mileages: normalized raw stress {s1:.6}");
            println!("stress ratio {:.1}", s1 / s0);
            println!(
                "warning: correlating rows of a proximity matrix replaces distances with profile similarity; \
                 the map no longer reproduces the mileages"
            );
        }
        DemoName::Figure3 => {
            let o = execute(
                "demo figure3",
                &input("figure2"),
                &[StepName::Pearson, StepName::Shift],
                &demo_options(out),
                true,
            )?;
            let path = &o[1].artifacts[0];
            let text = fs::read_to_string(path).with_context(|| format!("io: reading {}", path.display()))?;
            let s = cocite::ingest::parse_proximity_csv(
                &text,
                cocite::ProximityKind::Similarity,
                cocite::MeasurementLevel::Ratio,
            )
            .map_err(cocite::Error::from)?;
            let width = s.labels().iter().map(String::len).max().unwrap_or(0);
            print!("{:width$}", "");
            for l in s.labels() {
                print!("  {l:>8}");
            }
            println!();
            for (i, l) in s.labels().iter().enumerate() {
                print!("{l:width$}");
                for j in 0..s.len() {
                    print!("  {:>8.3}", s.get(i, j));
                }
                println!();
            }
        }
    }
    Ok(())
}
