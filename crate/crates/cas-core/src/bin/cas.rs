//! Command-line entry point: run scenarios, check monitors over recorded
//! traces, and generate the requirements traceability matrix.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cas_core::health::parse_trace;
use cas_core::monitors::{check_all, MonitorConfig, MonitorStatus};
use cas_core::sim::{load_scenario, run, PipelineConfig};
use cas_core::traceability::{build_matrix, parse_manifest, parse_test_report};

#[derive(Parser)]
#[command(name = "cas", about = "Collision avoidance pipeline tools", version)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run a scenario and write <name>.trace, <name>.gclog and <name>.csv.
    Run {
        /// Scenario file.
        scenario: PathBuf,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check the runtime monitors over a recorded trace.
    Monitor {
        /// Trace file produced by `cas run`.
        trace: PathBuf,
        /// Bound for the temporal "eventually", in ticks.
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        /// Use the raw (unguarded) traffic-to-command claim.
        #[arg(long)]
        raw_c2: bool,
    },
    /// Generate the requirements traceability matrix.
    Matrix {
        /// Requirements manifest (TSV).
        #[arg(short, long)]
        manifest: PathBuf,
        /// Test report (TSV).
        #[arg(short, long)]
        test_report: PathBuf,
        /// Output CSV path.
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn pipeline_config() -> Result<PipelineConfig, String> {
    let mut cfg = PipelineConfig::default();
    if let Ok(path) = std::env::var("CAS_CONFIG") {
        let text = read(Path::new(&path))?;
        cfg.apply_overrides_text(&text)
            .map_err(|e| format!("{path}: {e}"))?;
    }
    Ok(cfg)
}

fn cmd_run(scenario_path: &Path, out_dir: &Path) -> Result<ExitCode, String> {
    let text = read(scenario_path)?;
    let scenario = load_scenario(&text).map_err(|e| format!("{}: {e}", scenario_path.display()))?;
    let cfg = pipeline_config()?;
    let out = run(&scenario, &cfg);
    std::fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let base = out_dir.join(&scenario.name);
    let write = |ext: &str, data: &str| -> Result<(), String> {
        let path = base.with_extension(ext);
        std::fs::write(&path, data).map_err(|e| format!("{}: {e}", path.display()))
    };
    write("trace", &out.trace_text())?;
    write("gclog", &out.gclog_text())?;
    write("csv", &out.csv)?;
    println!(
        "{}: {} ticks, {} events, {} ground-link records",
        scenario.name,
        scenario.ticks(),
        out.trace.len(),
        out.gclog_lines.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_monitor(trace_path: &Path, horizon: usize, raw_c2: bool) -> Result<ExitCode, String> {
    let text = read(trace_path)?;
    let trace = parse_trace(&text).map_err(|e| format!("{}: {e}", trace_path.display()))?;
    let cfg = MonitorConfig {
        horizon_h: horizon,
        raw_c2,
    };
    let verdicts =
        check_all(&trace, &cfg).map_err(|e| format!("{}: {e}", trace_path.display()))?;
    let mut violated = false;
    for v in &verdicts {
        match &v.witness {
            Some(w) => println!(
                "{} {} at t={:.3}: {}",
                v.property.as_str(),
                v.status.as_str(),
                w.t,
                w.description
            ),
            None => println!("{} {}", v.property.as_str(), v.status.as_str()),
        }
        violated |= v.status == MonitorStatus::Violated;
    }
    Ok(if violated {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_matrix(manifest_path: &Path, report_path: &Path, out: &Path) -> Result<ExitCode, String> {
    let manifest = parse_manifest(&read(manifest_path)?)
        .map_err(|e| format!("{}: {e}", manifest_path.display()))?;
    let report = parse_test_report(&read(report_path)?)
        .map_err(|e| format!("{}: {e}", report_path.display()))?;
    let matrix =
        build_matrix(&manifest, &report).map_err(|e| format!("{}: {e}", report_path.display()))?;
    std::fs::write(out, matrix.to_csv()).map_err(|e| format!("{}: {e}", out.display()))?;

    let summary = matrix.summary();
    for (level, count) in &summary.counts {
        let uncovered = summary.uncovered.get(level).map_or(0, Vec::len);
        println!(
            "{}: {} requirements, {} without covering tests",
            level.as_str(),
            count,
            uncovered
        );
    }
    if summary.uncovered_llrs.is_empty() {
        println!("all LLR-level requirements have covering tests");
        Ok(ExitCode::SUCCESS)
    } else {
        for id in &summary.uncovered_llrs {
            println!("uncovered: {id}");
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        CliCommand::Run { scenario, out_dir } => cmd_run(scenario, out_dir),
        CliCommand::Monitor {
            trace,
            horizon,
            raw_c2,
        } => cmd_monitor(trace, *horizon, *raw_c2),
        CliCommand::Matrix {
            manifest,
            test_report,
            out,
        } => cmd_matrix(manifest, test_report, out),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
