mod args;
mod commands;
mod figures;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, CoupledCommand};
use output::{Destination, Report};

/// Exit status for malformed command lines.
const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 2;
const EXIT_ACCURACY: u8 = 3;
const EXIT_OTHER: u8 = 1;

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()))
}

fn stem(cmd: &Command) -> String {
    match cmd {
        Command::Potential(_) => "potential".into(),
        Command::Moments(_) => "moments".into(),
        Command::Qfunc(_) => "qfunc".into(),
        Command::GcScan(_) => "gc-scan".into(),
        Command::Fock(_) => "fock".into(),
        Command::Harmonic(_) => "harmonic".into(),
        Command::Coupled(sub) => match sub {
            CoupledCommand::Moments(_) => "coupled-moments",
            CoupledCommand::Kernel(_) => "coupled-kernel",
            CoupledCommand::Spectrum(_) => "coupled-spectrum",
            CoupledCommand::Expansion(_) => "coupled-expansion",
            CoupledCommand::Variance(_) => "coupled-variance",
        }
        .into(),
        Command::Sample(_) => "sample".into(),
        Command::Figure(f) => format!("figure-{}", f.id.as_deref().unwrap_or("list")),
    }
}

fn dispatch(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Potential(a) => commands::potential_cmd(a),
        Command::Moments(a) => commands::moments_cmd(a),
        Command::Qfunc(a) => commands::qfunc_cmd(a),
        Command::GcScan(a) => commands::gc_scan_cmd(a),
        Command::Fock(a) => commands::fock_cmd(a),
        Command::Harmonic(a) => commands::harmonic_cmd(a),
        Command::Coupled(sub) => commands::coupled_cmd(sub),
        Command::Sample(a) => commands::sample_cmd(a),
        Command::Figure(f) => figures::figure(f.id.as_deref().unwrap_or_default()),
    }
}

/// Exit status and sidecar fields for a failed run.
fn classify(err: &anyhow::Error) -> (u8, Value) {
    let lib = err.chain().find_map(|e| e.downcast_ref::<sextic::Error>());
    let message = format!("{err:#}");
    match lib {
        Some(sextic::Error::Accuracy {
            context,
            estimate,
            target,
        }) => (
            EXIT_ACCURACY,
            json!({ "kind": "accuracy", "message": message, "context": context, "estimate": estimate, "target": target }),
        ),
        Some(sextic::Error::Resolution {
            halvings,
            previous,
            current,
        }) => (
            EXIT_ACCURACY,
            json!({ "kind": "resolution", "message": message, "halvings": halvings, "previous": previous, "current": current }),
        ),
        Some(e @ (sextic::Error::Window(_) | sextic::Error::Integrity(_))) => {
            let kind = if matches!(e, sextic::Error::Window(_)) {
                "window"
            } else {
                "integrity"
            };
            (EXIT_ACCURACY, json!({ "kind": kind, "message": message }))
        }
        Some(e) => {
            let kind = match e {
                sextic::Error::Capability(_) => "capability",
                sextic::Error::SingularRatio(_) => "singular_ratio",
                _ => "domain",
            };
            (EXIT_DOMAIN, json!({ "kind": kind, "message": message }))
        }
        None => (EXIT_OTHER, json!({ "kind": "io", "message": message })),
    }
}

pub fn run(argv: Vec<OsString>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { EXIT_USAGE };
        }
    };
    if let Command::Figure(f) = &cli.command {
        if f.list {
            for (id, what) in figures::FIGURES {
                println!("{id:<20} {what}");
            }
            return 0;
        }
    }

    let start = Instant::now();
    let outcome = dispatch(&cli.command);
    let wall = start.elapsed().as_secs_f64();

    let dest = Destination::resolve(
        cli.output.out.as_deref(),
        &stem(&cli.command),
        cli.output.format,
    );
    let args: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut meta = json!({
        "command": stem(&cli.command),
        "argv": args,
        "parameters": cli.command,
        "library": { "name": "sextic", "version": sextic::VERSION },
        "wall_time_s": wall,
        "format": cli.output.format,
        "data_file": dest.data.file_name().map(|n| n.to_string_lossy().into_owned()),
    });

    let code = match outcome.and_then(|report| {
        dest.write_data(&report)?;
        Ok(report)
    }) {
        Ok(report) => {
            meta["status"] = json!("ok");
            meta["columns"] = json!(report.columns);
            meta["rows"] = json!(report.rows.len());
            meta["tolerances"] = report.tolerances;
            meta["result"] = report.result;
            println!("{}", dest.data.display());
            0
        }
        Err(err) => {
            let (code, detail) = classify(&err);
            eprintln!("error: {err:#}");
            meta["status"] = json!("error");
            meta["data_file"] = Value::Null;
            meta["error"] = detail;
            code
        }
    };
    if let Err(e) = dest.write_meta(&meta) {
        eprintln!("error: {e:#}");
        return EXIT_OTHER;
    }
    code
}
