// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bunching_core::report::{write_atomic, Format, RunReport};
use bunching_core::reproduce::{reproduce_reply, ReproduceOptions};
use bunching_core::scenario::{run, RunOptions};
use bunching_core::Result;

/// Bosonic bunching, hidden-variable models and contextuality bounds.
#[derive(Parser)]
#[command(name = "bunching", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for Monte Carlo sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Tolerance for the scenario's expected values.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Consolidated report checking every reproduced value.
    ReproduceReply {
        #[command(flatten)]
        output: Output,
        /// Add 1 to the named row before checking (test hook).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn emit(report: &RunReport, output: &Output) -> Result<()> {
    let text = report.render(output.format)?;
    match &output.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            output,
            tolerance,
        } => {
            let opts = RunOptions {
                seed: output.seed,
                samples: output.samples,
                tolerance: *tolerance,
            };
            run(scenario, &opts).and_then(|r| emit(&r, output).map(|_| r))
        }
        Command::ReproduceReply {
            output,
            inject_fault,
        } => {
            let opts = ReproduceOptions {
                samples: output.samples,
                seed: output.seed.unwrap_or(0),
                inject_fault: inject_fault.clone(),
            };
            reproduce_reply(&opts).and_then(|r| emit(&r, output).map(|_| r))
        }
    };
    match result {
        Ok(report) => {
            let failed: Vec<&str> = report
                .rows
                .iter()
                .filter(|r| r.status == bunching_core::report::Status::Mismatch)
                .map(|r| r.quantity.as_str())
                .collect();
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("bunching: {} mismatched row(s): {}", failed.len(), failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bunching: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
