use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commitments::governance::WorldState;
use commitments::oracle;
use commitments::scenario::{self, Scenario};
use commitments::scheduler::Policy;
use commitments::simulator::{Simulator, DEMO_SCENARIO};

#[derive(Parser)]
#[command(name = "commitments", about = "Run commitment scenarios through the scheduler")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario and print its trace.
    Run {
        file: PathBuf,
        /// Override any `policy` command in the file.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Compare the trace against this file; exit 1 on mismatch.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Parse a scenario without running it.
    Check { file: PathBuf },
    /// Print the bundled four-network scenario.
    Demo,
    #[command(hide = true)]
    Oracle { n: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Fcfs,
    Priority,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Fcfs => Policy::Fcfs,
            PolicyArg::Priority => Policy::Priority,
        }
    }
}

fn load(path: &Path) -> Result<Scenario, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(2)
    })?;
    scenario::parse_named(&path.display().to_string(), &text).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(2)
    })
}

fn run(file: &Path, policy: Option<PolicyArg>, golden: Option<&Path>) -> ExitCode {
    let scenario = match load(file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let mut sim = Simulator::with_world(WorldState::new());
    if let Some(p) = policy {
        sim = sim.with_policy_override(p.into());
    }
    if let Err(e) = sim.run_scenario(&scenario) {
        print!("{}", e.trace);
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    let trace = sim.into_run().trace.render();
    print!("{trace}");
    let Some(golden) = golden else {
        return ExitCode::SUCCESS;
    };
    match fs::read_to_string(golden) {
        Ok(expected) if expected == trace => ExitCode::SUCCESS,
        Ok(expected) => {
            let line = expected
                .lines()
                .zip(trace.lines())
                .position(|(a, b)| a != b)
                .unwrap_or_else(|| expected.lines().count().min(trace.lines().count()));
            eprintln!("{}: trace differs at line {}", golden.display(), line + 1);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}: {e}", golden.display());
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Run { file, policy, golden } => run(&file, policy, golden.as_deref()),
        Cmd::Check { file } => match load(&file) {
            Ok(s) => {
                println!("{}: {} commands", file.display(), s.len());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Cmd::Demo => {
            print!("{DEMO_SCENARIO}");
            ExitCode::SUCCESS
        }
        Cmd::Oracle { n } => match oracle::run_grid(n) {
            Ok(r) => {
                println!(
                    "cases={} passed={} failed={} outcomes={} states={} unsafe={} undrained={}",
                    r.cases, r.passed, r.failed, r.outcomes, r.states, r.unsafe_states, r.undrained
                );
                for f in &r.failures {
                    println!("mismatch {f}");
                }
                if r.all_passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
    }
}
