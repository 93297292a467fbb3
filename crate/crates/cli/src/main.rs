mod construct;
mod input;
mod sandwich;
mod selftest;
mod solve;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use delsarte::{GroupSpec, Mode};

#[derive(Parser)]
#[command(name = "delsarte", version, about = "Delsarte extremal problems on discrete Abelian groups")]
struct Cli {
    /// Arithmetic: exact rationals, floats, or exact whenever the group allows it.
    #[arg(long, global = true, env = "DELSARTE_MODE", value_enum, default_value = "auto")]
    mode: ModeChoice,
    /// Worker threads for batch solves and the self test.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the primal and dual programs on a finite group and certify the gap.
    Solve(solve::SolveArgs),
    /// Run one of the explicit constructions.
    #[command(subcommand)]
    Construct(construct::ConstructCommand),
    /// Recheck a certificate file written by another command.
    Verify {
        /// Certificate file, or `-` for stdin.
        file: String,
    },
    /// Lower and upper bounds on Z^d from growing finite windows.
    Sandwich(sandwich::SandwichArgs),
    /// Seeded consistency battery.
    Selftest {
        /// Random instances in the duality sweep.
        #[arg(long, default_value_t = 24)]
        count: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Auto,
    Exact,
    Float,
}

impl ModeChoice {
    /// The command line wins over a mode named in the problem file.
    pub fn resolve(self, requested: Option<Mode>, group: &GroupSpec) -> delsarte::Result<Mode> {
        let mode = match self {
            ModeChoice::Exact => Mode::Exact,
            ModeChoice::Float => Mode::Float,
            ModeChoice::Auto => match requested {
                Some(m) => m,
                None if group.exact_spectral() => Mode::Exact,
                None => Mode::Float,
            },
        };
        if mode == Mode::Exact && group.is_finite() {
            group.require_exact()?;
        }
        Ok(mode)
    }

    /// Constructions run exactly unless floats are asked for.
    pub fn construction_mode(self) -> Mode {
        match self {
            ModeChoice::Float => Mode::Float,
            _ => Mode::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Process exit statuses, ordered by severity for batch runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Certified = 0,
    Error = 1,
    Infeasible = 2,
    Tolerance = 3,
    Violation = 4,
}

pub struct Settings {
    pub mode: ModeChoice,
    pub jobs: usize,
    pub seed: u64,
    pub format: Option<Format>,
}

pub struct Report {
    pub text: String,
    pub outcome: Outcome,
}

impl Report {
    pub fn json(v: &serde_json::Value, outcome: Outcome) -> Report {
        let mut text = serde_json::to_string_pretty(v).expect("json values serialize");
        text.push('\n');
        Report { text, outcome }
    }
}

/// Maps `f` over `items` on up to `jobs` threads, keeping the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|r| r.expect("every slot is filled")).collect()
}

fn run(cli: Cli) -> Result<Report, String> {
    let settings = Settings {
        mode: cli.mode,
        jobs: cli.jobs.max(1),
        seed: cli.seed,
        format: cli.format,
    };
    let report = match cli.command {
        Command::Solve(args) => solve::run(&settings, &args),
        Command::Construct(c) => construct::run(&settings, &c),
        Command::Verify { file } => verify::run(&file),
        Command::Sandwich(args) => sandwich::run(&settings, &args),
        Command::Selftest { count } => Ok(selftest::run(&settings, count)),
    };
    report.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let output = cli.output.clone();
    match run(cli) {
        Ok(report) => {
            let written = match &output {
                Some(path) => std::fs::write(path, &report.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", report.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(report.outcome as u8),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
