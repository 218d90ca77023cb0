use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sdreal::bench::{self, BenchResult};
use sdreal::expr::{eval_digits, parse_expr};
use sdreal::Error;

#[derive(Parser)]
#[command(
    name = "sdreal",
    version,
    about = "Exact real arithmetic on signed-digit streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first digits of an expression and their exact value.
    Eval {
        expr: String,
        #[arg(long, default_value_t = 32)]
        digits: usize,
    },
    /// Run a benchmark suite and print CSV.
    Bench {
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        digits: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Constant,
    Geometric,
    Mult,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    match cli.command {
        Command::Eval { expr, digits } => {
            let e = parse_expr(&expr).map_err(|e| (exit_code(&e), e.to_string()))?;
            let r = eval_digits(&e, digits).map_err(|e| (exit_code(&e), e.to_string()))?;
            println!("{}", r.digits);
            println!("{}", r.approx);
            Ok(())
        }
        Command::Bench {
            suite,
            digits,
            trials,
            seed,
            csv,
        } => {
            let rows: Vec<BenchResult> = match suite {
                Suite::Constant => bench::bench_constant(digits, trials),
                Suite::Geometric => bench::bench_geometric(digits, trials, seed),
                Suite::Mult => bench::bench_mult(digits, trials, seed),
            }
            .map_err(|e| (exit_code(&e), e.to_string()))?;
            let text = bench::to_csv(&rows);
            print!("{text}");
            if let Some(path) = csv {
                std::fs::write(&path, &text)
                    .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    // Deep stream pipelines force nested thunks; give them room.
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err((code, msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(2)
        }
    }
}
