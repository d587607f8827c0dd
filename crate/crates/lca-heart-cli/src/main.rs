use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use lca_heart_cli::{run_script, Executor, Options, Session};

/// Exact calculus for elementary locally compact abelian groups and their
/// left heart. Reads commands from the arguments, a batch file, or stdin.
#[derive(Parser)]
#[command(name = "lcah", version)]
struct Cli {
    /// Print one JSON object per command.
    #[arg(long)]
    json: bool,
    /// Session file to load (if present) and save after the run.
    #[arg(long)]
    session: Option<PathBuf>,
    /// File with one command per line.
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Seed for sampling in `check` commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Revalidate every emitted certificate immediately.
    #[arg(long)]
    check_certificates: bool,
    /// Commands to run, one per argument.
    commands: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let session = match &cli.session {
        Some(p) if p.exists() => {
            let text = match std::fs::read_to_string(p) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", p.display());
                    return ExitCode::from(1);
                }
            };
            match Session::load_str(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(1);
                }
            }
        }
        _ => Session::new(),
    };
    let options = Options { json: cli.json, seed: cli.seed, check_certificates: cli.check_certificates };
    let mut exec = Executor::new(session, options);

    let lines: Vec<String> = if let Some(b) = &cli.batch {
        match std::fs::read_to_string(b) {
            Ok(t) => t.lines().map(str::to_string).collect(),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", b.display());
                return ExitCode::from(1);
            }
        }
    } else if !cli.commands.is_empty() {
        cli.commands.clone()
    } else {
        io::stdin().lock().lines().map_while(Result::ok).collect()
    };

    let (text, code) = run_script(&mut exec, lines.iter().map(String::as_str));
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
    let _ = stdout.flush();

    if code < 2 {
        if let Some(p) = &cli.session {
            if let Err(e) = std::fs::write(p, exec.session.save_string()) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::from(code as u8)
}
