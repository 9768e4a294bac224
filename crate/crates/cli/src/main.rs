/// `print!` that fails with [`Failure`] instead of panicking when stdout is closed.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        write!(std::io::stdout().lock(), $($t)*).map_err($crate::Failure::from_io)?
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout().lock(), $($t)*).map_err($crate::Failure::from_io)?
    }};
}

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit 1 for bad invocations, 2 for bad data.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    /// The reader went away, as with `| head`.
    Closed,
}

impl Failure {
    pub fn from_io(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            Failure::Closed
        } else {
            Failure::Data(e.into())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<egoforge_core::Error> for Failure {
    fn from(e: egoforge_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn configure_threads() -> CmdResult {
    let Ok(raw) = std::env::var("EGOFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("EGOFORGE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Data(e.into()))
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Schedule(a) => commands::schedule(a),
        Command::Eval(e) => commands::eval(e),
        Command::Fuse(f) => commands::fuse(f),
        Command::Vote(v) => commands::vote(v),
        Command::Synth(s) => commands::synth(s),
        Command::Train(t) => commands::train(t),
        Command::Report(r) => commands::report(r),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Run with --help for usage.");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
