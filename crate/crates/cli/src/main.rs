//! `tgdb`: interactive shell and script runner for a tgdb database file.

mod shell;

use std::io::{self, IsTerminal};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tgdb_core::httpd::{HttpService, DEFAULT_PORT};
use tgdb_core::{Database, Session};

#[derive(Parser, Debug)]
#[command(name = "tgdb", version, about = "Typed graph database shell")]
struct Args {
    /// Database file; created if missing.
    dbfile: PathBuf,

    /// Run the statements in FILE instead of reading stdin.
    #[arg(long, value_name = "FILE")]
    script: Option<PathBuf>,

    /// Report per-statement timing and overall throughput on stderr.
    #[arg(long)]
    time: bool,

    /// Continue a script after a failing statement.
    #[arg(long)]
    keep_going: bool,

    /// Also serve the HTTP graph export (default port 8180).
    #[arg(long, value_name = "PORT", num_args = 0..=1, default_missing_value = "8180")]
    http: Option<u16>,

    /// fsync the log after every commit.
    #[arg(long)]
    sync: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let db = match Database::open_with(&args.dbfile, args.sync) {
        Ok(db) => db,
        Err(e) => {
            eprintln!("cannot open {}: {}", args.dbfile.display(), e);
            return ExitCode::FAILURE;
        }
    };
    let service = match args.http {
        Some(port) => {
            let port = if port == 0 { DEFAULT_PORT } else { port };
            match HttpService::start(db.clone(), SocketAddr::from(([0, 0, 0, 0], port))) {
                Ok(s) => {
                    eprintln!("serving http on port {}", port);
                    Some(s)
                }
                Err(e) => {
                    eprintln!("cannot serve http on port {}: {}", port, e);
                    return ExitCode::FAILURE;
                }
            }
        }
        None => None,
    };
    let mut session = Session::new(db);
    let opts = shell::Options { time: args.time, keep_going: args.keep_going };
    let ok = match &args.script {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(src) => shell::run_script(&mut session, &src, &opts, &mut io::stdout().lock(), &mut io::stderr()),
            Err(e) => {
                eprintln!("cannot read {}: {}", path.display(), e);
                false
            }
        },
        None => {
            let prompts = io::stdin().is_terminal();
            shell::run_repl(&mut session, io::stdin().lock(), &mut io::stdout().lock(), &mut io::stderr(), prompts)
        }
    };
    // A script run with --http keeps serving until the process is stopped.
    if let (Some(s), Some(_)) = (service, &args.script) {
        s.wait();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
