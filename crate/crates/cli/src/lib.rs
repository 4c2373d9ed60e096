//! `fuzzydx` command-line front end.
//!
//! Every subcommand writes to caller-supplied streams and returns an exit
//! status, so the binary is a thin wrapper and tests can drive commands
//! in-process.

pub mod answers;
pub mod chart;
pub mod interactive;
pub mod table;

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use fuzzydx_core::{diagnose, validate_kb, EngineConfig, KbDocument, KbError, KnowledgeBase};
use fuzzydx_service::{AppState, SessionStore};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fuzzydx",
    version,
    about = "Fuzzy expert system for staged symptom-based diagnosis"
)]
pub struct Cli {
    /// Knowledge base document (JSON).
    #[arg(long, global = true, env = "FUZZYDX_KB")]
    pub kb: Option<PathBuf>,

    /// Results below this final probability (percent) are hidden; 0 shows all.
    #[arg(long, global = true, default_value_t = 5.0, value_parser = non_negative)]
    pub filter_threshold: f64,

    /// Confidence lost per required pathological test (percentage points).
    #[arg(long, global = true, default_value_t = 15.0, value_parser = non_negative)]
    pub drop_per_test: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lint a knowledge base; exit 0 iff it has no errors.
    Validate,
    /// Score a complete answer file and print the ranked results.
    Score {
        /// Answer file (JSON).
        answers: PathBuf,
    },
    /// Run an interactive diagnosis session on the terminal.
    Diagnose,
    /// Serve the HTTP API.
    Serve {
        /// TCP port; 0 picks a free one
        #[arg(long, env = "FUZZYDX_PORT", default_value_t = 8080)]
        port: u16,
        /// Address to bind
        #[arg(long, env = "FUZZYDX_HOST", default_value = "127.0.0.1")]
        host: String,
        /// Append-only session journal; replayed on startup.
        #[arg(long, env = "FUZZYDX_JOURNAL")]
        journal: Option<PathBuf>,
    },
    /// Emit per-disease confidence data as CSV.
    Chart,
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite number >= 0, got {s}"))
    }
}

impl Cli {
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            filter_threshold: self.filter_threshold,
            drop_per_test: self.drop_per_test,
        }
    }
}

/// Streams a command writes to.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn kb_path<'c>(cli: &'c Cli, io: &mut Io<'_>) -> Result<&'c Path, i32> {
    match &cli.kb {
        Some(path) => Ok(path),
        None => {
            let _ = writeln!(io.stderr, "error: --kb <path> is required");
            Err(EXIT_USAGE)
        }
    }
}

fn load_kb(cli: &Cli, io: &mut Io<'_>) -> Result<KnowledgeBase, i32> {
    let path = kb_path(cli, io)?;
    KnowledgeBase::from_path(path).map_err(|e| {
        let _ = writeln!(io.stderr, "error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

pub fn run(cli: &Cli, io: &mut Io<'_>) -> i32 {
    let outcome = match &cli.command {
        Command::Validate => cmd_validate(cli, io),
        Command::Score { answers } => cmd_score(cli, answers, io),
        Command::Diagnose => cmd_diagnose(cli, io),
        Command::Serve {
            port,
            host,
            journal,
        } => cmd_serve(cli, host, *port, journal.as_deref(), io),
        Command::Chart => cmd_chart(cli, io),
    };
    outcome.unwrap_or_else(|code| code)
}

fn cmd_validate(cli: &Cli, io: &mut Io<'_>) -> Result<i32, i32> {
    let path = kb_path(cli, io)?;
    let doc = std::fs::read_to_string(path)
        .map_err(KbError::from)
        .and_then(|text| KbDocument::from_json_str(&text));
    let doc = match doc {
        Ok(doc) => doc,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    let report = validate_kb(&doc);
    let _ = writeln!(io.stdout, "{report}");
    Ok(if report.is_ok() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn cmd_score(cli: &Cli, answers_path: &Path, io: &mut Io<'_>) -> Result<i32, i32> {
    let kb = load_kb(cli, io)?;
    let fail = |io: &mut Io<'_>, msg: String| {
        let _ = writeln!(io.stderr, "error: {msg}");
        EXIT_FAILURE
    };
    let file = answers::AnswerFile::from_path(answers_path)
        .map_err(|e| fail(io, format!("{}: {e}", answers_path.display())))?;
    let answers = file.to_answer_set();
    let results = diagnose(&kb, &file.area_id, &answers, &cli.engine_config())
        .map_err(|e| fail(io, e.to_string()))?;
    let _ = io.stdout.write_all(table::render(&results).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_diagnose(cli: &Cli, io: &mut Io<'_>) -> Result<i32, i32> {
    let kb = load_kb(cli, io)?;
    match interactive::run_session(&kb, &cli.engine_config(), io.stdin, io.stderr) {
        Ok(results) => {
            let _ = io.stdout.write_all(table::render(&results).as_bytes());
            Ok(EXIT_OK)
        }
        Err(e) => {
            let _ = writeln!(io.stderr, "\nerror: {e}");
            Err(EXIT_FAILURE)
        }
    }
}

fn cmd_chart(cli: &Cli, io: &mut Io<'_>) -> Result<i32, i32> {
    let kb = load_kb(cli, io)?;
    let _ = io
        .stdout
        .write_all(chart::render(&kb, &cli.engine_config()).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_serve(
    cli: &Cli,
    host: &str,
    port: u16,
    journal: Option<&Path>,
    io: &mut Io<'_>,
) -> Result<i32, i32> {
    let kb = load_kb(cli, io)?;
    let usage = |io: &mut Io<'_>, msg: String| {
        let _ = writeln!(io.stderr, "error: {msg}");
        EXIT_USAGE
    };
    let store = match journal {
        Some(path) => SessionStore::with_journal(path)
            .map_err(|e| usage(io, format!("{}: {e}", path.display())))?,
        None => SessionStore::in_memory(),
    };
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| usage(io, format!("invalid listen address {host}:{port}: {e}")))?;
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| usage(io, format!("cannot start runtime: {e}")))?;
    let state = AppState::new(kb, cli.engine_config(), store);
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| usage(io, format!("cannot bind {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| usage(io, e.to_string()))?;
        let _ = writeln!(io.stderr, "listening on http://{local}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        fuzzydx_service::serve(listener, state, shutdown)
            .await
            .map_err(|e| usage(io, format!("server error: {e}")))?;
        let _ = writeln!(io.stderr, "shut down cleanly");
        Ok(EXIT_OK)
    })
}
