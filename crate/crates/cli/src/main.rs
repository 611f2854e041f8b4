//! `receptionist` operator tool.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration or input files, 3 runtime
//! failure (including a replay that diverges).

mod chat;
mod eval;
mod ingest;
mod replay;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use receptionist_core::{AppConfig, LlmMode};

const DEFAULT_CONFIG: &str = "receptionist.toml";

#[derive(Debug, Parser)]
#[command(name = "receptionist", version, about = "Robot receptionist dialogue engine")]
struct Cli {
    /// Configuration file (TOML). Defaults to ./receptionist.toml when present.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Log debug output to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Talk to the receptionist on the console.
    Chat(ChatArgs),
    /// Add documents to the knowledge base directory.
    Ingest(ingest::IngestArgs),
    /// Run the HTTP/WebSocket session service.
    Serve(ServeArgs),
    /// Re-run a transcript against the mock model and diff the robot turns.
    Replay(replay::ReplayArgs),
    /// Score the intent classifier against labelled utterances.
    EvalNlu(eval::EvalArgs),
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// Use the scripted mock completion model.
    #[arg(long, conflicts_with = "live")]
    mock: bool,
    /// Use the configured completion endpoint.
    #[arg(long)]
    live: bool,
}

impl ModeArgs {
    fn mode(&self) -> Option<LlmMode> {
        match (self.mock, self.live) {
            (true, _) => Some(LlmMode::Mock),
            (_, true) => Some(LlmMode::Live),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
struct ChatArgs {
    #[command(flatten)]
    mode: ModeArgs,
    /// Talk to a running service instead of an in-process engine.
    #[arg(long, value_name = "URL", conflicts_with_all = ["mock", "live"])]
    server: Option<String>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    mode: ModeArgs,
    /// Address to bind.
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Port to bind, overriding the configuration.
    #[arg(long)]
    port: Option<u16>,
}

/// A failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 3,
            error: error.into(),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

fn load_config(path: Option<&Path>) -> CliResult<AppConfig> {
    let fallback = Path::new(DEFAULT_CONFIG);
    let path = path.or_else(|| fallback.is_file().then_some(fallback));
    AppConfig::load(path).map_err(Failure::config)
}

fn init_logging(verbose: bool) {
    use tracing_subscriber::EnvFilter;
    let filter = if verbose {
        EnvFilter::new("debug")
    } else {
        EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn"))
    };
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();
}

async fn serve(config: &AppConfig, args: &ServeArgs) -> CliResult {
    let service =
        receptionist_service::from_config(config, args.mode.mode()).map_err(Failure::config)?;
    let port = args.port.unwrap_or(config.port);
    let listener = tokio::net::TcpListener::bind((args.host.as_str(), port))
        .await
        .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot bind {}:{port}: {e}", args.host)))?;
    let addr = listener.local_addr().map_err(Failure::runtime)?;
    println!("listening on http://{addr}");
    receptionist_service::serve(listener, service, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(Failure::runtime)
}

async fn run(cli: Cli) -> CliResult {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Chat(args) => match args.server {
            Some(url) => chat::remote(&url).await,
            None => chat::local(&config, args.mode.mode()).await,
        },
        Command::Ingest(args) => ingest::run(&config, &args),
        Command::Serve(args) => serve(&config, &args).await,
        Command::Replay(args) => replay::run(&config, &args).await,
        Command::EvalNlu(args) => eval::run(&config, &args),
    }
}

/// The error and its causes, skipping causes already quoted by their parent.
fn describe(error: &anyhow::Error) -> String {
    let mut out = error.to_string();
    let mut last = out.clone();
    for cause in error.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_logging(cli.verbose);
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return ExitCode::from(3);
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {}", describe(&error));
            ExitCode::from(code)
        }
    }
}
