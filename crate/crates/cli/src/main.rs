use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use negotia_core::ddd::{parse_ddd, validate, Severity};
use negotia_core::directory::{generate_large_fixture, write_fixture};
use negotia_core::nl::NlFrontend;
use negotia_core::session::{DomainBundle, SessionStore};
use negotia_dm::http::{self, AppState};
use negotia_dm::{repl, run_conformance, Registry};

#[derive(Parser)]
#[command(name = "negotia-dm", version, about = "Issue-based dialogue manager")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chat with the system on the terminal.
    Repl {
        #[arg(long)]
        ddd: PathBuf,
        #[arg(long)]
        fixture: PathBuf,
    },
    /// Check a domain description and its language files.
    Validate {
        #[arg(long)]
        ddd: PathBuf,
    },
    /// Replay every *.script file in a directory.
    Conformance {
        #[arg(long)]
        scripts: PathBuf,
        /// Domain for scripts without a `#ddd:` header.
        #[arg(long)]
        ddd: Option<PathBuf>,
    },
    /// Serve the JSON chat API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        ddd: PathBuf,
        /// May be given several times; sessions pick one by name.
        #[arg(long, required = true)]
        fixture: Vec<PathBuf>,
        /// Idle minutes before a session is dropped.
        #[arg(long, default_value_t = 30)]
        idle_minutes: u64,
    },
    /// Write the large synthetic directory as JSON lines.
    GenerateFixture {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn validate_cmd(ddd: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(ddd).with_context(|| format!("reading {}", ddd.display()))?;
    let domain = match parse_ddd(&text) {
        Ok(d) => d,
        Err(e) => {
            println!("{}: {e}", ddd.display());
            return Ok(false);
        }
    };
    let diagnostics = validate(&domain);
    for d in &diagnostics {
        println!("{}: {d}", ddd.display());
    }
    let mut ok = !diagnostics.iter().any(|d| d.severity == Severity::Error);
    if let Err(e) = NlFrontend::load_for_ddd(ddd) {
        println!("{}: {e}", ddd.display());
        ok = false;
    }
    if ok {
        println!("{}: ok ({} goals)", ddd.display(), domain.goals.len());
    }
    Ok(ok)
}

fn conformance_cmd(scripts: &Path, ddd: Option<&Path>) -> Result<bool> {
    let results = run_conformance(scripts, ddd).with_context(|| format!("listing {}", scripts.display()))?;
    if results.is_empty() {
        bail!("no .script files in {}", scripts.display());
    }
    let mut all = true;
    for (path, result) in results {
        match result {
            Ok(report) => {
                all &= report.passed();
                print!("{report}");
            }
            Err(e) => {
                all = false;
                println!("{}: {e}", path.display());
            }
        }
    }
    println!("{}", if all { "all scripts passed" } else { "some scripts failed" });
    Ok(all)
}

async fn serve(port: u16, ddd: &Path, fixtures: &[PathBuf], idle: Duration) -> Result<()> {
    let registry = Registry::load(ddd, fixtures)?;
    let store = Arc::new(SessionStore::new(idle));
    tokio::spawn(http::expire_sessions(store.clone(), Duration::from_secs(60)));
    let app = http::router(AppState { store, registry: Arc::new(registry) });
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Repl { ddd, fixture } => {
            let bundle = DomainBundle::load(&ddd, &fixture)?;
            let stdin = std::io::stdin();
            repl::run(Arc::new(bundle), stdin.lock(), std::io::stdout())?;
            Ok(true)
        }
        Command::Validate { ddd } => validate_cmd(&ddd),
        Command::Conformance { scripts, ddd } => conformance_cmd(&scripts, ddd.as_deref()),
        Command::Serve { port, ddd, fixture, idle_minutes } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(port, &ddd, &fixture, Duration::from_secs(idle_minutes * 60)))?;
            Ok(true)
        }
        Command::GenerateFixture { seed, out } => {
            let kb = generate_large_fixture(seed);
            let file = std::fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut w = std::io::BufWriter::new(file);
            write_fixture(&kb, &mut w)?;
            std::io::Write::flush(&mut w)?;
            eprintln!("wrote {} entities to {}", kb.len(), out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
