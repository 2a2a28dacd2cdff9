use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use biaslens_core::ingest::{fetch_topic, load_topic, FetchConfig};
use biaslens_core::service::{analyze_topic, Engine, EngineConfig, TopicStore};
use biaslens_server::{router, AnalyzeSummary, AppState};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "biaslens",
    version,
    about = "Person-targeting bias analysis for news topics"
)]
struct Cli {
    /// Engine configuration (TOML). Defaults are used when absent.
    #[arg(long, global = true, env = "BIASLENS_CONFIG")]
    config: Option<PathBuf>,

    /// Directory holding topics, analyses, and responses.
    #[arg(long, global = true, env = "BIASLENS_DATA_DIR", default_value = "data")]
    data_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a topic file and store the result.
    Analyze { topic: PathBuf },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "BIASLENS_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Print the stored analysis of a topic as JSON.
    Export {
        topic_id: String,
        /// Engine config hash; the newest analysis when omitted.
        #[arg(long)]
        hash: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Store an exported analysis.
    Import { file: PathBuf },
    /// Build a topic file from article URLs.
    Fetch {
        #[arg(long)]
        topic_id: String,
        #[arg(long, default_value = "")]
        event: String,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        timeout_secs: u64,
        #[arg(required = true)]
        urls: Vec<String>,
    },
    /// Print the engine configuration in effect.
    Config,
}

fn engine_config(path: Option<&PathBuf>) -> anyhow::Result<EngineConfig> {
    Ok(match path {
        Some(p) => EngineConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => EngineConfig::default(),
    })
}

fn print_summary(summary: &AnalyzeSummary) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(summary)?);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "biaslens=info,warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();

    match cli.command {
        Command::Analyze { topic } => {
            let config = engine_config(cli.config.as_ref())?;
            let engine = Engine::new(config)?;
            let topic =
                load_topic(&topic).with_context(|| format!("reading {}", topic.display()))?;
            let analysis = analyze_topic(&topic, &engine)?;
            TopicStore::open(&cli.data_dir)?.save_analysis(&analysis)?;
            print_summary(&AnalyzeSummary::from(&analysis))
        }
        Command::Serve { port, host } => {
            let config = engine_config(cli.config.as_ref())?;
            let state = AppState::open(&cli.data_dir, Engine::new(config)?)
                .map_err(|e| anyhow::anyhow!("{}", e.message))?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                tracing::info!(addr = %listener.local_addr()?, data_dir = %cli.data_dir.display(), "listening");
                axum::serve(listener, router(Arc::new(state)))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                Ok(())
            })
        }
        Command::Export {
            topic_id,
            hash,
            out,
        } => {
            let json = TopicStore::open(&cli.data_dir)?.export_topic(&topic_id, hash.as_deref())?;
            match out {
                Some(p) => {
                    std::fs::write(&p, json).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{json}"),
            }
            Ok(())
        }
        Command::Import { file } => {
            let json = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let analysis = TopicStore::open(&cli.data_dir)?.import_analysis(&json)?;
            print_summary(&AnalyzeSummary::from(&analysis))
        }
        Command::Fetch {
            topic_id,
            event,
            out,
            timeout_secs,
            urls,
        } => {
            let cfg = FetchConfig {
                topic_id,
                event_description: event,
                timeout: Duration::from_secs(timeout_secs),
                ..FetchConfig::default()
            };
            let outcome = fetch_topic(&urls, &cfg)?;
            for f in &outcome.failures {
                tracing::warn!(url = %f.url, reason = %f.reason, "skipped");
            }
            if outcome.topic.articles.is_empty() {
                bail!("no article could be fetched");
            }
            let json = serde_json::to_string_pretty(&outcome.topic.to_input())?;
            std::fs::write(&out, json + "\n")
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "wrote {} articles to {} ({} failed)",
                outcome.topic.articles.len(),
                out.display(),
                outcome.failures.len()
            );
            Ok(())
        }
        Command::Config => {
            let config = engine_config(cli.config.as_ref())?;
            print!("{}", config.to_toml());
            eprintln!("hash {}", config.hash());
            Ok(())
        }
    }
}
