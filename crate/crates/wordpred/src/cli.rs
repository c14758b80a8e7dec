//! Command-line front end. Every subcommand is a thin adapter over the
//! core crate; output is byte-stable for identical inputs.

use std::io::{self, Write};
use std::num::{NonZeroU64, NonZeroUsize};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use wordpred_core::evaluator::{
    improvement_percent, problem_discovery, reduction_percent, simulate_practice, standard_savings_percent,
    SimulationConfig, DEFAULT_MAX_PAGE_FLIPS,
};
use wordpred_core::predictor::{DEFAULT_INCREMENT, DEFAULT_PAGE_SIZE};
use wordpred_core::{Engine, EngineConfig, Lexicon, MetricError, PageError, UserProfile};

use crate::files::{load_merged, read_messages, read_profile, write_profile, CorpusSource, FileError};
use crate::format;
use crate::service::{self, AppState, ServiceConfig, DEFAULT_PORT};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Page(#[from] PageError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "wordpred", version, about = "Frequency-ranked word completion and prediction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus file, as TAG=PATH or PATH (tagged by file stem). Repeatable.
    #[arg(long = "corpus", value_name = "PATH", required = true)]
    pub corpus: Vec<String>,
}

impl CorpusArgs {
    fn sources(&self) -> Result<Vec<CorpusSource>, FileError> {
        self.corpus.iter().map(|a| CorpusSource::parse(a)).collect()
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub corpora: CorpusArgs,
    /// User profile whose adaptation applies.
    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_PAGE_SIZE)]
    pub page_size: NonZeroUsize,
    /// 0-based page to print.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub page: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge corpus files into one canonical corpus file.
    BuildLexicon {
        #[command(flatten)]
        corpora: CorpusArgs,
        /// Output file (standard output when omitted).
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Rank completions of PREFIX (empty for the global top words).
    Complete {
        #[command(flatten)]
        query: QueryArgs,
        prefix: String,
    },
    /// Rank next-word predictions after PREVIOUS (start of text when omitted).
    Predict {
        #[command(flatten)]
        query: QueryArgs,
        previous: Option<String>,
    },
    /// Replay messages with the ideal-user policy and report keystroke savings.
    Simulate {
        #[command(flatten)]
        corpora: CorpusArgs,
        /// One message per line, words separated by spaces.
        messages: PathBuf,
        /// Starting profile.
        #[arg(long, value_name = "PATH")]
        profile: Option<PathBuf>,
        /// Write the adapted profile here afterwards.
        #[arg(long, value_name = "PATH")]
        save_profile: Option<PathBuf>,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_PAGE_SIZE)]
        page_size: NonZeroUsize,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_INCREMENT)]
        increment: NonZeroU64,
        #[arg(long = "max-flips", value_name = "N", default_value_t = DEFAULT_MAX_PAGE_FLIPS)]
        max_flips: usize,
        /// Consecutive practice passes over the messages.
        #[arg(long, value_name = "N", default_value_t = NonZeroUsize::MIN)]
        sessions: NonZeroUsize,
        /// Do not reinforce selections.
        #[arg(long)]
        no_adapt: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a single metric.
    Metric {
        #[command(subcommand)]
        metric: Metric,
        #[arg(long, global = true)]
        json: bool,
    },
    /// Run the local HTTP service.
    Serve {
        #[command(flatten)]
        corpora: CorpusArgs,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Directory for per-user profiles (in memory only when omitted).
        #[arg(long, value_name = "DIR")]
        profile_dir: Option<PathBuf>,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_PAGE_SIZE)]
        page_size: NonZeroUsize,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_INCREMENT)]
        increment: NonZeroU64,
        /// Minutes before an idle session is dropped.
        #[arg(long, value_name = "MIN", default_value_t = 30)]
        idle_minutes: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Metric {
    /// 100 * reduced / used (used = aided keystrokes).
    Reduction { used: f64, reduced: f64 },
    /// 100 * (unaided - aided) / unaided.
    Savings { unaided: f64, aided: f64 },
    /// 100 * (pre - post) / pre.
    Improvement { pre_errors: u64, post_errors: u64 },
    /// 1 - (1 - p)^n.
    Discovery { p: f64, n: u32 },
}

fn load_engine(corpora: &CorpusArgs, profile: Option<&PathBuf>, config: EngineConfig) -> Result<Engine, CliError> {
    let lexicon = load_merged(&corpora.sources()?)?;
    let profile = match profile {
        Some(path) => read_profile(path)?,
        None => UserProfile::new("cli", lexicon.tag().clone()).expect("valid username"),
    };
    Ok(Engine::new(Arc::new(lexicon), profile, config))
}

fn metric(metric: &Metric, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let (name, value, text) = match *metric {
        Metric::Reduction { used, reduced } => {
            let v = reduction_percent(used, reduced)?;
            ("reduction", v, format::truncated(v, 2))
        }
        Metric::Savings { unaided, aided } => {
            let v = standard_savings_percent(unaided, aided)?;
            ("savings", v, format::truncated(v, 2))
        }
        Metric::Improvement { pre_errors, post_errors } => {
            let v = improvement_percent(pre_errors, post_errors)?;
            ("improvement", v, format::truncated(v, 2))
        }
        Metric::Discovery { p, n } => {
            let v = problem_discovery(p, n)?;
            ("discovery", v, format::rounded(v, 4))
        }
    };
    if json {
        writeln!(out, "{}", serde_json::json!({ "metric": name, "value": value }))?;
    } else {
        writeln!(out, "{text}")?;
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::BuildLexicon { corpora, output } => {
            let text = load_merged(&corpora.sources()?)?.to_corpus_text();
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|source| FileError::Io { path, source })?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Complete { query, prefix } => {
            let config = EngineConfig { page_size: query.page_size, ..EngineConfig::default() };
            let engine = load_engine(&query.corpora, query.profile.as_ref(), config)?;
            let page = engine.complete(&prefix, query.page)?;
            let text = if query.json { format::page_json(&page) } else { format::page_text(&page) };
            out.write_all(text.as_bytes())?;
        }
        Command::Predict { query, previous } => {
            let config = EngineConfig { page_size: query.page_size, ..EngineConfig::default() };
            let engine = load_engine(&query.corpora, query.profile.as_ref(), config)?;
            let page = engine.predict_next(previous.as_deref(), query.page)?;
            let text = if query.json { format::page_json(&page) } else { format::page_text(&page) };
            out.write_all(text.as_bytes())?;
        }
        Command::Simulate {
            corpora,
            messages,
            profile,
            save_profile,
            page_size,
            increment,
            max_flips,
            sessions,
            no_adapt,
            json,
        } => {
            let config = EngineConfig { page_size, increment, adaptive: !no_adapt };
            let mut engine = load_engine(&corpora, profile.as_ref(), config)?;
            let messages = read_messages(&messages)?;
            let sim = SimulationConfig { page_size, max_page_flips: max_flips, adaptive: !no_adapt };
            let results = simulate_practice(&messages, &mut engine, sim, sessions.get())?;
            let text = if json { format::practice_json(&results) } else { format::practice_text(&results) };
            out.write_all(text.as_bytes())?;
            if let Some(path) = save_profile {
                write_profile(&path, engine.profile())?;
            }
        }
        Command::Metric { metric: m, json } => metric(&m, json, out)?,
        Command::Serve { corpora, port, profile_dir, page_size, increment, idle_minutes } => {
            let mut lexicons: Vec<Lexicon> = Vec::new();
            for source in corpora.sources()? {
                let lex = source.load()?;
                match lexicons.iter_mut().find(|l| l.tag() == lex.tag()) {
                    Some(existing) => existing.merge(&lex),
                    None => lexicons.push(lex),
                }
            }
            let config = ServiceConfig {
                engine: EngineConfig { page_size, increment, adaptive: true },
                profile_dir,
                idle_timeout: Duration::from_secs(idle_minutes.max(1) * 60),
            };
            let app = AppState::new(lexicons, config);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = service::bind(port).await?;
                eprintln!("wordpred: listening on http://{}", listener.local_addr()?);
                service::serve(app, listener, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
            })?;
        }
    }
    Ok(())
}
