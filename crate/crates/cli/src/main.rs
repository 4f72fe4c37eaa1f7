use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use graphel_cli::commands::{self, RenderFormat};
use graphel_cli::server::{self, AppState};
use graphel_cli::AppConfig;

/// Extract, score and render relation-triple summaries.
#[derive(Debug, Parser)]
#[command(name = "graphel", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Graph,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the weak-labeling pipeline over a corpus file.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Merge coreferent sources on exact span matches only.
        #[arg(long)]
        strict_coref: bool,
        #[arg(long)]
        min_votes: Option<usize>,
    },
    /// Score predicted triples against the best gold annotation per document.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Pairwise inter-annotator agreement.
    Agreement {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Also write the statistics as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render one document's triples as a graph.
    Render {
        #[arg(long)]
        triples: PathBuf,
        #[arg(long)]
        doc_id: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relation histograms for gold annotations and triple files.
    Histogram {
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Report percentages instead of counts.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Triple-set files to include as extra columns.
        preds: Vec<PathBuf>,
    },
    /// Fit labeling-function weights from their precision on gold data.
    Calibrate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve documents and collect annotations over HTTP.
    Serve {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = AppConfig::load_optional(cli.config.as_deref())?;
    match cli.command {
        Command::Extract {
            corpus,
            out,
            strict_coref,
            min_votes,
        } => {
            cfg.strict_coref |= strict_coref;
            if min_votes.is_some() {
                cfg.min_votes = min_votes;
            }
            cfg.labeler_config().validate().context("invalid --min-votes")?;
            let outcome = commands::extract(&corpus, &cfg.pipeline()?, &out)?;
            for w in &outcome.warnings {
                log::warn!("{w}");
            }
            let n: usize = outcome.records.iter().map(|r| r.triples.len()).sum();
            log::info!("{} documents, {n} triples", outcome.records.len());
        }
        Command::Evaluate { pred, gold, report } => {
            let r = commands::evaluate(&pred, &gold, &report, &cfg.scorer())?;
            println!(
                "hard F1 {:.3}  soft greedy F1 {:.3}  soft binary F1 {:.3}  ({} documents)",
                r.mean.hard_f1,
                r.mean.soft_greedy_f1,
                r.mean.soft_binary_f1,
                r.per_doc.len()
            );
        }
        Command::Agreement { gold, report } => {
            let r = commands::agreement(&gold, &report, &cfg.scorer())?;
            for (doc, why) in &r.skipped {
                log::warn!("{doc}: {why}");
            }
            println!(
                "hard F1 {:.2} ± {:.2}  soft F1 {:.2} ± {:.2}  Jaccard {:.2}/{:.2}/{:.2}/{:.2}  ({} documents)",
                r.mean.hard_f1,
                r.std.hard_f1,
                r.mean.soft_greedy_f1,
                r.std.soft_greedy_f1,
                r.mean.jaccard_triple,
                r.mean.jaccard_const_a,
                r.mean.jaccard_const_b,
                r.mean.jaccard_relations,
                r.per_doc.len()
            );
        }
        Command::Stats { corpus, gold, csv } => {
            let outcome = commands::stats(&corpus, &gold)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", outcome.stats.to_table());
            if let Some(p) = csv {
                emit(Some(&p), &outcome.stats.to_csv())?;
            }
        }
        Command::Render {
            triples,
            doc_id,
            format,
            out,
        } => {
            let format = match format {
                Format::Dot => RenderFormat::Dot,
                Format::Graph => RenderFormat::Graph,
            };
            emit(out.as_deref(), &commands::render(&triples, &doc_id, format)?)?;
        }
        Command::Histogram {
            gold,
            normalize,
            out,
            preds,
        } => {
            emit(
                out.as_deref(),
                &commands::histogram(gold.as_deref(), &preds, normalize)?,
            )?;
        }
        Command::Calibrate { corpus, gold, out } => {
            emit(out.as_deref(), &commands::calibrate(&corpus, &gold, &cfg.labeler()?)?)?;
        }
        Command::Serve {
            corpus,
            annotations,
            bind,
        } => {
            let state = AppState::open(&corpus, &annotations, cfg.scorer())?;
            tokio::runtime::Runtime::new()?.block_on(server::serve(state, bind))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GRAPHEL_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
