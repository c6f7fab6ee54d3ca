use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use codemix::config::{PipelineKind, RunConfig};
use codemix::error::exit;
use codemix::{commands, Error, Result};

#[derive(Parser)]
#[command(name = "codemix", version, about = "Detect code-mixed messages")]
struct Cli {
    /// TOML run config; relative paths inside resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Constant soft label in [0, 1] for every message.
    #[arg(long, global = true)]
    stub_soft_label: Option<f64>,
    /// `id<TAB>probability` file; takes precedence over the stub.
    #[arg(long, global = true)]
    soft_labels: Option<PathBuf>,
    #[arg(long, global = true)]
    folds: Option<usize>,
    #[arg(long, global = true)]
    train: Option<PathBuf>,
    #[arg(long, global = true)]
    test: Option<PathBuf>,
    #[arg(long, global = true)]
    pipeline: Option<PipelineKind>,
    #[arg(long, global = true)]
    min_tokens: Option<usize>,
    /// Directory for reports; defaults to `output_dir` or the current one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model; writes the model and `<model>.manifest.json`.
    Train {
        #[arg(long, default_value = "model.json")]
        model: PathBuf,
    },
    /// Add predicted labels and probabilities to a JSONL file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Stratified k-fold comparison of every scheme.
    Crossval,
    /// Held-out evaluation.
    Eval {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Hold out this community of the training file as the test set.
        #[arg(long)]
        test_community: Option<String>,
    },
    /// Zero-shot evaluation on another local language.
    Xlingual,
    /// Code-mixing proportions per topic and flair.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Krippendorff's alpha of an annotation table.
    Agreement {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a synthetic labeled corpus.
    Synth {
        #[arg(long)]
        output: PathBuf,
    },
    /// Train a character n-gram language model from a word list.
    Langmodel {
        #[arg(long)]
        words: PathBuf,
        #[arg(long)]
        language: String,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Per-community label counts.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(c) = cli.stub_soft_label {
        cfg.stub_soft_label = Some(c);
    }
    if let Some(p) = &cli.soft_labels {
        cfg.soft_labels = Some(p.clone());
    }
    if let Some(k) = cli.folds {
        cfg.folds = k;
    }
    if let Some(p) = &cli.train {
        cfg.data.train = Some(p.clone());
    }
    if let Some(p) = &cli.test {
        cfg.data.test = Some(p.clone());
    }
    if let Some(k) = cli.pipeline {
        cfg.pipeline = k;
    }
    if let Some(m) = cli.min_tokens {
        cfg.min_tokens = Some(m);
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve(&cli)?;
    let out_dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    match &cli.command {
        Command::Train { model } => commands::train(&cfg, model),
        Command::Predict {
            model,
            input,
            output,
        } => commands::predict(&cfg, model, input, output),
        Command::Crossval => {
            print!("{}", commands::crossval(&cfg, &out_dir)?);
            Ok(())
        }
        Command::Eval {
            model,
            test_community,
        } => {
            let table = commands::eval(&cfg, model.as_deref(), test_community.as_deref(), &out_dir)?;
            print!("{table}");
            Ok(())
        }
        Command::Xlingual => {
            print!("{}", commands::xlingual(&cfg, &out_dir)?);
            Ok(())
        }
        Command::Analyze { input } => {
            let r = commands::analyze(&cfg, input, &out_dir)?;
            for t in &r.topics {
                let terms: Vec<&str> = t.top_terms.iter().take(5).map(|x| x.0.as_str()).collect();
                println!(
                    "topic {:>4}  n={:<6} code-mixed {:.4}  {}",
                    t.topic_id,
                    t.size,
                    t.codemix_proportion,
                    terms.join(", ")
                );
            }
            Ok(())
        }
        Command::Agreement { input } => {
            let alpha = commands::agreement(input)?;
            println!("krippendorff_alpha\t{alpha:.4}");
            Ok(())
        }
        Command::Synth { output } => {
            let d = commands::synth(&cfg, output)?;
            log::info!("wrote {} messages to {}", d.len(), output.display());
            Ok(())
        }
        Command::Langmodel {
            words,
            language,
            n_min,
            n_max,
            output,
        } => commands::langmodel(words, language, (*n_min, *n_max), output),
        Command::Stats { input } => {
            println!("community\tunlabeled\tcode_mixed\tnon_mixed");
            for (c, n) in commands::stats(input)? {
                println!("{c}\t{}\t{}\t{}", n.unlabeled, n.code_mixed, n.non_mixed);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            report_source(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report_source(e: &Error) {
    if let Error::MissingPath { path, .. } = e {
        if path.parent().is_some_and(|p| !p.as_os_str().is_empty() && !Path::new(p).exists()) {
            eprintln!("note: directory {} does not exist", path.parent().unwrap().display());
        }
    }
}
