//! One function per subcommand. Every command checks all the paths it will
//! read before doing any work.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use codemix_core::analysis::{
    codemix_proportions, flair_proportions, min_topic_size, topic_size_filter,
};
use codemix_core::corpus::{
    filter_short, generate_synthetic, Dataset, Message, SynthConfig, OUTLIER_TOPIC,
};
use codemix_core::ensemble::decide;
use codemix_core::eval::{
    crossval_many, holdout_eval, krippendorff_alpha, train_pipeline, zero_shot_eval,
    AgreementTable, EvalReport,
};
use codemix_core::features::assemble_features;
use codemix_core::langdetect::train_ngram_model;

use crate::config::{preflight, RunConfig};
use crate::error::{Error, Result};
use crate::jsonl::{load_jsonl, parse_message, save_jsonl};
use crate::langmodel::{read_word_list, save_langmodel};
use crate::manifest::Manifest;
use crate::model_file::{load_model, save_model};
use crate::report::{format_table, topics_csv, ReportFile, SchemeResult, TopicsFile};
use crate::resources::{build_scorer, load_resources, load_target};

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::Config(format!("no {what} given")))
}

fn run_files<'a>(cfg: &'a RunConfig, extra: &[(&'a str, &'a Path)]) -> Result<Vec<(&'a str, &'a Path)>> {
    let mut files = cfg.resources()?.paths();
    if let Some(s) = &cfg.soft_labels {
        files.push(("soft labels", s.as_path()));
    }
    files.extend_from_slice(extra);
    Ok(files)
}

fn load_data(cfg: &RunConfig, path: &Path) -> Result<Dataset> {
    let d = load_jsonl(path)?;
    Ok(match cfg.min_tokens {
        Some(m) => filter_short(&d, m),
        None => d,
    })
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    fs::write(path, contents).map_err(Error::io(path))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn write_report(
    out_dir: &Path,
    manifest: Manifest,
    results: Vec<SchemeResult>,
) -> Result<String> {
    let table = format_table(&results);
    let file = ReportFile { manifest, results };
    let json = serde_json::to_string_pretty(&file).expect("reports serialize");
    write_file(&out_dir.join("report.json"), json + "\n")?;
    write_file(&out_dir.join("report.txt"), &table)?;
    Ok(table)
}

/// Trains the configured pipeline and writes `model` plus its manifest.
pub fn train(cfg: &RunConfig, model: &Path) -> Result<()> {
    let train = required(&cfg.data.train, "training data")?;
    let files = run_files(cfg, &[("train", train)])?;
    preflight(files.iter().copied())?;

    let resources = load_resources(cfg.resources()?)?;
    let scorer = build_scorer(cfg)?;
    let data = load_data(cfg, train)?;
    log::info!("training {} on {} messages", cfg.pipeline_config().name, data.len());
    let trained = train_pipeline(&data, &cfg.pipeline_config(), &resources, scorer.as_ref())
        .map_err(Error::core("ensemble"))?;
    save_model(model, &trained, cfg.seed)?;
    Manifest::new("train", cfg)
        .with_files(files)?
        .with_files([("model", model)])?
        .write(&sidecar(model))
}

/// Adds `predicted_label` and `probability` to every input line, keeping
/// the line's own fields as they are.
pub fn predict(cfg: &RunConfig, model: &Path, input: &Path, output: &Path) -> Result<()> {
    let files = run_files(cfg, &[("model", model), ("input", input)])?;
    preflight(files.iter().copied())?;

    let trained = load_model(model)?;
    let resources = load_resources(cfg.resources()?)?;
    if trained.local_language != resources.local_tag() {
        log::warn!(
            "model was trained with local language `{}`, resources are `{}`",
            trained.local_language,
            resources.local_tag()
        );
    }
    let scorer = build_scorer(cfg)?;
    let reader = BufReader::new(fs::File::open(input).map_err(Error::io(input))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(Error::io(input))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            path: input.to_path_buf(),
            line: i + 1,
            message,
        };
        let message = parse_message(&line).map_err(bad)?;
        let mut record: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let v = assemble_features(&message, &resources, scorer.as_ref())
            .map_err(Error::core("features"))?;
        let p = trained.model.predict_proba(&v).map_err(Error::core("ensemble"))?;
        record.insert("predicted_label".into(), decide(p).into());
        record.insert("probability".into(), p.into());
        writeln!(out, "{}", serde_json::Value::Object(record)).expect("write to memory");
    }
    write_file(output, out)?;
    Manifest::new("predict", cfg)
        .with_files(files)?
        .with_files([("output", output)])?
        .write(&sidecar(output))
}

/// Cross-validates every comparison scheme on the same folds.
pub fn crossval(cfg: &RunConfig, out_dir: &Path) -> Result<String> {
    let train = required(&cfg.data.train, "training data")?;
    let files = run_files(cfg, &[("train", train)])?;
    preflight(files.iter().copied())?;

    let resources = load_resources(cfg.resources()?)?;
    let scorer = build_scorer(cfg)?;
    let data = load_data(cfg, train)?;
    let pipelines = cfg.comparison();
    let reports = crossval_many(&data, &pipelines, &resources, scorer.as_ref(), cfg.folds, cfg.seed)
        .map_err(Error::core("eval"))?;
    let results = pipelines
        .iter()
        .zip(reports)
        .map(|(p, report)| SchemeResult {
            scheme: p.name.clone(),
            report,
        })
        .collect();
    write_report(out_dir, Manifest::new("crossval", cfg).with_files(files)?, results)
}

fn split_by_community(d: &Dataset, community: &str) -> Result<(Dataset, Dataset)> {
    let (test, train): (Vec<Message>, Vec<Message>) = d
        .messages()
        .iter()
        .cloned()
        .partition(|m| m.community == community);
    if test.is_empty() {
        return Err(Error::Config(format!("no messages from community `{community}`")));
    }
    Ok((
        Dataset::new(train, d.source_tag.clone()).map_err(Error::core("corpus"))?,
        Dataset::new(test, community).map_err(Error::core("corpus"))?,
    ))
}

/// Held-out evaluation. The model comes from `model` when given, otherwise
/// it is trained on the training data; test messages come from the test
/// file or, with `test_community`, from that community of the training
/// file.
pub fn eval(
    cfg: &RunConfig,
    model: Option<&Path>,
    test_community: Option<&str>,
    out_dir: &Path,
) -> Result<String> {
    let mut extra = Vec::new();
    if let Some(m) = model {
        extra.push(("model", m));
    }
    if test_community.is_some() || model.is_none() {
        extra.push(("train", required(&cfg.data.train, "training data")?));
    }
    if test_community.is_none() {
        extra.push(("test", required(&cfg.data.test, "test data")?));
    }
    let files = run_files(cfg, &extra)?;
    preflight(files.iter().copied())?;

    let resources = load_resources(cfg.resources()?)?;
    let scorer = build_scorer(cfg)?;
    let (train, test) = match test_community {
        Some(c) => {
            let (tr, te) = split_by_community(&load_data(cfg, required(&cfg.data.train, "")?)?, c)?;
            (Some(tr), te)
        }
        None => {
            let tr = match model {
                Some(_) => None,
                None => Some(load_data(cfg, required(&cfg.data.train, "")?)?),
            };
            (tr, load_data(cfg, required(&cfg.data.test, "")?)?)
        }
    };
    let trained = match (model, train) {
        (Some(m), _) => load_model(m)?,
        (None, Some(tr)) => train_pipeline(&tr, &cfg.pipeline_config(), &resources, scorer.as_ref())
            .map_err(Error::core("ensemble"))?,
        (None, None) => unreachable!("training data is loaded whenever no model is given"),
    };
    let report = holdout_eval(&trained, &test, &resources, scorer.as_ref())
        .map_err(Error::core("eval"))?;
    let results = vec![SchemeResult {
        scheme: trained.name.clone(),
        report,
    }];
    write_report(out_dir, Manifest::new("eval", cfg).with_files(files)?, results)
}

/// Trains with the source resources and tests zero-shot with the target
/// local language swapped in.
pub fn xlingual(cfg: &RunConfig, out_dir: &Path) -> Result<String> {
    let train = required(&cfg.data.train, "training data")?;
    let test = required(&cfg.data.test, "test data")?;
    let mut files = run_files(cfg, &[("train", train), ("test", test)])?;
    files.extend(cfg.target()?.paths());
    preflight(files.iter().copied())?;

    let source = load_resources(cfg.resources()?)?;
    let target = load_target(&source, cfg.target()?)?;
    if target.local_tag() == source.local_tag() {
        return Err(Error::Config(format!(
            "test language `{}` equals the training language",
            target.local_tag()
        )));
    }
    let scorer = build_scorer(cfg)?;
    let trained = train_pipeline(
        &load_data(cfg, train)?,
        &cfg.pipeline_config(),
        &source,
        scorer.as_ref(),
    )
    .map_err(Error::core("ensemble"))?;
    let report: EvalReport = zero_shot_eval(&trained, &load_data(cfg, test)?, &target, scorer.as_ref())
        .map_err(Error::core("eval"))?;
    let results = vec![SchemeResult {
        scheme: format!("{} ({}→{})", trained.name, source.local_tag(), target.local_tag()),
        report,
    }];
    write_report(out_dir, Manifest::new("xlingual", cfg).with_files(files)?, results)
}

/// Topic and flair code-mixing proportions with topic terms.
pub fn analyze(cfg: &RunConfig, input: &Path, out_dir: &Path) -> Result<TopicsFile> {
    preflight([("input", input)])?;
    let d = load_jsonl(input)?;
    let topics: Vec<i64> = d
        .messages()
        .iter()
        .map(|m| {
            m.topic_id.ok_or_else(|| Error::Core {
                stage: "analysis",
                source: codemix_core::Error::InvalidArgument(format!(
                    "message `{}` has no topic id",
                    m.id
                )),
            })
        })
        .collect::<Result<_>>()?;
    let fraction = cfg.analysis.min_topic_fraction;
    let filtered = topic_size_filter(&topics, fraction);
    let messages: Vec<Message> = d
        .messages()
        .iter()
        .zip(&filtered)
        .map(|(m, &t)| Message {
            topic_id: Some(t),
            ..m.clone()
        })
        .collect();
    let d = Dataset::new(messages, d.source_tag.clone()).map_err(Error::core("corpus"))?;
    let summaries = codemix_proportions(&d, cfg.analysis.top_terms).map_err(Error::core("analysis"))?;
    let file = TopicsFile {
        manifest: Manifest::new("analyze", cfg).with_files([("input", input)])?,
        min_topic_size: min_topic_size(topics.len(), fraction),
        outliers: filtered.iter().filter(|&&t| t == OUTLIER_TOPIC).count(),
        topics: summaries,
        flairs: flair_proportions(&d).map_err(Error::core("analysis"))?,
    };
    let json = serde_json::to_string_pretty(&file).expect("topic reports serialize");
    write_file(&out_dir.join("topics_report.json"), json + "\n")?;
    write_file(&out_dir.join("topics.csv"), topics_csv(&file.topics))?;
    Ok(file)
}

/// Annotation table: one item per line, one tab-separated column per
/// annotator, `0`/`1` or empty, `-`, `NA` for missing. `#` lines are
/// skipped.
pub fn parse_annotations(text: &str, path: &Path) -> Result<AgreementTable> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split('\t')
            .map(|v| match v.trim() {
                "" | "-" | "NA" => Ok(None),
                "0" => Ok(Some(0)),
                "1" => Ok(Some(1)),
                other => Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("`{other}` is not a label"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    AgreementTable::new(rows).map_err(Error::core("eval"))
}

pub fn agreement(input: &Path) -> Result<f64> {
    preflight([("annotations", input)])?;
    let text = fs::read_to_string(input).map_err(Error::io(input))?;
    krippendorff_alpha(&parse_annotations(&text, input)?).map_err(Error::core("eval"))
}

pub fn synth(cfg: &RunConfig, output: &Path) -> Result<Dataset> {
    let s = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("missing [synth] section".into()))?;
    preflight([
        ("english lexicon", s.english_lexicon.as_path()),
        ("local lexicon", s.local_lexicon.as_path()),
    ])?;
    let mut sc = SynthConfig::new(
        read_word_list(&s.english_lexicon)?,
        read_word_list(&s.local_lexicon)?,
    );
    sc.n_messages = s.n_messages;
    sc.mix_rate = s.mix_rate;
    sc.span_len_range = s.span_len_range;
    sc.seed = cfg.seed;
    if let Some(p) = &s.id_prefix {
        sc.id_prefix = p.clone();
    }
    if let Some(c) = &s.community {
        sc.community = c.clone();
    }
    let d = generate_synthetic(&sc).map_err(Error::core("corpus"))?;
    save_jsonl(output, &d)?;
    Manifest::new("synth", cfg)
        .with_files([
            ("english lexicon", s.english_lexicon.as_path()),
            ("local lexicon", s.local_lexicon.as_path()),
            ("output", output),
        ])?
        .write(&sidecar(output))?;
    Ok(d)
}

/// Trains a character n-gram model from a word list.
pub fn langmodel(words: &Path, language: &str, n_range: (usize, usize), output: &Path) -> Result<()> {
    preflight([("word list", words)])?;
    let list = read_word_list(words)?;
    let refs: Vec<&str> = list.iter().map(String::as_str).collect();
    let m = train_ngram_model(&refs, language, n_range).map_err(Error::core("langdetect"))?;
    save_langmodel(output, &m)
}

/// Per-community label counts.
pub fn stats(input: &Path) -> Result<BTreeMap<String, codemix_core::corpus::LabelCounts>> {
    preflight([("input", input)])?;
    let d = load_jsonl(input)?;
    let mut r = codemix_core::corpus::dataset_stats(&d);
    r.per_community.insert("(total)".into(), r.total);
    Ok(r.per_community)
}
