//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
//! budgets are the constants below.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use codemix::model_file::ModelFile;
use codemix_core::analysis::{codemix_proportions, ctfidf};
use codemix_core::corpus::{
    filter_short, stratified_kfold, Dataset, Message, CODE_MIXED,
};
use codemix_core::ensemble::{
    train_forest_on, train_gboost, ClassCounts, DecisionTree, FeaturesPerSplit,
    GradientBoostConfig, GradientBoostModel, Node, TrainConfig, Tree,
};
use codemix_core::eval::{
    accuracy, crossval_many, krippendorff_alpha, macro_f1, roc_auc, train_pipeline,
    zero_shot_eval, AgreementTable, PipelineConfig,
};
use codemix_core::features::{assemble_features, FeatureSchema, FeatureVector, StubScorer};
use codemix_core::tokenize::{
    detokenize, token_stats, whitespace_tokenize, BpeTokenizer, Fallback, MergeTable, PreTokenizer,
    Tokenizer, WhitespaceTokenizer,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BPE_BUDGET: Duration = Duration::from_secs(5);
const ENSEMBLE_BUDGET: Duration = Duration::from_secs(60);
const EXPERIMENT_BUDGET: Duration = Duration::from_secs(120);
const ALPHA_EXPECTED: f64 = 0.533333;
const ALPHA_TOL: f64 = 1e-9;
const CTFIDF_TOL: f64 = 1e-9;
const MONO_F1_MIN: f64 = 0.90;
const XLING_F1_MIN: f64 = 0.70;
const BRANCH_COVERAGE_MIN: f64 = 0.95;
const STUB: f64 = 0.5;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    check(
        elapsed < budget,
        format!("took {:.2}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()),
    )
}

// ---------------------------------------------------------------- BPE

/// Step-by-step merger: repeatedly apply the lowest-ranked adjacent pair,
/// leftmost first.
fn reference_merge(ranks: &HashMap<(String, String), usize>, pretoken: &str) -> Vec<String> {
    let mut syms: Vec<String> = pretoken.chars().map(String::from).collect();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..syms.len().saturating_sub(1) {
            if let Some(&r) = ranks.get(&(syms[i].clone(), syms[i + 1].clone())) {
                if best.is_none_or(|(br, _)| r < br) {
                    best = Some((r, i));
                }
            }
        }
        let Some((_, i)) = best else { break };
        let right = syms.remove(i + 1);
        syms[i].push_str(&right);
    }
    syms
}

fn random_unicode(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    const POOLS: [(u32, u32); 7] = [
        (0x20, 0x7e),
        (0xc0, 0xff),
        (0x300, 0x36f),
        (0x400, 0x4ff),
        (0xac00, 0xd7a3),
        (0x4e00, 0x9fff),
        (0x1f300, 0x1f64f),
    ];
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| {
            let (lo, hi) = POOLS[rng.random_range(0..POOLS.len())];
            char::from_u32(rng.random_range(lo..=hi)).unwrap_or(' ')
        })
        .collect()
}

fn bpe_oracle() -> Outcome {
    let start = Instant::now();
    let table: MergeTable = en_fi().local.table().clone();
    check(table.merges().len() >= 20, "toy table has fewer than 20 merges")?;
    let ranks: HashMap<(String, String), usize> = table
        .merges()
        .iter()
        .enumerate()
        .map(|(r, (a, b))| ((a.clone(), b.clone()), r))
        .collect();
    let tok = BpeTokenizer::new("fi", table.clone());
    let alphabet: Vec<char> = "aeiouyäöhjklmnprstvdgb .,!ßž".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..200 {
        let len = rng.random_range(1..=30);
        let s: String = (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect();
        let got: Vec<String> = tok.encode(&s).into_iter().map(|t| t.text).collect();
        let pre = PreTokenizer::default();
        let want: Vec<String> = whitespace_tokenize(&s)
            .iter()
            .enumerate()
            .flat_map(|(i, w)| pre.split_word(w, i == 0))
            .flat_map(|p| reference_merge(&ranks, &p))
            .collect();
        mismatches += (got != want) as usize;
    }
    check(mismatches == 0, format!("{mismatches}/200 oracle mismatches"))?;

    let byte = tok.clone().with_fallback(Fallback::Byte);
    let mut failures = 0;
    for _ in 0..10_000 {
        let s = random_unicode(&mut rng, 24);
        let words = whitespace_tokenize(&s);
        for t in [&tok, &byte] {
            let enc = t.encode_words(&s);
            let ok = enc.len() == words.len()
                && enc.iter().zip(&words).all(|(toks, w)| detokenize(toks) == *w);
            failures += (!ok) as usize;
        }
    }
    check(failures == 0, format!("{failures} lossless round-trip failures"))?;
    let elapsed = start.elapsed();
    within(elapsed, BPE_BUDGET)?;
    Ok(format!(
        "{} merges, 0/200 oracle mismatches, 10000 strings × 2 fallbacks lossless, {:.2}s < {}s",
        table.merges().len(),
        elapsed.as_secs_f64(),
        BPE_BUDGET.as_secs()
    ))
}

// ------------------------------------------------------------ metrics

fn pair_auc(gold: &[u8], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..gold.len() {
        for j in 0..gold.len() {
            if gold[i] == 1 && gold[j] == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut instances = 0;
    while instances < 1000 {
        let n = rng.random_range(2..=50);
        let gold: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        if !gold.contains(&0) || !gold.contains(&1) {
            continue;
        }
        // coarse grid so ties are frequent
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64 / 7.0).collect();
        let got = roc_auc(&gold, &scores).map_err(|e| e.to_string())?;
        let want = pair_auc(&gold, &scores);
        check(got == want, format!("AUC {got} vs enumeration {want} on n={n}"))?;
        instances += 1;
    }
    let ex = roc_auc(&[1, 1, 0, 0], &[0.9, 0.4, 0.3, 0.4]).unwrap();
    check(ex == 0.875, format!("AUC example {ex} != 0.875"))?;

    let gold = [1, 1, 0, 0, 1];
    let pred = [1, 0, 0, 0, 1];
    let acc = accuracy(&gold, &pred).unwrap();
    let f1 = macro_f1(&gold, &pred).unwrap();
    check((acc - 0.8).abs() < 1e-12, format!("accuracy {acc} != 0.8"))?;
    check((f1 - 0.8).abs() < 1e-12, format!("macro-F1 {f1} != 0.8"))?;
    check(accuracy(&[1, 0], &[0, 1]).unwrap() == 0.0, "complementary accuracy")?;
    check(macro_f1(&gold, &gold).unwrap() == 1.0, "perfect macro-F1")?;

    let table = AgreementTable::new(vec![
        vec![Some(1), Some(1)],
        vec![Some(1), Some(0)],
        vec![Some(0), Some(0)],
        vec![Some(0), Some(0)],
    ])
    .unwrap();
    let alpha = krippendorff_alpha(&table).unwrap();
    check(
        (alpha - ALPHA_EXPECTED).abs() < ALPHA_TOL + 1e-6 && (alpha - 8.0 / 15.0).abs() < ALPHA_TOL,
        format!("alpha {alpha}"),
    )?;
    Ok(format!(
        "AUC == pair enumeration on 1000 instances; ACC 0.8, F1 0.8; alpha {alpha:.9} (8/15 ± {ALPHA_TOL:e})"
    ))
}

// ----------------------------------------------------------- ensemble

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Frac(i128, i128);

impl Frac {
    fn new(n: i128, d: i128) -> Self {
        Frac(n, d)
    }
    fn lt(self, o: Frac) -> bool {
        self.0 * o.1 < o.0 * self.1
    }
    fn eq(self, o: Frac) -> bool {
        self.0 * o.1 == o.0 * self.1
    }
}

/// Weighted Gini impurity `sum_side n_side * (1 - sum p^2)` of a
/// partition, as an exact fraction.
fn partition_impurity(left: &[u8], right: &[u8]) -> Frac {
    let side = |s: &[u8]| -> (i128, i128) {
        let n = s.len() as i128;
        let p = s.iter().filter(|&&l| l == 1).count() as i128;
        // n - (p^2 + q^2) / n  =  (n^2 - p^2 - q^2) / n
        (n * n - p * p - (n - p) * (n - p), n)
    };
    let (a, da) = side(left);
    let (b, db) = side(right);
    Frac::new(a * db + b * da, da * db)
}

/// Exhaustive CART: every feature, every midpoint between consecutive
/// distinct values, lowest impurity wins, ties to lowest feature then
/// lowest threshold.
fn oracle_tree(x: &[Vec<f64>], y: &[u8], max_depth: usize) -> DecisionTree {
    fn grow(x: &[Vec<f64>], y: &[u8], idx: &[usize], depth: usize, max_depth: usize, out: &mut Vec<Node<ClassCounts>>) {
        let pos = idx.iter().filter(|&&i| y[i] == 1).count();
        let leaf = Node::Leaf(ClassCounts {
            negative: (idx.len() - pos) as f64,
            positive: pos as f64,
        });
        if pos == 0 || pos == idx.len() || depth >= max_depth || idx.len() < 2 {
            out.push(leaf);
            return;
        }
        let mut best: Option<(Frac, usize, f64)> = None;
        for f in 0..x[0].len() {
            let mut vals: Vec<f64> = idx.iter().map(|&i| x[i][f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let mut t = w[0] + (w[1] - w[0]) / 2.0;
                if t >= w[1] {
                    t = w[0];
                }
                let l: Vec<u8> = idx.iter().filter(|&&i| x[i][f] <= t).map(|&i| y[i]).collect();
                let r: Vec<u8> = idx.iter().filter(|&&i| x[i][f] > t).map(|&i| y[i]).collect();
                let imp = partition_impurity(&l, &r);
                let take = match best {
                    None => true,
                    Some((b, bf, bt)) => imp.lt(b) || (imp.eq(b) && (f, t) < (bf, bt)),
                };
                if take {
                    best = Some((imp, f, t));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            out.push(leaf);
            return;
        };
        let me = out.len();
        out.push(Node::Split { feature, threshold, left: 0, right: 0 });
        let l: Vec<usize> = idx.iter().copied().filter(|&i| x[i][feature] <= threshold).collect();
        let r: Vec<usize> = idx.iter().copied().filter(|&i| x[i][feature] > threshold).collect();
        let left = out.len();
        grow(x, y, &l, depth + 1, max_depth, out);
        let right = out.len();
        grow(x, y, &r, depth + 1, max_depth, out);
        out[me] = Node::Split { feature, threshold, left, right };
    }
    let mut nodes = Vec::new();
    let idx: Vec<usize> = (0..x.len()).collect();
    grow(x, y, &idx, 0, max_depth, &mut nodes);
    Tree { nodes }
}

fn ensemble_oracle() -> Outcome {
    let start = Instant::now();
    let res = en_fi();
    let stub = StubScorer::new(STUB).unwrap();
    let d = synthetic("fi", 400, 0.3, 42);
    let models: Vec<String> = (0..2)
        .map(|_| {
            let t = train_pipeline(&d, &PipelineConfig::elmict(42), &res, &stub).unwrap();
            ModelFile::from_trained(&t, 42).to_json()
        })
        .collect();
    check(models[0] == models[1], "same seed produced different model files")?;
    let other = ModelFile::from_trained(
        &train_pipeline(&d, &PipelineConfig::elmict(43), &res, &stub).unwrap(),
        43,
    )
    .to_json();
    check(other != models[0], "different seeds produced identical model files")?;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut datasets = 0;
    while datasets < 100 {
        let n = rng.random_range(2..=64);
        let d = rng.random_range(1..=4);
        let grid = rng.random_bool(0.5);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| if grid { rng.random_range(0..5) as f64 } else { rng.random_range(-1.0..1.0) })
                    .collect()
            })
            .collect();
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        if !y.contains(&0) || !y.contains(&1) {
            continue;
        }
        let max_depth = rng.random_range(1..=8);
        let vectors: Vec<FeatureVector> = x
            .iter()
            .enumerate()
            .map(|(i, v)| FeatureVector {
                message_id: format!("p{i:03}"),
                values: v.clone(),
                schema_version: 1,
            })
            .collect();
        let cfg = TrainConfig {
            n_trees: 1,
            max_depth,
            min_samples_split: 2,
            features_per_split: FeaturesPerSplit::All,
            bootstrap: false,
            seed: datasets,
        };
        let columns: Vec<usize> = (0..d).collect();
        let forest = train_forest_on(&vectors, &y, &cfg, &columns).map_err(|e| e.to_string())?;
        let want = oracle_tree(&x, &y, max_depth);
        check(
            forest.trees[0] == want,
            format!("dataset {datasets}: tree differs from exhaustive CART (n={n}, d={d}, depth {max_depth})"),
        )?;
        datasets += 1;
    }
    let elapsed = start.elapsed();
    within(elapsed, ENSEMBLE_BUDGET)?;
    Ok(format!(
        "byte-identical model files per seed; 100/100 trees equal exhaustive CART; {:.2}s < {}s",
        elapsed.as_secs_f64(),
        ENSEMBLE_BUDGET.as_secs()
    ))
}

// -------------------------------------------------------- experiments

fn monolingual() -> Outcome {
    let start = Instant::now();
    let d = synthetic("fi", 2000, 0.3, 42);
    let stub = StubScorer::new(STUB).unwrap();
    let pipelines = [PipelineConfig::elmict(42), PipelineConfig::whitespace_ablation(42)];
    let reports = crossval_many(&d, &pipelines, &en_fi(), &stub, 5, 42).map_err(|e| e.to_string())?;
    let (elmict, ws) = (reports[0].f1_macro, reports[1].f1_macro);
    let elapsed = start.elapsed();
    check(elmict >= MONO_F1_MIN, format!("ELMICT macro-F1 {elmict:.4} < {MONO_F1_MIN}"))?;
    check(elmict > ws, format!("ELMICT {elmict:.4} not above whitespace ablation {ws:.4}"))?;
    within(elapsed, EXPERIMENT_BUDGET)?;
    Ok(format!(
        "5-fold macro-F1 ELMICT {elmict:.4} >= {MONO_F1_MIN}, whitespace-only {ws:.4}; {:.1}s < {}s",
        elapsed.as_secs_f64(),
        EXPERIMENT_BUDGET.as_secs()
    ))
}

fn cross_lingual() -> Outcome {
    let start = Instant::now();
    let stub = StubScorer::new(STUB).unwrap();
    let train = synthetic("fi", 2000, 0.3, 42);
    let test = synthetic("es", 1000, 0.3, 43);
    let trained =
        train_pipeline(&train, &PipelineConfig::elmict(42), &en_fi(), &stub).map_err(|e| e.to_string())?;
    let r = zero_shot_eval(&trained, &test, &en_es(), &stub).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(r.f1_macro >= XLING_F1_MIN, format!("zero-shot macro-F1 {:.4} < {XLING_F1_MIN}", r.f1_macro))?;
    within(elapsed, EXPERIMENT_BUDGET)?;
    Ok(format!(
        "en+fi → en+es zero-shot macro-F1 {:.4} >= {XLING_F1_MIN}; {:.1}s < {}s",
        r.f1_macro,
        elapsed.as_secs_f64(),
        EXPERIMENT_BUDGET.as_secs()
    ))
}

// --------------------------------------------------------- invariants

/// Each invariant check is driven down its accepting and its rejecting
/// branch; the line reports how many of those branches were reached.
fn invariants() -> Outcome {
    let mut hit: BTreeMap<&str, bool> = BTreeMap::new();
    let mut mark = |name: &'static str, reached: bool| {
        let e = hit.entry(name).or_insert(false);
        *e |= reached;
    };

    // filter_short: subset, order, idempotence, keep and drop branches
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..200 {
        let msgs: Vec<Message> = (0..rng.random_range(0..20))
            .map(|i| {
                let words = rng.random_range(1..9);
                Message::new(format!("{round}-{i}"), vec!["w"; words].join(" "))
            })
            .collect();
        let d = Dataset::new(msgs, "t").unwrap();
        let m = rng.random_range(1..8);
        let f = filter_short(&d, m);
        let ids: Vec<&str> = d.messages().iter().map(|x| x.id.as_str()).collect();
        let mut pos = 0;
        for x in f.messages() {
            let at = ids[pos..].iter().position(|&i| i == x.id).ok_or("filter_short reordered or invented messages")?;
            pos += at + 1;
            check(whitespace_tokenize(&x.text).len() >= m, "short message kept")?;
        }
        check(filter_short(&f, m) == f, "filter_short not idempotent")?;
        check(filter_short(&d, 1) == d, "min_tokens=1 not identity")?;
        mark("filter.keep", !f.is_empty());
        mark("filter.drop", f.len() < d.len());
    }

    // stratification: balance within 1, partition, determinism, rejection
    for seed in 0..50u64 {
        let n_pos = rng.random_range(5..40);
        let n_neg = rng.random_range(5..60);
        let k = rng.random_range(2..=5);
        let msgs: Vec<Message> = (0..n_pos + n_neg)
            .map(|i| Message::new(format!("s{i:03}"), "a b c").with_label((i < n_pos) as u8))
            .collect();
        let d = Dataset::new(msgs, "t").unwrap();
        let plan = stratified_kfold(&d, k, seed).map_err(|e| e.to_string())?;
        check(plan.assignments.iter().all(|&f| f < k), "fold index out of range")?;
        let sizes = plan.fold_sizes();
        check(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "fold sizes differ by more than 1")?;
        for fold in 0..k {
            let pos = plan.test_indices(fold).iter().filter(|&&i| i < n_pos).count() as f64;
            let ideal = n_pos as f64 / k as f64;
            check((pos - ideal).abs() <= 1.0, format!("fold {fold}: {pos} positives vs ideal {ideal}"))?;
        }
        check(stratified_kfold(&d, k, seed).unwrap() == plan, "stratification not deterministic")?;
        mark("kfold.accept", true);
        mark("kfold.reject", stratified_kfold(&d, n_pos + 1, seed).is_err());
    }

    // schema guard
    let schema = FeatureSchema::v1();
    let res = en_fi();
    let stub = StubScorer::new(STUB).unwrap();
    let m = Message::new("g", "we walk to the sauna today");
    let v = assemble_features(&m, &res, &stub).unwrap();
    mark("schema.accept", v.check(&schema).is_ok());
    let mut wrong_version = v.clone();
    wrong_version.schema_version = 2;
    mark("schema.reject_version", wrong_version.check(&schema).is_err());
    let mut wrong_width = v.clone();
    wrong_width.values.pop();
    mark("schema.reject_width", wrong_width.check(&schema).is_err());
    let d = synthetic("fi", 40, 0.5, 1);
    let trained = train_pipeline(&d, &PipelineConfig::elmict(1), &res, &stub).unwrap();
    mark("predict.accept", trained.model.predict_proba(&v).is_ok());
    mark("predict.reject", trained.model.predict_proba(&wrong_version).is_err());

    // whitespace fertility is exactly 1
    for _ in 0..500 {
        let s = random_unicode(&mut rng, 40);
        let stats = token_stats(&WhitespaceTokenizer.encode_words(&s));
        if stats.word_count > 0 {
            check(stats.fertility == 1.0, format!("whitespace fertility {} on {s:?}", stats.fertility))?;
            mark("fertility.words", true);
        } else {
            check(stats.degenerate, "empty text not flagged degenerate")?;
            mark("fertility.empty", true);
        }
    }

    // proportion bookkeeping
    for _ in 0..100 {
        let msgs: Vec<Message> = (0..rng.random_range(1..80))
            .map(|i| {
                Message::new(format!("b{i}"), "some words here")
                    .with_label(rng.random_range(0..2))
                    .with_topic(rng.random_range(-1..4))
            })
            .collect();
        let d = Dataset::new(msgs, "t").unwrap();
        let s = codemix_proportions(&d, 3).map_err(|e| e.to_string())?;
        let counted: usize = s.iter().map(|t| t.size).sum();
        let non_outliers = d.messages().iter().filter(|m| m.topic_id != Some(-1)).count();
        check(counted == non_outliers, "topic sizes do not cover non-outlier messages")?;
        for t in &s {
            let flair_total: usize = t.flair_breakdown.values().map(|c| c.count).sum();
            check(flair_total == t.size, "flair counts do not sum to topic size")?;
            check((0.0..=1.0).contains(&t.codemix_proportion), "proportion outside [0, 1]")?;
        }
        mark("proportions.topics", !s.is_empty());
        mark("proportions.outliers", non_outliers < d.len());
    }
    let unlabeled = Dataset::new(vec![Message::new("u", "x").with_topic(0)], "t").unwrap();
    mark("proportions.reject_unlabeled", codemix_proportions(&unlabeled, 3).is_err());

    // gradient boosting: training log-loss never rises from one round to the next
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(10..60);
        let x: Vec<FeatureVector> = (0..n)
            .map(|i| FeatureVector {
                message_id: format!("g{i:03}"),
                values: vec![rng.random_range(0.0..1.0), rng.random_range(0..3) as f64],
                schema_version: 1,
            })
            .collect();
        let mut y: Vec<u8> = x.iter().map(|v| (v.values[0] + rng.random_range(-0.3..0.3) > 0.5) as u8).collect();
        y[0] = 0;
        y[1] = 1;
        let cfg = GradientBoostConfig { rounds: 25, ..GradientBoostConfig::default() };
        let full = train_gboost(&x, &y, &cfg, &[0, 1]).map_err(|e| e.to_string())?;
        let loss = |m: &GradientBoostModel| -> f64 {
            x.iter()
                .zip(&y)
                .map(|(v, &l)| {
                    let p = m.predict_proba(v).unwrap();
                    if l == 1 { -p.ln() } else { -(1.0 - p).ln() }
                })
                .sum::<f64>()
                / n as f64
        };
        let mut prev = f64::INFINITY;
        for rounds in 0..=full.trees.len() {
            let prefix = GradientBoostModel { trees: full.trees[..rounds].to_vec(), ..full.clone() };
            let l = loss(&prefix);
            check(l <= prev + 1e-12, format!("seed {seed}: log-loss rose to {l} at round {rounds}"))?;
            mark("gboost.decrease", l < prev);
            prev = l;
        }
    }

    let reached = hit.values().filter(|&&v| v).count();
    let coverage = reached as f64 / hit.len() as f64;
    let missing: Vec<&&str> = hit.iter().filter(|(_, &v)| !v).map(|(k, _)| k).collect();
    check(
        coverage >= BRANCH_COVERAGE_MIN,
        format!("branches reached {reached}/{}: missing {missing:?}", hit.len()),
    )?;
    Ok(format!(
        "filter_short, stratification, schema guard, fertility 1.0, proportions, gboost loss: {reached}/{} check branches reached",
        hit.len()
    ))
}

// ----------------------------------------------------------- analysis

fn analysis_recovery() -> Outcome {
    let mut msgs = Vec::new();
    for (topic, mixed) in [(0i64, 80usize), (1, 20)] {
        for i in 0..100 {
            let label = (i < mixed) as u8;
            msgs.push(
                Message::new(format!("t{topic}-{i:03}"), format!("topic {topic} words number {i}"))
                    .with_label(label)
                    .with_topic(topic)
                    .with_flair(if i % 2 == 0 { "Immigration" } else { "Work" }),
            );
        }
    }
    let d = Dataset::new(msgs, "planted").unwrap();
    let s = codemix_proportions(&d, 5).map_err(|e| e.to_string())?;
    let rates: Vec<f64> = s.iter().map(|t| t.codemix_proportion).collect();
    check(rates == vec![0.8, 0.2], format!("recovered {rates:?}"))?;
    let mixed: usize = s.iter().flat_map(|t| t.flair_breakdown.values()).map(|c| c.code_mixed).sum();
    check(mixed == d.messages().iter().filter(|m| m.label == Some(CODE_MIXED)).count(), "flair cells lost code-mixed messages")?;

    // topic 0: "sauna kela sauna" -> sauna 2, kela 1, "sauna kela" 1, "kela sauna" 1 (5 terms)
    // topic 1: "kela office"      -> kela 1, office 1, "kela office" 1            (3 terms)
    // A = 8 / 2 = 4; f(sauna) = 2, f(kela) = 2, every bigram 1
    let mut topics = BTreeMap::new();
    topics.insert(0, vec!["sauna kela sauna"]);
    topics.insert(1, vec!["kela office"]);
    let got = ctfidf(&topics, (1, 2), None).map_err(|e| e.to_string())?;
    let hand: [(i64, &str, f64); 6] = [
        (0, "sauna", 2.0 * 3.0f64.ln()),
        (0, "kela", 3.0f64.ln()),
        (0, "sauna kela", 5.0f64.ln()),
        (0, "kela sauna", 5.0f64.ln()),
        (1, "office", 5.0f64.ln()),
        (1, "kela", 3.0f64.ln()),
    ];
    let mut worst = 0.0f64;
    for (t, term, want) in hand {
        let score = got[&t].iter().find(|x| x.0 == term).ok_or(format!("missing {term}"))?.1;
        worst = worst.max((score - want).abs());
    }
    check(worst <= CTFIDF_TOL, format!("c-TF-IDF off by {worst:e}"))?;
    Ok(format!("planted rates [0.8, 0.2] recovered exactly; c-TF-IDF max error {worst:.1e} <= {CTFIDF_TOL:e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("bpe-oracle", bpe_oracle),
        ("metric-oracles", metric_oracles),
        ("ensemble-determinism-cart", ensemble_oracle),
        ("synthetic-monolingual", monolingual),
        ("synthetic-cross-lingual", cross_lingual),
        ("pipeline-invariants", invariants),
        ("analysis-recovery", analysis_recovery),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
