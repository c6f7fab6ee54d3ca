#![allow(dead_code)]

use std::path::{Path, PathBuf};

use codemix::config::RunConfig;
use codemix::langmodel::read_word_list;
use codemix::resources::{load_resources, load_target};
use codemix_core::corpus::{generate_synthetic, Dataset, SynthConfig};
use codemix_core::features::Resources;

pub fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/toy")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn toy_config_path() -> PathBuf {
    toy_dir().join("en-fi.toml")
}

pub fn toy_config() -> RunConfig {
    RunConfig::load(&toy_config_path()).unwrap()
}

pub fn en_fi() -> Resources {
    load_resources(toy_config().resources().unwrap()).unwrap()
}

pub fn en_es() -> Resources {
    let cfg = toy_config();
    load_target(&en_fi(), cfg.target().unwrap()).unwrap()
}

pub fn lexicon(lang: &str) -> Vec<String> {
    read_word_list(&toy_dir().join(format!("{lang}.words.txt"))).unwrap()
}

pub fn synthetic(local: &str, n: usize, rate: f64, seed: u64) -> Dataset {
    let mut cfg = SynthConfig::new(lexicon("en"), lexicon(local));
    cfg.n_messages = n;
    cfg.mix_rate = rate;
    cfg.seed = seed;
    cfg.id_prefix = format!("{local}{seed}");
    generate_synthetic(&cfg).unwrap()
}
