use alloc::string::String;

/// Errors raised by the core pipeline.
///
/// Variants carry enough context (row numbers, ids, ranks) to locate the
/// offending input without re-running anything.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate message id `{0}`")]
    DuplicateId(String),

    #[error("class {class} has {found} members, need at least {needed}")]
    ClassTooSmall { class: u8, found: usize, needed: usize },

    #[error("message `{0}` has no label")]
    Unlabeled(String),

    #[error("merge at rank {rank} produces `{token}` which is not in the vocabulary")]
    MergeNotInVocab { rank: usize, token: String },

    #[error("merge at rank {rank} uses symbol `{symbol}` which cannot be derived")]
    UnderivableSymbol { rank: usize, symbol: String },

    #[error("duplicate merge pair ({left}, {right}) at rank {rank}")]
    DuplicateMerge { rank: usize, left: String, right: String },

    #[error("empty training corpus for language `{0}`")]
    EmptyCorpus(String),

    #[error("empty word")]
    EmptyWord,

    #[error("need at least {needed} language models, got {found}")]
    TooFewModels { needed: usize, found: usize },

    #[error("no language model tagged `{0}`")]
    UnknownLanguage(String),

    #[error("no soft label for message `{0}`")]
    MissingSoftLabel(String),

    #[error("probability {value} out of range [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("feature schema mismatch: expected version {expected}, got {found}")]
    SchemaMismatch { expected: u32, found: u32 },

    #[error("feature vector has {found} values, schema expects {expected}")]
    WrongWidth { expected: usize, found: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("message `{0}` also appears in the training set")]
    TrainTestOverlap(String),

    #[error("topic {0} has no documents")]
    EmptyTopic(i64),

    #[error("lexicons overlap on `{0}`")]
    LexiconOverlap(String),

    #[error("no pairable values in agreement table")]
    NoPairableValues,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
