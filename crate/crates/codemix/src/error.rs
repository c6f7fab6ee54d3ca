use std::path::PathBuf;

/// Errors surfaced by file formats, config handling and commands.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: codemix_core::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: unsupported format version {found} (expected {expected})")]
    FormatVersion {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("missing {what}: {path}")]
    MissingPath { what: String, path: PathBuf },

    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const DATA: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

impl Error {
    pub fn core(stage: &'static str) -> impl FnOnce(codemix_core::Error) -> Error {
        move |source| Error::Core { stage, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub fn exit_code(&self) -> i32 {
        use codemix_core::Error as C;
        match self {
            Error::Config(_) | Error::MissingPath { .. } | Error::FormatVersion { .. } => {
                exit::VALIDATION
            }
            Error::Parse { .. } | Error::Io { .. } => exit::DATA,
            Error::Internal(_) => exit::INTERNAL,
            Error::Core { source, .. } => match source {
                C::InvalidArgument(_)
                | C::MergeNotInVocab { .. }
                | C::UnderivableSymbol { .. }
                | C::DuplicateMerge { .. }
                | C::TooFewModels { .. }
                | C::UnknownLanguage(_)
                | C::SchemaMismatch { .. }
                | C::WrongWidth { .. }
                | C::LexiconOverlap(_) => exit::VALIDATION,
                C::DuplicateId(_)
                | C::ClassTooSmall { .. }
                | C::Unlabeled(_)
                | C::EmptyCorpus(_)
                | C::EmptyWord
                | C::MissingSoftLabel(_)
                | C::ProbabilityOutOfRange { .. }
                | C::SingleClass
                | C::LengthMismatch { .. }
                | C::EmptyInput
                | C::TrainTestOverlap(_)
                | C::EmptyTopic(_)
                | C::NoPairableValues => exit::DATA,
            },
        }
    }
}
