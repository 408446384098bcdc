use std::io;
use std::path::{Path, PathBuf};

use dfam_core::Error as CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Manifest(String),
    #[error("{0}")]
    BadConfig(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Coarse error classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Usage,
    Io,
    Format,
    Manifest,
    Config,
    Data,
    Model,
    Protocol,
    Training,
}

impl Category {
    pub const ALL: [Self; 9] = [
        Self::Usage,
        Self::Io,
        Self::Format,
        Self::Manifest,
        Self::Config,
        Self::Data,
        Self::Model,
        Self::Protocol,
        Self::Training,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Usage => "usage",
            Self::Io => "io",
            Self::Format => "format",
            Self::Manifest => "manifest",
            Self::Config => "config",
            Self::Data => "data",
            Self::Model => "model",
            Self::Protocol => "protocol",
            Self::Training => "training",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Self::Usage => 2,
            Self::Io => 3,
            Self::Format => 4,
            Self::Manifest => 5,
            Self::Config => 6,
            Self::Data => 7,
            Self::Model => 8,
            Self::Protocol => 9,
            Self::Training => 10,
        }
    }
}

fn core_category(e: &CoreError) -> Category {
    use CoreError::*;
    match e {
        BadFilterLength { .. }
        | BadWindowSize(_)
        | BadOverlap(_)
        | BadBinCount { .. }
        | BadSamplingRate(_)
        | InvalidParameter(_)
        | InvalidDetector(_) => Category::Config,
        InvalidStream(_)
        | InsufficientSamples { .. }
        | NegativeFrequency(_)
        | NonFiniteFrequency
        | MisalignedWindows(_)
        | MissingStream(_)
        | EmptyActivity(_)
        | ConfigMismatch(_)
        | ShapeMismatch(_)
        | InvalidLabel(_)
        | DegenerateWindow(_)
        | DegenerateTrainingSet(_)
        | DimensionMismatch { .. }
        | WindowSizeMismatch { .. } => Category::Data,
        EmptyModel | CorruptModel(_) | NotFitted => Category::Model,
        BadFoldCount { .. } | SingleSubject => Category::Protocol,
        FoldTrainingFailure { .. } => Category::Training,
    }
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl ToString) -> Self {
        Self::Format {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Self::Io { .. } => Category::Io,
            Self::Format { .. } => Category::Format,
            Self::Manifest(_) => Category::Manifest,
            Self::BadConfig(_) => Category::Config,
            Self::Core(e) => core_category(e),
        }
    }

    /// `error: category=<name> message=<quoted>`, one line.
    pub fn report_line(&self) -> String {
        format!("error: category={} message={:?}", self.category().as_str(), self.to_string())
    }
}
