use alloc::boxed::Box;
use alloc::string::String;

use crate::signal::StreamKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid stream: {0}")]
    InvalidStream(String),
    #[error("filter length {length} must be odd and at most the stream length {samples}")]
    BadFilterLength { length: usize, samples: usize },
    #[error("need at least {needed} samples, got {available}")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("window size {0} must be a power of two and at least 8")]
    BadWindowSize(usize),
    #[error("overlap ratio {0} must lie in [0, 1) and leave a stride of at least one sample")]
    BadOverlap(f64),
    #[error("bin count {bins} must lie in 1..={max}")]
    BadBinCount { bins: usize, max: usize },
    #[error("frequency {0} Hz is negative")]
    NegativeFrequency(f64),
    #[error("frequency is not a finite number")]
    NonFiniteFrequency,
    #[error("sampling rate {0} Hz must be positive and finite")]
    BadSamplingRate(f64),
    #[error("windows are not aligned: {0}")]
    MisalignedWindows(String),
    #[error("missing stream {0}")]
    MissingStream(StreamKind),
    #[error("activity {0:?} produced no training windows")]
    EmptyActivity(String),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("model holds no signatures")]
    EmptyModel,
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("invalid activity label: {0}")]
    InvalidLabel(String),
    #[error("window of {0} samples is too short for feature extraction")]
    DegenerateWindow(usize),
    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),
    #[error("classifier used before fit")]
    NotFitted,
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fold count {folds} must lie in 2..={items}")]
    BadFoldCount { folds: usize, items: usize },
    #[error("leave-one-subject-out needs at least two subjects")]
    SingleSubject,
    #[error("fold {fold} failed: {source}")]
    FoldTrainingFailure { fold: usize, source: Box<Error> },
    #[error("window of {found} samples does not match the active model's {expected}")]
    WindowSizeMismatch { expected: usize, found: usize },
    #[error("invalid detector: {0}")]
    InvalidDetector(String),
}
