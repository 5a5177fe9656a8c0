use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("insufficient objects: need {needed}, have {available}")]
    InsufficientObjects { needed: usize, available: usize },

    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: String, found: String },

    #[error("truncated payload: {0}")]
    Truncated(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("zero-norm vector: {0}")]
    ZeroNorm(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn image(path: impl Into<PathBuf>) -> impl FnOnce(image::ImageError) -> Error {
        let path = path.into();
        move |source| Error::Image { path, source }
    }
}
