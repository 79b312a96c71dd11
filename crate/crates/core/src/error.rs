use crate::solver::IterationRecord;

/// Errors raised by the solvers, operators and file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A non-finite value appeared inside an iteration.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// A point left the interior of the kernel domain.
    #[error("point outside int dom(h): {0}")]
    Domain(String),

    /// Step size or line-search parameters violate the initialization inequality.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterate became non-finite. The trace up to the failure is attached.
    #[error("iterate diverged at iteration {iteration}")]
    Divergence {
        iteration: usize,
        trace: Box<Vec<IterationRecord>>,
    },

    #[error("parse error in {source_name}{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn ensure_same_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(invalid(format!("{what}: length mismatch ({a} vs {b})")));
    }
    Ok(())
}

pub(crate) fn file_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::File {
        path: path.display().to_string(),
        source,
    }
}

pub(crate) fn open_file(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(file_err(path))
}

pub(crate) fn create_file(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(file_err(path))
}
