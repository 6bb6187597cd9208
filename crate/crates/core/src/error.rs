use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("phantom support radius {extent} exceeds detector half-extent s_max = {s_max}")]
    SupportExceedsDetector { extent: f64, s_max: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("spectrum is monochromatic (delta = 0); use the monochromatic projection")]
    Monochromatic,

    #[error("{0}")]
    InvalidInput(String),

    #[error("noise spikes collide on grid node (phi index {phi_index}, s index {s_index})")]
    SpikeCollision { phi_index: usize, s_index: usize },

    #[error("series convergence guard violated: |alpha*delta|*max(R chi_D) = {0} > 1")]
    SeriesGuard(f64),

    #[error("metal trace touches the detector boundary at angle index {0}")]
    TraceTouchesBoundary(usize),

    #[error("Poisson solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config field `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
