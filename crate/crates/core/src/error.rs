use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("invalid sampling rate {0} Hz")]
    InvalidRate(f64),

    #[error("invalid band ({lo}, {hi}) Hz at fs = {fs} Hz")]
    InvalidBand { lo: f64, hi: f64, fs: f64 },

    #[error("filter of {taps} taps is longer than a third of the {len}-sample signal")]
    FilterTooLong { taps: usize, len: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("amplitude selection is empty")]
    EmptySelection,

    #[error("phase is constant; input is not oscillatory")]
    DegenerateFit,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("could not place {requested} events without overlap after {attempts} attempts")]
    Placement { requested: usize, attempts: usize },

    #[error("no HFO component: comb peak {prominence_db:.2} dB above in-band median")]
    NoHfoComponent { prominence_db: f64 },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed signal file header: {0}")]
    Header(String),

    #[error("malformed signal file payload: {0}")]
    Payload(String),

    #[error("metadata: {0}")]
    Metadata(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    /// Strip stage wrappers down to the originating error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
