use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Peak shift left the linear region around the reference detuning.
    #[error(
        "readout saturated: peak shift {shift_hz:.6e} Hz exceeds linear region ±{limit_hz:.6e} Hz"
    )]
    Saturation { shift_hz: f64, limit_hz: f64 },

    #[error("dither amplitude {dither_hz:.6e} Hz outside (0, {limit_hz:.6e}] Hz")]
    Precision { dither_hz: f64, limit_hz: f64 },

    #[error("homodyne violation: RF at {rf_rad_s} rad/s, LO at {lo_rad_s} rad/s")]
    Homodyne { rf_rad_s: f64, lo_rad_s: f64 },

    #[error("LO dominance violated: A_LO/A_RF = {ratio:.3} < {min}")]
    LoRatio { ratio: f64, min: f64 },

    #[error(
        "instantaneous bandwidth {bandwidth_hz:.6e} Hz exceeds receiver limit {limit_hz:.6e} Hz"
    )]
    Bandwidth { bandwidth_hz: f64, limit_hz: f64 },

    #[error("resonance lost: occupied band [{low_hz:.6e}, {high_hz:.6e}] Hz outside the tuning window in segment starting at {segment_start_s:.6e} s")]
    Resonance {
        segment_start_s: f64,
        low_hz: f64,
        high_hz: f64,
    },

    #[error("undersampled: fs = {fs_hz:.6e} Hz < {required_hz:.6e} Hz")]
    Sampling { fs_hz: f64, required_hz: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("framing error: {0}")]
    Framing(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("interference ratio undefined for zero-power signal")]
    UndefinedRatio,

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("refusing to aggregate reports with different config hashes ({0} vs {1})")]
    HashMismatch(String, String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn in_trial(self, trial: usize) -> Self {
        Error::Trial {
            trial,
            source: Box::new(self),
        }
    }

    /// Strips trial context, returning the underlying module error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}
