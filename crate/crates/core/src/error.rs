//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signal must not be empty")]
    EmptySignal,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid plane dimensions {width}x{height} for {samples} samples")]
    InvalidDimensions {
        width: usize,
        height: usize,
        samples: usize,
    },

    #[error("sample at index {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("{levels} decomposition levels are too deep for a {width}x{height} plane")]
    LevelsTooDeep {
        levels: usize,
        width: usize,
        height: usize,
    },

    #[error("plane dimensions {width}x{height} are not dyadic for {levels} levels")]
    NotDyadic {
        width: usize,
        height: usize,
        levels: usize,
    },

    #[error("pyramid is malformed: {0}")]
    MalformedPyramid(String),

    #[error("wavelet argument t={0} is outside [0,1)")]
    ArgOutOfRange(f64),

    #[error("invalid wavelet parameters: {0}")]
    InvalidWaveletParams(String),

    #[error("quantizer fractional bits {0} exceed the maximum of 8")]
    QBitsTooLarge(u8),

    #[error("coefficient {0} overflows the quantized integer range")]
    QuantizerOverflow(f64),

    #[error("coder requires at least one pass")]
    ZeroPasses,

    #[error("coder requires at least one decomposition level")]
    ZeroLevels,

    #[error("requested {requested} passes but the stream holds {available}")]
    PassesExceeded { requested: u32, available: u32 },

    #[error("bitstream ended inside a coding pass")]
    UnexpectedEndOfStream,

    #[error("corrupt bitstream header: {0}")]
    CorruptHeader(String),

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("mean squared error must be non-negative, got {0}")]
    NegativeMse(f64),

    #[error("pixel count must be positive")]
    ZeroPixels,

    #[error(
        "convolution window (kernel {kernel}) does not fit input of {input} with padding {padding}"
    )]
    WindowTooLarge {
        kernel: usize,
        input: usize,
        padding: usize,
    },

    #[error("same-padding requires an odd kernel size, got {0}")]
    EvenKernel(usize),

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage} stage failed")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported image file: {0}")]
    UnsupportedImage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// Tag an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
