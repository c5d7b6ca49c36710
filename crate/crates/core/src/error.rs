use core::fmt;

/// Failure modes shared by every operation in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on a dimension (`what`, expected, found).
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A scalar argument is outside its admissible range.
    InvalidArgument(&'static str),
    /// A value that must be finite was NaN or infinite.
    NonFinite,
    /// A normalized image was expected and a raw one supplied, or vice versa.
    Normalization { expected_normalized: bool },
    /// An index (pattern, transition, black index) lies outside `1..=len`.
    IndexOutOfRange { index: usize, len: usize },
    /// The supplied ordering is not a bijection on `1..=len`.
    InvalidPermutation,
    /// `backward` was called without a cached forward pass.
    BackwardBeforeForward,
    /// A dataset was empty or its samples disagree in shape.
    Dataset(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what} mismatch: expected {expected}, found {found}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonFinite => f.write_str("non-finite value"),
            Error::Normalization {
                expected_normalized: true,
            } => f.write_str("expected a normalized coded image"),
            Error::Normalization {
                expected_normalized: false,
            } => f.write_str("coded image is already normalized"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range 1..={len}")
            }
            Error::InvalidPermutation => f.write_str("not a permutation"),
            Error::BackwardBeforeForward => f.write_str("backward called before forward"),
            Error::Dataset(msg) => write!(f, "dataset: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
