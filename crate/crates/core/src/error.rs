use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// An instance was built with a zero count, bad weights, or a size mismatch.
    InvalidInstance(&'static str),
    /// A matching refers to an individual outside the instance or is not injective.
    InvalidMatching {
        boy: usize,
        girl: usize,
    },
    /// A matching was built for different counts than the instance it is used with.
    DimensionMismatch,
    /// The operation only makes sense for `|G| = |B|`.
    Unbalanced {
        girls: usize,
        boys: usize,
    },
    /// A weighted criterion or policy was used without the weights it needs.
    MissingWeights(&'static str),
    /// The operation needs an instance without weights.
    Weighted,
    InvalidPermutation,
    InvalidArrival(&'static str),
    /// A policy picked a girl that is out of range or already matched.
    ProtocolViolation {
        time: usize,
        girl: usize,
    },
    InvalidParameter(&'static str),
    UnknownPolicy,
    /// Exhaustive computation refused because `n` exceeds the configured cap.
    TooLarge {
        n: usize,
        cap: usize,
        estimated_nodes: u128,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInstance(msg) => write!(f, "invalid instance: {msg}"),
            Error::InvalidMatching { boy, girl } => {
                write!(f, "invalid matching entry: boy {boy} -> girl {girl}")
            }
            Error::DimensionMismatch => f.write_str("matching does not fit the instance"),
            Error::Unbalanced { girls, boys } => {
                write!(f, "instance must be balanced, got {girls} girls and {boys} boys")
            }
            Error::MissingWeights(side) => write!(f, "missing {side} weights"),
            Error::Weighted => f.write_str("operation requires an unweighted instance"),
            Error::InvalidPermutation => f.write_str("not a permutation of the boys"),
            Error::InvalidArrival(msg) => write!(f, "invalid arrival process: {msg}"),
            Error::ProtocolViolation { time, girl } => {
                write!(f, "policy chose unavailable girl {girl} at time {time}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnknownPolicy => f.write_str("unknown policy name"),
            Error::TooLarge { n, cap, estimated_nodes } => {
                write!(f, "n = {n} exceeds the cap of {cap} (about {estimated_nodes} tree nodes)")
            }
        }
    }
}

impl core::error::Error for Error {}
