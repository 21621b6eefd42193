use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid message space: {0}")]
    InvalidSpace(String),

    #[error("message space too small: {0}")]
    DegenerateSpace(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("message is not in the codebook")]
    NotInCodebook,

    #[error("no codeword is a prefix of the stream")]
    NotACodeword,

    #[error("external compressor `{0}` is not deterministic")]
    NondeterministicCompressor(String),

    #[error("external compressor `{id}` failed: {reason}")]
    CompressorFailed { id: String, reason: String },

    #[error("invalid length: {0}")]
    InvalidLength(String),

    #[error("key pool exhausted: requested {requested} bits, {remaining} remaining")]
    KeyExhausted { requested: u64, remaining: u64 },

    #[error("key pool file: {0}")]
    PoolFormat(String),

    #[error("decryption failed: {0}")]
    DecryptionFailed(String),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("codebook file: {0}")]
    CodebookFormat(String),

    #[error("message space file: {0}")]
    SpaceFormat(String),

    #[error("wire format: {0}")]
    WireFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier of the error variant, used in machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpace(_) => "InvalidSpace",
            Error::DegenerateSpace(_) => "DegenerateSpace",
            Error::InvalidCode(_) => "InvalidCode",
            Error::NotInCodebook => "NotInCodebook",
            Error::NotACodeword => "NotACodeword",
            Error::NondeterministicCompressor(_) => "NondeterministicCompressor",
            Error::CompressorFailed { .. } => "CompressorFailed",
            Error::InvalidLength(_) => "InvalidLength",
            Error::KeyExhausted { .. } => "KeyExhausted",
            Error::PoolFormat(_) => "PoolFormatError",
            Error::DecryptionFailed(_) => "DecryptionFailed",
            Error::EnumerationTooLarge(_) => "EnumerationTooLarge",
            Error::CodebookFormat(_) => "CodebookFormatError",
            Error::SpaceFormat(_) => "SpaceFormatError",
            Error::WireFormat(_) => "WireFormatError",
            Error::Io(_) => "Io",
        }
    }
}
