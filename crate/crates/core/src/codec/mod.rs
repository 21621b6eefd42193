//! Prefix-free codes: construction, validation, encoding and decoding.

pub mod code;
pub mod codebook;
pub mod external;
pub mod huffman;
pub mod space;
pub mod trim;

pub use code::{ceil_log2, max_codeword_length, verify_prefix_free, PrefixCode, PrefixDecoder, Step};
pub use codebook::Codebook;
pub use external::{wrap_external, CommandCompressor, ExternalCompressor, FnCompressor};
pub use huffman::build_huffman;
pub use space::{parse_space, write_space, MessageSpace};
pub use trim::{bin, trim_code};

/// Encodes `message` with `code`.
pub fn encode<'a>(code: &'a PrefixCode, message: &[u8]) -> crate::Result<&'a crate::BitString> {
    code.encode(message)
}

/// Decodes the codeword at the front of `stream`.
pub fn decode_prefix<'a>(
    code: &'a PrefixCode,
    stream: &crate::BitString,
) -> crate::Result<(&'a [u8], usize)> {
    code.decode_prefix(stream)
}
