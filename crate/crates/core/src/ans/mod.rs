//! Single-state entropy coding: closed-form binary systems, keyed tabled
//! coders, and the b-absorbing stream layer.

pub mod abs;
pub mod coder;
pub mod container;
pub mod forbidden;
pub mod stream;
pub mod table;
pub mod waste;

use thiserror::Error;

pub use abs::{abs_decode_step, abs_encode_step, abs_validate, AbsCoder, AbsParams, AbsVariant, AbsViolation, Ratio};
pub use coder::SymbolCoder;
pub use container::{Codec, Container};
pub use forbidden::{decode_guarded, forbidden_symbol_wrap};
pub use stream::{absorb, ans_stream_decode, ans_stream_decode_all, ans_stream_encode, StreamDecoder, StreamEncoder};
pub use table::{apportion, AnsTable, Spread};
pub use waste::{measure_rate, waste_estimate, RateMeasurement};

#[derive(Debug, Error)]
pub enum AnsError {
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("symbol {symbol} rounds to an empty interval")]
    DegenerateSymbol { symbol: usize },
    #[error("symbol {symbol} cannot be encoded with this table")]
    UnencodableSymbol { symbol: usize },
    #[error("table exceeds the in-memory limit")]
    TableTooLarge,
    #[error("state {x} is outside the coding interval")]
    StateOutOfRange { x: u64 },
    #[error("stream ended or was damaged while decoding symbol {position}")]
    CorruptStream { position: usize },
    #[error("forbidden symbol decoded at position {position}")]
    ErrorDetected { position: usize },
    #[error("invalid ABS parameters: {0}")]
    Abs(AbsViolation),
    #[error("container: {0}")]
    Container(String),
}
