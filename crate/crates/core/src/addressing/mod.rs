//! Destination-set encodings for multicast spike packets.
//!
//! Four schemes are supported: the flat bit string (exact), the ternary
//! symbol string (region based, power-of-two core counts only), the
//! hierarchical bit string (region based, any `k^L`), and unicast lists.
//! Core index digits are root level first, so level 1 is the most
//! significant base-k digit.

mod address;
mod codec;
mod text;
mod tree;

use thiserror::Error;

pub use address::{
    DestinationSet, FbsAddress, HbsAddress, MulticastAddress, Scheme, Symbol, SymbolAddress,
};
pub use codec::{
    covered_set, encode, encode_fbs, encode_hbs, encode_symbol, encode_unicast, header_bits,
    overcoverage, rotate_hbs, routing_bit_width, RoutingBitWidth,
};
pub(crate) use codec::digits_of;
pub use text::{format_address, parse_address, parse_core_list};
pub use tree::{index_of, path_of, CorePath, TreeConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AddressError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("core {index} out of range for {cores} cores")]
    CoreOutOfRange { index: usize, cores: usize },
    #[error("destination set is empty")]
    EmptyDestinationSet,
    #[error("symbol scheme requires a power-of-two core count, got {cores}")]
    SymbolRequiresPowerOfTwo { cores: usize },
    #[error("malformed address: {0}")]
    Malformed(String),
    #[error("cover does not contain every destination")]
    CoverMissesDestinations,
    #[error("unknown scheme {0:?} (expected fbs, symbol, hbs or unicast)")]
    UnknownScheme(String),
    #[error("cannot parse {0}")]
    Parse(String),
}
