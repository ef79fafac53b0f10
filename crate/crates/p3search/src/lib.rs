//! Networked roles, file formats and tooling around `p3search-core`.
//!
//! The data owner ([`owner`]) builds the encrypted index and answers
//! trapdoor and decryption requests, the server ([`server`]) hosts the index
//! and runs queries, and users ([`client`]) drive a search across both.
//! All messages travel as checksummed frames ([`wire`]).

pub mod bench;
pub mod client;
pub mod corpus;
pub mod docs;
pub mod error;
pub mod formats;
pub mod oracle;
pub mod owner;
pub mod server;
pub mod transport;
pub mod wire;

pub use error::{Error, Result};
pub use p3search_core as core;
