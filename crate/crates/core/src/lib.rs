//! Phrase search over an encrypted positional inverted index.
//!
//! Document locations are BGN ciphertexts in a composite-order pairing
//! group, so the server can check that two encrypted positions are
//! consecutive with one pairing and no decryption. Keywords are hidden behind
//! split-matrix encrypted identifiers, and every inverted list is divided and
//! padded to a common length.
//!
//! The group parameters used in tests are far too small to be secure.
//! This crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod bgn;
pub mod codec;
pub mod curve;
pub mod error;
pub mod field;
pub mod index;
pub mod keys;
pub mod knn;
pub mod pairing;
pub mod prime;
pub mod prp;
pub mod query;
pub mod rand_util;
pub mod trapdoor;

pub use bgn::{BgnPublicKey, BgnSecretKey, GroupElement, GroupParams, PairingValue};
pub use error::Error;
pub use index::{DocId, PlainInvertedList, SecureIndex};
pub use keys::{keygen, MasterKey, PublicParams};
pub use query::{execute_query, QueryResult, QueryStats};
pub use trapdoor::{gen_trapdoor, PhraseQuery, Trapdoor};
