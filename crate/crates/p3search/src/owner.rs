//! The data owner: builds and encrypts the index and documents, issues
//! trapdoors, and opens results for users.

use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use p3search_core::index::{build_plain_index, choose_eta, encrypt_fragment, fragment_all, open_doc_id};
use p3search_core::{gen_trapdoor, Error as CoreError, PhraseQuery, SecureIndex, Trapdoor};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::formats::OwnerKeys;
use crate::transport::Service;
use crate::wire::{
    decrypt_response_frame, parse_decrypt_request, EncryptedDocument, ErrorCode, Frame, Kind, OpenedDocument,
    TrapdoorRequest,
};

/// How the common list length η is picked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EtaChoice {
    /// Lower median of keyword document frequencies.
    #[default]
    Median,
    Fixed(usize),
}

impl FromStr for EtaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("median") {
            return Ok(EtaChoice::Median);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(EtaChoice::Fixed(n)),
            _ => Err(format!("expected `median` or a positive integer, got `{s}`")),
        }
    }
}

/// Output of index construction, ready to upload.
#[derive(Clone, Debug)]
pub struct Published {
    pub index: SecureIndex,
    pub docs: Vec<EncryptedDocument>,
    pub eta: usize,
    pub keywords: usize,
    pub build_time: Duration,
}

pub struct Owner {
    keys: OwnerKeys,
    rng: Mutex<ChaCha20Rng>,
}

impl Owner {
    pub fn new(keys: OwnerKeys, rng: ChaCha20Rng) -> Self {
        Owner { keys, rng: Mutex::new(rng) }
    }

    pub fn keys(&self) -> &OwnerKeys {
        &self.keys
    }

    fn with_rng<T>(&self, f: impl FnOnce(&mut ChaCha20Rng) -> T) -> T {
        f(&mut self.rng.lock().expect("rng lock"))
    }

    /// Builds the secure index and encrypts every document. Fragments are
    /// encrypted in parallel, each from its own generator seeded by the
    /// owner's.
    pub fn publish(&self, corpus: &Corpus, eta: EtaChoice) -> Result<Published> {
        self.with_rng(|rng| build(&self.keys, corpus, eta, rng))
    }

    pub fn trapdoor(&self, phrase: &str, conjunctive: bool) -> Result<Trapdoor> {
        let query = PhraseQuery::parse(phrase)?;
        self.with_rng(|rng| Ok(gen_trapdoor(&self.keys.master, &query, conjunctive, rng)?))
    }

    /// Opens ids and bodies; padding ids are dropped.
    pub fn open(&self, docs: &[EncryptedDocument]) -> Result<Vec<OpenedDocument>> {
        let mut out = Vec::new();
        for d in docs {
            let Some(doc_id) = open_doc_id(self.keys.master.prp(), d.enc_doc_id) else {
                continue;
            };
            let body = if d.ciphertext.is_empty() { Vec::new() } else { self.keys.doc_key.open(d)? };
            out.push(OpenedDocument { doc_id, body });
        }
        out.sort_by_key(|d| d.doc_id);
        Ok(out)
    }
}

/// Fresh owner secrets: master key with `tau`-bit primes and kNN dimension
/// `dim`, plus a document key.
pub fn generate_keys<R: RngCore + CryptoRng>(tau: u32, dim: usize, rng: &mut R) -> Result<OwnerKeys> {
    let master = p3search_core::keygen(tau, dim, rng)?;
    Ok(OwnerKeys { master, doc_key: crate::docs::DocumentKey::generate(rng) })
}

pub fn build<R: RngCore + CryptoRng>(keys: &OwnerKeys, corpus: &Corpus, eta: EtaChoice, rng: &mut R) -> Result<Published> {
    let start = Instant::now();
    let mk = &keys.master;
    let plain = build_plain_index(corpus.pairs())?;
    let eta = match eta {
        EtaChoice::Median => choose_eta(&plain)?,
        EtaChoice::Fixed(n) => n,
    };
    let fragments = fragment_all(&plain, eta);
    let seeds: Vec<[u8; 32]> = fragments
        .iter()
        .map(|_| {
            let mut s = [0u8; 32];
            rng.fill_bytes(&mut s);
            s
        })
        .collect();
    let lists = fragments
        .par_iter()
        .zip(seeds)
        .map(|(f, seed)| encrypt_fragment(mk, f, &mut ChaCha20Rng::from_seed(seed)))
        .collect::<std::result::Result<Vec<_>, CoreError>>()?;
    let index = SecureIndex::assemble(mk, eta, lists, rng)?;
    let docs = corpus
        .docs
        .iter()
        .map(|d| keys.doc_key.seal(mk.prp().encrypt(d.id), d.text.as_bytes(), rng))
        .collect();
    Ok(Published { index, docs, eta, keywords: plain.len(), build_time: start.elapsed() })
}

impl Service for Owner {
    fn handle(&self, request: &Frame) -> Frame {
        let group = self.keys.master.bgn_pk().params();
        match request.kind {
            Kind::TrapdoorRequest => {
                let req = match TrapdoorRequest::parse(&request.payload) {
                    Ok(r) => r,
                    Err(e) => return Frame::error(ErrorCode::BadPayload, e.to_string()),
                };
                match self.trapdoor(&req.phrase, req.conjunctive) {
                    Ok(t) => Frame::new(Kind::TrapdoorResponse, t.to_bytes(group)),
                    Err(e) => Frame::error(ErrorCode::BadPayload, e.to_string()),
                }
            }
            Kind::DecryptRequest => {
                let docs = match parse_decrypt_request(&request.payload) {
                    Ok(d) => d,
                    Err(e) => return Frame::error(ErrorCode::BadPayload, e.to_string()),
                };
                match self.open(&docs) {
                    Ok(opened) => decrypt_response_frame(&opened),
                    Err(e @ Error::DocumentAuth(_)) => Frame::error(ErrorCode::BadPayload, e.to_string()),
                    Err(e) => Frame::error(ErrorCode::Internal, e.to_string()),
                }
            }
            other => Frame::error(ErrorCode::Unsupported, format!("owner does not accept {other:?}")),
        }
    }
}
