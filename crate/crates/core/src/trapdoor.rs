//! Phrase queries and their trapdoors `{Ỹ_1 … Ỹ_|Q|, ℂ, ψ}`.

use alloc::string::String;
use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};

use crate::bgn::{encrypt, make_dispersal_factor, GroupElement, GroupParams};
use crate::codec::{Reader, Writer};
use crate::error::Error;
use crate::index::token_stream;
use crate::keys::MasterKey;
use crate::knn::{enc_keyword_for_trapdoor, SplitVector, TrapdoorKeywordId};

pub const TRAPDOOR_MAGIC: &[u8; 4] = b"P3TD";
pub const TRAPDOOR_VERSION: u16 = 1;

/// Gap between consecutive phrase positions tested by the server.
const SEARCH_DISTANCE: u64 = 1;

/// Ordered, normalized keywords of a phrase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhraseQuery {
    keywords: Vec<String>,
}

impl PhraseQuery {
    /// Normalizes `text` with the index tokenizer.
    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::from_keywords(token_stream(text))
    }

    /// Takes keywords as given; they must already be normalized.
    pub fn from_keywords(keywords: Vec<String>) -> Result<Self, Error> {
        if keywords.is_empty() {
            return Err(Error::EmptyQuery);
        }
        Ok(PhraseQuery { keywords })
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trapdoor {
    /// One identifier per query keyword, in phrase order.
    pub keyword_ids: Vec<TrapdoorKeywordId>,
    /// `ℂ = E(1)`.
    pub adjacency_ct: GroupElement,
    /// `ψ = λ^p`.
    pub dispersal: GroupElement,
    pub conjunctive_only: bool,
}

pub fn gen_trapdoor<R: RngCore + CryptoRng + ?Sized>(
    mk: &MasterKey,
    query: &PhraseQuery,
    conjunctive_only: bool,
    rng: &mut R,
) -> Result<Trapdoor, Error> {
    if query.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let keyword_ids = query.keywords.iter().map(|w| enc_keyword_for_trapdoor(mk.knn(), w, rng)).collect();
    let adjacency_ct = encrypt(mk.bgn_pk(), SEARCH_DISTANCE, rng)?;
    let dispersal = make_dispersal_factor(mk.bgn_sk(), mk.bgn_pk(), rng);
    Ok(Trapdoor { keyword_ids, adjacency_ct, dispersal, conjunctive_only })
}

impl Trapdoor {
    pub fn write(&self, w: &mut Writer, group: &GroupParams) {
        w.raw(TRAPDOOR_MAGIC).u16(TRAPDOOR_VERSION);
        w.u16(self.keyword_ids.len() as u16).u8(self.conjunctive_only as u8);
        for id in &self.keyword_ids {
            id.0.write(w);
        }
        group.write_element(w, &self.adjacency_ct);
        group.write_element(w, &self.dispersal);
    }

    pub fn to_bytes(&self, group: &GroupParams) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w, group);
        w.into_bytes()
    }

    /// Decodes a trapdoor and checks that `ℂ` and `ψ` lie in the order-`n`
    /// subgroup and that `ψ` is not the identity.
    pub fn from_bytes(bytes: &[u8], group: &GroupParams) -> Result<Self, Error> {
        let mut r = Reader::new(bytes);
        if r.raw(4)? != TRAPDOOR_MAGIC {
            return Err(Error::Malformed("bad trapdoor magic"));
        }
        if r.u16()? != TRAPDOOR_VERSION {
            return Err(Error::Malformed("unsupported trapdoor version"));
        }
        let count = r.u16()? as usize;
        if count == 0 {
            return Err(Error::EmptyQuery);
        }
        let conjunctive_only = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(Error::Malformed("conjunctive flag")),
        };
        let keyword_ids: Vec<_> =
            (0..count).map(|_| SplitVector::read(&mut r).map(TrapdoorKeywordId)).collect::<Result<_, _>>()?;
        let dim = keyword_ids[0].0.dim();
        if let Some(bad) = keyword_ids.iter().find(|id| id.0.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.0.dim() });
        }
        let adjacency_ct = group.read_element_checked(&mut r)?;
        let dispersal = group.read_element_checked(&mut r)?;
        if dispersal.is_identity() {
            return Err(Error::Malformed("dispersal factor is the identity"));
        }
        r.finish()?;
        Ok(Trapdoor { keyword_ids, adjacency_ct, dispersal, conjunctive_only })
    }
}
