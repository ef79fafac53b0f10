//! Positional inverted index: tokenization, plaintext construction, division
//! into fixed-size fragments with padding, and encryption.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};

use crate::bgn::{GroupElement, GroupParams};
use crate::codec::{Reader, Writer};
use crate::error::Error;
use crate::keys::{MasterKey, ParamsDigest};
use crate::knn::{enc_keyword_for_index, IndexKeywordId, SplitVector};
use crate::prp::Prp;
use crate::rand_util::{random_below, shuffle};

pub const INDEX_MAGIC: &[u8; 4] = b"P3IX";
pub const INDEX_VERSION: u16 = 1;

/// Document identifier. Real documents are positive; padding entries use
/// negative counters.
pub type DocId = i64;

pub fn is_pad(id: DocId) -> bool {
    id < 0
}

/// Lowercased tokens with 1-based positions, split on runs of
/// non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<(String, u32)> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .zip(1u32..)
        .map(|(t, pos)| (t.to_lowercase(), pos))
        .collect()
}

pub fn tokenize_bytes(bytes: &[u8]) -> Result<Vec<(String, u32)>, Error> {
    core::str::from_utf8(bytes).map(tokenize).map_err(|_| Error::Encoding)
}

/// Token sequence without positions.
pub fn token_stream(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|(t, _)| t).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainEntry {
    pub doc_id: DocId,
    /// Strictly ascending. Zero-filled placeholders in padding entries.
    pub locations: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainInvertedList {
    pub keyword: String,
    pub entries: Vec<PlainEntry>,
}

/// One list per distinct keyword, sorted by keyword, entries sorted by id.
pub fn build_plain_index<I, S>(corpus: I) -> Result<Vec<PlainInvertedList>, Error>
where
    I: IntoIterator<Item = (DocId, S)>,
    S: AsRef<str>,
{
    let mut map: BTreeMap<String, BTreeMap<DocId, Vec<u32>>> = BTreeMap::new();
    let mut seen = BTreeMap::new();
    for (id, text) in corpus {
        if id <= 0 {
            return Err(Error::DocIdOutOfDomain(id));
        }
        if seen.insert(id, ()).is_some() {
            return Err(Error::DuplicateDocId(id));
        }
        for (tok, pos) in tokenize(text.as_ref()) {
            map.entry(tok).or_default().entry(id).or_default().push(pos);
        }
    }
    if seen.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(map
        .into_iter()
        .map(|(keyword, docs)| PlainInvertedList {
            keyword,
            entries: docs.into_iter().map(|(doc_id, locations)| PlainEntry { doc_id, locations }).collect(),
        })
        .collect())
}

/// Source of padding identifiers: `-1, -2, …`, shared across an index so no
/// padding id repeats.
#[derive(Clone, Debug)]
pub struct PadCounter {
    next: DocId,
}

impl Default for PadCounter {
    fn default() -> Self {
        PadCounter { next: -1 }
    }
}

impl PadCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn take(&mut self) -> DocId {
        let id = self.next;
        self.next -= 1;
        id
    }
}

/// Splits a list into `⌈k/η⌉` fragments of exactly `η` entries, padding the
/// last. Each pad mirrors the location count of a real entry in the same
/// fragment.
pub fn divide_and_pad(list: &PlainInvertedList, eta: usize, pads: &mut PadCounter) -> Vec<PlainInvertedList> {
    assert!(eta >= 1, "eta must be positive");
    let mut out = Vec::with_capacity(list.entries.len().div_ceil(eta));
    for chunk in list.entries.chunks(eta) {
        let mut entries = chunk.to_vec();
        let mut j = 0;
        while entries.len() < eta {
            let count = chunk[j % chunk.len()].locations.len();
            entries.push(PlainEntry { doc_id: pads.take(), locations: vec![0; count] });
            j += 1;
        }
        out.push(PlainInvertedList { keyword: list.keyword.clone(), entries });
    }
    out
}

/// Lower median of the per-keyword document frequencies.
pub fn choose_eta(lists: &[PlainInvertedList]) -> Result<usize, Error> {
    if lists.is_empty() {
        return Err(Error::EmptyIndex);
    }
    let mut freqs: Vec<usize> = lists.iter().map(|l| l.entries.len()).collect();
    freqs.sort_unstable();
    Ok(freqs[(freqs.len() - 1) / 2])
}

/// Divides every list with one shared pad counter.
pub fn fragment_all(lists: &[PlainInvertedList], eta: usize) -> Vec<PlainInvertedList> {
    let mut pads = PadCounter::new();
    lists.iter().flat_map(|l| divide_and_pad(l, eta, &mut pads)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureEntry {
    pub enc_doc_id: u64,
    pub locations: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureInvertedList {
    pub keyword_id: IndexKeywordId,
    pub entries: Vec<SecureEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecureIndex {
    pub params_digest: ParamsDigest,
    pub dim: usize,
    pub eta: usize,
    pub lists: Vec<SecureInvertedList>,
}

/// Encrypts one fragment: fresh keyword identifier, permuted ids, BGN
/// location ciphertexts (random group elements for pads), entries shuffled.
pub fn encrypt_fragment<R: RngCore + CryptoRng + ?Sized>(
    mk: &MasterKey,
    fragment: &PlainInvertedList,
    rng: &mut R,
) -> Result<SecureInvertedList, Error> {
    let pk = mk.bgn_pk();
    let n = pk.params().n();
    let keyword_id = enc_keyword_for_index(mk.knn(), &fragment.keyword, rng);
    let mut entries = Vec::with_capacity(fragment.entries.len());
    for e in &fragment.entries {
        if e.doc_id == 0 {
            return Err(Error::DocIdOutOfDomain(0));
        }
        let locations = if is_pad(e.doc_id) {
            e.locations.iter().map(|_| pk.random_element(rng)).collect()
        } else {
            e.locations
                .iter()
                .map(|&l| pk.encrypt_with(l as u64, &random_below(rng, n)))
                .collect::<Result<_, _>>()?
        };
        entries.push(SecureEntry { enc_doc_id: mk.prp().encrypt(e.doc_id), locations });
    }
    shuffle(rng, &mut entries);
    Ok(SecureInvertedList { keyword_id, entries })
}

impl SecureIndex {
    /// Collects encrypted fragments into an index, checking the uniform
    /// length and shuffling list order.
    pub fn assemble<R: RngCore + ?Sized>(
        mk: &MasterKey,
        eta: usize,
        mut lists: Vec<SecureInvertedList>,
        rng: &mut R,
    ) -> Result<Self, Error> {
        if lists.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if let Some(l) = lists.iter().find(|l| l.entries.len() != eta) {
            return Err(Error::FragmentLength { expected: eta, got: l.entries.len() });
        }
        shuffle(rng, &mut lists);
        let params = mk.public_params();
        Ok(SecureIndex { params_digest: params.digest(), dim: params.dim(), eta, lists })
    }

    pub fn write(&self, w: &mut Writer, group: &GroupParams) {
        w.raw(INDEX_MAGIC).u16(INDEX_VERSION).raw(&self.params_digest);
        w.u16(self.dim as u16).u32(self.eta as u32).u64(self.lists.len() as u64);
        for list in &self.lists {
            list.keyword_id.0.write_bare(w);
            for e in &list.entries {
                w.u64(e.enc_doc_id).u32(e.locations.len() as u32);
                for c in &e.locations {
                    group.write_element(w, c);
                }
            }
        }
    }

    pub fn to_bytes(&self, group: &GroupParams) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w, group);
        w.into_bytes()
    }

    /// Decodes an index. Location points are checked to lie on the curve.
    pub fn from_bytes(bytes: &[u8], group: &GroupParams) -> Result<Self, Error> {
        let mut r = Reader::new(bytes);
        if r.raw(4)? != INDEX_MAGIC {
            return Err(Error::Malformed("bad index magic"));
        }
        if r.u16()? != INDEX_VERSION {
            return Err(Error::Malformed("unsupported index version"));
        }
        let params_digest = r.array()?;
        let dim = r.u16()? as usize;
        let eta = r.u32()? as usize;
        let count = r.u64()?;
        let min_list = 16 * dim + 12 * eta;
        if eta == 0 || count.saturating_mul(min_list as u64) > r.remaining() as u64 {
            return Err(Error::Malformed("index header inconsistent with length"));
        }
        let mut lists = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let keyword_id = IndexKeywordId(SplitVector::read_bare(&mut r, dim)?);
            let mut entries = Vec::with_capacity(eta);
            for _ in 0..eta {
                let enc_doc_id = r.u64()?;
                let len = r.u32()? as usize;
                if len.saturating_mul(group.element_len()) > r.remaining() {
                    return Err(Error::Malformed("location count exceeds input"));
                }
                let locations = (0..len).map(|_| group.read_element(&mut r)).collect::<Result<_, _>>()?;
                entries.push(SecureEntry { enc_doc_id, locations });
            }
            lists.push(SecureInvertedList { keyword_id, entries });
        }
        r.finish()?;
        Ok(SecureIndex { params_digest, dim, eta, lists })
    }
}

/// Builds and encrypts the whole index on one thread.
pub fn encrypt_index<R: RngCore + CryptoRng + ?Sized>(
    mk: &MasterKey,
    fragments: &[PlainInvertedList],
    rng: &mut R,
) -> Result<SecureIndex, Error> {
    let eta = fragments.first().ok_or(Error::EmptyIndex)?.entries.len();
    let lists = fragments.iter().map(|f| encrypt_fragment(mk, f, rng)).collect::<Result<_, _>>()?;
    SecureIndex::assemble(mk, eta, lists, rng)
}

/// Recovers a document id; `None` for padding entries.
pub fn open_doc_id(prp: &Prp, enc: u64) -> Option<DocId> {
    let id = prp.decrypt(enc);
    (id > 0).then_some(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn list(keyword: &str, entries: &[(DocId, &[u32])]) -> PlainInvertedList {
        PlainInvertedList {
            keyword: keyword.to_string(),
            entries: entries.iter().map(|&(doc_id, l)| PlainEntry { doc_id, locations: l.to_vec() }).collect(),
        }
    }

    #[test]
    fn tokenizer_rules() {
        let toks = tokenize("Heart attack, heart!");
        assert_eq!(toks, [("heart".to_string(), 1), ("attack".to_string(), 2), ("heart".to_string(), 3)]);
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ,;-- ").is_empty());
        assert_eq!(token_stream("RFC-2616: HTTP/1.1"), ["rfc", "2616", "http", "1", "1"]);
        assert_eq!(tokenize_bytes(&[0xff, 0xfe]), Err(Error::Encoding));
    }

    #[test]
    fn plain_index_rejects_bad_ids() {
        assert_eq!(build_plain_index([(1, "a"), (1, "b")]), Err(Error::DuplicateDocId(1)));
        assert_eq!(build_plain_index([(0, "a")]), Err(Error::DocIdOutOfDomain(0)));
        assert_eq!(build_plain_index(Vec::<(DocId, &str)>::new()), Err(Error::EmptyCorpus));
        assert_eq!(build_plain_index([(3, "word")]).unwrap(), [list("word", &[(3, &[1])])]);
    }

    #[test]
    fn division_counts_and_pad_ids() {
        let attack = list("attack", &[(1, &[6, 18]), (2, &[4]), (6, &[1])]);
        let mut pads = PadCounter::new();
        let frags = divide_and_pad(&attack, 2, &mut pads);
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[1].entries[0].doc_id, 6);
        assert_eq!(frags[1].entries[1].doc_id, -1);
        assert_eq!(frags[1].entries[1].locations, [0]);

        let exact = divide_and_pad(&list("w", &[(1, &[1]), (2, &[1])]), 2, &mut PadCounter::new());
        assert_eq!(exact.len(), 1);
        assert!(exact[0].entries.iter().all(|e| !is_pad(e.doc_id)));

        let single = divide_and_pad(&list("w", &[(1, &[1])]), 4, &mut PadCounter::new());
        let ids: Vec<_> = single[0].entries.iter().map(|e| e.doc_id).collect();
        assert_eq!(ids, [1, -1, -2, -3]);
    }

    #[test]
    fn lower_median() {
        let mk = |fs: &[usize]| -> Vec<PlainInvertedList> {
            fs.iter()
                .map(|&f| PlainInvertedList {
                    keyword: String::new(),
                    entries: (1..=f as i64).map(|d| PlainEntry { doc_id: d, locations: vec![1] }).collect(),
                })
                .collect()
        };
        assert_eq!(choose_eta(&mk(&[1, 1, 1])), Ok(1));
        assert_eq!(choose_eta(&mk(&[4, 1, 3, 2])), Ok(2));
        assert_eq!(choose_eta(&mk(&[5])), Ok(5));
        assert_eq!(choose_eta(&[]), Err(Error::EmptyIndex));
    }

    #[test]
    fn fragment_all_never_repeats_pad_ids() {
        let lists = [list("a", &[(1, &[1])]), list("b", &[(1, &[2])]), list("c", &[(2, &[1])])];
        let frags = fragment_all(&lists, 3);
        let mut pads: Vec<_> = frags.iter().flat_map(|f| &f.entries).map(|e| e.doc_id).filter(|&d| is_pad(d)).collect();
        pads.sort_unstable();
        pads.dedup();
        assert_eq!(pads.len(), 6);
    }
}
