//! Document collections: directory loading and synthetic generators.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use p3search_core::index::{token_stream, DocId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Zipf};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: DocId,
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    pub fn from_texts<I: IntoIterator<Item = String>>(texts: I) -> Self {
        let docs = texts
            .into_iter()
            .zip(1..)
            .map(|(text, id)| Document { id, name: format!("doc-{id:04}"), text })
            .collect();
        Corpus { docs }
    }

    /// Regular files of `dir` in name order, with ids `1, 2, …`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.retain(|p| p.is_file());
        paths.sort();
        let mut docs = Vec::with_capacity(paths.len());
        for (path, id) in paths.into_iter().zip(1..) {
            let text = String::from_utf8(fs::read(&path)?).map_err(|_| p3search_core::Error::Encoding)?;
            let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            docs.push(Document { id, name, text });
        }
        if docs.is_empty() {
            return Err(Error::Core(p3search_core::Error::EmptyCorpus));
        }
        Ok(Corpus { docs })
    }

    /// The first `n` documents.
    pub fn prefix(&self, n: usize) -> Corpus {
        Corpus { docs: self.docs[..n.min(self.docs.len())].to_vec() }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, id: DocId) -> Option<&Document> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (DocId, &str)> {
        self.docs.iter().map(|d| (d.id, d.text.as_str()))
    }
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "su", "te", "ra", "no", "vi", "de", "po", "gu", "xe", "ba", "ri", "zo", "fa", "ne", "tu", "sa",
    "ho", "li", "me", "ju", "co",
];

/// Pronounceable pseudo-word for a vocabulary rank.
pub fn synthetic_word(mut rank: usize) -> String {
    let mut w = String::new();
    loop {
        w.push_str(SYLLABLES[rank % SYLLABLES.len()]);
        rank /= SYLLABLES.len();
        if rank == 0 {
            break;
        }
    }
    w
}

/// Documents whose words follow a Zipf law over `vocab` pseudo-words.
pub fn zipf_corpus(seed: u64, docs: usize, vocab: usize, min_len: usize, max_len: usize) -> Corpus {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let zipf = Zipf::new(vocab as u64, 1.07).expect("valid Zipf parameters");
    Corpus::from_texts((0..docs).map(|_| {
        let len = rng.gen_range(min_len..=max_len);
        let words: Vec<String> = (0..len).map(|_| synthetic_word(zipf.sample(&mut rng) as usize - 1)).collect();
        words.join(" ")
    }))
}

/// A corpus with planted phrases, each of which also has all its words in
/// some documents without ever appearing as the phrase.
#[derive(Clone, Debug)]
pub struct EngineeredCorpus {
    pub corpus: Corpus,
    /// Planted phrases, grouped by length.
    pub phrases: Vec<(usize, Vec<Vec<String>>)>,
}

/// `per_length` planted phrases for each length, each in `hits` documents
/// and scattered through `decoys` others.
pub fn cooccurrence_corpus(seed: u64, lengths: &[usize], per_length: usize, hits: usize, decoys: usize) -> EngineeredCorpus {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let filler = |rng: &mut ChaCha20Rng, n: usize| -> Vec<String> {
        (0..n).map(|_| format!("f{}", synthetic_word(rng.gen_range(0..200)))).collect()
    };
    let mut texts = Vec::new();
    let mut phrases = Vec::new();
    for &len in lengths {
        let mut group = Vec::new();
        for p in 0..per_length {
            let phrase: Vec<String> = (0..len).map(|k| format!("q{len}x{p}y{k}{}", synthetic_word(k))).collect();
            for _ in 0..hits {
                let n = rng.gen_range(5..30);
                let mut toks = filler(&mut rng, n);
                let at = rng.gen_range(0..=toks.len());
                toks.splice(at..at, phrase.iter().cloned());
                texts.push(toks);
            }
            for _ in 0..decoys {
                // Every phrase word, separated by at least one filler word and
                // in shuffled order.
                let mut words = phrase.clone();
                words.shuffle(&mut rng);
                let n = rng.gen_range(1..5);
                let mut toks = filler(&mut rng, n);
                for w in words {
                    toks.push(w);
                    let n = rng.gen_range(1..5);
                    toks.extend(filler(&mut rng, n));
                }
                texts.push(toks);
            }
            group.push(phrase);
        }
        phrases.push((len, group));
    }
    texts.shuffle(&mut rng);
    EngineeredCorpus { corpus: Corpus::from_texts(texts.into_iter().map(|t| t.join(" "))), phrases }
}

/// Up to `count` distinct phrases of `len` tokens taken from contiguous
/// windows of random documents, skipping windows with a repeated token.
pub fn sample_phrases<R: Rng>(corpus: &Corpus, len: usize, count: usize, rng: &mut R) -> Vec<Vec<String>> {
    let streams: Vec<Vec<String>> = corpus.docs.iter().map(|d| token_stream(&d.text)).collect();
    let usable: Vec<&Vec<String>> = streams.iter().filter(|s| s.len() >= len).collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    if usable.is_empty() {
        return out;
    }
    let mut attempts = 0;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let s = usable[rng.gen_range(0..usable.len())];
        let start = rng.gen_range(0..=s.len() - len);
        let window = &s[start..start + len];
        let distinct: BTreeSet<&String> = window.iter().collect();
        if distinct.len() == len && seen.insert(window.to_vec()) {
            out.push(window.to_vec());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn engineered_corpus_has_a_conjunctive_gap() {
        let e = cooccurrence_corpus(1, &[2, 3], 2, 2, 3);
        assert_eq!(e.corpus.len(), 2 * 2 * 5);
        for (_, group) in &e.phrases {
            for phrase in group {
                let exact = oracle::phrase_search(&e.corpus, phrase);
                let conj = oracle::conjunctive_search(&e.corpus, phrase);
                assert_eq!(exact.len(), 2);
                assert_eq!(conj.len(), 5);
            }
        }
    }

    #[test]
    fn sampled_phrases_occur_and_have_distinct_tokens() {
        let c = zipf_corpus(2, 20, 50, 10, 40);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let ps = sample_phrases(&c, 3, 10, &mut rng);
        assert_eq!(ps.len(), 10);
        for p in ps {
            assert!(!oracle::phrase_search(&c, &p).is_empty());
            assert_eq!(p.iter().collect::<BTreeSet<_>>().len(), 3);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(zipf_corpus(9, 5, 30, 5, 10), zipf_corpus(9, 5, 30, 5, 10));
        assert_ne!(zipf_corpus(9, 5, 30, 5, 10), zipf_corpus(10, 5, 30, 5, 10));
        assert_eq!(synthetic_word(0), "ka");
        assert_eq!(synthetic_word(25), "lolo");
    }
}
