//! Plaintext reference searches used to score encrypted results.

use std::collections::BTreeSet;

use p3search_core::index::{token_stream, DocId};

use crate::corpus::Corpus;

/// Documents whose token stream contains `phrase` contiguously.
pub fn phrase_search(corpus: &Corpus, phrase: &[String]) -> BTreeSet<DocId> {
    if phrase.is_empty() {
        return BTreeSet::new();
    }
    corpus
        .docs
        .iter()
        .filter(|d| token_stream(&d.text).windows(phrase.len()).any(|w| w == phrase))
        .map(|d| d.id)
        .collect()
}

/// Documents containing every word of `phrase` anywhere.
pub fn conjunctive_search(corpus: &Corpus, phrase: &[String]) -> BTreeSet<DocId> {
    corpus
        .docs
        .iter()
        .filter(|d| {
            let toks: BTreeSet<String> = token_stream(&d.text).into_iter().collect();
            phrase.iter().all(|w| toks.contains(w))
        })
        .map(|d| d.id)
        .collect()
}

/// Second phrase matcher with its own character-level tokenizer and an
/// explicit position scan.
pub fn naive_phrase_search(corpus: &Corpus, phrase: &[String]) -> BTreeSet<DocId> {
    let mut out = BTreeSet::new();
    if phrase.is_empty() {
        return out;
    }
    for d in &corpus.docs {
        let mut toks: Vec<String> = Vec::new();
        let mut cur = String::new();
        for ch in d.text.chars() {
            if ch.is_alphanumeric() {
                cur.push(ch);
            } else if !cur.is_empty() {
                toks.push(cur.to_lowercase());
                cur.clear();
            }
        }
        if !cur.is_empty() {
            toks.push(cur.to_lowercase());
        }
        let mut i = 0;
        'scan: while i + phrase.len() <= toks.len() {
            let mut k = 0;
            while k < phrase.len() {
                if toks[i + k] != phrase[k] {
                    i += 1;
                    continue 'scan;
                }
                k += 1;
            }
            out.insert(d.id);
            break;
        }
    }
    out
}
