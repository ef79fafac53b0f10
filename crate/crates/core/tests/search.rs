use std::collections::{BTreeMap, BTreeSet};

use p3search_core::bgn::DlogTable;
use p3search_core::index::{
    build_plain_index, choose_eta, encrypt_index, fragment_all, is_pad, open_doc_id, token_stream, DocId,
};
use p3search_core::query::{execute_query_with, locate_lists, PhraseStrategy};
use p3search_core::{execute_query, gen_trapdoor, keygen, Error, MasterKey, PhraseQuery, SecureIndex};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// A document of `len` filler tokens with `words` placed at 1-based positions.
fn doc(len: u32, words: &[(&str, &[u32])]) -> String {
    let mut toks: Vec<String> = (1..=len).map(|i| format!("f{i}")).collect();
    for (w, positions) in words {
        for &p in *positions {
            toks[p as usize - 1] = w.to_string();
        }
    }
    toks.join(" ")
}

fn oracle(corpus: &[(DocId, String)], phrase: &[String]) -> BTreeSet<DocId> {
    corpus
        .iter()
        .filter(|(_, text)| token_stream(text).windows(phrase.len()).any(|w| w == phrase))
        .map(|(id, _)| *id)
        .collect()
}

fn opened(mk: &MasterKey, matches: &[u64]) -> BTreeSet<DocId> {
    matches.iter().filter_map(|&m| open_doc_id(mk.prp(), m)).collect()
}

fn build(mk: &MasterKey, corpus: &[(DocId, String)], eta: Option<usize>, rng: &mut ChaCha20Rng) -> SecureIndex {
    let plain = build_plain_index(corpus.iter().map(|(i, t)| (*i, t.as_str()))).unwrap();
    let eta = eta.unwrap_or_else(|| choose_eta(&plain).unwrap());
    encrypt_index(mk, &fragment_all(&plain, eta), rng).unwrap()
}

fn heart_attack_corpus() -> Vec<(DocId, String)> {
    vec![
        (1, doc(24, &[("heart", &[5, 12, 20]), ("attack", &[6, 18])])),
        (2, doc(10, &[("attack", &[4])])),
        (3, doc(8, &[("disease", &[2])])),
        (6, doc(45, &[("heart", &[33, 41]), ("attack", &[1])])),
    ]
}

#[test]
fn heart_attack_example() {
    let corpus = heart_attack_corpus();
    let plain = build_plain_index(corpus.iter().map(|(i, t)| (*i, t.as_str()))).unwrap();
    let heart = plain.iter().find(|l| l.keyword == "heart").unwrap();
    let got: Vec<_> = heart.entries.iter().map(|e| (e.doc_id, e.locations.clone())).collect();
    assert_eq!(got, [(1, vec![5, 12, 20]), (6, vec![33, 41])]);

    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mk = keygen(32, 8, &mut rng).unwrap();
    let index = build(&mk, &corpus, Some(2), &mut rng);
    let params = mk.public_params();

    let t = gen_trapdoor(&mk, &PhraseQuery::parse("attack").unwrap(), false, &mut rng).unwrap();
    assert_eq!(locate_lists(&index, &t).unwrap()[0].len(), 2);

    let t = gen_trapdoor(&mk, &PhraseQuery::parse("heart attack").unwrap(), false, &mut rng).unwrap();
    let res = execute_query(&params, &index, &t).unwrap();
    assert_eq!(opened(&mk, &res.matches), BTreeSet::from([1]));

    let t = gen_trapdoor(&mk, &PhraseQuery::parse("heart attack").unwrap(), true, &mut rng).unwrap();
    let res = execute_query(&params, &index, &t).unwrap();
    assert_eq!(opened(&mk, &res.matches), BTreeSet::from([1, 6]));
    assert_eq!(res.stats.pairings, 0);

    let t = gen_trapdoor(&mk, &PhraseQuery::parse("heart disease").unwrap(), false, &mut rng).unwrap();
    assert!(execute_query(&params, &index, &t).unwrap().matches.is_empty());
    let t = gen_trapdoor(&mk, &PhraseQuery::parse("stroke").unwrap(), false, &mut rng).unwrap();
    assert!(execute_query(&params, &index, &t).unwrap().matches.is_empty());
}

fn synthetic(rng: &mut ChaCha20Rng, docs: usize, vocab: usize) -> Vec<(DocId, String)> {
    (1..=docs as i64)
        .map(|id| {
            let len = 5 + rng.next_u32() as usize % 40;
            let words: Vec<String> = (0..len).map(|_| format!("w{}", rng.next_u32() as usize % vocab)).collect();
            (id * 3, words.join(" "))
        })
        .collect()
}

fn sample_phrase(rng: &mut ChaCha20Rng, corpus: &[(DocId, String)], len: usize) -> Vec<String> {
    loop {
        let (_, text) = &corpus[rng.next_u32() as usize % corpus.len()];
        let toks = token_stream(text);
        if toks.len() >= len {
            let start = rng.next_u32() as usize % (toks.len() - len + 1);
            return toks[start..start + len].to_vec();
        }
    }
}

#[test]
fn results_equal_plaintext_oracle() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let corpus = synthetic(&mut rng, 30, 12);
    let mk = keygen(32, 8, &mut rng).unwrap();
    let index = build(&mk, &corpus, None, &mut rng);
    let params = mk.public_params();
    for len in 1..=5 {
        for round in 0..8 {
            let phrase = if round % 4 == 3 {
                // Random words, usually absent as a phrase.
                (0..len).map(|_| format!("w{}", rng.next_u32() % 12)).collect()
            } else {
                sample_phrase(&mut rng, &corpus, len)
            };
            let q = PhraseQuery::from_keywords(phrase.clone()).unwrap();
            let want = oracle(&corpus, &phrase);
            let t = gen_trapdoor(&mk, &q, false, &mut rng).unwrap();
            let bil = execute_query_with(&params, &index, &t, PhraseStrategy::Bilinear).unwrap();
            let pw = execute_query_with(&params, &index, &t, PhraseStrategy::Pairwise).unwrap();
            assert_eq!(opened(&mk, &bil.matches), want, "{phrase:?}");
            assert_eq!(bil.matches, pw.matches);

            let tc = gen_trapdoor(&mk, &q, true, &mut rng).unwrap();
            let conj = execute_query(&params, &index, &tc).unwrap();
            let conj_set = opened(&mk, &conj.matches);
            assert!(want.is_subset(&conj_set));
            let conj_want: BTreeSet<DocId> = corpus
                .iter()
                .filter(|(_, t)| {
                    let toks: BTreeSet<String> = token_stream(t).into_iter().collect();
                    phrase.iter().all(|w| toks.contains(w))
                })
                .map(|(i, _)| *i)
                .collect();
            assert_eq!(conj_set, conj_want);
        }
    }
}

#[test]
fn index_structure_and_coverage() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let corpus = synthetic(&mut rng, 20, 15);
    let mk = keygen(32, 8, &mut rng).unwrap();
    let plain = build_plain_index(corpus.iter().map(|(i, t)| (*i, t.as_str()))).unwrap();
    let eta = choose_eta(&plain).unwrap();
    let index = encrypt_index(&mk, &fragment_all(&plain, eta), &mut rng).unwrap();
    let group = mk.bgn_pk().params();
    let table = DlogTable::new(mk.bgn_sk(), 64);

    let mut recovered: BTreeMap<(DocId, u32), usize> = BTreeMap::new();
    let mut ids = BTreeSet::new();
    let mut entry_len = BTreeMap::new();
    for list in &index.lists {
        assert_eq!(list.entries.len(), eta);
        for e in &list.entries {
            assert!(ids.insert(e.enc_doc_id) || open_doc_id(mk.prp(), e.enc_doc_id).is_some());
            let id = mk.prp().decrypt(e.enc_doc_id);
            let len: usize = 12 + e.locations.iter().map(|c| group.element_to_bytes(c).len()).sum::<usize>();
            entry_len.entry(e.locations.len()).or_insert_with(BTreeSet::new).insert(len);
            if is_pad(id) {
                continue;
            }
            for c in &e.locations {
                let l = table.decrypt(mk.bgn_sk(), c).unwrap() as u32;
                *recovered.entry((id, l)).or_default() += 1;
            }
        }
    }
    let mut want = BTreeMap::new();
    for (id, text) in &corpus {
        for (i, _) in token_stream(text).iter().enumerate() {
            want.insert((*id, i as u32 + 1), 1usize);
        }
    }
    assert_eq!(recovered, want);
    assert!(entry_len.values().all(|lens| lens.len() == 1));
}

#[test]
fn trapdoors_for_one_phrase_give_one_result() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let corpus = heart_attack_corpus();
    let mk = keygen(32, 8, &mut rng).unwrap();
    let index = build(&mk, &corpus, Some(2), &mut rng);
    let params = mk.public_params();
    let group = mk.bgn_pk().params();
    let q = PhraseQuery::parse("heart attack").unwrap();
    let mut seen = BTreeSet::new();
    let mut results = BTreeSet::new();
    for _ in 0..20 {
        let t = gen_trapdoor(&mk, &q, false, &mut rng).unwrap();
        assert!(seen.insert(t.to_bytes(group)));
        results.insert(execute_query(&params, &index, &t).unwrap().matches);
    }
    assert_eq!(results.len(), 1);
}

#[test]
fn index_bytes_round_trip_and_are_reproducible() {
    let corpus = heart_attack_corpus();
    let mk = keygen(32, 8, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
    let group = mk.bgn_pk().params();
    let a = build(&mk, &corpus, Some(2), &mut ChaCha20Rng::seed_from_u64(6));
    let b = build(&mk, &corpus, Some(2), &mut ChaCha20Rng::seed_from_u64(6));
    let c = build(&mk, &corpus, Some(2), &mut ChaCha20Rng::seed_from_u64(7));
    let bytes = a.to_bytes(group);
    assert_eq!(bytes, b.to_bytes(group));
    assert_ne!(bytes, c.to_bytes(group));
    assert_eq!(SecureIndex::from_bytes(&bytes, group).unwrap(), a);
    assert!(SecureIndex::from_bytes(&bytes[..bytes.len() - 1], group).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(SecureIndex::from_bytes(&bad, group).is_err());
}

#[test]
fn mismatched_parameters_are_rejected() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mk = keygen(32, 8, &mut rng).unwrap();
    let other = keygen(32, 8, &mut rng).unwrap();
    let index = build(&mk, &heart_attack_corpus(), Some(2), &mut rng);
    let t = gen_trapdoor(&mk, &PhraseQuery::parse("heart").unwrap(), false, &mut rng).unwrap();
    assert_eq!(execute_query(&other.public_params(), &index, &t), Err(Error::ParamsMismatch));
    let small = keygen(32, 4, &mut rng).unwrap();
    let t4 = gen_trapdoor(&small, &PhraseQuery::parse("heart").unwrap(), false, &mut rng).unwrap();
    assert!(matches!(execute_query(&mk.public_params(), &index, &t4), Err(Error::DimensionMismatch { .. })));
}
