//! Precision and timing harness. Encrypted results are opened by the owner
//! and scored against the plaintext oracle; engine timings are repeated
//! per query.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use p3search_core::index::{open_doc_id, DocId};
use p3search_core::query::execute_query;
use p3search_core::{gen_trapdoor, PhraseQuery, QueryResult};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::corpus::{sample_phrases, Corpus};
use crate::error::{Error, Result};
use crate::oracle;
use crate::owner::{build, generate_keys, EtaChoice};
use crate::wire::{Frame, Kind, QueryResponse};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Phrase lengths to sweep.
    pub lengths: Vec<usize>,
    pub queries_per_length: usize,
    pub repetitions: usize,
    pub eta: EtaChoice,
    pub seed: u64,
    pub tau: u32,
    pub dim: usize,
    /// Corpus prefixes to index, in documents; empty means the whole corpus.
    pub sizes: Vec<usize>,
    /// Fixed phrases per length instead of sampled ones.
    pub phrases: Option<Vec<(usize, Vec<Vec<String>>)>>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            lengths: vec![2, 3, 4, 5],
            queries_per_length: 50,
            repetitions: 20,
            eta: EtaChoice::Median,
            seed: 1,
            tau: 32,
            dim: 8,
            sizes: Vec::new(),
            phrases: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Usage("repetitions must be at least 1".into()));
        }
        if self.lengths.iter().any(|&l| !(1..=8).contains(&l)) {
            return Err(Error::Usage("phrase lengths must lie in 1..=8".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Phrase,
    Conjunctive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildRecord {
    pub docs: usize,
    pub keywords: usize,
    pub lists: usize,
    pub eta: usize,
    pub build_ms: f64,
    pub index_bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryRecord {
    pub docs: usize,
    pub length: usize,
    pub mode: Mode,
    pub phrase: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub oracle_hits: usize,
    pub trapdoor_ms: f64,
    pub query_ms: Vec<f64>,
    pub bytes: usize,
    pub pairings: u64,
    pub candidates: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub docs: usize,
    pub length: usize,
    pub mode: Mode,
    pub queries: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: Option<f64>,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub bytes: f64,
    pub pairings: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PrecisionReport {
    pub builds: Vec<BuildRecord>,
    pub records: Vec<QueryRecord>,
    pub summaries: Vec<Summary>,
    /// Phrase-mode queries whose opened results differ from the oracle, and
    /// conjunctive-mode queries that miss a phrase match.
    pub violations: Vec<String>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// `t_p / (t_p + f_p)`, undefined when nothing was returned.
pub fn precision(tp: usize, fp: usize) -> Option<f64> {
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (p * (sorted.len() - 1) as f64).round() as usize;
    sorted[rank.min(sorted.len() - 1)]
}

pub fn run(corpus: &Corpus, cfg: &BenchConfig) -> Result<PrecisionReport> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let keys = generate_keys(cfg.tau, cfg.dim, &mut rng)?;
    let mk = &keys.master;
    let params = mk.public_params();
    let group = params.group();
    let sizes = if cfg.sizes.is_empty() { vec![corpus.len()] } else { cfg.sizes.clone() };
    let mut report = PrecisionReport::default();

    for &size in &sizes {
        let sub = corpus.prefix(size);
        let published = build(&keys, &sub, cfg.eta, &mut rng)?;
        let index = &published.index;
        report.builds.push(BuildRecord {
            docs: sub.len(),
            keywords: published.keywords,
            lists: index.lists.len(),
            eta: published.eta,
            build_ms: ms(published.build_time),
            index_bytes: index.to_bytes(group).len(),
        });

        for &len in &cfg.lengths {
            let phrases = match &cfg.phrases {
                Some(fixed) => fixed.iter().find(|(l, _)| *l == len).map(|(_, p)| p.clone()).unwrap_or_default(),
                None => {
                    let mut qrng = ChaCha20Rng::seed_from_u64(cfg.seed ^ (len as u64) << 32 ^ size as u64);
                    sample_phrases(&sub, len, cfg.queries_per_length, &mut qrng)
                }
            };
            for phrase in &phrases {
                let query = PhraseQuery::from_keywords(phrase.clone())?;
                let truth = oracle::phrase_search(&sub, phrase);
                let mut phrase_hits = BTreeSet::new();
                for mode in [Mode::Phrase, Mode::Conjunctive] {
                    let start = Instant::now();
                    let t = gen_trapdoor(mk, &query, mode == Mode::Conjunctive, &mut rng)?;
                    let trapdoor_ms = ms(start.elapsed());
                    let mut times = Vec::with_capacity(cfg.repetitions);
                    let mut result = QueryResult::default();
                    for _ in 0..cfg.repetitions {
                        let start = Instant::now();
                        result = execute_query(&params, index, &t)?;
                        times.push(ms(start.elapsed()));
                    }
                    let up = Frame::new(Kind::Query, t.to_bytes(group)).encode().len();
                    let down = QueryResponse { result: result.clone(), docs: Vec::new() }.to_frame().encode().len();
                    let got: BTreeSet<DocId> =
                        result.matches.iter().filter_map(|&m| open_doc_id(mk.prp(), m)).collect();
                    let tp = got.intersection(&truth).count();
                    let fp = got.len() - tp;
                    let fn_ = truth.len() - tp;
                    let text = phrase.join(" ");
                    match mode {
                        Mode::Phrase => {
                            if got != truth {
                                report.violations.push(format!("phrase mode differs from oracle on {text:?} ({size} docs)"));
                            }
                            phrase_hits = got;
                        }
                        Mode::Conjunctive => {
                            if !phrase_hits.is_subset(&got) {
                                report.violations.push(format!("conjunctive mode misses phrase matches on {text:?}"));
                            }
                        }
                    }
                    report.records.push(QueryRecord {
                        docs: sub.len(),
                        length: len,
                        mode,
                        phrase: text,
                        tp,
                        fp,
                        fn_,
                        precision: precision(tp, fp),
                        oracle_hits: truth.len(),
                        trapdoor_ms,
                        query_ms: times,
                        bytes: up + down,
                        pairings: result.stats.pairings,
                        candidates: result.stats.candidates_tested,
                    });
                }
            }
        }
    }
    report.summaries = summarize(&report.records);
    Ok(report)
}

pub fn summarize(records: &[QueryRecord]) -> Vec<Summary> {
    let mut keys: Vec<(usize, usize, Mode)> = records.iter().map(|r| (r.docs, r.length, r.mode)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(docs, length, mode)| {
            let group: Vec<&QueryRecord> =
                records.iter().filter(|r| r.docs == docs && r.length == length && r.mode == mode).collect();
            let n = group.len().max(1) as f64;
            let tp = group.iter().map(|r| r.tp).sum();
            let fp = group.iter().map(|r| r.fp).sum();
            let fn_ = group.iter().map(|r| r.fn_).sum();
            let mut all: Vec<f64> = group.iter().flat_map(|r| r.query_ms.iter().copied()).collect();
            all.sort_by(f64::total_cmp);
            let mean_ms = all.iter().sum::<f64>() / all.len().max(1) as f64;
            Summary {
                docs,
                length,
                mode,
                queries: group.len(),
                tp,
                fp,
                fn_,
                precision: precision(tp, fp),
                mean_ms,
                p95_ms: percentile(&all, 0.95),
                bytes: group.iter().map(|r| r.bytes as f64).sum::<f64>() / n,
                pairings: group.iter().map(|r| r.pairings as f64).sum::<f64>() / n,
            }
        })
        .collect()
}

impl PrecisionReport {
    /// One JSON object per line, tagged by `type`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Tagged<'a, T> {
            r#type: &'a str,
            #[serde(flatten)]
            inner: &'a T,
        }
        for b in &self.builds {
            serde_json::to_writer(&mut w, &Tagged { r#type: "build", inner: b })?;
            writeln!(w)?;
        }
        for r in &self.records {
            serde_json::to_writer(&mut w, &Tagged { r#type: "query", inner: r })?;
            writeln!(w)?;
        }
        for s in &self.summaries {
            serde_json::to_writer(&mut w, &Tagged { r#type: "summary", inner: s })?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Plot-ready columns, one row per summary.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "docs,q,mode,precision,mean_ms,p95_ms,bytes")?;
        for s in &self.summaries {
            let mode = match s.mode {
                Mode::Phrase => "phrase",
                Mode::Conjunctive => "conjunctive",
            };
            let p = s.precision.map(|p| format!("{p:.4}")).unwrap_or_default();
            writeln!(w, "{},{},{},{},{:.3},{:.3},{:.0}", s.docs, s.length, mode, p, s.mean_ms, s.p95_ms, s.bytes)?;
        }
        Ok(())
    }

    pub fn summary(&self, docs: usize, length: usize, mode: Mode) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.docs == docs && s.length == length && s.mode == mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::cooccurrence_corpus;

    #[test]
    fn precision_formula() {
        assert_eq!(precision(3, 1), Some(0.75));
        assert_eq!(precision(0, 0), None);
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.95), 5.0);
    }

    #[test]
    fn engineered_corpus_scores() {
        let e = cooccurrence_corpus(4, &[2, 3], 2, 1, 2);
        let cfg = BenchConfig {
            lengths: vec![2, 3],
            repetitions: 2,
            phrases: Some(e.phrases.clone()),
            ..BenchConfig::default()
        };
        let report = run(&e.corpus, &cfg).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        let docs = e.corpus.len();
        for len in [2, 3] {
            let p = report.summary(docs, len, Mode::Phrase).unwrap();
            let c = report.summary(docs, len, Mode::Conjunctive).unwrap();
            assert_eq!(p.precision, Some(1.0));
            assert_eq!(c.precision, Some(1.0 / 3.0));
        }
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 5);
        let mut jsonl = Vec::new();
        report.write_jsonl(&mut jsonl).unwrap();
        for line in String::from_utf8(jsonl).unwrap().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["type"].is_string());
        }
    }
}
