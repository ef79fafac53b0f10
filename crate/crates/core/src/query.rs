//! Server-side search over a [`SecureIndex`]: locate lists by keyword
//! identifier, intersect documents, then keep those whose encrypted
//! locations form a consecutive chain.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::bgn::{GroupElement, GroupParams, PairingValue, PreparedElement};
use crate::codec::{Reader, Writer};
use crate::error::Error;
use crate::index::SecureIndex;
use crate::keys::PublicParams;
use crate::knn::matches;
use crate::trapdoor::Trapdoor;

/// How consecutive locations are tested.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhraseStrategy {
    /// Pairs every location once with `ψ` and compares `ê(ψ, c_b)` against
    /// `ê(ψ, c_a)·ê(ψ, ℂ)`, which by bilinearity is the same test as
    /// `ê(ψ, c_a·c_b⁻¹·ℂ) = 1`. One pairing per location.
    #[default]
    Bilinear,
    /// Forms `c_a·c_b⁻¹·ℂ` for each tested pair and runs one zero test on it.
    Pairwise,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub lists_scanned: u64,
    pub lists_matched: u64,
    pub candidates_tested: u64,
    pub pairings: u64,
}

impl QueryStats {
    pub fn merge(&mut self, other: &QueryStats) {
        self.lists_scanned += other.lists_scanned;
        self.lists_matched += other.lists_matched;
        self.candidates_tested += other.candidates_tested;
        self.pairings += other.pairings;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryResult {
    /// Encrypted ids of matching documents, ascending.
    pub matches: Vec<u64>,
    pub stats: QueryStats,
}

impl QueryResult {
    pub fn write(&self, w: &mut Writer) {
        w.u32(self.matches.len() as u32);
        for &m in &self.matches {
            w.u64(m);
        }
        let s = &self.stats;
        w.u64(s.lists_scanned).u64(s.lists_matched).u64(s.candidates_tested).u64(s.pairings);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let count = r.u32()? as usize;
        if count.saturating_mul(8) > r.remaining() {
            return Err(Error::Malformed("match count exceeds input"));
        }
        let matches = (0..count).map(|_| r.u64()).collect::<Result<_, _>>()?;
        let stats = QueryStats {
            lists_scanned: r.u64()?,
            lists_matched: r.u64()?,
            candidates_tested: r.u64()?,
            pairings: r.u64()?,
        };
        Ok(QueryResult { matches, stats })
    }
}

/// A document present for every query keyword, with its encrypted
/// locations per query position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateDoc<'a> {
    pub enc_doc_id: u64,
    pub locations: Vec<Vec<&'a GroupElement>>,
}

/// For each query position, indices of the index lists whose keyword
/// identifier matches.
pub fn locate_lists(index: &SecureIndex, t: &Trapdoor) -> Result<Vec<Vec<usize>>, Error> {
    t.keyword_ids
        .iter()
        .map(|y| {
            let mut hits = Vec::new();
            for (i, list) in index.lists.iter().enumerate() {
                if matches(y, &list.keyword_id)? {
                    hits.push(i);
                }
            }
            Ok(hits)
        })
        .collect()
}

/// Documents present in a located list for every position, by encrypted id.
pub fn intersect_candidates<'a>(index: &'a SecureIndex, located: &[Vec<usize>]) -> Vec<CandidateDoc<'a>> {
    let per_position: Vec<BTreeMap<u64, Vec<&'a GroupElement>>> = located
        .iter()
        .map(|lists| {
            let mut docs: BTreeMap<u64, Vec<&'a GroupElement>> = BTreeMap::new();
            for &i in lists {
                for e in &index.lists[i].entries {
                    docs.entry(e.enc_doc_id).or_default().extend(e.locations.iter());
                }
            }
            docs
        })
        .collect();
    let Some((first, rest)) = per_position.split_first() else {
        return Vec::new();
    };
    first
        .keys()
        .filter(|id| rest.iter().all(|m| m.contains_key(id)))
        .map(|&id| CandidateDoc { enc_doc_id: id, locations: per_position.iter().map(|m| m[&id].clone()).collect() })
        .collect()
}

/// Per-query state for adjacency tests: `ψ` prepared for repeated pairing,
/// and `ê(ψ, ℂ)`.
pub struct PhraseContext<'a> {
    group: &'a GroupParams,
    psi: PreparedElement<'a>,
    adjacency: &'a GroupElement,
    shift: PairingValue,
}

impl<'a> PhraseContext<'a> {
    pub fn new(group: &'a GroupParams, t: &'a Trapdoor) -> Self {
        let psi = group.prepare(&t.dispersal);
        let shift = psi.pair(&t.adjacency_ct);
        PhraseContext { group, psi, adjacency: &t.adjacency_ct, shift }
    }

    /// Whether `c_a` and `c_b` encrypt positions `a` and `a + 1`:
    /// `ê(c_a·c_b⁻¹·ℂ, ψ) = 1`.
    pub fn adjacent(&self, c_a: &GroupElement, c_b: &GroupElement) -> bool {
        let g = self.group;
        let x = g.hom_add(&g.hom_add(c_a, &g.hom_neg(c_b)), self.adjacency);
        g.gt_is_identity(&self.psi.pair(&x))
    }

    /// Whether some chain `ℓ_1 … ℓ_|Q|` with `ℓ_j` from position `j` has
    /// every consecutive pair adjacent. Adds pairings used to `pairings`.
    pub fn phrase_match(&self, cand: &CandidateDoc<'_>, strategy: PhraseStrategy, pairings: &mut u64) -> bool {
        match strategy {
            PhraseStrategy::Bilinear => self.match_bilinear(cand, pairings),
            PhraseStrategy::Pairwise => self.match_pairwise(cand, pairings),
        }
    }

    fn match_bilinear(&self, cand: &CandidateDoc<'_>, pairings: &mut u64) -> bool {
        let Some((first, rest)) = cand.locations.split_first() else {
            return false;
        };
        if rest.is_empty() {
            return true;
        }
        let mut targets: BTreeSet<PairingValue> = first
            .iter()
            .map(|c| {
                *pairings += 1;
                self.group.gt_mul(&self.psi.pair(c), &self.shift)
            })
            .collect();
        for (j, locs) in rest.iter().enumerate() {
            let last = j + 1 == rest.len();
            let mut next = BTreeSet::new();
            for c in locs {
                *pairings += 1;
                let v = self.psi.pair(c);
                if targets.contains(&v) {
                    if last {
                        return true;
                    }
                    next.insert(self.group.gt_mul(&v, &self.shift));
                }
            }
            if next.is_empty() {
                return false;
            }
            targets = next;
        }
        false
    }

    fn match_pairwise(&self, cand: &CandidateDoc<'_>, pairings: &mut u64) -> bool {
        let g = self.group;
        let Some((first, rest)) = cand.locations.split_first() else {
            return false;
        };
        let mut frontier: Vec<&GroupElement> = first.clone();
        for locs in rest {
            let mut next = Vec::new();
            for &c_b in locs {
                // c_b⁻¹·ℂ once per right-hand location.
                let tail = g.hom_add(&g.hom_neg(c_b), self.adjacency);
                let hit = frontier.iter().any(|&c_a| {
                    *pairings += 1;
                    g.gt_is_identity(&self.psi.pair(&g.hom_add(c_a, &tail)))
                });
                if hit {
                    next.push(c_b);
                }
            }
            if next.is_empty() {
                return false;
            }
            frontier = next;
        }
        true
    }
}

fn check_compatible(params: &PublicParams, index: &SecureIndex, t: &Trapdoor) -> Result<(), Error> {
    if index.params_digest != params.digest() {
        return Err(Error::ParamsMismatch);
    }
    if index.dim != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), got: index.dim });
    }
    if t.keyword_ids.is_empty() {
        return Err(Error::EmptyQuery);
    }
    for y in &t.keyword_ids {
        if y.0.dim() != params.dim() {
            return Err(Error::DimensionMismatch { expected: params.dim(), got: y.0.dim() });
        }
    }
    Ok(())
}

pub fn execute_query(params: &PublicParams, index: &SecureIndex, t: &Trapdoor) -> Result<QueryResult, Error> {
    execute_query_with(params, index, t, PhraseStrategy::default())
}

/// Locate, intersect and, unless the trapdoor is conjunctive-only, filter
/// by phrase adjacency.
pub fn execute_query_with(
    params: &PublicParams,
    index: &SecureIndex,
    t: &Trapdoor,
    strategy: PhraseStrategy,
) -> Result<QueryResult, Error> {
    check_compatible(params, index, t)?;
    let located = locate_lists(index, t)?;
    let mut stats = QueryStats {
        lists_scanned: index.lists.len() as u64,
        lists_matched: located.iter().map(|l| l.len() as u64).sum(),
        ..QueryStats::default()
    };
    let candidates = intersect_candidates(index, &located);
    stats.candidates_tested = candidates.len() as u64;
    let mut matches: Vec<u64> = if t.conjunctive_only {
        candidates.iter().map(|c| c.enc_doc_id).collect()
    } else {
        let ctx = PhraseContext::new(params.group(), t);
        stats.pairings += 1;
        candidates
            .iter()
            .filter(|c| ctx.phrase_match(c, strategy, &mut stats.pairings))
            .map(|c| c.enc_doc_id)
            .collect()
    };
    matches.sort_unstable();
    matches.dedup();
    Ok(QueryResult { matches, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgn::encrypt;
    use crate::keys::{keygen, MasterKey};
    use crate::trapdoor::{gen_trapdoor, PhraseQuery};
    use alloc::vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup() -> (MasterKey, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        (keygen(32, 8, &mut rng).unwrap(), rng)
    }

    #[test]
    fn adjacency_grid() {
        let (mk, mut rng) = setup();
        let t = gen_trapdoor(&mk, &PhraseQuery::parse("a b").unwrap(), false, &mut rng).unwrap();
        let group = mk.bgn_pk().params();
        let ctx = PhraseContext::new(group, &t);
        let enc: Vec<_> = (0..=40).map(|l| encrypt(mk.bgn_pk(), l, &mut rng).unwrap()).collect();
        for a in 1..=40usize {
            for b in 1..=40usize {
                assert_eq!(ctx.adjacent(&enc[a], &enc[b]), b == a + 1, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn strategies_agree_on_chains() {
        let (mk, mut rng) = setup();
        let t = gen_trapdoor(&mk, &PhraseQuery::parse("a b c").unwrap(), false, &mut rng).unwrap();
        let ctx = PhraseContext::new(mk.bgn_pk().params(), &t);
        let cases: [(&[u64], &[u64], &[u64], bool); 5] = [
            (&[5, 12, 20], &[6, 18], &[7], true),
            (&[5], &[18], &[19], false),
            (&[1, 9], &[10, 2], &[30, 11], true),
            (&[4], &[5], &[5, 7], false),
            (&[3, 4], &[4, 5], &[6], true),
        ];
        for (a, b, c, want) in cases {
            let enc = |ls: &[u64], rng: &mut ChaCha20Rng| -> Vec<GroupElement> {
                ls.iter().map(|&l| encrypt(mk.bgn_pk(), l, rng).unwrap()).collect()
            };
            let (ea, eb, ec) = (enc(a, &mut rng), enc(b, &mut rng), enc(c, &mut rng));
            let cand = CandidateDoc { enc_doc_id: 0, locations: vec![ea.iter().collect(), eb.iter().collect(), ec.iter().collect()] };
            let mut n = 0;
            assert_eq!(ctx.phrase_match(&cand, PhraseStrategy::Bilinear, &mut n), want, "{a:?} {b:?} {c:?}");
            assert_eq!(ctx.phrase_match(&cand, PhraseStrategy::Pairwise, &mut n), want, "{a:?} {b:?} {c:?}");
        }
    }

    #[test]
    fn single_keyword_candidates_always_match() {
        let (mk, mut rng) = setup();
        let t = gen_trapdoor(&mk, &PhraseQuery::parse("a").unwrap(), false, &mut rng).unwrap();
        let ctx = PhraseContext::new(mk.bgn_pk().params(), &t);
        let c = encrypt(mk.bgn_pk(), 3, &mut rng).unwrap();
        let cand = CandidateDoc { enc_doc_id: 0, locations: vec![vec![&c]] };
        let mut n = 0;
        assert!(ctx.phrase_match(&cand, PhraseStrategy::Bilinear, &mut n));
        assert!(ctx.phrase_match(&cand, PhraseStrategy::Pairwise, &mut n));
    }

    #[test]
    fn result_round_trip() {
        let r = QueryResult {
            matches: vec![3, 99, u64::MAX],
            stats: QueryStats { lists_scanned: 4, lists_matched: 2, candidates_tested: 3, pairings: 17 },
        };
        let mut w = Writer::new();
        r.write(&mut w);
        let bytes = w.into_bytes();
        let mut rd = Reader::new(&bytes);
        assert_eq!(QueryResult::read(&mut rd).unwrap(), r);
        rd.finish().unwrap();
    }
}
