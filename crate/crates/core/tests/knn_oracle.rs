use p3search_core::knn::{
    enc_keyword_for_index, enc_keyword_for_trapdoor, enc_keyword_for_trapdoor_with_dummies, encrypted_inner_product,
    matches, prf_eval, prf_eval_dummy, IndexKeywordId, KnnSecrets, DUMMY_LEN, FIELD_MODULUS,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

const P: u128 = FIELD_MODULUS as u128;

/// `f(t') = (t' - t)·∏(t' - r_i)` evaluated directly from the roots.
fn root_product(secrets: &KnnSecrets, indexed: &str, queried: &str, dummies: &[[u8; DUMMY_LEN]]) -> u64 {
    let key = secrets.prf_key();
    let x = prf_eval(key, indexed) as u128;
    let mut roots = vec![prf_eval(key, queried) as u128];
    roots.extend(dummies.iter().map(|d| prf_eval_dummy(key, d) as u128));
    roots.iter().fold(1u128, |acc, &r| acc * ((x + P - r) % P) % P) as u64
}

fn random_word(rng: &mut ChaCha20Rng) -> String {
    let len = 1 + rng.next_u32() as usize % 10;
    (0..len).map(|_| (b'a' + (rng.next_u32() % 26) as u8) as char).collect()
}

fn dummies(rng: &mut ChaCha20Rng, count: usize) -> Vec<[u8; DUMMY_LEN]> {
    (0..count)
        .map(|_| {
            let mut d = [0u8; DUMMY_LEN];
            rng.fill_bytes(&mut d);
            d
        })
        .collect()
}

#[test]
fn encrypted_product_equals_root_product() {
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    for dim in [3usize, 5, 8] {
        let secrets = KnnSecrets::generate(dim, &mut rng).unwrap();
        for _ in 0..300 {
            let w = random_word(&mut rng);
            let other = if rng.next_u32() % 2 == 0 { w.clone() } else { random_word(&mut rng) };
            let ds = dummies(&mut rng, dim - 2);
            let y = enc_keyword_for_trapdoor_with_dummies(&secrets, &w, &ds, &mut rng);
            let z = enc_keyword_for_index(&secrets, &other, &mut rng);
            let want = root_product(&secrets, &other, &w, &ds);
            assert_eq!(encrypted_inner_product(&y, &z).unwrap(), want);
            assert_eq!(matches(&y, &z).unwrap(), w == other);
        }
    }
}

#[test]
fn trapdoor_ids_are_unlinkable_but_consistent() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let secrets = KnnSecrets::generate(8, &mut rng).unwrap();
    let z = enc_keyword_for_index(&secrets, "protocol", &mut rng);
    let ids: Vec<_> = (0..100).map(|_| enc_keyword_for_trapdoor(&secrets, "protocol", &mut rng)).collect();
    for (i, a) in ids.iter().enumerate() {
        assert!(matches(a, &z).unwrap());
        for b in &ids[i + 1..] {
            assert_ne!(a, b);
        }
    }
}

#[test]
fn tampered_index_id_stops_matching() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let secrets = KnnSecrets::generate(8, &mut rng).unwrap();
    let y = enc_keyword_for_trapdoor(&secrets, "heart", &mut rng);
    for i in 0..200 {
        let mut z = enc_keyword_for_index(&secrets, "heart", &mut rng);
        let half = if i % 2 == 0 { &mut z.0.a } else { &mut z.0.b };
        let slot = i % half.len();
        half[slot] = (half[slot] + 1 + rng.next_u64() % (FIELD_MODULUS - 1)) % FIELD_MODULUS;
        assert!(!matches(&y, &IndexKeywordId(z.0)).unwrap());
    }
}

#[test]
fn independent_keys_disagree() {
    let mut rng = ChaCha20Rng::seed_from_u64(103);
    for _ in 0..100 {
        let mut k1 = [0u8; 32];
        let mut k2 = [0u8; 32];
        rng.fill_bytes(&mut k1);
        rng.fill_bytes(&mut k2);
        assert_ne!(prf_eval(&k1, "heart"), prf_eval(&k2, "heart"));
    }
}
