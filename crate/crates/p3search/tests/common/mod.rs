#![allow(dead_code)]

use std::net::{SocketAddr, TcpListener};
use std::path::PathBuf;
use std::sync::Arc;
use std::thread;

use p3search::corpus::Corpus;
use p3search::formats::OwnerKeys;
use p3search::owner::{build, generate_keys, EtaChoice, Published};
use p3search::transport::{serve, Service};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn sample_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join("sample")
}

pub fn sample_corpus() -> Corpus {
    Corpus::load_dir(&sample_dir()).expect("sample corpus")
}

pub fn keys(seed: u64) -> OwnerKeys {
    generate_keys(32, 8, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

pub fn publish(keys: &OwnerKeys, corpus: &Corpus, seed: u64) -> Published {
    build(keys, corpus, EtaChoice::Median, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

/// Serves on an ephemeral port from a background thread.
pub fn spawn<S: Service + 'static>(service: Arc<S>) -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || serve(listener, service));
    addr
}
