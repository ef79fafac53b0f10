mod common;

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::{Arc, Mutex};
use std::thread;

use p3search::client::{publish, User};
use p3search::corpus::sample_phrases;
use p3search::error::Error;
use p3search::oracle;
use p3search::owner::Owner;
use p3search::server::Server;
use p3search::transport::{Direction, Endpoint, LocalEndpoint, Recording, TcpEndpoint};
use p3search::wire::{read_frame, ErrorCode, Frame, Kind};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn remote_code(e: Error) -> ErrorCode {
    match e {
        Error::Remote { code, .. } => code,
        other => panic!("expected a remote error, got {other}"),
    }
}

#[test]
fn local_search_matches_oracle() {
    let corpus = common::sample_corpus();
    let keys = common::keys(1);
    let published = common::publish(&keys, &corpus, 2);
    let params = keys.master.public_params();
    let owner = LocalEndpoint::new(Arc::new(Owner::new(keys, ChaCha20Rng::seed_from_u64(3))));
    let server = LocalEndpoint::new(Arc::new(Server::new()));
    publish(&server, &params, &published.index, &published.docs).unwrap();

    let user = User::new(&owner, &server);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for len in 2..=4 {
        for phrase in sample_phrases(&corpus, len, 5, &mut rng) {
            let text = phrase.join(" ");
            let outcome = user.search(&text, false).unwrap();
            let got: BTreeSet<i64> = outcome.docs.iter().map(|d| d.doc_id).collect();
            assert_eq!(got, oracle::phrase_search(&corpus, &phrase), "{text}");
            for d in &outcome.docs {
                assert_eq!(d.body, corpus.get(d.doc_id).unwrap().text.as_bytes());
            }
            let conj = user.search(&text, true).unwrap();
            let got: BTreeSet<i64> = conj.docs.iter().map(|d| d.doc_id).collect();
            assert_eq!(got, oracle::conjunctive_search(&corpus, &phrase), "{text}");
            assert_eq!(conj.stats.pairings, 0);
        }
    }
}

#[test]
fn tcp_publish_then_search() {
    let corpus = common::sample_corpus();
    let keys = common::keys(5);
    let published = common::publish(&keys, &corpus, 6);
    let params = keys.master.public_params();
    let owner_addr = common::spawn(Arc::new(Owner::new(keys, ChaCha20Rng::seed_from_u64(7))));
    let server_addr = common::spawn(Arc::new(Server::new()));

    publish(&TcpEndpoint::connect(server_addr).unwrap(), &params, &published.index, &published.docs).unwrap();
    let owner = TcpEndpoint::connect(owner_addr).unwrap();
    let server = TcpEndpoint::connect(server_addr).unwrap();
    let user = User::new(&owner, &server);
    let outcome = user.search("default value", false).unwrap();
    let phrase: Vec<String> = vec!["default".into(), "value".into()];
    let want = oracle::phrase_search(&corpus, &phrase);
    assert!(!want.is_empty());
    let got: BTreeSet<i64> = outcome.docs.iter().map(|d| d.doc_id).collect();
    assert_eq!(got, want);
}

#[test]
fn query_before_publish_is_rejected() {
    let keys = common::keys(8);
    let owner = LocalEndpoint::new(Arc::new(Owner::new(keys, ChaCha20Rng::seed_from_u64(9))));
    let server = LocalEndpoint::new(Arc::new(Server::new()));
    let err = User::new(&owner, &server).search("any phrase", false).unwrap_err();
    assert_eq!(remote_code(err), ErrorCode::NoIndex);
}

#[test]
fn mismatched_parameters_are_rejected() {
    let corpus = common::sample_corpus().prefix(10);
    let keys = common::keys(10);
    let other = common::keys(11);
    let published = common::publish(&keys, &corpus, 12);
    let server = LocalEndpoint::new(Arc::new(Server::new()));

    // An index paired with someone else's parameters.
    let wrong = other.master.public_params();
    let err = publish(&server, &wrong, &published.index, &published.docs).unwrap_err();
    assert!(matches!(remote_code(err), ErrorCode::ParamsMismatch | ErrorCode::BadPayload));

    // A trapdoor from another owner against a correctly published index.
    publish(&server, &keys.master.public_params(), &published.index, &published.docs).unwrap();
    let stranger = LocalEndpoint::new(Arc::new(Owner::new(other, ChaCha20Rng::seed_from_u64(13))));
    let err = User::new(&stranger, &server).search("a b", false).unwrap_err();
    assert!(matches!(remote_code(err), ErrorCode::ParamsMismatch | ErrorCode::BadPayload));
}

#[test]
fn wrong_role_requests_are_unsupported() {
    let server = LocalEndpoint::new(Arc::new(Server::new()));
    let owner = LocalEndpoint::new(Arc::new(Owner::new(common::keys(14), ChaCha20Rng::seed_from_u64(15))));
    let err = server.call(&Frame::new(Kind::TrapdoorRequest, vec![])).unwrap().into_result().unwrap_err();
    assert_eq!(remote_code(err), ErrorCode::Unsupported);
    let err = owner.call(&Frame::new(Kind::Query, vec![])).unwrap().into_result().unwrap_err();
    assert_eq!(remote_code(err), ErrorCode::Unsupported);
    let err = server.call(&Frame::new(Kind::Query, vec![1, 2, 3])).unwrap().into_result().unwrap_err();
    assert_eq!(remote_code(err), ErrorCode::NoIndex);
}

fn read_reply(stream: &mut TcpStream) -> Option<Frame> {
    read_frame(stream).ok().flatten()
}

#[test]
fn malformed_frames_get_error_replies() {
    let addr = common::spawn(Arc::new(Server::new()));

    // Bad checksum: consumed whole, connection stays usable.
    let mut stream = TcpStream::connect(addr).unwrap();
    let mut bytes = Frame::new(Kind::Query, vec![9; 20]).encode();
    *bytes.last_mut().unwrap() ^= 1;
    stream.write_all(&bytes).unwrap();
    let reply = read_reply(&mut stream).unwrap();
    assert_eq!(remote_code(reply.into_result().unwrap_err()), ErrorCode::Checksum);
    stream.write_all(&Frame::new(Kind::Query, vec![]).encode()).unwrap();
    let reply = read_reply(&mut stream).unwrap();
    assert_eq!(remote_code(reply.into_result().unwrap_err()), ErrorCode::NoIndex);

    // Unknown kind.
    let mut bytes = Frame::new(Kind::Query, vec![]).encode();
    bytes[6] = 200;
    let crc_at = bytes.len() - 4;
    let crc = crc32fast::hash(&bytes[..crc_at]);
    bytes[crc_at..].copy_from_slice(&crc.to_be_bytes());
    stream.write_all(&bytes).unwrap();
    let reply = read_reply(&mut stream).unwrap();
    assert_eq!(remote_code(reply.into_result().unwrap_err()), ErrorCode::UnknownKind);

    // Bad magic: an error reply, then the connection closes.
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.write_all(b"HTTP/1.1 GET /\r\n\r\n").unwrap();
    let reply = read_reply(&mut stream).unwrap();
    assert_eq!(remote_code(reply.into_result().unwrap_err()), ErrorCode::Malformed);
    let mut rest = Vec::new();
    assert_eq!(stream.read_to_end(&mut rest).unwrap_or(0), 0);
}

#[test]
fn concurrent_identical_queries_agree() {
    let corpus = common::sample_corpus();
    let keys = common::keys(16);
    let published = common::publish(&keys, &corpus, 17);
    let params = keys.master.public_params();
    let owner = Arc::new(Owner::new(keys, ChaCha20Rng::seed_from_u64(18)));
    let server_addr = common::spawn(Arc::new(Server::new()));
    publish(&TcpEndpoint::connect(server_addr).unwrap(), &params, &published.index, &published.docs).unwrap();

    let trapdoor = User::new(&LocalEndpoint::new(Arc::clone(&owner)), &LocalEndpoint::new(Arc::new(Server::new())))
        .trapdoor("the default", false)
        .unwrap();
    let results = Arc::new(Mutex::new(Vec::new()));
    let handles: Vec<_> = (0..10)
        .map(|_| {
            let trapdoor = trapdoor.clone();
            let results = Arc::clone(&results);
            thread::spawn(move || {
                let server = TcpEndpoint::connect(server_addr).unwrap();
                let reply = server.call(&Frame::new(Kind::Query, trapdoor)).unwrap();
                let payload = reply.expect(Kind::QueryResult).unwrap().payload;
                results.lock().unwrap().push(payload);
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    let results = results.lock().unwrap();
    assert_eq!(results.len(), 10);
    assert!(results.iter().all(|r| r == &results[0]));
}

#[test]
fn one_query_round_per_search() {
    let corpus = common::sample_corpus().prefix(20);
    let keys = common::keys(19);
    let published = common::publish(&keys, &corpus, 20);
    let params = keys.master.public_params();
    let log = Arc::new(Mutex::new(Vec::new()));
    let owner = Recording::new(
        LocalEndpoint::new(Arc::new(Owner::new(keys, ChaCha20Rng::seed_from_u64(21)))),
        "owner",
        Arc::clone(&log),
    );
    let server = Recording::new(LocalEndpoint::new(Arc::new(Server::new())), "server", Arc::clone(&log));
    publish(&server, &params, &published.index, &published.docs).unwrap();
    log.lock().unwrap().clear();

    let user = User::new(&owner, &server);
    let mut rng = ChaCha20Rng::seed_from_u64(22);
    let phrases = sample_phrases(&corpus, 2, 5, &mut rng);
    for phrase in &phrases {
        user.search(&phrase.join(" "), false).unwrap();
    }
    let log = log.lock().unwrap();
    let to_server: Vec<_> = log.iter().filter(|e| e.peer == "server").collect();
    assert_eq!(to_server.len(), 2 * phrases.len());
    for pair in to_server.chunks(2) {
        assert_eq!((pair[0].direction, pair[0].kind), (Direction::Request, Kind::Query));
        assert_eq!((pair[1].direction, pair[1].kind), (Direction::Reply, Kind::QueryResult));
    }
}
