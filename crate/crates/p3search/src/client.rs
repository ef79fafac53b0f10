//! The user: obtains a trapdoor from the owner, sends one query to the
//! server, and has the owner open what comes back.

use p3search_core::{PublicParams, QueryStats, SecureIndex};

use crate::error::Result;
use crate::transport::Endpoint;
use crate::wire::{
    decrypt_request_frame, parse_decrypt_response, put_docs_frame, EncryptedDocument, Frame, Kind, OpenedDocument,
    PublishIndex, QueryResponse, TrapdoorRequest,
};

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub docs: Vec<OpenedDocument>,
    /// Encrypted ids returned by the server, padding included.
    pub enc_matches: Vec<u64>,
    pub stats: QueryStats,
    pub trapdoor_bytes: usize,
    pub result_bytes: usize,
}

pub struct User<'a> {
    owner: &'a dyn Endpoint,
    server: &'a dyn Endpoint,
}

impl<'a> User<'a> {
    pub fn new(owner: &'a dyn Endpoint, server: &'a dyn Endpoint) -> Self {
        User { owner, server }
    }

    /// Fetches a serialized trapdoor for `phrase` from the owner.
    pub fn trapdoor(&self, phrase: &str, conjunctive: bool) -> Result<Vec<u8>> {
        let req = TrapdoorRequest { conjunctive, phrase: phrase.to_string() };
        Ok(self.owner.call(&req.to_frame())?.expect(Kind::TrapdoorResponse)?.payload)
    }

    /// One QUERY / QUERY_RESULT exchange with the server.
    pub fn query(&self, trapdoor: Vec<u8>) -> Result<(QueryResponse, usize)> {
        let reply = self.server.call(&Frame::new(Kind::Query, trapdoor))?.expect(Kind::QueryResult)?;
        let len = reply.payload.len();
        Ok((QueryResponse::parse(&reply.payload)?, len))
    }

    pub fn search(&self, phrase: &str, conjunctive: bool) -> Result<SearchOutcome> {
        let trapdoor = self.trapdoor(phrase, conjunctive)?;
        let trapdoor_bytes = trapdoor.len();
        let (response, result_bytes) = self.query(trapdoor)?;
        // Ids the server holds no body for are still opened.
        let mut to_open = response.docs.clone();
        for &id in &response.result.matches {
            if !to_open.iter().any(|d| d.enc_doc_id == id) {
                to_open.push(EncryptedDocument { enc_doc_id: id, ciphertext: Vec::new() });
            }
        }
        let docs = if to_open.is_empty() {
            Vec::new()
        } else {
            let reply = self.owner.call(&decrypt_request_frame(&to_open))?.expect(Kind::DecryptResponse)?;
            parse_decrypt_response(&reply.payload)?
        };
        Ok(SearchOutcome {
            docs,
            enc_matches: response.result.matches,
            stats: response.result.stats,
            trapdoor_bytes,
            result_bytes,
        })
    }
}

/// Uploads the index, then the documents.
pub fn publish(server: &dyn Endpoint, params: &PublicParams, index: &SecureIndex, docs: &[EncryptedDocument]) -> Result<()> {
    let msg = PublishIndex { params: params.to_bytes(), index: index.to_bytes(params.group()) };
    server.call(&msg.to_frame())?.expect(Kind::Ack)?;
    server.call(&put_docs_frame(docs))?.expect(Kind::Ack)?;
    Ok(())
}

