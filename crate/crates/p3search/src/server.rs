//! The cloud server: hosts the secure index and encrypted documents and
//! answers queries. It only ever sees public parameters, the index,
//! trapdoors and document ciphertexts.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use p3search_core::query::execute_query;
use p3search_core::{PublicParams, SecureIndex, Trapdoor};

use crate::transport::Service;
use crate::wire::{parse_put_docs, EncryptedDocument, ErrorCode, Frame, Kind, PublishIndex, QueryResponse};

#[derive(Clone)]
struct Hosted {
    params: PublicParams,
    index: SecureIndex,
    docs: HashMap<u64, Vec<u8>>,
}

#[derive(Default)]
pub struct Server {
    state: RwLock<Option<Arc<Hosted>>>,
}

impl Server {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn has_index(&self) -> bool {
        self.state.read().expect("state lock").is_some()
    }

    fn publish(&self, payload: &[u8]) -> Frame {
        let Ok(msg) = PublishIndex::parse(payload) else {
            return Frame::error(ErrorCode::BadPayload, "malformed publish payload");
        };
        let params = match PublicParams::from_bytes(&msg.params) {
            Ok(p) => p,
            Err(e) => return Frame::error(ErrorCode::BadPayload, format!("parameters: {e}")),
        };
        let index = match SecureIndex::from_bytes(&msg.index, params.group()) {
            Ok(i) => i,
            Err(e) => return Frame::error(ErrorCode::BadPayload, format!("index: {e}")),
        };
        if index.params_digest != params.digest() || index.dim != params.dim() {
            return Frame::error(ErrorCode::ParamsMismatch, "index was built under different parameters");
        }
        let hosted = Hosted { params, index, docs: HashMap::new() };
        *self.state.write().expect("state lock") = Some(Arc::new(hosted));
        Frame::ack()
    }

    fn put_docs(&self, payload: &[u8]) -> Frame {
        let docs = match parse_put_docs(payload) {
            Ok(d) => d,
            Err(e) => return Frame::error(ErrorCode::BadPayload, e.to_string()),
        };
        let mut state = self.state.write().expect("state lock");
        let Some(hosted) = state.as_mut() else {
            return Frame::error(ErrorCode::NoIndex, "no index");
        };
        // In-flight queries keep the snapshot they started with.
        let hosted = Arc::make_mut(hosted);
        for d in docs {
            hosted.docs.insert(d.enc_doc_id, d.ciphertext);
        }
        Frame::ack()
    }

    fn query(&self, payload: &[u8]) -> Frame {
        let Some(hosted) = self.state.read().expect("state lock").clone() else {
            return Frame::error(ErrorCode::NoIndex, "no index");
        };
        let trapdoor = match Trapdoor::from_bytes(payload, hosted.params.group()) {
            Ok(t) => t,
            Err(e) => return Frame::error(ErrorCode::BadPayload, format!("trapdoor: {e}")),
        };
        let result = match execute_query(&hosted.params, &hosted.index, &trapdoor) {
            Ok(r) => r,
            Err(e) => return Frame::error(ErrorCode::ParamsMismatch, e.to_string()),
        };
        let docs = result
            .matches
            .iter()
            .filter_map(|id| {
                let ct = hosted.docs.get(id)?;
                Some(EncryptedDocument { enc_doc_id: *id, ciphertext: ct.clone() })
            })
            .collect();
        QueryResponse { result, docs }.to_frame()
    }
}

impl Service for Server {
    fn handle(&self, request: &Frame) -> Frame {
        match request.kind {
            Kind::PublishIndex => self.publish(&request.payload),
            Kind::PutDocs => self.put_docs(&request.payload),
            Kind::Query => self.query(&request.payload),
            other => Frame::error(ErrorCode::Unsupported, format!("server does not accept {other:?}")),
        }
    }
}
