//! Framed binary protocol between owner, server and users.
//!
//! A frame is `"P3WP" | version u16 | kind u8 | length u32 | payload |
//! crc32 u32`, big-endian, with the checksum taken over everything before it.

use std::io::{self, Read, Write};

use p3search_core::codec::{Reader, Writer};
use p3search_core::index::DocId;
use p3search_core::QueryResult;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"P3WP";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 11;
pub const MAX_PAYLOAD: usize = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Kind {
    PublishIndex = 1,
    PutDocs = 2,
    Query = 3,
    QueryResult = 4,
    TrapdoorRequest = 5,
    TrapdoorResponse = 6,
    Error = 7,
    Ack = 8,
    DecryptRequest = 9,
    DecryptResponse = 10,
}

impl Kind {
    pub fn from_u8(v: u8) -> Option<Kind> {
        use Kind::*;
        Some(match v {
            1 => PublishIndex,
            2 => PutDocs,
            3 => Query,
            4 => QueryResult,
            5 => TrapdoorRequest,
            6 => TrapdoorResponse,
            7 => Error,
            8 => Ack,
            9 => DecryptRequest,
            10 => DecryptResponse,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum ErrorCode {
    Malformed = 1,
    UnknownKind = 2,
    Checksum = 3,
    Version = 4,
    NoIndex = 5,
    ParamsMismatch = 6,
    BadPayload = 7,
    Unsupported = 8,
    Internal = 9,
}

impl ErrorCode {
    pub fn from_u16(v: u16) -> ErrorCode {
        use ErrorCode::*;
        match v {
            1 => Malformed,
            2 => UnknownKind,
            3 => Checksum,
            4 => Version,
            5 => NoIndex,
            6 => ParamsMismatch,
            7 => BadPayload,
            8 => Unsupported,
            _ => Internal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: Kind,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: Kind, payload: Vec<u8>) -> Self {
        Frame { kind, payload }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        let mut w = Writer::new();
        w.u16(code as u16).prefixed(message.into().as_bytes());
        Frame::new(Kind::Error, w.into_bytes())
    }

    pub fn ack() -> Self {
        Frame::new(Kind::Ack, Vec::new())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len() + 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_be_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        out
    }

    /// Decodes one complete frame.
    pub fn decode(bytes: &[u8]) -> Result<Frame, FrameError> {
        let mut cursor = bytes;
        let frame = read_frame(&mut cursor)?.ok_or(FrameError::Desync("empty input"))?;
        if !cursor.is_empty() {
            return Err(FrameError::Desync("trailing bytes after frame"));
        }
        Ok(frame)
    }

    /// Turns an ERROR frame into `Err`, anything else into `Ok(self)`.
    pub fn into_result(self) -> Result<Frame> {
        if self.kind != Kind::Error {
            return Ok(self);
        }
        let mut r = Reader::new(&self.payload);
        let code = r.u16().map(ErrorCode::from_u16).unwrap_or(ErrorCode::Malformed);
        let message = r.prefixed().map(|m| String::from_utf8_lossy(m).into_owned()).unwrap_or_default();
        Err(Error::Remote { code, message })
    }

    pub fn expect(self, kind: Kind) -> Result<Frame> {
        let f = self.into_result()?;
        if f.kind != kind {
            return Err(Error::UnexpectedReply(f.kind));
        }
        Ok(f)
    }
}

#[derive(Debug)]
pub enum FrameError {
    Io(io::Error),
    /// Framing is lost; the connection cannot continue.
    Desync(&'static str),
    /// The frame was consumed whole but is invalid.
    Rejected(ErrorCode, &'static str),
}

impl FrameError {
    pub fn reply(&self) -> Frame {
        match self {
            FrameError::Io(e) => Frame::error(ErrorCode::Malformed, e.to_string()),
            FrameError::Desync(m) => Frame::error(ErrorCode::Malformed, *m),
            FrameError::Rejected(code, m) => Frame::error(*code, *m),
        }
    }
}

impl From<FrameError> for Error {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Io(e) => Error::Io(e),
            FrameError::Desync(m) | FrameError::Rejected(_, m) => Error::Frame(m),
        }
    }
}

/// Reads one frame; `Ok(None)` on a clean end of stream before any byte.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Frame>, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        match r.read(&mut header[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(FrameError::Desync("truncated header")),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(FrameError::Io(e)),
        }
    }
    if &header[..4] != MAGIC {
        return Err(FrameError::Desync("bad magic"));
    }
    let len = u32::from_be_bytes([header[7], header[8], header[9], header[10]]) as usize;
    if len > MAX_PAYLOAD {
        return Err(FrameError::Desync("payload too large"));
    }
    let mut rest = vec![0u8; len + 4];
    r.read_exact(&mut rest).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameError::Desync("truncated payload"),
        _ => FrameError::Io(e),
    })?;
    let crc = u32::from_be_bytes(rest[len..].try_into().expect("4 bytes"));
    rest.truncate(len);
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(&header);
    hasher.update(&rest);
    if hasher.finalize() != crc {
        return Err(FrameError::Rejected(ErrorCode::Checksum, "checksum mismatch"));
    }
    if u16::from_be_bytes([header[4], header[5]]) != VERSION {
        return Err(FrameError::Rejected(ErrorCode::Version, "unsupported protocol version"));
    }
    let kind = Kind::from_u8(header[6]).ok_or(FrameError::Rejected(ErrorCode::UnknownKind, "unknown message kind"))?;
    Ok(Some(Frame { kind, payload: rest }))
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> io::Result<()> {
    w.write_all(&frame.encode())?;
    w.flush()
}

/// A document body encrypted under the owner's document key, stored and
/// returned by the server under its permuted id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedDocument {
    pub enc_doc_id: u64,
    pub ciphertext: Vec<u8>,
}

pub fn write_documents(w: &mut Writer, docs: &[EncryptedDocument]) {
    w.u32(docs.len() as u32);
    for d in docs {
        w.u64(d.enc_doc_id).prefixed(&d.ciphertext);
    }
}

pub fn read_documents(r: &mut Reader<'_>) -> Result<Vec<EncryptedDocument>> {
    let count = r.u32()? as usize;
    if count.saturating_mul(12) > r.remaining() {
        return Err(Error::Frame("document count exceeds payload"));
    }
    (0..count)
        .map(|_| Ok(EncryptedDocument { enc_doc_id: r.u64()?, ciphertext: r.prefixed()?.to_vec() }))
        .collect()
}

fn finish(r: Reader<'_>) -> Result<()> {
    r.finish().map_err(Error::from)
}

/// `PUBLISH_INDEX`: public parameters and the serialized index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishIndex {
    pub params: Vec<u8>,
    pub index: Vec<u8>,
}

impl PublishIndex {
    pub fn to_frame(&self) -> Frame {
        let mut w = Writer::with_capacity(self.params.len() + self.index.len() + 8);
        w.prefixed(&self.params).prefixed(&self.index);
        Frame::new(Kind::PublishIndex, w.into_bytes())
    }

    pub fn parse(payload: &[u8]) -> Result<Self> {
        let mut r = Reader::new(payload);
        let out = PublishIndex { params: r.prefixed()?.to_vec(), index: r.prefixed()?.to_vec() };
        finish(r)?;
        Ok(out)
    }
}

pub fn put_docs_frame(docs: &[EncryptedDocument]) -> Frame {
    let mut w = Writer::new();
    write_documents(&mut w, docs);
    Frame::new(Kind::PutDocs, w.into_bytes())
}

pub fn parse_put_docs(payload: &[u8]) -> Result<Vec<EncryptedDocument>> {
    let mut r = Reader::new(payload);
    let docs = read_documents(&mut r)?;
    finish(r)?;
    Ok(docs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapdoorRequest {
    pub conjunctive: bool,
    pub phrase: String,
}

impl TrapdoorRequest {
    pub fn to_frame(&self) -> Frame {
        let mut w = Writer::new();
        w.u8(self.conjunctive as u8).prefixed(self.phrase.as_bytes());
        Frame::new(Kind::TrapdoorRequest, w.into_bytes())
    }

    pub fn parse(payload: &[u8]) -> Result<Self> {
        let mut r = Reader::new(payload);
        let conjunctive = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(Error::Frame("conjunctive flag")),
        };
        let phrase = String::from_utf8(r.prefixed()?.to_vec()).map_err(|_| p3search_core::Error::Encoding)?;
        finish(r)?;
        Ok(TrapdoorRequest { conjunctive, phrase })
    }
}

/// `QUERY_RESULT`: matching encrypted ids, engine counters, and whichever
/// matching documents the server stores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResponse {
    pub result: QueryResult,
    pub docs: Vec<EncryptedDocument>,
}

impl QueryResponse {
    pub fn to_frame(&self) -> Frame {
        let mut w = Writer::new();
        self.result.write(&mut w);
        write_documents(&mut w, &self.docs);
        Frame::new(Kind::QueryResult, w.into_bytes())
    }

    pub fn parse(payload: &[u8]) -> Result<Self> {
        let mut r = Reader::new(payload);
        let result = QueryResult::read(&mut r)?;
        let docs = read_documents(&mut r)?;
        finish(r)?;
        Ok(QueryResponse { result, docs })
    }
}

/// `DECRYPT_REQUEST`: documents (or bare ids, with empty ciphertext) the
/// user asks the owner to open.
pub fn decrypt_request_frame(docs: &[EncryptedDocument]) -> Frame {
    let mut w = Writer::new();
    write_documents(&mut w, docs);
    Frame::new(Kind::DecryptRequest, w.into_bytes())
}

pub fn parse_decrypt_request(payload: &[u8]) -> Result<Vec<EncryptedDocument>> {
    parse_put_docs(payload)
}

/// One opened document; `body` is empty when no ciphertext was supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenedDocument {
    pub doc_id: DocId,
    pub body: Vec<u8>,
}

pub fn decrypt_response_frame(docs: &[OpenedDocument]) -> Frame {
    let mut w = Writer::new();
    w.u32(docs.len() as u32);
    for d in docs {
        w.u64(d.doc_id as u64).prefixed(&d.body);
    }
    Frame::new(Kind::DecryptResponse, w.into_bytes())
}

pub fn parse_decrypt_response(payload: &[u8]) -> Result<Vec<OpenedDocument>> {
    let mut r = Reader::new(payload);
    let count = r.u32()? as usize;
    if count.saturating_mul(12) > r.remaining() {
        return Err(Error::Frame("document count exceeds payload"));
    }
    let docs = (0..count)
        .map(|_| Ok(OpenedDocument { doc_id: r.u64()? as i64, body: r.prefixed()?.to_vec() }))
        .collect::<Result<_>>()?;
    finish(r)?;
    Ok(docs)
}
