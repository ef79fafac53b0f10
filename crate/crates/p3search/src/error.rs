use std::io;

use thiserror::Error;

use crate::wire::ErrorCode;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] p3search_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("frame: {0}")]
    Frame(&'static str),
    #[error("peer replied with error {code:?}: {message}")]
    Remote { code: ErrorCode, message: String },
    #[error("unexpected reply kind {0:?}")]
    UnexpectedReply(crate::wire::Kind),
    #[error("document authentication failed for id {0:#018x}")]
    DocumentAuth(u64),
    #[error("{0}")]
    Usage(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
