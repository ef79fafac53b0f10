//! On-disk files: owner keys, public parameters, encrypted document sets.
//! The index and trapdoor encodings live in the core crate.

use std::fs;
use std::path::Path;

use p3search_core::codec::{Reader, Writer};
use p3search_core::{MasterKey, PublicParams};

use crate::docs::DocumentKey;
use crate::error::{Error, Result};
use crate::wire::{read_documents, write_documents, EncryptedDocument};

pub const OWNER_KEY_MAGIC: &[u8; 4] = b"P3MK";
pub const PARAMS_MAGIC: &[u8; 4] = b"P3PP";
pub const DOCS_MAGIC: &[u8; 4] = b"P3ED";
pub const FILE_VERSION: u16 = 1;

pub const OWNER_KEY_FILE: &str = "owner.key";
pub const PARAMS_FILE: &str = "params.bin";

fn header(w: &mut Writer, magic: &[u8; 4]) {
    w.raw(magic).u16(FILE_VERSION);
}

fn check_header(r: &mut Reader<'_>, magic: &[u8; 4], what: &'static str) -> Result<()> {
    if r.raw(4)? != magic {
        return Err(Error::Frame(what));
    }
    if r.u16()? != FILE_VERSION {
        return Err(Error::Frame("unsupported file version"));
    }
    Ok(())
}

/// Everything the owner keeps secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwnerKeys {
    pub master: MasterKey,
    pub doc_key: DocumentKey,
}

impl OwnerKeys {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        header(&mut w, OWNER_KEY_MAGIC);
        w.prefixed(&self.master.to_bytes()).raw(self.doc_key.as_bytes());
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        check_header(&mut r, OWNER_KEY_MAGIC, "not an owner key file")?;
        let master = MasterKey::from_bytes(r.prefixed()?)?;
        let doc_key = DocumentKey::from_bytes(r.array()?);
        r.finish()?;
        Ok(OwnerKeys { master, doc_key })
    }
}

pub fn params_to_bytes(params: &PublicParams) -> Vec<u8> {
    let mut w = Writer::new();
    header(&mut w, PARAMS_MAGIC);
    w.prefixed(&params.to_bytes());
    w.into_bytes()
}

pub fn params_from_bytes(bytes: &[u8]) -> Result<PublicParams> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, PARAMS_MAGIC, "not a parameters file")?;
    let params = PublicParams::from_bytes(r.prefixed()?)?;
    r.finish()?;
    Ok(params)
}

pub fn docs_to_bytes(docs: &[EncryptedDocument]) -> Vec<u8> {
    let mut w = Writer::new();
    header(&mut w, DOCS_MAGIC);
    write_documents(&mut w, docs);
    w.into_bytes()
}

pub fn docs_from_bytes(bytes: &[u8]) -> Result<Vec<EncryptedDocument>> {
    let mut r = Reader::new(bytes);
    check_header(&mut r, DOCS_MAGIC, "not an encrypted document file")?;
    let docs = read_documents(&mut r)?;
    r.finish()?;
    Ok(docs)
}

pub fn write_owner_keys(dir: &Path, keys: &OwnerKeys) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(OWNER_KEY_FILE), keys.to_bytes())?;
    fs::write(dir.join(PARAMS_FILE), params_to_bytes(&keys.master.public_params()))?;
    Ok(())
}

pub fn read_owner_keys(dir: &Path) -> Result<OwnerKeys> {
    OwnerKeys::from_bytes(&fs::read(dir.join(OWNER_KEY_FILE))?)
}

/// Accepts a key directory or a direct path to a parameters file.
pub fn read_params(path: &Path) -> Result<PublicParams> {
    let file = if path.is_dir() { path.join(PARAMS_FILE) } else { path.to_path_buf() };
    params_from_bytes(&fs::read(file)?)
}
