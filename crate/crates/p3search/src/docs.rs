//! Authenticated encryption of document bodies (AES-256-GCM, random 96-bit
//! nonce, permuted document id as associated data).

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Key, Nonce};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::wire::EncryptedDocument;

pub const DOC_KEY_LEN: usize = 32;
const NONCE_LEN: usize = 12;

#[derive(Clone, PartialEq, Eq)]
pub struct DocumentKey([u8; DOC_KEY_LEN]);

impl std::fmt::Debug for DocumentKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("DocumentKey(..)")
    }
}

impl DocumentKey {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut k = [0u8; DOC_KEY_LEN];
        rng.fill_bytes(&mut k);
        DocumentKey(k)
    }

    pub fn from_bytes(bytes: [u8; DOC_KEY_LEN]) -> Self {
        DocumentKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DOC_KEY_LEN] {
        &self.0
    }

    fn cipher(&self) -> Aes256Gcm {
        Aes256Gcm::new(Key::<Aes256Gcm>::from_slice(&self.0))
    }

    pub fn seal<R: RngCore + CryptoRng>(&self, enc_doc_id: u64, body: &[u8], rng: &mut R) -> EncryptedDocument {
        let mut nonce = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut nonce);
        let aad = enc_doc_id.to_be_bytes();
        let ct = self
            .cipher()
            .encrypt(Nonce::from_slice(&nonce), Payload { msg: body, aad: &aad })
            .expect("AES-GCM encryption of an in-memory buffer");
        let mut ciphertext = nonce.to_vec();
        ciphertext.extend_from_slice(&ct);
        EncryptedDocument { enc_doc_id, ciphertext }
    }

    pub fn open(&self, doc: &EncryptedDocument) -> Result<Vec<u8>> {
        if doc.ciphertext.len() < NONCE_LEN {
            return Err(Error::DocumentAuth(doc.enc_doc_id));
        }
        let (nonce, ct) = doc.ciphertext.split_at(NONCE_LEN);
        let aad = doc.enc_doc_id.to_be_bytes();
        self.cipher()
            .decrypt(Nonce::from_slice(nonce), Payload { msg: ct, aad: &aad })
            .map_err(|_| Error::DocumentAuth(doc.enc_doc_id))
    }
}
