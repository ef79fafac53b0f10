//! Owner key material and the parameters published to the server.

use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::bgn::{self, BgnPublicKey, BgnSecretKey, GroupParams};
use crate::codec::{Reader, Writer};
use crate::error::Error;
use crate::knn::{KnnSecrets, FIELD_MODULUS};
use crate::prp::{Prp, PRP_KEY_LEN};

pub type ParamsDigest = [u8; 32];

/// What the server needs to run queries: the group description and the
/// keyword-layer dimensions. No generator and no secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicParams {
    group: GroupParams,
    dim: usize,
    knn_modulus: u64,
}

impl PublicParams {
    pub fn new(group: GroupParams, dim: usize) -> Self {
        PublicParams { group, dim, knn_modulus: FIELD_MODULUS }
    }

    pub fn group(&self) -> &GroupParams {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn knn_modulus(&self) -> u64 {
        self.knn_modulus
    }

    pub fn digest(&self) -> ParamsDigest {
        Sha256::digest(self.to_bytes()).into()
    }

    pub fn write(&self, w: &mut Writer) {
        self.group.write(w);
        w.u16(self.dim as u16);
        w.u64(self.knn_modulus);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let group = GroupParams::read(r)?;
        let dim = r.u16()? as usize;
        let knn_modulus = r.u64()?;
        if knn_modulus != FIELD_MODULUS {
            return Err(Error::Malformed("unsupported kNN modulus"));
        }
        Ok(PublicParams { group, dim, knn_modulus })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = Reader::new(bytes);
        let out = Self::read(&mut r)?;
        r.finish()?;
        Ok(out)
    }
}

/// Owner-held secrets: BGN keys `(p, q, g, h)`, the kNN secrets
/// `(S, M1, M2, K)` and the document-id permutation key `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterKey {
    bgn_pk: BgnPublicKey,
    bgn_sk: BgnSecretKey,
    knn: KnnSecrets,
    prp: Prp,
}

impl MasterKey {
    pub fn from_parts(bgn_pk: BgnPublicKey, bgn_sk: BgnSecretKey, knn: KnnSecrets, prp_key: [u8; PRP_KEY_LEN]) -> Self {
        MasterKey { bgn_pk, bgn_sk, knn, prp: Prp::new(prp_key) }
    }

    pub fn bgn_pk(&self) -> &BgnPublicKey {
        &self.bgn_pk
    }

    pub fn bgn_sk(&self) -> &BgnSecretKey {
        &self.bgn_sk
    }

    pub fn knn(&self) -> &KnnSecrets {
        &self.knn
    }

    pub fn prp(&self) -> &Prp {
        &self.prp
    }

    pub fn public_params(&self) -> PublicParams {
        PublicParams::new(self.bgn_pk.params().clone(), self.knn.dim())
    }

    pub fn write(&self, w: &mut Writer) {
        self.bgn_pk.write(w);
        self.bgn_sk.write(w);
        self.knn.write(w);
        w.raw(self.prp.key());
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let bgn_pk = BgnPublicKey::read(r)?;
        let bgn_sk = BgnSecretKey::read(r, &bgn_pk)?;
        let knn = KnnSecrets::read(r)?;
        let prp_key = r.array()?;
        Ok(MasterKey::from_parts(bgn_pk, bgn_sk, knn, prp_key))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = Reader::new(bytes);
        let out = Self::read(&mut r)?;
        r.finish()?;
        Ok(out)
    }
}

/// Fresh master key with `tau`-bit BGN primes and kNN dimension `dim`.
pub fn keygen<R: RngCore + CryptoRng + ?Sized>(tau: u32, dim: usize, rng: &mut R) -> Result<MasterKey, Error> {
    let knn = KnnSecrets::generate(dim, rng)?;
    let (bgn_pk, bgn_sk) = bgn::keygen(tau, rng)?;
    let mut prp_key = [0u8; PRP_KEY_LEN];
    rng.fill_bytes(&mut prp_key);
    Ok(MasterKey::from_parts(bgn_pk, bgn_sk, knn, prp_key))
}
