//! Keyed permutation of 64-bit document identifiers.
//!
//! A balanced 4-round Feistel network on two 32-bit halves, with
//! HMAC-SHA256 round functions. Identifiers are `i64` viewed as `u64`, so
//! real documents (positive) and padding counters (negative) share one
//! domain and are indistinguishable after encryption.

use hmac::{Hmac, Mac};
use sha2::Sha256;

pub const PRP_KEY_LEN: usize = 32;
const ROUNDS: u8 = 4;

#[derive(Clone, PartialEq, Eq)]
pub struct Prp {
    key: [u8; PRP_KEY_LEN],
}

impl core::fmt::Debug for Prp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Prp(..)")
    }
}

impl Prp {
    pub fn new(key: [u8; PRP_KEY_LEN]) -> Self {
        Prp { key }
    }

    pub fn key(&self) -> &[u8; PRP_KEY_LEN] {
        &self.key
    }

    fn round(&self, i: u8, half: u32) -> u32 {
        let mut mac = Hmac::<Sha256>::new_from_slice(&self.key).expect("any key length");
        mac.update(&[i]);
        mac.update(&half.to_be_bytes());
        let out = mac.finalize().into_bytes();
        u32::from_be_bytes([out[0], out[1], out[2], out[3]])
    }

    pub fn encrypt(&self, x: i64) -> u64 {
        let x = x as u64;
        let (mut l, mut r) = ((x >> 32) as u32, x as u32);
        for i in 0..ROUNDS {
            (l, r) = (r, l ^ self.round(i, r));
        }
        (l as u64) << 32 | r as u64
    }

    pub fn decrypt(&self, y: u64) -> i64 {
        let (mut l, mut r) = ((y >> 32) as u32, y as u32);
        for i in (0..ROUNDS).rev() {
            (l, r) = (r ^ self.round(i, l), l);
        }
        ((l as u64) << 32 | r as u64) as i64
    }
}
