//! Montgomery arithmetic over a prime field `F_q` and its quadratic extension
//! `F_q[i] / (i^2 + 1)`.
//!
//! The modulus is chosen at runtime (it comes out of key generation), so
//! elements are fixed-capacity limb arrays and every operation goes through
//! the owning [`PrimeField`]. Only the first `limbs` words of an element are
//! meaningful; the rest are kept at zero so that derived equality, ordering
//! and hashing agree with field equality.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Error;

/// Largest supported modulus size in 64-bit words (enough for the 512-bit
/// prime profile, whose base field is a little over 1024 bits).
pub const MAX_LIMBS: usize = 17;

/// Element of `F_q` in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fq([u64; MAX_LIMBS]);

impl Fq {
    pub const ZERO: Fq = Fq([0; MAX_LIMBS]);

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq(")?;
        let top = self.0.iter().rposition(|&w| w != 0).unwrap_or(0);
        for w in self.0[..=top].iter().rev() {
            write!(f, "{w:016x}")?;
        }
        write!(f, ")")
    }
}

/// Element `c0 + c1·i` of `F_q2`, with `i^2 = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fq2 {
    pub c0: Fq,
    pub c1: Fq,
}

#[inline(always)]
fn mac(acc: u64, a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = acc as u128 + (a as u128) * (b as u128) + carry as u128;
    (t as u64, (t >> 64) as u64)
}

/// Runtime description of `F_q` for an odd prime `q`.
#[derive(Clone)]
pub struct PrimeField {
    modulus: [u64; MAX_LIMBS],
    limbs: usize,
    neg_inv: u64,
    r2: Fq,
    one: Fq,
    big: BigUint,
    byte_len: usize,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeField").field("modulus", &self.big).finish()
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.big == other.big
    }
}

impl Eq for PrimeField {}

fn limbs_of(x: &BigUint) -> [u64; MAX_LIMBS] {
    let mut out = [0u64; MAX_LIMBS];
    for (dst, src) in out.iter_mut().zip(x.iter_u64_digits()) {
        *dst = src;
    }
    out
}

fn big_of(limbs: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(limbs.len() * 8);
    for w in limbs {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

impl PrimeField {
    /// The modulus must be odd, at least 3, and fit in [`MAX_LIMBS`] words.
    /// Primality is the caller's responsibility.
    pub fn new(modulus: &BigUint) -> Result<Self, Error> {
        if modulus < &BigUint::from(3u32) || !modulus.bit(0) {
            return Err(Error::InvalidParameters("field modulus must be an odd integer >= 3"));
        }
        let bits = modulus.bits() as usize;
        if bits > MAX_LIMBS * 64 {
            return Err(Error::InvalidParameters("field modulus too large"));
        }
        let limbs = bits.div_ceil(64);
        let words = limbs_of(modulus);

        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(words[0].wrapping_mul(inv)));
        }

        let r = BigUint::one() << (64 * limbs);
        let one = Fq(limbs_of(&(&r % modulus)));
        let r2 = Fq(limbs_of(&((&r * &r) % modulus)));

        Ok(PrimeField {
            modulus: words,
            limbs,
            neg_inv: inv.wrapping_neg(),
            r2,
            one,
            big: modulus.clone(),
            byte_len: bits.div_ceil(8),
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.big
    }

    /// Width in bytes of a canonical big-endian element encoding.
    pub fn byte_len(&self) -> usize {
        self.byte_len
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }

    pub fn one(&self) -> Fq {
        self.one
    }

    fn less_than_modulus(&self, a: &[u64; MAX_LIMBS]) -> bool {
        for j in (0..self.limbs).rev() {
            if a[j] != self.modulus[j] {
                return a[j] < self.modulus[j];
            }
        }
        false
    }

    fn sub_modulus(&self, a: &mut [u64; MAX_LIMBS]) {
        let mut borrow = 0u64;
        for j in 0..self.limbs {
            let (d1, b1) = a[j].overflowing_sub(self.modulus[j]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            a[j] = d2;
            borrow = (b1 | b2) as u64;
        }
    }

    pub fn from_big(&self, x: &BigUint) -> Fq {
        let reduced = if x >= &self.big { x % &self.big } else { x.clone() };
        self.mul(&Fq(limbs_of(&reduced)), &self.r2)
    }

    pub fn from_u64(&self, x: u64) -> Fq {
        self.from_big(&BigUint::from(x))
    }

    pub fn to_big(&self, a: &Fq) -> BigUint {
        let mut one = [0u64; MAX_LIMBS];
        one[0] = 1;
        let plain = self.mul(a, &Fq(one));
        big_of(&plain.0[..self.limbs])
    }

    /// Fixed-width big-endian encoding of the canonical representative.
    pub fn to_bytes(&self, a: &Fq) -> Vec<u8> {
        let raw = self.to_big(a).to_bytes_be();
        let mut out = alloc::vec![0u8; self.byte_len];
        if !(raw.len() == 1 && raw[0] == 0) {
            out[self.byte_len - raw.len()..].copy_from_slice(&raw);
        }
        out
    }

    /// Rejects encodings of the wrong width or of values `>= q`.
    pub fn from_bytes(&self, bytes: &[u8]) -> Result<Fq, Error> {
        if bytes.len() != self.byte_len {
            return Err(Error::Malformed("field element has wrong width"));
        }
        let x = BigUint::from_bytes_be(bytes);
        if x >= self.big {
            return Err(Error::Malformed("field element not reduced"));
        }
        Ok(self.from_big(&x))
    }

    /// Montgomery product `a·b·R^-1 mod q` (CIOS).
    pub fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        let n = self.limbs;
        let q = &self.modulus;
        let mut t = [0u64; MAX_LIMBS + 2];
        for i in 0..n {
            let bi = b.0[i];
            let mut carry = 0u64;
            for j in 0..n {
                let (lo, hi) = mac(t[j], a.0[j], bi, carry);
                t[j] = lo;
                carry = hi;
            }
            let (s, o) = t[n].overflowing_add(carry);
            t[n] = s;
            t[n + 1] = o as u64;

            let m = t[0].wrapping_mul(self.neg_inv);
            let (_, mut carry) = mac(t[0], m, q[0], 0);
            for j in 1..n {
                let (lo, hi) = mac(t[j], m, q[j], carry);
                t[j - 1] = lo;
                carry = hi;
            }
            let (s, o) = t[n].overflowing_add(carry);
            t[n - 1] = s;
            t[n] = t[n + 1] + o as u64;
        }
        let mut out = [0u64; MAX_LIMBS];
        out[..n].copy_from_slice(&t[..n]);
        if t[n] != 0 || !self.less_than_modulus(&out) {
            self.sub_modulus(&mut out);
        }
        Fq(out)
    }

    pub fn square(&self, a: &Fq) -> Fq {
        self.mul(a, a)
    }

    pub fn add(&self, a: &Fq, b: &Fq) -> Fq {
        let mut out = [0u64; MAX_LIMBS];
        let mut carry = 0u64;
        for j in 0..self.limbs {
            let (s1, o1) = a.0[j].overflowing_add(b.0[j]);
            let (s2, o2) = s1.overflowing_add(carry);
            out[j] = s2;
            carry = (o1 | o2) as u64;
        }
        if carry != 0 || !self.less_than_modulus(&out) {
            self.sub_modulus(&mut out);
        }
        Fq(out)
    }

    pub fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        let mut out = [0u64; MAX_LIMBS];
        let mut borrow = 0u64;
        for j in 0..self.limbs {
            let (d1, b1) = a.0[j].overflowing_sub(b.0[j]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            out[j] = d2;
            borrow = (b1 | b2) as u64;
        }
        if borrow != 0 {
            let mut carry = 0u64;
            for j in 0..self.limbs {
                let (s1, o1) = out[j].overflowing_add(self.modulus[j]);
                let (s2, o2) = s1.overflowing_add(carry);
                out[j] = s2;
                carry = (o1 | o2) as u64;
            }
        }
        Fq(out)
    }

    pub fn neg(&self, a: &Fq) -> Fq {
        self.sub(&Fq::ZERO, a)
    }

    pub fn double(&self, a: &Fq) -> Fq {
        self.add(a, a)
    }

    pub fn pow(&self, a: &Fq, exp: &BigUint) -> Fq {
        let mut acc = self.one;
        for i in (0..exp.bits()).rev() {
            acc = self.square(&acc);
            if exp.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Inverse via Fermat; `None` for zero.
    pub fn inv(&self, a: &Fq) -> Option<Fq> {
        if a.is_zero() {
            return None;
        }
        Some(self.pow(a, &(&self.big - 2u32)))
    }

    /// Square root for `q ≡ 3 (mod 4)`; `None` for non-residues.
    pub fn sqrt(&self, a: &Fq) -> Option<Fq> {
        let e = (&self.big + 1u32) >> 2;
        let r = self.pow(a, &e);
        (self.square(&r) == *a).then_some(r)
    }

    // --- F_q2 = F_q[i] / (i^2 + 1) ---

    pub fn fq2_one(&self) -> Fq2 {
        Fq2 { c0: self.one, c1: Fq::ZERO }
    }

    pub fn fq2_mul(&self, a: &Fq2, b: &Fq2) -> Fq2 {
        let v0 = self.mul(&a.c0, &b.c0);
        let v1 = self.mul(&a.c1, &b.c1);
        let s = self.mul(&self.add(&a.c0, &a.c1), &self.add(&b.c0, &b.c1));
        Fq2 {
            c0: self.sub(&v0, &v1),
            c1: self.sub(&self.sub(&s, &v0), &v1),
        }
    }

    pub fn fq2_square(&self, a: &Fq2) -> Fq2 {
        let t = self.mul(&a.c0, &a.c1);
        Fq2 {
            c0: self.mul(&self.add(&a.c0, &a.c1), &self.sub(&a.c0, &a.c1)),
            c1: self.double(&t),
        }
    }

    /// Conjugation, which is also the `q`-power Frobenius for `q ≡ 3 (mod 4)`.
    pub fn fq2_conj(&self, a: &Fq2) -> Fq2 {
        Fq2 { c0: a.c0, c1: self.neg(&a.c1) }
    }

    pub fn fq2_inv(&self, a: &Fq2) -> Option<Fq2> {
        let norm = self.add(&self.square(&a.c0), &self.square(&a.c1));
        let inv = self.inv(&norm)?;
        Some(Fq2 {
            c0: self.mul(&a.c0, &inv),
            c1: self.neg(&self.mul(&a.c1, &inv)),
        })
    }

    pub fn fq2_pow(&self, a: &Fq2, exp: &BigUint) -> Fq2 {
        let mut acc = self.fq2_one();
        for i in (0..exp.bits()).rev() {
            acc = self.fq2_square(&acc);
            if exp.bit(i) {
                acc = self.fq2_mul(&acc, a);
            }
        }
        acc
    }

    pub fn fq2_is_one(&self, a: &Fq2) -> bool {
        a.c0 == self.one && a.c1.is_zero()
    }
}
