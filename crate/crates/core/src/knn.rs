//! Encrypted keyword identifiers via split vectors and invertible matrices.
//!
//! An index identifier encodes `B = (t^0, …, t^{d-1})` for `t = π(K, w)`; a
//! trapdoor identifier encodes the coefficients `A` of
//! `f(x) = (x - t)·∏(x - t'_i)` over `d - 2` fresh dummy roots. The server
//! learns whether `Aᵀ·B = f(t) = 0` from the encrypted halves alone.
//!
//! All arithmetic is over `Z_P` with `P = 2^61 - 1`, which makes the match
//! test exact.

use alloc::vec;
use alloc::vec::Vec;

use hmac::{Hmac, Mac};
use rand_core::{CryptoRng, RngCore};
use sha2::Sha256;

use crate::codec::{Reader, Writer};
use crate::error::Error;

/// Match-field modulus `2^61 - 1`.
pub const FIELD_MODULUS: u64 = (1 << 61) - 1;
pub const DEFAULT_DIMENSION: usize = 8;
pub const MIN_DIMENSION: usize = 3;
pub const PRF_KEY_LEN: usize = 32;
/// Byte length of a dummy keyword.
pub const DUMMY_LEN: usize = 16;

const TAG_KEYWORD: u8 = 0x01;
const TAG_DUMMY: u8 = 0x02;

pub mod fp {
    //! Arithmetic in `Z_P`, `P = 2^61 - 1`.

    use super::FIELD_MODULUS as P;

    pub fn add(a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= P {
            s - P
        } else {
            s
        }
    }

    pub fn sub(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + P - b
        }
    }

    pub fn neg(a: u64) -> u64 {
        sub(0, a)
    }

    pub fn mul(a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let lo = (t as u64) & P;
        let hi = (t >> 61) as u64;
        add(lo, hi)
    }

    pub fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(a: u64) -> Option<u64> {
        (a != 0).then(|| pow(a, P - 2))
    }
}

fn random_fp<R: RngCore + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let v = rng.next_u64() & FIELD_MODULUS;
        if v < FIELD_MODULUS {
            return v;
        }
    }
}

/// Square matrix over `Z_P`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    data: Vec<u64>,
}

impl Matrix {
    fn at(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    pub fn random<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Matrix { dim, data: (0..dim * dim).map(|_| random_fp(rng)).collect() }
    }

    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = vec![0u64; n * n];
        for i in 0..n {
            inv[i * n + i] = 1;
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r * n + col] != 0)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let scale = fp::inv(a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = fp::mul(a[col * n + j], scale);
                inv[col * n + j] = fp::mul(inv[col * n + j], scale);
            }
            for r in 0..n {
                let factor = a[r * n + col];
                if r == col || factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = fp::sub(a[r * n + j], fp::mul(factor, a[col * n + j]));
                    inv[r * n + j] = fp::sub(inv[r * n + j], fp::mul(factor, inv[col * n + j]));
                }
            }
        }
        Some(Matrix { dim: n, data: inv })
    }

    /// `M · v`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(0, |acc, j| fp::add(acc, fp::mul(self.at(i, j), v[j]))))
            .collect()
    }

    /// `Mᵀ · v`.
    pub fn apply_transpose(&self, v: &[u64]) -> Vec<u64> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(0, |acc, j| fp::add(acc, fp::mul(self.at(j, i), v[j]))))
            .collect()
    }

    fn write(&self, w: &mut Writer) {
        for &x in &self.data {
            w.u64(x);
        }
    }

    fn read(r: &mut Reader<'_>, dim: usize) -> Result<Self, Error> {
        let data = (0..dim * dim)
            .map(|_| {
                let x = r.u64()?;
                if x >= FIELD_MODULUS {
                    Err(Error::Malformed("matrix entry not reduced"))
                } else {
                    Ok(x)
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Matrix { dim, data })
    }
}

/// Owner-held secrets of the keyword layer: split string `S`, matrices
/// `M1`, `M2` (with cached inverses) and PRF key `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnnSecrets {
    split: Vec<bool>,
    m1: Matrix,
    m2: Matrix,
    m1_inv: Matrix,
    m2_inv: Matrix,
    prf_key: [u8; PRF_KEY_LEN],
}

fn random_invertible<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> (Matrix, Matrix) {
    loop {
        let m = Matrix::random(dim, rng);
        if let Some(inv) = m.inverse() {
            return (m, inv);
        }
    }
}

impl KnnSecrets {
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self, Error> {
        if dim < MIN_DIMENSION || dim > u16::MAX as usize {
            return Err(Error::InvalidParameters("kNN dimension must be at least 3"));
        }
        let split = (0..dim).map(|_| rng.next_u32() & 1 == 1).collect();
        let (m1, m1_inv) = random_invertible(dim, rng);
        let (m2, m2_inv) = random_invertible(dim, rng);
        let mut prf_key = [0u8; PRF_KEY_LEN];
        rng.fill_bytes(&mut prf_key);
        Ok(KnnSecrets { split, m1, m2, m1_inv, m2_inv, prf_key })
    }

    pub fn dim(&self) -> usize {
        self.split.len()
    }

    pub fn split_bits(&self) -> &[bool] {
        &self.split
    }

    pub fn prf_key(&self) -> &[u8; PRF_KEY_LEN] {
        &self.prf_key
    }

    pub fn write(&self, w: &mut Writer) {
        w.u16(self.dim() as u16);
        for &b in &self.split {
            w.u8(b as u8);
        }
        self.m1.write(w);
        self.m2.write(w);
        w.raw(&self.prf_key);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let dim = r.u16()? as usize;
        if dim < MIN_DIMENSION {
            return Err(Error::Malformed("kNN dimension below 3"));
        }
        let split = (0..dim)
            .map(|_| match r.u8()? {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::Malformed("split bit")),
            })
            .collect::<Result<_, _>>()?;
        let m1 = Matrix::read(r, dim)?;
        let m2 = Matrix::read(r, dim)?;
        let m1_inv = m1.inverse().ok_or(Error::Malformed("singular M1"))?;
        let m2_inv = m2.inverse().ok_or(Error::Malformed("singular M2"))?;
        let prf_key = r.array()?;
        Ok(KnnSecrets { split, m1, m2, m1_inv, m2_inv, prf_key })
    }
}

fn prf_tagged(key: &[u8; PRF_KEY_LEN], tag: u8, input: &[u8]) -> u64 {
    for counter in 0u32.. {
        let mut mac = Hmac::<Sha256>::new_from_slice(key).expect("any key length");
        mac.update(&[tag]);
        mac.update(&counter.to_be_bytes());
        mac.update(input);
        let out = mac.finalize().into_bytes();
        let mut word = [0u8; 8];
        word.copy_from_slice(&out[..8]);
        let v = u64::from_be_bytes(word) & FIELD_MODULUS;
        if v != 0 && v < FIELD_MODULUS {
            return v;
        }
    }
    unreachable!()
}

/// Keyed pseudorandom map of a keyword into `[1, P - 1]`.
pub fn prf_eval(key: &[u8; PRF_KEY_LEN], keyword: &str) -> u64 {
    prf_tagged(key, TAG_KEYWORD, keyword.as_bytes())
}

/// PRF image of a dummy keyword; domain-separated from real keywords.
pub fn prf_eval_dummy(key: &[u8; PRF_KEY_LEN], dummy: &[u8; DUMMY_LEN]) -> u64 {
    prf_tagged(key, TAG_DUMMY, dummy)
}

/// Pair of encrypted split halves, `d` entries each.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitVector {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl SplitVector {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Two vectors, each a 2-byte `d` followed by `d` 8-byte elements.
    pub fn write(&self, w: &mut Writer) {
        for half in [&self.a, &self.b] {
            w.u16(half.len() as u16);
            for &x in half.iter() {
                w.u64(x);
            }
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let a = read_vector(r)?;
        let b = read_vector(r)?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        Ok(SplitVector { a, b })
    }

    /// The `2·d` elements with no length prefixes.
    pub fn write_bare(&self, w: &mut Writer) {
        for &x in self.a.iter().chain(&self.b) {
            w.u64(x);
        }
    }

    pub fn read_bare(r: &mut Reader<'_>, dim: usize) -> Result<Self, Error> {
        let mut elems = (0..2 * dim).map(|_| read_element(r)).collect::<Result<Vec<_>, _>>()?;
        let b = elems.split_off(dim);
        Ok(SplitVector { a: elems, b })
    }
}

fn read_element(r: &mut Reader<'_>) -> Result<u64, Error> {
    let x = r.u64()?;
    if x >= FIELD_MODULUS {
        return Err(Error::Malformed("vector element not reduced"));
    }
    Ok(x)
}

fn read_vector(r: &mut Reader<'_>) -> Result<Vec<u64>, Error> {
    let d = r.u16()? as usize;
    (0..d).map(|_| read_element(r)).collect()
}

/// Encrypted keyword identifier stored in the index (`{M1ᵀB^a, M2ᵀB^b}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexKeywordId(pub SplitVector);

/// Encrypted keyword identifier sent in a trapdoor (`{M1⁻¹A^a, M2⁻¹A^b}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrapdoorKeywordId(pub SplitVector);

/// `(t^0, t^1, …, t^{d-1})`.
pub fn power_vector(t: u64, dim: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(dim);
    let mut cur = 1;
    for _ in 0..dim {
        out.push(cur);
        cur = fp::mul(cur, t);
    }
    out
}

/// Coefficients `a_0 … a_k` (low degree first) of `∏(x - r_i)`.
pub fn poly_from_roots(roots: &[u64]) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for &r in roots {
        let mut next = vec![0u64; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] = fp::add(next[k + 1], c);
            next[k] = fp::sub(next[k], fp::mul(r, c));
        }
        coeffs = next;
    }
    coeffs
}

/// Splits `v` where `split_here(i)` holds (random additive shares) and copies
/// it elsewhere.
fn split<R: RngCore + ?Sized>(v: &[u64], split_here: impl Fn(usize) -> bool, rng: &mut R) -> (Vec<u64>, Vec<u64>) {
    let mut a = Vec::with_capacity(v.len());
    let mut b = Vec::with_capacity(v.len());
    for (i, &x) in v.iter().enumerate() {
        if split_here(i) {
            let share = random_fp(rng);
            a.push(share);
            b.push(fp::sub(x, share));
        } else {
            a.push(x);
            b.push(x);
        }
    }
    (a, b)
}

pub fn enc_keyword_for_index<R: RngCore + CryptoRng + ?Sized>(
    secrets: &KnnSecrets,
    keyword: &str,
    rng: &mut R,
) -> IndexKeywordId {
    let t = prf_eval(&secrets.prf_key, keyword);
    let b = power_vector(t, secrets.dim());
    let (ba, bb) = split(&b, |i| secrets.split[i], rng);
    IndexKeywordId(SplitVector { a: secrets.m1.apply_transpose(&ba), b: secrets.m2.apply_transpose(&bb) })
}

pub fn enc_keyword_for_trapdoor<R: RngCore + CryptoRng + ?Sized>(
    secrets: &KnnSecrets,
    keyword: &str,
    rng: &mut R,
) -> TrapdoorKeywordId {
    let dummies: Vec<[u8; DUMMY_LEN]> = (0..secrets.dim() - 2)
        .map(|_| {
            let mut d = [0u8; DUMMY_LEN];
            rng.fill_bytes(&mut d);
            d
        })
        .collect();
    enc_keyword_for_trapdoor_with_dummies(secrets, keyword, &dummies, rng)
}

/// Trapdoor identifier with caller-supplied dummy keywords (`d - 2` of them).
pub fn enc_keyword_for_trapdoor_with_dummies<R: RngCore + CryptoRng + ?Sized>(
    secrets: &KnnSecrets,
    keyword: &str,
    dummies: &[[u8; DUMMY_LEN]],
    rng: &mut R,
) -> TrapdoorKeywordId {
    assert_eq!(dummies.len(), secrets.dim() - 2, "need d - 2 dummy keywords");
    let mut roots = Vec::with_capacity(secrets.dim() - 1);
    roots.push(prf_eval(&secrets.prf_key, keyword));
    roots.extend(dummies.iter().map(|d| prf_eval_dummy(&secrets.prf_key, d)));
    let coeffs = poly_from_roots(&roots);
    // Complementary rule: split where S(i) = 0.
    let (aa, ab) = split(&coeffs, |i| !secrets.split[i], rng);
    TrapdoorKeywordId(SplitVector { a: secrets.m1_inv.apply(&aa), b: secrets.m2_inv.apply(&ab) })
}

/// `yᵀ·z` over `Z_P`, which equals `Aᵀ·B` for the underlying plaintexts.
pub fn encrypted_inner_product(y: &TrapdoorKeywordId, z: &IndexKeywordId) -> Result<u64, Error> {
    let (y, z) = (&y.0, &z.0);
    if y.a.len() != z.a.len() || y.b.len() != z.b.len() {
        return Err(Error::DimensionMismatch { expected: z.a.len(), got: y.a.len() });
    }
    let dot = |u: &[u64], v: &[u64]| u.iter().zip(v).fold(0, |acc, (&x, &y)| fp::add(acc, fp::mul(x, y)));
    Ok(fp::add(dot(&y.a, &z.a), dot(&y.b, &z.b)))
}

/// Whether a trapdoor identifier and an index identifier encode the same
/// keyword.
pub fn matches(y: &TrapdoorKeywordId, z: &IndexKeywordId) -> Result<bool, Error> {
    Ok(encrypted_inner_product(y, z)? == 0)
}
