//! BGN encryption over the composite-order subgroup `𝔾 ⊂ E(F_q)` of order
//! `n = p·q`, together with the pairing-based zero test used for phrase
//! recognition.
//!
//! The group is written additively in code: a ciphertext `g^m·h^r` is the
//! point `m·g + r·h`, and the homomorphic "product" is point addition.

use alloc::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rand_core::{CryptoRng, RngCore};

use crate::codec::{byte_width, Reader, Writer};
use crate::curve::{Curve, FixedBase, Point};
use crate::error::Error;
use crate::field::{Fq2, PrimeField};
use crate::pairing::PreparedPoint;
use crate::prime::{is_probable_prime, random_prime};
use crate::rand_util::random_below;

/// Smallest accepted prime size.
pub const MIN_TAU: u32 = 16;
/// Largest accepted prime size (the base field must fit the limb budget).
pub const MAX_TAU: u32 = 512;
/// Upper bound on plaintexts: documents are capped at 2^20 tokens.
pub const DEFAULT_MESSAGE_BOUND: u64 = 1 << 20;

const KEYGEN_ATTEMPTS: u32 = 32;

/// Element of `𝔾`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub(crate) Point);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(Point::INFINITY);

    pub fn is_identity(&self) -> bool {
        self.0.is_infinity()
    }
}

/// Element of the target group `𝔾_T ⊂ F_q2^*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairingValue(pub(crate) Fq2);

/// Public description of `𝔾`: the order `n`, the base field and the cofactor
/// `(q_field + 1) / n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    curve: Curve,
    n: BigUint,
    cofactor: BigUint,
}

impl GroupParams {
    /// Validates `q_field ≡ 3 (mod 4)`, primality of `q_field`, and
    /// `cofactor · n = q_field + 1`.
    pub fn new(n: BigUint, q_field: BigUint, cofactor: BigUint) -> Result<Self, Error> {
        if (&q_field % 4u32) != BigUint::from(3u32) {
            return Err(Error::InvalidParameters("field characteristic must be 3 mod 4"));
        }
        if &cofactor * &n != &q_field + 1u32 {
            return Err(Error::InvalidParameters("n must divide q_field + 1"));
        }
        if n.is_zero() || n.is_even() {
            return Err(Error::InvalidParameters("group order must be odd"));
        }
        let mut rng = crate::rand_util::seeded_rng(&q_field.to_bytes_be());
        if !is_probable_prime(&q_field, &mut rng) {
            return Err(Error::InvalidParameters("field characteristic is not prime"));
        }
        let curve = Curve::new(PrimeField::new(&q_field)?);
        Ok(GroupParams { curve, n, cofactor })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn q_field(&self) -> &BigUint {
        self.curve.field().modulus()
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    /// Group operation (ciphertext multiplication `E(a)·E(b) = E(a + b)`).
    pub fn hom_add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(self.curve.add(&a.0, &b.0))
    }

    /// Group inverse (`E(a)^-1 = E(-a)`).
    pub fn hom_neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(self.curve.neg(&a.0))
    }

    /// Exponentiation `a^k`.
    pub fn pow(&self, a: &GroupElement, k: &BigUint) -> GroupElement {
        GroupElement(self.curve.mul(&a.0, k))
    }

    pub fn in_subgroup(&self, a: &GroupElement) -> bool {
        self.curve.is_on_curve(&a.0) && self.curve.mul(&a.0, &self.n).is_infinity()
    }

    pub fn pairing(&self, u: &GroupElement, v: &GroupElement) -> PairingValue {
        self.prepare(u).pair(v)
    }

    /// Precomputes the pairing's Miller loop for a fixed first argument.
    pub fn prepare(&self, u: &GroupElement) -> PreparedElement<'_> {
        PreparedElement { params: self, inner: PreparedPoint::new(&self.curve, &u.0, &self.n) }
    }

    pub fn gt_is_identity(&self, v: &PairingValue) -> bool {
        self.curve.field().fq2_is_one(&v.0)
    }

    pub fn gt_mul(&self, a: &PairingValue, b: &PairingValue) -> PairingValue {
        PairingValue(self.curve.field().fq2_mul(&a.0, &b.0))
    }

    pub fn gt_pow(&self, a: &PairingValue, k: &BigUint) -> PairingValue {
        PairingValue(self.curve.field().fq2_pow(&a.0, k))
    }

    pub fn gt_inv(&self, a: &PairingValue) -> PairingValue {
        PairingValue(self.curve.field().fq2_inv(&a.0).expect("target group element is a unit"))
    }

    /// `true` iff `pairing(c, psi)` is the identity of `𝔾_T`. For
    /// `c = E(x)` and a dispersal factor `psi`, this holds exactly when `x`
    /// vanishes modulo one of the secret primes, i.e. `x = 0` for plaintexts
    /// far below both primes.
    pub fn zero_test(&self, c: &GroupElement, psi: &GroupElement) -> bool {
        self.gt_is_identity(&self.pairing(psi, c))
    }

    pub fn write_element(&self, w: &mut Writer, a: &GroupElement) {
        self.curve.write_point(w, &a.0);
    }

    /// Decodes a point and checks the curve equation. Subgroup membership is
    /// checked separately by [`GroupParams::read_element_checked`].
    pub fn read_element(&self, r: &mut Reader<'_>) -> Result<GroupElement, Error> {
        self.curve.read_point(r).map(GroupElement)
    }

    pub fn read_element_checked(&self, r: &mut Reader<'_>) -> Result<GroupElement, Error> {
        let a = self.read_element(r)?;
        if self.in_subgroup(&a) {
            Ok(a)
        } else {
            Err(Error::NotInSubgroup)
        }
    }

    pub fn element_len(&self) -> usize {
        self.curve.point_len()
    }

    pub fn element_to_bytes(&self, a: &GroupElement) -> alloc::vec::Vec<u8> {
        let mut w = Writer::with_capacity(self.element_len());
        self.write_element(&mut w, a);
        w.into_bytes()
    }

    pub fn write_gt(&self, w: &mut Writer, v: &PairingValue) {
        let f = self.curve.field();
        w.prefixed(&f.to_bytes(&v.0.c0)).prefixed(&f.to_bytes(&v.0.c1));
    }

    pub fn read_gt(&self, r: &mut Reader<'_>) -> Result<PairingValue, Error> {
        let f = self.curve.field();
        let c0 = f.from_bytes(r.prefixed()?)?;
        let c1 = f.from_bytes(r.prefixed()?)?;
        Ok(PairingValue(Fq2 { c0, c1 }))
    }

    pub fn write(&self, w: &mut Writer) {
        w.big(&self.n, byte_width(&self.n));
        w.big(self.q_field(), self.curve.field().byte_len());
        w.big(&self.cofactor, byte_width(&self.cofactor));
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let n = r.big()?;
        let q_field = r.big()?;
        let cofactor = r.big()?;
        GroupParams::new(n, q_field, cofactor)
    }
}

/// A pairing argument with its Miller loop precomputed.
#[derive(Clone, Debug)]
pub struct PreparedElement<'a> {
    params: &'a GroupParams,
    inner: PreparedPoint,
}

impl PreparedElement<'_> {
    pub fn pair(&self, v: &GroupElement) -> PairingValue {
        PairingValue(self.inner.pair(&self.params.curve, &v.0, &self.params.cofactor))
    }
}

/// Owner-held public key `(n, 𝔾, 𝔾_T, e, g, h)`.
#[derive(Clone, Debug)]
pub struct BgnPublicKey {
    params: GroupParams,
    g: GroupElement,
    h: GroupElement,
    message_bound: u64,
    g_table: FixedBase,
    h_table: FixedBase,
}

impl PartialEq for BgnPublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.g == other.g && self.h == other.h
    }
}

impl Eq for BgnPublicKey {}

impl BgnPublicKey {
    pub fn new(params: GroupParams, g: GroupElement, h: GroupElement, message_bound: u64) -> Self {
        let bits = params.n.bits();
        let g_table = FixedBase::new(&params.curve, &g.0, bits);
        let h_table = FixedBase::new(&params.curve, &h.0, bits);
        BgnPublicKey { params, g, h, message_bound, g_table, h_table }
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn g(&self) -> &GroupElement {
        &self.g
    }

    pub fn h(&self) -> &GroupElement {
        &self.h
    }

    /// Exclusive upper bound on plaintexts accepted by [`encrypt`].
    pub fn message_bound(&self) -> u64 {
        self.message_bound
    }

    /// `g^m · h^r` with caller-chosen `r`.
    pub fn encrypt_with(&self, m: u64, r: &BigUint) -> Result<GroupElement, Error> {
        if m >= self.message_bound {
            return Err(Error::MessageOutOfRange { m, bound: self.message_bound });
        }
        let p = self.g_table.mul_add(&self.params.curve, &BigUint::from(m), &self.h_table, r);
        Ok(GroupElement(p))
    }

    /// `g^s` for uniform `s ∈ [0, n)`: a uniform element of `𝔾`.
    pub fn random_element<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let s = random_below(rng, &self.params.n);
        GroupElement(self.g_table.mul(&self.params.curve, &s))
    }

    pub fn write(&self, w: &mut Writer) {
        self.params.write(w);
        self.params.write_element(w, &self.g);
        self.params.write_element(w, &self.h);
        w.u64(self.message_bound);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, Error> {
        let params = GroupParams::read(r)?;
        let g = params.read_element_checked(r)?;
        let h = params.read_element_checked(r)?;
        let bound = r.u64()?;
        Ok(BgnPublicKey::new(params, g, h, bound))
    }
}

/// Owner-held secret key: the factorisation of `n` and the decryption base
/// `ĝ = g^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BgnSecretKey {
    params: GroupParams,
    p: BigUint,
    q: BigUint,
    dlog_base: GroupElement,
}

impl BgnSecretKey {
    pub fn new(pk: &BgnPublicKey, p: BigUint, q: BigUint) -> Result<Self, Error> {
        if &p * &q != pk.params.n || p == q {
            return Err(Error::InvalidParameters("p·q must equal n with p != q"));
        }
        let dlog_base = pk.params.pow(&pk.g, &p);
        Ok(BgnSecretKey { params: pk.params.clone(), p, q, dlog_base })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn dlog_base(&self) -> &GroupElement {
        &self.dlog_base
    }

    /// Decrypts a plaintext known to lie in `[0, max_m]`.
    pub fn decrypt(&self, c: &GroupElement, max_m: u64) -> Result<u64, Error> {
        DlogTable::new(self, max_m).decrypt(self, c)
    }

    pub fn write(&self, w: &mut Writer) {
        w.big(&self.p, byte_width(&self.p));
        w.big(&self.q, byte_width(&self.q));
    }

    pub fn read(r: &mut Reader<'_>, pk: &BgnPublicKey) -> Result<Self, Error> {
        let p = r.big()?;
        let q = r.big()?;
        BgnSecretKey::new(pk, p, q)
    }
}

/// Baby-step giant-step tables for decrypting plaintexts in `[0, max_m]`
/// with about `2·sqrt(max_m)` group operations per ciphertext.
#[derive(Clone, Debug)]
pub struct DlogTable {
    baby: BTreeMap<GroupElement, u64>,
    giant_stride: GroupElement,
    step: u64,
    max_m: u64,
}

impl DlogTable {
    pub fn new(sk: &BgnSecretKey, max_m: u64) -> Self {
        let step = (max_m + 1).isqrt() + 1;
        let params = &sk.params;
        let mut baby = BTreeMap::new();
        let mut cur = GroupElement::IDENTITY;
        for j in 0..step {
            baby.entry(cur).or_insert(j);
            cur = params.hom_add(&cur, &sk.dlog_base);
        }
        // `cur` is now ĝ^step.
        DlogTable { baby, giant_stride: params.hom_neg(&cur), step, max_m }
    }

    pub fn max_m(&self) -> u64 {
        self.max_m
    }

    pub fn decrypt(&self, sk: &BgnSecretKey, c: &GroupElement) -> Result<u64, Error> {
        let params = &sk.params;
        let mut gamma = params.pow(c, &sk.p);
        for i in 0..self.step {
            if let Some(&j) = self.baby.get(&gamma) {
                let m = i * self.step + j;
                if m <= self.max_m {
                    return Ok(m);
                }
                break;
            }
            gamma = params.hom_add(&gamma, &self.giant_stride);
        }
        Err(Error::DiscreteLogNotFound { max_m: self.max_m })
    }
}

/// Generates `(pk, sk)` with two random `tau`-bit primes.
///
/// The base field is `F_{ℓ·n - 1}` for the first `ℓ ≡ 0 (mod 4)` making
/// `ℓ·n - 1` prime, which forces `q_field ≡ 3 (mod 4)` and `n | q_field + 1`.
pub fn keygen<R: RngCore + CryptoRng + ?Sized>(
    tau: u32,
    rng: &mut R,
) -> Result<(BgnPublicKey, BgnSecretKey), Error> {
    if !(MIN_TAU..=MAX_TAU).contains(&tau) {
        return Err(Error::InvalidParameters("tau must lie in [16, 512]"));
    }
    let cofactor_cap = 8 * 2 * tau as u64;
    for _ in 0..KEYGEN_ATTEMPTS {
        let p = random_prime(rng, tau as u64);
        let q = random_prime(rng, tau as u64);
        if p == q {
            continue;
        }
        let n = &p * &q;
        let Some((q_field, ell)) = (1..=cofactor_cap).find_map(|k| {
            let ell = BigUint::from(4 * k);
            let cand = &ell * &n - 1u32;
            is_probable_prime(&cand, rng).then_some((cand, ell))
        }) else {
            continue;
        };
        let params = GroupParams::new(n.clone(), q_field, ell)?;
        let g = random_generator(&params, &p, &q, rng);
        let u = random_generator(&params, &p, &q, rng);
        let h = params.pow(&u, &q);
        let bound = message_bound_for(tau);
        let pk = BgnPublicKey::new(params, g, h, bound);
        let sk = BgnSecretKey::new(&pk, p, q)?;
        return Ok((pk, sk));
    }
    Err(Error::ParameterSearch { attempts: KEYGEN_ATTEMPTS })
}

/// `min(2^20, 2^(tau - 2))`: plaintexts stay far below both primes.
pub fn message_bound_for(tau: u32) -> u64 {
    DEFAULT_MESSAGE_BOUND.min(1u64 << (tau.saturating_sub(2)).min(62))
}

fn random_generator<R: RngCore + ?Sized>(params: &GroupParams, p: &BigUint, q: &BigUint, rng: &mut R) -> GroupElement {
    loop {
        let pt = params.curve.mul(&params.curve.random_point(rng), &params.cofactor);
        let cand = GroupElement(pt);
        if !params.pow(&cand, p).is_identity() && !params.pow(&cand, q).is_identity() {
            return cand;
        }
    }
}

/// Fresh probabilistic encryption `g^m · h^r`, `r` uniform in `[0, n)`.
pub fn encrypt<R: RngCore + CryptoRng + ?Sized>(
    pk: &BgnPublicKey,
    m: u64,
    rng: &mut R,
) -> Result<GroupElement, Error> {
    let r = random_below(rng, &pk.params.n);
    pk.encrypt_with(m, &r)
}

/// Dispersal factor `ψ = λ^p` for a fresh uniform `λ ∈ 𝔾`, resampled until
/// it is not the identity.
pub fn make_dispersal_factor<R: RngCore + CryptoRng + ?Sized>(
    sk: &BgnSecretKey,
    pk: &BgnPublicKey,
    rng: &mut R,
) -> GroupElement {
    loop {
        let lambda = pk.random_element(rng);
        let psi = pk.params.pow(&lambda, &sk.p);
        if !psi.is_identity() {
            return psi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn keys(seed: u64) -> (BgnPublicKey, BgnSecretKey, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (pk, sk) = keygen(32, &mut rng).unwrap();
        (pk, sk, rng)
    }

    #[test]
    fn key_structure() {
        let (pk, sk, _) = keys(1);
        let params = pk.params();
        assert_eq!(sk.p() * sk.q(), *params.n());
        assert_eq!(sk.p().bits(), 32);
        assert_eq!(sk.q().bits(), 32);
        assert_eq!(params.cofactor() * params.n(), params.q_field() + 1u32);
        assert!(params.in_subgroup(pk.g()) && params.in_subgroup(pk.h()));
        assert!(!pk.h().is_identity());
        assert!(params.pow(pk.h(), sk.p()).is_identity());
        assert!(!params.pow(pk.g(), sk.p()).is_identity());
        assert!(!params.pow(pk.g(), sk.q()).is_identity());
    }

    #[test]
    fn different_seeds_give_different_moduli() {
        assert_ne!(keys(2).0.params().n(), keys(3).0.params().n());
    }

    #[test]
    fn round_trip_and_probabilistic() {
        let (pk, sk, mut rng) = keys(4);
        let table = DlogTable::new(&sk, 5000);
        for _ in 0..100 {
            let m = rng.next_u64() % 5001;
            let c = encrypt(&pk, m, &mut rng).unwrap();
            assert_eq!(table.decrypt(&sk, &c).unwrap(), m);
        }
        let a = encrypt(&pk, 7, &mut rng).unwrap();
        let b = encrypt(&pk, 7, &mut rng).unwrap();
        assert_ne!(a, b);
        assert_eq!(sk.decrypt(&a, 10).unwrap(), 7);
        assert!(matches!(table.decrypt(&sk, &encrypt(&pk, 4999, &mut rng).unwrap()), Ok(4999)));
        assert!(matches!(sk.decrypt(&encrypt(&pk, 50, &mut rng).unwrap(), 20), Err(Error::DiscreteLogNotFound { .. })));
    }

    #[test]
    fn message_bound_is_enforced() {
        let (pk, _, mut rng) = keys(5);
        assert_eq!(pk.message_bound(), 1 << 20);
        assert!(matches!(encrypt(&pk, 1 << 20, &mut rng), Err(Error::MessageOutOfRange { .. })));
        assert_eq!(message_bound_for(16), 1 << 14);
    }

    #[test]
    fn homomorphic_addition_and_negation() {
        let (pk, sk, mut rng) = keys(6);
        let params = pk.params();
        for (a, b) in [(0u64, 0u64), (3, 9), (400, 1000), (17, 17)] {
            let ca = encrypt(&pk, a, &mut rng).unwrap();
            let cb = encrypt(&pk, b, &mut rng).unwrap();
            assert_eq!(sk.decrypt(&params.hom_add(&ca, &cb), 3000).unwrap(), a + b);
            // E(b) · E(a)^{-1} plus a then decrypts to b.
            let diff = params.hom_add(&cb, &params.hom_neg(&ca));
            let back = params.hom_add(&diff, &encrypt(&pk, a, &mut rng).unwrap());
            assert_eq!(sk.decrypt(&back, 3000).unwrap(), b);
        }
    }

    #[test]
    fn zero_test_grid() {
        let (pk, sk, mut rng) = keys(7);
        let params = pk.params();
        let psi = make_dispersal_factor(&sk, &pk, &mut rng);
        let enc: Vec<_> = (0..=50).map(|v| encrypt(&pk, v, &mut rng).unwrap()).collect();
        let prep = params.prepare(&psi);
        for a in 0..=50usize {
            let ca = &enc[a];
            for b in 0..=50usize {
                let diff = params.hom_add(&enc[b], &params.hom_neg(ca));
                assert_eq!(params.gt_is_identity(&prep.pair(&diff)), a == b, "a={a} b={b}");
            }
        }
        assert!(params.zero_test(&enc[0], &psi));
        assert!(!params.zero_test(&enc[1], &psi));
    }

    #[test]
    fn dispersal_factor_kills_blinding() {
        let (pk, sk, mut rng) = keys(8);
        let params = pk.params();
        for _ in 0..5 {
            let psi = make_dispersal_factor(&sk, &pk, &mut rng);
            assert!(!psi.is_identity());
            let r = random_below(&mut rng, params.n());
            assert!(params.gt_is_identity(&params.pairing(&params.pow(pk.h(), &r), &psi)));
        }
    }

    #[test]
    fn pairing_is_bilinear() {
        let (pk, _, mut rng) = keys(9);
        let params = pk.params();
        let base = params.pairing(pk.g(), pk.g());
        assert!(!params.gt_is_identity(&base));
        for _ in 0..50 {
            let a = rng.next_u64() % 100_000;
            let b = rng.next_u64() % 100_000;
            let ga = params.pow(pk.g(), &BigUint::from(a));
            let gb = params.pow(pk.g(), &BigUint::from(b));
            let want = params.gt_pow(&base, &(BigUint::from(a) * b));
            assert_eq!(params.pairing(&ga, &gb), want);
        }
        let x = pk.random_element(&mut rng);
        let y = pk.random_element(&mut rng);
        let z = pk.random_element(&mut rng);
        assert_eq!(
            params.pairing(&params.hom_add(&x, &y), &z),
            params.gt_mul(&params.pairing(&x, &z), &params.pairing(&y, &z))
        );
        let e = params.pairing(&x, &y);
        assert!(params.gt_is_identity(&params.gt_mul(&e, &params.gt_inv(&e))));
    }

    #[test]
    fn serialization_round_trips() {
        let (pk, sk, mut rng) = keys(10);
        let params = pk.params();
        let mut w = Writer::new();
        pk.write(&mut w);
        sk.write(&mut w);
        let c = encrypt(&pk, 42, &mut rng).unwrap();
        params.write_element(&mut w, &c);
        params.write_element(&mut w, &GroupElement::IDENTITY);
        let e = params.pairing(&c, pk.g());
        params.write_gt(&mut w, &e);
        let bytes = w.into_bytes();

        let mut r = Reader::new(&bytes);
        let pk2 = BgnPublicKey::read(&mut r).unwrap();
        let sk2 = BgnSecretKey::read(&mut r, &pk2).unwrap();
        assert_eq!(pk2, pk);
        assert_eq!(sk2, sk);
        assert_eq!(params.read_element_checked(&mut r).unwrap(), c);
        assert_eq!(params.read_element_checked(&mut r).unwrap(), GroupElement::IDENTITY);
        assert_eq!(params.read_gt(&mut r).unwrap(), e);
        r.finish().unwrap();
        assert_eq!(params.element_to_bytes(&c).len(), params.element_len());
    }

    #[test]
    fn off_curve_and_off_subgroup_points_are_rejected() {
        let (pk, _, mut rng) = keys(11);
        let params = pk.params();
        let mut bytes = params.element_to_bytes(pk.g());
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        assert!(params.read_element(&mut Reader::new(&bytes)).is_err());
        // Points outside the order-n subgroup exist because the cofactor is > 1.
        let stray = loop {
            let p = GroupElement(params.curve().random_point(&mut rng));
            if !params.in_subgroup(&p) {
                break p;
            }
        };
        let bytes = params.element_to_bytes(&stray);
        assert!(params.read_element(&mut Reader::new(&bytes)).is_ok());
        assert!(matches!(params.read_element_checked(&mut Reader::new(&bytes)), Err(Error::NotInSubgroup)));
    }

    #[test]
    fn group_params_validation() {
        let (pk, _, _) = keys(12);
        let p = pk.params();
        assert!(GroupParams::new(p.n().clone(), p.q_field().clone(), p.cofactor() + 4u32).is_err());
        assert!(GroupParams::new(p.n().clone(), p.q_field().clone(), p.cofactor().clone()).is_ok());
        assert!(keygen(8, &mut ChaCha20Rng::seed_from_u64(0)).is_err());
    }
}
