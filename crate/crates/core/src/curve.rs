//! The supersingular curve `E: y^2 = x^3 + x` over `F_q`, `q ≡ 3 (mod 4)`.
//!
//! `#E(F_q) = q + 1`, so any `n | q + 1` gives an order-`n` subgroup reached by
//! multiplying random points by the cofactor `(q + 1) / n`.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand_core::RngCore;

use crate::codec::{Reader, Writer};
use crate::error::Error;
use crate::field::{Fq, PrimeField};
use crate::rand_util::random_below;

/// Affine point, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub(crate) x: Fq,
    pub(crate) y: Fq,
    pub(crate) infinity: bool,
}

impl Point {
    pub const INFINITY: Point = Point { x: Fq::ZERO, y: Fq::ZERO, infinity: true };

    pub fn is_infinity(&self) -> bool {
        self.infinity
    }
}

/// Jacobian coordinates: `(X, Y, Z)` represents `(X/Z^2, Y/Z^3)`; `Z = 0` is
/// the point at infinity.
#[derive(Clone, Copy, Debug)]
struct Jacobian {
    x: Fq,
    y: Fq,
    z: Fq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    field: PrimeField,
}

impl Curve {
    pub fn new(field: PrimeField) -> Self {
        Curve { field }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    fn rhs(&self, x: &Fq) -> Fq {
        let f = &self.field;
        f.add(&f.mul(&f.square(x), x), x)
    }

    pub fn is_on_curve(&self, p: &Point) -> bool {
        p.infinity || self.field.square(&p.y) == self.rhs(&p.x)
    }

    pub fn neg(&self, p: &Point) -> Point {
        if p.infinity {
            return *p;
        }
        Point { x: p.x, y: self.field.neg(&p.y), infinity: false }
    }

    pub fn double(&self, p: &Point) -> Point {
        let f = &self.field;
        if p.infinity || p.y.is_zero() {
            return Point::INFINITY;
        }
        let three_x2 = f.mul(&f.from_u64(3), &f.square(&p.x));
        let num = f.add(&three_x2, &f.one());
        let lambda = f.mul(&num, &f.inv(&f.double(&p.y)).expect("y != 0"));
        self.with_slope(p, &p.x, &lambda)
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let f = &self.field;
        if p.infinity {
            return *q;
        }
        if q.infinity {
            return *p;
        }
        if p.x == q.x {
            return if p.y == q.y { self.double(p) } else { Point::INFINITY };
        }
        let dx = f.inv(&f.sub(&q.x, &p.x)).expect("distinct x");
        let lambda = f.mul(&f.sub(&q.y, &p.y), &dx);
        self.with_slope(p, &q.x, &lambda)
    }

    /// Third intersection of the line through `p` with slope `lambda`,
    /// negated; `other_x` is the x-coordinate of the second point.
    fn with_slope(&self, p: &Point, other_x: &Fq, lambda: &Fq) -> Point {
        let f = &self.field;
        let x3 = f.sub(&f.sub(&f.square(lambda), &p.x), other_x);
        let y3 = f.sub(&f.mul(lambda, &f.sub(&p.x, &x3)), &p.y);
        Point { x: x3, y: y3, infinity: false }
    }

    pub fn sub(&self, p: &Point, q: &Point) -> Point {
        self.add(p, &self.neg(q))
    }

    pub fn mul(&self, p: &Point, k: &BigUint) -> Point {
        if p.infinity {
            return *p;
        }
        let mut acc = self.jac_infinity();
        for i in (0..k.bits()).rev() {
            acc = self.jac_double(&acc);
            if k.bit(i) {
                acc = self.jac_add_affine(&acc, p);
            }
        }
        self.to_affine(&acc)
    }

    fn jac_infinity(&self) -> Jacobian {
        Jacobian { x: self.field.one(), y: self.field.one(), z: Fq::ZERO }
    }

    fn jac_from(&self, p: &Point) -> Jacobian {
        if p.infinity {
            self.jac_infinity()
        } else {
            Jacobian { x: p.x, y: p.y, z: self.field.one() }
        }
    }

    fn to_affine(&self, j: &Jacobian) -> Point {
        let f = &self.field;
        let Some(zinv) = f.inv(&j.z) else {
            return Point::INFINITY;
        };
        let zinv2 = f.square(&zinv);
        Point {
            x: f.mul(&j.x, &zinv2),
            y: f.mul(&j.y, &f.mul(&zinv2, &zinv)),
            infinity: false,
        }
    }

    // dbl-2007-bl with a = 1.
    fn jac_double(&self, p: &Jacobian) -> Jacobian {
        let f = &self.field;
        if p.z.is_zero() {
            return *p;
        }
        let xx = f.square(&p.x);
        let yy = f.square(&p.y);
        let yyyy = f.square(&yy);
        let zz = f.square(&p.z);
        let s = f.double(&f.sub(&f.sub(&f.square(&f.add(&p.x, &yy)), &xx), &yyyy));
        let m = f.add(&f.add(&f.double(&xx), &xx), &f.square(&zz));
        let t = f.sub(&f.square(&m), &f.double(&s));
        let eight_yyyy = f.double(&f.double(&f.double(&yyyy)));
        let y3 = f.sub(&f.mul(&m, &f.sub(&s, &t)), &eight_yyyy);
        let z3 = f.sub(&f.sub(&f.square(&f.add(&p.y, &p.z)), &yy), &zz);
        Jacobian { x: t, y: y3, z: z3 }
    }

    // madd-2007-bl.
    fn jac_add_affine(&self, p: &Jacobian, q: &Point) -> Jacobian {
        let f = &self.field;
        if q.infinity {
            return *p;
        }
        if p.z.is_zero() {
            return self.jac_from(q);
        }
        let z1z1 = f.square(&p.z);
        let u2 = f.mul(&q.x, &z1z1);
        let s2 = f.mul(&q.y, &f.mul(&p.z, &z1z1));
        let h = f.sub(&u2, &p.x);
        let r = f.double(&f.sub(&s2, &p.y));
        if h.is_zero() {
            return if r.is_zero() { self.jac_double(p) } else { self.jac_infinity() };
        }
        let hh = f.square(&h);
        let i = f.double(&f.double(&hh));
        let j = f.mul(&h, &i);
        let v = f.mul(&p.x, &i);
        let x3 = f.sub(&f.sub(&f.square(&r), &j), &f.double(&v));
        let y3 = f.sub(&f.mul(&r, &f.sub(&v, &x3)), &f.double(&f.mul(&p.y, &j)));
        let z3 = f.sub(&f.sub(&f.square(&f.add(&p.z, &h)), &z1z1), &hh);
        Jacobian { x: x3, y: y3, z: z3 }
    }

    /// Uniformly random point of `E(F_q)` other than infinity (before any
    /// cofactor clearing).
    pub fn random_point<R: RngCore + ?Sized>(&self, rng: &mut R) -> Point {
        let f = &self.field;
        loop {
            let x = f.from_big(&random_below(rng, f.modulus()));
            if let Some(y) = f.sqrt(&self.rhs(&x)) {
                let y = if rng.next_u32() & 1 == 1 { f.neg(&y) } else { y };
                return Point { x, y, infinity: false };
            }
        }
    }

    /// Flag byte (0 = affine, 1 = infinity) followed by length-prefixed `x`
    /// and `y`. Infinity writes zero coordinates so every point has the same
    /// encoded length.
    pub fn write_point(&self, w: &mut Writer, p: &Point) {
        let width = self.field.byte_len();
        w.u8(p.infinity as u8);
        if p.infinity {
            let zeros = alloc::vec![0u8; width];
            w.prefixed(&zeros).prefixed(&zeros);
        } else {
            w.prefixed(&self.field.to_bytes(&p.x)).prefixed(&self.field.to_bytes(&p.y));
        }
    }

    /// Decodes and checks the curve equation (not subgroup membership).
    pub fn read_point(&self, r: &mut Reader<'_>) -> Result<Point, Error> {
        let flag = r.u8()?;
        let x = r.prefixed()?;
        let y = r.prefixed()?;
        match flag {
            0 => {
                let p = Point {
                    x: self.field.from_bytes(x)?,
                    y: self.field.from_bytes(y)?,
                    infinity: false,
                };
                if self.is_on_curve(&p) {
                    Ok(p)
                } else {
                    Err(Error::NotOnCurve)
                }
            }
            1 => {
                if x.len() != self.field.byte_len() || y.len() != x.len() || x.iter().chain(y).any(|&b| b != 0) {
                    return Err(Error::Malformed("non-canonical point at infinity"));
                }
                Ok(Point::INFINITY)
            }
            _ => Err(Error::Malformed("unknown point flag")),
        }
    }

    /// Encoded size of any point under this curve.
    pub fn point_len(&self) -> usize {
        1 + 2 * (4 + self.field.byte_len())
    }
}

/// Precomputed `2^i · P` for fast multiplication of a fixed base.
#[derive(Clone, Debug)]
pub struct FixedBase {
    powers: Vec<Point>,
}

impl FixedBase {
    pub fn new(curve: &Curve, base: &Point, bits: u64) -> Self {
        let mut powers = Vec::with_capacity(bits as usize);
        let mut cur = *base;
        for _ in 0..bits {
            powers.push(cur);
            cur = curve.double(&cur);
        }
        FixedBase { powers }
    }

    pub fn base(&self) -> Point {
        self.powers.first().copied().unwrap_or(Point::INFINITY)
    }

    pub fn mul(&self, curve: &Curve, k: &BigUint) -> Point {
        let acc = self.mul_jacobian(curve, curve.jac_infinity(), k);
        curve.to_affine(&acc)
    }

    /// `a·self + b·other`, with a single normalisation at the end.
    pub fn mul_add(&self, curve: &Curve, a: &BigUint, other: &FixedBase, b: &BigUint) -> Point {
        let acc = self.mul_jacobian(curve, curve.jac_infinity(), a);
        let acc = other.mul_jacobian(curve, acc, b);
        curve.to_affine(&acc)
    }

    fn mul_jacobian(&self, curve: &Curve, mut acc: Jacobian, k: &BigUint) -> Jacobian {
        let bits = k.bits() as usize;
        if bits > self.powers.len() {
            // Outside the table: fall back to the generic ladder.
            let p = curve.mul(&self.base(), k);
            return curve.jac_add_affine(&acc, &p);
        }
        for (i, p) in self.powers.iter().enumerate().take(bits) {
            if k.bit(i as u64) {
                acc = curve.jac_add_affine(&acc, p);
            }
        }
        acc
    }
}
