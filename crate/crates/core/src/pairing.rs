//! Modified Tate pairing `ê(P, Q) = f_{n,P}(φ(Q))^((q^2 - 1) / n)` on
//! `y^2 = x^3 + x`, with the distortion map `φ(x, y) = (-x, i·y)`.
//!
//! The Miller loop for a fixed first argument is precomputed into a list of
//! affine line coefficients ([`PreparedPoint`]), so that evaluating against
//! many second arguments costs only extension-field multiplications. Vertical
//! lines evaluate into `F_q` at `φ(Q)` and vanish under the final
//! exponentiation, so they are dropped.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::curve::{Curve, Point};
use crate::field::{Fq, Fq2};

#[derive(Clone, Debug)]
enum Step {
    Square,
    /// Line `Y - y_T - λ(X - x_T)`, stored as `(λ, λ·x_T - y_T)`.
    Line(Fq, Fq),
}

/// Miller loop of a fixed point, ready to be evaluated at any `Q`.
#[derive(Clone, Debug)]
pub struct PreparedPoint {
    steps: Vec<Step>,
    trivial: bool,
}

impl PreparedPoint {
    pub fn new(curve: &Curve, p: &Point, order: &BigUint) -> Self {
        let f = curve.field();
        if p.is_infinity() {
            return PreparedPoint { steps: Vec::new(), trivial: true };
        }
        let line = |t: &Point, lambda: Fq| Step::Line(lambda, f.sub(&f.mul(&lambda, &t.x), &t.y));
        let tangent = |t: &Point| {
            let num = f.add(&f.mul(&f.from_u64(3), &f.square(&t.x)), &f.one());
            f.mul(&num, &f.inv(&f.double(&t.y)).expect("y != 0"))
        };

        let mut steps = Vec::with_capacity(2 * order.bits() as usize);
        let mut t = *p;
        for i in (0..order.bits().saturating_sub(1)).rev() {
            steps.push(Step::Square);
            if !t.is_infinity() {
                if t.y.is_zero() {
                    t = Point::INFINITY;
                } else {
                    steps.push(line(&t, tangent(&t)));
                    t = curve.double(&t);
                }
            }
            if order.bit(i) {
                if t.is_infinity() {
                    t = *p;
                } else if t.x == p.x {
                    if t.y == p.y && !t.y.is_zero() {
                        steps.push(line(&t, tangent(&t)));
                        t = curve.double(&t);
                    } else {
                        t = Point::INFINITY;
                    }
                } else {
                    let lambda = f.mul(&f.sub(&p.y, &t.y), &f.inv(&f.sub(&p.x, &t.x)).expect("x differs"));
                    steps.push(line(&t, lambda));
                    t = curve.add(&t, p);
                }
            }
        }
        PreparedPoint { steps, trivial: false }
    }

    /// Miller function value before the final exponentiation.
    fn miller(&self, curve: &Curve, q: &Point) -> Fq2 {
        let f = curve.field();
        let mut acc = f.fq2_one();
        for step in &self.steps {
            match step {
                Step::Square => acc = f.fq2_square(&acc),
                Step::Line(lambda, c) => {
                    // At φ(Q) = (-x_Q, i·y_Q): (λ·x_Q + c) + i·y_Q.
                    let l = Fq2 { c0: f.add(&f.mul(lambda, &q.x), c), c1: q.y };
                    acc = f.fq2_mul(&acc, &l);
                }
            }
        }
        acc
    }

    pub fn pair(&self, curve: &Curve, q: &Point, final_exp: &BigUint) -> Fq2 {
        let f = curve.field();
        if self.trivial || q.is_infinity() {
            return f.fq2_one();
        }
        let m = self.miller(curve, q);
        // m^(q-1) = conj(m) / m, then the remaining factor (q + 1) / n.
        let inv = f.fq2_inv(&m).expect("Miller value is nonzero off F_q");
        let unitary = f.fq2_mul(&f.fq2_conj(&m), &inv);
        f.fq2_pow(&unitary, final_exp)
    }
}

/// One-shot `ê(p, q)` for a subgroup of order `order` with cofactor
/// `cofactor = (q_field + 1) / order`.
pub fn tate(curve: &Curve, p: &Point, q: &Point, order: &BigUint, cofactor: &BigUint) -> Fq2 {
    PreparedPoint::new(curve, p, order).pair(curve, q, cofactor)
}
