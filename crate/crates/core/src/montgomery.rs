//! x-only Montgomery curve arithmetic in projective coordinates.
//!
//! Curves are `y^2 = x^3 + (A/C)x^2 + x` with a projective coefficient
//! `(A : C)`; points live on the x-line as `(X : Z)` with `Z = 0` encoding the
//! point at infinity. The quadratic twist is never materialised: an x whose
//! right-hand side is a non-square simply belongs to the twist, and all
//! formulas below are twist-agnostic.

use num_bigint::BigUint;
use num_traits::One;

use crate::field::{Fe, Field};
use crate::{Error, Result};

/// Projective x-line point `(X : Z)`. `(0 : 0)` is forbidden.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    pub x: Fe,
    pub z: Fe,
}

impl ProjPoint {
    pub fn new(x: Fe, z: Fe) -> Self {
        ProjPoint { x, z }
    }

    /// Affine point `(x : 1)`.
    pub fn from_affine(x: Fe, field: &Field) -> Self {
        ProjPoint { x, z: field.one() }
    }

    /// The point at infinity `(1 : 0)`.
    pub fn infinity(field: &Field) -> Self {
        ProjPoint {
            x: field.one(),
            z: field.zero(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.z.is_zero()
    }

    /// Projective x-equality by cross-multiplication, outside the counters.
    /// Test and oracle use only; the counted constant-trace comparison is
    /// [`crate::isogeny::ccompare`].
    pub fn proj_eq_vartime(&self, other: &ProjPoint) -> bool {
        let p = &self.x.params().p;
        (self.x.value() * other.z.value()) % p == (other.x.value() * self.z.value()) % p
    }

    /// Normalises to affine x; errors at infinity.
    pub fn to_affine_x(&self, field: &Field) -> Result<Fe> {
        let zi = field.inv(&self.z)?;
        Ok(field.mul(&self.x, &zi))
    }
}

/// Projective Montgomery coefficient `(A : C)` with the doubling constants
/// `(A + 2C : 4C)` cached at construction (three `add`s, once per curve).
#[derive(Clone, Debug)]
pub struct CurveCoeff {
    pub a: Fe,
    pub c: Fe,
    a24_plus: Fe,
    c24: Fe,
}

impl CurveCoeff {
    /// Validates `C != 0` and nonsingularity `(A/C)^2 != 4`.
    pub fn new(field: &Field, a: Fe, c: Fe) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Parameter("curve coefficient with C = 0".into()));
        }
        let c2 = field.add(&c, &c);
        let a24_plus = field.add(&a, &c2);
        let a_minus_2c = field.sub(&a, &c2);
        if a24_plus.is_zero() || a_minus_2c.is_zero() {
            return Err(Error::Parameter("singular curve: A = ±2C".into()));
        }
        let c24 = field.add(&c2, &c2);
        Ok(CurveCoeff { a, c, a24_plus, c24 })
    }

    /// Curve with affine coefficient `a` (C = 1).
    pub fn from_affine(field: &Field, a: Fe) -> Result<Self> {
        CurveCoeff::new(field, a, field.one())
    }

    /// `A + 2C`, as used by doubling and the codomain formula.
    pub fn a24_plus(&self) -> &Fe {
        &self.a24_plus
    }

    /// `4C`.
    pub fn c24(&self) -> &Fe {
        &self.c24
    }

    /// Affine coefficient `A/C`.
    pub fn to_affine(&self, field: &Field) -> Result<Fe> {
        let ci = field.inv(&self.c)?;
        Ok(field.mul(&self.a, &ci))
    }
}

/// Which side of the curve/twist split an x-coordinate falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XClass {
    /// `x^3 + (A/C)x^2 + x` is a nonzero square: x-coordinate of a curve point.
    Curve,
    /// Non-square: x-coordinate of a twist point.
    Twist,
    /// Zero: 2-torsion or `x = 0`; unusable for odd-torsion work.
    Neither,
}

impl XClass {
    /// The group-action direction this class serves: `+1` curve, `-1` twist.
    pub fn direction(self) -> Option<i8> {
        match self {
            XClass::Curve => Some(1),
            XClass::Twist => Some(-1),
            XClass::Neither => None,
        }
    }
}

/// `x([2]P)`. Fixed cost: 4M + 2S + 4A.
pub fn xdbl(field: &Field, p: &ProjPoint, e: &CurveCoeff) -> ProjPoint {
    debug_assert!(!(p.x.is_zero() && p.z.is_zero()), "(0:0) is not a point");
    let t0 = field.sub(&p.x, &p.z);
    let t1 = field.add(&p.x, &p.z);
    let t0 = field.sqr(&t0);
    let t1 = field.sqr(&t1);
    let zq = field.mul(e.c24(), &t0);
    let xq = field.mul(&zq, &t1);
    let t1 = field.sub(&t1, &t0);
    let t2 = field.mul(e.a24_plus(), &t1);
    let zq = field.add(&zq, &t2);
    let zq = field.mul(&zq, &t1);
    // This formula cannot produce (0:0); normalise defensively anyway so a
    // degenerate doubling reads as the point at infinity.
    if xq.is_zero() && zq.is_zero() {
        return ProjPoint::new(field.one(), zq);
    }
    ProjPoint::new(xq, zq)
}

/// `x(P + Q)` from `x(P)`, `x(Q)` and the difference `x(P - Q)`.
/// Fixed cost: 4M + 2S + 6A. Requires `P != Q`.
pub fn xadd(field: &Field, p: &ProjPoint, q: &ProjPoint, pmq: &ProjPoint) -> ProjPoint {
    let t0 = field.add(&p.x, &p.z);
    let t1 = field.sub(&p.x, &p.z);
    let t2 = field.add(&q.x, &q.z);
    let t3 = field.sub(&q.x, &q.z);
    let u = field.mul(&t0, &t3);
    let v = field.mul(&t1, &t2);
    let s = field.add(&u, &v);
    let d = field.sub(&u, &v);
    let s2 = field.sqr(&s);
    let d2 = field.sqr(&d);
    let x = field.mul(&pmq.z, &s2);
    let z = field.mul(&pmq.x, &d2);
    ProjPoint::new(x, z)
}

/// `x([k]P)` by the classic Montgomery ladder; the scalar is treated as
/// public (the schedule follows its bits). This is the independent
/// scalar-multiplication oracle the DAC layer is checked against.
pub fn ladder(field: &Field, k: &BigUint, p: &ProjPoint, e: &CurveCoeff) -> ProjPoint {
    assert!(k >= &BigUint::one(), "ladder requires k >= 1");
    if p.is_infinity() {
        return ProjPoint::infinity(field);
    }
    let bits = k.bits();
    let mut r0 = p.clone();
    let mut r1 = xdbl(field, p, e);
    for i in (0..bits - 1).rev() {
        if k.bit(i) {
            let s = xadd(field, &r0, &r1, p);
            r1 = xdbl(field, &r1, e);
            r0 = s;
        } else {
            r1 = xadd(field, &r0, &r1, p);
            r0 = xdbl(field, &r0, e);
        }
    }
    r0
}

/// Convenience wrapper for small scalars.
pub fn ladder_u64(field: &Field, k: u64, p: &ProjPoint, e: &CurveCoeff) -> ProjPoint {
    ladder(field, &BigUint::from(k), p, e)
}

/// Classifies an affine x-coordinate by the Legendre symbol of
/// `x^3 + (A/C)x^2 + x`, computed inversion-free as `Leg(x(Cx^2+Ax+C) * C)`.
/// Invariant under projective rescaling of `(A : C)`.
pub fn classify_x(field: &Field, x: &Fe, e: &CurveCoeff) -> XClass {
    let x2 = field.sqr(x);
    let cx2 = field.mul(&e.c, &x2);
    let ax = field.mul(&e.a, x);
    let inner = field.add(&cx2, &ax);
    let inner = field.add(&inner, &e.c);
    let s = field.mul(x, &inner);
    let t = field.mul(&s, &e.c);
    match field.legendre(&t) {
        1 => XClass::Curve,
        -1 => XClass::Twist,
        _ => XClass::Neither,
    }
}

/// How far the deterministic x-scan is willing to walk before giving up.
pub const POINT_SEARCH_BOUND: u64 = 4096;

/// Deterministically finds a point of full odd order `prod(primes)` on the
/// curve (`direction = +1`) or its twist (`direction = -1`).
///
/// Scans `x = 1, 2, 3, ...` in order, keeps the first x of the requested
/// class, clears the cofactor `2^f * g`, and accepts only if every prime
/// component survives; otherwise the scan continues. A pure function of
/// `(E, direction, field params)`.
pub fn deterministic_point(field: &Field, e: &CurveCoeff, direction: i8) -> Result<ProjPoint> {
    assert!(direction == 1 || direction == -1, "direction must be ±1");
    let params = field.params().clone();
    let cof = params.cofactor();
    let odd = params.odd_order();
    for xi in 1..=POINT_SEARCH_BOUND {
        let x = field.fe(xi);
        if classify_x(field, &x, e).direction() != Some(direction) {
            continue;
        }
        let p0 = ProjPoint::from_affine(x, field);
        let t = ladder(field, &cof, &p0, e);
        if t.is_infinity() {
            continue;
        }
        let full = params.primes.iter().all(|&l| {
            let co = &odd / BigUint::from(l);
            !ladder(field, &co, &t, e).is_infinity()
        });
        if full {
            return Ok(t);
        }
    }
    Err(Error::PointSearchFailure(format!(
        "no point of full odd order for direction {direction} within x <= {POINT_SEARCH_BOUND}"
    )))
}
