//! Prime-field arithmetic over an arbitrary modulus with operation counting.
//!
//! Elements are canonical residues in `[0, p)` backed by [`BigUint`]. All
//! arithmetic goes through a [`Field`] context, which owns the counters for
//! multiplications, squarings and additions (subtractions and negations count
//! as additions). Counting calls instead of cycles is what the rest of the
//! toolkit reasons about: two computations are "constant time" here when their
//! counted operation sequences agree.
//!
//! Inversion and the Legendre symbol are realised by exponentiation with a
//! fixed left-to-right schedule, so their traces depend only on the (public)
//! modulus, never on the input value. Secret exponents (isogeny degrees) use
//! [`Field::pow_fixed_width`], a multiply-always ladder with one `mul` and one
//! `sqr` per bit of a fixed public width.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Shape of the field: `p + 1 = 2^f * g * prod(primes)` with `p ≡ 3 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    /// The prime modulus.
    pub p: BigUint,
    /// Exponent of 2 in `p + 1` (at least 2, so `p ≡ 3 (mod 4)`).
    pub f: u32,
    /// Small odd cofactor.
    pub g: BigUint,
    /// Ordered list of distinct odd primes dividing `p + 1`.
    pub primes: Vec<u64>,
}

impl FieldParams {
    /// Builds `p = 2^f * g * prod(primes) - 1` and validates the shape.
    pub fn new(f: u32, g: u64, primes: &[u64]) -> Result<Arc<Self>> {
        let mut p1 = BigUint::one() << f;
        p1 *= BigUint::from(g);
        for &l in primes {
            p1 *= BigUint::from(l);
        }
        let p = &p1 - BigUint::one();
        Self::from_parts(p, f, BigUint::from(g), primes.to_vec())
    }

    /// Validates an explicit `(p, f, g, primes)` tuple.
    pub fn from_parts(p: BigUint, f: u32, g: BigUint, primes: Vec<u64>) -> Result<Arc<Self>> {
        if f < 2 {
            return Err(Error::Parameter(format!("f = {f}, need f >= 2")));
        }
        if g.is_zero() || (&g % 2u32) == BigUint::zero() {
            return Err(Error::Parameter("cofactor g must be odd and nonzero".into()));
        }
        let mut sorted = primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != primes.len() || sorted != primes {
            return Err(Error::Parameter(
                "prime list must be strictly increasing and duplicate-free".into(),
            ));
        }
        for &l in &primes {
            if l < 3 || l % 2 == 0 || !is_prime_u64(l) {
                return Err(Error::Parameter(format!("{l} is not an odd prime")));
            }
        }
        let mut expect = BigUint::one() << f;
        expect *= &g;
        for &l in &primes {
            expect *= BigUint::from(l);
        }
        if &p + BigUint::one() != expect {
            return Err(Error::Parameter(
                "p + 1 != 2^f * g * prod(primes)".into(),
            ));
        }
        if (&p % 4u32) != BigUint::from(3u32) {
            return Err(Error::Parameter("p != 3 (mod 4)".into()));
        }
        if !is_prime(&p) {
            return Err(Error::Parameter("p is not prime".into()));
        }
        Ok(Arc::new(FieldParams { p, f, g, primes }))
    }

    /// Product of the odd torsion primes.
    pub fn odd_order(&self) -> BigUint {
        let mut n = BigUint::one();
        for &l in &self.primes {
            n *= BigUint::from(l);
        }
        n
    }

    /// The even-and-cofactor part `2^f * g` cleared before torsion work.
    pub fn cofactor(&self) -> BigUint {
        (BigUint::one() << self.f) * &self.g
    }

    /// Bit length of the modulus.
    pub fn bits(&self) -> u64 {
        self.p.bits()
    }
}

/// Counted field operations: `mul`, `sqr`, and `add` (additions together with
/// subtractions and negations).
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub mul: u64,
    pub sqr: u64,
    pub add: u64,
}

impl OpCounts {
    /// Multiplication-equivalent total (`mul + sqr`), the unit the cost model
    /// and the benchmark report use. Additions are not weighted.
    pub fn fp_mults(&self) -> u64 {
        self.mul + self.sqr
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mul: self.mul + rhs.mul,
            sqr: self.sqr + rhs.sqr,
            add: self.add + rhs.add,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}M {}S {}A", self.mul, self.sqr, self.add)
    }
}

/// A canonical residue modulo the field's `p`.
///
/// Elements are immutable; they carry a handle to their parameters so that
/// mixing fields is caught at the first operation.
#[derive(Clone)]
pub struct Fe {
    value: BigUint,
    params: Arc<FieldParams>,
}

impl Fe {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }
}

impl PartialEq for Fe {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.params.p == other.params.p
    }
}

impl Eq for Fe {}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({:#x})", self.value)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.value)
    }
}

/// Evaluation context: parameters plus the operation counter.
///
/// The counter is scoped to this context, not global; concurrent evaluations
/// each get their own `Field` (the type is deliberately `!Sync`). Elements can
/// move freely between contexts that share the same parameters.
pub struct Field {
    params: Arc<FieldParams>,
    frames: RefCell<Vec<OpCounts>>,
    labels: RefCell<BTreeMap<String, OpCounts>>,
}

impl Field {
    pub fn new(params: Arc<FieldParams>) -> Self {
        Field {
            params,
            frames: RefCell::new(vec![OpCounts::default()]),
            labels: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }

    /// A fresh context over the same parameters, with zeroed counters.
    pub fn fork(&self) -> Field {
        Field::new(Arc::clone(&self.params))
    }

    // ---- counters ------------------------------------------------------

    fn bump(&self, mul: u64, sqr: u64, add: u64) {
        let mut frames = self.frames.borrow_mut();
        let top = frames.last_mut().expect("counter stack underflow");
        top.mul += mul;
        top.sqr += sqr;
        top.add += add;
    }

    /// All operations counted since construction (or the last [`reset`]),
    /// including those inside currently open scopes.
    ///
    /// [`reset`]: Field::reset
    pub fn counts(&self) -> OpCounts {
        self.frames
            .borrow()
            .iter()
            .fold(OpCounts::default(), |acc, f| acc + *f)
    }

    /// Zeroes the counters and drops label attribution.
    pub fn reset(&self) {
        *self.frames.borrow_mut() = vec![OpCounts::default()];
        self.labels.borrow_mut().clear();
    }

    /// Runs `body` inside a counting scope attributed to `label`, returning
    /// its result together with the counts accumulated inside. Nested scopes
    /// sum into their enclosing scope on exit.
    pub fn scoped<R>(&self, label: &str, body: impl FnOnce() -> R) -> (R, OpCounts) {
        self.frames.borrow_mut().push(OpCounts::default());
        let r = body();
        let frame = self.frames.borrow_mut().pop().expect("scope underflow");
        self.bump(frame.mul, frame.sqr, frame.add);
        *self
            .labels
            .borrow_mut()
            .entry(label.to_string())
            .or_default() += frame;
        (r, frame)
    }

    /// Per-label totals recorded by [`scoped`](Field::scoped) so far.
    pub fn labeled_totals(&self) -> BTreeMap<String, OpCounts> {
        self.labels.borrow().clone()
    }

    // ---- element construction -------------------------------------------

    pub fn zero(&self) -> Fe {
        self.fe_from(BigUint::zero())
    }

    pub fn one(&self) -> Fe {
        self.fe_from(BigUint::one())
    }

    pub fn fe(&self, v: u64) -> Fe {
        self.fe_from(BigUint::from(v))
    }

    /// Reduces `v` into the canonical range.
    pub fn fe_from(&self, v: BigUint) -> Fe {
        Fe {
            value: v % &self.params.p,
            params: Arc::clone(&self.params),
        }
    }

    /// `-1` as a field element.
    pub fn minus_one(&self) -> Fe {
        self.fe_from(&self.params.p - BigUint::one())
    }

    fn compat(&self, a: &Fe) {
        assert!(
            Arc::ptr_eq(&a.params, &self.params) || a.params.p == self.params.p,
            "field element from mismatched modulus"
        );
    }

    // ---- counted arithmetic ---------------------------------------------

    /// `(a + b) mod p`; one `add`.
    pub fn add(&self, a: &Fe, b: &Fe) -> Fe {
        self.compat(a);
        self.compat(b);
        self.bump(0, 0, 1);
        let mut v = &a.value + &b.value;
        if v >= self.params.p {
            v -= &self.params.p;
        }
        self.fe_raw(v)
    }

    /// `(a - b) mod p`; one `add`.
    pub fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        self.compat(a);
        self.compat(b);
        self.bump(0, 0, 1);
        let v = if a.value >= b.value {
            &a.value - &b.value
        } else {
            &self.params.p - &b.value + &a.value
        };
        self.fe_raw(v)
    }

    /// `(-a) mod p`; one `add`.
    pub fn neg(&self, a: &Fe) -> Fe {
        self.compat(a);
        self.bump(0, 0, 1);
        let v = if a.value.is_zero() {
            BigUint::zero()
        } else {
            &self.params.p - &a.value
        };
        self.fe_raw(v)
    }

    /// `(a * b) mod p`; one `mul`.
    pub fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        self.compat(a);
        self.compat(b);
        self.bump(1, 0, 0);
        self.fe_raw((&a.value * &b.value) % &self.params.p)
    }

    /// `a^2 mod p`; one `sqr` (kept separate from `mul` in the counters).
    pub fn sqr(&self, a: &Fe) -> Fe {
        self.compat(a);
        self.bump(0, 1, 0);
        self.fe_raw((&a.value * &a.value) % &self.params.p)
    }

    /// Conditional negation at uniform cost: always spends the one `add` of a
    /// negation, then selects. The trace is independent of `negate`.
    pub fn cneg(&self, a: &Fe, negate: bool) -> Fe {
        let n = self.neg(a);
        if negate {
            n
        } else {
            a.clone()
        }
    }

    /// Constant-trace selection; no counted operations.
    pub fn select<'a>(&self, cond: bool, if_true: &'a Fe, if_false: &'a Fe) -> &'a Fe {
        if cond {
            if_true
        } else {
            if_false
        }
    }

    /// `base^e` by left-to-right square-and-multiply over the bits of the
    /// public exponent `e`. The schedule (and hence the trace) depends only
    /// on `e`, never on `base`.
    pub fn pow_public(&self, base: &Fe, e: &BigUint) -> Fe {
        self.compat(base);
        if e.is_zero() {
            return self.one();
        }
        let bits = e.bits();
        let mut acc = base.clone();
        for i in (0..bits - 1).rev() {
            acc = self.sqr(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, base);
            }
        }
        acc
    }

    /// `base^e` by a multiply-always ladder over exactly `width` bits, for
    /// secret exponents: one `mul` and one `sqr` per bit regardless of `e`.
    ///
    /// Requires `e < 2^width`.
    pub fn pow_fixed_width(&self, base: &Fe, e: &BigUint, width: u64) -> Fe {
        self.compat(base);
        assert!(e.bits() <= width, "exponent wider than the fixed width");
        let mut r0 = self.one();
        let mut r1 = base.clone();
        for i in (0..width).rev() {
            if e.bit(i) {
                r0 = self.mul(&r0, &r1);
                r1 = self.sqr(&r1);
            } else {
                r1 = self.mul(&r0, &r1);
                r0 = self.sqr(&r0);
            }
        }
        r0
    }

    /// Multiplicative inverse via Fermat exponentiation by `p - 2` with the
    /// fixed public schedule, so the trace is input-independent.
    pub fn inv(&self, a: &Fe) -> Result<Fe> {
        self.compat(a);
        if a.value.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e = &self.params.p - BigUint::from(2u32);
        Ok(self.pow_public(a, &e))
    }

    /// Legendre symbol by Euler's criterion `a^((p-1)/2)`, fixed trace.
    /// Returns `+1` for nonzero squares, `-1` for non-squares, `0` for zero.
    pub fn legendre(&self, a: &Fe) -> i8 {
        self.compat(a);
        if a.value.is_zero() {
            return 0;
        }
        let e = (&self.params.p - BigUint::one()) >> 1;
        let r = self.pow_public(a, &e);
        if r.value.is_one() {
            1
        } else {
            -1
        }
    }

    fn fe_raw(&self, value: BigUint) -> Fe {
        debug_assert!(value < self.params.p);
        Fe {
            value,
            params: Arc::clone(&self.params),
        }
    }
}

// ---- primality ------------------------------------------------------------

/// Trial-division primality for small torsion primes.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = 11u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Miller-Rabin with the first twelve prime bases: deterministic for all
/// n < 3.3 * 10^24, which covers every desk-scale modulus this crate builds;
/// beyond that it is a strong probabilistic test.
pub fn is_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if *n == BigUint::from(b) {
            return true;
        }
        if (n % BigUint::from(b)).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'outer: for &b in &BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
