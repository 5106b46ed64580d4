//! Elliptic curves over ℚ in long Weierstrass form
//! `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` with integer coefficients.
//!
//! The group law is written once over an abstract field and instantiated
//! over ℚ (exact rationals) and over `F_p` (reductions at good primes).

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ln_big, BackendKind, Independence, MordellWeil};
use crate::error::{Error, Result};
use crate::numth::{big_mod, factor_big, inv_mod, is_prime, mul_mod, FiniteGroup};

/// Mazur: rational torsion points have order at most 12.
const MAX_TORSION_ORDER: u64 = 12;

/// Number of good primes whose point counts bound the torsion order.
const TORSION_BOUND_PRIMES: usize = 8;

/// A point on a Weierstrass curve over some field: the point at infinity or
/// an affine pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EcPoint<T> {
    Infinity,
    Affine(T, T),
}

impl<T: fmt::Display> fmt::Display for EcPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcPoint::Infinity => write!(f, "O"),
            EcPoint::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

/// A rational point.
pub type CurvePoint = EcPoint<BigRational>;

impl CurvePoint {
    pub fn x(&self) -> Option<&BigRational> {
        match self {
            EcPoint::Infinity => None,
            EcPoint::Affine(x, _) => Some(x),
        }
    }
}

impl FromStr for CurvePoint {
    type Err = Error;

    /// `(x,y)` with rational coordinates, or `O`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "O" || t == "o" {
            return Ok(EcPoint::Infinity);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| Error::parse(s, "expected (x,y) or O"))?;
        let (x, y) = inner
            .split_once(',')
            .ok_or_else(|| Error::parse(s, "expected two coordinates"))?;
        Ok(EcPoint::Affine(
            parse_rational(x, s)?,
            parse_rational(y, s)?,
        ))
    }
}

fn parse_rational(field: &str, whole: &str) -> Result<BigRational> {
    let f = field.trim();
    let (n, d) = f.split_once('/').unwrap_or((f, "1"));
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::parse(whole, "bad coordinate"))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::parse(whole, "bad coordinate"))?;
    if d.is_zero() {
        return Err(Error::parse(whole, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub(crate) trait Field {
    type E: Clone + PartialEq;

    fn zero(&self) -> Self::E;
    fn embed(&self, n: &BigInt) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &Self::E) -> Self::E;

    fn is_zero(&self, a: &Self::E) -> bool {
        *a == self.zero()
    }

    fn small(&self, n: i64) -> Self::E {
        self.embed(&BigInt::from(n))
    }
}

pub(crate) struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn embed(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PrimeField {
    p: u64,
}

impl Field for PrimeField {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn embed(&self, n: &BigInt) -> u64 {
        big_mod(n, self.p)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.p).expect("nonzero element of F_p")
    }
}

/// Coefficients `[a1, a2, a3, a4, a6]` over a field.
type Coeffs<E> = [E; 5];

fn ec_neg<F: Field>(f: &F, a: &Coeffs<F::E>, p: &EcPoint<F::E>) -> EcPoint<F::E> {
    match p {
        EcPoint::Infinity => EcPoint::Infinity,
        EcPoint::Affine(x, y) => {
            let y2 = f.sub(&f.sub(&f.neg(y), &f.mul(&a[0], x)), &a[2]);
            EcPoint::Affine(x.clone(), y2)
        }
    }
}

fn ec_add<F: Field>(
    f: &F,
    a: &Coeffs<F::E>,
    p: &EcPoint<F::E>,
    q: &EcPoint<F::E>,
) -> EcPoint<F::E> {
    let [a1, a2, a3, a4, a6] = a;
    let (x1, y1, x2, y2) = match (p, q) {
        (EcPoint::Infinity, _) => return q.clone(),
        (_, EcPoint::Infinity) => return p.clone(),
        (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
    };
    let (lambda, nu);
    if x1 == x2 {
        // y1 + y2 + a1·x2 + a3 = 0 exactly when Q = −P
        let s = f.add(&f.add(&f.add(y1, y2), &f.mul(a1, x2)), a3);
        if f.is_zero(&s) {
            return EcPoint::Infinity;
        }
        let x1sq = f.mul(x1, x1);
        let num_l = f.sub(
            &f.add(
                &f.add(
                    &f.mul(&f.small(3), &x1sq),
                    &f.mul(&f.mul(&f.small(2), a2), x1),
                ),
                a4,
            ),
            &f.mul(a1, y1),
        );
        let num_n = f.sub(
            &f.add(
                &f.add(&f.neg(&f.mul(&x1sq, x1)), &f.mul(a4, x1)),
                &f.mul(&f.small(2), a6),
            ),
            &f.mul(a3, y1),
        );
        let den = f.inv(&s);
        lambda = f.mul(&num_l, &den);
        nu = f.mul(&num_n, &den);
    } else {
        let den = f.inv(&f.sub(x2, x1));
        lambda = f.mul(&f.sub(y2, y1), &den);
        nu = f.mul(&f.sub(&f.mul(y1, x2), &f.mul(y2, x1)), &den);
    }
    let x3 = f.sub(
        &f.sub(
            &f.sub(&f.add(&f.mul(&lambda, &lambda), &f.mul(a1, &lambda)), a2),
            x1,
        ),
        x2,
    );
    let y3 = f.sub(&f.sub(&f.neg(&f.mul(&f.add(&lambda, a1), &x3)), &nu), a3);
    EcPoint::Affine(x3, y3)
}

fn on_curve<F: Field>(f: &F, a: &Coeffs<F::E>, x: &F::E, y: &F::E) -> bool {
    let [a1, a2, a3, a4, a6] = a;
    let lhs = f.add(&f.mul(y, y), &f.mul(y, &f.add(&f.mul(a1, x), a3)));
    let x2 = f.mul(x, x);
    let rhs = f.add(
        &f.add(&f.add(&f.mul(&x2, x), &f.mul(a2, &x2)), &f.mul(a4, x)),
        a6,
    );
    lhs == rhs
}

/// An elliptic curve over ℚ with integral long Weierstrass model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    a: [BigInt; 5],
    discriminant: BigInt,
}

impl WeierstrassCurve {
    pub fn new(coeffs: [BigInt; 5]) -> Result<Self> {
        let discriminant = discriminant_of(&coeffs);
        if discriminant.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(WeierstrassCurve {
            a: coeffs,
            discriminant,
        })
    }

    pub fn from_coeffs(c: [i64; 5]) -> Result<Self> {
        WeierstrassCurve::new(c.map(BigInt::from))
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.a
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        b_invariants(&self.a)
    }

    /// `(c4, c6)`.
    pub fn c_invariants(&self) -> (BigInt, BigInt) {
        let (b2, b4, b6, _) = self.b_invariants();
        let c4 = &b2 * &b2 - 24 * &b4;
        let c6 = -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * &b6;
        (c4, c6)
    }

    fn rational_coeffs(&self) -> Coeffs<BigRational> {
        self.a.clone().map(BigRational::from_integer)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => on_curve(&Rationals, &self.rational_coeffs(), x, y),
        }
    }

    /// Validates that `(x, y)` is on the curve.
    pub fn point(&self, x: BigRational, y: BigRational) -> Result<CurvePoint> {
        let p = EcPoint::Affine(x, y);
        if !self.contains(&p) {
            return Err(Error::NotOnCurve(p.to_string()));
        }
        Ok(p)
    }

    /// The reduced curve over `F_v`; requires `v` prime and `v ∤ Δ`.
    pub fn reduction(&self, v: u64) -> Result<ReducedCurve> {
        if !is_prime(v) {
            return Err(Error::NotPrime(v));
        }
        if big_mod(&self.discriminant, v) == 0 {
            return Err(Error::bad_prime(v, format!("{v} divides the discriminant")));
        }
        let field = PrimeField { p: v };
        Ok(ReducedCurve {
            field,
            a: self.a.clone().map(|c| field.embed(&c)),
        })
    }

    /// Good primes `≥ 3`, ascending, `count` of them.
    fn first_good_odd_primes(&self, count: usize) -> Vec<u64> {
        (3u64..)
            .filter(|&v| is_prime(v) && big_mod(&self.discriminant, v) != 0)
            .take(count)
            .collect()
    }

    /// gcd of `|E(F_v)|` over the first few good odd primes; the rational
    /// torsion order divides it.
    pub fn torsion_order_bound(&self) -> u64 {
        self.first_good_odd_primes(TORSION_BOUND_PRIMES)
            .into_iter()
            .map(|v| self.reduction(v).expect("good prime").count_points())
            .fold(0u64, |g, n| g.gcd(&n))
    }

    /// Exact order of a rational point if it is at most 12, else `None`.
    fn small_order(&self, p: &CurvePoint) -> Option<u64> {
        let a = self.rational_coeffs();
        let mut acc = p.clone();
        for k in 1..=MAX_TORSION_ORDER {
            if acc == EcPoint::Infinity {
                return Some(k);
            }
            acc = ec_add(&Rationals, &a, &acc, p);
        }
        None
    }

    /// All rational torsion points: Nagell-Lutz candidates on the short model
    /// `y² = x³ − 27c4·x − 54c6`, pulled back and filtered by exact order.
    fn compute_torsion(&self) -> Vec<CurvePoint> {
        let (c4, c6) = self.c_invariants();
        let (b2, _, _, _) = self.b_invariants();
        let big_a: BigInt = -27 * &c4;
        let big_b: BigInt = -54 * &c6;
        let disc: BigInt = 4 * &big_a * &big_a * &big_a + 27 * &big_b * &big_b;
        let bound = self.torsion_order_bound();

        let mut ys: Vec<BigInt> = vec![BigInt::zero()];
        let factors = factor_big(disc.magnitude()).expect("nonsingular");
        let mut divisors = vec![BigUint::one()];
        for (p, e) in &factors {
            let mut next = Vec::new();
            for d in &divisors {
                let mut pk = BigUint::one();
                for _ in 0..=(e / 2) {
                    next.push(d * &pk);
                    pk *= p;
                }
            }
            divisors = next;
        }
        ys.extend(divisors.into_iter().map(BigInt::from));

        let a = self.rational_coeffs();
        let mut out = vec![EcPoint::Infinity];
        for y in ys {
            let c = &big_b - &y * &y;
            for x in integer_roots_depressed_cubic(&big_a, &c) {
                for yy in [y.clone(), -y.clone()] {
                    // pull back (x', y') ↦ ((x' − 3b2)/36, (y'/108 − a1·x − a3)/2)
                    let xr = BigRational::new(&x - 3 * &b2, BigInt::from(36));
                    let yr = (BigRational::new(yy, BigInt::from(108)) - &a[0] * &xr - &a[2])
                        / BigRational::from_integer(BigInt::from(2));
                    let p = EcPoint::Affine(xr, yr);
                    debug_assert!(self.contains(&p));
                    if out.contains(&p) {
                        continue;
                    }
                    if let Some(k) = self.small_order(&p) {
                        if bound.is_multiple_of(k) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out.sort_by_key(point_key);
        out
    }
}

fn point_key(p: &CurvePoint) -> (u8, BigRational, BigRational) {
    match p {
        EcPoint::Infinity => (0, BigRational::zero(), BigRational::zero()),
        EcPoint::Affine(x, y) => (1, x.clone(), y.clone()),
    }
}

fn b_invariants(a: &[BigInt; 5]) -> (BigInt, BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    (b2, b4, b6, b8)
}

fn discriminant_of(a: &[BigInt; 5]) -> BigInt {
    let (b2, b4, b6, b8) = b_invariants(a);
    -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
}

/// Integer roots of `x³ + a·x + c`.
fn integer_roots_depressed_cubic(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + c;
    let r = BigInt::one() + a.abs().max(c.abs());
    // monotone pieces: increasing, decreasing, increasing
    let pieces: Vec<(BigInt, BigInt, bool)> = if !a.is_negative() {
        vec![(-&r, r.clone(), true)]
    } else {
        let m = (-a).div_floor(&BigInt::from(3)).sqrt();
        vec![
            (-&r, -&m - 1, true),
            (-&m, m.clone(), false),
            (&m + 1, r.clone(), true),
        ]
    };
    let mut roots = Vec::new();
    for (lo, hi, increasing) in pieces {
        if lo > hi {
            continue;
        }
        // least x in [lo, hi] with f(x) >= 0 (increasing) or f(x) <= 0 (decreasing)
        let past = |x: &BigInt| {
            let v = f(x);
            if increasing {
                !v.is_negative()
            } else {
                !v.is_positive()
            }
        };
        if !past(&hi) {
            continue;
        }
        let (mut l, mut h) = (lo, hi);
        while l < h {
            let mid = (&l + &h).div_floor(&BigInt::from(2));
            if past(&mid) {
                h = mid;
            } else {
                l = mid + 1;
            }
        }
        if f(&l).is_zero() && !roots.contains(&l) {
            roots.push(l);
        }
    }
    roots.sort();
    roots
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(f, "ec:{a1},{a2},{a3},{a4},{a6}")
    }
}

impl FromStr for WeierstrassCurve {
    type Err = Error;

    /// `ec:a1,a2,a3,a4,a6`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("ec:")
            .ok_or_else(|| Error::parse(s, "expected ec:a1,a2,a3,a4,a6"))?;
        let parts: Vec<BigInt> = body
            .split(',')
            .map(|x| x.trim().parse::<BigInt>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(s, "bad coefficient"))?;
        let coeffs: [BigInt; 5] = parts
            .try_into()
            .map_err(|_| Error::parse(s, "expected five coefficients"))?;
        WeierstrassCurve::new(coeffs)
    }
}

/// `E(F_p)` for a prime of good reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCurve {
    field: PrimeField,
    a: Coeffs<u64>,
}

impl ReducedCurve {
    pub fn modulus(&self) -> u64 {
        self.field.p
    }

    pub fn contains(&self, p: &EcPoint<u64>) -> bool {
        match p {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => on_curve(&self.field, &self.a, x, y),
        }
    }

    /// `|E(F_p)|` by enumeration over `x` with a table of square counts.
    pub fn count_points(&self) -> u64 {
        let p = self.field.p;
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = &self.a;
        if p == 2 {
            let mut n = 1;
            for x in 0..2 {
                for y in 0..2 {
                    if on_curve(f, &self.a, &x, &y) {
                        n += 1;
                    }
                }
            }
            return n;
        }
        let mut sq = vec![0u8; p as usize];
        for y in 0..p {
            sq[mul_mod(y, y, p) as usize] += 1;
        }
        // (2y + a1x + a3)² = (a1x + a3)² + 4(x³ + a2x² + a4x + a6)
        let mut n = 1u64;
        for x in 0..p {
            let b = f.add(&f.mul(a1, &x), a3);
            let x2 = f.mul(&x, &x);
            let cubic = f.add(
                &f.add(&f.add(&f.mul(&x2, &x), &f.mul(a2, &x2)), &f.mul(a4, &x)),
                a6,
            );
            let d = f.add(&f.mul(&b, &b), &f.mul(&4, &cubic));
            n += sq[d as usize] as u64;
        }
        n
    }

    /// Every point of `E(F_p)` (for small `p`).
    pub fn points(&self) -> Vec<EcPoint<u64>> {
        let p = self.field.p;
        let mut out = vec![EcPoint::Infinity];
        for x in 0..p {
            for y in 0..p {
                if on_curve(&self.field, &self.a, &x, &y) {
                    out.push(EcPoint::Affine(x, y));
                }
            }
        }
        out
    }

    pub(crate) fn reduce_point(&self, p: &CurvePoint) -> EcPoint<u64> {
        let v = self.field.p;
        match p {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => {
                // on an integral model at a good prime, v | den(x) iff the
                // point lies in the kernel of reduction
                if big_mod(x.denom(), v) == 0 {
                    return EcPoint::Infinity;
                }
                let red = |q: &BigRational| {
                    let d = inv_mod(big_mod(q.denom(), v), v).expect("unit denominator");
                    mul_mod(big_mod(q.numer(), v), d, v)
                };
                EcPoint::Affine(red(x), red(y))
            }
        }
    }
}

impl FiniteGroup for ReducedCurve {
    type Elem = EcPoint<u64>;

    fn identity(&self) -> EcPoint<u64> {
        EcPoint::Infinity
    }

    fn op(&self, a: &EcPoint<u64>, b: &EcPoint<u64>) -> EcPoint<u64> {
        ec_add(&self.field, &self.a, a, b)
    }

    fn inverse(&self, a: &EcPoint<u64>) -> EcPoint<u64> {
        ec_neg(&self.field, &self.a, a)
    }
}

/// `|E(F_v)|` for a prime `v` of good reduction.
pub fn curve_group_order(curve: &WeierstrassCurve, v: u64) -> Result<u64> {
    Ok(curve.reduction(v)?.count_points())
}

fn naive_height(p: &CurvePoint) -> f64 {
    match p {
        EcPoint::Infinity => 0.0,
        EcPoint::Affine(x, _) => ln_big(x.numer().magnitude().max(x.denom().magnitude())),
    }
}

impl MordellWeil for WeierstrassCurve {
    type Point = CurvePoint;
    type Local = ReducedCurve;

    fn kind(&self) -> BackendKind {
        BackendKind::Elliptic
    }

    fn identity(&self) -> CurvePoint {
        EcPoint::Infinity
    }

    fn add(&self, a: &CurvePoint, b: &CurvePoint) -> CurvePoint {
        ec_add(&Rationals, &self.rational_coeffs(), a, b)
    }

    fn negate(&self, a: &CurvePoint) -> CurvePoint {
        ec_neg(&Rationals, &self.rational_coeffs(), a)
    }

    fn parse_point(&self, s: &str) -> Result<CurvePoint> {
        let p: CurvePoint = s.parse()?;
        if !self.contains(&p) {
            return Err(Error::NotOnCurve(p.to_string()));
        }
        Ok(p)
    }

    fn good_reduction(&self, v: u64) -> bool {
        big_mod(&self.discriminant, v) != 0
    }

    fn point_reduces(&self, _p: &CurvePoint, _v: u64) -> bool {
        true
    }

    fn local_group(&self, v: u64) -> Result<ReducedCurve> {
        self.reduction(v)
    }

    fn local_group_order(&self, local: &ReducedCurve) -> u64 {
        local.count_points()
    }

    fn reduce_into(&self, local: &ReducedCurve, p: &CurvePoint) -> EcPoint<u64> {
        local.reduce_point(p)
    }

    fn torsion_elements(&self) -> Vec<CurvePoint> {
        self.compute_torsion()
    }

    fn torsion_order(&self, t: &CurvePoint) -> Option<u64> {
        self.small_order(t)
    }

    /// Since `ĥ(dP) = d²ĥ(P)`, `|d|` is about `sqrt(h(Q)/h(P))` in naive
    /// heights; the bound is padded generously because the lift is verified
    /// exactly afterwards.
    fn exponent_bound(&self, p: &CurvePoint, q: &CurvePoint) -> BigInt {
        let ratio = (naive_height(q) + 4.0) / (naive_height(p) + 1.0);
        BigInt::from(4 * ratio.sqrt().ceil() as u64 + 4)
    }
}

/// Searches for `Σ nᵢPᵢ = O` with `0 < max |nᵢ| <= coeff_bound`.
///
/// Candidates are filtered through reductions at `check_primes` good primes
/// and confirmed by exact arithmetic; a result of `Independent` is therefore
/// only as strong as the coefficient bound.
pub fn elliptic_independence(
    curve: &WeierstrassCurve,
    points: &[CurvePoint],
    coeff_bound: i64,
    check_primes: usize,
) -> Independence {
    if points.is_empty() {
        return Independence::Independent;
    }
    let reductions: Vec<ReducedCurve> = curve
        .first_good_odd_primes(check_primes.max(1))
        .into_iter()
        .map(|v| curve.reduction(v).expect("good prime"))
        .collect();
    // tables[r][i][n + B] = n·Pᵢ mod v_r
    let tables: Vec<Vec<Vec<EcPoint<u64>>>> = reductions
        .iter()
        .map(|red| {
            points
                .iter()
                .map(|p| {
                    let rp = red.reduce_point(p);
                    (-coeff_bound..=coeff_bound)
                        .map(|n| {
                            let m = red.pow(&rp, n.unsigned_abs());
                            if n < 0 {
                                red.inverse(&m)
                            } else {
                                m
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let width = (2 * coeff_bound + 1) as usize;
    let total = width.pow(points.len() as u32);
    // shells of increasing max-norm, so the first relation found is smallest
    for norm in 1..=coeff_bound {
        for idx in 0..total {
            let coeffs: Vec<i64> = (0..points.len())
                .map(|i| ((idx / width.pow(i as u32)) % width) as i64 - coeff_bound)
                .collect();
            if coeffs.iter().map(|c| c.abs()).max() != Some(norm) {
                continue;
            }
            match coeffs.iter().find(|&&c| c != 0) {
                Some(&c) if c > 0 => {}
                _ => continue,
            }
            let vanishes_locally = reductions.iter().zip(&tables).all(|(red, table)| {
                let sum = coeffs
                    .iter()
                    .enumerate()
                    .fold(EcPoint::Infinity, |acc, (i, &c)| {
                        red.op(&acc, &table[i][(c + coeff_bound) as usize])
                    });
                sum == EcPoint::Infinity
            });
            if !vanishes_locally {
                continue;
            }
            let exact = coeffs
                .iter()
                .zip(points)
                .fold(EcPoint::Infinity, |acc, (&c, p)| {
                    curve.add(&acc, &curve.scalar_mul(p, &BigInt::from(c)))
                });
            if exact == EcPoint::Infinity {
                return Independence::Relation(coeffs.into_iter().map(BigInt::from).collect());
            }
        }
    }
    Independence::Independent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mwgroup::{order_mod, reduce};
    use num_traits::ToPrimitive;

    fn curve(s: &str) -> WeierstrassCurve {
        s.parse().unwrap()
    }

    fn pt(c: &WeierstrassCurve, s: &str) -> CurvePoint {
        c.parse_point(s).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(*curve("ec:0,0,1,-1,0").discriminant(), BigInt::from(37));
        assert_eq!(*curve("ec:0,0,0,-1,0").discriminant(), BigInt::from(64));
        // 11a1: y² + y = x³ − x² − 10x − 20, Δ = −11⁵
        assert_eq!(
            *curve("ec:0,-1,1,-10,-20").discriminant(),
            BigInt::from(-161051)
        );
        assert!("ec:0,0,0,0,0".parse::<WeierstrassCurve>().is_err());
        assert!("ec:0,0,1".parse::<WeierstrassCurve>().is_err());
    }

    #[test]
    fn point_parsing() {
        let e = curve("ec:0,0,1,-1,0");
        assert_eq!(pt(&e, "O"), EcPoint::Infinity);
        assert!(e.parse_point("(1,1)").is_err());
        assert!(e.parse_point("(0,0").is_err());
        assert_eq!(pt(&e, "(1/4,-5/8)").to_string(), "(1/4,-5/8)");
    }

    #[test]
    fn group_law_examples() {
        let e = curve("ec:0,0,1,-1,0");
        let p = pt(&e, "(0,0)");
        assert_eq!(e.add(&p, &EcPoint::Infinity), p);
        assert_eq!(e.add(&p, &e.negate(&p)), EcPoint::Infinity);
        assert_eq!(e.scalar_mul(&p, &BigInt::from(2)), pt(&e, "(1,0)"));
        // 3P = (-1,-1), 4P = (2,-3), 5P = (1/4,-5/8) on 37a1
        assert_eq!(e.scalar_mul(&p, &BigInt::from(3)), pt(&e, "(-1,-1)"));
        assert_eq!(e.scalar_mul(&p, &BigInt::from(4)), pt(&e, "(2,-3)"));
        assert_eq!(e.scalar_mul(&p, &BigInt::from(5)), pt(&e, "(1/4,-5/8)"));
        assert_eq!(
            e.scalar_mul(&p, &BigInt::from(-5)),
            e.negate(&pt(&e, "(1/4,-5/8)"))
        );
        for k in -12..=12 {
            assert!(e.contains(&e.scalar_mul(&p, &BigInt::from(k))));
        }
    }

    fn brute_count(red: &ReducedCurve) -> u64 {
        red.points().len() as u64
    }

    #[test]
    fn point_counts() {
        let e = curve("ec:0,0,1,-1,0");
        assert_eq!(curve_group_order(&e, 2).unwrap(), 5);
        assert_eq!(curve_group_order(&e, 3).unwrap(), 7);
        assert!(curve_group_order(&e, 37).is_err());
        for c in [
            "ec:0,0,1,-1,0",
            "ec:0,0,0,-1,0",
            "ec:1,-1,1,-1,0",
            "ec:0,-1,1,-10,-20",
        ] {
            let e = curve(c);
            for v in crate::numth::primes_in(crate::numth::PrimeRange::new(2, 200).unwrap()) {
                if let Ok(red) = e.reduction(v) {
                    let n = red.count_points();
                    assert_eq!(n, brute_count(&red), "{c} at {v}");
                    let diff = (n as f64 - (v as f64 + 1.0)).abs();
                    assert!(diff <= 2.0 * (v as f64).sqrt(), "Hasse at {v}");
                }
            }
        }
    }

    #[test]
    fn order_mod_and_reduction() {
        let e = curve("ec:0,0,1,-1,0");
        let p = pt(&e, "(0,0)");
        assert_eq!(reduce(&e, &p, 5).unwrap(), EcPoint::Affine(0, 0));
        assert_eq!(order_mod(&e, &p, 2).unwrap(), 5);
        // (1/4, -5/8) reduces to the identity at 2 (2 | den x)
        assert_eq!(
            reduce(&e, &pt(&e, "(1/4,-5/8)"), 2).unwrap(),
            EcPoint::Infinity
        );
        assert_eq!(
            reduce(&e, &pt(&e, "(1/4,-5/8)"), 3).unwrap(),
            EcPoint::Affine(1, 2)
        );
    }

    #[test]
    fn torsion_examples() {
        let e = curve("ec:0,0,1,-1,0");
        assert_eq!(e.torsion_elements(), vec![EcPoint::Infinity]);
        let e = curve("ec:0,0,0,-1,0");
        let t = e.torsion_elements();
        let expect: Vec<CurvePoint> = ["O", "(-1,0)", "(0,0)", "(1,0)"]
            .iter()
            .map(|s| pt(&e, s))
            .collect();
        assert_eq!(t, expect);
        // 11a1 has torsion ℤ/5: (5,5), (5,-6), (16,60), (16,-61)
        let e = curve("ec:0,-1,1,-10,-20");
        assert_eq!(e.torsion_elements().len(), 5);
        assert!(e.torsion_elements().contains(&pt(&e, "(5,5)")));
        // y² = x³ + 1 has torsion ℤ/6
        let e = curve("ec:0,0,0,0,1");
        assert_eq!(e.torsion_elements().len(), 6);
    }

    #[test]
    fn cubic_roots() {
        let r = |a: i64, c: i64| {
            integer_roots_depressed_cubic(&BigInt::from(a), &BigInt::from(c))
                .into_iter()
                .map(|x| x.to_i64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(r(-1, 0), vec![-1, 0, 1]);
        assert_eq!(r(0, -8), vec![2]);
        assert_eq!(r(-7, 6), vec![-3, 1, 2]);
        assert_eq!(r(-3, 2), vec![-2, 1]);
        assert_eq!(r(1, 1), Vec::<i64>::new());
    }

    #[test]
    fn independence_search() {
        let e = curve("ec:0,0,1,-1,0");
        let p = pt(&e, "(0,0)");
        assert_eq!(
            elliptic_independence(&e, std::slice::from_ref(&p), 10, 20),
            Independence::Independent
        );
        let q = e.scalar_mul(&p, &BigInt::from(3));
        assert_eq!(
            elliptic_independence(&e, &[p.clone(), q], 10, 20),
            Independence::Relation(vec![BigInt::from(3), BigInt::from(-1)])
        );
        let e = curve("ec:0,0,0,-1,0");
        assert_eq!(
            elliptic_independence(&e, &[pt(&e, "(0,0)")], 10, 20),
            Independence::Relation(vec![BigInt::from(2)])
        );
    }
}
