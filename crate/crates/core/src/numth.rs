//! Exact integer arithmetic: primes, factorization, multiplicative orders,
//! `l`-adic valuations, CRT and baby-step giant-step discrete logarithms.
//!
//! Moduli handled here are scan primes (machine width); products are taken in
//! `u128` so no intermediate overflows. Values that may grow without bound
//! (CRT accumulators, factored integers of arbitrary size) use `num-bigint`.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial division bound used before switching to Pollard rho.
const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Residue of an arbitrary-precision integer modulo `m`, in `[0, m)`.
pub fn big_mod(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits modulus")
}

pub fn biguint_mod(a: &BigUint, m: u64) -> u64 {
    (a % m).to_u64().expect("residue fits modulus")
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exact prime-power decomposition of a positive machine integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the value (0 when `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factor `n` by trial division up to 10⁶, then Pollard rho on the cofactor.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut rest = n;
    let mut primes: Vec<u64> = Vec::new();
    for d in [2u64, 3] {
        while rest.is_multiple_of(d) {
            primes.push(d);
            rest /= d;
        }
    }
    let mut d = 5u64;
    while d <= TRIAL_DIVISION_BOUND && d * d <= rest {
        for cand in [d, d + 2] {
            while rest.is_multiple_of(cand) {
                primes.push(cand);
                rest /= cand;
            }
        }
        d += 6;
    }
    if rest > 1 {
        split_with_rho(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n, factors })
}

fn split_with_rho(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = (1u64..)
        .find_map(|c| pollard_rho_brent(n, c))
        .expect("rho finds a factor of a composite");
    split_with_rho(d, out);
    split_with_rho(n / d, out);
}

// Brent's cycle finding with batched gcds; returns a proper factor or None
// when this polynomial constant fails.
fn pollard_rho_brent(n: u64, c: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let m = 128u64;
    let (mut x, mut ys) = (0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Factor an arbitrary-precision positive integer into `(prime, exponent)`
/// pairs, primes ascending.
///
/// Cofactors beyond 64 bits are tested with a probabilistic Miller-Rabin
/// (25 fixed bases); everything at or below 64 bits is exact.
pub fn factor_big(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    if let Some(small) = n.to_u64() {
        return Ok(factor(small)?
            .factors()
            .iter()
            .map(|&(p, e)| (BigUint::from(p), e))
            .collect());
    }
    let mut rest = n.clone();
    let mut primes: Vec<BigUint> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND {
        if rest.to_u64().is_some() {
            break;
        }
        while (&rest % d).is_zero() {
            primes.push(BigUint::from(d));
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for &(p, e) in factor(small)?.factors() {
                primes.extend(std::iter::repeat_n(BigUint::from(p), e as usize));
            }
        } else if is_probable_prime_big(&m) {
            primes.push(m);
        } else {
            let d = (1u64..)
                .find_map(|c| pollard_rho_big(&m, c))
                .expect("rho finds a factor of a composite");
            stack.push(&m / &d);
            stack.push(d);
        }
    }
    primes.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(factors)
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [
        2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97,
    ] {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_big(n: &BigUint, c: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut x = BigUint::from(2u32);
    let mut y = x.clone();
    loop {
        x = f(&x);
        y = f(&f(&y));
        let diff = if x > y { &x - &y } else { &y - &x };
        let g = diff.gcd(n);
        if g.is_one() {
            continue;
        }
        return (&g != n).then_some(g);
    }
}

/// Closed window `[lo, hi]` of candidate primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct PrimeRange {
    lo: u64,
    hi: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo < 2 {
            return Err(Error::InvalidInput(format!(
                "prime range lower end {lo} < 2"
            )));
        }
        if hi < lo {
            return Err(Error::InvalidInput(format!(
                "inverted prime range {lo}..{hi}"
            )));
        }
        Ok(PrimeRange { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// The primes in the window, ascending.
    pub fn primes(&self) -> Vec<u64> {
        primes_in(*self)
    }
}

impl std::str::FromStr for PrimeRange {
    type Err = Error;

    /// Parses `lo..hi` (inclusive).
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| Error::parse(s, "expected lo..hi"))?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad lower end"))?;
        let hi = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| Error::parse(s, "bad upper end"))?;
        PrimeRange::new(lo, hi)
    }
}

impl std::fmt::Display for PrimeRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Primes `p` with `lo <= p <= hi`, ascending, by a segmented sieve.
pub fn primes_in(range: PrimeRange) -> Vec<u64> {
    const SEGMENT: u64 = 1 << 16;
    let (lo, hi) = (range.lo, range.hi);
    let root = hi.isqrt();
    let base = simple_sieve(root);
    let mut out = Vec::new();
    let mut seg_lo = lo;
    loop {
        let seg_hi = hi.min(seg_lo.saturating_add(SEGMENT - 1));
        let mut composite = vec![false; (seg_hi - seg_lo + 1) as usize];
        for &p in &base {
            let start = (p * p).max(seg_lo.div_ceil(p) * p);
            let mut m = start;
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|&(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    is_p[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| is_p[k]).map(|k| k as u64).collect()
}

/// A finite abelian group, written additively or multiplicatively depending
/// on the backend. Used by order computations and BSGS.
pub trait FiniteGroup {
    type Elem: Clone + Eq + Hash + std::fmt::Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut result = self.identity();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.op(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.op(&base, &base);
            }
        }
        result
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }
}

/// `(ℤ/pℤ)*` with elements as residues in `[1, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulModP {
    p: u64,
}

impl MulModP {
    pub fn new(p: u64) -> Self {
        MulModP { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl FiniteGroup for MulModP {
    type Elem = u64;

    fn identity(&self) -> u64 {
        1 % self.p
    }

    fn op(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn inverse(&self, a: &u64) -> u64 {
        inv_mod(*a, self.p).expect("unit modulo p")
    }

    fn pow(&self, a: &u64, e: u64) -> u64 {
        pow_mod(*a, e, self.p)
    }
}

/// Exact order of `a` in a group whose order has factorization
/// `group_order`, by stripping prime factors from the group order.
pub fn element_order<G: FiniteGroup>(group: &G, a: &G::Elem, group_order: &Factorization) -> u64 {
    let mut ord = group_order.value();
    for &(q, e) in group_order.factors() {
        for _ in 0..e {
            if group.is_identity(&group.pow(a, ord / q)) {
                ord /= q;
            } else {
                break;
            }
        }
    }
    ord
}

/// Least `n >= 1` with `aⁿ ≡ 1 (mod p)`.
pub fn multiplicative_order(a: &BigInt, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r = big_mod(a, p);
    if r == 0 {
        return Err(Error::bad_prime(p, format!("{p} divides {a}")));
    }
    Ok(order_mod_prime(r, p))
}

/// Order of a nonzero residue modulo a prime `p` (no validation).
pub fn order_mod_prime(r: u64, p: u64) -> u64 {
    debug_assert!(!r.is_multiple_of(p));
    let group_order = factor(p - 1).expect("p >= 2");
    element_order(&MulModP::new(p), &(r % p), &group_order)
}

/// Exponent of the prime `l` in `n`.
pub fn valuation(l: u64, mut n: u64) -> u32 {
    debug_assert!(l >= 2 && n >= 1);
    let mut k = 0;
    while n.is_multiple_of(l) {
        n /= l;
        k += 1;
    }
    k
}

/// `l^k ∥ n`: for `k > 0`, `l^k | n` and `l^(k+1) ∤ n`; for `k = 0`, `l ∤ n`.
pub fn exact_valuation(l: u64, k: u32, n: u64) -> bool {
    valuation(l, n) == k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Crt {
    Solved { value: BigInt, modulus: BigInt },
    Inconsistent,
}

/// Combine two congruences `x ≡ r1 (mod m1)`, `x ≡ r2 (mod m2)` with
/// arbitrary (not necessarily coprime) moduli.
pub fn crt_pair(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> Option<(BigInt, BigInt)> {
    let g = m1.gcd(m2);
    let diff = r2 - r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let m1g = m1 / &g;
    let m2g = m2 / &g;
    let lcm = &m1g * m2;
    if m2g.is_one() {
        return Some((r1.mod_floor(&lcm), lcm));
    }
    let inv = m1g.extended_gcd(&m2g).x.mod_floor(&m2g);
    let t = ((&diff / &g) * inv).mod_floor(&m2g);
    Some(((r1 + m1 * t).mod_floor(&lcm), lcm))
}

/// Solve a system of congruences `(residue, modulus)`.
pub fn crt(congruences: &[(BigInt, BigInt)]) -> Result<Crt> {
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for (r, m) in congruences {
        if !m.is_positive() {
            return Err(Error::InvalidInput(format!("CRT modulus {m} < 1")));
        }
        match crt_pair(&value, &modulus, r, m) {
            Some((v, md)) => {
                value = v;
                modulus = md;
            }
            None => return Ok(Crt::Inconsistent),
        }
    }
    Ok(Crt::Solved { value, modulus })
}

/// Least `e ∈ [0, order)` with `base^e = target`, where `base` has exact order
/// `order`; `None` when `target ∉ ⟨base⟩`. O(√order) time and memory.
pub fn bsgs<G: FiniteGroup>(
    group: &G,
    base: &G::Elem,
    target: &G::Elem,
    order: u64,
) -> Option<u64> {
    let m = (order as f64).sqrt().ceil() as u64;
    let m = m.max(1);
    let mut baby: HashMap<G::Elem, u64> = HashMap::with_capacity(m as usize);
    let mut cur = group.identity();
    for j in 0..m {
        baby.entry(cur.clone()).or_insert(j);
        cur = group.op(&cur, base);
    }
    let giant = group.inverse(&group.pow(base, m));
    let mut gamma = target.clone();
    for i in 0..m {
        if let Some(&j) = baby.get(&gamma) {
            let e = i * m + j;
            if e < order {
                return Some(e);
            }
        }
        gamma = group.op(&gamma, &giant);
    }
    None
}

/// Discrete logarithm in `(ℤ/pℤ)*` of `target` to `base`, where `base` has
/// exact order `order_of_base`.
pub fn bsgs_dlog(base: u64, target: u64, p: u64, order_of_base: u64) -> Result<Option<u64>> {
    if base.is_multiple_of(p) || target.is_multiple_of(p) {
        return Err(Error::bad_prime(p, "base and target must be units"));
    }
    let group = MulModP::new(p);
    Ok(bsgs(&group, &(base % p), &(target % p), order_of_base))
}
