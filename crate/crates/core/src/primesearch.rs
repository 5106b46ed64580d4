//! Searching for primes with prescribed `l`-adic valuations of `ord_v`, and
//! replaying the witness constructions built from them.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mwgroup::{good_prime, MordellWeil, Reduction};
use crate::numth::{self, exact_valuation, PrimeRange};
use crate::scan::{collect_ordered, ScanOptions};

/// `l^{kᵢ} ∥ ord_v Pᵢ` when `kᵢ > 0`, and `l ∤ ord_v Pᵢ` when `kᵢ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationPattern {
    l: u64,
    ks: Vec<u32>,
}

impl ValuationPattern {
    pub fn new(l: u64, ks: Vec<u32>) -> Result<Self> {
        if !numth::is_prime(l) {
            return Err(Error::NotPrime(l));
        }
        if ks.is_empty() {
            return Err(Error::InvalidInput(
                "pattern needs at least one exponent".into(),
            ));
        }
        Ok(ValuationPattern { l, ks })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn ks(&self) -> &[u32] {
        &self.ks
    }

    pub fn matches(&self, orders: &[u64]) -> bool {
        orders.len() == self.ks.len()
            && orders
                .iter()
                .zip(&self.ks)
                .all(|(&o, &k)| exact_valuation(self.l, k, o))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternHit {
    pub v: u64,
    pub orders: Vec<u64>,
    pub verified: bool,
}

fn hit_at<G: MordellWeil>(
    group: &G,
    points: &[G::Point],
    pattern: &ValuationPattern,
    v: u64,
) -> Result<Option<PatternHit>> {
    if !good_prime(group, points, v) {
        return Ok(None);
    }
    let red = Reduction::at(group, v)?;
    let orders = points
        .iter()
        .map(|p| red.order_mod(p))
        .collect::<Result<Vec<_>>>()?;
    if !pattern.matches(&orders) {
        return Ok(None);
    }
    let verified = verify_orders(&red, points, &orders)? && pattern.matches(&orders);
    Ok(Some(PatternHit {
        v,
        orders,
        verified,
    }))
}

/// Confirms each claimed order by exponentiation: `oP ≡ 0` and `(o/q)P ≢ 0`
/// for every prime `q | o`.
fn verify_orders<G: MordellWeil>(
    red: &Reduction<'_, G>,
    points: &[G::Point],
    orders: &[u64],
) -> Result<bool> {
    for (p, &o) in points.iter().zip(orders) {
        let r = red.reduce(p)?;
        if !red.is_zero(&red.mul(&r, o)) {
            return Ok(false);
        }
        for q in numth::factor(o)?.primes() {
            if red.is_zero(&red.mul(&r, o / q)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_arity<P>(points: &[P], pattern: &ValuationPattern) -> Result<()> {
    if points.len() != pattern.ks.len() {
        return Err(Error::InvalidInput(format!(
            "{} points but {} pattern exponents",
            points.len(),
            pattern.ks.len()
        )));
    }
    Ok(())
}

/// Up to `max_hits` good primes of `scan` realizing `pattern`, ascending.
pub fn find_pattern_primes<G: MordellWeil>(
    group: &G,
    points: &[G::Point],
    pattern: &ValuationPattern,
    scan: PrimeRange,
    max_hits: usize,
    opts: &ScanOptions,
) -> Result<Vec<PatternHit>> {
    check_arity(points, pattern)?;
    collect_ordered(&scan.primes(), opts, max_hits, |v| {
        hit_at(group, points, pattern, v)
    })
}

/// A prime `v` and `n = ord_v P` with `nP ≡ 0` but `nQᵢ ≢ 0` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step1Witness {
    pub v: u64,
    pub n: u64,
    pub order_p: u64,
    pub orders_q: Vec<u64>,
}

/// Looks for a prime with `l ∤ ord_v P` and `l | ord_v Qᵢ` for all `i`, sets
/// `n = ord_v P`, and keeps the first such prime at which the refutation
/// survives literal recomputation.
pub fn replay_step1<G: MordellWeil>(
    group: &G,
    p: &G::Point,
    qs: &[G::Point],
    l: u64,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<Option<Step1Witness>> {
    if !numth::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    let points: Vec<G::Point> = std::iter::once(p.clone())
        .chain(qs.iter().cloned())
        .collect();
    let found = collect_ordered(&scan.primes(), opts, 1, |v| {
        if !good_prime(group, &points, v) {
            return Ok(None);
        }
        let red = Reduction::at(group, v)?;
        let order_p = red.order_mod(p)?;
        let orders_q = qs
            .iter()
            .map(|q| red.order_mod(q))
            .collect::<Result<Vec<_>>>()?;
        if order_p % l == 0 || orders_q.iter().any(|o| o % l != 0) {
            return Ok(None);
        }
        let n = order_p;
        let refutes = red.is_zero(&red.mul(&red.reduce(p)?, n))
            && qs
                .iter()
                .map(|q| red.reduce(q).map(|r| !red.is_zero(&red.mul(&r, n))))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .all(|b| b);
        Ok(refutes.then_some(Step1Witness {
            v,
            n,
            order_p,
            orders_q,
        }))
    })?;
    Ok(found.into_iter().next())
}

/// `lcm(oᵢ / dᵢ)`; each `dᵢ` must divide `oᵢ`.
pub fn replay_step2_lcm(orders: &[u64], divisors: &[u64]) -> Result<u64> {
    if orders.len() != divisors.len() || orders.is_empty() {
        return Err(Error::InvalidInput(
            "orders and divisors must be nonempty and of equal length".into(),
        ));
    }
    let mut n = 1u64;
    for (&o, &d) in orders.iter().zip(divisors) {
        if o == 0 || d == 0 || o % d != 0 {
            return Err(Error::InvalidInput(format!(
                "{d} does not divide order {o}"
            )));
        }
        n = n.lcm(&(o / d));
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub hits: u64,
    pub scanned_good_primes: u64,
    pub ratio: f64,
    /// No hit at all: nothing can be read off this window.
    pub inconclusive: bool,
}

pub fn pattern_density<G: MordellWeil>(
    group: &G,
    points: &[G::Point],
    pattern: &ValuationPattern,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<DensityReport> {
    check_arity(points, pattern)?;
    let flags = collect_ordered(&scan.primes(), opts, usize::MAX, |v| {
        if !good_prime(group, points, v) {
            return Ok(None);
        }
        Ok(Some(hit_at(group, points, pattern, v)?.is_some()))
    })?;
    let scanned_good_primes = flags.len() as u64;
    let hits = flags.iter().filter(|&&h| h).count() as u64;
    let ratio = if scanned_good_primes == 0 {
        0.0
    } else {
        hits as f64 / scanned_good_primes as f64
    };
    Ok(DensityReport {
        hits,
        scanned_good_primes,
        ratio,
        inconclusive: hits == 0,
    })
}
