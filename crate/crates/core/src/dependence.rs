//! Detecting linear dependence by reduction maps, and exact certificates for
//! the conclusions: subgroup membership `αP ∈ Λ` and exponent recovery
//! `Q = dP`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::integer_kernel;
use crate::mwgroup::{
    exponent_system, good_prime, CurvePoint, EcPoint, MordellWeil, Multiplicative, NonZeroRational,
    Reduction, WeierstrassCurve,
};
use crate::numth::{bsgs, crt_pair, PrimeRange};
use crate::report::{decimal, ConditionReport, RelationCertificate};
use crate::scan::ScanOptions;
use crate::support::{scan_condition, Condition};

/// Default coefficient bound for the elliptic certificate search.
pub const DEFAULT_SEARCH_BOUND: u32 = 20;

/// Number of good primes used to filter elliptic search candidates before
/// exact arithmetic.
const FILTER_PRIMES: usize = 6;

/// `P ∈ ⟨gens⟩ (mod v)`.
pub fn member_mod<G: MordellWeil>(
    group: &G,
    p: &G::Point,
    gens: &[G::Point],
    v: u64,
) -> Result<bool> {
    let red = Reduction::at(group, v)?;
    if let Some(bad) = std::iter::once(p)
        .chain(gens)
        .find(|x| !group.point_reduces(x, v))
    {
        return Err(Error::bad_prime(v, format!("{bad} does not reduce")));
    }
    red.member(p, gens)
}

/// Lagrange check: `|⟨gens mod v⟩|` divides `|B(F_v)|`.
pub fn subgroup_order_divides<G: MordellWeil>(
    group: &G,
    gens: &[G::Point],
    v: u64,
) -> Result<bool> {
    let red = Reduction::at(group, v)?;
    let reduced = gens
        .iter()
        .map(|g| red.reduce(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(red.group_order() % red.subgroup(&reduced).len() as u64 == 0)
}

/// Result of trying to certify `αPᵢ ∈ Λ` for some `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateSearch {
    Found(RelationCertificate),
    /// Proven impossible for every `i` and every `α ≠ 0`.
    Refuted,
    /// Nothing found within the search bound; no conclusion.
    Exhausted,
}

/// Backends able to attempt the conclusion certificate of the detector.
pub trait ConclusionOracle: MordellWeil {
    fn certify_membership(
        &self,
        ps: &[Self::Point],
        gens: &[Self::Point],
        bound: u32,
    ) -> Result<CertificateSearch>;
}

impl ConclusionOracle for Multiplicative {
    fn certify_membership(
        &self,
        ps: &[NonZeroRational],
        gens: &[NonZeroRational],
        _bound: u32,
    ) -> Result<CertificateSearch> {
        for (i, p) in ps.iter().enumerate() {
            if let Some(cert) = membership_certificate(p, gens, i) {
                return Ok(CertificateSearch::Found(cert));
            }
        }
        Ok(CertificateSearch::Refuted)
    }
}

impl ConclusionOracle for WeierstrassCurve {
    fn certify_membership(
        &self,
        ps: &[CurvePoint],
        gens: &[CurvePoint],
        bound: u32,
    ) -> Result<CertificateSearch> {
        for i in 0..ps.len() {
            if let Some(cert) = elliptic_membership_search(self, ps, i, gens, bound)? {
                return Ok(CertificateSearch::Found(cert));
            }
        }
        Ok(CertificateSearch::Exhausted)
    }
}

/// Outcome of the exact multiplicative membership oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Certified(RelationCertificate),
    Refuted,
}

/// Least `α > 0` and exponents `λ` with `P^α = ∏ Lⱼ^λⱼ ≠ 1`, or a refutation.
///
/// The α-coordinates of the integer kernel of the exponent system form an
/// ideal `gℤ`; `g` is reached by an extended-gcd combination of the basis.
/// A torsion `P` whose only multiples in `Λ` are trivial is refuted.
pub fn exact_membership_multiplicative(
    p: &NonZeroRational,
    gens: &[NonZeroRational],
) -> Membership {
    match membership_certificate(p, gens, 0) {
        Some(c) => Membership::Certified(c),
        None => Membership::Refuted,
    }
}

fn membership_certificate(
    p: &NonZeroRational,
    gens: &[NonZeroRational],
    index: usize,
) -> Option<RelationCertificate> {
    let points: Vec<&NonZeroRational> = std::iter::once(p).chain(gens).collect();
    let cols = points.len() + 1;
    let kernel = integer_kernel(&exponent_system(&points), cols);
    let mut g = BigInt::zero();
    let mut combo = vec![BigInt::zero(); cols];
    for b in &kernel {
        let e = g.extended_gcd(&b[0]);
        combo = combo
            .iter()
            .zip(b)
            .map(|(c, x)| &e.x * c + &e.y * x)
            .collect();
        g = e.gcd;
    }
    if g.is_zero() {
        return None;
    }
    if combo[0].is_negative() {
        combo.iter_mut().for_each(|c| *c = -&*c);
    }
    let alpha = combo[0].clone();
    if p.pow(&alpha).is_one() {
        return None;
    }
    let lambdas: Vec<BigInt> = combo[1..=gens.len()].iter().map(|c| -c).collect();
    Some(RelationCertificate::Membership {
        index,
        alpha,
        lambdas,
        residual_torsion: None,
    })
}

/// Bounded search for `αPᵢ = Σ λⱼLⱼ + T` with `T` torsion, `1 ≤ α ≤ B`,
/// `|λⱼ| ≤ B`, not all `λⱼ` zero. Candidates must land in the reduced
/// torsion subgroup at several good primes before exact arithmetic is tried.
fn elliptic_membership_search(
    curve: &WeierstrassCurve,
    ps: &[CurvePoint],
    index: usize,
    gens: &[CurvePoint],
    bound: u32,
) -> Result<Option<RelationCertificate>> {
    let p = &ps[index];
    if gens.is_empty() || bound == 0 {
        return Ok(None);
    }
    let torsion = curve.torsion_elements();
    let b = bound as i64;
    let all: Vec<CurvePoint> = std::iter::once(p.clone())
        .chain(gens.iter().cloned())
        .collect();
    let filters: Vec<Filter> = (3u64..)
        .filter(|&v| good_prime(curve, &all, v))
        .take(FILTER_PRIMES)
        .map(|v| Filter::new(curve, v, p, gens, &torsion, b))
        .collect::<Result<_>>()?;
    let width = (2 * b + 1) as usize;
    let total = width.pow(gens.len() as u32);
    for alpha in 1..=b {
        for idx in 0..total {
            let lambdas: Vec<i64> = (0..gens.len())
                .map(|j| ((idx / width.pow(j as u32)) % width) as i64 - b)
                .collect();
            if lambdas.iter().all(|&l| l == 0) {
                continue;
            }
            if !filters.iter().all(|f| f.passes(alpha, &lambdas)) {
                continue;
            }
            let lhs = curve.scalar_mul(p, &BigInt::from(alpha));
            let rhs = gens
                .iter()
                .zip(&lambdas)
                .fold(curve.identity(), |acc, (g, &l)| {
                    curve.add(&acc, &curve.scalar_mul(g, &BigInt::from(l)))
                });
            let t = curve.sub(&lhs, &rhs);
            if torsion.contains(&t) {
                return Ok(Some(RelationCertificate::Membership {
                    index,
                    alpha: BigInt::from(alpha),
                    lambdas: lambdas.into_iter().map(BigInt::from).collect(),
                    residual_torsion: (t != EcPoint::Infinity).then(|| t.to_string()),
                }));
            }
        }
    }
    Ok(None)
}

/// Multiples of the reduced points at one prime, for cheap rejection.
struct Filter {
    red: crate::mwgroup::ReducedCurve,
    alpha_p: Vec<EcPoint<u64>>,
    lambda_l: Vec<Vec<EcPoint<u64>>>,
    torsion: HashSet<EcPoint<u64>>,
    b: i64,
}

impl Filter {
    fn new(
        curve: &WeierstrassCurve,
        v: u64,
        p: &CurvePoint,
        gens: &[CurvePoint],
        torsion: &[CurvePoint],
        b: i64,
    ) -> Result<Self> {
        use crate::numth::FiniteGroup;
        let red = curve.reduction(v)?;
        let signed = |r: &EcPoint<u64>, n: i64| {
            let m = red.pow(r, n.unsigned_abs());
            if n < 0 {
                red.inverse(&m)
            } else {
                m
            }
        };
        let rp = red.reduce_point(p);
        let alpha_p = (0..=b).map(|a| signed(&rp, a)).collect();
        let lambda_l = gens
            .iter()
            .map(|g| {
                let rg = red.reduce_point(g);
                (-b..=b).map(|l| signed(&rg, -l)).collect()
            })
            .collect();
        let torsion = torsion.iter().map(|t| red.reduce_point(t)).collect();
        Ok(Filter {
            red,
            alpha_p,
            lambda_l,
            torsion,
            b,
        })
    }

    /// `αP − Σ λⱼLⱼ` reduces into the reduced torsion.
    fn passes(&self, alpha: i64, lambdas: &[i64]) -> bool {
        use crate::numth::FiniteGroup;
        let sum = lambdas
            .iter()
            .zip(&self.lambda_l)
            .fold(self.alpha_p[alpha as usize].clone(), |acc, (&l, table)| {
                self.red.op(&acc, &table[(l + self.b) as usize])
            });
        self.torsion.contains(&sum)
    }
}

/// Re-verifies a membership certificate by exact arithmetic in `B(ℚ)`.
pub fn verify_membership_certificate<G: MordellWeil>(
    group: &G,
    ps: &[G::Point],
    gens: &[G::Point],
    cert: &RelationCertificate,
) -> Result<bool> {
    let RelationCertificate::Membership {
        index,
        alpha,
        lambdas,
        residual_torsion,
    } = cert
    else {
        return Ok(false);
    };
    let Some(p) = ps.get(*index) else {
        return Ok(false);
    };
    if alpha.is_zero() || lambdas.len() != gens.len() {
        return Ok(false);
    }
    let lhs = group.scalar_mul(p, alpha);
    if group.is_identity(&lhs) {
        return Ok(false);
    }
    let mut rhs = gens
        .iter()
        .zip(lambdas)
        .fold(group.identity(), |acc, (g, l)| {
            group.add(&acc, &group.scalar_mul(g, l))
        });
    if let Some(t) = residual_torsion {
        let t = group.parse_point(t)?;
        if group.torsion_order(&t).is_none() {
            return Ok(false);
        }
        rhs = group.add(&rhs, &t);
    }
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    Refuted,
    Inconclusive,
    /// The hypothesis failed on the scan, so no conclusion was sought.
    NotAttempted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionReport {
    pub report: ConditionReport,
    pub certificate_status: CertificateStatus,
    pub certificate: Option<RelationCertificate>,
}

impl DetectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scans for a prime at which no `Pᵢ` lies in `Λ mod v`; if none exists in
/// the window, tries to certify `αPᵢ ∈ Λ`.
pub fn detect_dependence<G: ConclusionOracle>(
    group: &G,
    ps: &[G::Point],
    gens: &[G::Point],
    scan: PrimeRange,
    opts: &ScanOptions,
    search_bound: u32,
) -> Result<DetectionReport> {
    if ps.is_empty() {
        return Err(Error::InvalidInput("need at least one point P".into()));
    }
    let cond = Condition::Detect {
        ps: ps.to_vec(),
        lambda: gens.to_vec(),
    };
    let report = scan_condition(group, &cond, scan, opts)?;
    if !report.holds() {
        return Ok(DetectionReport {
            report,
            certificate_status: CertificateStatus::NotAttempted,
            certificate: None,
        });
    }
    let (certificate_status, certificate) =
        match group.certify_membership(ps, gens, search_bound)? {
            CertificateSearch::Found(c) => (CertificateStatus::Certified, Some(c)),
            CertificateSearch::Refuted => (CertificateStatus::Refuted, None),
            CertificateSearch::Exhausted => (CertificateStatus::Inconclusive, None),
        };
    Ok(DetectionReport {
        report,
        certificate_status,
        certificate,
    })
}

/// Outcome of exponent recovery for `Q = dP`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Recovery {
    /// `Q = dP`, confirmed exactly.
    Recovered {
        #[serde(serialize_with = "decimal")]
        d: BigInt,
        primes_used: usize,
        #[serde(serialize_with = "decimal")]
        modulus: BigInt,
    },
    /// `Q mod v ∉ ⟨P mod v⟩`, so `Q ∉ ⟨P⟩`.
    NotInSubgroup { v: u64 },
    /// The discrete logs at `v1` and `v2` admit no common lift.
    Inconsistent { v1: u64, v2: u64 },
    /// The modulus passed the bound but the lifted candidate failed the exact check.
    Unverified {
        #[serde(serialize_with = "decimal")]
        candidate: BigInt,
        #[serde(serialize_with = "decimal")]
        modulus: BigInt,
    },
    /// The scan ended before the modulus passed the bound.
    Exhausted {
        #[serde(serialize_with = "decimal")]
        modulus: BigInt,
    },
}

impl Recovery {
    pub fn d(&self) -> Option<&BigInt> {
        match self {
            Recovery::Recovered { d, .. } => Some(d),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recovery serializes")
    }
}

/// How many times the height bound may be doubled after a failed lift.
const BOUND_RETRIES: u32 = 4;

/// Recovers `d` with `Q = dP` from discrete logs at the good primes of
/// `scan`, combined by CRT in ascending order.
///
/// Once the combined modulus exceeds `2H`, the symmetric lift is checked
/// exactly; on failure `H` is doubled a few times before giving up.
pub fn recover_exponent<G: MordellWeil>(
    group: &G,
    p: &G::Point,
    q: &G::Point,
    scan: PrimeRange,
) -> Result<Recovery> {
    if group.torsion_order(p).is_some() {
        return Err(Error::InvalidInput(format!("{p} is a torsion point")));
    }
    let pts = [p.clone(), q.clone()];
    let mut bound = group.exponent_bound(p, q);
    let mut retries = 0;
    let mut history: Vec<(u64, BigInt, BigInt)> = Vec::new();
    let (mut value, mut modulus) = (BigInt::zero(), BigInt::one());
    let mut used = 0usize;
    for v in scan.primes() {
        if !good_prime(group, &pts, v) {
            continue;
        }
        let red = Reduction::at(group, v)?;
        let (rp, rq) = (red.reduce(p)?, red.reduce(q)?);
        let order = red.order_of(&rp);
        let Some(e) = bsgs(red.local(), &rp, &rq, order) else {
            return Ok(Recovery::NotInSubgroup { v });
        };
        let (r, m) = (BigInt::from(e), BigInt::from(order));
        match crt_pair(&value, &modulus, &r, &m) {
            Some((nv, nm)) => {
                let grew = nm > modulus;
                value = nv;
                modulus = nm;
                used += 1;
                history.push((v, r, m));
                if !grew || modulus <= &bound * 2 {
                    continue;
                }
                let d = symmetric_lift(&value, &modulus);
                if group.scalar_mul(p, &d) == *q {
                    return Ok(Recovery::Recovered {
                        d,
                        primes_used: used,
                        modulus,
                    });
                }
                if retries == BOUND_RETRIES {
                    return Ok(Recovery::Unverified {
                        candidate: d,
                        modulus,
                    });
                }
                retries += 1;
                bound *= 2;
            }
            None => {
                let v1 = history
                    .iter()
                    .find(|(_, r1, m1)| crt_pair(r1, m1, &r, &m).is_none())
                    .map(|(v1, _, _)| *v1)
                    .expect("pairwise-consistent congruences are jointly solvable");
                return Ok(Recovery::Inconsistent { v1, v2: v });
            }
        }
    }
    if modulus > &bound * 2 || !modulus.is_one() {
        let d = symmetric_lift(&value, &modulus);
        if !d.is_zero() && d.abs() <= bound && group.scalar_mul(p, &d) == *q {
            return Ok(Recovery::Recovered {
                d,
                primes_used: used,
                modulus,
            });
        }
    }
    Ok(Recovery::Exhausted { modulus })
}

fn symmetric_lift(value: &BigInt, modulus: &BigInt) -> BigInt {
    let r = value.mod_floor(modulus);
    if &r * 2 > *modulus {
        r - modulus
    } else {
        r
    }
}

/// Re-verifies `Q = dP` exactly.
pub fn verify_exponent_certificate<G: MordellWeil>(
    group: &G,
    p: &G::Point,
    q: &G::Point,
    cert: &RelationCertificate,
) -> bool {
    match cert {
        RelationCertificate::Exponent { d } => group.scalar_mul(p, d) == *q,
        _ => false,
    }
}
