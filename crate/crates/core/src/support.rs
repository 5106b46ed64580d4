//! Supports of `xⁿ − 1` and the support-style local conditions.
//!
//! Every condition quantifies over all `n`. At a fixed prime `v` each one is
//! equivalent to a divisibility statement about the orders `ord_v` of the
//! points involved, because `nP ≡ 0 (mod v)` iff `ord_v P | n`. The per-prime
//! tests below decide that statement exactly; the scanners apply it to every
//! good prime of a window and report the first failure with the least
//! violating `n`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::mwgroup::{good_prime, MordellWeil, Multiplicative, NonZeroRational, Reduction};
use crate::numth::{self, biguint_mod, factor_big, PrimeRange};
use crate::report::{ConditionId, ConditionReport, RelationCertificate, Witness};
use crate::scan::{scan_primes, ScanOptions};

/// Largest `n` for which witness re-verification also checks minimality by
/// walking every smaller exponent.
const MINIMALITY_CHECK_LIMIT: u64 = 1 << 20;

/// The set of primes dividing `m`.
pub fn support_of(m: &BigUint) -> Result<BTreeSet<BigUint>> {
    Ok(factor_big(m)?.into_iter().map(|(p, _)| p).collect())
}

/// `{p ≤ B : p | m}` for some target `m` that is never formed explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    pub modulus_bound: u64,
    pub primes: BTreeSet<u64>,
}

/// `{p ≤ bound : p | xᵢⁿ − 1 for some i}`, via `p | xⁿ − 1 ⟺ p ∤ x ∧ ord_p x | n`.
pub fn support_union_at_n(xs: &[BigUint], n: u64, bound: u64) -> Result<SupportSet> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if let Some(x) = xs.iter().find(|x| *x < &BigUint::from(2u32)) {
        return Err(Error::InvalidInput(format!(
            "entries must be >= 2, got {x}"
        )));
    }
    let mut primes = BTreeSet::new();
    if bound >= 2 {
        for p in PrimeRange::new(2, bound)?.primes() {
            let hit = xs.iter().any(|x| {
                let r = biguint_mod(x, p);
                r != 0 && n.is_multiple_of(numth::order_mod_prime(r, p))
            });
            if hit {
                primes.insert(p);
            }
        }
    }
    Ok(SupportSet {
        modulus_bound: bound,
        primes,
    })
}

fn naturals(xs: &[BigUint]) -> Result<Vec<NonZeroRational>> {
    xs.iter()
        .map(|x| {
            if x < &BigUint::from(2u32) {
                Err(Error::InvalidInput(format!(
                    "entries must be >= 2, got {x}"
                )))
            } else {
                NonZeroRational::from_natural(x)
            }
        })
        .collect()
}

/// Whether `{n : ∃i ord_p xᵢ | n} = {n : ∃j ord_p yⱼ | n}`.
pub fn erdos_exact_at_prime(xs: &[BigUint], ys: &[BigUint], p: u64) -> Result<bool> {
    let group = Multiplicative::rationals();
    let (xs, ys) = (naturals(xs)?, naturals(ys)?);
    if !numth::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    divisibility_cover_at_prime(&group, &xs, &ys, p, CoverMode::TwoSided)
}

/// `yⁿ ≡ 1` whenever `xⁿ ≡ 1 (mod p)`, i.e. `ord_p y | ord_p x`.
pub fn corrales_schoof_at_prime<G: MordellWeil>(
    group: &G,
    x: &G::Point,
    y: &G::Point,
    p: u64,
) -> Result<bool> {
    Ok(cs_violation(&checked_reduction(group, &[x, y], p)?, x, y)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    /// `nP ≡ 0 ⇒ ∃i nQᵢ ≡ 0`; `Ps` must hold exactly one point.
    OneSided,
    /// `∃i nPᵢ ≡ 0 ⇔ ∃j nQⱼ ≡ 0`.
    TwoSided,
}

pub fn divisibility_cover_at_prime<G: MordellWeil>(
    group: &G,
    ps: &[G::Point],
    qs: &[G::Point],
    v: u64,
    mode: CoverMode,
) -> Result<bool> {
    let all: Vec<&G::Point> = ps.iter().chain(qs).collect();
    let red = checked_reduction(group, &all, v)?;
    let violation = match mode {
        CoverMode::OneSided => {
            let [p] = ps else {
                return Err(Error::InvalidInput(
                    "one-sided cover takes exactly one P".into(),
                ));
            };
            thm2_violation(&red, p, qs)?
        }
        CoverMode::TwoSided => cover_violation(&red, ps, qs)?,
    };
    Ok(violation.is_none())
}

fn checked_reduction<'g, G: MordellWeil>(
    group: &'g G,
    points: &[&G::Point],
    v: u64,
) -> Result<Reduction<'g, G>> {
    let red = Reduction::at(group, v)?;
    if let Some(p) = points.iter().find(|p| !group.point_reduces(p, v)) {
        return Err(Error::bad_prime(v, format!("{p} does not reduce")));
    }
    Ok(red)
}

fn orders<G: MordellWeil>(red: &Reduction<'_, G>, pts: &[G::Point]) -> Result<Vec<u64>> {
    pts.iter().map(|p| red.order_mod(p)).collect()
}

type Violation = Option<(u64, String)>;

fn cs_violation<G: MordellWeil>(
    red: &Reduction<'_, G>,
    x: &G::Point,
    y: &G::Point,
) -> Result<Violation> {
    let (ox, oy) = (red.order_mod(x)?, red.order_mod(y)?);
    Ok((ox % oy != 0).then(|| {
        (
            ox,
            format!(
                "ord_v x = {ox}, ord_v y = {oy}: x^{ox} = 1 but y^{ox} != 1 mod {}",
                red.v()
            ),
        )
    }))
}

fn thm2_violation<G: MordellWeil>(
    red: &Reduction<'_, G>,
    p: &G::Point,
    qs: &[G::Point],
) -> Result<Violation> {
    let op = red.order_mod(p)?;
    let oq = orders(red, qs)?;
    Ok((!oq.iter().any(|&o| op % o == 0)).then(|| {
        (
            op,
            format!("ord_v P = {op}, ord_v Q = {oq:?}: {op}P = 0 but {op}Q_i != 0 for all i"),
        )
    }))
}

/// Least `n` in the symmetric difference of the two killed-exponent sets.
fn cover_violation<G: MordellWeil>(
    red: &Reduction<'_, G>,
    ps: &[G::Point],
    qs: &[G::Point],
) -> Result<Violation> {
    let (a, b) = (orders(red, ps)?, orders(red, qs)?);
    let left = a
        .iter()
        .copied()
        .filter(|&x| !b.iter().any(|&y| x % y == 0))
        .min();
    let right = b
        .iter()
        .copied()
        .filter(|&y| !a.iter().any(|&x| y % x == 0))
        .min();
    let detail = |n: u64, side: &str| {
        format!("ord_v P = {a:?}, ord_v Q = {b:?}: n = {n} kills some {side} point only")
    };
    Ok(match (left, right) {
        (None, None) => None,
        (Some(n), None) => Some((n, detail(n, "P"))),
        (None, Some(n)) => Some((n, detail(n, "Q"))),
        (Some(l), Some(r)) if l <= r => Some((l, detail(l, "P"))),
        (_, Some(r)) => Some((r, detail(r, "Q"))),
    })
}

fn detect_violation<G: MordellWeil>(
    red: &Reduction<'_, G>,
    ps: &[G::Point],
    lambda: &[G::Point],
) -> Result<Violation> {
    for p in ps {
        if red.member(p, lambda)? {
            return Ok(None);
        }
    }
    let n = orders(red, lambda)?
        .into_iter()
        .fold(1u64, |acc, o| acc.lcm(&o));
    Ok(Some((
        n,
        format!(
            "no P_i lies in Λ mod {}; Λ mod v has exponent {n}, ord_v P = {:?}",
            red.v(),
            orders(red, ps)?
        ),
    )))
}

/// A condition together with its points.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition<P> {
    ErdosUnion { xs: Vec<P>, ys: Vec<P> },
    CorralesSchoof { x: P, y: P },
    Thm2 { p: P, qs: Vec<P> },
    Cor22 { ps: Vec<P>, qs: Vec<P> },
    Detect { ps: Vec<P>, lambda: Vec<P> },
}

impl<P: Clone> Condition<P> {
    pub fn id(&self) -> ConditionId {
        match self {
            Condition::ErdosUnion { .. } => ConditionId::ErdosUnion,
            Condition::CorralesSchoof { .. } => ConditionId::CorralesSchoof,
            Condition::Thm2 { .. } => ConditionId::Thm2,
            Condition::Cor22 { .. } => ConditionId::Cor22,
            Condition::Detect { .. } => ConditionId::Detect,
        }
    }

    pub fn points(&self) -> Vec<P> {
        match self {
            Condition::ErdosUnion { xs, ys } => xs.iter().chain(ys).cloned().collect(),
            Condition::CorralesSchoof { x, y } => vec![x.clone(), y.clone()],
            Condition::Thm2 { p, qs } => std::iter::once(p).chain(qs).cloned().collect(),
            Condition::Cor22 { ps, qs } => ps.iter().chain(qs).cloned().collect(),
            Condition::Detect { ps, lambda } => ps.iter().chain(lambda).cloned().collect(),
        }
    }
}

/// Evaluates `cond` exactly at one good prime; `Some((n, detail))` on failure.
pub fn violation_at<G: MordellWeil>(
    group: &G,
    cond: &Condition<G::Point>,
    v: u64,
) -> Result<Option<(u64, String)>> {
    let pts = cond.points();
    let refs: Vec<&G::Point> = pts.iter().collect();
    let red = checked_reduction(group, &refs, v)?;
    match cond {
        Condition::ErdosUnion { xs, ys } => cover_violation(&red, xs, ys),
        Condition::Cor22 { ps, qs } => cover_violation(&red, ps, qs),
        Condition::CorralesSchoof { x, y } => cs_violation(&red, x, y),
        Condition::Thm2 { p, qs } => thm2_violation(&red, p, qs),
        Condition::Detect { ps, lambda } => detect_violation(&red, ps, lambda),
    }
}

/// Scans the good primes of `scan`; bad primes are listed, not tested.
pub fn scan_condition<G: MordellWeil>(
    group: &G,
    cond: &Condition<G::Point>,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<ConditionReport> {
    let pts = cond.points();
    scan_primes(
        cond.id(),
        scan,
        opts,
        |v| good_prime(group, &pts, v),
        |v| violation_at(group, cond, v),
    )
}

/// The Erdős support-union condition for natural numbers `≥ 2`.
pub fn scan_erdos(
    xs: &[BigUint],
    ys: &[BigUint],
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<ConditionReport> {
    let cond = Condition::ErdosUnion {
        xs: naturals(xs)?,
        ys: naturals(ys)?,
    };
    scan_condition(&Multiplicative::rationals(), &cond, scan, opts)
}

/// Re-verifies a witness by recomputation at `(v, n)` that avoids the order
/// shortcut used by the scanner: literal multiples for the support
/// conditions, explicit subgroup enumeration for detection.
pub fn verify_witness<G: MordellWeil>(
    group: &G,
    cond: &Condition<G::Point>,
    witness: &Witness,
) -> Result<bool> {
    let pts = cond.points();
    if !good_prime(group, &pts, witness.v) {
        return Ok(false);
    }
    let red = Reduction::at(group, witness.v)?;
    let kills =
        |n: u64, p: &G::Point| -> Result<bool> { Ok(red.is_zero(&red.mul(&red.reduce(p)?, n))) };
    let any_kills = |n: u64, ps: &[G::Point]| -> Result<bool> {
        for p in ps {
            if kills(n, p)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let fails_at = |n: u64| -> Result<bool> {
        Ok(match cond {
            Condition::ErdosUnion { xs: ps, ys: qs } | Condition::Cor22 { ps, qs } => {
                any_kills(n, ps)? != any_kills(n, qs)?
            }
            Condition::CorralesSchoof { x, y } => kills(n, x)? && !kills(n, y)?,
            Condition::Thm2 { p, qs } => kills(n, p)? && !any_kills(n, qs)?,
            Condition::Detect { .. } => unreachable!(),
        })
    };
    let n = witness.n;
    if n == 0 {
        return Ok(false);
    }
    match cond {
        Condition::Detect { ps, lambda } => {
            let gens = lambda
                .iter()
                .map(|l| red.reduce(l))
                .collect::<Result<Vec<_>>>()?;
            let sub = red.subgroup(&gens);
            for p in ps {
                if sub.contains(&red.reduce(p)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => {
            if !fails_at(n)? {
                return Ok(false);
            }
            if n <= MINIMALITY_CHECK_LIMIT {
                for m in 1..n {
                    if fails_at(m)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Erdős-condition witness check for natural-number inputs.
pub fn verify_erdos_witness(xs: &[BigUint], ys: &[BigUint], witness: &Witness) -> Result<bool> {
    let cond = Condition::ErdosUnion {
        xs: naturals(xs)?,
        ys: naturals(ys)?,
    };
    verify_witness(&Multiplicative::rationals(), &cond, witness)
}

/// Finds `σ` and `δᵢ ∈ {±1}` with `xᵢ = y_{σ(i)}^{δᵢ}`, or `None`.
pub fn verify_conclusion_match(
    xs: &[NonZeroRational],
    ys: &[NonZeroRational],
) -> Result<Option<RelationCertificate>> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput(format!(
            "lists differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    fn assign(
        i: usize,
        xs: &[NonZeroRational],
        ys: &[NonZeroRational],
        used: &mut [bool],
        perm: &mut Vec<usize>,
        signs: &mut Vec<i8>,
    ) -> bool {
        if i == xs.len() {
            return true;
        }
        for (j, y) in ys.iter().enumerate() {
            if used[j] {
                continue;
            }
            for (sign, candidate) in [(1i8, y.clone()), (-1i8, y.inv())] {
                if xs[i] != candidate {
                    continue;
                }
                used[j] = true;
                perm.push(j);
                signs.push(sign);
                if assign(i + 1, xs, ys, used, perm, signs) {
                    return true;
                }
                used[j] = false;
                perm.pop();
                signs.pop();
            }
        }
        false
    }
    let mut used = vec![false; ys.len()];
    let (mut permutation, mut signs) = (Vec::new(), Vec::new());
    Ok(assign(0, xs, ys, &mut used, &mut permutation, &mut signs)
        .then_some(RelationCertificate::Match { permutation, signs }))
}

/// Checks a match certificate against the inputs by exact comparison.
pub fn check_match_certificate(
    xs: &[NonZeroRational],
    ys: &[NonZeroRational],
    cert: &RelationCertificate,
) -> bool {
    let RelationCertificate::Match { permutation, signs } = cert else {
        return false;
    };
    if permutation.len() != xs.len() || signs.len() != xs.len() || ys.len() != xs.len() {
        return false;
    }
    let mut seen = vec![false; ys.len()];
    xs.iter().zip(permutation).zip(signs).all(|((x, &j), &s)| {
        if j >= ys.len() || std::mem::replace(&mut seen[j], true) {
            return false;
        }
        let y = if s == 1 { ys[j].clone() } else { ys[j].inv() };
        (s == 1 || s == -1) && *x == y
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::One;

    fn nat(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn q(s: &str) -> NonZeroRational {
        s.parse().unwrap()
    }

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn support_of_examples() {
        assert!(support_of(&BigUint::one()).unwrap().is_empty());
        let s: Vec<u64> = support_of(&BigUint::from(15u32))
            .unwrap()
            .iter()
            .map(|p| p.try_into().unwrap())
            .collect();
        assert_eq!(s, vec![3, 5]);
        let s: Vec<u64> = support_of(&BigUint::from(63u32))
            .unwrap()
            .iter()
            .map(|p| p.try_into().unwrap())
            .collect();
        assert_eq!(s, vec![3, 7]);
        assert!(support_of(&BigUint::from(0u32)).is_err());
    }

    #[test]
    fn support_union_examples() {
        assert_eq!(
            support_union_at_n(&nat(&[2]), 4, 100).unwrap().primes,
            set(&[3, 5])
        );
        assert!(support_union_at_n(&nat(&[2]), 1, 100)
            .unwrap()
            .primes
            .is_empty());
        assert_eq!(
            support_union_at_n(&nat(&[2, 3]), 2, 100).unwrap().primes,
            set(&[2, 3])
        );
        assert!(support_union_at_n(&nat(&[1]), 2, 100).is_err());
    }

    #[test]
    fn support_union_matches_literal_factorization() {
        for x in 2u64..=12 {
            for n in 1u32..=24 {
                let literal: BTreeSet<u64> = support_of(&(BigUint::from(x).pow(n) - 1u32))
                    .unwrap()
                    .into_iter()
                    .filter_map(|p| u64::try_from(p).ok())
                    .filter(|&p| p <= 1000)
                    .collect();
                let fast = support_union_at_n(&nat(&[x]), n as u64, 1000)
                    .unwrap()
                    .primes;
                assert_eq!(fast, literal, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn erdos_at_prime_examples() {
        assert!(erdos_exact_at_prime(&nat(&[2, 5]), &nat(&[2, 5]), 7).unwrap());
        assert!(!erdos_exact_at_prime(&nat(&[2]), &nat(&[8]), 7).unwrap());
        for p in [3, 7, 11, 13] {
            assert!(erdos_exact_at_prime(&nat(&[2, 5]), &nat(&[5, 2]), p).unwrap());
        }
        assert!(erdos_exact_at_prime(&nat(&[2]), &nat(&[3]), 3).is_err());
    }

    #[test]
    fn cs_examples() {
        let g = Multiplicative::rationals();
        assert!(corrales_schoof_at_prime(&g, &q("2"), &q("4"), 7).unwrap());
        assert!(corrales_schoof_at_prime(&g, &q("2"), &q("8"), 7).unwrap());
        assert!(!corrales_schoof_at_prime(&g, &q("8"), &q("2"), 7).unwrap());
        assert!(corrales_schoof_at_prime(&g, &q("2"), &q("4"), 2).is_err());
    }

    #[test]
    fn cover_examples() {
        let g = Multiplicative::rationals();
        let one = CoverMode::OneSided;
        assert!(divisibility_cover_at_prime(&g, &[q("3")], &[q("3")], 11, one).unwrap());
        assert!(divisibility_cover_at_prime(&g, &[q("2")], &[q("9")], 7, one).unwrap());
        assert!(!divisibility_cover_at_prime(&g, &[q("8")], &[q("2")], 7, one).unwrap());
        assert!(divisibility_cover_at_prime(&g, &[q("2"), q("3")], &[q("3")], 7, one).is_err());
    }

    #[test]
    fn scan_examples() {
        let opts = ScanOptions::default();
        let r = scan_erdos(
            &nat(&[2]),
            &nat(&[8]),
            PrimeRange::new(3, 100).unwrap(),
            &opts,
        )
        .unwrap();
        let w = r.witness.clone().unwrap();
        assert_eq!((w.v, w.n), (7, 1));
        assert!(verify_erdos_witness(&nat(&[2]), &nat(&[8]), &w).unwrap());
        // literal: 7 | 8¹ − 1 but 7 ∤ 2¹ − 1
        assert_eq!((BigUint::from(8u32) - 1u32) % 7u32, BigUint::from(0u32));
        assert_ne!((BigUint::from(2u32) - 1u32) % 7u32, BigUint::from(0u32));

        let same = scan_erdos(
            &nat(&[6, 35]),
            &nat(&[6, 35]),
            PrimeRange::new(3, 1000).unwrap(),
            &opts,
        )
        .unwrap();
        assert!(same.holds());
        assert_eq!(same.skipped_primes, vec![3, 5, 7]);

        let g = Multiplicative::rationals();
        let thm2 = Condition::Thm2 {
            p: q("2"),
            qs: vec![q("1024")],
        };
        assert!(
            scan_condition(&g, &thm2, PrimeRange::new(3, 1000).unwrap(), &opts)
                .unwrap()
                .holds()
        );
        let rev = Condition::Thm2 {
            p: q("1024"),
            qs: vec![q("2")],
        };
        let r = scan_condition(&g, &rev, PrimeRange::new(3, 1000).unwrap(), &opts).unwrap();
        assert!(verify_witness(&g, &rev, r.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let g = Multiplicative::rationals();
        let cond = Condition::CorralesSchoof {
            x: q("8"),
            y: q("2"),
        };
        let ok = Witness {
            v: 7,
            n: 1,
            detail: String::new(),
        };
        assert!(verify_witness(&g, &cond, &ok).unwrap());
        assert!(!verify_witness(&g, &cond, &Witness { n: 2, ..ok.clone() }).unwrap());
        assert!(!verify_witness(&g, &cond, &Witness { v: 2, ..ok }).unwrap());
    }

    #[test]
    fn elliptic_conditions() {
        let e: crate::mwgroup::WeierstrassCurve = "ec:0,0,1,-1,0".parse().unwrap();
        let p = e.parse_point("(0,0)").unwrap();
        let p2 = e.scalar_mul(&p, &BigInt::from(2));
        let opts = ScanOptions::default();
        let scan = PrimeRange::new(3, 300).unwrap();
        // ord_v(2P) | ord_v(P) everywhere
        let c = Condition::Thm2 {
            p: p.clone(),
            qs: vec![p2.clone()],
        };
        let r = scan_condition(&e, &c, scan, &opts).unwrap();
        assert!(r.holds());
        assert_eq!(r.skipped_primes, vec![37]);
        let c = Condition::CorralesSchoof { x: p2, y: p };
        let r = scan_condition(&e, &c, scan, &opts).unwrap();
        assert!(!r.holds());
        assert!(verify_witness(&e, &c, r.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn match_certificates() {
        let xs = [q("2"), q("3")];
        let c = verify_conclusion_match(&xs, &[q("3"), q("2")])
            .unwrap()
            .unwrap();
        assert_eq!(
            c,
            RelationCertificate::Match {
                permutation: vec![1, 0],
                signs: vec![1, 1]
            }
        );
        assert!(check_match_certificate(&xs, &[q("3"), q("2")], &c));
        assert!(verify_conclusion_match(&xs, &[q("2"), q("5")])
            .unwrap()
            .is_none());
        let c = verify_conclusion_match(&[q("2"), q("5")], &[q("1/2"), q("5")])
            .unwrap()
            .unwrap();
        assert_eq!(
            c,
            RelationCertificate::Match {
                permutation: vec![0, 1],
                signs: vec![-1, 1]
            }
        );
        assert!(verify_conclusion_match(&xs, &[q("2")]).is_err());
    }
}
