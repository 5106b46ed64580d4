//! Seeded batch experiments: random instances of the support, Corrales–Schoof,
//! detection and exponent-recovery statements, each run against its exact
//! oracle. The aggregate report is a deterministic function of the config.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dependence::{
    detect_dependence, exact_membership_multiplicative, recover_exponent, CertificateStatus,
    Membership, DEFAULT_SEARCH_BOUND,
};
use crate::error::{Error, Result};
use crate::mwgroup::{
    multiplicative_independence, Independence, MordellWeil, Multiplicative, NonZeroRational,
    WeierstrassCurve,
};
use crate::numth::PrimeRange;
use crate::report::{Verdict, Witness};
use crate::scan::ScanOptions;
use crate::support::{scan_condition, verify_witness, Condition};

/// Primes from which random entries are built.
pub const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
pub const MAX_EXPONENT: u32 = 5;

/// Curves with trivial torsion and known points of infinite order.
pub const CURATED_CURVES: [(&str, &str); 4] = [
    ("ec:0,0,1,-1,0", "(0,0)"),
    ("ec:0,1,1,0,0", "(0,0)"),
    ("ec:1,-1,1,0,0", "(0,0)"),
    ("ec:0,1,1,-2,0", "(-1,1)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Support-union condition for independent tuples of naturals.
    Erdos,
    /// Corrales–Schoof condition for pairs of naturals.
    Cs,
    /// Corrales–Schoof condition for multiples of a point on a curated curve.
    EcCs,
    /// Detection scan against the exact membership oracle.
    Detect,
    /// Exponent recovery round trips.
    Recover,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Erdos,
        Suite::Cs,
        Suite::EcCs,
        Suite::Detect,
        Suite::Recover,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Erdos => "erdos",
            Suite::Cs => "cs",
            Suite::EcCs => "ec-cs",
            Suite::Detect => "detect",
            Suite::Recover => "recover",
        }
    }

    pub fn default_scan(&self) -> PrimeRange {
        match self {
            Suite::EcCs => PrimeRange::new(3, 2000),
            _ => PrimeRange::new(3, 10_000),
        }
        .expect("valid range")
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::parse(s, "unknown suite (erdos, cs, ec-cs, detect, recover)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub trials: u32,
    pub seed: u64,
    pub scan: PrimeRange,
}

impl ExperimentConfig {
    pub fn new(suite: Suite, trials: u32, seed: u64) -> Self {
        ExperimentConfig {
            suite,
            trials,
            seed,
            scan: suite.default_scan(),
        }
    }
}

/// One instance and how the scan compared with the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub trial: u32,
    pub label: String,
    pub input: String,
    pub verdict: Option<Verdict>,
    pub witness: Option<Witness>,
    pub witness_verified: Option<bool>,
    pub oracle: String,
    pub agrees: bool,
    /// Hypothesis holds on the scan while the exact oracle refutes the conclusion.
    pub theorem_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u32,
    pub scanned: PrimeRange,
    pub cases: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub theorem_violations: usize,
    pub details: Vec<Case>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn cases_labelled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Case> + 'a {
        self.details.iter().filter(move |c| c.label == label)
    }
}

pub fn run_experiment(config: &ExperimentConfig, opts: &ScanOptions) -> Result<ExperimentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut details = Vec::new();
    for trial in 0..config.trials {
        match config.suite {
            Suite::Erdos => erdos_trial(&mut rng, trial, config.scan, opts, &mut details)?,
            Suite::Cs => details.push(cs_trial(&mut rng, trial, config.scan, opts)?),
            Suite::EcCs => details.push(ec_cs_trial(&mut rng, trial, config.scan, opts)?),
            Suite::Detect => details.push(detect_trial(&mut rng, trial, config.scan, opts)?),
            Suite::Recover => details.push(recover_trial(&mut rng, trial, config.scan)?),
        }
    }
    let agreements = details.iter().filter(|c| c.agrees).count();
    Ok(ExperimentReport {
        suite: config.suite,
        seed: config.seed,
        trials: config.trials,
        scanned: config.scan,
        cases: details.len(),
        agreements,
        disagreements: details.len() - agreements,
        theorem_violations: details.iter().filter(|c| c.theorem_violation).count(),
        details,
    })
}

/// A natural number `∏ pᵢ^eᵢ` over one to three distinct small primes.
pub fn random_natural<R: Rng>(rng: &mut R) -> BigUint {
    let k = rng.gen_range(1..=3);
    SMALL_PRIMES
        .choose_multiple(rng, k)
        .map(|&p| BigUint::from(p).pow(rng.gen_range(1..=MAX_EXPONENT)))
        .product()
}

/// A rational `∏ pᵢ^eᵢ` with `eᵢ ∈ [−5, 5]`, never `1`.
pub fn random_rational<R: Rng>(rng: &mut R) -> NonZeroRational {
    loop {
        let k = rng.gen_range(1..=3);
        let x = SMALL_PRIMES
            .choose_multiple(rng, k)
            .fold(NonZeroRational::one(), |acc, &p| {
                let e = rng.gen_range(-(MAX_EXPONENT as i64)..=MAX_EXPONENT as i64);
                acc.mul(
                    &NonZeroRational::from_integer(p)
                        .expect("nonzero")
                        .pow(&BigInt::from(e)),
                )
            });
        if !x.is_one() {
            return x;
        }
    }
}

/// A multiplicatively independent tuple of `t` naturals.
pub fn random_independent_naturals<R: Rng>(rng: &mut R, t: usize) -> Vec<BigUint> {
    loop {
        let xs: Vec<BigUint> = (0..t).map(|_| random_natural(rng)).collect();
        let pts: Vec<NonZeroRational> = xs
            .iter()
            .map(|x| NonZeroRational::from_natural(x).expect("≥ 2"))
            .collect();
        if multiplicative_independence(&pts) == Independence::Independent {
            return xs;
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn naturals(xs: &[BigUint]) -> Vec<NonZeroRational> {
    xs.iter()
        .map(|x| NonZeroRational::from_natural(x).expect("≥ 2"))
        .collect()
}

fn scan_case<G: MordellWeil>(
    group: &G,
    cond: &Condition<G::Point>,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<(Verdict, Option<Witness>, Option<bool>)> {
    let report = scan_condition(group, cond, scan, opts)?;
    let verified = match &report.witness {
        Some(w) => Some(verify_witness(group, cond, w)?),
        None => None,
    };
    Ok((report.verdict, report.witness, verified))
}

/// Two cases per trial: independent tuples with different sets, which must
/// be separated by some prime, and a tuple against a shuffle of itself.
fn erdos_trial(
    rng: &mut ChaCha8Rng,
    trial: u32,
    scan: PrimeRange,
    opts: &ScanOptions,
    out: &mut Vec<Case>,
) -> Result<()> {
    let group = Multiplicative::rationals();
    let t = rng.gen_range(1..=3);
    let xs = random_independent_naturals(rng, t);
    let ys = loop {
        let t = rng.gen_range(1..=3);
        let ys = random_independent_naturals(rng, t);
        let mut a = xs.clone();
        let mut b = ys.clone();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        if a != b {
            break ys;
        }
    };
    let mut shuffled = xs.clone();
    shuffled.shuffle(rng);
    for (label, ys) in [("distinct", ys), ("equal", shuffled)] {
        let cond = Condition::ErdosUnion {
            xs: naturals(&xs),
            ys: naturals(&ys),
        };
        let (verdict, witness, witness_verified) = scan_case(&group, &cond, scan, opts)?;
        let expect_holds = label == "equal";
        let agrees = match verdict {
            Verdict::HoldsOnScan => expect_holds,
            Verdict::Violated => !expect_holds && witness_verified == Some(true),
        };
        out.push(Case {
            trial,
            label: label.into(),
            input: format!("xs={{{}}} ys={{{}}}", join(&xs), join(&ys)),
            verdict: Some(verdict),
            witness,
            witness_verified,
            oracle: if expect_holds {
                "sets_equal"
            } else {
                "sets_differ"
            }
            .into(),
            agrees,
            theorem_violation: verdict == Verdict::HoldsOnScan && !expect_holds,
        });
    }
    Ok(())
}

/// `y` is either a power of `x` or an unrelated natural; the oracle decides
/// `y ∈ ⟨x⟩` exactly.
fn cs_trial(
    rng: &mut ChaCha8Rng,
    trial: u32,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<Case> {
    let group = Multiplicative::rationals();
    let x = NonZeroRational::from_natural(&random_natural(rng))?;
    let y = if rng.gen_bool(0.5) {
        let d = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
        x.pow(&BigInt::from(d))
    } else {
        NonZeroRational::from_natural(&random_natural(rng))?
    };
    let in_subgroup = matches!(
        exact_membership_multiplicative(&y, std::slice::from_ref(&x)),
        Membership::Certified(crate::report::RelationCertificate::Membership { ref alpha, .. }) if alpha == &BigInt::from(1)
    );
    let cond = Condition::CorralesSchoof {
        x: x.clone(),
        y: y.clone(),
    };
    let (verdict, witness, witness_verified) = scan_case(&group, &cond, scan, opts)?;
    let agrees = match verdict {
        Verdict::HoldsOnScan => in_subgroup,
        Verdict::Violated => !in_subgroup && witness_verified == Some(true),
    };
    Ok(Case {
        trial,
        label: "cs".into(),
        input: format!("x={x} y={y}"),
        verdict: Some(verdict),
        witness,
        witness_verified,
        oracle: if in_subgroup {
            "y_in_<x>"
        } else {
            "y_not_in_<x>"
        }
        .into(),
        agrees,
        theorem_violation: verdict == Verdict::HoldsOnScan && !in_subgroup,
    })
}

/// `x = aP`, `y = bP` on a curve with trivial torsion, so `y ∈ ⟨x⟩` iff `a | b`.
fn ec_cs_trial(
    rng: &mut ChaCha8Rng,
    trial: u32,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<Case> {
    let (curve_str, gen) = *CURATED_CURVES.choose(rng).expect("nonempty");
    let curve: WeierstrassCurve = curve_str.parse()?;
    let p = curve.parse_point(gen)?;
    let a = *[-4i64, -3, -2, -1, 1, 2, 3, 4]
        .choose(rng)
        .expect("nonempty");
    let b = *[-6i64, -4, -3, -2, -1, 1, 2, 3, 4, 6]
        .choose(rng)
        .expect("nonempty");
    let x = curve.scalar_mul(&p, &BigInt::from(a));
    let y = curve.scalar_mul(&p, &BigInt::from(b));
    let in_subgroup = b % a == 0;
    let cond = Condition::CorralesSchoof { x, y };
    let (verdict, witness, witness_verified) = scan_case(&curve, &cond, scan, opts)?;
    let agrees = match verdict {
        Verdict::HoldsOnScan => in_subgroup,
        Verdict::Violated => !in_subgroup && witness_verified == Some(true),
    };
    Ok(Case {
        trial,
        label: "ec_cs".into(),
        input: format!("{curve_str} P={gen} x={a}P y={b}P"),
        verdict: Some(verdict),
        witness,
        witness_verified,
        oracle: if in_subgroup {
            "y_in_<x>"
        } else {
            "y_not_in_<x>"
        }
        .into(),
        agrees,
        theorem_violation: verdict == Verdict::HoldsOnScan && !in_subgroup,
    })
}

/// Random `Ps` and `Λ`; half of the instances plant `P₁` inside `Λ` (or a
/// multiple of it).
pub fn random_detect_instance<R: Rng>(rng: &mut R) -> (Vec<NonZeroRational>, Vec<NonZeroRational>) {
    let gens: Vec<NonZeroRational> = (0..rng.gen_range(1..=2))
        .map(|_| random_rational(rng))
        .collect();
    let mut ps: Vec<NonZeroRational> = (0..rng.gen_range(1..=2))
        .map(|_| random_rational(rng))
        .collect();
    if rng.gen_bool(0.5) {
        let planted = gens.iter().fold(NonZeroRational::one(), |acc, g| {
            acc.mul(&g.pow(&BigInt::from(rng.gen_range(-3i64..=3))))
        });
        if !planted.is_one() {
            ps[0] = planted;
        }
    }
    (ps, gens)
}

fn detect_trial(
    rng: &mut ChaCha8Rng,
    trial: u32,
    scan: PrimeRange,
    opts: &ScanOptions,
) -> Result<Case> {
    let group = Multiplicative::rationals();
    let (ps, gens) = random_detect_instance(rng);
    let det = detect_dependence(&group, &ps, &gens, scan, opts, DEFAULT_SEARCH_BOUND)?;
    let certified = ps.iter().any(|p| {
        matches!(
            exact_membership_multiplicative(p, &gens),
            Membership::Certified(_)
        )
    });
    let verdict = det.report.verdict;
    let witness_verified = match &det.report.witness {
        Some(w) => Some(verify_witness(
            &group,
            &Condition::Detect {
                ps: ps.clone(),
                lambda: gens.clone(),
            },
            w,
        )?),
        None => None,
    };
    let theorem_violation = verdict == Verdict::HoldsOnScan && !certified;
    let agrees = match verdict {
        Verdict::HoldsOnScan => det.certificate_status == CertificateStatus::Certified && certified,
        Verdict::Violated => witness_verified == Some(true),
    };
    Ok(Case {
        trial,
        label: "detect".into(),
        input: format!("Ps={{{}}} Λ=<{}>", join(&ps), join(&gens)),
        verdict: Some(verdict),
        witness: det.report.witness,
        witness_verified,
        oracle: if certified { "certified" } else { "refuted" }.into(),
        agrees,
        theorem_violation,
    })
}

fn recover_trial(rng: &mut ChaCha8Rng, trial: u32, scan: PrimeRange) -> Result<Case> {
    let group = Multiplicative::rationals();
    let p = random_rational(rng);
    let d = loop {
        let d = rng.gen_range(-50i64..=50);
        if d != 0 {
            break d;
        }
    };
    let q = p.pow(&BigInt::from(d));
    let rec = recover_exponent(&group, &p, &q, scan)?;
    let agrees = rec.d() == Some(&BigInt::from(d));
    Ok(Case {
        trial,
        label: "recover".into(),
        input: format!("P={p} d={d}"),
        verdict: None,
        witness: None,
        witness_verified: None,
        oracle: match rec.d() {
            Some(r) => format!("recovered d={r}"),
            None => format!("{rec:?}"),
        },
        agrees,
        theorem_violation: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curated_curves_have_trivial_torsion() {
        for (curve_str, gen) in CURATED_CURVES {
            let e: WeierstrassCurve = curve_str.parse().unwrap();
            assert_eq!(e.torsion_elements().len(), 1, "{curve_str}");
            let p = e.parse_point(gen).unwrap();
            assert!(e.torsion_order(&p).is_none());
        }
    }

    #[test]
    fn zero_trials_is_empty() {
        let r = run_experiment(
            &ExperimentConfig::new(Suite::Erdos, 0, 1),
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!((r.cases, r.agreements), (0, 0));
    }

    #[test]
    fn suites_agree_on_small_runs() {
        for suite in Suite::ALL {
            let mut cfg = ExperimentConfig::new(suite, 6, 11);
            if suite != Suite::EcCs {
                cfg.scan = PrimeRange::new(3, 3000).unwrap();
            }
            let r = run_experiment(&cfg, &ScanOptions::default()).unwrap();
            assert_eq!(r.theorem_violations, 0, "{suite}: {}", r.to_json());
            assert_eq!(r.agreements, r.cases, "{suite}: {}", r.to_json());
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = ExperimentConfig::new(Suite::Detect, 5, 3);
        let a = run_experiment(&cfg, &ScanOptions::default())
            .unwrap()
            .to_json();
        let b = run_experiment(&cfg, &ScanOptions::with_workers(4))
            .unwrap()
            .to_json();
        assert_eq!(a, b);
    }
}
