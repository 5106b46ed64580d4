//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::Instant;

use mwlab::dependence::recover_exponent;
use mwlab::experiment::{run_experiment, ExperimentConfig, Suite};
use mwlab::mwgroup::{curve_group_order, order_mod, torsion_order_stability};
use mwlab::numth::{multiplicative_order, pow_mod, FiniteGroup};
use mwlab::primesearch::{find_pattern_primes, replay_step1, ValuationPattern};
use mwlab::support::corrales_schoof_at_prime;
use mwlab::{
    MordellWeil, Multiplicative, NonZeroRational, PrimeRange, Reduction, ScanOptions,
    WeierstrassCurve,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn q(s: &str) -> NonZeroRational {
    s.parse().unwrap()
}

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn brute_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = x * a % p;
        k += 1;
    }
    k
}

fn criterion_1() -> Outcome {
    let primes = PrimeRange::new(2, 200).unwrap().primes();
    let mut mismatches = 0;
    let mut checked = 0;
    for x in 2u64..=20 {
        let mut powers = Vec::with_capacity(500);
        let mut acc = BigUint::from(1u32);
        for _ in 1..=500 {
            acc *= x;
            powers.push(&acc - 1u32);
        }
        for &p in primes.iter().filter(|&&p| x % p != 0) {
            let o = multiplicative_order(&BigInt::from(x), p).unwrap();
            for (i, xn1) in powers.iter().enumerate() {
                let n = i as u64 + 1;
                let divides = (xn1 % p) == BigUint::from(0u32);
                if divides != n.is_multiple_of(o) {
                    mismatches += 1;
                }
                checked += 1;
            }
        }
    }
    check(
        mismatches == 0,
        format!("{checked} (x, p, n) triples, 0 mismatches"),
        format!("{mismatches} mismatches out of {checked}"),
    )
}

fn erdos_report(workers: usize) -> mwlab::experiment::ExperimentReport {
    run_experiment(
        &ExperimentConfig::new(Suite::Erdos, 100, 2024),
        &ScanOptions::with_workers(workers),
    )
    .unwrap()
}

fn criterion_2() -> Outcome {
    let r = erdos_report(1);
    let distinct: Vec<_> = r.cases_labelled("distinct").collect();
    let separated = distinct
        .iter()
        .filter(|c| c.verdict == Some(mwlab::Verdict::Violated) && c.witness_verified == Some(true))
        .count();
    let equal: Vec<_> = r.cases_labelled("equal").collect();
    let holds = equal
        .iter()
        .filter(|c| c.verdict == Some(mwlab::Verdict::HoldsOnScan))
        .count();
    let misses: Vec<&str> = distinct
        .iter()
        .filter(|c| c.verdict != Some(mwlab::Verdict::Violated))
        .map(|c| c.input.as_str())
        .collect();
    check(
        distinct.len() == 100 && equal.len() == 100 && separated >= 99 && holds == 100,
        format!("distinct sets violated with verified witness {separated}/100, equal sets hold {holds}/100, misses {misses:?}"),
        format!("distinct {separated}/{}, equal {holds}/{}, misses {misses:?}", distinct.len(), equal.len()),
    )
}

fn criterion_3() -> Outcome {
    let g = Multiplicative::rationals();
    let primes = PrimeRange::new(3, 1000).unwrap().primes();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut total) = (0, 0);
    while total < 500 {
        let p = primes[rng.gen_range(0..primes.len())];
        let (x, y) = (rng.gen_range(2u64..100_000), rng.gen_range(2u64..100_000));
        if x % p == 0 || y % p == 0 {
            continue;
        }
        let fast = corrales_schoof_at_prime(
            &g,
            &NonZeroRational::from_integer(x).unwrap(),
            &NonZeroRational::from_integer(y).unwrap(),
            p,
        )
        .unwrap();
        let bound = brute_order(x, p).lcm(&brute_order(y, p));
        let (mut xn, mut yn) = (1u64, 1u64);
        let mut brute = true;
        for _ in 1..=bound {
            xn = xn * (x % p) % p;
            yn = yn * (y % p) % p;
            if xn == 1 && yn != 1 {
                brute = false;
                break;
            }
        }
        total += 1;
        agree += (fast == brute) as usize;
    }
    check(
        agree == total,
        format!("{agree}/{total} triples agree"),
        format!("only {agree}/{total} agree"),
    )
}

fn criterion_4() -> Outcome {
    let g = Multiplicative::rationals();
    let pat = ValuationPattern::new(5, vec![1, 0]).unwrap();
    let hits = find_pattern_primes(
        &g,
        &[q("2"), q("3")],
        &pat,
        PrimeRange::new(3, 1000).unwrap(),
        usize::MAX,
        &ScanOptions::default(),
    )
    .unwrap();
    let h41 = hits.iter().find(|h| h.v == 41);
    let direct = |h: &mwlab::primesearch::PatternHit| {
        pow_mod(2, h.orders[0], h.v) == 1
            && pow_mod(3, h.orders[1], h.v) == 1
            && h.orders[0] == brute_order(2, h.v)
            && h.orders[1] == brute_order(3, h.v)
    };
    let all_direct = hits.iter().all(|h| h.verified && direct(h));
    check(
        h41.map(|h| h.orders == vec![20, 8]).unwrap_or(false) && all_direct,
        format!(
            "{} hits, v=41 with orders (20, 8), all re-verified",
            hits.len()
        ),
        format!("hit 41: {h41:?}, all re-verified: {all_direct}"),
    )
}

fn criterion_5() -> Outcome {
    let g = Multiplicative::rationals();
    let scan = PrimeRange::new(3, 1000).unwrap();
    let opts = ScanOptions::default();
    let w = replay_step1(&g, &q("2"), &[q("3")], 5, scan, &opts).unwrap();
    let sound = w.as_ref().map(|w| {
        let (o2, o3) = (brute_order(2, w.v), brute_order(3, w.v));
        w.n % o2 == 0 && w.n % o3 != 0 && pow_mod(2, w.n, w.v) == 1 && pow_mod(3, w.n, w.v) != 1
    });
    let absent = replay_step1(&g, &q("2"), &[q("4")], 5, scan, &opts)
        .unwrap()
        .is_none();
    check(
        sound == Some(true) && absent,
        format!(
            "Qs={{3}}: witness {:?} confirmed; Qs={{4}}: absent",
            w.as_ref().map(|w| (w.v, w.n))
        ),
        format!("Qs={{3}}: {w:?} sound={sound:?}; Qs={{4}} absent={absent}"),
    )
}

fn criterion_6() -> Outcome {
    let g = Multiplicative::rationals();
    let scan = PrimeRange::new(3, 10_000).unwrap();
    let mut failures = Vec::new();
    for p in ["2", "3", "5/2"] {
        for d in (-50i64..=50).filter(|&d| d != 0) {
            let p = q(p);
            let r = recover_exponent(&g, &p, &p.pow(&BigInt::from(d)), scan).unwrap();
            if r.d() != Some(&BigInt::from(d)) {
                failures.push(format!("P={p} d={d}: {r:?}"));
            }
        }
    }
    check(
        failures.is_empty(),
        "300 round trips exact, no CRT inconsistency".into(),
        format!("{failures:?}"),
    )
}

fn detect_report(workers: usize) -> mwlab::experiment::ExperimentReport {
    run_experiment(
        &ExperimentConfig::new(Suite::Detect, 100, 7),
        &ScanOptions::with_workers(workers),
    )
    .unwrap()
}

fn criterion_7() -> Outcome {
    let r = detect_report(1);
    let holds = r
        .details
        .iter()
        .filter(|c| c.verdict == Some(mwlab::Verdict::HoldsOnScan))
        .count();
    check(
        r.cases == 100 && r.theorem_violations == 0,
        format!("100 instances ({holds} hold on scan, all certified), 0 forbidden combinations"),
        format!(
            "{} forbidden combinations in {} instances",
            r.theorem_violations, r.cases
        ),
    )
}

fn criterion_8() -> Outcome {
    let e: WeierstrassCurve = "ec:0,0,1,-1,0".parse().unwrap();
    let p = e.parse_point("(0,0)").unwrap();
    let n2 = curve_group_order(&e, 2).unwrap();
    let o2 = order_mod(&e, &p, 2).unwrap();
    let good: Vec<u64> = PrimeRange::new(2, 500)
        .unwrap()
        .primes()
        .into_iter()
        .filter(|&v| e.good_reduction(v))
        .collect();
    let hasse_failures: Vec<u64> = good
        .iter()
        .copied()
        .filter(|&v| {
            let n = curve_group_order(&e, v).unwrap() as f64;
            (n - (v as f64 + 1.0)).powi(2) > 4.0 * v as f64
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let multiples: Vec<_> = (-25i64..=25)
        .map(|k| e.scalar_mul(&p, &BigInt::from(k)))
        .collect();
    let reductions: Vec<_> = good
        .iter()
        .take(20)
        .map(|&v| Reduction::at(&e, v).unwrap())
        .collect();
    let mut hom_failures = 0;
    for _ in 0..100 {
        let a = &multiples[rng.gen_range(0..multiples.len())];
        let b = &multiples[rng.gen_range(0..multiples.len())];
        let sum = e.add(a, b);
        for red in &reductions {
            let lhs = red.reduce(&sum).unwrap();
            let rhs = red
                .local()
                .op(&red.reduce(a).unwrap(), &red.reduce(b).unwrap());
            hom_failures += (lhs != rhs) as usize;
        }
    }
    check(
        n2 == 5 && o2 == 5 && hasse_failures.is_empty() && hom_failures == 0 && reductions.len() == 20,
        format!("|E(F_2)| = {n2}, ord_2 = {o2}, Hasse holds at {} good primes, 2000 homomorphism checks pass", good.len()),
        format!("|E(F_2)| = {n2}, ord_2 = {o2}, Hasse failures {hasse_failures:?}, homomorphism failures {hom_failures}"),
    )
}

fn criterion_9() -> Outcome {
    let g = Multiplicative::rationals();
    let opts = ScanOptions::default();
    let minus_one =
        torsion_order_stability(&g, &q("-1"), PrimeRange::new(3, 10_000).unwrap(), &opts).unwrap();
    let e: WeierstrassCurve = "ec:0,0,0,-1,0".parse().unwrap();
    let mut failures = Vec::new();
    if !minus_one.holds() {
        failures.push(minus_one.to_text());
    }
    for t in ["(-1,0)", "(0,0)", "(1,0)"] {
        let pt = e.parse_point(t).unwrap();
        let r = torsion_order_stability(&e, &pt, PrimeRange::new(3, 500).unwrap(), &opts).unwrap();
        if !r.holds() || e.torsion_order(&pt) != Some(2) {
            failures.push(r.to_text());
        }
    }
    check(
        failures.is_empty(),
        "ord_v(-1) = 2 for odd v <= 10^4; 2-torsion of y^2 = x^3 - x has ord_v = 2 at good odd v <= 500".into(),
        failures.join("; "),
    )
}

fn criterion_10() -> Outcome {
    let e1 = erdos_report(1).to_json();
    let e8 = erdos_report(8).to_json();
    let d1 = detect_report(1).to_json();
    let d8 = detect_report(8).to_json();
    check(
        e1 == e8 && d1 == d8,
        format!("criterion 2 report ({} bytes) and criterion 7 report ({} bytes) identical at 1 and 8 workers", e1.len(), d1.len()),
        format!("erdos identical: {}, detect identical: {}", e1 == e8, d1 == d8),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("order characterization", criterion_1),
        ("support-union soundness", criterion_2),
        ("Corrales-Schoof reduction", criterion_3),
        ("valuation-pattern primes", criterion_4),
        ("witness replay", criterion_5),
        ("exponent recovery", criterion_6),
        ("detection vs oracle", criterion_7),
        ("elliptic sanity", criterion_8),
        ("torsion stability", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS [{name}] ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{name}] ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
