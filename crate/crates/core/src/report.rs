//! Serializable outcomes: condition reports and relation certificates.
//!
//! JSON is the canonical encoding. Struct field order is the key order, so
//! identical inputs serialize to identical bytes.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::numth::PrimeRange;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// `⋃ supp(xᵢⁿ − 1) = ⋃ supp(yⱼⁿ − 1)` for all `n`.
    ErdosUnion,
    /// `yⁿ ≡ 1` whenever `xⁿ ≡ 1`.
    CorralesSchoof,
    /// `nP ≡ 0 ⇒ nQᵢ ≡ 0` for some `i`.
    Thm2,
    /// `nPᵢ ≡ 0` for some `i` iff `nQⱼ ≡ 0` for some `j`.
    Cor22,
    /// `P_{i_v} ∈ Λ (mod v)` for some `i_v`.
    Detect,
    /// `ord_v T = ord T`.
    TorsionStability,
}

impl ConditionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionId::ErdosUnion => "erdos_union",
            ConditionId::CorralesSchoof => "corrales_schoof",
            ConditionId::Thm2 => "thm2",
            ConditionId::Cor22 => "cor22",
            ConditionId::Detect => "detect",
            ConditionId::TorsionStability => "torsion_stability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnScan,
    Violated,
}

/// A concrete prime `v` and exponent `n` at which a condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub v: u64,
    pub n: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub scanned: PrimeRange,
    /// Bad primes passed over, up to the witness prime when violated.
    pub skipped_primes: Vec<u64>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnScan
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "condition_id,verdict,v,n,detail";

    pub fn to_csv_row(&self) -> String {
        let verdict = match self.verdict {
            Verdict::HoldsOnScan => "holds_on_scan",
            Verdict::Violated => "violated",
        };
        match &self.witness {
            Some(w) => format!(
                "{},{},{},{},\"{}\"",
                self.condition_id.as_str(),
                verdict,
                w.v,
                w.n,
                w.detail.replace('"', "\"\"")
            ),
            None => format!("{},{},,,", self.condition_id.as_str(), verdict),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{}: {} on primes {}",
            self.condition_id.as_str(),
            match self.verdict {
                Verdict::HoldsOnScan => "holds",
                Verdict::Violated => "VIOLATED",
            },
            self.scanned
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!("\n  witness v={} n={}: {}", w.v, w.n, w.detail));
        }
        if !self.skipped_primes.is_empty() {
            s.push_str(&format!(
                "\n  skipped bad primes: {:?}",
                self.skipped_primes
            ));
        }
        s
    }
}

/// An exact conclusion, re-verifiable from the inputs alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelationCertificate {
    /// `alpha·P_index = Σ lambdasⱼ·Lⱼ + residual_torsion`.
    Membership {
        index: usize,
        #[serde(serialize_with = "decimal")]
        alpha: BigInt,
        #[serde(serialize_with = "decimals")]
        lambdas: Vec<BigInt>,
        residual_torsion: Option<String>,
    },
    /// `Q = d·P`.
    Exponent {
        #[serde(serialize_with = "decimal")]
        d: BigInt,
    },
    /// `xsᵢ = signsᵢ · ys[permutationᵢ]` (group notation; `−1` is inversion).
    Match {
        permutation: Vec<usize>,
        signs: Vec<i8>,
    },
}

pub(crate) fn decimal<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(small) => s.serialize_i64(small),
        None => s.serialize_str(&n.to_string()),
    }
}

pub(crate) fn decimals<S: Serializer>(ns: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(ns.len()))?;
    for n in ns {
        match n.to_i64() {
            Some(small) => seq.serialize_element(&small)?,
            None => seq.serialize_element(&n.to_string())?,
        }
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_key_order_is_stable() {
        let r = ConditionReport {
            condition_id: ConditionId::ErdosUnion,
            verdict: Verdict::Violated,
            witness: Some(Witness {
                v: 7,
                n: 1,
                detail: "x".into(),
            }),
            scanned: PrimeRange::new(3, 100).unwrap(),
            skipped_primes: vec![],
        };
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(
            j,
            r#"{"condition_id":"erdos_union","verdict":"violated","witness":{"v":7,"n":1,"detail":"x"},"scanned":{"lo":3,"hi":100},"skipped_primes":[]}"#
        );
        assert_eq!(r.to_csv_row(), "erdos_union,violated,7,1,\"x\"");
    }

    #[test]
    fn certificate_encoding() {
        let c = RelationCertificate::Exponent {
            d: BigInt::from(10),
        };
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"kind":"exponent","d":10}"#
        );
        let big = BigInt::from(u64::MAX) * 4;
        let c = RelationCertificate::Membership {
            index: 0,
            alpha: BigInt::from(1),
            lambdas: vec![BigInt::from(-2), big],
            residual_torsion: None,
        };
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"kind":"membership","index":0,"alpha":1,"lambdas":[-2,"73786976294838206460"],"residual_torsion":null}"#
        );
    }
}
