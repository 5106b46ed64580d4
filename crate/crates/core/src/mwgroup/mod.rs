//! Mordell-Weil type groups over ℚ with reduction maps at primes.
//!
//! A backend implements [`MordellWeil`]: exact group arithmetic on rational
//! points, a decidable notion of good prime, and the reduction map into a
//! finite group at each good prime. [`Reduction`] bundles the finite group at
//! one prime with the factorization of its order so that `ord_v` of many
//! points can be computed cheaply.

mod elliptic;
mod multiplicative;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numth::{self, element_order, Factorization, FiniteGroup};

pub use elliptic::{
    curve_group_order, elliptic_independence, CurvePoint, EcPoint, ReducedCurve, WeierstrassCurve,
};
pub(crate) use multiplicative::exponent_system;
pub use multiplicative::{multiplicative_independence, Multiplicative, NonZeroRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Multiplicative,
    Elliptic,
}

/// Residue of a point under the reduction map of backend `G`.
pub type Residue<G> = <<G as MordellWeil>::Local as FiniteGroup>::Elem;

/// Outcome of a relation search among points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// Nonzero integer coefficients `e` with `Σ eᵢPᵢ = 0`.
    Relation(Vec<BigInt>),
}

pub trait MordellWeil: Send + Sync {
    type Point: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;
    type Local: FiniteGroup + Send + Sync;

    fn kind(&self) -> BackendKind;

    fn identity(&self) -> Self::Point;
    fn add(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;
    fn negate(&self, a: &Self::Point) -> Self::Point;

    fn scalar_mul(&self, a: &Self::Point, n: &BigInt) -> Self::Point {
        let base = if n.is_negative() {
            self.negate(a)
        } else {
            a.clone()
        };
        let k = n.abs();
        let mut acc = self.identity();
        for i in (0..k.bits()).rev() {
            acc = self.add(&acc, &acc);
            if k.bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    fn sub(&self, a: &Self::Point, b: &Self::Point) -> Self::Point {
        self.add(a, &self.negate(b))
    }

    fn is_identity(&self, a: &Self::Point) -> bool {
        *a == self.identity()
    }

    fn parse_point(&self, s: &str) -> Result<Self::Point>;

    /// Whether the group itself reduces well at `v` (`v ∉ S`, `v ∤ Δ`).
    fn good_reduction(&self, v: u64) -> bool;

    /// Whether `p` has a well-defined image at `v`, given good reduction.
    fn point_reduces(&self, p: &Self::Point, v: u64) -> bool;

    /// The finite group `B(F_v)`; fails at primes of bad reduction.
    fn local_group(&self, v: u64) -> Result<Self::Local>;
    fn local_group_order(&self, local: &Self::Local) -> u64;
    fn reduce_into(&self, local: &Self::Local, p: &Self::Point) -> Residue<Self>;

    /// The rational torsion subgroup, as a list of points.
    fn torsion_elements(&self) -> Vec<Self::Point>;

    /// Order of a torsion point, `None` for points of infinite order.
    fn torsion_order(&self, t: &Self::Point) -> Option<u64>;

    /// Whether `p` lies in the subgroup generated by `gens` inside the
    /// reduced group. The default enumerates the generated subgroup.
    fn member_in(
        &self,
        red: &Reduction<'_, Self>,
        p: &Residue<Self>,
        gens: &[Residue<Self>],
    ) -> bool
    where
        Self: Sized,
    {
        red.subgroup(gens).contains(p)
    }

    /// Heuristic bound `H` on `|d|` for `Q = dP`, used to stop CRT lifting.
    fn exponent_bound(&self, p: &Self::Point, q: &Self::Point) -> BigInt;
}

/// `v` is prime, the group has good reduction there and every point reduces.
pub fn good_prime<G: MordellWeil>(group: &G, points: &[G::Point], v: u64) -> bool {
    numth::is_prime(v)
        && group.good_reduction(v)
        && points.iter().all(|p| group.point_reduces(p, v))
}

/// The reduction of `group` at one prime `v`.
pub struct Reduction<'g, G: MordellWeil> {
    group: &'g G,
    v: u64,
    local: G::Local,
    order: Factorization,
}

impl<'g, G: MordellWeil> Reduction<'g, G> {
    pub fn at(group: &'g G, v: u64) -> Result<Self> {
        if !numth::is_prime(v) {
            return Err(Error::NotPrime(v));
        }
        if !group.good_reduction(v) {
            return Err(Error::bad_prime(v, "bad reduction of the group"));
        }
        let local = group.local_group(v)?;
        let order = numth::factor(group.local_group_order(&local))?;
        Ok(Reduction {
            group,
            v,
            local,
            order,
        })
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn group(&self) -> &'g G {
        self.group
    }

    pub fn local(&self) -> &G::Local {
        &self.local
    }

    /// Order of the finite group `B(F_v)`.
    pub fn group_order(&self) -> u64 {
        self.order.value()
    }

    pub fn group_order_factorization(&self) -> &Factorization {
        &self.order
    }

    pub fn reduce(&self, p: &G::Point) -> Result<Residue<G>> {
        if !self.group.point_reduces(p, self.v) {
            return Err(Error::bad_prime(self.v, format!("{p} does not reduce")));
        }
        Ok(self.group.reduce_into(&self.local, p))
    }

    pub fn order_of(&self, r: &Residue<G>) -> u64 {
        element_order(&self.local, r, &self.order)
    }

    /// `ord_v P`.
    pub fn order_mod(&self, p: &G::Point) -> Result<u64> {
        Ok(self.order_of(&self.reduce(p)?))
    }

    pub fn mul(&self, r: &Residue<G>, n: u64) -> Residue<G> {
        self.local.pow(r, n)
    }

    pub fn is_zero(&self, r: &Residue<G>) -> bool {
        self.local.is_identity(r)
    }

    /// The subgroup of `B(F_v)` generated by `gens`, by closure.
    pub fn subgroup(&self, gens: &[Residue<G>]) -> std::collections::HashSet<Residue<G>> {
        let mut seen = std::collections::HashSet::new();
        let id = self.local.identity();
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(e) = queue.pop() {
            for g in gens {
                let next = self.local.op(&e, g);
                if seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        seen
    }

    /// `P ∈ Λ (mod v)` for `Λ = ⟨gens⟩`.
    pub fn member(&self, p: &G::Point, gens: &[G::Point]) -> Result<bool> {
        let rp = self.reduce(p)?;
        let rg = gens
            .iter()
            .map(|g| self.reduce(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.group.member_in(self, &rp, &rg))
    }
}

/// Image of `p` under reduction at `v`.
pub fn reduce<G: MordellWeil>(group: &G, p: &G::Point, v: u64) -> Result<Residue<G>> {
    Reduction::at(group, v)?.reduce(p)
}

/// `ord_v P`, the order of `P mod v`.
pub fn order_mod<G: MordellWeil>(group: &G, p: &G::Point, v: u64) -> Result<u64> {
    Reduction::at(group, v)?.order_mod(p)
}

/// Checks `ord_v T = ord T` at every good prime of `scan`.
pub fn torsion_order_stability<G: MordellWeil>(
    group: &G,
    t: &G::Point,
    scan: numth::PrimeRange,
    opts: &crate::scan::ScanOptions,
) -> Result<crate::report::ConditionReport> {
    let ord = group
        .torsion_order(t)
        .ok_or_else(|| Error::InvalidInput(format!("{t} is not a torsion point")))?;
    let points = std::slice::from_ref(t);
    crate::scan::scan_primes(
        crate::report::ConditionId::TorsionStability,
        scan,
        opts,
        |v| good_prime(group, points, v),
        |v| {
            let ord_v = order_mod(group, t, v)?;
            Ok((ord_v != ord).then(|| (ord_v, format!("ord_v {t} = {ord_v} but ord {t} = {ord}"))))
        },
    )
}

/// Any backend, chosen at runtime from its textual encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Multiplicative(Multiplicative),
    Elliptic(WeierstrassCurve),
}

impl Backend {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Multiplicative(_) => BackendKind::Multiplicative,
            Backend::Elliptic(_) => BackendKind::Elliptic,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    /// `mult` (ℚ*), `S={p1,p2,...}` (S-units) or `ec:a1,a2,a3,a4,a6`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with("ec:") {
            return Ok(Backend::Elliptic(t.parse()?));
        }
        if t.starts_with("S=") || t.starts_with("s=") {
            return Ok(Backend::Multiplicative(t.parse()?));
        }
        match t {
            "mult" | "multiplicative" | "Q*" | "q" => {
                Ok(Backend::Multiplicative(Multiplicative::rationals()))
            }
            _ => Err(Error::parse(
                s,
                "expected mult, S={...} or ec:a1,a2,a3,a4,a6",
            )),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Multiplicative(m) => write!(f, "{m}"),
            Backend::Elliptic(c) => write!(f, "{c}"),
        }
    }
}

/// Natural logarithm of a big integer (≥ 1), accurate to double precision.
pub(crate) fn ln_big(n: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    if n.is_zero() || n.is_one() {
        return 0.0;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
