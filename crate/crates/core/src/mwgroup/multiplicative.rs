use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ln_big, BackendKind, Independence, MordellWeil, Reduction, Residue};
use crate::error::{Error, Result};
use crate::lattice::{integer_kernel, normalize_sign};
use crate::numth::{biguint_mod, factor_big, inv_mod, mul_mod, MulModP};

/// A nonzero rational number `±num/den` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonZeroRational {
    negative: bool,
    num: BigUint,
    den: BigUint,
}

impl NonZeroRational {
    pub fn new(negative: bool, num: BigUint, den: BigUint) -> Result<Self> {
        if num.is_zero() {
            return Err(Error::InvalidInput("0 is not an element of ℚ*".into()));
        }
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let g = num.gcd(&den);
        Ok(NonZeroRational {
            negative,
            num: num / &g,
            den: den / g,
        })
    }

    pub fn one() -> Self {
        NonZeroRational {
            negative: false,
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Result<Self> {
        let n: BigInt = n.into();
        NonZeroRational::new(n.is_negative(), n.magnitude().clone(), BigUint::one())
    }

    pub fn from_natural(n: &BigUint) -> Result<Self> {
        NonZeroRational::new(false, n.clone(), BigUint::one())
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.num.is_one() && self.den.is_one()
    }

    /// `±1`.
    pub fn is_torsion(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_natural(&self) -> bool {
        !self.negative && self.den.is_one()
    }

    pub fn mul(&self, other: &Self) -> Self {
        NonZeroRational::new(
            self.negative ^ other.negative,
            &self.num * &other.num,
            &self.den * &other.den,
        )
        .expect("product of nonzero rationals")
    }

    pub fn inv(&self) -> Self {
        NonZeroRational {
            negative: self.negative,
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        let k = e.magnitude().to_u32().expect("exponent fits 32 bits");
        let base = if e.is_negative() {
            self.inv()
        } else {
            self.clone()
        };
        NonZeroRational {
            negative: base.negative && k % 2 == 1,
            num: base.num.pow(k),
            den: base.den.pow(k),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        let sign = if self.negative {
            Sign::Minus
        } else {
            Sign::Plus
        };
        BigRational::new(
            BigInt::from_biguint(sign, self.num.clone()),
            BigInt::from_biguint(Sign::Plus, self.den.clone()),
        )
    }

    /// Image in `F_v*`; `v` must divide neither numerator nor denominator.
    pub fn residue(&self, v: u64) -> u64 {
        let n = biguint_mod(&self.num, v);
        let d = biguint_mod(&self.den, v);
        let r = mul_mod(n, inv_mod(d, v).expect("denominator is a unit mod v"), v);
        if self.negative {
            (v - r) % v
        } else {
            r
        }
    }

    /// Exponent of each prime in the numerator (positive) and denominator
    /// (negative).
    pub fn exponent_vector(&self) -> BTreeMap<BigUint, i64> {
        let mut out = BTreeMap::new();
        for (p, e) in factor_big(&self.num).expect("nonzero") {
            out.insert(p, e as i64);
        }
        for (p, e) in factor_big(&self.den).expect("nonzero") {
            out.insert(p, -(e as i64));
        }
        out
    }
}

impl fmt::Display for NonZeroRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.num)?;
        if !self.den.is_one() {
            write!(f, "/{}", self.den)?;
        }
        Ok(())
    }
}

impl FromStr for NonZeroRational {
    type Err = Error;

    /// `±num/den` or `±num`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (n, d) = body.split_once('/').unwrap_or((body, "1"));
        let num: BigUint = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad numerator"))?;
        let den: BigUint = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad denominator"))?;
        NonZeroRational::new(negative, num, den).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// ℚ*, or the S-unit group of ℚ when `S` is nonempty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multiplicative {
    excluded: BTreeSet<u64>,
}

impl Multiplicative {
    pub fn rationals() -> Self {
        Multiplicative::default()
    }

    /// S-units: points must be supported on `s`, and primes of `s` are bad.
    pub fn s_units(s: impl IntoIterator<Item = u64>) -> Self {
        Multiplicative {
            excluded: s.into_iter().collect(),
        }
    }

    pub fn excluded_primes(&self) -> &BTreeSet<u64> {
        &self.excluded
    }

    pub fn point(&self, x: NonZeroRational) -> Result<NonZeroRational> {
        if !self.excluded.is_empty() {
            for p in x.exponent_vector().keys() {
                if !p.to_u64().is_some_and(|q| self.excluded.contains(&q)) {
                    return Err(Error::InvalidInput(format!(
                        "{x} is not an S-unit for S = {:?}",
                        self.excluded
                    )));
                }
            }
        }
        Ok(x)
    }
}

impl fmt::Display for Multiplicative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.excluded.is_empty() {
            return write!(f, "mult");
        }
        let items: Vec<String> = self.excluded.iter().map(u64::to_string).collect();
        write!(f, "S={{{}}}", items.join(","))
    }
}

impl FromStr for Multiplicative {
    type Err = Error;

    /// `S={p1,p2,...}`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix("S=")
            .or_else(|| s.trim().strip_prefix("s="))
            .and_then(|b| b.strip_prefix('{'))
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::parse(s, "expected S={p1,p2,...}"))?;
        let mut set = BTreeSet::new();
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let p: u64 = item.parse().map_err(|_| Error::parse(s, "bad prime"))?;
            if !crate::numth::is_prime(p) {
                return Err(Error::parse(s, format!("{p} is not prime")));
            }
            set.insert(p);
        }
        Ok(Multiplicative { excluded: set })
    }
}

impl MordellWeil for Multiplicative {
    type Point = NonZeroRational;
    type Local = MulModP;

    fn kind(&self) -> BackendKind {
        BackendKind::Multiplicative
    }

    fn identity(&self) -> NonZeroRational {
        NonZeroRational::one()
    }

    fn add(&self, a: &NonZeroRational, b: &NonZeroRational) -> NonZeroRational {
        a.mul(b)
    }

    fn negate(&self, a: &NonZeroRational) -> NonZeroRational {
        a.inv()
    }

    fn scalar_mul(&self, a: &NonZeroRational, n: &BigInt) -> NonZeroRational {
        a.pow(n)
    }

    fn parse_point(&self, s: &str) -> Result<NonZeroRational> {
        self.point(s.parse()?)
    }

    fn good_reduction(&self, v: u64) -> bool {
        !self.excluded.contains(&v)
    }

    fn point_reduces(&self, p: &NonZeroRational, v: u64) -> bool {
        !(biguint_mod(&p.num, v) == 0 || biguint_mod(&p.den, v) == 0)
    }

    fn local_group(&self, v: u64) -> Result<MulModP> {
        if !self.good_reduction(v) {
            return Err(Error::bad_prime(v, "prime lies in S"));
        }
        Ok(MulModP::new(v))
    }

    fn local_group_order(&self, local: &MulModP) -> u64 {
        local.modulus() - 1
    }

    fn reduce_into(&self, local: &MulModP, p: &NonZeroRational) -> u64 {
        p.residue(local.modulus())
    }

    fn torsion_elements(&self) -> Vec<NonZeroRational> {
        vec![NonZeroRational::one(), NonZeroRational::one().negated()]
    }

    fn torsion_order(&self, t: &NonZeroRational) -> Option<u64> {
        if !t.is_torsion() {
            None
        } else if t.negative {
            Some(2)
        } else {
            Some(1)
        }
    }

    /// `(ℤ/vℤ)*` is cyclic, so `x ∈ ⟨g₁,…,g_s⟩` iff `ord x | lcm(ord gⱼ)`.
    fn member_in(
        &self,
        red: &Reduction<'_, Self>,
        p: &Residue<Self>,
        gens: &[Residue<Self>],
    ) -> bool {
        let t = gens
            .iter()
            .map(|g| red.order_of(g))
            .fold(1u64, |acc, o| acc.lcm(&o));
        t % red.order_of(p) == 0
    }

    /// `ceil(ln max(num Q, den Q) / ln min_{>1}(num P, den P)) + 1`.
    fn exponent_bound(&self, p: &NonZeroRational, q: &NonZeroRational) -> BigInt {
        let top = ln_big((&q.num).max(&q.den));
        let small = [&p.num, &p.den]
            .into_iter()
            .filter(|x| !x.is_one())
            .min()
            .map(ln_big);
        match small {
            Some(s) if s > 0.0 => BigInt::from((top / s).ceil() as u64 + 1),
            _ => BigInt::one(),
        }
    }
}

impl NonZeroRational {
    fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }
}

/// Exponent lattice of `points` over their prime supports, with a sign row
/// `Σ eᵢ sᵢ − 2k = 0` whose auxiliary variable `k` occupies the last column.
pub(crate) fn exponent_system(points: &[&NonZeroRational]) -> Vec<Vec<BigInt>> {
    let vectors: Vec<BTreeMap<BigUint, i64>> = points.iter().map(|x| x.exponent_vector()).collect();
    let primes: BTreeSet<&BigUint> = vectors.iter().flat_map(|v| v.keys()).collect();
    let cols = points.len() + 1;
    let mut rows: Vec<Vec<BigInt>> = primes
        .iter()
        .map(|p| {
            let mut row: Vec<BigInt> = vectors
                .iter()
                .map(|v| BigInt::from(v.get(*p).copied().unwrap_or(0)))
                .collect();
            row.push(BigInt::zero());
            row
        })
        .collect();
    let mut sign_row: Vec<BigInt> = points
        .iter()
        .map(|x| BigInt::from(x.is_negative() as i32))
        .collect();
    sign_row.push(BigInt::from(-2));
    debug_assert_eq!(sign_row.len(), cols);
    rows.push(sign_row);
    rows
}

/// Either "independent" or a nonzero `e` with `∏ xᵢ^eᵢ = 1`.
pub fn multiplicative_independence(points: &[NonZeroRational]) -> Independence {
    let refs: Vec<&NonZeroRational> = points.iter().collect();
    let rows = exponent_system(&refs);
    let kernel = integer_kernel(&rows, points.len() + 1);
    match kernel.into_iter().next() {
        None => Independence::Independent,
        Some(mut v) => {
            v.pop();
            normalize_sign(&mut v);
            Independence::Relation(v)
        }
    }
}
