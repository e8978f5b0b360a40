//! Exact coefficient arithmetic over the two supported Frobenius fields.
//!
//! An element of `Q_p` (unramified, uniformizer `p`) or of `Q_p(pi)` with
//! `pi^(p-1) = -p` (Dwork) is stored as `e` exact rationals
//! `c_0 + c_1 pi + ... + c_(e-1) pi^(e-1)`. Valuations are measured in
//! units of the uniformizer: `v(pi) = 1`, `v(p) = e`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ramification {
    #[serde(rename = "unramified")]
    Unramified,
    #[serde(rename = "dwork")]
    DworkEisenstein,
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ramification::Unramified => write!(f, "unramified"),
            Ramification::DworkEisenstein => write!(f, "dwork"),
        }
    }
}

impl std::str::FromStr for Ramification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unramified" | "u" => Ok(Ramification::Unramified),
            "dwork" | "d" | "dwork-eisenstein" => Ok(Ramification::DworkEisenstein),
            other => Err(Error::Parse(format!("unknown ramification '{other}'"))),
        }
    }
}

/// Valuation in uniformizer units; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_at_least(self, m: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= m,
            Valuation::Infinite => true,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(Valuation::Finite(v)),
            Repr::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad valuation '{s}'"))),
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The coefficient field: `Q_p` or `Q_p(pi_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr")]
pub struct Field {
    prime: u64,
    ramification: Ramification,
}

#[derive(Deserialize)]
struct FieldRepr {
    prime: u64,
    ramification: Ramification,
}

impl TryFrom<FieldRepr> for Field {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Field> {
        Field::new(r.prime, r.ramification)
    }
}

impl Field {
    pub fn new(prime: u64, ramification: Ramification) -> Result<Field> {
        if !is_prime(prime) {
            return Err(Error::InvalidContext(format!("{prime} is not prime")));
        }
        if prime > 1 << 20 {
            return Err(Error::InvalidContext(format!("prime {prime} is too large")));
        }
        Ok(Field { prime, ramification })
    }

    pub fn unramified(prime: u64) -> Result<Field> {
        Field::new(prime, Ramification::Unramified)
    }

    pub fn dwork(prime: u64) -> Result<Field> {
        Field::new(prime, Ramification::DworkEisenstein)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn ramification(&self) -> Ramification {
        self.ramification
    }

    /// Ramification index: 1, or `p - 1` in the Dwork field.
    pub fn e(&self) -> usize {
        match self.ramification {
            Ramification::Unramified => 1,
            Ramification::DworkEisenstein => (self.prime - 1) as usize,
        }
    }

    /// Sign `s` in the relation `pi^e = s * p`.
    pub(crate) fn relation_sign(&self) -> i64 {
        match self.ramification {
            Ramification::Unramified => 1,
            Ramification::DworkEisenstein => -1,
        }
    }

    pub(crate) fn prime_big(&self) -> BigInt {
        BigInt::from(self.prime)
    }

    pub fn zero(&self) -> Coefficient {
        Coefficient {
            field: *self,
            comps: vec![BigRational::zero(); self.e()],
        }
    }

    pub fn one(&self) -> Coefficient {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Coefficient {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Coefficient {
        self.from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(&self, r: BigRational) -> Coefficient {
        let mut c = self.zero();
        c.comps[0] = r;
        c
    }

    pub fn from_bigint(&self, n: BigInt) -> Coefficient {
        self.from_rational(BigRational::from_integer(n))
    }

    /// Builds an element from its coordinates in the basis `1, pi, ..., pi^(e-1)`.
    pub fn from_comps(&self, comps: Vec<BigRational>) -> Result<Coefficient> {
        if comps.len() != self.e() {
            return Err(Error::InvalidContext(format!(
                "expected {} components, got {}",
                self.e(),
                comps.len()
            )));
        }
        Ok(Coefficient {
            field: *self,
            comps,
        })
    }

    /// The prime `p` as an element.
    pub fn p(&self) -> Coefficient {
        self.from_int(self.prime as i64)
    }

    /// The uniformizer: `p` when unramified, the Dwork constant otherwise.
    pub fn pi(&self) -> Coefficient {
        if self.e() == 1 {
            return self.from_int(self.relation_sign() * self.prime as i64);
        }
        let mut c = self.zero();
        c.comps[1] = BigRational::one();
        c
    }

    /// `pi^k` for any integer `k`.
    pub fn pi_pow(&self, k: i64) -> Coefficient {
        let e = self.e() as i64;
        let q = k.div_euclid(e);
        let r = k.rem_euclid(e) as usize;
        // pi^k = (s p)^q * pi^r
        let base = BigRational::from_integer(BigInt::from(self.relation_sign() * self.prime as i64));
        let scale = rational_pow(&base, q);
        let mut c = self.zero();
        c.comps[r] = scale;
        c
    }

    /// Parses the canonical text form: rationals `a/b`, and in the Dwork
    /// field sums such as `1/2 - 3*pi + pi^2`.
    pub fn parse(&self, s: &str) -> Result<Coefficient> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let chars: Vec<char> = compact.chars().collect();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..chars.len() {
            if (chars[i] == '+' || chars[i] == '-') && !matches!(chars[i - 1], '^' | '/' | '*' | '+' | '-') {
                terms.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(chars[start..].iter().collect::<String>());

        let mut acc = self.zero();
        for term in terms {
            acc = &acc + &self.parse_term(&term)?;
        }
        Ok(acc)
    }

    fn parse_term(&self, term: &str) -> Result<Coefficient> {
        let bad = || Error::Parse(format!("bad coefficient term '{term}'"));
        let (negative, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let (scalar, power) = if let Some(idx) = body.find("pi") {
            let head = &body[..idx];
            let tail = &body[idx + 2..];
            let scalar = if head.is_empty() {
                BigRational::one()
            } else {
                let head = head.strip_suffix('*').ok_or_else(bad)?;
                parse_rational(head).ok_or_else(bad)?
            };
            let power = if tail.is_empty() {
                1
            } else {
                let exp = tail.strip_prefix('^').ok_or_else(bad)?;
                exp.parse::<i64>().map_err(|_| bad())?
            };
            (scalar, power)
        } else {
            (parse_rational(body).ok_or_else(bad)?, 0)
        };
        let scalar = if negative { -scalar } else { scalar };
        Ok(self.pi_pow(power).scale(&scalar))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub(crate) fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    let mut result = BigRational::one();
    let b = if exp < 0 { base.recip() } else { base.clone() };
    for _ in 0..exp.unsigned_abs() {
        result *= &b;
    }
    result
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn vp_int(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub(crate) fn vp_rational(r: &BigRational, p: &BigInt) -> i64 {
    vp_int(r.numer(), p) - vp_int(r.denom(), p)
}

/// Inverse of `a` modulo `m` for coprime `a`, `m`.
pub(crate) fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Exact element of `Q_p` or `Q_p(pi_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    field: Field,
    comps: Vec<BigRational>,
}

impl Coefficient {
    pub fn field(&self) -> Field {
        self.field
    }

    /// Coordinates in the basis `1, pi, ..., pi^(e-1)`.
    pub fn comps(&self) -> &[BigRational] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.comps[0].is_one() && self.comps[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.comps[1..].iter().all(Zero::is_zero) {
            Some(&self.comps[0])
        } else {
            None
        }
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.field.prime_big();
        let e = self.field.e() as i64;
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| e * vp_rational(c, &p) + i as i64)
            .min()
            .map_or(Valuation::Infinite, Valuation::Finite)
    }

    pub fn is_integral(&self) -> bool {
        self.valuation().is_at_least(0)
    }

    pub fn scale(&self, r: &BigRational) -> Coefficient {
        Coefficient {
            field: self.field,
            comps: self.comps.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Coefficient {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Coefficient> {
        if self.is_zero() {
            return None;
        }
        let e = self.field.e();
        if let Some(r) = self.as_rational() {
            return Some(self.field.from_rational(r.recip()));
        }
        // Column j of the multiplication matrix holds the coordinates of self * pi^j.
        let mut columns = Vec::with_capacity(e);
        let mut cur = self.clone();
        let pi = self.field.pi();
        for _ in 0..e {
            columns.push(cur.comps.clone());
            cur = &cur * &pi;
        }
        let matrix: Vec<Vec<BigRational>> = (0..e)
            .map(|row| (0..e).map(|col| columns[col][row].clone()).collect())
            .collect();
        let mut rhs = vec![BigRational::zero(); e];
        rhs[0] = BigRational::one();
        let sol = crate::linalg::solve_rational(matrix, rhs)?;
        Some(Coefficient {
            field: self.field,
            comps: sol,
        })
    }

    pub fn pow(&self, exp: u32) -> Coefficient {
        let mut result = self.field.one();
        for _ in 0..exp {
            result = &result * self;
        }
        result
    }

    /// Canonical representative of the class of `self` in `O_K / pi^m`.
    ///
    /// Coordinate `i` is reduced into `[0, p^k_i)` with `k_i = ceil((m - i) / e)`,
    /// so two integral elements reduce equally iff they agree modulo `pi^m`.
    pub fn reduce_mod(&self, m: i64) -> Result<Coefficient> {
        if let Valuation::Finite(v) = self.valuation() {
            if v < 0 {
                return Err(Error::NegativeValuation(v));
            }
        }
        let e = self.field.e() as i64;
        let p = self.field.prime_big();
        let mut out = self.field.zero();
        for (i, c) in self.comps.iter().enumerate() {
            let k = (m - i as i64).max(0);
            let k = (k + e - 1) / e;
            if k == 0 || c.is_zero() {
                continue;
            }
            let modulus = num_traits::pow(p.clone(), k as usize);
            let inv_den = mod_inverse_big(c.denom(), &modulus)
                .expect("integral coordinate has denominator prime to p");
            let r = (c.numer() * inv_den).mod_floor(&modulus);
            out.comps[i] = BigRational::from_integer(r);
        }
        Ok(out)
    }

    /// `self * pi^k`.
    pub fn shift_pi(&self, k: i64) -> Coefficient {
        self * &self.field.pi_pow(k)
    }

    fn check_field(&self, other: &Coefficient) {
        assert_eq!(self.field, other.field, "coefficients from different fields");
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.e() == 1 {
            return write!(f, "{}", self.comps[0]);
        }
        let mut first = true;
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "pi")?;
                    } else {
                        write!(f, "pi^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;

    fn add(self, rhs: &Coefficient) -> Coefficient {
        self.check_field(rhs);
        Coefficient {
            field: self.field,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;

    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self.check_field(rhs);
        Coefficient {
            field: self.field,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;

    fn mul(self, rhs: &Coefficient) -> Coefficient {
        self.check_field(rhs);
        let e = self.field.e();
        if e == 1 {
            return Coefficient {
                field: self.field,
                comps: vec![&self.comps[0] * &rhs.comps[0]],
            };
        }
        let wrap = BigRational::from_integer(BigInt::from(self.field.relation_sign() * self.field.prime as i64));
        let mut out = vec![BigRational::zero(); e];
        for (i, a) in self.comps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.comps.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                let k = i + j;
                if k < e {
                    out[k] += t;
                } else {
                    out[k - e] += t * &wrap;
                }
            }
        }
        Coefficient {
            field: self.field,
            comps: out,
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;

    fn neg(self) -> Coefficient {
        Coefficient {
            field: self.field,
            comps: self.comps.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: Coefficient) -> Coefficient {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Coefficient> for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: &'a Coefficient) -> Coefficient {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coefficient {
    type Output = Coefficient;

    fn neg(self) -> Coefficient {
        -&self
    }
}

/// Shared parameters of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicContext {
    pub field: Field,
    /// Number of series coefficients carried (`N`).
    pub trunc_order: usize,
    /// Default congruence level `m`, in uniformizer units.
    pub level: i64,
}

impl PadicContext {
    pub fn new(prime: u64, ramification: Ramification, trunc_order: usize, level: i64) -> Result<PadicContext> {
        if trunc_order == 0 {
            return Err(Error::InvalidContext("truncation order must be at least 1".into()));
        }
        Ok(PadicContext {
            field: Field::new(prime, ramification)?,
            trunc_order,
            level,
        })
    }

    pub fn prime(&self) -> u64 {
        self.field.prime()
    }

    pub fn e(&self) -> usize {
        self.field.e()
    }
}
