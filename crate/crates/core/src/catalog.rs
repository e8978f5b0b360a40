//! Concrete series and operators, plus the p-Lucas and Dwork congruence checks.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Ramification, Valuation};
use crate::diffops::DiffOp;
use crate::error::{Error, Result};
use crate::series::TruncSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `sum (a_1)_j ... (a_n)_j / j!^n z^j`.
    Hypergeometric(Vec<BigRational>),
    /// `sum_n sum_k C(n,k)^2 C(n+k,k)^2 z^n`.
    Apery,
    /// `J_0(pi z)`, Dwork field only.
    Bessel,
    /// `exp(pi z)`, Dwork field only.
    Exponential,
    /// `-sum C(2n,n)^3 / ((2n-1) 64^n) z^n`; no operator is attached.
    FFrak,
}

impl SeriesKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesKind::Hypergeometric(_) => "hypergeometric",
            SeriesKind::Apery => "apery",
            SeriesKind::Bessel => "bessel",
            SeriesKind::Exponential => "exponential",
            SeriesKind::FFrak => "ffrak",
        }
    }

    pub fn params(&self) -> Vec<String> {
        match self {
            SeriesKind::Hypergeometric(a) => a.iter().map(ToString::to_string).collect(),
            _ => Vec::new(),
        }
    }

    pub fn from_parts(kind: &str, params: &[String]) -> Result<SeriesKind> {
        match kind {
            "hypergeometric" | "hyp" => {
                if params.is_empty() {
                    return Err(Error::Parse("hypergeometric series needs at least one parameter".into()));
                }
                let alphas = params
                    .iter()
                    .map(|s| parse_ratio(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SeriesKind::Hypergeometric(alphas))
            }
            "apery" => Ok(SeriesKind::Apery),
            "bessel" => Ok(SeriesKind::Bessel),
            "exponential" | "exp" => Ok(SeriesKind::Exponential),
            "ffrak" => Ok(SeriesKind::FFrak),
            other => Err(Error::Parse(format!("unknown series kind '{other}'"))),
        }
    }
}

fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Accepts `hyp:1/2,1/2`, `apery`, `bessel`, `exp`, `ffrak`.
impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SeriesKind> {
        match s.split_once(':') {
            Some((kind, params)) => {
                let params: Vec<String> = params.split(',').map(|p| p.trim().to_string()).collect();
                SeriesKind::from_parts(kind, &params)
            }
            None => SeriesKind::from_parts(s, &[]),
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesKind::Hypergeometric(_) => write!(f, "hyp:{}", self.params().join(",")),
            SeriesKind::Exponential => write!(f, "exp"),
            other => write!(f, "{}", other.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub kind: SeriesKind,
    pub field: Field,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSpecJson {
    pub kind: String,
    pub params: Vec<String>,
    pub p: u64,
    pub ramification: Ramification,
    #[serde(rename = "N")]
    pub n: usize,
}

impl SeriesSpec {
    pub fn new(kind: SeriesKind, field: Field, order: usize) -> SeriesSpec {
        SeriesSpec { kind, field, order }
    }

    pub fn to_json(&self) -> SeriesSpecJson {
        SeriesSpecJson {
            kind: self.kind.name().to_string(),
            params: self.kind.params(),
            p: self.field.prime(),
            ramification: self.field.ramification(),
            n: self.order,
        }
    }

    pub fn from_json(json: &SeriesSpecJson) -> Result<SeriesSpec> {
        Ok(SeriesSpec {
            kind: SeriesKind::from_parts(&json.kind, &json.params)?,
            field: Field::new(json.p, json.ramification)?,
            order: json.n,
        })
    }
}

/// Output of [`build`].
#[derive(Clone, Debug)]
pub struct Built {
    pub series: TruncSeries,
    pub operator: Option<DiffOp>,
    /// Frobenius period `h`.
    pub period: usize,
    pub warnings: Vec<String>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `d_alpha`: lcm of the parameter denominators.
pub fn common_denominator(alphas: &[BigRational]) -> BigInt {
    alphas.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()))
}

/// Multiplicative order of `p` modulo `d`, or 1 when `d <= 1` or `p | d`.
pub fn frobenius_period(p: u64, d: &BigInt) -> usize {
    let d = match u64::try_from(d) {
        Ok(d) => d,
        Err(_) => return 1,
    };
    if d <= 1 || d % p == 0 {
        return 1;
    }
    let mut x = p % d;
    let mut h = 1;
    while x != 1 {
        x = x * p % d;
        h += 1;
        if h > d as usize {
            return 1;
        }
    }
    h
}

pub fn hypergeometric_series(field: Field, alphas: &[BigRational], order: usize) -> TruncSeries {
    let n = alphas.len() as u32;
    let mut coeffs = Vec::with_capacity(order);
    let mut cur = BigRational::one();
    for j in 0..order {
        if j > 0 {
            let num = alphas.iter().fold(BigRational::one(), |acc, a| acc * (a + q(j as i64 - 1)));
            cur = cur * num / q((j as i64).pow(n));
        }
        coeffs.push(field.from_rational(cur.clone()));
    }
    TruncSeries::new(field, coeffs)
}

/// Raw form of `delta^n - z prod (delta + a_i)`.
pub fn hypergeometric_terms(field: Field, alphas: &[BigRational]) -> Vec<(usize, Vec<Coefficient>)> {
    let mut prod = vec![BigRational::one()];
    for a in alphas {
        let mut next = vec![BigRational::zero(); prod.len() + 1];
        for (k, c) in prod.iter().enumerate() {
            next[k] += c * a;
            next[k + 1] += c;
        }
        prod = next;
    }
    let n = alphas.len();
    let mut lead = vec![field.zero(); n + 1];
    lead[n] = field.one();
    vec![(0, lead), (1, prod.into_iter().map(|c| field.from_rational(-c)).collect())]
}

pub fn apery_numbers(order: usize) -> Vec<BigInt> {
    (0..order)
        .map(|n| {
            let n = n as i64;
            let mut c1 = BigInt::one(); // C(n, k)
            let mut c2 = BigInt::one(); // C(n + k, k)
            let mut sum = BigInt::zero();
            for k in 0..=n {
                if k > 0 {
                    c1 = c1 * BigInt::from(n - k + 1) / BigInt::from(k);
                    c2 = c2 * BigInt::from(n + k) / BigInt::from(k);
                }
                let t = &c1 * &c2;
                sum += &t * &t;
            }
            sum
        })
        .collect()
}

/// `delta^3 - z(2 delta + 1)(17 delta^2 + 17 delta + 5) + z^2 (delta + 1)^3`.
pub fn apery_terms(field: Field) -> Vec<(usize, Vec<Coefficient>)> {
    let ints = |v: &[i64]| v.iter().map(|&x| field.from_int(x)).collect::<Vec<_>>();
    vec![
        (0, ints(&[0, 0, 0, 1])),
        (1, ints(&[-5, -27, -51, -34])),
        (2, ints(&[1, 3, 3, 1])),
    ]
}

fn require_dwork(field: Field, what: &str) -> Result<()> {
    if field.ramification() != Ramification::DworkEisenstein {
        return Err(Error::BadContext(format!("{what} needs the Dwork field (pi^(p-1) = -p)")));
    }
    Ok(())
}

pub fn bessel_series(field: Field, order: usize) -> Result<TruncSeries> {
    require_dwork(field, "the Bessel series")?;
    if field.prime() == 2 {
        return Err(Error::BadParameters("the Bessel series is only integral for p != 2".into()));
    }
    let step = -(field.pi().pow(2));
    let mut coeffs = vec![field.zero(); order];
    let mut cur = field.one();
    let mut n = 0i64;
    while (2 * n as usize) < order {
        if n > 0 {
            cur = &cur * &step.scale(&BigRational::new(BigInt::one(), BigInt::from(4 * n * n)));
        }
        coeffs[2 * n as usize] = cur.clone();
        n += 1;
    }
    Ok(TruncSeries::new(field, coeffs))
}

/// `delta^2 + pi^2 z^2`, which annihilates `sum (-1)^n pi^(2n) z^(2n) / (4^n n!^2)`.
pub fn bessel_terms(field: Field) -> Vec<(usize, Vec<Coefficient>)> {
    vec![
        (0, vec![field.zero(), field.zero(), field.one()]),
        (2, vec![field.pi().pow(2)]),
    ]
}

pub fn exponential_series(field: Field, order: usize) -> Result<TruncSeries> {
    require_dwork(field, "the exponential series")?;
    let pi = field.pi();
    let mut coeffs = Vec::with_capacity(order);
    let mut cur = field.one();
    for n in 0..order {
        if n > 0 {
            cur = (&cur * &pi).scale(&BigRational::new(BigInt::one(), BigInt::from(n)));
        }
        coeffs.push(cur.clone());
    }
    Ok(TruncSeries::new(field, coeffs))
}

pub fn exponential_terms(field: Field) -> Vec<(usize, Vec<Coefficient>)> {
    vec![(0, vec![field.zero(), field.one()]), (1, vec![-field.pi()])]
}

pub fn ffrak_series(field: Field, order: usize) -> TruncSeries {
    let mut coeffs = Vec::with_capacity(order);
    let mut central = BigInt::one(); // C(2n, n)
    let mut pow64 = BigInt::one();
    for n in 0..order as i64 {
        if n > 0 {
            central = central * BigInt::from(2 * n) * BigInt::from(2 * n - 1) / BigInt::from(n * n);
            pow64 *= 64;
        }
        let cube = &central * &central * &central;
        let den = BigInt::from(2 * n - 1) * &pow64;
        coeffs.push(field.from_rational(-BigRational::new(cube, den)));
    }
    TruncSeries::new(field, coeffs)
}

pub fn build(spec: &SeriesSpec) -> Result<Built> {
    let field = spec.field;
    let order = spec.order;
    if order == 0 {
        return Err(Error::InvalidContext("truncation order must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let (series, terms, period) = match &spec.kind {
        SeriesKind::Hypergeometric(alphas) => {
            let d = common_denominator(alphas);
            if d.is_multiple_of(&BigInt::from(field.prime())) {
                warnings.push(format!(
                    "p = {} divides d_alpha = {d}; integrality is not expected",
                    field.prime()
                ));
            }
            (
                hypergeometric_series(field, alphas, order),
                Some(hypergeometric_terms(field, alphas)),
                frobenius_period(field.prime(), &d),
            )
        }
        SeriesKind::Apery => {
            let s = TruncSeries::new(field, apery_numbers(order).into_iter().map(|a| field.from_bigint(a)).collect());
            (s, Some(apery_terms(field)), 1)
        }
        SeriesKind::Bessel => (bessel_series(field, order)?, Some(bessel_terms(field)), 1),
        SeriesKind::Exponential => (exponential_series(field, order)?, Some(exponential_terms(field)), 1),
        SeriesKind::FFrak => (ffrak_series(field, order), None, 1),
    };
    let operator = terms.map(|t| DiffOp::monicize(field, &t, order)).transpose()?;
    Ok(Built {
        series,
        operator,
        period,
        warnings,
    })
}

/// Outcome of a congruence check over a coefficient range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub check: String,
    pub p: u64,
    pub ramification: Ramification,
    /// Congruence level in uniformizer units.
    pub level: i64,
    pub checked_upto: usize,
    pub pass: bool,
    pub first_failure: Option<usize>,
    pub min_residual_valuation: Valuation,
    pub note: String,
}

fn require_integral(f: &TruncSeries) -> Result<()> {
    for (index, c) in f.coeffs().iter().enumerate() {
        if let Valuation::Finite(v) = c.valuation() {
            if v < 0 {
                return Err(Error::IntegralityFailure { index, valuation: v });
            }
        }
    }
    Ok(())
}

/// `f == F_(p-1)(z) f(z^p) mod p`, using `f(z^p)` for `f(z)^p`.
pub fn p_lucas_check(f: &TruncSeries) -> Result<CongruenceReport> {
    require_integral(f)?;
    let field = f.field();
    let p = field.prime() as usize;
    let level = field.e() as i64;
    let n = f.order();
    let mut first_failure = None;
    let mut min_v = Valuation::Infinite;
    for j in 0..n {
        let mut rhs = field.zero();
        for i in 0..p.min(j + 1) {
            if (j - i) % p == 0 {
                rhs = &rhs + &(f.coeff(i) * f.coeff((j - i) / p));
            }
        }
        let v = (f.coeff(j) - &rhs).valuation();
        min_v = min_v.min(v);
        if first_failure.is_none() && !v.is_at_least(level) {
            first_failure = Some(j);
        }
    }
    Ok(CongruenceReport {
        check: "p-lucas".into(),
        p: field.prime(),
        ramification: field.ramification(),
        level,
        checked_upto: n,
        pass: first_failure.is_none(),
        first_failure,
        min_residual_valuation: min_v,
        note: "f(z)^p replaced by f(z^p); the two agree mod p for integral coefficients".into(),
    })
}

/// `f(z) F_(s-1)(z^p) == F_s(z) f(z^p) mod p^s`, `F_s` the truncation below `z^(p^s)`.
pub fn dwork_congruence_check(f: &TruncSeries, s: u32) -> Result<CongruenceReport> {
    let field = f.field();
    if field.ramification() != Ramification::Unramified {
        return Err(Error::BadContext("Dwork congruence check runs over Q_p".into()));
    }
    if s == 0 {
        return Err(Error::BadParameters("s must be at least 1".into()));
    }
    require_integral(f)?;
    let p = field.prime() as usize;
    let ps = p.checked_pow(s).ok_or(Error::BadParameters("p^s overflows".into()))?;
    let n = f.order();
    if n < ps {
        return Err(Error::OrderExhausted {
            needed: ps,
            available: n,
        });
    }
    let fs = f.truncate(ps);
    let fs1 = f.truncate(ps / p);
    let lhs = f.mul(&TruncSeries::from_poly(field, fs1.coeffs(), n / p + 1).subst_zpk_to(1, n));
    let rhs = TruncSeries::from_poly(field, fs.coeffs(), n).mul(&f.subst_zpk_to(1, n));
    let diff = lhs.sub(&rhs);
    let level = s as i64;
    let first_failure = diff.first_below(level, n);
    Ok(CongruenceReport {
        check: "dwork".into(),
        p: field.prime(),
        ramification: field.ramification(),
        level,
        checked_upto: n,
        pass: first_failure.is_none(),
        first_failure,
        min_residual_valuation: diff.min_valuation(0..n),
        note: format!("denominator-cleared form, s = {s}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing() {
        let k: SeriesKind = "hyp:1/2,1/2".parse().unwrap();
        assert_eq!(k, SeriesKind::Hypergeometric(vec![BigRational::new(1.into(), 2.into()); 2]));
        assert_eq!(k.to_string(), "hyp:1/2,1/2");
        assert_eq!("exp".parse::<SeriesKind>().unwrap(), SeriesKind::Exponential);
        assert!("nope".parse::<SeriesKind>().is_err());
    }

    #[test]
    fn periods() {
        assert_eq!(frobenius_period(5, &BigInt::from(2)), 1);
        assert_eq!(frobenius_period(2, &BigInt::from(3)), 2);
        assert_eq!(frobenius_period(3, &BigInt::from(8)), 2);
        assert_eq!(frobenius_period(3, &BigInt::from(3)), 1);
    }

    #[test]
    fn bessel_needs_dwork() {
        let spec = SeriesSpec::new(SeriesKind::Bessel, Field::unramified(3).unwrap(), 5);
        assert!(matches!(build(&spec), Err(Error::BadContext(_))));
        let spec = SeriesSpec::new(SeriesKind::Bessel, Field::dwork(2).unwrap(), 5);
        assert!(matches!(build(&spec), Err(Error::BadParameters(_))));
    }

    #[test]
    fn warns_when_p_divides_denominator() {
        let spec = SeriesSpec::new("hyp:1/2".parse().unwrap(), Field::unramified(2).unwrap(), 4);
        assert_eq!(build(&spec).unwrap().warnings.len(), 1);
    }

    #[test]
    fn ffrak_leading_terms() {
        let f = Field::unramified(5).unwrap();
        let s = ffrak_series(f, 3);
        // n = 1: -8 / 64; n = 2: -216 / (3 * 4096)
        assert_eq!(s.coeff(0), &f.one());
        assert_eq!(s.coeff(1), &f.from_ratio(-1, 8));
        assert_eq!(s.coeff(2), &f.from_ratio(-9, 512));
    }

    #[test]
    fn dwork_check_needs_order() {
        let f = Field::unramified(5).unwrap();
        let s = hypergeometric_series(f, &vec![BigRational::new(1.into(), 2.into()); 2], 20);
        assert_eq!(
            dwork_congruence_check(&s, 2),
            Err(Error::OrderExhausted {
                needed: 25,
                available: 20
            })
        );
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SeriesSpec::new("hyp:1/3,2/3".parse().unwrap(), Field::unramified(7).unwrap(), 30);
        let text = serde_json::to_string(&spec.to_json()).unwrap();
        let back: SeriesSpecJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SeriesSpec::from_json(&back).unwrap(), spec);
    }
}
