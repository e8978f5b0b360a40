//! Polynomials and rational functions over the coefficient field.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Valuation};
use crate::error::{Error, Result};
use crate::series::TruncSeries;

/// Ascending coefficient list; trailing zeros are trimmed.
pub type Poly = Vec<Coefficient>;

pub fn poly_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Coefficient::is_zero) {
        p.pop();
    }
    p
}

pub fn poly_mul(a: &[Coefficient], b: &[Coefficient], field: Field) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    poly_trim(out)
}

pub fn poly_add(a: &[Coefficient], b: &[Coefficient], field: Field) -> Poly {
    let n = a.len().max(b.len());
    let zero = field.zero();
    poly_trim((0..n).map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).collect())
}

pub fn poly_sub(a: &[Coefficient], b: &[Coefficient], field: Field) -> Poly {
    let n = a.len().max(b.len());
    let zero = field.zero();
    poly_trim((0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
}

pub fn poly_deriv(a: &[Coefficient]) -> Poly {
    poly_trim(a.iter().enumerate().skip(1).map(|(i, c)| c.scale_int(i as i64)).collect())
}

/// `P(z^q)`.
pub fn poly_subst_pow(a: &[Coefficient], q: usize, field: Field) -> Poly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); (a.len() - 1) * q + 1];
    for (i, c) in a.iter().enumerate() {
        out[i * q] = c.clone();
    }
    out
}

pub fn poly_min_valuation(a: &[Coefficient]) -> Valuation {
    a.iter().map(Coefficient::valuation).min().unwrap_or(Valuation::Infinite)
}

fn fmt_poly(p: &[Coefficient]) -> String {
    let mut out = String::new();
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let plain = c.to_string();
        let mut text = if plain.contains(' ') { format!("({plain})") } else { plain };
        let negative = text.starts_with('-');
        if negative {
            text.remove(0);
        }
        let term = match (i, text.as_str()) {
            (0, _) => text,
            (1, "1") => "z".into(),
            (_, "1") => format!("z^{i}"),
            (1, _) => format!("{text}*z"),
            _ => format!("{text}*z^{i}"),
        };
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
            (true, false) => {}
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// `num / den` with coefficients in `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    field: Field,
    num: Poly,
    den: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl RationalFunction {
    pub fn new(field: Field, num: Poly, den: Poly) -> Result<RationalFunction> {
        let den = poly_trim(den);
        if den.is_empty() {
            return Err(Error::BadParameters("zero denominator".into()));
        }
        let mut r = RationalFunction {
            field,
            num: poly_trim(num),
            den,
        };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(field: Field, num: Poly) -> RationalFunction {
        RationalFunction::new(field, num, vec![field.one()]).expect("unit denominator")
    }

    pub fn constant(c: Coefficient) -> RationalFunction {
        RationalFunction::from_poly(c.field(), vec![c])
    }

    pub fn one(field: Field) -> RationalFunction {
        RationalFunction::constant(field.one())
    }

    /// Scales so that the lowest nonzero denominator coefficient is 1.
    fn normalize(&mut self) {
        let lead = self.den.iter().find(|c| !c.is_zero()).expect("nonzero denominator").clone();
        if lead.is_one() {
            return;
        }
        let inv = lead.inv().expect("nonzero");
        self.num = self.num.iter().map(|c| c * &inv).collect();
        self.den = self.den.iter().map(|c| c * &inv).collect();
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num(&self) -> &[Coefficient] {
        &self.num
    }

    pub fn den(&self) -> &[Coefficient] {
        &self.den
    }

    pub fn num_degree(&self) -> usize {
        self.num.len().saturating_sub(1)
    }

    pub fn den_degree(&self) -> usize {
        self.den.len() - 1
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    /// `|R|_G` as a valuation: `min v(num) - min v(den)`.
    pub fn gauss_valuation(&self) -> Valuation {
        match (poly_min_valuation(&self.num), poly_min_valuation(&self.den)) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
            _ => Valuation::Infinite,
        }
    }

    /// No pole in the open unit disc: `B(0) != 0` and `v(b_j) >= v(b_0)`.
    pub fn in_k0(&self) -> bool {
        let v0 = self.den[0].valuation();
        if v0 == Valuation::Infinite {
            return false;
        }
        self.den.iter().all(|b| b.valuation() >= v0)
    }

    /// Power-series expansion to `order`; needs `den(0) != 0`.
    pub fn expand(&self, order: usize) -> Result<TruncSeries> {
        let n = TruncSeries::from_poly(self.field, &self.num, order);
        let d = TruncSeries::from_poly(self.field, &self.den, order);
        Ok(n.mul(&d.invert_unit()?))
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            self.field,
            poly_mul(&self.num, &other.num, self.field),
            poly_mul(&self.den, &other.den, self.field),
        )
        .expect("product of nonzero denominators")
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        if other.num.is_empty() {
            return Err(Error::BadParameters("division by zero rational function".into()));
        }
        RationalFunction::new(
            self.field,
            poly_mul(&self.num, &other.den, self.field),
            poly_mul(&self.den, &other.num, self.field),
        )
    }

    /// `R(z^(p^k))`.
    pub fn subst_zpk(&self, k: u32) -> RationalFunction {
        let q = (self.field.prime() as usize).pow(k);
        RationalFunction::new(
            self.field,
            poly_subst_pow(&self.num, q, self.field),
            poly_subst_pow(&self.den, q, self.field),
        )
        .expect("nonzero denominator")
    }

    pub fn derivative(&self) -> RationalFunction {
        let f = self.field;
        let top = poly_sub(
            &poly_mul(&poly_deriv(&self.num), &self.den, f),
            &poly_mul(&self.num, &poly_deriv(&self.den), f),
            f,
        );
        RationalFunction::new(f, top, poly_mul(&self.den, &self.den, f)).expect("nonzero denominator")
    }

    /// `R' / R = N'/N - D'/D`, as one fraction.
    pub fn log_derivative(&self) -> Result<RationalFunction> {
        if self.num.is_empty() {
            return Err(Error::NotAUnit);
        }
        let f = self.field;
        let top = poly_sub(
            &poly_mul(&poly_deriv(&self.num), &self.den, f),
            &poly_mul(&self.num, &poly_deriv(&self.den), f),
            f,
        );
        RationalFunction::new(f, top, poly_mul(&self.num, &self.den, f))
    }

    /// Equality as functions, by cross-multiplication.
    pub fn equals(&self, other: &RationalFunction) -> bool {
        poly_mul(&self.num, &other.den, self.field) == poly_mul(&other.num, &self.den, self.field)
    }

    pub fn to_json(&self) -> RationalJson {
        RationalJson {
            num: self.num.iter().map(ToString::to_string).collect(),
            den: self.den.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn from_json(field: Field, json: &RationalJson) -> Result<RationalFunction> {
        let parse = |v: &[String]| v.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>();
        RationalFunction::new(field, parse(&json.num)?, parse(&json.den)?)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() && self.den[0].is_one() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            let wrap = |s: String| if s.contains(' ') { format!("({s})") } else { s };
            write!(f, "{} / {}", wrap(fmt_poly(&self.num)), wrap(fmt_poly(&self.den)))
        }
    }
}
