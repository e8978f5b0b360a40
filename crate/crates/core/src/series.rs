//! Truncated power series `f mod z^N` with exact coefficients.
//!
//! The length of the coefficient vector *is* the reliable order: every
//! operation returns a series whose length is the number of coefficients
//! it can vouch for.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Ramification, Valuation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    field: Field,
    coeffs: Vec<Coefficient>,
}

/// Wire form of a series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub p: u64,
    pub ramification: Ramification,
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<String>,
}

const PAR_THRESHOLD: usize = 48;

impl TruncSeries {
    pub fn new(field: Field, coeffs: Vec<Coefficient>) -> TruncSeries {
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        TruncSeries { field, coeffs }
    }

    pub fn zero(field: Field, order: usize) -> TruncSeries {
        TruncSeries::new(field, vec![field.zero(); order])
    }

    pub fn one(field: Field, order: usize) -> TruncSeries {
        TruncSeries::constant(field.one(), order)
    }

    pub fn constant(c: Coefficient, order: usize) -> TruncSeries {
        let field = c.field();
        let mut s = TruncSeries::zero(field, order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// `c * z^k` to the given order.
    pub fn monomial(c: Coefficient, k: usize, order: usize) -> TruncSeries {
        let field = c.field();
        let mut s = TruncSeries::zero(field, order);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_ints(field: Field, values: &[i64]) -> TruncSeries {
        TruncSeries::new(field, values.iter().map(|&v| field.from_int(v)).collect())
    }

    /// A polynomial, padded with zeros (or truncated) to `order`.
    pub fn from_poly(field: Field, poly: &[Coefficient], order: usize) -> TruncSeries {
        let mut coeffs: Vec<Coefficient> = poly.iter().take(order).cloned().collect();
        coeffs.resize(order, field.zero());
        TruncSeries::new(field, coeffs)
    }

    /// `sum z^n`.
    pub fn geometric(field: Field, order: usize) -> TruncSeries {
        TruncSeries::new(field, vec![field.one(); order])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of reliable coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &Coefficient {
        &self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        TruncSeries::new(self.field, self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.order().min(other.order());
        TruncSeries::new(self.field, (0..n).map(|j| &self.coeffs[j] + &other.coeffs[j]).collect())
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.order().min(other.order());
        TruncSeries::new(self.field, (0..n).map(|j| &self.coeffs[j] - &other.coeffs[j]).collect())
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &Coefficient) -> TruncSeries {
        TruncSeries::new(self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Cauchy product, reliable to the smaller of the two orders.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let n = self.order().min(other.order());
        let term = |j: usize| {
            let mut acc = self.field.zero();
            for i in 0..=j {
                let (a, b) = (&self.coeffs[i], &other.coeffs[j - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        };
        let coeffs = if n >= PAR_THRESHOLD {
            (0..n).into_par_iter().map(term).collect()
        } else {
            (0..n).map(term).collect()
        };
        TruncSeries::new(self.field, coeffs)
    }

    /// Multiplication by `z^k`; the order grows by `k`.
    pub fn shift(&self, k: usize) -> TruncSeries {
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncSeries::new(self.field, coeffs)
    }

    /// `z d/dz`.
    pub fn delta(&self) -> TruncSeries {
        TruncSeries::new(
            self.field,
            self.coeffs.iter().enumerate().map(|(j, c)| c.scale_int(j as i64)).collect(),
        )
    }

    /// `d/dz`; one coefficient of order is lost.
    pub fn d_dz(&self) -> TruncSeries {
        TruncSeries::new(
            self.field,
            self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c.scale_int(j as i64)).collect(),
        )
    }

    /// The Cartier operator `sum a_n z^n -> sum a_(np) z^n`, reliable to `ceil(N/p)`.
    pub fn cartier(&self) -> TruncSeries {
        let p = self.field.prime() as usize;
        TruncSeries::new(self.field, self.coeffs.iter().step_by(p).cloned().collect())
    }

    pub fn cartier_pow(&self, k: u32) -> TruncSeries {
        (0..k).fold(self.clone(), |s, _| s.cartier())
    }

    /// `f(z^(p^k))`, reliable to `p^k * N`.
    pub fn subst_zpk(&self, k: u32) -> TruncSeries {
        let q = (self.field.prime() as usize).pow(k);
        self.subst_zpk_to(k, q * self.order())
    }

    /// `f(z^(p^k))` computed only up to `order` (capped at `p^k * N`).
    pub fn subst_zpk_to(&self, k: u32, order: usize) -> TruncSeries {
        let q = (self.field.prime() as usize).pow(k);
        let order = order.min(q * self.order());
        let mut out = TruncSeries::zero(self.field, order);
        for (j, c) in self.coeffs.iter().enumerate() {
            if j * q >= order {
                break;
            }
            out.coeffs[j * q] = c.clone();
        }
        out
    }

    pub fn invert_unit(&self) -> Result<TruncSeries> {
        let n = self.order();
        if n == 0 {
            return Ok(self.clone());
        }
        let inv0 = self.coeffs[0].inv().ok_or(Error::NotAUnit)?;
        let mut out = Vec::with_capacity(n);
        out.push(inv0.clone());
        for j in 1..n {
            let mut acc = self.field.zero();
            for i in 1..=j {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc = &acc + &(a * &out[j - i]);
                }
            }
            out.push(-(&acc * &inv0));
        }
        Ok(TruncSeries::new(self.field, out))
    }

    /// `f' / f`, reliable to `N - 1`.
    pub fn log_derivative(&self) -> Result<TruncSeries> {
        let inv = self.invert_unit()?;
        Ok(self.d_dz().mul(&inv))
    }

    pub fn hadamard(&self, other: &TruncSeries) -> TruncSeries {
        TruncSeries::new(
            self.field,
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).collect(),
        )
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow(&self, exp: i64) -> Result<TruncSeries> {
        let base = if exp < 0 { self.invert_unit()? } else { self.clone() };
        let mut result = TruncSeries::one(self.field, self.order());
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(result)
    }

    /// Smallest coefficient valuation among indices `range`.
    pub fn min_valuation(&self, range: std::ops::Range<usize>) -> Valuation {
        self.coeffs[range.start.min(self.order())..range.end.min(self.order())]
            .iter()
            .map(Coefficient::valuation)
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Index of the first coefficient with valuation below `m`, if any.
    pub fn first_below(&self, m: i64, upto: usize) -> Option<usize> {
        (0..upto.min(self.order())).find(|&j| !self.coeffs[j].valuation().is_at_least(m))
    }

    /// True iff `v(f_j - g_j) >= m` for all `j < upto`.
    pub fn congruent_mod(&self, other: &TruncSeries, m: i64, upto: usize) -> Result<bool> {
        let available = self.order().min(other.order());
        if upto > available {
            return Err(Error::OrderExhausted {
                needed: upto,
                available,
            });
        }
        Ok(self.sub(other).first_below(m, upto).is_none())
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            p: self.field.prime(),
            ramification: self.field.ramification(),
            n: self.order(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<TruncSeries> {
        let field = Field::new(json.p, json.ramification)?;
        if json.coeffs.len() != json.n {
            return Err(Error::Parse(format!(
                "N = {} but {} coefficients given",
                json.n,
                json.coeffs.len()
            )));
        }
        let coeffs = json.coeffs.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
        Ok(TruncSeries::new(field, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(p: u64) -> Field {
        Field::unramified(p).unwrap()
    }

    #[test]
    fn delta_and_derivative() {
        let f = TruncSeries::from_ints(u(5), &[1, 2, 3]);
        assert_eq!(f.delta(), TruncSeries::from_ints(u(5), &[0, 2, 6]));
        assert_eq!(f.d_dz(), TruncSeries::from_ints(u(5), &[2, 6]));
        assert!(TruncSeries::one(u(5), 4).delta().is_zero());
        let g = TruncSeries::geometric(u(3), 6).d_dz();
        assert_eq!(g, TruncSeries::from_ints(u(3), &[1, 2, 3, 4, 5]));
    }

    #[test]
    fn cartier_examples() {
        let f = TruncSeries::from_ints(u(3), &[0, 0, 0, 1, 2, 0, 5, 0, 0]);
        assert_eq!(f.cartier(), TruncSeries::from_ints(u(3), &[0, 1, 5]));
        assert_eq!(TruncSeries::geometric(u(3), 9).cartier(), TruncSeries::geometric(u(3), 3));
        assert_eq!(TruncSeries::geometric(u(3), 10).cartier().order(), 4);
    }

    #[test]
    fn substitution() {
        let f = TruncSeries::from_ints(u(5), &[1, 1]);
        let g = f.subst_zpk(1);
        assert_eq!(g.order(), 10);
        assert_eq!(g.coeff(5), &u(5).one());
        assert_eq!(g.coeffs().iter().filter(|c| !c.is_zero()).count(), 2);
        assert_eq!(f.subst_zpk(0), f);
        assert_eq!(g.cartier(), f);
    }

    #[test]
    fn inversion() {
        let f = TruncSeries::from_ints(u(7), &[1, -1, 0, 0, 0, 0]);
        assert_eq!(f.invert_unit().unwrap(), TruncSeries::geometric(u(7), 6));
        assert_eq!(TruncSeries::one(u(7), 3).invert_unit().unwrap(), TruncSeries::one(u(7), 3));
        let z = TruncSeries::monomial(u(7).one(), 1, 4);
        assert_eq!(z.invert_unit(), Err(Error::NotAUnit));
    }

    #[test]
    fn log_derivative_of_geometric() {
        let f = TruncSeries::geometric(u(5), 8);
        assert_eq!(f.log_derivative().unwrap(), TruncSeries::geometric(u(5), 7));
        assert!(TruncSeries::one(u(5), 5).log_derivative().unwrap().is_zero());
    }

    #[test]
    fn congruences() {
        let f = u(3);
        let one = TruncSeries::from_ints(f, &[1, 0]);
        assert!(one.congruent_mod(&one, 5, 2).unwrap());
        assert!(one.congruent_mod(&TruncSeries::from_ints(f, &[1, 3]), 1, 2).unwrap());
        assert!(!one.congruent_mod(&TruncSeries::from_ints(f, &[1, 1]), 1, 2).unwrap());
        assert!(one.congruent_mod(&one, 1, 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = Field::dwork(5).unwrap();
        let f = TruncSeries::new(d, vec![d.one(), d.pi(), d.parse("1/2 - 3*pi^3").unwrap()]);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TruncSeries::from_json(&back).unwrap(), f);
        assert!(text.contains("\"N\":3"));
    }

    #[test]
    fn integer_powers() {
        let f = TruncSeries::from_ints(u(5), &[1, -1, 0, 0, 0]);
        let g = f.pow(-2).unwrap();
        assert_eq!(g, TruncSeries::from_ints(u(5), &[1, 2, 3, 4, 5]));
        assert_eq!(f.pow(0).unwrap(), TruncSeries::one(u(5), 5));
    }
}
