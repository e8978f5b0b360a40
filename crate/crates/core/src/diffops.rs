//! Monic differential operators in `delta = z d/dz`.

use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Ramification, Valuation};
use crate::error::{Error, Result};
use crate::linalg::solve_unique;
use crate::matrix::{cmat_is_zero, cmat_mul, cmat_zero, CMat, SeriesMatrix};
use crate::rational::{poly_trim, Poly, RationalFunction};
use crate::series::TruncSeries;

/// One summand `z^zdeg * (c_0 + c_1 delta + c_2 delta^2 + ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTerm {
    pub zdeg: usize,
    pub deltapoly: Vec<String>,
}

/// Operator file contents. `p` and `ramification` may instead come from the caller.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<Ramification>,
    pub terms: Vec<RawTerm>,
}

impl OperatorJson {
    pub fn parse_terms(&self, field: Field) -> Result<Vec<(usize, Vec<Coefficient>)>> {
        self.terms
            .iter()
            .map(|t| {
                let cs = t.deltapoly.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
                Ok((t.zdeg, cs))
            })
            .collect()
    }
}

/// `L = delta^n + a_1 delta^(n-1) + ... + a_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    field: Field,
    coeffs: Vec<TruncSeries>,
    rational: Option<Vec<RationalFunction>>,
}

impl DiffOp {
    /// Divides a raw operator `sum_k P_k(z) delta^k` by its leading coefficient.
    pub fn monicize(field: Field, terms: &[(usize, Vec<Coefficient>)], order: usize) -> Result<DiffOp> {
        let n = terms
            .iter()
            .filter_map(|(_, cs)| cs.iter().rposition(|c| !c.is_zero()))
            .max()
            .ok_or_else(|| Error::BadParameters("operator has no delta terms".into()))?;
        if n == 0 {
            return Err(Error::BadParameters("operator has order zero".into()));
        }
        let mut polys: Vec<Poly> = vec![Vec::new(); n + 1];
        for (zdeg, cs) in terms {
            for (k, c) in cs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let p = &mut polys[k];
                if p.len() <= *zdeg {
                    p.resize(zdeg + 1, field.zero());
                }
                p[*zdeg] = &p[*zdeg] + c;
            }
        }
        let polys: Vec<Poly> = polys.into_iter().map(poly_trim).collect();
        let lead = &polys[n];
        if lead.first().is_none_or(Coefficient::is_zero) {
            return Err(Error::LeadingNotUnit);
        }
        let rational = (1..=n)
            .map(|i| RationalFunction::new(field, polys[n - i].clone(), lead.clone()))
            .collect::<Result<Vec<_>>>()?;
        let coeffs = rational.iter().map(|r| r.expand(order)).collect::<Result<Vec<_>>>()?;
        Ok(DiffOp {
            field,
            coeffs,
            rational: Some(rational),
        })
    }

    pub fn from_json(field: Field, json: &OperatorJson, order: usize) -> Result<DiffOp> {
        DiffOp::monicize(field, &json.parse_terms(field)?, order)
    }

    /// A monic operator given directly by `a_1, ..., a_n`.
    pub fn from_monic_series(field: Field, coeffs: Vec<TruncSeries>) -> Result<DiffOp> {
        if coeffs.is_empty() {
            return Err(Error::BadParameters("operator has order zero".into()));
        }
        Ok(DiffOp {
            field,
            coeffs,
            rational: None,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The order `n` in `delta`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Truncation order of the coefficient series.
    pub fn trunc_order(&self) -> usize {
        self.coeffs.iter().map(TruncSeries::order).min().unwrap_or(0)
    }

    /// `a_i` for `i = 1..=n` (index 0 holds `a_1`).
    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    pub fn rational(&self) -> Option<&[RationalFunction]> {
        self.rational.as_deref()
    }

    /// First `i` with `a_i(0) != 0`.
    pub fn mom_violation(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|a| a.order() > 0 && !a.coeff(0).is_zero())
            .map(|i| i + 1)
    }

    pub fn is_mom(&self) -> bool {
        self.mom_violation().is_none()
    }

    /// `|a_i|_G <= 1` for all `i`; known only for rational coefficients.
    pub fn gauss_norm_ok(&self) -> Option<bool> {
        self.rational
            .as_ref()
            .map(|rs| rs.iter().all(|r| r.gauss_valuation().is_at_least(0)))
    }

    pub fn companion(&self) -> SeriesMatrix {
        let n = self.order();
        let order = self.trunc_order();
        SeriesMatrix::from_fn(self.field, n, |i, j| {
            if i + 1 < n {
                if j == i + 1 {
                    TruncSeries::one(self.field, order)
                } else {
                    TruncSeries::zero(self.field, order)
                }
            } else {
                // last row: -a_n, ..., -a_1
                self.coeffs[n - 1 - j].truncate(order).neg()
            }
        })
    }

    pub fn apply(&self, f: &TruncSeries) -> TruncSeries {
        let n = self.order();
        let order = f.order().min(self.trunc_order());
        let f = f.truncate(order);
        let mut powers = vec![f.clone()];
        for _ in 0..n {
            let next = powers.last().expect("nonempty").delta();
            powers.push(next);
        }
        let mut acc = powers[n].clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            acc = acc.add(&a.mul(&powers[n - 1 - i]));
        }
        acc
    }

    /// The solution in `1 + z K[[z]]`, to order `min(N, trunc_order)`.
    pub fn unit_solution(&self, order: usize) -> Result<TruncSeries> {
        if let Some(index) = self.mom_violation() {
            return Err(Error::NotMom { index });
        }
        let n = self.order();
        let order = order.min(self.trunc_order());
        let field = self.field;
        let mut f: Vec<Coefficient> = Vec::with_capacity(order);
        if order > 0 {
            f.push(field.one());
        }
        let ipow = |x: usize, k: usize| (x as i64).pow(k as u32);
        for j in 1..order {
            let mut acc = field.zero();
            for (i0, a) in self.coeffs.iter().enumerate() {
                let i = i0 + 1;
                for l in 1..=j {
                    let al = a.coeff(l);
                    let fjl = &f[j - l];
                    if al.is_zero() || fjl.is_zero() {
                        continue;
                    }
                    let w = ipow(j - l, n - i);
                    if w == 0 {
                        continue;
                    }
                    acc = &acc + &(al * fjl).scale_int(w);
                }
            }
            let jn = field.from_int(ipow(j, n));
            f.push(-(&acc * &jn.inv().expect("j >= 1")));
        }
        Ok(TruncSeries::new(field, f))
    }
}

/// The uniform part `Y` with `Y(0) = I` and `delta Y = A Y - Y A(0)`.
pub fn uniform_part(a: &SeriesMatrix, order: usize) -> Result<SeriesMatrix> {
    let field = a.field();
    let n = a.dim();
    let order = order.min(a.order());
    let a0 = a.constant_term();
    let mut power = a0.clone();
    for _ in 1..n {
        power = cmat_mul(&power, &a0, field);
    }
    if !cmat_is_zero(&power) {
        return Err(Error::NotNilpotent);
    }
    let amats: Vec<CMat> = (0..order).map(|j| a.coeff_mat(j)).collect();
    let mut ys: Vec<CMat> = Vec::with_capacity(order);
    let mut id = cmat_zero(field, n);
    for (i, row) in id.iter_mut().enumerate() {
        row[i] = field.one();
    }
    if order > 0 {
        ys.push(id);
    }
    for j in 1..order {
        let mut rhs = cmat_zero(field, n);
        for l in 1..=j {
            if cmat_is_zero(&amats[l]) {
                continue;
            }
            let t = cmat_mul(&amats[l], &ys[j - l], field);
            for (rr, rt) in rhs.iter_mut().zip(&t) {
                for (x, y) in rr.iter_mut().zip(rt) {
                    *x = &*x + y;
                }
            }
        }
        // Sylvester system j Y - A0 Y + Y A0 = rhs, unknown (s,t) at s*n+t.
        let jc = field.from_int(j as i64);
        let mut sys = vec![vec![field.zero(); n * n]; n * n];
        for r in 0..n {
            for c in 0..n {
                let row = &mut sys[r * n + c];
                row[r * n + c] = &row[r * n + c] + &jc;
                for s in 0..n {
                    if !a0[r][s].is_zero() {
                        row[s * n + c] = &row[s * n + c] - &a0[r][s];
                    }
                }
                for t in 0..n {
                    if !a0[t][c].is_zero() {
                        row[r * n + t] = &row[r * n + t] + &a0[t][c];
                    }
                }
            }
        }
        let b: Vec<Coefficient> = rhs.into_iter().flatten().collect();
        let x = solve_unique(sys, b, n * n, field.zero()).ok_or(Error::NotNilpotent)?;
        ys.push((0..n).map(|r| x[r * n..(r + 1) * n].to_vec()).collect());
    }
    Ok(SeriesMatrix::from_coeff_mats(field, &ys))
}

/// Smallest coefficient valuation of the operator's coefficients, for reports.
pub fn coefficient_valuation(op: &DiffOp) -> Valuation {
    op.coeffs()
        .iter()
        .map(|a| a.min_valuation(0..a.order()))
        .min()
        .unwrap_or(Valuation::Infinite)
}
