//! Frobenius antecedents `L_m` with their passage matrices, and the
//! integrality check on the unit solution.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Ramification, Valuation};
use crate::diffops::{uniform_part, DiffOp};
use crate::error::{Error, Result};
use crate::matrix::{cmat_zero, CMat, SeriesMatrix};
use crate::rational::RationalFunction;
use crate::reconstruct::{reconstruct, verify_certificate, Certificate, Route};
use crate::series::TruncSeries;

/// One level `m` of the antecedent chain.
#[derive(Clone, Debug)]
pub struct AntecedentLevel {
    pub level: u32,
    /// `L_m`, with coefficients reliable to `ceil(N / p^m)`.
    pub operator: DiffOp,
    /// Companion matrix `A_m`.
    pub companion: SeriesMatrix,
    /// Passage matrix `H~_m`, reliable to `checked_order`.
    pub passage: SeriesMatrix,
    pub checked_order: usize,
    /// Valuation of `delta H - A H + p^m H A_m(z^(p^m))`; `inf` when it vanishes.
    pub residual_valuation: Valuation,
    pub min_entry_valuation: Valuation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: u32,
    pub checked_order: usize,
    pub operator_order: usize,
    pub passage_at_zero: Vec<String>,
    pub residual_valuation: Valuation,
    pub min_entry_valuation: Valuation,
    /// Leading coefficients of `a_1, ..., a_n` of `L_m`.
    pub operator_head: Vec<Vec<String>>,
}

impl AntecedentLevel {
    pub fn report(&self, head: usize) -> LevelReport {
        let n = self.passage.dim();
        LevelReport {
            level: self.level,
            checked_order: self.checked_order,
            operator_order: self.operator.trunc_order(),
            passage_at_zero: (0..n).map(|i| self.passage.get(i, i).coeff(0).to_string()).collect(),
            residual_valuation: self.residual_valuation,
            min_entry_valuation: self.min_entry_valuation,
            operator_head: self
                .operator
                .coeffs()
                .iter()
                .map(|a| a.coeffs().iter().take(head).map(ToString::to_string).collect())
                .collect(),
        }
    }
}

fn p_power(field: Field, k: u32) -> Coefficient {
    field.from_bigint(num_traits::pow(BigInt::from(field.prime()), k as usize))
}

/// `diag(1, q, q^2, ...)` with `q = p^m`.
fn scaling(field: Field, n: usize, m: u32) -> CMat {
    let mut d = cmat_zero(field, n);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = p_power(field, m * i as u32);
    }
    d
}

fn scaling_inv(field: Field, n: usize, m: u32) -> CMat {
    let mut d = cmat_zero(field, n);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = p_power(field, m * i as u32).inv().expect("nonzero");
    }
    d
}

fn verify_zero(residual: &SeriesMatrix, identity: &str, upto: usize) -> Result<Valuation> {
    match residual.first_nonzero(upto) {
        Some(order) => Err(Error::VerificationFailed {
            identity: identity.into(),
            order,
        }),
        None => Ok(Valuation::Infinite),
    }
}

/// One antecedent step: returns `L_1` and `H~_1` (reliable to `order`).
fn step(op: &DiffOp, order: usize) -> Result<(DiffOp, SeriesMatrix)> {
    if let Some(index) = op.mom_violation() {
        return Err(Error::NotMom { index });
    }
    let field = op.field();
    let n = op.order();
    let order = order.min(op.trunc_order());
    let a = op.companion().truncate(order);
    let y = uniform_part(&a, order)?;
    let ly = y.cartier();

    let inv_p = field.p().inv().expect("p != 0");
    let a0: CMat = a
        .constant_term()
        .iter()
        .map(|row| row.iter().map(|c| c * &inv_p).collect())
        .collect();
    let f = ly.delta().add(&ly.mul_const(&a0)).mul(&ly.invert()?);

    // D^-1 F D is the companion matrix of L_1.
    let g = f.const_mul(&scaling_inv(field, n, 1)).mul_const(&scaling(field, n, 1));
    let g_order = g.order();
    for i in 0..n.saturating_sub(1) {
        for j in 0..n {
            let expected = if j == i + 1 {
                TruncSeries::one(field, g_order)
            } else {
                TruncSeries::zero(field, g_order)
            };
            if let Some(k) = g.get(i, j).sub(&expected).first_below(i64::MAX, g_order) {
                return Err(Error::VerificationFailed {
                    identity: "D^-1 F D has companion shape".into(),
                    order: k,
                });
            }
        }
    }
    let coeffs = (1..=n).map(|k| g.get(n - 1, n - k).neg()).collect();
    let l1 = DiffOp::from_monic_series(field, coeffs)?;

    let h = y
        .mul(&ly.subst_zpk_to(1, order).invert()?)
        .mul_const(&scaling(field, n, 1));
    Ok((l1, h))
}

/// The first antecedent `L_1` with all level-1 identities verified.
pub fn antecedent_step(op: &DiffOp, order: usize) -> Result<AntecedentLevel> {
    let mut chain = antecedent_chain(op, 1, order)?;
    Ok(chain.remove(0))
}

/// Levels `1..=levels` of the antecedent chain, each verified.
pub fn antecedent_chain(op: &DiffOp, levels: u32, order: usize) -> Result<Vec<AntecedentLevel>> {
    if let Some(index) = op.mom_violation() {
        return Err(Error::NotMom { index });
    }
    if levels == 0 {
        return Ok(Vec::new());
    }
    let field = op.field();
    let p = field.prime() as usize;
    let n = op.order();
    let order = order.min(op.trunc_order());
    let pm = p
        .checked_pow(levels)
        .ok_or(Error::BadParameters("p^m overflows".into()))?;
    if order.div_ceil(pm) < 2 {
        return Err(Error::OrderExhausted {
            needed: pm + 1,
            available: order,
        });
    }

    let a = op.companion().truncate(order);
    let y = uniform_part(&a, order)?;
    let f = op.unit_solution(order)?;

    let mut out: Vec<AntecedentLevel> = Vec::with_capacity(levels as usize);
    let mut current = op.clone();
    let mut passage = SeriesMatrix::identity(field, n, order);
    for m in 1..=levels {
        let level_order = order.div_ceil(p.pow(m - 1));
        let (next, g) = step(&current, level_order)?;
        passage = passage.mul(&g.subst_zpk_to(m - 1, order));

        let am = next.companion();
        let pm_c = p_power(field, m);
        let residual = passage
            .delta()
            .sub(&a.mul(&passage))
            .add(&passage.mul(&am.subst_zpk_to(m, order)).scale(&pm_c));
        let residual_valuation = verify_zero(
            &residual,
            &format!("delta H - A H + p^{m} H A_{m}(z^(p^{m})) = 0"),
            order,
        )?;

        // Closed form of the same passage matrix.
        let direct = y
            .mul(&y.cartier_pow(m).subst_zpk_to(m, order).invert()?)
            .mul_const(&scaling(field, n, m));
        verify_zero(&direct.sub(&passage), "chain product equals closed form", order)?;

        let lf = f.cartier_pow(m);
        let annihilated = next.apply(&lf);
        if let Some(k) = annihilated.first_below(i64::MAX, annihilated.order()) {
            return Err(Error::VerificationFailed {
                identity: format!("L_{m} annihilates Cartier^{m}(f)"),
                order: k,
            });
        }
        let sol = next.unit_solution(lf.order())?;
        if let Some(k) = sol.sub(&lf).first_below(i64::MAX, sol.order()) {
            return Err(Error::VerificationFailed {
                identity: format!("unit solution of L_{m} equals Cartier^{m}(f)"),
                order: k,
            });
        }

        let d = scaling(field, n, m);
        if passage.constant_term() != d {
            return Err(Error::VerificationFailed {
                identity: format!("H_{m}(0) = diag(1, p^{m}, ...)"),
                order: 0,
            });
        }
        let min_entry_valuation = passage.min_valuation(order);
        if !min_entry_valuation.is_at_least(0) {
            let k = (0..order)
                .find(|&j| passage.entries().iter().any(|s| !s.coeff(j).valuation().is_at_least(0)))
                .unwrap_or(0);
            return Err(Error::VerificationFailed {
                identity: format!("entries of H_{m} are integral"),
                order: k,
            });
        }

        out.push(AntecedentLevel {
            level: m,
            operator: next.clone(),
            companion: am,
            passage: passage.clone(),
            checked_order: order,
            residual_valuation,
            min_entry_valuation,
        });
        current = next;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub p: u64,
    pub ramification: Ramification,
    pub level: u32,
    /// Coefficients `f_1 .. f_(checked_upto - 1)` were examined.
    pub checked_upto: usize,
    pub min_valuation: Valuation,
    pub first_failure: Option<usize>,
    pub pass: bool,
    pub valuations: Vec<Valuation>,
}

/// Valuations of `f_1, ..., f_k` with `k = min(p^m - 1, N - 1)`.
pub fn integrality_check(f: &TruncSeries, m: u32) -> Result<IntegralityReport> {
    let field = f.field();
    if f.order() == 0 || !f.coeff(0).is_one() {
        return Err(Error::BadParameters("integrality check needs f(0) = 1".into()));
    }
    let bound = (field.prime() as usize).checked_pow(m).unwrap_or(usize::MAX);
    let upto = bound.min(f.order());
    let valuations: Vec<Valuation> = (1..upto).map(|j| f.coeff(j).valuation()).collect();
    let first_failure = valuations.iter().position(|v| !v.is_at_least(0)).map(|i| i + 1);
    Ok(IntegralityReport {
        p: field.prime(),
        ramification: field.ramification(),
        level: m,
        checked_upto: upto,
        min_valuation: valuations.iter().copied().min().unwrap_or(Valuation::Infinite),
        first_failure,
        pass: first_failure.is_none(),
        valuations,
    })
}

fn require_unit_start(f: &TruncSeries) -> Result<()> {
    if f.order() == 0 || !f.coeff(0).is_one() {
        return Err(Error::BadParameters("certificate needs f(0) = 1".into()));
    }
    Ok(())
}

fn require_norm_one(c: Certificate) -> Result<Certificate> {
    if c.rational.gauss_valuation() != Valuation::Finite(0) {
        return Err(Error::VerificationFailed {
            identity: "certificate has Gauss norm 1".into(),
            order: 0,
        });
    }
    Ok(c)
}

/// `D_m` with `D_m(z) Cartier(f)(z^p) == f mod pi^m`.
pub fn ratio_certificate(f: &TruncSeries, m: i64, deg_bound: usize) -> Result<Certificate> {
    require_unit_start(f)?;
    let order = f.order();
    let lifted = f.cartier().subst_zpk_to(1, order);
    let target = f.mul(&lifted.invert_unit()?);
    require_norm_one(reconstruct(&target, m, deg_bound)?)
}

/// `Q_k` with `Q_k == Cartier^(kh)(f) / f mod pi^(kh)`.
pub fn period_ratio_certificate(f: &TruncSeries, h: u32, k: u32, deg_bound: usize) -> Result<Certificate> {
    require_unit_start(f)?;
    let level = (h * k) as i64;
    if level == 0 {
        return Ok(trivial(f));
    }
    let lam = f.cartier_pow(h * k);
    if lam.order() < 2 {
        return Err(Error::OrderExhausted {
            needed: (f.field().prime() as usize).saturating_pow(h * k) + 1,
            available: f.order(),
        });
    }
    let target = lam.mul(&f.truncate(lam.order()).invert_unit()?);
    require_norm_one(reconstruct(&target, level, deg_bound)?)
}

/// `B_(kh)` with `f == B_(kh)(z) f(z^(p^(kh))) mod pi^(kh)`.
pub fn frobenius_ratio_certificate(f: &TruncSeries, h: u32, k: u32, deg_bound: usize) -> Result<Certificate> {
    require_unit_start(f)?;
    let level = (h * k) as i64;
    if level == 0 {
        return Ok(trivial(f));
    }
    let lifted = f.subst_zpk_to(h * k, f.order());
    let target = f.mul(&lifted.invert_unit()?);
    require_norm_one(reconstruct(&target, level, deg_bound)?)
}

/// `B_((k+1)h)(z) / B_(kh)(z^(p^h))`, which approximates `f / f(z^(p^h))`.
pub fn frobenius_ratio_quotient(f: &TruncSeries, h: u32, k: u32, deg_bound: usize) -> Result<RationalFunction> {
    let next = frobenius_ratio_certificate(f, h, k + 1, deg_bound)?;
    let prev = frobenius_ratio_certificate(f, h, k, deg_bound)?;
    next.rational.div(&prev.rational.subst_zpk(h))
}

fn trivial(f: &TruncSeries) -> Certificate {
    Certificate {
        rational: RationalFunction::one(f.field()),
        level: 0,
        verified_order: f.order(),
        min_residual_valuation: Valuation::Finite(0),
        route: Route::ExactPade,
    }
}

/// Rational `R` with denominator in `K_0(z)` and `R == f'/f mod pi^level`.
///
/// Tries the log-derivative directly, then falls back to `B'/B` for the
/// Frobenius ratio certificate at `k = ceil(level/h)`.
pub fn logderiv_certificate(f: &TruncSeries, h: u32, level: i64, deg_bound: usize) -> Result<Certificate> {
    require_unit_start(f)?;
    let target = f.log_derivative()?;
    match reconstruct(&target, level, deg_bound) {
        Ok(c) => Ok(c),
        Err(Error::ReconstructionFailed { .. }) if h > 0 => {
            let k = (level as u32).div_ceil(h);
            let b = frobenius_ratio_certificate(f, h, k, deg_bound)?;
            let r = b.rational.log_derivative()?;
            verify_certificate(&r, &target, level, target.order())
                .map_err(|_| Error::ReconstructionFailed { deg_bound })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, SeriesSpec};

    fn hyp_half(p: u64, order: usize) -> DiffOp {
        let spec = SeriesSpec::new("hyp:1/2,1/2".parse().unwrap(), Field::unramified(p).unwrap(), order);
        build(&spec).unwrap().operator.unwrap()
    }

    #[test]
    fn level_one_for_hypergeometric() {
        let lvl = antecedent_step(&hyp_half(5, 40), 40).unwrap();
        let f = Field::unramified(5).unwrap();
        assert_eq!(lvl.passage.constant_term(), vec![vec![f.one(), f.zero()], vec![f.zero(), f.from_int(5)]]);
        assert!(lvl.min_entry_valuation.is_at_least(0));
        assert_eq!(lvl.residual_valuation, Valuation::Infinite);
    }

    #[test]
    fn zero_levels_is_empty() {
        assert!(antecedent_chain(&hyp_half(5, 20), 0, 20).unwrap().is_empty());
    }

    #[test]
    fn too_short_for_level() {
        assert!(matches!(
            antecedent_chain(&hyp_half(5, 20), 2, 20),
            Err(Error::OrderExhausted { .. })
        ));
    }

    #[test]
    fn non_mom_operator() {
        let f = Field::unramified(3).unwrap();
        let op = DiffOp::monicize(f, &[(0, vec![f.from_int(-1), f.one()])], 10).unwrap();
        assert_eq!(antecedent_step(&op, 10).unwrap_err(), Error::NotMom { index: 1 });
    }

    #[test]
    fn integrality_negative_control() {
        let spec = SeriesSpec::new("hyp:1/2".parse().unwrap(), Field::unramified(2).unwrap(), 10);
        let s = build(&spec).unwrap().series;
        let r = integrality_check(&s, 3).unwrap();
        assert_eq!(r.first_failure, Some(1));
        assert_eq!(r.valuations[0], Valuation::Finite(-1));
    }
}
