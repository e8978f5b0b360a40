//! Rational reconstruction of truncated series modulo `pi^m`.
//!
//! The denominator degree is located over `O_K / pi^m`, where linear
//! algebra stays in machine words. Then Padé approximants with that
//! denominator degree are tried over exact coefficients. A certificate is
//! accepted only after the congruence is re-verified on exact coefficients.

use serde::{Deserialize, Serialize};

use crate::coeff::{Coefficient, Field, Valuation};
use crate::error::{Error, Result};
use crate::linalg::solve_any;
use crate::rational::{poly_trim, RationalFunction, RationalJson};
use crate::residue::{Residue, ResidueRing};
use crate::series::TruncSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Padé approximant over exact coefficients.
    ExactPade,
    /// Symmetric lift of a solution over `O_K / pi^m`.
    Modular,
}

/// A rational function verified congruent to a target series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub rational: RationalFunction,
    pub level: i64,
    pub verified_order: usize,
    pub min_residual_valuation: Valuation,
    pub route: Route,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub kind: String,
    pub level: i64,
    pub rational: RationalJson,
    pub display: String,
    pub num_degree: usize,
    pub den_degree: usize,
    pub verified_order: usize,
    pub min_residual_valuation: Valuation,
    pub route: Route,
}

impl Certificate {
    pub fn report(&self, kind: &str) -> CertificateReport {
        CertificateReport {
            kind: kind.into(),
            level: self.level,
            rational: self.rational.to_json(),
            display: self.rational.to_string(),
            num_degree: self.rational.num_degree(),
            den_degree: self.rational.den_degree(),
            verified_order: self.verified_order,
            min_residual_valuation: self.min_residual_valuation,
            route: self.route,
        }
    }
}

/// Checks `r == target mod pi^m` on `z^0 .. z^(upto-1)` with exact arithmetic.
///
/// `r` must lie in `K_0(z)`; its expansion is then a power series.
pub fn verify_certificate(r: &RationalFunction, target: &TruncSeries, m: i64, upto: usize) -> Result<Certificate> {
    if !r.in_k0() {
        return Err(Error::NotInK0);
    }
    let upto = upto.min(target.order());
    let residual = target.truncate(upto).sub(&r.expand(upto)?);
    if let Some(order) = residual.first_below(m, upto) {
        return Err(Error::VerificationFailed {
            identity: "certificate congruence".into(),
            order,
        });
    }
    Ok(Certificate {
        rational: r.clone(),
        level: m,
        verified_order: upto,
        min_residual_valuation: residual.min_valuation(0..upto),
        route: Route::ExactPade,
    })
}

struct Modular<'a> {
    ring: ResidueRing,
    t: Vec<Residue>,
    field: Field,
    target: &'a TruncSeries,
}

impl Modular<'_> {
    fn t(&self, j: isize) -> Residue {
        if j < 0 {
            self.ring.zero()
        } else {
            self.t[j as usize].clone()
        }
    }

    /// Denominator `1 + q_1 z + ... + q_b z^b` making `t*Q` a polynomial of
    /// degree `<= a` modulo `pi^m`.
    fn denominator(&self, a: usize, b: usize) -> Option<Vec<Residue>> {
        let rows: Vec<Vec<Residue>> = (a + 1..self.t.len())
            .map(|j| (1..=b).map(|i| self.t(j as isize - i as isize)).collect())
            .collect();
        let rhs: Vec<Residue> = (a + 1..self.t.len()).map(|j| self.ring.neg(&self.t[j])).collect();
        let q = self.ring.solve(rows, rhs, b)?;
        let mut out = vec![self.ring.one()];
        out.extend(q);
        Some(out)
    }

    /// `t*Q mod z^(a+1)`.
    fn numerator(&self, q: &[Residue], a: usize) -> Vec<Residue> {
        (0..=a)
            .map(|j| {
                q.iter().enumerate().take(j + 1).fold(self.ring.zero(), |acc, (i, qi)| {
                    self.ring.add(&acc, &self.ring.mul(qi, &self.t[j - i]))
                })
            })
            .collect()
    }

    /// Residue-level test of `t*Q - P == 0 mod pi^m`.
    fn congruent(&self, num: &[Coefficient], den: &[Coefficient]) -> bool {
        let conv = |v: &[Coefficient]| v.iter().map(|c| self.ring.reduce(c)).collect::<Result<Vec<_>>>();
        let (Ok(p), Ok(q)) = (conv(num), conv(den)) else {
            return false;
        };
        (0..self.t.len()).all(|j| {
            let mut acc = p.get(j).cloned().unwrap_or_else(|| self.ring.zero());
            for (i, qi) in q.iter().enumerate().take(j + 1) {
                acc = self.ring.sub(&acc, &self.ring.mul(qi, &self.t[j - i]));
            }
            self.ring.is_zero(&acc)
        })
    }

    /// Exact `[a/b]` Padé approximant of the target, `Q(0) = 1`.
    fn exact_pade(&self, a: usize, b: usize) -> Option<RationalFunction> {
        let tc = |j: isize| {
            if j < 0 {
                self.field.zero()
            } else {
                self.target.coeff(j as usize).clone()
            }
        };
        let q: Vec<Coefficient> = if b == 0 {
            Vec::new()
        } else {
            let m = (a + 1..=a + b)
                .map(|j| (1..=b).map(|i| tc(j as isize - i as isize)).collect())
                .collect();
            let rhs = (a + 1..=a + b).map(|j| -tc(j as isize)).collect();
            solve_any(m, rhs, b, self.field.zero())?
        };
        let mut den = vec![self.field.one()];
        den.extend(q);
        let num: Vec<Coefficient> = (0..=a)
            .map(|j| {
                den.iter().enumerate().take(j + 1).fold(self.field.zero(), |acc, (i, qi)| {
                    if qi.is_zero() {
                        acc
                    } else {
                        &acc + &(qi * &tc((j - i) as isize))
                    }
                })
            })
            .collect();
        RationalFunction::new(self.field, num, den).ok()
    }
}

/// Finds `R` in `K_0(z)`, both degrees `<= deg_bound`, with `R == target mod pi^m`
/// on every reliable coefficient.
pub fn reconstruct(target: &TruncSeries, m: i64, deg_bound: usize) -> Result<Certificate> {
    if m < 1 {
        return Err(Error::BadParameters(format!("level {m} must be positive")));
    }
    let upto = target.order();
    let needed = 2 * deg_bound + 2;
    if upto < needed {
        return Err(Error::OrderExhausted { needed, available: upto });
    }
    let field = target.field();
    let ring = ResidueRing::new(field, m)?;
    let t = target
        .coeffs()
        .iter()
        .map(|c| ring.reduce(c))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::ReconstructionFailed { deg_bound })?;
    let md = Modular { ring, t, field, target };

    let (b_min, q_mod) = (0..=deg_bound)
        .find_map(|b| md.denominator(deg_bound, b).map(|q| (b, q)))
        .ok_or(Error::ReconstructionFailed { deg_bound })?;

    for a in 0..=deg_bound {
        let Some(r) = md.exact_pade(a, b_min) else { continue };
        if !r.in_k0() || !md.congruent(r.num(), r.den()) {
            continue;
        }
        if let Ok(cert) = verify_certificate(&r, target, m, upto) {
            return Ok(cert);
        }
    }

    let p_mod = md.numerator(&q_mod, deg_bound);
    let lift = |v: &[Residue]| poly_trim(v.iter().map(|x| md.ring.lift(x)).collect());
    let r = RationalFunction::new(field, lift(&p_mod), lift(&q_mod))?;
    let mut cert = verify_certificate(&r, target, m, upto)?;
    cert.route = Route::Modular;
    Ok(cert)
}

/// Like [`reconstruct`], doubling the degree bound from `start` up to `cap`.
pub fn reconstruct_doubling(target: &TruncSeries, m: i64, start: usize, cap: usize) -> Result<Certificate> {
    let mut d = start.max(1);
    loop {
        let d_eff = d.min(cap);
        match reconstruct(target, m, d_eff) {
            Ok(c) => return Ok(c),
            Err(Error::ReconstructionFailed { .. }) if d_eff < cap => d *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Fast existence test: some `R` with degrees `<= deg_bound` exists modulo `pi^m`.
pub(crate) fn admits_certificate(target: &TruncSeries, m: i64, deg_bound: usize) -> bool {
    if target.order() < 2 * deg_bound + 2 {
        return false;
    }
    let Ok(ring) = ResidueRing::new(target.field(), m) else {
        return false;
    };
    let Ok(t) = target.coeffs().iter().map(|c| ring.reduce(c)).collect::<Result<Vec<_>>>() else {
        return false;
    };
    let md = Modular {
        ring,
        t,
        field: target.field(),
        target,
    };
    (0..=deg_bound).any(|b| md.denominator(deg_bound, b).is_some())
}
