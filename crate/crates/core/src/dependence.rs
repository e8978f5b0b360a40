//! Search for multiplicative relations `prod f_i^(a_i)` that are analytic
//! elements, certified modulo `pi^M` at finite truncation.
//!
//! A tuple is reported only when both the log-derivative combination
//! `sum a_i f_i'/f_i` and the product admit verified rational certificates.
//! Absence of a report is bounded evidence, nothing more.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{Field, Ramification};
use crate::error::{Error, Result};
use crate::rational::RationalFunction;
use crate::reconstruct::{admits_certificate, reconstruct, verify_certificate, CertificateReport};
use crate::series::TruncSeries;

/// `prod f_i^(a_i)` truncated to the smallest input order.
pub fn product_power(field: Field, fs: &[TruncSeries], exps: &[i64]) -> Result<TruncSeries> {
    if fs.len() != exps.len() {
        return Err(Error::BadParameters(format!("{} series but {} exponents", fs.len(), exps.len())));
    }
    let order = fs.iter().map(TruncSeries::order).min().unwrap_or(1);
    let mut acc = TruncSeries::one(field, order);
    for (f, &a) in fs.iter().zip(exps) {
        if f.order() > 0 && f.coeff(0).is_zero() {
            return Err(Error::NotAUnit);
        }
        if a != 0 {
            acc = acc.mul(&f.truncate(order).pow(a)?);
        }
    }
    Ok(acc)
}

/// A rational function in `K_0(z)` congruent to `g` modulo `pi^M`, if one
/// of degree `<= deg_bound` exists.
pub fn analytic_element_certificate(g: &TruncSeries, level: i64, deg_bound: usize) -> Option<RationalFunction> {
    reconstruct(g, level, deg_bound).ok().map(|c| c.rational)
}

#[derive(Clone, Debug)]
pub struct NamedSeries {
    pub name: String,
    pub series: TruncSeries,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub exp_bound: i64,
    pub level: i64,
    pub deg_bound: usize,
    /// Differentiate input `i` this many times before scanning.
    pub derivative_orders: Option<Vec<usize>>,
}

/// How a differentiated input was rescaled: `f^(r) = c z^v (1 + ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub name: String,
    pub derivative_order: usize,
    pub leading_exponent: usize,
    pub leading_coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundTuple {
    pub exponents: Vec<i64>,
    pub product_certificate: CertificateReport,
    pub logderiv_certificate: CertificateReport,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub directions: usize,
    pub tuples_tested: usize,
    pub screen_passed: usize,
    pub certified: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub inputs: Vec<String>,
    pub p: u64,
    pub ramification: Ramification,
    pub order: usize,
    pub params: ScanParams,
    pub screen_deg_bound: usize,
    pub normalization: Vec<Normalization>,
    pub found: Vec<FoundTuple>,
    pub stats: ScanStats,
    pub conclusion: String,
}

/// Primitive tuples in `[-b, b]^m` whose first nonzero entry is positive,
/// in lexicographic order.
pub fn primitive_directions(m: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-bound; m];
    if m == 0 || bound < 1 {
        return out;
    }
    loop {
        let lead = cur.iter().find(|&&x| x != 0).copied();
        let g = cur.iter().fold(0i64, |g, &x| g.gcd(&x));
        if lead.is_some_and(|x| x > 0) && g == 1 {
            out.push(cur.clone());
        }
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < bound {
                cur[i] += 1;
                break;
            }
            cur[i] = -bound;
        }
    }
}

fn prepare(inputs: &[NamedSeries], params: &ScanParams) -> Result<(Vec<TruncSeries>, Vec<Normalization>)> {
    let mut gs = Vec::with_capacity(inputs.len());
    let mut norms = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        let f = &input.series;
        let Some(orders) = &params.derivative_orders else {
            if f.order() == 0 || f.coeff(0).is_zero() {
                return Err(Error::NotAUnit);
            }
            gs.push(f.clone());
            continue;
        };
        let r = *orders
            .get(i)
            .ok_or_else(|| Error::BadParameters("one derivative order per input".into()))?;
        let d = (0..r).fold(f.clone(), |s, _| s.d_dz());
        let v = (0..d.order())
            .find(|&j| !d.coeff(j).is_zero())
            .ok_or_else(|| Error::BadParameters(format!("derivative {r} of {} vanishes to the truncation", input.name)))?;
        let c = d.coeff(v).clone();
        let inv = c.inv().expect("nonzero");
        gs.push(TruncSeries::new(f.field(), d.coeffs()[v..].to_vec()).scale(&inv));
        norms.push(Normalization {
            name: input.name.clone(),
            derivative_order: r,
            leading_exponent: v,
            leading_coefficient: c.to_string(),
        });
    }
    Ok((gs, norms))
}

fn combination(field: Field, logs: &[TruncSeries], a: &[i64]) -> TruncSeries {
    let order = logs.iter().map(TruncSeries::order).min().unwrap_or(0);
    logs.iter().zip(a).fold(TruncSeries::zero(field, order), |acc, (l, &x)| {
        if x == 0 {
            acc
        } else {
            acc.add(&l.scale(&field.from_int(x)))
        }
    })
}

/// Scans primitive directions `d` and their multiples `k d` inside the box;
/// the smallest certified multiple on each ray is reported.
pub fn kolchin_scan(inputs: &[NamedSeries], params: &ScanParams) -> Result<DependenceReport> {
    let Some(first) = inputs.first() else {
        return Err(Error::BadParameters("no input series".into()));
    };
    let field = first.series.field();
    if inputs.iter().any(|s| s.series.field() != field) {
        return Err(Error::BadContext("inputs live over different fields".into()));
    }
    if params.level < 1 {
        return Err(Error::BadParameters("level must be positive".into()));
    }
    let (gs, normalization) = prepare(inputs, params)?;
    let order = gs.iter().map(TruncSeries::order).min().unwrap_or(0);
    let gs: Vec<TruncSeries> = gs.iter().map(|g| g.truncate(order)).collect();
    let logs = gs.iter().map(TruncSeries::log_derivative).collect::<Result<Vec<_>>>()?;
    let screen_deg = (2 * params.deg_bound).min(order.saturating_sub(3) / 2);

    let dirs = primitive_directions(gs.len(), params.exp_bound);
    let results: Vec<(ScanStats, Option<FoundTuple>)> = dirs
        .par_iter()
        .map(|d| {
            let mut stats = ScanStats::default();
            let norm = d.iter().map(|x| x.abs()).max().unwrap_or(1);
            for k in 1..=params.exp_bound / norm {
                let a: Vec<i64> = d.iter().map(|x| k * x).collect();
                stats.tuples_tested += 1;
                let comb = combination(field, &logs, &a);
                if !admits_certificate(&comb, params.level, screen_deg) {
                    continue;
                }
                stats.screen_passed += 1;
                let Ok(prod) = product_power(field, &gs, &a) else { continue };
                let Ok(cert) = reconstruct(&prod, params.level, params.deg_bound) else { continue };
                let log_cert = cert
                    .rational
                    .log_derivative()
                    .and_then(|r| verify_certificate(&r, &comb, params.level, comb.order()))
                    .or_else(|_| reconstruct(&comb, params.level, screen_deg));
                let Ok(log_cert) = log_cert else { continue };
                stats.certified += 1;
                return (
                    stats,
                    Some(FoundTuple {
                        exponents: a,
                        product_certificate: cert.report("product"),
                        logderiv_certificate: log_cert.report("logderiv"),
                    }),
                );
            }
            (stats, None)
        })
        .collect();

    let mut stats = ScanStats {
        directions: dirs.len(),
        ..ScanStats::default()
    };
    let mut found = Vec::new();
    for (s, f) in results {
        stats.tuples_tested += s.tuples_tested;
        stats.screen_passed += s.screen_passed;
        stats.certified += s.certified;
        found.extend(f);
    }
    let conclusion = if found.is_empty() {
        format!(
            "no multiplicative relation with |a|_inf <= {}, certificate degree <= {}, modulo pi^{} to order {}; bounded evidence only",
            params.exp_bound, params.deg_bound, params.level, order
        )
    } else {
        format!("{} certified relation(s) modulo pi^{} to order {}", found.len(), params.level, order)
    };
    Ok(DependenceReport {
        inputs: inputs.iter().map(|s| s.name.clone()).collect(),
        p: field.prime(),
        ramification: field.ramification(),
        order,
        params: params.clone(),
        screen_deg_bound: screen_deg,
        normalization,
        found,
        stats,
        conclusion,
    })
}
