//! Square matrices of truncated series.

use rayon::prelude::*;

use crate::coeff::{Coefficient, Field, Valuation};
use crate::error::{Error, Result};
use crate::linalg::solve_unique;
use crate::series::TruncSeries;

/// Dense matrix of coefficients, row-major.
pub type CMat = Vec<Vec<Coefficient>>;

pub(crate) fn cmat_zero(field: Field, n: usize) -> CMat {
    vec![vec![field.zero(); n]; n]
}

pub(crate) fn cmat_identity(field: Field, n: usize) -> CMat {
    let mut m = cmat_zero(field, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = field.one();
    }
    m
}

pub(crate) fn cmat_mul(a: &CMat, b: &CMat, field: Field) -> CMat {
    let n = a.len();
    let mut out = cmat_zero(field, n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

pub(crate) fn cmat_is_zero(a: &CMat) -> bool {
    a.iter().flatten().all(Coefficient::is_zero)
}

pub(crate) fn cmat_inverse(a: &CMat, field: Field) -> Option<CMat> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![field.zero(); n];
        e[j] = field.one();
        cols.push(solve_square(a.clone(), e, field)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Solves a nonsingular square system; `None` when singular.
pub(crate) fn solve_square(a: CMat, b: Vec<Coefficient>, field: Field) -> Option<Vec<Coefficient>> {
    let n = b.len();
    solve_unique(a, b, n, field.zero())
}

/// `n x n` matrix of series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    field: Field,
    n: usize,
    entries: Vec<TruncSeries>,
}

impl SeriesMatrix {
    pub fn from_entries(field: Field, n: usize, entries: Vec<TruncSeries>) -> Result<SeriesMatrix> {
        if entries.len() != n * n {
            return Err(Error::BadParameters(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        Ok(SeriesMatrix { field, n, entries })
    }

    pub fn from_fn(field: Field, n: usize, mut f: impl FnMut(usize, usize) -> TruncSeries) -> SeriesMatrix {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        SeriesMatrix { field, n, entries }
    }

    pub fn identity(field: Field, n: usize, order: usize) -> SeriesMatrix {
        SeriesMatrix::from_fn(field, n, |i, j| {
            if i == j {
                TruncSeries::one(field, order)
            } else {
                TruncSeries::zero(field, order)
            }
        })
    }

    pub fn diag(field: Field, diag: &[Coefficient], order: usize) -> SeriesMatrix {
        SeriesMatrix::from_fn(field, diag.len(), |i, j| {
            if i == j {
                TruncSeries::constant(diag[i].clone(), order)
            } else {
                TruncSeries::zero(field, order)
            }
        })
    }

    /// Matrix whose coefficient of `z^j` is `mats[j]`.
    pub fn from_coeff_mats(field: Field, mats: &[CMat]) -> SeriesMatrix {
        let n = mats.first().map_or(0, Vec::len);
        SeriesMatrix::from_fn(field, n, |i, j| {
            TruncSeries::new(field, mats.iter().map(|m| m[i][j].clone()).collect())
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[TruncSeries] {
        &self.entries
    }

    /// Reliable order: the smallest entry order.
    pub fn order(&self) -> usize {
        self.entries.iter().map(TruncSeries::order).min().unwrap_or(0)
    }

    /// Coefficient matrix of `z^j`.
    pub fn coeff_mat(&self, j: usize) -> CMat {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c).coeff(j).clone()).collect())
            .collect()
    }

    pub fn constant_term(&self) -> CMat {
        self.coeff_mat(0)
    }

    fn map(&self, f: impl Fn(&TruncSeries) -> TruncSeries + Sync + Send) -> SeriesMatrix {
        SeriesMatrix {
            field: self.field,
            n: self.n,
            entries: self.entries.par_iter().map(f).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> SeriesMatrix {
        self.map(|s| s.truncate(order))
    }

    pub fn delta(&self) -> SeriesMatrix {
        self.map(TruncSeries::delta)
    }

    pub fn cartier(&self) -> SeriesMatrix {
        self.map(TruncSeries::cartier)
    }

    pub fn cartier_pow(&self, k: u32) -> SeriesMatrix {
        self.map(|s| s.cartier_pow(k))
    }

    pub fn subst_zpk_to(&self, k: u32, order: usize) -> SeriesMatrix {
        self.map(|s| s.subst_zpk_to(k, order))
    }

    pub fn scale(&self, c: &Coefficient) -> SeriesMatrix {
        self.map(|s| s.scale(c))
    }

    pub fn add(&self, other: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            field: self.field,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            field: self.field,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, other: &SeriesMatrix) -> SeriesMatrix {
        let n = self.n;
        let order = self.order().min(other.order());
        let entries = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (0..n).fold(TruncSeries::zero(self.field, order), |acc, l| {
                    let a = self.get(i, l);
                    let b = other.get(l, j);
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        acc.add(&a.mul(b))
                    }
                })
            })
            .collect();
        SeriesMatrix {
            field: self.field,
            n,
            entries,
        }
    }

    /// Right multiplication by a constant matrix.
    pub fn mul_const(&self, c: &CMat) -> SeriesMatrix {
        let n = self.n;
        let order = self.order();
        SeriesMatrix::from_fn(self.field, n, |i, j| {
            (0..n).fold(TruncSeries::zero(self.field, order), |acc, l| {
                if c[l][j].is_zero() {
                    acc
                } else {
                    acc.add(&self.get(i, l).scale(&c[l][j]))
                }
            })
        })
    }

    /// Left multiplication by a constant matrix.
    pub fn const_mul(&self, c: &CMat) -> SeriesMatrix {
        let n = self.n;
        let order = self.order();
        SeriesMatrix::from_fn(self.field, n, |i, j| {
            (0..n).fold(TruncSeries::zero(self.field, order), |acc, l| {
                if c[i][l].is_zero() {
                    acc
                } else {
                    acc.add(&self.get(l, j).scale(&c[i][l]))
                }
            })
        })
    }

    /// Inverse as a series matrix; requires an invertible constant term.
    pub fn invert(&self) -> Result<SeriesMatrix> {
        let order = self.order();
        let m0inv = cmat_inverse(&self.constant_term(), self.field).ok_or(Error::NotAUnit)?;
        let ms: Vec<CMat> = (0..order).map(|j| self.coeff_mat(j)).collect();
        let mut xs: Vec<CMat> = Vec::with_capacity(order);
        for j in 0..order {
            let mut acc = if j == 0 {
                cmat_identity(self.field, self.n)
            } else {
                cmat_zero(self.field, self.n)
            };
            for l in 1..=j {
                if cmat_is_zero(&ms[l]) {
                    continue;
                }
                let t = cmat_mul(&ms[l], &xs[j - l], self.field);
                for (ra, rt) in acc.iter_mut().zip(&t) {
                    for (x, y) in ra.iter_mut().zip(rt) {
                        *x = &*x - y;
                    }
                }
            }
            xs.push(cmat_mul(&m0inv, &acc, self.field));
        }
        Ok(SeriesMatrix::from_coeff_mats(self.field, &xs))
    }

    pub fn min_valuation(&self, upto: usize) -> Valuation {
        self.entries
            .iter()
            .map(|s| s.min_valuation(0..upto))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// First power of `z` at which some entry is nonzero, below `upto`.
    pub fn first_nonzero(&self, upto: usize) -> Option<usize> {
        (0..upto.min(self.order())).find(|&j| self.entries.iter().any(|s| !s.coeff(j).is_zero()))
    }
}
