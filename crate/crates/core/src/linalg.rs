//! Dense exact linear algebra over a field.

#![allow(clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeff::Coefficient;

/// Minimal field interface shared by `BigRational` and `Coefficient`.
pub(crate) trait Scalar: Clone {
    fn is_zero_s(&self) -> bool;
    fn sub_s(&self, o: &Self) -> Self;
    fn mul_s(&self, o: &Self) -> Self;
    fn inv_s(&self) -> Self;
}

impl Scalar for BigRational {
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn inv_s(&self) -> Self {
        BigRational::one() / self
    }
}

impl Scalar for Coefficient {
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn inv_s(&self) -> Self {
        self.inv().expect("pivot is nonzero")
    }
}

/// Solves `M x = b` for an arbitrary rectangular `M`.
///
/// Returns some solution (free variables set to zero), or `None` when the
/// system is inconsistent.
pub(crate) fn solve_any<T: Scalar>(m: Vec<Vec<T>>, b: Vec<T>, ncols: usize, zero: T) -> Option<Vec<T>> {
    solve_with_rank(m, b, ncols, zero).map(|(x, _)| x)
}

/// Solves `M x = b` only when the solution is unique.
pub(crate) fn solve_unique<T: Scalar>(m: Vec<Vec<T>>, b: Vec<T>, ncols: usize, zero: T) -> Option<Vec<T>> {
    solve_with_rank(m, b, ncols, zero).and_then(|(x, rank)| (rank == ncols).then_some(x))
}

fn solve_with_rank<T: Scalar>(mut m: Vec<Vec<T>>, mut b: Vec<T>, ncols: usize, zero: T) -> Option<(Vec<T>, usize)> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero_s()) else {
            continue;
        };
        m.swap(r, pr);
        b.swap(r, pr);
        let inv = m[r][c].inv_s();
        for k in c..ncols {
            m[r][k] = m[r][k].mul_s(&inv);
        }
        b[r] = b[r].mul_s(&inv);
        for i in 0..rows {
            if i == r || m[i][c].is_zero_s() {
                continue;
            }
            let factor = m[i][c].clone();
            for k in c..ncols {
                let t = factor.mul_s(&m[r][k]);
                m[i][k] = m[i][k].sub_s(&t);
            }
            let t = factor.mul_s(&b[r]);
            b[i] = b[i].sub_s(&t);
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero_s()) {
        return None;
    }
    let mut x = vec![zero; ncols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = b[row].clone();
    }
    Some((x, pivots.len()))
}

/// Solves a square nonsingular rational system.
pub(crate) fn solve_rational(m: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    solve_unique(m, b, n, BigRational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn solves_small_system() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_rational(m, vec![q(3), q(5)]).unwrap();
        assert_eq!(x, vec![BigRational::new(4.into(), 5.into()), BigRational::new(7.into(), 5.into())]);
    }

    #[test]
    fn detects_inconsistency() {
        let m = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert!(solve_any(m.clone(), vec![q(1), q(3)], 2, q(0)).is_none());
        assert!(solve_any(m, vec![q(1), q(2)], 2, q(0)).is_some());
    }
}
