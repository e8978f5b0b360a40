//! Machine-word arithmetic in the chain ring `O_K / pi^m`.
//!
//! Used by the modular reconstruction route, where exact rationals would
//! blow up. Coordinates are kept modulo `P = p^ceil(m/e)`, which is a
//! multiple of every per-coordinate modulus `p^ceil((m-i)/e)`.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::coeff::{mod_inverse_big, Coefficient, Field};
use crate::error::{Error, Result};

pub(crate) type Residue = Vec<i128>;

#[derive(Clone, Debug)]
pub(crate) struct ResidueRing {
    field: Field,
    p: i128,
    e: usize,
    level: i64,
    modulus: i128,
    comp_mod: Vec<i128>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    if a <= 0 {
        0
    } else {
        (a + b - 1) / b
    }
}

fn mod_inv_i128(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m))
}

impl ResidueRing {
    pub(crate) fn new(field: Field, level: i64) -> Result<ResidueRing> {
        let e = field.e();
        let p = field.prime() as i128;
        let k = ceil_div(level, e as i64).max(1);
        let mut modulus: i128 = 1;
        for _ in 0..k {
            modulus = modulus.checked_mul(p).ok_or(Error::LevelTooLarge(level))?;
            if modulus >= 1 << 62 {
                return Err(Error::LevelTooLarge(level));
            }
        }
        let comp_mod = (0..e)
            .map(|i| p.pow(ceil_div(level - i as i64, e as i64) as u32))
            .collect();
        Ok(ResidueRing {
            field,
            p,
            e,
            level,
            modulus,
            comp_mod,
        })
    }

    pub(crate) fn zero(&self) -> Residue {
        vec![0; self.e]
    }

    pub(crate) fn one(&self) -> Residue {
        let mut r = self.zero();
        r[0] = 1 % self.modulus;
        r
    }

    fn m(&self, x: i128) -> i128 {
        x.rem_euclid(self.modulus)
    }

    pub(crate) fn add(&self, a: &Residue, b: &Residue) -> Residue {
        a.iter().zip(b).map(|(x, y)| self.m(x + y)).collect()
    }

    pub(crate) fn sub(&self, a: &Residue, b: &Residue) -> Residue {
        a.iter().zip(b).map(|(x, y)| self.m(x - y)).collect()
    }

    pub(crate) fn neg(&self, a: &Residue) -> Residue {
        a.iter().map(|x| self.m(-x)).collect()
    }

    pub(crate) fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        let e = self.e;
        if e == 1 {
            return vec![self.m(a[0] * b[0])];
        }
        let wrap = self.field.relation_sign() as i128 * self.p;
        let mut out = vec![0i128; e];
        for i in 0..e {
            if a[i] == 0 {
                continue;
            }
            for j in 0..e {
                if b[j] == 0 {
                    continue;
                }
                let t = self.m(a[i] * b[j]);
                let k = i + j;
                if k < e {
                    out[k] = self.m(out[k] + t);
                } else {
                    out[k - e] = self.m(out[k - e] + self.m(t * wrap));
                }
            }
        }
        out
    }

    /// Valuation capped at the level (the level stands for zero).
    pub(crate) fn valuation(&self, a: &Residue) -> i64 {
        let mut best = self.level;
        for (i, &c) in a.iter().enumerate() {
            let c = c.rem_euclid(self.comp_mod[i]);
            if c == 0 {
                continue;
            }
            let mut v = 0i64;
            let mut c = c;
            while c % self.p == 0 {
                c /= self.p;
                v += 1;
            }
            best = best.min(self.e as i64 * v + i as i64);
        }
        best
    }

    pub(crate) fn is_zero(&self, a: &Residue) -> bool {
        self.valuation(a) >= self.level
    }

    /// Exact division of the representative by `pi^k`; needs `v(a) >= k`.
    pub(crate) fn div_pi_pow(&self, a: &Residue, k: i64) -> Residue {
        let mut cur = a.clone();
        let sign = self.field.relation_sign() as i128;
        for _ in 0..k {
            let c0 = cur[0];
            debug_assert_eq!(c0 % self.p, 0);
            let mut next = vec![0i128; self.e];
            next[..self.e - 1].copy_from_slice(&cur[1..]);
            next[self.e - 1] = self.m(sign * (c0 / self.p));
            cur = next;
        }
        cur
    }

    /// Inverse of a unit, by Newton iteration from the residue-field inverse.
    pub(crate) fn inv_unit(&self, u: &Residue) -> Residue {
        let x0 = mod_inv_i128(u[0], self.modulus).expect("unit has invertible constant coordinate");
        let mut x = self.zero();
        x[0] = x0;
        let two = {
            let mut t = self.zero();
            t[0] = self.m(2);
            t
        };
        for _ in 0..64 {
            let ux = self.mul(u, &x);
            if ux.iter().enumerate().all(|(i, &c)| c == if i == 0 { 1 % self.modulus } else { 0 }) {
                break;
            }
            x = self.mul(&x, &self.sub(&two, &ux));
        }
        x
    }

    pub(crate) fn reduce(&self, c: &Coefficient) -> Result<Residue> {
        if let Some(v) = c.valuation().finite() {
            if v < 0 {
                return Err(Error::NegativeValuation(v));
            }
        }
        let modulus = BigInt::from(self.modulus);
        c.comps()
            .iter()
            .map(|q| {
                if q.is_zero() {
                    return Ok(0);
                }
                let inv = mod_inverse_big(q.denom(), &modulus).ok_or(Error::NegativeValuation(-1))?;
                let r = (q.numer() * inv).mod_floor(&modulus);
                Ok(r.to_i128().expect("residue fits"))
            })
            .collect()
    }

    /// Symmetric lift of each canonical coordinate to an exact element.
    pub(crate) fn lift(&self, a: &Residue) -> Coefficient {
        let comps = a
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let md = self.comp_mod[i];
                let mut r = c.rem_euclid(md);
                if r > md / 2 {
                    r -= md;
                }
                BigRational::from_integer(BigInt::from(r))
            })
            .collect();
        self.field.from_comps(comps).expect("component count matches")
    }

    /// Solves `M x = b` over `O_K / pi^m`, or reports inconsistency.
    pub(crate) fn solve(&self, mut a: Vec<Vec<Residue>>, mut b: Vec<Residue>, ncols: usize) -> Option<Vec<Residue>> {
        let rows = a.len();
        let mut perm: Vec<usize> = (0..ncols).collect();
        let mut pivots: Vec<(i64, Residue)> = Vec::new();
        let steps = rows.min(ncols);
        for step in 0..steps {
            let mut best: Option<(usize, usize, i64)> = None;
            for r in step..rows {
                for c in step..ncols {
                    let v = self.valuation(&a[r][c]);
                    if v < self.level && best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                        if v == 0 {
                            break;
                        }
                    }
                }
                if matches!(best, Some((_, _, 0))) {
                    break;
                }
            }
            let Some((r, c, v)) = best else { break };
            a.swap(step, r);
            b.swap(step, r);
            if c != step {
                for row in a.iter_mut() {
                    row.swap(step, c);
                }
                perm.swap(step, c);
            }
            let unit = self.div_pi_pow(&a[step][step], v);
            let uinv = self.inv_unit(&unit);
            for r2 in step + 1..rows {
                if self.is_zero(&a[r2][step]) {
                    continue;
                }
                let y = self.div_pi_pow(&a[r2][step], v);
                let factor = self.mul(&y, &uinv);
                for k in step..ncols {
                    let t = self.mul(&factor, &a[step][k]);
                    a[r2][k] = self.sub(&a[r2][k], &t);
                }
                let t = self.mul(&factor, &b[step]);
                b[r2] = self.sub(&b[r2], &t);
            }
            pivots.push((v, uinv));
        }
        let rank = pivots.len();
        if b[rank..].iter().any(|x| !self.is_zero(x)) {
            return None;
        }
        let mut x = vec![self.zero(); ncols];
        for step in (0..rank).rev() {
            let (v, ref uinv) = pivots[step];
            let mut rhs = b[step].clone();
            for k in step + 1..ncols {
                let t = self.mul(&a[step][k], &x[k]);
                rhs = self.sub(&rhs, &t);
            }
            if self.valuation(&rhs) < v {
                return None;
            }
            x[step] = self.mul(&self.div_pi_pow(&rhs, v), uinv);
        }
        let mut out = vec![self.zero(); ncols];
        for (pos, &orig) in perm.iter().enumerate() {
            out[orig] = x[pos].clone();
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_inverse_round_trips() {
        for field in [Field::unramified(5).unwrap(), Field::dwork(5).unwrap(), Field::dwork(3).unwrap()] {
            let ring = ResidueRing::new(field, 7).unwrap();
            let u = ring.reduce(&field.parse("2 + 3*pi").unwrap()).unwrap();
            let prod = ring.mul(&u, &ring.inv_unit(&u));
            assert!(ring.is_zero(&ring.sub(&prod, &ring.one())));
        }
    }

    #[test]
    fn valuation_matches_exact() {
        let field = Field::dwork(5).unwrap();
        let ring = ResidueRing::new(field, 9).unwrap();
        for s in ["5", "pi^3", "10*pi", "1 + pi", "25"] {
            let c = field.parse(s).unwrap();
            let v = c.valuation().finite().unwrap().min(9);
            assert_eq!(ring.valuation(&ring.reduce(&c).unwrap()), v, "{s}");
        }
    }

    #[test]
    fn lift_agrees_with_reduce_mod() {
        let field = Field::dwork(3).unwrap();
        let ring = ResidueRing::new(field, 5).unwrap();
        let c = field.parse("7/2 - 11*pi").unwrap();
        let l = ring.lift(&ring.reduce(&c).unwrap());
        assert_eq!(l.reduce_mod(5).unwrap(), c.reduce_mod(5).unwrap());
    }

    #[test]
    fn solves_non_field_system() {
        // 3x = 6 mod 27 has solutions; 3x = 1 does not.
        let field = Field::unramified(3).unwrap();
        let ring = ResidueRing::new(field, 3).unwrap();
        let three = vec![vec![vec![3i128]]];
        let x = ring.solve(three.clone(), vec![vec![6]], 1).unwrap();
        assert!(ring.is_zero(&ring.sub(&ring.mul(&vec![3], &x[0]), &vec![6])));
        assert!(ring.solve(three, vec![vec![1]], 1).is_none());
    }

    #[test]
    fn rejects_huge_levels() {
        assert!(matches!(
            ResidueRing::new(Field::unramified(7).unwrap(), 40),
            Err(Error::LevelTooLarge(40))
        ));
    }
}
