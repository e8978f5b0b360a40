//! Catalog values against independent closed forms.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use padic_frob::catalog::{build, dwork_congruence_check, p_lucas_check, SeriesSpec};
use padic_frob::frobenius::integrality_check;
use padic_frob::{Field, TruncSeries, Valuation};

fn series(kind: &str, field: Field, n: usize) -> TruncSeries {
    build(&SeriesSpec::new(kind.parse().unwrap(), field, n)).unwrap().series
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn central_over_4n(n: u64) -> BigRational {
    BigRational::new(binomial(BigInt::from(2 * n), BigInt::from(n)), BigInt::from(4).pow(n as u32))
}

fn digit_sum(mut n: u64, p: u64) -> i64 {
    let mut s = 0;
    while n > 0 {
        s += (n % p) as i64;
        n /= p;
    }
    s
}

#[test]
fn apery_matches_binomial_sum() {
    let f = Field::unramified(5).unwrap();
    let s = series("apery", f, 40);
    for n in 0..40u64 {
        let sum = (0..=n).fold(BigInt::zero(), |acc, k| {
            let a = binomial(BigInt::from(n), BigInt::from(k));
            let b = binomial(BigInt::from(n + k), BigInt::from(k));
            acc + &a * &a * &b * &b
        });
        assert_eq!(s.coeff(n as usize), &f.from_bigint(sum), "n = {n}");
    }
}

#[test]
fn hypergeometric_half_is_central_binomial() {
    let f = Field::unramified(7).unwrap();
    let one = series("hyp:1/2", f, 30);
    let two = series("hyp:1/2,1/2", f, 30);
    for n in 0..30u64 {
        let c = central_over_4n(n);
        assert_eq!(one.coeff(n as usize), &f.from_rational(c.clone()));
        assert_eq!(two.coeff(n as usize), &f.from_rational(&c * &c));
    }
}

#[test]
fn squared_half_series_is_geometric() {
    let f = Field::unramified(7).unwrap();
    let s = series("hyp:1/2", f, 25);
    assert_eq!(s.pow(2).unwrap(), TruncSeries::geometric(f, 25));
}

#[test]
fn exponential_coefficients() {
    let f = Field::dwork(3).unwrap();
    let s = series("exp", f, 20);
    for n in 0..20u64 {
        let expected = f.pi().pow(n as u32).scale(&BigRational::new(BigInt::one(), factorial(n)));
        assert_eq!(s.coeff(n as usize), &expected);
    }
}

#[test]
fn bessel_valuations_are_twice_digit_sums() {
    let f = Field::dwork(3).unwrap();
    let s = series("bessel", f, 200);
    for n in 0..100u64 {
        let c = s.coeff(2 * n as usize);
        assert_eq!(c.valuation(), Valuation::Finite(2 * digit_sum(n, 3)), "n = {n}");
        // (-1)^n pi^(2n) / (4^n n!^2), and pi^2 = -3
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let value = BigRational::new(
            BigInt::from(sign) * BigInt::from(-3).pow(n as u32),
            BigInt::from(4).pow(n as u32) * factorial(n) * factorial(n),
        );
        assert_eq!(c, &f.from_rational(value));
        assert!(s.coeff(2 * n as usize + 1).is_zero());
    }
}

#[test]
fn catalog_operators_annihilate_their_series() {
    let cases = [
        ("apery", Field::unramified(5).unwrap()),
        ("hyp:1/2,1/2", Field::unramified(5).unwrap()),
        ("hyp:1/3,2/3", Field::unramified(7).unwrap()),
        ("bessel", Field::dwork(3).unwrap()),
        ("exp", Field::dwork(3).unwrap()),
    ];
    for (kind, f) in cases {
        let b = build(&SeriesSpec::new(kind.parse().unwrap(), f, 60)).unwrap();
        let op = b.operator.unwrap();
        assert_eq!(op.unit_solution(60).unwrap(), b.series, "{kind}");
        assert!(op.apply(&b.series).coeffs().iter().all(|c| c.is_zero()), "{kind}");
    }
}

#[test]
fn integrality_controls() {
    for p in [5, 7] {
        let f = Field::unramified(p).unwrap();
        assert!(integrality_check(&series("apery", f, 200), 4).unwrap().pass);
        assert!(integrality_check(&series("hyp:1/2,1/2", f, 200), 4).unwrap().pass);
    }
    let bad = integrality_check(&series("hyp:1/2", Field::unramified(2).unwrap(), 20), 3).unwrap();
    assert!(!bad.pass);
    assert_eq!(bad.first_failure, Some(1));
    // p = 3 divides the parameter denominator
    let r = integrality_check(&series("hyp:1/3", Field::unramified(3).unwrap(), 20), 2).unwrap();
    assert_eq!(r.first_failure, Some(1));
}

#[test]
fn lucas_and_dwork_congruences() {
    for p in [5, 7] {
        let f = Field::unramified(p).unwrap();
        let n = (p * p * p - 1) as usize;
        let r = p_lucas_check(&series("apery", f, n)).unwrap();
        assert!(r.pass && r.checked_upto == n);
    }
    let f = Field::unramified(5).unwrap();
    for s in 1..=2u32 {
        let n = 5usize.pow(s) + 20;
        assert!(dwork_congruence_check(&series("hyp:1/2,1/2", f, n), s).unwrap().pass);
    }
    // 1 + z^(p+1): the right side has f_1 f_1 = 0 at index p + 1
    let mut c = vec![f.zero(); 12];
    c[0] = f.one();
    c[6] = f.one();
    let r = p_lucas_check(&TruncSeries::new(f, c)).unwrap();
    assert_eq!(r.first_failure, Some(6));
}
