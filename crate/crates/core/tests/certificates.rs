use padic_frob::catalog::{build, SeriesSpec};
use padic_frob::dependence::{analytic_element_certificate, kolchin_scan, product_power, NamedSeries, ScanParams};
use padic_frob::frobenius::{
    antecedent_chain, antecedent_step, frobenius_ratio_certificate, frobenius_ratio_quotient, logderiv_certificate,
    period_ratio_certificate, ratio_certificate,
};
use padic_frob::reconstruct::{reconstruct_doubling, verify_certificate};
use padic_frob::{Coefficient, Error, Field, RationalFunction, TruncSeries, Valuation};

fn series(kind: &str, field: Field, n: usize) -> TruncSeries {
    build(&SeriesSpec::new(kind.parse().unwrap(), field, n)).unwrap().series
}

fn ints(f: Field, v: &[i64]) -> Vec<Coefficient> {
    v.iter().map(|&x| f.from_int(x)).collect()
}

/// `(1 - z^q) / (1 - z)`.
fn block(f: Field, q: usize) -> RationalFunction {
    let mut num = vec![f.zero(); q + 1];
    num[0] = f.one();
    num[q] = f.from_int(-1);
    RationalFunction::new(f, num, ints(f, &[1, -1])).unwrap()
}

#[test]
fn geometric_ratio_certificates() {
    let f = Field::unramified(5).unwrap();
    let g = TruncSeries::geometric(f, 80);
    for m in 1..=3 {
        let c = ratio_certificate(&g, m, 6).unwrap();
        assert!(c.rational.equals(&block(f, 5)), "m = {m}");
    }
    let q = period_ratio_certificate(&g, 1, 1, 4).unwrap();
    assert_eq!(q.rational, RationalFunction::one(f));
    let f3 = Field::unramified(3).unwrap();
    let g3 = TruncSeries::geometric(f3, 80);
    for k in 0..=2u32 {
        let b = frobenius_ratio_certificate(&g3, 1, k, 12).unwrap();
        assert!(b.rational.equals(&block(f3, 3usize.pow(k))), "k = {k}");
    }
    // B_2(z) / B_1(z^3) = (1 - z^9)(1 - z^3) / ((1 - z)(1 - z^9)) = (1 - z^3) / (1 - z)
    let quot = frobenius_ratio_quotient(&g3, 1, 1, 12).unwrap();
    assert!(quot.equals(&block(f3, 3)));
}

#[test]
fn apery_ratio_certificate_is_f4() {
    let f = Field::unramified(5).unwrap();
    let ap = series("apery", f, 100);
    let c = ratio_certificate(&ap, 1, 6).unwrap();
    assert_eq!(c.rational, RationalFunction::from_poly(f, ints(f, &[1, 5, 73, 1445, 33001])));
    assert_eq!(c.verified_order, 100);
    assert_eq!(c.rational.gauss_valuation(), Valuation::Finite(0));
    assert_eq!(ratio_certificate(&ap, 1, 0).unwrap_err(), Error::ReconstructionFailed { deg_bound: 0 });
    let q = period_ratio_certificate(&ap, 1, 1, 6).unwrap();
    assert!(q.rational.expand(20).unwrap().congruent_mod(&TruncSeries::one(f, 20), 1, 20).unwrap());
}

#[test]
fn logderiv_certificates() {
    let e3 = Field::dwork(3).unwrap();
    let c = logderiv_certificate(&series("exp", e3, 40), 1, 2, 4).unwrap();
    assert_eq!(c.rational, RationalFunction::constant(e3.pi()));
    let f7 = Field::unramified(7).unwrap();
    let c = logderiv_certificate(&series("hyp:1/2", f7, 40), 1, 2, 4).unwrap();
    let half = RationalFunction::new(f7, vec![f7.from_ratio(1, 2)], ints(f7, &[1, -1])).unwrap();
    assert_eq!(c.rational, half);

    // F_4'/F_4 satisfies the congruence for Apery mod 5
    let f5 = Field::unramified(5).unwrap();
    let ap = series("apery", f5, 100);
    let f4 = RationalFunction::from_poly(f5, ints(f5, &[1, 5, 73, 1445, 33001]));
    let target = ap.log_derivative().unwrap();
    assert!(verify_certificate(&f4.log_derivative().unwrap(), &target, 1, 99).is_ok());
    let found = logderiv_certificate(&ap, 1, 1, 8).unwrap();
    assert!(found.rational.in_k0());
}

#[test]
fn exp_frobenius_ratio_is_trivial_mod_pi() {
    let e3 = Field::dwork(3).unwrap();
    let ex = series("exp", e3, 60);
    let b = frobenius_ratio_certificate(&ex, 1, 1, 8).unwrap();
    assert_eq!(b.rational, RationalFunction::one(e3));
    assert_eq!(frobenius_ratio_certificate(&ex, 1, 0, 8).unwrap().level, 0);
}

#[test]
fn doubling_search() {
    let f = Field::unramified(3).unwrap();
    let g = TruncSeries::geometric(f, 80);
    let c = reconstruct_doubling(&g.pow(3).unwrap(), 2, 1, 16).unwrap();
    assert_eq!(c.rational.den_degree(), 3);
}

#[test]
fn antecedents() {
    let u5 = Field::unramified(5).unwrap();
    let hyp = build(&SeriesSpec::new("hyp:1/2,1/2".parse().unwrap(), u5, 60)).unwrap();
    let op = hyp.operator.unwrap();
    let l1 = antecedent_step(&op, 40).unwrap();
    assert_eq!(l1.passage.constant_term(), vec![ints(u5, &[1, 0]), ints(u5, &[0, 5])]);
    let chain = antecedent_chain(&op, 2, 60).unwrap();
    assert_eq!(chain[1].passage.constant_term(), vec![ints(u5, &[1, 0]), ints(u5, &[0, 25])]);
    assert_eq!(chain[1].residual_valuation, Valuation::Infinite);
    assert!(chain.iter().all(|l| l.min_entry_valuation.is_at_least(0)));
    // level-2 operator kills the twice-Cartier series
    let lf = hyp.series.cartier_pow(2);
    assert!(chain[1].operator.apply(&lf).coeffs().iter().all(Coefficient::is_zero));

    let ap = build(&SeriesSpec::new("apery".parse().unwrap(), u5, 50)).unwrap();
    assert_eq!(antecedent_chain(&ap.operator.unwrap(), 1, 50).unwrap().len(), 1);

    let e3 = Field::dwork(3).unwrap();
    let ex = build(&SeriesSpec::new("exp".parse().unwrap(), e3, 30)).unwrap();
    let lvl = antecedent_step(&ex.operator.unwrap(), 30).unwrap();
    assert_eq!(lvl.passage.dim(), 1);
    assert_eq!(lvl.passage.constant_term(), vec![vec![e3.one()]]);
}

fn named(kind: &str, field: Field, n: usize) -> NamedSeries {
    NamedSeries {
        name: kind.into(),
        series: series(kind, field, n),
    }
}

fn params(exp_bound: i64, level: i64, deg_bound: usize, der: Option<Vec<usize>>) -> ScanParams {
    ScanParams {
        exp_bound,
        level,
        deg_bound,
        derivative_orders: der,
    }
}

#[test]
fn analytic_element_examples() {
    let f7 = Field::unramified(7).unwrap();
    let g = TruncSeries::geometric(f7, 40);
    assert_eq!(
        analytic_element_certificate(&g, 1, 4),
        Some(RationalFunction::new(f7, vec![f7.one()], ints(f7, &[1, -1])).unwrap())
    );
    let poly = TruncSeries::from_ints(f7, &[1, 2, 3, 0, 0, 0, 0, 0, 0, 0]);
    assert_eq!(
        analytic_element_certificate(&poly, 2, 3).unwrap(),
        RationalFunction::from_poly(f7, ints(f7, &[1, 2, 3]))
    );
    assert_eq!(analytic_element_certificate(&series("hyp:1/2", f7, 60), 1, 10), None);
}

#[test]
fn scan_positive_controls() {
    let f7 = Field::unramified(7).unwrap();
    let r = kolchin_scan(&[named("hyp:1/2", f7, 60)], &params(2, 2, 10, None)).unwrap();
    assert_eq!(r.found.len(), 1);
    assert_eq!(r.found[0].exponents, vec![2]);
    assert_eq!(r.found[0].product_certificate.display, "1 / (1 - z)");

    let r = kolchin_scan(&[named("hyp:1/2", f7, 60), named("hyp:1/2", f7, 60)], &params(2, 2, 10, None)).unwrap();
    let pair = r.found.iter().find(|t| t.exponents == vec![1, -1]).unwrap();
    assert_eq!(pair.product_certificate.display, "1");

    // f and its inverse as a series
    let f = series("hyp:1/2", f7, 60);
    let inputs = [
        NamedSeries { name: "f".into(), series: f.clone() },
        NamedSeries { name: "1/f".into(), series: f.invert_unit().unwrap() },
    ];
    let r = kolchin_scan(&inputs, &params(1, 2, 6, None)).unwrap();
    assert!(r.found.iter().any(|t| t.exponents == vec![1, 1]));

    let r = kolchin_scan(
        &[named("hyp:1/2", f7, 60), named("hyp:1/2", f7, 61)],
        &params(6, 2, 10, Some(vec![0, 1])),
    )
    .unwrap();
    let rel = r.found.iter().find(|t| t.exponents == vec![3, -1]).unwrap();
    assert_eq!(rel.product_certificate.display, "1");
    assert_eq!(r.normalization[1].leading_coefficient, "1/2");
}

#[test]
fn reported_certificates_reverify_independently() {
    let f7 = Field::unramified(7).unwrap();
    let inputs = [named("hyp:1/2", f7, 60), named("hyp:1/2,1/2", f7, 60)];
    let r = kolchin_scan(&inputs, &params(2, 2, 8, None)).unwrap();
    let fs: Vec<TruncSeries> = inputs.iter().map(|s| s.series.clone()).collect();
    for t in &r.found {
        let cert = RationalFunction::from_json(f7, &t.product_certificate.rational).unwrap();
        for cut in [60, 40, 25] {
            let short: Vec<TruncSeries> = fs.iter().map(|s| s.truncate(cut)).collect();
            let prod = product_power(f7, &short, &t.exponents).unwrap();
            assert!(prod.congruent_mod(&cert.expand(cut).unwrap(), 2, cut).unwrap(), "{:?} at {cut}", t.exponents);
        }
    }
    assert!(r.found.iter().any(|t| t.exponents == vec![2, 0]));
    assert!(r.found.iter().all(|t| t.exponents[1] == 0));
}

#[test]
fn scan_rejects_non_units() {
    let f = Field::unramified(3).unwrap();
    let inputs = [NamedSeries {
        name: "z".into(),
        series: TruncSeries::from_ints(f, &[0, 1, 0, 0]),
    }];
    assert_eq!(kolchin_scan(&inputs, &params(1, 1, 1, None)).unwrap_err(), Error::NotAUnit);
}
