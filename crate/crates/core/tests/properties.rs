use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use padic_frob::dependence::product_power;
use padic_frob::reconstruct::reconstruct;
use padic_frob::{Coefficient, DiffOp, Field, RationalFunction, SeriesJson, TruncSeries, Valuation};

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::unramified(3).unwrap()),
        Just(Field::unramified(5).unwrap()),
        Just(Field::unramified(7).unwrap()),
        Just(Field::dwork(3).unwrap()),
        Just(Field::dwork(5).unwrap()),
    ]
}

fn ratio() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn coeff(field: Field) -> impl Strategy<Value = Coefficient> {
    prop::collection::vec(ratio(), field.e()).prop_map(move |c| field.from_comps(c).unwrap())
}

/// Coefficient with every component an integer, hence integral.
fn int_coeff(field: Field) -> impl Strategy<Value = Coefficient> {
    prop::collection::vec(-30i64..30, field.e()).prop_map(move |c| {
        field
            .from_comps(c.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect())
            .unwrap()
    })
}

fn series(field: Field, len: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec(coeff(field), len).prop_map(move |c| TruncSeries::new(field, c))
}

fn unit_series(field: Field, len: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec(int_coeff(field), len - 1).prop_map(move |mut c| {
        c.insert(0, field.one());
        TruncSeries::new(field, c)
    })
}

fn field_and_pair() -> impl Strategy<Value = (Field, Coefficient, Coefficient, Coefficient)> {
    fields().prop_flat_map(|f| (Just(f), coeff(f), coeff(f), coeff(f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws((_f, a, b, c) in field_and_pair()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, a.field().zero());
    }

    #[test]
    fn inverse_and_valuation((f, a, b, _c) in field_and_pair()) {
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), f.one());
        }
        if !a.is_zero() && !b.is_zero() {
            let (va, vb) = (a.valuation().finite().unwrap(), b.valuation().finite().unwrap());
            prop_assert_eq!((&a * &b).valuation(), Valuation::Finite(va + vb));
        }
        prop_assert!((&a + &b).valuation() >= a.valuation().min(b.valuation()));
    }

    #[test]
    fn reduction_is_congruent((f, a, _b, _c) in field_and_pair(), m in 1i64..6) {
        if a.is_integral() {
            let r = a.reduce_mod(m).unwrap();
            prop_assert!((&a - &r).valuation().is_at_least(m));
            prop_assert_eq!(r.reduce_mod(m).unwrap(), r.clone());
            prop_assert_eq!(r.field(), f);
        }
    }

    #[test]
    fn display_parses_back((f, a, _b, _c) in field_and_pair()) {
        prop_assert_eq!(f.parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn cartier_commutes_with_delta(s in fields().prop_flat_map(|f| series(f, 40))) {
        let p = s.field().p();
        prop_assert_eq!(s.delta().cartier(), s.cartier().delta().scale(&p));
    }

    #[test]
    fn cartier_pulls_out_frobenius_factor(
        (f, g) in fields().prop_flat_map(|f| (series(f, 36), series(f, 12)))
    ) {
        let field = f.field();
        let p = field.prime() as usize;
        let lhs = f.mul(&g.subst_zpk_to(1, f.order())).cartier();
        let rhs = f.cartier().mul(&g);
        let upto = f.order().div_ceil(p).min(g.order());
        prop_assert!(lhs.congruent_mod(&rhs, i64::MAX, upto).unwrap());
    }

    #[test]
    fn unit_inverse(s in fields().prop_flat_map(|f| unit_series(f, 30))) {
        let inv = s.invert_unit().unwrap();
        prop_assert_eq!(s.mul(&inv), TruncSeries::one(s.field(), 30));
        prop_assert_eq!(s.pow(-2).unwrap().mul(&s.pow(2).unwrap()), TruncSeries::one(s.field(), 30));
    }

    #[test]
    fn series_json_round_trip(s in fields().prop_flat_map(|f| series(f, 10))) {
        let text = serde_json::to_string(&s.to_json()).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(TruncSeries::from_json(&back).unwrap(), s);
    }

    #[test]
    fn rational_log_derivative_expands(
        (f, num, den) in fields().prop_flat_map(|f| (
            Just(f),
            prop::collection::vec(int_coeff(f), 1..4),
            prop::collection::vec(int_coeff(f), 0..3),
        ))
    ) {
        let mut num = num;
        num[0] = f.one();
        let mut d = vec![f.one()];
        d.extend(den);
        let r = RationalFunction::new(f, num, d).unwrap();
        let lhs = r.log_derivative().unwrap().expand(15).unwrap();
        let rhs = r.expand(16).unwrap().log_derivative().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reconstruction_recovers_rational_inputs(
        (f, num, den, m) in fields().prop_flat_map(|f| (
            Just(f),
            prop::collection::vec(int_coeff(f), 1..4),
            prop::collection::vec(int_coeff(f), 0..3),
            1i64..4,
        ))
    ) {
        let mut d = vec![f.one()];
        d.extend(den);
        let r = RationalFunction::new(f, num, d).unwrap();
        let target = r.expand(24).unwrap();
        let cert = reconstruct(&target, m, 4).unwrap();
        // independent re-check of the returned certificate
        let back = cert.rational.expand(24).unwrap();
        prop_assert!(back.congruent_mod(&target, m, 24).unwrap());
        prop_assert!(cert.rational.in_k0());
    }

    #[test]
    fn product_power_is_truncation_stable(
        (fs, a, b, cut) in fields().prop_flat_map(|f| (
            prop::collection::vec(unit_series(f, 20), 2),
            -3i64..4,
            -3i64..4,
            5usize..20,
        ))
    ) {
        let field = fs[0].field();
        let full = product_power(field, &fs, &[a, b]).unwrap();
        let short: Vec<TruncSeries> = fs.iter().map(|s| s.truncate(cut)).collect();
        prop_assert_eq!(product_power(field, &short, &[a, b]).unwrap(), full.truncate(cut));
        prop_assert_eq!(
            product_power(field, &[fs[0].clone(), fs[0].clone()], &[a, -a]).unwrap(),
            TruncSeries::one(field, 20)
        );
    }

    #[test]
    fn unit_solution_is_annihilated(
        (f, tail) in fields().prop_flat_map(|f| (
            Just(f),
            prop::collection::vec(int_coeff(f), 6),
        ))
    ) {
        // (1 + c0 z) delta^2 + (c1 z + c2 z^2) delta + (c3 z + c4 z^2 + c5 z^3): MOM
        let terms = vec![
            (0, vec![f.zero(), f.zero(), f.one()]),
            (1, vec![tail[3].clone(), tail[1].clone(), tail[0].clone()]),
            (2, vec![tail[4].clone(), tail[2].clone()]),
            (3, vec![tail[5].clone()]),
        ];
        let op = DiffOp::monicize(f, &terms, 30).unwrap();
        prop_assert!(op.is_mom());
        let sol = op.unit_solution(30).unwrap();
        prop_assert!(op.apply(&sol).is_zero() || op.apply(&sol).coeffs().iter().all(Coefficient::is_zero));
    }
}
