use proptest::prelude::*;

use saito_hodge::expr::{eval_poly, parse, Expr};
use saito_hodge::locq::Ambient;
use saito_hodge::matrix::SqMatrix;
use saito_hodge::poly::{LinearForm, Monomial, Poly};
use saito_hodge::rat::Rat;

const NV: usize = 3;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d))
}

fn arb_poly(max_terms: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, NV), arb_rat()), 0..=max_terms).prop_map(|ts| {
        Poly::from_terms(NV, ts.into_iter().map(|(e, c)| (Monomial::from_exponents(&e), c)))
    })
}

fn arb_linear() -> impl Strategy<Value = LinearForm> {
    prop::collection::vec(-3i64..=3, NV)
        .prop_filter_map("nonzero", |v| LinearForm::new(v.into_iter().map(Rat::from_int).collect()))
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-5i64..=5, 1i64..=3).prop_map(|(n, d)| Expr::Num(Rat::new(n, d))),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(|s| Expr::Ident(s.to_string())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 1i64..=4).prop_map(|(a, d)| Expr::Div(Box::new(a), Box::new(Expr::Num(Rat::from_int(d))))),
            (inner, 0i32..=3).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
        ]
    })
}

fn names() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in arb_poly(4, 2), b in arb_poly(4, 2), c in arb_poly(4, 2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Poly::zero(NV));
        prop_assert_eq!(&a * &Poly::one(NV), a.clone());
        prop_assert_eq!(&a + &(-&a), Poly::zero(NV));
    }

    #[test]
    fn det_is_multiplicative(a in prop::collection::vec(arb_poly(2, 1), 4), b in prop::collection::vec(arb_poly(2, 1), 4)) {
        let amb = Ambient::new(names(), Vec::new());
        let mat = |v: &[Poly]| SqMatrix::from_polys(&amb, vec![v[..2].to_vec(), v[2..].to_vec()]);
        let (ma, mb) = (mat(&a), mat(&b));
        prop_assert_eq!((&ma * &mb).det(), &ma.det() * &mb.det());
        prop_assert_eq!(ma.transpose().det(), ma.det());
    }

    #[test]
    fn divide_by_linear_round_trip(p in arb_poly(5, 3), alpha in arb_linear(), c in arb_rat()) {
        let prod = &p * alpha.poly();
        prop_assert_eq!(prod.div_linear(&alpha), Some(p.clone()));
        if !c.is_zero() {
            let off = &prod + &Poly::constant(NV, c);
            prop_assert_eq!(off.div_linear(&alpha), None);
        }
    }

    #[test]
    fn parser_round_trip(e in arb_expr()) {
        let text = e.to_string();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(eval_poly(&back, &names()).unwrap(), eval_poly(&e, &names()).unwrap(), "{}", text);
    }
}
