use proptest::prelude::*;
use tlq_core::expr::Func;
use tlq_core::Expr;

/// Smooth expressions in `x` and `y` that stay finite on `[-1, 1]²`.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3.0f64..3.0).prop_map(|v| Expr::num((v * 100.0).round() / 100.0)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            // denominator bounded away from zero
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                Expr::div(a, Expr::add(Expr::num(2.5), Expr::call(Func::Sin, b)))
            }),
            (inner.clone(), 0i32..4).prop_map(|(a, n)| Expr::pow(a, n)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
            inner.clone().prop_map(|a| {
                Expr::call(Func::Sqrt, Expr::add(Expr::num(1.5), Expr::call(Func::Cos, a)))
            }),
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Log, Expr::add(Expr::num(1.0), Expr::pow(a, 2)))),
            inner.prop_map(Expr::neg),
        ]
    })
}

fn eval(e: &Expr, x: f64, y: f64) -> f64 {
    e.evaluate(&[("x", x), ("y", y)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivative_matches_central_difference(
        e in smooth_expr(),
        x in -1.0f64..1.0,
        y in -1.0f64..1.0,
    ) {
        let h = 1e-5;
        let dx = e.differentiate("x").unwrap();
        let dy = e.differentiate("y").unwrap();
        let fd_x = (eval(&e, x + h, y) - eval(&e, x - h, y)) / (2.0 * h);
        let fd_y = (eval(&e, x, y + h) - eval(&e, x, y - h)) / (2.0 * h);
        let scale = 1.0 + eval(&e, x, y).abs() + fd_x.abs() + fd_y.abs();
        prop_assert!((eval(&dx, x, y) - fd_x).abs() <= 1e-5 * scale, "d/dx of {e}: {dx}");
        prop_assert!((eval(&dy, x, y) - fd_y).abs() <= 1e-5 * scale, "d/dy of {e}: {dy}");
    }

    #[test]
    fn print_parse_round_trip(e in smooth_expr(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let printed = e.to_string();
        let parsed = Expr::parse(&printed).unwrap();
        prop_assert_eq!(&Expr::parse(&parsed.to_string()).unwrap(), &parsed);
        let (a, b) = (eval(&e, x, y), eval(&parsed, x, y));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{printed}: {a} vs {b}");
    }

    #[test]
    fn unknown_variables_are_reported(name in "[a-w]{1,3}") {
        prop_assume!(name != "pi" && Func::from_name(&name).is_none());
        let e = Expr::parse(&format!("{name} + x")).unwrap();
        prop_assert!(e.evaluate(&[("x", 1.0)]).is_err());
    }
}
