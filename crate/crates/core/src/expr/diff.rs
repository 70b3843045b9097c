use super::{Expr, Func};

pub(super) fn derivative(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Num(_) => Expr::Num(0.0),
        Expr::Var(n) => Expr::Num(if n == var { 1.0 } else { 0.0 }),
        Expr::Neg(a) => Expr::neg(derivative(a, var)),
        Expr::Add(a, b) => Expr::add(derivative(a, var), derivative(b, var)),
        Expr::Sub(a, b) => Expr::sub(derivative(a, var), derivative(b, var)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(derivative(a, var), (**b).clone()),
            Expr::mul((**a).clone(), derivative(b, var)),
        ),
        Expr::Div(a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            if matches!(db, Expr::Num(z) if z == 0.0) {
                return Expr::div(da, (**b).clone());
            }
            Expr::div(
                Expr::sub(
                    Expr::mul(da, (**b).clone()),
                    Expr::mul((**a).clone(), db),
                ),
                Expr::pow((**b).clone(), 2),
            )
        }
        Expr::Pow(a, n) => Expr::mul(
            Expr::mul(Expr::Num(*n as f64), Expr::pow((**a).clone(), n - 1)),
            derivative(a, var),
        ),
        Expr::Call(f, a) => {
            let inner = derivative(a, var);
            if matches!(inner, Expr::Num(z) if z == 0.0) {
                return Expr::Num(0.0);
            }
            let u = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                Func::Tan => Expr::div(Expr::Num(1.0), Expr::pow(Expr::call(Func::Cos, u), 2)),
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Log => Expr::div(Expr::Num(1.0), u),
                Func::Sqrt => Expr::div(
                    Expr::Num(1.0),
                    Expr::mul(Expr::Num(2.0), Expr::call(Func::Sqrt, u)),
                ),
            };
            Expr::mul(outer, inner)
        }
    }
}
