//! Symbolic scalar expressions used for scale factors.
//!
//! An [`Expr`] is an immutable syntax tree over real literals, named
//! variables, the four arithmetic operators, integer powers and a small set
//! of elementary functions. Expressions can be parsed from text, printed back,
//! differentiated exactly and evaluated in IEEE double precision.
//!
//! ```
//! use tlq_core::expr::Expr;
//!
//! let h = Expr::parse("r^2 + 1/r").unwrap();
//! let dh = h.differentiate("r").unwrap();
//! let v = dh.evaluate(&[("r", 2.0)]).unwrap();
//! assert!((v - (4.0 - 0.25)).abs() < 1e-15);
//! ```

mod diff;
mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{Bindings, EvalError};
pub use parser::ParseError;

/// Elementary functions understood by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression syntax tree.
///
/// Trees built through [`Expr::parse`] or the folding constructors never
/// contain `Neg(Num(_))`; negative literals are stored as `Num` directly.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Identifier bound to the constant pi rather than treated as a variable.
pub const PI_NAME: &str = "pi";

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parser::parse(text)
    }

    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    // Folding constructors. Only literal arithmetic and the identities with
    // 0 and 1 are simplified.

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
            (Expr::Num(0.0), b) => b,
            (a, Expr::Num(0.0)) => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
            (a, Expr::Num(0.0)) => a,
            (Expr::Num(0.0), b) => Expr::neg(b),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
            (Expr::Num(x), _) | (_, Expr::Num(x)) if x == 0.0 => Expr::Num(0.0),
            (Expr::Num(1.0), b) => b,
            (a, Expr::Num(1.0)) => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Num(x), Expr::Num(y)) if y != 0.0 => Expr::Num(x / y),
            (Expr::Num(x), b) if x == 0.0 && !matches!(b, Expr::Num(_)) => Expr::Num(0.0),
            (a, Expr::Num(1.0)) => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(x) => Expr::Num(-x),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn pow(base: Expr, n: i32) -> Expr {
        match (base, n) {
            (_, 0) => Expr::Num(1.0),
            (b, 1) => b,
            (Expr::Num(x), n) if x != 0.0 || n > 0 => Expr::Num(x.powi(n)),
            (b, n) => Expr::Pow(Box::new(b), n),
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        match arg {
            Expr::Num(x) => {
                let v = eval::apply_func(f, x);
                match v {
                    Some(v) if v.is_finite() => Expr::Num(v),
                    _ => Expr::Call(f, Box::new(Expr::Num(x))),
                }
            }
            a => Expr::Call(f, Box::new(a)),
        }
    }

    /// Exact derivative with respect to `var`.
    ///
    /// Fails only when `var` cannot name a variable (not an identifier, or a
    /// reserved function/constant name).
    pub fn differentiate(&self, var: &str) -> Result<Expr, EvalError> {
        if !is_variable_name(var) {
            return Err(EvalError::UnknownVariable(var.to_string()));
        }
        Ok(diff::derivative(self, var))
    }

    pub fn evaluate<B: Bindings + ?Sized>(&self, bindings: &B) -> Result<f64, EvalError> {
        eval::evaluate(self, bindings)
    }

    /// Replaces every occurrence of `var` by the literal `value` and folds.
    pub fn substitute(&self, var: &str, value: f64) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(n) if n == var => Expr::Num(value),
            Expr::Var(n) => Expr::Var(n.clone()),
            Expr::Neg(a) => Expr::neg(a.substitute(var, value)),
            Expr::Add(a, b) => Expr::add(a.substitute(var, value), b.substitute(var, value)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(var, value), b.substitute(var, value)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(var, value), b.substitute(var, value)),
            Expr::Div(a, b) => Expr::div(a.substitute(var, value), b.substitute(var, value)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(var, value), *n),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(var, value)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(n) => {
                out.insert(n.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

pub(crate) fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    let ok_start = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    ok_start
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Func::from_name(s).is_none()
        && s != PI_NAME
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        write!(f, "{v:e}")
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Right operands are parenthesized at equal precedence so that the
        // printed form reparses to the same left-associated tree.
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        let p = self.precedence();
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                child(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                child(f, a, a.precedence() < p)?;
                write!(f, "{op}")?;
                child(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, n) => {
                child(f, a, a.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn product_of_variable_and_call() {
        let e = p("r*sin(theta)");
        assert_eq!(
            e,
            Expr::Mul(
                Box::new(Expr::var("r")),
                Box::new(Expr::Call(Func::Sin, Box::new(Expr::var("theta"))))
            )
        );
    }

    #[test]
    fn integer_power_and_reciprocal() {
        let e = p("r^2 + 1/r");
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Pow(Box::new(Expr::var("r")), 2)),
                Box::new(Expr::Div(Box::new(Expr::Num(1.0)), Box::new(Expr::var("r"))))
            )
        );
    }

    #[test]
    fn derivative_examples_print_compactly() {
        assert_eq!(p("r^2").differentiate("r").unwrap().to_string(), "2*r");
        assert_eq!(
            p("r*sin(theta)").differentiate("r").unwrap().to_string(),
            "sin(theta)"
        );
        assert_eq!(
            p("sin(theta)^2").differentiate("theta").unwrap().to_string(),
            "2*sin(theta)*cos(theta)"
        );
    }

    #[test]
    fn differentiate_rejects_non_variables() {
        assert!(p("x").differentiate("sin").is_err());
        assert!(p("x").differentiate("2x").is_err());
        assert!(p("x").differentiate("pi").is_err());
    }

    #[test]
    fn printing_respects_associativity() {
        for s in ["a - (b - c)", "a/(b*c)", "(a + b)^2", "-x^2", "(-x)^3", "2^-1", "a - -2"] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} printed as {e}");
        }
        assert_eq!(p("a - (b - c)").to_string(), "a - (b - c)");
        assert_eq!(p("(a - b) - c").to_string(), "a - b - c");
    }

    #[test]
    fn substitute_folds_literals() {
        let e = p("r*sin(theta)").substitute("r", 2.0);
        assert_eq!(e.to_string(), "2*sin(theta)");
        let c = p("r^2 + 1").substitute("r", 3.0);
        assert_eq!(c, Expr::Num(10.0));
    }

    #[test]
    fn free_variables() {
        let vars = p("r*sin(theta) + pi").free_vars();
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec!["r", "theta"]);
    }
}
