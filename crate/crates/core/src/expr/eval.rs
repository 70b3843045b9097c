use std::collections::{BTreeMap, HashMap};

use super::{Expr, Func};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("`{0}` cannot be used as a variable name")]
    UnknownVariable(String),
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
}

/// Source of variable values during evaluation.
pub trait Bindings {
    fn lookup(&self, name: &str) -> Option<f64>;
}

impl Bindings for HashMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Bindings for BTreeMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Bindings for [(&str, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<const N: usize> Bindings for [(&str, f64); N] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

impl Bindings for [(String, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub(super) fn apply_func(f: Func, x: f64) -> Option<f64> {
    Some(match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log if x > 0.0 => x.ln(),
        Func::Sqrt if x >= 0.0 => x.sqrt(),
        Func::Log | Func::Sqrt => return None,
    })
}

fn domain(node: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain {
        node: node.to_string(),
        reason,
    }
}

pub(super) fn evaluate<B: Bindings + ?Sized>(e: &Expr, b: &B) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(n) => b.lookup(n).ok_or_else(|| EvalError::Unbound(n.clone()))?,
        Expr::Neg(a) => -evaluate(a, b)?,
        Expr::Add(x, y) => evaluate(x, b)? + evaluate(y, b)?,
        Expr::Sub(x, y) => evaluate(x, b)? - evaluate(y, b)?,
        Expr::Mul(x, y) => evaluate(x, b)? * evaluate(y, b)?,
        Expr::Div(x, y) => {
            let num = evaluate(x, b)?;
            let den = evaluate(y, b)?;
            if den == 0.0 {
                return Err(domain(e, "division by zero"));
            }
            num / den
        }
        Expr::Pow(a, n) => {
            let base = evaluate(a, b)?;
            if base == 0.0 && *n < 0 {
                return Err(domain(e, "negative power of zero"));
            }
            base.powi(*n)
        }
        Expr::Call(f, a) => {
            let x = evaluate(a, b)?;
            apply_func(*f, x).ok_or_else(|| match f {
                Func::Log => domain(e, "logarithm of a non-positive value"),
                _ => domain(e, "square root of a negative value"),
            })?
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(e, "non-finite result"))
    }
}
