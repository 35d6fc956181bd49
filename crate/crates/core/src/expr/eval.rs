use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::numeric::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// `expr` is the offending subexpression; render it with
    /// [`Expr::display`] to recover coordinate names.
    #[error("{op} undefined at argument {arg}")]
    Domain { op: &'static str, arg: f64, expr: Expr },
    #[error("variable index {index} unbound ({bound} values supplied)")]
    Unbound { index: usize, bound: usize },
}

fn domain(op: &'static str, arg: f64, expr: &Expr) -> EvalError {
    EvalError::Domain { op, arg, expr: expr.clone() }
}

impl Expr {
    /// Evaluates over any [`Real`]: `f64` for values, duals for derivatives.
    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T, EvalError> {
        match self {
            Expr::Num(v) => Ok(T::from_f64(*v)),
            Expr::Var(i) => x.get(*i).cloned().ok_or(EvalError::Unbound { index: *i, bound: x.len() }),
            Expr::Neg(a) => Ok(-a.eval(x)?),
            Expr::Call(f, a) => {
                let v = a.eval(x)?;
                match f {
                    Func::Exp => Ok(v.exp()),
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                    Func::Log if v.re() > 0.0 => Ok(v.ln()),
                    Func::Log => Err(domain("log", v.re(), self)),
                    Func::Sqrt if v.re() >= 0.0 => Ok(v.sqrt()),
                    Func::Sqrt => Err(domain("sqrt", v.re(), self)),
                }
            }
            Expr::Binary(op, a, b) => match op {
                BinOp::Add => Ok(a.eval(x)? + b.eval(x)?),
                BinOp::Sub => Ok(a.eval(x)? - b.eval(x)?),
                BinOp::Mul => Ok(a.eval(x)? * b.eval(x)?),
                BinOp::Div => {
                    let den = b.eval(x)?;
                    if den.re() == 0.0 {
                        return Err(domain("division", 0.0, self));
                    }
                    Ok(a.eval(x)? / den)
                }
                BinOp::Pow => {
                    let base = a.eval(x)?;
                    if b.is_constant() {
                        let e: f64 = b.eval::<f64>(&[])?;
                        let r = base.re();
                        if r < 0.0 && e.fract() != 0.0 {
                            return Err(domain("non-integer power of negative base", r, self));
                        }
                        if r == 0.0 && e < 0.0 {
                            return Err(domain("negative power of zero", r, self));
                        }
                        Ok(base.powf_const(e))
                    } else {
                        let r = base.re();
                        if r <= 0.0 {
                            return Err(domain("variable power of non-positive base", r, self));
                        }
                        Ok((b.eval(x)? * base.ln()).exp())
                    }
                }
            },
        }
    }
}
