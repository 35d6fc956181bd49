//! Scalar-field expressions.
//!
//! Grammar (recursive descent, precedence low to high):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := exp | log | sin | cos | sqrt
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so
//! `-x^2` is `-(x^2)` and `a^b^c` is `a^(b^c)`. Named constants are folded
//! into number literals while parsing; every remaining identifier must be a
//! declared coordinate and is stored by index.

mod eval;
mod parser;

use std::fmt;

pub use eval::EvalError;
pub use parser::{parse, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the coordinate list the expression was parsed against.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// True when the subtree references no coordinate.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Binary(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Renames variables through `f`, e.g. to embed an expression over
    /// `(q, qdot, z)` into a larger coordinate list.
    pub fn remap_vars(&self, f: &impl Fn(usize) -> usize) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => Expr::Var(f(*i)),
            Expr::Neg(a) => Expr::Neg(Box::new(a.remap_vars(f))),
            Expr::Call(g, a) => Expr::Call(*g, Box::new(a.remap_vars(f))),
            Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(a.remap_vars(f)), Box::new(b.remap_vars(f))),
        }
    }

    /// Replaces variable `i` by `with` everywhere.
    pub fn substitute(&self, i: usize, with: &Expr) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(j) if *j == i => with.clone(),
            Expr::Var(j) => Expr::Var(*j),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(i, with))),
            Expr::Call(g, a) => Expr::Call(*g, Box::new(a.substitute(i, with))),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.substitute(i, with)), Box::new(b.substitute(i, with)))
            }
        }
    }

    /// Fully parenthesized rendering that parses back to the same text.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { expr: self, names }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::binary($op, self, rhs)
            }
        }
    };
}
expr_binop!(Add, add, BinOp::Add);
expr_binop!(Sub, sub, BinOp::Sub);
expr_binop!(Mul, mul, BinOp::Mul);
expr_binop!(Div, div, BinOp::Div);

pub struct Display<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.names, f)
    }
}

fn write_expr(e: &Expr, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
            write!(f, "(-{:?})", v.abs())
        }
        Expr::Num(v) => write!(f, "{v:?}"),
        Expr::Var(i) => match names.get(*i) {
            Some(n) => f.write_str(n),
            None => write!(f, "${i}"),
        },
        Expr::Neg(a) => {
            f.write_str("(-")?;
            write_expr(a, names, f)?;
            f.write_str(")")
        }
        Expr::Call(g, a) => {
            write!(f, "{}(", g.name())?;
            write_expr(a, names, f)?;
            f.write_str(")")
        }
        Expr::Binary(op, a, b) => {
            f.write_str("(")?;
            write_expr(a, names, f)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(b, names, f)?;
            f.write_str(")")
        }
    }
}
