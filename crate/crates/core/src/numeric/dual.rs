//! Forward-mode dual numbers.
//!
//! A [`Dual`] carries a value and one partial derivative per active
//! coordinate. Constants are stored with an empty partials vector and are
//! treated as having zero partials in every slot, so mixing seeded variables
//! and lifted constants never needs to know the active dimension up front.
//!
//! `Dual<Dual<f64>>` nests: the outer partials are first derivatives whose
//! own partials are second derivatives, which is how Hessians are built.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar arithmetic shared by `f64` and (nested) dual numbers.
///
/// Every elementary function used by the expression evaluator must be
/// available here so that a single generic evaluation path serves plain
/// values, gradients and Hessians.
pub trait Real:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    /// The underlying real value (innermost value for nested duals).
    fn re(&self) -> f64;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// `self^e` for a constant real exponent.
    fn powf_const(&self, e: f64) -> Self;
    fn scale(&self, k: f64) -> Self;
}

impl Real for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powf_const(&self, e: f64) -> Self {
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            self.powi(e as i32)
        } else {
            self.powf(e)
        }
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
}

#[derive(Clone, PartialEq)]
pub struct Dual<T = f64> {
    pub value: T,
    pub partials: Vec<T>,
}

impl<T: Real> Dual<T> {
    pub fn constant(value: T) -> Self {
        Dual { value, partials: Vec::new() }
    }

    /// The `slot`-th coordinate of a `dim`-dimensional active point.
    pub fn variable(value: T, slot: usize, dim: usize) -> Self {
        let mut partials = vec![T::from_f64(0.0); dim];
        partials[slot] = T::from_f64(1.0);
        Dual { value, partials }
    }

    /// Seeds every coordinate of `x` as an active variable.
    pub fn seed(x: &[T]) -> Vec<Self> {
        x.iter().enumerate().map(|(i, v)| Dual::variable(v.clone(), i, x.len())).collect()
    }

    pub fn partial(&self, slot: usize) -> T {
        self.partials.get(slot).cloned().unwrap_or_else(|| T::from_f64(0.0))
    }

    /// Partials padded to `dim` slots.
    pub fn gradient(&self, dim: usize) -> Vec<T> {
        (0..dim).map(|i| self.partial(i)).collect()
    }

    /// Chain rule for a unary function with value `f` and derivative `df`.
    fn chain(&self, f: T, df: T) -> Self {
        Dual { value: f, partials: self.partials.iter().map(|d| d.clone() * df.clone()).collect() }
    }
}

fn zip_with<T: Real>(a: &[T], b: &[T], f: impl Fn(T, T) -> T) -> Vec<T> {
    let n = a.len().max(b.len());
    let zero = T::from_f64(0.0);
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| zero.clone());
            let y = b.get(i).cloned().unwrap_or_else(|| zero.clone());
            f(x, y)
        })
        .collect()
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual { value: self.value + rhs.value, partials: zip_with(&self.partials, &rhs.partials, |a, b| a + b) }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual { value: self.value - rhs.value, partials: zip_with(&self.partials, &rhs.partials, |a, b| a - b) }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        let (av, bv) = (self.value.clone(), rhs.value.clone());
        Dual {
            value: self.value * rhs.value,
            partials: zip_with(&self.partials, &rhs.partials, |da, db| av.clone() * db + bv.clone() * da),
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (av, bv) = (self.value.clone(), rhs.value.clone());
        let b2 = bv.clone() * bv.clone();
        Dual {
            value: self.value / rhs.value,
            partials: zip_with(&self.partials, &rhs.partials, |da, db| {
                (bv.clone() * da - av.clone() * db) / b2.clone()
            }),
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { value: -self.value, partials: self.partials.into_iter().map(|d| -d).collect() }
    }
}

impl<T: Real> Real for Dual<T> {
    fn from_f64(c: f64) -> Self {
        Dual::constant(T::from_f64(c))
    }
    fn re(&self) -> f64 {
        self.value.re()
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e.clone(), e)
    }
    fn ln(&self) -> Self {
        let inv = T::from_f64(1.0) / self.value.clone();
        self.chain(self.value.ln(), inv)
    }
    fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        let ds = T::from_f64(0.5) / s.clone();
        self.chain(s, ds)
    }
    fn powf_const(&self, e: f64) -> Self {
        let f = self.value.powf_const(e);
        let df = if e == 0.0 { T::from_f64(0.0) } else { self.value.powf_const(e - 1.0).scale(e) };
        self.chain(f, df)
    }
    fn scale(&self, k: f64) -> Self {
        Dual { value: self.value.scale(k), partials: self.partials.iter().map(|d| d.scale(k)).collect() }
    }
}

impl<T: Real> fmt::Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({:?}; {:?})", self.value, self.partials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let x = Dual::variable(3.0, 0, 2);
        let y = Dual::variable(5.0, 1, 2);
        let p = x.clone() * y.clone();
        assert_eq!(p.value, 15.0);
        assert_eq!(p.gradient(2), vec![5.0, 3.0]);
    }

    #[test]
    fn constants_have_no_partials() {
        let c = Dual::<f64>::from_f64(2.0);
        let x = Dual::variable(1.5, 0, 1);
        let s = c + x;
        assert_eq!(s.gradient(1), vec![1.0]);
    }

    #[test]
    fn quotient_and_elementary() {
        let x = Dual::variable(2.0, 0, 1);
        let q = Dual::from_f64(1.0) / x.clone();
        assert!((q.partial(0) + 0.25).abs() < 1e-15);
        let l = x.ln();
        assert!((l.partial(0) - 0.5).abs() < 1e-15);
        let s = x.sqrt();
        assert!((s.partial(0) - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        let e = x.exp();
        assert!((e.partial(0) - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn negative_base_integer_power() {
        let x = Dual::variable(-3.0, 0, 1);
        let y = x.powf_const(2.0);
        assert_eq!(y.value, 9.0);
        assert_eq!(y.partial(0), -6.0);
    }

    #[test]
    fn nested_duals_give_second_derivatives() {
        // f(x) = x^3 at x = 2: f'' = 12
        let inner = Dual::variable(2.0, 0, 1);
        let x = Dual::variable(inner, 0, 1);
        let f = x.powf_const(3.0);
        assert_eq!(f.partial(0).value, 12.0);
        assert_eq!(f.partial(0).partial(0), 12.0);
    }
}
