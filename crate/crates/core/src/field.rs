use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{self, EvalError, Expr};
use crate::numeric::{Dual, Real};

/// A smooth real function of named coordinates.
///
/// Values, gradients and Hessians all come from one generic evaluation of
/// the same expression tree, so the three can never disagree about the
/// formula. Cloning is cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    name: String,
    coords: Arc<[String]>,
    expr: Arc<Expr>,
}

impl ScalarField {
    pub fn parse(name: &str, source: &str, coords: &[&str], constants: &BTreeMap<String, f64>) -> Result<ScalarField> {
        let coords: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let expr = expr::parse(source, &coords, constants)
            .map_err(|source| Error::Parse { field: name.to_string(), source })?;
        Ok(ScalarField { name: name.to_string(), coords: coords.into(), expr: Arc::new(expr) })
    }

    pub fn from_expr(name: &str, coords: &[&str], expr: Expr) -> Result<ScalarField> {
        if let Some(i) = expr.max_var() {
            if i >= coords.len() {
                return Err(Error::dims(format!("field {name}"), coords.len(), i + 1));
            }
        }
        Ok(ScalarField {
            name: name.to_string(),
            coords: coords.iter().map(|s| s.to_string()).collect::<Vec<_>>().into(),
            expr: Arc::new(expr),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Source text that parses back to the same tree.
    pub fn source(&self) -> String {
        self.expr.display(&self.coords).to_string()
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> Result<T> {
        Error::check_dim(&format!("field {}", self.name), self.arity(), x.len())?;
        self.expr.eval(x).map_err(|e| self.lift(e))
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }

    pub fn value_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let d = self.eval(&Dual::seed(x))?;
        Ok((d.value, d.gradient(x.len())))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.value_gradient(x)?.1)
    }

    /// Value, gradient and Hessian from one nested-dual pass.
    pub fn second_order(&self, x: &[f64]) -> Result<(f64, Vec<f64>, DMatrix<f64>)> {
        let m = x.len();
        let inner: Vec<Dual> = Dual::seed(x);
        let outer: Vec<Dual<Dual>> = inner.into_iter().enumerate().map(|(i, v)| Dual::variable(v, i, m)).collect();
        let d = self.eval(&outer)?;
        let grad: Vec<f64> = (0..m).map(|i| d.partial(i).value).collect();
        let hess = DMatrix::from_fn(m, m, |i, j| d.partial(i).partial(j));
        Ok((d.value.value, grad, hess))
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.second_order(x)?.2)
    }

    pub fn evaluate_named(&self, bindings: &BTreeMap<String, f64>) -> Result<f64> {
        let x = self
            .coords
            .iter()
            .map(|c| {
                bindings
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("field {}: `{c}` is unbound", self.name)))
            })
            .collect::<Result<Vec<f64>>>()?;
        self.value(&x)
    }

    fn lift(&self, e: EvalError) -> Error {
        match e {
            EvalError::Domain { op, arg, expr } => Error::Domain {
                field: self.name.clone(),
                op: op.to_string(),
                arg,
                expr: expr.display(&self.coords).to_string(),
            },
            EvalError::Unbound { index, bound } => Error::dims(format!("field {}", self.name), index + 1, bound),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hessian_of_polynomial_is_symmetric() {
        let f = ScalarField::parse("f", "x^3*y + x*y^2 - z*x", &["x", "y", "z"], &BTreeMap::new()).unwrap();
        let h = f.hessian(&[1.5, -0.5, 2.0]).unwrap();
        assert_eq!(h, h.transpose());
        // f_xx = 6xy, f_xy = 3x^2 + 2y
        assert_eq!(h[(0, 0)], 6.0 * 1.5 * -0.5);
        assert_eq!(h[(0, 1)], 3.0 * 2.25 - 1.0);
        assert_eq!(h[(0, 2)], -1.0);
    }

    #[test]
    fn domain_error_names_the_coordinate() {
        let f = ScalarField::parse("F", "log(V)", &["T", "V"], &BTreeMap::new()).unwrap();
        let err = f.value(&[1.0, -1.0]).unwrap_err();
        assert!(err.to_string().contains("log(V)"), "{err}");
    }

    #[test]
    fn arity_is_checked() {
        let f = ScalarField::parse("f", "x", &["x"], &BTreeMap::new()).unwrap();
        assert!(matches!(f.value(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn named_evaluation() {
        let f = ScalarField::parse("f", "q+p", &["q", "p"], &BTreeMap::new()).unwrap();
        let b: BTreeMap<String, f64> = [("q".into(), 1.0), ("p".into(), 2.0)].into();
        assert_eq!(f.evaluate_named(&b).unwrap(), 3.0);
    }
}
