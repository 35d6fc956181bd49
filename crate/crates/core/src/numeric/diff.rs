use nalgebra::DMatrix;

use super::{Dual, Real};
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// A smooth coordinate map evaluable over any [`Real`].
pub trait DiffMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply<T: Real>(&self, x: &[T]) -> Vec<T>;
}

pub fn gradient(f: &ScalarField, x: &[f64]) -> Result<Vec<f64>> {
    f.gradient(x)
}

pub fn fd_gradient(f: &ScalarField, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
    }
    Error::check_dim(&format!("field {}", f.name()), f.arity(), x.len())?;
    let mut xs = x.to_vec();
    (0..x.len())
        .map(|i| {
            xs[i] = x[i] + h;
            let up = f.value(&xs)?;
            xs[i] = x[i] - h;
            let down = f.value(&xs)?;
            xs[i] = x[i];
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

pub fn hessian(f: &ScalarField, x: &[f64]) -> Result<DMatrix<f64>> {
    f.hessian(x)
}

/// Exact Jacobian; row `i` is the gradient of output `i`.
pub fn jacobian<M: DiffMap + ?Sized>(m: &M, x: &[f64]) -> Result<DMatrix<f64>> {
    Error::check_dim("jacobian input", m.dim_in(), x.len())?;
    let out = m.apply(&Dual::seed(x));
    Ok(DMatrix::from_fn(out.len(), x.len(), |i, j| out[i].partial(j)))
}

pub fn fd_jacobian<M: DiffMap + ?Sized>(m: &M, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    Error::check_dim("jacobian input", m.dim_in(), x.len())?;
    fd_jacobian_fn(|y| Ok(m.apply(y)), x, h)
}

/// Central-difference Jacobian of a fallible vector function.
pub fn fd_jacobian_fn(f: impl Fn(&[f64]) -> Result<Vec<f64>>, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
    }
    let mut xs = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        xs[i] = x[i] + h;
        let up = f(&xs)?;
        xs[i] = x[i] - h;
        let down = f(&xs)?;
        xs[i] = x[i];
        cols.push(up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, x.len(), |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    struct Linear(DMatrix<f64>);

    impl DiffMap for Linear {
        fn dim_in(&self) -> usize {
            self.0.ncols()
        }
        fn dim_out(&self) -> usize {
            self.0.nrows()
        }
        fn apply<T: Real>(&self, x: &[T]) -> Vec<T> {
            (0..self.0.nrows())
                .map(|i| (0..self.0.ncols()).fold(T::from_f64(0.0), |acc, j| acc + x[j].scale(self.0[(i, j)])))
                .collect()
        }
    }

    fn field(src: &str, coords: &[&str]) -> ScalarField {
        ScalarField::parse("f", src, coords, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn square_gradient() {
        let f = field("x^2", &["x"]);
        assert_eq!(gradient(&f, &[3.0]).unwrap(), vec![6.0]);
        let fd = fd_gradient(&f, &[3.0], 1e-5).unwrap();
        assert!((fd[0] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn linear_slot_gradient() {
        let qdot = 0.75;
        let f = field(&format!("p*{qdot}"), &["q", "p", "z"]);
        assert_eq!(gradient(&f, &[1.0, 2.0, 3.0]).unwrap()[1], qdot);
    }

    #[test]
    fn constant_fd_gradient_is_zero() {
        let f = field("4.5", &["x", "y"]);
        assert_eq!(fd_gradient(&f, &[1.0, -1.0], 1e-5).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn nonpositive_step_rejected() {
        let f = field("x", &["x"]);
        assert!(fd_gradient(&f, &[1.0], 0.0).is_err());
    }

    #[test]
    fn jacobian_of_linear_and_identity() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -4.0, 0.5, 0.0]);
        let j = jacobian(&Linear(a.clone()), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(j, a);
        let id = Linear(DMatrix::identity(3, 3));
        assert_eq!(jacobian(&id, &[7.0, 8.0, 9.0]).unwrap(), DMatrix::identity(3, 3));
        assert!(jacobian(&id, &[1.0]).is_err());
    }
}
