use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::contact::dot;
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// A contact Hamiltonian on T*Q×ℝ, coordinates ordered (q, p, z).
pub trait Hamiltonian {
    fn n(&self) -> usize;
    fn name(&self) -> &str;
    fn value_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_gradient(x)?.0)
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    n: usize,
    h: ScalarField,
}

impl HamiltonianSystem {
    /// `h` must be a field over exactly 2n+1 coordinates read as (q, p, z).
    pub fn new(n: usize, h: ScalarField) -> Result<HamiltonianSystem> {
        if n == 0 {
            return Err(Error::InvalidArgument("configuration dimension n must be >= 1".into()));
        }
        Error::check_dim(&format!("Hamiltonian {}", h.name()), 2 * n + 1, h.arity())?;
        Ok(HamiltonianSystem { n, h })
    }

    pub fn parse(n: usize, source: &str, constants: &BTreeMap<String, f64>) -> Result<HamiltonianSystem> {
        let names = state_names(n, "p");
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        HamiltonianSystem::new(n, ScalarField::parse("H", source, &refs, constants)?)
    }

    pub fn field(&self) -> &ScalarField {
        &self.h
    }
}

impl Hamiltonian for HamiltonianSystem {
    fn n(&self) -> usize {
        self.n
    }
    fn name(&self) -> &str {
        self.h.name()
    }
    fn value_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.h.value_gradient(x)
    }
}

/// Coordinate names `q, <mom>, z` for n = 1 and `q1.., <mom>1.., z` otherwise.
pub fn state_names(n: usize, momentum: &str) -> Vec<String> {
    let block = |base: &str| -> Vec<String> {
        if n == 1 {
            vec![base.to_string()]
        } else {
            (1..=n).map(|i| format!("{base}{i}")).collect()
        }
    };
    let mut v = block("q");
    v.extend(block(momentum));
    v.push("z".into());
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Degenerate,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct LagrangianSystem {
    n: usize,
    l: ScalarField,
    regularity: Regularity,
}

impl LagrangianSystem {
    /// `l` must be a field over exactly 2n+1 coordinates read as (q, q̇, z).
    pub fn new(n: usize, l: ScalarField, regularity: Regularity) -> Result<LagrangianSystem> {
        if n == 0 {
            return Err(Error::InvalidArgument("configuration dimension n must be >= 1".into()));
        }
        Error::check_dim(&format!("Lagrangian {}", l.name()), 2 * n + 1, l.arity())?;
        Ok(LagrangianSystem { n, l, regularity })
    }

    pub fn parse(
        n: usize,
        source: &str,
        constants: &BTreeMap<String, f64>,
        regularity: Regularity,
    ) -> Result<LagrangianSystem> {
        let names = state_names(n, "qdot");
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        LagrangianSystem::new(n, ScalarField::parse("L", source, &refs, constants)?, regularity)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lagrangian(&self) -> &ScalarField {
        &self.l
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn name(&self) -> &str {
        self.l.name()
    }

    /// det ∂²L/∂q̇∂q̇ at `s`.
    pub fn velocity_hessian_det(&self, s: &[f64]) -> Result<f64> {
        let n = self.n;
        let h = self.l.hessian(s)?;
        Ok(h.view((n, n), (n, n)).determinant())
    }
}

/// H(q, p, z) = p·q̇ − L for a regular Lagrangian, with q̇ solving p = ∂L/∂q̇.
pub struct LegendreReduced<'a> {
    sys: &'a LagrangianSystem,
    name: String,
}

impl<'a> LegendreReduced<'a> {
    pub const MAX_ITER: usize = 50;

    pub fn new(sys: &'a LagrangianSystem) -> LegendreReduced<'a> {
        LegendreReduced { sys, name: format!("Legendre transform of {}", sys.name()) }
    }

    /// Solves ∂L/∂q̇(q, q̇, z) = p by Newton's method seeded at q̇ = p.
    pub fn velocity(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.sys.n;
        Error::check_dim("contact state", 2 * n + 1, x.len())?;
        let p = &x[n..2 * n];
        let mut s = x.to_vec();
        let mut residual = f64::INFINITY;
        for _ in 0..Self::MAX_ITER {
            let (_, g, h) = self.sys.l.second_order(&s)?;
            let r = DVector::from_iterator(n, (0..n).map(|i| g[n + i] - p[i]));
            residual = r.amax();
            let scale = 1.0 + p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if residual <= 1e-14 * scale {
                return Ok(s[n..2 * n].to_vec());
            }
            let a = h.view((n, n), (n, n)).into_owned();
            let lu = a.lu();
            let det = lu.determinant();
            if !(det.abs() > super::SINGULAR_DET) {
                return Err(Error::SingularHessian { det });
            }
            let dv = lu.solve(&r).ok_or(Error::SingularHessian { det })?;
            for i in 0..n {
                s[n + i] -= dv[i];
            }
        }
        if residual <= 1e-10 {
            return Ok(s[n..2 * n].to_vec());
        }
        Err(Error::NoCriticalFiber { iterations: Self::MAX_ITER, residual })
    }
}

impl Hamiltonian for LegendreReduced<'_> {
    fn n(&self) -> usize {
        self.sys.n
    }
    fn name(&self) -> &str {
        &self.name
    }
    /// Gradient by the envelope theorem: (−L_q, q̇, −L_z).
    fn value_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let n = self.sys.n;
        let qdot = self.velocity(x)?;
        let mut s = x[..n].to_vec();
        s.extend_from_slice(&qdot);
        s.push(x[2 * n]);
        let (l, g) = self.sys.l.value_gradient(&s)?;
        let mut grad = Vec::with_capacity(2 * n + 1);
        grad.extend(g[..n].iter().map(|v| -v));
        grad.extend_from_slice(&qdot);
        grad.push(-g[2 * n]);
        Ok((dot(&x[n..2 * n], &qdot) - l, grad))
    }
}
