//! Coordinate diffeomorphisms of the classical, contact and evolution
//! triples, and quantomorphisms of T*ℝᵐ×ℝ.
//!
//! Slot order is fixed per map; every map is square.
//!
//! | map        | input                          | output                                    |
//! |------------|--------------------------------|-------------------------------------------|
//! | α          | q, p, q̇, ṗ                     | q, q̇, ṗ, p                                |
//! | β          | q, p, q̇, ṗ                     | q, p, ṗ, −q̇                               |
//! | ψ          | q, q̇, a, ȧ                     | q, ȧ, a, −q̇                               |
//! | κ          | q, q̇, q′, q̇′                   | q, q′, q̇, q̇′                              |
//! | β^c        | q, p, z, q̇, ṗ, ż, u            | q, p, z, up+ṗ, −q̇, −u, ż−p·q̇              |
//! | α^c        | q, p, z, q̇, ṗ, ż, u            | q, q̇, z, up+ṗ, p, −u, ż                   |
//! | ψ^c        | q, q̇, z, a, ȧ, v, u            | q, ȧ, z, a, −q̇, v, u−ȧ·q̇                  |
//! | α⁰         | q, p, z, q̇, ṗ, u               | q, q̇, z, up+ṗ, p, −u                      |
//! | β⁰         | q, p, z, q̇, ṗ, u               | q, p, z, up+ṗ, −q̇, −u                     |
//! | φ_J        | x₁..xₘ, y₁..yₘ, u              | x_ρ→y_ρ, y_ρ→−x_ρ (ρ∈J), u−Σ_J x_ρ y_ρ     |
//!
//! Every block of n slots is a vector; z, ż, u, v, w are scalars.

use nalgebra::DMatrix;

use crate::contact::DiffForm;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::numeric::{jacobian, DiffMap, Real};
use crate::report::{Check, VerificationReport};
use crate::sampling::{uniform_vec, SampleRng};

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Identity {
        dim: usize,
    },
    Alpha {
        n: usize,
    },
    Beta {
        n: usize,
    },
    Psi {
        n: usize,
    },
    Kappa {
        n: usize,
    },
    BetaC {
        n: usize,
    },
    AlphaC {
        n: usize,
    },
    PsiC {
        n: usize,
    },
    Alpha0 {
        n: usize,
    },
    Beta0 {
        n: usize,
    },
    /// `swap` holds zero-based indices of the transformed pairs.
    Quantomorphism {
        m: usize,
        swap: Vec<usize>,
    },
    /// Applied first to last.
    Compose(Vec<CoordMap>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordMap {
    name: String,
    kind: MapKind,
    inverted: bool,
}

impl CoordMap {
    fn new(name: &str, kind: MapKind) -> CoordMap {
        CoordMap { name: name.to_string(), kind, inverted: false }
    }

    pub fn identity(dim: usize) -> CoordMap {
        CoordMap::new("identity", MapKind::Identity { dim })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MapKind::Identity { dim } => *dim,
            MapKind::Alpha { n } | MapKind::Beta { n } | MapKind::Psi { n } | MapKind::Kappa { n } => 4 * n,
            MapKind::BetaC { n } | MapKind::AlphaC { n } | MapKind::PsiC { n } => 4 * n + 3,
            MapKind::Alpha0 { n } | MapKind::Beta0 { n } => 4 * n + 2,
            MapKind::Quantomorphism { m, .. } => 2 * m + 1,
            MapKind::Compose(maps) => maps.first().map_or(0, CoordMap::dim),
        }
    }

    /// Every map here has a closed-form inverse.
    pub fn inverse(&self) -> CoordMap {
        let name = match self.name.strip_suffix("^-1") {
            Some(base) => base.to_string(),
            None => format!("{}^-1", self.name),
        };
        CoordMap { name, kind: self.kind.clone(), inverted: !self.inverted }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CoordMap) -> Result<CoordMap> {
        Error::check_dim("map composition", self.dim(), other.dim())?;
        Ok(CoordMap::new(&format!("{}∘{}", other.name, self.name), MapKind::Compose(vec![self.clone(), other.clone()])))
    }

    pub fn renamed(mut self, name: &str) -> CoordMap {
        self.name = name.to_string();
        self
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&format!("map {}", self.name), self.dim(), x.len())?;
        Ok(self.apply(x))
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        jacobian(self, x)
    }

    fn forward<T: Real>(&self, x: &[T]) -> Vec<T> {
        match &self.kind {
            MapKind::Identity { .. } => x.to_vec(),
            MapKind::Alpha { n } => {
                let n = *n;
                cat(&[&x[..n], &x[2 * n..3 * n], &x[3 * n..], &x[n..2 * n]])
            }
            MapKind::Beta { n } => {
                let n = *n;
                cat(&[&x[..2 * n], &x[3 * n..], &neg(&x[2 * n..3 * n])])
            }
            MapKind::Psi { n } => {
                let n = *n;
                cat(&[&x[..n], &x[3 * n..], &x[2 * n..3 * n], &neg(&x[n..2 * n])])
            }
            MapKind::Kappa { n } => kappa(*n, x),
            MapKind::BetaC { n } => {
                let s = Ext::split(*n, x);
                let a = up_plus(s.u, s.p, s.pdot);
                let w = s.zdot.clone() - dotr(s.p, s.qdot);
                cat(&[s.q, s.p, std::slice::from_ref(s.z), &a, &neg(s.qdot), &[-s.u.clone()], &[w]])
            }
            MapKind::AlphaC { n } => {
                let s = Ext::split(*n, x);
                let a = up_plus(s.u, s.p, s.pdot);
                cat(&[s.q, s.qdot, std::slice::from_ref(s.z), &a, s.p, &[-s.u.clone()], std::slice::from_ref(s.zdot)])
            }
            MapKind::PsiC { n } => {
                // (q, q̇, z, a, ȧ, v, u) shares the 4n+3 layout of Ext
                let s = Ext::split(*n, x);
                let (qdot, adot) = (s.p, s.pdot);
                let u = s.u.clone() - dotr(adot, qdot);
                cat(&[s.q, adot, std::slice::from_ref(s.z), s.qdot, &neg(qdot), std::slice::from_ref(s.zdot), &[u]])
            }
            MapKind::Alpha0 { n } => {
                let s = Slice::split(*n, x);
                let a = up_plus(s.u, s.p, s.pdot);
                cat(&[s.q, s.qdot, std::slice::from_ref(s.z), &a, s.p, &[-s.u.clone()]])
            }
            MapKind::Beta0 { n } => {
                let s = Slice::split(*n, x);
                let a = up_plus(s.u, s.p, s.pdot);
                cat(&[s.q, s.p, std::slice::from_ref(s.z), &a, &neg(s.qdot), &[-s.u.clone()]])
            }
            MapKind::Quantomorphism { m, swap } => {
                let m = *m;
                let mut out = x.to_vec();
                let mut u = x[2 * m].clone();
                for &r in swap {
                    out[r] = x[m + r].clone();
                    out[m + r] = -x[r].clone();
                    u = u - x[r].clone() * x[m + r].clone();
                }
                out[2 * m] = u;
                out
            }
            MapKind::Compose(maps) => maps.iter().fold(x.to_vec(), |acc, f| f.apply(&acc)),
        }
    }

    fn backward<T: Real>(&self, x: &[T]) -> Vec<T> {
        match &self.kind {
            MapKind::Identity { .. } => x.to_vec(),
            MapKind::Alpha { n } => {
                // (q, q̇, ṗ, p) -> (q, p, q̇, ṗ)
                let n = *n;
                cat(&[&x[..n], &x[3 * n..], &x[n..2 * n], &x[2 * n..3 * n]])
            }
            MapKind::Beta { n } => {
                // (q, p, ṗ, −q̇) -> (q, p, q̇, ṗ)
                let n = *n;
                cat(&[&x[..2 * n], &neg(&x[3 * n..]), &x[2 * n..3 * n]])
            }
            MapKind::Psi { n } => {
                // (q, ȧ, a, −q̇) -> (q, q̇, a, ȧ)
                let n = *n;
                cat(&[&x[..n], &neg(&x[3 * n..]), &x[2 * n..3 * n], &x[n..2 * n]])
            }
            MapKind::Kappa { n } => kappa(*n, x),
            MapKind::BetaC { n } => {
                let y = Ext::split(*n, x);
                let (a, b, v, w) = (y.qdot, y.pdot, y.zdot, y.u);
                let u = -v.clone();
                let qdot = neg(b);
                let pdot = minus_up(&u, y.p, a);
                let zdot = w.clone() + dotr(y.p, &qdot);
                cat(&[y.q, y.p, std::slice::from_ref(y.z), &qdot, &pdot, &[zdot], &[u]])
            }
            MapKind::AlphaC { n } => {
                let y = Ext::split(*n, x);
                let (qdot, a, p, v, w) = (y.p, y.qdot, y.pdot, y.zdot, y.u);
                let u = -v.clone();
                let pdot = minus_up(&u, p, a);
                cat(&[y.q, p, std::slice::from_ref(y.z), qdot, &pdot, std::slice::from_ref(w), &[u]])
            }
            MapKind::PsiC { n } => {
                // (q, ȧ, z, a, −q̇, v, u − ȧ·q̇) -> (q, q̇, z, a, ȧ, v, u)
                let y = Ext::split(*n, x);
                let (adot, a, mqdot, v, w) = (y.p, y.qdot, y.pdot, y.zdot, y.u);
                let qdot = neg(mqdot);
                let u = w.clone() + dotr(adot, &qdot);
                cat(&[y.q, &qdot, std::slice::from_ref(y.z), a, adot, std::slice::from_ref(v), &[u]])
            }
            MapKind::Alpha0 { n } => {
                let y = Slice::split(*n, x);
                let (qdot, a, p, v) = (y.p, y.qdot, y.pdot, y.u);
                let u = -v.clone();
                let pdot = minus_up(&u, p, a);
                cat(&[y.q, p, std::slice::from_ref(y.z), qdot, &pdot, &[u]])
            }
            MapKind::Beta0 { n } => {
                let y = Slice::split(*n, x);
                let (a, b, v) = (y.qdot, y.pdot, y.u);
                let u = -v.clone();
                let pdot = minus_up(&u, y.p, a);
                cat(&[y.q, y.p, std::slice::from_ref(y.z), &neg(b), &pdot, &[u]])
            }
            MapKind::Quantomorphism { m, swap } => {
                let m = *m;
                let mut out = x.to_vec();
                let mut u = x[2 * m].clone();
                for &r in swap {
                    let (xr, yr) = (-x[m + r].clone(), x[r].clone());
                    u = u + xr.clone() * yr.clone();
                    out[r] = xr;
                    out[m + r] = yr;
                }
                out[2 * m] = u;
                out
            }
            MapKind::Compose(maps) => maps.iter().rev().fold(x.to_vec(), |acc, f| f.inverse().apply(&acc)),
        }
    }
}

impl DiffMap for CoordMap {
    fn dim_in(&self) -> usize {
        self.dim()
    }
    fn dim_out(&self) -> usize {
        self.dim()
    }
    fn apply<T: Real>(&self, x: &[T]) -> Vec<T> {
        if self.inverted {
            self.backward(x)
        } else {
            self.forward(x)
        }
    }
}

/// Views of a 4n+3 point in the (q, p, z, q̇, ṗ, ż, u) layout.
struct Ext<'a, T> {
    q: &'a [T],
    p: &'a [T],
    z: &'a T,
    qdot: &'a [T],
    pdot: &'a [T],
    zdot: &'a T,
    u: &'a T,
}

impl<'a, T> Ext<'a, T> {
    fn split(n: usize, x: &'a [T]) -> Self {
        Ext {
            q: &x[..n],
            p: &x[n..2 * n],
            z: &x[2 * n],
            qdot: &x[2 * n + 1..3 * n + 1],
            pdot: &x[3 * n + 1..4 * n + 1],
            zdot: &x[4 * n + 1],
            u: &x[4 * n + 2],
        }
    }
}

/// Views of a 4n+2 point in the (q, p, z, q̇, ṗ, u) layout.
struct Slice<'a, T> {
    q: &'a [T],
    p: &'a [T],
    z: &'a T,
    qdot: &'a [T],
    pdot: &'a [T],
    u: &'a T,
}

impl<'a, T> Slice<'a, T> {
    fn split(n: usize, x: &'a [T]) -> Self {
        Slice {
            q: &x[..n],
            p: &x[n..2 * n],
            z: &x[2 * n],
            qdot: &x[2 * n + 1..3 * n + 1],
            pdot: &x[3 * n + 1..4 * n + 1],
            u: &x[4 * n + 1],
        }
    }
}

fn cat<T: Clone>(parts: &[&[T]]) -> Vec<T> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn neg<T: Real>(v: &[T]) -> Vec<T> {
    v.iter().map(|x| -x.clone()).collect()
}

fn dotr<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::from_f64(0.0), |s, (x, y)| s + x.clone() * y.clone())
}

/// u·p + ṗ
fn up_plus<T: Real>(u: &T, p: &[T], pdot: &[T]) -> Vec<T> {
    p.iter().zip(pdot).map(|(pi, di)| u.clone() * pi.clone() + di.clone()).collect()
}

/// a − u·p
fn minus_up<T: Real>(u: &T, p: &[T], a: &[T]) -> Vec<T> {
    p.iter().zip(a).map(|(pi, ai)| ai.clone() - u.clone() * pi.clone()).collect()
}

fn kappa<T: Real>(n: usize, x: &[T]) -> Vec<T> {
    cat(&[&x[..n], &x[2 * n..3 * n], &x[n..2 * n], &x[3 * n..]])
}

pub struct ClassicalMaps {
    pub alpha: CoordMap,
    pub beta: CoordMap,
    pub psi: CoordMap,
    pub kappa: CoordMap,
}

pub fn classical_maps(n: usize) -> Result<ClassicalMaps> {
    check_n(n)?;
    Ok(ClassicalMaps {
        alpha: CoordMap::new("alpha", MapKind::Alpha { n }),
        beta: CoordMap::new("beta", MapKind::Beta { n }),
        psi: CoordMap::new("psi", MapKind::Psi { n }),
        kappa: CoordMap::new("kappa", MapKind::Kappa { n }),
    })
}

pub fn beta_c(n: usize) -> Result<CoordMap> {
    check_n(n)?;
    Ok(CoordMap::new("beta_c", MapKind::BetaC { n }))
}

pub fn alpha_c(n: usize) -> Result<CoordMap> {
    check_n(n)?;
    Ok(CoordMap::new("alpha_c", MapKind::AlphaC { n }))
}

pub fn psi_c(n: usize) -> Result<CoordMap> {
    check_n(n)?;
    Ok(CoordMap::new("psi_c", MapKind::PsiC { n }))
}

pub struct EvolutionMaps {
    pub alpha0: CoordMap,
    pub beta0: CoordMap,
}

pub fn evolution_maps(n: usize) -> Result<EvolutionMaps> {
    check_n(n)?;
    Ok(EvolutionMaps {
        alpha0: CoordMap::new("alpha0", MapKind::Alpha0 { n }),
        beta0: CoordMap::new("beta0", MapKind::Beta0 { n }),
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("configuration dimension n must be >= 1".into()));
    }
    Ok(())
}

/// The quantomorphism of T*ℝᵐ×ℝ exchanging x_ρ and y_ρ for ρ in `j`
/// (one-based, as listed in the partition I∪J).
pub fn quantomorphism(m: usize, j: &[usize]) -> Result<CoordMap> {
    check_n(m)?;
    let mut swap = Vec::with_capacity(j.len());
    for &r in j {
        if r == 0 || r > m {
            return Err(Error::InvalidArgument(format!("index {r} outside 1..={m}")));
        }
        if swap.contains(&(r - 1)) {
            return Err(Error::InvalidArgument(format!("index {r} listed twice")));
        }
        swap.push(r - 1);
    }
    swap.sort_unstable();
    let label: Vec<String> = swap.iter().map(|r| (r + 1).to_string()).collect();
    Ok(CoordMap::new(&format!("phi_J{{{}}}", label.join(",")), MapKind::Quantomorphism { m, swap }))
}

/// Verifies `m* dst = μ·src` at random points and tangent vectors.
///
/// Points are drawn uniformly from `[-2, 2]^dim`, vectors from `[-1, 1]^dim`.
/// The residual is relative: |lhs − rhs| / max(1, |rhs|).
#[allow(clippy::too_many_arguments)]
pub fn verify_pullback(
    name: &str,
    m: &CoordMap,
    src: &dyn DiffForm,
    dst: &dyn DiffForm,
    samples: usize,
    conformal: Option<&ScalarField>,
    tolerance: f64,
    rng: &mut SampleRng,
) -> Result<VerificationReport> {
    Error::check_dim(&format!("pullback by {}: source form", m.name()), m.dim(), src.dim())?;
    Error::check_dim(&format!("pullback by {}: target form", m.name()), m.dim(), dst.dim())?;
    Error::check_dim("pullback: form degrees", src.degree(), dst.degree())?;
    if let Some(mu) = conformal {
        Error::check_dim("pullback: conformal factor arity", m.dim(), mu.arity())?;
    }
    let dim = m.dim();
    let mut check = Check::new(name, tolerance);
    for _ in 0..samples {
        let x = uniform_vec(rng, dim, -2.0, 2.0);
        let ws: Vec<Vec<f64>> = (0..src.degree()).map(|_| uniform_vec(rng, dim, -1.0, 1.0)).collect();
        let y = m.eval(&x)?;
        let jac = m.jacobian(&x)?;
        let pushed: Vec<Vec<f64>> =
            ws.iter().map(|w| (&jac * nalgebra::DVector::from_column_slice(w)).as_slice().to_vec()).collect();
        let mu = match conformal {
            Some(f) => f.value(&x)?,
            None => 1.0,
        };
        let w_refs: Vec<&[f64]> = ws.iter().map(Vec::as_slice).collect();
        let p_refs: Vec<&[f64]> = pushed.iter().map(Vec::as_slice).collect();
        let lhs = dst.eval(&y, &p_refs);
        let rhs = mu * src.eval(&x, &w_refs);
        check.record((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(check.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar(v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }

    #[test]
    fn classical_examples() {
        let c = classical_maps(1).unwrap();
        assert_eq!(c.alpha.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), ar(&[1.0, 3.0, 4.0, 2.0]));
        assert_eq!(c.beta.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), ar(&[1.0, 2.0, 4.0, -3.0]));
        assert_eq!(c.kappa.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), ar(&[1.0, 3.0, 2.0, 4.0]));
    }

    #[test]
    fn contact_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let b = beta_c(1).unwrap();
        let y = b.eval(&x).unwrap();
        assert_eq!(y, ar(&[1.0, 2.0, 3.0, 19.0, -4.0, -7.0, -2.0]));
        assert_eq!(b.inverse().eval(&y).unwrap(), ar(&x));
        assert_eq!(b.eval(&[0.0; 7]).unwrap(), ar(&[0.0; 7]));

        let a = alpha_c(1).unwrap();
        let ya = a.eval(&x).unwrap();
        assert_eq!(ya, ar(&[1.0, 4.0, 3.0, 19.0, 2.0, -7.0, 6.0]));
        assert_eq!(psi_c(1).unwrap().eval(&ya).unwrap(), y);

        let p = psi_c(1).unwrap();
        assert_eq!(p.eval(&x).unwrap(), ar(&[1.0, 5.0, 3.0, 4.0, -2.0, 6.0, -3.0]));
    }

    #[test]
    fn evolution_examples() {
        let e = evolution_maps(1).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
        assert_eq!(e.alpha0.eval(&x).unwrap(), ar(&[1.0, 4.0, 3.0, 19.0, 2.0, -7.0]));
        assert_eq!(e.beta0.eval(&x).unwrap(), ar(&[1.0, 2.0, 3.0, 19.0, -4.0, -7.0]));
    }

    #[test]
    fn quantomorphism_example_and_validation() {
        let phi = quantomorphism(1, &[1]).unwrap();
        assert_eq!(phi.eval(&[1.0, 2.0, 5.0]).unwrap(), ar(&[2.0, -1.0, 3.0]));
        assert_eq!(phi.inverse().eval(&[2.0, -1.0, 3.0]).unwrap(), ar(&[1.0, 2.0, 5.0]));
        assert!(quantomorphism(3, &[4]).is_err());
        assert!(quantomorphism(3, &[1, 1]).is_err());
        assert!(quantomorphism(3, &[0]).is_err());
    }

    #[test]
    fn inverse_names_toggle() {
        let b = beta_c(2).unwrap();
        assert_eq!(b.inverse().name(), "beta_c^-1");
        assert_eq!(b.inverse().inverse(), b);
    }

    #[test]
    fn composition_order() {
        let a = alpha_c(1).unwrap();
        let p = psi_c(1).unwrap();
        let pa = a.then(&p).unwrap();
        let x = [0.3, -1.0, 2.0, 0.7, 1.1, -0.4, 0.9];
        assert_eq!(pa.eval(&x).unwrap(), beta_c(1).unwrap().eval(&x).unwrap());
        let back = pa.inverse().eval(&pa.eval(&x).unwrap()).unwrap();
        for (u, v) in back.iter().zip(x) {
            assert!((u - v).abs() < 1e-15);
        }
    }
}
