//! Darboux charts on the extended cotangent bundle and its iterates.
//!
//! Tangent vectors and covectors are plain coordinate arrays in the slot
//! order of the point they are attached to:
//!
//! | space            | slots                              | dim    |
//! |------------------|------------------------------------|--------|
//! | T*Q×ℝ            | q, p, z                            | 2n+1   |
//! | TT*Q×ℝ           | q, p, z, q̇, ṗ, ż, u                | 4n+3   |
//! | T*T*Q×ℝ          | q, p, z, a, b, v, w                | 4n+3   |
//! | HT*Q×ℝ (slice)   | q, p, z, q̇, ṗ, u  (ż = p·q̇)        | 4n+2   |

use crate::error::{Error, Result};

/// Absolute tolerance for membership in the slice ż = p·q̇.
pub const SLICE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ContactPoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
}

impl ContactPoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>, z: f64) -> Result<ContactPoint> {
        if q.is_empty() {
            return Err(Error::InvalidArgument("contact point needs n >= 1".into()));
        }
        Error::check_dim("contact point momenta", q.len(), p.len())?;
        Ok(ContactPoint { q, p, z })
    }

    pub fn from_slice(n: usize, x: &[f64]) -> Result<ContactPoint> {
        Error::check_dim("contact point", 2 * n + 1, x.len())?;
        ContactPoint::new(x[..n].to_vec(), x[n..2 * n].to_vec(), x[2 * n])
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.extend_from_slice(&self.q);
        v.extend_from_slice(&self.p);
        v.push(self.z);
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtTangentPoint {
    pub base: ContactPoint,
    pub qdot: Vec<f64>,
    pub pdot: Vec<f64>,
    pub zdot: f64,
    pub u: f64,
}

impl ExtTangentPoint {
    pub fn from_slice(n: usize, x: &[f64]) -> Result<ExtTangentPoint> {
        Error::check_dim("extended tangent point", 4 * n + 3, x.len())?;
        Ok(ExtTangentPoint {
            base: ContactPoint::from_slice(n, &x[..2 * n + 1])?,
            qdot: x[2 * n + 1..3 * n + 1].to_vec(),
            pdot: x[3 * n + 1..4 * n + 1].to_vec(),
            zdot: x[4 * n + 1],
            u: x[4 * n + 2],
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.base.to_vec();
        v.extend_from_slice(&self.qdot);
        v.extend_from_slice(&self.pdot);
        v.push(self.zdot);
        v.push(self.u);
        v
    }

    /// ż − p·q̇, zero on HT*Q×ℝ.
    pub fn slice_defect(&self) -> f64 {
        self.zdot - dot(&self.base.p, &self.qdot)
    }

    /// The 4n+2 slice coordinates (q, p, z, q̇, ṗ, u).
    pub fn slice_coords(&self) -> Result<Vec<f64>> {
        let defect = self.slice_defect();
        if defect.abs() > SLICE_TOL {
            return Err(Error::Constraint {
                constraint: "zdot = p.qdot".into(),
                residual: defect.abs(),
                tolerance: SLICE_TOL,
            });
        }
        let mut v = self.base.to_vec();
        v.extend_from_slice(&self.qdot);
        v.extend_from_slice(&self.pdot);
        v.push(self.u);
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtCotangentPoint {
    pub base: ContactPoint,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub v: f64,
    pub w: f64,
}

impl ExtCotangentPoint {
    pub fn from_slice(n: usize, x: &[f64]) -> Result<ExtCotangentPoint> {
        Error::check_dim("extended cotangent point", 4 * n + 3, x.len())?;
        Ok(ExtCotangentPoint {
            base: ContactPoint::from_slice(n, &x[..2 * n + 1])?,
            a: x[2 * n + 1..3 * n + 1].to_vec(),
            b: x[3 * n + 1..4 * n + 1].to_vec(),
            v: x[4 * n + 1],
            w: x[4 * n + 2],
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = self.base.to_vec();
        out.extend_from_slice(&self.a);
        out.extend_from_slice(&self.b);
        out.push(self.v);
        out.push(self.w);
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_vec(context: &str, x: &ContactPoint, v: &[f64]) -> Result<()> {
    Error::check_dim(context, x.dim(), v.len())
}

/// η = dz − p·dq evaluated on `v`.
pub fn eta_eval(x: &ContactPoint, v: &[f64]) -> Result<f64> {
    check_vec("eta", x, v)?;
    let n = x.n();
    Ok(v[2 * n] - dot(&x.p, &v[..n]))
}

/// η as a covector (dq, dp, dz components).
pub fn eta_covector(x: &ContactPoint) -> Vec<f64> {
    let n = x.n();
    let mut c = vec![0.0; 2 * n + 1];
    for (ci, pi) in c.iter_mut().zip(&x.p) {
        *ci = -pi;
    }
    c[2 * n] = 1.0;
    c
}

pub fn reeb(x: &ContactPoint) -> Vec<f64> {
    let mut r = vec![0.0; x.dim()];
    r[2 * x.n()] = 1.0;
    r
}

/// dη = Σ dq^i∧dp_i.
pub fn deta_eval(x: &ContactPoint, v: &[f64], w: &[f64]) -> Result<f64> {
    check_vec("d eta", x, v)?;
    check_vec("d eta", x, w)?;
    let n = x.n();
    Ok((0..n).map(|i| v[i] * w[n + i] - v[n + i] * w[i]).sum())
}

/// ♯_Λ: α_i dq^i + α^i dp_i + u dz ↦ α^i ∂_q − (α_i + p_i u) ∂_p + α^i p_i ∂_z.
pub fn sharp_lambda(x: &ContactPoint, alpha: &[f64]) -> Result<Vec<f64>> {
    check_vec("sharp_lambda", x, alpha)?;
    let n = x.n();
    let u = alpha[2 * n];
    let mut v = vec![0.0; 2 * n + 1];
    for i in 0..n {
        v[i] = alpha[n + i];
        v[n + i] = -(alpha[i] + x.p[i] * u);
    }
    v[2 * n] = dot(&alpha[n..2 * n], &x.p);
    Ok(v)
}

/// ♭(v) = ι_v dη + η(v) η.
pub fn flat(x: &ContactPoint, v: &[f64]) -> Result<Vec<f64>> {
    let e = eta_eval(x, v)?;
    let n = x.n();
    let mut c = vec![0.0; 2 * n + 1];
    for i in 0..n {
        c[i] = -v[n + i] - x.p[i] * e;
        c[n + i] = v[i];
    }
    c[2 * n] = e;
    Ok(c)
}

/// Inverse of [`flat`].
pub fn sharp(x: &ContactPoint, alpha: &[f64]) -> Result<Vec<f64>> {
    check_vec("sharp", x, alpha)?;
    let n = x.n();
    let e = alpha[2 * n];
    let mut v = vec![0.0; 2 * n + 1];
    for i in 0..n {
        v[i] = alpha[n + i];
        v[n + i] = -alpha[i] - x.p[i] * e;
    }
    v[2 * n] = e + dot(&x.p, &alpha[n..2 * n]);
    Ok(v)
}

/// η^T = dż + u dz − (ṗ_i + u p_i) dq^i − p_i dq̇^i.
pub fn eta_t_eval(x: &ExtTangentPoint, w: &[f64]) -> Result<f64> {
    let n = x.n();
    Error::check_dim("eta^T", 4 * n + 3, w.len())?;
    let mut s = w[4 * n + 1] + x.u * w[2 * n];
    for i in 0..n {
        s -= (x.pdot[i] + x.u * x.base.p[i]) * w[i];
        s -= x.base.p[i] * w[2 * n + 1 + i];
    }
    Ok(s)
}

/// R^T = ∂/∂ż.
pub fn reeb_t(n: usize) -> Vec<f64> {
    let mut r = vec![0.0; 4 * n + 3];
    r[4 * n + 1] = 1.0;
    r
}

/// θ_η = u dz − (ṗ_i + u p_i) dq^i + q̇^i dp_i on slice coordinates.
pub fn theta_eta_eval(x: &ExtTangentPoint, w: &[f64]) -> Result<f64> {
    let n = x.n();
    x.slice_coords()?;
    Error::check_dim("theta_eta", 4 * n + 2, w.len())?;
    let mut s = x.u * w[2 * n];
    for i in 0..n {
        s -= (x.pdot[i] + x.u * x.base.p[i]) * w[i];
        s += x.qdot[i] * w[n + i];
    }
    Ok(s)
}

/// ω_η = du∧dz − dṗ_i∧dq^i − p_i du∧dq^i − u dp_i∧dq^i + dq̇^i∧dp_i.
pub fn omega_eta_eval(x: &ExtTangentPoint, w1: &[f64], w2: &[f64]) -> Result<f64> {
    let n = x.n();
    x.slice_coords()?;
    Error::check_dim("omega_eta", 4 * n + 2, w1.len())?;
    Error::check_dim("omega_eta", 4 * n + 2, w2.len())?;
    Ok(omega_eta_raw(n, &x.base.p, x.u, w1, w2))
}

pub(crate) fn omega_eta_raw(n: usize, p: &[f64], u: f64, a: &[f64], b: &[f64]) -> f64 {
    let wedge = |i: usize, j: usize| a[i] * b[j] - a[j] * b[i];
    let (iz, iu) = (2 * n, 4 * n + 1);
    let mut s = wedge(iu, iz);
    for (i, pi) in p.iter().enumerate().take(n) {
        let (iq, ip, iqd, ipd) = (i, n + i, 2 * n + 1 + i, 3 * n + 1 + i);
        s += -wedge(ipd, iq) - pi * wedge(iu, iq) - u * wedge(ip, iq) + wedge(iqd, ip);
    }
    s
}

/// A differential form in a fixed chart, evaluated on `degree` vectors.
pub trait DiffForm {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn eval(&self, x: &[f64], vectors: &[&[f64]]) -> f64;
}

/// η = dw − Σ y_i dx^i on (x_1..x_m, y_1..y_m, w).
///
/// With m = n this is η_Q on T*Q×ℝ; with m = 2n+1 it is the canonical form
/// of T*T*Q×ℝ (x = (q,p,z), y = (a,b,v)) and of T*TQ×ℝ.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalContactForm {
    pub m: usize,
}

impl DiffForm for CanonicalContactForm {
    fn name(&self) -> String {
        format!("canonical contact form (m={})", self.m)
    }
    fn dim(&self) -> usize {
        2 * self.m + 1
    }
    fn degree(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64], v: &[&[f64]]) -> f64 {
        let m = self.m;
        let w = v[0];
        w[2 * m] - dot(&x[m..2 * m], &w[..m])
    }
}

/// ω = Σ dx^i∧dy_i on (x_1..x_m, y_1..y_m).
#[derive(Clone, Copy, Debug)]
pub struct CanonicalSymplecticForm {
    pub m: usize,
}

impl DiffForm for CanonicalSymplecticForm {
    fn name(&self) -> String {
        format!("canonical symplectic form (m={})", self.m)
    }
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval(&self, _x: &[f64], v: &[&[f64]]) -> f64 {
        let m = self.m;
        let (a, b) = (v[0], v[1]);
        (0..m).map(|i| a[i] * b[m + i] - a[m + i] * b[i]).sum()
    }
}

/// The lifted contact form η^T on TT*Q×ℝ.
#[derive(Clone, Copy, Debug)]
pub struct EtaT {
    pub n: usize,
}

impl DiffForm for EtaT {
    fn name(&self) -> String {
        format!("eta^T (n={})", self.n)
    }
    fn dim(&self) -> usize {
        4 * self.n + 3
    }
    fn degree(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64], v: &[&[f64]]) -> f64 {
        let n = self.n;
        let w = v[0];
        let (p, pdot, u) = (&x[n..2 * n], &x[3 * n + 1..4 * n + 1], x[4 * n + 2]);
        let mut s = w[4 * n + 1] + u * w[2 * n];
        for i in 0..n {
            s -= (pdot[i] + u * p[i]) * w[i] + p[i] * w[2 * n + 1 + i];
        }
        s
    }
}

/// ω_η on slice coordinates of HT*Q×ℝ.
#[derive(Clone, Copy, Debug)]
pub struct OmegaEta {
    pub n: usize,
}

impl DiffForm for OmegaEta {
    fn name(&self) -> String {
        format!("omega_eta (n={})", self.n)
    }
    fn dim(&self) -> usize {
        4 * self.n + 2
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval(&self, x: &[f64], v: &[&[f64]]) -> f64 {
        let n = self.n;
        omega_eta_raw(n, &x[n..2 * n], x[4 * n + 1], v[0], v[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(q: f64, p: f64, z: f64) -> ContactPoint {
        ContactPoint::new(vec![q], vec![p], z).unwrap()
    }

    fn ext(x: [f64; 7]) -> ExtTangentPoint {
        ExtTangentPoint::from_slice(1, &x).unwrap()
    }

    #[test]
    fn eta_on_basis() {
        assert_eq!(eta_eval(&pt(0.0, 0.0, 0.0), &[0.0, 0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(eta_eval(&pt(0.0, 2.0, 0.0), &[1.0, 0.0, 0.0]).unwrap(), -2.0);
        assert_eq!(eta_eval(&pt(0.3, 2.0, 0.1), &[0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!(eta_eval(&pt(0.0, 0.0, 0.0), &[1.0]).is_err());
    }

    #[test]
    fn reeb_is_vertical_and_normalized() {
        let x = pt(0.4, -1.2, 3.0);
        let r = reeb(&x);
        assert_eq!(r, vec![0.0, 0.0, 1.0]);
        assert_eq!(eta_eval(&x, &r).unwrap(), 1.0);
        for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            assert_eq!(deta_eval(&x, &r, &e).unwrap(), 0.0);
        }
    }

    #[test]
    fn sharp_lambda_examples() {
        let x = pt(0.5, 1.5, -0.25);
        assert_eq!(sharp_lambda(&x, &eta_covector(&x)).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(sharp_lambda(&x, &[0.0, 1.0, 0.0]).unwrap(), vec![1.0, 0.0, 1.5]);
        assert_eq!(sharp_lambda(&x, &[1.0, 0.0, 0.0]).unwrap(), vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn flat_examples() {
        let x = pt(0.5, 1.5, -0.25);
        assert_eq!(flat(&x, &reeb(&x)).unwrap(), eta_covector(&x));
        let x0 = pt(0.5, 0.0, -0.25);
        assert_eq!(flat(&x0, &[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        let k = sharp_lambda(&x, &flat(&x, &reeb(&x)).unwrap()).unwrap();
        assert_eq!(k, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn sharp_inverts_flat() {
        let x = pt(0.5, -0.7, 2.0);
        let v = [0.3, -1.1, 0.8];
        let back = sharp(&x, &flat(&x, &v).unwrap()).unwrap();
        for (a, b) in back.iter().zip(v) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn eta_t_examples() {
        let x = ext([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0]);
        let mut w = [0.0; 7];
        w[5] = 1.0;
        assert_eq!(eta_t_eval(&x, &w).unwrap(), 1.0);
        assert_eq!(eta_t_eval(&x, &reeb_t(1)).unwrap(), 1.0);
        let mut w = [0.0; 7];
        w[0] = 1.0;
        assert_eq!(eta_t_eval(&x, &w).unwrap(), -5.0);
        let mut w = [0.0; 7];
        w[4] = 1.0;
        assert_eq!(eta_t_eval(&x, &w).unwrap(), 0.0);
    }

    #[test]
    fn omega_eta_examples() {
        // ż = p·q̇ = 2·4
        let x = ext([1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 7.0]);
        let e = |i: usize| {
            let mut v = [0.0; 6];
            v[i] = 1.0;
            v
        };
        let (dp, dz, dqd, du) = (1, 2, 3, 5);
        assert_eq!(omega_eta_eval(&x, &e(du), &e(dz)).unwrap(), 1.0);
        assert_eq!(omega_eta_eval(&x, &e(dqd), &e(dp)).unwrap(), 1.0);
        let w = [0.3, -0.2, 1.1, 0.5, -0.9, 0.4];
        assert_eq!(omega_eta_eval(&x, &w, &w).unwrap(), 0.0);
    }

    #[test]
    fn slice_constraint_enforced() {
        let x = ext([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert!(matches!(omega_eta_eval(&x, &[0.0; 6], &[0.0; 6]), Err(Error::Constraint { .. })));
        assert!(theta_eta_eval(&x, &[0.0; 6]).is_err());
    }

    #[test]
    fn theta_eta_matches_form_object() {
        let x = ext([1.0, 2.0, 3.0, 4.0, 5.0, 8.0, 7.0]);
        let w = [0.3, -0.2, 1.1, 0.5, -0.9, 0.4];
        // u dz − (ṗ + u p) dq + q̇ dp
        let expect = 7.0 * 1.1 - (5.0 + 14.0) * 0.3 + 4.0 * -0.2;
        assert!((theta_eta_eval(&x, &w).unwrap() - expect).abs() < 1e-14);
        let s = x.slice_coords().unwrap();
        let o = OmegaEta { n: 1 };
        let v = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        assert_eq!(o.eval(&s, &[&w, &v]), omega_eta_eval(&x, &w, &v).unwrap());
    }

    #[test]
    fn point_round_trips() {
        let raw = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0];
        assert_eq!(ExtTangentPoint::from_slice(2, &raw).unwrap().to_vec(), raw);
        assert_eq!(ExtCotangentPoint::from_slice(2, &raw).unwrap().to_vec(), raw);
        assert!(ContactPoint::new(vec![], vec![], 0.0).is_err());
    }
}
