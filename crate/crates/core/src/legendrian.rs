//! Morse families and the Legendrian submanifolds they generate, each
//! represented by a residual function plus a parametrization.

use nalgebra::{DMatrix, DVector};

use crate::contact::{dot, DiffForm};
use crate::dynamics::{
    contact_field_raw, evolution_field_raw, sample_derivative, Hamiltonian, LagrangianSystem, LegendreReduced,
    Regularity, Trajectory,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::maps::beta_c;
use crate::numeric::fd_jacobian_fn;
use crate::report::{Check, VerificationReport};
use crate::sampling::{uniform_vec, SampleRng};

/// Residual tolerance for points produced by a parametrization.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Residual tolerance for lifts of integrated trajectories.
pub const TRAJECTORY_TOL: f64 = 1e-6;

pub trait Submanifold {
    fn name(&self) -> String;
    fn ambient_dim(&self) -> usize;
    /// Dimension of the parameter space accepted by [`Submanifold::parametrize`].
    fn param_dim(&self) -> usize;
    /// Zero exactly on the submanifold.
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>>;

    fn max_residual(&self, x: &[f64]) -> Result<f64> {
        Ok(self.membership(x)?.iter().fold(0.0, |m, r| m.max(r.abs())))
    }
}

type ValueGradient<'a> = Box<dyn Fn(&[f64]) -> Result<(f64, Vec<f64>)> + 'a>;

/// The prolongation q ↦ (q, dF(q), F(q)); without the value slot when
/// `with_value` is false (the classical image of dF).
pub struct Prolongation<'a> {
    name: String,
    arity: usize,
    f: ValueGradient<'a>,
    with_value: bool,
}

impl<'a> Prolongation<'a> {
    pub fn from_fn(
        name: &str,
        arity: usize,
        with_value: bool,
        f: impl Fn(&[f64]) -> Result<(f64, Vec<f64>)> + 'a,
    ) -> Prolongation<'a> {
        Prolongation { name: name.to_string(), arity, f: Box::new(f), with_value }
    }

    /// im(dF) in T*Q without the value slot.
    pub fn differential(f: &'a ScalarField) -> Prolongation<'a> {
        Prolongation::from_fn(&format!("im(d{})", f.name()), f.arity(), false, move |x| f.value_gradient(x))
    }
}

pub fn prolong(f: &ScalarField) -> Prolongation<'_> {
    Prolongation::from_fn(&format!("T*{}", f.name()), f.arity(), true, move |x| f.value_gradient(x))
}

/// im(−T*H): (x, −∇H, −H).
pub fn prolong_negated<H: Hamiltonian + ?Sized>(h: &H) -> Prolongation<'_> {
    let n = h.n();
    Prolongation::from_fn(&format!("im(-T*{})", h.name()), 2 * n + 1, true, move |x| {
        let (v, g) = h.value_gradient(x)?;
        Ok((-v, g.iter().map(|d| -d).collect()))
    })
}

impl Submanifold for Prolongation<'_> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn ambient_dim(&self) -> usize {
        2 * self.arity + usize::from(self.with_value)
    }
    fn param_dim(&self) -> usize {
        self.arity
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name, self.ambient_dim(), x.len())?;
        let m = self.arity;
        let (v, g) = (self.f)(&x[..m])?;
        let mut r: Vec<f64> = (0..m).map(|i| x[m + i] - g[i]).collect();
        if self.with_value {
            r.push(x[2 * m] - v);
        }
        Ok(r)
    }
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name, self.arity, s.len())?;
        let (v, g) = (self.f)(s)?;
        let mut x = s.to_vec();
        x.extend(g);
        if self.with_value {
            x.push(v);
        }
        Ok(x)
    }
}

/// A function E on base × fiber; coordinates are ordered base then fiber.
#[derive(Clone, Debug)]
pub struct MorseFamily {
    e: ScalarField,
    n_base: usize,
    n_fiber: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankCheck {
    pub rank: usize,
    pub ok: bool,
    pub singular_values: Vec<f64>,
}

impl MorseFamily {
    pub fn new(e: ScalarField, n_base: usize, n_fiber: usize) -> Result<MorseFamily> {
        Error::check_dim(&format!("Morse family {}", e.name()), n_base + n_fiber, e.arity())?;
        Ok(MorseFamily { e, n_base, n_fiber })
    }

    /// E = p·q̇ − L(q, q̇, z) over base (q, p, z), fiber q̇.
    pub fn energy(sys: &LagrangianSystem) -> Result<MorseFamily> {
        let n = sys.n();
        // Lagrangian slots (q, q̇, z) -> family slots (q, p, z, q̇)
        let remap = |i: usize| {
            if i < n {
                i
            } else if i < 2 * n {
                2 * n + 1 + (i - n)
            } else {
                2 * n
            }
        };
        let l = sys.lagrangian().expr().remap_vars(&remap);
        let mut pq = crate::expr::Expr::Num(0.0);
        for i in 0..n {
            let term = crate::expr::Expr::Var(n + i) * crate::expr::Expr::Var(2 * n + 1 + i);
            pq = if i == 0 { term } else { pq + term };
        }
        let mut names: Vec<String> = sys.lagrangian().coords()[..n].to_vec();
        names.extend(crate::dynamics::state_names(n, "p")[n..2 * n].iter().cloned());
        names.push(sys.lagrangian().coords()[2 * n].clone());
        names.extend(sys.lagrangian().coords()[n..2 * n].iter().cloned());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let e = ScalarField::from_expr(&format!("E[{}]", sys.name()), &refs, pq - l)?;
        MorseFamily::new(e, 2 * n + 1, n)
    }

    pub fn field(&self) -> &ScalarField {
        &self.e
    }

    pub fn n_base(&self) -> usize {
        self.n_base
    }

    pub fn n_fiber(&self) -> usize {
        self.n_fiber
    }

    pub fn negated(&self) -> MorseFamily {
        let coords: Vec<&str> = self.e.coords().iter().map(String::as_str).collect();
        let e = ScalarField::from_expr(&format!("-{}", self.e.name()), &coords, -self.e.expr().clone())
            .expect("same coordinates");
        MorseFamily { e, n_base: self.n_base, n_fiber: self.n_fiber }
    }

    fn join(&self, x: &[f64], eps: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        v.extend_from_slice(eps);
        v
    }

    /// (x, ∂E/∂x, E) at the given fiber value, and ∂E/∂ε there.
    pub fn generate(&self, x: &[f64], eps: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Error::check_dim("Morse family base", self.n_base, x.len())?;
        Error::check_dim("Morse family fiber", self.n_fiber, eps.len())?;
        let (v, g) = self.e.value_gradient(&self.join(x, eps))?;
        let mut point = x.to_vec();
        point.extend_from_slice(&g[..self.n_base]);
        point.push(v);
        Ok((point, g[self.n_base..].to_vec()))
    }
}

/// Rank of the K×(n+K) block (∂²E/∂ε∂x, ∂²E/∂ε∂ε) at `x = (base, fiber)`,
/// by SVD with threshold 1e-10·σ_max.
pub fn morse_rank_check(fam: &MorseFamily, x: &[f64]) -> Result<RankCheck> {
    let (m, k) = (fam.n_base, fam.n_fiber);
    let h = fam.e.hessian(x)?;
    if k == 0 {
        return Ok(RankCheck { rank: 0, ok: true, singular_values: vec![] });
    }
    let block = h.view((m, 0), (k, m + k)).into_owned();
    let sv: Vec<f64> = block.singular_values().iter().copied().collect();
    let smax = sv.iter().fold(0.0f64, |a, b| a.max(*b));
    let rank = if smax > 0.0 { sv.iter().filter(|s| **s > 1e-10 * smax).count() } else { 0 };
    Ok(RankCheck { rank, ok: rank == k, singular_values: sv })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generated {
    /// {(x, ∂E/∂x, E) : ∂E/∂ε = 0} ⊂ T*Q×ℝ
    Legendrian,
    /// {(x, ∂E/∂x) : ∂E/∂ε = 0} ⊂ T*Q
    Lagrangian,
}

type Seed<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

/// The submanifold generated by a Morse family.
///
/// Membership searches for a fiber value by damped Gauss–Newton
/// (Levenberg–Marquardt) on the stacked residual (∂E/∂ε, y − ∂E/∂x, w − E),
/// started from the caller's seed. Its ε-Jacobian contains the Morse block,
/// so the search is well posed even when ∂²E/∂ε² is singular.
pub struct MorseSubmanifold<'a> {
    fam: MorseFamily,
    kind: Generated,
    seed: Seed<'a>,
}

pub const MORSE_MAX_ITER: usize = 50;

pub fn legendrian_from_morse<'a>(
    fam: MorseFamily,
    kind: Generated,
    seed: impl Fn(&[f64]) -> Vec<f64> + 'a,
) -> MorseSubmanifold<'a> {
    MorseSubmanifold { fam, kind, seed: Box::new(seed) }
}

impl MorseSubmanifold<'_> {
    pub fn family(&self) -> &MorseFamily {
        &self.fam
    }

    fn stacked(&self, x: &[f64], eps: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let (m, k) = (self.fam.n_base, self.fam.n_fiber);
        let (v, g, h) = self.fam.e.second_order(&self.fam.join(&x[..m], eps))?;
        let with_value = self.kind == Generated::Legendrian;
        let rows = k + m + usize::from(with_value);
        let mut r = DVector::zeros(rows);
        let mut j = DMatrix::zeros(rows, k);
        for a in 0..k {
            r[a] = g[m + a];
            for b in 0..k {
                j[(a, b)] = h[(m + a, m + b)];
            }
        }
        for i in 0..m {
            r[k + i] = x[m + i] - g[i];
            for b in 0..k {
                j[(k + i, b)] = -h[(i, m + b)];
            }
        }
        if with_value {
            r[k + m] = x[2 * m] - v;
            for b in 0..k {
                j[(k + m, b)] = -g[m + b];
            }
        }
        Ok((r, j))
    }

    /// Fiber value minimizing the stacked residual, and that residual.
    pub fn critical_fiber(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Error::check_dim(&self.name(), self.ambient_dim(), x.len())?;
        let k = self.fam.n_fiber;
        let mut eps = (self.seed)(x);
        Error::check_dim("Morse seed", k, eps.len())?;
        let (mut r, mut j) = self.stacked(x, &eps)?;
        if k == 0 {
            return Ok((eps, r.as_slice().to_vec()));
        }
        let mut lambda = 1e-6;
        let bound = 1e8 * (1.0 + eps.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..MORSE_MAX_ITER {
            let cost = r.norm_squared();
            let grad = j.transpose() * &r;
            if r.amax() <= 1e-15 * scale {
                return Ok((eps, r.as_slice().to_vec()));
            }
            if eps.iter().any(|e| !(e.abs() <= bound)) {
                break;
            }
            let jtj = j.transpose() * &j;
            let mut accepted = false;
            for _ in 0..30 {
                let mut a = jtj.clone();
                for d in 0..k {
                    a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&grad)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<f64> = eps.iter().zip(step.iter()).map(|(e, s)| e + s).collect();
                let (rt, jt) = self.stacked(x, &trial)?;
                let new_cost = rt.norm_squared();
                if new_cost <= cost {
                    let small = step.amax() <= 1e-15 * (1.0 + trial.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                        || cost - new_cost <= 1e-15 * cost;
                    eps = trial;
                    r = rt;
                    j = jt;
                    lambda = (lambda * 0.1).max(1e-12);
                    accepted = true;
                    if small {
                        return Ok((eps, r.as_slice().to_vec()));
                    }
                    break;
                }
                lambda *= 10.0;
            }
            if !accepted {
                // no descent direction left: a stationary point of the residual
                return Ok((eps, r.as_slice().to_vec()));
            }
        }
        Err(Error::NoCriticalFiber { iterations: MORSE_MAX_ITER, residual: r.amax() })
    }
}

impl Submanifold for MorseSubmanifold<'_> {
    fn name(&self) -> String {
        format!("generated by {}", self.fam.e.name())
    }
    fn ambient_dim(&self) -> usize {
        2 * self.fam.n_base + usize::from(self.kind == Generated::Legendrian)
    }
    /// (base, fiber seed).
    fn param_dim(&self) -> usize {
        self.fam.n_base + self.fam.n_fiber
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.critical_fiber(x)?.1)
    }
    /// Solves ∂E/∂ε(x, ·) = 0 by Newton from the supplied fiber seed; needs
    /// ∂²E/∂ε² invertible along the way.
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        let (m, k) = (self.fam.n_base, self.fam.n_fiber);
        Error::check_dim(&self.name(), m + k, s.len())?;
        let (x, mut eps) = (s[..m].to_vec(), s[m..].to_vec());
        let mut residual = 0.0;
        let mut converged = k == 0;
        for _ in 0..MORSE_MAX_ITER {
            if converged {
                break;
            }
            let (_, g, h) = self.fam.e.second_order(&self.fam.join(&x, &eps))?;
            let r = DVector::from_column_slice(&g[m..]);
            residual = r.amax();
            if residual <= 1e-14 * (1.0 + eps.iter().fold(0.0f64, |a, v| a.max(v.abs()))) {
                converged = true;
                break;
            }
            let a = h.view((m, m), (k, k)).into_owned();
            let lu = a.lu();
            let det = lu.determinant();
            let Some(step) = lu.solve(&r) else {
                return Err(Error::SingularHessian { det });
            };
            for (e, d) in eps.iter_mut().zip(step.iter()) {
                *e -= d;
            }
        }
        if !converged && residual > CONSTRUCTION_TOL {
            return Err(Error::NoCriticalFiber { iterations: MORSE_MAX_ITER, residual });
        }
        let (mut point, _) = self.fam.generate(&x, &eps)?;
        if self.kind == Generated::Lagrangian {
            point.pop();
        }
        Ok(point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    /// im(X^c_H, R(H)) = N_{−H}
    Contact,
    /// im(ε_H, R(H))
    Evolution,
}

/// N_{−H} ⊂ TT*Q×ℝ, or its evolution analogue.
pub struct HamiltonianLegendrian<'a, H: Hamiltonian + ?Sized> {
    h: &'a H,
    kind: FlowKind,
}

pub fn hamiltonian_legendrian<H: Hamiltonian + ?Sized>(h: &H) -> HamiltonianLegendrian<'_, H> {
    HamiltonianLegendrian { h, kind: FlowKind::Contact }
}

pub fn evolution_legendrian<H: Hamiltonian + ?Sized>(h: &H) -> HamiltonianLegendrian<'_, H> {
    HamiltonianLegendrian { h, kind: FlowKind::Evolution }
}

impl<H: Hamiltonian + ?Sized> HamiltonianLegendrian<'_, H> {
    fn lift(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        match self.kind {
            FlowKind::Contact => contact_field_raw(self.h, x),
            FlowKind::Evolution => {
                let v = evolution_field_raw(self.h, x)?;
                let hz = self.h.value_gradient(x)?.1[2 * self.h.n()];
                Ok((v, hz))
            }
        }
    }
}

impl<H: Hamiltonian + ?Sized> Submanifold for HamiltonianLegendrian<'_, H> {
    fn name(&self) -> String {
        match self.kind {
            FlowKind::Contact => format!("N_-H[{}]", self.h.name()),
            FlowKind::Evolution => format!("im(eps_H, R(H))[{}]", self.h.name()),
        }
    }
    fn ambient_dim(&self) -> usize {
        4 * self.h.n() + 3
    }
    fn param_dim(&self) -> usize {
        2 * self.h.n() + 1
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.ambient_dim(), x.len())?;
        let d = self.param_dim();
        let (v, u) = self.lift(&x[..d])?;
        let mut r: Vec<f64> = (0..d).map(|i| x[d + i] - v[i]).collect();
        r.push(x[2 * d] - u);
        Ok(r)
    }
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.param_dim(), s.len())?;
        let (v, u) = self.lift(s)?;
        let mut x = s.to_vec();
        x.extend(v);
        x.push(u);
        Ok(x)
    }
}

/// N_L = {(q, L_q̇, z, q̇, L_z L_q̇ + L_q, L, −L_z)} ⊂ TT*Q×ℝ.
pub struct LagrangianLegendrian<'a> {
    sys: &'a LagrangianSystem,
}

pub fn lagrangian_legendrian(sys: &LagrangianSystem) -> LagrangianLegendrian<'_> {
    LagrangianLegendrian { sys }
}

/// (L, ∇L) at (q, q̇, z) read out of a TT*Q×ℝ point.
fn lagrangian_at(sys: &LagrangianSystem, x: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let n = sys.n();
    let mut s = x[..n].to_vec();
    s.extend_from_slice(&x[2 * n + 1..3 * n + 1]);
    s.push(x[2 * n]);
    let (l, g) = sys.lagrangian().value_gradient(&s)?;
    Ok((s, l, g))
}

impl Submanifold for LagrangianLegendrian<'_> {
    fn name(&self) -> String {
        format!("N_L[{}]", self.sys.name())
    }
    fn ambient_dim(&self) -> usize {
        4 * self.sys.n() + 3
    }
    fn param_dim(&self) -> usize {
        2 * self.sys.n() + 1
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.ambient_dim(), x.len())?;
        let n = self.sys.n();
        let (_, l, g) = lagrangian_at(self.sys, x)?;
        let (lq, lv, lz) = (&g[..n], &g[n..2 * n], g[2 * n]);
        let mut r = Vec::with_capacity(2 * n + 2);
        r.extend((0..n).map(|i| x[n + i] - lv[i]));
        r.extend((0..n).map(|i| x[3 * n + 1 + i] - (lz * lv[i] + lq[i])));
        r.push(x[4 * n + 1] - l);
        r.push(x[4 * n + 2] + lz);
        Ok(r)
    }
    /// Parameters (q, q̇, z).
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.param_dim(), s.len())?;
        let n = self.sys.n();
        let (l, g) = self.sys.lagrangian().value_gradient(s)?;
        let (lq, lv, lz) = (&g[..n], &g[n..2 * n], g[2 * n]);
        let mut x = s[..n].to_vec();
        x.extend_from_slice(lv);
        x.push(s[2 * n]);
        x.extend_from_slice(&s[n..2 * n]);
        x.extend((0..n).map(|i| lz * lv[i] + lq[i]));
        x.push(l);
        x.push(-lz);
        Ok(x)
    }
}

/// N_{−E} ⊂ T*T*Q×ℝ in closed form: (q, p, z, L_q, −q̇, L_z, −p·q̇ + L)
/// with p = L_q̇; the b slot carries −q̇.
pub struct NegEnergyLegendrian<'a> {
    sys: &'a LagrangianSystem,
}

pub fn neg_energy_legendrian(sys: &LagrangianSystem) -> NegEnergyLegendrian<'_> {
    NegEnergyLegendrian { sys }
}

impl Submanifold for NegEnergyLegendrian<'_> {
    fn name(&self) -> String {
        format!("N_-E[{}]", self.sys.name())
    }
    fn ambient_dim(&self) -> usize {
        4 * self.sys.n() + 3
    }
    fn param_dim(&self) -> usize {
        2 * self.sys.n() + 1
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.ambient_dim(), x.len())?;
        let n = self.sys.n();
        let (p, a, b, v, w) =
            (&x[n..2 * n], &x[2 * n + 1..3 * n + 1], &x[3 * n + 1..4 * n + 1], x[4 * n + 1], x[4 * n + 2]);
        let qdot: Vec<f64> = b.iter().map(|v| -v).collect();
        let mut s = x[..n].to_vec();
        s.extend_from_slice(&qdot);
        s.push(x[2 * n]);
        let (l, g) = self.sys.lagrangian().value_gradient(&s)?;
        let mut r = Vec::with_capacity(2 * n + 2);
        r.extend((0..n).map(|i| p[i] - g[n + i]));
        r.extend((0..n).map(|i| a[i] - g[i]));
        r.push(v - g[2 * n]);
        r.push(w - (l - dot(p, &qdot)));
        Ok(r)
    }
    /// Parameters (q, q̇, z).
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.param_dim(), s.len())?;
        let n = self.sys.n();
        let (l, g) = self.sys.lagrangian().value_gradient(s)?;
        let qdot = &s[n..2 * n];
        let mut x = s[..n].to_vec();
        x.extend_from_slice(&g[n..2 * n]);
        x.push(s[2 * n]);
        x.extend_from_slice(&g[..n]);
        x.extend(qdot.iter().map(|v| -v));
        x.push(g[2 * n]);
        x.push(l - dot(&g[n..2 * n], qdot));
        Ok(x)
    }
}

/// (α⁰)⁻¹(im dL) with the ż slot kept: residuals p − L_q̇,
/// ṗ − (L_z L_q̇ + L_q), u + L_z, ż − q̇·L_q̇ on TT*Q×ℝ points.
pub struct EvolutionLagrangian<'a> {
    sys: &'a LagrangianSystem,
}

pub fn evolution_lagrangian_submanifold(sys: &LagrangianSystem) -> EvolutionLagrangian<'_> {
    EvolutionLagrangian { sys }
}

impl Submanifold for EvolutionLagrangian<'_> {
    fn name(&self) -> String {
        format!("(alpha0)^-1(im dL)[{}]", self.sys.name())
    }
    fn ambient_dim(&self) -> usize {
        4 * self.sys.n() + 3
    }
    fn param_dim(&self) -> usize {
        2 * self.sys.n() + 1
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.ambient_dim(), x.len())?;
        let n = self.sys.n();
        let (s, _, g) = lagrangian_at(self.sys, x)?;
        let (lq, lv, lz) = (&g[..n], &g[n..2 * n], g[2 * n]);
        let mut r = Vec::with_capacity(2 * n + 2);
        r.extend((0..n).map(|i| x[n + i] - lv[i]));
        r.extend((0..n).map(|i| x[3 * n + 1 + i] - (lz * lv[i] + lq[i])));
        r.push(x[4 * n + 2] + lz);
        r.push(x[4 * n + 1] - dot(&s[n..2 * n], lv));
        Ok(r)
    }
    /// Parameters (q, q̇, z).
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(&self.name(), self.param_dim(), s.len())?;
        let n = self.sys.n();
        let g = self.sys.lagrangian().gradient(s)?;
        let (lq, lv, lz) = (&g[..n], &g[n..2 * n], g[2 * n]);
        let mut x = s[..n].to_vec();
        x.extend_from_slice(lv);
        x.push(s[2 * n]);
        x.extend_from_slice(&s[n..2 * n]);
        x.extend((0..n).map(|i| lz * lv[i] + lq[i]));
        x.push(dot(&s[n..2 * n], lv));
        x.push(-lz);
        Ok(x)
    }
}

/// Largest |θ(x, t)| over the tangent vectors t = ∂x/∂s_j of the
/// parametrization at `s`, by central differences with step `h`.
pub fn tangency_residual(sub: &dyn Submanifold, form: &dyn DiffForm, s: &[f64], h: f64) -> Result<f64> {
    Error::check_dim("tangency form", sub.ambient_dim(), form.dim())?;
    let x = sub.parametrize(s)?;
    let jac = fd_jacobian_fn(|y| sub.parametrize(y), s, h)?;
    let mut worst = 0.0f64;
    for j in 0..jac.ncols() {
        let t: Vec<f64> = jac.column(j).iter().copied().collect();
        worst = worst.max(form.eval(&x, &[&t]).abs());
    }
    Ok(worst)
}

/// Samples (q, q̇, z) uniformly from [-1.5, 1.5]^(2n+1).
fn lagrangian_sample(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    uniform_vec(rng, 2 * n + 1, -1.5, 1.5)
}

/// (β^c)⁻¹(N_{−E}) = N_L, both directions, plus the generic Morse route.
///
/// Forward: points of N_L pushed by β^c must lie in N_{−E}, both in closed
/// form and as found by [`MorseSubmanifold`] on −E. Backward: points of
/// N_{−E} pulled back by (β^c)⁻¹ must lie in N_L.
pub fn legendre_equivalence(
    sys: &LagrangianSystem,
    samples: usize,
    tolerance: f64,
    rng: &mut SampleRng,
) -> VerificationReport {
    Check::run(format!("legendre equivalence [{}]", sys.name()), tolerance, |check| {
        legendre_equivalence_into(sys, samples, rng, check)
    })
}

fn legendre_equivalence_into(
    sys: &LagrangianSystem,
    samples: usize,
    rng: &mut SampleRng,
    check: &mut Check,
) -> Result<()> {
    let n = sys.n();
    let bc = beta_c(n)?;
    let nl = lagrangian_legendrian(sys);
    let ne = neg_energy_legendrian(sys);
    let fam = MorseFamily::energy(sys)?.negated();
    let generic = legendrian_from_morse(fam, Generated::Legendrian, move |x: &[f64]| {
        x[3 * n + 1..4 * n + 1].iter().map(|b| -b).collect()
    });
    for _ in 0..samples {
        let s = lagrangian_sample(rng, n);
        let x = nl.parametrize(&s)?;
        let y = bc.eval(&x)?;
        let forward = ne.max_residual(&y)?;
        let via_morse = generic.max_residual(&y)?;
        let back = nl.max_residual(&bc.inverse().eval(&ne.parametrize(&s)?)?)?;
        check.record_all([forward, via_morse, back]);
    }
    Ok(())
}

/// For regular L: β^c-pulled points of N_L lie in N_{−H} for the reduced
/// Hamiltonian H = p·q̇ − L.
pub fn reduced_equivalence(
    sys: &LagrangianSystem,
    samples: usize,
    tolerance: f64,
    rng: &mut SampleRng,
) -> VerificationReport {
    let mut check = Check::new(format!("reduced Hamiltonian [{}]", sys.name()), tolerance);
    if sys.regularity() == Regularity::Degenerate {
        check.fail("reduction needs a regular Lagrangian");
        return check.finish();
    }
    let h = LegendreReduced::new(sys);
    let nh = hamiltonian_legendrian(&h);
    let nl = lagrangian_legendrian(sys);
    for _ in 0..samples {
        let s = lagrangian_sample(rng, sys.n());
        match nl.parametrize(&s).and_then(|x| nh.max_residual(&x)) {
            Ok(r) => check.record(r),
            Err(e) => {
                check.fail(e);
                break;
            }
        }
    }
    check.finish()
}

/// Lifts a (q, p, z) trajectory to TT*Q×ℝ as (x, ẋ, R(H)(x)), with ẋ from
/// finite differences of the samples.
pub fn lift_trajectory<H: Hamiltonian + ?Sized>(h: &H, traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let n = h.n();
    let rates = sample_derivative(traj)?;
    traj.states
        .iter()
        .zip(rates)
        .map(|(x, r)| {
            let hz = h.value_gradient(x)?.1[2 * n];
            let mut p = x.clone();
            p.extend(r);
            p.push(hz);
            Ok(p)
        })
        .collect()
}

/// Max membership residual over a set of points.
pub fn max_membership(sub: &dyn Submanifold, points: &[Vec<f64>]) -> Result<f64> {
    points.iter().try_fold(0.0f64, |m, x| Ok(m.max(sub.max_residual(x)?)))
}
