//! Contact Hamiltonian, evolution and Herglotz dynamics.
//!
//! Hamiltonian states are flat `(q, p, z)` arrays and Lagrangian states are
//! flat `(q, q̇, z)` arrays, both of length 2n+1.

mod integrate;
mod systems;

pub use integrate::{integrate, sample_derivative, FnMonitor, Monitor, StateKind, Trajectory};
pub use systems::{state_names, Hamiltonian, HamiltonianSystem, LagrangianSystem, LegendreReduced, Regularity};

use nalgebra::{DMatrix, DVector};

use crate::contact::{dot, ContactPoint};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::numeric::fd_jacobian_fn;
use crate::report::{Check, VerificationReport};

/// Velocity Hessians with |det| at or below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-10;

/// X^c_H and its conformal factor R(H) = ∂H/∂z.
pub fn contact_hamiltonian_field<H: Hamiltonian + ?Sized>(h: &H, x: &ContactPoint) -> Result<(Vec<f64>, f64)> {
    contact_field_raw(h, &x.to_vec())
}

pub(crate) fn contact_field_raw<H: Hamiltonian + ?Sized>(h: &H, x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = h.n();
    Error::check_dim("contact state", 2 * n + 1, x.len())?;
    let (hv, g) = h.value_gradient(x)?;
    let (hq, hp, hz) = (&g[..n], &g[n..2 * n], g[2 * n]);
    let p = &x[n..2 * n];
    let mut v = vec![0.0; 2 * n + 1];
    for i in 0..n {
        v[i] = hp[i];
        v[n + i] = -hq[i] - p[i] * hz;
    }
    v[2 * n] = dot(p, hp) - hv;
    Ok((v, hz))
}

/// ε_H = X^c_H + H·R.
pub fn evolution_field<H: Hamiltonian + ?Sized>(h: &H, x: &ContactPoint) -> Result<Vec<f64>> {
    evolution_field_raw(h, &x.to_vec())
}

pub(crate) fn evolution_field_raw<H: Hamiltonian + ?Sized>(h: &H, x: &[f64]) -> Result<Vec<f64>> {
    let n = h.n();
    Error::check_dim("contact state", 2 * n + 1, x.len())?;
    let (_, g) = h.value_gradient(x)?;
    let (hq, hp, hz) = (&g[..n], &g[n..2 * n], g[2 * n]);
    let p = &x[n..2 * n];
    let mut v = vec![0.0; 2 * n + 1];
    for i in 0..n {
        v[i] = hp[i];
        v[n + i] = -hq[i] - p[i] * hz;
    }
    v[2 * n] = dot(p, hp);
    Ok(v)
}

/// {F,H} = F_q·H_p − F_p·H_q + (F − p·F_p) H_z − (H − p·H_p) F_z.
pub fn jacobi_bracket(f: &ScalarField, h: &ScalarField, x: &ContactPoint) -> Result<f64> {
    let n = x.n();
    let xs = x.to_vec();
    let (fv, fg) = f.value_gradient(&xs)?;
    let (hv, hg) = h.value_gradient(&xs)?;
    let p = &x.p;
    Ok(dot(&fg[..n], &hg[n..2 * n]) - dot(&fg[n..2 * n], &hg[..n]) + (fv - dot(p, &fg[n..2 * n])) * hg[2 * n]
        - (hv - dot(p, &hg[n..2 * n])) * fg[2 * n])
}

/// How ż enters the Herglotz system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HerglotzKind {
    /// ż = L
    Contact,
    /// ż = q̇·∂L/∂q̇
    Evolution,
}

/// (q̇, q̈, ż) from L_q̇q̇ q̈ = L_q − L_q̇q q̇ − L_q̇z ż + L_z L_q̇.
pub fn herglotz_rhs(sys: &LagrangianSystem, s: &[f64]) -> Result<Vec<f64>> {
    herglotz_general(sys, s, HerglotzKind::Contact)
}

pub fn evolution_herglotz_rhs(sys: &LagrangianSystem, s: &[f64]) -> Result<Vec<f64>> {
    herglotz_general(sys, s, HerglotzKind::Evolution)
}

pub fn herglotz_general(sys: &LagrangianSystem, s: &[f64], kind: HerglotzKind) -> Result<Vec<f64>> {
    let n = sys.n();
    Error::check_dim("Lagrangian state", 2 * n + 1, s.len())?;
    let (l, g, hess) = sys.lagrangian().second_order(s)?;
    let qdot = &s[n..2 * n];
    let (lq, lv, lz) = (&g[..n], &g[n..2 * n], g[2 * n]);
    let zdot = match kind {
        HerglotzKind::Contact => l,
        HerglotzKind::Evolution => dot(qdot, lv),
    };
    let a = hess.view((n, n), (n, n)).into_owned();
    let mut rhs = DVector::zeros(n);
    for i in 0..n {
        let mut r = lq[i] - hess[(n + i, 2 * n)] * zdot + lz * lv[i];
        for j in 0..n {
            r -= hess[(n + i, j)] * qdot[j];
        }
        rhs[i] = r;
    }
    let qddot = solve_checked(a, rhs)?;
    let mut out = qdot.to_vec();
    out.extend(qddot.iter());
    out.push(zdot);
    Ok(out)
}

fn solve_checked(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.lu();
    let det = lu.determinant();
    if !(det.abs() > SINGULAR_DET) {
        return Err(Error::SingularHessian { det });
    }
    lu.solve(&b).ok_or(Error::SingularHessian { det })
}

/// (q, q̇, z) ↦ (q, ∂L/∂q̇, z); defined for degenerate L as well.
pub fn fiber_derivative(sys: &LagrangianSystem, s: &[f64]) -> Result<ContactPoint> {
    let n = sys.n();
    Error::check_dim("Lagrangian state", 2 * n + 1, s.len())?;
    let g = sys.lagrangian().gradient(s)?;
    ContactPoint::new(s[..n].to_vec(), g[n..2 * n].to_vec(), s[2 * n])
}

/// Pushes every state of a Lagrangian trajectory through the fiber derivative.
pub fn push_fiber(sys: &LagrangianSystem, traj: &Trajectory) -> Result<Trajectory> {
    let states =
        traj.states.iter().map(|s| fiber_derivative(sys, s).map(|c| c.to_vec())).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(StateKind::Contact, sys.n(), traj.times.clone(), states))
}

/// I(t) = exp(−∫_{t₀}^t ∂L/∂z dθ)·(L − q̇·∂L/∂q̇), trapezoid rule over samples.
pub fn conserved_i(sys: &LagrangianSystem, traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("conserved quantity of an empty trajectory".into()));
    }
    let n = sys.n();
    let mut out = Vec::with_capacity(traj.len());
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let (l, g) = sys.lagrangian().value_gradient(s)?;
        let lz = g[2 * n];
        if let Some((t0, lz0)) = prev {
            integral += 0.5 * (t - t0) * (lz0 + lz);
        }
        prev = Some((*t, lz));
        out.push((-integral).exp() * (l - dot(&s[n..2 * n], &g[n..2 * n])));
    }
    Ok(out)
}

/// Compares ∇H·X^c_H with −R(H)·H at every sample.
///
/// The residual is |dH/dt + R(H)·H| / (1 + |H|).
pub fn monitor_dissipation<H: Hamiltonian + ?Sized>(h: &H, traj: &Trajectory, tolerance: f64) -> VerificationReport {
    let mut check = Check::new(format!("dissipation law for {}", h.name()), tolerance);
    for x in &traj.states {
        match dissipation_residual(h, x) {
            Ok(r) => check.record(r),
            Err(e) => check.fail(e),
        }
    }
    check.finish()
}

fn dissipation_residual<H: Hamiltonian + ?Sized>(h: &H, x: &[f64]) -> Result<f64> {
    let (hv, g) = h.value_gradient(x)?;
    let (v, rh) = contact_field_raw(h, x)?;
    let dh = dot(&g, &v);
    Ok((dh + rh * hv).abs() / (1.0 + hv.abs()))
}

/// max_t |H(t) − H(0)| along a trajectory.
pub fn energy_drift<H: Hamiltonian + ?Sized>(h: &H, traj: &Trajectory) -> Result<f64> {
    let first = traj.states.first().ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let h0 = h.value_gradient(first)?.0;
    traj.states.iter().try_fold(0.0f64, |m, x| Ok(m.max((h.value_gradient(x)?.0 - h0).abs())))
}

/// Checks div X^c_H = −2 R(H) (n = 1) by a centred finite-difference Lie
/// derivative of dη∧η = dq∧dp∧dz along the Euler flow x ↦ x + tX(x).
///
/// Returns |rate − (−2 R(H))|.
pub fn volume_rate_residual<H: Hamiltonian + ?Sized>(h: &H, x: &[f64], step: f64) -> Result<f64> {
    Error::check_dim("volume-rate check (n = 1 only)", 1, h.n())?;
    let field = |y: &[f64]| contact_field_raw(h, y).map(|v| v.0);
    let dx = fd_jacobian_fn(field, x, step)?;
    let id = DMatrix::<f64>::identity(3, 3);
    let up = (&id + &dx * step).determinant();
    let down = (&id - &dx * step).determinant();
    let rate = (up - down) / (2.0 * step);
    let rh = contact_field_raw(h, x)?.1;
    Ok((rate + 2.0 * rh).abs())
}

/// max over samples and components of |dx/dt − field(x)|, with dx/dt from
/// five-point finite differences of the stored samples.
pub fn trajectory_defect(traj: &Trajectory, field: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<f64> {
    let rates = sample_derivative(traj)?;
    let mut worst = 0.0f64;
    for (x, r) in traj.states.iter().zip(&rates) {
        let f = field(x)?;
        for (a, b) in f.iter().zip(r) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

pub fn contact_flow<H: Hamiltonian + ?Sized>(
    h: &H,
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
    monitors: &mut [Box<dyn Monitor + '_>],
) -> Result<Trajectory> {
    let t = integrate(|_, x| Ok(contact_field_raw(h, x)?.0), x0, t_span, step, monitors)?;
    Ok(t.with_kind(StateKind::Contact, h.n()))
}

pub fn evolution_flow<H: Hamiltonian + ?Sized>(
    h: &H,
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
    monitors: &mut [Box<dyn Monitor + '_>],
) -> Result<Trajectory> {
    let t = integrate(|_, x| evolution_field_raw(h, x), x0, t_span, step, monitors)?;
    Ok(t.with_kind(StateKind::Contact, h.n()))
}

pub fn herglotz_flow(
    sys: &LagrangianSystem,
    kind: HerglotzKind,
    s0: &[f64],
    t_span: (f64, f64),
    step: f64,
    monitors: &mut [Box<dyn Monitor + '_>],
) -> Result<Trajectory> {
    let t = integrate(|_, s| herglotz_general(sys, s, kind), s0, t_span, step, monitors)?;
    Ok(t.with_kind(StateKind::Lagrangian, sys.n()))
}
