use std::io::{self, Write};

use serde::Serialize;

use super::systems::state_names;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// (q, p, z)
    Contact,
    /// (q, q̇, z)
    Lagrangian,
    /// Anything else; columns are named x0, x1, …
    Raw,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub kind: StateKind,
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Named per-sample channels, in registration order.
    pub diagnostics: Vec<(String, Vec<f64>)>,
    /// Time of the last finite sample when integration hit a non-finite state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_at: Option<f64>,
}

impl Trajectory {
    pub fn new(kind: StateKind, n: usize, times: Vec<f64>, states: Vec<Vec<f64>>) -> Trajectory {
        let dim = states.first().map_or(2 * n + 1, Vec::len);
        Trajectory {
            kind,
            columns: column_names(kind, n, dim),
            times,
            states,
            diagnostics: Vec::new(),
            blowup_at: None,
        }
    }

    pub fn with_kind(mut self, kind: StateKind, n: usize) -> Trajectory {
        let dim = self.states.first().map_or(2 * n + 1, Vec::len);
        self.kind = kind;
        self.columns = column_names(kind, n, dim);
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push_diagnostic(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        Error::check_dim(&format!("diagnostic {name}"), self.len(), values.len())?;
        self.diagnostics.push((name.to_string(), values));
        Ok(())
    }

    pub fn diagnostic(&self, name: &str) -> Option<&[f64]> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        Some((*self.times.last()?, self.states.last()?.as_slice()))
    }

    /// Header `t,<state columns>,<diagnostics>` then one row per sample,
    /// every number in `{:.16e}` (17 significant digits), LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.columns.iter().cloned());
        header.extend(self.diagnostics.iter().map(|(n, _)| n.clone()));
        writeln!(w, "{}", header.join(","))?;
        for (k, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            let mut row = vec![fmt_num(*t)];
            row.extend(x.iter().map(|v| fmt_num(*v)));
            row.extend(self.diagnostics.iter().map(|(_, d)| fmt_num(d[k])));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn column_names(kind: StateKind, n: usize, dim: usize) -> Vec<String> {
    match kind {
        StateKind::Contact if dim == 2 * n + 1 => state_names(n, "p"),
        StateKind::Lagrangian if dim == 2 * n + 1 => state_names(n, "qdot"),
        _ => (0..dim).map(|i| format!("x{i}")).collect(),
    }
}

/// A per-sample scalar channel recorded during integration.
pub trait Monitor {
    fn name(&self) -> &str;
    fn sample(&mut self, t: f64, x: &[f64]) -> f64;
}

pub struct FnMonitor<F> {
    name: String,
    f: F,
}

impl<F: FnMut(f64, &[f64]) -> f64> FnMonitor<F> {
    pub fn new(name: &str, f: F) -> FnMonitor<F> {
        FnMonitor { name: name.to_string(), f }
    }
}

impl<F: FnMut(f64, &[f64]) -> f64> Monitor for FnMonitor<F> {
    fn name(&self) -> &str {
        &self.name
    }
    fn sample(&mut self, t: f64, x: &[f64]) -> f64 {
        (self.f)(t, x)
    }
}

/// Classical fixed-step RK4.
///
/// Sample times are t₀ + k·h; the last step is shortened to end exactly on
/// t₁ (a remainder below 1e-9·h is merged into the previous step). The state
/// is accumulated with Kahan compensation. A non-finite state ends the run
/// early and sets [`Trajectory::blowup_at`].
pub fn integrate<F>(
    rhs: F,
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
    monitors: &mut [Box<dyn Monitor + '_>],
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let (t0, t1) = t_span;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step {step} must be positive and finite")));
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("time span [{t0}, {t1}] must be increasing")));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial state is not finite".into()));
    }
    let dim = x0.len();
    let mut times = vec![t0];
    let mut states = vec![x0.to_vec()];
    let mut diags: Vec<Vec<f64>> = monitors.iter_mut().map(|m| vec![m.sample(t0, x0)]).collect();
    let mut x = x0.to_vec();
    let mut comp = vec![0.0; dim];
    let mut t = t0;
    let mut k: u64 = 0;
    let mut blowup_at = None;
    let axpy = |x: &[f64], a: f64, d: &[f64]| -> Vec<f64> { x.iter().zip(d).map(|(xi, di)| xi + a * di).collect() };
    while t < t1 {
        k += 1;
        let mut t_next = t0 + k as f64 * step;
        if t_next >= t1 || t1 - t_next < 1e-9 * step {
            t_next = t1;
        }
        let h = t_next - t;
        let k1 = check_len(rhs(t, &x)?, dim)?;
        let k2 = check_len(rhs(t + 0.5 * h, &axpy(&x, 0.5 * h, &k1))?, dim)?;
        let k3 = check_len(rhs(t + 0.5 * h, &axpy(&x, 0.5 * h, &k2))?, dim)?;
        let k4 = check_len(rhs(t_next, &axpy(&x, h, &k3))?, dim)?;
        let mut next = x.clone();
        let mut next_comp = comp.clone();
        for i in 0..dim {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            let y = inc - next_comp[i];
            let s = next[i] + y;
            next_comp[i] = (s - next[i]) - y;
            next[i] = s;
        }
        if next.iter().any(|v| !v.is_finite()) {
            blowup_at = Some(t);
            break;
        }
        x = next;
        comp = next_comp;
        t = t_next;
        times.push(t);
        for (m, d) in monitors.iter_mut().zip(diags.iter_mut()) {
            d.push(m.sample(t, &x));
        }
        states.push(x.clone());
    }
    let mut traj = Trajectory::new(StateKind::Raw, 0, times, states);
    traj.blowup_at = blowup_at;
    for (m, d) in monitors.iter().zip(diags) {
        traj.diagnostics.push((m.name().to_string(), d));
    }
    Ok(traj)
}

fn check_len(v: Vec<f64>, dim: usize) -> Result<Vec<f64>> {
    Error::check_dim("right-hand side", dim, v.len())?;
    Ok(v)
}

/// dx/dt at every sample from the five-point Lagrange stencil through the
/// nearest samples (one-sided at the ends). Handles uneven spacing.
pub fn sample_derivative(traj: &Trajectory) -> Result<Vec<Vec<f64>>> {
    let m = traj.len();
    if m < 5 {
        return Err(Error::InvalidArgument(format!("need at least 5 samples to differentiate, have {m}")));
    }
    let ts = &traj.times;
    let dim = traj.states[0].len();
    Ok((0..m)
        .map(|k| {
            let lo = k.saturating_sub(2).min(m - 5);
            let idx: Vec<usize> = (lo..lo + 5).collect();
            let w = lagrange_derivative_weights(&idx.iter().map(|&i| ts[i]).collect::<Vec<_>>(), ts[k]);
            (0..dim).map(|c| idx.iter().zip(&w).map(|(&i, wi)| wi * traj.states[i][c]).sum()).collect()
        })
        .collect())
}

/// Weights w_j with Σ w_j f(t_j) = p′(t) for the interpolating polynomial p.
fn lagrange_derivative_weights(nodes: &[f64], t: f64) -> Vec<f64> {
    let m = nodes.len();
    (0..m)
        .map(|j| {
            let denom: f64 = (0..m).filter(|&i| i != j).map(|i| nodes[j] - nodes[i]).product();
            let numer: f64 = (0..m)
                .filter(|&i| i != j)
                .map(|i| (0..m).filter(|&l| l != j && l != i).map(|l| t - nodes[l]).product::<f64>())
                .sum();
            numer / denom
        })
        .collect()
}
