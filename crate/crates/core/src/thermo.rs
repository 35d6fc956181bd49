//! The classical ideal gas on T*ℝ³×ℝ.
//!
//! Gas states are points (S, V, N, T, −P, μ, U): base (S, V, N), fibers
//! (T, −P, μ), extension U. The fiber conjugate to V is stored as −P and its
//! slot is named `negP`. Potentials are built in their natural variables with
//! P itself; the chart versions used for prolongation take `negP` instead.

use std::collections::BTreeMap;

use crate::dynamics::{
    contact_field_raw, contact_flow, evolution_field_raw, evolution_flow, monitor_dissipation, FnMonitor, Hamiltonian,
    HamiltonianSystem, Monitor, Trajectory,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::field::ScalarField;
use crate::legendrian::{
    hamiltonian_legendrian, legendrian_from_morse, lift_trajectory, morse_rank_check, prolong, prolong_negated,
    Generated, MorseFamily, Submanifold, TRAJECTORY_TOL,
};
use crate::maps::{alpha_c, beta_c, evolution_maps, quantomorphism, CoordMap};
use crate::report::{max_abs_diff, Check, VerificationReport};
use crate::sampling::{log_uniform, rng, uniform, uniform_vec, SampleRng};

pub const GAS_COORDS: [&str; 7] = ["S", "V", "N", "T", "negP", "mu", "U"];

/// Tolerance for generator transport onto the gas Legendrian.
pub const TRANSPORT_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasConstants {
    pub u0: f64,
    /// Heat capacity.
    pub c: f64,
    /// Gas constant.
    pub r: f64,
}

impl Default for GasConstants {
    fn default() -> Self {
        GasConstants { u0: 1.0, c: 1.5, r: 1.0 }
    }
}

impl GasConstants {
    pub fn new(u0: f64, c: f64, r: f64) -> Result<GasConstants> {
        for (name, v) in [("U0", u0), ("c", c), ("R", r)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(GasConstants { u0, c, r })
    }

    /// c̄ = c^{1/(1+c)} + c^{−c/(1+c)}
    pub fn cbar(&self) -> f64 {
        let c = self.c;
        c.powf(1.0 / (1.0 + c)) + c.powf(-c / (1.0 + c))
    }

    fn constants(&self) -> BTreeMap<String, f64> {
        [("U0", self.u0), ("c", self.c), ("R", self.r), ("cbar", self.cbar())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    fn field(&self, name: &str, source: &str, coords: &[&str]) -> Result<ScalarField> {
        ScalarField::parse(name, source, coords, &self.constants())
    }
}

pub const U_SOURCE: &str = "U0 * V^(-1/c) * N^((c+1)/c) * exp(S/(c*N*R))";
pub const B_SOURCE: &str = "cbar * U0^(c/(c+1)) * P^(1/(1+c)) * N * exp(S/((c+1)*N*R))";
/// The enthalpy with the U₀ exponent as printed, (c+1)/c; it does not
/// generate the gas Legendrian unless U₀ = 1.
pub const B_PRINTED_SOURCE: &str = "cbar * U0^((c+1)/c) * P^(1/(1+c)) * N * exp(S/((c+1)*N*R))";
pub const F_SOURCE: &str = "c*N*R*T*(1 + log(N)/c - log(V)/c + log(U0/(c*R*T)))";
pub const G_SOURCE: &str = "N*R*T*(1 + c + log(N) - log(N*R*T/P) + c*log(U0/(c*R*T)))";
/// W with N = ST/((c+1)RT − μ) substituted throughout; S is the fiber.
pub const W_SOURCE: &str = "(S*T/((c+1)*R*T - mu))*R*T*(1 + c + log(S*T/((c+1)*R*T - mu)) \
     - log((S*T/((c+1)*R*T - mu))*R*T/P) + c*log(U0/(c*R*T))) - mu*S*T/((c+1)*R*T - mu)";

/// The thermodynamic potentials in their natural variables.
#[derive(Clone, Debug)]
pub struct Potentials {
    /// U(S, V, N)
    pub u: ScalarField,
    /// B(S, P, N)
    pub b: ScalarField,
    /// F(T, V, N)
    pub f: ScalarField,
    /// G(T, P, N)
    pub g: ScalarField,
    /// W(T, P, μ; S)
    pub w: ScalarField,
}

pub fn potentials(k: &GasConstants) -> Result<Potentials> {
    Ok(Potentials {
        u: k.field("U", U_SOURCE, &["S", "V", "N"])?,
        b: k.field("B", B_SOURCE, &["S", "P", "N"])?,
        f: k.field("F", F_SOURCE, &["T", "V", "N"])?,
        g: k.field("G", G_SOURCE, &["T", "P", "N"])?,
        w: k.field("W", W_SOURCE, &["T", "P", "mu", "S"])?,
    })
}

/// Rewrites a field in P as a field in negP = −P on the same slot.
pub fn in_neg_p(f: &ScalarField) -> Result<ScalarField> {
    let i = f
        .coords()
        .iter()
        .position(|c| c == "P")
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no P coordinate", f.name())))?;
    let expr = f.expr().substitute(i, &-Expr::Var(i));
    let coords: Vec<&str> = f.coords().iter().map(|c| if c == "P" { "negP" } else { c.as_str() }).collect();
    ScalarField::from_expr(f.name(), &coords, expr)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// The gas Legendrian, as the relations cV^{1/c}RT = U₀N^{1/c}exp(S/(cNR)),
/// PV = NRT, μ = (c+1)RT − TS/N, plus U = cNRT for the extension slot.
/// Each residual is scaled by the larger side.
pub struct GasLegendrian {
    k: GasConstants,
    u: ScalarField,
}

pub fn gas_legendrian(k: &GasConstants) -> Result<GasLegendrian> {
    Ok(GasLegendrian { k: *k, u: potentials(k)?.u })
}

impl Submanifold for GasLegendrian {
    fn name(&self) -> String {
        "ideal gas Legendrian".into()
    }
    fn ambient_dim(&self) -> usize {
        7
    }
    fn param_dim(&self) -> usize {
        3
    }
    fn membership(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim("gas state", 7, x.len())?;
        let GasConstants { u0, c, r } = self.k;
        let (s, v, n, t, p, mu, u) = (x[0], x[1], x[2], x[3], -x[4], x[5], x[6]);
        if !(v > 0.0 && n > 0.0) {
            return Err(Error::Domain {
                field: "gas state".into(),
                op: "V, N > 0".into(),
                arg: v.min(n),
                expr: "V, N".into(),
            });
        }
        Ok(vec![
            rel(c * v.powf(1.0 / c) * r * t, u0 * n.powf(1.0 / c) * (s / (c * n * r)).exp()),
            rel(p * v, n * r * t),
            rel(mu, (c + 1.0) * r * t - t * s / n),
            rel(u, c * n * r * t),
        ])
    }
    /// The prolongation of U over (S, V, N).
    fn parametrize(&self, s: &[f64]) -> Result<Vec<f64>> {
        prolong(&self.u).parametrize(s)
    }
}

/// S uniform in [−1, 2]; V, N log-uniform in [0.5, 2].
pub fn sample_gas_base(rng: &mut SampleRng) -> [f64; 3] {
    [uniform(rng, -1.0, 2.0), log_uniform(rng, 0.5, 2.0), log_uniform(rng, 0.5, 2.0)]
}

/// An arbitrary point of T*ℝ³×ℝ with V, N, T, P > 0.
pub fn sample_phase_state(rng: &mut SampleRng) -> Vec<f64> {
    let [s, v, n] = sample_gas_base(rng);
    vec![s, v, n, uniform(rng, 0.5, 2.0), -uniform(rng, 0.5, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, 0.5, 2.0)]
}

/// φ¹: Legendre transformation in V (internal energy to enthalpy chart).
pub fn phi1() -> CoordMap {
    quantomorphism(3, &[2]).expect("valid partition").renamed("phi1")
}

/// φ²: in S (internal energy to Helmholtz chart).
pub fn phi2() -> CoordMap {
    quantomorphism(3, &[1]).expect("valid partition").renamed("phi2")
}

/// φ³: in V on the Helmholtz chart (Helmholtz to Gibbs).
pub fn phi3() -> CoordMap {
    quantomorphism(3, &[2]).expect("valid partition").renamed("phi3")
}

/// φ⁴: in N on the Gibbs chart (Gibbs to W).
pub fn phi4() -> CoordMap {
    quantomorphism(3, &[3]).expect("valid partition").renamed("phi4")
}

pub fn phi3_phi2() -> CoordMap {
    phi2().then(&phi3()).expect("same dimension").renamed("phi3∘phi2")
}

pub fn phi_full() -> CoordMap {
    phi3_phi2().then(&phi4()).expect("same dimension").renamed("phi4∘phi3∘phi2")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    B,
    F,
    G,
    W,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::B, Generator::F, Generator::G, Generator::W];

    pub fn name(self) -> &'static str {
        match self {
            Generator::B => "B",
            Generator::F => "F",
            Generator::G => "G",
            Generator::W => "W",
        }
    }

    /// Quantomorphism from the internal-energy chart to this generator's chart.
    pub fn chart_map(self) -> CoordMap {
        match self {
            Generator::B => phi1(),
            Generator::F => phi2(),
            Generator::G => phi3_phi2(),
            Generator::W => phi_full(),
        }
    }
}

/// Relative size below which (c+1)RT − μ counts as zero in W.
pub const W_DENOM_TOL: f64 = 1e-12;

fn w_denominator(k: &GasConstants, t: f64, mu: f64) -> Result<f64> {
    let a = (k.c + 1.0) * k.r * t;
    let d = a - mu;
    if !(d.abs() > W_DENOM_TOL * a.abs().max(mu.abs()).max(1.0)) {
        return Err(Error::Domain {
            field: "W".into(),
            op: "(c+1)RT - mu != 0".into(),
            arg: d,
            expr: "(c+1)*R*T - mu".into(),
        });
    }
    Ok(d)
}

/// Prolongs a generator on its own chart and pulls the result back to the
/// internal-energy chart; the returned point should lie on the gas
/// Legendrian. The base values are read off `state`. For W the fiber S is
/// also taken from `state`, and the second value is the critical-fiber
/// residual ∂W/∂S.
pub fn transport_point(
    k: &GasConstants,
    pots: &Potentials,
    which: Generator,
    state: &[f64],
) -> Result<(Vec<f64>, f64)> {
    Error::check_dim("gas state", 7, state.len())?;
    let [s, v, n, t, neg_p, mu, _] = state[..] else { unreachable!() };
    let chart = match which {
        Generator::B => prolong(&in_neg_p(&pots.b)?).parametrize(&[s, neg_p, n])?,
        Generator::F => prolong(&pots.f).parametrize(&[t, v, n])?,
        Generator::G => prolong(&in_neg_p(&pots.g)?).parametrize(&[t, neg_p, n])?,
        Generator::W => {
            w_denominator(k, t, mu)?;
            let fam = MorseFamily::new(in_neg_p(&pots.w)?, 3, 1)?;
            let (point, crit) = fam.generate(&[t, neg_p, mu], &[s])?;
            let back = which.chart_map().inverse().eval(&point)?;
            return Ok((back, crit[0]));
        }
    };
    Ok((which.chart_map().inverse().eval(&chart)?, 0.0))
}

/// Max gas-Legendrian residual of transported generator points over
/// `samples` gas states.
pub fn generator_transport(
    k: &GasConstants,
    which: Generator,
    samples: usize,
    rng: &mut SampleRng,
) -> VerificationReport {
    let name = format!("generator transport {} -> gas Legendrian", which.name());
    Check::run(name, TRANSPORT_TOL, |check| {
        let pots = potentials(k)?;
        let gas = gas_legendrian(k)?;
        for _ in 0..samples {
            let state = gas.parametrize(&sample_gas_base(rng))?;
            let (x, crit) = transport_point(k, &pots, which, &state)?;
            check.record(gas.max_residual(&x)?);
            check.observe(crit);
        }
        Ok(())
    })
}

/// H = TS − NRT + μN − U.
pub fn gas_hamiltonian(k: &GasConstants) -> Result<HamiltonianSystem> {
    HamiltonianSystem::new(3, k.field("H", "T*S - N*R*T + mu*N - U", &GAS_COORDS)?)
}

/// (Ṡ, V̇, Ṅ, Ṫ, (−P)˙, μ̇, U̇) of X^c_H in closed form.
pub fn gas_contact_field(k: &GasConstants, x: &[f64]) -> Vec<f64> {
    let [s, _, n, t, neg_p, _, u] = x[..] else { panic!("gas state has 7 slots") };
    vec![s - n * k.r, 0.0, n, 0.0, neg_p, k.r * t, u]
}

/// ε_H in closed form; only the U̇ slot differs from X^c_H.
pub fn gas_evolution_field(k: &GasConstants, x: &[f64]) -> Vec<f64> {
    let [s, _, n, t, _, mu, _] = x[..] else { panic!("gas state has 7 slots") };
    let mut v = gas_contact_field(k, x);
    v[6] = t * s - n * k.r * t + mu * n;
    v
}

/// β^c(X^c_H, R(H)) in closed form: (x; −T, 0, RT−μ, −S+NR, 0, −N, 1, −H).
pub fn gas_im_neg_th(k: &GasConstants, x: &[f64]) -> Vec<f64> {
    let [s, _, n, t, _, mu, u] = x[..] else { panic!("gas state has 7 slots") };
    let h = t * s - n * k.r * t + mu * n - u;
    let mut y = x.to_vec();
    y.extend([-t, 0.0, k.r * t - mu, -s + n * k.r, 0.0, -n, 1.0, -h]);
    y
}

pub struct GasFlow {
    pub reports: Vec<VerificationReport>,
    pub contact: Trajectory,
    pub evolution: Trajectory,
}

fn gas_trajectory_columns(traj: &mut Trajectory) {
    traj.columns = GAS_COORDS.iter().map(|s| s.to_string()).collect();
}

/// Pointwise checks of the gas fields at `samples` random states, then
/// contact and evolution flows from `x0` with their trajectory checks.
pub fn gas_flow(
    k: &GasConstants,
    x0: &[f64],
    t_span: (f64, f64),
    step: f64,
    samples: usize,
    rng: &mut SampleRng,
) -> Result<GasFlow> {
    Error::check_dim("gas initial state", 7, x0.len())?;
    let h = gas_hamiltonian(k)?;
    let bc = beta_c(3)?;
    let nh = hamiltonian_legendrian(&h);
    let neg_th = prolong_negated(&h);
    let states: Vec<Vec<f64>> = (0..samples).map(|_| sample_phase_state(rng)).collect();
    let mut reports = Vec::new();

    reports.push(Check::run("gas X^c_H closed form", 1e-12, |c| {
        for x in &states {
            let (v, rh) = contact_field_raw(&h, x)?;
            c.record_all([max_abs_diff(&v, &gas_contact_field(k, x)), (rh + 1.0).abs()]);
        }
        Ok(())
    }));
    reports.push(Check::run("gas R(H) = -1", 1e-15, |c| {
        for x in &states {
            c.record((contact_field_raw(&h, x)?.1 + 1.0).abs());
        }
        Ok(())
    }));
    reports.push(Check::run("gas evolution field closed form", 1e-12, |c| {
        for x in &states {
            c.record(max_abs_diff(&evolution_field_raw(&h, x)?, &gas_evolution_field(k, x)));
        }
        Ok(())
    }));
    reports.push(Check::run("gas beta_c(N_-H) in im(-T*H)", 1e-9, |c| {
        for x in &states {
            let y = bc.eval(&nh.parametrize(x)?)?;
            c.record_all([max_abs_diff(&y, &gas_im_neg_th(k, x)), neg_th.max_residual(&y)?]);
        }
        Ok(())
    }));

    let h_mon = |_: f64, x: &[f64]| h.value(x).unwrap_or(f64::NAN);
    let mut mons: Vec<Box<dyn Monitor + '_>> = vec![Box::new(FnMonitor::new("H", h_mon))];
    let mut contact = contact_flow(&h, x0, t_span, step, &mut mons)?;
    gas_trajectory_columns(&mut contact);
    reports.push(isothermal_isochoric("gas contact flow isothermal and isochoric", &contact));
    let mut diss = monitor_dissipation(&h, &contact, 1e-6);
    diss.name = "gas dissipation dH/dt = H".into();
    reports.push(diss);
    reports.push(Check::run("gas contact trajectory lift in N_-H", TRAJECTORY_TOL, |c| {
        for x in lift_trajectory(&h, &contact)? {
            c.record(nh.max_residual(&x)?);
        }
        Ok(())
    }));

    let mut mons: Vec<Box<dyn Monitor + '_>> = vec![Box::new(FnMonitor::new("H", h_mon))];
    let mut evolution = evolution_flow(&h, x0, t_span, step, &mut mons)?;
    gas_trajectory_columns(&mut evolution);
    reports.push(isothermal_isochoric("gas evolution flow isothermal and isochoric", &evolution));
    Ok(GasFlow { reports, contact, evolution })
}

fn isothermal_isochoric(name: &str, traj: &Trajectory) -> VerificationReport {
    let mut c = Check::new(name, 1e-12);
    if let Some(x0) = traj.states.first() {
        for x in &traj.states {
            c.record_all([rel(x[3], x0[3]), rel(x[1], x0[1])]);
        }
    }
    if traj.blowup_at.is_some() {
        c.fail("trajectory blew up");
    }
    c.finish()
}

pub const GAS_LAGRANGIAN_SOURCE: &str = "T*(Sdot - S + N*R) + mu*(Ndot - N) + P*Vdot + U";

/// Base (S, V, N, Ṡ, V̇, Ṅ, U), fibers (T, P, μ). On the critical set the
/// fiber P equals the state's −P slot.
pub fn gas_lagrangian(k: &GasConstants) -> Result<MorseFamily> {
    let coords = ["S", "V", "N", "Sdot", "Vdot", "Ndot", "U", "T", "P", "mu"];
    MorseFamily::new(k.field("L", GAS_LAGRANGIAN_SOURCE, &coords)?, 7, 3)
}

/// α^c(N_{−H}) in closed form: (S, V, N, S−NR, 0, N, U; −T, 0, RT−μ, T, −P, μ, 1; U).
pub fn gas_alpha_c_image(k: &GasConstants, x: &[f64]) -> Vec<f64> {
    let [s, v, n, t, neg_p, mu, u] = x[..] else { panic!("gas state has 7 slots") };
    vec![s, v, n, s - n * k.r, 0.0, n, u, -t, 0.0, k.r * t - mu, t, neg_p, mu, 1.0, u]
}

pub struct GasLagrangian {
    pub family: MorseFamily,
    pub reports: Vec<VerificationReport>,
}

/// Checks that the gas Lagrangian Morse family generates α^c(N_{−H}) and,
/// without the value slot, α⁰(im(ε_H, R(H))).
pub fn gas_lagrangian_family(k: &GasConstants, samples: usize, rng: &mut SampleRng) -> Result<GasLagrangian> {
    let family = gas_lagrangian(k)?;
    let h = gas_hamiltonian(k)?;
    let ac = alpha_c(3)?;
    let a0 = evolution_maps(3)?.alpha0;
    let nh = hamiltonian_legendrian(&h);
    let seed = |_: &[f64]| vec![1.0, 1.0, 1.0];
    let contact = legendrian_from_morse(family.clone(), Generated::Legendrian, seed);
    let evo = legendrian_from_morse(family.clone(), Generated::Lagrangian, seed);
    let states: Vec<Vec<f64>> = (0..samples).map(|_| sample_phase_state(rng)).collect();
    let fibers = |x: &[f64]| vec![x[3], x[4], x[5]];
    let mut reports = Vec::new();

    reports.push(Check::run("gas Lagrangian Morse rank", 0.0, |c| {
        for x in &states {
            let y = ac.eval(&nh.parametrize(x)?)?;
            let mut point = y[..7].to_vec();
            point.extend(fibers(x));
            let rc = morse_rank_check(&family, &point)?;
            c.record(if rc.ok { 0.0 } else { 1.0 });
        }
        Ok(())
    }));
    reports.push(Check::run("gas critical-fiber equations are the flow constraints", 1e-12, |c| {
        for x in &states {
            let mut base = uniform_vec(rng, 7, -2.0, 2.0);
            base[..3].copy_from_slice(&x[..3]);
            let (s, n) = (base[0], base[2]);
            let (_, crit) = family.generate(&base, &fibers(x))?;
            c.record(max_abs_diff(&crit, &[base[3] - s + n * k.r, base[4], base[5] - n]));
        }
        Ok(())
    }));
    reports.push(Check::run("gas alpha_c(N_-H) generated by L", 1e-10, |c| {
        for x in &states {
            let y = ac.eval(&nh.parametrize(x)?)?;
            let (generated, crit) = family.generate(&y[..7], &fibers(x))?;
            c.record_all([
                max_abs_diff(&y, &gas_alpha_c_image(k, x)),
                max_abs_diff(&generated, &y),
                crit.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                contact.max_residual(&y)?,
            ]);
        }
        Ok(())
    }));
    reports.push(Check::run("gas alpha0(im(eps_H, R(H))) generated by L", 1e-10, |c| {
        for x in &states {
            let ev = evolution_field_raw(&h, x)?;
            let mut slice = x.clone();
            slice.extend_from_slice(&ev[..6]);
            slice.push(-1.0);
            let y = a0.eval(&slice)?;
            let want = &gas_alpha_c_image(k, x)[..14];
            c.record_all([max_abs_diff(&y, want), evo.max_residual(&y)?]);
        }
        Ok(())
    }));
    Ok(GasLagrangian { family, reports })
}

/// Every thermo check at the default sample sizes, deterministic in `seed`.
pub fn thermo_suite(k: &GasConstants, samples: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut r = rng(seed);
    let mut out = potential_checks(k, samples, &mut r);
    out.extend(Generator::ALL.iter().map(|g| generator_transport(k, *g, samples, &mut r)));
    out.extend(quantomorphism_checks(samples, &mut r));
    let x0 = gas_legendrian(k)?.parametrize(&[1.0, 1.0, 1.0])?;
    out.extend(gas_flow(k, &x0, (0.0, 1.0), 1e-3, samples, &mut r)?.reports);
    out.extend(gas_lagrangian_family(k, samples, &mut r)?.reports);
    Ok(out)
}

/// Legendre consistency of the potentials and the gas Legendrian itself.
pub fn potential_checks(k: &GasConstants, samples: usize, rng: &mut SampleRng) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    out.push(Check::run("B = U + PV at P = -dU/dV", 1e-8, |c| {
        let p = potentials(k)?;
        for _ in 0..samples {
            let [s, v, n] = sample_gas_base(rng);
            let (u, g) = p.u.value_gradient(&[s, v, n])?;
            let pr = -g[1];
            c.record(rel(p.b.value(&[s, pr, n])?, u + pr * v));
        }
        Ok(())
    }));
    out.push(Check::run("G = F + PV at P = -dF/dV", 1e-8, |c| {
        let p = potentials(k)?;
        for _ in 0..samples {
            let [_, v, n] = sample_gas_base(rng);
            let t = uniform(rng, 0.5, 2.0);
            let (f, g) = p.f.value_gradient(&[t, v, n])?;
            let pr = -g[1];
            c.record(rel(p.g.value(&[t, pr, n])?, f + pr * v));
        }
        Ok(())
    }));
    out.push(Check::run("gas Legendrian parametrization", crate::legendrian::CONSTRUCTION_TOL, |c| {
        let gas = gas_legendrian(k)?;
        for _ in 0..samples {
            let x = gas.parametrize(&sample_gas_base(rng))?;
            c.record(gas.max_residual(&x)?);
        }
        Ok(())
    }));
    out
}

/// Strictness of φ¹…φ⁴ and the composites, and φ³∘φ² against its direct
/// formula (S,V,N,T,−P,μ,U) ↦ (T,−P,N,−S,−V,μ,U−TS+PV).
pub fn quantomorphism_checks(samples: usize, rng: &mut SampleRng) -> Vec<VerificationReport> {
    let eta = crate::contact::CanonicalContactForm { m: 3 };
    let mut out: Vec<VerificationReport> = [phi1(), phi2(), phi3(), phi4(), phi3_phi2(), phi_full()]
        .iter()
        .map(|m| {
            let name = format!("{} preserves eta", m.name());
            crate::maps::verify_pullback(&name, m, &eta, &eta, samples, None, 1e-9, rng)
                .unwrap_or_else(|e| VerificationReport::failed(name, 1e-9, e))
        })
        .collect();
    out.push(Check::run("phi3∘phi2 direct formula", 1e-12, |c| {
        let m = phi3_phi2();
        for _ in 0..samples {
            let x = crate::sampling::uniform_vec(rng, 7, -2.0, 2.0);
            let [s, v, n, t, neg_p, mu, u] = x[..] else { unreachable!() };
            let want = [t, neg_p, n, -s, -v, mu, u - t * s - neg_p * v];
            c.record(max_abs_diff(&m.eval(&x)?, &want));
        }
        Ok(())
    }));
    out
}

#[cfg(test)]
mod tests;
