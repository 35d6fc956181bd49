//! Verification suites behind `verify` and `thermo`, each deterministic in
//! its seed.

use crate::catalog;
use crate::contact::ContactPoint;
use crate::contact::{CanonicalContactForm, CanonicalSymplecticForm, DiffForm, EtaT, OmegaEta};
use crate::dynamics::{
    conserved_i, contact_field_raw, contact_flow, energy_drift, evolution_field_raw, herglotz_flow, jacobi_bracket,
    monitor_dissipation, push_fiber, sample_derivative, trajectory_defect, volume_rate_residual, Hamiltonian,
    HerglotzKind, LagrangianSystem, LegendreReduced, Regularity,
};
use crate::error::Result;
use crate::legendrian::{
    evolution_lagrangian_submanifold, evolution_legendrian, hamiltonian_legendrian, lagrangian_legendrian,
    legendre_equivalence, lift_trajectory, max_membership, morse_rank_check, neg_energy_legendrian, prolong,
    prolong_negated, reduced_equivalence, tangency_residual, MorseFamily, Submanifold, CONSTRUCTION_TOL,
    TRAJECTORY_TOL,
};
use crate::maps::{alpha_c, beta_c, classical_maps, evolution_maps, psi_c, quantomorphism, verify_pullback, CoordMap};
use crate::numeric::{fd_gradient, FD_STEP};
use crate::report::{max_abs_diff, Check, VerificationReport};
use crate::sampling::{rng, uniform_vec, SampleRng};
use crate::thermo::{thermo_suite, GasConstants};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Maps,
    Legendrian,
    Dynamics,
    Thermo,
    All,
}

pub const DEFAULT_SAMPLES: usize = 200;

pub fn run(suite: Suite, samples: usize, seed: u64) -> Vec<VerificationReport> {
    match suite {
        Suite::Maps => maps_suite(samples, seed),
        Suite::Legendrian => legendrian_suite(samples, seed),
        Suite::Dynamics => dynamics_suite(samples, seed),
        Suite::Thermo => thermo_suite(&GasConstants::default(), samples / 2, seed)
            .unwrap_or_else(|e| vec![VerificationReport::failed("thermo suite", 0.0, e)]),
        Suite::All => [Suite::Maps, Suite::Legendrian, Suite::Dynamics, Suite::Thermo]
            .into_iter()
            .flat_map(|s| run(s, samples, seed))
            .collect(),
    }
}

fn guarded(name: &str, body: impl FnOnce() -> Result<Vec<VerificationReport>>) -> Vec<VerificationReport> {
    body().unwrap_or_else(|e| vec![VerificationReport::failed(name, 0.0, e)])
}

fn pullback(
    name: String,
    m: &CoordMap,
    src: &dyn DiffForm,
    dst: &dyn DiffForm,
    samples: usize,
    tol: f64,
    r: &mut SampleRng,
) -> VerificationReport {
    verify_pullback(&name, m, src, dst, samples, None, tol, r)
        .unwrap_or_else(|e| VerificationReport::failed(name, tol, e))
}

/// Points are drawn from [-2, 2]^dim.
fn compare_maps(name: String, a: &CoordMap, b: &CoordMap, samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run(name, 1e-12, |c| {
        for _ in 0..samples {
            let x = uniform_vec(r, a.dim(), -2.0, 2.0);
            c.record(max_abs_diff(&a.eval(&x)?, &b.eval(&x)?));
        }
        Ok(())
    })
}

fn round_trip(m: &CoordMap, samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run(format!("{} round trip", m.name()), 1e-12, |c| {
        let inv = m.inverse();
        for _ in 0..samples {
            let x = uniform_vec(r, m.dim(), -2.0, 2.0);
            c.record_all([max_abs_diff(&inv.eval(&m.eval(&x)?)?, &x), max_abs_diff(&m.eval(&inv.eval(&x)?)?, &x)]);
        }
        Ok(())
    })
}

/// Pullback identities at `samples` points, compositions and round trips
/// at 5·`samples` points, for n = 1 and n = 2.
pub fn maps_suite(samples: usize, seed: u64) -> Vec<VerificationReport> {
    guarded("maps suite", || {
        let mut r = rng(seed);
        let many = 5 * samples;
        let mut out = Vec::new();
        for n in [1, 2] {
            let (bc, ac, pc) = (beta_c(n)?, alpha_c(n)?, psi_c(n)?);
            let evo = evolution_maps(n)?;
            let cl = classical_maps(n)?;
            let eta_t = EtaT { n };
            let eta = CanonicalContactForm { m: 2 * n + 1 };
            let omega = CanonicalSymplecticForm { m: 2 * n + 1 };
            let omega_eta = OmegaEta { n };
            let tag = format!("[n={n}]");
            out.push(pullback(format!("(beta_c)* eta = eta^T {tag}"), &bc, &eta_t, &eta, samples, 1e-8, &mut r));
            out.push(pullback(format!("(alpha_c)* eta = eta^T {tag}"), &ac, &eta_t, &eta, samples, 1e-8, &mut r));
            out.push(pullback(format!("(psi_c)* eta = eta {tag}"), &pc, &eta, &eta, samples, 1e-8, &mut r));
            out.push(pullback(
                format!("(alpha0)* omega = omega_eta {tag}"),
                &evo.alpha0,
                &omega_eta,
                &omega,
                samples,
                1e-8,
                &mut r,
            ));
            out.push(pullback(
                format!("(beta0)* omega = omega_eta {tag}"),
                &evo.beta0,
                &omega_eta,
                &omega,
                samples,
                1e-8,
                &mut r,
            ));
            let id = CoordMap::identity(4 * n + 3);
            out.push(pullback(format!("identity* eta^T = eta^T {tag}"), &id, &eta_t, &eta_t, samples, 0.0, &mut r));

            out.push(compare_maps(format!("beta_c = psi_c∘alpha_c {tag}"), &bc, &ac.then(&pc)?, many, &mut r));
            out.push(compare_maps(
                format!("psi = beta∘alpha^-1 {tag}"),
                &cl.psi,
                &cl.alpha.inverse().then(&cl.beta)?,
                many,
                &mut r,
            ));
            out.push(compare_maps(
                format!("kappa∘kappa = id {tag}"),
                &cl.kappa.then(&cl.kappa)?,
                &CoordMap::identity(4 * n),
                many,
                &mut r,
            ));
            out.push(Check::run(format!("beta0 = beta_c on zdot = p.qdot {tag}"), 1e-12, |c| {
                for _ in 0..many {
                    let s = uniform_vec(&mut r, 4 * n + 2, -2.0, 2.0);
                    let zdot = crate::contact::dot(&s[n..2 * n], &s[2 * n + 1..3 * n + 1]);
                    let mut x = s[..4 * n + 1].to_vec();
                    x.push(zdot);
                    x.push(s[4 * n + 1]);
                    let y = bc.eval(&x)?;
                    let want = evo.beta0.eval(&s)?;
                    c.record_all([max_abs_diff(&y[..4 * n + 2], &want), y[4 * n + 2].abs()]);
                }
                Ok(())
            }));
            for m in [&bc, &ac, &pc, &evo.alpha0, &evo.beta0, &cl.alpha, &cl.beta, &cl.psi, &cl.kappa] {
                let mut rep = round_trip(m, many, &mut r);
                rep.name = format!("{} {tag}", rep.name);
                out.push(rep);
            }
        }
        for (m, j) in [(1, &[1][..]), (2, &[1]), (2, &[2]), (3, &[2]), (3, &[1, 3]), (3, &[1, 2, 3])] {
            let phi = quantomorphism(m, j)?;
            let eta = CanonicalContactForm { m };
            out.push(pullback(format!("{}* eta = eta [m={m}]", phi.name()), &phi, &eta, &eta, samples, 1e-9, &mut r));
            let mut rep = round_trip(&phi, many, &mut r);
            rep.name = format!("{} [m={m}]", rep.name);
            out.push(rep);
        }
        Ok(out)
    })
}

fn lagrangian_sample(r: &mut SampleRng) -> Vec<f64> {
    uniform_vec(r, 3, -1.5, 1.5)
}

fn parametrize_check(sub: &dyn Submanifold, samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run(format!("{} parametrization", sub.name()), CONSTRUCTION_TOL, |c| {
        for _ in 0..samples {
            let s = uniform_vec(r, sub.param_dim(), -1.5, 1.5);
            c.record(sub.max_residual(&sub.parametrize(&s)?)?);
        }
        Ok(())
    })
}

fn tangency_check(sub: &dyn Submanifold, form: &dyn DiffForm, samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run(format!("{} annihilates {}", sub.name(), form.name()), 1e-7, |c| {
        for _ in 0..samples {
            let s = uniform_vec(r, sub.param_dim(), -1.5, 1.5);
            c.record(tangency_residual(sub, form, &s, FD_STEP)?);
        }
        Ok(())
    })
}

/// Rank of the energy family's Morse block at random (q, p, z, q̇).
pub fn energy_rank_check(label: &str, sys: &LagrangianSystem, samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run(format!("energy family rank [{label}]"), 0.0, |c| {
        let fam = MorseFamily::energy(sys)?;
        for _ in 0..samples {
            let x = uniform_vec(r, 4 * sys.n() + 1 - sys.n(), -1.5, 1.5);
            let rc = morse_rank_check(&fam, &x)?;
            c.record(if rc.ok { 0.0 } else { 1.0 });
        }
        Ok(())
    })
}

pub fn legendrian_suite(samples: usize, seed: u64) -> Vec<VerificationReport> {
    guarded("legendrian suite", || {
        let mut r = rng(seed);
        let mut out = Vec::new();
        let eta_t = EtaT { n: 1 };
        let ac = alpha_c(1)?;
        let bc = beta_c(1)?;
        for (name, sys) in catalog::lagrangians()? {
            let tag = |s: &str| format!("{s} [{name}]");
            let mut rep = legendre_equivalence(&sys, samples, 1e-10, &mut r);
            rep.name = tag("legendre equivalence");
            out.push(rep);
            out.push(energy_rank_check(name, &sys, samples, &mut r));
            if sys.regularity() == Regularity::Regular {
                let mut rep = reduced_equivalence(&sys, samples, 1e-8, &mut r);
                rep.name = tag("N_L in N_-H of reduced H");
                out.push(rep);
            }
            let nl = lagrangian_legendrian(&sys);
            for sub in [&nl as &dyn Submanifold, &neg_energy_legendrian(&sys), &evolution_lagrangian_submanifold(&sys)]
            {
                let mut rep = parametrize_check(sub, samples, &mut r);
                rep.name = tag(&rep.name);
                out.push(rep);
            }
            let mut rep = tangency_check(&nl, &eta_t, samples, &mut r);
            rep.name = tag(&rep.name);
            out.push(rep);
            let tl = prolong(sys.lagrangian());
            out.push(Check::run(tag("alpha_c(N_L) in im(T*L)"), CONSTRUCTION_TOL, |c| {
                for _ in 0..samples {
                    let x = nl.parametrize(&lagrangian_sample(&mut r))?;
                    c.record(tl.max_residual(&ac.eval(&x)?)?);
                }
                Ok(())
            }));
        }
        for (name, h) in catalog::hamiltonians()? {
            if h.n() != 1 {
                continue;
            }
            let tag = |s: &str| format!("{s} [{name}]");
            let nh = hamiltonian_legendrian(&h);
            let mut rep = parametrize_check(&nh, samples, &mut r);
            rep.name = tag(&rep.name);
            out.push(rep);
            let mut rep = tangency_check(&nh, &eta_t, samples, &mut r);
            rep.name = tag(&rep.name);
            out.push(rep);
            let target = prolong_negated(&h);
            out.push(Check::run(tag("beta_c(N_-H) in im(-T*H)"), CONSTRUCTION_TOL, |c| {
                for _ in 0..samples {
                    let x = nh.parametrize(&uniform_vec(&mut r, 3, -2.0, 2.0))?;
                    c.record(target.max_residual(&bc.eval(&x)?)?);
                }
                Ok(())
            }));
        }
        Ok(out)
    })
}

pub const FLOW_STEP: f64 = 1e-3;
pub const FLOW_SPAN: (f64, f64) = (0.0, 5.0);

/// Herglotz trajectory of `sys`, pushed through the fiber derivative, against
/// the contact (or evolution) Hamiltonian flow of the reduced Hamiltonian.
pub fn herglotz_equivalence(
    label: &str,
    sys: &LagrangianSystem,
    kind: HerglotzKind,
    s0: &[f64],
) -> Vec<VerificationReport> {
    let flow = match kind {
        HerglotzKind::Contact => "contact",
        HerglotzKind::Evolution => "evolution",
    };
    let name = |s: &str| format!("{flow} {s} [{label}]");
    guarded(&name("Herglotz equivalence"), || {
        let traj = herglotz_flow(sys, kind, s0, FLOW_SPAN, FLOW_STEP, &mut [])?;
        let sigma = push_fiber(sys, &traj)?;
        let h = LegendreReduced::new(sys);
        let defect = match kind {
            HerglotzKind::Contact => trajectory_defect(&sigma, |x| Ok(contact_field_raw(&h, x)?.0))?,
            HerglotzKind::Evolution => trajectory_defect(&sigma, |x| evolution_field_raw(&h, x))?,
        };
        let lift = lift_trajectory(&h, &sigma)?;
        let lift_res = match kind {
            HerglotzKind::Contact => max_membership(&hamiltonian_legendrian(&h), &lift)?,
            HerglotzKind::Evolution => max_membership(&evolution_legendrian(&h), &lift)?,
        };
        let mut reports = vec![
            single(name("FL∘c satisfies Hamilton's equations"), traj.len(), defect, TRAJECTORY_TOL),
            single(name("lift of FL∘c stays in N"), traj.len(), lift_res, TRAJECTORY_TOL),
        ];
        if kind == HerglotzKind::Evolution {
            let rates = sample_derivative(&sigma)?;
            let ev = evolution_lagrangian_submanifold(sys);
            let mut worst = 0.0f64;
            for ((s, x), rate) in traj.states.iter().zip(&sigma.states).zip(rates) {
                let lz = sys.lagrangian().gradient(s)?[2 * sys.n()];
                let mut pt = x.clone();
                pt.extend(rate);
                pt.push(-lz);
                worst = worst.max(ev.max_residual(&pt)?);
            }
            reports.push(single(name("lift stays in (alpha0)^-1(im dL)"), traj.len(), worst, TRAJECTORY_TOL));
        }
        Ok(reports)
    })
}

fn single(name: String, samples: usize, residual: f64, tolerance: f64) -> VerificationReport {
    let mut c = Check::new(name, tolerance);
    c.record(residual);
    let mut rep = c.finish();
    rep.samples = samples;
    rep
}

/// Relative spread max|I − I(0)| / max(|I(0)|, 1e-300) of the conserved quantity.
pub fn conserved_check(label: &str, sys: &LagrangianSystem, s0: &[f64], tolerance: f64) -> VerificationReport {
    let name = format!("conserved I [{label}]");
    guarded(&name, || {
        let traj = herglotz_flow(sys, HerglotzKind::Contact, s0, FLOW_SPAN, FLOW_STEP, &mut [])?;
        let i = conserved_i(sys, &traj)?;
        let spread = i.iter().fold(0.0f64, |m, v| m.max((v - i[0]).abs())) / i[0].abs().max(1e-300);
        Ok(vec![single(name.clone(), traj.len(), spread, tolerance)])
    })
    .remove(0)
}

/// Relative ‖∇f − fd‖∞ / (1 + ‖∇f‖∞) over every catalog field.
pub fn gradient_check(samples: usize, r: &mut SampleRng) -> Vec<VerificationReport> {
    guarded("gradient vs finite differences", || {
        let mut out = Vec::new();
        for cf in catalog::fields()? {
            out.push(Check::run(format!("gradient vs fd [{}]", cf.name), 1e-5, |c| {
                for _ in 0..samples {
                    let x = (cf.sample)(r);
                    let g = cf.field.gradient(&x)?;
                    let fd = fd_gradient(&cf.field, &x, FD_STEP)?;
                    let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    c.record(max_abs_diff(&g, &fd) / scale);
                }
                Ok(())
            }));
        }
        Ok(out)
    })
}

/// Dissipation law along every catalog contact flow, plus exact energy
/// conservation for the z-independent ones.
pub fn dissipation_checks(r: &mut SampleRng) -> Vec<VerificationReport> {
    guarded("dissipation law", || {
        let mut out = Vec::new();
        for (name, h) in catalog::hamiltonians()? {
            let x0 = uniform_vec(r, 2 * h.n() + 1, -1.0, 1.0);
            let traj = contact_flow(&h, &x0, FLOW_SPAN, FLOW_STEP, &mut [])?;
            let mut rep = monitor_dissipation(&h, &traj, 1e-6);
            rep.name = format!("dissipation law [{name}]");
            out.push(rep);
            if h.field().expr().max_var().is_none_or(|v| v < 2 * h.n()) {
                let drift = energy_drift(&h, &traj)?;
                out.push(single(format!("energy conservation [{name}]"), traj.len(), drift, 1e-6));
            }
        }
        Ok(out)
    })
}

/// div X^c_H = −2 R(H) for the n = 1 catalog Hamiltonians.
pub fn volume_checks(samples: usize, r: &mut SampleRng) -> Vec<VerificationReport> {
    guarded("volume rate", || {
        let mut out = Vec::new();
        for (name, h) in catalog::hamiltonians()?.into_iter().filter(|(_, h)| h.n() == 1) {
            out.push(Check::run(format!("volume rate div X = -2 R(H) [{name}]"), 1e-7, |c| {
                for _ in 0..samples {
                    let x = uniform_vec(r, 3, -1.5, 1.5);
                    c.record(volume_rate_residual(&h, &x, FD_STEP)?);
                }
                Ok(())
            }));
        }
        Ok(out)
    })
}

pub fn bracket_antisymmetry(samples: usize, r: &mut SampleRng) -> VerificationReport {
    Check::run("Jacobi bracket antisymmetry", 1e-10, |c| {
        let hams = catalog::hamiltonians()?;
        let fields: Vec<_> = hams.iter().filter(|(_, h)| h.n() == 1).map(|(_, h)| h.field()).collect();
        let m = fields.len();
        for k in 0..samples {
            let (f, g) = (fields[k % m], fields[(k / m + k + 1) % m]);
            let x = ContactPoint::from_slice(1, &uniform_vec(r, 3, -1.5, 1.5))?;
            c.record((jacobi_bracket(f, g, &x)? + jacobi_bracket(g, f, &x)?).abs());
        }
        Ok(())
    })
}

pub fn dynamics_suite(samples: usize, seed: u64) -> Vec<VerificationReport> {
    guarded("dynamics suite", || {
        let mut r = rng(seed);
        let mut out = Vec::new();
        let damped = catalog::lagrangian("damped")?;
        let s0 = [1.0, 0.0, 0.0];
        out.extend(herglotz_equivalence("damped", &damped, HerglotzKind::Contact, &s0));
        out.extend(herglotz_equivalence("damped", &damped, HerglotzKind::Evolution, &s0));
        for name in ["harmonic", "damped"] {
            out.push(conserved_check(name, &catalog::lagrangian(name)?, &s0, 1e-5));
        }
        out.extend(dissipation_checks(&mut r));
        out.extend(volume_checks(samples, &mut r));
        out.push(bracket_antisymmetry(samples, &mut r));
        out.extend(gradient_check(samples, &mut r));
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_is_vacuous() {
        let reps = maps_suite(0, 0);
        assert!(reps.iter().all(|r| r.pass && r.vacuous && r.samples == 0));
    }

    #[test]
    fn maps_and_legendrian_suites_pass() {
        for rep in maps_suite(40, 1).into_iter().chain(legendrian_suite(40, 1)) {
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn dynamics_suite_passes() {
        for rep in dynamics_suite(40, 2) {
            assert!(rep.pass, "{rep:?}");
        }
    }
}
