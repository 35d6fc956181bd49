//! Reference systems used by the verification suites.

use std::collections::BTreeMap;

use crate::dynamics::{HamiltonianSystem, LagrangianSystem, Regularity};
use crate::error::Result;
use crate::field::ScalarField;
use crate::sampling::{uniform_vec, SampleRng};
use crate::thermo::{potentials, sample_gas_base, GasConstants};

/// Damping rate of the catalog's damped systems.
pub const GAMMA: f64 = 0.2;

fn gamma() -> BTreeMap<String, f64> {
    [("gamma".to_string(), GAMMA)].into()
}

/// (name, n, H) for the catalog contact Hamiltonians.
pub const HAMILTONIANS: [(&str, usize, &str); 6] = [
    ("harmonic", 1, "p^2/2 + q^2/2"),
    ("damped", 1, "p^2/2 + q^2/2 + gamma*z"),
    ("reeb", 1, "z"),
    ("nonlinear", 1, "p^2/2 + q^4/4 + sin(q)*z/2"),
    ("pendulum", 1, "p^2/2 - cos(q)"),
    ("coupled", 2, "(p1^2 + p2^2)/2 + (q1^2 + q2^2)/2 + q1*q2/4 + gamma*z"),
];

/// (name, L, regularity) for the catalog contact Lagrangians, all n = 1.
pub const LAGRANGIANS: [(&str, &str, Regularity); 3] = [
    ("harmonic", "qdot^2/2 - q^2/2", Regularity::Regular),
    ("damped", "qdot^2/2 - q^2/2 - gamma*z", Regularity::Regular),
    ("degenerate", "qdot", Regularity::Degenerate),
];

pub fn hamiltonians() -> Result<Vec<(&'static str, HamiltonianSystem)>> {
    HAMILTONIANS
        .iter()
        .map(|(name, n, src)| {
            let sys = HamiltonianSystem::parse(*n, src, &gamma())?;
            Ok((*name, sys))
        })
        .collect()
}

pub fn lagrangians() -> Result<Vec<(&'static str, LagrangianSystem)>> {
    LAGRANGIANS.iter().map(|(name, src, reg)| Ok((*name, LagrangianSystem::parse(1, src, &gamma(), *reg)?))).collect()
}

pub fn hamiltonian(name: &str) -> Result<HamiltonianSystem> {
    lookup(hamiltonians()?, name)
}

pub fn lagrangian(name: &str) -> Result<LagrangianSystem> {
    lookup(lagrangians()?, name)
}

fn lookup<T>(items: Vec<(&'static str, T)>, name: &str) -> Result<T> {
    items
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("no catalog entry named {name}")))
}

type Sampler = fn(&mut SampleRng) -> Vec<f64>;

/// A catalog field with a sampler for points inside its domain.
pub struct CatalogField {
    pub name: String,
    pub field: ScalarField,
    pub sample: Sampler,
}

fn box3(rng: &mut SampleRng) -> Vec<f64> {
    uniform_vec(rng, 3, -2.0, 2.0)
}

fn box5(rng: &mut SampleRng) -> Vec<f64> {
    uniform_vec(rng, 5, -2.0, 2.0)
}

/// (S, V, N), also used for (S, P, N).
fn gas_base(rng: &mut SampleRng) -> Vec<f64> {
    sample_gas_base(rng).to_vec()
}

/// (T, V, N), also used for (T, P, N).
fn gas_tvn(rng: &mut SampleRng) -> Vec<f64> {
    let [_, v, n] = sample_gas_base(rng);
    vec![crate::sampling::uniform(rng, 0.5, 2.0), v, n]
}

/// (T, P, μ; S) with μ well below (c+1)RT for the default constants.
fn gas_tpmus(rng: &mut SampleRng) -> Vec<f64> {
    let t = crate::sampling::uniform(rng, 0.5, 2.0);
    let p = crate::sampling::uniform(rng, 0.5, 2.0);
    let mu = crate::sampling::uniform(rng, -2.0, 0.5);
    let s = crate::sampling::uniform(rng, 0.5, 2.0);
    vec![t, p, mu, s]
}

/// Every catalog Hamiltonian and Lagrangian plus the gas potentials at the
/// default constants.
pub fn fields() -> Result<Vec<CatalogField>> {
    let mut out = Vec::new();
    for (name, h) in hamiltonians()? {
        let sample: Sampler = if h.field().arity() == 3 { box3 } else { box5 };
        out.push(CatalogField { name: format!("H {name}"), field: h.field().clone(), sample });
    }
    for (name, l) in lagrangians()? {
        out.push(CatalogField { name: format!("L {name}"), field: l.lagrangian().clone(), sample: box3 });
    }
    let p = potentials(&GasConstants::default())?;
    for (field, sample) in
        [(p.u, gas_base as Sampler), (p.b, gas_base), (p.f, gas_tvn), (p.g, gas_tvn), (p.w, gas_tpmus)]
    {
        out.push(CatalogField { name: format!("gas {}", field.name()), field, sample });
    }
    Ok(out)
}
