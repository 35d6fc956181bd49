use contact_mech::contact::{eta_eval, reeb, CanonicalContactForm, ContactPoint};
use contact_mech::dynamics::{contact_hamiltonian_field, jacobi_bracket, HamiltonianSystem};
use contact_mech::maps::{alpha_c, beta_c, classical_maps, evolution_maps, psi_c, quantomorphism, verify_pullback};
use contact_mech::sampling::rng;
use contact_mech::ScalarField;
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim)
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

/// A random polynomial in (q, p, z) of total degree at most 3.
fn poly() -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(-2i32..=2, 10).prop_map(|c| {
        let monos = ["1", "q", "p", "z", "q*p", "q*z", "p*z", "q^2*p", "p^3", "z^2*q"];
        let src: Vec<String> = c.iter().zip(monos).map(|(k, m)| format!("({k})*{m}")).collect();
        ScalarField::parse("f", &src.join(" + "), &["q", "p", "z"], &Default::default()).unwrap()
    })
}

proptest! {
    #[test]
    fn contact_maps_round_trip(n in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = contact_mech::sampling::uniform_vec(&mut r, 4 * n + 3, -3.0, 3.0);
        for m in [beta_c(n).unwrap(), alpha_c(n).unwrap(), psi_c(n).unwrap()] {
            let y = m.eval(&x).unwrap();
            prop_assert!(close(&m.inverse().eval(&y).unwrap(), &x, 1e-12), "{}", m.name());
        }
    }

    #[test]
    fn beta_c_factors_through_alpha_c(x in point(7)) {
        let direct = beta_c(1).unwrap().eval(&x).unwrap();
        let via = psi_c(1).unwrap().eval(&alpha_c(1).unwrap().eval(&x).unwrap()).unwrap();
        prop_assert!(close(&direct, &via, 1e-12));
    }

    #[test]
    fn classical_and_evolution_round_trips(x in point(8)) {
        let cl = classical_maps(2).unwrap();
        for m in [&cl.alpha, &cl.beta, &cl.psi, &cl.kappa] {
            prop_assert!(close(&m.inverse().eval(&m.eval(&x).unwrap()).unwrap(), &x, 1e-12));
        }
        prop_assert!(close(&cl.kappa.eval(&cl.kappa.eval(&x).unwrap()).unwrap(), &x, 0.0));
        let evo = evolution_maps(1).unwrap();
        let y: Vec<f64> = x[..6].to_vec();
        for m in [&evo.alpha0, &evo.beta0] {
            prop_assert!(close(&m.inverse().eval(&m.eval(&y).unwrap()).unwrap(), &y, 1e-12));
        }
    }

    #[test]
    fn quantomorphisms_are_strict(mask in 1u8..8, seed in any::<u64>()) {
        let j: Vec<usize> = (1..=3).filter(|r| mask & (1 << (r - 1)) != 0).collect();
        let phi = quantomorphism(3, &j).unwrap();
        let eta = CanonicalContactForm { m: 3 };
        let rep = verify_pullback("strict", &phi, &eta, &eta, 20, None, 1e-9, &mut rng(seed)).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn jacobi_bracket_is_antisymmetric(f in poly(), g in poly(), x in point(3)) {
        let x = ContactPoint::from_slice(1, &x).unwrap();
        let fg = jacobi_bracket(&f, &g, &x).unwrap();
        let gf = jacobi_bracket(&g, &f, &x).unwrap();
        prop_assert!((fg + gf).abs() <= 1e-10 * (1.0 + fg.abs()));
        prop_assert!(jacobi_bracket(&f, &f, &x).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn field_of_z_is_the_euler_field(x in point(3)) {
        let h = HamiltonianSystem::parse(1, "z", &Default::default()).unwrap();
        let c = ContactPoint::from_slice(1, &x).unwrap();
        let (v, rh) = contact_hamiltonian_field(&h, &c).unwrap();
        prop_assert_eq!(v, vec![0.0, -x[1], -x[2]]);
        prop_assert_eq!(rh, 1.0);
    }

    #[test]
    fn eta_of_the_field_is_minus_h(f in poly(), x in point(3)) {
        let h = HamiltonianSystem::new(1, f.clone()).unwrap();
        let c = ContactPoint::from_slice(1, &x).unwrap();
        let (v, _) = contact_hamiltonian_field(&h, &c).unwrap();
        let hv = f.value(&x).unwrap();
        prop_assert!((eta_eval(&c, &v).unwrap() + hv).abs() <= 1e-12 * (1.0 + hv.abs()));
        prop_assert_eq!(reeb(&c), vec![0.0, 0.0, 1.0]);
    }
}
