use super::*;

const SPOT: [f64; 7] = [2.0, 1.0, 1.0, 3.0, -1.0, 4.0, 5.0];

fn k() -> GasConstants {
    GasConstants::default()
}

#[test]
fn constants_are_validated() {
    assert!(GasConstants::new(1.0, 1.5, 8.314).is_ok());
    for (u0, c, r) in [(0.0, 1.5, 1.0), (1.0, -1.0, 1.0), (1.0, 1.5, f64::NAN)] {
        assert!(GasConstants::new(u0, c, r).is_err());
    }
}

#[test]
fn internal_energy_at_reference_state() {
    let p = potentials(&k()).unwrap();
    assert!((p.u.value(&[0.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!(p.u.value(&[0.0, -1.0, 1.0]).is_err());
}

#[test]
fn legendre_consistency_of_potentials() {
    let mut r = rng(1);
    for rep in potential_checks(&k(), 100, &mut r) {
        assert!(rep.pass, "{rep:?}");
    }
    let big = GasConstants::new(2.0, 2.5, 8.314).unwrap();
    for rep in potential_checks(&big, 100, &mut r) {
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn printed_enthalpy_exponent_only_works_for_unit_u0() {
    let k2 = GasConstants::new(2.0, 1.5, 1.0).unwrap();
    let printed = k2.field("B", B_PRINTED_SOURCE, &["S", "P", "N"]).unwrap();
    let p = potentials(&k2).unwrap();
    let (s, v, n) = (0.3, 1.2, 0.8);
    let (u, g) = p.u.value_gradient(&[s, v, n]).unwrap();
    let pr = -g[1];
    assert!(rel(p.b.value(&[s, pr, n]).unwrap(), u + pr * v) < 1e-12);
    assert!(rel(printed.value(&[s, pr, n]).unwrap(), u + pr * v) > 1e-2);
}

#[test]
fn gas_legendrian_examples() {
    let gas = gas_legendrian(&k()).unwrap();
    let pots = potentials(&k()).unwrap();
    let mut r = rng(2);
    for _ in 0..100 {
        let b = sample_gas_base(&mut r);
        let x = gas.parametrize(&b).unwrap();
        assert!(gas.max_residual(&x).unwrap() < 1e-9);
        let g = pots.u.gradient(&b).unwrap();
        assert_eq!((x[3], -x[4]), (g[0], -g[1]));
    }
    let mut x = gas.parametrize(&[0.5, 1.0, 1.0]).unwrap();
    x[4] *= 1.01;
    let res = gas.membership(&x).unwrap();
    assert!(res[1] > 5e-3 && res[0] < 1e-12, "{res:?}");
}

#[test]
fn quantomorphism_examples() {
    let m = quantomorphism(1, &[1]).unwrap();
    assert_eq!(m.eval(&[1.0, 2.0, 5.0]).unwrap(), vec![2.0, -1.0, 3.0]);
    assert!(quantomorphism(3, &[4]).is_err());
    assert!(quantomorphism(3, &[1, 1]).is_err());
    for rep in quantomorphism_checks(100, &mut rng(3)) {
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn phi_maps_match_the_printed_tuples() {
    let [s, v, n, t, neg_p, mu, u] = SPOT;
    let pv = -neg_p * v;
    assert_eq!(phi1().eval(&SPOT).unwrap(), vec![s, neg_p, n, t, -v, mu, u + pv]);
    assert_eq!(phi2().eval(&SPOT).unwrap(), vec![t, v, n, -s, neg_p, mu, u - s * t]);
    let full = phi_full().eval(&SPOT).unwrap();
    assert_eq!(full, vec![t, neg_p, mu, -s, -v, -n, u - t * s + pv - mu * n]);
    assert_eq!(full, quantomorphism(3, &[1, 2, 3]).unwrap().eval(&SPOT).unwrap());
}

#[test]
fn every_generator_lands_on_the_gas_legendrian() {
    let mut r = rng(4);
    for kk in [k(), GasConstants::new(1.0, 1.5, 8.314).unwrap(), GasConstants::new(3.0, 2.5, 1.0).unwrap()] {
        for g in Generator::ALL {
            let rep = generator_transport(&kk, g, 100, &mut r);
            assert!(rep.pass && rep.samples == 100, "{kk:?} {rep:?}");
        }
    }
}

#[test]
fn transport_without_inverse_is_detected() {
    // pushing T*F forward by φ² instead of pulling back leaves the gas Legendrian
    let kk = k();
    let pots = potentials(&kk).unwrap();
    let gas = gas_legendrian(&kk).unwrap();
    let x = gas.parametrize(&[0.5, 1.2, 0.9]).unwrap();
    let chart = prolong(&pots.f).parametrize(&[x[3], x[1], x[2]]).unwrap();
    let wrong = phi2().eval(&chart).unwrap();
    assert!(gas.max_residual(&wrong).unwrap() > 1e-2);
}

#[test]
fn w_denominator_is_a_domain_error() {
    let kk = k();
    let pots = potentials(&kk).unwrap();
    let mut x = gas_legendrian(&kk).unwrap().parametrize(&[0.5, 1.0, 1.0]).unwrap();
    x[5] = (kk.c + 1.0) * kk.r * x[3];
    assert!(matches!(transport_point(&kk, &pots, Generator::W, &x), Err(Error::Domain { .. })));
}

#[test]
fn gas_field_at_spot_state() {
    let h = gas_hamiltonian(&k()).unwrap();
    let (v, rh) = contact_field_raw(&h, &SPOT).unwrap();
    assert_eq!(v, vec![1.0, 0.0, 1.0, 0.0, -1.0, 3.0, 5.0]);
    assert_eq!(rh, -1.0);
    let e = evolution_field_raw(&h, &SPOT).unwrap();
    assert_eq!(e[6], 7.0);
    assert_eq!(&e[..6], &v[..6]);
}

#[test]
fn gas_flow_checks_pass() {
    let kk = k();
    let x0 = gas_legendrian(&kk).unwrap().parametrize(&[1.0, 1.0, 1.0]).unwrap();
    let flow = gas_flow(&kk, &x0, (0.0, 1.0), 1e-3, 100, &mut rng(5)).unwrap();
    for rep in &flow.reports {
        assert!(rep.pass, "{rep:?}");
    }
    assert_eq!(flow.contact.columns, GAS_COORDS);
    let h = flow.contact.diagnostic("H").unwrap();
    let e = (1.0f64).exp();
    assert!((h[h.len() - 1] - h[0] * e).abs() < 1e-9 * h[0].abs().max(1.0));
}

#[test]
fn gas_lagrangian_family_checks_pass() {
    let kk = GasConstants::new(1.0, 1.5, 8.314).unwrap();
    let fam = gas_lagrangian_family(&kk, 100, &mut rng(6)).unwrap();
    for rep in &fam.reports {
        assert!(rep.pass, "{rep:?}");
    }
    // critical-fiber equations are the flow constraints Ṡ = S − NR, Ṅ = N, V̇ = 0
    let (s, v, n, u) = (0.4, 1.1, 0.9, 2.0);
    let base = [s, v, n, s - n * kk.r, 0.0, n, u];
    let (_, crit) = fam.family.generate(&base, &[1.3, -0.7, 0.2]).unwrap();
    assert!(crit.iter().all(|c| c.abs() < 1e-14), "{crit:?}");
    let (_, crit) = fam.family.generate(&[s, v, n, 0.0, 0.1, n, u], &[1.3, -0.7, 0.2]).unwrap();
    assert!(crit.iter().any(|c| c.abs() > 1e-3));
}

#[test]
fn generated_point_matches_alpha_c_at_spot_state() {
    let kk = k();
    let h = gas_hamiltonian(&kk).unwrap();
    let y = alpha_c(3).unwrap().eval(&hamiltonian_legendrian(&h).parametrize(&SPOT).unwrap()).unwrap();
    let (generated, _) = gas_lagrangian(&kk).unwrap().generate(&y[..7], &[3.0, -1.0, 4.0]).unwrap();
    assert_eq!(generated, y);
    assert_eq!(y, gas_alpha_c_image(&kk, &SPOT));
}

#[test]
fn suite_is_deterministic() {
    let a = thermo_suite(&k(), 20, 9).unwrap();
    let b = thermo_suite(&k(), 20, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.pass), "{a:?}");
}
