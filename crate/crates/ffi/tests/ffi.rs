use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use contact_mech_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn hamiltonian_field_and_value() {
    let expr = CString::new("p^2/2 + q^2/2 + gamma*z").unwrap();
    let name = CString::new("gamma").unwrap();
    let names = [name.as_ptr()];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(cm_hamiltonian_new(1, expr.as_ptr(), names.as_ptr(), [0.5].as_ptr(), 1, &mut h), CmStatus::Ok);
        let x = [1.0, 2.0, 3.0];
        let mut v = 0.0;
        assert_eq!(cm_hamiltonian_value(h, x.as_ptr(), 3, &mut v), CmStatus::Ok);
        assert_eq!(v, 2.5 + 1.5);
        let mut f = [0.0; 3];
        let mut rh = 0.0;
        assert_eq!(cm_hamiltonian_field(h, x.as_ptr(), 3, false, f.as_mut_ptr(), 3, &mut rh), CmStatus::Ok);
        assert_eq!(f, [2.0, -1.0 - 2.0 * 0.5, 4.0 - 4.0]);
        assert_eq!(rh, 0.5);
        assert_eq!(cm_hamiltonian_field(h, x.as_ptr(), 3, true, f.as_mut_ptr(), 3, ptr::null_mut()), CmStatus::Ok);
        assert_eq!(f[2], 4.0);
        assert_eq!(
            cm_hamiltonian_field(h, x.as_ptr(), 3, false, f.as_mut_ptr(), 2, ptr::null_mut()),
            CmStatus::DimensionMismatch
        );
        assert_eq!(cm_hamiltonian_value(h, x.as_ptr(), 2, &mut v), CmStatus::DimensionMismatch);
        cm_hamiltonian_free(h);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let mut h = ptr::null_mut();
    unsafe {
        let bad = CString::new("q * (p").unwrap();
        assert_eq!(cm_hamiltonian_new(1, bad.as_ptr(), ptr::null(), ptr::null(), 0, &mut h), CmStatus::Parse);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(cm_hamiltonian_new(1, ptr::null(), ptr::null(), ptr::null(), 0, &mut h), CmStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(cm_hamiltonian_value(ptr::null(), [0.0; 3].as_ptr(), 3, &mut v), CmStatus::NullPointer);
        let dom = CString::new("log(q)").unwrap();
        assert_eq!(cm_hamiltonian_new(1, dom.as_ptr(), ptr::null(), ptr::null(), 0, &mut h), CmStatus::Ok);
        assert_eq!(cm_hamiltonian_value(h, [-1.0, 0.0, 0.0].as_ptr(), 3, &mut v), CmStatus::Domain);
        assert!(last_error().contains("log"), "{}", last_error());
        cm_hamiltonian_free(h);
        assert_eq!(cm_hamiltonian_dim(ptr::null()), 0);
        cm_hamiltonian_free(ptr::null_mut());
    }
}

#[test]
fn herglotz_trajectory_round_trip() {
    let expr = CString::new("qdot^2/2 - q^2/2 - z/5").unwrap();
    let mut l = ptr::null_mut();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(cm_lagrangian_new(1, expr.as_ptr(), ptr::null(), ptr::null(), 0, false, &mut l), CmStatus::Ok);
        assert_eq!(cm_herglotz_flow(l, [1.0, 0.0, 0.0].as_ptr(), 3, 0.0, 1.0, 0.01, false, &mut t), CmStatus::Ok);
        assert_eq!(cm_trajectory_len(t), 101);
        assert_eq!(cm_trajectory_dim(t), 3);
        let mut s = [0.0; 3];
        let mut time = 0.0;
        assert_eq!(cm_trajectory_sample(t, 0, &mut time, s.as_mut_ptr(), 3), CmStatus::Ok);
        assert_eq!((time, s), (0.0, [1.0, 0.0, 0.0]));
        assert_eq!(cm_trajectory_sample(t, 101, &mut time, s.as_mut_ptr(), 3), CmStatus::InvalidArgument);
        let csv = cm_trajectory_csv(t);
        assert!(CStr::from_ptr(csv).to_str().unwrap().starts_with("t,q,qdot,z\n"));
        cm_string_free(csv);
        cm_trajectory_free(t);
        cm_lagrangian_free(l);
    }
}

#[test]
fn blow_up_still_returns_the_trajectory() {
    let expr = CString::new("-z^2").unwrap();
    let mut h = ptr::null_mut();
    let mut t = ptr::null_mut();
    unsafe {
        cm_hamiltonian_new(1, expr.as_ptr(), ptr::null(), ptr::null(), 0, &mut h);
        assert_eq!(
            cm_hamiltonian_flow(h, [0.0, 1.0, 1.0].as_ptr(), 3, 0.0, 2.0, 0.01, false, &mut t),
            CmStatus::BlowUp
        );
        assert!(!t.is_null() && cm_trajectory_len(t) > 90);
        cm_trajectory_free(t);
        cm_hamiltonian_free(h);
    }
}

#[test]
fn maps_and_quantomorphisms() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(cm_quantomorphism_new(1, [1usize].as_ptr(), 1, &mut m), CmStatus::Ok);
        let mut y = [0.0; 3];
        assert_eq!(cm_map_eval(m, [1.0, 2.0, 5.0].as_ptr(), 3, y.as_mut_ptr(), 3), CmStatus::Ok);
        assert_eq!(y, [2.0, -1.0, 3.0]);
        cm_map_free(m);
        assert_eq!(cm_quantomorphism_new(1, [2usize].as_ptr(), 1, &mut m), CmStatus::InvalidArgument);
        for kind in [
            CmMapKind::BetaC,
            CmMapKind::AlphaC,
            CmMapKind::PsiC,
            CmMapKind::Alpha0,
            CmMapKind::Beta0,
            CmMapKind::Kappa,
        ] {
            assert_eq!(cm_map_new(kind, 2, &mut m), CmStatus::Ok);
            assert!(cm_map_dim(m) >= 8);
            cm_map_free(m);
        }
        assert_eq!(cm_map_new(CmMapKind::BetaC, 0, &mut m), CmStatus::InvalidArgument);
    }
}

#[test]
fn verify_returns_json() {
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(cm_verify(CmSuite::Maps, 5, 0, &mut json), CmStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        cm_string_free(json);
        let reports: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
        assert!(reports.iter().all(|r| r["pass"] == true));
        assert_eq!(cm_verify(CmSuite::Maps, 5, 0, ptr::null_mut()), CmStatus::NullPointer);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/contact_mech.h")).unwrap();
    for f in [
        "cm_last_error",
        "cm_version",
        "cm_string_free",
        "cm_hamiltonian_new",
        "cm_hamiltonian_free",
        "cm_hamiltonian_dim",
        "cm_hamiltonian_value",
        "cm_hamiltonian_field",
        "cm_lagrangian_new",
        "cm_lagrangian_free",
        "cm_hamiltonian_flow",
        "cm_herglotz_flow",
        "cm_trajectory_free",
        "cm_trajectory_len",
        "cm_trajectory_dim",
        "cm_trajectory_sample",
        "cm_trajectory_csv",
        "cm_map_new",
        "cm_quantomorphism_new",
        "cm_map_inverse",
        "cm_map_dim",
        "cm_map_eval",
        "cm_map_free",
        "cm_verify",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
}

/// Compiles tests/c/smoke.c against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libcontact_mech_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
