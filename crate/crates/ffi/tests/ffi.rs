use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qconc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qconc_last_error()) }.to_str().unwrap().to_owned()
}

fn interleave(entries: &[(f64, f64)]) -> Vec<f64> {
    entries.iter().flat_map(|&(re, im)| [re, im]).collect()
}

#[test]
fn pure_state_measures() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let data = interleave(&[(h, 0.0), (0.0, 0.0), (0.0, 0.0), (h, 0.0)]);
    let mut psi = ptr::null_mut();
    unsafe {
        assert_eq!(qconc_pure_new(2, data.as_ptr(), &mut psi), QconcStatus::Ok);
        let (mut e, mut c, mut d) = (0.0, 0.0, 0.0);
        assert_eq!(qconc_pure_eof(psi, &mut e), QconcStatus::Ok);
        assert_eq!(qconc_pure_concurrence(psi, &mut c), QconcStatus::Ok);
        assert_eq!(qconc_pure_generalized_concurrence(psi, 1, 2, &mut d), QconcStatus::Ok);
        assert!((e - 1.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12 && (d - 1.0).abs() < 1e-12);
        let (mut i0, mut i1) = (0.0, 0.0);
        assert_eq!(qconc_pure_invariants(psi, &mut i0, &mut i1), QconcStatus::Ok);
        assert!((i0 - 1.0).abs() < 1e-12 && (i1 - 0.5).abs() < 1e-12);

        let mut rho = ptr::null_mut();
        assert_eq!(qconc_density_from_pure(psi, &mut rho), QconcStatus::Ok);
        let mut b = 0.0;
        assert_eq!(qconc_density_bound(rho, 1, 2, true, &mut b), QconcStatus::Ok);
        assert!((b - 1.0).abs() < 1e-12);
        qconc_density_free(rho);
        qconc_pure_free(psi);
    }
}

#[test]
fn bad_inputs_set_status_and_message() {
    let zero = [0.0; 8];
    let mut psi = ptr::null_mut();
    unsafe {
        assert_eq!(qconc_pure_new(2, zero.as_ptr(), &mut psi), QconcStatus::InvalidInput);
        assert!(psi.is_null());
        assert!(last_error().contains("zero"), "{}", last_error());
        assert_eq!(qconc_pure_new(1, zero.as_ptr(), &mut psi), QconcStatus::InvalidInput);
        assert_eq!(qconc_pure_new(2, ptr::null(), &mut psi), QconcStatus::NullPointer);
        let mut x = 0.0;
        assert_eq!(qconc_pure_eof(ptr::null(), &mut x), QconcStatus::NullPointer);
        assert_eq!(qconc_density_bound(ptr::null(), 1, 2, true, &mut x), QconcStatus::NullPointer);

        // trace 2
        let mut m = vec![0.0; 32];
        for k in 0..4 {
            m[2 * (5 * k)] = 0.5;
        }
        let mut rho = ptr::null_mut();
        assert_eq!(qconc_density_new(2, m.as_ptr(), &mut rho), QconcStatus::InvalidInput);
        assert!(last_error().contains("trace"));
        assert_eq!(qconc_density_werner(1.5, &mut rho), QconcStatus::InvalidInput);
        qconc_density_free(ptr::null_mut());
        qconc_pure_free(ptr::null_mut());
    }
}

#[test]
fn werner_density() {
    let mut rho = ptr::null_mut();
    unsafe {
        assert_eq!(qconc_density_werner(0.5, &mut rho), QconcStatus::Ok);
        assert_eq!(qconc_density_dim(rho), 2);
        let mut d = 0.0;
        assert_eq!(qconc_density_bound(rho, 1, 2, true, &mut d), QconcStatus::Ok);
        assert!((d - 0.25).abs() < 1e-12);
        let mut e = 0.0;
        assert_eq!(qconc_density_eof_bound(rho, 1, 2, &mut e), QconcStatus::Ok);
        let mut expected = 0.0;
        assert_eq!(qconc_eof_of_concurrence(0.25, 1, &mut expected), QconcStatus::Ok);
        assert!((e - expected).abs() < 1e-12);

        let mut ppt = true;
        let mut min = 0.0;
        assert_eq!(qconc_density_ppt(rho, &mut ppt, &mut min), QconcStatus::Ok);
        assert!(!ppt && (min + 0.125).abs() < 1e-12);
        assert_eq!(qconc_density_ppt(rho, &mut ppt, ptr::null_mut()), QconcStatus::Ok);

        let mut roof = QconcRoofResult::default();
        assert_eq!(
            qconc_density_roof(rho, QconcObjective::AverageD, 1, 2, 2, 7, &mut roof),
            QconcStatus::Ok
        );
        assert!(roof.value >= 0.25 - 1e-6 && roof.value < 0.26, "{roof:?}");
        let mut cert = QconcCertificate::default();
        assert_eq!(qconc_density_certify(rho, 1, 2, 2, 7, &mut cert), QconcStatus::Ok);
        assert!(!cert.violated && (cert.bound - 0.25).abs() < 1e-12);
        assert_eq!(
            qconc_density_roof(rho, QconcObjective::AverageE, 0, 0, 0, 7, &mut roof),
            QconcStatus::InvalidInput
        );
        qconc_density_free(rho);
    }
}

#[test]
fn lemma_sums() {
    let (mut lemma, mut convexity) = (0.0, 0.0);
    unsafe {
        let s = qconc_lemma(QconcFamily::ArithmeticThree, 1, 1.0 / 3.0 + 0.05, -0.05, 0.0, &mut lemma, &mut convexity);
        assert_eq!(s, QconcStatus::Ok);
        assert!(lemma < 0.0 && convexity < 0.0);
        // stationary point of D
        let s = qconc_lemma(QconcFamily::TwoEigen, 1, 0.5, 0.5, 0.0, &mut lemma, &mut convexity);
        assert_eq!(s, QconcStatus::Numerical);
        let s = qconc_lemma(QconcFamily::TwoEigen, 1, 0.5, 0.7, 0.0, &mut lemma, &mut convexity);
        assert_eq!(s, QconcStatus::InvalidInput);
    }
}

#[test]
fn c_program_links_against_header() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libqconc_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let out = tempdir().join("qconc_smoke");
    let status = Command::new(&cc)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}

fn tempdir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
