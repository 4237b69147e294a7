use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qsync_ffi::*;

fn config(n: usize, kappa: f64) -> *mut QsConfig {
    let mut c = ptr::null_mut();
    let s = unsafe {
        qs_config_new(
            n,
            1,
            QsBoundary::Periodic,
            1.0,
            0.01,
            kappa * 0.01,
            0.1,
            &mut c,
        )
    };
    assert_eq!(s, QsStatus::Ok);
    c
}

fn last_error() -> String {
    let p = qs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn config_round_trip_and_validation() {
    let c = config(64, 2.0);
    unsafe {
        assert!((qs_config_kappa(c) - 2.0).abs() < 1e-12);
        assert_eq!(qs_config_n_sites(c), 64);
        let mut k = ptr::null_mut();
        assert_eq!(qs_config_with_kappa(c, 3.0, &mut k), QsStatus::Ok);
        assert!((qs_config_kappa(k) - 3.0).abs() < 1e-12);
        qs_config_free(k);
        qs_config_free(c);
        qs_config_free(ptr::null_mut());
        assert!(qs_config_kappa(ptr::null()).is_nan());

        let mut bad = ptr::null_mut();
        let s = qs_config_new(64, 1, QsBoundary::Periodic, 1.0, -0.01, 0.02, 0.1, &mut bad);
        assert_ne!(s, QsStatus::Ok);
        assert!(bad.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            qs_config_new(
                64,
                1,
                QsBoundary::Periodic,
                1.0,
                0.01,
                0.02,
                0.1,
                ptr::null_mut()
            ),
            QsStatus::NullPointer
        );
    }
}

#[test]
fn toml_configs_reject_unknown_keys() {
    let good = CString::new(
        "schema_version = 1\n[model]\nn_sites = 32\nmean_splitting = 1.0\ndisorder_width = 0.01\n\
         coupling = 0.02\ntemperature = 0.1\n",
    )
    .unwrap();
    let bad = CString::new(format!("{}typo = 3\n", good.to_str().unwrap())).unwrap();
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(qs_config_from_toml(good.as_ptr(), &mut c), QsStatus::Ok);
        assert_eq!(qs_config_n_sites(c), 32);
        qs_config_free(c);
        let mut d = ptr::null_mut();
        assert_ne!(qs_config_from_toml(bad.as_ptr(), &mut d), QsStatus::Ok);
        assert!(last_error().contains("typo"));
    }
}

#[test]
fn disorder_matches_the_rust_api() {
    let c = config(128, 2.0);
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(qs_disorder_sample(c, 42, &mut d), QsStatus::Ok);
        let mut needed = 0usize;
        assert_eq!(
            qs_disorder_values(d, ptr::null_mut(), 0, &mut needed),
            QsStatus::BufferTooSmall
        );
        assert_eq!(needed, 128);
        let mut buf = vec![0.0; needed];
        assert_eq!(
            qs_disorder_values(d, buf.as_mut_ptr(), buf.len(), ptr::null_mut()),
            QsStatus::Ok
        );
        let cfg =
            qsync::make_config(&qsync::RawParams::dimensionless(128, 0.01, 0.02, 0.1)).unwrap();
        assert_eq!(buf, qsync::sample_disorder(&cfg, 42).splittings);

        let mut e = ptr::null_mut();
        assert_eq!(
            qs_disorder_from_values(c, buf.as_ptr(), buf.len(), 42, &mut e),
            QsStatus::Ok
        );
        let mut short = ptr::null_mut();
        assert_eq!(
            qs_disorder_from_values(c, buf.as_ptr(), 3, 42, &mut short),
            QsStatus::InvalidArgument
        );
        qs_disorder_free(e);
        qs_disorder_free(d);
        qs_config_free(c);
    }
}

#[test]
fn saddle_filter_agrees_with_solver_and_mode_filter() {
    let c = config(512, 3.0);
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(qs_disorder_sample(c, 7, &mut d), QsStatus::Ok);
        let mut sol = QsSaddle::default();
        assert_eq!(qs_saddle_solve(d, c, &mut sol), QsStatus::Ok);
        assert!(sol.r0 > 0.0 && sol.r0.is_finite());

        let mut field = vec![0.0; 512];
        let mut r0 = 0.0;
        assert_eq!(
            qs_saddle_filter(d, c, field.as_mut_ptr(), 512, ptr::null_mut(), &mut r0),
            QsStatus::Ok
        );
        assert_eq!(r0, sol.r0);
        let mut again = vec![0.0; 512];
        assert_eq!(
            qs_mode_filter(d, c, r0, again.as_mut_ptr(), 512, ptr::null_mut()),
            QsStatus::Ok
        );
        assert_eq!(field, again);

        let mut flat = vec![0.0; 512];
        assert_eq!(
            qs_mode_filter(d, c, f64::INFINITY, flat.as_mut_ptr(), 512, ptr::null_mut()),
            QsStatus::Ok
        );
        assert!(flat.iter().all(|&w| (w - flat[0]).abs() < 1e-12));
        qs_disorder_free(d);
        qs_config_free(c);
    }
}

#[test]
fn saturated_solver_reports_solver_failure() {
    let c = config(64, 12.0);
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(qs_disorder_sample(c, 1, &mut d), QsStatus::Ok);
        let mut sol = QsSaddle::default();
        assert_eq!(qs_saddle_solve(d, c, &mut sol), QsStatus::SolverFailure);
        assert!(last_error().contains("saturated"));
        qs_disorder_free(d);
        qs_config_free(c);
    }
}

#[test]
fn transmission_single_line() {
    let (alpha, gamma) = (0.0025, 0.1);
    let grid = [0.0, 1.0, 1.1];
    let mut out = [0.0; 3];
    unsafe {
        assert_eq!(
            qs_transmission(
                [1.0].as_ptr(),
                1,
                alpha,
                gamma,
                grid.as_ptr(),
                3,
                out.as_mut_ptr()
            ),
            QsStatus::Ok
        );
        assert_eq!(
            qs_transmission(
                [1.0].as_ptr(),
                1,
                0.0,
                gamma,
                grid.as_ptr(),
                3,
                out.as_mut_ptr()
            ),
            QsStatus::InvalidArgument
        );
    }
    for (w, d) in grid.iter().zip(out) {
        let expected = 1.0 - alpha / ((w - 1.0f64).powi(2) + gamma * gamma);
        assert!((d - expected).abs() < 1e-15);
    }
}

#[test]
fn spinon_energies_reproduce_dense_ground_state() {
    let fields = [1.0, 1.02, 0.97, 1.01, 0.99, 1.03];
    let coupling = 0.3;
    let mut e = [0.0; 6];
    let mut levels = vec![0.0; 64];
    unsafe {
        assert_eq!(
            qs_spinon_energies(
                fields.as_ptr(),
                6,
                coupling,
                e.as_mut_ptr(),
                6,
                ptr::null_mut()
            ),
            QsStatus::Ok
        );
        assert_eq!(
            qs_dense_levels(
                fields.as_ptr(),
                6,
                coupling,
                levels.as_mut_ptr(),
                64,
                ptr::null_mut()
            ),
            QsStatus::Ok
        );
        let big = [1.0; 13];
        let mut needed = 0;
        assert_eq!(
            qs_dense_levels(big.as_ptr(), 13, coupling, ptr::null_mut(), 0, &mut needed),
            QsStatus::InvalidArgument
        );
    }
    assert!(e.windows(2).all(|w| w[0] <= w[1]));
    let spec = qsync::spinon::SpinChainSpec::new(fields.to_vec(), coupling).unwrap();
    assert_eq!(
        levels,
        qsync::spinon::dense_solve(&spec).unwrap().eigenvalues
    );
    assert_eq!(e.to_vec(), qsync::spinon::spinon_energies(&spec).unwrap());
}

#[test]
fn version_string_is_static() {
    let v = unsafe { CStr::from_ptr(qs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libqsync_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(header_dir.join("qsync.h").exists());
    let lib = static_lib().expect("static library next to the test binary");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "qsync.h"
int main(void) {
    QsConfig *c = NULL;
    QsDisorder *d = NULL;
    QsSaddle s;
    if (qs_config_new(256, 1, QS_BOUNDARY_PERIODIC, 1.0, 0.01, 0.02, 0.1, &c) != QS_STATUS_OK) return 10;
    if (qs_disorder_sample(c, 5, &d) != QS_STATUS_OK) return 11;
    if (qs_saddle_solve(d, c, &s) != QS_STATUS_OK) return 12;
    if (qs_config_new(0, 1, QS_BOUNDARY_OPEN, 1.0, 0.01, 0.02, 0.1, &c) == QS_STATUS_OK) return 13;
    if (qs_last_error_message() == NULL) return 14;
    printf("%.6f\n", s.r0);
    qs_disorder_free(d);
    qs_config_free(c);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .expect("C compiler");
    assert!(
        cc.status.success(),
        "{}",
        String::from_utf8_lossy(&cc.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let r0: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();
    assert!(r0 > 0.0);
}
