use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ccpb_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ccpb_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn solve_and_query_handle() {
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(ccpb_solve(20.0, 7.0, 0.0, 1e-10, &mut sol), CcpbStatus::Ok);
        assert!(last_error().is_empty());
        let (mut eps, mut ln_eps, mut alpha, mut fx0, mut residual) = (0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(ccpb_solution_eps(sol, &mut eps), CcpbStatus::Ok);
        assert_eq!(ccpb_solution_ln_eps(sol, &mut ln_eps), CcpbStatus::Ok);
        assert_eq!(ccpb_solution_alpha(sol, &mut alpha), CcpbStatus::Ok);
        assert_eq!(ccpb_solution_phi_x0(sol, &mut fx0), CcpbStatus::Ok);
        assert_eq!(ccpb_solution_residual(sol, &mut residual), CcpbStatus::Ok);
        assert!((eps.ln() - ln_eps).abs() < 1e-12);
        assert!((fx0 - 2.0 * alpha.sqrt() * eps).abs() < 1e-15);
        assert!(residual <= 1e-10);

        let mut phi = 0.0;
        let mut x = 0.0;
        assert_eq!(ccpb_solution_phi_of_x(sol, 4.0, &mut phi), CcpbStatus::Ok);
        assert_eq!(ccpb_solution_x_of_phi(sol, phi, &mut x), CcpbStatus::Ok);
        assert!((x - 4.0).abs() < 1e-8);
        assert_eq!(ccpb_solution_x_of_phi(sol, 8.0, &mut x), CcpbStatus::Domain);
        assert!(last_error().contains("exceeds"));
        ccpb_solution_free(sol);
    }
}

#[test]
fn stern_boundary_below_voltage() {
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(ccpb_solve(50.0, 10.0, 0.05, 1e-10, &mut sol), CcpbStatus::Ok);
        let mut pb = 0.0;
        assert_eq!(ccpb_solution_phi_boundary(sol, &mut pb), CcpbStatus::Ok);
        assert!(pb > 0.0 && pb < 10.0);
        ccpb_solution_free(sol);
    }
}

#[test]
fn null_pointers_and_bad_input() {
    unsafe {
        assert_eq!(
            ccpb_solve(10.0, 1.0, 0.0, 1e-10, ptr::null_mut()),
            CcpbStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(ccpb_solution_alpha(ptr::null(), &mut v), CcpbStatus::NullPointer);
        assert_eq!(ccpb_solution_sample_count(ptr::null()), 0);
        ccpb_solution_free(ptr::null_mut());
        let mut sol = ptr::null_mut();
        assert_eq!(
            ccpb_solve(f64::NAN, 1.0, 0.0, 1e-10, &mut sol),
            CcpbStatus::InvalidArgument
        );
        assert!(sol.is_null());
        assert_eq!(ccpb_channel_bath_ratio(0.5, 0.01, &mut v), CcpbStatus::Geometry);
    }
}

#[test]
fn scalar_functions() {
    unsafe {
        let mut v = 0.0;
        let mut within = false;
        assert_eq!(ccpb_i_exact(1.0, 0.05f64.ln(), 1e-12, &mut v), CcpbStatus::Ok);
        assert!((v - 5.958_047_551_237_091).abs() < 1e-11);
        assert_eq!(
            ccpb_i_approx(1.0, 0.05f64.ln(), true, &mut v, &mut within),
            CcpbStatus::Ok
        );
        assert!(within);
        assert_eq!(ccpb_predicted_error(0.0, 10.0, &mut v), CcpbStatus::Ok);
        assert_eq!(v, 0.0);
        let mut label = CcpbRegime::Confined;
        let (mut e, mut r) = (0.0, 0.0);
        assert_eq!(
            ccpb_classify_regime(6.0, 100.0, 0.05, &mut label, &mut e, &mut r),
            CcpbStatus::Ok
        );
        assert_eq!(label, CcpbRegime::Intermediate);
        let (mut c, mut p) = (0.0, 0.0);
        assert_eq!(
            ccpb_electrode_bulk_ratio(9.73, 0.01, 0.3, &mut c, &mut p),
            CcpbStatus::Ok
        );
        assert!((p - 59.4).abs() < 0.5);
        assert_eq!(ccpb_debye_length(0.1, 298.0, 78.5, &mut v), CcpbStatus::Ok);
        assert!((v - 9.6174e-10).abs() < 1e-13);
        assert_eq!(ccpb_nondim_voltage(0.25, 298.0, &mut v), CcpbStatus::Ok);
        assert!((v - 9.7353).abs() < 1e-3);
    }
}

/// Directory holding the library artifacts (`target/<profile>`).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header_and_staticlib() {
    let lib = artifact_dir().join("libccpb_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join(format!("ccpb_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror"])
        .arg("-I")
        .arg(root.join("include"))
        .arg(root.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
