use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use gneseek::bench::matrix::{example1_matrix, negative_matrix};
use gneseek_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let len = unsafe { gne_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(len > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn game_handles() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(gne_game_zero_sum(&mut g), GneStatus::Ok);
        let (mut p, mut n, mut m) = (0, 0, 0);
        assert_eq!(gne_game_dims(g, &mut p, &mut n, &mut m), GneStatus::Ok);
        assert_eq!((p, n, m), (2, 2, 0));
        let mut f = [0.0; 2];
        assert_eq!(gne_game_pseudo_gradient(g, [1.0, 0.0].as_ptr(), 2, f.as_mut_ptr()), GneStatus::Ok);
        assert_eq!(f, [0.0, -1.0]);
        assert_eq!(
            gne_game_pseudo_gradient(g, [1.0].as_ptr(), 1, f.as_mut_ptr()),
            GneStatus::DimensionMismatch
        );
        assert!(last_error().contains("dimension"));
        gne_game_free(g);

        let mut c = ptr::null_mut();
        assert_eq!(gne_game_cournot(42, &mut c), GneStatus::Ok);
        gne_game_dims(c, &mut p, &mut n, &mut m);
        let mut x = vec![0.0; n];
        let mut lam = vec![0.0; m];
        assert_eq!(gne_game_solve(c, x.as_mut_ptr(), n, lam.as_mut_ptr(), m), GneStatus::Ok);
        let direct = gneseek::game::solve_gne_oracle(
            &gneseek::bench::make_cournot(42).unwrap().0,
            &gneseek::graph::GraphTopology::complete(5),
        )
        .unwrap();
        assert_eq!(x, direct.x_star);
        assert_eq!(gne_game_solve(c, x.as_mut_ptr(), n + 1, lam.as_mut_ptr(), m), GneStatus::InvalidInput);
        gne_game_free(c);

        let json = CString::new(
            serde_json::to_string(&gneseek::bench::make_zero_sum_example().to_data().unwrap()).unwrap(),
        )
        .unwrap();
        let mut g2 = ptr::null_mut();
        assert_eq!(gne_game_from_json(json.as_ptr(), &mut g2), GneStatus::Ok);
        gne_game_free(g2);
        let bad = CString::new("{").unwrap();
        assert_eq!(gne_game_from_json(bad.as_ptr(), &mut g2), GneStatus::InvalidInput);
    }
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(gne_game_zero_sum(ptr::null_mut()), GneStatus::NullPointer);
        assert_eq!(gne_spec_dim(ptr::null()), 0);
        assert_eq!(gne_trajectory_terminal_reason(ptr::null()), -1);
        gne_game_free(ptr::null_mut());
        gne_spec_free(ptr::null_mut());
        gne_trajectory_free(ptr::null_mut());
        gne_string_free(ptr::null_mut());
    }
}

#[test]
fn spec_field_step_and_integrate() {
    let cfg = example1_matrix().into_iter().find(|c| c.name == "example1_pfc1").unwrap();
    let json = CString::new(cfg.to_json().unwrap()).unwrap();
    let lib_spec = cfg.build_spec().unwrap();
    unsafe {
        let mut spec = ptr::null_mut();
        assert_eq!(gne_spec_from_config(json.as_ptr(), &mut spec), GneStatus::Ok);
        let dim = gne_spec_dim(spec);
        assert_eq!(dim, lib_spec.dim());
        let s0: Vec<f64> = (0..dim).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect();
        let mut f = vec![0.0; dim];
        assert_eq!(gne_spec_field(spec, s0.as_ptr(), dim, f.as_mut_ptr()), GneStatus::Ok);
        assert_eq!(f, lib_spec.field(&s0).unwrap());
        let mut next = vec![0.0; dim];
        assert_eq!(gne_spec_step(spec, s0.as_ptr(), dim, 1e-3, next.as_mut_ptr()), GneStatus::Ok);
        assert_eq!(next, gneseek::integrator::step(&lib_spec, &s0, 1e-3).unwrap());

        let mut traj = ptr::null_mut();
        assert_eq!(gne_spec_integrate(spec, s0.as_ptr(), dim, 1e-3, 1.0, 100, &mut traj), GneStatus::Ok);
        assert_eq!(gne_trajectory_len(traj), 11);
        assert_eq!(gne_trajectory_terminal_reason(traj), 0);
        let mut last = vec![0.0; dim];
        let mut t = 0.0;
        assert_eq!(gne_trajectory_final_state(traj, last.as_mut_ptr(), dim, &mut t), GneStatus::Ok);
        assert!((t - 1.0).abs() < 1e-12);
        assert_eq!(
            gne_trajectory_final_state(traj, last.as_mut_ptr(), dim + 1, &mut t),
            GneStatus::DimensionMismatch
        );
        gne_trajectory_free(traj);
        gne_spec_free(spec);
    }
}

#[test]
fn gate_and_run_through_the_abi() {
    let neg = CString::new(negative_matrix()[0].to_json().unwrap()).unwrap();
    let mut cfg = example1_matrix().into_iter().find(|c| c.name == "example1_pfc1").unwrap();
    cfg.integrator.horizon = 1.0;
    let ok = CString::new(cfg.to_json().unwrap()).unwrap();
    unsafe {
        let mut spec = ptr::null_mut();
        assert_eq!(gne_spec_from_config(neg.as_ptr(), &mut spec), GneStatus::CompensatorCheck);
        assert!(last_error().contains("strictly_positive_real"));

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(gne_run_config(ok.as_ptr(), &mut out), GneStatus::Ok);
        let summary: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(summary["exit_code"], 2);
        gne_string_free(out);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gneseek.h");
    let text = std::fs::read_to_string(&header).expect("header generated by the build script");
    for name in ["gne_game_zero_sum", "gne_spec_integrate", "gne_run_config", "GNE_STATUS_COMPENSATOR_CHECK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(&src, "#include \"gneseek.h\"\nint main(void) { GneStatus s = GNE_STATUS_OK; return (int)s; }\n").unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    {
        Ok(st) => assert!(st.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler available; syntax check skipped"),
    }
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("gneseek-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
