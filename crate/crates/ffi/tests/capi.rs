use std::ffi::{CStr, CString};
use std::ptr;

use twobath_ffi::*;

fn last_error() -> String {
    let p = tb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn free_spin_through_the_c_interface() {
    let cfg = CString::new("epsilon = 0.3\ndelta = 0.4\nchain_length = 2\nd_p = 3\nd_opt = 3\nd_c = 8\nstrict = true\n").unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { tb_ground(cfg.as_ptr(), &mut run) }, TbStatus::Ok);
    assert!(tb_last_error().is_null());
    let (mut e, mut sx, mut sy, mut sz, mut s) = (0.0, 0.0, 0.0, 0.0, 1.0);
    unsafe {
        assert_eq!(tb_run_energy(run, &mut e), TbStatus::Ok);
        assert_eq!(tb_run_spin(run, &mut sx, &mut sy, &mut sz), TbStatus::Ok);
        assert_eq!(tb_run_entropy(run, &mut s), TbStatus::Ok);
        assert_eq!(tb_run_flags(run), 0);
        tb_run_free(run);
    }
    assert!((e + 0.25).abs() < 1e-10);
    assert!((sx - 0.8).abs() < 1e-8 && sy.abs() < 1e-12 && (sz + 0.6).abs() < 1e-8);
    assert!(s.abs() < 1e-8);
}

#[test]
fn configuration_errors_are_reported() {
    let cfg = CString::new("d_p = 24\nd_opt = 30\n").unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { tb_ground(cfg.as_ptr(), &mut run) }, TbStatus::Config);
    assert!(run.is_null());
    assert!(last_error().contains("d_opt"), "{}", last_error());

    assert_eq!(unsafe { tb_ground(ptr::null(), &mut run) }, TbStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { tb_ground(bad.as_ptr().cast(), &mut run) }, TbStatus::InvalidUtf8);
    let mut e = 0.0;
    assert_eq!(unsafe { tb_run_energy(ptr::null(), &mut e) }, TbStatus::NullPointer);
    assert_eq!(unsafe { tb_run_flags(ptr::null()) }, 0);
}

#[test]
fn chain_handles() {
    let mut chain = ptr::null_mut();
    assert_eq!(unsafe { tb_chain_new(0.02, 0.25, 1.0, 2.0, 5, false, &mut chain) }, TbStatus::Ok);
    assert_eq!(unsafe { tb_chain_len(chain) }, 5);
    let (mut w, mut t) = (0.0, 0.0);
    assert_eq!(unsafe { tb_chain_site(chain, 0, &mut w, &mut t) }, TbStatus::Ok);
    // First moment of the spectral density: (s+1)/(s+2)·ω_c
    assert!((w - 1.25 / 2.25).abs() < 1e-12);
    assert!(t > 0.0);
    assert_eq!(unsafe { tb_chain_site(chain, 5, &mut w, &mut t) }, TbStatus::OutOfRange);
    unsafe { tb_chain_free(chain) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { tb_chain_new(0.02, 0.25, 1.0, 1.0, 5, false, &mut bad) }, TbStatus::Domain);
    assert!(bad.is_null());
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/twobath.h")).unwrap();
    for name in ["tb_ground", "tb_run_free", "tb_chain_new", "tb_last_error", "TbStatus", "TB_FLAG_NOT_CONVERGED"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
