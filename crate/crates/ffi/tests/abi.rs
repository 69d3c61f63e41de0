use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use gperim_ffi::*;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gp_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn grid(dim: usize, n: usize) -> *mut GpGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gp_grid_new(dim, 6.0, n, &mut g) }, GpStatus::Ok);
    g
}

#[test]
fn scalar_functions() {
    assert!((gp_normal_cdf(0.0) - 0.5).abs() < 1e-15);
    let mut q = f64::NAN;
    assert_eq!(unsafe { gp_normal_quantile(0.975, &mut q) }, GpStatus::Ok);
    assert!((q - 1.959_963_984_540_054).abs() < 1e-9);
    let mut i = 0.0;
    assert_eq!(unsafe { gp_isoperimetric_profile(0.5, &mut i) }, GpStatus::Ok);
    assert!((i - INV_SQRT_2PI).abs() < 1e-12);
    let mut c = 0.0;
    assert_eq!(unsafe { gp_well_constant(&mut c) }, GpStatus::Ok);
    assert!((c - 2f64.sqrt() / 6.0).abs() < 1e-12);
}

#[test]
fn domain_errors_leave_output_untouched() {
    let mut q = 7.0;
    assert_eq!(unsafe { gp_normal_quantile(1.5, &mut q) }, GpStatus::Domain);
    assert_eq!(q, 7.0);
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { gp_normal_quantile(0.5, ptr::null_mut()) },
        GpStatus::NullPointer
    );
}

#[test]
fn bad_grids_are_rejected() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { gp_grid_new(4, 6.0, 64, &mut g) }, GpStatus::InvalidGrid);
    assert!(g.is_null());
    assert_eq!(unsafe { gp_grid_new(1, 6.0, 2, &mut g) }, GpStatus::InvalidGrid);
    assert_eq!(unsafe { gp_grid_len(ptr::null()) }, 0);
}

#[test]
fn half_space_pipeline() {
    let g = grid(2, 256);
    assert_eq!(unsafe { gp_grid_dim(g) }, 2);
    let n = unsafe { gp_grid_len(g) };
    assert_eq!(n, 256 * 256);

    let h = [1.0, 0.0];
    let mut e = ptr::null_mut();
    assert_eq!(
        unsafe { gp_half_space_indicator(g, h.as_ptr(), 2, 0.0, &mut e) },
        GpStatus::Ok
    );
    // the field keeps its grid alive
    unsafe { gp_grid_free(g) };

    let (mut vol, mut per, mut tv, mut rel) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(gp_volume(e, &mut vol), GpStatus::Ok);
        assert_eq!(gp_perimeter(e, &mut per), GpStatus::Ok);
        assert_eq!(gp_total_variation(e, &mut tv), GpStatus::Ok);
        assert_eq!(gp_relaxed_energy(e, &mut rel), GpStatus::Ok);
    }
    assert!((vol - 0.5).abs() < 1e-6);
    assert!((per / INV_SQRT_2PI - 1.0).abs() < 0.01);
    assert_eq!(per, tv);
    assert!((rel - per).abs() < 1e-12);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { gp_symmetrize_set(e, 1, &mut s) }, GpStatus::Ok);
    let mut ps = 0.0;
    assert_eq!(unsafe { gp_perimeter(s, &mut ps) }, GpStatus::Ok);
    assert!(ps <= per + 1e-6);

    let mut ac = 0.0;
    assert_eq!(unsafe { gp_allen_cahn_energy(e, 0.1, &mut ac) }, GpStatus::Ok);
    assert!(ac.is_finite() && ac > 0.0);
    assert_eq!(
        unsafe { gp_allen_cahn_energy(e, -1.0, &mut ac) },
        GpStatus::Domain
    );

    unsafe {
        gp_field_free(s);
        gp_field_free(e);
    }
}

#[test]
fn values_round_trip_and_shape_checks() {
    let g = grid(1, 64);
    let v: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(
            gp_field_from_values(g, v.as_ptr(), 63, &mut f),
            GpStatus::ShapeMismatch
        );
        assert!(f.is_null());
        assert_eq!(gp_field_from_values(g, v.as_ptr(), 64, &mut f), GpStatus::Ok);
        assert_eq!(gp_field_len(f), 64);
        let mut back = vec![0.0; 64];
        assert_eq!(gp_field_values(f, back.as_mut_ptr(), 64), GpStatus::Ok);
        assert_eq!(back, v);
        assert_eq!(gp_field_values(f, back.as_mut_ptr(), 10), GpStatus::ShapeMismatch);

        let mut sym = ptr::null_mut();
        assert_eq!(gp_symmetrize_function(f, 1, 64, &mut sym), GpStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        gp_volume(f, &mut a);
        gp_volume(sym, &mut b);
        assert!((a - b).abs() < 1e-2, "{a} {b}");

        let mut not_set = ptr::null_mut();
        assert_eq!(gp_symmetrize_set(f, 1, &mut not_set), GpStatus::NotIndicator);
        gp_field_free(sym);
        gp_field_free(f);
        gp_grid_free(g);
    }
}

#[test]
fn dump_round_trip() {
    let g = grid(2, 16);
    let v: Vec<f64> = (0..256).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(gp_field_from_values(g, v.as_ptr(), v.len(), &mut f), GpStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(gp_field_dump(f, &mut text), GpStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(gp_field_parse(text, &mut back), GpStatus::Ok);
        let mut w = vec![0.0; 256];
        gp_field_values(back, w.as_mut_ptr(), 256);
        assert_eq!(w, v);
        gp_string_free(text);
        gp_field_free(back);
        gp_field_free(f);
        gp_grid_free(g);

        let junk = CString::new("not a dump").unwrap();
        let mut bad = ptr::null_mut();
        assert_eq!(gp_field_parse(junk.as_ptr(), &mut bad), GpStatus::Parse);
        assert!(bad.is_null());
    }
}

#[test]
fn null_handles_are_reported() {
    let mut x = 0.0;
    unsafe {
        assert_eq!(gp_volume(ptr::null(), &mut x), GpStatus::NullPointer);
        assert!(last_error().contains("null"));
        gp_field_free(ptr::null_mut());
        gp_grid_free(ptr::null_mut());
        gp_string_free(ptr::null_mut());
    }
}

// Compiles the generated header as C and C++ when a compiler is present.
#[test]
fn header_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let src = format!("#include \"{dir}/include/gperim.h\"\nint main(void) {{ return gp_normal_cdf(0.0) > 0.0 ? 0 : 1; }}\n");
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-"])
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::piped())
            .spawn();
        let Ok(mut child) = out else {
            eprintln!("{cc} not found, skipping");
            continue;
        };
        use std::io::Write;
        child.stdin.take().unwrap().write_all(src.as_bytes()).unwrap();
        let res = child.wait_with_output().unwrap();
        assert!(
            res.status.success(),
            "{cc}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
}
