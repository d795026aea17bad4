use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use gsdesign_ffi::*;

fn example1() -> GsdParams {
    let mut p = std::mem::MaybeUninit::uninit();
    assert_eq!(unsafe { gsd_params_default(p.as_mut_ptr()) }, GsdStatus::Ok);
    let mut p = unsafe { p.assume_init() };
    p.stages = 2;
    p.sigma0 = 2.0;
    p.sigma1 = 2.0;
    p
}

fn create(family: GsdFamily, params: &GsdParams) -> (GsdStatus, *mut GsdDesign) {
    let mut d = ptr::null_mut();
    let s = unsafe { gsd_design_create(family as u32, params, &mut d) };
    (s, d)
}

fn last_error() -> String {
    let p = gsd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn double_triangular_through_the_c_interface() {
    let (s, d) = create(GsdFamily::DoubleTriangular, &example1());
    assert_eq!(s, GsdStatus::Ok);
    assert!(gsd_last_error_message().is_null());
    unsafe {
        let mut stages = 0;
        assert_eq!(gsd_design_stages(d, &mut stages), GsdStatus::Ok);
        assert_eq!(stages, 2);
        let mut family = GsdFamily::HaybittlePeto;
        assert_eq!(gsd_design_family(d, &mut family), GsdStatus::Ok);
        assert_eq!(family, GsdFamily::DoubleTriangular);

        let (mut n0, mut n1) = (0.0, 0.0);
        assert_eq!(gsd_design_group_size(d, &mut n0, &mut n1), GsdStatus::Ok);
        assert!((n0 - 875.47).abs() < 0.01 && n0 == n1);
        let mut max_n = 0.0;
        assert_eq!(gsd_design_max_n(d, &mut max_n), GsdStatus::Ok);
        assert!((max_n - 3501.9).abs() < 0.1);

        let (mut alpha, mut power) = (0.0, 0.0);
        assert_eq!(gsd_design_attained(d, &mut alpha, &mut power), GsdStatus::Ok);
        assert!((alpha - 0.053).abs() < 5e-4 && (power - 0.8).abs() < 5e-4);

        let (mut lower, mut upper) = ([0.0; 2], [0.0; 2]);
        assert_eq!(gsd_design_boundaries(d, lower.as_mut_ptr(), upper.as_mut_ptr(), 2), GsdStatus::Ok);
        assert!((lower[0] - 0.73185).abs() < 1e-4 && (upper[0] - 2.19554).abs() < 1e-4);
        assert_eq!(lower[1], upper[1]);
        let mut info = [0.0; 2];
        assert_eq!(gsd_design_information(d, info.as_mut_ptr(), 2), GsdStatus::Ok);
        assert!((info[1] - 218.868).abs() < 1e-2);

        let mut p = 0.0;
        assert_eq!(gsd_design_rejection_probability(d, 0.0, &mut p), GsdStatus::Ok);
        assert_eq!(p, alpha);
        let mut en = 0.0;
        assert_eq!(gsd_design_expected_sample_size(d, 0.0, &mut en), GsdStatus::Ok);
        assert!((en - 2514.6).abs() < 0.1);

        let mut summary = GsdSummary::default();
        assert_eq!(gsd_design_summary(d, &mut summary), GsdStatus::Ok);
        assert!((summary.max_ess - 2716.4).abs() < 1.0);
        assert_eq!(summary.max_n, max_n);
        gsd_design_free(d);
    }
}

#[test]
fn json_round_trip() {
    let mut params = example1();
    params.has_omega = true;
    params.omega = 0.25;
    let (s, d) = create(GsdFamily::InnerWedge, &params);
    assert_eq!(s, GsdStatus::Ok);
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(gsd_design_to_json(d, &mut json), GsdStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(gsd_design_from_json(json, &mut copy), GsdStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(gsd_design_to_json(copy, &mut again), GsdStatus::Ok);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(again));
        gsd_string_free(json);
        gsd_string_free(again);
        gsd_design_free(copy);
        gsd_design_free(d);
    }
}

#[test]
fn errors_are_reported() {
    let mut params = example1();
    params.has_omega = true;
    let (s, d) = create(GsdFamily::Triangular, &params);
    assert_eq!(s, GsdStatus::InvalidArgument);
    assert!(d.is_null());
    assert!(last_error().contains("omega"));

    let mut params = example1();
    params.alpha = 2.0;
    assert_eq!(create(GsdFamily::HaybittlePeto, &params).0, GsdStatus::InvalidArgument);
    assert!(last_error().contains("alpha"));

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { gsd_design_create(42, &example1(), &mut d) }, GsdStatus::InvalidArgument);
    assert!(last_error().contains("42"));
    assert_eq!(unsafe { gsd_design_create(0, ptr::null(), &mut d) }, GsdStatus::NullPointer);

    let mut n = 0.0;
    assert_eq!(unsafe { gsd_design_max_n(ptr::null(), &mut n) }, GsdStatus::NullPointer);

    let (s, d) = create(GsdFamily::DoubleTriangular, &example1());
    assert_eq!(s, GsdStatus::Ok);
    let mut short = [0.0; 1];
    let status = unsafe { gsd_design_boundaries(d, short.as_mut_ptr(), short.as_mut_ptr(), 1) };
    assert_eq!(status, GsdStatus::BufferTooSmall);
    assert_eq!(unsafe { gsd_design_max_n(d, ptr::null_mut()) }, GsdStatus::NullPointer);

    let bad = CString::new("{\"schema_version\": 7}").unwrap();
    let mut out = ptr::null_mut();
    assert_ne!(unsafe { gsd_design_from_json(bad.as_ptr(), &mut out) }, GsdStatus::Ok);
    assert!(out.is_null());
    unsafe {
        gsd_design_free(d);
        gsd_design_free(ptr::null_mut());
        gsd_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(gsd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gsdesign.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "gsd_design_create",
        "gsd_design_free",
        "gsd_design_boundaries",
        "gsd_design_summary",
        "gsd_design_to_json",
        "gsd_design_from_json",
        "gsd_string_free",
        "gsd_last_error_message",
        "typedef struct GsdDesign GsdDesign",
        "GSD_STATUS_BUFFER_TOO_SMALL = 4",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }

    // Compile a small C translation unit against the header when a compiler exists.
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("gsdesign-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"gsdesign.h\"\n\
         int run(void) {\n\
           GsdParams p; GsdDesign *d = 0; double lo[3], hi[3];\n\
           if (gsd_params_default(&p) != GSD_STATUS_OK) return 1;\n\
           if (gsd_design_create(GSD_FAMILY_TRIANGULAR, &p, &d) != GSD_STATUS_OK) return 2;\n\
           GsdStatus s = gsd_design_boundaries(d, lo, hi, 3);\n\
           gsd_design_free(d);\n\
           return s == GSD_STATUS_OK ? 0 : 3;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
