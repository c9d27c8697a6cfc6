use henonlab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn horseshoe() -> *mut HlMap {
    let re = [-6.0, 0.0, 1.0];
    let im = [0.0; 3];
    let mut m = ptr::null_mut();
    let s = unsafe { hl_map_new(re.as_ptr(), im.as_ptr(), 3, 0.001, 0.0, &mut m) };
    assert_eq!(s, HlStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn apply_and_inverse_round_trip() {
    let m = horseshoe();
    let z = HlPoint {
        x_re: 0.3,
        x_im: -0.1,
        y_re: 1.2,
        y_im: 0.4,
    };
    let mut w = HlPoint::default();
    let mut back = HlPoint::default();
    unsafe {
        assert_eq!(hl_map_apply(m, &z, &mut w), HlStatus::Ok);
        assert_eq!(hl_map_apply_inverse(m, &w, &mut back), HlStatus::Ok);
        let mut d = 0;
        assert_eq!(hl_map_degree(m, &mut d), HlStatus::Ok);
        assert_eq!(d, 2);
        hl_map_free(m);
    }
    for (a, b) in [(z.x_re, back.x_re), (z.x_im, back.x_im), (z.y_re, back.y_re), (z.y_im, back.y_im)] {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn invalid_inputs_report_status_and_message() {
    let re = [1.0, 2.0];
    let im = [0.0, 0.0];
    let mut m = ptr::null_mut();
    let s = unsafe { hl_map_new(re.as_ptr(), im.as_ptr(), 2, 0.5, 0.0, &mut m) };
    assert_eq!(s, HlStatus::InvalidMap);
    assert!(m.is_null());
    assert!(!last_error().is_empty());

    let s = unsafe { hl_map_degree(ptr::null(), &mut 0) };
    assert_eq!(s, HlStatus::NullPointer);
    assert!(last_error().contains("map"));

    let bad = CString::new("{\"p\": [0, 0, 1], \"b\": 0.1").unwrap();
    assert_eq!(unsafe { hl_map_from_json(bad.as_ptr(), &mut m) }, HlStatus::Parse);
    let zero = CString::new("{\"p\": [0, 0, 1], \"b\": 0}").unwrap();
    assert_eq!(unsafe { hl_map_from_json(zero.as_ptr(), &mut m) }, HlStatus::InvalidMap);
}

#[test]
fn green_is_positive_off_k_plus() {
    let m = horseshoe();
    let z = HlPoint {
        x_re: 10.0,
        ..Default::default()
    };
    let mut g = 0.0;
    unsafe {
        assert_eq!(hl_green(m, &z, 0, &mut g), HlStatus::Ok);
        hl_map_free(m);
    }
    assert!(g > 0.0);
}

#[test]
fn fixed_points_of_the_basin_map() {
    let json = CString::new("{\"p\": [0, 0, 1], \"b\": 0.05}").unwrap();
    let mut m = ptr::null_mut();
    let mut orbits = ptr::null_mut();
    unsafe {
        assert_eq!(hl_map_from_json(json.as_ptr(), &mut m), HlStatus::Ok);
        assert_eq!(hl_periodic_orbits(m, 1, 200, 0, &mut orbits), HlStatus::Ok);
        assert_eq!(hl_orbits_len(orbits), 2);
        let mut kinds = Vec::new();
        for i in 0..2 {
            let mut info = HlOrbitInfo::default();
            assert_eq!(hl_orbits_info(orbits, i, &mut info), HlStatus::Ok);
            kinds.push(info.kind);
            let mut p = HlPoint::default();
            assert_eq!(hl_orbits_point(orbits, i, 0, &mut p), HlStatus::Ok);
        }
        kinds.sort();
        assert_eq!(kinds, vec![HL_ORBIT_ATTRACTING, HL_ORBIT_SADDLE]);
        let mut info = HlOrbitInfo::default();
        assert_eq!(hl_orbits_info(orbits, 5, &mut info), HlStatus::InvalidArgument);
        hl_orbits_free(orbits);
        hl_map_free(m);
    }
}

#[test]
fn certificate_round_trip_and_recheck() {
    let m = horseshoe();
    let mut cert = ptr::null_mut();
    unsafe {
        assert_eq!(hl_verify_hyperbolicity(m, 6, 0.9, 1.5, &mut cert), HlStatus::Ok);
        let mut s = HlCertificateSummary::default();
        assert_eq!(hl_certificate_summary(cert, &mut s), HlStatus::Ok);
        assert!(s.boxes > 0);
        assert_eq!(s.verified, s.boxes);
        assert!(s.lambda_u >= 1.5);

        let mut text = ptr::null_mut();
        assert_eq!(hl_certificate_to_json(cert, &mut text), HlStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(hl_certificate_from_json(text, &mut copy), HlStatus::Ok);
        let mut bad = usize::MAX;
        assert_eq!(hl_certificate_recheck(copy, &mut bad), HlStatus::Ok);
        assert_eq!(bad, 0);

        hl_string_free(text);
        hl_certificate_free(copy);
        hl_certificate_free(cert);
        hl_map_free(m);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        hl_map_free(ptr::null_mut());
        hl_orbits_free(ptr::null_mut());
        hl_certificate_free(ptr::null_mut());
        hl_string_free(ptr::null_mut());
        assert_eq!(hl_orbits_len(ptr::null()), 0);
    }
    let v = unsafe { CStr::from_ptr(hl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
