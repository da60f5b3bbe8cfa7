use std::ffi::CString;
use std::process::Command;
use std::ptr;

use oddaxis_ffi::*;

fn mesh(level: u32) -> *mut OddaxisMesh {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { oddaxis_mesh_new(level, &mut m) },
        OddaxisStatus::Ok
    );
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { oddaxis_last_error_message(buf.as_mut_ptr(), buf.len()) };
    buf[..n].iter().map(|&c| c as u8 as char).collect()
}

#[test]
fn mesh_handle_lifecycle() {
    let m = mesh(1);
    let count = unsafe { oddaxis_mesh_vertex_count(m) };
    assert_eq!(count, 42);
    let mut xyz = vec![0.0; 3 * count];
    assert_eq!(
        unsafe { oddaxis_mesh_vertices(m, xyz.as_mut_ptr(), xyz.len()) },
        OddaxisStatus::Ok
    );
    for v in xyz.chunks(3) {
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }
    assert_eq!(
        unsafe { oddaxis_mesh_vertices(m, xyz.as_mut_ptr(), 5) },
        OddaxisStatus::DimensionMismatch
    );
    unsafe { oddaxis_mesh_free(m) };
    unsafe { oddaxis_mesh_free(ptr::null_mut()) };
    assert_eq!(unsafe { oddaxis_mesh_vertex_count(ptr::null()) }, 0);
}

#[test]
fn bad_level_reports_message() {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { oddaxis_mesh_new(9, &mut m) },
        OddaxisStatus::InvalidInput
    );
    assert!(m.is_null());
    assert!(oddaxis_last_error_length() > 0);
    assert!(last_error().contains('9'), "{}", last_error());
}

#[test]
fn null_arguments_are_rejected() {
    assert_eq!(
        unsafe { oddaxis_mesh_new(0, ptr::null_mut()) },
        OddaxisStatus::NullPointer
    );
    assert_eq!(
        unsafe { oddaxis_radon_hurwitz(4, ptr::null_mut()) },
        OddaxisStatus::NullPointer
    );
    let mut d = 0;
    let mut r = 0.0;
    assert_eq!(
        unsafe { oddaxis_surface_degree(ptr::null(), c"identity".as_ptr(), &mut d, &mut r) },
        OddaxisStatus::NullPointer
    );
}

#[test]
fn surface_degrees() {
    let m = mesh(4);
    for (name, expected) in [
        ("identity", 1),
        ("antipodal", -1),
        ("suspension:k=3", 3),
        ("neg:suspension:k=2", -2),
    ] {
        let spec = CString::new(name).unwrap();
        let (mut d, mut r) = (0, 1.0);
        assert_eq!(
            unsafe { oddaxis_surface_degree(m, spec.as_ptr(), &mut d, &mut r) },
            OddaxisStatus::Ok
        );
        assert_eq!(d, expected, "{name}");
        assert!(r < 0.2);
    }
    let spec = CString::new("no-such-map").unwrap();
    let (mut d, mut r) = (0, 0.0);
    assert_eq!(
        unsafe { oddaxis_surface_degree(m, spec.as_ptr(), &mut d, &mut r) },
        OddaxisStatus::InvalidInput
    );

    let n = unsafe { oddaxis_mesh_vertex_count(m) };
    let mut xyz = vec![0.0; 3 * n];
    unsafe { oddaxis_mesh_vertices(m, xyz.as_mut_ptr(), xyz.len()) };
    let negated: Vec<f64> = xyz.iter().map(|x| -x).collect();
    assert_eq!(
        unsafe {
            oddaxis_surface_degree_sampled(m, negated.as_ptr(), negated.len(), &mut d, &mut r)
        },
        OddaxisStatus::Ok
    );
    assert_eq!(d, -1);
    unsafe { oddaxis_mesh_free(m) };
}

#[test]
fn winding_of_sampled_curve() {
    let m = 64;
    let values: Vec<f64> = (0..m)
        .flat_map(|k| {
            let t = -3.0 * std::f64::consts::TAU * k as f64 / m as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut w = 0;
    assert_eq!(
        unsafe { oddaxis_winding_number(values.as_ptr(), m, &mut w) },
        OddaxisStatus::Ok
    );
    assert_eq!(w, -3);
}

#[test]
fn characteristic_classes() {
    let mut bits = [9u8; 4];
    assert_eq!(
        unsafe { oddaxis_sw_class(3, 3, bits.as_mut_ptr()) },
        OddaxisStatus::Ok
    );
    assert_eq!(bits, [1, 1, 1, 1]);
    assert_eq!(
        unsafe { oddaxis_sw_class(4, 3, bits.as_mut_ptr()) },
        OddaxisStatus::Ok
    );
    assert_eq!(bits, [1, 0, 0, 0]);
    let mut rho = 0;
    assert_eq!(
        unsafe { oddaxis_radon_hurwitz(16, &mut rho) },
        OddaxisStatus::Ok
    );
    assert_eq!(rho, 9);
    assert_eq!(
        unsafe { oddaxis_radon_hurwitz(0, &mut rho) },
        OddaxisStatus::InvalidInput
    );
}

#[test]
fn spectral_entry_points() {
    let m = mesh(3);
    // diag(i, 2, 1 + i)
    let re = [0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0];
    let im = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let (mut eig, mut vr, mut vi, mut res) = ([0.0; 2], [0.0; 3], [0.0; 3], 1.0);
    let status = unsafe {
        oddaxis_complex_odd_eigen(
            m,
            3,
            re.as_ptr(),
            im.as_ptr(),
            eig.as_mut_ptr(),
            vr.as_mut_ptr(),
            vi.as_mut_ptr(),
            &mut res,
        )
    };
    assert_eq!(status, OddaxisStatus::Ok, "{}", last_error());
    assert!(res <= 1e-8);
    let known = [(0.0, 1.0), (2.0, 0.0), (1.0, 1.0)];
    assert!(
        known
            .iter()
            .any(|&(a, b)| (eig[0] - a).hypot(eig[1] - b) < 1e-8),
        "{eig:?}"
    );

    let even = [0.0; 4];
    let status = unsafe {
        oddaxis_complex_odd_eigen(
            m,
            2,
            even.as_ptr(),
            even.as_ptr(),
            eig.as_mut_ptr(),
            vr.as_mut_ptr(),
            vi.as_mut_ptr(),
            &mut res,
        )
    };
    assert_eq!(status, OddaxisStatus::InvalidInput);

    let a = [1.0, 2.0, 0.0, 0.0, 3.0, 1.0, 1.0, 0.0, 1.0];
    let (mut lambda, mut v, mut r) = (0.0, [0.0; 3], 1.0);
    assert_eq!(
        unsafe { oddaxis_real_odd_axis(3, a.as_ptr(), 0, &mut lambda, v.as_mut_ptr(), &mut r) },
        OddaxisStatus::Ok
    );
    assert!(r <= 1e-8);

    // rows (i), (-i) and anything: i and -i cancel
    let id: Vec<f64> = (0..36)
        .map(|k| if k % 7 == 0 { 1.0 } else { 0.0 })
        .collect();
    let neg: Vec<f64> = id.iter().map(|x| -x).collect();
    let other: Vec<f64> = (0..36).map(|k| (k as f64).sin()).collect();
    let (mut point, mut sigma) = ([0.0; 3], 1.0);
    let status = unsafe {
        oddaxis_singular_combination(
            m,
            6,
            id.as_ptr(),
            neg.as_ptr(),
            other.as_ptr(),
            point.as_mut_ptr(),
            &mut sigma,
        )
    };
    assert_eq!(status, OddaxisStatus::Ok);
    assert!(sigma < 1e-12);
    unsafe { oddaxis_mesh_free(m) };
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/oddaxis.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!("#include \"{header}\"\nint main(void) {{ return ODDAXIS_STATUS_OK; }}\n"),
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header failed to compile"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
