//! C ABI over the `oddaxis` core. Every entry point returns an
//! [`OddaxisStatus`]; on failure the message is kept per thread and can be
//! read with [`oddaxis_last_error_message`]. Meshes are opaque handles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use oddaxis::charclass::{radon_hurwitz, total_sw_class};
use oddaxis::degree::{
    brouwer_degree, winding_number, CircleMap, SampledCircleMap, SampledSurfaceMap, SurfaceMap,
};
use oddaxis::numerics::{Complex, ComplexMatrix, RealMatrix};
use oddaxis::spectra::{
    complex_odd_eigen, real_odd_axis, singular_combination_search, AxisOptions,
};
use oddaxis::sphere::{icosphere, SphereMesh};
use oddaxis::Error;

/// Result codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OddaxisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    SearchFailure = 4,
    NonConvergentDegree = 5,
    DegenerateMap = 6,
    Panic = 7,
}

/// Icosphere mesh handle.
pub struct OddaxisMesh {
    mesh: SphereMesh,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> OddaxisStatus {
    match err {
        Error::Input(_) | Error::Parameter(_) => OddaxisStatus::InvalidInput,
        Error::Dimension(_) => OddaxisStatus::DimensionMismatch,
        Error::SearchFailure { .. } | Error::NoNullVector { .. } => OddaxisStatus::SearchFailure,
        Error::NonConvergentDegree { .. }
        | Error::Undersampled { .. }
        | Error::IrregularValue { .. } => OddaxisStatus::NonConvergentDegree,
        Error::DegenerateMap { .. } => OddaxisStatus::DegenerateMap,
    }
}

struct Null;

impl From<Null> for Failure {
    fn from(_: Null) -> Self {
        Failure::Null
    }
}

enum Failure {
    Null,
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard<F>(f: F) -> OddaxisStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            OddaxisStatus::Ok
        }
        Ok(Err(Failure::Null)) => {
            set_error("null pointer argument".into());
            OddaxisStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            OddaxisStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Null> {
    if ptr.is_null() {
        return Err(Null);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize) -> Result<&'a mut [T], Null> {
    if ptr.is_null() {
        return Err(Null);
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn out<'a, T>(ptr: *mut T) -> Result<&'a mut T, Null> {
    ptr.as_mut().ok_or(Null)
}

unsafe fn mesh_ref<'a>(mesh: *const OddaxisMesh) -> Result<&'a SphereMesh, Null> {
    mesh.as_ref().map(|m| &m.mesh).ok_or(Null)
}

fn real_matrix(n: usize, data: &[f64]) -> Result<RealMatrix, Error> {
    RealMatrix::new(n, n, data.to_vec())
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL. Zero after a successful call.
#[no_mangle]
pub extern "C" fn oddaxis_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` as a NUL-terminated string,
/// truncating to `len - 1` bytes. Returns the number of bytes written
/// before the NUL.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(len - 1);
        std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
        n
    })
}

/// Builds an icosphere of the given subdivision level (0 to 8).
///
/// # Safety
/// `out_mesh` must be a valid pointer; on success it receives a handle that
/// must be released with [`oddaxis_mesh_free`].
#[no_mangle]
pub unsafe extern "C" fn oddaxis_mesh_new(
    level: u32,
    out_mesh: *mut *mut OddaxisMesh,
) -> OddaxisStatus {
    guard(|| {
        let slot = out(out_mesh)?;
        let mesh = icosphere(level)?;
        *slot = Box::into_raw(Box::new(OddaxisMesh { mesh }));
        Ok(())
    })
}

/// Releases a mesh. Null is ignored.
///
/// # Safety
/// `mesh` must come from [`oddaxis_mesh_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_mesh_free(mesh: *mut OddaxisMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of mesh vertices, or 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_mesh_vertex_count(mesh: *const OddaxisMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.vertices().len())
}

/// Copies vertex coordinates as `x, y, z` triples into `out_xyz` (length
/// `3 * vertex_count`).
///
/// # Safety
/// `mesh` must be a live handle and `out_xyz` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_mesh_vertices(
    mesh: *const OddaxisMesh,
    out_xyz: *mut f64,
    len: usize,
) -> OddaxisStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let need = 3 * mesh.vertices().len();
        if len != need {
            return Err(
                Error::Dimension(format!("buffer holds {len} doubles, need {need}")).into(),
            );
        }
        let dst = slice_mut(out_xyz, len)?;
        for (chunk, v) in dst.chunks_exact_mut(3).zip(mesh.vertices()) {
            chunk.copy_from_slice(v);
        }
        Ok(())
    })
}

/// Brouwer degree of a builtin map named by `spec` (for example
/// `"suspension:k=3"`), integrated over `mesh`.
///
/// # Safety
/// `mesh` must be a live handle, `spec` a NUL-terminated string, and the
/// outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_surface_degree(
    mesh: *const OddaxisMesh,
    spec: *const c_char,
    out_degree: *mut i64,
    out_residual: *mut f64,
) -> OddaxisStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        if spec.is_null() {
            return Err(Failure::Null);
        }
        let spec = CStr::from_ptr(spec)
            .to_str()
            .map_err(|e| Error::Input(format!("map name: {e}")))?;
        let report = brouwer_degree(&SurfaceMap::parse(spec)?, mesh)?;
        *out(out_degree)? = report.rounded;
        *out(out_residual)? = report.residual;
        Ok(())
    })
}

/// Brouwer degree of a map given by its values at the vertices of `mesh`
/// (`3 * vertex_count` doubles, in vertex order).
///
/// # Safety
/// `values` must hold `len` doubles; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_surface_degree_sampled(
    mesh: *const OddaxisMesh,
    values: *const f64,
    len: usize,
    out_degree: *mut i64,
    out_residual: *mut f64,
) -> OddaxisStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let values = slice(values, len)?;
        if !len.is_multiple_of(3) {
            return Err(Error::Dimension(format!("{len} doubles is not a list of triples")).into());
        }
        let triples = values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        let g = SurfaceMap::Sampled(Arc::new(SampledSurfaceMap::new(mesh.level(), triples)?));
        let report = brouwer_degree(&g, mesh)?;
        *out(out_degree)? = report.rounded;
        *out(out_residual)? = report.residual;
        Ok(())
    })
}

/// Winding number of a closed S¹ curve sampled at `m` equispaced angles
/// (`2 * m` doubles, `x, y` pairs).
///
/// # Safety
/// `values` must hold `2 * m` doubles and `out_winding` must be valid.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_winding_number(
    values: *const f64,
    m: usize,
    out_winding: *mut i64,
) -> OddaxisStatus {
    guard(|| {
        let values = slice(values, 2 * m)?;
        let pairs = values.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let f = CircleMap::Sampled(Arc::new(SampledCircleMap::new(pairs)?));
        *out(out_winding)? = winding_number(&f, m)?.rounded;
        Ok(())
    })
}

/// Coefficients of `(1 + a)^k` in `Z2[a]/(a^(n+1))`, written as 0/1 bytes
/// to `out_bits[0..=n]`.
///
/// # Safety
/// `out_bits` must hold `n + 1` bytes.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_sw_class(k: u64, n: usize, out_bits: *mut u8) -> OddaxisStatus {
    guard(|| {
        let class = total_sw_class(k, 0, n)?;
        let dst = slice_mut(out_bits, n + 1)?;
        for (i, slot) in dst.iter_mut().enumerate() {
            *slot = u8::from(class.coeff(i));
        }
        Ok(())
    })
}

/// Radon–Hurwitz number of `n >= 1`.
///
/// # Safety
/// `out_rho` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_radon_hurwitz(n: u64, out_rho: *mut u64) -> OddaxisStatus {
    guard(|| {
        *out(out_rho)? = radon_hurwitz(n)?.0;
        Ok(())
    })
}

/// Unit `(s1, s2, s3)` minimizing the smallest singular value of
/// `s1 A1 + s2 A2 + s3 A3` for row-major `q x q` matrices.
///
/// # Safety
/// Each matrix must hold `q * q` doubles; `out_point` must hold 3.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_singular_combination(
    mesh: *const OddaxisMesh,
    q: usize,
    a1: *const f64,
    a2: *const f64,
    a3: *const f64,
    out_point: *mut f64,
    out_sigma_min: *mut f64,
) -> OddaxisStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let m1 = real_matrix(q, slice(a1, q * q)?)?;
        let m2 = real_matrix(q, slice(a2, q * q)?)?;
        let m3 = real_matrix(q, slice(a3, q * q)?)?;
        let found = singular_combination_search(&m1, &m2, &m3, mesh)?.minimum;
        slice_mut(out_point, 3)?.copy_from_slice(&found.point);
        *out(out_sigma_min)? = found.sigma_min;
        Ok(())
    })
}

/// Eigenpair of an odd-size complex matrix given as separate row-major real
/// and imaginary parts. The eigenvector is unit length with its largest
/// entry real and positive.
///
/// # Safety
/// `re` and `im` must hold `n * n` doubles, `vec_re` and `vec_im` `n`, and
/// `out_eigenvalue` 2 (real and imaginary part); `out_residual` must be valid.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_complex_odd_eigen(
    mesh: *const OddaxisMesh,
    n: usize,
    re: *const f64,
    im: *const f64,
    out_eigenvalue: *mut f64,
    vec_re: *mut f64,
    vec_im: *mut f64,
    out_residual: *mut f64,
) -> OddaxisStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let (re, im) = (slice(re, n * n)?, slice(im, n * n)?);
        let t = ComplexMatrix::new(
            n,
            re.iter()
                .zip(im)
                .map(|(&a, &b)| Complex::new(a, b))
                .collect(),
        )?;
        let cert = complex_odd_eigen(&t, mesh)?;
        let eig = slice_mut(out_eigenvalue, 2)?;
        eig[0] = cert.eigenvalue.re;
        eig[1] = cert.eigenvalue.im;
        let (vr, vi) = (slice_mut(vec_re, n)?, slice_mut(vec_im, n)?);
        for (i, z) in cert.eigenvector.iter().enumerate() {
            vr[i] = z.re;
            vi[i] = z.im;
        }
        *out(out_residual)? = cert.residual;
        Ok(())
    })
}

/// Real eigenpair of an odd-size real matrix (row-major). `seed` fixes the
/// random starts of the search.
///
/// # Safety
/// `t` must hold `n * n` doubles and `out_vector` `n`; the scalar outputs
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn oddaxis_real_odd_axis(
    n: usize,
    t: *const f64,
    seed: u64,
    out_eigenvalue: *mut f64,
    out_vector: *mut f64,
    out_residual: *mut f64,
) -> OddaxisStatus {
    guard(|| {
        let t = real_matrix(n, slice(t, n * n)?)?;
        let report = real_odd_axis(
            &t,
            AxisOptions {
                seed,
                ..AxisOptions::default()
            },
        )?;
        *out(out_eigenvalue)? = report.eigenvalue;
        slice_mut(out_vector, n)?.copy_from_slice(&report.vector);
        *out(out_residual)? = report.residual;
        Ok(())
    })
}
