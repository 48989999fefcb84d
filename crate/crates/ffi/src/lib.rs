//! C ABI over `fm-core`.
//!
//! Every entry point returns an [`FmStatus`]; results come back through out
//! pointers. Solutions and K/L tables live behind opaque handles that the
//! caller releases with the matching `_free` function. The message for the
//! most recent failure on the calling thread is available from
//! [`fm_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fm_core::graph_pde::{graph_residual, tilted_graph_residual, GraphPoint, TiltedFrame};
use fm_core::metric::{MetricParams, PhiFamily};
use fm_core::solver::{planarity_deviation, solve_minimal_graph, Grid, GridProblem, GridSolution};
use fm_core::translation::{
    compatibility_check, kl_polys, parse_rational, translation_residual, KLPolys, TranslationPoint,
};
use fm_core::volume::{bh_factor_quadrature, VolumeFactorRequest};
use fm_core::Error;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

/// Status codes shared by every function in this library.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InvalidParameter = 3,
    Unsupported = 4,
    Degenerate = 5,
    Pole = 6,
    Argument = 7,
    Numerical = 8,
    Panic = 9,
    BufferTooSmall = 10,
}

/// Metric family selector for [`fm_volume_factor`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmFamily {
    Matsumoto = 0,
    Randers = 1,
    Euclidean = 2,
}

/// First and second derivatives of a graph z = f(x, y) at one point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FmGraphPoint {
    pub f1: f64,
    pub f2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

/// Opaque solver result.
pub struct FmGridSolution(GridSolution);

/// Opaque exact K(p), L(p) pair for one value of b².
pub struct FmKlPolys(KLPolys);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> FmStatus {
    match e {
        Error::Domain(_) => FmStatus::Domain,
        Error::InvalidParameter(_) => FmStatus::InvalidParameter,
        Error::UnsupportedBranch(_) => FmStatus::Unsupported,
        Error::DegenerateJet { .. } | Error::DegenerateTransversal { .. } => FmStatus::Degenerate,
        Error::Pole(_) => FmStatus::Pole,
        Error::Argument(_) | Error::GridFormat(_) => FmStatus::Argument,
        _ if e.is_numerical() => FmStatus::Numerical,
        _ => FmStatus::Argument,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), FmStatus>) -> FmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FmStatus::Panic
        }
    }
}

fn fail(e: Error) -> FmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> FmStatus {
    set_error(format!("{what} is null"));
    FmStatus::NullPointer
}

/// Writes `v` through `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), FmStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn rational_from(num: i64, den: i64) -> Result<BigRational, FmStatus> {
    if den == 0 {
        return Err(fail(Error::Argument("zero denominator".into())));
    }
    Ok(BigRational::new(num.into(), den.into()))
}

/// Copies the last error message on this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn fm_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Busemann–Hausdorff volume factor of an n-dimensional subspace, by
/// adaptive quadrature.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fm_volume_factor(b: f64, family: FmFamily, n: usize, out: *mut f64) -> FmStatus {
    guard(|| {
        let family = match family {
            FmFamily::Matsumoto => PhiFamily::Matsumoto,
            FmFamily::Randers => PhiFamily::Randers,
            FmFamily::Euclidean => PhiFamily::Euclidean,
        };
        let v = MetricParams::new(b, family)
            .and_then(|p| VolumeFactorRequest::bh(p, n))
            .and_then(|r| bh_factor_quadrature(&r))
            .map_err(fail)?;
        put(out, v)
    })
}

/// Minimal-graph residual over the plane z = 0.
///
/// # Safety
/// `point` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_residual(b: f64, point: *const FmGraphPoint, out: *mut f64) -> FmStatus {
    fm_tilted_graph_residual(b, point, ptr::null(), out)
}

/// Minimal-graph residual over the plane with unit normal `k` (three
/// doubles); a null `k` means (0, 0, 1).
///
/// # Safety
/// `point` must be readable, `k` null or readable for three doubles, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fm_tilted_graph_residual(
    b: f64,
    point: *const FmGraphPoint,
    k: *const f64,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        if point.is_null() {
            return Err(null("point"));
        }
        let p = &*point;
        MetricParams::matsumoto(b).map_err(fail)?;
        let gp = GraphPoint::new(p.f1, p.f2, p.h11, p.h12, p.h22).map_err(fail)?;
        let v = if k.is_null() {
            graph_residual(&gp, b)
        } else {
            let k = [*k, *k.add(1), *k.add(2)];
            let frame = TiltedFrame::with_k(k).map_err(fail)?;
            tilted_graph_residual(&gp, &frame, b)
        };
        put(out, v)
    })
}

/// λ f″ + μ g″ for the translation surface f(x) + g(y).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fm_translation_residual(
    b: f64,
    fp: f64,
    fpp: f64,
    gp: f64,
    gpp: f64,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        MetricParams::matsumoto(b).map_err(fail)?;
        put(out, translation_residual(&TranslationPoint::new(fp, fpp, gp, gpp), b))
    })
}

/// Solves the minimal-graph Dirichlet problem on [x0,x1]×[y0,y1] with
/// `nodes` points per side, boundary included.
///
/// `values` holds `nodes * nodes` doubles in row-major order (x fastest);
/// only boundary entries are read. On success `*out` owns a new handle.
///
/// # Safety
/// `values` must be readable for `len` doubles and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn fm_solve(
    b: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nodes: usize,
    values: *const f64,
    len: usize,
    tol: f64,
    max_iter: usize,
    out: *mut *mut FmGridSolution,
) -> FmStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let interior = nodes.checked_sub(2).ok_or_else(|| fail(Error::InvalidParameter(format!("{nodes} nodes"))))?;
        let grid = Grid::new(x0, x1, y0, y1, interior, interior).map_err(fail)?;
        let data = std::slice::from_raw_parts(values, len).to_vec();
        let problem = GridProblem::with_nodal_boundary(grid, b, data).map_err(fail)?;
        let sol = solve_minimal_graph(&problem, tol, max_iter).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FmGridSolution(sol))))
    })
}

/// Number of nodal values in a solution.
///
/// # Safety
/// `sol` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_solution_len(sol: *const FmGridSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.f.len())
}

/// Copies the nodal values into `buf`.
///
/// # Safety
/// `sol` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_solution_values(sol: *const FmGridSolution, buf: *mut f64, len: usize) -> FmStatus {
    guard(|| {
        let s = sol.as_ref().ok_or_else(|| null("solution"))?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        if len < s.0.f.len() {
            set_error(format!("buffer holds {len} values, need {}", s.0.f.len()));
            return Err(FmStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(s.0.f.as_ptr(), buf, s.0.f.len());
        Ok(())
    })
}

/// Newton iterations used, final residual norm and planarity deviation.
///
/// # Safety
/// `sol` must be a live handle; each out pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_solution_stats(
    sol: *const FmGridSolution,
    iterations: *mut usize,
    residual_norm: *mut f64,
    planarity: *mut f64,
) -> FmStatus {
    guard(|| {
        let s = &sol.as_ref().ok_or_else(|| null("solution"))?.0;
        if !iterations.is_null() {
            *iterations = s.iterations;
        }
        if !residual_norm.is_null() {
            *residual_norm = s.residual_norm;
        }
        if !planarity.is_null() {
            *planarity = planarity_deviation(s);
        }
        Ok(())
    })
}

/// Releases a solution handle. Null is ignored.
///
/// # Safety
/// `sol` must come from [`fm_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fm_grid_solution_free(sol: *mut FmGridSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Exact K and L for b² = num/den.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_polys_new(b2_num: i64, b2_den: i64, out: *mut *mut FmKlPolys) -> FmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let b2 = rational_from(b2_num, b2_den)?;
        let kl = kl_polys(&b2).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FmKlPolys(kl))))
    })
}

/// Same as [`fm_kl_polys_new`] with b² given as text ("1/100", "0.09").
///
/// # Safety
/// `b2` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_polys_parse(b2: *const c_char, out: *mut *mut FmKlPolys) -> FmStatus {
    guard(|| {
        if b2.is_null() {
            return Err(null("b2"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = CStr::from_ptr(b2).to_str().map_err(|_| fail(Error::Argument("b2 is not UTF-8".into())))?;
        let kl = parse_rational(text).and_then(|b2| kl_polys(&b2)).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FmKlPolys(kl))))
    })
}

/// K(p) and L(p) in double precision.
///
/// # Safety
/// `kl` must be a live handle; `k` and `l` may be null.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_polys_eval(kl: *const FmKlPolys, p: f64, k: *mut f64, l: *mut f64) -> FmStatus {
    guard(|| {
        let kl = &kl.as_ref().ok_or_else(|| null("handle"))?.0;
        if !k.is_null() {
            *k = kl.k.eval_f64(p);
        }
        if !l.is_null() {
            *l = kl.l.eval_f64(p);
        }
        Ok(())
    })
}

/// Exact (K/L)′ at p = num/den, reported as a double plus a flag telling
/// whether it equals ±1 exactly.
///
/// # Safety
/// `kl` must be a live handle; `value` and `is_unit` may be null.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_ratio_derivative(
    kl: *const FmKlPolys,
    p_num: i64,
    p_den: i64,
    value: *mut f64,
    is_unit: *mut bool,
) -> FmStatus {
    guard(|| {
        let kl = &kl.as_ref().ok_or_else(|| null("handle"))?.0;
        let p = rational_from(p_num, p_den)?;
        let d = kl.ratio_derivative(&p).map_err(fail)?;
        if !value.is_null() {
            *value = d.to_f64().unwrap_or(f64::NAN);
        }
        if !is_unit.is_null() {
            *is_unit = d.abs().is_one();
        }
        Ok(())
    })
}

/// Whether both compatibility identities hold for this b².
///
/// # Safety
/// `kl` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_compatible(kl: *const FmKlPolys, out: *mut bool) -> FmStatus {
    guard(|| {
        let kl = &kl.as_ref().ok_or_else(|| null("handle"))?.0;
        let report = compatibility_check(&kl.b2).map_err(fail)?;
        put(out, report.both_hold)
    })
}

/// Releases a K/L handle. Null is ignored.
///
/// # Safety
/// `kl` must come from [`fm_kl_polys_new`] or [`fm_kl_polys_parse`] and not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fm_kl_polys_free(kl: *mut FmKlPolys) {
    if !kl.is_null() {
        drop(Box::from_raw(kl));
    }
}
