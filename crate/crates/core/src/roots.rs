//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Stopping rule for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance<T> {
    /// Absolute bracket width at which iteration stops.
    pub x_tol: T,
    /// Residual magnitude accepted as a root.
    pub f_tol: T,
    pub max_iter: usize,
}

/// Brent's method on a bracket `[a, b]` whose end values have opposite signs.
///
/// `fa` and `fb` are the already-known function values at the ends. Returns
/// the root estimate together with its residual.
pub fn brent<T, F>(mut f: F, a: T, b: T, fa: T, fb: T, tol: RootTolerance<T>) -> Result<(T, T)>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    if fa == T::zero() {
        return Ok((a, fa));
    }
    if fb == T::zero() {
        return Ok((b, fb));
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::Convergence(format!(
            "bracket [{a:e}, {b:e}] does not enclose a sign change ({fa:e}, {fb:e})"
        )));
    }
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + tol.x_tol / two;
        let xm = (c - b) / two;
        if xm.abs() <= tol1 || fb.abs() <= tol.f_tol {
            return Ok((b, fb));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b)?;
    }
    Err(Error::Convergence(format!(
        "brent exceeded {} iterations near {b:e}",
        tol.max_iter
    )))
}

/// Plain bisection on the sign of `f`; used where `f` is only reliable in sign.
pub fn bisect_sign<T, F>(mut f: F, mut lo: T, mut hi: T, x_tol: T, max_iter: usize) -> T
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let f_lo_pos = f(lo) > T::zero();
    for _ in 0..max_iter {
        if (hi - lo).abs() <= x_tol {
            break;
        }
        let mid = (lo + hi) / lit(2.0);
        if (f(mid) > T::zero()) == f_lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / lit(2.0)
}
