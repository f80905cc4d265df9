//! Dormand–Prince 5(4) integration with Hairer's continuous extension.

use crate::error::{Error, Result};
use crate::scalar::{lit, Field, Scalar};

/// Local error control for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
}

/// One accepted step and its quartic interpolant.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<T, S, const N: usize> {
    pub x0: T,
    pub h: T,
    coef: [[S; N]; 5],
}

impl<T: Scalar, S: Field<T>, const N: usize> DenseStep<T, S, N> {
    pub fn x1(&self) -> T {
        self.x0 + self.h
    }

    pub fn start(&self) -> [S; N] {
        self.coef[0]
    }

    /// State at `x` inside the step.
    pub fn eval(&self, x: T) -> [S; N] {
        let th = (x - self.x0) / self.h;
        let th1 = T::one() - th;
        let mut out = [S::zero(); N];
        for i in 0..N {
            let c = |k: usize| self.coef[k][i];
            out[i] = c(0) + (c(1) + (c(2) + (c(3) + c(4).scale(th1)).scale(th)).scale(th1)).scale(th);
        }
        out
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn axpy<T: Scalar, S: Field<T>, const N: usize>(y: &[S; N], terms: &[(T, &[S; N])]) -> [S; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] = out[i] + k[i].scale(*c);
        }
    }
    out
}

fn error_norm<T: Scalar, S: Field<T>, const N: usize>(
    err: &[S; N],
    y0: &[S; N],
    y1: &[S; N],
    ctl: &StepControl<T>,
) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        let sc = ctl.abs_tol + ctl.rel_tol * y0[i].modulus().max(y1[i].modulus());
        let e = err[i].modulus() / sc;
        acc += e * e;
    }
    (acc / lit(N as f64)).sqrt()
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// `h_hint` seeds the first step; on return it holds the last proposed step. When
/// `dense` is given, every accepted step is appended to it.
pub fn integrate<T, S, F, const N: usize>(
    mut f: F,
    x0: T,
    x1: T,
    y0: [S; N],
    ctl: &StepControl<T>,
    h_hint: &mut Option<T>,
    mut dense: Option<&mut Vec<DenseStep<T, S, N>>>,
) -> Result<[S; N]>
where
    T: Scalar,
    S: Field<T>,
    F: FnMut(T, &[S; N]) -> [S; N],
{
    let span = x1 - x0;
    if span == T::zero() {
        return Ok(y0);
    }
    let dir = span.signum();
    let len = span.abs();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = match *h_hint {
        Some(h) if h > T::zero() => h.min(len),
        _ => initial_step(&mut f, x, &y, &k1, dir, len, ctl),
    };
    let h_min = lit::<T>(64.0) * T::epsilon() * (x0.abs().max(x1.abs()) + T::one());
    let safety = lit::<T>(0.9);
    let fac_min = lit::<T>(0.2);
    let fac_max = lit::<T>(10.0);
    let mut rejected = false;
    for _ in 0..ctl.max_steps {
        let remaining = (x1 - x).abs();
        let last = h >= remaining * (T::one() - lit::<T>(1e-12));
        if last {
            h = remaining;
        }
        let hs = h * dir;
        let k2 = f(x + hs * lit(C2), &axpy(&y, &[(hs * lit(A21), &k1)]));
        let k3 = f(x + hs * lit(C3), &axpy(&y, &[(hs * lit(A31), &k1), (hs * lit(A32), &k2)]));
        let k4 = f(
            x + hs * lit(C4),
            &axpy(&y, &[(hs * lit(A41), &k1), (hs * lit(A42), &k2), (hs * lit(A43), &k3)]),
        );
        let k5 = f(
            x + hs * lit(C5),
            &axpy(
                &y,
                &[(hs * lit(A51), &k1), (hs * lit(A52), &k2), (hs * lit(A53), &k3), (hs * lit(A54), &k4)],
            ),
        );
        let k6 = f(
            x + hs,
            &axpy(
                &y,
                &[
                    (hs * lit(A61), &k1),
                    (hs * lit(A62), &k2),
                    (hs * lit(A63), &k3),
                    (hs * lit(A64), &k4),
                    (hs * lit(A65), &k5),
                ],
            ),
        );
        let y_new = axpy(
            &y,
            &[(hs * lit(B1), &k1), (hs * lit(B3), &k3), (hs * lit(B4), &k4), (hs * lit(B5), &k5), (hs * lit(B6), &k6)],
        );
        let x_new = if last { x1 } else { x + hs };
        let k7 = f(x_new, &y_new);
        let err = axpy(
            &[S::zero(); N],
            &[
                (hs * lit(E1), &k1),
                (hs * lit(E3), &k3),
                (hs * lit(E4), &k4),
                (hs * lit(E5), &k5),
                (hs * lit(E6), &k6),
                (hs * lit(E7), &k7),
            ],
        );
        let en = error_norm(&err, &y, &y_new, ctl);
        if !en.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if h <= h_min {
                return Err(Error::Integration {
                    at: x.to_f64().unwrap(),
                    reason: "non-finite state".into(),
                });
            }
            h *= fac_min;
            rejected = true;
            continue;
        }
        if en <= T::one() {
            if let Some(store) = dense.as_deref_mut() {
                let mut coef = [[S::zero(); N]; 5];
                for i in 0..N {
                    let c1 = y_new[i] - y[i];
                    let c2 = k1[i].scale(hs) - c1;
                    let c3 = c1 - k7[i].scale(hs) - c2;
                    let c4 = (k1[i].scale(lit(D1))
                        + k3[i].scale(lit(D3))
                        + k4[i].scale(lit(D4))
                        + k5[i].scale(lit(D5))
                        + k6[i].scale(lit(D6))
                        + k7[i].scale(lit(D7)))
                    .scale(hs);
                    coef[0][i] = y[i];
                    coef[1][i] = c1;
                    coef[2][i] = c2;
                    coef[3][i] = c3;
                    coef[4][i] = c4;
                }
                store.push(DenseStep { x0: x, h: hs, coef });
            }
            let mut fac = safety * en.max(lit(1e-10)).powf(lit(-0.2));
            fac = fac.min(if rejected { T::one() } else { fac_max }).max(fac_min);
            let h_next = h * fac;
            x = x_new;
            y = y_new;
            k1 = k7;
            rejected = false;
            if last {
                *h_hint = Some(h_next);
                return Ok(y);
            }
            h = h_next;
        } else {
            let fac = (safety * en.powf(lit(-0.2))).max(fac_min);
            h *= fac;
            rejected = true;
            if h < h_min {
                return Err(Error::Integration {
                    at: x.to_f64().unwrap(),
                    reason: format!("step size underflow ({h:e})"),
                });
            }
        }
    }
    Err(Error::Integration {
        at: x.to_f64().unwrap(),
        reason: format!("exceeded {} steps", ctl.max_steps),
    })
}

fn initial_step<T, S, F, const N: usize>(
    f: &mut F,
    x: T,
    y: &[S; N],
    k1: &[S; N],
    dir: T,
    len: T,
    ctl: &StepControl<T>,
) -> T
where
    T: Scalar,
    S: Field<T>,
    F: FnMut(T, &[S; N]) -> [S; N],
{
    let norm = |v: &[S; N]| {
        let mut acc = T::zero();
        for i in 0..N {
            let sc = ctl.abs_tol + ctl.rel_tol * y[i].modulus();
            acc += (v[i].modulus() / sc).powi(2);
        }
        (acc / lit(N as f64)).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(k1);
    let small = lit::<T>(1e-5);
    let mut h0 = if d0 < small || d1 < small {
        lit(1e-6)
    } else {
        lit::<T>(0.01) * d0 / d1
    };
    h0 = h0.min(len);
    let y1 = axpy(y, &[(h0 * dir, k1)]);
    let k2 = f(x + h0 * dir, &y1);
    let mut diff = [S::zero(); N];
    for i in 0..N {
        diff[i] = k2[i] - k1[i];
    }
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= lit(1e-15) {
        (h0 * lit(1e-3)).max(lit(1e-6))
    } else {
        (lit::<T>(0.01) / dm).powf(lit(0.2))
    };
    (h0 * lit(100.0)).min(h1).min(len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ctl() -> StepControl<f64> {
        StepControl { rel_tol: 1e-11, abs_tol: 1e-13, max_steps: 100_000 }
    }

    #[test]
    fn harmonic_oscillator() {
        let mut hint = None;
        let mut dense = Vec::new();
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            std::f64::consts::PI,
            [0.0, 1.0],
            &ctl(),
            &mut hint,
            Some(&mut dense),
        )
        .unwrap();
        assert!(y[0].abs() < 1e-9 && (y[1] + 1.0).abs() < 1e-9);
        for step in &dense {
            let xm = step.x0 + 0.37 * step.h;
            let v = step.eval(xm);
            assert!((v[0] - xm.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn backward_and_complex() {
        let mut hint = None;
        let y = integrate(
            |_, y: &[Complex64; 1]| [y[0] * Complex64::new(0.0, 1.0)],
            1.0,
            0.0,
            [Complex64::new(1.0, 0.0)],
            &ctl(),
            &mut hint,
            None,
        )
        .unwrap();
        let expect = Complex64::new(0.0, -1.0).exp();
        assert!((y[0] - expect).norm() < 1e-9);
    }
}
