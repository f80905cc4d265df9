//! Integration of the quasi-derivative system
//!
//! ```text
//! y'   = y1 / p − s y
//! y1'  = (q − λ r) y + s y1
//! ```
//!
//! and of the Prüfer angle equation, walking the coefficient cell mesh so that no step
//! straddles a breakpoint. Interfaces shear the state `(y, y1) ↦ (y, y1 + α y)` when
//! crossed from left to right.

use crate::coeffs::{Cell, CoefficientSet};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::ode::{integrate, DenseStep, StepControl};
use crate::scalar::{lit, Field, Scalar};

/// Tolerances and search limits shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Half-width of the initial eigenvalue search window.
    pub lambda_scan: T,
    /// Bracket expansion gives up beyond `±lambda_limit`.
    pub lambda_limit: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: lit(1e-10),
            abs_tol: lit(1e-12),
            lambda_scan: lit(1e4),
            lambda_limit: lit(1e10),
            max_steps: 5_000_000,
        }
    }
}

impl<T: Scalar> SolverOptions<T> {
    fn control(&self) -> StepControl<T> {
        StepControl { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_steps: self.max_steps }
    }
}

/// Dense output of a cell-by-cell integration, ordered by increasing `x`.
#[derive(Debug, Clone)]
pub struct Trajectory<T, S, const N: usize> {
    steps: Vec<DenseStep<T, S, N>>,
}

impl<T: Scalar, S: Field<T>, const N: usize> Trajectory<T, S, N> {
    fn lo(step: &DenseStep<T, S, N>) -> T {
        step.x0.min(step.x1())
    }

    pub fn steps(&self) -> &[DenseStep<T, S, N>] {
        &self.steps
    }

    /// Step endpoints in increasing order (including both ends of the covered range).
    pub fn mesh(&self) -> Vec<T> {
        let mut m: Vec<T> = self.steps.iter().map(Self::lo).collect();
        if let Some(last) = self.steps.last() {
            m.push(last.x0.max(last.x1()));
        }
        m
    }

    /// State at `x`; right limit at interfaces.
    pub fn eval(&self, x: T) -> [S; N] {
        let k = self.steps.partition_point(|s| Self::lo(s) <= x);
        let i = k.clamp(1, self.steps.len()) - 1;
        self.steps[i].eval(x)
    }
}

/// Walks the cells between `from` and `to`, calling `jump(strength, state)` at each
/// interior interface crossed (the strength is negated when moving leftwards).
#[allow(clippy::too_many_arguments)]
fn walk<T, S, const N: usize>(
    coeffs: &CoefficientSet<T>,
    from: T,
    to: T,
    y0: [S; N],
    opts: &SolverOptions<T>,
    rhs: impl Fn(&Cell<T>, T, &[S; N]) -> [S; N],
    jump: impl Fn(T, [S; N]) -> [S; N],
    mut dense: Option<&mut Vec<DenseStep<T, S, N>>>,
) -> Result<[S; N]>
where
    T: Scalar,
    S: Field<T>,
{
    let (a, b) = coeffs.interval();
    if !(from >= a && from <= b && to >= a && to <= b) {
        return Err(Error::Domain(format!(
            "integration range [{from:e}, {to:e}] outside [{a:e}, {b:e}]"
        )));
    }
    let cells = coeffs.cells();
    let ctl = opts.control();
    let mut y = y0;
    let mut hint = None;
    if to >= from {
        let mut i = coeffs.cell_index(from);
        loop {
            let c = &cells[i];
            let lo = c.x0.max(from);
            let hi = c.x1.min(to);
            if hi > lo {
                y = integrate(|x, v| rhs(c, x, v), lo, hi, y, &ctl, &mut hint, dense.as_deref_mut())?;
            }
            if c.x1 >= to || i + 1 == cells.len() {
                break;
            }
            if c.jump_at_end != T::zero() {
                y = jump(c.jump_at_end, y);
            }
            i += 1;
        }
    } else {
        let mut i = cells.partition_point(|c| c.x0 < from).max(1) - 1;
        let start = dense.as_ref().map_or(0, |d| d.len());
        loop {
            let c = &cells[i];
            let hi = c.x1.min(from);
            let lo = c.x0.max(to);
            if hi > lo {
                y = integrate(|x, v| rhs(c, x, v), hi, lo, y, &ctl, &mut hint, dense.as_deref_mut())?;
            }
            if c.x0 <= to || i == 0 {
                break;
            }
            let s = cells[i - 1].jump_at_end;
            if s != T::zero() {
                y = jump(-s, y);
            }
            i -= 1;
        }
        if let Some(d) = dense {
            d[start..].reverse();
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration { at: to.to_f64().unwrap(), reason: "non-finite state".into() });
    }
    Ok(y)
}

#[inline]
fn sys<T: Scalar, S: Field<T>>(c: &Cell<T>, lambda: S, x: T, y: S, y1: S) -> (S, S) {
    let v = c.values(x);
    (
        y1.scale(v.inv_p) - y.scale(v.s),
        y.scale(v.q) - lambda * y.scale(v.r) + y1.scale(v.s),
    )
}

/// Solution of the quasi-derivative system from one point to another.
#[derive(Debug, Clone)]
pub struct SystemSolution<T, S> {
    pub lambda: S,
    pub end: [S; 2],
    pub trajectory: Trajectory<T, S, 2>,
}

/// Integrates the system from `initial = (y, y1)` at `from` to `to`, with dense output.
pub fn integrate_system<T: Scalar, S: Field<T>>(
    coeffs: &CoefficientSet<T>,
    lambda: S,
    initial: [S; 2],
    from: T,
    to: T,
    opts: &SolverOptions<T>,
) -> Result<SystemSolution<T, S>> {
    let mut steps = Vec::new();
    let end = walk(
        coeffs,
        from,
        to,
        initial,
        opts,
        |c, x, v| {
            let (d0, d1) = sys(c, lambda, x, v[0], v[1]);
            [d0, d1]
        },
        |s, v| [v[0], v[1] + v[0].scale(s)],
        Some(&mut steps),
    )?;
    Ok(SystemSolution { lambda, end, trajectory: Trajectory { steps } })
}

fn phi_rhs<T: Scalar, S: Field<T>>(c: &Cell<T>, lambda: S, x: T, v: &[S; 4]) -> [S; 4] {
    let (a0, a1) = sys(c, lambda, x, v[0], v[1]);
    let (b0, b1) = sys(c, lambda, x, v[2], v[3]);
    [a0, a1, b0, b1]
}

fn phi_jump<T: Scalar, S: Field<T>, const N: usize>(s: T, mut v: [S; N]) -> [S; N] {
    v[1] = v[1] + v[0].scale(s);
    v[3] = v[3] + v[2].scale(s);
    v
}

const PHI0_4: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

fn phi_initial<T: Scalar, S: Field<T>, const N: usize>() -> [S; N] {
    let mut v = [S::zero(); N];
    for (i, c) in PHI0_4.iter().enumerate() {
        v[i] = S::from(lit(*c));
    }
    v
}

fn to_mat<T: Scalar, S: Field<T>>(v: &[S]) -> Mat2<S> {
    Mat2::from_rows([[v[0], v[2]], [v[1], v[3]]])
}

/// `Φ(x, λ)` with `Φ(a, λ) = I`: columns `(φ₁, φ₁^[1])` and `(φ₂, φ₂^[1])`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix<T, S> {
    pub lambda: S,
    pub at_b: Mat2<S>,
    pub trajectory: Trajectory<T, S, 4>,
}

impl<T: Scalar, S: Field<T>> FundamentalMatrix<T, S> {
    pub fn at(&self, x: T) -> Mat2<S> {
        to_mat(&self.trajectory.eval(x))
    }
}

/// Fundamental matrix with its dense trajectory.
pub fn fundamental_matrix<T: Scalar, S: Field<T>>(
    coeffs: &CoefficientSet<T>,
    lambda: S,
    opts: &SolverOptions<T>,
) -> Result<FundamentalMatrix<T, S>> {
    let (a, b) = coeffs.interval();
    let mut steps = Vec::new();
    let end = walk(
        coeffs,
        a,
        b,
        phi_initial::<T, S, 4>(),
        opts,
        |c, x, v| phi_rhs(c, lambda, x, v),
        phi_jump,
        Some(&mut steps),
    )?;
    Ok(FundamentalMatrix { lambda, at_b: to_mat(&end), trajectory: Trajectory { steps } })
}

/// `Φ(b, λ)` only, without storing the trajectory.
pub fn fundamental_end<T: Scalar, S: Field<T>>(
    coeffs: &CoefficientSet<T>,
    lambda: S,
    opts: &SolverOptions<T>,
) -> Result<Mat2<S>> {
    let (a, b) = coeffs.interval();
    let end = walk(
        coeffs,
        a,
        b,
        phi_initial::<T, S, 4>(),
        opts,
        |c, x, v| phi_rhs(c, lambda, x, v),
        phi_jump,
        None,
    )?;
    Ok(to_mat(&end))
}

/// `Φ(b, λ)` together with the weighted Gram integrals `∫ r φᵢ φⱼ` over `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub struct GramEnd<S> {
    pub at_b: Mat2<S>,
    /// `[∫ r φ₁², ∫ r φ₁ φ₂, ∫ r φ₂²]` (no conjugation).
    pub gram: [S; 3],
}

pub fn fundamental_with_gram<T: Scalar, S: Field<T>>(
    coeffs: &CoefficientSet<T>,
    lambda: S,
    opts: &SolverOptions<T>,
) -> Result<GramEnd<S>> {
    let (a, b) = coeffs.interval();
    let end = walk(
        coeffs,
        a,
        b,
        phi_initial::<T, S, 7>(),
        opts,
        |c, x, v| {
            let (a0, a1) = sys(c, lambda, x, v[0], v[1]);
            let (b0, b1) = sys(c, lambda, x, v[2], v[3]);
            let r = c.r.eval(x - c.x0);
            [a0, a1, b0, b1, (v[0] * v[0]).scale(r), (v[0] * v[2]).scale(r), (v[2] * v[2]).scale(r)]
        },
        phi_jump,
        None,
    )?;
    Ok(GramEnd { at_b: to_mat(&end), gram: [end[4], end[5], end[6]] })
}

#[inline]
fn pruefer_rhs<T: Scalar>(c: &Cell<T>, lambda: T, x: T, th: T) -> T {
    let v = c.values(x);
    let (sn, cs) = th.sin_cos();
    v.inv_p * cs * cs - v.s * lit::<T>(2.0) * sn * cs + (lambda * v.r - v.q) * sn * sn
}

/// Applies the interface shear to an unwrapped Prüfer angle, keeping its multiple of π.
pub fn pruefer_jump<T: Scalar>(strength: T, th: T) -> T {
    let k = (th / T::PI()).floor();
    let phi = th - k * T::PI();
    let (sn, cs) = phi.sin_cos();
    k * T::PI() + sn.atan2(cs + strength * sn)
}

fn pruefer_control<T: Scalar>(opts: &SolverOptions<T>) -> SolverOptions<T> {
    // The angle grows like nπ; control its absolute error instead of a relative one.
    SolverOptions { abs_tol: opts.rel_tol * lit(1e-1), rel_tol: T::zero(), ..*opts }
}

/// Unwrapped Prüfer angle `θ(x, λ)` with dense output.
#[derive(Debug, Clone)]
pub struct PrueferPath<T> {
    pub alpha0: T,
    pub lambda: T,
    pub theta_b: T,
    pub trajectory: Trajectory<T, T, 1>,
}

impl<T: Scalar> PrueferPath<T> {
    pub fn theta(&self, x: T) -> T {
        self.trajectory.eval(x)[0]
    }
}

pub fn integrate_pruefer<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    lambda: T,
    alpha0: T,
    opts: &SolverOptions<T>,
) -> Result<PrueferPath<T>> {
    if !(alpha0 >= T::zero() && alpha0 < T::PI()) {
        return Err(Error::Domain(format!("initial angle {alpha0:e} outside [0, π)")));
    }
    let (a, b) = coeffs.interval();
    let mut steps = Vec::new();
    let end = walk(
        coeffs,
        a,
        b,
        [alpha0],
        &pruefer_control(opts),
        |c, x, v| [pruefer_rhs(c, lambda, x, v[0])],
        |s, v| [pruefer_jump(s, v[0])],
        Some(&mut steps),
    )?;
    Ok(PrueferPath { alpha0, lambda, theta_b: end[0], trajectory: Trajectory { steps } })
}

/// `θ(b, λ)` only.
pub fn pruefer_end<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    lambda: T,
    alpha0: T,
    opts: &SolverOptions<T>,
) -> Result<T> {
    let (a, b) = coeffs.interval();
    let end = walk(
        coeffs,
        a,
        b,
        [alpha0],
        &pruefer_control(opts),
        |c, x, v| [pruefer_rhs(c, lambda, x, v[0])],
        |s, v| [pruefer_jump(s, v[0])],
        None,
    )?;
    Ok(end[0])
}
