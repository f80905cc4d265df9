use crate::boundary::{BoundaryCondition, BoundaryKind};
use crate::coeffs::{CoefficientSet, PiecewiseFn};
use crate::eigenfunctions::{reconstruct, Eigenfunction};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::quasi_ode::SolverOptions;
use crate::scalar::{lit, Scalar};
use crate::spectrum::{eigenvalues, EigenRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Quantity with respect to which `λₙ` is differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    InvP,
    Q,
    R,
    S,
    Alpha,
    Beta,
}

impl Target {
    pub const ALL: [Target; 6] = [Target::InvP, Target::Q, Target::R, Target::S, Target::Alpha, Target::Beta];

    pub fn name(&self) -> &'static str {
        match self {
            Target::InvP => "inv_p",
            Target::Q => "q",
            Target::R => "r",
            Target::S => "s",
            Target::Alpha => "alpha",
            Target::Beta => "beta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Target::ALL.into_iter().find(|t| t.name() == s)
    }

    fn is_angle(&self) -> bool {
        matches!(self, Target::Alpha | Target::Beta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Direction<T> {
    Function(PiecewiseFn<T>),
    Scalar(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCheck<T> {
    pub target: Target,
    pub direction: Direction<T>,
    pub analytic: T,
    pub finite_diff: T,
    pub step: T,
    /// `|analytic − finite_diff| / (1 + |analytic|)`.
    pub rel_err: T,
}

impl<T: Scalar> DerivativeCheck<T> {
    pub fn passes(&self, tol: T) -> bool {
        self.rel_err <= tol
    }
}

/// Indicator of a random subinterval covering between a quarter and three quarters of
/// the domain.
pub fn default_direction<T: Scalar>(coeffs: &CoefficientSet<T>, seed: u64) -> Result<PiecewiseFn<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = coeffs.interval();
    let len: f64 = rng.gen_range(0.25..0.75);
    let start: f64 = rng.gen_range(0.0..(1.0 - len));
    let lo = a + (b - a) * lit(start);
    let hi = a + (b - a) * lit(start + len);
    PiecewiseFn::indicator(a, b, lo, hi)
}

fn weighted_integral<T: Scalar>(ef: &Eigenfunction<T>, h: &PiecewiseFn<T>, f: impl Fn([num_complex::Complex<T>; 2]) -> T) -> T {
    let mut mesh = ef.mesh();
    mesh.extend_from_slice(h.breakpoints());
    mesh.sort_by(|x, y| x.partial_cmp(y).unwrap());
    mesh.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (T::one() + x.abs()));
    let rule = GaussRule::<T>::new(5);
    let mut acc = T::zero();
    for w in mesh.windows(2) {
        for (x, wt) in rule.points(w[0], w[1]) {
            acc += f(ef.eval(x)) * h.eval(x) * wt;
        }
    }
    acc
}

fn perturbed_lambda<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n: usize,
    target: Target,
    direction: &Direction<T>,
    eps: T,
    opts: &SolverOptions<T>,
) -> Result<T> {
    let lam = |c: &CoefficientSet<T>, b: &BoundaryCondition<T>| -> Result<T> {
        let recs = eigenvalues(c, b, n, opts)?;
        Ok(recs[n].lambda)
    };
    match (target, direction) {
        (Target::Alpha | Target::Beta, Direction::Scalar(d)) => {
            let (alpha, beta) = bc.angles().ok_or_else(|| Error::Precondition("angle targets need separated conditions".into()))?;
            let (a2, b2) = if target == Target::Alpha { (alpha + eps * *d, beta) } else { (alpha, beta + eps * *d) };
            lam(coeffs, &BoundaryCondition::separated(a2, b2)?)
        }
        (_, Direction::Function(h)) => {
            let dh = h.scale(eps);
            let c = match target {
                Target::InvP => coeffs.with_inv_p(coeffs.inv_p().add(&dh)?),
                Target::Q => coeffs.with_q(coeffs.q().add(&dh)?),
                Target::R => coeffs.with_r(coeffs.r().add(&dh)?),
                _ => coeffs.with_s(coeffs.s().add(&dh)?),
            }
            .map_err(|e| Error::Precondition(format!("perturbed coefficients invalid: {e}")))?;
            lam(&c, bc)
        }
        _ => Err(Error::Precondition(format!("direction type does not match target {}", target.name()))),
    }
}

/// Second-order difference quotient: central where possible, one-sided when the angle
/// would leave `[0, π)` for `α` or `(0, π]` for `β` (where `λₙ` jumps).
fn difference<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n: usize,
    target: Target,
    direction: &Direction<T>,
    eps: T,
    opts: &SolverOptions<T>,
) -> Result<T> {
    let at = |e: T| perturbed_lambda(coeffs, bc, n, target, direction, e, opts);
    let two = lit::<T>(2.0);
    let side = match (target, direction, bc.angles()) {
        (Target::Alpha, Direction::Scalar(d), Some((alpha, _))) => {
            let (lo, hi) = (alpha - eps * d.abs(), alpha + eps * d.abs());
            if lo < T::zero() {
                d.signum()
            } else if hi >= T::PI() {
                -d.signum()
            } else {
                T::zero()
            }
        }
        (Target::Beta, Direction::Scalar(d), Some((_, beta))) => {
            let (lo, hi) = (beta - eps * d.abs(), beta + eps * d.abs());
            if lo <= T::zero() {
                d.signum()
            } else if hi > T::PI() {
                -d.signum()
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    };
    if side == T::zero() {
        return Ok((at(eps)? - at(-eps)?) / (two * eps));
    }
    // Steps taken only in direction `side`: (−3f(0) + 4f(h) − f(2h)) / 2h with h = side·eps.
    let h = side * eps;
    Ok((-lit::<T>(3.0) * at(T::zero())? + lit::<T>(4.0) * at(h)? - at(two * h)?) / (two * h))
}

/// Analytic derivative of `λₙ` along `direction` against a central difference with step `eps`.
pub fn frechet<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n: usize,
    target: Target,
    direction: &Direction<T>,
    eps: T,
    opts: &SolverOptions<T>,
) -> Result<DerivativeCheck<T>> {
    let recs = eigenvalues(coeffs, bc, n, opts)?;
    let rec: &EigenRecord<T> = &recs[n];
    if rec.multiplicity != 1 {
        return Err(Error::Precondition(format!("λ_{n} is not simple")));
    }
    if target.is_angle() && !matches!(bc.kind(), BoundaryKind::Separated { .. }) {
        return Err(Error::Precondition("angle targets need separated conditions".into()));
    }
    let ef = reconstruct(rec, coeffs, opts)?.swap_remove(0);
    let (a, b) = coeffs.interval();
    let analytic = match (target, direction) {
        (Target::Alpha, Direction::Scalar(d)) => {
            let [w, w1] = ef.eval(a);
            -(w1.norm_sqr() + w.norm_sqr()) * *d
        }
        (Target::Beta, Direction::Scalar(d)) => {
            let [w, w1] = ef.eval(b);
            (w1.norm_sqr() + w.norm_sqr()) * *d
        }
        (Target::InvP, Direction::Function(h)) => -weighted_integral(&ef, h, |v| v[1].norm_sqr()),
        (Target::S, Direction::Function(h)) => {
            lit::<T>(2.0) * weighted_integral(&ef, h, |v| (v[0] * v[1].conj()).re)
        }
        (Target::Q, Direction::Function(h)) => weighted_integral(&ef, h, |v| v[0].norm_sqr()),
        (Target::R, Direction::Function(h)) => -rec.lambda * weighted_integral(&ef, h, |v| v[0].norm_sqr()),
        _ => return Err(Error::Precondition(format!("direction type does not match target {}", target.name()))),
    };
    let finite_diff = difference(coeffs, bc, n, target, direction, eps, opts)?;
    let rel_err = (analytic - finite_diff).abs() / (T::one() + analytic.abs());
    Ok(DerivativeCheck { target, direction: direction.clone(), analytic, finite_diff, step: eps, rel_err })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub step: T,
    pub finite_diff: T,
    pub abs_err: T,
    /// `abs_err` of the previous (twice larger) step divided by this one.
    pub ratio: Option<T>,
}

/// Central differences at `eps, eps/2, …` (`count` steps) against the analytic value.
/// Second-order convergence shows as ratios near 4 until solver noise dominates.
pub fn frechet_convergence<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n: usize,
    target: Target,
    direction: &Direction<T>,
    eps: T,
    count: usize,
    opts: &SolverOptions<T>,
) -> Result<(T, Vec<ConvergenceRow<T>>)> {
    let first = frechet(coeffs, bc, n, target, direction, eps, opts)?;
    let analytic = first.analytic;
    let mut rows: Vec<ConvergenceRow<T>> = Vec::with_capacity(count);
    let mut step = eps;
    for k in 0..count {
        let fd = if k == 0 { first.finite_diff } else { difference(coeffs, bc, n, target, direction, step, opts)? };
        let abs_err = (fd - analytic).abs();
        let ratio = rows.last().map(|r| r.abs_err / abs_err);
        rows.push(ConvergenceRow { step, finite_diff: fd, abs_err, ratio });
        step /= lit(2.0);
    }
    Ok((analytic, rows))
}
