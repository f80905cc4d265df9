//! Transmission problems: `−(py′)′ + qy = λwy` with `y` continuous and
//! `(py′)(c+) − (py′)(c−) = α·y(c)` at interior points `c`.
//!
//! Such a problem is solved two ways. [`solve_direct`] shoots through the interfaces in
//! the `(y, py′)` frame. [`solve_via_reduction`] rewrites the interface jumps as a
//! distributional potential: with `q̃ = q − Cw` and `ū = −∫ₐˣ q̃ − Σ α·1_[c,b]`, the
//! quasi-derivative `y^[1] = py′ + ūy` is continuous, and the reduced coefficients are
//! `s = ū/p`, `q = −ū²/p`. The constant `C = (∫q + Σα)/∫w` makes `ū(b) = 0`, so the
//! boundary conditions carry over unchanged and eigenvalues shift by `C`.

use crate::boundary::BoundaryCondition;
use crate::coeffs::{CoefficientSet, Interface, PiecewiseFn};
use crate::eigenfunctions::{reconstruct, Eigenfunction};
use crate::error::{Error, Result};
use crate::quasi_ode::SolverOptions;
use crate::scalar::{lit, Scalar};
use crate::spectrum::{eigenvalues, EigenRecord};

#[derive(Debug, Clone)]
pub struct TransmissionProblem<T: Scalar> {
    coeffs: CoefficientSet<T>,
    interfaces: Vec<Interface<T>>,
    bc: BoundaryCondition<T>,
}

impl<T: Scalar> TransmissionProblem<T> {
    /// `coeffs` holds `1/p`, `q` and the weight `w` (as `r`); its `s` must vanish and it
    /// must carry no interfaces of its own.
    pub fn new(coeffs: CoefficientSet<T>, interfaces: Vec<Interface<T>>, bc: BoundaryCondition<T>) -> Result<Self> {
        if !coeffs.s().is_identically_zero() {
            return Err(Error::Coefficient("transmission problems require s ≡ 0".into()));
        }
        if !coeffs.interfaces().is_empty() {
            return Err(Error::Coefficient("pass transmission interfaces separately".into()));
        }
        // Validates placement and ordering.
        coeffs.clone().with_interfaces(interfaces.clone())?;
        let mut interfaces = interfaces;
        interfaces.sort_by(|x, y| x.at.partial_cmp(&y.at).unwrap());
        Ok(Self { coeffs, interfaces, bc })
    }

    pub fn coeffs(&self) -> &CoefficientSet<T> {
        &self.coeffs
    }

    pub fn interfaces(&self) -> &[Interface<T>] {
        &self.interfaces
    }

    pub fn bc(&self) -> &BoundaryCondition<T> {
        &self.bc
    }

    /// The coefficient set with the jumps applied as interfaces of the quasi-derivative.
    pub fn direct_coeffs(&self) -> Result<CoefficientSet<T>> {
        self.coeffs.clone().with_interfaces(self.interfaces.clone())
    }

    pub fn total_strength(&self) -> T {
        self.interfaces.iter().fold(T::zero(), |acc, i| acc + i.strength)
    }
}

/// The distributional form of a transmission problem.
#[derive(Debug, Clone)]
pub struct Reduction<T: Scalar> {
    /// Eigenvalues of the original problem are those of `reduced` plus `shift`.
    pub shift: T,
    pub q_tilde: PiecewiseFn<T>,
    pub u_tilde: PiecewiseFn<T>,
    pub u_bar: PiecewiseFn<T>,
    pub reduced: CoefficientSet<T>,
}

pub fn reduce<T: Scalar>(tp: &TransmissionProblem<T>) -> Result<Reduction<T>> {
    let c = &tp.coeffs;
    let (a, b) = c.interval();
    let w = c.r();
    let shift = (c.q().integral() + tp.total_strength()) / w.integral();
    let q_tilde = c.q().sub(&w.scale(shift))?;
    let u_tilde = q_tilde.antiderivative();
    let mut u_bar = u_tilde.scale(-T::one());
    for i in &tp.interfaces {
        u_bar = u_bar.sub(&PiecewiseFn::indicator(a, b, i.at, b)?.scale(i.strength))?;
    }
    let s = u_bar.mul(c.inv_p())?;
    let q = u_bar.mul(&s)?.scale(-T::one());
    let reduced = CoefficientSet::new(c.inv_p().clone(), q, w.clone(), s)?;
    Ok(Reduction { shift, q_tilde, u_tilde, u_bar, reduced })
}

/// Eigenvalues by shooting through the interfaces.
pub fn solve_direct<T: Scalar>(
    tp: &TransmissionProblem<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<EigenRecord<T>>> {
    eigenvalues(&tp.direct_coeffs()?, &tp.bc, n_max, opts)
}

/// Eigenvalues of the reduced problem, shifted back by `C`.
pub fn solve_via_reduction<T: Scalar>(
    tp: &TransmissionProblem<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<EigenRecord<T>>> {
    let red = reduce(tp)?;
    let mut recs = eigenvalues(&red.reduced, &tp.bc, n_max, opts)?;
    for r in &mut recs {
        r.lambda += red.shift;
    }
    Ok(recs)
}

/// Comparison of one reduced-problem eigenfunction with its direct counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferCheck<T> {
    pub n: usize,
    /// `max |(py′)(c+) − (py′)(c−) − α·y(c)|` over the interfaces, relative to `max |y^[1]|`.
    pub jump_residual: T,
    /// `max |y_reduced − y_direct|` on a uniform grid (simple eigenvalues only).
    pub max_difference: Option<T>,
}

/// Maps reduced eigenfunctions back to the `(y, py′)` frame and checks the jump condition.
pub fn transfer_check<T: Scalar>(
    tp: &TransmissionProblem<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<TransferCheck<T>>> {
    let red = reduce(tp)?;
    let direct = tp.direct_coeffs()?;
    let reduced_recs = eigenvalues(&red.reduced, &tp.bc, n_max, opts)?;
    let direct_recs = eigenvalues(&direct, &tp.bc, n_max, opts)?;
    let (a, b) = tp.coeffs.interval();
    let mut out = Vec::new();
    for (rr, dr) in reduced_recs.iter().zip(&direct_recs) {
        let fr = reconstruct(rr, &red.reduced, opts)?;
        let f: &Eigenfunction<T> = &fr[0];
        let scale = f.samples(257).iter().fold(T::zero(), |m, (_, v)| m.max(v[1].norm()));
        let mut jump_residual = T::zero();
        for i in &tp.interfaces {
            let [y, y1] = f.eval(i.at);
            let left = y1 - y * red.u_bar.eval_left(i.at);
            let right = y1 - y * red.u_bar.eval(i.at);
            jump_residual = jump_residual.max((right - left - y * i.strength).norm() / scale);
        }
        let max_difference = if rr.multiplicity == 1 && dr.multiplicity == 1 {
            let fd = reconstruct(dr, &direct, opts)?;
            let n = 257;
            let d = (0..n)
                .map(|k| {
                    let x = a + (b - a) * lit(k as f64) / lit((n - 1) as f64);
                    (f.eval(x)[0] - fd[0].eval(x)[0]).norm()
                })
                .fold(T::zero(), T::max);
            Some(d)
        } else {
            None
        };
        out.push(TransferCheck { n: rr.n, jump_residual, max_difference });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn delta(alpha: f64, q: f64) -> TransmissionProblem<f64> {
        let c = CoefficientSet::constant(0.0, PI, 1.0, q, 1.0, 0.0).unwrap();
        TransmissionProblem::new(c, vec![Interface { at: PI / 2.0, strength: alpha }], BoundaryCondition::dirichlet())
            .unwrap()
    }

    #[test]
    fn identity_reduction() {
        let red = reduce(&delta(0.0, 0.0)).unwrap();
        assert_eq!(red.shift, 0.0);
        assert!(red.u_bar.max_abs() < 1e-15);
    }

    #[test]
    fn unit_interval_arithmetic() {
        let c = CoefficientSet::<f64>::constant(0.0, 1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let tp = TransmissionProblem::new(c, vec![Interface { at: 0.4, strength: 3.0 }], BoundaryCondition::dirichlet())
            .unwrap();
        let red = reduce(&tp).unwrap();
        assert!((red.shift - 3.0).abs() < 1e-14);
        assert!((red.q_tilde.eval(0.7) + 3.0).abs() < 1e-14);
        assert!((red.u_tilde.eval(0.5) + 1.5).abs() < 1e-14);
        let jump = red.u_bar.eval(0.4) - red.u_bar.eval_left(0.4);
        assert!((jump.abs() - 3.0).abs() < 1e-14);
        assert!(red.u_bar.eval(0.0).abs() < 1e-14 && red.u_bar.eval(1.0).abs() < 1e-14);
    }

    #[test]
    fn direct_and_reduced_agree() {
        let o = SolverOptions::default();
        for (alpha, q) in [(1.0, 0.0), (-2.0, 5.0)] {
            let tp = delta(alpha, q);
            let d = solve_direct(&tp, 5, &o).unwrap();
            let r = solve_via_reduction(&tp, 5, &o).unwrap();
            for (x, y) in d.iter().zip(&r) {
                assert!((x.lambda - y.lambda).abs() < 1e-7 * (1.0 + x.lambda.abs()), "{} {}", x.lambda, y.lambda);
            }
            for t in transfer_check(&tp, 3, &o).unwrap() {
                assert!(t.jump_residual < 1e-7 && t.max_difference.unwrap() < 1e-6, "{t:?}");
            }
        }
    }
}
