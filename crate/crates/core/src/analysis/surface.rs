use crate::boundary::BoundaryCondition;
use crate::coeffs::CoefficientSet;
use crate::eigenfunctions::reconstruct;
use crate::error::{Error, Result};
use crate::quasi_ode::SolverOptions;
use crate::scalar::Scalar;
use crate::spectrum::SeparatedSolver;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample<T> {
    pub alpha: T,
    pub beta: T,
    pub lambda: T,
    /// `∂λ/∂α = −(w^[1](a)² + w(a)²)` from the normalised eigenfunction, when requested.
    pub d_alpha: Option<T>,
    /// `∂λ/∂β = w^[1](b)² + w(b)²`, when requested.
    pub d_beta: Option<T>,
}

/// `λₙ(S_{α,β})` sampled on a tensor grid, row-major in `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceTable<T> {
    pub n: usize,
    pub alphas: Vec<T>,
    pub betas: Vec<T>,
    pub samples: Vec<SurfaceSample<T>>,
}

impl<T: Copy> SurfaceTable<T> {
    pub fn at(&self, i: usize, j: usize) -> &SurfaceSample<T> {
        &self.samples[i * self.betas.len() + j]
    }
}

/// Samples `λₙ` over separated conditions with `α ∈ [0, π)` and `β ∈ (0, π]`.
pub fn bc_surface<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    alphas: &[T],
    betas: &[T],
    n: usize,
    slopes: bool,
    opts: &SolverOptions<T>,
) -> Result<SurfaceTable<T>> {
    for &a in alphas {
        if !(a >= T::zero() && a < T::PI()) {
            return Err(Error::Precondition(format!("α = {a:e} outside [0, π)")));
        }
    }
    for &b in betas {
        if !(b > T::zero() && b <= T::PI()) {
            return Err(Error::Precondition(format!("β = {b:e} outside (0, π]")));
        }
    }
    let points: Vec<(T, T)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let samples = points
        .par_iter()
        .map(|&(alpha, beta)| {
            let solver = SeparatedSolver::new(coeffs, alpha, beta, opts)?;
            let (lambda, residual) = solver.eigenvalue(n)?;
            let (d_alpha, d_beta) = if slopes {
                let rec = crate::spectrum::EigenRecord {
                    n,
                    lambda,
                    multiplicity: 1,
                    bc: BoundaryCondition::separated(alpha, beta)?,
                    residual,
                    d_pair: None,
                    diagnostic: None,
                };
                let ef = reconstruct(&rec, coeffs, opts)?.swap_remove(0);
                let (a, b) = coeffs.interval();
                let [wa, w1a] = ef.eval(a);
                let [wb, w1b] = ef.eval(b);
                (Some(-(w1a.norm_sqr() + wa.norm_sqr())), Some(w1b.norm_sqr() + wb.norm_sqr()))
            } else {
                (None, None)
            };
            Ok(SurfaceSample { alpha, beta, lambda, d_alpha, d_beta })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceTable { n, alphas: alphas.to_vec(), betas: betas.to_vec(), samples })
}

/// A pair of adjacent grid samples ordered against the expected monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion<T> {
    pub along_alpha: bool,
    pub i: usize,
    pub j: usize,
    pub step: T,
}

/// Adjacent samples where `λₙ` fails to decrease in `α` or increase in `β`. Grids must
/// be sorted ascending.
///
/// A step counts when it goes the wrong way by at least `tol·(1 + |λ|)`; with `tol = 0`
/// ties count too. Near corners where the eigenfunction is a boundary layer, `λₙ`
/// depends on the far endpoint only through exponentially small terms, so a positive
/// `tol` is needed there.
pub fn surface_inversions<T: Scalar>(table: &SurfaceTable<T>, tol: T) -> Vec<Inversion<T>> {
    let (na, nb) = (table.alphas.len(), table.betas.len());
    let mut out = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            let here = table.at(i, j).lambda;
            let slack = tol * (T::one() + here.abs());
            if i + 1 < na {
                let step = table.at(i + 1, j).lambda - here;
                if step >= slack {
                    out.push(Inversion { along_alpha: true, i, j, step });
                }
            }
            if j + 1 < nb {
                let step = table.at(i, j + 1).lambda - here;
                if -step >= slack {
                    out.push(Inversion { along_alpha: false, i, j, step });
                }
            }
        }
    }
    out
}
