use crate::boundary::BoundaryCondition;
use crate::coeffs::{mollify, CoefficientSet};
use crate::error::Result;
use crate::quasi_ode::SolverOptions;
use crate::scalar::Scalar;
use crate::spectrum::eigenvalues;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct MollificationRow<T> {
    pub m: u32,
    /// `(‖1/p_m − 1/p‖₁, ‖s_m − s‖₁)`.
    pub l1_gap: (T, T),
    pub lambdas: Vec<T>,
    /// `|λₙ(m) − λₙ|` for each `n`.
    pub errors: Vec<T>,
}

/// Eigenvalues of the mollified problems for each `m`, against the unmollified ones.
pub fn mollification_study<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    ms: &[u32],
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<(Vec<T>, Vec<MollificationRow<T>>)> {
    let exact: Vec<T> = eigenvalues(coeffs, bc, n_max, opts)?.into_iter().map(|r| r.lambda).collect();
    let rows = ms
        .par_iter()
        .map(|&m| {
            let set = mollify(coeffs, m)?;
            let lambdas: Vec<T> = eigenvalues(&set.coeffs, bc, n_max, opts)?.into_iter().map(|r| r.lambda).collect();
            let errors = lambdas.iter().zip(&exact).map(|(x, y)| (*x - *y).abs()).collect();
            Ok(MollificationRow { m, l1_gap: set.l1_gap, lambdas, errors })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((exact, rows))
}
