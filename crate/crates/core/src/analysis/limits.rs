use crate::boundary::{approach_path, classify_region, BoundaryCondition, BoundaryKind, RegionLabel};
use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::quasi_ode::SolverOptions;
use crate::scalar::{lit, Scalar};
use crate::spectrum::{eigenvalues, CoupledSolver, SeparatedSolver};

/// Level below which `λ₀` is taken to have diverged to `−∞`.
pub const DIVERGENCE_LEVEL: f64 = -1e4;

/// Expected limit of `λₙ(B)` as `B` approaches a point from a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictedLimit {
    /// `λₙ(B) → λₙ(A)`.
    Continuous,
    /// `λₙ(B) → λₙ₋₁(A)` and `λ₀(B) → −∞`.
    DropOne,
    /// `λₙ(B) → λₙ₋₂(A)` and `λ₀(B), λ₁(B) → −∞`.
    DropTwo,
}

impl PredictedLimit {
    pub fn shift(&self) -> usize {
        match self {
            PredictedLimit::Continuous => 0,
            PredictedLimit::DropOne => 1,
            PredictedLimit::DropTwo => 2,
        }
    }
}

pub fn predicted_limit(region: RegionLabel) -> Result<PredictedLimit> {
    Ok(match region {
        RegionLabel::FPlus | RegionLabel::GPlus | RegionLabel::HPlus | RegionLabel::IZero => PredictedLimit::DropOne,
        RegionLabel::IPlus => PredictedLimit::DropTwo,
        RegionLabel::FMinus | RegionLabel::GMinus | RegionLabel::HMinus | RegionLabel::IMinus => {
            PredictedLimit::Continuous
        }
        other => return Err(Error::Parameterization(format!("{} is not an approach region", other.name()))),
    })
}

/// Richardson extrapolation to `t = 0` of values at `t₀, t₀/2, t₀/4, …`, using the last
/// `levels + 1` samples. Returns the estimate and the change from the previous level.
pub fn richardson<T: Scalar>(values: &[T], levels: usize) -> (T, T) {
    let k = levels.min(values.len().saturating_sub(1));
    let tail = &values[values.len() - k - 1..];
    let mut col: Vec<T> = tail.to_vec();
    let mut prev_best = *col.last().unwrap();
    let mut best = prev_best;
    for j in 1..=k {
        let f = lit::<T>(2f64.powi(j as i32));
        col = col.windows(2).map(|w| (f * w[1] - w[0]) / (f - T::one())).collect();
        prev_best = best;
        best = *col.last().unwrap();
    }
    (best, (best - prev_best).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow<T> {
    pub n: usize,
    /// `(t, λₙ(B_t))`.
    pub sequence: Vec<(T, T)>,
    pub extrapolated: T,
    pub error_estimate: T,
    /// Index of the eigenvalue of the target the limit should equal.
    pub target_index: usize,
    pub predicted: T,
    pub rel_err: T,
    pub pass: bool,
}

/// Proxy check that the lowest eigenvalues escape to `−∞`: the count of eigenvalues below
/// the divergence level is nondecreasing along the path and reaches `required`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCheck {
    pub required: usize,
    pub counts: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTable<T> {
    pub region: RegionLabel,
    pub predicted: PredictedLimit,
    pub rows: Vec<LimitRow<T>>,
    pub divergence: Option<DivergenceCheck>,
}

impl<T> LimitTable<T> {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.divergence.as_ref().is_none_or(|d| d.pass)
    }
}

enum PathSolver<'a, T: Scalar> {
    Separated(SeparatedSolver<'a, T>),
    Coupled(CoupledSolver<'a, T>, T),
}

impl<'a, T: Scalar> PathSolver<'a, T> {
    fn new(coeffs: &'a CoefficientSet<T>, bc: &BoundaryCondition<T>, opts: &SolverOptions<T>) -> Result<Self> {
        Ok(match *bc.kind() {
            BoundaryKind::Separated { alpha, beta } => PathSolver::Separated(SeparatedSolver::new(coeffs, alpha, beta, opts)?),
            BoundaryKind::RealCoupled { k } => PathSolver::Coupled(CoupledSolver::new(coeffs, &k, opts)?, lit(2.0)),
            BoundaryKind::ComplexCoupled { gamma, k } => {
                PathSolver::Coupled(CoupledSolver::new(coeffs, &k, opts)?, lit::<T>(2.0) * gamma.cos())
            }
        })
    }

    fn eigenvalue(&self, n: usize) -> Result<T> {
        match self {
            PathSolver::Separated(s) => Ok(s.eigenvalue(n)?.0),
            PathSolver::Coupled(s, t) => Ok(s.eigenvalue(n, *t)?.0),
        }
    }

    fn count_below(&self, lambda: T) -> Result<usize> {
        match self {
            PathSolver::Separated(s) => s.count_below(lambda),
            PathSolver::Coupled(s, t) => s.count_below(lambda, *t),
        }
    }
}

/// Follows `B_t → point` from inside `region` for `t = t₀·2^{−k}`, `k = 0..=steps`, and
/// compares the extrapolated limits of `λₙ(B_t)` with the eigenvalues of `point`.
/// Indices that escape to `−∞` are covered by the divergence proxy instead.
pub fn jump_limits<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    point: &BoundaryCondition<T>,
    region: RegionLabel,
    n_max: usize,
    t0: T,
    steps: usize,
    opts: &SolverOptions<T>,
) -> Result<LimitTable<T>> {
    if !classify_region(point).contains(RegionLabel::KSet) {
        return Err(Error::Parameterization("limit point must lie in K_set".into()));
    }
    let predicted = predicted_limit(region)?;
    let shift = predicted.shift();
    let target = eigenvalues(coeffs, point, n_max, opts)?;
    let ts: Vec<T> = (0..=steps).map(|k| t0 / lit(2f64.powi(k as i32))).collect();
    let paths: Vec<BoundaryCondition<T>> = ts.iter().map(|&t| approach_path(point, region, t)).collect::<Result<_>>()?;
    let solvers: Vec<PathSolver<'_, T>> =
        paths.iter().map(|bc| PathSolver::new(coeffs, bc, opts)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for n in shift..=n_max {
        let sequence: Vec<(T, T)> =
            ts.iter().zip(&solvers).map(|(&t, s)| Ok((t, s.eigenvalue(n)?))).collect::<Result<_>>()?;
        let vals: Vec<T> = sequence.iter().map(|p| p.1).collect();
        let (extrapolated, error_estimate) = richardson(&vals, 3);
        let target_index = n - shift;
        let pred = target[target_index].lambda;
        let rel_err = (extrapolated - pred).abs() / T::one().max(pred.abs());
        rows.push(LimitRow {
            n,
            sequence,
            extrapolated,
            error_estimate,
            target_index,
            predicted: pred,
            rel_err,
            pass: rel_err <= lit(1e-5),
        });
    }
    let divergence = if shift > 0 {
        let counts: Vec<usize> =
            solvers.iter().map(|s| s.count_below(lit(DIVERGENCE_LEVEL))).collect::<Result<_>>()?;
        let pass = counts.windows(2).all(|w| w[1] >= w[0]) && counts.last().is_some_and(|&c| c >= shift);
        Some(DivergenceCheck { required: shift, counts, pass })
    } else {
        None
    };
    Ok(LimitTable { region, predicted, rows, divergence })
}
