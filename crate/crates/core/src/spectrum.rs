//! Eigenvalues with correct indexing and multiplicity.
//!
//! Separated problems are solved by shooting on the Prüfer angle. Coupled problems use
//! the discriminant `D(λ)` on bands delimited by the auxiliary separated spectra
//! `μₙ`, `νₙ`; inside a band `D` is monotone across `[−2, 2]`, decreasing for even
//! band index and increasing for odd.

use crate::boundary::{BoundaryCondition, BoundaryKind};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::quasi_ode::{fundamental_end, fundamental_with_gram, pruefer_end, SolverOptions};
use crate::roots::{brent, RootTolerance};
use crate::scalar::{lit, Scalar};
use crate::coeffs::CoefficientSet;
use num_complex::Complex;
use std::cell::RefCell;
use std::collections::HashMap;

/// The six functionals of `Φ(b, λ)` built from `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantParts<T> {
    pub d: T,
    pub d1: T,
    pub d2: T,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> DiscriminantParts<T> {
    pub fn from_phi(k: &Mat2<T>, phi: &Mat2<T>) -> Self {
        let (k11, k12, k21, k22) = (k.m[0][0], k.m[0][1], k.m[1][0], k.m[1][1]);
        let (p1, p2) = (phi.m[0][0], phi.m[0][1]);
        let (q1, q2) = (phi.m[1][0], phi.m[1][1]);
        let d1 = k11 * q2 - k21 * p2;
        let d2 = k22 * p1 - k12 * q1;
        Self {
            d: d1 + d2,
            d1,
            d2,
            a: k11 * q1 - k21 * p1,
            b: k11 * q2 + k12 * q1 - k21 * p2 - k22 * p1,
            c: k22 * p2 - k12 * q2,
        }
    }
}

pub fn discriminant<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    lambda: T,
    opts: &SolverOptions<T>,
) -> Result<DiscriminantParts<T>> {
    Ok(DiscriminantParts::from_phi(k, &fundamental_end(coeffs, lambda, opts)?))
}

/// `D(λ)` together with `D′(λ) = ∫ (A φ₂² − B φ₁φ₂ − C φ₁²) r`.
pub fn discriminant_with_derivative<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    lambda: T,
    opts: &SolverOptions<T>,
) -> Result<(DiscriminantParts<T>, T)> {
    let g = fundamental_with_gram(coeffs, lambda, opts)?;
    let p = DiscriminantParts::from_phi(k, &g.at_b);
    let [g11, g12, g22] = g.gram;
    Ok((p, p.a * g22 - p.b * g12 - p.c * g11))
}

pub fn discriminant_derivative<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    lambda: T,
    opts: &SolverOptions<T>,
) -> Result<T> {
    Ok(discriminant_with_derivative(coeffs, k, lambda, opts)?.1)
}

/// `Δ(λ) = det(A + B Φ(b, λ))`.
pub fn characteristic_determinant<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    lambda: Complex<T>,
    opts: &SolverOptions<T>,
) -> Result<Complex<T>> {
    let phi = fundamental_end(coeffs, lambda, opts)?;
    Ok((*bc.a() + *bc.b() * phi).det())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Determinant,
    Discriminant,
}

/// Samples of `Δ` or `D` on a strictly increasing real grid.
#[derive(Debug, Clone)]
pub struct CharacteristicScan<T> {
    pub lambdas: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub kind: ScanKind,
}

fn check_grid<T: Scalar>(lambdas: &[T]) -> Result<()> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) || lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::Domain("scan grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

pub fn scan_discriminant<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    lambdas: &[T],
    opts: &SolverOptions<T>,
) -> Result<CharacteristicScan<T>> {
    use rayon::prelude::*;
    check_grid(lambdas)?;
    let values = lambdas
        .par_iter()
        .map(|&l| discriminant(coeffs, k, l, opts).map(|p| Complex::new(p.d, T::zero())))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicScan { lambdas: lambdas.to_vec(), values, kind: ScanKind::Discriminant })
}

pub fn scan_determinant<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    lambdas: &[T],
    opts: &SolverOptions<T>,
) -> Result<CharacteristicScan<T>> {
    use rayon::prelude::*;
    check_grid(lambdas)?;
    let values = lambdas
        .par_iter()
        .map(|&l| characteristic_determinant(coeffs, bc, Complex::new(l, T::zero()), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicScan { lambdas: lambdas.to_vec(), values, kind: ScanKind::Determinant })
}

/// One computed eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenRecord<T> {
    pub n: usize,
    pub lambda: T,
    pub multiplicity: u8,
    pub bc: BoundaryCondition<T>,
    /// `|θ(b, λ) − (β + nπ)|` for separated conditions, `|D(λ) − 2cos γ|` for coupled.
    pub residual: T,
    /// Raw `(D(λ), D′(λ))` for coupled conditions.
    pub d_pair: Option<(T, T)>,
    pub diagnostic: Option<String>,
}

/// Absolute tolerance on the Prüfer residual `θ(b, λ) − (β + nπ)`.
pub const PRUEFER_RESIDUAL: f64 = 1e-10;
/// `|D ∓ 2|` bound for the double-eigenvalue test.
pub const DOUBLE_D_TOL: f64 = 1e-8;
/// `|D′| ≤ DOUBLE_SLOPE_TOL (1 + |λ|)` for the double-eigenvalue test.
pub const DOUBLE_SLOPE_TOL: f64 = 1e-6;

/// Shooting solver for `S(α, β)` that caches every Prüfer evaluation.
pub struct SeparatedSolver<'a, T: Scalar> {
    coeffs: &'a CoefficientSet<T>,
    alpha: T,
    beta: T,
    opts: SolverOptions<T>,
    samples: RefCell<Vec<(T, T)>>,
    found: RefCell<HashMap<usize, (T, T)>>,
}

impl<'a, T: Scalar> SeparatedSolver<'a, T> {
    pub fn new(coeffs: &'a CoefficientSet<T>, alpha: T, beta: T, opts: &SolverOptions<T>) -> Result<Self> {
        BoundaryCondition::separated(alpha, beta)?;
        Ok(Self {
            coeffs,
            alpha,
            beta,
            opts: *opts,
            samples: RefCell::new(Vec::new()),
            found: RefCell::new(HashMap::new()),
        })
    }

    pub fn theta_b(&self, lambda: T) -> Result<T> {
        if let Some(&(_, th)) = self.samples.borrow().iter().find(|(l, _)| *l == lambda) {
            return Ok(th);
        }
        let th = pruefer_end(self.coeffs, lambda, self.alpha, &self.opts)?;
        self.samples.borrow_mut().push((lambda, th));
        Ok(th)
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: T) -> Result<usize> {
        let th = self.theta_b(lambda)?;
        let x = (th - self.beta) / T::PI();
        Ok(if x <= T::zero() { 0 } else { x.ceil().to_usize().unwrap_or(usize::MAX) })
    }

    fn bracket(&self, target: T) -> Result<(T, T, T, T)> {
        let (mut lo, mut flo, mut hi, mut fhi) = (None, None, None, None);
        for &(l, th) in self.samples.borrow().iter() {
            let f = th - target;
            if f <= T::zero() && lo.is_none_or(|x| l > x) {
                lo = Some(l);
                flo = Some(f);
            }
            if f >= T::zero() && hi.is_none_or(|x| l < x) {
                hi = Some(l);
                fhi = Some(f);
            }
        }
        let scan = self.opts.lambda_scan;
        let limit = self.opts.lambda_limit;
        if lo.is_none() {
            let mut l = hi.map_or(-scan, |h: T| (h - scan.max(h.abs())).min(-scan));
            loop {
                let f = self.theta_b(l)? - target;
                if f <= T::zero() {
                    lo = Some(l);
                    flo = Some(f);
                    break;
                }
                hi = Some(l);
                fhi = Some(f);
                if l.abs() > limit {
                    return Err(Error::SearchRange {
                        index: ((target - self.beta) / T::PI()).round().to_usize().unwrap_or(0),
                        lo: l.to_f64().unwrap(),
                        hi: scan.to_f64().unwrap(),
                    });
                }
                l *= lit(2.0);
            }
        }
        if hi.is_none() {
            let mut h = scan.max(lo.unwrap() + scan);
            loop {
                let f = self.theta_b(h)? - target;
                if f >= T::zero() {
                    hi = Some(h);
                    fhi = Some(f);
                    break;
                }
                lo = Some(h);
                flo = Some(f);
                if h > limit {
                    return Err(Error::SearchRange {
                        index: ((target - self.beta) / T::PI()).round().to_usize().unwrap_or(0),
                        lo: -scan.to_f64().unwrap(),
                        hi: h.to_f64().unwrap(),
                    });
                }
                h *= lit(2.0);
            }
        }
        Ok((lo.unwrap(), flo.unwrap(), hi.unwrap(), fhi.unwrap()))
    }

    /// `λₙ` and its residual `θ(b, λₙ) − (β + nπ)`.
    pub fn eigenvalue(&self, n: usize) -> Result<(T, T)> {
        if let Some(&v) = self.found.borrow().get(&n) {
            return Ok(v);
        }
        let target = self.beta + lit::<T>(n as f64) * T::PI();
        let (lo, flo, hi, fhi) = self.bracket(target)?;
        let tol = RootTolerance {
            x_tol: T::epsilon() * lit(4.0),
            f_tol: lit(PRUEFER_RESIDUAL * 0.01),
            max_iter: 200,
        };
        let (l, f) = brent(|l| Ok(self.theta_b(l)? - target), lo, hi, flo, fhi, tol)?;
        self.found.borrow_mut().insert(n, (l, f));
        Ok((l, f))
    }
}

/// Separated eigenvalues `λ₀ < … < λ_{n_max}` of `S(α, β)`.
pub fn eigen_separated<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    alpha: T,
    beta: T,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<EigenRecord<T>>> {
    let solver = SeparatedSolver::new(coeffs, alpha, beta, opts)?;
    let bc = BoundaryCondition::separated(alpha, beta)?;
    let mut out: Vec<EigenRecord<T>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (lambda, f) = solver.eigenvalue(n)?;
        if let Some(prev) = out.last() {
            if lambda <= prev.lambda {
                return Err(Error::Consistency(format!(
                    "separated eigenvalues not increasing at n = {n}: {:e} then {lambda:e}",
                    prev.lambda
                )));
            }
        }
        let diagnostic = (f.abs() > lit(PRUEFER_RESIDUAL))
            .then(|| format!("Prüfer residual {:e} above tolerance", f.abs()));
        out.push(EigenRecord {
            n,
            lambda,
            multiplicity: 1,
            bc,
            residual: f.abs(),
            d_pair: None,
            diagnostic,
        });
    }
    Ok(out)
}

/// `(α, β)` of the auxiliary problems `y(a) = 0, k₂₂y(b) − k₁₂y^[1](b) = 0` and
/// `y^[1](a) = 0, k₂₁y(b) − k₁₁y^[1](b) = 0`.
pub fn auxiliary_angles<T: Scalar>(k: &Mat2<T>) -> ((T, T), (T, T)) {
    let fold = |x: T| {
        let mut y = x;
        while y <= T::zero() {
            y += T::PI();
        }
        while y > T::PI() {
            y -= T::PI();
        }
        y
    };
    let mu = (T::zero(), fold(k.m[0][1].atan2(k.m[1][1])));
    let nu = (T::FRAC_PI_2(), fold(k.m[0][0].atan2(k.m[1][0])));
    (mu, nu)
}

/// `(μₙ, νₙ)` records for `n ≤ n_max`.
pub fn eigen_auxiliary<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<(Vec<EigenRecord<T>>, Vec<EigenRecord<T>>)> {
    BoundaryCondition::real_coupled(*k)?;
    let ((am, bm), (an, bn)) = auxiliary_angles(k);
    Ok((
        eigen_separated(coeffs, am, bm, n_max, opts)?,
        eigen_separated(coeffs, an, bn, n_max, opts)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    /// `k₁₁ > 0, k₁₂ ≤ 0`.
    A,
    /// `k₁₁ ≤ 0, k₁₂ < 0`.
    B,
}

/// Where a real `λ` sits relative to the bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandPosition {
    Band(usize),
    /// Strictly between band `n` and band `n + 1` (or below band 0 when `None`).
    GapAfter(Option<usize>),
}

/// Eigenvalue solver for `[e^{iγ}K | −I]`, shared across all `γ` and `±K`.
pub struct CoupledSolver<'a, T: Scalar> {
    coeffs: &'a CoefficientSet<T>,
    opts: SolverOptions<T>,
    /// `σ K` with `σ = ±1` chosen so that `σK` is in case (a) or (b).
    k_hat: Mat2<T>,
    sigma: T,
    case: Case,
    mu: SeparatedSolver<'a, T>,
    nu: SeparatedSolver<'a, T>,
    d_cache: RefCell<Vec<(T, T)>>,
}

impl<'a, T: Scalar> CoupledSolver<'a, T> {
    pub fn new(coeffs: &'a CoefficientSet<T>, k: &Mat2<T>, opts: &SolverOptions<T>) -> Result<Self> {
        BoundaryCondition::real_coupled(*k)?;
        let case_of = |m: &Mat2<T>| {
            let (k11, k12) = (m.m[0][0], m.m[0][1]);
            if k11 > T::zero() && k12 <= T::zero() {
                Some(Case::A)
            } else if k11 <= T::zero() && k12 < T::zero() {
                Some(Case::B)
            } else {
                None
            }
        };
        let (k_hat, sigma, case) = match case_of(k) {
            Some(c) => (*k, T::one(), c),
            None => {
                let m = -*k;
                let c = case_of(&m).ok_or_else(|| Error::Boundary("K fits neither case".into()))?;
                (m, -T::one(), c)
            }
        };
        let ((am, bm), (an, bn)) = auxiliary_angles(&k_hat);
        Ok(Self {
            coeffs,
            opts: *opts,
            k_hat,
            sigma,
            case,
            mu: SeparatedSolver::new(coeffs, am, bm, opts)?,
            nu: SeparatedSolver::new(coeffs, an, bn, opts)?,
            d_cache: RefCell::new(Vec::new()),
        })
    }

    pub fn mu(&self) -> &SeparatedSolver<'a, T> {
        &self.mu
    }

    pub fn nu(&self) -> &SeparatedSolver<'a, T> {
        &self.nu
    }

    /// `D_K(λ)` for the matrix this solver was built from.
    pub fn discriminant(&self, lambda: T) -> Result<T> {
        Ok(self.sigma * self.d_hat(lambda)?)
    }

    fn d_hat(&self, lambda: T) -> Result<T> {
        if let Some(&(_, d)) = self.d_cache.borrow().iter().find(|(l, _)| *l == lambda) {
            return Ok(d);
        }
        let d = discriminant(self.coeffs, &self.k_hat, lambda, &self.opts)?.d;
        self.d_cache.borrow_mut().push((lambda, d));
        Ok(d)
    }

    pub fn position(&self, lambda: T) -> Result<BandPosition> {
        let i = self.mu.count_below(lambda)?;
        let j = self.nu.count_below(lambda)?;
        let s = i + j;
        Ok(match self.case {
            Case::A => {
                if s % 2 == 1 {
                    BandPosition::Band((s - 1) / 2)
                } else if s == 0 {
                    BandPosition::GapAfter(None)
                } else {
                    BandPosition::GapAfter(Some((s - 2) / 2))
                }
            }
            Case::B => {
                if s % 2 == 0 {
                    BandPosition::Band(s / 2)
                } else {
                    BandPosition::GapAfter(Some((s - 1) / 2))
                }
            }
        })
    }

    /// Number of eigenvalues (with multiplicity) strictly below `lambda` for the target
    /// `D_K = t`.
    pub fn count_below(&self, lambda: T, t: T) -> Result<usize> {
        let th = self.sigma * t;
        Ok(match self.position(lambda)? {
            BandPosition::GapAfter(None) => 0,
            BandPosition::GapAfter(Some(n)) => n + 1,
            BandPosition::Band(n) => {
                let f = self.d_hat(lambda)? - th;
                let passed = if n % 2 == 0 { f < T::zero() } else { f > T::zero() };
                n + usize::from(passed)
            }
        })
    }

    fn lazy_max(&self, x: (&SeparatedSolver<'a, T>, usize), y: (&SeparatedSolver<'a, T>, usize)) -> Result<T> {
        // Evaluate the higher-index (or ν) member first; the other only if it is larger.
        let (first, second) = if x.1 > y.1 { (x, y) } else { (y, x) };
        let v = first.0.eigenvalue(first.1)?.0;
        if second.0.count_below(v)? > second.1 {
            Ok(v)
        } else {
            Ok(v.max(second.0.eigenvalue(second.1)?.0))
        }
    }

    fn lazy_min(&self, x: (&SeparatedSolver<'a, T>, usize), y: (&SeparatedSolver<'a, T>, usize)) -> Result<T> {
        let (first, second) = if x.1 < y.1 { (x, y) } else { (y, x) };
        let v = first.0.eigenvalue(first.1)?.0;
        if second.0.count_below(v)? <= second.1 {
            Ok(v)
        } else {
            Ok(v.min(second.0.eigenvalue(second.1)?.0))
        }
    }

    /// Band `Gₙ = [L, R]`; `L` is `None` for the unbounded band 0 in case (b).
    pub fn band(&self, n: usize) -> Result<(Option<T>, T)> {
        let (mu, nu) = (&self.mu, &self.nu);
        Ok(match self.case {
            Case::A => {
                let lo = if n == 0 {
                    nu.eigenvalue(0)?.0
                } else {
                    self.lazy_max((mu, n - 1), (nu, n))?
                };
                (Some(lo), self.lazy_min((mu, n), (nu, n + 1))?)
            }
            Case::B => {
                let lo = if n == 0 { None } else { Some(self.lazy_max((mu, n - 1), (nu, n - 1))?) };
                (lo, self.lazy_min((mu, n), (nu, n))?)
            }
        })
    }

    /// The `n`-th root of `D_K(λ) = t` (counted with multiplicity) and its residual.
    pub fn eigenvalue(&self, n: usize, t: T) -> Result<(T, T)> {
        let th = self.sigma * t;
        let (lo, hi) = self.band(n)?;
        // Orient so that g decreases through zero on the band.
        let sgn = if n.is_multiple_of(2) { T::one() } else { -T::one() };
        let g = |l: T| -> Result<T> { Ok(sgn * (self.d_hat(l)? - th)) };
        let ghi = g(hi)?;
        let (lo, glo) = match lo {
            Some(l) => (l, g(l)?),
            None => {
                let mut step = T::one().max(hi.abs());
                loop {
                    let l = hi - step;
                    let v = g(l)?;
                    if v > T::zero() {
                        break (l, v);
                    }
                    if step > self.opts.lambda_limit {
                        return Err(Error::SearchRange {
                            index: n,
                            lo: l.to_f64().unwrap(),
                            hi: hi.to_f64().unwrap(),
                        });
                    }
                    step *= lit(2.0);
                }
            }
        };
        let edge_tol = lit::<T>(DOUBLE_D_TOL);
        if lo >= hi || glo < T::zero() || ghi > T::zero() {
            // Degenerate band or no sign change: accept a band edge sitting on the root.
            let (l, v) = if glo.abs() <= ghi.abs() { (lo, glo) } else { (hi, ghi) };
            if v.abs() <= edge_tol {
                return Ok((l, v.abs()));
            }
            return Err(Error::Indexing(format!(
                "band {n} = [{lo:e}, {hi:e}] has D − t = {:e}, {:e} without a root",
                sgn * glo,
                sgn * ghi
            )));
        }
        let tol = RootTolerance {
            x_tol: T::epsilon() * lit(4.0),
            f_tol: lit(1e-13),
            max_iter: 200,
        };
        let (l, v) = brent(g, lo, hi, glo, ghi, tol)?;
        Ok((l, v.abs()))
    }
}

/// Coupled eigenvalues `λ₀ ≤ … ≤ λ_{n_max}` of `[e^{iγ}K | −I]` (`γ = 0`: real coupled).
pub fn eigen_coupled<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    gamma: T,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<EigenRecord<T>>> {
    let solver = CoupledSolver::new(coeffs, k, opts)?;
    coupled_records(&solver, coeffs, k, gamma, 0, n_max)
}

/// Records `n_min..=n_max` from a prepared solver.
pub fn coupled_records<T: Scalar>(
    solver: &CoupledSolver<'_, T>,
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    gamma: T,
    n_min: usize,
    n_max: usize,
) -> Result<Vec<EigenRecord<T>>> {
    let bc = BoundaryCondition::coupled(gamma, *k)?;
    let t = lit::<T>(2.0) * gamma.cos();
    let real = gamma == T::zero();
    // One extra root on each side so that a double pair straddling the range is seen.
    let first = if real { n_min.saturating_sub(1) } else { n_min };
    let last = if real { n_max + 1 } else { n_max };
    let mut raw = Vec::with_capacity(last - first + 1);
    for n in first..=last {
        let (lambda, res) = solver.eigenvalue(n, t)?;
        let (p, dp) = discriminant_with_derivative(coeffs, k, lambda, &solver.opts)?;
        raw.push((n, lambda, res, p.d, dp));
    }
    let mut mult = vec![1u8; raw.len()];
    let mut lam: Vec<T> = raw.iter().map(|r| r.1).collect();
    if real {
        let is_double = |r: &(usize, T, T, T, T)| {
            (r.3 - t).abs() <= lit(DOUBLE_D_TOL) && r.4.abs() <= lit::<T>(DOUBLE_SLOPE_TOL) * (T::one() + r.1.abs())
        };
        let mut i = 0;
        while i + 1 < raw.len() {
            let (x, y) = (&raw[i], &raw[i + 1]);
            let close = (y.1 - x.1).abs() <= lit::<T>(1e-6) * (T::one() + x.1.abs());
            if close && is_double(x) && is_double(y) {
                let mid = (x.1 + y.1) / lit(2.0);
                lam[i] = mid;
                lam[i + 1] = mid;
                mult[i] = 2;
                mult[i + 1] = 2;
                i += 2;
            } else {
                i += 1;
            }
        }
    }
    let mut out = Vec::new();
    for (idx, r) in raw.iter().enumerate() {
        if r.0 < n_min || r.0 > n_max {
            continue;
        }
        let diagnostic = if mult[idx] == 1 && real && (r.3 - t).abs() <= lit(DOUBLE_D_TOL)
            && r.4.abs() <= lit::<T>(DOUBLE_SLOPE_TOL) * (T::one() + r.1.abs())
        {
            Some("flat discriminant at a simple root; check for a near-double eigenvalue".into())
        } else if r.2 > lit(DOUBLE_D_TOL) {
            Some(format!("discriminant residual {:e}", r.2))
        } else {
            None
        };
        out.push(EigenRecord {
            n: r.0,
            lambda: lam[idx],
            multiplicity: mult[idx],
            bc,
            residual: (r.3 - t).abs(),
            d_pair: Some((r.3, r.4)),
            diagnostic,
        });
    }
    for w in out.windows(2) {
        if w[1].lambda < w[0].lambda {
            return Err(Error::Indexing(format!(
                "coupled eigenvalues out of order at n = {}: {:e} > {:e}",
                w[1].n, w[0].lambda, w[1].lambda
            )));
        }
    }
    Ok(out)
}

/// Eigenvalues for any self-adjoint boundary condition.
pub fn eigenvalues<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<Vec<EigenRecord<T>>> {
    match *bc.kind() {
        BoundaryKind::Separated { alpha, beta } => eigen_separated(coeffs, alpha, beta, n_max, opts),
        BoundaryKind::RealCoupled { k } => eigen_coupled(coeffs, &k, T::zero(), n_max, opts),
        BoundaryKind::ComplexCoupled { gamma, k } => eigen_coupled(coeffs, &k, gamma, n_max, opts),
    }
}

/// Number of eigenvalues (with multiplicity) strictly below `lambda`.
pub fn count_below<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    lambda: T,
    opts: &SolverOptions<T>,
) -> Result<usize> {
    match *bc.kind() {
        BoundaryKind::Separated { alpha, beta } => SeparatedSolver::new(coeffs, alpha, beta, opts)?.count_below(lambda),
        BoundaryKind::RealCoupled { k } => CoupledSolver::new(coeffs, &k, opts)?.count_below(lambda, lit(2.0)),
        BoundaryKind::ComplexCoupled { gamma, k } => {
            CoupledSolver::new(coeffs, &k, opts)?.count_below(lambda, lit::<T>(2.0) * gamma.cos())
        }
    }
}
