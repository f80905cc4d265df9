//! Eigenfunction reconstruction, normalisation and zero counting.

use crate::boundary::{BoundaryCondition, BoundaryKind};
use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::{null_vector, Mat2};
use crate::quadrature::GaussRule;
use crate::quasi_ode::{fundamental_matrix, pruefer_end, FundamentalMatrix, SolverOptions};
use crate::roots::{bisect_sign, brent, RootTolerance};
use crate::scalar::{lit, Scalar};
use crate::spectrum::{discriminant, EigenRecord};
use num_complex::Complex;
use std::sync::Arc;

/// A normalised eigenfunction `w = c₁φ₁ + c₂φ₂` with `∫ r |w|² = 1`.
#[derive(Debug, Clone)]
pub struct Eigenfunction<T: Scalar> {
    pub record: EigenRecord<T>,
    lambda: T,
    phi: Arc<FundamentalMatrix<T, T>>,
    c: [Complex<T>; 2],
    /// `∫ r |w|²` as measured after normalisation.
    pub norm: T,
    /// Zeros of `Re w` in `[a, b)`.
    pub zero_count_half_open: usize,
    /// Zeros of `Re w` in `(a, b)`.
    pub zero_count_open: usize,
    interval: (T, T),
}

/// Which real component of an eigenfunction to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

impl<T: Scalar> Eigenfunction<T> {
    pub fn coefficients(&self) -> [Complex<T>; 2] {
        self.c
    }

    /// Eigenvalue the function was integrated at. For simple eigenvalues this is the
    /// record's value refined at tighter integration tolerances.
    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn interval(&self) -> (T, T) {
        self.interval
    }

    /// `(w(x), w^[1](x))`, right limits at interfaces.
    pub fn eval(&self, x: T) -> [Complex<T>; 2] {
        let m = self.phi.at(x).to_complex();
        m.apply(self.c)
    }

    pub fn eval_part(&self, x: T, part: Part) -> [T; 2] {
        let [w, w1] = self.eval(x);
        match part {
            Part::Re => [w.re, w1.re],
            Part::Im => [w.im, w1.im],
        }
    }

    pub fn is_real(&self) -> bool {
        self.c.iter().all(|z| z.im == T::zero())
    }

    /// Integration step boundaries of the underlying trajectory.
    pub fn mesh(&self) -> Vec<T> {
        self.phi.trajectory.mesh()
    }

    /// `n` equally spaced samples `(x, w, w^[1])` including both ends.
    pub fn samples(&self, n: usize) -> Vec<(T, [Complex<T>; 2])> {
        let (a, b) = self.interval;
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let x = if i + 1 == n { b } else { a + (b - a) * lit(i as f64) / lit((n - 1) as f64) };
                (x, self.eval(x))
            })
            .collect()
    }
}

fn merged_mesh<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut m: Vec<T> = a.iter().chain(b.iter()).copied().collect();
    m.sort_by(|x, y| x.partial_cmp(y).unwrap());
    m.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (T::one() + x.abs()));
    m
}

/// `∫ r f ḡ`, by 5-point Gauss on the union of both integration meshes.
pub fn inner_product<T: Scalar>(coeffs: &CoefficientSet<T>, f: &Eigenfunction<T>, g: &Eigenfunction<T>) -> Complex<T> {
    let mesh = merged_mesh(&f.mesh(), &g.mesh());
    let rule = GaussRule::<T>::new(5);
    let r = coeffs.r();
    let mut acc = Complex::new(T::zero(), T::zero());
    for w in mesh.windows(2) {
        for (x, wt) in rule.points(w[0], w[1]) {
            let fv = f.eval(x)[0];
            let gv = g.eval(x)[0];
            acc += fv * gv.conj() * (r.eval(x) * wt);
        }
    }
    acc
}

fn gram_of<T: Scalar>(coeffs: &CoefficientSet<T>, phi: &FundamentalMatrix<T, T>) -> Mat2<T> {
    let rule = GaussRule::<T>::new(5);
    let r = coeffs.r();
    let mut g = [T::zero(); 3];
    for w in phi.trajectory.mesh().windows(2) {
        for (x, wt) in rule.points(w[0], w[1]) {
            let m = phi.at(x);
            let (p1, p2) = (m.m[0][0], m.m[0][1]);
            let rw = r.eval(x) * wt;
            g[0] += p1 * p1 * rw;
            g[1] += p1 * p2 * rw;
            g[2] += p2 * p2 * rw;
        }
    }
    Mat2::new(g[0], g[1], g[1], g[2])
}

fn gram_form<T: Scalar>(g: &Mat2<T>, u: &[Complex<T>; 2], v: &[Complex<T>; 2]) -> Complex<T> {
    // uᵀ G v̄
    let gv = [
        v[0].conj() * g.m[0][0] + v[1].conj() * g.m[0][1],
        v[0].conj() * g.m[1][0] + v[1].conj() * g.m[1][1],
    ];
    u[0] * gv[0] + u[1] * gv[1]
}

fn fix_phase<T: Scalar>(c: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let scale = c[0].norm().max(c[1].norm());
    let pivot = if c[0].norm() > lit::<T>(1e-10) * scale { c[0] } else { c[1] };
    let ph = pivot.conj() / pivot.norm();
    let mut out = [c[0] * ph, c[1] * ph];
    let tiny = lit::<T>(1e-14) * scale;
    for z in &mut out {
        if z.im.abs() <= tiny {
            z.im = T::zero();
        }
    }
    out
}

fn refined_options<T: Scalar>(opts: &SolverOptions<T>) -> SolverOptions<T> {
    SolverOptions { rel_tol: opts.rel_tol * lit(1e-2), abs_tol: opts.abs_tol * lit(1e-2), ..*opts }
}

/// Re-converges a simple eigenvalue on a small bracket around `record.lambda`. Forward
/// integration amplifies the eigenvalue error by the growth of the complementary solution,
/// which dominates for boundary-layer eigenfunctions. Returns the record's value unchanged
/// when no sign change is found nearby.
fn polish<T: Scalar>(record: &EigenRecord<T>, coeffs: &CoefficientSet<T>, fine: &SolverOptions<T>) -> Result<T> {
    let lam = record.lambda;
    if record.multiplicity != 1 {
        return Ok(lam);
    }
    let n = lit::<T>(record.n as f64);
    let f = |l: T| -> Result<T> {
        match *record.bc.kind() {
            BoundaryKind::Separated { alpha, beta } => Ok(pruefer_end(coeffs, l, alpha, fine)? - (beta + n * T::PI())),
            BoundaryKind::RealCoupled { k } => Ok(discriminant(coeffs, &k, l, fine)?.d - lit(2.0)),
            BoundaryKind::ComplexCoupled { gamma, k } => {
                Ok(discriminant(coeffs, &k, l, fine)?.d - lit::<T>(2.0) * gamma.cos())
            }
        }
    };
    let scale = T::one() + lam.abs();
    let mut h = lit::<T>(1e-8) * scale;
    for _ in 0..4 {
        let (lo, hi) = (lam - h, lam + h);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if (flo <= T::zero()) != (fhi <= T::zero()) {
            let tol = RootTolerance { x_tol: T::epsilon() * lit::<T>(4.0) * scale, f_tol: T::zero(), max_iter: 100 };
            return Ok(brent(f, lo, hi, flo, fhi, tol)?.0);
        }
        h *= lit(10.0);
    }
    Ok(lam)
}

/// Builds the normalised eigenfunction(s) for `record`. Double eigenvalues yield two
/// functions orthonormal in the `r`-weighted inner product.
pub fn reconstruct<T: Scalar>(
    record: &EigenRecord<T>,
    coeffs: &CoefficientSet<T>,
    opts: &SolverOptions<T>,
) -> Result<Vec<Eigenfunction<T>>> {
    let fine = refined_options(opts);
    let lambda = polish(record, coeffs, &fine)?;
    let phi = Arc::new(fundamental_matrix(coeffs, lambda, &fine)?);
    let g = gram_of(coeffs, &phi);
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let basis: Vec<[Complex<T>; 2]> = match *record.bc.kind() {
        BoundaryKind::Separated { alpha, .. } => {
            let (s, c) = alpha.sin_cos();
            vec![[Complex::new(s, T::zero()), Complex::new(c, T::zero())]]
        }
        _ => {
            let bc = &record.bc;
            let m = *bc.a() + *bc.b() * phi.at_b.to_complex();
            let scale = bc.a().norm() + bc.b().norm() * phi.at_b.norm();
            let rel = m.norm() / scale;
            match record.multiplicity {
                2 => {
                    if rel > lit(1e-4) {
                        return Err(Error::Consistency(format!(
                            "double eigenvalue {:e} but A + BΦ(b) has relative norm {rel:e}",
                            record.lambda
                        )));
                    }
                    vec![[one, zero], [zero, one]]
                }
                _ => {
                    if rel < lit(1e-12) {
                        return Err(Error::Consistency(format!(
                            "simple eigenvalue {:e} but A + BΦ(b) vanishes",
                            record.lambda
                        )));
                    }
                    vec![null_vector::<T, Complex<T>>(&m)]
                }
            }
        }
    };
    // Gram–Schmidt in the r-weighted inner product.
    let mut ortho: Vec<[Complex<T>; 2]> = Vec::new();
    for mut v in basis {
        for u in &ortho {
            let p = gram_form(&g, &v, u);
            v = [v[0] - u[0] * p, v[1] - u[1] * p];
        }
        let n = gram_form(&g, &v, &v).re.sqrt();
        if !(n > T::zero()) {
            return Err(Error::Consistency("degenerate eigenvector".into()));
        }
        ortho.push(fix_phase([v[0] / n, v[1] / n]));
    }
    let (a, b) = coeffs.interval();
    ortho
        .into_iter()
        .map(|c| {
            let mut ef = Eigenfunction {
                record: record.clone(),
                lambda,
                phi: phi.clone(),
                c,
                norm: T::zero(),
                zero_count_half_open: 0,
                zero_count_open: 0,
                interval: (a, b),
            };
            ef.norm = inner_product(coeffs, &ef, &ef).re;
            let z = zeros(&ef, Part::Re)?;
            ef.zero_count_half_open = z.count(true);
            ef.zero_count_open = z.count(false);
            Ok(ef)
        })
        .collect()
}

/// One eigenfunction per record. The two members of a double pair share a reconstruction
/// and receive the two orthonormal basis functions in order.
pub fn eigenfunctions<T: Scalar>(
    records: &[EigenRecord<T>],
    coeffs: &CoefficientSet<T>,
    opts: &SolverOptions<T>,
) -> Result<Vec<Eigenfunction<T>>> {
    let mut out: Vec<Eigenfunction<T>> = Vec::with_capacity(records.len());
    let mut i = 0;
    while i < records.len() {
        let rec = &records[i];
        let paired = rec.multiplicity == 2
            && records.get(i + 1).is_some_and(|r| r.multiplicity == 2 && r.lambda == rec.lambda);
        let mut fs = reconstruct(rec, coeffs, opts)?;
        if paired {
            let mut second = fs.pop().expect("double eigenvalue yields two functions");
            second.record = records[i + 1].clone();
            out.push(fs.pop().expect("double eigenvalue yields two functions"));
            out.push(second);
            i += 2;
        } else {
            out.push(fs.swap_remove(0));
            i += 1;
        }
    }
    Ok(out)
}

/// Zero locations of one real component.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet<T> {
    pub at_a: bool,
    pub interior: Vec<T>,
    pub at_b: bool,
    /// Smallest `|w^[1]| / ‖w^[1]‖∞` over all detected zeros (1 when there are none).
    pub min_slope_ratio: T,
}

impl<T> ZeroSet<T> {
    /// Zeros in `[a, b)` (`half_open`) or `(a, b)`.
    pub fn count(&self, half_open: bool) -> usize {
        self.interior.len() + usize::from(half_open && self.at_a)
    }

    /// Zeros in the closed interval `[a, b]`.
    pub fn count_closed(&self) -> usize {
        self.interior.len() + usize::from(self.at_a) + usize::from(self.at_b)
    }
}

const SAMPLES_PER_STEP: usize = 8;
// An endpoint value this small (relative to ‖w‖∞) is read as a zero; it matches the
// offset produced by an eigenvalue accurate to about 1e-10.
const ENDPOINT_ZERO: f64 = 1e-7;
const DEGENERATE: f64 = 1e-13;

/// Locates the sign changes of `Re w` or `Im w` on the dense output.
pub fn zeros<T: Scalar>(ef: &Eigenfunction<T>, part: Part) -> Result<ZeroSet<T>> {
    let mesh = ef.mesh();
    let (a, b) = ef.interval;
    let mut xs = Vec::with_capacity(mesh.len() * SAMPLES_PER_STEP);
    for w in mesh.windows(2) {
        for k in 0..SAMPLES_PER_STEP {
            xs.push(w[0] + (w[1] - w[0]) * lit(k as f64) / lit(SAMPLES_PER_STEP as f64));
        }
    }
    xs.push(b);
    let vals: Vec<[T; 2]> = xs.iter().map(|&x| ef.eval_part(x, part)).collect();
    let wmax = vals.iter().fold(T::zero(), |m, v| m.max(v[0].abs()));
    let w1max = vals.iter().fold(T::zero(), |m, v| m.max(v[1].abs()));
    if !(wmax > T::zero()) {
        return Err(Error::DegenerateSampling { at: a.to_f64().unwrap() });
    }
    let at_a = vals[0][0].abs() <= lit::<T>(ENDPOINT_ZERO) * wmax;
    let at_b = vals[vals.len() - 1][0].abs() <= lit::<T>(ENDPOINT_ZERO) * wmax;
    let flat = lit::<T>(DEGENERATE) * wmax;
    let mut interior = Vec::new();
    let mut last: Option<(T, T)> = None; // (x, value) of the last clearly signed sample
    let mut flat_run_start: Option<T> = None;
    let x_tol = lit::<T>(1e-12) * (T::one() + (b - a).abs());
    for i in 1..xs.len() - 1 {
        let (x, v) = (xs[i], vals[i][0]);
        if v.abs() <= flat {
            flat_run_start.get_or_insert(x);
            continue;
        }
        if let Some((xl, vl)) = last {
            if (vl > T::zero()) != (v > T::zero()) {
                let f = |t: T| ef.eval_part(t, part)[0];
                interior.push(bisect_sign(f, xl, x, x_tol, 200));
            } else if let Some(x0) = flat_run_start {
                return Err(Error::DegenerateSampling { at: x0.to_f64().unwrap() });
            }
        }
        flat_run_start = None;
        last = Some((x, v));
    }
    let mut min_ratio = T::one();
    if w1max > T::zero() {
        let mut check = |x: T| {
            min_ratio = min_ratio.min(ef.eval_part(x, part)[1].abs() / w1max);
        };
        for &x in &interior {
            check(x);
        }
        if at_a {
            check(a);
        }
        if at_b {
            check(b);
        }
    }
    Ok(ZeroSet { at_a, interior, at_b, min_slope_ratio: min_ratio })
}

/// Zero count of `Re w` on `[a, b)` or `(a, b)`.
pub fn count_zeros<T: Scalar>(ef: &Eigenfunction<T>, half_open: bool) -> Result<usize> {
    Ok(zeros(ef, Part::Re)?.count(half_open))
}

/// Threshold below which a zero is not considered simple.
pub const SIMPLE_ZERO_RATIO: f64 = 1e-10;

/// One assertion of an oscillation check.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationCheck {
    pub n: usize,
    pub rule: String,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OscillationReport {
    pub checks: Vec<OscillationCheck>,
}

impl OscillationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, n: usize, rule: &str, observed: String, expected: String, pass: bool) {
        self.checks.push(OscillationCheck { n, rule: rule.into(), observed, expected, pass });
    }
}

fn window(n: usize) -> Vec<usize> {
    if n == 0 {
        vec![0, 1]
    } else {
        vec![n - 1, n, n + 1]
    }
}

/// Checks zero counts of `efs` (one or two per index) against the oscillation theorems.
pub fn check_oscillation<T: Scalar>(bc: &BoundaryCondition<T>, efs: &[Eigenfunction<T>]) -> Result<OscillationReport> {
    let mut rep = OscillationReport::default();
    for ef in efs {
        let n = ef.record.n;
        match *bc.kind() {
            BoundaryKind::Separated { .. } => {
                let z = zeros(ef, Part::Re)?;
                rep.push(n, "separated: zeros in (a,b)", z.count(false).to_string(), n.to_string(), z.count(false) == n);
                simple_check(&mut rep, n, &z);
            }
            BoundaryKind::RealCoupled { k } => {
                let z = zeros(ef, Part::Re)?;
                let c = z.count(true);
                let w = window(n);
                rep.push(n, "coupled: zeros in [a,b)", c.to_string(), format!("{w:?}"), w.contains(&c));
                simple_check(&mut rep, n, &z);
                let (k11, k12) = (k.m[0][0], k.m[0][1]);
                if k12.abs() <= lit::<T>(1e-12) * (T::one() + Mat2::<T>::norm(&k)) {
                    if k11 > T::zero() {
                        if n == 0 {
                            let cc = z.count_closed();
                            rep.push(n, "k12=0, k11>0: zeros of psi_0 in [a,b]", cc.to_string(), "0".into(), cc == 0);
                        } else {
                            let m = (n - 1) / 2;
                            let e = 2 * m + 2;
                            rep.push(n, "k12=0, k11>0: zeros in [a,b)", c.to_string(), e.to_string(), c == e);
                        }
                    } else {
                        let e = 2 * (n / 2) + 1;
                        rep.push(n, "k12=0, k11<0: zeros in [a,b)", c.to_string(), e.to_string(), c == e);
                    }
                }
            }
            BoundaryKind::ComplexCoupled { .. } => {
                let w = window(n);
                for (part, name) in [(Part::Re, "Re"), (Part::Im, "Im")] {
                    let z = zeros(ef, part)?;
                    let c = z.count(true);
                    rep.push(n, &format!("complex: zeros of {name} psi in [a,b)"), c.to_string(), format!("{w:?}"), w.contains(&c));
                }
                let min = min_modulus(ef);
                rep.push(n, "complex: min |psi| on [a,b]", format!("{min:e}"), "> 0".into(), min > lit(1e-8));
            }
        }
    }
    Ok(rep)
}

fn simple_check<T: Scalar>(rep: &mut OscillationReport, n: usize, z: &ZeroSet<T>) {
    rep.push(
        n,
        "zeros are simple",
        format!("{:e}", z.min_slope_ratio),
        format!("> {SIMPLE_ZERO_RATIO:e}"),
        z.min_slope_ratio > lit(SIMPLE_ZERO_RATIO),
    );
}

/// `min |w|` over dense samples, relative to `max |w|`.
pub fn min_modulus<T: Scalar>(ef: &Eigenfunction<T>) -> T {
    let mesh = ef.mesh();
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for w in mesh.windows(2) {
        for k in 0..=SAMPLES_PER_STEP {
            let x = w[0] + (w[1] - w[0]) * lit(k as f64) / lit(SAMPLES_PER_STEP as f64);
            let v = ef.eval(x)[0].norm();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    lo / hi
}
