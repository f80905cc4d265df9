#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slq_core::boundary::BoundaryCondition;
use slq_core::coeffs::{CoefficientSet, PiecewiseFn};
use slq_core::linalg::Mat2;
use std::f64::consts::PI;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn breaks(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Vec<f64> {
    let k = rng.gen_range(1..=3);
    let mut pts: Vec<f64> = (0..k).map(|_| a + (b - a) * rng.gen_range(0.1..0.9)).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
    pts
}

/// A piecewise polynomial of degree ≤ `deg` whose values lie in `[lo, hi]`.
fn bounded(rng: &mut ChaCha8Rng, a: f64, b: f64, lo: f64, hi: f64, deg: usize) -> PiecewiseFn<f64> {
    let pts = breaks(rng, a, b);
    let segs: Vec<(f64, f64, Vec<f64>)> = pts
        .windows(2)
        .map(|w| {
            // Combination of shifted Bernstein-like terms kept within range.
            let base = rng.gen_range(lo..hi);
            let room = (hi - base).min(base - lo) / (deg.max(1) as f64);
            let mut poly = vec![0.0; deg + 1];
            poly[0] = base;
            let h = w[1] - w[0];
            for (d, coeff) in poly.iter_mut().enumerate().skip(1) {
                // |c (u/h)^d| ≤ room on the segment, in the local variable u = x − w[0].
                let c = rng.gen_range(-room..room) / h.powi(d as i32);
                *coeff = c;
            }
            // Convert local coefficients to global ones by a Taylor shift of −w[0].
            (w[0], w[1], shift_to_global(&poly, w[0]))
        })
        .collect();
    PiecewiseFn::from_global(&segs).unwrap()
}

fn shift_to_global(local: &[f64], x0: f64) -> Vec<f64> {
    // p(u) with u = x − x0, expanded in powers of x.
    let n = local.len();
    let mut out = vec![0.0; n];
    for (d, &c) in local.iter().enumerate() {
        // c (x − x0)^d = c Σ_j C(d, j) x^j (−x0)^{d−j}
        let mut binom = 1.0;
        for j in 0..=d {
            out[j] += c * binom * (-x0).powi((d - j) as i32);
            binom = binom * (d - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// A random problem on `(0, 1)` with piecewise `1/p`, `q`, `r`, `s`.
pub fn random_coeffs(rng: &mut ChaCha8Rng) -> CoefficientSet<f64> {
    let (a, b) = (0.0, 1.0);
    let inv_p = bounded(rng, a, b, 0.5, 2.0, 1);
    let q = bounded(rng, a, b, -10.0, 10.0, 3);
    let r = bounded(rng, a, b, 0.5, 2.0, 2);
    let s = bounded(rng, a, b, -2.0, 2.0, 0);
    CoefficientSet::new(inv_p, q, r, s).unwrap()
}

/// A random problem on `(0, 1)` whose coefficients are constant on each piece.
pub fn random_step_coeffs(rng: &mut ChaCha8Rng) -> CoefficientSet<f64> {
    let (a, b) = (0.0, 1.0);
    let inv_p = bounded(rng, a, b, 0.5, 2.0, 0);
    let q = bounded(rng, a, b, -10.0, 10.0, 0);
    let r = bounded(rng, a, b, 0.5, 2.0, 0);
    let s = bounded(rng, a, b, -2.0, 2.0, 0);
    CoefficientSet::new(inv_p, q, r, s).unwrap()
}

/// Random `K ∈ SL(2, ℝ)` with `k₁₁ > 0, k₁₂ ≤ 0`.
pub fn case_a(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let k11 = rng.gen_range(0.2..3.0);
    let k12 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..-0.05) };
    let k21 = rng.gen_range(-2.0..2.0);
    Mat2::new(k11, k12, k21, (1.0 + k12 * k21) / k11)
}

/// Random `K ∈ SL(2, ℝ)` with `k₁₁ ≤ 0, k₁₂ < 0`.
pub fn case_b(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let k12 = rng.gen_range(-3.0..-0.2);
    if rng.gen_bool(0.2) {
        Mat2::new(0.0, k12, -1.0 / k12, rng.gen_range(-2.0..2.0))
    } else {
        let k11 = rng.gen_range(-3.0..-0.2);
        let k21 = rng.gen_range(-2.0..2.0);
        Mat2::new(k11, k12, k21, (1.0 + k12 * k21) / k11)
    }
}

/// Random `K ∈ SL(2, ℝ)` with `|k₁₁| ≥ 0.3`.
pub fn any_k(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let k11 = s * rng.gen_range(0.3..2.5);
    let k12 = rng.gen_range(-2.0..2.0);
    let k21 = rng.gen_range(-2.0..2.0);
    Mat2::new(k11, k12, k21, (1.0 + k12 * k21) / k11)
}

pub fn gamma(rng: &mut ChaCha8Rng) -> f64 {
    let g = rng.gen_range(0.1..PI - 0.1);
    if rng.gen_bool(0.5) {
        g
    } else {
        -g
    }
}

/// A random self-adjoint condition: separated, real coupled or complex coupled.
pub fn any_bc(rng: &mut ChaCha8Rng) -> BoundaryCondition<f64> {
    match rng.gen_range(0..3) {
        0 => BoundaryCondition::separated(rng.gen_range(0.0..PI), rng.gen_range(0.05..=PI)).unwrap(),
        1 => BoundaryCondition::real_coupled(any_k(rng)).unwrap(),
        _ => {
            let k = any_k(rng);
            BoundaryCondition::complex_coupled(gamma(rng), k).unwrap()
        }
    }
}
