use super::piecewise::merge_meshes;
use super::{l1_distance, CoefficientSet, PiecewiseFn, Polynomial};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;
use crate::scalar::{lit, Scalar};
use std::sync::OnceLock;

fn raw_bump(x: f64) -> f64 {
    let t = x * x - 1.0;
    if t >= 0.0 {
        0.0
    } else {
        (1.0 / t).exp()
    }
}

/// Normalising constant `C` of the bump `ρ(x) = C e^{1/(x²−1)}` on `(−1, 1)`.
pub fn bump_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| 1.0 / adaptive_gk(raw_bump, -1.0, 1.0, 1e-15))
}

/// Scaled bump `ρ_{1/m}(x) = m ρ(m x)`, supported in `(−1/m, 1/m)`.
pub fn bump_kernel<T: Scalar>(x: T, m: u32) -> T {
    let mf = m as f64;
    lit(mf * bump_constant() * raw_bump(mf * x.to_f64().unwrap()))
}

/// A coefficient set with `1/p` and `s` replaced by smooth approximants.
#[derive(Debug, Clone)]
pub struct MollifiedSet<T> {
    pub m: u32,
    /// `1/p_m`, the truncated convolution of `1/p` with `ρ_{1/m}`.
    pub inv_p: PiecewiseFn<T>,
    /// Smooth surrogate for `s` vanishing within `1/m` of either endpoint.
    pub s: PiecewiseFn<T>,
    /// `(‖1/p_m − 1/p‖₁, ‖s_m − s‖₁)`.
    pub l1_gap: (T, T),
    pub coeffs: CoefficientSet<T>,
}

// C∞ transition from 0 (t ≤ 0) to 1 (t ≥ 1).
fn smoothstep(t: f64) -> f64 {
    let f = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        f(t) / (f(t) + f(1.0 - t))
    }
}

fn convolve(f: &PiecewiseFn<f64>, m: u32, x: f64) -> f64 {
    let (a, b) = f.interval();
    let h = 1.0 / m as f64;
    let lo = (x - h).max(a);
    let hi = (x + h).min(b);
    if lo >= hi {
        return 0.0;
    }
    let mut knots = vec![lo];
    knots.extend(f.breakpoints().iter().copied().filter(|&t| t > lo && t < hi));
    knots.push(hi);
    knots
        .windows(2)
        .map(|w| {
            let i = f.segment_index(0.5 * (w[0] + w[1]));
            let x0 = f.breakpoints()[i];
            let p = &f.pieces()[i];
            adaptive_gk(|y| bump_kernel(x - y, m) * p.eval(y - x0), w[0], w[1], 1e-14)
        })
        .sum()
}

const LOBATTO: [f64; 4] = [0.0, 0.276_393_202_250_021, 0.723_606_797_749_979, 1.0];

fn interpolate(h: f64, values: [f64; 4]) -> Polynomial<f64> {
    let xs = LOBATTO.map(|t| t * h);
    let mut c = values;
    for j in 1..4 {
        for i in (j..4).rev() {
            c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
        }
    }
    // Expand the Newton form into monomials.
    let mut p = Polynomial::constant(c[3]);
    for i in (0..3).rev() {
        p = p.mul(&Polynomial::new(vec![-xs[i], 1.0])).add(&Polynomial::constant(c[i]));
    }
    p
}

fn resample(mesh: &[f64], g: impl Fn(f64) -> f64 + Sync) -> Result<PiecewiseFn<f64>> {
    use rayon::prelude::*;
    let pieces: Vec<Polynomial<f64>> = mesh
        .par_windows(2)
        .map(|w| {
            let h = w[1] - w[0];
            interpolate(h, LOBATTO.map(|t| g(w[0] + t * h)))
        })
        .collect();
    PiecewiseFn::new(mesh.to_vec(), pieces)
}

fn to_f64<T: Scalar>(f: &PiecewiseFn<T>) -> PiecewiseFn<f64> {
    let pieces = f
        .pieces()
        .iter()
        .map(|p| Polynomial::new(p.coeffs().iter().map(|c| c.to_f64().unwrap()).collect()))
        .collect();
    let breaks = f.breakpoints().iter().map(|c| c.to_f64().unwrap()).collect();
    PiecewiseFn::new(breaks, pieces).expect("conversion preserves validity")
}

fn from_f64<T: Scalar>(f: &PiecewiseFn<f64>) -> PiecewiseFn<T> {
    let pieces = f
        .pieces()
        .iter()
        .map(|p| Polynomial::new(p.coeffs().iter().map(|&c| lit(c)).collect()))
        .collect();
    let breaks = f.breakpoints().iter().map(|&c| lit(c)).collect();
    PiecewiseFn::new(breaks, pieces).expect("conversion preserves validity")
}

/// Replaces `1/p` by its truncated convolution with `ρ_{1/m}` and `s` by a cut-off
/// mollification, both resampled as continuous piecewise cubics.
///
/// The base mesh has `8m` uniform cells; cells within `1/m` of any input breakpoint,
/// and in the cut-off transition layers, are further split to width `1/(32m)`.
pub fn mollify<T: Scalar>(coeffs: &CoefficientSet<T>, m: u32) -> Result<MollifiedSet<T>> {
    if m == 0 {
        return Err(Error::Domain("mollification index must be positive".into()));
    }
    let inv_p = to_f64(coeffs.inv_p());
    let s = to_f64(coeffs.s());
    let (a, b) = inv_p.interval();
    let h = 1.0 / m as f64;

    let coarse = 8 * m as usize;
    let mut mesh: Vec<f64> = (0..=coarse).map(|k| a + (b - a) * k as f64 / coarse as f64).collect();
    let fine = h / 32.0;
    let mut singular: Vec<f64> = inv_p.breakpoints().to_vec();
    singular.extend_from_slice(s.breakpoints());
    let mut extra = Vec::new();
    for &c in &singular {
        let n = 64;
        for k in 0..=n {
            extra.push(c - h + k as f64 * fine);
        }
    }
    for start in [a + h, b - 2.0 * h] {
        for k in 0..=32 {
            extra.push(start + k as f64 * fine);
        }
    }
    mesh = merge_meshes(&mesh, &extra);

    let inv_p_m = resample(&mesh, |x| convolve(&inv_p, m, x))?;
    let cutoff = |x: f64| smoothstep(m as f64 * (x - a) - 1.0) * smoothstep(m as f64 * (b - x) - 1.0);
    let s_m = if s.is_identically_zero() {
        PiecewiseFn::constant(a, b, 0.0)?
    } else {
        resample(&mesh, |x| {
            let c = cutoff(x);
            if c == 0.0 {
                0.0
            } else {
                c * convolve(&s, m, x)
            }
        })?
    };
    let min = inv_p_m.min_value();
    if !(min > 0.0) {
        return Err(Error::Coefficient(format!(
            "mollified 1/p has non-positive minimum {min:e}"
        )));
    }
    let inv_p_t: PiecewiseFn<T> = from_f64(&inv_p_m);
    let s_t: PiecewiseFn<T> = from_f64(&s_m);
    let l1_gap = (l1_distance(&inv_p_t, coeffs.inv_p())?, l1_distance(&s_t, coeffs.s())?);
    let set = CoefficientSet::new(inv_p_t.clone(), coeffs.q().clone(), coeffs.r().clone(), s_t.clone())?
        .with_interfaces(coeffs.interfaces().to_vec())?;
    Ok(MollifiedSet { m, inv_p: inv_p_t, s: s_t, l1_gap, coeffs: set })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_limits() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let p = Polynomial::<f64>::new(vec![1.0, -0.5, 2.0, 0.25]);
        let q = interpolate(0.3, LOBATTO.map(|t| p.eval(t * 0.3)));
        for (x, y) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
