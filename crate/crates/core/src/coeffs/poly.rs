use crate::roots::bisect_sign;
use crate::scalar::{lit, Scalar};

/// Dense polynomial `c[0] + c[1] u + c[2] u² + …` in a local variable `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == T::zero() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    #[inline]
    pub fn eval(&self, u: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * lit(k as f64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at `u = 0`.
    pub fn antiderivative(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(T::zero());
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &v)| v / lit((k + 1) as f64)),
        );
        Self::new(c)
    }

    pub fn integral(&self, lo: T, hi: T) -> T {
        let p = self.antiderivative();
        p.eval(hi) - p.eval(lo)
    }

    /// The polynomial `u ↦ p(u + d)`.
    pub fn shift(&self, d: T) -> Self {
        if d == T::zero() {
            return self.clone();
        }
        // Repeated synthetic division (Taylor shift).
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += d * next;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(T::zero())
                        + o.coeffs.get(i).copied().unwrap_or(T::zero())
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Real roots in `[lo, hi]`, sorted, found by isolating monotone pieces between
    /// critical points.
    pub fn roots_in(&self, lo: T, hi: T) -> Vec<T> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r >= lo && r <= hi { vec![r] } else { Vec::new() };
        }
        let mut knots = vec![lo];
        knots.extend(self.derivative().roots_in(lo, hi));
        knots.push(hi);
        let scale = self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        let zero_tol = scale * T::epsilon() * lit(8.0);
        let mut roots: Vec<T> = Vec::new();
        let x_tol = (hi - lo).abs() * T::epsilon() * lit(4.0);
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa.abs() <= zero_tol {
                roots.push(a);
            }
            if fa.abs() > zero_tol && fb.abs() > zero_tol && (fa > T::zero()) != (fb > T::zero()) {
                roots.push(bisect_sign(|u| self.eval(u), a, b, x_tol, 200));
            }
        }
        if self.eval(hi).abs() <= zero_tol {
            roots.push(hi);
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= x_tol * lit(4.0));
        roots
    }

    /// Minimum over the closed interval `[lo, hi]`.
    pub fn min_on(&self, lo: T, hi: T) -> T {
        let mut m = self.eval(lo).min(self.eval(hi));
        for r in self.derivative().roots_in(lo, hi) {
            m = m.min(self.eval(r));
        }
        m
    }

    pub fn max_on(&self, lo: T, hi: T) -> T {
        -self.scale(-T::one()).min_on(lo, hi)
    }

    /// `∫ |p|` over `[lo, hi]`, exact up to root isolation.
    pub fn abs_integral(&self, lo: T, hi: T) -> T {
        let anti = self.antiderivative();
        let mut knots = vec![lo];
        knots.extend(self.roots_in(lo, hi));
        knots.push(hi);
        knots
            .windows(2)
            .map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Polynomial::<f64>::new(vec![1.0, -2.0, 0.5, 3.0]);
        let q = p.shift(0.7);
        for u in [-1.0, 0.0, 0.3, 2.0] {
            assert!((q.eval(u) - p.eval(u + 0.7)).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_of_cubic() {
        // (u - 0.2)(u - 0.5)(u - 0.9)
        let p = Polynomial::<f64>::new(vec![-0.2, 1.0])
            .mul(&Polynomial::new(vec![-0.5, 1.0]))
            .mul(&Polynomial::new(vec![-0.9, 1.0]));
        let r = p.roots_in(0.0, 1.0);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn abs_integral_splits_at_roots() {
        let p = Polynomial::<f64>::new(vec![-0.5, 1.0]);
        assert!((p.abs_integral(0.0, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn min_uses_critical_points() {
        let p = Polynomial::<f64>::new(vec![1.0, -2.0, 1.0]); // (u-1)^2
        assert!(p.min_on(0.0, 2.0).abs() < 1e-15);
        assert!((p.max_on(0.0, 3.0) - 4.0).abs() < 1e-15);
    }
}
