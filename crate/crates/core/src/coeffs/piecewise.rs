use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// A piecewise polynomial on `[x₀, x_M]`.
///
/// Segment `i` covers `[breaks[i], breaks[i+1]]` and is stored in the local variable
/// `u = x - breaks[i]`. Evaluation at an interior breakpoint uses the segment to the
/// right; at the right end the last segment is used.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn<T> {
    breaks: Vec<T>,
    pieces: Vec<Polynomial<T>>,
}

impl<T: Scalar> PiecewiseFn<T> {
    pub fn new(breaks: Vec<T>, pieces: Vec<Polynomial<T>>) -> Result<Self> {
        if breaks.len() < 2 || pieces.len() + 1 != breaks.len() {
            return Err(Error::Coefficient(format!(
                "{} breakpoints do not match {} segments",
                breaks.len(),
                pieces.len()
            )));
        }
        if breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::Coefficient("non-finite breakpoint".into()));
        }
        if let Some(w) = breaks.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Coefficient(format!(
                "breakpoints not strictly increasing at {:e}",
                w[1]
            )));
        }
        if let Some(i) = pieces.iter().position(|p| !p.is_finite()) {
            return Err(Error::Coefficient(format!("segment {i} has non-finite coefficients")));
        }
        Ok(Self { breaks, pieces })
    }

    pub fn constant(a: T, b: T, value: T) -> Result<Self> {
        Self::new(vec![a, b], vec![Polynomial::constant(value)])
    }

    /// Builds from segments whose coefficients are given in the global variable `x`.
    pub fn from_global(segments: &[(T, T, Vec<T>)]) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Coefficient("no segments given".into()));
        }
        let mut breaks = vec![segments[0].0];
        let mut pieces = Vec::with_capacity(segments.len());
        for (i, (lo, hi, c)) in segments.iter().enumerate() {
            if i > 0 && *lo != breaks[i] {
                return Err(Error::Coefficient(format!(
                    "segment {i} starts at {lo:e}, previous ended at {:e}",
                    breaks[i]
                )));
            }
            breaks.push(*hi);
            pieces.push(Polynomial::new(c.clone()).shift(*lo));
        }
        Self::new(breaks, pieces)
    }

    /// Step function: `left` on `[a, at)`, `right` on `[at, b]`.
    pub fn step(a: T, b: T, at: T, left: T, right: T) -> Result<Self> {
        if !(at > a && at < b) {
            return Err(Error::Domain(format!("step location {at:e} not interior")));
        }
        Self::new(
            vec![a, at, b],
            vec![Polynomial::constant(left), Polynomial::constant(right)],
        )
    }

    /// Indicator of `[lo, hi] ∩ [a, b]`.
    pub fn indicator(a: T, b: T, lo: T, hi: T) -> Result<Self> {
        let mut breaks = vec![a];
        let mut pieces = Vec::new();
        let lo = lo.max(a);
        let hi = hi.min(b);
        if lo >= hi {
            return Self::constant(a, b, T::zero());
        }
        if lo > a {
            pieces.push(Polynomial::zero());
            breaks.push(lo);
        }
        pieces.push(Polynomial::constant(T::one()));
        breaks.push(hi);
        if hi < b {
            pieces.push(Polynomial::zero());
            breaks.push(b);
        }
        Self::new(breaks, pieces)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Polynomial<T>] {
        &self.pieces
    }

    pub fn interval(&self) -> (T, T) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Index of the segment used for evaluation at `x` (right-continuous).
    pub fn segment_index(&self, x: T) -> usize {
        let n = self.pieces.len();
        let k = self.breaks.partition_point(|b| *b <= x);
        k.clamp(1, n) - 1
    }

    pub fn eval(&self, x: T) -> T {
        let i = self.segment_index(x);
        self.pieces[i].eval(x - self.breaks[i])
    }

    /// Left limit at `x` (equal to `eval` away from breakpoints).
    pub fn eval_left(&self, x: T) -> T {
        let k = self.breaks.partition_point(|b| *b < x);
        let i = k.clamp(1, self.pieces.len()) - 1;
        self.pieces[i].eval(x - self.breaks[i])
    }

    /// The segment polynomial of the piece containing `[lo, ..]`, re-expressed in
    /// `u = x - lo`.
    pub fn local_at(&self, lo: T) -> Polynomial<T> {
        let i = self.segment_index(lo);
        self.pieces[i].shift(lo - self.breaks[i])
    }

    fn check_same_interval(&self, other: &Self) -> Result<()> {
        let (a, b) = self.interval();
        let (c, d) = other.interval();
        let tol = lit::<T>(1e-12) * (T::one() + (b - a).abs());
        if (a - c).abs() > tol || (b - d).abs() > tol {
            return Err(Error::Domain(format!(
                "intervals differ: [{a:e}, {b:e}] vs [{c:e}, {d:e}]"
            )));
        }
        Ok(())
    }

    /// Same function on the union of its breakpoints with `extra` (points outside the
    /// interval are ignored).
    pub fn refine(&self, extra: &[T]) -> Self {
        let mesh = merge_meshes(&self.breaks, extra);
        let pieces = mesh.windows(2).map(|w| self.local_at(w[0])).collect();
        Self { breaks: mesh, pieces }
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&Polynomial<T>, &Polynomial<T>) -> Polynomial<T>,
    ) -> Result<Self> {
        self.check_same_interval(other)?;
        let mesh = merge_meshes(&self.breaks, &other.breaks);
        let pieces = mesh
            .windows(2)
            .map(|w| op(&self.local_at(w[0]), &other.local_at(w[0])))
            .collect();
        Ok(Self { breaks: mesh, pieces })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |p, q| p.add(q))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |p, q| p.sub(q))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |p, q| p.mul(q))
    }

    pub fn scale(&self, k: T) -> Self {
        Self {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(k)).collect(),
        }
    }

    pub fn add_constant(&self, c: T) -> Self {
        Self {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p.add(&Polynomial::constant(c))).collect(),
        }
    }

    fn widths(&self) -> impl Iterator<Item = (T, &Polynomial<T>)> + '_ {
        self.breaks.windows(2).map(|w| w[1] - w[0]).zip(self.pieces.iter())
    }

    pub fn integral(&self) -> T {
        self.widths().map(|(h, p)| p.integral(T::zero(), h)).sum()
    }

    pub fn integral_abs(&self) -> T {
        self.widths().map(|(h, p)| p.abs_integral(T::zero(), h)).sum()
    }

    /// `∫ₐˣ f` as a continuous piecewise polynomial on the same mesh.
    pub fn antiderivative(&self) -> Self {
        let mut acc = T::zero();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (h, p) in self.widths() {
            let anti = p.antiderivative().add(&Polynomial::constant(acc));
            acc = anti.eval(h);
            pieces.push(anti);
        }
        Self { breaks: self.breaks.clone(), pieces }
    }

    /// Minimum of segment `i` over its closed subinterval.
    pub fn segment_min(&self, i: usize) -> T {
        let h = self.breaks[i + 1] - self.breaks[i];
        self.pieces[i].min_on(T::zero(), h)
    }

    pub fn min_value(&self) -> T {
        (0..self.pieces.len())
            .map(|i| self.segment_min(i))
            .fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn max_abs(&self) -> T {
        (0..self.pieces.len())
            .map(|i| {
                let h = self.breaks[i + 1] - self.breaks[i];
                self.pieces[i].max_on(T::zero(), h).abs().max(self.segment_min(i).abs())
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// True when every segment polynomial is exactly zero.
    pub fn is_identically_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }
}

/// `∫ₐᵇ |f − g|`, exact up to root isolation of the difference on each merged cell.
pub fn l1_distance<T: Scalar>(f: &PiecewiseFn<T>, g: &PiecewiseFn<T>) -> Result<T> {
    Ok(f.sub(g)?.integral_abs())
}

/// Sorted union of two meshes, clipped to the first mesh's interval, with near-duplicate
/// points collapsed.
pub(crate) fn merge_meshes<T: Scalar>(base: &[T], extra: &[T]) -> Vec<T> {
    let a = base[0];
    let b = *base.last().unwrap();
    let tol = lit::<T>(1e-14) * (T::one() + (b - a).abs());
    let mut all: Vec<T> = base
        .iter()
        .copied()
        .chain(extra.iter().copied().filter(|x| *x > a + tol && *x < b - tol))
        .collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<T> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if x - last <= tol => {
                // Keep the base endpoint when collapsing at the right end.
                if x == b {
                    *out.last_mut().unwrap() = b;
                }
            }
            _ => out.push(x),
        }
    }
    if out.len() < 2 {
        return vec![a, b];
    }
    *out.last_mut().unwrap() = b;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    type F = PiecewiseFn<f64>;

    #[test]
    fn evaluation_is_right_continuous() {
        let f = F::step(0.0, 1.0, 0.5, 1.0, 3.0).unwrap();
        assert_eq!(f.eval(0.5), 3.0);
        assert_eq!(f.eval_left(0.5), 1.0);
        assert_eq!(f.eval(1.0), 3.0);
        assert_eq!(f.eval(0.0), 1.0);
    }

    #[test]
    fn global_coefficients_are_shifted() {
        let f = F::from_global(&[(1.0, 2.0, vec![0.0, 0.0, 1.0])]).unwrap();
        assert!((f.eval(1.5) - 2.25).abs() < 1e-14);
        assert!((f.integral() - 7.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn l1_examples() {
        let one = F::constant(0.0, 2.0, 1.0).unwrap();
        let zero = F::constant(0.0, 2.0, 0.0).unwrap();
        assert_eq!(l1_distance(&one, &zero).unwrap(), 2.0);
        let x = F::from_global(&[(0.0, 1.0, vec![0.0, 1.0])]).unwrap();
        let z = F::constant(0.0, 1.0, 0.0).unwrap();
        assert!((l1_distance(&x, &z).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(l1_distance(&x, &x).unwrap(), 0.0);
        assert!(l1_distance(&x, &one).is_err());
    }

    #[test]
    fn antiderivative_is_continuous() {
        let f = F::step(0.0, 2.0, 1.0, 1.0, -2.0).unwrap();
        let g = f.antiderivative();
        assert!((g.eval_left(1.0) - g.eval(1.0)).abs() < 1e-15);
        assert!((g.eval(2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unordered_breaks() {
        assert!(F::new(vec![0.0, 0.0], vec![Polynomial::constant(1.0)]).is_err());
    }
}
