//! Minimal 2×2 matrix algebra over real or complex entries.

use crate::scalar::{Field, Scalar};
use num_complex::Complex;
use std::ops::{Add, Mul, Neg, Sub};

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<S> {
    pub m: [[S; 2]; 2],
}

impl<S: Copy> Mat2<S> {
    pub const fn new(m00: S, m01: S, m10: S, m11: S) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn from_rows(m: [[S; 2]; 2]) -> Self {
        Self { m }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.m[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn map<U: Copy>(&self, f: impl Fn(S) -> U) -> Mat2<U> {
        Mat2::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }
}

impl<S> Mat2<S>
where
    S: Copy + Add<Output = S> + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    pub fn det(&self) -> S {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> S {
        self.m[0][0] + self.m[1][1]
    }

    /// Adjugate; equals the inverse when the determinant is one.
    pub fn adjugate(&self) -> Self {
        Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0])
    }

    pub fn apply(&self, v: [S; 2]) -> [S; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }
}

impl<S: Copy + Add<Output = S> + Mul<Output = S>> Mul for Mat2<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl<S: Copy + Add<Output = S>> Add for Mat2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl<S: Copy + Sub<Output = S>> Sub for Mat2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl<S: Copy + Neg<Output = S>> Neg for Mat2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.m[0][0], -self.m[0][1], -self.m[1][0], -self.m[1][1])
    }
}

impl<T: Scalar> Mat2<T> {
    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(|x| x * k)
    }

    pub fn norm(&self) -> T {
        self.m.iter().flatten().map(|x| *x * *x).sum::<T>().sqrt()
    }

    pub fn to_complex(&self) -> Mat2<Complex<T>> {
        self.map(|x| Complex::new(x, T::zero()))
    }
}

impl<T: Scalar> Mat2<Complex<T>> {
    pub fn czeros() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(z, z, z, z)
    }

    pub fn cidentity() -> Self {
        Mat2::<T>::identity().to_complex()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().map(|z| z.conj())
    }

    pub fn scale_c(&self, k: Complex<T>) -> Self {
        self.map(|z| z * k)
    }

    pub fn norm(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.m.iter().flatten().all(|z| z.im.abs() <= tol)
    }

    pub fn re(&self) -> Mat2<T> {
        self.map(|z| z.re)
    }
}

/// Largest-magnitude 2×2 minor of the 2×4 block matrix `(A|B)`, relative to its squared norm.
///
/// A value well above zero means the block has full rank.
pub fn rank_margin<T: Scalar>(a: &Mat2<Complex<T>>, b: &Mat2<Complex<T>>) -> T {
    let rows: [[Complex<T>; 4]; 2] = [
        [a.m[0][0], a.m[0][1], b.m[0][0], b.m[0][1]],
        [a.m[1][0], a.m[1][1], b.m[1][0], b.m[1][1]],
    ];
    let mut best = T::zero();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let minor = rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i];
            best = best.max(minor.norm());
        }
    }
    let scale = a.norm().powi(2) + b.norm().powi(2);
    if scale > T::zero() {
        best / scale
    } else {
        T::zero()
    }
}

/// Null vector of a 2×2 matrix assumed to have rank one.
pub fn null_vector<T: Scalar, S: Field<T>>(m: &Mat2<S>) -> [S; 2] {
    let r0 = m.m[0][0].modulus().powi(2) + m.m[0][1].modulus().powi(2);
    let r1 = m.m[1][0].modulus().powi(2) + m.m[1][1].modulus().powi(2);
    let row = if r0 >= r1 { m.m[0] } else { m.m[1] };
    [row[1], -row[0]]
}
