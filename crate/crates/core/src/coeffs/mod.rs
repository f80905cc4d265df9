//! Coefficient functions `1/p, q, r, s` and their mollification.
//!
//! All coefficients are piecewise polynomials. A [`CoefficientSet`] also carries the
//! merged cell mesh that the integrators walk, together with any point interfaces
//! `(y, y^[1]) ↦ (y, y^[1] + α y)`.

mod mollify;
mod piecewise;
mod poly;

pub use mollify::{bump_constant, bump_kernel, mollify, MollifiedSet};
pub use piecewise::{l1_distance, PiecewiseFn};
pub use poly::Polynomial;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use piecewise::merge_meshes;

/// A point interaction at `at`: the quasi-derivative jumps by `strength · y(at)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface<T> {
    pub at: T,
    pub strength: T,
}

/// One cell of the merged mesh with all four coefficients as polynomials in `u = x - x0`.
#[derive(Debug, Clone)]
pub struct Cell<T> {
    pub x0: T,
    pub x1: T,
    pub inv_p: Polynomial<T>,
    pub q: Polynomial<T>,
    pub r: Polynomial<T>,
    pub s: Polynomial<T>,
    /// Interface strength applied when crossing `x1` from left to right (zero if none).
    pub jump_at_end: T,
}

/// Coefficient values `(1/p, q, r, s)` at a point.
#[derive(Debug, Clone, Copy)]
pub struct CoeffValues<T> {
    pub inv_p: T,
    pub q: T,
    pub r: T,
    pub s: T,
}

impl<T: Scalar> Cell<T> {
    #[inline]
    pub fn values(&self, x: T) -> CoeffValues<T> {
        let u = x - self.x0;
        CoeffValues {
            inv_p: self.inv_p.eval(u),
            q: self.q.eval(u),
            r: self.r.eval(u),
            s: self.s.eval(u),
        }
    }

    pub fn width(&self) -> T {
        self.x1 - self.x0
    }
}

/// The quadruple `(1/p, q, r, s)` on a compact interval, with optional interfaces.
#[derive(Debug, Clone)]
pub struct CoefficientSet<T> {
    a: T,
    b: T,
    inv_p: PiecewiseFn<T>,
    q: PiecewiseFn<T>,
    r: PiecewiseFn<T>,
    s: PiecewiseFn<T>,
    interfaces: Vec<Interface<T>>,
    cells: Vec<Cell<T>>,
}

impl<T: Scalar> CoefficientSet<T> {
    /// Validates positivity of `1/p` and `r` segment by segment and builds the cell mesh.
    pub fn new(
        inv_p: PiecewiseFn<T>,
        q: PiecewiseFn<T>,
        r: PiecewiseFn<T>,
        s: PiecewiseFn<T>,
    ) -> Result<Self> {
        let (a, b) = inv_p.interval();
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Coefficient(format!("invalid interval [{a:e}, {b:e}]")));
        }
        for (name, f) in [("q", &q), ("r", &r), ("s", &s)] {
            let (c, d) = f.interval();
            let tol = lit::<T>(1e-12) * (T::one() + (b - a).abs());
            if (c - a).abs() > tol || (d - b).abs() > tol {
                return Err(Error::Coefficient(format!(
                    "{name} is defined on [{c:e}, {d:e}], expected [{a:e}, {b:e}]"
                )));
            }
        }
        for (name, f) in [("inv_p", &inv_p), ("r", &r)] {
            for i in 0..f.pieces().len() {
                let m = f.segment_min(i);
                if !(m > T::zero()) {
                    let x = f.breakpoints()[i];
                    return Err(Error::Coefficient(format!(
                        "{name} has non-positive minimum {m:e} on the segment starting at {x:e}"
                    )));
                }
            }
        }
        for (name, f) in [("inv_p", &inv_p), ("q", &q), ("r", &r), ("s", &s)] {
            if !f.integral_abs().is_finite() {
                return Err(Error::Coefficient(format!("{name} has infinite L1 norm")));
            }
        }
        let mut set = Self {
            a,
            b,
            inv_p,
            q,
            r,
            s,
            interfaces: Vec::new(),
            cells: Vec::new(),
        };
        set.rebuild_cells();
        Ok(set)
    }

    /// Constant coefficients on `[a, b]`.
    pub fn constant(a: T, b: T, inv_p: T, q: T, r: T, s: T) -> Result<Self> {
        Self::new(
            PiecewiseFn::constant(a, b, inv_p)?,
            PiecewiseFn::constant(a, b, q)?,
            PiecewiseFn::constant(a, b, r)?,
            PiecewiseFn::constant(a, b, s)?,
        )
    }

    /// Attaches point interfaces. Zero-strength entries are dropped.
    pub fn with_interfaces(mut self, interfaces: Vec<Interface<T>>) -> Result<Self> {
        let mut list: Vec<Interface<T>> =
            interfaces.into_iter().filter(|i| i.strength != T::zero()).collect();
        for i in &list {
            if !(i.at > self.a && i.at < self.b) || !i.strength.is_finite() {
                return Err(Error::Coefficient(format!(
                    "interface at {:e} with strength {:e} is not an interior finite point",
                    i.at, i.strength
                )));
            }
        }
        list.sort_by(|x, y| x.at.partial_cmp(&y.at).unwrap());
        if list.windows(2).any(|w| w[0].at == w[1].at) {
            return Err(Error::Coefficient("two interfaces at the same point".into()));
        }
        self.interfaces = list;
        self.rebuild_cells();
        Ok(self)
    }

    fn rebuild_cells(&mut self) {
        let mut mesh = self.inv_p.breakpoints().to_vec();
        for f in [&self.q, &self.r, &self.s] {
            mesh = merge_meshes(&mesh, f.breakpoints());
        }
        let pts: Vec<T> = self.interfaces.iter().map(|i| i.at).collect();
        mesh = merge_meshes(&mesh, &pts);
        let tol = lit::<T>(1e-14) * (T::one() + (self.b - self.a).abs());
        self.cells = mesh
            .windows(2)
            .map(|w| {
                let jump = self
                    .interfaces
                    .iter()
                    .find(|i| (i.at - w[1]).abs() <= tol)
                    .map_or(T::zero(), |i| i.strength);
                Cell {
                    x0: w[0],
                    x1: w[1],
                    inv_p: self.inv_p.local_at(w[0]),
                    q: self.q.local_at(w[0]),
                    r: self.r.local_at(w[0]),
                    s: self.s.local_at(w[0]),
                    jump_at_end: jump,
                }
            })
            .collect();
    }

    pub fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }

    pub fn inv_p(&self) -> &PiecewiseFn<T> {
        &self.inv_p
    }

    pub fn q(&self) -> &PiecewiseFn<T> {
        &self.q
    }

    pub fn r(&self) -> &PiecewiseFn<T> {
        &self.r
    }

    pub fn s(&self) -> &PiecewiseFn<T> {
        &self.s
    }

    pub fn interfaces(&self) -> &[Interface<T>] {
        &self.interfaces
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    /// Right-continuous coefficient values at `x`.
    pub fn values(&self, x: T) -> CoeffValues<T> {
        self.cells[self.cell_index(x)].values(x)
    }

    /// Index of the cell used at `x` (right-continuous, last cell at `b`).
    pub fn cell_index(&self, x: T) -> usize {
        let k = self.cells.partition_point(|c| c.x0 <= x);
        k.clamp(1, self.cells.len()) - 1
    }

    fn replaced(&self, inv_p: PiecewiseFn<T>, q: PiecewiseFn<T>, r: PiecewiseFn<T>, s: PiecewiseFn<T>) -> Result<Self> {
        Self::new(inv_p, q, r, s)?.with_interfaces(self.interfaces.clone())
    }

    pub fn with_inv_p(&self, inv_p: PiecewiseFn<T>) -> Result<Self> {
        self.replaced(inv_p, self.q.clone(), self.r.clone(), self.s.clone())
    }

    pub fn with_q(&self, q: PiecewiseFn<T>) -> Result<Self> {
        self.replaced(self.inv_p.clone(), q, self.r.clone(), self.s.clone())
    }

    pub fn with_r(&self, r: PiecewiseFn<T>) -> Result<Self> {
        self.replaced(self.inv_p.clone(), self.q.clone(), r, self.s.clone())
    }

    pub fn with_s(&self, s: PiecewiseFn<T>) -> Result<Self> {
        self.replaced(self.inv_p.clone(), self.q.clone(), self.r.clone(), s)
    }

    /// Integral distance `∫(|1/p−1/p₀| + |q−q₀| + |r−r₀| + |s−s₀|)`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        Ok(l1_distance(&self.inv_p, &other.inv_p)?
            + l1_distance(&self.q, &other.q)?
            + l1_distance(&self.r, &other.r)?
            + l1_distance(&self.s, &other.s)?)
    }
}
