//! Self-adjoint boundary conditions `A (y(a), y1(a))ᵀ + B (y(b), y1(b))ᵀ = 0` and
//! their classification in boundary-condition space.

use crate::error::{Error, Result};
use crate::linalg::{rank_margin, Mat2};
use crate::scalar::{lit, Scalar};
use num_complex::Complex;

/// Normal form of a self-adjoint boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind<T> {
    /// `cos α y(a) − sin α y1(a) = 0`, `cos β y(b) − sin β y1(b) = 0`.
    Separated { alpha: T, beta: T },
    /// `(y(b), y1(b)) = K (y(a), y1(a))` with `det K = 1`.
    RealCoupled { k: Mat2<T> },
    /// `(y(b), y1(b)) = e^{iγ} K (y(a), y1(a))`.
    ComplexCoupled { gamma: T, k: Mat2<T> },
}

/// A validated self-adjoint boundary condition and its matrix pair `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition<T> {
    kind: BoundaryKind<T>,
    a: Mat2<Complex<T>>,
    b: Mat2<Complex<T>>,
}

/// Verdict of [`is_self_adjoint`] with the two residuals it is based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfAdjointCheck<T> {
    pub self_adjoint: bool,
    /// Largest 2×2 minor of `(A|B)` relative to `‖A‖² + ‖B‖²`.
    pub rank_margin: T,
    /// `‖AEA* − BEB*‖ / (‖A‖² + ‖B‖²)`.
    pub residual: T,
}

const SA_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;
const DET_TOL: f64 = 1e-12;
/// Floating-point tolerance used for the equalities and ties in region predicates.
pub const REGION_TOL: f64 = 1e-12;

fn e_mat<T: Scalar>() -> Mat2<Complex<T>> {
    Mat2::new(T::zero(), -T::one(), T::one(), T::zero()).to_complex()
}

pub fn is_self_adjoint<T: Scalar>(a: &Mat2<Complex<T>>, b: &Mat2<Complex<T>>) -> SelfAdjointCheck<T> {
    let e = e_mat::<T>();
    let lhs = *a * e * a.adjoint();
    let rhs = *b * e * b.adjoint();
    let scale = a.norm().powi(2) + b.norm().powi(2);
    let residual = if scale > T::zero() { (lhs - rhs).norm() / scale } else { T::infinity() };
    let margin = rank_margin(a, b);
    SelfAdjointCheck {
        self_adjoint: margin > lit(RANK_TOL) && residual <= lit(SA_TOL),
        rank_margin: margin,
        residual,
    }
}

fn wrap_angle<T: Scalar>(x: T, lower_open: bool) -> T {
    // Into [0, π) or (0, π].
    let pi = T::PI();
    let mut y = x - (x / pi).floor() * pi;
    if y < T::zero() {
        y += pi;
    }
    if y >= pi {
        y -= pi;
    }
    if lower_open && y <= T::zero() {
        y += pi;
    }
    y
}

impl<T: Scalar> BoundaryCondition<T> {
    pub fn separated(alpha: T, beta: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha < T::PI()) {
            return Err(Error::Boundary(format!("alpha = {alpha:e} outside [0, π)")));
        }
        if !(beta > T::zero() && beta <= T::PI()) {
            return Err(Error::Boundary(format!("beta = {beta:e} outside (0, π]")));
        }
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let z = T::zero();
        let a = Mat2::new(ca, -sa, z, z).to_complex();
        let b = Mat2::new(z, z, cb, -sb).to_complex();
        Self::checked(BoundaryKind::Separated { alpha, beta }, a, b)
    }

    pub fn real_coupled(k: Mat2<T>) -> Result<Self> {
        Self::check_k(&k)?;
        let a = k.to_complex();
        let b = (-Mat2::<T>::identity()).to_complex();
        Self::checked(BoundaryKind::RealCoupled { k }, a, b)
    }

    pub fn complex_coupled(gamma: T, k: Mat2<T>) -> Result<Self> {
        Self::check_k(&k)?;
        if !(gamma > -T::PI() && gamma < T::PI()) || gamma == T::zero() {
            return Err(Error::Boundary(format!("gamma = {gamma:e} outside (−π, 0) ∪ (0, π)")));
        }
        let a = k.to_complex().scale_c(Complex::from_polar(T::one(), gamma));
        let b = (-Mat2::<T>::identity()).to_complex();
        Self::checked(BoundaryKind::ComplexCoupled { gamma, k }, a, b)
    }

    /// Coupled condition `e^{iγ}K`; `γ = 0` gives the real coupled case.
    pub fn coupled(gamma: T, k: Mat2<T>) -> Result<Self> {
        if gamma == T::zero() {
            Self::real_coupled(k)
        } else {
            Self::complex_coupled(gamma, k)
        }
    }

    pub fn dirichlet() -> Self {
        Self::separated(T::zero(), T::PI()).expect("valid")
    }

    pub fn neumann() -> Self {
        Self::separated(T::FRAC_PI_2(), T::FRAC_PI_2()).expect("valid")
    }

    pub fn periodic() -> Self {
        Self::real_coupled(Mat2::identity()).expect("valid")
    }

    pub fn semi_periodic() -> Self {
        Self::real_coupled(-Mat2::<T>::identity()).expect("valid")
    }

    fn check_k(k: &Mat2<T>) -> Result<()> {
        let d = k.det();
        if !d.is_finite() || (d - T::one()).abs() > lit(DET_TOL) {
            return Err(Error::Boundary(format!("det K = {d:e}, expected 1")));
        }
        Ok(())
    }

    fn checked(kind: BoundaryKind<T>, a: Mat2<Complex<T>>, b: Mat2<Complex<T>>) -> Result<Self> {
        let chk = is_self_adjoint(&a, &b);
        if !chk.self_adjoint {
            return Err(Error::Boundary(format!(
                "not self-adjoint (rank margin {:e}, residual {:e})",
                chk.rank_margin, chk.residual
            )));
        }
        Ok(Self { kind, a, b })
    }

    /// Recovers the normal form of an arbitrary self-adjoint pair `(A, B)`.
    pub fn from_matrices(a: Mat2<Complex<T>>, b: Mat2<Complex<T>>) -> Result<Self> {
        let chk = is_self_adjoint(&a, &b);
        if !chk.self_adjoint {
            return Err(Error::Boundary(format!(
                "not self-adjoint (rank margin {:e}, residual {:e})",
                chk.rank_margin, chk.residual
            )));
        }
        let scale = a.norm().powi(2) + b.norm().powi(2);
        let db = b.det();
        if db.norm() > lit::<T>(1e-8) * scale {
            // Coupled: rows become [−B⁻¹A | −I].
            let binv = b.adjugate().scale_c(Complex::new(T::one(), T::zero()) / db);
            let m = -(binv * a);
            let dm = m.det();
            let gamma = dm.arg() / lit(2.0);
            let k = m.scale_c(Complex::from_polar(T::one(), -gamma));
            if !k.is_real(lit::<T>(1e-9) * (T::one() + Mat2::<Complex<T>>::norm(&k))) {
                return Err(Error::Boundary("coupled matrix is not a phase times a real matrix".into()));
            }
            let k = k.re();
            let k = k.scale(T::one() / k.det().abs().sqrt());
            if gamma.abs() <= lit(1e-13) {
                return Self::real_coupled(k);
            }
            let (gamma, k) = if (gamma - T::PI()).abs() <= lit(1e-13) || (gamma + T::PI()).abs() <= lit(1e-13) {
                (T::zero(), -k)
            } else {
                (gamma, k)
            };
            return Self::coupled(gamma, k);
        }
        // Separated: combine rows to isolate each endpoint.
        let row_at_a = left_null(&b).map(|v| [v[0] * a.m[0][0] + v[1] * a.m[1][0], v[0] * a.m[0][1] + v[1] * a.m[1][1]]);
        let row_at_b = left_null(&a).map(|v| [v[0] * b.m[0][0] + v[1] * b.m[1][0], v[0] * b.m[0][1] + v[1] * b.m[1][1]]);
        match (row_at_a, row_at_b) {
            (Some(ra), Some(rb)) => {
                let ra = realify(ra)?;
                let rb = realify(rb)?;
                let alpha = wrap_angle((-ra[1]).atan2(ra[0]), false);
                let beta = wrap_angle((-rb[1]).atan2(rb[0]), true);
                Self::separated(alpha, beta)
            }
            _ => Err(Error::Boundary("boundary condition is neither coupled nor separated".into())),
        }
    }

    pub fn kind(&self) -> &BoundaryKind<T> {
        &self.kind
    }

    pub fn a(&self) -> &Mat2<Complex<T>> {
        &self.a
    }

    pub fn b(&self) -> &Mat2<Complex<T>> {
        &self.b
    }

    pub fn is_separated(&self) -> bool {
        matches!(self.kind, BoundaryKind::Separated { .. })
    }

    /// `(γ, K)` for coupled conditions (`γ = 0` when real).
    pub fn coupling(&self) -> Option<(T, Mat2<T>)> {
        match self.kind {
            BoundaryKind::Separated { .. } => None,
            BoundaryKind::RealCoupled { k } => Some((T::zero(), k)),
            BoundaryKind::ComplexCoupled { gamma, k } => Some((gamma, k)),
        }
    }

    pub fn angles(&self) -> Option<(T, T)> {
        match self.kind {
            BoundaryKind::Separated { alpha, beta } => Some((alpha, beta)),
            _ => None,
        }
    }

    /// `|A (y(a), y1(a)) + B (y(b), y1(b))|`, scaled by the matrix size.
    pub fn residual(&self, at_a: [Complex<T>; 2], at_b: [Complex<T>; 2]) -> T {
        let ra = self.a.apply(at_a);
        let rb = self.b.apply(at_b);
        let s = (self.a.norm().powi(2) + self.b.norm().powi(2)).sqrt();
        ((ra[0] + rb[0]).norm_sqr() + (ra[1] + rb[1]).norm_sqr()).sqrt() / s
    }
}

fn left_null<T: Scalar>(m: &Mat2<Complex<T>>) -> Option<[Complex<T>; 2]> {
    // v with vᵀ m = 0, from the column of larger norm.
    let c0 = m.m[0][0].norm_sqr() + m.m[1][0].norm_sqr();
    let c1 = m.m[0][1].norm_sqr() + m.m[1][1].norm_sqr();
    let col = if c0 >= c1 { [m.m[0][0], m.m[1][0]] } else { [m.m[0][1], m.m[1][1]] };
    let v = [col[1], -col[0]];
    if v[0].norm() + v[1].norm() == T::zero() {
        return None;
    }
    Some(v)
}

fn realify<T: Scalar>(r: [Complex<T>; 2]) -> Result<[T; 2]> {
    let pivot = if r[0].norm() >= r[1].norm() { r[0] } else { r[1] };
    if pivot.norm() == T::zero() {
        return Err(Error::Boundary("endpoint condition vanishes".into()));
    }
    let ph = pivot.conj() / pivot.norm();
    let (x, y) = (r[0] * ph, r[1] * ph);
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if x.im.abs() + y.im.abs() > lit::<T>(1e-9) * n {
        return Err(Error::Boundary("separated condition with non-real coefficients".into()));
    }
    Ok([x.re / n, y.re / n])
}

/// Named subsets of boundary-condition space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    KSet,
    FMinus,
    FPlus,
    GMinus,
    GPlus,
    HMinus,
    HPlus,
    IMinus,
    IPlus,
    IZero,
    Other,
}

impl RegionLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegionLabel::KSet => "K_set",
            RegionLabel::FMinus => "F_minus",
            RegionLabel::FPlus => "F_plus",
            RegionLabel::GMinus => "G_minus",
            RegionLabel::GPlus => "G_plus",
            RegionLabel::HMinus => "H_minus",
            RegionLabel::HPlus => "H_plus",
            RegionLabel::IMinus => "I_minus",
            RegionLabel::IPlus => "I_plus",
            RegionLabel::IZero => "I_zero",
            RegionLabel::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "K_set" => RegionLabel::KSet,
            "F_minus" => RegionLabel::FMinus,
            "F_plus" => RegionLabel::FPlus,
            "G_minus" => RegionLabel::GMinus,
            "G_plus" => RegionLabel::GPlus,
            "H_minus" => RegionLabel::HMinus,
            "H_plus" => RegionLabel::HPlus,
            "I_minus" => RegionLabel::IMinus,
            "I_plus" => RegionLabel::IPlus,
            "I_zero" => RegionLabel::IZero,
            "other" => RegionLabel::Other,
            _ => return None,
        })
    }
}

/// Result of [`classify_region`]: one primary label plus every named set containing
/// the point.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub primary: RegionLabel,
    pub members: Vec<RegionLabel>,
}

impl Classification {
    pub fn contains(&self, label: RegionLabel) -> bool {
        self.members.contains(&label)
    }
}

fn i_label<T: Scalar>(a2: T, b2: T, r: T) -> RegionLabel {
    let tol = lit::<T>(REGION_TOL);
    let scale = T::one() + a2.abs().max(b2.abs()).max(r.abs()).powi(2);
    if a2 <= tol && b2 <= tol && a2 * b2 - r * r >= -tol * scale {
        RegionLabel::IMinus
    } else if a2 > tol && b2 > tol && a2 * b2 - r * r > tol * scale {
        RegionLabel::IPlus
    } else {
        RegionLabel::IZero
    }
}

/// Locates `bc` among the sets `K`, `F±`, `G±`, `H±`, `I±`, `I₀`.
pub fn classify_region<T: Scalar>(bc: &BoundaryCondition<T>) -> Classification {
    let tol = lit::<T>(REGION_TOL);
    let mut members = Vec::new();
    let primary = match bc.kind {
        BoundaryKind::RealCoupled { k } | BoundaryKind::ComplexCoupled { k, .. } => {
            let kn = T::one() + k.norm();
            let k12_zero = k.m[0][1].abs() <= tol * kn;
            let f = if k.m[0][0] * k.m[0][1] <= tol * kn * kn {
                RegionLabel::FMinus
            } else {
                RegionLabel::FPlus
            };
            if k12_zero {
                members.push(RegionLabel::KSet);
            }
            members.push(f);
            if matches!(bc.kind, BoundaryKind::RealCoupled { .. }) && k.m[1][0].abs() > tol * kn {
                let k21 = k.m[1][0];
                members.push(i_label(k.m[1][1] / k21, k.m[0][0] / k21, -T::one() / k21));
            }
            if k12_zero {
                RegionLabel::KSet
            } else {
                f
            }
        }
        BoundaryKind::Separated { alpha, beta } => {
            let (sa, ca) = alpha.sin_cos();
            let (sb, cb) = beta.sin_cos();
            let in_k = (sa * sb).abs() <= tol;
            if in_k {
                members.push(RegionLabel::KSet);
            }
            let mut chart = None;
            if ca.abs() > tol && cb.abs() > tol {
                let l = i_label(-sa / ca, sb / cb, T::zero());
                members.push(l);
                chart.get_or_insert(l);
            }
            if ca.abs() > tol && sb.abs() > tol {
                let l = if -sa / ca <= tol { RegionLabel::HMinus } else { RegionLabel::HPlus };
                members.push(l);
                chart.get_or_insert(l);
            }
            if sa.abs() > tol && cb.abs() > tol {
                let l = if sb / cb <= tol { RegionLabel::GMinus } else { RegionLabel::GPlus };
                members.push(l);
                chart.get_or_insert(l);
            }
            if in_k {
                RegionLabel::KSet
            } else {
                chart.unwrap_or(RegionLabel::Other)
            }
        }
    };
    if members.is_empty() {
        members.push(RegionLabel::Other);
    }
    Classification { primary, members }
}

/// Coupled condition with chart coordinates `(a₂, b₂, r)` of the chart
/// `[[1, a₂, 0, r], [0, r, −1, b₂]]`, for `r ≠ 0`.
pub fn from_o2_chart<T: Scalar>(a2: T, b2: T, r: T) -> Result<BoundaryCondition<T>> {
    if r == T::zero() {
        return Err(Error::Parameterization("chart coordinate r must be nonzero".into()));
    }
    let k = Mat2::new(b2, a2 * b2 - r * r, T::one(), a2).scale(-T::one() / r);
    BoundaryCondition::real_coupled(k)
}

/// The boundary condition at parameter `t > 0` on the path approaching `point` from
/// inside `region`. The path tends to `point` as `t → 0⁺`.
pub fn approach_path<T: Scalar>(
    point: &BoundaryCondition<T>,
    region: RegionLabel,
    t: T,
) -> Result<BoundaryCondition<T>> {
    if !(t > T::zero()) {
        return Err(Error::Parameterization(format!("path parameter {t:e} must be positive")));
    }
    let cls = classify_region(point);
    if !cls.contains(RegionLabel::KSet) {
        return Err(Error::Parameterization(format!(
            "approach target must lie in K_set, found {}",
            cls.primary.name()
        )));
    }
    let tol = lit::<T>(REGION_TOL);
    let bad = |why: &str| Err(Error::Parameterization(format!("{} approach: {why}", region.name())));
    let bc = match (region, point.kind) {
        (RegionLabel::FPlus | RegionLabel::FMinus, BoundaryKind::RealCoupled { k }) => {
            let tau = if region == RegionLabel::FPlus { t } else { -t };
            BoundaryCondition::real_coupled(k * Mat2::new(T::one(), tau, T::zero(), T::one()))?
        }
        (RegionLabel::GPlus | RegionLabel::GMinus, BoundaryKind::Separated { alpha, beta }) => {
            if (beta - T::PI()).abs() > tol || alpha <= tol {
                return bad("target must be S(α, π) with α > 0");
            }
            let b = if region == RegionLabel::GPlus { t.atan() } else { T::PI() - t.atan() };
            BoundaryCondition::separated(alpha, b)?
        }
        (RegionLabel::HPlus | RegionLabel::HMinus, BoundaryKind::Separated { alpha, beta }) => {
            if alpha > tol || (beta - T::PI()).abs() <= tol {
                return bad("target must be S(0, β) with β < π");
            }
            let a = if region == RegionLabel::HPlus { T::PI() - t.atan() } else { t.atan() };
            BoundaryCondition::separated(a, beta)?
        }
        (RegionLabel::IPlus | RegionLabel::IMinus | RegionLabel::IZero, BoundaryKind::Separated { alpha, beta }) => {
            if alpha > tol || (beta - T::PI()).abs() > tol {
                return bad("target must be the Dirichlet condition");
            }
            let half = t / lit(2.0);
            match region {
                RegionLabel::IPlus => from_o2_chart(t, t, half)?,
                RegionLabel::IMinus => from_o2_chart(-t, -t, half)?,
                _ => from_o2_chart(t, -t, half)?,
            }
        }
        _ => return bad("region does not border this point"),
    };
    if !classify_region(&bc).contains(region) {
        return bad(&format!("path left the region at t = {t:e}"));
    }
    Ok(bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_matrices() {
        let d = BoundaryCondition::<f64>::dirichlet();
        assert!(is_self_adjoint(d.a(), d.b()).self_adjoint);
        assert_eq!(classify_region(&d).primary, RegionLabel::KSet);
    }

    #[test]
    fn initial_value_conditions_rejected() {
        let a = Mat2::<f64>::identity().to_complex();
        let b = Mat2::<f64>::zeros().to_complex();
        let chk = is_self_adjoint(&a, &b);
        assert!(!chk.self_adjoint && chk.rank_margin > 0.1);
    }

    #[test]
    fn recovers_normal_forms() {
        let k = Mat2::<f64>::new(2.0, 0.5, 0.6, 0.65);
        let bc = BoundaryCondition::complex_coupled(0.7, k).unwrap();
        let g = Mat2::new(1.0, 2.0, -0.5, 3.0).to_complex();
        let back = BoundaryCondition::from_matrices(g * *bc.a(), g * *bc.b()).unwrap();
        let (gamma, k2) = back.coupling().unwrap();
        assert!((gamma - 0.7).abs() < 1e-12);
        assert!((k2 - k).norm() < 1e-12);

        let s = BoundaryCondition::<f64>::separated(0.3, 2.0).unwrap();
        let back = BoundaryCondition::from_matrices(g * *s.a(), g * *s.b()).unwrap();
        let (al, be) = back.angles().unwrap();
        assert!((al - 0.3).abs() < 1e-12 && (be - 2.0).abs() < 1e-12);
    }

    #[test]
    fn separated_regions() {
        let h = BoundaryCondition::separated(0.3, PI / 2.0).unwrap();
        assert_eq!(classify_region(&h).primary, RegionLabel::HMinus);
        let i = BoundaryCondition::separated(2.5, 0.5).unwrap();
        assert_eq!(classify_region(&i).primary, RegionLabel::IPlus);
        let n = BoundaryCondition::<f64>::neumann();
        assert_eq!(classify_region(&n).primary, RegionLabel::Other);
    }

    #[test]
    fn approach_paths_stay_in_region() {
        let d = BoundaryCondition::<f64>::dirichlet();
        for r in [RegionLabel::IPlus, RegionLabel::IMinus, RegionLabel::IZero] {
            for k in 0..12 {
                approach_path(&d, r, 2f64.powi(-k)).unwrap();
            }
        }
        let p = BoundaryCondition::<f64>::periodic();
        assert_eq!(classify_region(&approach_path(&p, RegionLabel::FPlus, 0.1).unwrap()).primary, RegionLabel::FPlus);
        assert!(approach_path(&p, RegionLabel::GPlus, 0.1).is_err());
    }
}
