use crate::boundary::BoundaryCondition;
use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::quasi_ode::SolverOptions;
use crate::scalar::{lit, Scalar};
use crate::spectrum::{eigen_auxiliary, eigen_coupled, eigen_separated, eigenvalues};
use rayon::prelude::*;

/// Which of the two interlacing chains applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// `k₁₁ > 0, k₁₂ ≤ 0`: starts at `ν₀` and pairs `μₙ` with `νₙ₊₁`.
    Tt,
    /// `k₁₁ ≤ 0, k₁₂ < 0`: starts at `λ₀(K)` and pairs `μₙ` with `νₙ`.
    Ww,
}

impl ChainKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChainKind::Tt => "tt",
            ChainKind::Ww => "ww",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Strict,
    NonStrict,
}

impl Link {
    pub fn symbol(&self) -> &'static str {
        match self {
            Link::Strict => "<",
            Link::NonStrict => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainEntry<T> {
    pub label: String,
    pub value: T,
    /// Entries sharing a group (such as `{μₙ, νₙ₊₁}`) are not ordered among themselves.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation<T> {
    pub lower: String,
    pub upper: String,
    pub link: Link,
    /// `upper − lower`.
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport<T> {
    pub chain_kind: ChainKind,
    /// The matrix the chain is stated for (`K` itself or `−K`).
    pub k: Mat2<T>,
    pub negated: bool,
    pub entries: Vec<ChainEntry<T>>,
    /// `links[g]` joins group `g` to group `g + 1`.
    pub links: Vec<Link>,
    pub violations: Vec<ChainViolation<T>>,
}

impl<T: Scalar> ChainReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Builder<T> {
    entries: Vec<ChainEntry<T>>,
    links: Vec<Link>,
    group: usize,
}

impl<T: Scalar> Builder<T> {
    fn push_group(&mut self, items: Vec<(String, T)>, link_before: Link) {
        if !self.entries.is_empty() {
            self.links.push(link_before);
            self.group += 1;
        }
        for (label, value) in items {
            self.entries.push(ChainEntry { label, value, group: self.group });
        }
    }
}

/// Builds and checks the interlacing chain for `[K | −I]`, `[−K | −I]`, `[e^{iγ}K | −I]`
/// and the auxiliary problems, for `n ≤ n_max`. Values of `γ` sharing `|γ|` give the same
/// spectrum and are merged. Matrices outside both sign cases are replaced by `−K`.
pub fn verify_chain<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: &Mat2<T>,
    gammas: &[T],
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<ChainReport<T>> {
    BoundaryCondition::real_coupled(*k)?;
    let kind_of = |m: &Mat2<T>| {
        let (k11, k12) = (m.m[0][0], m.m[0][1]);
        if k11 > T::zero() && k12 <= T::zero() {
            Some(ChainKind::Tt)
        } else if k11 <= T::zero() && k12 < T::zero() {
            Some(ChainKind::Ww)
        } else {
            None
        }
    };
    let (k, negated, kind) = match kind_of(k) {
        Some(c) => (*k, false, c),
        None => {
            let m = -*k;
            let c = kind_of(&m).ok_or_else(|| Error::Precondition("neither K nor −K is in a sign case".into()))?;
            (m, true, c)
        }
    };
    let mut gs: Vec<T> = Vec::new();
    for &g in gammas {
        let g = g.abs();
        if !(g > T::zero() && g < T::PI()) {
            return Err(Error::Precondition(format!("γ = {g:e} must lie in (−π, 0) ∪ (0, π)")));
        }
        if !gs.iter().any(|&h| (h - g).abs() <= lit::<T>(1e-15)) {
            gs.push(g);
        }
    }
    gs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Real K, −K, then each γ, computed in parallel.
    let tasks: Vec<(Mat2<T>, T)> =
        [(k, T::zero()), (-k, T::zero())].into_iter().chain(gs.iter().map(|&g| (k, g))).collect();
    let lams: Vec<Vec<T>> = tasks
        .par_iter()
        .map(|(m, g)| Ok(eigen_coupled(coeffs, m, *g, n_max, opts)?.into_iter().map(|r| r.lambda).collect()))
        .collect::<Result<_>>()?;
    let (mu, nu) = eigen_auxiliary(coeffs, &k, n_max + 1, opts)?;
    let (kp, km, lg) = (&lams[0], &lams[1], &lams[2..]);

    let mut b = Builder { entries: Vec::new(), links: Vec::new(), group: 0 };
    if kind == ChainKind::Tt {
        b.push_group(vec![("nu_0".into(), nu[0].lambda)], Link::NonStrict);
    }
    for n in 0..=n_max {
        let mut block: Vec<(String, T)> = Vec::new();
        block.push((format!("lambda_{n}(K)"), kp[n]));
        for (g, l) in gs.iter().zip(lg) {
            block.push((format!("lambda_{n}(gamma={:.6})", g.to_f64().unwrap()), l[n]));
        }
        block.push((format!("lambda_{n}(-K)"), km[n]));
        if n % 2 == 1 {
            block.reverse();
        }
        for (i, item) in block.into_iter().enumerate() {
            b.push_group(vec![item], if i == 0 { Link::NonStrict } else { Link::Strict });
        }
        let partner = if kind == ChainKind::Tt { n + 1 } else { n };
        b.push_group(
            vec![(format!("mu_{n}"), mu[n].lambda), (format!("nu_{partner}"), nu[partner].lambda)],
            Link::NonStrict,
        );
    }

    let mut violations = Vec::new();
    for (g, link) in b.links.iter().enumerate() {
        for lo in b.entries.iter().filter(|e| e.group == g) {
            for hi in b.entries.iter().filter(|e| e.group == g + 1) {
                let gap = hi.value - lo.value;
                let margin = lit::<T>(1e-9) * (T::one() + lo.value.abs().max(hi.value.abs()));
                let ok = match link {
                    Link::Strict => gap > margin,
                    Link::NonStrict => gap >= -margin,
                };
                if !ok {
                    violations.push(ChainViolation { lower: lo.label.clone(), upper: hi.label.clone(), link: *link, gap });
                }
            }
        }
    }
    Ok(ChainReport { chain_kind: kind, k, negated, entries: b.entries, links: b.links, violations })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketRow<T> {
    pub n: usize,
    pub lambda: T,
    pub dirichlet: T,
    /// `λₙ₋₂` of the Dirichlet problem, for `n ≥ 2`.
    pub dirichlet_below: Option<T>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketReport<T> {
    pub rows: Vec<BracketRow<T>>,
}

impl<T> BracketReport<T> {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Compares `λₙ(bc)` with the Dirichlet eigenvalues: `λₙ ≤ λₙᴰ` for all `n` and
/// `λₙ₋₂ᴰ < λₙ` for `n ≥ 2`.
pub fn dirichlet_bracketing<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    bc: &BoundaryCondition<T>,
    n_max: usize,
    opts: &SolverOptions<T>,
) -> Result<BracketReport<T>> {
    let lam = eigenvalues(coeffs, bc, n_max, opts)?;
    let dir = eigen_separated(coeffs, T::zero(), T::PI(), n_max, opts)?;
    let rows = (0..=n_max)
        .map(|n| {
            let (l, d) = (lam[n].lambda, dir[n].lambda);
            let margin = lit::<T>(1e-9) * (T::one() + l.abs().max(d.abs()));
            let below = (n >= 2).then(|| dir[n - 2].lambda);
            let pass = l <= d + margin && below.is_none_or(|x| l - x > margin);
            BracketRow { n, lambda: l, dirichlet: d, dirichlet_below: below, pass }
        })
        .collect();
    Ok(BracketReport { rows })
}
