//! JSON problem configuration.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use slq_core::boundary::{BoundaryCondition, RegionLabel};
use slq_core::coeffs::{CoefficientSet, Interface, PiecewiseFn};
use slq_core::linalg::Mat2;
use slq_core::quasi_ode::SolverOptions;
use slq_core::transmission::TransmissionProblem;
use num_complex::Complex;
use std::path::Path;

/// Highest polynomial degree accepted per coefficient segment.
pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub interval: [f64; 2],
    pub coefficients: CoefficientsBlock,
    pub bc: BcBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub transmission: Option<TransmissionBlock>,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default)]
    pub scan: Option<ScanBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsBlock {
    pub inv_p: CoefficientSpec,
    pub q: CoefficientSpec,
    pub r: CoefficientSpec,
    #[serde(default)]
    pub s: Option<CoefficientSpec>,
}

/// A constant, or a list of polynomial segments in the global variable `x`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Constant(f64),
    Segments(Vec<Segment>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    /// Coefficients of `c₀ + c₁x + c₂x² + c₃x³`.
    pub poly: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BcBlock {
    Dirichlet,
    Neumann,
    Periodic,
    SemiPeriodic,
    Separated { alpha: f64, beta: f64 },
    Coupled {
        #[serde(default)]
        gamma: f64,
        k: [[f64; 2]; 2],
    },
    /// `A Y(a) + B Y(b) = 0` with optional imaginary parts.
    Matrices {
        a: [[f64; 2]; 2],
        b: [[f64; 2]; 2],
        #[serde(default)]
        a_im: Option<[[f64; 2]; 2]>,
        #[serde(default)]
        b_im: Option<[[f64; 2]; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub lambda_scan: f64,
    pub n_max: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOptions::<f64>::default();
        Self { rel_tol: d.rel_tol, abs_tol: d.abs_tol, lambda_scan: d.lambda_scan, n_max: 8 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionBlock {
    pub interfaces: Vec<InterfaceSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBlock {
    pub gammas: Vec<f64>,
    pub mollify_m: Vec<u32>,
    pub derivative_step: f64,
    pub seed: u64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self {
            gammas: vec![std::f64::consts::FRAC_PI_3, 2.0 * std::f64::consts::FRAC_PI_3],
            mollify_m: vec![8, 16, 32, 64, 128, 256],
            derivative_step: 1e-4,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScanBlock {
    AlphaBetaGrid {
        #[serde(default)]
        n: usize,
        #[serde(default = "default_grid")]
        alpha_count: usize,
        #[serde(default = "default_grid")]
        beta_count: usize,
    },
    GammaSweep {
        k: [[f64; 2]; 2],
        #[serde(default = "default_grid")]
        count: usize,
    },
    RegionApproach {
        point: BcBlock,
        region: String,
        #[serde(default = "default_t0")]
        t0: f64,
        #[serde(default = "default_steps")]
        steps: usize,
    },
}

fn default_grid() -> usize {
    16
}

fn default_t0() -> f64 {
    0.5
}

fn default_steps() -> usize {
    12
}

/// A configuration after every module-level check has passed.
#[derive(Debug, Clone)]
pub struct Problem {
    pub coeffs: CoefficientSet<f64>,
    pub bc: BoundaryCondition<f64>,
    pub opts: SolverOptions<f64>,
    pub n_max: usize,
    pub transmission: Option<TransmissionProblem<f64>>,
    pub verify: VerifyBlock,
    pub scan: Option<ScanBlock>,
}

impl Problem {
    /// Coefficients with any transmission interfaces applied.
    pub fn solve_coeffs(&self) -> Result<CoefficientSet<f64>> {
        match &self.transmission {
            Some(tp) => Ok(tp.direct_coeffs()?),
            None => Ok(self.coeffs.clone()),
        }
    }
}

pub fn load(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse(text: &str) -> Result<Problem> {
    let cfg: ProblemConfig = serde_json::from_str(text)
        .map_err(|e| anyhow!("line {}, column {}: {e}", e.line(), e.column()))?;
    cfg.validate()
}

fn mat(m: [[f64; 2]; 2]) -> Mat2<f64> {
    Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

impl BcBlock {
    pub fn build(&self) -> Result<BoundaryCondition<f64>> {
        Ok(match self {
            BcBlock::Dirichlet => BoundaryCondition::dirichlet(),
            BcBlock::Neumann => BoundaryCondition::neumann(),
            BcBlock::Periodic => BoundaryCondition::periodic(),
            BcBlock::SemiPeriodic => BoundaryCondition::semi_periodic(),
            BcBlock::Separated { alpha, beta } => BoundaryCondition::separated(*alpha, *beta)?,
            BcBlock::Coupled { gamma, k } => BoundaryCondition::coupled(*gamma, mat(*k))?,
            BcBlock::Matrices { a, b, a_im, b_im } => {
                let cm = |re: [[f64; 2]; 2], im: Option<[[f64; 2]; 2]>| {
                    let im = im.unwrap_or([[0.0; 2]; 2]);
                    Mat2::new(
                        Complex::new(re[0][0], im[0][0]),
                        Complex::new(re[0][1], im[0][1]),
                        Complex::new(re[1][0], im[1][0]),
                        Complex::new(re[1][1], im[1][1]),
                    )
                };
                BoundaryCondition::from_matrices(cm(*a, *a_im), cm(*b, *b_im))?
            }
        })
    }
}

impl CoefficientSpec {
    fn build(&self, name: &str, a: f64, b: f64) -> Result<PiecewiseFn<f64>> {
        match self {
            CoefficientSpec::Constant(v) => Ok(PiecewiseFn::constant(a, b, *v)?),
            CoefficientSpec::Segments(segs) => {
                if segs.is_empty() {
                    bail!("coefficients.{name}: no segments");
                }
                for (i, s) in segs.iter().enumerate() {
                    if s.poly.is_empty() || s.poly.len() > MAX_DEGREE + 1 {
                        bail!("coefficients.{name}[{i}].poly: expected 1 to {} coefficients", MAX_DEGREE + 1);
                    }
                }
                if segs[0].from != a || segs[segs.len() - 1].to != b {
                    bail!("coefficients.{name}: segments must cover [{a}, {b}] exactly");
                }
                for (i, w) in segs.windows(2).enumerate() {
                    if w[0].to != w[1].from {
                        bail!("coefficients.{name}[{}]: segment starts at {} but the previous one ends at {}", i + 1, w[1].from, w[0].to);
                    }
                }
                let global: Vec<(f64, f64, Vec<f64>)> = segs.iter().map(|s| (s.from, s.to, s.poly.clone())).collect();
                PiecewiseFn::from_global(&global).with_context(|| format!("coefficients.{name}"))
            }
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<Problem> {
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            bail!("interval: need finite a < b, got [{a}, {b}]");
        }
        let c = &self.coefficients;
        let inv_p = c.inv_p.build("inv_p", a, b)?;
        let q = c.q.build("q", a, b)?;
        let r = c.r.build("r", a, b)?;
        let s = match &c.s {
            Some(spec) => spec.build("s", a, b)?,
            None => PiecewiseFn::constant(a, b, 0.0)?,
        };
        let coeffs = CoefficientSet::new(inv_p, q, r, s).context("coefficients")?;
        let bc = self.bc.build().context("bc")?;
        let sv = &self.solver;
        if !(sv.rel_tol > 0.0 && sv.abs_tol > 0.0 && sv.lambda_scan > 0.0) {
            bail!("solver: rel_tol, abs_tol and lambda_scan must be positive");
        }
        let opts = SolverOptions {
            rel_tol: sv.rel_tol,
            abs_tol: sv.abs_tol,
            lambda_scan: sv.lambda_scan,
            ..SolverOptions::default()
        };
        let transmission = match &self.transmission {
            Some(t) => {
                let ifs = t.interfaces.iter().map(|i| Interface { at: i.c, strength: i.alpha }).collect();
                Some(TransmissionProblem::new(coeffs.clone(), ifs, bc).context("transmission")?)
            }
            None => None,
        };
        if self.verify.gammas.iter().any(|g| !(g.abs() > 0.0 && g.abs() < std::f64::consts::PI)) {
            bail!("verify.gammas: each γ must satisfy 0 < |γ| < π");
        }
        if self.verify.mollify_m.contains(&0) {
            bail!("verify.mollify_m: values must be positive");
        }
        if !(self.verify.derivative_step > 0.0) {
            bail!("verify.derivative_step must be positive");
        }
        if let Some(scan) = &self.scan {
            match scan {
                ScanBlock::AlphaBetaGrid { alpha_count, beta_count, .. } => {
                    if *alpha_count == 0 || *beta_count == 0 {
                        bail!("scan: grid sizes must be positive");
                    }
                }
                ScanBlock::GammaSweep { k, count } => {
                    BoundaryCondition::real_coupled(mat(*k)).context("scan.k")?;
                    if *count == 0 {
                        bail!("scan.count must be positive");
                    }
                }
                ScanBlock::RegionApproach { point, region, t0, .. } => {
                    point.build().context("scan.point")?;
                    RegionLabel::parse(region).ok_or_else(|| anyhow!("scan.region: unknown region {region:?}"))?;
                    if !(*t0 > 0.0) {
                        bail!("scan.t0 must be positive");
                    }
                }
            }
        }
        Ok(Problem {
            coeffs,
            bc,
            opts,
            n_max: sv.n_max,
            transmission,
            verify: self.verify.clone(),
            scan: self.scan.clone(),
        })
    }
}

pub fn matrix(m: [[f64; 2]; 2]) -> Mat2<f64> {
    mat(m)
}
