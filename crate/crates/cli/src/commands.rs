//! The `solve`, `verify` and `scan` commands.

use crate::config::{self, BcBlock, Problem, ScanBlock};
use crate::output::{num, Summary, Table};
use crate::{Common, Failure};
use anyhow::{anyhow, Context};
use rayon::prelude::*;
use slq_core::analysis::{
    bc_surface, default_direction, dirichlet_bracketing, frechet, frechet_convergence, jump_limits,
    mollification_study, verify_chain, Direction, Target,
};
use slq_core::boundary::{classify_region, BoundaryCondition, BoundaryKind, RegionLabel};
use slq_core::coeffs::{CoefficientSet, Interface};
use slq_core::eigenfunctions::{check_oscillation, eigenfunctions, inner_product};
use slq_core::linalg::Mat2;
use slq_core::quasi_ode::SolverOptions;
use slq_core::spectrum::{eigen_coupled, eigenvalues};
use slq_core::transmission::{solve_direct, solve_via_reduction, transfer_check, TransmissionProblem};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

type CmdResult<T> = std::result::Result<T, Failure>;

pub fn load(common: &Common) -> CmdResult<Problem> {
    let mut p = config::load(&common.config).map_err(Failure::Config)?;
    if let Some(n) = common.n_max {
        p.n_max = n;
    }
    if let Some(t) = common.tol {
        if !(t > 0.0) {
            return Err(Failure::Config(anyhow!("--tol must be positive")));
        }
        p.opts.rel_tol = t;
        p.opts.abs_tol = t * 1e-2;
    }
    Ok(p)
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Solver),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn solve(p: &Problem, out: Option<&Path>, dump: Option<&Path>, samples: usize) -> CmdResult<()> {
    let coeffs = p.solve_coeffs().map_err(Failure::Solver)?;
    let recs = eigenvalues(&coeffs, &p.bc, p.n_max, &p.opts)?;
    let efs = eigenfunctions(&recs, &coeffs, &p.opts)?;
    let mut t = Table::new(&["n", "lambda", "multiplicity", "residual", "zeros"]);
    for (r, ef) in recs.iter().zip(&efs) {
        let zeros = if p.bc.is_separated() { ef.zero_count_open } else { ef.zero_count_half_open };
        t.row(&[r.n.to_string(), num(r.lambda), r.multiplicity.to_string(), num(r.residual), zeros.to_string()]);
    }
    emit(out, &t.into_string())?;
    if let Some(prefix) = dump {
        for ef in &efs {
            let mut d = Table::new(&["x", "w_re", "w_im", "w1_re", "w1_im"]);
            for (x, [w, w1]) in ef.samples(samples) {
                d.row(&[num(x), num(w.re), num(w.im), num(w1.re), num(w1.im)]);
            }
            let mut name = prefix.as_os_str().to_owned();
            name.push(format!("_n{}.csv", ef.record.n));
            emit(Some(&PathBuf::from(name)), &d.into_string())?;
        }
    }
    Ok(())
}

pub const SUITES: [&str; 6] = ["chains", "oscillation", "derivatives", "mollify", "jumps", "transmission"];

pub fn verify(p: &Problem, suites: &[String], out: Option<&Path>) -> CmdResult<bool> {
    let selected: Vec<&str> = if suites.is_empty() { SUITES.to_vec() } else { suites.iter().map(|s| s.as_str()).collect() };
    for s in &selected {
        if !SUITES.contains(s) {
            return Err(Failure::Config(anyhow!("unknown suite {s:?}; expected one of {}", SUITES.join(", "))));
        }
    }
    let coeffs = p.solve_coeffs().map_err(Failure::Solver)?;
    let mut sum = Summary::default();
    for s in selected {
        match s {
            "chains" => chains(p, &coeffs, &mut sum)?,
            "oscillation" => oscillation(p, &coeffs, &mut sum)?,
            "derivatives" => derivatives(p, &coeffs, &mut sum)?,
            "mollify" => mollify(p, &coeffs, &mut sum)?,
            "jumps" => jumps(p, &coeffs, &mut sum)?,
            _ => transmission(p, &mut sum)?,
        }
    }
    let csv = sum.to_csv();
    match out {
        Some(path) => {
            emit(Some(path), &csv)?;
            for l in sum.lines.iter().filter(|l| !l.pass) {
                eprintln!("FAIL {}: {} (observed {}, expected {})", l.suite, l.label, l.observed, l.expected);
            }
        }
        None => emit(None, &csv)?,
    }
    let failed = sum.lines.iter().filter(|l| !l.pass).count();
    eprintln!("{} assertions, {} failed", sum.lines.len(), failed);
    Ok(sum.passed())
}

fn chains(p: &Problem, coeffs: &CoefficientSet<f64>, sum: &mut Summary) -> CmdResult<()> {
    let mut gammas = p.verify.gammas.clone();
    let k = match *p.bc.kind() {
        BoundaryKind::RealCoupled { k } => k,
        BoundaryKind::ComplexCoupled { gamma, k } => {
            gammas.push(gamma);
            k
        }
        BoundaryKind::Separated { .. } => Mat2::identity(),
    };
    let rep = verify_chain(coeffs, &k, &gammas, p.n_max, &p.opts)?;
    let name = format!("chain {}{}", rep.chain_kind.name(), if rep.negated { " (for -K)" } else { "" });
    for (g, link) in rep.links.iter().enumerate() {
        for lo in rep.entries.iter().filter(|e| e.group == g) {
            for hi in rep.entries.iter().filter(|e| e.group == g + 1) {
                let bad = rep.violations.iter().any(|v| v.lower == lo.label && v.upper == hi.label);
                sum.push(
                    "chains",
                    format!("{name}: {} {} {}", lo.label, link.symbol(), hi.label),
                    num(hi.value - lo.value),
                    if *link == slq_core::analysis::Link::Strict { "> 0" } else { ">= 0" },
                    !bad,
                );
            }
        }
    }
    let br = dirichlet_bracketing(coeffs, &p.bc, p.n_max, &p.opts)?;
    for r in &br.rows {
        let label = match r.dirichlet_below {
            Some(_) => format!("Dirichlet bracket: lambda_{0}^D(n-2) < lambda_{0} <= lambda_{0}^D", r.n),
            None => format!("Dirichlet bracket: lambda_{0} <= lambda_{0}^D", r.n),
        };
        sum.push("chains", label, num(r.lambda), format!("<= {}", num(r.dirichlet)), r.pass);
    }
    Ok(())
}

fn oscillation(p: &Problem, coeffs: &CoefficientSet<f64>, sum: &mut Summary) -> CmdResult<()> {
    let recs = eigenvalues(coeffs, &p.bc, p.n_max, &p.opts)?;
    let efs = eigenfunctions(&recs, coeffs, &p.opts)?;
    let rep = check_oscillation(&p.bc, &efs)?;
    for c in &rep.checks {
        sum.push("oscillation", format!("n={}: {}", c.n, c.rule), c.observed.clone(), c.expected.clone(), c.pass);
    }
    let mut worst_norm: f64 = 0.0;
    let mut worst_ortho: f64 = 0.0;
    for i in 0..efs.len() {
        worst_norm = worst_norm.max((efs[i].norm - 1.0).abs());
        for j in 0..i {
            worst_ortho = worst_ortho.max(inner_product(coeffs, &efs[i], &efs[j]).norm());
        }
    }
    sum.push("oscillation", "normalisation |int r|w|^2 - 1|", num(worst_norm), "<= 1e-8", worst_norm <= 1e-8);
    sum.push("oscillation", "orthogonality max |<w_m, w_n>|", num(worst_ortho), "<= 1e-7", worst_ortho <= 1e-7);
    Ok(())
}

fn derivatives(p: &Problem, coeffs: &CoefficientSet<f64>, sum: &mut Summary) -> CmdResult<()> {
    let opts = SolverOptions { rel_tol: p.opts.rel_tol.min(1e-12), abs_tol: p.opts.abs_tol.min(1e-14), ..p.opts };
    let recs = eigenvalues(coeffs, &p.bc, p.n_max, &opts)?;
    let Some(n) = (0..=p.n_max.min(2)).rev().find(|&n| recs[n].multiplicity == 1) else {
        sum.push("derivatives", "simple eigenvalue available", "none", "n <= 2 simple", false);
        return Ok(());
    };
    let h = default_direction(coeffs, p.verify.seed)?;
    let floor = coeffs.inv_p().min_value().min(coeffs.r().min_value());
    for target in Target::ALL {
        let angle = matches!(target, Target::Alpha | Target::Beta);
        if angle && !p.bc.is_separated() {
            continue;
        }
        let dir = if angle { Direction::Scalar(1.0) } else { Direction::Function(h.clone()) };
        let chk = frechet(coeffs, &p.bc, n, target, &dir, p.verify.derivative_step, &opts)?;
        sum.push(
            "derivatives",
            format!("lambda_{n}'({}): analytic {} vs central difference {} at step {}", target.name(), num(chk.analytic), num(chk.finite_diff), chk.step),
            num(chk.rel_err),
            "<= 5e-5",
            chk.rel_err <= 5e-5,
        );
        let eps0 = if angle { 0.1 } else { 0.1f64.min(0.5 * floor) };
        let (analytic, rows) = frechet_convergence(coeffs, &p.bc, n, target, &dir, eps0, 6, &opts)?;
        for r in &rows {
            eprintln!(
                "# {} step {} fd {} err {} ratio {}",
                target.name(),
                num(r.step),
                num(r.finite_diff),
                num(r.abs_err),
                r.ratio.map_or("-".into(), num)
            );
        }
        let noise = 1e-8 * (1.0 + analytic.abs());
        let second_order = rows.iter().take(4).filter_map(|r| r.ratio).any(|q| (3.0..=5.0).contains(&q))
            || rows.iter().all(|r| r.abs_err <= noise);
        let ratios: Vec<String> = rows.iter().filter_map(|r| r.ratio).map(|q| format!("{q:.3}")).collect();
        sum.push(
            "derivatives",
            format!("lambda_{n}'({}): second-order convergence under step halving", target.name()),
            ratios.join(" "),
            "ratio near 4",
            second_order,
        );
    }
    Ok(())
}

fn mollify(p: &Problem, coeffs: &CoefficientSet<f64>, sum: &mut Summary) -> CmdResult<()> {
    let n_max = p.n_max.min(5);
    let (exact, rows) = mollification_study(coeffs, &p.bc, &p.verify.mollify_m, n_max, &p.opts)?;
    for r in &rows {
        let errs: Vec<String> = r.errors.iter().map(|e| num(*e)).collect();
        eprintln!("# m {} gap_inv_p {} gap_s {} errors {}", r.m, num(r.l1_gap.0), num(r.l1_gap.1), errs.join(" "));
    }
    for n in 0..=n_max {
        let col: Vec<f64> = rows.iter().map(|r| r.errors[n]).collect();
        let floor = 1e-9 * (1.0 + exact[n].abs());
        let monotone = col.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
        let last = *col.last().unwrap_or(&f64::NAN);
        sum.push("mollify", format!("|lambda_{n}(m) - lambda_{n}| decreasing in m"), col.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" "), "monotone", monotone);
        sum.push("mollify", format!("|lambda_{n}(m) - lambda_{n}| at largest m"), num(last), "<= 1e-3", last <= 1e-3);
    }
    Ok(())
}

/// The target and approach regions used by the jump suite.
fn jump_targets(bc: &BoundaryCondition<f64>) -> (BoundaryCondition<f64>, Vec<RegionLabel>) {
    let tol = 1e-12;
    if classify_region(bc).contains(RegionLabel::KSet) {
        match *bc.kind() {
            BoundaryKind::RealCoupled { .. } => return (*bc, vec![RegionLabel::FPlus, RegionLabel::FMinus]),
            BoundaryKind::Separated { alpha, beta } => {
                let a0 = alpha.abs() <= tol;
                let bpi = (beta - PI).abs() <= tol;
                if a0 && bpi {
                    return (*bc, vec![RegionLabel::IPlus, RegionLabel::IMinus, RegionLabel::IZero]);
                } else if a0 {
                    return (*bc, vec![RegionLabel::HPlus, RegionLabel::HMinus]);
                } else if bpi {
                    return (*bc, vec![RegionLabel::GPlus, RegionLabel::GMinus]);
                }
            }
            BoundaryKind::ComplexCoupled { .. } => {}
        }
    }
    (BoundaryCondition::dirichlet(), vec![RegionLabel::IPlus, RegionLabel::IMinus, RegionLabel::IZero])
}

fn jumps(p: &Problem, coeffs: &CoefficientSet<f64>, sum: &mut Summary) -> CmdResult<()> {
    let (point, regions) = jump_targets(&p.bc);
    let n_max = p.n_max.clamp(2, 5);
    let tables: Vec<_> = regions
        .par_iter()
        .map(|&reg| jump_limits(coeffs, &point, reg, n_max, 0.5, 12, &p.opts))
        .collect::<slq_core::Result<_>>()?;
    for tab in tables {
        let reg = tab.region.name();
        for r in &tab.rows {
            sum.push(
                "jumps",
                format!("{reg}: lim lambda_{} = lambda_{} of target", r.n, r.target_index),
                num(r.extrapolated),
                format!("{} (rel 1e-5)", num(r.predicted)),
                r.pass,
            );
        }
        if let Some(d) = &tab.divergence {
            sum.push(
                "jumps",
                format!("{reg}: lowest {} eigenvalue(s) below -1e4 along the path", d.required),
                format!("{:?}", d.counts),
                format!("nondecreasing, ends >= {}", d.required),
                d.pass,
            );
        }
    }
    Ok(())
}

fn transmission(p: &Problem, sum: &mut Summary) -> CmdResult<()> {
    let tp = match &p.transmission {
        Some(tp) => tp.clone(),
        None => {
            if !p.coeffs.s().is_identically_zero() {
                sum.push("transmission", "skipped: s is not identically zero", "-", "-", true);
                return Ok(());
            }
            let (a, b) = p.coeffs.interval();
            TransmissionProblem::new(p.coeffs.clone(), vec![Interface { at: 0.5 * (a + b), strength: 1.0 }], p.bc)?
        }
    };
    let direct = solve_direct(&tp, p.n_max, &p.opts)?;
    let reduced = solve_via_reduction(&tp, p.n_max, &p.opts)?;
    for (d, r) in direct.iter().zip(&reduced) {
        let diff = (d.lambda - r.lambda).abs();
        let tol = 1e-7 * (1.0 + d.lambda.abs());
        sum.push("transmission", format!("lambda_{}: direct vs reduction", d.n), num(diff), format!("<= {}", num(tol)), diff <= tol);
    }
    for t in transfer_check(&tp, p.n_max, &p.opts)? {
        sum.push("transmission", format!("w_{}: interface jump residual", t.n), num(t.jump_residual), "<= 1e-7", t.jump_residual <= 1e-7);
        if let Some(d) = t.max_difference {
            sum.push("transmission", format!("w_{}: reduced vs direct eigenfunction", t.n), num(d), "<= 1e-6", d <= 1e-6);
        }
    }
    Ok(())
}

fn parse_grid(s: &str) -> CmdResult<(usize, usize)> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| Failure::Config(anyhow!("--grid expects AxB, got {s:?}")))?;
    let parse = |v: &str| v.trim().parse::<usize>().ok().filter(|&n| n > 0);
    match (parse(a), parse(b)) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(Failure::Config(anyhow!("--grid expects positive sizes, got {s:?}"))),
    }
}

pub fn scan(p: &Problem, grid: Option<&str>, out: Option<&Path>) -> CmdResult<()> {
    let block = match (grid, &p.scan) {
        (Some(g), scan) => {
            let (na, nb) = parse_grid(g)?;
            let n = match scan {
                Some(ScanBlock::AlphaBetaGrid { n, .. }) => *n,
                _ => 0,
            };
            ScanBlock::AlphaBetaGrid { n, alpha_count: na, beta_count: nb }
        }
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Failure::Config(anyhow!("no scan block in the configuration and no --grid given"))),
    };
    let coeffs = p.solve_coeffs().map_err(Failure::Solver)?;
    let text = match block {
        ScanBlock::AlphaBetaGrid { n, alpha_count, beta_count } => {
            let alphas: Vec<f64> = (0..alpha_count).map(|i| PI * i as f64 / alpha_count as f64).collect();
            let betas: Vec<f64> = (0..beta_count).map(|j| PI * (j + 1) as f64 / beta_count as f64).collect();
            let tab = bc_surface(&coeffs, &alphas, &betas, n, false, &p.opts)?;
            let mut t = Table::new(&["alpha", "beta", "n", "lambda"]);
            for s in &tab.samples {
                t.row(&[num(s.alpha), num(s.beta), n.to_string(), num(s.lambda)]);
            }
            t.into_string()
        }
        ScanBlock::GammaSweep { k, count } => {
            let k = config::matrix(k);
            let gammas: Vec<f64> = (0..count).map(|j| PI * (j + 1) as f64 / (count + 1) as f64).collect();
            let rows: Vec<Vec<[String; 4]>> = gammas
                .par_iter()
                .map(|&g| {
                    Ok(eigen_coupled(&coeffs, &k, g, p.n_max, &p.opts)?
                        .iter()
                        .map(|r| [num(g), r.n.to_string(), num(r.lambda), r.multiplicity.to_string()])
                        .collect())
                })
                .collect::<slq_core::Result<_>>()?;
            let mut t = Table::new(&["gamma", "n", "lambda", "multiplicity"]);
            for r in rows.into_iter().flatten() {
                t.row(&r);
            }
            t.into_string()
        }
        ScanBlock::RegionApproach { point, region, t0, steps } => {
            let bc = point_bc(&point)?;
            let region = RegionLabel::parse(&region).ok_or_else(|| Failure::Config(anyhow!("unknown region {region:?}")))?;
            let tab = jump_limits(&coeffs, &bc, region, p.n_max.max(2), t0, steps, &p.opts)?;
            let mut t = Table::new(&["n", "target_index", "t_min", "lambda_at_t_min", "extrapolated", "predicted", "rel_err", "pass"]);
            for r in &tab.rows {
                let (tm, lm) = *r.sequence.last().unwrap();
                t.row(&[
                    r.n.to_string(),
                    r.target_index.to_string(),
                    num(tm),
                    num(lm),
                    num(r.extrapolated),
                    num(r.predicted),
                    num(r.rel_err),
                    r.pass.to_string(),
                ]);
            }
            if let Some(d) = &tab.divergence {
                eprintln!("counts below -1e4 along the path: {:?} (need {})", d.counts, d.required);
            }
            t.into_string()
        }
    };
    emit(out, &text)
}

fn point_bc(b: &BcBlock) -> CmdResult<BoundaryCondition<f64>> {
    b.build().map_err(Failure::Config)
}
