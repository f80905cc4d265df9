mod common;

use common::*;
use num_complex::Complex;
use slq_core::boundary::BoundaryCondition;
use slq_core::coeffs::CoefficientSet;
use slq_core::eigenfunctions::{check_oscillation, count_zeros, eigenfunctions, inner_product, min_modulus, reconstruct, zeros, Part};
use slq_core::linalg::Mat2;
use slq_core::quasi_ode::{integrate_system, SolverOptions};
use slq_core::spectrum::eigenvalues;
use std::f64::consts::PI;

fn opts() -> SolverOptions<f64> {
    SolverOptions::default()
}

fn free(b: f64) -> CoefficientSet<f64> {
    CoefficientSet::constant(0.0, b, 1.0, 0.0, 1.0, 0.0).unwrap()
}

#[test]
fn dirichlet_modes_are_normalised_sines() {
    let c = free(PI);
    let recs = eigenvalues(&c, &BoundaryCondition::dirichlet(), 3, &opts()).unwrap();
    let efs = eigenfunctions(&recs, &c, &opts()).unwrap();
    let amp = (2.0 / PI).sqrt();
    for ef in &efs {
        let k = (ef.record.n + 1) as f64;
        for (x, [w, w1]) in ef.samples(41) {
            assert!((w.re - amp * (k * x).sin()).abs() < 1e-7, "n = {}, x = {x}", ef.record.n);
            assert!((w1.re - amp * k * (k * x).cos()).abs() < 1e-6);
            assert!(w.im.abs() < 1e-14);
        }
        assert!((ef.norm - 1.0).abs() < 1e-9);
    }
    assert_eq!(count_zeros(&efs[2], false).unwrap(), 2);
    assert_eq!(count_zeros(&efs[2], true).unwrap(), 3);
}

#[test]
fn periodic_ground_state_is_constant() {
    let c = free(1.0);
    let recs = eigenvalues(&c, &BoundaryCondition::periodic(), 0, &opts()).unwrap();
    let ef = reconstruct(&recs[0], &c, &opts()).unwrap().remove(0);
    for (_, [w, w1]) in ef.samples(11) {
        assert!((w.re - 1.0).abs() < 1e-8);
        assert!(w1.norm() < 1e-8);
    }
    assert_eq!(count_zeros(&ef, true).unwrap(), 0);
}

#[test]
fn neumann_ground_state_has_no_zeros() {
    let c = free(2.0);
    let recs = eigenvalues(&c, &BoundaryCondition::neumann(), 0, &opts()).unwrap();
    let ef = reconstruct(&recs[0], &c, &opts()).unwrap().remove(0);
    let z = zeros(&ef, Part::Re).unwrap();
    assert_eq!(z.count_closed(), 0);
}

#[test]
fn double_eigenvalue_basis_is_orthonormal() {
    let c = free(1.0);
    let recs = eigenvalues(&c, &BoundaryCondition::periodic(), 2, &opts()).unwrap();
    assert_eq!(recs[1].multiplicity, 2);
    let pair = reconstruct(&recs[1], &c, &opts()).unwrap();
    assert_eq!(pair.len(), 2);
    for i in 0..2 {
        for j in 0..2 {
            let g = inner_product(&c, &pair[i], &pair[j]);
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - Complex::new(want, 0.0)).norm() < 1e-8, "G[{i}][{j}] = {g}");
        }
    }
}

#[test]
fn phase_convention() {
    let mut rng = rng(31);
    let c = random_coeffs(&mut rng);
    let bc = BoundaryCondition::complex_coupled(0.9, any_k(&mut rng)).unwrap();
    let recs = eigenvalues(&c, &bc, 4, &opts()).unwrap();
    for ef in eigenfunctions(&recs, &c, &opts()).unwrap() {
        let [c1, c2] = ef.coefficients();
        if c1.norm() > 1e-12 {
            assert!(c1.im.abs() < 1e-14 && c1.re > 0.0);
        } else {
            assert!(c2.im.abs() < 1e-14 && c2.re > 0.0);
        }
        assert!(min_modulus(&ef) > 1e-8);
        assert!(!ef.is_real());
    }
}

#[test]
fn eigenfunctions_satisfy_their_boundary_conditions() {
    let mut rng = rng(32);
    for _ in 0..8 {
        let c = random_coeffs(&mut rng);
        let bc = any_bc(&mut rng);
        let recs = eigenvalues(&c, &bc, 5, &opts()).unwrap();
        for ef in eigenfunctions(&recs, &c, &opts()).unwrap() {
            let (a, b) = ef.interval();
            let res = bc.residual(ef.eval(a), ef.eval(b));
            assert!(res < 1e-7, "n = {}: residual {res:e}", ef.record.n);
            assert!((ef.lambda() - ef.record.lambda).abs() < 1e-6 * (1.0 + ef.record.lambda.abs()));
        }
    }
}

#[test]
fn zeros_are_simple_and_counts_follow_the_theorems() {
    let mut rng = rng(33);
    let c = random_coeffs(&mut rng);
    for bc in [
        BoundaryCondition::dirichlet(),
        BoundaryCondition::periodic(),
        BoundaryCondition::semi_periodic(),
        BoundaryCondition::real_coupled(Mat2::new(2.0, 0.0, 0.3, 0.5)).unwrap(),
        BoundaryCondition::real_coupled(case_b(&mut rng)).unwrap(),
    ] {
        let recs = eigenvalues(&c, &bc, 8, &opts()).unwrap();
        let efs = eigenfunctions(&recs, &c, &opts()).unwrap();
        let rep = check_oscillation(&bc, &efs).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks.iter().find(|c| !c.pass));
        for ef in &efs {
            assert!(zeros(ef, Part::Re).unwrap().min_slope_ratio > 1e-6);
        }
    }
}

#[test]
fn dirichlet_fourth_mode_passes_the_separated_rule() {
    let c = free(PI);
    let bc = BoundaryCondition::dirichlet();
    let recs = eigenvalues(&c, &bc, 4, &opts()).unwrap();
    let efs = eigenfunctions(&recs[4..], &c, &opts()).unwrap();
    let rep = check_oscillation(&bc, &efs).unwrap();
    assert!(rep.passed());
    assert_eq!(efs[0].zero_count_open, 4);
}

fn sign_changes(c: &CoefficientSet<f64>, lambda: f64, start: [f64; 2]) -> Vec<f64> {
    let sol = integrate_system(c, lambda, start, 0.0, 1.0, &opts()).unwrap();
    let n = 4000;
    let mut out = Vec::new();
    let mut prev = sol.trajectory.eval(0.0)[0];
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let y = sol.trajectory.eval(x)[0];
        if prev != 0.0 && (y > 0.0) != (prev > 0.0) {
            out.push(x);
        }
        prev = y;
    }
    out
}

#[test]
fn sturm_comparison_between_consecutive_zeros() {
    let mut rng = rng(34);
    for _ in 0..6 {
        let c = random_coeffs(&mut rng);
        let alpha: f64 = 0.7;
        let start = [alpha.sin(), alpha.cos()];
        let z1 = sign_changes(&c, 150.0, start);
        let z2 = sign_changes(&c, 260.0, start);
        assert!(z1.len() >= 2);
        let h = 1.0 / 4000.0;
        for w in z1.windows(2) {
            assert!(z2.iter().any(|&z| z >= w[0] - h && z <= w[1] + h), "no zero of the faster solution in [{}, {}]", w[0], w[1]);
        }
    }
}
