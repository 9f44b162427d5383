//! Eigensolver checks against the independent Sturm-bisection oracle, plus
//! residual/orthonormality contracts and minimax fidelity on random input.

mod support;

use efimov_core::operators::{OperatorRole, SymmetricOperator};
use efimov_core::spectra::{
    check_order_monotonicity, eig_symmetric, lowest_eigenpairs, minimax_sequence, DichotomyTag,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{random_symmetric, sturm_eigenvalues, to_mat};

#[test]
fn oracle_agrees_with_analytic_cases() {
    // Diagonal matrix.
    let d = vec![
        vec![3.0, 0.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.5],
    ];
    let vals = sturm_eigenvalues(&d);
    assert!((vals[0] + 1.0).abs() < 1e-12);
    assert!((vals[1] - 0.5).abs() < 1e-12);
    assert!((vals[2] - 3.0).abs() < 1e-12);

    // 2x2 with known roots (tr/2 +- sqrt((tr/2)^2 - det)).
    let a = vec![vec![2.0, 1.0], vec![1.0, -1.0]];
    let vals = sturm_eigenvalues(&a);
    let disc = (1.5f64 * 1.5 + 1.0).sqrt();
    assert!((vals[0] - (0.5 - disc)).abs() < 1e-12);
    assert!((vals[1] - (0.5 + disc)).abs() < 1e-12);
}

#[test]
fn eigensolver_matches_sturm_oracle_on_random_30x30() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for _ in 0..5 {
        let a = random_symmetric(30, &mut rng);
        let op = SymmetricOperator::from_dense(to_mat(&a), OperatorRole::Other).unwrap();
        let (vals, _) = eig_symmetric(&op).unwrap();
        let oracle = sturm_eigenvalues(&a);
        for (v, o) in vals.iter().zip(&oracle) {
            assert!((v - o).abs() <= 1e-9, "solver {v} vs oracle {o}");
        }
    }
}

#[test]
fn eigenpairs_satisfy_residual_and_orthonormality_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for &n in &[5usize, 17, 40] {
        let a = random_symmetric(n, &mut rng);
        let m = to_mat(&a);
        let op = SymmetricOperator::from_dense(m.clone(), OperatorRole::Other).unwrap();
        let (vals, vecs) = eig_symmetric(&op).unwrap();
        let norm_est: f64 = vals[0].abs().max(vals[n - 1].abs());
        for k in 0..n {
            let mut residual = 0.0f64;
            for i in 0..n {
                let mut av = 0.0;
                for j in 0..n {
                    av += m[(i, j)] * vecs[(j, k)];
                }
                residual += (av - vals[k] * vecs[(i, k)]).powi(2);
            }
            assert!(residual.sqrt() <= 1e-10 * norm_est.max(1.0));
        }
        for k in 0..n {
            for l in k..n {
                let dot: f64 = (0..n).map(|i| vecs[(i, k)] * vecs[(i, l)]).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                assert!((dot - target).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn minimax_reproduces_spectrum_below_injected_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = rng.gen_range(4..=60);
        let a = random_symmetric(n, &mut rng);
        let op = SymmetricOperator::from_dense(to_mat(&a), OperatorRole::Other).unwrap();
        let (vals, _) = eig_symmetric(&op).unwrap();
        // Inject the edge strictly between two consecutive eigenvalues.
        let k = rng.gen_range(1..n);
        if vals[k] - vals[k - 1] < 1e-6 {
            continue;
        }
        let e_min = 0.5 * (vals[k - 1] + vals[k]);
        let r = minimax_sequence(&op, n, e_min, 1e-9).unwrap();
        assert_eq!(r.n_below_edge, k);
        for (mu, v) in r.mu.iter().zip(&vals).take(k) {
            assert!((mu - v).abs() <= 1e-9);
        }
        for tag in &r.tags[..k] {
            assert_eq!(*tag, DichotomyTag::Eigenvalue);
        }
        for i in k..n {
            assert_eq!(r.mu[i], e_min);
            assert_eq!(r.tags[i], DichotomyTag::EdgeSaturated);
        }
    }
}

#[test]
fn minimax_monotone_under_psd_perturbation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let n = rng.gen_range(3..=30);
        let a = random_symmetric(n, &mut rng);
        // b = a + g g^T (rank-k psd perturbation).
        let mut b = a.clone();
        let k = rng.gen_range(1..=3);
        for _ in 0..k {
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for i in 0..n {
                for j in 0..n {
                    b[i][j] += g[i] * g[j];
                }
            }
        }
        let a = SymmetricOperator::from_dense(to_mat(&a), OperatorRole::Other).unwrap();
        let b = SymmetricOperator::from_dense(to_mat(&b), OperatorRole::Other).unwrap();
        let e_min = rng.gen_range(-1.0..1.0);
        let rep = check_order_monotonicity(&a, &b, e_min, n).unwrap();
        assert!(rep.holds, "violation {}", rep.max_violation);
    }
}

#[test]
fn lowest_eigenpairs_residuals_meet_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 400;
    let a = random_symmetric(n, &mut rng);
    let op = SymmetricOperator::from_dense(to_mat(&a), OperatorRole::Other).unwrap();
    let le = lowest_eigenpairs(&op, 6, 1e-10, 3).unwrap();
    let oracle = sturm_eigenvalues(&a);
    for (got, want) in le.values.iter().zip(&oracle) {
        assert!((got - want).abs() <= 1e-7, "value {got} vs oracle {want}");
    }
    // Ritz vectors orthonormal.
    for k in 0..6 {
        for l in k..6 {
            let dot: f64 = (0..n)
                .map(|i| le.vectors[(i, k)] * le.vectors[(i, l)])
                .sum();
            let target = if k == l { 1.0 } else { 0.0 };
            assert!((dot - target).abs() <= 1e-8);
        }
    }
}
