//! Acceptance suite. Each criterion runs at its stated tolerance, is timed
//! against its runtime budget, and prints one pass/fail line. The lines are
//! visible with `cargo test -p efimov-cli --test acceptance -- --show-output`
//! (and always when something fails).

use std::f64::consts::SQRT_2;
use std::path::Path;
use std::time::Instant;

use efimov_cli::config::RunConfig;
use efimov_cli::run;
use efimov_core::efimov::{
    condition5_check, count_below, essential_edge, thm41_finiteness_test, FinitenessVerdict,
    SolveOpts,
};
use efimov_core::hubbard5::{analytic_t_eigenvalue, model8, phi, phi_family, Example5Params};
use efimov_core::operators::{KronSum, ModelAssembly, OperatorRole, SymmetricOperator};
use efimov_core::quadrature::{build_grid, integrate};
use efimov_core::spectra::{
    cardinality_checks, check_order_monotonicity, default_edge_tol, eigvals_symmetric,
    minimax_sequence, DichotomyTag, SpectralSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(m: usize, n: usize, g: usize, gamma: f64) -> Example5Params {
    Example5Params {
        m,
        n_terms: n,
        gamma,
        g,
        ..Default::default()
    }
}

fn assembly(p: &Example5Params) -> Result<ModelAssembly, String> {
    let spec = model8(p).map_err(|e| e.to_string())?;
    ModelAssembly::new(&spec).map_err(|e| e.to_string())
}

/// Weight-scaled samples of `1 (x) phi_n` on the product grid.
fn phi_vec(asm: &ModelAssembly, n: usize) -> Vec<f64> {
    let (nx, ny) = (asm.nx(), asm.ny());
    let mut v = vec![0.0; nx * ny];
    for i in 0..nx {
        let wx = asm.grid.gx.weights[i].sqrt();
        for j in 0..ny {
            let wy = asm.grid.gy.weights[j].sqrt();
            v[i * ny + j] = wx * wy * phi(n, asm.grid.gy.nodes[j]);
        }
    }
    v
}

fn random_dense(n: usize, rng: &mut ChaCha8Rng) -> faer::Mat<f64> {
    let mut m = faer::Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Criterion 1: the essential edge of the example model equals -gamma.
fn c1_essential_edge() -> Result<(), String> {
    for gamma in [2.0 / 3.0, 1.0] {
        let asm = assembly(&params(4, 4, 8, gamma))?;
        let edge = essential_edge(&asm).map_err(|e| e.to_string())?;
        let defect = (edge.lambda + gamma).abs();
        if defect > 1e-9 {
            return Err(format!(
                "gamma={gamma}: edge {} misses -gamma by {defect:e}",
                edge.lambda
            ));
        }
    }
    Ok(())
}

/// Criterion 2: T f_n = (gamma + (2/3)^n) f_n to 1e-8 for n = 1..4.
fn c2_t_eigenvectors() -> Result<(), String> {
    let gamma = 2.0 / 3.0;
    let asm = assembly(&params(4, 4, 8, gamma))?;
    let t = asm.operator(OperatorRole::T);
    for n in 1..=4usize {
        let v = phi_vec(&asm, n);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tv = t.apply_vec(&v);
        let omega = analytic_t_eigenvalue(n, gamma);
        let res: f64 = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - omega * b) * (a - omega * b))
            .sum::<f64>()
            .sqrt();
        if res > 1e-8 * norm.max(1.0) {
            return Err(format!("n={n}: residual {res:e} exceeds 1e-8"));
        }
    }
    Ok(())
}

/// Criterion 3: the sufficiency inequality holds for kappa = 2..6 with the
/// closed-form margin floor.
fn c3_condition5() -> Result<(), String> {
    let asm = assembly(&params(6, 6, 8, 2.0 / 3.0))?;
    let family = phi_family(2..=6);
    let rep = condition5_check(&asm, &family).map_err(|e| e.to_string())?;
    if !rep.all_pass {
        return Err("not all rows kappa = 2..6 passed".into());
    }
    for row in &rep.rows {
        let floor =
            (2.0f64 / 3.0).powi(row.index as i32) - (SQRT_2 / 3.0).powi(row.index as i32) - 1e-8;
        if row.margin < floor {
            return Err(format!(
                "kappa={}: margin {} below floor {}",
                row.index, row.margin, floor
            ));
        }
    }
    Ok(())
}

fn accumulate_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::from_json(
        r#"{
            "experiment": "accumulate",
            "model": { "example5": { "gamma": 0.6666666666666666, "g": 8 } },
            "seed": 42,
            "dense_cap": 8000,
            "schedule": [
                { "m": 2, "n": 2, "g": 8 },
                { "m": 3, "n": 3, "g": 8 },
                { "m": 4, "n": 4, "g": 8 },
                { "m": 5, "n": 5, "g": 8 }
            ]
        }"#,
    )
    .expect("acceptance config parses");
    cfg.out = out.to_path_buf();
    cfg
}

/// Criterion 4: along the truncation ladder N = 2..5 the bound-state counts
/// below -gamma never decrease and the gap to the edge shrinks by at least
/// a factor 1.2 per step.
fn c4_accumulation() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let outcome = run(&accumulate_config(dir.path())).map_err(|e| format!("{e:#}"))?;
    if outcome.exit_code != 0 {
        return Err(format!("exit code {}", outcome.exit_code));
    }
    let acc = outcome
        .report
        .accumulation
        .as_ref()
        .ok_or("missing accumulation section")?;
    if acc.verdict != "accumulation consistent" {
        return Err(format!("verdict: {}", acc.verdict));
    }
    let mut prev_count = 0usize;
    let mut prev_gap: Option<f64> = None;
    for row in &acc.rows {
        if row.skipped.is_some() {
            return Err(format!("row {} was skipped", row.label));
        }
        if row.count < prev_count {
            return Err(format!("count dropped at {}", row.label));
        }
        prev_count = row.count;
        let gap = row.gap.ok_or_else(|| format!("no gap at {}", row.label))?;
        if let Some(prev) = prev_gap {
            if prev < 1.2 * gap {
                return Err(format!(
                    "gap shrank only by {:.3} entering {}",
                    prev / gap,
                    row.label
                ));
            }
        }
        prev_gap = Some(gap);
    }
    Ok(())
}

/// Criterion 5: the rank-1-truncated model is classified finite and its
/// bound-state count is stable across quadrature refinement.
fn c5_finite_rank_stability() -> Result<(), String> {
    let mut counts = Vec::new();
    for g in [6usize, 8, 12] {
        let mut p = params(2, 1, g, 2.0 / 3.0);
        p.exact_rank = true;
        let asm = assembly(&p)?;
        let rep = thm41_finiteness_test(&asm).map_err(|e| e.to_string())?;
        if rep.verdict != FinitenessVerdict::FiniteSpectrumPredicted {
            return Err(format!("g={g}: verdict {}", rep.verdict));
        }
        let edge = essential_edge(&asm).map_err(|e| e.to_string())?;
        let h = asm
            .operator_dense(OperatorRole::H, usize::MAX)
            .map_err(|e| e.to_string())?;
        let cb = count_below(
            &h,
            edge.lambda,
            default_edge_tol(edge.lambda),
            &SolveOpts::default(),
        )
        .map_err(|e| e.to_string())?;
        counts.push(cb.count);
    }
    if !(counts[0] == counts[1] && counts[1] == counts[2]) {
        return Err(format!("counts varied across g = 6, 8, 12: {counts:?}"));
    }
    Ok(())
}

/// Criterion 6: Kronecker-sum eigenvalues are pairwise sums (100 random
/// pairs), and the counting inequalities hold on 1000 random spectra
/// against an enumeration oracle.
fn c6_tensor_identity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..100 {
        let m1 = random_dense(6, &mut rng);
        let m2 = random_dense(8, &mut rng);
        let e1 = eigvals_symmetric(
            &SymmetricOperator::from_dense(m1.clone(), OperatorRole::Other).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let e2 = eigvals_symmetric(
            &SymmetricOperator::from_dense(m2.clone(), OperatorRole::Other).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let kron = KronSum {
            nx: 6,
            ny: 8,
            diag: None,
            x_coeff: 1.0,
            x_block: Some(m1),
            y_coeff: 1.0,
            y_block: Some(m2),
        };
        let got = eigvals_symmetric(
            &SymmetricOperator::from_dense(kron.to_dense(), OperatorRole::Other).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let mut expect: Vec<f64> = e1
            .iter()
            .flat_map(|a| e2.iter().map(move |b| a + b))
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(&expect) {
            if (g - e).abs() > 1e-9 {
                return Err(format!("trial {trial}: {g} vs {e}"));
            }
        }
    }

    // Enumeration oracle for the cardinality bounds.
    let dedup = |mut v: Vec<f64>| -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::new();
        for x in v {
            if out.last().map(|&l| x - l > 1e-12).unwrap_or(true) {
                out.push(x);
            }
        }
        out
    };
    for trial in 0..1000 {
        let mut draw = |max_len: usize| -> Vec<f64> {
            let len = rng.gen_range(0..=max_len);
            (0..len)
                .map(|_| {
                    let mag = rng.gen_range(0.05..5.0);
                    if rng.gen_bool(0.5) {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect()
        };
        let sd1 = draw(5);
        let sd2 = draw(5);
        let rep = cardinality_checks(
            &SpectralSet::new(sd1.clone(), true),
            &SpectralSet::new(sd2.clone(), true),
        );
        // Oracle counts by direct enumeration.
        let d1 = dedup(sd1.clone());
        let d2 = dedup(sd2.clone());
        let mut ess = vec![0.0];
        ess.extend(&d1);
        ess.extend(&d2);
        let ess = dedup(ess);
        let mut disc = Vec::new();
        for &a in &d1 {
            for &b in &d2 {
                if ess.iter().all(|&e| (e - (a + b)).abs() > 1e-12) {
                    disc.push(a + b);
                }
            }
        }
        let disc = dedup(disc);
        if rep.sigma_e_t != ess.len() || rep.sigma_d_t != disc.len() {
            return Err(format!(
                "trial {trial}: sizes differ from oracle ({} vs {}, {} vs {})",
                rep.sigma_e_t,
                ess.len(),
                rep.sigma_d_t,
                disc.len()
            ));
        }
        let ok = d1.len() < ess.len()
            && d2.len() < ess.len()
            && ess.len() <= d1.len() + d2.len() + 1
            && disc.len() <= d1.len() * d2.len();
        if !ok || !rep.all_hold() {
            return Err(format!("trial {trial}: counting bound violated"));
        }
    }
    Ok(())
}

/// Criterion 7: minimax fidelity below an injected edge plus the plateau,
/// and order-monotonicity under psd perturbations, on random matrices.
fn c7_minimax_fidelity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut done = 0;
    while done < 200 {
        let n = rng.gen_range(3..=60);
        let m = random_dense(n, &mut rng);
        let op = SymmetricOperator::from_dense(m, OperatorRole::Other).unwrap();
        let vals = eigvals_symmetric(&op).map_err(|e| e.to_string())?;
        let k = rng.gen_range(1..n);
        if vals[k] - vals[k - 1] < 1e-6 {
            continue;
        }
        let e_min = 0.5 * (vals[k - 1] + vals[k]);
        let r = minimax_sequence(&op, n, e_min, 1e-9).map_err(|e| e.to_string())?;
        if r.n_below_edge != k {
            return Err(format!(
                "expected {k} below the edge, got {}",
                r.n_below_edge
            ));
        }
        for (i, (mu, v)) in r.mu.iter().zip(&vals).take(k).enumerate() {
            if (mu - v).abs() > 1e-9 || r.tags[i] != DichotomyTag::Eigenvalue {
                return Err(format!("entry {i} disagrees below the edge"));
            }
        }
        for i in k..n {
            if r.mu[i] != e_min || r.tags[i] != DichotomyTag::EdgeSaturated {
                return Err(format!("entry {i} did not saturate at the edge"));
            }
        }
        done += 1;
    }

    for trial in 0..200 {
        let n = rng.gen_range(2..=30);
        let a = random_dense(n, &mut rng);
        let mut b = a.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for i in 0..n {
                for j in 0..n {
                    b[(i, j)] += g[i] * g[j];
                }
            }
        }
        let a = SymmetricOperator::from_dense(a, OperatorRole::Other).unwrap();
        let b = SymmetricOperator::from_dense(b, OperatorRole::Other).unwrap();
        let e_min = rng.gen_range(-1.0..1.0);
        let rep = check_order_monotonicity(&a, &b, e_min, n).map_err(|e| e.to_string())?;
        if !rep.holds {
            return Err(format!(
                "trial {trial}: monotonicity violated by {}",
                rep.max_violation
            ));
        }
    }
    Ok(())
}

/// Criterion 8: polynomial exactness up to degree 2g-1 and unit norms of
/// the sine bumps on aligned grids.
fn c8_quadrature() -> Result<(), String> {
    for g in 1..=8usize {
        let grid = build_grid(0.0, 1.0, &[0.3, 0.75], g).map_err(|e| e.to_string())?;
        for d in 0..=(2 * g - 1) {
            let got = integrate(|x| x.powi(d as i32), &grid).map_err(|e| e.to_string())?;
            let exact = 1.0 / (d as f64 + 1.0);
            if (got - exact).abs() > 1e-12 * exact.abs().max(1.0) {
                return Err(format!("g={g} degree {d}: {got} vs {exact}"));
            }
        }
    }
    let mut brk: Vec<f64> = (0..=7).map(efimov_core::hubbard5::p).collect();
    brk.extend((1..=7).map(efimov_core::hubbard5::q));
    brk.push(1.0);
    let grid = build_grid(0.0, 1.0, &brk, 8).map_err(|e| e.to_string())?;
    for n in 1..=6usize {
        let v = integrate(|y| phi(n, y) * phi(n, y), &grid).map_err(|e| e.to_string())?;
        if (v - 1.0).abs() > 1e-10 {
            return Err(format!("phi_{n} norm: {v}"));
        }
    }
    Ok(())
}

/// Criterion 9: two runs of the criterion-4 configuration are
/// byte-identical.
fn c9_determinism() -> Result<(), String> {
    let d1 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o1 = run(&accumulate_config(d1.path())).map_err(|e| format!("{e:#}"))?;
    let o2 = run(&accumulate_config(d2.path())).map_err(|e| format!("{e:#}"))?;
    for (label, p1, p2) in [
        ("report.json", Some(&o1.report_path), Some(&o2.report_path)),
        ("table.csv", o1.csv_path.as_ref(), o2.csv_path.as_ref()),
        ("plot.svg", o1.svg_path.as_ref(), o2.svg_path.as_ref()),
    ] {
        let (p1, p2) = match (p1, p2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(format!("{label} missing")),
        };
        let b1 = std::fs::read(p1).map_err(|e| e.to_string())?;
        let b2 = std::fs::read(p2).map_err(|e| e.to_string())?;
        if b1 != b2 {
            return Err(format!("{label} differs between identical runs"));
        }
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    type Check = fn() -> Result<(), String>;
    let criteria: Vec<(&str, Option<f64>, Check)> = vec![
        (
            "essential edge equals -gamma",
            Some(10.0),
            c1_essential_edge,
        ),
        (
            "closed-form eigenvalues of T",
            Some(10.0),
            c2_t_eigenvectors,
        ),
        ("sufficiency condition rows 2..6", Some(30.0), c3_condition5),
        ("accumulation ladder N=2..5", Some(300.0), c4_accumulation),
        (
            "finite-rank count stability",
            Some(60.0),
            c5_finite_rank_stability,
        ),
        (
            "tensor-sum identity and counting bounds",
            Some(60.0),
            c6_tensor_identity,
        ),
        (
            "minimax fidelity and monotonicity",
            Some(120.0),
            c7_minimax_fidelity,
        ),
        (
            "quadrature exactness and bump norms",
            Some(10.0),
            c8_quadrature,
        ),
        ("byte-identical reruns", None, c9_determinism),
    ];

    let mut failures = Vec::new();
    for (i, (label, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let mut status = match &result {
            Ok(()) => "PASS".to_string(),
            Err(why) => format!("FAIL ({why})"),
        };
        if let (Ok(()), Some(b)) = (&result, budget) {
            if secs > *b {
                status = format!("FAIL (runtime {secs:.1}s exceeds budget {b:.0}s)");
            }
        }
        let line = format!("criterion {}: {} [{secs:.2}s] {label}", i + 1, status);
        println!("{line}");
        if status.starts_with("FAIL") {
            failures.push(line);
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance failures:\n{}",
        failures.join("\n")
    );
}
