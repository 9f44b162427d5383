//! Experiment dispatch: build the model, run the requested analysis, write
//! `report.json`, `table.csv` and (for spectrum/accumulate) `plot.svg`.

use std::path::PathBuf;

use anyhow::{bail, Context};

use efimov_core::efimov::{
    self, accumulation_study, condition5_check, condition6_check, count_below, essential_edge,
    thm41_finiteness_test, BasisFn, SolveOpts, StudyOpts,
};
use efimov_core::hubbard5::{self, Example5Params};
use efimov_core::operators::{ModelAssembly, OperatorRole};
use efimov_core::spectra::{default_edge_tol, eigvals_symmetric};

use crate::config::{Experiment, RunConfig};
use crate::output::{emit_csv, emit_svg, fmt_f64, Series, Table};
use crate::report::{self, Report};

/// Exit status used when a scientific check fails (as opposed to an error).
pub const EXIT_FAILED_CHECK: i32 = 2;

pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Report,
    pub report_path: PathBuf,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

fn solve_opts(cfg: &RunConfig) -> SolveOpts {
    SolveOpts {
        seed: cfg.seed,
        ..Default::default()
    }
}

/// Run one experiment and write its artifacts under `cfg.out`.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutcome> {
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
    let mut report = Report::new(cfg.experiment.name(), cfg.seed, cfg.dense_cap);
    let table: Table;
    let mut svg: Option<(Vec<Series>, f64, String, String, String)> = None;
    let mut exit_code = 0;

    match cfg.experiment {
        Experiment::Essential => {
            let asm = assembly(cfg)?;
            let edge = essential_edge(&asm)?;
            report.essential = Some((&edge).into());

            let mut t = Table::new(&["component", "index", "node", "min_eigenvalue"]);
            for (j, v) in edge.w1_fiber_minima.iter().enumerate() {
                t.push(vec![
                    "W1".into(),
                    j.to_string(),
                    fmt_f64(asm.grid.gy.nodes[j]),
                    fmt_f64(*v),
                ]);
            }
            for (i, v) in edge.w2_fiber_minima.iter().enumerate() {
                t.push(vec![
                    "W2".into(),
                    i.to_string(),
                    fmt_f64(asm.grid.gx.nodes[i]),
                    fmt_f64(*v),
                ]);
            }
            table = t;
        }

        Experiment::Spectrum => {
            let asm = assembly(cfg)?;
            let edge = essential_edge(&asm)?;
            let h = asm
                .operator_dense(OperatorRole::H, cfg.dense_cap)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let vals = eigvals_symmetric(&h)?;
            let tol = default_edge_tol(edge.lambda);
            let below: Vec<f64> = vals
                .iter()
                .copied()
                .take_while(|&v| v < edge.lambda - tol)
                .collect();
            report.essential = Some((&edge).into());
            report.spectrum = Some(report::Spectrum {
                dim: h.dim(),
                lambda: edge.lambda,
                count_below: below.len(),
                below: below.clone(),
                eigenvalues: vals.clone(),
            });

            let mut t = Table::new(&["index", "eigenvalue"]);
            for (i, v) in vals.iter().enumerate() {
                t.push(vec![i.to_string(), fmt_f64(*v)]);
            }
            table = t;
            svg = Some((
                vec![Series {
                    label: "eigenvalues".into(),
                    points: vals
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| (i as f64, v))
                        .collect(),
                }],
                edge.lambda,
                format!("edge {:.6}", edge.lambda),
                "index".into(),
                "eigenvalue".into(),
            ));
        }

        Experiment::Condition5 | Experiment::Condition6 => {
            let asm = assembly(cfg)?;
            let family = condition_family(cfg)?;
            let rep = if cfg.experiment == Experiment::Condition5 {
                condition5_check(&asm, &family)?
            } else {
                condition6_check(&asm, &family)?
            };
            let any_pass = rep.rows.iter().any(|r| r.pass);
            if !any_pass {
                report.verdict = "failed-check".into();
                exit_code = EXIT_FAILED_CHECK;
            } else if !rep.all_pass {
                report.verdict = "partial".into();
            }
            report.condition = Some((&rep).into());
            table = condition_table(&rep);
        }

        Experiment::Thm41 => {
            let asm = assembly(cfg)?;
            let rep = thm41_finiteness_test(&asm)?;
            report.finiteness = Some((&rep).into());
            let mut t = Table::new(&[
                "verdict",
                "lambda",
                "eta0",
                "premise_margin",
                "sigma_d_t_len",
                "truncated_series",
            ]);
            t.push(vec![
                rep.verdict.to_string(),
                fmt_f64(rep.lambda),
                fmt_f64(rep.eta0),
                fmt_f64(rep.premise_margin),
                rep.sigma_d_t_len.to_string(),
                rep.truncated_series.to_string(),
            ]);
            table = t;
        }

        Experiment::Accumulate => {
            let base = match cfg.model.example5() {
                Some(cfg5) => cfg5.params(),
                None => bail!(
                    "the accumulate experiment varies the example5 truncations; \
                     configure model.example5"
                ),
            };
            let schedule = cfg.schedule_rows();
            let opts = StudyOpts {
                dense_cap: cfg.dense_cap,
                solve: solve_opts(cfg),
                ..Default::default()
            };
            let make = |row: &efimov::ScheduleRow| {
                hubbard5::model8(&Example5Params {
                    m: row.m,
                    n_terms: row.n,
                    g: row.g,
                    ..base.clone()
                })
            };
            let study =
                accumulation_study(make, &schedule, &opts).map_err(|e| anyhow::anyhow!("{e}"))?;
            if !report::accumulation_ok(&study.verdict) {
                report.verdict = "failed-check".into();
                exit_code = EXIT_FAILED_CHECK;
            }
            report.accumulation = Some((&study).into());

            let mut t = Table::new(&[
                "label", "nx", "ny", "dim", "lambda", "count", "gap", "lowest", "skipped",
            ]);
            for row in &study.rows {
                t.push(vec![
                    row.label.clone(),
                    row.nx.to_string(),
                    row.ny.to_string(),
                    row.dim.to_string(),
                    if row.skipped.is_some() {
                        String::new()
                    } else {
                        fmt_f64(row.lambda)
                    },
                    row.count.to_string(),
                    row.gap.map(fmt_f64).unwrap_or_default(),
                    row.lowest
                        .iter()
                        .map(|v| fmt_f64(*v))
                        .collect::<Vec<_>>()
                        .join(";"),
                    row.skipped.clone().unwrap_or_default(),
                ]);
            }
            table = t;

            let computed: Vec<&efimov::AccumulationRow> =
                study.rows.iter().filter(|r| r.skipped.is_none()).collect();
            if let Some(last) = computed.last() {
                let series = vec![Series {
                    label: "eigenvalues below edge".into(),
                    points: computed
                        .iter()
                        .flat_map(|r| {
                            let n = truncation_of(&r.label);
                            r.lowest
                                .iter()
                                .filter(|&&v| v < r.lambda)
                                .map(move |&v| (n, v))
                                .collect::<Vec<_>>()
                        })
                        .collect(),
                }];
                svg = Some((
                    series,
                    last.lambda,
                    format!("edge {:.6}", last.lambda),
                    "kernel truncation N".into(),
                    "eigenvalue".into(),
                ));
            }
        }

        Experiment::Example5 => {
            let cfg5 = match cfg.model.example5() {
                Some(c) => c.clone(),
                None => bail!("the example5 experiment requires model.example5"),
            };
            let params = cfg5.params();
            let asm = assembly(cfg)?;
            let edge = essential_edge(&asm)?;
            report.essential = Some((&edge).into());

            // Eigen-residuals of T on the separable closed-form pairs.
            let t_op = asm.operator(OperatorRole::T);
            let mut max_res = 0.0f64;
            for n in 1..=params.n_terms.min(4) {
                let v = phi_vector(&asm, n);
                let tv = t_op.apply_vec(&v);
                let omega = hubbard5::analytic_t_eigenvalue(n, params.gamma);
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let res: f64 = tv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - omega * b) * (a - omega * b))
                    .sum::<f64>()
                    .sqrt();
                max_res = max_res.max(res / norm);
            }

            // The sufficiency rows within the truncation.
            let hi = params.m.min(params.n_terms).min(6);
            if hi < 2 {
                bail!("example5 needs truncations M, N >= 2 for the condition rows");
            }
            let family = hubbard5::phi_family(2..=hi);
            let cond = condition5_check(&asm, &family)?;
            report.condition = Some((&cond).into());

            let h = asm.operator(OperatorRole::H);
            let cb = count_below(
                &h,
                edge.lambda,
                default_edge_tol(edge.lambda),
                &solve_opts(cfg),
            )?;
            report.example5 = Some(report::Example5Summary {
                gamma: params.gamma,
                lambda: edge.lambda,
                edge_defect: (edge.lambda + params.gamma).abs(),
                max_t_residual: max_res,
                count_below: cb.count,
                below: cb.below.clone(),
            });
            if !cond.all_pass {
                report.verdict = "failed-check".into();
                exit_code = EXIT_FAILED_CHECK;
            }
            table = condition_table(&cond);
        }
    }

    let report_path = cfg.out.join("report.json");
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(&report_path, json.as_bytes())
        .with_context(|| format!("cannot write {}", report_path.display()))?;

    let csv_path = {
        let p = cfg.out.join("table.csv");
        emit_csv(&table, &p)?;
        Some(p)
    };
    let svg_path = match &svg {
        Some((series, hline, hlabel, xl, yl)) => {
            let p = cfg.out.join("plot.svg");
            emit_svg(series, *hline, hlabel, xl, yl, &p)?;
            Some(p)
        }
        None => None,
    };

    Ok(RunOutcome {
        exit_code,
        report,
        report_path,
        csv_path,
        svg_path,
    })
}

fn assembly(cfg: &RunConfig) -> anyhow::Result<ModelAssembly> {
    let spec = cfg.model.model_spec()?;
    ModelAssembly::new(&spec).map_err(|e| anyhow::anyhow!("{e}"))
}

/// Family for the condition checks, drawn from the configured basis.
fn condition_family(cfg: &RunConfig) -> anyhow::Result<Vec<BasisFn>> {
    let indices = cfg.family_indices();
    if indices.is_empty() {
        bail!("family must contain at least one index");
    }
    match cfg.family_basis.as_deref() {
        None | Some("bump") => Ok(hubbard5::phi_family(indices)),
        Some(name) => indices
            .into_iter()
            .map(|index| crate::config::basis_factor(name, index).map(|f| BasisFn { index, f }))
            .collect(),
    }
}

fn condition_table(rep: &efimov_core::efimov::ConditionReport) -> Table {
    let mut t = Table::new(&["kappa", "lhs", "rhs", "margin", "pass"]);
    for r in &rep.rows {
        t.push(vec![
            r.index.to_string(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            r.pass.to_string(),
        ]);
    }
    t
}

/// Weight-scaled samples of `1 (x) phi_n`.
fn phi_vector(asm: &ModelAssembly, n: usize) -> Vec<f64> {
    let (nx, ny) = (asm.nx(), asm.ny());
    let mut v = vec![0.0; nx * ny];
    for i in 0..nx {
        let wx = asm.grid.gx.weights[i].sqrt();
        for j in 0..ny {
            let wy = asm.grid.gy.weights[j].sqrt();
            v[i * ny + j] = wx * wy * hubbard5::phi(n, asm.grid.gy.nodes[j]);
        }
    }
    v
}

/// Kernel truncation parsed back out of a row label ("M=2 N=3 g=8" -> 3).
fn truncation_of(label: &str) -> f64 {
    label
        .split_whitespace()
        .find_map(|part| part.strip_prefix("N=").and_then(|v| v.parse::<f64>().ok()))
        .unwrap_or(0.0)
}
