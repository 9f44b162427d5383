//! Essential spectrum of `H`, the finiteness/infiniteness taxonomy, the
//! sufficiency conditions for accumulation, and the numerical accumulation
//! study.
//!
//! The essential spectrum of `H = H0 - T1 - T2` is the union
//! `sigma(H0) u sigma(W1) u sigma(W2)` with `W1 = H0 - T1`, `W2 = H0 - T2`.
//! `W1` acts fiberwise in `y` (its eigenvalues are infinitely degenerate
//! across the second axis, so it carries no discrete spectrum), and its
//! spectrum is computed here as the closure of the union of the frozen-`y`
//! fiber spectra. Discretizing the 2-D operator instead would produce
//! spurious "discrete" eigenvalues that are really fiber continua, so only
//! the fiber sweep is used for the edge.

use std::sync::Arc;

use rayon::prelude::*;

use crate::backend;
use crate::error::{Error, Result};
use crate::operators::{quadratic_form, ModelAssembly, OperatorRole, SymmetricOperator};
use crate::spectra::{self, default_edge_tol, tensor_spectrum, SpectralSet, COMPACT_ZERO_TOL};

use faer::Mat;

/// One member of an orthonormal family on a single axis.
#[derive(Clone)]
pub struct BasisFn {
    /// Caller-chosen label, reported per row of the condition checks.
    pub index: usize,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// Which component of the essential-spectrum union attains the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeComponent {
    /// The potential minimum (the multiplication operator's spectrum).
    H0,
    /// A frozen-`y` fiber of `W1`; carries the fiber's `y`-node index.
    W1 { y_index: usize },
    /// A frozen-`x` fiber of `W2`.
    W2 { x_index: usize },
}

/// Semi-analytic essential spectrum data of `H`.
#[derive(Debug, Clone)]
pub struct EssentialEdgeReport {
    /// Range of the potential over the grid nodes (the spectrum of `H0`).
    pub sigma_h0_range: (f64, f64),
    /// Minimum fiber eigenvalue of `W1` per `y`-node.
    pub w1_fiber_minima: Vec<f64>,
    /// Minimum fiber eigenvalue of `W2` per `x`-node.
    pub w2_fiber_minima: Vec<f64>,
    /// `E_min(W1)`: minimum over the `W1` fibers.
    pub lambda_w1: f64,
    /// `E_min(W2)`.
    pub lambda_w2: f64,
    /// `E_min(H)`: minimum over the three components.
    pub lambda: f64,
    pub attained: EdgeComponent,
    /// Whether the potential vanishes at some grid node (zeros strictly
    /// between nodes are undetectable and not guessed at).
    pub k0_zero_detected: bool,
}

/// Essential-spectrum edge of `H` by the fiber sweep.
///
/// For each `y`-node the fiber matrix `diag(k0(., y)) - gamma*M1` is
/// diagonalized and its minimum recorded; symmetrically in `x` for `W2`.
/// The edge is the minimum over both sweeps and the potential range.
pub fn essential_edge(asm: &ModelAssembly) -> Result<EssentialEdgeReport> {
    let nx = asm.nx();
    let ny = asm.ny();

    // fiber = diag(k0(:, j)) - gamma * M1, one eigensolve per y-node.
    let w1_fiber_minima: Vec<f64> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let fiber = Mat::from_fn(nx, nx, |r, c| {
                let mut v = -asm.gamma * asm.m1[(r, c)];
                if r == c {
                    v += asm.k0_diag[r * ny + j];
                }
                v
            });
            backend::sym_eigenvalues(fiber.as_ref()).map(|v| v[0])
        })
        .collect::<Result<Vec<f64>>>()?;

    let w2_fiber_minima: Vec<f64> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let fiber = Mat::from_fn(ny, ny, |r, c| {
                let mut v = -asm.m2[(r, c)];
                if r == c {
                    v += asm.k0_diag[i * ny + r];
                }
                v
            });
            backend::sym_eigenvalues(fiber.as_ref()).map(|v| v[0])
        })
        .collect::<Result<Vec<f64>>>()?;

    let (lambda_w1, w1_arg) = argmin(&w1_fiber_minima);
    let (lambda_w2, w2_arg) = argmin(&w2_fiber_minima);

    let mut lambda = asm.k0_min;
    let mut attained = EdgeComponent::H0;
    if lambda_w1 < lambda {
        lambda = lambda_w1;
        attained = EdgeComponent::W1 { y_index: w1_arg };
    }
    if lambda_w2 < lambda {
        lambda = lambda_w2;
        attained = EdgeComponent::W2 { x_index: w2_arg };
    }

    Ok(EssentialEdgeReport {
        sigma_h0_range: (asm.k0_min, asm.k0_max),
        w1_fiber_minima,
        w2_fiber_minima,
        lambda_w1,
        lambda_w2,
        lambda,
        attained,
        k0_zero_detected: asm.k0_zero_detected,
    })
}

fn argmin(values: &[f64]) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

/// `eta0 = sup sigma_e(T)`, the top of the essential spectrum of the
/// tensor sum.
#[derive(Debug, Clone)]
pub struct Eta0 {
    pub value: f64,
    /// Discrete spectrum of the first-axis kernel used in the computation.
    pub sigma_d_k1: Vec<f64>,
    pub sigma_d_k2: Vec<f64>,
}

/// Discrete spectra of the two kernels, from rank structure when declared
/// (optionally capped at `truncation` terms) and from the discretized
/// matrices otherwise. The boolean records whether either kernel truncates
/// an infinite series.
fn kernel_discrete_spectra(
    asm: &ModelAssembly,
    truncation: Option<usize>,
) -> Result<(Vec<f64>, Vec<f64>, bool)> {
    let mut truncated = false;
    let scaled_k1: Vec<f64> = match &asm.k1_rank {
        Some(rank) => {
            truncated |= rank.truncated_series;
            rank.coefficients(COMPACT_ZERO_TOL, truncation)
        }
        None => extract_discrete(&asm.m1)?,
    };
    let k2: Vec<f64> = match &asm.k2_rank {
        Some(rank) => {
            truncated |= rank.truncated_series;
            rank.coefficients(COMPACT_ZERO_TOL, truncation)
        }
        None => extract_discrete(&asm.m2)?,
    };
    Ok((scaled_k1, k2, truncated))
}

fn extract_discrete(m: &Mat<f64>) -> Result<Vec<f64>> {
    let vals = backend::sym_eigenvalues(m.as_ref())?;
    Ok(vals
        .into_iter()
        .filter(|v| v.abs() > COMPACT_ZERO_TOL)
        .collect())
}

/// `eta0 = max({0} u sigma_d(K1) u sigma_d(K2))` for `T = gamma*T1 + T2`
/// (the first-axis spectrum is scaled by `gamma`).
pub fn eta0(asm: &ModelAssembly, truncation: Option<usize>) -> Result<Eta0> {
    let (k1, k2, _) = kernel_discrete_spectra(asm, truncation)?;
    let k1_scaled: Vec<f64> = k1.iter().map(|v| asm.gamma * v).collect();
    let mut value = 0.0f64;
    for &v in k1_scaled.iter().chain(&k2) {
        value = value.max(v);
    }
    Ok(Eta0 {
        value,
        sigma_d_k1: k1_scaled,
        sigma_d_k2: k2,
    })
}

/// Outcome of the finiteness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinitenessVerdict {
    /// The lower bound `H0 >= (E_min(H) + eta0) E` holds and `sigma_d(T)` is
    /// finite: the number of eigenvalues below the edge is finite.
    FiniteSpectrumPredicted,
    /// The lower bound holds but `sigma_d(T)` grows with the truncation
    /// level, which is the necessary condition for accumulation.
    EfimovPossible,
    /// The lower bound fails somewhere on the grid; no conclusion.
    PremiseViolated,
}

impl std::fmt::Display for FinitenessVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FinitenessVerdict::FiniteSpectrumPredicted => "finite-spectrum-predicted",
            FinitenessVerdict::EfimovPossible => "efimov-possible",
            FinitenessVerdict::PremiseViolated => "premise-violated",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct FinitenessReport {
    pub verdict: FinitenessVerdict,
    pub lambda: f64,
    pub eta0: f64,
    /// `min k0 - (lambda + eta0)`; the premise holds when this is
    /// >= -1e-10.
    pub premise_margin: f64,
    /// Size of `sigma_d(T)` at the declared (or discretized) truncation.
    pub sigma_d_t_len: usize,
    /// Whether a kernel declares itself a truncated infinite series.
    pub truncated_series: bool,
}

/// Test the premise `H0 >= (E_min(H) + eta0) E` pointwise on the grid and
/// classify the model by whether `sigma_d(T)` is finite in the
/// truncation-stable sense (a kernel whose rank structure truncates an
/// infinite series keeps growing its discrete spectrum with the truncation
/// level; certifying infinitude without such a declaration is impossible
/// from a finite discretization, so undeclared kernels count as finite).
pub fn thm41_finiteness_test(asm: &ModelAssembly) -> Result<FinitenessReport> {
    let edge = essential_edge(asm)?;
    let eta = eta0(asm, None)?;
    let premise_margin = asm.k0_min - (edge.lambda + eta.value);

    let (k1, k2, truncated) = kernel_discrete_spectra(asm, None)?;
    let k1_scaled: Vec<f64> = k1.iter().map(|v| asm.gamma * v).collect();
    let ts = tensor_spectrum(
        &SpectralSet::new(k1_scaled, true),
        &SpectralSet::new(k2, true),
    );

    let verdict = if premise_margin < -1e-10 {
        FinitenessVerdict::PremiseViolated
    } else if truncated {
        FinitenessVerdict::EfimovPossible
    } else {
        FinitenessVerdict::FiniteSpectrumPredicted
    };

    Ok(FinitenessReport {
        verdict,
        lambda: edge.lambda,
        eta0: eta.value,
        premise_margin,
        sigma_d_t_len: ts.discrete.len(),
        truncated_series: truncated,
    })
}

/// Which sufficiency inequality a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `(W1 f_k, f_k) < Lambda_1 + (T2 f_k, f_k)` with `f_k = 1 (x) phi_k`.
    Condition5,
    /// `(W2 f_k, f_k) < Lambda_2 + (T1 f_k, f_k)` with `f_k = phi_k (x) 1`.
    Condition6,
}

#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    /// The edge `Lambda` the inequality is tested against.
    pub lambda: f64,
    pub rows: Vec<ConditionRow>,
    /// All rows passed: the tested family witnesses the sufficiency
    /// condition at this resolution.
    pub all_pass: bool,
}

const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Check the first sufficiency condition on a supplied orthonormal family
/// over the second axis.
///
/// Requires the edge to be attained by the `W1` component (up to ties);
/// use [`condition6_check`] when it is attained by `W2` instead.
pub fn condition5_check(asm: &ModelAssembly, family: &[BasisFn]) -> Result<ConditionReport> {
    condition_check(asm, family, ConditionKind::Condition5)
}

/// Mirror image of [`condition5_check`] with the axes swapped.
pub fn condition6_check(asm: &ModelAssembly, family: &[BasisFn]) -> Result<ConditionReport> {
    condition_check(asm, family, ConditionKind::Condition6)
}

fn condition_check(
    asm: &ModelAssembly,
    family: &[BasisFn],
    kind: ConditionKind,
) -> Result<ConditionReport> {
    if family.is_empty() {
        return Err(Error::InvalidParams("empty orthonormal family".into()));
    }
    let (grid, other_grid) = match kind {
        ConditionKind::Condition5 => (&asm.grid.gy, &asm.grid.gx),
        ConditionKind::Condition6 => (&asm.grid.gx, &asm.grid.gy),
    };

    // Sampled, weight-scaled family members; Gram defect against identity.
    let samples: Vec<Vec<f64>> = family
        .iter()
        .map(|b| {
            grid.nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&x, &w)| w.sqrt() * (b.f)(x))
                .collect()
        })
        .collect();
    let mut defect = 0.0f64;
    for (i, vi) in samples.iter().enumerate() {
        for (j, vj) in samples.iter().enumerate() {
            let g = crate::linalg::dot(vi, vj);
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((g - target).abs());
        }
    }
    if defect > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal {
            defect,
            tol: ORTHONORMALITY_TOL,
        });
    }

    let edge = essential_edge(asm)?;
    let precondition_tol = 1e-8 * edge.lambda.abs().max(1.0);
    let (lambda_this, lambda_other) = match kind {
        ConditionKind::Condition5 => (edge.lambda_w1, edge.lambda_w2),
        ConditionKind::Condition6 => (edge.lambda_w2, edge.lambda_w1),
    };
    if lambda_this > lambda_other + precondition_tol {
        return Err(Error::EdgeComponentMismatch {
            attained: match kind {
                ConditionKind::Condition5 => "W2",
                ConditionKind::Condition6 => "W1",
            },
            lambda_this,
            lambda_other,
        });
    }

    let (w_op, t_other) = match kind {
        ConditionKind::Condition5 => (
            asm.operator(OperatorRole::W1),
            asm.operator(OperatorRole::T2),
        ),
        ConditionKind::Condition6 => (
            asm.operator(OperatorRole::W2),
            asm.operator(OperatorRole::T1),
        ),
    };

    // Normalized constant function on the other axis.
    let measure = other_grid.measure();
    let phi0 = 1.0 / measure.sqrt();

    let mut rows = Vec::with_capacity(family.len());
    for (b, sample) in family.iter().zip(&samples) {
        let v = separable_vector(asm, sample, phi0, kind);
        let lhs = quadratic_form(&w_op, &v)?;
        let rhs = lambda_this + quadratic_form(&t_other, &v)?;
        let margin = rhs - lhs;
        rows.push(ConditionRow {
            index: b.index,
            lhs,
            rhs,
            margin,
            pass: margin > 0.0,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(ConditionReport {
        kind,
        lambda: lambda_this,
        rows,
        all_pass,
    })
}

/// Weight-scaled samples of `phi0 (x) b` (condition 5) or `b (x) phi0`
/// (condition 6) on the product grid.
fn separable_vector(
    asm: &ModelAssembly,
    axis_sample: &[f64],
    phi0: f64,
    kind: ConditionKind,
) -> Vec<f64> {
    let nx = asm.nx();
    let ny = asm.ny();
    let mut v = vec![0.0; nx * ny];
    match kind {
        ConditionKind::Condition5 => {
            for i in 0..nx {
                let wx = asm.grid.gx.weights[i].sqrt() * phi0;
                for j in 0..ny {
                    v[i * ny + j] = wx * axis_sample[j];
                }
            }
        }
        ConditionKind::Condition6 => {
            for i in 0..nx {
                for j in 0..ny {
                    let wy = asm.grid.gy.weights[j].sqrt() * phi0;
                    v[i * ny + j] = axis_sample[i] * wy;
                }
            }
        }
    }
    v
}

/// How eigenvalue counts are computed: dense below the threshold, seeded
/// subspace iteration above it.
#[derive(Debug, Clone)]
pub struct SolveOpts {
    /// Largest dimension handled by a full dense eigensolve.
    pub dense_threshold: usize,
    /// Seed for the iterative solver's start block.
    pub seed: u64,
    /// Relative residual tolerance of the iterative solver.
    pub iter_tol: f64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self {
            dense_threshold: 3600,
            seed: 42,
            iter_tol: 1e-9,
        }
    }
}

/// Eigenvalues strictly below an edge.
#[derive(Debug, Clone)]
pub struct CountBelow {
    /// Number of eigenvalues `< lambda - tol`.
    pub count: usize,
    /// Those eigenvalues, ascending.
    pub below: Vec<f64>,
    /// The smallest eigenvalues that were computed (at least five when the
    /// dimension allows), whether below the edge or not.
    pub lowest: Vec<f64>,
}

/// Count the eigenvalues of `op` strictly below `lambda - tol`.
pub fn count_below(
    op: &SymmetricOperator,
    lambda: f64,
    tol: f64,
    opts: &SolveOpts,
) -> Result<CountBelow> {
    let n = op.dim();
    let cutoff = lambda - tol;
    if op.has_dense_path() && n <= opts.dense_threshold {
        let vals = spectra::eigvals_symmetric(op)?;
        let below: Vec<f64> = vals.iter().copied().take_while(|&v| v < cutoff).collect();
        let lowest: Vec<f64> = vals.iter().copied().take(5).collect();
        return Ok(CountBelow {
            count: below.len(),
            below,
            lowest,
        });
    }

    let mut m = 8.min(n);
    loop {
        let le = spectra::lowest_eigenpairs(op, m, opts.iter_tol, opts.seed)?;
        let top = *le.values.last().expect("m >= 1");
        if top >= cutoff || m == n {
            let below: Vec<f64> = le
                .values
                .iter()
                .copied()
                .take_while(|&v| v < cutoff)
                .collect();
            let lowest: Vec<f64> = le.values.iter().copied().take(5).collect();
            return Ok(CountBelow {
                count: below.len(),
                below,
                lowest,
            });
        }
        if m >= 128 {
            return Err(Error::InvalidParams(format!(
                "more than {m} eigenvalues below the edge; use a dense solve for this operator"
            )));
        }
        m = (2 * m).min(n);
    }
}

/// One row of an accumulation study.
#[derive(Debug, Clone)]
pub struct AccumulationRow {
    pub label: String,
    pub nx: usize,
    pub ny: usize,
    pub dim: usize,
    pub lambda: f64,
    pub count: usize,
    /// Distance from the edge to the closest eigenvalue below it; absent
    /// when no eigenvalue lies below.
    pub gap: Option<f64>,
    /// Up to five smallest eigenvalues.
    pub lowest: Vec<f64>,
    /// Set when the row was skipped (dense cap exceeded).
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccumulationVerdict {
    /// Counts nondecreasing and gaps shrinking by at least the required
    /// factor: consistent with eigenvalues accumulating at the edge.
    AccumulationConsistent,
    /// No eigenvalues below the edge anywhere in the schedule.
    NoAccumulation,
    Inconsistent(String),
}

impl std::fmt::Display for AccumulationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AccumulationVerdict::AccumulationConsistent => f.write_str("accumulation consistent"),
            AccumulationVerdict::NoAccumulation => f.write_str("no accumulation"),
            AccumulationVerdict::Inconsistent(why) => write!(f, "inconsistent: {why}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AccumulationTable {
    pub rows: Vec<AccumulationRow>,
    pub verdict: AccumulationVerdict,
    /// Gap-shrink factor the verdict requires between consecutive rows.
    pub required_gap_factor: f64,
}

/// One entry of an accumulation schedule: potential truncation, kernel
/// truncation, quadrature order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleRow {
    pub m: usize,
    pub n: usize,
    pub g: usize,
}

#[derive(Debug, Clone)]
pub struct StudyOpts {
    pub dense_cap: usize,
    pub solve: SolveOpts,
    /// Consecutive gaps must shrink by at least this factor.
    pub gap_factor: f64,
}

impl Default for StudyOpts {
    fn default() -> Self {
        Self {
            dense_cap: crate::operators::DEFAULT_DENSE_CAP,
            solve: SolveOpts::default(),
            gap_factor: 1.2,
        }
    }
}

/// Run the accumulation study: along a schedule of increasing kernel
/// truncations, assemble `H`, count the eigenvalues below the edge, and
/// check that the counts are nondecreasing while the gap to the edge
/// shrinks.
///
/// The model for each row comes from `make_spec`, since changing the
/// truncation changes the kernel itself. Rows whose dense dimension exceeds
/// the cap are skipped with a notice.
pub fn accumulation_study<F>(
    make_spec: F,
    schedule: &[ScheduleRow],
    opts: &StudyOpts,
) -> Result<AccumulationTable>
where
    F: Fn(&ScheduleRow) -> Result<crate::operators::ModelSpec>,
{
    if schedule.is_empty() {
        return Err(Error::InvalidParams("empty schedule".into()));
    }
    for pair in schedule.windows(2) {
        if pair[1].n <= pair[0].n {
            return Err(Error::InvalidParams(
                "schedule must be strictly increasing in the kernel truncation".into(),
            ));
        }
    }

    let mut rows = Vec::with_capacity(schedule.len());
    for entry in schedule {
        let label = format!("M={} N={} g={}", entry.m, entry.n, entry.g);
        let spec = make_spec(entry)?;
        let asm = ModelAssembly::new(&spec)?;
        let dim = asm.dim();
        if dim > opts.dense_cap {
            rows.push(AccumulationRow {
                label,
                nx: asm.nx(),
                ny: asm.ny(),
                dim,
                lambda: f64::NAN,
                count: 0,
                gap: None,
                lowest: Vec::new(),
                skipped: Some(format!(
                    "dense dimension {dim} exceeds the cap {}",
                    opts.dense_cap
                )),
            });
            continue;
        }
        let edge = essential_edge(&asm)?;
        let h = asm.operator_dense(OperatorRole::H, opts.dense_cap)?;
        let tol = default_edge_tol(edge.lambda);
        let cb = count_below(&h, edge.lambda, tol, &opts.solve)?;
        let gap = cb.below.last().map(|&top| edge.lambda - top);
        rows.push(AccumulationRow {
            label,
            nx: asm.nx(),
            ny: asm.ny(),
            dim,
            lambda: edge.lambda,
            count: cb.count,
            gap,
            lowest: cb.lowest,
            skipped: None,
        });
    }

    let verdict = classify_accumulation(&rows, opts.gap_factor);
    Ok(AccumulationTable {
        rows,
        verdict,
        required_gap_factor: opts.gap_factor,
    })
}

fn classify_accumulation(rows: &[AccumulationRow], gap_factor: f64) -> AccumulationVerdict {
    let computed: Vec<&AccumulationRow> = rows.iter().filter(|r| r.skipped.is_none()).collect();
    if computed.is_empty() {
        return AccumulationVerdict::Inconsistent("every row was skipped".into());
    }
    if computed.iter().all(|r| r.count == 0) {
        return AccumulationVerdict::NoAccumulation;
    }
    for pair in computed.windows(2) {
        if pair[1].count < pair[0].count {
            return AccumulationVerdict::Inconsistent(format!(
                "count dropped from {} ({}) to {} ({})",
                pair[0].count, pair[0].label, pair[1].count, pair[1].label
            ));
        }
        match (pair[0].gap, pair[1].gap) {
            (Some(g0), Some(g1)) => {
                if g0 < gap_factor * g1 {
                    return AccumulationVerdict::Inconsistent(format!(
                        "gap shrank only by {:.3} from {} to {}",
                        g0 / g1,
                        pair[0].label,
                        pair[1].label
                    ));
                }
            }
            (None, Some(_)) => {}
            _ => {
                return AccumulationVerdict::Inconsistent(format!(
                    "no eigenvalue below the edge in {}",
                    pair[1].label
                ));
            }
        }
    }
    AccumulationVerdict::AccumulationConsistent
}
