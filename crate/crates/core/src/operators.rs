//! Discretization of the model operators.
//!
//! Kernels become matrices through a symmetrized Nyström scheme: the plain
//! Nyström matrix `k(x_i, x_j) w_j` is similarity-transformed by
//! `diag(sqrt(w))`, giving the exactly symmetric `sqrt(w_i) k(x_i, x_j)
//! sqrt(w_j)` with the same spectrum. Every operator downstream lives in
//! these symmetrized coordinates, and vectors representing functions
//! `f(x, y)` store `sqrt(w_i w_j) f(x_i, y_j)` so the Euclidean inner
//! product approximates the L2 one.
//!
//! Two-axis operators carry their Kronecker structure
//! `diag(k0) + cx * (M1 (x) I) + cy * (I (x) M2)` alongside (or instead of)
//! a dense matrix, which keeps quadratic forms and iterative eigensolves
//! cheap on grids where the dense form would be oversized.

use std::sync::Arc;

use faer::{Mat, MatRef};

use crate::backend;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::{product_grid, Grid1D, Grid2D};

/// Default cap on the linear dimension `n_x * n_y` of dense 2-D assemblies.
pub const DEFAULT_DENSE_CAP: usize = 6400;

/// Tolerance for the pointwise nonnegativity of the potential.
pub const K0_NONNEG_TOL: f64 = 1e-12;

/// A node value of the potential at or below this counts as "potential
/// vanishes somewhere on the grid".
pub const K0_ZERO_TOL: f64 = 1e-8;

/// Discretized one-axis kernels must be positive semidefinite within this
/// eigenvalue tolerance.
pub const PSD_TOL: f64 = 1e-10;

pub type ScalarFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ScalarFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Which arguments a kernel consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Kernel `k1(x, s)` acting on the first axis.
    XKernel,
    /// Kernel `k2(y, t)` acting on the second axis.
    YKernel,
    /// Potential `k0(x, y)` acting by multiplication.
    Potential,
}

/// One term `coefficient * e(s) e(t)` of a rank-structured kernel.
#[derive(Clone)]
pub struct RankTerm {
    pub coefficient: f64,
    pub factor: ScalarFn1,
}

/// Declares that a kernel is (a truncation of) `sum_n c_n e_n(s) e_n(t)`.
#[derive(Clone)]
pub struct RankStructure {
    pub terms: Vec<RankTerm>,
    /// True when the term list truncates an infinite series, so the discrete
    /// spectrum of the full kernel keeps growing with the truncation level.
    pub truncated_series: bool,
}

impl RankStructure {
    /// Evaluate the rank sum, optionally capped at `max_terms`.
    pub fn eval(&self, s: f64, t: f64, max_terms: Option<usize>) -> f64 {
        let n = max_terms.unwrap_or(self.terms.len()).min(self.terms.len());
        self.terms[..n]
            .iter()
            .map(|term| term.coefficient * (term.factor)(s) * (term.factor)(t))
            .sum()
    }

    /// Coefficients with modulus above `tol`, i.e. the declared discrete
    /// spectrum of the kernel's integral operator.
    pub fn coefficients(&self, tol: f64, max_terms: Option<usize>) -> Vec<f64> {
        let n = max_terms.unwrap_or(self.terms.len()).min(self.terms.len());
        self.terms[..n]
            .iter()
            .map(|t| t.coefficient)
            .filter(|c| c.abs() > tol)
            .collect()
    }
}

/// Declarative description of one kernel of the model.
#[derive(Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    eval: ScalarFn2,
    pub rank: Option<RankStructure>,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, eval: ScalarFn2) -> Self {
        Self {
            kind,
            eval,
            rank: None,
        }
    }

    pub fn x_kernel(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(KernelKind::XKernel, Arc::new(f))
    }

    pub fn y_kernel(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(KernelKind::YKernel, Arc::new(f))
    }

    pub fn potential(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(KernelKind::Potential, Arc::new(f))
    }

    pub fn constant(kind: KernelKind, c: f64) -> Self {
        Self::new(kind, Arc::new(move |_, _| c))
    }

    pub fn zero(kind: KernelKind) -> Self {
        Self::constant(kind, 0.0)
    }

    pub fn with_rank(mut self, rank: RankStructure) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        (self.eval)(s, t)
    }
}

/// Quadrature parameters for one axis of the model.
#[derive(Debug, Clone)]
pub struct AxisSpec {
    pub a: f64,
    pub b: f64,
    pub breakpoints: Vec<f64>,
    pub order: usize,
}

impl AxisSpec {
    pub fn unit_interval(breakpoints: Vec<f64>, order: usize) -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            breakpoints,
            order,
        }
    }

    pub fn build(&self) -> Result<Grid1D> {
        crate::quadrature::build_grid(self.a, self.b, &self.breakpoints, self.order)
    }
}

/// One instance of the model `H = H0 - (gamma * T1 + T2)`.
///
/// `gamma = 1` recovers the unweighted model `H = H0 - T1 - T2`.
#[derive(Clone)]
pub struct ModelSpec {
    pub k0: KernelSpec,
    pub k1: KernelSpec,
    pub k2: KernelSpec,
    pub gamma: f64,
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
}

impl ModelSpec {
    fn check_kinds(&self) -> Result<()> {
        if self.k0.kind != KernelKind::Potential {
            return Err(Error::InvalidParams("k0 must be a potential".into()));
        }
        if self.k1.kind != KernelKind::XKernel {
            return Err(Error::InvalidParams("k1 must be an x-axis kernel".into()));
        }
        if self.k2.kind != KernelKind::YKernel {
            return Err(Error::InvalidParams("k2 must be a y-axis kernel".into()));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Which operator a matrix stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorRole {
    H,
    H0,
    T1,
    T2,
    T,
    W1,
    W2,
    K1,
    K2,
    Other,
}

impl std::fmt::Display for OperatorRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            OperatorRole::H => "H",
            OperatorRole::H0 => "H0",
            OperatorRole::T1 => "T1",
            OperatorRole::T2 => "T2",
            OperatorRole::T => "T",
            OperatorRole::W1 => "W1",
            OperatorRole::W2 => "W2",
            OperatorRole::K1 => "K1",
            OperatorRole::K2 => "K2",
            OperatorRole::Other => "operator",
        };
        f.write_str(name)
    }
}

/// Matrix-free form `diag + cx * (M1 (x) I) + cy * (I (x) M2)` on the
/// row-major flattening of an `nx * ny` grid.
#[derive(Clone)]
pub struct KronSum {
    pub nx: usize,
    pub ny: usize,
    pub diag: Option<Vec<f64>>,
    pub x_coeff: f64,
    pub x_block: Option<Mat<f64>>,
    pub y_coeff: f64,
    pub y_block: Option<Mat<f64>>,
}

impl KronSum {
    pub fn dim(&self) -> usize {
        self.nx * self.ny
    }

    /// `y = A x`. Fixed loop order keeps the result independent of callers'
    /// threading.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        match &self.diag {
            Some(d) => {
                for (yi, (di, xi)) in y.iter_mut().zip(d.iter().zip(x)) {
                    *yi = di * xi;
                }
            }
            None => y.fill(0.0),
        }
        if let (Some(mx), c) = (&self.x_block, self.x_coeff) {
            if c != 0.0 {
                for i in 0..nx {
                    for k in 0..nx {
                        let a = c * mx[(i, k)];
                        let xrow = &x[k * ny..(k + 1) * ny];
                        let yrow = &mut y[i * ny..(i + 1) * ny];
                        for j in 0..ny {
                            yrow[j] += a * xrow[j];
                        }
                    }
                }
            }
        }
        if let (Some(my), c) = (&self.y_block, self.y_coeff) {
            if c != 0.0 {
                for i in 0..nx {
                    let xrow = &x[i * ny..(i + 1) * ny];
                    let yrow = &mut y[i * ny..(i + 1) * ny];
                    for j in 0..ny {
                        let mut acc = 0.0;
                        for l in 0..ny {
                            acc += my[(j, l)] * xrow[l];
                        }
                        yrow[j] += c * acc;
                    }
                }
            }
        }
    }

    /// Materialize as a dense symmetric matrix.
    pub fn to_dense(&self) -> Mat<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        if let Some(d) = &self.diag {
            for (idx, &v) in d.iter().enumerate() {
                m[(idx, idx)] += v;
            }
        }
        if let (Some(mx), c) = (&self.x_block, self.x_coeff) {
            if c != 0.0 {
                for i in 0..nx {
                    for k in 0..nx {
                        let a = c * mx[(i, k)];
                        for j in 0..ny {
                            m[(i * ny + j, k * ny + j)] += a;
                        }
                    }
                }
            }
        }
        if let (Some(my), c) = (&self.y_block, self.y_coeff) {
            if c != 0.0 {
                for i in 0..nx {
                    for j in 0..ny {
                        for l in 0..ny {
                            m[(i * ny + j, i * ny + l)] += c * my[(j, l)];
                        }
                    }
                }
            }
        }
        m
    }
}

enum Storage {
    Dense(Mat<f64>),
    Diagonal(Vec<f64>),
    Kron(KronSum),
}

/// A self-adjoint operator in symmetrized coordinates.
///
/// Dense operators built from a 2-D assembly keep the Kronecker structure as
/// metadata, so the matrix-free apply stays available next to the matrix.
pub struct SymmetricOperator {
    storage: Storage,
    structure: Option<KronSum>,
    pub role: OperatorRole,
}

impl SymmetricOperator {
    /// Wrap a dense matrix, enforcing squareness and symmetry to 1e-12.
    pub fn from_dense(matrix: Mat<f64>, role: OperatorRole) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::EmptyOperator);
        }
        let defect = symmetry_defect(matrix.as_ref());
        if defect > 1e-12 {
            return Err(Error::NotSymmetric { defect });
        }
        Ok(Self {
            storage: Storage::Dense(matrix),
            structure: None,
            role,
        })
    }

    pub fn from_diagonal(diag: Vec<f64>, role: OperatorRole) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyOperator);
        }
        Ok(Self {
            storage: Storage::Diagonal(diag),
            structure: None,
            role,
        })
    }

    pub fn from_kron(kron: KronSum, role: OperatorRole) -> Result<Self> {
        if kron.dim() == 0 {
            return Err(Error::EmptyOperator);
        }
        Ok(Self {
            storage: Storage::Kron(kron),
            structure: None,
            role,
        })
    }

    fn with_structure(mut self, kron: KronSum) -> Self {
        self.structure = Some(kron);
        self
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Diagonal(d) => d.len(),
            Storage::Kron(k) => k.dim(),
        }
    }

    /// Dense matrix view, if this operator is stored densely.
    pub fn dense(&self) -> Option<MatRef<'_, f64>> {
        match &self.storage {
            Storage::Dense(m) => Some(m.as_ref()),
            _ => None,
        }
    }

    /// Diagonal entries, if this operator is stored as a diagonal.
    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Diagonal(d) => Some(d),
            _ => None,
        }
    }

    /// Kronecker structure: either the storage itself or the cached mirror
    /// of a dense assembly.
    pub fn structure(&self) -> Option<&KronSum> {
        match &self.storage {
            Storage::Kron(k) => Some(k),
            _ => self.structure.as_ref(),
        }
    }

    /// True if a dense eigensolve can run directly on the storage.
    pub fn has_dense_path(&self) -> bool {
        matches!(self.storage, Storage::Dense(_) | Storage::Diagonal(_))
    }

    /// Materialize the dense matrix regardless of storage.
    pub fn to_dense(&self) -> Mat<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Diagonal(d) => {
                let mut m = Mat::zeros(d.len(), d.len());
                for (i, &v) in d.iter().enumerate() {
                    m[(i, i)] = v;
                }
                m
            }
            Storage::Kron(k) => k.to_dense(),
        }
    }

    /// `y = A x` through the stored representation.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        match &self.storage {
            Storage::Dense(m) => {
                y.fill(0.0);
                let n = m.nrows();
                for j in 0..n {
                    let xj = x[j];
                    for (i, yi) in y.iter_mut().enumerate().take(n) {
                        *yi += m[(i, j)] * xj;
                    }
                }
            }
            Storage::Diagonal(d) => {
                for (yi, (di, xi)) in y.iter_mut().zip(d.iter().zip(x)) {
                    *yi = di * xi;
                }
            }
            Storage::Kron(k) => k.apply(x, y),
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// Max-norm symmetry defect of the dense storage (0 for structured
    /// storages, which are symmetric by construction).
    pub fn symmetry_defect(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => symmetry_defect(m.as_ref()),
            _ => 0.0,
        }
    }
}

pub(crate) fn symmetry_defect(m: MatRef<'_, f64>) -> f64 {
    let n = m.nrows();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            defect = defect.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    defect
}

/// Symmetrized Nyström matrix `sqrt(w_i) k(x_i, x_j) sqrt(w_j)` of a one-axis
/// kernel.
///
/// Only the upper triangle is evaluated and mirrored, so the result is
/// exactly symmetric even when the evaluator is symmetric only to rounding.
/// The evaluator's declared symmetry is spot-checked on a sample of node
/// pairs first.
pub fn discretize_kernel(kernel: &KernelSpec, grid: &Grid1D) -> Result<SymmetricOperator> {
    if kernel.kind == KernelKind::Potential {
        return Err(Error::InvalidParams(
            "discretize_kernel expects a one-axis kernel, not a potential".into(),
        ));
    }
    let role = match kernel.kind {
        KernelKind::XKernel => OperatorRole::K1,
        KernelKind::YKernel => OperatorRole::K2,
        KernelKind::Potential => unreachable!(),
    };
    let m = nystrom_matrix(kernel, grid)?;
    SymmetricOperator::from_dense(m, role)
}

pub(crate) fn nystrom_matrix(kernel: &KernelSpec, grid: &Grid1D) -> Result<Mat<f64>> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    // Spot-check Hermitian symmetry on a stride of node pairs.
    let stride = (n / 8).max(1);
    for i in (0..n).step_by(stride) {
        for j in (0..n).step_by(stride) {
            if j <= i {
                continue;
            }
            let (s, t) = (grid.nodes[i], grid.nodes[j]);
            let a = kernel.eval(s, t);
            let b = kernel.eval(t, s);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFiniteKernel { s, t });
            }
            let defect = (a - b).abs();
            if defect > 1e-12 * a.abs().max(1.0) {
                return Err(Error::AsymmetricKernel { s, t, defect });
            }
        }
    }
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(grid.nodes[i], grid.nodes[j]);
            if !v.is_finite() {
                return Err(Error::NonFiniteKernel {
                    s: grid.nodes[i],
                    t: grid.nodes[j],
                });
            }
            let e = sw[i] * v * sw[j];
            m[(i, j)] = e;
            m[(j, i)] = e;
        }
    }
    Ok(m)
}

/// Diagonal multiplication operator `D[(i,j)] = k0(x_i, y_j)`.
pub fn assemble_h0(k0: &KernelSpec, grid: &Grid2D) -> Result<SymmetricOperator> {
    if k0.kind != KernelKind::Potential {
        return Err(Error::InvalidParams(
            "assemble_h0 expects a potential kernel".into(),
        ));
    }
    let diag = potential_diag(k0, grid)?;
    SymmetricOperator::from_diagonal(diag, OperatorRole::H0)
}

fn potential_diag(k0: &KernelSpec, grid: &Grid2D) -> Result<Vec<f64>> {
    let mut diag = Vec::with_capacity(grid.len());
    for i in 0..grid.gx.len() {
        let x = grid.gx.nodes[i];
        for j in 0..grid.gy.len() {
            let y = grid.gy.nodes[j];
            let v = k0.eval(x, y);
            if !v.is_finite() {
                return Err(Error::NonFiniteKernel { s: x, t: y });
            }
            diag.push(v);
        }
    }
    Ok(diag)
}

/// Cached discretization of one [`ModelSpec`]: the two one-axis Nyström
/// matrices, the potential diagonal, and the standing-assumption checks
/// (`k0 >= 0` pointwise, discretized kernels positive semidefinite).
pub struct ModelAssembly {
    pub grid: Grid2D,
    pub m1: Mat<f64>,
    pub m2: Mat<f64>,
    pub k0_diag: Vec<f64>,
    pub gamma: f64,
    pub k0_min: f64,
    pub k0_max: f64,
    /// Whether the potential vanishes (within [`K0_ZERO_TOL`]) at some grid
    /// node. A zero strictly between nodes is undetectable and is not
    /// guessed at.
    pub k0_zero_detected: bool,
    pub k1_min_eig: f64,
    pub k2_min_eig: f64,
    pub k1_rank: Option<RankStructure>,
    pub k2_rank: Option<RankStructure>,
}

impl ModelAssembly {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        spec.check_kinds()?;
        let gx = spec.x_axis.build()?;
        let gy = spec.y_axis.build()?;
        let m1 = nystrom_matrix(&spec.k1, &gx)?;
        let m2 = nystrom_matrix(&spec.k2, &gy)?;
        let grid = product_grid(gx, gy);
        let k0_diag = potential_diag(&spec.k0, &grid)?;

        let k0_min = k0_diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let k0_max = k0_diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if k0_min < -K0_NONNEG_TOL {
            return Err(Error::AssumptionViolated(format!(
                "potential must be nonnegative; min node value {k0_min:e}"
            )));
        }
        let k1_min_eig = backend::sym_eigenvalues(m1.as_ref())?[0];
        let k2_min_eig = backend::sym_eigenvalues(m2.as_ref())?[0];
        if k1_min_eig < -PSD_TOL {
            return Err(Error::AssumptionViolated(format!(
                "discretized k1 is not positive semidefinite (min eigenvalue {k1_min_eig:e})"
            )));
        }
        if k2_min_eig < -PSD_TOL {
            return Err(Error::AssumptionViolated(format!(
                "discretized k2 is not positive semidefinite (min eigenvalue {k2_min_eig:e})"
            )));
        }

        Ok(Self {
            grid,
            m1,
            m2,
            k0_diag,
            gamma: spec.gamma,
            k0_min,
            k0_max,
            k0_zero_detected: k0_min <= K0_ZERO_TOL,
            k1_min_eig,
            k2_min_eig,
            k1_rank: spec.k1.rank.clone(),
            k2_rank: spec.k2.rank.clone(),
        })
    }

    pub fn nx(&self) -> usize {
        self.grid.gx.len()
    }

    pub fn ny(&self) -> usize {
        self.grid.gy.len()
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    fn kron(&self, diag: bool, x_coeff: f64, y_coeff: f64) -> KronSum {
        KronSum {
            nx: self.nx(),
            ny: self.ny(),
            diag: diag.then(|| self.k0_diag.clone()),
            x_coeff,
            x_block: (x_coeff != 0.0).then(|| self.m1.clone()),
            y_coeff,
            y_block: (y_coeff != 0.0).then(|| self.m2.clone()),
        }
    }

    fn role_parts(&self, role: OperatorRole) -> (bool, f64, f64) {
        match role {
            OperatorRole::H0 => (true, 0.0, 0.0),
            OperatorRole::T1 => (false, self.gamma, 0.0),
            OperatorRole::T2 => (false, 0.0, 1.0),
            OperatorRole::T => (false, self.gamma, 1.0),
            OperatorRole::W1 => (true, -self.gamma, 0.0),
            OperatorRole::W2 => (true, 0.0, -1.0),
            OperatorRole::H => (true, -self.gamma, -1.0),
            _ => unreachable!("not a two-axis role"),
        }
    }

    /// Matrix-free form of a two-axis operator. No size cap applies.
    pub fn operator(&self, role: OperatorRole) -> SymmetricOperator {
        let (diag, cx, cy) = self.role_parts(role);
        SymmetricOperator::from_kron(self.kron(diag, cx, cy), role)
            .expect("assembly grids are nonempty")
    }

    /// Dense form of a two-axis operator, refused above `dense_cap`.
    /// The Kronecker structure is cached on the result.
    pub fn operator_dense(
        &self,
        role: OperatorRole,
        dense_cap: usize,
    ) -> Result<SymmetricOperator> {
        let n = self.dim();
        if n > dense_cap {
            return Err(Error::DenseCapExceeded {
                size: n,
                cap: dense_cap,
            });
        }
        let (diag, cx, cy) = self.role_parts(role);
        let kron = self.kron(diag, cx, cy);
        let dense = kron.to_dense();
        Ok(SymmetricOperator {
            storage: Storage::Dense(dense),
            structure: None,
            role,
        }
        .with_structure(kron))
    }

    /// The discretized one-axis operator `K1` (no gamma scaling).
    pub fn k1_operator(&self) -> SymmetricOperator {
        SymmetricOperator::from_dense(self.m1.clone(), OperatorRole::K1)
            .expect("Nystrom matrix is symmetric")
    }

    pub fn k2_operator(&self) -> SymmetricOperator {
        SymmetricOperator::from_dense(self.m2.clone(), OperatorRole::K2)
            .expect("Nystrom matrix is symmetric")
    }
}

/// `gamma * (M1 (x) I)` as a dense matrix with cached structure.
pub fn assemble_t1(spec: &ModelSpec, dense_cap: usize) -> Result<SymmetricOperator> {
    ModelAssembly::new(spec)?.operator_dense(OperatorRole::T1, dense_cap)
}

/// `I (x) M2` as a dense matrix with cached structure.
pub fn assemble_t2(spec: &ModelSpec, dense_cap: usize) -> Result<SymmetricOperator> {
    ModelAssembly::new(spec)?.operator_dense(OperatorRole::T2, dense_cap)
}

/// `gamma * T1 + T2`.
pub fn assemble_t(spec: &ModelSpec, dense_cap: usize) -> Result<SymmetricOperator> {
    ModelAssembly::new(spec)?.operator_dense(OperatorRole::T, dense_cap)
}

/// `H = H0 - gamma * T1 - T2` as a dense matrix with cached structure.
pub fn assemble_h(spec: &ModelSpec, dense_cap: usize) -> Result<SymmetricOperator> {
    ModelAssembly::new(spec)?.operator_dense(OperatorRole::H, dense_cap)
}

/// Rayleigh quotient `v^T A v / v^T v` in symmetrized coordinates.
pub fn quadratic_form(op: &SymmetricOperator, v: &[f64]) -> Result<f64> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: v.len(),
        });
    }
    let nrm2 = linalg::dot(v, v);
    if nrm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let av = op.apply_vec(v);
    Ok(linalg::dot(v, &av) / nrm2)
}
