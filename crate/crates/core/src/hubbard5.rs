//! The worked Hubbard-impurity example model on the unit square.
//!
//! The construction lives on `[0, 1]` with geometric breakpoints
//! `p_n = 1 - 2^-n` and segment midpoints `q_n`. The potential is a sum of
//! tents over the segments `[p_{n-1}, p_n]` with peak heights `delta_n`,
//! clamped to zero on `[0, 1/2]`; the second-axis kernel is the rank sum
//! `sum_n (2/3)^n phi_n (x) phi_n` of windowed sine bumps, which makes the
//! spectral data of `T = gamma*T1 + T2` available in closed form
//! (`omega_n = gamma + (2/3)^n`) as an oracle for the discretization.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::efimov::BasisFn;
use crate::error::{Error, Result};
use crate::operators::{AxisSpec, KernelKind, KernelSpec, ModelSpec, RankStructure, RankTerm};

/// Smallest admissible coupling for the example model.
pub const GAMMA_MIN: f64 = 2.0 / 3.0;

/// Truncation and coupling parameters for the example model.
#[derive(Debug, Clone)]
pub struct Example5Params {
    /// Potential truncation: tents `n = 2..=m` are kept.
    pub m: usize,
    /// Kernel truncation: series terms `n = 1..=n_terms` are kept.
    pub n_terms: usize,
    /// Coupling in front of `T1`; must be at least 2/3.
    pub gamma: f64,
    /// Quadrature order per segment.
    pub g: usize,
    /// Scale in `(0, 1]` on the maximal admissible tent heights
    /// `delta_n = (sqrt(2)/3)^n`; 1 uses the bound itself.
    pub delta_scale: f64,
    /// Treat the kernel as exactly rank `n_terms` instead of as a truncation
    /// of an infinite series. Affects only the finiteness taxonomy, never
    /// the assembled numbers.
    pub exact_rank: bool,
}

impl Default for Example5Params {
    fn default() -> Self {
        Self {
            m: 4,
            n_terms: 4,
            gamma: GAMMA_MIN,
            g: 8,
            delta_scale: 1.0,
            exact_rank: false,
        }
    }
}

impl Example5Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= GAMMA_MIN - 1e-12) {
            return Err(Error::InvalidParams(format!(
                "example5 requires gamma >= 2/3, got {}",
                self.gamma
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidParams(
                "example5 requires the potential truncation M >= 2".into(),
            ));
        }
        if self.n_terms < 1 {
            return Err(Error::InvalidParams(
                "example5 requires the kernel truncation N >= 1".into(),
            ));
        }
        if self.g < 1 {
            return Err(Error::InvalidParams("quadrature order must be >= 1".into()));
        }
        if !(self.delta_scale > 0.0 && self.delta_scale <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "delta_scale must lie in (0, 1], got {}",
                self.delta_scale
            )));
        }
        Ok(())
    }

    /// Tent peak height `delta_n`. `delta_1 = 1` (the first tent is clamped
    /// away anyway); `delta_n = delta_scale * (sqrt(2)/3)^n` for `n >= 2`.
    pub fn delta(&self, n: usize) -> f64 {
        if n <= 1 {
            1.0
        } else {
            self.delta_scale * (SQRT_2 / 3.0).powi(n as i32)
        }
    }
}

/// Breakpoint `p_n = 1 - 2^-n` (so `p_0 = 0`, `p_1 = 1/2`, ...).
pub fn p(n: usize) -> f64 {
    1.0 - 0.5f64.powi(n as i32)
}

/// Peak location of the `n`-th tent: the midpoint of `[p_{n-1}, p_n]`.
pub fn q(n: usize) -> f64 {
    assert!(n >= 1, "q is defined for n >= 1");
    0.5 * (p(n - 1) + p(n))
}

/// The pair `(p_n, q_n)` for `n >= 1`.
pub fn breakpoints(n: usize) -> (f64, f64) {
    (p(n), q(n))
}

/// Piecewise-linear tent on `[p_{kappa-1}, p_kappa]`: 0 at the endpoints,
/// 1 at the midpoint `q_kappa`, 0 outside.
pub fn tent_r(kappa: usize, x: f64) -> f64 {
    assert!(kappa >= 1, "tents are indexed from 1");
    let lo = p(kappa - 1);
    let hi = p(kappa);
    let peak = q(kappa);
    if x < lo || x > hi {
        0.0
    } else if x <= peak {
        (x - lo) / (peak - lo)
    } else {
        (hi - x) / (hi - peak)
    }
}

/// The example potential: zero on `[0, 1/2]`, a sum of scaled tents beyond.
pub fn potential_u(x: f64, params: &Example5Params) -> f64 {
    assert!(
        (0.0..=1.0).contains(&x),
        "potential is defined on [0, 1], got {x}"
    );
    if x <= 0.5 {
        return 0.0;
    }
    let mut acc = 0.0;
    for n in 2..=params.m {
        acc += params.delta(n) * tent_r(n, x);
    }
    acc
}

/// Windowed sine bump `phi_n(y) = 2^{(n+1)/2} sin(pi (y - p_{n-1}) / (p_n -
/// p_{n-1}))` on `[p_{n-1}, p_n]`, zero outside. The family is orthonormal
/// in L2[0, 1]: the supports are disjoint and each bump has unit norm.
pub fn phi(n: usize, y: f64) -> f64 {
    assert!(n >= 1, "bumps are indexed from 1");
    let lo = p(n - 1);
    let hi = p(n);
    if y < lo || y > hi {
        return 0.0;
    }
    let xi = PI * (y - lo) / (hi - lo);
    SQRT_2.powi(n as i32 + 1) * xi.sin()
}

/// Truncated rank-sum kernel `sum_{n=1..N} (2/3)^n phi_n(y) phi_n(t)`.
///
/// The supports of the `phi_n` tile `[0, 1)`, so at most one term is nonzero
/// at any `(y, t)`; the truncated sum is exact whenever `y` or `t` lies in
/// `[0, p_N]` and the only truncation effect is the dead zone `(p_N, 1]`.
pub fn kernel_k2(y: f64, t: f64, params: &Example5Params) -> f64 {
    let mut acc = 0.0;
    for n in 1..=params.n_terms {
        acc += (2.0f64 / 3.0).powi(n as i32) * phi(n, y) * phi(n, t);
    }
    acc
}

/// Magnitude of the truncation tail of [`kernel_k2`] at one evaluation
/// point. Zero unless both coordinates fall in the same segment beyond
/// `p_N`, in which case the tail is the single surviving term.
pub fn k2_tail_bound(y: f64, t: f64, params: &Example5Params) -> f64 {
    let pn = p(params.n_terms);
    if y <= pn || t <= pn || y >= 1.0 || t >= 1.0 {
        return 0.0;
    }
    let sy = segment_index(y);
    let st = segment_index(t);
    if sy != st {
        return 0.0;
    }
    ((2.0f64 / 3.0).powi(sy as i32) * phi(sy, y) * phi(sy, t)).abs()
}

/// Index `n` of the segment `(p_{n-1}, p_n]` containing `x` in `(0, 1)`.
fn segment_index(x: f64) -> usize {
    debug_assert!(x > 0.0 && x < 1.0);
    let mut n = 1;
    // p(54) rounds to 1.0 in f64, so this terminates quickly.
    while p(n) < x && n < 60 {
        n += 1;
    }
    n
}

/// Build the example [`ModelSpec`]: `k0(x,y) = u(x) u(y)`, `k1 = 1`,
/// `k2` the truncated rank sum, with both axes aligned to the breakpoints
/// `{p_0, ..., p_K, q_1, ..., q_K, 1}`, `K = max(M, N)`.
pub fn model8(params: &Example5Params) -> Result<ModelSpec> {
    params.validate()?;
    let k_max = params.m.max(params.n_terms);
    let mut brk = Vec::with_capacity(2 * k_max + 2);
    for n in 0..=k_max {
        brk.push(p(n));
    }
    for n in 1..=k_max {
        brk.push(q(n));
    }
    brk.push(1.0);

    let pu = params.clone();
    let k0 = KernelSpec::potential(move |x, y| potential_u(x, &pu) * potential_u(y, &pu));

    let k1 = KernelSpec::constant(KernelKind::XKernel, 1.0).with_rank(RankStructure {
        terms: vec![RankTerm {
            coefficient: 1.0,
            factor: Arc::new(|_| 1.0),
        }],
        truncated_series: false,
    });

    let pk = params.clone();
    let mut terms = Vec::with_capacity(params.n_terms);
    for n in 1..=params.n_terms {
        terms.push(RankTerm {
            coefficient: (2.0f64 / 3.0).powi(n as i32),
            factor: Arc::new(move |y| phi(n, y)),
        });
    }
    let k2 = KernelSpec::y_kernel(move |y, t| kernel_k2(y, t, &pk)).with_rank(RankStructure {
        terms,
        truncated_series: !params.exact_rank,
    });

    Ok(ModelSpec {
        k0,
        k1,
        k2,
        gamma: params.gamma,
        x_axis: AxisSpec::unit_interval(brk.clone(), params.g),
        y_axis: AxisSpec::unit_interval(brk, params.g),
    })
}

/// Closed-form eigenvalue `omega_n = gamma + (2/3)^n` of
/// `T = gamma*T1 + T2` on the separable eigenfunction `1 (x) phi_n`.
pub fn analytic_t_eigenvalue(n: usize, gamma: f64) -> f64 {
    assert!(n >= 1);
    gamma + (2.0f64 / 3.0).powi(n as i32)
}

/// The orthonormal family `{phi_kappa}` for the given index range, in the
/// form the sufficiency checks consume.
pub fn phi_family(kappas: impl IntoIterator<Item = usize>) -> Vec<BasisFn> {
    kappas
        .into_iter()
        .map(|kappa| BasisFn {
            index: kappa,
            f: Arc::new(move |y| phi(kappa, y)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_grid, integrate};
    use approx::assert_abs_diff_eq;

    fn aligned_grid(k_max: usize, g: usize) -> crate::quadrature::Grid1D {
        let mut brk: Vec<f64> = (0..=k_max).map(p).collect();
        brk.extend((1..=k_max).map(q));
        brk.push(1.0);
        build_grid(0.0, 1.0, &brk, g).unwrap()
    }

    #[test]
    fn breakpoint_values() {
        assert_eq!(p(0), 0.0);
        assert_eq!(p(1), 0.5);
        assert_eq!(p(2), 0.75);
        assert_eq!(q(2), 0.625);
        assert_eq!(breakpoints(2), (0.75, 0.625));
    }

    #[test]
    fn tent_peak_and_endpoints() {
        assert_eq!(tent_r(2, q(2)), 1.0);
        assert_eq!(tent_r(2, 0.75), 0.0);
        assert_eq!(tent_r(3, 0.2), 0.0);
        // Continuity across the peak.
        let eps = 1e-9;
        assert_abs_diff_eq!(tent_r(2, q(2) - eps), tent_r(2, q(2) + eps), epsilon = 1e-7);
    }

    #[test]
    fn potential_values() {
        let params = Example5Params::default();
        assert_eq!(potential_u(0.3, &params), 0.0);
        assert_abs_diff_eq!(potential_u(q(2), &params), 2.0 / 9.0, epsilon = 1e-15);
        assert_eq!(potential_u(1.0, &params), 0.0);
    }

    #[test]
    #[should_panic(expected = "defined on [0, 1]")]
    fn potential_rejects_outside_domain() {
        potential_u(1.5, &Example5Params::default());
    }

    #[test]
    fn potential_bounded_by_delta2() {
        let params = Example5Params::default();
        let d2 = params.delta(2);
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let v = potential_u(x, &params);
            assert!((0.0..=d2 + 1e-15).contains(&v), "u({x}) = {v}");
        }
    }

    #[test]
    fn phi_point_value() {
        assert_abs_diff_eq!(phi(1, 0.25), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn phi_normalized_on_aligned_grid() {
        let grid = aligned_grid(7, 8);
        for n in 1..=6 {
            let v = integrate(|y| phi(n, y) * phi(n, y), &grid).unwrap();
            assert!((v - 1.0).abs() <= 1e-10, "phi_{n}: {v}");
        }
    }

    #[test]
    fn phi1_normalized_on_minimal_grid() {
        // 2^2 sin^2(2 pi y) over [0, 1/2] integrates to 1; the half-wave
        // split at q_1 suffices at moderate order.
        let grid = build_grid(0.0, 1.0, &[q(1), 0.5], 6).unwrap();
        let v = integrate(|y| phi(1, y) * phi(1, y), &grid).unwrap();
        assert!((v - 1.0).abs() <= 1e-10, "{v}");
    }

    #[test]
    fn phi_disjoint_supports() {
        let grid = aligned_grid(4, 6);
        let v = integrate(|y| phi(2, y) * phi(3, y), &grid).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn kernel_vanishes_across_supports() {
        let params = Example5Params::default();
        // y in supp phi_1, t in supp phi_2.
        assert_eq!(kernel_k2(0.25, 0.6, &params), 0.0);
    }

    #[test]
    fn kernel_matches_rank_structure() {
        let params = Example5Params::default();
        let spec = model8(&params).unwrap();
        let rank = spec.k2.rank.as_ref().unwrap();
        for (y, t) in [(0.3, 0.4), (0.6, 0.55), (0.8, 0.77), (0.9, 0.2)] {
            assert_abs_diff_eq!(spec.k2.eval(y, t), rank.eval(y, t, None), epsilon = 1e-14);
        }
    }

    #[test]
    fn tail_bound_zero_inside_truncated_region() {
        let params = Example5Params {
            n_terms: 2,
            ..Default::default()
        };
        assert_eq!(k2_tail_bound(0.3, 0.3, &params), 0.0);
        assert_eq!(k2_tail_bound(0.6, 0.9, &params), 0.0);
        // Both beyond p_2 = 0.75 but in different segments.
        assert_eq!(k2_tail_bound(0.8, 0.9, &params), 0.0);
        // Same far segment (p_2, p_3] = (0.75, 0.875]: one surviving term.
        let tail = k2_tail_bound(0.8, 0.81, &params);
        let expect = ((2.0f64 / 3.0).powi(3) * phi(3, 0.8) * phi(3, 0.81)).abs();
        assert_abs_diff_eq!(tail, expect, epsilon = 1e-12);
        assert!(tail > 0.0);
    }

    #[test]
    fn analytic_eigenvalues() {
        assert_abs_diff_eq!(
            analytic_t_eigenvalue(1, GAMMA_MIN),
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            analytic_t_eigenvalue(2, GAMMA_MIN),
            10.0 / 9.0,
            epsilon = 1e-15
        );
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let v = analytic_t_eigenvalue(n, GAMMA_MIN);
            assert!(v < prev && v > GAMMA_MIN);
            prev = v;
        }
    }

    #[test]
    fn params_validation() {
        let bad = Example5Params {
            gamma: 0.5,
            ..Default::default()
        };
        let err = model8(&bad).map(|_| ()).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");

        let bad = Example5Params {
            m: 1,
            ..Default::default()
        };
        assert!(model8(&bad).is_err());

        let bad = Example5Params {
            delta_scale: 1.5,
            ..Default::default()
        };
        assert!(model8(&bad).is_err());
    }

    #[test]
    fn discretized_kernel_has_series_eigenvalues() {
        let params = Example5Params {
            n_terms: 3,
            ..Default::default()
        };
        let spec = model8(&params).unwrap();
        let grid = spec.y_axis.build().unwrap();
        let op = crate::operators::discretize_kernel(&spec.k2, &grid).unwrap();
        let vals = crate::spectra::eigvals_symmetric(&op).unwrap();
        let top: Vec<f64> = vals.iter().rev().take(3).copied().collect();
        assert_abs_diff_eq!(top[0], 2.0 / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(top[1], 4.0 / 9.0, epsilon = 1e-8);
        assert_abs_diff_eq!(top[2], 8.0 / 27.0, epsilon = 1e-8);
        // Everything else is numerically zero.
        for &v in &vals[..vals.len() - 3] {
            assert!(v.abs() <= 1e-10);
        }
    }

    #[test]
    fn discretized_kernel_eigenfunctions() {
        // K2 phi_n = (2/3)^n phi_n on an aligned grid.
        let params = Example5Params::default();
        let spec = model8(&params).unwrap();
        let grid = spec.y_axis.build().unwrap();
        let op = crate::operators::discretize_kernel(&spec.k2, &grid).unwrap();
        for n in 1..=params.n_terms {
            let v: Vec<f64> = grid
                .nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&y, &w)| w.sqrt() * phi(n, y))
                .collect();
            let kv = op.apply_vec(&v);
            let lam = (2.0f64 / 3.0).powi(n as i32);
            let res: f64 = kv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-8, "n={n}: residual {res}");
        }
    }
}
