//! Run configuration: a single JSON document plus command-line overrides.
//!
//! Kernels are declarative: named built-ins plus rank-sum literals
//! `sum_n c_n e_n (x) e_n` drawing factors from a small basis registry.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use efimov_core::efimov::ScheduleRow;
use efimov_core::hubbard5::{self, Example5Params};
use efimov_core::operators::{
    AxisSpec, KernelKind, KernelSpec, ModelSpec, RankStructure, RankTerm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Full spectrum of the dense `H` plus the essential edge.
    Spectrum,
    /// Essential-spectrum edge report (fiber sweeps).
    Essential,
    Condition5,
    Condition6,
    Thm41,
    Accumulate,
    /// Composite run of the example model: edge, eigen-residuals of `T`,
    /// the sufficiency condition, and the bound-state count.
    Example5,
}

impl Experiment {
    pub fn parse(name: &str) -> anyhow::Result<Self> {
        match name {
            "spectrum" => Ok(Self::Spectrum),
            "essential" => Ok(Self::Essential),
            "condition5" => Ok(Self::Condition5),
            "condition6" => Ok(Self::Condition6),
            "thm41" => Ok(Self::Thm41),
            "accumulate" => Ok(Self::Accumulate),
            "example5" => Ok(Self::Example5),
            other => bail!(
                "unknown experiment `{other}` (expected one of: spectrum, essential, \
                 condition5, condition6, thm41, accumulate, example5)"
            ),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Essential => "essential",
            Self::Condition5 => "condition5",
            Self::Condition6 => "condition6",
            Self::Thm41 => "thm41",
            Self::Accumulate => "accumulate",
            Self::Example5 => "example5",
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_seed() -> u64 {
    42
}

fn default_dense_cap() -> usize {
    efimov_core::operators::DEFAULT_DENSE_CAP
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    /// Rows of the accumulation schedule; defaults to the example ladder
    /// N = 2..5 with M = N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduleEntry>>,
    /// Family indices for the condition checks; defaults to 2..=6.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<usize>>,
    /// Basis the condition-check family is drawn from ("bump", "sine",
    /// "constant"); defaults to the example model's bumps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_basis: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text).context("unparseable config")
    }

    pub fn family_indices(&self) -> Vec<usize> {
        self.family.clone().unwrap_or_else(|| (2..=6).collect())
    }

    pub fn schedule_rows(&self) -> Vec<ScheduleRow> {
        match &self.schedule {
            Some(rows) => rows
                .iter()
                .map(|e| ScheduleRow {
                    m: e.m,
                    n: e.n,
                    g: e.g,
                })
                .collect(),
            None => (2..=5).map(|n| ScheduleRow { m: n, n, g: 8 }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub m: usize,
    pub n: usize,
    pub g: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Example5(Example5Config),
    Inline(Box<InlineModel>),
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::Example5(Example5Config::default())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Example5Config {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_truncation")]
    pub m: usize,
    #[serde(default = "default_truncation")]
    pub n: usize,
    #[serde(default = "default_order")]
    pub g: usize,
    #[serde(default = "default_delta_scale")]
    pub delta_scale: f64,
    #[serde(default)]
    pub exact_rank: bool,
}

fn default_gamma() -> f64 {
    2.0 / 3.0
}
fn default_truncation() -> usize {
    4
}
fn default_order() -> usize {
    8
}
fn default_delta_scale() -> f64 {
    1.0
}

impl Default for Example5Config {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            m: default_truncation(),
            n: default_truncation(),
            g: default_order(),
            delta_scale: default_delta_scale(),
            exact_rank: false,
        }
    }
}

impl Example5Config {
    pub fn params(&self) -> Example5Params {
        Example5Params {
            m: self.m,
            n_terms: self.n,
            gamma: self.gamma,
            g: self.g,
            delta_scale: self.delta_scale,
            exact_rank: self.exact_rank,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InlineModel {
    pub gamma: f64,
    pub x_axis: AxisConfig,
    pub y_axis: AxisConfig,
    pub k0: PotentialDef,
    pub k1: KernelDef,
    pub k2: KernelDef,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub domain: [f64; 2],
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    #[serde(default = "default_order")]
    pub g: usize,
}

impl AxisConfig {
    fn axis_spec(&self) -> AxisSpec {
        AxisSpec {
            a: self.domain[0],
            b: self.domain[1],
            breakpoints: self.breakpoints.clone(),
            order: self.g,
        }
    }
}

/// Declarative one-axis kernel.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDef {
    Zero,
    Constant {
        value: f64,
    },
    /// `sum_n coefficient_n * e_{index_n}(s) e_{index_n}(t)` with factors
    /// from the named basis.
    RankSum {
        basis: String,
        terms: Vec<RankTermDef>,
        #[serde(default)]
        truncated_series: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RankTermDef {
    pub coefficient: f64,
    pub index: usize,
}

/// Declarative potential.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialDef {
    Zero,
    Constant {
        value: f64,
    },
    /// `k0(x, y) = fx(x) * fy(y)`.
    Separable {
        fx: Factor1D,
        fy: Factor1D,
    },
}

/// One-variable factors available to separable potentials.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Factor1D {
    One,
    Identity,
    /// The example tent potential `u` with the given truncation.
    ExampleU {
        m: usize,
        #[serde(default = "default_delta_scale")]
        delta_scale: f64,
    },
}

impl Factor1D {
    fn resolve(&self) -> anyhow::Result<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        Ok(match self {
            Factor1D::One => Arc::new(|_| 1.0),
            Factor1D::Identity => Arc::new(|x| x),
            Factor1D::ExampleU { m, delta_scale } => {
                let params = Example5Params {
                    m: *m,
                    delta_scale: *delta_scale,
                    ..Default::default()
                };
                params
                    .validate()
                    .map_err(|e| anyhow::anyhow!("model.k0: {e}"))?;
                Arc::new(move |x| hubbard5::potential_u(x, &params))
            }
        })
    }
}

/// Basis factor `e_index` from the named registry.
pub(crate) fn basis_factor(
    basis: &str,
    index: usize,
) -> anyhow::Result<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
    match basis {
        // Orthonormal sines on [0, 1].
        "sine" => {
            if index == 0 {
                bail!("basis `sine` indexes from 1");
            }
            Ok(Arc::new(move |t| {
                std::f64::consts::SQRT_2 * (index as f64 * std::f64::consts::PI * t).sin()
            }))
        }
        // The example model's windowed sine bumps.
        "bump" => {
            if index == 0 {
                bail!("basis `bump` indexes from 1");
            }
            Ok(Arc::new(move |t| hubbard5::phi(index, t)))
        }
        // The normalized constant on [0, 1].
        "constant" => Ok(Arc::new(|_| 1.0)),
        other => bail!("unknown basis `{other}` (expected one of: sine, bump, constant)"),
    }
}

impl KernelDef {
    fn resolve(&self, kind: KernelKind, key: &str) -> anyhow::Result<KernelSpec> {
        Ok(match self {
            KernelDef::Zero => KernelSpec::zero(kind),
            KernelDef::Constant { value } => KernelSpec::constant(kind, *value),
            KernelDef::RankSum {
                basis,
                terms,
                truncated_series,
            } => {
                let mut rank_terms = Vec::with_capacity(terms.len());
                for t in terms {
                    let factor = basis_factor(basis, t.index)
                        .with_context(|| format!("{key}: bad rank-sum term"))?;
                    rank_terms.push(RankTerm {
                        coefficient: t.coefficient,
                        factor,
                    });
                }
                let rank = RankStructure {
                    terms: rank_terms,
                    truncated_series: *truncated_series,
                };
                let eval_rank = RankStructure {
                    terms: rank.terms.clone(),
                    truncated_series: rank.truncated_series,
                };
                KernelSpec::new(kind, Arc::new(move |s, t| eval_rank.eval(s, t, None)))
                    .with_rank(rank)
            }
        })
    }
}

impl PotentialDef {
    fn resolve(&self) -> anyhow::Result<KernelSpec> {
        Ok(match self {
            PotentialDef::Zero => KernelSpec::zero(KernelKind::Potential),
            PotentialDef::Constant { value } => KernelSpec::constant(KernelKind::Potential, *value),
            PotentialDef::Separable { fx, fy } => {
                let fx = fx.resolve()?;
                let fy = fy.resolve()?;
                KernelSpec::new(KernelKind::Potential, Arc::new(move |x, y| fx(x) * fy(y)))
            }
        })
    }
}

impl InlineModel {
    pub fn model_spec(&self) -> anyhow::Result<ModelSpec> {
        Ok(ModelSpec {
            k0: self.k0.resolve().context("model.k0")?,
            k1: self.k1.resolve(KernelKind::XKernel, "model.k1")?,
            k2: self.k2.resolve(KernelKind::YKernel, "model.k2")?,
            gamma: self.gamma,
            x_axis: self.x_axis.axis_spec(),
            y_axis: self.y_axis.axis_spec(),
        })
    }
}

impl ModelConfig {
    /// Materialize the configured model.
    pub fn model_spec(&self) -> anyhow::Result<ModelSpec> {
        match self {
            ModelConfig::Example5(cfg) => {
                hubbard5::model8(&cfg.params()).map_err(|e| anyhow::anyhow!("model.example5: {e}"))
            }
            ModelConfig::Inline(inline) => inline.model_spec(),
        }
    }

    pub fn example5(&self) -> Option<&Example5Config> {
        match self {
            ModelConfig::Example5(cfg) => Some(cfg),
            ModelConfig::Inline(_) => None,
        }
    }
}
