//! Typed JSON reports. Field order is fixed by the struct declarations so
//! identical runs serialize byte-identically, and every numeric field
//! round-trips exactly through serde_json.

use serde::{Deserialize, Serialize};

use efimov_core::efimov::{
    AccumulationTable, AccumulationVerdict, ConditionReport, EssentialEdgeReport, FinitenessReport,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub dense_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential: Option<EssentialEdge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Spectrum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finiteness: Option<Finiteness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accumulation: Option<Accumulation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example5: Option<Example5Summary>,
    /// Overall machine-readable verdict: "ok" or "failed-check".
    pub verdict: String,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, dense_cap: usize) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed,
            dense_cap,
            essential: None,
            spectrum: None,
            condition: None,
            finiteness: None,
            accumulation: None,
            example5: None,
            verdict: "ok".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EssentialEdge {
    pub lambda: f64,
    pub lambda_w1: f64,
    pub lambda_w2: f64,
    pub sigma_h0_min: f64,
    pub sigma_h0_max: f64,
    pub attained: String,
    pub k0_zero_detected: bool,
    pub w1_fiber_minima: Vec<f64>,
    pub w2_fiber_minima: Vec<f64>,
}

impl From<&EssentialEdgeReport> for EssentialEdge {
    fn from(e: &EssentialEdgeReport) -> Self {
        let attained = match e.attained {
            efimov_core::efimov::EdgeComponent::H0 => "H0".to_string(),
            efimov_core::efimov::EdgeComponent::W1 { y_index } => format!("W1[y={y_index}]"),
            efimov_core::efimov::EdgeComponent::W2 { x_index } => format!("W2[x={x_index}]"),
        };
        Self {
            lambda: e.lambda,
            lambda_w1: e.lambda_w1,
            lambda_w2: e.lambda_w2,
            sigma_h0_min: e.sigma_h0_range.0,
            sigma_h0_max: e.sigma_h0_range.1,
            attained,
            k0_zero_detected: e.k0_zero_detected,
            w1_fiber_minima: e.w1_fiber_minima.clone(),
            w2_fiber_minima: e.w2_fiber_minima.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Spectrum {
    pub dim: usize,
    pub lambda: f64,
    pub count_below: usize,
    pub below: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConditionRowOut {
    pub kappa: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Condition {
    pub kind: String,
    pub lambda: f64,
    pub rows: Vec<ConditionRowOut>,
    pub all_pass: bool,
}

impl From<&ConditionReport> for Condition {
    fn from(c: &ConditionReport) -> Self {
        Self {
            kind: match c.kind {
                efimov_core::efimov::ConditionKind::Condition5 => "condition5".into(),
                efimov_core::efimov::ConditionKind::Condition6 => "condition6".into(),
            },
            lambda: c.lambda,
            rows: c
                .rows
                .iter()
                .map(|r| ConditionRowOut {
                    kappa: r.index,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    margin: r.margin,
                    pass: r.pass,
                })
                .collect(),
            all_pass: c.all_pass,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Finiteness {
    pub verdict: String,
    pub lambda: f64,
    pub eta0: f64,
    pub premise_margin: f64,
    pub sigma_d_t_len: usize,
    pub truncated_series: bool,
}

impl From<&FinitenessReport> for Finiteness {
    fn from(f: &FinitenessReport) -> Self {
        Self {
            verdict: f.verdict.to_string(),
            lambda: f.lambda,
            eta0: f.eta0,
            premise_margin: f.premise_margin,
            sigma_d_t_len: f.sigma_d_t_len,
            truncated_series: f.truncated_series,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AccumulationRowOut {
    pub label: String,
    pub nx: usize,
    pub ny: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub lowest: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Accumulation {
    pub rows: Vec<AccumulationRowOut>,
    pub verdict: String,
    pub required_gap_factor: f64,
}

impl From<&AccumulationTable> for Accumulation {
    fn from(t: &AccumulationTable) -> Self {
        Self {
            rows: t
                .rows
                .iter()
                .map(|r| AccumulationRowOut {
                    label: r.label.clone(),
                    nx: r.nx,
                    ny: r.ny,
                    dim: r.dim,
                    lambda: if r.skipped.is_some() {
                        None
                    } else {
                        Some(r.lambda)
                    },
                    count: r.count,
                    gap: r.gap,
                    lowest: r.lowest.clone(),
                    skipped: r.skipped.clone(),
                })
                .collect(),
            verdict: t.verdict.to_string(),
            required_gap_factor: t.required_gap_factor,
        }
    }
}

pub fn accumulation_ok(v: &AccumulationVerdict) -> bool {
    matches!(v, AccumulationVerdict::AccumulationConsistent)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Example5Summary {
    pub gamma: f64,
    pub lambda: f64,
    /// `|lambda + gamma|`: how close the computed edge sits to the
    /// closed-form value.
    pub edge_defect: f64,
    /// Worst residual of `T f_n = (gamma + (2/3)^n) f_n` over `n <= N`.
    pub max_t_residual: f64,
    pub count_below: usize,
    pub below: Vec<f64>,
}
