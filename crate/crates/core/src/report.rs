//! Experiment reports: JSON for the full record (config echo included),
//! CSV for plot-ready curve data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Echo of everything needed to reproduce a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub methods: Vec<String>,
    pub sigma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub eps: f64,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    pub src_weight: f64,
    /// Pseudo-random generator identity used for any seeded step.
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_views: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub view_counts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_points: Option<usize>,
}

/// One grid point: independent variable plus one value per method
/// (for the prior curve, the single rho value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub x: f64,
    pub values: Vec<f64>,
    /// Wall-clock seconds spent producing this record.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub config: ReportConfig,
    pub records: Vec<Record>,
    pub summary: Vec<MethodSummary>,
    pub total_seconds: f64,
}

#[derive(Serialize)]
struct Digest<'a> {
    experiment_id: &'a str,
    config: &'a ReportConfig,
    records: Vec<(f64, &'a Vec<f64>)>,
    summary: &'a [MethodSummary],
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Canonical serialization of everything except wall-clock timing;
    /// two runs with identical config and seeds produce identical digests.
    pub fn results_digest(&self) -> String {
        let digest = Digest {
            experiment_id: &self.experiment_id,
            config: &self.config,
            records: self.records.iter().map(|r| (r.x, &r.values)).collect(),
            summary: &self.summary,
        };
        serde_json::to_string(&digest).expect("digest serialization")
    }

    /// Curve data with the documented per-experiment header.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        match self.experiment_id.as_str() {
            "rho-kappa" => {
                out.push_str("kappa,rho\n");
                for r in &self.records {
                    out.push_str(&format!("{},{}\n", r.x, r.values[0]));
                }
            }
            "views" | "train-size" => {
                out.push_str(&format!("x,{}\n", self.config.methods.join(",")));
                for r in &self.records {
                    let row: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                    out.push_str(&format!("{},{}\n", r.x, row.join(",")));
                }
            }
            "selection-bias" => {
                out.push_str(&format!("repeat,{}\n", self.config.methods.join(",")));
                for r in &self.records {
                    let row: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                    out.push_str(&format!("{},{}\n", r.x, row.join(",")));
                }
                out.push('\n');
                out.push_str("method,mean,std\n");
                for s in &self.summary {
                    out.push_str(&format!("{},{},{}\n", s.method, s.mean, s.std));
                }
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "no CSV layout for experiment '{other}'"
                )))
            }
        }
        Ok(out)
    }
}
