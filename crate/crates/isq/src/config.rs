//! Run configuration: JSON schema, validation, and resolution into the
//! physical/boundary objects the tasks consume. Unknown keys are rejected
//! so regressions in configs surface as errors, not silent defaults.

use serde::{Deserialize, Serialize};

use crate::error::{IsqError, Result};
use crate::model::{
    decompose_unitary, exponents_from_coupling, unitary_from_keyword, BoundaryData, Exponents,
    Mat2, PhysicalParams,
};
use num_complex::Complex64;

/// Characteristic matrix: either a keyword (`minus_identity`, `sigma1`,
/// `identity`, `diag:θ+,θ−`) or four row-major [re, im] entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Keyword(String),
    Entries([[f64; 2]; 4]),
}

impl UnitarySpec {
    pub fn resolve(&self) -> Result<Mat2> {
        match self {
            UnitarySpec::Keyword(kw) => unitary_from_keyword(kw),
            UnitarySpec::Entries(rows) => {
                let c = |e: [f64; 2]| Complex64::new(e[0], e[1]);
                Ok(Mat2([[c(rows[0]), c(rows[1])], [c(rows[2]), c(rows[3])]]))
            }
        }
    }
}

fn default_one() -> f64 {
    1.0
}

fn default_unitary() -> UnitarySpec {
    UnitarySpec::Keyword("sigma1".to_string())
}

fn default_n_max() -> usize {
    20
}

fn default_epsilons() -> Vec<f64> {
    vec![0.02, 0.01, 0.005]
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 1.5, 2.0]
}

fn default_center() -> f64 {
    2.0
}

fn default_width() -> f64 {
    0.5
}

fn default_k() -> usize {
    1
}

fn default_energy() -> f64 {
    2.0
}

fn default_samples() -> usize {
    400
}

fn default_kernel_time() -> f64 {
    1.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_one")]
    pub m: f64,
    #[serde(default = "default_one")]
    pub omega: f64,
    #[serde(default = "default_one")]
    pub hbar: f64,
    pub g: f64,
    #[serde(rename = "U", default = "default_unitary")]
    pub u: UnitarySpec,
    #[serde(rename = "L0", default = "default_one")]
    pub l0: f64,
    /// One of classical, spectrum, eigenstates, kernel, evolve, copy-demo,
    /// selftest; the --task flag overrides it.
    #[serde(default)]
    pub task: Option<String>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Spectral-kernel regularizer ladder.
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    /// Sample times for `evolve` (units of 1/ω).
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Gaussian packet center and width for `evolve` / `copy-demo`.
    #[serde(default = "default_center")]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    /// Caustic index for `copy-demo`.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Classical energy in units of ħω and sample count per period.
    #[serde(default = "default_energy")]
    pub energy: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Propagation time for `kernel` (units of 1/ω).
    #[serde(default = "default_kernel_time")]
    pub kernel_time: f64,
    #[serde(default)]
    pub seed: u64,
}

pub const TASKS: [&str; 7] = [
    "classical",
    "spectrum",
    "eigenstates",
    "kernel",
    "evolve",
    "copy-demo",
    "selftest",
];

#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub params: PhysicalParams,
    pub exps: Exponents,
    pub boundary: BoundaryData,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| IsqError::Config(format!("bad config: {e}")))
    }

    pub fn validate(&self) -> Result<Resolved> {
        let params = PhysicalParams::new_limit(self.m, self.omega, self.hbar, self.g)?;
        let exps = exponents_from_coupling(&params);
        let u = self.u.resolve()?;
        let boundary = decompose_unitary(u, self.l0)?;
        if let Some(task) = &self.task {
            if !TASKS.contains(&task.as_str()) {
                return Err(IsqError::Config(format!(
                    "unknown task {task:?}; expected one of {TASKS:?}"
                )));
            }
        }
        if self.epsilons.len() < 2 || self.epsilons.iter().any(|&e| e <= 0.0) {
            return Err(IsqError::Config(
                "epsilons must be at least two positive values".to_string(),
            ));
        }
        if !(self.width > 0.0 && self.center > 0.0) {
            return Err(IsqError::Config(
                "packet center and width must be positive".to_string(),
            ));
        }
        if self.k == 0 {
            return Err(IsqError::Config("k must be at least 1".to_string()));
        }
        Ok(Resolved {
            config: self.clone(),
            params,
            exps,
            boundary,
        })
    }

    /// Canonical single-line JSON of the resolved configuration, embedded
    /// in every output artifact.
    pub fn header_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults() {
        let cfg = RunConfig::from_json(r#"{ "g": 0.15625 }"#).unwrap();
        let r = cfg.validate().unwrap();
        assert!((r.exps.a - 0.75).abs() < 1e-15);
        assert!((r.params.m - 1.0).abs() < 1e-15);
        // default boundary is σ₁
        assert!(r.boundary.u.max_norm_diff(Mat2::sigma1()) < 1e-15);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_json(r#"{ "g": 0.1, "bogus": 3 }"#).unwrap_err();
        assert!(matches!(err, IsqError::Config(_)));
    }

    #[test]
    fn unitary_matrix_entries() {
        let cfg = RunConfig::from_json(
            r#"{ "g": 0.1, "U": [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]] }"#,
        )
        .unwrap();
        let r = cfg.validate().unwrap();
        assert!(r.boundary.u.max_norm_diff(Mat2::sigma1()) < 1e-15);
    }

    #[test]
    fn keyword_diag() {
        let cfg =
            RunConfig::from_json(r#"{ "g": 0.1, "U": "diag:1.0471975511965976,-0.7853981633974483" }"#)
                .unwrap();
        cfg.validate().unwrap();
    }

    #[test]
    fn non_unitary_rejected() {
        let cfg = RunConfig::from_json(
            r#"{ "g": 0.1, "U": [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]] }"#,
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, IsqError::NotUnitary { .. }));
    }

    #[test]
    fn bad_task_rejected() {
        let cfg = RunConfig::from_json(r#"{ "g": 0.1, "task": "frobnicate" }"#).unwrap();
        assert!(matches!(cfg.validate(), Err(IsqError::Config(_))));
    }

    #[test]
    fn header_round_trips() {
        let cfg = RunConfig::from_json(r#"{ "g": 0.15625, "n_max": 7 }"#).unwrap();
        let text = cfg.header_json();
        let back = RunConfig::from_json(&text).unwrap();
        assert_eq!(back.n_max, 7);
        assert_eq!(back.g, cfg.g);
    }
}
