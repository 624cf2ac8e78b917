use serde::{Deserialize, Deserializer, Serialize};

use super::ExperimentError;
use crate::protocol::{compute_t, Scheme, SchemeParams};

/// Every free constant of a campaign. Field names double as JSON keys and
/// CLI flag names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "one_or_many")]
    pub scheme: Vec<Scheme>,
    pub n_list: Vec<usize>,
    pub epsilon: f64,
    pub c: f64,
    pub c_prime: f64,
    pub p_ch: f64,
    pub eta: f64,
    pub e1: f64,
    pub e2: f64,
    pub trials: u64,
    pub seed: u64,
    pub fixed_graph: bool,
    /// Target error for the energy lower bound; `N^{-1/2}` when unset.
    pub p_tar: Option<f64>,
    /// Edge cap for the energy lower bound; `2 c N ln N` when unset.
    pub d_cap: Option<f64>,
    /// Energy cap for the sparseness lower bound; skipped when unset.
    pub e_cap: Option<f64>,
    /// Overrides the derived broadcast round count. Required in spirit when
    /// `epsilon = 0`, where it defaults to 1.
    pub rounds: Option<u32>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: vec![Scheme::Gc3],
            n_list: vec![64, 128, 256, 512],
            epsilon: 0.1,
            c: 4.0,
            c_prime: 4.0,
            p_ch: 0.05,
            eta: 0.01,
            e1: 1.0,
            e2: 1.0,
            trials: 1000,
            seed: 0,
            fixed_graph: false,
            p_tar: None,
            d_cap: None,
            e_cap: None,
            rounds: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Scheme),
    Many(Vec<Scheme>),
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scheme>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config {
        field,
        msg: msg.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| invalid("config", e.to_string()))
    }

    /// Checks ranges; does not check per-N derived quantities.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.scheme.is_empty() {
            return Err(invalid("scheme", "at least one scheme is required"));
        }
        if self.n_list.is_empty() {
            return Err(invalid("n_list", "must not be empty"));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(invalid("n_list", format!("N = {n} is below 2")));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(invalid("epsilon", format!("{} is outside [0, 1)", self.epsilon)));
        }
        if !(self.p_ch > 0.0 && self.p_ch < 0.5) {
            return Err(invalid("p_ch", format!("{} is outside (0, 1/2)", self.p_ch)));
        }
        for (field, v) in [("c", self.c), ("c_prime", self.c_prime)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(field, format!("{v} must be positive")));
            }
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta", format!("{} must be non-negative", self.eta)));
        }
        for (field, v) in [("e1", self.e1), ("e2", self.e2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(field, format!("{v} must be non-negative")));
            }
        }
        if let Some(p) = self.p_tar.filter(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(invalid("p_tar", format!("{p} is outside (0, 1)")));
        }
        for (field, v) in [("d_cap", self.d_cap), ("e_cap", self.e_cap)] {
            if let Some(v) = v.filter(|v| !(*v > 0.0)) {
                return Err(invalid(field, format!("{v} must be positive")));
            }
        }
        if self.rounds == Some(0) {
            return Err(invalid("rounds", "must be at least 1"));
        }
        Ok(())
    }

    /// Scheme parameters for one `N`.
    pub fn scheme_params(&self, n: usize) -> Result<SchemeParams, ExperimentError> {
        let t = match self.rounds {
            Some(t) => t,
            None if self.epsilon == 0.0 => 1,
            None => compute_t(n, self.epsilon, self.c, self.p_ch)
                .map_err(|e| invalid("n_list", format!("N = {n}: {e}")))?,
        };
        SchemeParams::with_rounds(n, self.epsilon, self.c, self.p_ch, self.e1, self.e2, t)
            .map_err(|e| invalid("n_list", format!("N = {n}: {e}")))
    }

    pub fn p_tar_at(&self, n: usize) -> f64 {
        self.p_tar.unwrap_or_else(|| (n as f64).powf(-0.5))
    }

    pub fn d_cap_at(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.d_cap.unwrap_or_else(|| 2.0 * self.c * nf * nf.ln())
    }
}
