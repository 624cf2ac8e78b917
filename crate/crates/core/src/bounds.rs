//! Closed-form lower bounds on energy and sparseness, ensemble upper bounds
//! on the block error probability, and the per-position probabilities they
//! are built from.
//!
//! Every logarithm is natural. Bound values are reported as computed: a
//! probability bound above 1 is flagged vacuous rather than clamped.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{compute_t, naive_rounds, ProtocolError};

/// `L = 2 / (1 - 1/e) + 1`, the slack factor on `p_ch` in `epsilon_0`.
pub fn parity_slack_constant() -> f64 {
    2.0 / (1.0 - (-1.0f64).exp()) + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    EnergyLower,
    SparsenessLower,
    EnsembleClosed,
    EnsembleSum,
    NaiveUnion,
}

impl Formula {
    pub fn is_probability(self) -> bool {
        matches!(self, Formula::EnsembleClosed | Formula::EnsembleSum | Formula::NaiveUnion)
    }

    pub fn name(self) -> &'static str {
        match self {
            Formula::EnergyLower => "energy_lower",
            Formula::SparsenessLower => "sparseness_lower",
            Formula::EnsembleClosed => "ensemble_closed",
            Formula::EnsembleSum => "ensemble_sum",
            Formula::NaiveUnion => "naive_union",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Precondition {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula: Formula,
    pub preconditions: Vec<Precondition>,
    /// Present iff every precondition holds.
    pub value: Option<f64>,
}

impl BoundReport {
    fn evaluate(formula: Formula, preconditions: Vec<Precondition>, value: impl FnOnce() -> f64) -> Self {
        let ok = preconditions.iter().all(|p| p.holds);
        Self {
            formula,
            preconditions,
            value: ok.then(value),
        }
    }

    pub fn preconditions_met(&self) -> bool {
        self.value.is_some()
    }

    pub fn failed(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.preconditions.iter().filter(|p| !p.holds).map(|p| p.name)
    }

    /// A probability bound that exceeds 1 and therefore says nothing.
    pub fn is_vacuous(&self) -> bool {
        self.formula.is_probability() && self.value.is_some_and(|v| v > 1.0)
    }
}

fn pre(name: &'static str, holds: bool) -> Precondition {
    Precondition { name, holds }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{formula} preconditions failed at N = {n}: {}", failed.join(", "))]
pub struct PreconditionFailure {
    pub n: usize,
    pub formula: &'static str,
    pub failed: Vec<&'static str>,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs to the energy (Problem 1) and sparseness (Problem 2) lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundInputs {
    pub n: usize,
    pub e1: f64,
    pub e2: f64,
    /// Cap `D` on the number of edges.
    pub d_cap: f64,
    /// Cap `E_M` on total energy.
    pub e_cap: f64,
    pub epsilon: f64,
    pub p_tar: f64,
}

impl LowerBoundInputs {
    /// `delta = ln(1 / (1 - p_tar))`, used exactly (no small-target shortcut).
    pub fn delta(&self) -> f64 {
        -(-self.p_tar).ln_1p()
    }

    fn common_preconditions(&self) -> [Precondition; 2] {
        [
            pre("p_tar_in_open_unit", self.p_tar > 0.0 && self.p_tar < 1.0),
            pre("epsilon_in_open_unit", self.epsilon > 0.0 && self.epsilon < 1.0),
        ]
    }

    /// `ln(N / (2 delta))`.
    fn log_term(&self) -> f64 {
        (self.n as f64 / (2.0 * self.delta())).ln()
    }
}

/// Lower bound on the minimum energy subject to `P_e <= p_tar` and fewer than
/// `D` edges.
pub fn energy_lower_bound(inp: &LowerBoundInputs) -> BoundReport {
    let n = inp.n as f64;
    let mut conds = inp.common_preconditions().to_vec();
    let sparse_enough = conds.iter().all(|c| c.holds) && n * n / (4.0 * inp.delta() * inp.d_cap) > 1.5f64.exp();
    conds.push(pre("n2_over_4_delta_d_exceeds_e_1_5", sparse_enough));
    BoundReport::evaluate(Formula::EnergyLower, conds, || {
        let log_term = inp.log_term();
        let sink_branch = n * inp.e1 / 2.0 * log_term;
        let broadcast_branch = n * n * inp.e2 / (4.0 * inp.d_cap) * log_term;
        let inv_log_eps = 1.0 / (1.0 / inp.epsilon).ln();
        (n * inp.e1).max(inv_log_eps * sink_branch.min(broadcast_branch))
    })
}

/// Lower bound on the minimum number of edges subject to `P_e <= p_tar` and
/// energy below `E_M`.
pub fn sparseness_lower_bound(inp: &LowerBoundInputs) -> BoundReport {
    let n = inp.n as f64;
    let mut conds = inp.common_preconditions().to_vec();
    let base = conds.iter().all(|c| c.holds);
    let log_inv_eps = (1.0 / inp.epsilon).ln();
    conds.push(pre(
        "e2_n2_over_4_delta_em_exceeds_e_1_5",
        base && inp.e2 * n * n / (4.0 * inp.delta() * inp.e_cap) > 1.5f64.exp(),
    ));
    conds.push(pre(
        "em_below_sink_only_energy",
        base && inp.e_cap < n * inp.e1 / (2.0 * log_inv_eps) * inp.log_term(),
    ));
    BoundReport::evaluate(Formula::SparsenessLower, conds, || {
        n * n * inp.e2 * inp.log_term() / (4.0 * log_inv_eps * inp.e_cap)
    })
}

/// Inputs to the ensemble error upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundInputs {
    pub n: usize,
    pub c: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub p_ch: f64,
}

impl UpperBoundInputs {
    /// `epsilon_0 = L p_ch + epsilon`.
    pub fn epsilon0(&self) -> f64 {
        parity_slack_constant() * self.p_ch + self.epsilon
    }

    /// `b_eta = (1 - epsilon_0)(1 - (1 - e^{-2 c eta}) / 2) / 2`.
    pub fn b_eta(&self) -> f64 {
        0.5 * (1.0 - self.epsilon0()) * (1.0 - (-(-2.0 * self.c * self.eta).exp_m1()) / 2.0)
    }

    /// Connection probability `c ln N / N`.
    pub fn p(&self) -> f64 {
        crate::topology::connection_probability(self.n, self.c)
    }

    /// `c (1 - epsilon_0)(1 - c eta)`; the bound decays polynomially when this
    /// exceeds 2.
    pub fn decay_exponent(&self) -> f64 {
        self.c * (1.0 - self.epsilon0()) * (1.0 - self.c * self.eta)
    }

    fn c_log_n(&self) -> f64 {
        self.c * (self.n as f64).ln()
    }

    fn base_preconditions(&self) -> Vec<Precondition> {
        vec![
            pre("epsilon_in_unit", (0.0..1.0).contains(&self.epsilon)),
            pre("p_ch_in_open_half", self.p_ch > 0.0 && self.p_ch < 0.5),
            pre("c_ln_n_exceeds_1", self.c_log_n() > 1.0),
        ]
    }
}

/// `(1 - b_eta)^N + eta e epsilon N^{2 - c(1-eps0)(1-c eta)} / ln N`.
pub fn ensemble_error_upper_closed(inp: &UpperBoundInputs) -> BoundReport {
    let mut conds = inp.base_preconditions();
    conds.push(pre("eta_positive", inp.eta > 0.0));
    conds.push(pre("epsilon_below_b_eta", inp.epsilon < inp.b_eta()));
    BoundReport::evaluate(Formula::EnsembleClosed, conds, || {
        let n = inp.n as f64;
        let geometric = (n * (-inp.b_eta()).ln_1p()).exp();
        let polynomial = if inp.epsilon == 0.0 {
            0.0
        } else {
            (inp.eta.ln() + 1.0 + inp.epsilon.ln() + (2.0 - inp.decay_exponent()) * n.ln() - n.ln().ln()).exp()
        };
        geometric + polynomial
    })
}

/// `ln` of `eps0 + (1 - eps0)(1 + (1 - 2p)^k) / 2`.
fn ln_confusion_base(eps0: f64, p: f64, k: usize) -> f64 {
    let odd = parity_odd_prob(k, p);
    (-(1.0 - eps0) * odd).ln_1p()
}

/// `sum_{k=1}^{N} C(N,k) eps^k [eps0 + (1-eps0)(1+(1-2p)^k)/2]^N`, summed in
/// the log domain.
pub fn ensemble_error_upper_sum(inp: &UpperBoundInputs) -> BoundReport {
    let mut conds = inp.base_preconditions();
    conds.push(pre("p_at_most_1", inp.p() <= 1.0));
    BoundReport::evaluate(Formula::EnsembleSum, conds, || {
        if inp.epsilon == 0.0 {
            return 0.0;
        }
        let n = inp.n;
        let nf = n as f64;
        let (eps0, p, ln_eps) = (inp.epsilon0(), inp.p(), inp.epsilon.ln());
        let mut ln_binom = 0.0;
        let mut terms = Vec::with_capacity(n);
        for k in 1..=n {
            ln_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
            terms.push(ln_binom + k as f64 * ln_eps + nf * ln_confusion_base(eps0, p, k));
        }
        log_sum_exp(&terms).exp()
    })
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Probability that `k` independent Bernoulli(`p`) entries contain an even
/// number of ones: `(1 + (1-2p)^k) / 2`.
pub fn parity_zero_prob(k: usize, p: f64) -> f64 {
    if p < 0.5 {
        (1.0 + ((k as f64) * (-2.0 * p).ln_1p()).exp()) / 2.0
    } else {
        (1.0 + (1.0 - 2.0 * p).powi(k as i32)) / 2.0
    }
}

/// Odd-count counterpart `(1 - (1-2p)^k) / 2`, accurate for small `p`.
pub fn parity_odd_prob(k: usize, p: f64) -> f64 {
    if p < 0.5 {
        -((k as f64) * (-2.0 * p).ln_1p()).exp_m1() / 2.0
    } else {
        (1.0 - (1.0 - 2.0 * p).powi(k as i32)) / 2.0
    }
}

/// Probability that all `k` nonzero systematic positions are erased: `eps^k`.
pub fn systematic_confusion_prob(k: usize, epsilon: f64) -> f64 {
    epsilon.powi(k as i32)
}

/// Union bound `N eps^{t'}` on the baseline's block error, with the realised
/// repetition count `t'`.
pub fn naive_error_upper(n: usize, c_prime: f64, epsilon: f64) -> BoundReport {
    let rounds = naive_rounds(n, c_prime, epsilon);
    let conds = vec![
        pre("c_prime_exceeds_1", c_prime > 1.0),
        pre("epsilon_in_unit", (0.0..1.0).contains(&epsilon)),
        pre("c_prime_ln_n_at_least_1", !matches!(rounds, Err(ProtocolError::NaiveRepetition(_)))),
    ];
    BoundReport::evaluate(Formula::NaiveUnion, conds, || {
        let t = rounds.expect("preconditions checked");
        n as f64 * epsilon.powi(t as i32)
    })
}

/// Parameters of the upper/lower energy comparison sweep. The target error is
/// `N^{-gamma}` and the edge cap is `d_scale * c * N ln N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub e1: f64,
    pub e2: f64,
    pub epsilon: f64,
    pub c: f64,
    pub p_ch: f64,
    pub gamma: f64,
    pub d_scale: f64,
}

impl GapParams {
    pub fn lower_inputs(&self, n: usize) -> LowerBoundInputs {
        let nf = n as f64;
        LowerBoundInputs {
            n,
            e1: self.e1,
            e2: self.e2,
            d_cap: self.d_scale * self.c * nf * nf.ln(),
            e_cap: f64::NAN,
            epsilon: self.epsilon,
            p_tar: nf.powf(-self.gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub t: u32,
    pub upper: f64,
    pub lower: f64,
    pub ratio: f64,
    pub ratio_over_lnln: f64,
}

/// Realised scheme energy `2N e1 + N t e2` against the energy lower bound.
pub fn gap_ratio_trend(ns: &[usize], params: &GapParams) -> Vec<Result<GapRow, PreconditionFailure>> {
    ns.iter()
        .map(|&n| {
            let lower = energy_lower_bound(&params.lower_inputs(n));
            let t = compute_t(n, params.epsilon, params.c, params.p_ch);
            let (Some(lower_value), Some(t)) = (lower.value, t.as_ref().ok().copied()) else {
                let mut failed: Vec<&'static str> = lower.failed().collect();
                if t.is_err() {
                    failed.push("broadcast_rounds_defined");
                }
                return Err(PreconditionFailure {
                    n,
                    formula: "gap_ratio",
                    failed,
                });
            };
            let nf = n as f64;
            let upper = crate::protocol::energy(2 * n as u64, n as u64 * u64::from(t), params.e1, params.e2);
            let ratio = upper / lower_value;
            Ok(GapRow {
                n,
                t,
                upper,
                lower: lower_value,
                ratio,
                ratio_over_lnln: ratio / nf.ln().ln(),
            })
        })
        .collect()
}
