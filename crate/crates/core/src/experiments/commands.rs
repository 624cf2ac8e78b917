use std::fmt;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::ResultRow;
use super::ExperimentError;
use crate::bounds::{
    energy_lower_bound, ensemble_error_upper_closed, ensemble_error_upper_sum, gap_ratio_trend, naive_error_upper,
    sparseness_lower_bound, BoundReport, GapParams, GapRow, LowerBoundInputs, UpperBoundInputs,
};
use crate::protocol::{estimate_error_probability, naive_rounds, EstimateRequest, Scheme};
use crate::stats::{linear_fit, Interval};

fn schemes(cfg: &ExperimentConfig) -> Vec<Scheme> {
    let mut s = cfg.scheme.clone();
    s.sort();
    s.dedup();
    s
}

fn take(report: &BoundReport, flags: &mut Vec<String>) -> Option<f64> {
    let name = report.formula.name();
    flags.extend(report.failed().map(|f| format!("{name}:{f}")));
    if report.is_vacuous() {
        flags.push(format!("{name}:vacuous"));
    }
    report.value
}

fn lower_inputs(cfg: &ExperimentConfig, n: usize) -> LowerBoundInputs {
    LowerBoundInputs {
        n,
        e1: cfg.e1,
        e2: cfg.e2,
        d_cap: cfg.d_cap_at(n),
        e_cap: cfg.e_cap.unwrap_or(f64::NAN),
        epsilon: cfg.epsilon,
        p_tar: cfg.p_tar_at(n),
    }
}

/// A row with every bound column filled or flagged and no simulation data.
fn bound_row(cfg: &ExperimentConfig, n: usize, scheme: Scheme) -> Result<ResultRow, ExperimentError> {
    let upper = UpperBoundInputs {
        n,
        c: cfg.c,
        eta: cfg.eta,
        epsilon: cfg.epsilon,
        p_ch: cfg.p_ch,
    };
    let mut flags = Vec::new();
    let bound_sum = take(&ensemble_error_upper_sum(&upper), &mut flags);
    let bound_closed = take(&ensemble_error_upper_closed(&upper), &mut flags);
    let bound_naive = take(&naive_error_upper(n, cfg.c_prime, cfg.epsilon), &mut flags);
    let lower_energy = take(&energy_lower_bound(&lower_inputs(cfg, n)), &mut flags);
    if let (Some(s), Some(c)) = (bound_sum, bound_closed) {
        if s > c {
            flags.push("ensemble_sum_exceeds_closed".into());
        }
    }
    let t = match scheme {
        Scheme::Gc3 => Some(cfg.scheme_params(n)?.t),
        Scheme::Naive => naive_rounds(n, cfg.c_prime, cfg.epsilon).ok(),
    };
    Ok(ResultRow {
        n,
        scheme,
        trials: None,
        failures: None,
        p_hat: None,
        ci_low: None,
        ci_high: None,
        mean_energy: None,
        mean_edges: None,
        t,
        bound_sum,
        bound_closed,
        bound_naive,
        lower_energy,
        flags,
    })
}

fn simulate_row(cfg: &ExperimentConfig, n: usize, scheme: Scheme) -> Result<ResultRow, ExperimentError> {
    let params = cfg.scheme_params(n)?;
    if scheme == Scheme::Gc3 {
        params.ensemble().map_err(|e| ExperimentError::Config {
            field: "c",
            msg: format!("N = {n}: {e}"),
        })?;
    }
    if scheme == Scheme::Naive {
        naive_rounds(n, cfg.c_prime, cfg.epsilon).map_err(|e| ExperimentError::Config {
            field: "c_prime",
            msg: format!("N = {n}: {e}"),
        })?;
    }
    let est = estimate_error_probability(&EstimateRequest {
        scheme,
        params,
        c_prime: cfg.c_prime,
        trials: cfg.trials,
        seed: cfg.seed,
        fixed_graph: cfg.fixed_graph,
    })?;
    let mut row = bound_row(cfg, n, scheme)?;
    row.trials = Some(est.trials);
    row.failures = Some(est.failures);
    row.p_hat = Some(est.p_hat);
    row.ci_low = Some(est.ci.low);
    row.ci_high = Some(est.ci.high);
    row.mean_energy = Some(est.mean_energy);
    row.mean_edges = Some(est.mean_edges);
    row.t = Some(est.t);
    Ok(row)
}

/// Runs every `(N, scheme)` cell in order and hands each row to `emit` as
/// soon as it is ready.
pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    mut emit: impl FnMut(&ResultRow) -> std::io::Result<()>,
) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for scheme in schemes(cfg) {
            let row = simulate_row(cfg, n, scheme)?;
            emit(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapEntry {
    #[serde(rename = "N")]
    pub n: usize,
    pub row: Option<GapRow>,
    pub failed: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsenessEntry {
    #[serde(rename = "N")]
    pub n: usize,
    pub value: Option<f64>,
    pub failed: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsOutput {
    pub rows: Vec<ResultRow>,
    /// Scheme energy over the energy lower bound, with `p_tar = N^{-1/2}` and
    /// `D = 2 c N ln N`.
    pub gap: Vec<GapEntry>,
    /// Present when `e_cap` is set.
    pub sparseness: Vec<SparsenessEntry>,
}

impl fmt::Display for BoundsOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gap: N, t, upper, lower, ratio, ratio/lnlnN")?;
        for e in &self.gap {
            match &e.row {
                Some(r) => writeln!(
                    f,
                    "  {} {} {:.6e} {:.6e} {:.4} {:.4}",
                    r.n, r.t, r.upper, r.lower, r.ratio, r.ratio_over_lnln
                )?,
                None => writeln!(f, "  {} preconditions failed: {}", e.n, e.failed.join(", "))?,
            }
        }
        if !self.sparseness.is_empty() {
            writeln!(f, "sparseness lower bound: N, edges")?;
            for s in &self.sparseness {
                match s.value {
                    Some(v) => writeln!(f, "  {} {v:.6e}", s.n)?,
                    None => writeln!(f, "  {} preconditions failed: {}", s.n, s.failed.join(", "))?,
                }
            }
        }
        Ok(())
    }
}

/// Formula-only evaluation over `n_list`.
pub fn cmd_bounds(
    cfg: &ExperimentConfig,
    mut emit: impl FnMut(&ResultRow) -> std::io::Result<()>,
) -> Result<BoundsOutput, ExperimentError> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for scheme in schemes(cfg) {
            let row = bound_row(cfg, n, scheme)?;
            emit(&row)?;
            rows.push(row);
        }
    }
    let gap_params = GapParams {
        e1: cfg.e1,
        e2: cfg.e2,
        epsilon: cfg.epsilon,
        c: cfg.c,
        p_ch: cfg.p_ch,
        gamma: 0.5,
        d_scale: 2.0,
    };
    let gap = gap_ratio_trend(&cfg.n_list, &gap_params)
        .into_iter()
        .zip(&cfg.n_list)
        .map(|(r, &n)| match r {
            Ok(row) => GapEntry { n, row: Some(row), failed: vec![] },
            Err(e) => GapEntry { n, row: None, failed: e.failed },
        })
        .collect();
    let sparseness = match cfg.e_cap {
        None => vec![],
        Some(_) => cfg
            .n_list
            .iter()
            .map(|&n| {
                let r = sparseness_lower_bound(&lower_inputs(cfg, n));
                SparsenessEntry { n, value: r.value, failed: r.failed().collect() }
            })
            .collect(),
    };
    Ok(BoundsOutput { rows, gap, sparseness })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SlopeFit {
    Fitted {
        slope: f64,
        std_error: f64,
        /// Negative and more than two standard errors from zero.
        significant_decay: bool,
        points: usize,
    },
    Undefined {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub scheme: Scheme,
    /// No step from one `N` to the next increases `p_hat` beyond overlapping
    /// 95% intervals.
    pub monotone_nonincreasing: bool,
    /// `(N_before, N_after)` pairs where `p_hat` rose with disjoint intervals.
    pub violations: Vec<(usize, usize)>,
    /// Least squares fit of `ln p_hat` on `ln N` over cells with failures.
    pub log_log: SlopeFit,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: monotone_nonincreasing={}",
            self.scheme.name(),
            self.monotone_nonincreasing
        )?;
        for (a, b) in &self.violations {
            write!(f, " violation={a}->{b}")?;
        }
        match &self.log_log {
            SlopeFit::Fitted { slope, std_error, significant_decay, points } => write!(
                f,
                " slope={slope:.4} se={std_error:.4} points={points} significant_decay={significant_decay}"
            ),
            SlopeFit::Undefined { reason } => write!(f, " slope=undefined ({reason})"),
        }
    }
}

/// Monotone-trend verdict and log-log slope for one scheme's rows, which must
/// be ordered by increasing `N`.
pub fn summarize_sweep(scheme: Scheme, rows: &[&ResultRow]) -> SweepSummary {
    let ci = |r: &ResultRow| Interval {
        low: r.ci_low.unwrap_or(0.0),
        high: r.ci_high.unwrap_or(1.0),
    };
    let violations: Vec<_> = rows
        .windows(2)
        .filter(|w| w[1].p_hat > w[0].p_hat && !ci(w[0]).overlaps(&ci(w[1])))
        .map(|w| (w[0].n, w[1].n))
        .collect();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.failures.unwrap_or(0) > 0)
        .map(|r| ((r.n as f64).ln(), r.p_hat.unwrap_or(0.0).ln()))
        .collect();
    let log_log = match linear_fit(&points) {
        None => SlopeFit::Undefined {
            reason: format!("{} of {} cells had failures; need at least 2", points.len(), rows.len()),
        },
        Some(fit) => SlopeFit::Fitted {
            slope: fit.slope,
            std_error: fit.slope_se,
            significant_decay: fit.slope < 0.0 && -fit.slope > 2.0 * fit.slope_se,
            points: points.len(),
        },
    };
    SweepSummary {
        scheme,
        monotone_nonincreasing: violations.is_empty(),
        violations,
        log_log,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<SweepSummary>,
}

/// [`cmd_simulate`] over a strictly increasing `n_list` of at least three
/// sizes, followed by a per-scheme trend summary.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    emit: impl FnMut(&ResultRow) -> std::io::Result<()>,
) -> Result<SweepOutput, ExperimentError> {
    if cfg.n_list.len() < 3 || cfg.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::Config {
            field: "n_list",
            msg: "a sweep needs at least 3 strictly increasing sizes".into(),
        });
    }
    let rows = cmd_simulate(cfg, emit)?;
    let summaries = schemes(cfg)
        .into_iter()
        .map(|s| {
            let own: Vec<&ResultRow> = rows.iter().filter(|r| r.scheme == s).collect();
            summarize_sweep(s, &own)
        })
        .collect();
    Ok(SweepOutput { rows, summaries })
}
