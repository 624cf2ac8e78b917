//! The two-step in-network coding scheme, the repetition baseline and their
//! energy accounting.
//!
//! Step 1: every agent broadcasts its bit `t` times; agent `v_n` forms the
//! XOR of its in-neighbours' bits, or `e` if any in-edge lost all `t` copies.
//! Step 2: every agent sends its own bit and its parity once to the sink.
//! The sink decodes `r = x^T [I, A]` with erasures by Gaussian elimination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitlinalg::{
    solve_erased_columns, BitMatrix, BitVector, DecodeError, DecodeStatus, ErasedVector, Symbol,
};
use crate::channel::{repeated_erasure, ChannelParams};
use crate::stats::{wilson_interval, Interval};
use crate::topology::{edge_count, sample_er, EnsembleParams, GraphTopology, TopologyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("epsilon = 0 needs an explicit round count")]
    ZeroErasure,
    #[error("erasure probability {0} is outside [0, 1)")]
    Epsilon(f64),
    #[error("p_ch = {0} is outside (0, 1/2)")]
    Pch(f64),
    #[error("c = {0} must be positive and finite")]
    C(f64),
    #[error("c ln N / p_ch = {0} must exceed 1")]
    RepetitionTarget(f64),
    #[error("c' ln N = {0} must be at least 1")]
    NaiveRepetition(f64),
    #[error("energy {0} must be finite and non-negative")]
    Energy(f64),
    #[error("round count must be at least 1")]
    ZeroRounds,
    #[error("N must be at least 1")]
    NoAgents,
    #[error("message length {got} does not match N = {expected}")]
    MessageLength { expected: usize, got: usize },
    #[error("graph has {got} nodes, expected {expected}")]
    GraphSize { expected: usize, got: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("decoder fault: {0}")]
    Decode(#[from] DecodeError),
}

fn check_epsilon(epsilon: f64) -> Result<(), ProtocolError> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(ProtocolError::Epsilon(epsilon))
    }
}

/// Broadcast rounds `t = ceil(ln(c ln N / p_ch) / ln(1/epsilon))`, which
/// guarantees `epsilon^t <= p_ch / (c ln N)`.
pub fn compute_t(n: usize, epsilon: f64, c: f64, p_ch: f64) -> Result<u32, ProtocolError> {
    check_epsilon(epsilon)?;
    if epsilon == 0.0 {
        return Err(ProtocolError::ZeroErasure);
    }
    let target = c * (n as f64).ln() / p_ch;
    if !(target > 1.0) {
        return Err(ProtocolError::RepetitionTarget(target));
    }
    Ok(ceil_ratio(target.ln(), (1.0 / epsilon).ln()))
}

/// Repetitions per agent for the baseline: `ceil(c' ln N / ln(1/epsilon))`,
/// at least one. With `epsilon = 0` a single copy always arrives.
pub fn naive_rounds(n: usize, c_prime: f64, epsilon: f64) -> Result<u32, ProtocolError> {
    check_epsilon(epsilon)?;
    let budget = c_prime * (n as f64).ln();
    if !(budget >= 1.0) {
        return Err(ProtocolError::NaiveRepetition(budget));
    }
    if epsilon == 0.0 {
        return Ok(1);
    }
    Ok(ceil_ratio(budget, (1.0 / epsilon).ln()))
}

/// `ceil(num / den)` that does not round an exact integer ratio up because of
/// a last-bit error in the logarithms.
fn ceil_ratio(num: f64, den: f64) -> u32 {
    let raw = num / den;
    let t = (raw - 1e-9 * raw.abs().max(1.0)).ceil();
    t.max(1.0) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    pub epsilon: f64,
    pub c: f64,
    pub p_ch: f64,
    pub e1: f64,
    pub e2: f64,
    pub t: u32,
}

impl SchemeParams {
    /// Derives `t` with [`compute_t`].
    pub fn new(n: usize, epsilon: f64, c: f64, p_ch: f64, e1: f64, e2: f64) -> Result<Self, ProtocolError> {
        let t = compute_t(n, epsilon, c, p_ch)?;
        Self::with_rounds(n, epsilon, c, p_ch, e1, e2, t)
    }

    /// Uses a caller-chosen `t`, e.g. for noiseless runs.
    pub fn with_rounds(
        n: usize,
        epsilon: f64,
        c: f64,
        p_ch: f64,
        e1: f64,
        e2: f64,
        t: u32,
    ) -> Result<Self, ProtocolError> {
        if n == 0 {
            return Err(ProtocolError::NoAgents);
        }
        check_epsilon(epsilon)?;
        if !(p_ch > 0.0 && p_ch < 0.5) {
            return Err(ProtocolError::Pch(p_ch));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(ProtocolError::C(c));
        }
        for e in [e1, e2] {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(ProtocolError::Energy(e));
            }
        }
        if t == 0 {
            return Err(ProtocolError::ZeroRounds);
        }
        Ok(Self { n, epsilon, c, p_ch, e1, e2, t })
    }

    pub fn channel(&self) -> ChannelParams {
        ChannelParams::new(self.epsilon).expect("validated on construction")
    }

    /// `p = c ln N / N`.
    pub fn ensemble(&self) -> Result<EnsembleParams, ProtocolError> {
        Ok(EnsembleParams::from_constant(self.n, self.c)?)
    }

    /// Per-edge loss probability after repetition, `epsilon^t`.
    pub fn edge_loss(&self) -> f64 {
        self.epsilon.powi(self.t as i32)
    }

    pub fn gc3_ledger(&self) -> EnergyLedger {
        let n = self.n as u64;
        EnergyLedger::new(2 * n, n * u64::from(self.t), self.e1, self.e2)
    }
}

/// Transmission counts and the energy they cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub sink_transmissions: u64,
    pub broadcasts: u64,
    pub total: f64,
}

impl EnergyLedger {
    pub fn new(sink_transmissions: u64, broadcasts: u64, e1: f64, e2: f64) -> Self {
        Self {
            sink_transmissions,
            broadcasts,
            total: energy(sink_transmissions, broadcasts, e1, e2),
        }
    }
}

/// `e1 * sink + e2 * broadcasts`; the single place energy is evaluated.
pub fn energy(sink_transmissions: u64, broadcasts: u64, e1: f64, e2: f64) -> f64 {
    e1 * sink_transmissions as f64 + e2 * broadcasts as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub status: DecodeStatus,
    /// Decoded uniquely and equal to the true message.
    pub correct: bool,
    pub ledger: EnergyLedger,
    pub edge_count: usize,
    pub t_used: u32,
    pub erased_systematic: usize,
    pub erased_parity: usize,
}

/// One realisation of every channel in the scheme, independent of the
/// message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    /// Row `j`, bit `m`: edge `v_m -> v_j` lost all `t` copies in step 1.
    pub lost_edges: BitMatrix,
    /// Position `i` of `r` erased on the way to the sink in step 2.
    pub sink_erasures: BitVector,
}

impl ErasurePattern {
    pub fn none(n: usize) -> Self {
        Self {
            lost_edges: BitMatrix::zeros(n, n),
            sink_erasures: BitVector::zeros(2 * n),
        }
    }

    /// Draws step-1 losses for every edge (senders in index order, targets
    /// ascending, `t` uniforms each) and then `2N` step-2 uniforms.
    pub fn sample(g: &GraphTopology, params: &SchemeParams, rng: &mut impl Rng) -> Self {
        let lost_edges = sample_step1_losses(g, params, rng);
        let sink_erasures = sample_sink_erasures(2 * g.n(), params.channel(), rng);
        Self {
            lost_edges,
            sink_erasures,
        }
    }

    /// Local parities produced by step 1.
    pub fn local_parities(&self, g: &GraphTopology, x: &BitVector) -> ErasedVector {
        local_parities(g, x, &self.lost_edges)
    }

    /// The sink observation for message `x`.
    pub fn observe(&self, g: &GraphTopology, x: &BitVector) -> ErasedVector {
        let y = self.local_parities(g, x);
        deliver_to_sink(x, &y, &self.sink_erasures)
    }
}

fn sample_step1_losses(g: &GraphTopology, params: &SchemeParams, rng: &mut impl Rng) -> BitMatrix {
    let n = g.n();
    let ch = params.channel();
    let mut lost = BitMatrix::zeros(n, n);
    for m in 0..n {
        for j in g.out_neighbors(m) {
            if repeated_erasure(params.t, ch, rng) {
                lost.set(j, m, true);
            }
        }
    }
    lost
}

fn sample_sink_erasures(len: usize, ch: ChannelParams, rng: &mut impl Rng) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        v.set(i, rng.random::<f64>() < ch.epsilon());
    }
    v
}

fn local_parities(g: &GraphTopology, x: &BitVector, lost: &BitMatrix) -> ErasedVector {
    let n = g.n();
    let in_adj = g.in_adjacency();
    let symbols = (0..n)
        .map(|j| {
            if lost.row_words(j).iter().any(|&w| w != 0) {
                Symbol::Erased
            } else {
                let ones: u32 = in_adj
                    .row_words(j)
                    .iter()
                    .zip(x.words())
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                Symbol::from_bit(ones & 1 == 1)
            }
        })
        .collect();
    ErasedVector::new(symbols)
}

fn deliver_to_sink(x: &BitVector, y: &ErasedVector, sink_erasures: &BitVector) -> ErasedVector {
    let n = x.len();
    let symbols = (0..2 * n)
        .map(|i| {
            if sink_erasures.get(i) {
                Symbol::Erased
            } else if i < n {
                Symbol::from_bit(x.get(i))
            } else {
                // An `e` parity is forwarded as `e`.
                y.get(i - n)
            }
        })
        .collect();
    ErasedVector::new(symbols)
}

fn check_lengths(g: &GraphTopology, x: &BitVector, params: &SchemeParams) -> Result<(), ProtocolError> {
    if g.n() != params.n {
        return Err(ProtocolError::GraphSize {
            expected: params.n,
            got: g.n(),
        });
    }
    if x.len() != params.n {
        return Err(ProtocolError::MessageLength {
            expected: params.n,
            got: x.len(),
        });
    }
    Ok(())
}

/// Step 1: local parities `y` (length N) after `t` broadcast rounds per agent.
pub fn run_step1(
    g: &GraphTopology,
    x: &BitVector,
    params: &SchemeParams,
    rng: &mut impl Rng,
) -> Result<ErasedVector, ProtocolError> {
    check_lengths(g, x, params)?;
    let lost = sample_step1_losses(g, params, rng);
    Ok(local_parities(g, x, &lost))
}

/// Step 2: the sink observation `r = [x~, y~]` (length 2N).
pub fn run_step2(
    x: &BitVector,
    y: &ErasedVector,
    params: &SchemeParams,
    rng: &mut impl Rng,
) -> Result<ErasedVector, ProtocolError> {
    if x.len() != params.n || y.len() != params.n {
        return Err(ProtocolError::MessageLength {
            expected: params.n,
            got: if x.len() != params.n { x.len() } else { y.len() },
        });
    }
    let sink = sample_sink_erasures(2 * params.n, params.channel(), rng);
    Ok(deliver_to_sink(x, y, &sink))
}

/// Decodes a sink observation and scores it against the true message.
pub fn decode_observation(
    g: &GraphTopology,
    x: &BitVector,
    r: &ErasedVector,
    params: &SchemeParams,
) -> Result<TrialOutcome, ProtocolError> {
    let n = g.n();
    let decoded = solve_erased_columns(&g.generator_columns(), r)?;
    let correct = decoded.recovered() == Some(x);
    let erased_systematic = r.symbols()[..n].iter().filter(|s| s.is_erased()).count();
    let erased_parity = r.symbols()[n..].iter().filter(|s| s.is_erased()).count();
    Ok(TrialOutcome {
        status: decoded.status(),
        correct,
        ledger: params.gc3_ledger(),
        edge_count: edge_count(g),
        t_used: params.t,
        erased_systematic,
        erased_parity,
    })
}

/// Runs both steps and decodes. Equivalent to [`run_step1`] followed by
/// [`run_step2`] on the same rng.
pub fn run_trial_gc3(
    g: &GraphTopology,
    x: &BitVector,
    params: &SchemeParams,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, ProtocolError> {
    check_lengths(g, x, params)?;
    let pattern = ErasurePattern::sample(g, params, rng);
    let r = pattern.observe(g, x);
    decode_observation(g, x, &r, params)
}

/// Baseline: each agent repeats its bit `t'` times straight to the sink.
pub fn run_trial_naive(
    x: &BitVector,
    c_prime: f64,
    params: &SchemeParams,
    rng: &mut impl Rng,
) -> Result<TrialOutcome, ProtocolError> {
    if x.len() != params.n {
        return Err(ProtocolError::MessageLength {
            expected: params.n,
            got: x.len(),
        });
    }
    let t = naive_rounds(params.n, c_prime, params.epsilon)?;
    let ch = params.channel();
    let mut lost = 0;
    for _ in 0..params.n {
        if repeated_erasure(t, ch, rng) {
            lost += 1;
        }
    }
    let n = params.n as u64;
    let status = if lost == 0 {
        DecodeStatus::Unique
    } else {
        DecodeStatus::Ambiguous
    };
    Ok(TrialOutcome {
        status,
        correct: lost == 0,
        ledger: EnergyLedger::new(n * u64::from(t), 0, params.e1, params.e2),
        edge_count: 0,
        t_used: t,
        erased_systematic: lost,
        erased_parity: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Gc3,
    Naive,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gc3 => "gc3",
            Scheme::Naive => "naive",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Scheme::Gc3 => 1,
            Scheme::Naive => 2,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gc3" => Ok(Scheme::Gc3),
            "naive" => Ok(Scheme::Naive),
            other => Err(format!("unknown scheme {other:?} (expected gc3 or naive)")),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key for the stream family of one `(seed, scheme, N)` cell.
fn cell_key(seed: u64, scheme: Scheme, n: usize) -> u64 {
    splitmix64(seed ^ splitmix64(scheme.tag().rotate_left(56) ^ n as u64))
}

/// Rng for trial `trial` of a cell; independent of scheduling.
pub fn trial_rng(seed: u64, scheme: Scheme, n: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cell_key(seed, scheme, n));
    rng.set_stream(trial);
    rng
}

/// Rng for the single graph shared by all trials in fixed-graph mode.
pub fn fixed_graph_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(cell_key(seed, Scheme::Gc3, n) ^ 0x6772_6170_6800_0000))
}

pub fn random_message(n: usize, rng: &mut impl Rng) -> BitVector {
    let mut x = BitVector::zeros(n);
    for i in 0..n {
        x.set(i, rng.random::<bool>());
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRequest {
    pub scheme: Scheme,
    pub params: SchemeParams,
    /// Repetition constant of the baseline; ignored for GC-3.
    pub c_prime: f64,
    pub trials: u64,
    pub seed: u64,
    /// Reuse one sampled graph for every trial instead of a fresh one each.
    pub fixed_graph: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci: Interval,
    pub mean_energy: f64,
    pub mean_edges: f64,
    pub t: u32,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    failures: u64,
    sink: u128,
    broadcasts: u128,
    edges: u128,
}

impl Tally {
    fn add(mut self, o: &TrialOutcome) -> Self {
        self.failures += u64::from(!o.correct);
        self.sink += u128::from(o.ledger.sink_transmissions);
        self.broadcasts += u128::from(o.ledger.broadcasts);
        self.edges += o.edge_count as u128;
        self
    }

    fn merge(self, o: Self) -> Self {
        Self {
            failures: self.failures + o.failures,
            sink: self.sink + o.sink,
            broadcasts: self.broadcasts + o.broadcasts,
            edges: self.edges + o.edges,
        }
    }
}

/// Runs one trial of the requested scheme. `(seed, scheme, N, trial)` fully
/// determines the result.
pub fn run_indexed_trial(
    req: &EstimateRequest,
    fixed: Option<&GraphTopology>,
    trial: u64,
) -> Result<TrialOutcome, ProtocolError> {
    let params = &req.params;
    let mut rng = trial_rng(req.seed, req.scheme, params.n, trial);
    let x = random_message(params.n, &mut rng);
    match req.scheme {
        Scheme::Gc3 => match fixed {
            Some(g) => run_trial_gc3(g, &x, params, &mut rng),
            None => {
                let g = sample_er(params.ensemble()?, &mut rng);
                run_trial_gc3(&g, &x, params, &mut rng)
            }
        },
        Scheme::Naive => run_trial_naive(&x, req.c_prime, params, &mut rng),
    }
}

/// Monte Carlo estimate of the block error probability, averaged over fresh
/// graphs (or over channel noise only, in fixed-graph mode).
pub fn estimate_error_probability(req: &EstimateRequest) -> Result<Estimate, ProtocolError> {
    if req.trials == 0 {
        return Err(ProtocolError::NoTrials);
    }
    let params = &req.params;
    let t = match req.scheme {
        Scheme::Gc3 => params.t,
        Scheme::Naive => naive_rounds(params.n, req.c_prime, params.epsilon)?,
    };
    let fixed = match (req.scheme, req.fixed_graph) {
        (Scheme::Gc3, true) => Some(sample_er(params.ensemble()?, &mut fixed_graph_rng(req.seed, params.n))),
        _ => None,
    };
    let tally = (0..req.trials)
        .into_par_iter()
        .map(|i| run_indexed_trial(req, fixed.as_ref(), i))
        .try_fold(Tally::default, |acc, o| o.map(|o| acc.add(&o)))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let trials = req.trials as f64;
    let sink = u64::try_from(tally.sink).expect("transmission count overflow");
    let broadcasts = u64::try_from(tally.broadcasts).expect("broadcast count overflow");
    Ok(Estimate {
        trials: req.trials,
        failures: tally.failures,
        p_hat: tally.failures as f64 / trials,
        ci: wilson_interval(tally.failures, req.trials),
        mean_energy: energy(sink, broadcasts, params.e1, params.e2) / trials,
        mean_edges: tally.edges as f64 / trials,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitlinalg::{rank, DecodeResult};

    fn noiseless(n: usize) -> SchemeParams {
        SchemeParams::with_rounds(n, 0.0, 3.0, 0.1, 1.0, 0.25, 1).unwrap()
    }

    #[test]
    fn compute_t_examples() {
        // c ln N / p_ch = 8 exactly at c = 0.8 / ln N, p_ch = 0.1.
        let n = 100;
        let c = 0.8 / (n as f64).ln();
        assert_eq!(compute_t(n, 0.5, c, 0.1).unwrap(), 3);
        assert_eq!(compute_t(100, 0.5, 3.0, 0.1).unwrap(), 8);
        assert_eq!(compute_t(100, 0.1, 3.0, 0.1).unwrap(), 3);
    }

    #[test]
    fn compute_t_guarantees_target() {
        for n in [10, 100, 1000, 123_456] {
            for eps in [0.01, 0.1, 0.3, 0.5, 0.9] {
                for c in [1.0, 3.0, 4.0] {
                    let t = compute_t(n, eps, c, 0.05).unwrap();
                    let target = 0.05 / (c * (n as f64).ln());
                    assert!(eps.powi(t as i32) <= target * (1.0 + 1e-9));
                    assert!(t == 1 || eps.powi(t as i32 - 1) > target);
                }
            }
        }
    }

    #[test]
    fn compute_t_rejects_degenerate_inputs() {
        assert_eq!(compute_t(100, 0.0, 3.0, 0.1), Err(ProtocolError::ZeroErasure));
        assert!(matches!(compute_t(2, 0.5, 0.1, 0.1), Err(ProtocolError::RepetitionTarget(_))));
        assert!(matches!(compute_t(1, 0.5, 3.0, 0.1), Err(ProtocolError::RepetitionTarget(_))));
        assert!(SchemeParams::new(100, 0.0, 3.0, 0.1, 1.0, 1.0).is_err());
        assert!(SchemeParams::with_rounds(100, 0.1, 3.0, 0.5, 1.0, 1.0, 2).is_err());
        assert!(SchemeParams::with_rounds(100, 0.1, 3.0, 0.1, -1.0, 1.0, 2).is_err());
        assert!(SchemeParams::with_rounds(100, 0.1, 3.0, 0.1, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn naive_rounds_example() {
        assert_eq!(naive_rounds(100, 2.0, 0.5).unwrap(), 14);
        assert_eq!(naive_rounds(100, 2.0, 0.0).unwrap(), 1);
        assert!(naive_rounds(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn step1_self_loops_copy_message() {
        let g = GraphTopology::from_edges(5, (0..5).map(|i| (i, i)));
        let x = BitVector::from_bools(&[true, false, true, true, false]);
        let y = run_step1(&g, &x, &noiseless(5), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(y, ErasedVector::from_bits(&x));
    }

    #[test]
    fn step1_empty_graph_gives_zero_parities() {
        let g = GraphTopology::empty(4);
        let x = BitVector::from_bools(&[true, true, false, true]);
        let y = run_step1(&g, &x, &noiseless(4), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(y, ErasedVector::new(vec![Symbol::Zero; 4]));
    }

    #[test]
    fn step1_two_node_parity() {
        // Edges v1 -> v2 and v2 -> v2 (0-indexed: 0 -> 1, 1 -> 1).
        let g = GraphTopology::from_edges(2, [(0, 1), (1, 1)]);
        for bits in 0u64..4 {
            let x = BitVector::from_u64(bits, 2);
            let y = run_step1(&g, &x, &noiseless(2), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            let expect = vec![Symbol::Zero, Symbol::from_bit(x.get(0) ^ x.get(1))];
            assert_eq!(y, ErasedVector::new(expect));
        }
    }

    #[test]
    fn step1_lost_edge_erases_parity() {
        // With epsilon close to 1 and t = 1 the single in-edge is almost surely lost.
        let g = GraphTopology::from_edges(2, [(0, 1)]);
        let params = SchemeParams::with_rounds(2, 0.999_999, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let x = BitVector::from_bools(&[true, false]);
        let y = run_step1(&g, &x, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(y.get(0), Symbol::Zero);
        assert_eq!(y.get(1), Symbol::Erased);
    }

    #[test]
    fn step2_edge_cases() {
        let x = BitVector::from_bools(&[true, false, true]);
        let y = ErasedVector::new(vec![Symbol::One, Symbol::Erased, Symbol::Zero]);
        let r = run_step2(&x, &y, &noiseless(3), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(r, ErasedVector::from_bits(&x).concat(&y));

        let params = SchemeParams::with_rounds(3, 0.3, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = run_step2(&x, &ErasedVector::all_erased(3), &params, &mut rng).unwrap();
            assert!(r.symbols()[3..].iter().all(|s| s.is_erased()));
        }
    }

    #[test]
    fn step2_systematic_erasure_rate() {
        let params = SchemeParams::with_rounds(4, 0.3, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let x = BitVector::from_bools(&[true, false, true, true]);
        let y = ErasedVector::from_bits(&x);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trials = 100_000 / 4;
        let mut erased = 0usize;
        for _ in 0..trials {
            let r = run_step2(&x, &y, &params, &mut rng).unwrap();
            erased += r.symbols()[..4].iter().filter(|s| s.is_erased()).count();
        }
        let n = (trials * 4) as f64;
        let freq = erased as f64 / n;
        assert!((freq - 0.3).abs() < 3.0 * (0.21 / n).sqrt(), "freq {freq}");
    }

    #[test]
    fn trial_equals_step1_then_step2() {
        let params = SchemeParams::new(20, 0.3, 3.0, 0.1, 1.0, 1.0).unwrap();
        let mut grng = ChaCha8Rng::seed_from_u64(3);
        let g = sample_er(params.ensemble().unwrap(), &mut grng);
        let x = random_message(20, &mut grng);
        let mut a = ChaCha8Rng::seed_from_u64(4);
        let mut b = ChaCha8Rng::seed_from_u64(4);
        let y = run_step1(&g, &x, &params, &mut a).unwrap();
        let r = run_step2(&x, &y, &params, &mut a).unwrap();
        let pattern = ErasurePattern::sample(&g, &params, &mut b);
        assert_eq!(pattern.observe(&g, &x), r);
    }

    #[test]
    fn noiseless_trial_is_correct_and_costs_closed_form() {
        let params = SchemeParams::with_rounds(12, 0.0, 3.0, 0.1, 2.5, 0.75, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = sample_er(EnsembleParams::new(12, 0.4).unwrap(), &mut rng);
            let x = random_message(12, &mut rng);
            let o = run_trial_gc3(&g, &x, &params, &mut rng).unwrap();
            assert!(o.correct);
            assert_eq!(o.ledger.total, 2.0 * 12.0 * 2.5 + 12.0 * 2.0 * 0.75);
            assert_eq!(o.edge_count, edge_count(&g));
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let params = SchemeParams::new(6, 0.4, 3.0, 0.1, 1.0, 1.0).unwrap();
        let g = GraphTopology::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (2, 2)]);
        let x = BitVector::from_bools(&[true, false, false, true, true, false]);
        let runs: Vec<_> = (0..3)
            .map(|_| run_trial_gc3(&g, &x, &params, &mut ChaCha8Rng::seed_from_u64(77)).unwrap())
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn failure_is_rank_deficiency() {
        let params = SchemeParams::with_rounds(7, 0.45, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut failures = 0;
        for _ in 0..500 {
            let g = sample_er(EnsembleParams::new(7, 0.3).unwrap(), &mut rng);
            let x = random_message(7, &mut rng);
            let pattern = ErasurePattern::sample(&g, &params, &mut rng);
            let r = pattern.observe(&g, &x);
            let cols = g.generator_columns();
            let kept: Vec<usize> = r.surviving().map(|(i, _)| i).collect();
            let sub = BitMatrix::from_fn(kept.len(), 7, |i, c| cols.get(kept[i], c));
            let o = decode_observation(&g, &x, &r, &params).unwrap();
            assert_eq!(o.correct, rank(&sub) == 7);
            failures += usize::from(!o.correct);
        }
        assert!(failures > 0);
    }

    #[test]
    fn decoding_never_depends_on_message() {
        let params = SchemeParams::with_rounds(5, 0.35, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let g = sample_er(EnsembleParams::new(5, 0.35).unwrap(), &mut rng);
            let pattern = ErasurePattern::sample(&g, &params, &mut rng);
            let cols = g.generator_columns();
            let statuses: Vec<_> = (0..32u64)
                .map(|bits| {
                    let x = BitVector::from_u64(bits, 5);
                    let out = solve_erased_columns(&cols, &pattern.observe(&g, &x)).unwrap();
                    if let DecodeResult::Unique(got) = &out {
                        assert_eq!(got, &x);
                    }
                    out.status()
                })
                .collect();
            assert!(statuses.iter().all(|s| *s == statuses[0]));
        }
    }

    #[test]
    fn raising_epsilon_never_helps() {
        // Common random numbers: same rng state, same t, same graph and message.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let eps_grid = [0.05, 0.15, 0.3, 0.5, 0.7];
        for trial in 0..300u64 {
            let g = sample_er(EnsembleParams::new(8, 0.3).unwrap(), &mut rng);
            let x = random_message(8, &mut rng);
            let mut failed_before = false;
            for &eps in &eps_grid {
                let params = SchemeParams::with_rounds(8, eps, 3.0, 0.1, 1.0, 1.0, 2).unwrap();
                let o = run_trial_gc3(&g, &x, &params, &mut ChaCha8Rng::seed_from_u64(trial)).unwrap();
                assert!(!(failed_before && o.correct), "trial {trial} eps {eps}");
                failed_before |= !o.correct;
            }
        }
    }

    #[test]
    fn naive_trial_accounting() {
        let params = SchemeParams::with_rounds(50, 0.0, 3.0, 0.1, 3.0, 1.0, 1).unwrap();
        let x = random_message(50, &mut ChaCha8Rng::seed_from_u64(0));
        let o = run_trial_naive(&x, 2.0, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(o.correct);
        assert_eq!(o.ledger.total, 50.0 * f64::from(o.t_used) * 3.0);
        assert_eq!(o.ledger.broadcasts, 0);
    }

    #[test]
    fn naive_per_node_failure_within_bound() {
        let params = SchemeParams::with_rounds(100, 0.5, 3.0, 0.1, 1.0, 1.0, 1).unwrap();
        let t = naive_rounds(100, 2.0, 0.5).unwrap();
        let bound = 100f64.powf(-2.0);
        assert!(0.5f64.powi(t as i32) <= bound);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_message(100, &mut rng);
        let trials = 2_000;
        let lost: usize = (0..trials)
            .map(|_| run_trial_naive(&x, 2.0, &params, &mut rng).unwrap().erased_systematic)
            .sum();
        let n = (trials * 100) as f64;
        let freq = lost as f64 / n;
        assert!(freq <= bound + 3.0 * (bound * (1.0 - bound) / n).sqrt(), "freq {freq}");
    }

    #[test]
    fn estimate_noiseless_is_error_free() {
        let req = EstimateRequest {
            scheme: Scheme::Gc3,
            params: SchemeParams::with_rounds(16, 0.0, 3.0, 0.1, 1.0, 1.0, 1).unwrap(),
            c_prime: 3.0,
            trials: 200,
            seed: 1,
            fixed_graph: false,
        };
        let est = estimate_error_probability(&req).unwrap();
        assert_eq!(est.failures, 0);
        assert_eq!(est.p_hat, 0.0);
        assert_eq!(est.ci.low, 0.0);
        assert_eq!(est.mean_energy, 2.0 * 16.0 + 16.0);
    }

    #[test]
    fn estimate_rejects_zero_trials() {
        let req = EstimateRequest {
            scheme: Scheme::Naive,
            params: noiseless(10),
            c_prime: 3.0,
            trials: 0,
            seed: 1,
            fixed_graph: false,
        };
        assert_eq!(estimate_error_probability(&req), Err(ProtocolError::NoTrials));
    }

    #[test]
    fn disjoint_seeds_agree_within_intervals() {
        let params = SchemeParams::with_rounds(24, 0.3, 2.0, 0.1, 1.0, 1.0, 1).unwrap();
        let run = |seed| {
            estimate_error_probability(&EstimateRequest {
                scheme: Scheme::Gc3,
                params,
                c_prime: 2.0,
                trials: 4_000,
                seed,
                fixed_graph: false,
            })
            .unwrap()
        };
        let (a, b) = (run(1), run(2));
        assert!(a.failures > 0 && b.failures > 0);
        assert!(a.ci.overlaps(&b.ci), "{a:?} {b:?}");
    }

    #[test]
    fn fixed_graph_mode_reports_constant_edge_count() {
        let params = SchemeParams::new(32, 0.2, 3.0, 0.1, 1.0, 1.0).unwrap();
        let req = EstimateRequest {
            scheme: Scheme::Gc3,
            params,
            c_prime: 3.0,
            trials: 50,
            seed: 3,
            fixed_graph: true,
        };
        let est = estimate_error_probability(&req).unwrap();
        let g = sample_er(params.ensemble().unwrap(), &mut fixed_graph_rng(3, 32));
        assert_eq!(est.mean_edges, edge_count(&g) as f64);
    }

    #[test]
    fn scheme_names_parse() {
        for s in [Scheme::Gc3, Scheme::Naive] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("gc2".parse::<Scheme>().is_err());
    }
}
