//! Exhaustive decoder check on small graphs.
//!
//! Each case is a graph and a fixed set of erased codeword positions. The
//! expected status comes from enumerating the kernel of the surviving
//! columns, computed from the edge list with plain integer masks; the
//! decoder under test sees the generator built by [`GraphTopology`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::bitlinalg::{
    solve_erased_columns, BitMatrix, DecodeError, DecodeResult, DecodeStatus, ErasedVector, Symbol,
};
use crate::topology::{sample_er, EnsembleParams, GraphTopology};

pub const MAX_ORACLE_N: usize = 10;

/// Anything that maps (generator columns, received word) to a decode result.
pub trait ErasureDecoder: Sync {
    fn decode(&self, columns: &BitMatrix, r: &ErasedVector) -> Result<DecodeResult, DecodeError>;
}

impl<F> ErasureDecoder for F
where
    F: Fn(&BitMatrix, &ErasedVector) -> Result<DecodeResult, DecodeError> + Sync,
{
    fn decode(&self, columns: &BitMatrix, r: &ErasedVector) -> Result<DecodeResult, DecodeError> {
        self(columns, r)
    }
}

/// The production decoder.
pub struct GaussianElimination;

impl ErasureDecoder for GaussianElimination {
    fn decode(&self, columns: &BitMatrix, r: &ErasedVector) -> Result<DecodeResult, DecodeError> {
        solve_erased_columns(columns, r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCase {
    pub n: usize,
    /// Directed edges `(from, to)`.
    pub edges: Vec<(usize, usize)>,
    /// Erased codeword positions in `0..2N`; `j < N` is systematic bit `j`,
    /// `N + j` is the parity of agent `j`.
    pub erased: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mismatch {
    Status { input: u64, expected: DecodeStatus, got: DecodeStatus },
    WrongRecovery { input: u64 },
    DecoderError { input: u64, error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub seed: u64,
    pub index: u64,
    pub case: OracleCase,
    pub mismatch: Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleCount {
    pub n: usize,
    pub cases: u64,
    pub inputs: u64,
    pub mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub per_n: Vec<OracleCount>,
    pub failures: Vec<CaseFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.per_n {
            writeln!(
                f,
                "N={} cases={} inputs={} mismatches={}",
                c.n, c.cases, c.inputs, c.mismatches
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Column masks of `[I, A]`: column `j` is `e_j`, column `N + j` has bit `m`
/// set iff `m -> j` is an edge.
fn column_masks(case: &OracleCase) -> Vec<u32> {
    let n = case.n;
    let mut cols: Vec<u32> = (0..n).map(|j| 1 << j).collect();
    cols.resize(2 * n, 0);
    for &(from, to) in &case.edges {
        cols[n + to] |= 1 << from;
    }
    cols
}

fn parity(x: u32) -> bool {
    x.count_ones() % 2 == 1
}

/// Full rank iff no nonzero message is orthogonal to every surviving column.
fn kernel_oracle(n: usize, surviving: &[u32]) -> DecodeStatus {
    let full = (1u32..1 << n).all(|x| surviving.iter().any(|&c| parity(x & c)));
    if full {
        DecodeStatus::Unique
    } else {
        DecodeStatus::Ambiguous
    }
}

/// Replays one case against every input in `0..2^N`; `None` if the decoder
/// agrees with the oracle throughout.
pub fn check_case<D: ErasureDecoder + ?Sized>(case: &OracleCase, decoder: &D) -> Option<Mismatch> {
    let n = case.n;
    let masks = column_masks(case);
    let mut erased = vec![false; 2 * n];
    for &j in &case.erased {
        erased[j] = true;
    }
    let surviving: Vec<u32> = masks.iter().zip(&erased).filter(|(_, &e)| !e).map(|(&m, _)| m).collect();
    let expected = kernel_oracle(n, &surviving);
    let columns = GraphTopology::from_edges(n, case.edges.iter().copied()).generator_columns();
    for x in 0..1u64 << n {
        let symbols = masks
            .iter()
            .zip(&erased)
            .map(|(&m, &e)| if e { Symbol::Erased } else { Symbol::from_bit(parity(x as u32 & m)) })
            .collect();
        let r = ErasedVector::new(symbols);
        match decoder.decode(&columns, &r) {
            Err(e) => return Some(Mismatch::DecoderError { input: x, error: e.to_string() }),
            Ok(res) if res.status() != expected => {
                return Some(Mismatch::Status { input: x, expected, got: res.status() })
            }
            Ok(res) => {
                if let Some(got) = res.recovered() {
                    if (0..n).any(|i| got.get(i) != ((x >> i) & 1 == 1)) {
                        return Some(Mismatch::WrongRecovery { input: x });
                    }
                }
            }
        }
    }
    None
}

fn case_rng(seed: u64, n: usize, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

/// Random case: edge density and erasure rate are themselves drawn uniformly
/// so that both full-rank and deficient patterns are common.
pub fn sample_case(seed: u64, n: usize, index: u64) -> OracleCase {
    let mut rng = case_rng(seed, n, index);
    let p = rng.random::<f64>();
    let g = sample_er(EnsembleParams::new(n, p).expect("p in [0, 1)"), &mut rng);
    let q = rng.random::<f64>();
    let erased = (0..2 * n).filter(|_| rng.random::<f64>() < q).collect();
    OracleCase {
        n,
        edges: g.edges().collect(),
        erased,
    }
}

/// Checks `cases` random cases at every `N` in `1..=n_max`.
pub fn cmd_oracle_check<D: ErasureDecoder>(
    n_max: usize,
    cases: u64,
    seed: u64,
    decoder: &D,
) -> Result<OracleReport, ExperimentError> {
    if !(1..=MAX_ORACLE_N).contains(&n_max) {
        return Err(ExperimentError::Config {
            field: "n_max",
            msg: format!("{n_max} is outside 1..={MAX_ORACLE_N}"),
        });
    }
    oracle_check_sizes(&(1..=n_max).collect::<Vec<_>>(), cases, seed, decoder)
}

/// As [`cmd_oracle_check`] for an explicit list of sizes.
pub fn oracle_check_sizes<D: ErasureDecoder>(
    sizes: &[usize],
    cases: u64,
    seed: u64,
    decoder: &D,
) -> Result<OracleReport, ExperimentError> {
    if let Some(&n) = sizes.iter().find(|&&n| !(1..=MAX_ORACLE_N).contains(&n)) {
        return Err(ExperimentError::Config {
            field: "n_max",
            msg: format!("{n} is outside 1..={MAX_ORACLE_N}"),
        });
    }
    let mut per_n = Vec::new();
    let mut failures = Vec::new();
    for &n in sizes {
        let found: Vec<CaseFailure> = (0..cases)
            .into_par_iter()
            .filter_map(|index| {
                let case = sample_case(seed, n, index);
                check_case(&case, decoder).map(|mismatch| CaseFailure { seed, index, case, mismatch })
            })
            .collect();
        per_n.push(OracleCount {
            n,
            cases,
            inputs: cases << n,
            mismatches: found.len() as u64,
        });
        failures.extend(found);
    }
    Ok(OracleReport { seed, per_n, failures })
}
