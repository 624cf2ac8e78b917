//! Directed Erdős–Rényi graphs with self-loops.
//!
//! Every ordered pair `(i, j)`, including `i == j`, carries the edge
//! `v_i -> v_j` independently with probability `p`. The adjacency matrix `A`
//! has `A[i][j] = 1` for that edge, so column `j` of `A` is the
//! in-neighbourhood of `v_j`.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::bitlinalg::BitMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    pub n: usize,
    pub p: f64,
}

impl EnsembleParams {
    pub fn new(n: usize, p: f64) -> Result<Self, TopologyError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(TopologyError::InvalidProbability(p));
        }
        Ok(Self { n, p })
    }

    /// `p = c ln N / N` (natural log).
    pub fn from_constant(n: usize, c: f64) -> Result<Self, TopologyError> {
        Self::new(n, connection_probability(n, c))
    }
}

/// `c ln N / N`.
pub fn connection_probability(n: usize, c: f64) -> f64 {
    let n = n as f64;
    c * n.ln() / n
}

#[derive(Clone, PartialEq, Eq)]
pub struct GraphTopology {
    out_adj: BitMatrix,
    in_adj: BitMatrix,
}

impl std::fmt::Debug for GraphTopology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphTopology")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl GraphTopology {
    pub fn empty(n: usize) -> Self {
        Self {
            out_adj: BitMatrix::zeros(n, n),
            in_adj: BitMatrix::zeros(n, n),
        }
    }

    /// Builds a graph from directed `(from, to)` pairs. Duplicates collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn from_adjacency(a: &BitMatrix) -> Self {
        assert_eq!(a.rows(), a.cols(), "adjacency must be square");
        Self {
            out_adj: a.clone(),
            in_adj: a.transpose(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        self.out_adj.set(from, to, true);
        self.in_adj.set(to, from, true);
    }

    pub fn n(&self) -> usize {
        self.out_adj.rows()
    }

    /// `A`, with `A[i][j] = 1` iff `v_i -> v_j`.
    pub fn adjacency(&self) -> &BitMatrix {
        &self.out_adj
    }

    /// `A^T`: row `j` is the in-neighbourhood of `v_j`.
    pub fn in_adjacency(&self) -> &BitMatrix {
        &self.in_adj
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out_adj.get(from, to)
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_adj.row_ones(v)
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_adj.row_ones(v)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.row_count_ones(v)
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.row_count_ones(v)
    }

    /// All edges in row-major order of `A`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| self.out_neighbors(i).map(move |j| (i, j)))
    }

    /// Transposed generator `[I, A]^T`: row `j < N` is `e_j`, row `N + j` is
    /// the in-neighbourhood of `v_j`.
    pub fn generator_columns(&self) -> BitMatrix {
        BitMatrix::identity(self.n()).vstack(&self.in_adj)
    }

    /// Generator `[I, A]`.
    pub fn generator(&self) -> BitMatrix {
        BitMatrix::identity(self.n()).hstack(&self.out_adj)
    }

    /// Line format: `N` on the first line, then one `i j` pair per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n());
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self, TopologyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(TopologyError::Parse {
            line: 1,
            msg: "missing node count".into(),
        })?;
        let n: usize = header.parse().map_err(|_| TopologyError::Parse {
            line: hl,
            msg: format!("bad node count {header:?}"),
        })?;
        let mut g = Self::empty(n);
        for (line, l) in lines {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) if i < n && j < n => g.add_edge(i, j),
                _ => {
                    return Err(TopologyError::Parse {
                        line,
                        msg: format!("expected two node indices below {n}, got {l:?}"),
                    })
                }
            }
        }
        Ok(g)
    }
}

/// Samples one graph. Uses geometric skipping over the `N^2` ordered pairs, so
/// the cost is proportional to the number of edges drawn.
pub fn sample_er(params: EnsembleParams, rng: &mut impl Rng) -> GraphTopology {
    let n = params.n;
    let mut g = GraphTopology::empty(n);
    let total = (n * n) as u64;
    if params.p <= 0.0 || n == 0 {
        return g;
    }
    if params.p >= 1.0 {
        for i in 0..n {
            for j in 0..n {
                g.add_edge(i, j);
            }
        }
        return g;
    }
    let log_q = (-params.p).ln_1p();
    let mut idx: u64 = 0;
    loop {
        let u: f64 = rng.random();
        let skip = ((-u).ln_1p() / log_q).floor();
        if skip >= (total - idx) as f64 {
            break;
        }
        idx += skip as u64;
        let (i, j) = ((idx / n as u64) as usize, (idx % n as u64) as usize);
        g.add_edge(i, j);
        idx += 1;
        if idx >= total {
            break;
        }
    }
    g
}

/// `|E| = sum_n d_n`.
pub fn edge_count(g: &GraphTopology) -> usize {
    g.adjacency().count_ones()
}

/// Tail bound `Pr(|E| > 2 p N^2) < exp(-p^2 N^2 / 2)`.
pub fn chernoff_edge_tail(params: EnsembleParams) -> f64 {
    let pn = params.p * params.n as f64;
    (-pn * pn / 2.0).exp()
}
