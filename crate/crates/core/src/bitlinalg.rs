//! Linear algebra over GF(2).
//!
//! Matrices are stored row-major with each row packed into `u64` words, so
//! row addition is a word-level XOR. Decoding of an erased codeword is done
//! by Gaussian elimination on the surviving columns of the generator: the
//! message is recovered iff those columns have full row rank.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn parity_of_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    /// No message satisfies the non-erased equations. Honest channel outputs
    /// can never produce this.
    #[error("non-erased symbols are inconsistent with every message")]
    Inconsistent,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Bit `i` is `(value >> i) & 1`. Only the low `len` bits are used.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD_BITS { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, ")")
    }
}

/// A dense, bit-packed, row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows given as 0/1 bytes. Panics on ragged input.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |r, c| rows[r][c] != 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.bits[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.bits[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| SetBits(w).map(move |b| wi * WORD_BITS + b))
    }

    pub fn row_count_ones(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.bits.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, dst: usize, src: usize) {
        assert!(dst != src, "adding a row to itself zeroes it");
        for k in 0..self.stride {
            let s = self.bits[src * self.stride + k];
            self.bits[dst * self.stride + k] ^= s;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Horizontal concatenation `[self, other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                m.set(r, c, true);
            }
            for c in other.row_ones(r) {
                m.set(r, self.cols + c, true);
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack needs equal column counts");
        let mut bits = Vec::with_capacity(self.bits.len() + other.bits.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            bits,
        }
    }

    /// `x^T · self`, with `x` of length `rows`.
    pub fn left_mul(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0u64; self.stride];
        for r in 0..self.rows {
            if x.get(r) {
                for (o, w) in out.iter_mut().zip(self.row_words(r)) {
                    *o ^= w;
                }
            }
        }
        BitVector {
            len: self.cols,
            words: out,
        }
    }

    /// `self · x`, with `x` of length `cols`.
    pub fn right_mul(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols);
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            out.set(r, parity_of_and(self.row_words(r), x.words()));
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct SetBits(u64);

impl Iterator for SetBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// One received symbol: a bit or the erasure mark `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    #[inline]
    pub fn is_erased(self) -> bool {
        self == Symbol::Erased
    }

    #[inline]
    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Erased => "e",
        })
    }
}

/// A word over `{0, 1, e}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErasedVector {
    symbols: Vec<Symbol>,
}

impl ErasedVector {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    pub fn all_erased(len: usize) -> Self {
        Self {
            symbols: vec![Symbol::Erased; len],
        }
    }

    pub fn from_bits(bits: &BitVector) -> Self {
        Self {
            symbols: bits.iter().map(Symbol::from_bit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        self.symbols[i] = s;
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn erased_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_erased()).count()
    }

    /// Positions that carry a bit.
    pub fn surviving(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.symbols
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.bit().map(|b| (i, b)))
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Self { symbols }
    }
}

impl fmt::Display for ErasedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecodeStatus {
    Unique,
    Ambiguous,
}

/// Outcome of maximum-likelihood erasure decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeResult {
    Unique(BitVector),
    /// More than one message is consistent with the surviving symbols.
    Ambiguous,
}

impl DecodeResult {
    pub fn status(&self) -> DecodeStatus {
        match self {
            DecodeResult::Unique(_) => DecodeStatus::Unique,
            DecodeResult::Ambiguous => DecodeStatus::Ambiguous,
        }
    }

    pub fn recovered(&self) -> Option<&BitVector> {
        match self {
            DecodeResult::Unique(x) => Some(x),
            DecodeResult::Ambiguous => None,
        }
    }
}

enum Insert {
    Pivot,
    Redundant,
    Contradiction,
}

/// Incremental row-echelon basis over `width` unknowns, with an augmented
/// right-hand-side bit per row. Every stored row's lowest set bit is its
/// pivot, and pivots are distinct.
struct EchelonBasis {
    width: usize,
    stride: usize,
    rows: Vec<u64>,
    rhs: Vec<bool>,
    pivot_slot: Vec<Option<usize>>,
    scratch: Vec<u64>,
}

impl EchelonBasis {
    fn new(width: usize) -> Self {
        let stride = words_for(width);
        Self {
            width,
            stride,
            rows: Vec::with_capacity(width * stride),
            rhs: Vec::with_capacity(width),
            pivot_slot: vec![None; width],
            scratch: vec![0; stride],
        }
    }

    fn rank(&self) -> usize {
        self.rhs.len()
    }

    fn insert(&mut self, row: &[u64], mut rhs: bool) -> Insert {
        debug_assert_eq!(row.len(), self.stride);
        self.scratch.copy_from_slice(row);
        let mut wi = 0;
        loop {
            while wi < self.stride && self.scratch[wi] == 0 {
                wi += 1;
            }
            if wi == self.stride {
                return if rhs { Insert::Contradiction } else { Insert::Redundant };
            }
            let bit = wi * WORD_BITS + self.scratch[wi].trailing_zeros() as usize;
            debug_assert!(bit < self.width);
            match self.pivot_slot[bit] {
                Some(slot) => {
                    let src = &self.rows[slot * self.stride..(slot + 1) * self.stride];
                    // Stored rows are zero below their pivot word.
                    for k in wi..self.stride {
                        self.scratch[k] ^= src[k];
                    }
                    rhs ^= self.rhs[slot];
                }
                None => {
                    self.pivot_slot[bit] = Some(self.rhs.len());
                    self.rows.extend_from_slice(&self.scratch);
                    self.rhs.push(rhs);
                    return Insert::Pivot;
                }
            }
        }
    }

    /// Back-substitution; only valid at full rank.
    fn solve(&self) -> BitVector {
        debug_assert_eq!(self.rank(), self.width);
        let mut x = BitVector::zeros(self.width);
        for bit in (0..self.width).rev() {
            let slot = self.pivot_slot[bit].expect("full rank");
            let row = &self.rows[slot * self.stride..(slot + 1) * self.stride];
            // x[bit] is still zero, and every other bit of `row` is above `bit`.
            let v = self.rhs[slot] ^ parity_of_and(row, x.words());
            x.set(bit, v);
        }
        x
    }
}

/// Row rank over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    let mut basis = EchelonBasis::new(m.cols());
    for r in 0..m.rows() {
        basis.insert(m.row_words(r), false);
        if basis.rank() == m.cols() {
            break;
        }
    }
    basis.rank()
}

/// Decodes `r ≈ x^T · g` where `g` is `N × L` and `r` has length `L`.
///
/// The result is `Unique` iff the surviving columns of `g` have rank `N`.
pub fn solve_erased(g: &BitMatrix, r: &ErasedVector) -> Result<DecodeResult, DecodeError> {
    if r.len() != g.cols() {
        return Err(DecodeError::DimensionMismatch {
            expected: g.cols(),
            got: r.len(),
        });
    }
    solve_erased_columns(&g.transpose(), r)
}

/// Same as [`solve_erased`], but takes the generator already transposed: row
/// `j` of `columns` is column `j` of the generator, i.e. the equation that
/// codeword position `j` imposes on the message.
pub fn solve_erased_columns(
    columns: &BitMatrix,
    r: &ErasedVector,
) -> Result<DecodeResult, DecodeError> {
    if r.len() != columns.rows() {
        return Err(DecodeError::DimensionMismatch {
            expected: columns.rows(),
            got: r.len(),
        });
    }
    let n = columns.cols();
    let mut basis = EchelonBasis::new(n);
    for (j, bit) in r.surviving() {
        if let Insert::Contradiction = basis.insert(columns.row_words(j), bit) {
            return Err(DecodeError::Inconsistent);
        }
    }
    if basis.rank() == n {
        Ok(DecodeResult::Unique(basis.solve()))
    } else {
        Ok(DecodeResult::Ambiguous)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Rank by exhaustive search: the largest k such that some k rows are
    /// linearly independent, decided by enumerating all nonzero combinations.
    fn brute_rank(m: &BitMatrix) -> usize {
        let rows: Vec<u64> = (0..m.rows())
            .map(|r| (0..m.cols()).fold(0u64, |acc, c| acc | (u64::from(m.get(r, c)) << c)))
            .collect();
        let independent = |subset: &[u64]| {
            (1u64..(1 << subset.len())).all(|mask| {
                subset
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0, |acc, (_, r)| acc ^ r)
                    != 0
            })
        };
        let mut best = 0;
        for mask in 0u64..(1 << rows.len()) {
            let k = mask.count_ones() as usize;
            if k <= best {
                continue;
            }
            let subset: Vec<u64> = (0..rows.len()).filter(|i| mask >> i & 1 == 1).map(|i| rows[i]).collect();
            if independent(&subset) {
                best = k;
            }
        }
        best
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, density: f64) -> BitMatrix {
        BitMatrix::from_fn(rows, cols, |_, _| rng.random_bool(density))
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(rank(&BitMatrix::identity(3)), 3);
        assert_eq!(rank(&BitMatrix::zeros(2, 2)), 0);
        assert_eq!(rank(&BitMatrix::from_rows(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(rank(&BitMatrix::zeros(0, 5)), 0);
    }

    #[test]
    fn rank_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let rows = rng.random_range(1..=7);
            let cols = rng.random_range(1..=9);
            let density = rng.random_range(0.1..0.9);
            let m = random_matrix(&mut rng, rows, cols, density);
            assert_eq!(rank(&m), brute_rank(&m), "{m:?}");
        }
    }

    #[test]
    fn rank_wide_matrix_crosses_word_boundary() {
        let mut m = BitMatrix::zeros(3, 200);
        m.set(0, 0, true);
        m.set(1, 64, true);
        m.set(2, 199, true);
        m.set(2, 0, true);
        assert_eq!(rank(&m), 3);
        assert_eq!(rank(&m.transpose()), 3);
    }

    #[test]
    fn systematic_part_unerased_decodes() {
        let g = BitMatrix::identity(2).hstack(&BitMatrix::zeros(2, 2));
        let r = ErasedVector::new(vec![Symbol::One, Symbol::Zero, Symbol::Erased, Symbol::Erased]);
        let out = solve_erased(&g, &r).unwrap();
        assert_eq!(out, DecodeResult::Unique(BitVector::from_bools(&[true, false])));
    }

    #[test]
    fn all_erased_is_ambiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            let g = BitMatrix::identity(n).hstack(&random_matrix(&mut rng, n, n, 0.5));
            let out = solve_erased(&g, &ErasedVector::all_erased(2 * n)).unwrap();
            assert_eq!(out.status(), DecodeStatus::Ambiguous);
        }
    }

    #[test]
    fn parity_only_decoding() {
        // x^T [I, A] with the systematic half erased; A invertible.
        let a = BitMatrix::from_rows(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let g = BitMatrix::identity(3).hstack(&a);
        let x = BitVector::from_bools(&[true, false, true]);
        let cw = g.left_mul(&x);
        let mut r = ErasedVector::from_bits(&cw);
        for i in 0..3 {
            r.set(i, Symbol::Erased);
        }
        assert_eq!(solve_erased(&g, &r).unwrap(), DecodeResult::Unique(x));
    }

    #[test]
    fn inconsistent_symbols_are_an_error() {
        let g = BitMatrix::from_rows(&[&[1, 1]]);
        let r = ErasedVector::new(vec![Symbol::Zero, Symbol::One]);
        assert_eq!(solve_erased(&g, &r), Err(DecodeError::Inconsistent));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = BitMatrix::identity(2);
        let r = ErasedVector::all_erased(3);
        assert!(matches!(
            solve_erased(&g, &r),
            Err(DecodeError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    /// For a fixed N = 3 generator, every one of the 2^6 erasure patterns is
    /// decoded with the status predicted by the brute-force rank of the
    /// surviving columns.
    #[test]
    fn exhaustive_erasure_patterns_match_rank_oracle() {
        let a = BitMatrix::from_rows(&[&[1, 0, 1], &[1, 1, 0], &[0, 1, 0]]);
        let g = BitMatrix::identity(3).hstack(&a);
        let x = BitVector::from_bools(&[true, true, false]);
        let cw = g.left_mul(&x);
        let mut unique = 0;
        for pattern in 0u32..64 {
            let mut r = ErasedVector::from_bits(&cw);
            let mut kept = Vec::new();
            for j in 0..6 {
                if pattern >> j & 1 == 1 {
                    r.set(j, Symbol::Erased);
                } else {
                    kept.push(j);
                }
            }
            let sub = BitMatrix::from_fn(3, kept.len(), |i, c| g.get(i, kept[c]));
            let expect_unique = brute_rank(&sub.transpose()) == 3;
            let out = solve_erased(&g, &r).unwrap();
            assert_eq!(out.status() == DecodeStatus::Unique, expect_unique, "pattern {pattern:06b}");
            if let DecodeResult::Unique(got) = out {
                assert_eq!(got, x);
                unique += 1;
            }
        }
        assert!(unique > 0 && unique < 64);
    }

    #[test]
    fn symbol_display() {
        let r = ErasedVector::new(vec![Symbol::One, Symbol::Erased, Symbol::Zero]);
        assert_eq!(r.to_string(), "1e0");
        assert_eq!(r.erased_count(), 1);
    }

    proptest! {
        #[test]
        fn rank_invariant_under_row_operations(
            seed in any::<u64>(),
            rows in 1usize..12,
            cols in 1usize..140,
            ops in proptest::collection::vec((0usize..12, 0usize..12, any::<bool>()), 0..30),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = random_matrix(&mut rng, rows, cols, 0.3);
            let before = rank(&m);
            prop_assert!(before <= rows.min(cols));
            for (a, b, swap) in ops {
                let (a, b) = (a % rows, b % rows);
                if swap {
                    m.swap_rows(a, b);
                } else if a != b {
                    m.add_row(a, b);
                }
            }
            prop_assert_eq!(rank(&m), before);
        }

        #[test]
        fn transpose_preserves_rank(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..90) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols, 0.2);
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}
