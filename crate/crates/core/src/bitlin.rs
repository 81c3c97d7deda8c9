//! Bit-packed GF(2) vectors and matrices.
//!
//! Rows of genotype and haplotype matrices live in [`BitVector`]s packed
//! into `u64` words. Gauss elimination follows the leftmost-pivot rule with
//! row swaps only, so the selected independent set is always the
//! lexicographically first maximal one in index order.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
    }

    /// Builds a vector from the positions of its one bits.
    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    /// Low `len` bits of `word`, bit `i` of the word at position `i`.
    pub fn from_u64(len: usize, word: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 positions");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { !0 } else { (1u64 << len) - 1 };
            v.words[0] = word & mask;
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; `None` when longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len={})",
            self.len
        );
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set position.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Ascending positions of the one bits.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    /// Positionwise exclusive-or.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.try_xor_assign(other)?;
        Ok(out)
    }

    pub fn try_xor_assign(&mut self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::Usage(format!(
                "xor of vectors with lengths {} and {}",
                self.len, other.len
            )));
        }
        self.xor_assign_unchecked(other);
        Ok(())
    }

    /// Panicking variant used on hot paths where lengths are invariant.
    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor length mismatch");
        self.xor_assign_unchecked(other);
    }

    #[inline]
    fn xor_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Xor without the `Result` wrapper; panics on length mismatch.
    pub fn xored(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// True when every one bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "subset length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Keeps only the listed positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Self {
        let mut out = Self::zeros(positions.len());
        for (j, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(j, true);
            }
        }
        out
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Row-major matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Usage(format!(
                "row {bad} has length {} but the matrix has {cols} columns",
                rows[bad].len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows like `"10110"`; all rows must have equal length.
    pub fn from_bit_strs(rows: &[&str]) -> Result<Self> {
        let rows: Vec<BitVector> = rows
            .iter()
            .map(|r| BitVector::from_bit_str(r))
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, rows)
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Column `c` as a vector of length `row_count`.
    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Submatrix keeping the listed columns in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            cols: cols.len(),
            rows: self.rows.iter().map(|r| r.select(cols)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        eliminate(&self.rows).pivots.len()
    }

    /// Maximal independent column set with certificates for every other column.
    pub fn independent_columns(&self) -> Basis {
        eliminate(self.transpose().rows())
    }

    /// Maximal independent row set with certificates for every other row.
    pub fn independent_rows(&self) -> Basis {
        eliminate(&self.rows)
    }
}

/// Result of Gauss elimination over an ordered list of vectors.
///
/// `pivots` holds the selected independent indices in ascending order. Each
/// dependent index carries the subset of pivots whose xor reproduces it; the
/// subset is stored as a bit mask over *positions in `pivots`* to keep it
/// compact when thousands of columns depend on a handful of pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pivots: Vec<usize>,
    dependents: Vec<(usize, BitVector)>,
}

impl Basis {
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, index: usize) -> bool {
        self.pivots.binary_search(&index).is_ok()
    }

    /// Dependent indices in ascending order.
    pub fn dependents(&self) -> impl Iterator<Item = usize> + '_ {
        self.dependents.iter().map(|(i, _)| *i)
    }

    /// Pivot indices whose xor equals the vector at `index`; `None` for pivots.
    pub fn certificate(&self, index: usize) -> Option<Vec<usize>> {
        let pos = self
            .dependents
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()?;
        Some(
            self.dependents[pos]
                .1
                .ones()
                .map(|p| self.pivots[p])
                .collect(),
        )
    }

    /// Certificate as a mask over positions in [`Basis::pivots`].
    pub fn certificate_mask(&self, index: usize) -> Option<&BitVector> {
        self.dependents
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|p| &self.dependents[p].1)
    }

    /// All `(dependent index, pivot indices)` pairs in ascending order.
    pub fn certificates(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        self.dependents
            .iter()
            .map(|(i, m)| (*i, m.ones().map(|p| self.pivots[p]).collect()))
    }
}

/// Leftmost-pivot elimination over `vectors` in index order.
fn eliminate(vectors: &[BitVector]) -> Basis {
    let limit = vectors.first().map_or(0, |v| v.len().min(vectors.len()));
    // echelon rows: (reduced vector, pivot bit, combination over basis positions)
    let mut echelon: Vec<(BitVector, usize, BitVector)> = Vec::with_capacity(limit);
    let mut pivots = Vec::with_capacity(limit);
    let mut dependents = Vec::new();

    for (index, v) in vectors.iter().enumerate() {
        let mut reduced = v.clone();
        let mut combo = BitVector::zeros(limit.max(1));
        for (row, pivot_bit, row_combo) in &echelon {
            if reduced.get(*pivot_bit) {
                reduced.xor_assign(row);
                combo.xor_assign(row_combo);
            }
        }
        match reduced.first_one() {
            Some(bit) => {
                let position = pivots.len();
                combo.set(position, true);
                pivots.push(index);
                echelon.push((reduced, bit, combo));
            }
            None => dependents.push((index, combo)),
        }
    }

    // Certificates reference pivot positions; the buffer was sized to `limit`
    // but only `pivots.len()` of those positions are meaningful.
    let width = pivots.len();
    let dependents = dependents
        .into_iter()
        .map(|(i, combo)| (i, BitVector::from_ones(width, combo.ones())))
        .collect();
    Basis { pivots, dependents }
}
