//! Fixed-parameter exact solver: enumerate every `k x m` haplotype matrix in
//! Gray-code order and keep track of which genotypes the current rows resolve.
//!
//! Consecutive matrices differ in one bit, hence in one row, so each step only
//! retracts the pairs of that row and probes its `k - 1` new pair xors in a
//! binary trie of the genotypes.

use std::thread;

use log::debug;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{verify, Haplotype, Instance, Solution};
use crate::oracle::pair_bound;
use crate::reduce::{reduce, ReducedInstance};

/// Default ceiling on `k * m`, the number of enumerated bits.
pub const DEFAULT_BUDGET_BITS: usize = 26;

/// Reflected binary Gray code over `bit_count` bits, starting at zero.
#[derive(Clone, Debug)]
pub struct GrayEnumerator {
    bit_count: usize,
    state: u64,
    counter: u64,
    last: Option<usize>,
}

impl GrayEnumerator {
    pub fn new(bit_count: usize) -> Self {
        assert!(bit_count < 64, "at most 63 bits can be enumerated");
        Self {
            bit_count,
            state: 0,
            counter: 0,
            last: None,
        }
    }

    pub fn bit_count(&self) -> usize {
        self.bit_count
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Index of the bit flipped by the latest advance.
    pub fn last_step(&self) -> Option<usize> {
        self.last
    }

    /// Flips one bit and returns its index, or `None` once all `2^bits`
    /// states have been produced.
    pub fn advance(&mut self) -> Option<usize> {
        let next = self.counter + 1;
        if next >> self.bit_count != 0 {
            return None;
        }
        self.counter = next;
        let bit = next.trailing_zeros() as usize;
        self.state ^= 1 << bit;
        self.last = Some(bit);
        Some(bit)
    }
}

/// `(row, position)` of bit `index` in a row-major matrix with `m` columns.
pub fn bit_to_cell(index: usize, m: usize) -> (usize, usize) {
    (index / m, index % m)
}

/// Binary trie over `width`-bit keys mapping each genotype row to its index.
#[derive(Clone, Debug)]
pub struct GenotypeTrie {
    width: usize,
    // children[node] = [zero child, one child]; 0 means absent (root is 0)
    children: Vec<[u32; 2]>,
    leaf: Vec<u32>,
}

const NO_LEAF: u32 = u32::MAX;

impl GenotypeTrie {
    pub fn new(width: usize, keys: &[u64]) -> Self {
        assert!(width <= 64);
        let mut t = Self {
            width,
            children: vec![[0, 0]],
            leaf: vec![NO_LEAF],
        };
        for (i, &k) in keys.iter().enumerate() {
            t.insert(k, i as u32);
        }
        t
    }

    fn insert(&mut self, key: u64, value: u32) {
        let mut node = 0usize;
        for b in 0..self.width {
            let bit = ((key >> b) & 1) as usize;
            if self.children[node][bit] == 0 {
                self.children.push([0, 0]);
                self.leaf.push(NO_LEAF);
                self.children[node][bit] = (self.children.len() - 1) as u32;
            }
            node = self.children[node][bit] as usize;
        }
        self.leaf[node] = value;
    }

    #[inline]
    pub fn lookup(&self, key: u64) -> Option<usize> {
        let mut node = 0usize;
        for b in 0..self.width {
            let next = self.children[node][((key >> b) & 1) as usize];
            if next == 0 {
                return None;
            }
            node = next as usize;
        }
        let v = self.leaf[node];
        (v != NO_LEAF).then_some(v as usize)
    }
}

/// Incremental count of the row pairs resolving each genotype.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionState {
    resolved_by_how_many: Vec<u32>,
    /// Per row, the `(row, row, genotype)` triples it takes part in.
    list_resolved: Vec<Vec<(u32, u32, u32)>>,
    total_resolved: usize,
}

impl ResolutionState {
    pub fn new(rows: usize, genotypes: usize) -> Self {
        Self {
            resolved_by_how_many: vec![0; genotypes],
            list_resolved: vec![Vec::new(); rows],
            total_resolved: 0,
        }
    }

    /// State for `rows` computed directly from every pair.
    pub fn from_scratch(rows: &[u64], trie: &GenotypeTrie, genotypes: usize) -> Self {
        let mut s = Self::new(rows.len(), genotypes);
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if let Some(g) = trie.lookup(rows[i] ^ rows[j]) {
                    s.record(i, j, g);
                }
            }
        }
        s
    }

    pub fn resolved_by_how_many(&self) -> &[u32] {
        &self.resolved_by_how_many
    }

    pub fn list_resolved(&self, row: usize) -> &[(u32, u32, u32)] {
        &self.list_resolved[row]
    }

    pub fn total_resolved(&self) -> usize {
        self.total_resolved
    }

    fn record(&mut self, i: usize, j: usize, g: usize) {
        let c = &mut self.resolved_by_how_many[g];
        *c += 1;
        if *c == 1 {
            self.total_resolved += 1;
        }
        let t = (i.min(j) as u32, i.max(j) as u32, g as u32);
        self.list_resolved[i].push(t);
        self.list_resolved[j].push(t);
    }

    /// Re-derives every pair involving `row` after it changed.
    pub fn update_row(&mut self, row: usize, rows: &[u64], trie: &GenotypeTrie) {
        let old = std::mem::take(&mut self.list_resolved[row]);
        for &(a, b, g) in &old {
            let c = &mut self.resolved_by_how_many[g as usize];
            *c -= 1;
            if *c == 0 {
                self.total_resolved -= 1;
            }
            let other = if a as usize == row { b } else { a } as usize;
            let list = &mut self.list_resolved[other];
            let pos = list
                .iter()
                .position(|&t| t == (a, b, g))
                .expect("triple is listed under both rows");
            list.swap_remove(pos);
        }
        let mut reuse = old;
        reuse.clear();
        self.list_resolved[row] = reuse;

        let h = rows[row];
        for (other, &o) in rows.iter().enumerate() {
            // equal rows give the zero key, which no genotype has
            if other != row {
                if let Some(g) = trie.lookup(h ^ o) {
                    self.record(row, other, g);
                }
            }
        }
    }

    /// Same counters and the same triple sets per row, ignoring list order.
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.resolved_by_how_many != other.resolved_by_how_many
            || self.total_resolved != other.total_resolved
            || self.list_resolved.len() != other.list_resolved.len()
        {
            return false;
        }
        self.list_resolved
            .iter()
            .zip(&other.list_resolved)
            .all(|(a, b)| {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FptConfig {
    /// Largest `k * m` that may be enumerated.
    pub budget_bits: usize,
    /// Worker threads; 1 runs the single deterministic sequence.
    pub threads: usize,
}

impl Default for FptConfig {
    fn default() -> Self {
        Self {
            budget_bits: DEFAULT_BUDGET_BITS,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Decision {
    Found(Solution),
    No,
}

impl Decision {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Decision::Found(s) => Some(s),
            Decision::No => None,
        }
    }
}

/// Is there a solution of the reduced instance with at most `k` haplotypes?
pub fn decide_k(reduced: &ReducedInstance, k: usize, cfg: FptConfig) -> Result<Decision> {
    let x = reduced.instance();
    let (n, m) = (x.len(), x.char_count());
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if k * (k - 1) / 2 < n || k <= m {
        return Ok(Decision::No);
    }
    if k > n {
        let mut haps = vec![Haplotype::null(m)];
        haps.extend(
            x.genotypes()
                .iter()
                .map(|g| Haplotype::new(g.chars().clone())),
        );
        return Ok(Decision::Found(verify(x, &haps)?));
    }
    let bits = k * m;
    if bits > cfg.budget_bits {
        return Err(Error::Budget(format!(
            "k = {k}, m = {m}: {bits} bits exceeds the budget of {}",
            cfg.budget_bits
        )));
    }
    debug!("enumerating k = {k}, m = {m}, km = {bits}");

    let keys: Vec<u64> = x
        .genotypes()
        .iter()
        .map(|g| g.chars().to_u64().expect("m is within the bit budget"))
        .collect();
    let trie = GenotypeTrie::new(m, &keys);

    let fixed = if cfg.threads > 1 {
        (usize::BITS - (cfg.threads - 1).leading_zeros()) as usize
    } else {
        0
    }
    .min(bits);
    let found = if fixed == 0 {
        search(&trie, n, k, m, bits, 0)
    } else {
        let workers = 1usize << fixed;
        let results: Vec<Option<Vec<u64>>> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let trie = &trie;
                    s.spawn(move || search(trie, n, k, m, bits - fixed, w as u64))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        results.into_iter().flatten().next()
    };

    match found {
        Some(rows) => {
            let mut rows = rows;
            rows.sort_unstable();
            rows.dedup();
            let haps: Vec<Haplotype> = rows
                .into_iter()
                .map(|r| Haplotype::new(BitVector::from_u64(m, r)))
                .collect();
            Ok(Decision::Found(verify(x, &haps)?))
        }
        None => Ok(Decision::No),
    }
}

/// Gray enumeration of the low `free` bits with the high bits fixed to `prefix`.
fn search(
    trie: &GenotypeTrie,
    n: usize,
    k: usize,
    m: usize,
    free: usize,
    prefix: u64,
) -> Option<Vec<u64>> {
    let mut rows = vec![0u64; k];
    for b in 0..(k * m - free) {
        if (prefix >> b) & 1 == 1 {
            let (r, p) = bit_to_cell(free + b, m);
            rows[r] |= 1 << p;
        }
    }
    let mut state = ResolutionState::from_scratch(&rows, trie, n);
    // the all-zero matrix resolves nothing, so only n = 0 could stop here
    if state.total_resolved == n && rows.iter().any(|&r| r != 0) {
        return Some(rows);
    }
    let mut gray = GrayEnumerator::new(free);
    while let Some(bit) = gray.advance() {
        let (r, p) = bit_to_cell(bit, m);
        rows[r] ^= 1 << p;
        state.update_row(r, &rows, trie);
        if state.total_resolved == n {
            return Some(rows);
        }
    }
    None
}

/// A minimum solution: reduce, try `k = max(m + 1, pair bound)` upward, lift.
pub fn solve_exact(instance: &Instance, cfg: FptConfig) -> Result<Solution> {
    if instance.is_empty() {
        return verify(instance, &[Haplotype::null(instance.char_count())]);
    }
    let reduced = reduce(instance)?;
    let x = reduced.instance();
    let start = (x.char_count() + 1).max(pair_bound(x.len()));
    for k in start..=x.len() + 1 {
        if let Decision::Found(s) = decide_k(&reduced, k, cfg)? {
            return reduced.lift(s.haplotypes());
        }
    }
    Err(Error::Internal("star solution was not found".into()))
}
