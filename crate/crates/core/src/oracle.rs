//! Exhaustive minimum-solution search for small instances.
//!
//! Instances that fit the character budget are searched directly, without
//! going through the reduction.

use std::collections::HashSet;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{verify, Haplotype, Instance, Solution};
use crate::reduce::{lower_bound, reduce};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_characters: usize,
    pub max_solution_size: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_characters: 4,
            max_solution_size: 6,
        }
    }
}

/// A minimum set of haplotypes resolving `instance`.
///
/// Searches supersets of the null haplotype in increasing size; within a
/// size, candidate sets are visited in lexicographic order of their codes, so
/// the reported optimum is the lexicographically first one. Instances wider
/// than the budget are reduced first and the kernel optimum is lifted.
pub fn brute_min(instance: &Instance, budget: OracleBudget) -> Result<Solution> {
    if instance.is_empty() {
        return verify(instance, &[Haplotype::null(instance.char_count())]);
    }
    if instance.char_count() <= budget.max_characters {
        return search(instance, 2, budget.max_solution_size);
    }
    let reduced = reduce(instance)?;
    let kernel = reduced.instance();
    if kernel.char_count() > budget.max_characters {
        return Err(Error::Budget(format!(
            "kernel has {} characters, oracle budget is {}",
            kernel.char_count(),
            budget.max_characters
        )));
    }
    let cap = budget
        .max_solution_size
        .saturating_sub(reduced.unique_steps());
    let best = search(kernel, lower_bound(kernel), cap)?;
    reduced.lift(best.haplotypes())
}

/// Smallest `s` with `s * (s - 1) / 2 >= n`.
pub fn pair_bound(n: usize) -> usize {
    let mut s = 1;
    while s * (s - 1) / 2 < n {
        s += 1;
    }
    s
}

fn search(instance: &Instance, start: usize, cap: usize) -> Result<Solution> {
    let m = instance.char_count();
    if m > 20 {
        return Err(Error::Budget(format!(
            "{m} characters is beyond exhaustive search"
        )));
    }
    let targets: HashSet<u64> = instance
        .genotypes()
        .iter()
        .map(|g| g.chars().to_u64().expect("width checked above"))
        .collect();
    let n = targets.len();
    let candidates: Vec<u64> = (1..(1u64 << m)).collect();
    let start = start.max(pair_bound(n)).max(2);

    for size in start..=cap {
        let mut chosen = vec![0u64];
        if let Some(found) = extend(&candidates, 0, size - 1, &mut chosen, &targets) {
            let haps: Vec<Haplotype> = found
                .into_iter()
                .map(|w| Haplotype::new(BitVector::from_u64(m, w)))
                .collect();
            return verify(instance, &haps);
        }
    }
    Err(Error::Budget(format!(
        "no solution with at most {cap} haplotypes"
    )))
}

fn extend(
    candidates: &[u64],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<u64>,
    targets: &HashSet<u64>,
) -> Option<Vec<u64>> {
    if remaining == 0 {
        return resolves_all(chosen, targets).then(|| chosen.clone());
    }
    for i in from..=candidates.len().saturating_sub(remaining) {
        chosen.push(candidates[i]);
        if let Some(found) = extend(candidates, i + 1, remaining - 1, chosen, targets) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

fn resolves_all(haps: &[u64], targets: &HashSet<u64>) -> bool {
    let mut hit = HashSet::with_capacity(targets.len());
    for (i, a) in haps.iter().enumerate() {
        for b in &haps[i + 1..] {
            let x = a ^ b;
            if targets.contains(&x) {
                hit.insert(x);
            }
        }
    }
    hit.len() == targets.len()
}
