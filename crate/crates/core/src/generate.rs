//! Seeded pure-random instances: genotypes are xors of random pairs drawn
//! from a pool of random haplotypes.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{Alphabet, Genotype, Haplotype, Instance};

/// Redraws allowed per requested genotype before giving up.
const RETRIES_PER_GENOTYPE: usize = 1000;

#[derive(Clone, Debug)]
pub struct Generated {
    pub instance: Instance,
    /// The haplotype pool, in draw order.
    pub haplotypes: Vec<Haplotype>,
    /// How many pool members took part in at least one pair.
    pub initial_distinct_used: usize,
}

/// `n` genotypes over `m` characters from a pool of `h` distinct haplotypes.
///
/// A pair whose xor repeats an earlier genotype is redrawn.
pub fn generate(n: usize, h: usize, m: usize, seed: u64) -> Result<Generated> {
    if h < 2 {
        return Err(Error::Usage(
            "the haplotype pool needs at least two members".into(),
        ));
    }
    if m < usize::BITS as usize - 1 && h > 1usize << m {
        return Err(Error::Usage(format!(
            "cannot draw {h} distinct haplotypes over {m} characters"
        )));
    }
    if n > h * (h - 1) / 2 {
        return Err(Error::Usage(format!(
            "{h} haplotypes give at most {} distinct pairs",
            h * (h - 1) / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pool: Vec<BitVector> = Vec::with_capacity(h);
    let mut seen = HashSet::with_capacity(h);
    while pool.len() < h {
        let bits: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
        let v = BitVector::from_bools(&bits);
        if seen.insert(v.clone()) {
            pool.push(v);
        }
    }

    let mut genotypes = Vec::with_capacity(n);
    let mut present = HashSet::with_capacity(n);
    let mut used = vec![false; h];
    let mut budget = RETRIES_PER_GENOTYPE * n.max(1);
    while genotypes.len() < n {
        if budget == 0 {
            return Err(Error::Infeasible(format!(
                "only {} distinct genotypes after exhausting the redraw budget",
                genotypes.len()
            )));
        }
        budget -= 1;
        let i = rng.gen_range(0..h);
        let j = rng.gen_range(0..h - 1);
        let j = if j >= i { j + 1 } else { j };
        let x = pool[i].xored(&pool[j]);
        if present.insert(x.clone()) {
            used[i] = true;
            used[j] = true;
            genotypes.push(Genotype::new(x).expect("distinct haplotypes xor to a non-empty set"));
        }
    }

    Ok(Generated {
        instance: Instance::new(Alphabet::numbered(m), genotypes)?,
        haplotypes: pool.into_iter().map(Haplotype::new).collect(),
        initial_distinct_used: used.iter().filter(|&&u| u).count(),
    })
}
