//! Polynomial solvers for the restricted classes PPXH(∞,2) and PPXH(2,∞),
//! and the greedy l-approximation.

use std::collections::HashSet;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{verify, Haplotype, Instance, Solution};
use crate::reduce::{is_reduced, reduce};

/// Genotypes connected by shared characters. In a reduced instance where every
/// character occurs in at most two genotypes, each class xors to the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleClass {
    pub genotypes: Vec<usize>,
}

impl CycleClass {
    pub fn support(&self, instance: &Instance) -> BitVector {
        let mut s = BitVector::zeros(instance.char_count());
        for &g in &self.genotypes {
            for c in instance.genotype(g).chars().ones() {
                s.set(c, true);
            }
        }
        s
    }

    pub fn xor_sum(&self, instance: &Instance) -> BitVector {
        let mut s = BitVector::zeros(instance.char_count());
        for &g in &self.genotypes {
            s.xor_assign(instance.genotype(g).chars());
        }
        s
    }
}

/// Partitions genotypes by the transitive closure of sharing a character.
/// Classes and their members come in input order.
pub fn cycle_classes(instance: &Instance) -> Vec<CycleClass> {
    let n = instance.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: Vec<Option<usize>> = vec![None; instance.char_count()];
    for (i, g) in instance.genotypes().iter().enumerate() {
        for c in g.chars().ones() {
            match owner[c] {
                None => owner[c] = Some(i),
                Some(j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<CycleClass> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(CycleClass {
                genotypes: Vec::new(),
            });
        }
        classes[slot[r]].genotypes.push(i);
    }
    classes
}

/// Exact solver for instances where every character occurs in at most two
/// genotypes. Size is `|X| + 1 - #classes` on a reduced instance.
///
/// Unreduced inputs are reduced first and the kernel solution lifted.
pub fn solve_inf2(instance: &Instance) -> Result<Solution> {
    if let Some((c, &o)) = instance
        .occurrences()
        .iter()
        .enumerate()
        .find(|(_, &o)| o > 2)
    {
        return Err(Error::NotInClass {
            class: "PPXH(inf,2)",
            reason: format!(
                "character {} occurs in {o} genotypes",
                instance.alphabet().name(c)
            ),
        });
    }
    if instance.is_empty() {
        return verify(instance, &[Haplotype::null(instance.char_count())]);
    }
    if !is_reduced(instance) {
        let reduced = reduce(instance)?;
        let kernel = solve_inf2(reduced.instance())?;
        return reduced.lift(kernel.haplotypes());
    }

    let m = instance.char_count();
    let mut haps = vec![Haplotype::null(m)];
    for class in cycle_classes(instance) {
        if class.genotypes.len() == 1 {
            // pendant at the null haplotype
            haps.push(Haplotype::new(
                instance.genotype(class.genotypes[0]).chars().clone(),
            ));
            continue;
        }
        let mut prefix = BitVector::zeros(m);
        for &g in &class.genotypes[..class.genotypes.len() - 1] {
            prefix.xor_assign(instance.genotype(g).chars());
            haps.push(Haplotype::new(prefix.clone()));
        }
        if !prefix
            .xored(instance.genotype(*class.genotypes.last().unwrap()).chars())
            .is_zero()
        {
            return Err(Error::Internal("cycle class does not close".into()));
        }
    }
    verify(instance, &haps)
}

/// Exact solver for instances whose genotypes have at most two characters:
/// the null row plus one unit row per independent character, with dependent
/// characters filled in from their certificates. Size is `rank + 1`.
pub fn solve_2inf(instance: &Instance) -> Result<Solution> {
    if let Some(g) = instance
        .genotypes()
        .iter()
        .find(|g| g.chars().count_ones() > 2)
    {
        return Err(Error::NotInClass {
            class: "PPXH(2,inf)",
            reason: format!(
                "genotype {} has more than two characters",
                instance.alphabet().format_set(g.chars())
            ),
        });
    }
    let m = instance.char_count();
    let basis = instance.matrix().independent_columns();
    let mut rows: Vec<BitVector> = Vec::with_capacity(basis.rank() + 1);
    rows.push(BitVector::zeros(m));
    for &p in basis.pivots() {
        rows.push(BitVector::unit(m, p));
    }
    for (dep, cert) in basis.certificates() {
        for r in &mut rows {
            let bit = cert.iter().fold(false, |acc, &c| acc ^ r.get(c));
            r.set(dep, bit);
        }
    }
    let haps: Vec<Haplotype> = rows.into_iter().map(Haplotype::new).collect();
    verify(instance, &haps)
}

/// Greedy approximation with factor `l`, the largest number of genotypes
/// sharing one character. Characters are taken in alphabet order.
pub fn solve_approx(instance: &Instance) -> Result<Solution> {
    let m = instance.char_count();
    let mut haps: Vec<BitVector> = vec![BitVector::zeros(m)];
    let mut present: HashSet<BitVector> = haps.iter().cloned().collect();
    let mut remaining: Vec<usize> = (0..instance.len()).collect();

    for alpha in 0..m {
        if remaining.is_empty() {
            break;
        }
        let (take, keep): (Vec<usize>, Vec<usize>) = remaining
            .iter()
            .partition(|&&g| instance.genotype(g).chars().get(alpha));
        if take.is_empty() {
            continue;
        }
        for g in take {
            let x = instance.genotype(g).chars().clone();
            if present.insert(x.clone()) {
                haps.push(x);
            }
        }
        remaining = keep
            .into_iter()
            .filter(|&g| {
                let x = instance.genotype(g).chars();
                !haps.iter().any(|h| present.contains(&h.xored(x)))
            })
            .collect();
    }
    let haps: Vec<Haplotype> = haps.into_iter().map(Haplotype::new).collect();
    verify(instance, &haps)
}
