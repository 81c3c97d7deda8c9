//! Kernelization: drop dependent characters and characters that occur in a
//! single genotype, then lift kernel solutions back to the original instance.

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{normalize_with_null, verify, Genotype, Haplotype, Instance, Solution};

/// One replayable kernelization step. Characters are positions in the
/// original alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// Column `column` equalled the xor of the columns in `basis` on every
    /// genotype present at the time.
    DropDependentColumn { column: usize, basis: Vec<usize> },
    /// Column `column` occurred only in `genotype`, which was removed with it.
    /// The genotype is stored over the original alphabet and only carries the
    /// columns that were still present when it was removed.
    DropUniqueCharacter { column: usize, genotype: BitVector },
}

/// A kernel together with the trace needed to lift its solutions.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    instance: Instance,
    columns: Vec<usize>,
    trace: Vec<ReductionStep>,
    original: Instance,
}

impl ReducedInstance {
    /// The kernel over its own (restricted) alphabet.
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Original alphabet positions of the kernel's characters.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn trace(&self) -> &[ReductionStep] {
        &self.trace
    }

    pub fn original(&self) -> &Instance {
        &self.original
    }

    pub fn unique_steps(&self) -> usize {
        self.trace
            .iter()
            .filter(|s| matches!(s, ReductionStep::DropUniqueCharacter { .. }))
            .count()
    }

    /// Lower bound on any solution of the kernel: `m + 1`, or 2 for a single genotype.
    pub fn lower_bound(&self) -> usize {
        lower_bound(&self.instance)
    }

    /// Wraps an instance that is already reduced, with an empty trace.
    /// Fails if the instance violates the reduced-instance conditions.
    pub fn assume_reduced(instance: Instance) -> Result<Self> {
        if !is_reduced(&instance) {
            return Err(Error::Usage("instance is not reduced".into()));
        }
        Ok(Self {
            columns: (0..instance.char_count()).collect(),
            original: instance.clone(),
            instance,
            trace: Vec::new(),
        })
    }

    /// Lifts a solution of the kernel to a solution of the original instance.
    pub fn lift(&self, kernel_solution: &[Haplotype]) -> Result<Solution> {
        verify(&self.instance, kernel_solution)
            .map_err(|e| Error::Usage(format!("kernel solution does not verify: {e}")))?;
        let width = self.original.char_count();
        let normalized = normalize_with_null(kernel_solution);
        let mut haps: Vec<BitVector> = normalized
            .iter()
            .map(|h| {
                let mut full = BitVector::zeros(width);
                for c in h.chars().ones() {
                    full.set(self.columns[c], true);
                }
                full
            })
            .collect();
        if haps.is_empty() {
            haps.push(BitVector::zeros(width));
        }

        for step in self.trace.iter().rev() {
            match step {
                ReductionStep::DropDependentColumn { column, basis } => {
                    for h in &mut haps {
                        let bit = basis.iter().fold(false, |acc, &b| acc ^ h.get(b));
                        h.set(*column, bit);
                    }
                }
                ReductionStep::DropUniqueCharacter { genotype, .. } => {
                    // pendant edge at the null haplotype
                    haps.push(genotype.clone());
                }
            }
        }
        let haps: Vec<Haplotype> = haps.into_iter().map(Haplotype::new).collect();
        verify(&self.original, &haps)
            .map_err(|e| Error::Internal(format!("lifted solution does not verify: {e}")))
    }
}

/// `m + 1` for a kernel with at least two genotypes, 2 for a single genotype.
pub fn lower_bound(instance: &Instance) -> usize {
    if instance.len() <= 1 {
        2
    } else {
        instance.char_count() + 1
    }
}

/// True when the instance has one genotype, or independent columns with
/// every character in at least two genotypes.
pub fn is_reduced(instance: &Instance) -> bool {
    if instance.len() == 1 {
        return true;
    }
    instance.matrix().rank() == instance.char_count()
        && instance.occurrences().iter().all(|&o| o >= 2)
}

/// Runs both reductions to a fixpoint.
///
/// Each round drops every dependent column (leftmost-pivot basis), then sweeps
/// characters in alphabet order removing those that occur in exactly one
/// genotype together with that genotype. A sweep stops once a single genotype
/// remains, so the kernel is never empty for a non-empty input.
pub fn reduce(instance: &Instance) -> Result<ReducedInstance> {
    if instance.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let width = instance.char_count();
    let mut columns: Vec<usize> = (0..width).collect();
    // rows over the original alphabet; inactive columns are kept at zero
    let mut rows: Vec<BitVector> = instance
        .genotypes()
        .iter()
        .map(|g| g.chars().clone())
        .collect();
    let mut trace = Vec::new();

    loop {
        let mut changed = false;

        let current = restrict(&rows, &columns);
        let basis = current.independent_columns();
        if basis.rank() < columns.len() {
            changed = true;
            for (dep, cert) in basis.certificates() {
                trace.push(ReductionStep::DropDependentColumn {
                    column: columns[dep],
                    basis: cert.iter().map(|&c| columns[c]).collect(),
                });
            }
            let dropped: Vec<usize> = basis.dependents().map(|d| columns[d]).collect();
            for r in &mut rows {
                for &c in &dropped {
                    r.set(c, false);
                }
            }
            columns = basis.pivots().iter().map(|&p| columns[p]).collect();
        }

        if rows.len() <= 1 {
            break;
        }

        let mut k = 0;
        while k < columns.len() && rows.len() > 1 {
            let col = columns[k];
            let holders: Vec<usize> = (0..rows.len())
                .filter(|&r| rows[r].get(col))
                .take(2)
                .collect();
            if holders.len() == 1 {
                let genotype = rows.remove(holders[0]);
                trace.push(ReductionStep::DropUniqueCharacter {
                    column: col,
                    genotype,
                });
                columns.remove(k);
                changed = true;
            } else {
                k += 1;
            }
        }

        if !changed {
            break;
        }
    }

    let kernel_rows = restrict(&rows, &columns);
    let alphabet = instance.alphabet().select(&columns);
    let genotypes = kernel_rows
        .rows()
        .iter()
        .cloned()
        .map(Genotype::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::Internal("kernel contains an empty genotype".into()))?;
    let kernel = Instance::new(alphabet, genotypes)
        .map_err(|e| Error::Internal(format!("kernel is malformed: {e}")))?;
    Ok(ReducedInstance {
        instance: kernel,
        columns,
        trace,
        original: instance.clone(),
    })
}

fn restrict(rows: &[BitVector], columns: &[usize]) -> crate::bitlin::BitMatrix {
    crate::bitlin::BitMatrix::from_rows(
        columns.len(),
        rows.iter().map(|r| r.select(columns)).collect(),
    )
    .expect("selected rows share a width")
}
