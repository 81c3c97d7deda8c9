//! Realization heuristic.
//!
//! Gauss elimination on the genotype rows splits a reduced instance into an
//! independent basis `T` and dependent genotypes `C`. Each `c ∈ C` together
//! with the basis genotypes it is a combination of forms a candidate cycle
//! (xor-sum empty). A maximal realizable family of candidate cycles, taken in
//! row order, is realized as a graph whose spanning tree is labeled by `T`;
//! labeling its vertices gives haplotypes resolving every genotype on an
//! edge. The remaining genotypes are reduced and solved recursively.

use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::graphreal::{FamilySet, RealizationSession};
use crate::model::{label_vertices, translate, verify, Haplotype, Instance, Solution};
use crate::reduce::{reduce, ReducedInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    /// Row orders tried by [`heu_best_of_permutations`]; the first is the input order.
    pub permutations: usize,
    pub seed: u64,
    pub max_recursion: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            permutations: 10,
            seed: 0,
            max_recursion: 1000,
        }
    }
}

/// Runs the heuristic on a reduced instance; the result is over the kernel alphabet.
pub fn heu(reduced: &ReducedInstance, cfg: &HeuristicConfig) -> Result<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x = reduced.instance();
    let haps = heu_level(x, cfg, &mut rng, 0)?;
    verify(x, &haps)
}

fn heu_level(
    x: &Instance,
    cfg: &HeuristicConfig,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<Vec<Haplotype>> {
    if depth > cfg.max_recursion {
        return Err(Error::Internal(format!(
            "heuristic recursion exceeded {} levels",
            cfg.max_recursion
        )));
    }
    let (n, m) = (x.len(), x.char_count());
    if n <= m {
        return Ok(star(x));
    }

    let basis = x.matrix().independent_rows();
    let tree = basis.pivots().to_vec();
    let mut tree_pos = vec![usize::MAX; n];
    for (i, &t) in tree.iter().enumerate() {
        tree_pos[t] = i;
    }
    let mut session = RealizationSession::new(tree.len());
    for dep in 0..n {
        let Some(cert) = basis.certificate(dep) else {
            continue;
        };
        debug_assert!({
            let mut s = x.genotype(dep).chars().clone();
            for &t in &cert {
                s.xor_assign(x.genotype(t).chars());
            }
            s.is_zero()
        });
        session.add_set(FamilySet::new(dep, cert.iter().map(|&t| tree_pos[t])))?;
    }

    let r = session.realization();
    let mut edges: Vec<(usize, usize, BitVector)> = Vec::with_capacity(n);
    let mut realized = vec![false; n];
    for (i, &(a, b)) in r.tree_edges.iter().enumerate() {
        edges.push((a, b, x.genotype(tree[i]).chars().clone()));
        realized[tree[i]] = true;
    }
    for &(c, (a, b)) in &r.cotree_edges {
        edges.push((a, b, x.genotype(c).chars().clone()));
        realized[c] = true;
    }
    let labels = label_vertices(r.vertex_count, m, &edges)?;
    let v = rng.gen_range(0..labels.len());
    let mut haps = translate(&labels, &labels[v]);
    debug!(
        "level {depth}: {n} genotypes, {} realized on {} vertices",
        edges.len(),
        labels.len()
    );

    let rest: Vec<usize> = (0..n).filter(|&i| !realized[i]).collect();
    if rest.is_empty() {
        return Ok(haps);
    }
    let remainder = x.subset(&rest);
    let sub = reduce(&remainder)?;
    let sub_haps = heu_level(sub.instance(), cfg, rng, depth + 1)?;
    let lifted = sub.lift(&sub_haps)?;
    for h in lifted.into_haplotypes() {
        if !haps.contains(&h) {
            haps.push(h);
        }
    }
    Ok(haps)
}

/// The null haplotype plus every genotype as a haplotype.
fn star(x: &Instance) -> Vec<Haplotype> {
    let mut haps = vec![Haplotype::null(x.char_count())];
    haps.extend(
        x.genotypes()
            .iter()
            .map(|g| Haplotype::new(g.chars().clone())),
    );
    haps
}

/// Smallest solution over `cfg.permutations` row orders, each reduced,
/// solved by [`heu`] and lifted. Ties keep the earliest run.
pub fn heu_best_of_permutations(x: &Instance, cfg: &HeuristicConfig) -> Result<Solution> {
    if cfg.permutations == 0 {
        return Err(Error::Usage("at least one permutation is required".into()));
    }
    if x.is_empty() {
        return verify(x, &[Haplotype::null(x.char_count())]);
    }
    let mut best: Option<Solution> = None;
    for p in 0..cfg.permutations {
        let run_seed = cfg.seed.wrapping_add(p as u64);
        let mut order: Vec<usize> = (0..x.len()).collect();
        if p > 0 {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(run_seed));
        }
        let permuted = x.permuted(&order);
        let reduced = reduce(&permuted)?;
        let run_cfg = HeuristicConfig {
            seed: run_seed,
            ..*cfg
        };
        let kernel = heu(&reduced, &run_cfg)?;
        let lifted = reduced.lift(kernel.haplotypes())?;
        let solution = verify(x, lifted.haplotypes())?;
        debug!("permutation {p}: {} haplotypes", solution.len());
        if best.as_ref().is_none_or(|b| solution.len() < b.len()) {
            best = Some(solution);
        }
    }
    Ok(best.expect("at least one run"))
}

/// Result size over the number of distinct haplotypes that generated the instance.
pub fn ratio_r(result_size: usize, initial_distinct_used: usize) -> Result<f64> {
    if initial_distinct_used == 0 {
        return Err(Error::Usage(
            "ratio needs at least one generating haplotype".into(),
        ));
    }
    Ok(result_size as f64 / initial_distinct_used as f64)
}

/// Two-decimal rendering used in reports.
pub fn format_ratio(r: f64) -> String {
    format!("{r:.2}")
}
