//! Pure-random benchmark: per `(n, h, m)` cell, generate instances, run the
//! permutation heuristic and average the results.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::Result;
use crate::generate::generate;
use crate::heuristic::{heu_best_of_permutations, ratio_r, HeuristicConfig};

pub const CSV_HEADER: &str =
    "n,h,m,instances,avg_independent_chars,avg_initial_haplotypes,avg_result_size,avg_ratio,wall_seconds";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchCell {
    pub n: usize,
    pub h: usize,
    pub m: usize,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub cell: BenchCell,
    pub avg_independent_chars: f64,
    pub avg_initial_haplotypes: f64,
    pub avg_result_size: f64,
    /// Mean of the per-instance ratios.
    pub avg_ratio: f64,
    pub wall_seconds: f64,
}

/// n = 100, h and m over {25, 33, 66}, 10 instances per cell.
pub fn desk_grid() -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for h in [25, 33, 66] {
        for m in [25, 33, 66] {
            cells.push(BenchCell {
                n: 100,
                h,
                m,
                instances: 10,
            });
        }
    }
    cells
}

/// n in {100, 200, 300, 400}; h and m over {n/4, n/3, 2n/3}, rounded down.
pub fn full_grid() -> Vec<BenchCell> {
    let mut cells = Vec::new();
    for n in [100, 200, 300, 400] {
        let sizes = [n / 4, n / 3, 2 * n / 3];
        for h in sizes {
            for m in sizes {
                cells.push(BenchCell {
                    n,
                    h,
                    m,
                    instances: 10,
                });
            }
        }
    }
    cells
}

/// Seed of instance `i` in `cell`, so cells can be run in any order.
pub fn instance_seed(base: u64, cell: &BenchCell, i: usize) -> u64 {
    let tag = ((cell.n as u64) << 40) ^ ((cell.h as u64) << 20) ^ (cell.m as u64);
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag.wrapping_mul(1_000_003) ^ i as u64
}

pub fn run_cell(cell: BenchCell, base_seed: u64, cfg: &HeuristicConfig) -> Result<BenchRow> {
    let start = Instant::now();
    let (mut rank, mut initial, mut result, mut ratio) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..cell.instances {
        let seed = instance_seed(base_seed, &cell, i);
        let g = generate(cell.n, cell.h, cell.m, seed)?;
        let run_cfg = HeuristicConfig { seed, ..*cfg };
        let s = heu_best_of_permutations(&g.instance, &run_cfg)?;
        rank += g.instance.matrix().rank() as f64;
        initial += g.initial_distinct_used as f64;
        result += s.len() as f64;
        ratio += ratio_r(s.len(), g.initial_distinct_used)?;
    }
    let k = cell.instances.max(1) as f64;
    Ok(BenchRow {
        cell,
        avg_independent_chars: rank / k,
        avg_initial_haplotypes: initial / k,
        avg_result_size: result / k,
        avg_ratio: ratio / k,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.2},{:.2},{:.2},{:.2},{:.3}",
            r.cell.n,
            r.cell.h,
            r.cell.m,
            r.cell.instances,
            r.avg_independent_chars,
            r.avg_initial_haplotypes,
            r.avg_result_size,
            r.avg_ratio,
            r.wall_seconds
        );
    }
    out
}
