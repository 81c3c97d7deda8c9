//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p ppxh-core --test acceptance`.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use ppxh_core::bench::{run_cell, BenchCell};
use ppxh_core::bitlin::BitVector;
use ppxh_core::fpt::{decide_k, solve_exact, Decision, FptConfig, GrayEnumerator};
use ppxh_core::generate::generate;
use ppxh_core::graphreal::{
    brute_force_realize, realize, verify_realization, FamilySet, RealizationFamily,
};
use ppxh_core::heuristic::{heu, heu_best_of_permutations, HeuristicConfig};
use ppxh_core::model::{build_xor_graph, verify, Alphabet, Haplotype, Instance, Solution};
use ppxh_core::oracle::{brute_min, OracleBudget};
use ppxh_core::poly::{cycle_classes, solve_2inf, solve_approx, solve_inf2};
use ppxh_core::reduce::{is_reduced, lower_bound, reduce, ReducedInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Solver outputs on reduced instances checked against the `m + 1` bound.
static BOUND_CHECKS: AtomicUsize = AtomicUsize::new(0);
static BOUND_VIOLATIONS: AtomicUsize = AtomicUsize::new(0);

fn check_bound(kernel: &Instance, size: usize) {
    BOUND_CHECKS.fetch_add(1, Ordering::Relaxed);
    if size < lower_bound(kernel) {
        BOUND_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    }
}

fn oracle() -> OracleBudget {
    OracleBudget {
        max_characters: 4,
        max_solution_size: 8,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sets(x: &[&str]) -> Instance {
    Instance::from_sets(x).unwrap()
}

fn haps(a: &Alphabet, list: &[&str]) -> Vec<Haplotype> {
    list.iter()
        .map(|s| Haplotype::new(a.parse_set(s).unwrap()))
        .collect()
}

/// Kernel of a small generated instance, or `None` if it is too wide.
fn small_kernel(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> Option<Instance> {
    let m = rng.gen_range(2..=5);
    let h = rng.gen_range(3..=6).min(1 << m);
    let n = rng.gen_range(2..=(h * (h - 1) / 2).min(8));
    let g = generate(n, h, m, rng.gen()).ok()?;
    let k = reduce(&g.instance).ok()?.instance().clone();
    (k.char_count() <= max_m && k.len() <= max_n).then_some(k)
}

// 1 -------------------------------------------------------------------------

fn worked_example() -> Outcome {
    let start = Instant::now();
    let x = sets(&["a b", "a b c", "b c", "c d e", "a", "e", "a c e"]);
    let h = haps(
        x.alphabet(),
        &["", "c d", "a b c d", "a c", "a d", "d", "e"],
    );
    let s = verify(&x, &h).map_err(|e| e.to_string())?;
    ensure(s.len() == 7, || "haplotype count".into())?;
    let g = build_xor_graph(&x, &s).map_err(|e| e.to_string())?;
    ensure(g.vertices().len() == 7 && g.edges().len() == 7, || {
        "graph size".into()
    })?;

    // expected edges, as haplotype index pairs
    let expected: HashSet<(usize, usize)> =
        [(1, 2), (2, 5), (2, 4), (3, 6), (1, 6), (0, 6), (4, 5)]
            .into_iter()
            .collect();
    let got: HashSet<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (pos(&h, &g.vertices()[u]), pos(&h, &g.vertices()[v]));
            (a.min(b), a.max(b))
        })
        .collect();
    ensure(got == expected, || {
        format!("edges {got:?} differ from the expected list")
    })?;
    let mut d = g.degrees();
    d.sort_unstable();
    ensure(d == vec![1, 1, 2, 2, 2, 3, 3], || format!("degrees {d:?}"))?;
    ensure(g.fundamental_cycle_check(), || "cycle check".into())?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!(
        "7 vertices, 7 edges, degrees {d:?}, edge list as expected, {t:?}"
    ))
}

fn pos(h: &[Haplotype], v: &Haplotype) -> usize {
    h.iter().position(|x| x == v).unwrap()
}

// 2 -------------------------------------------------------------------------

fn cycle_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let heur = HeuristicConfig {
        permutations: 2,
        ..Default::default()
    };
    let fpt = FptConfig {
        budget_bits: 20,
        threads: 1,
    };
    let (mut instances, mut graphs) = (0, 0);
    while instances < 1000 {
        let m = rng.gen_range(2..=10);
        let h = rng.gen_range(3..=10).min(1 << m);
        let n = rng.gen_range(1..=(h * (h - 1) / 2).min(20));
        let Ok(g) = generate(n, h, m, rng.gen()) else {
            continue;
        };
        let x = g.instance;
        instances += 1;
        let r = reduce(&x).map_err(|e| e.to_string())?;
        let kernel = r.instance();

        let mut outputs: Vec<Solution> = Vec::new();
        outputs.push(heu_best_of_permutations(&x, &heur).map_err(|e| e.to_string())?);
        let approx = solve_approx(kernel).map_err(|e| e.to_string())?;
        check_bound(kernel, approx.len());
        outputs.push(r.lift(approx.haplotypes()).map_err(|e| e.to_string())?);
        let h = heu(&r, &heur).map_err(|e| e.to_string())?;
        check_bound(kernel, h.len());
        if x.max_occurrence() <= 2 {
            outputs.push(solve_inf2(&x).map_err(|e| e.to_string())?);
        }
        if x.max_genotype_size() <= 2 {
            outputs.push(solve_2inf(&x).map_err(|e| e.to_string())?);
        }
        match solve_exact(&x, fpt) {
            Ok(s) => outputs.push(s),
            Err(ppxh_core::Error::Budget(_)) => {}
            Err(e) => return Err(e.to_string()),
        }
        for s in outputs {
            let g = build_xor_graph(&x, &s).map_err(|e| e.to_string())?;
            graphs += 1;
            ensure(g.fundamental_cycle_check(), || {
                format!("cycle check failed on {x:?}")
            })?;
        }
    }
    Ok(format!(
        "{instances} instances, {graphs} xor-graphs, 0 failures"
    ))
}

// 3 -------------------------------------------------------------------------

fn exact_vs_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut sizes = [0usize; 8];
    while checked < 100 {
        let Some(k) = small_kernel(&mut rng, 4, 6) else {
            continue;
        };
        let exact = solve_exact(&k, FptConfig::default()).map_err(|e| e.to_string())?;
        let best = brute_min(&k, oracle()).map_err(|e| e.to_string())?;
        ensure(exact.len() == best.len(), || {
            format!("exact {} vs oracle {} on {k:?}", exact.len(), best.len())
        })?;
        check_bound(&k, exact.len());
        check_bound(&k, best.len());
        let r = ReducedInstance::assume_reduced(k.clone()).map_err(|e| e.to_string())?;
        let below = best.len() - 1;
        if below >= 1 {
            let d = decide_k(&r, below, FptConfig::default()).map_err(|e| e.to_string())?;
            ensure(matches!(d, Decision::No), || {
                format!("found a solution below the optimum on {k:?}")
            })?;
        }
        sizes[best.len().min(7)] += 1;
        checked += 1;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!(
        "100 kernels agree, optimum histogram {sizes:?}, {t:.1?}"
    ))
}

// 4 -------------------------------------------------------------------------

/// Random instance in which every character occurs in at most two genotypes.
fn inf2_instance(rng: &mut ChaCha8Rng) -> Option<Instance> {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=6);
    let mut rows = vec![BitVector::zeros(m); n];
    for c in 0..m {
        let holders = rng.gen_range(1..=2.min(n));
        let mut picked = HashSet::new();
        while picked.len() < holders {
            picked.insert(rng.gen_range(0..n));
        }
        for r in picked {
            rows[r].set(c, true);
        }
    }
    let mut seen = HashSet::new();
    rows.retain(|r| !r.is_zero() && seen.insert(r.clone()));
    Instance::from_rows(Alphabet::letters(m), rows).ok()
}

/// Random instance whose genotypes have at most two characters.
fn two_inf_instance(rng: &mut ChaCha8Rng) -> Option<Instance> {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=8);
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for _ in 0..n {
        let mut r = BitVector::zeros(m);
        r.set(rng.gen_range(0..m), true);
        if rng.gen_bool(0.6) {
            r.set(rng.gen_range(0..m), true);
        }
        if !r.is_zero() && seen.insert(r.clone()) {
            rows.push(r);
        }
    }
    Instance::from_rows(Alphabet::letters(m), rows).ok()
}

fn restricted_classes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut inf2 = 0;
    while inf2 < 100 {
        let Some(x) = inf2_instance(&mut rng) else {
            continue;
        };
        let best = brute_min(&x, oracle()).map_err(|e| e.to_string())?.len();
        let got = solve_inf2(&x).map_err(|e| e.to_string())?.len();
        ensure(got == best, || {
            format!("inf2 {got} vs oracle {best} on {x:?}")
        })?;
        let r = reduce(&x).map_err(|e| e.to_string())?;
        let k = r.instance();
        let classes = cycle_classes(k);
        // a lone genotype is a pendant at h0 rather than a cycle
        let pendants = classes.iter().filter(|c| c.genotypes.len() == 1).count();
        ensure(pendants == 0 || k.len() == 1, || {
            format!("singleton class in kernel {k:?}")
        })?;
        let formula = k.len() + 1 - classes.len() + pendants;
        let kernel_size = solve_inf2(k).map_err(|e| e.to_string())?.len();
        check_bound(k, kernel_size);
        ensure(kernel_size == formula, || {
            format!("kernel size {kernel_size} vs formula {formula}")
        })?;
        ensure(formula + r.unique_steps() == best, || {
            format!("formula {formula} vs oracle {best} on {x:?}")
        })?;
        inf2 += 1;
    }
    let mut two = 0;
    while two < 100 {
        let Some(x) = two_inf_instance(&mut rng) else {
            continue;
        };
        let best = brute_min(&x, oracle()).map_err(|e| e.to_string())?.len();
        let got = solve_2inf(&x).map_err(|e| e.to_string())?.len();
        let rank = x.matrix().rank();
        let r = reduce(&x).map_err(|e| e.to_string())?;
        let bound = r.lower_bound() + r.unique_steps();
        ensure(got == rank + 1 && got == bound && got == best, || {
            format!(
                "two-inf {got}, rank+1 {}, bound {bound}, oracle {best} on {x:?}",
                rank + 1
            )
        })?;
        two += 1;
    }
    Ok("100 PPXH(inf,2) and 100 PPXH(2,inf) instances, 0 deviations".into())
}

// 5 -------------------------------------------------------------------------

fn approximation_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ratios = Vec::with_capacity(500);
    while ratios.len() < 500 {
        let m = rng.gen_range(3..=20);
        let h = rng.gen_range(4..=30).min(1 << m);
        let n = rng.gen_range(2..=(h * (h - 1) / 2).min(60));
        let Ok(g) = generate(n, h, m, rng.gen()) else {
            continue;
        };
        let k = reduce(&g.instance)
            .map_err(|e| e.to_string())?
            .instance()
            .clone();
        if k.len() < 2 {
            continue;
        }
        let s = solve_approx(&k).map_err(|e| e.to_string())?.len();
        let (l, km) = (k.max_occurrence(), k.char_count());
        ensure(s <= l * km + 1, || {
            format!("size {s} above l*m+1 = {}", l * km + 1)
        })?;
        ensure(s > km, || format!("size {s} below m+1 = {}", km + 1))?;
        check_bound(&k, s);
        ratios.push(s as f64 / (km + 1) as f64);
    }
    ratios.sort_by(f64::total_cmp);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(format!(
        "500 kernels within [m+1, l*m+1]; size/(m+1): min {:.2}, median {:.2}, mean {mean:.2}, max {:.2}",
        ratios[0],
        ratios[ratios.len() / 2],
        ratios[ratios.len() - 1]
    ))
}

// 6 -------------------------------------------------------------------------

fn gray_codes() -> Outcome {
    for bits in 1..=16 {
        let mut g = GrayEnumerator::new(bits);
        let mut seen = vec![false; 1 << bits];
        seen[0] = true;
        let (mut count, mut prev) = (1usize, 0u64);
        while g.advance().is_some() {
            let s = g.state();
            ensure((s ^ prev).count_ones() == 1, || {
                format!("{bits} bits: {prev:b} -> {s:b}")
            })?;
            ensure(!seen[s as usize], || format!("{bits} bits: {s:b} repeated"))?;
            seen[s as usize] = true;
            prev = s;
            count += 1;
        }
        ensure(count == 1 << bits, || {
            format!("{bits} bits: {count} states")
        })?;
    }
    Ok("km = 1..16: all 2^km states once, single-bit steps".into())
}

// 7 -------------------------------------------------------------------------

fn realization_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..200 {
        let t = rng.gen_range(2..=6);
        let count = rng.gen_range(0..=5);
        let p = rng.gen_range(0.3..0.8);
        let mut sets = Vec::new();
        for i in 0..count {
            let mut s: Vec<usize> = (0..t).filter(|_| rng.gen_bool(p)).collect();
            while s.len() < 2 {
                let e = rng.gen_range(0..t);
                if !s.contains(&e) {
                    s.push(e);
                }
            }
            sets.push(FamilySet::new(i, s));
        }
        let f = RealizationFamily::new(t, sets).map_err(|e| e.to_string())?;
        let fast = realize(&f).map_err(|e| e.to_string())?;
        let slow = brute_force_realize(&f).map_err(|e| e.to_string())?;
        ensure(fast.is_some() == slow.is_some(), || {
            format!("verdicts differ on {f:?}")
        })?;
        if let Some(r) = fast {
            ensure(verify_realization(&f, &r), || {
                format!("realization of {f:?} fails verification")
            })?;
            yes += 1;
        } else {
            no += 1;
        }
    }
    let four = RealizationFamily::new(
        3,
        vec![
            FamilySet::new(0, [0, 1]),
            FamilySet::new(1, [1, 2]),
            FamilySet::new(2, [0, 2]),
            FamilySet::new(3, [0, 1, 2]),
        ],
    )
    .unwrap();
    ensure(realize(&four).unwrap().is_none(), || {
        "fixture realized".into()
    })?;
    ensure(brute_force_realize(&four).unwrap().is_none(), || {
        "fixture realized by search".into()
    })?;
    Ok(format!(
        "200 families agree ({yes} realizable, {no} not); 4-set fixture rejected by both"
    ))
}

// 8 -------------------------------------------------------------------------

fn desk_grid_ratios() -> Outcome {
    let cfg = HeuristicConfig::default();
    let cells: [(usize, usize, f64, f64); 5] = [
        (25, 25, 0.0, 1.10),
        (25, 33, 0.0, 1.10),
        (25, 66, 0.0, 1.10),
        (33, 25, 1.2, 1.8),
        (66, 66, 0.0, 1.10),
    ];
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for (h, m, lo, hi) in cells {
        let cell = BenchCell {
            n: 100,
            h,
            m,
            instances: 10,
        };
        let row = run_cell(cell, 0, &cfg).map_err(|e| e.to_string())?;
        let r = row.avg_ratio;
        report.push(format!(
            "h={h} m={m}: r={r:.2} in [{lo}, {hi}] {:.1}s",
            row.wall_seconds
        ));
        if r < lo || r > hi || row.wall_seconds >= 300.0 {
            failures.push(format!(
                "h={h} m={m}: r={r:.2} outside [{lo}, {hi}] or {:.1}s",
                row.wall_seconds
            ));
        }
    }
    if failures.is_empty() {
        Ok(report.join("; "))
    } else {
        Err(format!(
            "{}; all cells: {}",
            failures.join("; "),
            report.join("; ")
        ))
    }
}

// 9 -------------------------------------------------------------------------

fn square_instances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 50 {
        let m = rng.gen_range(2..=16);
        let rows: Vec<BitVector> = (0..m)
            .map(|_| BitVector::from_bools(&(0..m).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>()))
            .collect();
        let Ok(x) = Instance::from_rows(Alphabet::numbered(m), rows) else {
            continue;
        };
        if !is_reduced(&x) {
            continue;
        }
        let r = ReducedInstance::assume_reduced(x).map_err(|e| e.to_string())?;
        let s = heu(&r, &HeuristicConfig::default()).map_err(|e| e.to_string())?;
        check_bound(r.instance(), s.len());
        ensure(s.len() == m + 1, || format!("size {} for m = {m}", s.len()))?;
        done += 1;
    }
    Ok("50 reduced n == m instances solved with exactly m+1".into())
}

// 10 ------------------------------------------------------------------------

fn scale_smoke() -> Outcome {
    let g = generate(90, 90, 90_000, 10).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = reduce(&g.instance).map_err(|e| e.to_string())?;
    let kernel = (r.instance().len(), r.instance().char_count());
    let s = heu_best_of_permutations(&g.instance, &HeuristicConfig::default())
        .map_err(|e| e.to_string())?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:?}"))?;
    Ok(format!(
        "90 x 90000: kernel {} x {}, {} haplotypes ({} generating), {t:.1?}",
        kernel.0,
        kernel.1,
        s.len(),
        g.initial_distinct_used
    ))
}

// 11 ------------------------------------------------------------------------

fn lower_bound_safety() -> Outcome {
    // a dedicated sweep on top of every check recorded by the other criteria
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let heur = HeuristicConfig::default();
    for _ in 0..300 {
        let Some(k) = small_kernel(&mut rng, 6, 12) else {
            continue;
        };
        let r = ReducedInstance::assume_reduced(k.clone()).map_err(|e| e.to_string())?;
        check_bound(&k, heu(&r, &heur).map_err(|e| e.to_string())?.len());
        check_bound(&k, solve_approx(&k).map_err(|e| e.to_string())?.len());
        if k.char_count() <= 4 {
            check_bound(
                &k,
                brute_min(&k, oracle()).map_err(|e| e.to_string())?.len(),
            );
        }
        if let Ok(s) = solve_exact(
            &k,
            FptConfig {
                budget_bits: 20,
                threads: 1,
            },
        ) {
            check_bound(&k, s.len());
        }
    }
    let (checks, bad) = (
        BOUND_CHECKS.load(Ordering::Relaxed),
        BOUND_VIOLATIONS.load(Ordering::Relaxed),
    );
    ensure(bad == 0, || format!("{bad} of {checks} outputs below m+1"))?;
    Ok(format!(
        "{checks} solver outputs on reduced instances, none below m+1"
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("worked example fixture", worked_example),
        ("cycle-sum property", cycle_sums),
        ("exact vs oracle", exact_vs_oracle),
        ("restricted-class optimality", restricted_classes),
        ("approximation bound", approximation_bound),
        ("Gray enumerator", gray_codes),
        ("realization oracle agreement", realization_oracle),
        ("pure-random desk grid", desk_grid_ratios),
        ("heuristic n == m", square_instances),
        ("scale smoke test", scale_smoke),
        ("lower-bound safety", lower_bound_safety),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{t:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{t:.1?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
