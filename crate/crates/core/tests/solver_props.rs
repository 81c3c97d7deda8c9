use std::collections::HashSet;

use ppxh_core::bitlin::{BitMatrix, BitVector};
use ppxh_core::fpt::{solve_exact, FptConfig, GenotypeTrie, ResolutionState};
use ppxh_core::heuristic::{heu, heu_best_of_permutations, HeuristicConfig};
use ppxh_core::model::{build_xor_graph, translate, verify, Alphabet, Haplotype, Instance};
use ppxh_core::oracle::{brute_min, pair_bound, OracleBudget};
use ppxh_core::poly::solve_approx;
use ppxh_core::reduce::{is_reduced, lower_bound, reduce};
use proptest::prelude::*;

/// Instances with `1..=max_m` characters and up to `max_n` distinct genotypes.
fn instance(max_m: usize, max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_m).prop_flat_map(move |m| {
        prop::collection::vec(1u64..(1 << m), 1..=max_n).prop_map(move |words| {
            let mut seen = HashSet::new();
            let rows: Vec<BitVector> = words
                .into_iter()
                .filter(|w| seen.insert(*w))
                .map(|w| BitVector::from_u64(m, w))
                .collect();
            Instance::from_rows(Alphabet::letters(m), rows).unwrap()
        })
    })
}

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
            BitMatrix::from_rows(c, rows.iter().map(|b| BitVector::from_bools(b)).collect())
                .unwrap()
        })
    })
}

fn oracle() -> OracleBudget {
    OracleBudget {
        max_characters: 4,
        max_solution_size: 8,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn row_and_column_rank_agree(a in matrix()) {
        let r = a.rank();
        prop_assert_eq!(r, a.transpose().rank());
        prop_assert!(r <= a.row_count().min(a.col_count()));
        prop_assert_eq!(a.independent_columns().rank(), r);
    }

    #[test]
    fn certificates_recombine_their_row(a in matrix()) {
        let basis = a.independent_rows();
        prop_assert_eq!(basis.dependents().count() + basis.rank(), a.row_count());
        for (dep, cert) in basis.certificates() {
            let mut acc = a.row(dep).clone();
            for t in cert {
                prop_assert!(basis.is_pivot(t));
                acc.xor_assign(a.row(t));
            }
            prop_assert!(acc.is_zero());
        }
    }

    #[test]
    fn star_verifies_and_translates(x in instance(8, 10), pick in any::<prop::sample::Index>()) {
        let mut star = vec![Haplotype::null(x.char_count())];
        star.extend(x.genotypes().iter().map(|g| Haplotype::new(g.chars().clone())));
        let s = verify(&x, &star).unwrap();
        let t = star[pick.index(star.len())].clone();
        let moved = translate(&star, &t);
        prop_assert!(moved.iter().any(Haplotype::is_null));
        prop_assert_eq!(verify(&x, &moved).unwrap().len(), s.len());

        let g = build_xor_graph(&x, &s).unwrap();
        prop_assert!(g.fundamental_cycle_check());
        for alpha in 0..x.char_count() {
            // the edges carrying a character separate the haplotypes that have it
            let cut = g.character_cut(alpha).unwrap();
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                let crosses = g.vertices()[u].chars().get(alpha) != g.vertices()[v].chars().get(alpha);
                prop_assert_eq!(crosses, cut.contains(&i));
            }
        }
    }

    #[test]
    fn kernel_is_reduced_and_lifts(x in instance(8, 10)) {
        let r = reduce(&x).unwrap();
        let k = r.instance();
        prop_assert!(is_reduced(k));
        prop_assert!(!k.is_empty());
        prop_assert_eq!(lower_bound(k), r.lower_bound());
        prop_assert_eq!(r.lower_bound() + r.unique_steps(), x.matrix().rank() + 1);

        let approx = solve_approx(k).unwrap();
        prop_assert!(approx.len() >= lower_bound(k));
        let lifted = r.lift(approx.haplotypes()).unwrap();
        prop_assert_eq!(lifted.len(), approx.len() + r.unique_steps());
        verify(&x, lifted.haplotypes()).unwrap();
    }

    #[test]
    fn optimum_splits_over_reduction(x in instance(4, 6)) {
        let opt = brute_min(&x, oracle()).unwrap().len();
        let r = reduce(&x).unwrap();
        let kernel_opt = brute_min(r.instance(), oracle()).unwrap().len();
        prop_assert_eq!(opt, kernel_opt + r.unique_steps());
        // a reduced instance with optimum k has at most C(k, 2) genotypes
        prop_assert!(r.instance().len() <= kernel_opt * (kernel_opt - 1) / 2);
        prop_assert!(pair_bound(r.instance().len()) <= kernel_opt);
        prop_assert_eq!(solve_exact(&x, FptConfig::default()).unwrap().len(), opt);
    }

    #[test]
    fn heuristic_output_verifies(x in instance(10, 14), seed in any::<u64>()) {
        let cfg = HeuristicConfig { permutations: 3, seed, ..Default::default() };
        let s = heu_best_of_permutations(&x, &cfg).unwrap();
        verify(&x, s.haplotypes()).unwrap();
        let r = reduce(&x).unwrap();
        let k = heu(&r, &cfg).unwrap();
        prop_assert!(k.len() >= r.lower_bound());
        prop_assert!(s.len() >= r.lower_bound() + r.unique_steps());
    }

    #[test]
    fn trie_matches_linear_scan(
        width in 1usize..20,
        raw in prop::collection::vec(any::<u64>(), 0..30),
        probes in prop::collection::vec(any::<u64>(), 1..30),
    ) {
        let mask = (1u64 << width) - 1;
        let mut keys: Vec<u64> = raw.iter().map(|k| k & mask).collect();
        let mut seen = HashSet::new();
        keys.retain(|k| seen.insert(*k));
        let trie = GenotypeTrie::new(width, &keys);
        for p in probes.iter().map(|p| p & mask).chain(keys.iter().copied()) {
            prop_assert_eq!(trie.lookup(p), keys.iter().position(|&k| k == p));
        }
    }

    #[test]
    fn incremental_state_matches_scratch(
        width in 1usize..8,
        raw_keys in prop::collection::vec(1u64..256, 1..12),
        start in prop::collection::vec(0u64..256, 2..7),
        edits in prop::collection::vec((any::<prop::sample::Index>(), 0u64..256), 1..40),
    ) {
        let mask = (1u64 << width) - 1;
        let mut seen = HashSet::new();
        let keys: Vec<u64> = raw_keys.iter().map(|k| k & mask).filter(|&k| k != 0 && seen.insert(k)).collect();
        let trie = GenotypeTrie::new(width, &keys);
        let mut rows: Vec<u64> = start.iter().map(|r| r & mask).collect();
        let mut state = ResolutionState::from_scratch(&rows, &trie, keys.len());
        for (idx, value) in edits {
            let row = idx.index(rows.len());
            rows[row] = value & mask;
            state.update_row(row, &rows, &trie);
            let fresh = ResolutionState::from_scratch(&rows, &trie, keys.len());
            prop_assert!(state.equivalent(&fresh));
            prop_assert_eq!(state.total_resolved(), fresh.total_resolved());
        }
    }
}
