use ppxh_core::graphreal::{
    brute_force_realize, realize, verify_realization, FamilySet, RealizationFamily,
    RealizationSession,
};
use proptest::prelude::*;

/// Up to `max_sets` sets of at least two distinct tree elements each.
fn family_strategy(max_tree: usize, max_sets: usize) -> impl Strategy<Value = RealizationFamily> {
    (2..=max_tree).prop_flat_map(move |t| {
        let set = proptest::sample::subsequence((0..t).collect::<Vec<_>>(), 2..=t);
        proptest::collection::vec(set, 0..=max_sets).prop_map(move |sets| {
            let sets = sets
                .into_iter()
                .enumerate()
                .map(|(i, s)| FamilySet::new(i, s))
                .collect();
            RealizationFamily::new(t, sets).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn agrees_with_exhaustive_search(f in family_strategy(6, 5)) {
        let fast = realize(&f).unwrap();
        let slow = brute_force_realize(&f).unwrap();
        prop_assert_eq!(fast.is_some(), slow.is_some(), "family {:?}", f);
        if let Some(r) = &fast {
            prop_assert!(verify_realization(&f, r));
        }
        if let Some(r) = &slow {
            prop_assert!(verify_realization(&f, r));
        }
    }

    #[test]
    fn greedy_session_is_maximal(f in family_strategy(6, 6)) {
        let mut session = RealizationSession::new(f.tree_count());
        let mut rejected = Vec::new();
        for s in f.sets() {
            if !session.add_set(s.clone()).unwrap() {
                rejected.push(s.clone());
            }
        }
        let accepted = session.family();
        prop_assert!(realize(&accepted).unwrap().is_some());
        prop_assert!(verify_realization(&accepted, session.realization()));
        for s in rejected {
            let mut sets = accepted.sets().to_vec();
            sets.push(s);
            let extended = RealizationFamily::new(f.tree_count(), sets).unwrap();
            prop_assert!(realize(&extended).unwrap().is_none());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Larger trees: every positive answer must still verify.
    #[test]
    fn larger_families_verify(f in family_strategy(14, 8)) {
        if let Some(r) = realize(&f).unwrap() {
            prop_assert!(verify_realization(&f, &r));
        }
    }
}

/// Fundamental cycles of a random graph are always realizable.
#[test]
fn families_read_off_random_graphs_are_realizable() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let vertices = rng.gen_range(3..10);
        // random spanning tree: vertex v attaches below a smaller vertex
        let tree: Vec<(usize, usize)> = (1..vertices).map(|v| (rng.gen_range(0..v), v)).collect();
        let mut parent = vec![usize::MAX; vertices];
        let mut edge_of = vec![usize::MAX; vertices];
        for (e, &(p, v)) in tree.iter().enumerate() {
            parent[v] = p;
            edge_of[v] = e;
        }
        let ancestors = |mut v: usize| {
            let mut out = vec![v];
            while v != 0 {
                v = parent[v];
                out.push(v);
            }
            out
        };
        let mut sets = Vec::new();
        let mut used = std::collections::HashSet::new();
        for _ in 0..rng.gen_range(1..8) {
            let (a, b) = (rng.gen_range(0..vertices), rng.gen_range(0..vertices));
            if a == b || !used.insert((a.min(b), a.max(b))) {
                continue;
            }
            let (pa, pb) = (ancestors(a), ancestors(b));
            let path: Vec<usize> = pa
                .iter()
                .filter(|v| !pb.contains(v))
                .chain(pb.iter().filter(|v| !pa.contains(v)))
                .map(|&v| edge_of[v])
                .collect();
            if path.len() >= 2 {
                sets.push(FamilySet::new(sets.len(), path));
            }
        }
        let f = RealizationFamily::new(tree.len(), sets).unwrap();
        let r = realize(&f).unwrap();
        assert!(r.is_some(), "family {f:?} comes from a graph");
        assert!(verify_realization(&f, &r.unwrap()));
    }
}
